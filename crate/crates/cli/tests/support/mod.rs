#![allow(dead_code)]

pub mod http;

use std::path::{Path, PathBuf};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub const QUERIES: [&str; 10] = [
    "listing1",
    "devices",
    "producers",
    "consumers",
    "stations",
    "hot_days",
    "latest_readings",
    "localities",
    "grid_links",
    "dry_days",
];

/// `energykg serve` running as a child process; killed on drop.
pub struct ServerProcess {
    child: std::process::Child,
    // Held open so late writes to stderr do not fail.
    _stderr: std::io::BufReader<std::process::ChildStderr>,
    pub addr: std::net::SocketAddr,
}

impl ServerProcess {
    pub fn start(config: &Path, graphs: &[PathBuf]) -> ServerProcess {
        use std::io::BufRead;
        use std::process::{Command, Stdio};

        let mut child = Command::new(env!("CARGO_BIN_EXE_energykg"))
            .arg("--config")
            .arg(config)
            .arg("serve")
            .args(graphs)
            .args(["--listen", "127.0.0.1:0"])
            .env("RUST_LOG", "off")
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .expect("spawn energykg serve");
        let mut stderr = std::io::BufReader::new(child.stderr.take().unwrap());
        let mut line = String::new();
        stderr.read_line(&mut line).unwrap();
        let addr = line
            .trim()
            .strip_prefix("listening on http://")
            .and_then(|l| l.strip_suffix("/query"))
            .unwrap_or_else(|| panic!("unexpected server banner {line:?}"))
            .parse()
            .unwrap();
        ServerProcess {
            child,
            _stderr: stderr,
            addr,
        }
    }
}

impl Drop for ServerProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
