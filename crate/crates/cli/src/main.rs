use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use energykg::commands::{self, render_graph, write_output};
use energykg::service::{serve, QueryService};
use energykg::{CliError, PipelineConfig, CONFIG_ENV};
use energykg_core::query::ResultsFormat;
use energykg_core::rdf::RdfFormat;
use energykg_core::Parallelism;

#[derive(Debug, Parser)]
#[command(name = "energykg", version, about = "Household energy knowledge graph pipeline")]
struct Cli {
    /// TOML pipeline configuration.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Uplift an energy table to topology and evaluation triples.
    Convert {
        table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "ntriples")]
        format: RdfFormat,
    },
    /// Uplift daily climate records to station observations.
    Climate {
        records: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "ntriples")]
        format: RdfFormat,
    },
    /// Evaluate a query file over N-Triples graphs.
    Query {
        query: PathBuf,
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, default_value = "json")]
        results: ResultsFormat,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        limit: Option<u64>,
    },
    /// Correlate daily device energy with weather.
    Analyze {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        /// IRIs, CURIEs or column headings.
        #[arg(long, required = true, value_delimiter = ',')]
        devices: Vec<String>,
        #[arg(long, default_value_t = 2016)]
        year: i32,
        #[arg(long, value_delimiter = ',', default_value = "TMAX,PRCP")]
        datatypes: Vec<String>,
        /// Directory for correlations.csv and scatter.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Serve read-only queries over HTTP.
    Serve {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(cli.config.as_deref())?;
    let par = if cli.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::default()
    };
    match cli.command {
        Command::Convert { table, out, format } => {
            let result = commands::convert(&cfg, &table, par)?;
            write_output(out.as_deref(), &render_graph(&cfg, &result.graph, format))?;
            eprint!("{}", result.report());
        }
        Command::Climate { records, out, format } => {
            let g = commands::climate(&cfg, &records, par)?;
            write_output(out.as_deref(), &render_graph(&cfg, &g, format))?;
            eprintln!("{} triples", g.len());
        }
        Command::Query {
            query,
            graphs,
            results,
            limit,
        } => {
            let text = commands::read_query(&query)?;
            let g = commands::load_graphs(&graphs, par)?;
            let res = commands::run_query(&cfg, &g, &text, limit.map(|n| n as usize), par)?;
            write_output(None, &res.render(results))?;
        }
        Command::Analyze {
            graphs,
            devices,
            year,
            datatypes,
            out,
        } => {
            let g = commands::load_graphs(&graphs, par)?;
            let study = commands::analyze(&cfg, &g, &devices, year, &datatypes, par)?;
            for d in &study.diagnostics {
                eprintln!(
                    "{}: {} samples, {} days, {} resets{}",
                    d.device,
                    d.samples,
                    d.days,
                    d.resets.len(),
                    if d.skipped.is_empty() {
                        String::new()
                    } else {
                        format!(", skipped: {}", d.skipped.join("; "))
                    }
                );
            }
            commands::write_study(&out, &study)?;
            write_output(None, &study.table.to_csv())?;
        }
        Command::Serve { graphs, listen } => {
            let g = commands::load_graphs(&graphs, par)?;
            let svc = Arc::new(QueryService::new(cfg, g, par));
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Startup(e.to_string()))?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&listen)
                    .await
                    .map_err(|e| CliError::Startup(format!("cannot listen on {listen}: {e}")))?;
                let addr = listener.local_addr().map_err(|e| CliError::Startup(e.to_string()))?;
                eprintln!("listening on http://{addr}/query");
                serve(listener, svc, async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("energykg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
