use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use energykg_core::uplift::{parse_station_map, DatatypeRegistry};
use energykg_core::{Iri, RoleTable, TermRegistry};
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "ENERGYKG_CONFIG";
pub const DEFAULT_NETWORK: &str = "COSSMIC";

/// On-disk form. Relative paths are resolved against the config file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    base_iri: Option<String>,
    prefixes: Option<PathBuf>,
    roles: Option<PathBuf>,
    datatypes: Option<PathBuf>,
    stations: Option<PathBuf>,
    network: Option<String>,
    #[serde(default)]
    locality_labels: BTreeMap<String, String>,
}

/// Everything the commands need, loaded and validated up front.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub registry: TermRegistry,
    pub roles: RoleTable,
    pub datatypes: DatatypeRegistry,
    /// Locality code to weather station.
    pub stations: BTreeMap<String, Iri>,
    /// Last name part of every minted network IRI.
    pub network: String,
    pub locality_labels: BTreeMap<String, String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            registry: TermRegistry::default(),
            roles: RoleTable::default(),
            datatypes: DatatypeRegistry::default(),
            stations: BTreeMap::new(),
            network: DEFAULT_NETWORK.to_string(),
            locality_labels: BTreeMap::new(),
        }
    }
}

fn read(path: &Path, what: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{what} {}: {e}", path.display())))
}

impl PipelineConfig {
    /// Loads `path`, or the built-in defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(PipelineConfig::default());
        };
        let text = read(path, "config")?;
        let file: ConfigFile = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &PathBuf| if p.is_absolute() { p.clone() } else { dir.join(p) };
        let cfg_err = |what: &str, p: &PathBuf, e: &dyn std::fmt::Display| {
            CliError::Config(format!("{what} {}: {e}", resolve(p).display()))
        };

        let mut overrides = match &file.prefixes {
            Some(p) => TermRegistry::parse_prefix_map(&read(&resolve(p), "prefix map")?)
                .map_err(|e| cfg_err("prefix map", p, &e))?,
            None => Vec::new(),
        };
        // An explicit base_iri wins over an empty-prefix line in the prefix map.
        if file.base_iri.is_some() {
            overrides.retain(|(p, _)| !p.is_empty());
        }
        let base = file.base_iri.as_deref().unwrap_or(energykg_core::vocab::DEFAULT_BASE);
        let registry = TermRegistry::with_prefixes(base, overrides)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;

        let mut roles = RoleTable::default();
        if let Some(p) = &file.roles {
            roles
                .extend_from_text(&read(&resolve(p), "role table")?)
                .map_err(|e| cfg_err("role table", p, &e))?;
        }
        let mut datatypes = DatatypeRegistry::default();
        if let Some(p) = &file.datatypes {
            datatypes
                .extend_from_text(&read(&resolve(p), "datatype registry")?)
                .map_err(|e| cfg_err("datatype registry", p, &e))?;
        }
        let mut stations = BTreeMap::new();
        if let Some(p) = &file.stations {
            for (locality, iri) in parse_station_map(&read(&resolve(p), "station mapping")?, &registry)
                .map_err(|e| cfg_err("station mapping", p, &e))?
            {
                if stations.insert(locality.clone(), iri).is_some() {
                    return Err(cfg_err("station mapping", p, &format!("locality {locality} mapped twice")));
                }
            }
        }
        let network = file.network.unwrap_or_else(|| DEFAULT_NETWORK.to_string());
        if network.is_empty() || !network.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(CliError::Config(format!(
                "config {}: network name {network:?} must be non-empty ASCII alphanumerics",
                path.display()
            )));
        }
        Ok(PipelineConfig {
            registry,
            roles,
            datatypes,
            stations,
            network,
            locality_labels: file.locality_labels,
        })
    }
}
