//! The pipeline steps behind each subcommand, as library functions so tests
//! and the server share them with the binary.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use energykg_core::analysis::{run_correlation_study, StudyOutput, StudyRequest};
use energykg_core::heading::parse_heading;
use energykg_core::query::{evaluate_with, parse_query, QueryResults};
use energykg_core::rdf::{parse_ntriples_with, serialize, RdfFormat};
use energykg_core::uplift::{
    build_topology, link_weather, read_climate_records, read_energy_table, uplift_climate_with,
    uplift_rows_with, CellStats,
};
use energykg_core::{FrozenGraph, Graph, IndividualKind, Iri, Parallelism, SystemDescriptor};

use crate::{CliError, PipelineConfig};

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Writes to `out`, or standard output when absent.
pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Data(format!("standard output: {e}")))
        }
    }
}

/// Canonical (sorted) serialization of a whole graph.
pub fn render_graph(cfg: &PipelineConfig, g: &Graph, format: RdfFormat) -> String {
    serialize(&g.triples(), format, &cfg.registry)
}

#[derive(Debug)]
pub struct ConvertOutput {
    pub graph: Graph,
    /// Triples contributed by topology and weather links alone.
    pub topology_triples: usize,
    pub stats: BTreeMap<String, CellStats>,
    /// One per (country, locality) found in the headings.
    pub networks: Vec<Iri>,
}

impl ConvertOutput {
    /// The summary printed after a conversion.
    pub fn report(&self) -> String {
        let mut out = format!(
            "{} triples ({} topology, {} networks)\n",
            self.graph.len(),
            self.topology_triples,
            self.networks.len()
        );
        for (heading, s) in &self.stats {
            out.push_str(&format!("{heading}\tfilled {}\tempty {}\n", s.filled, s.empty));
        }
        out
    }
}

/// Energy table to topology plus evaluation triples. Devices are grouped into
/// one network per (country, locality); a locality with a mapped station gets
/// a weather link on its network.
pub fn convert(cfg: &PipelineConfig, table: &Path, par: Parallelism) -> Result<ConvertOutput, CliError> {
    let table = read_energy_table(open(table)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", table.display())))?;
    let descriptors: Vec<SystemDescriptor> = table
        .headings
        .iter()
        .map(|h| parse_heading(h, &cfg.roles).map_err(|e| CliError::Data(format!("column {h:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    for col in &table.ignored_columns {
        log::debug!("ignoring column {col:?}");
    }

    let mut groups: BTreeMap<(String, String), Vec<SystemDescriptor>> = BTreeMap::new();
    for d in &descriptors {
        groups
            .entry((d.country.clone(), d.locality.clone()))
            .or_default()
            .push(d.clone());
    }
    let reg = &cfg.registry;
    let mut graph = Graph::new();
    let mut networks = Vec::new();
    for ((country, locality), members) in &groups {
        let network = reg
            .mint_individual(IndividualKind::Network, &[country, locality, &cfg.network])
            .map_err(|e| CliError::Data(e.to_string()))?;
        let label = cfg.locality_labels.get(locality).map_or(locality.as_str(), String::as_str);
        graph.merge(build_topology(members, &network, label, reg)?);
        match cfg.stations.get(locality) {
            Some(station) => {
                graph.insert(link_weather(&network, station, reg));
            }
            None => log::warn!("no weather station mapped for locality {locality}"),
        }
        networks.push(network);
    }
    let topology_triples = graph.len();
    let (readings, stats) = uplift_rows_with(&table.rows, &descriptors, reg, par)?;
    graph.merge(readings);
    Ok(ConvertOutput {
        graph,
        topology_triples,
        stats,
        networks,
    })
}

/// Climate records to station observations.
pub fn climate(cfg: &PipelineConfig, records: &Path, par: Parallelism) -> Result<Graph, CliError> {
    let records = read_climate_records(open(records)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", records.display())))?;
    Ok(uplift_climate_with(&records, &cfg.datatypes, &cfg.registry, par)?)
}

/// Parses and merges N-Triples files into one immutable store.
pub fn load_graphs(paths: &[PathBuf], par: Parallelism) -> Result<FrozenGraph, CliError> {
    let mut g = Graph::new();
    for p in paths {
        let part = parse_ntriples_with(&read_text(p)?, par).map_err(|e| CliError::ntriples(p, e))?;
        log::info!("{}: {} triples", p.display(), part.len());
        g.merge(part);
    }
    Ok(g.freeze_with(par))
}

/// Parses and evaluates `text`. `limit` further caps the query's own LIMIT.
pub fn run_query(
    cfg: &PipelineConfig,
    g: &FrozenGraph,
    text: &str,
    limit: Option<usize>,
    par: Parallelism,
) -> Result<QueryResults, CliError> {
    let mut q = parse_query(text, &cfg.registry)?;
    if let Some(n) = limit {
        q.limit = Some(q.limit.map_or(n, |own| own.min(n)));
    }
    Ok(evaluate_with(g, &q, par))
}

pub fn read_query(path: &Path) -> Result<String, CliError> {
    read_text(path)
}

/// Accepts a full IRI, a CURIE, or a column heading such as `DE_KN_residential1_pv`.
pub fn resolve_device(cfg: &PipelineConfig, text: &str) -> Result<Iri, CliError> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Iri::new(inner).map_err(|e| CliError::Usage(format!("device {text:?}: {e}")));
    }
    if text.contains("://") {
        return Iri::new(text).map_err(|e| CliError::Usage(format!("device {text:?}: {e}")));
    }
    if text.contains(':') {
        return cfg
            .registry
            .expand(text)
            .map_err(|e| CliError::Usage(format!("device {text:?}: {e}")));
    }
    parse_heading(text, &cfg.roles)
        .map_err(|e| CliError::Usage(format!("device {text:?}: {e}")))?
        .device_iri(&cfg.registry)
        .map_err(|e| CliError::Usage(format!("device {text:?}: {e}")))
}

pub fn analyze(
    cfg: &PipelineConfig,
    g: &FrozenGraph,
    devices: &[String],
    year: i32,
    datatypes: &[String],
    par: Parallelism,
) -> Result<StudyOutput, CliError> {
    let request = StudyRequest {
        devices: devices.iter().map(|d| resolve_device(cfg, d)).collect::<Result<_, _>>()?,
        year,
        datatypes: datatypes.to_vec(),
    };
    Ok(run_correlation_study(g, &cfg.registry, &cfg.datatypes, &request, par)?)
}

/// Writes `correlations.csv` and `scatter.csv` into `dir`, creating it if needed.
pub fn write_study(dir: &Path, out: &StudyOutput) -> Result<(PathBuf, PathBuf), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let table = dir.join("correlations.csv");
    let scatter = dir.join("scatter.csv");
    write_output(Some(&table), &out.table.to_csv())?;
    write_output(Some(&scatter), &out.scatter_csv())?;
    Ok((table, scatter))
}
