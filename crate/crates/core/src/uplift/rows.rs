use std::collections::{BTreeMap, HashMap, HashSet};

use super::{EnergyRow, UpliftError};
use crate::exec::Parallelism;
use crate::heading::{power_property, SystemDescriptor};
use crate::rdf::{Graph, Term, Triple};
use crate::vocab::{Iri, TermRegistry};

/// Per-heading cell counts of an uplift run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellStats {
    pub filled: usize,
    pub empty: usize,
}

struct HeadingNodes {
    device: Iri,
    power: Iri,
    property: Iri,
}

pub fn uplift_rows(
    rows: &[EnergyRow],
    descriptors: &[SystemDescriptor],
    reg: &TermRegistry,
) -> Result<(Graph, BTreeMap<String, CellStats>), UpliftError> {
    uplift_rows_with(rows, descriptors, reg, Parallelism::default())
}

/// Emits one property link per heading with at least one value and four
/// triples per non-empty cell. Row locators in errors are 1-based positions
/// in `rows`.
pub fn uplift_rows_with(
    rows: &[EnergyRow],
    descriptors: &[SystemDescriptor],
    reg: &TermRegistry,
    par: Parallelism,
) -> Result<(Graph, BTreeMap<String, CellStats>), UpliftError> {
    let v = reg.terms();
    let mut nodes: HashMap<String, HeadingNodes> = HashMap::new();
    for d in descriptors {
        nodes.insert(
            d.heading(),
            HeadingNodes {
                device: d.device_iri(reg)?,
                power: power_property(d, v).clone(),
                property: d.property_iri(reg)?,
            },
        );
    }

    let indexed: Vec<(usize, &EnergyRow)> = rows.iter().enumerate().collect();
    let per_row = par.try_map(&indexed, |(i, row)| {
        let mut out: Vec<(String, f64, [Triple; 4])> = Vec::new();
        for (heading, value) in &row.readings {
            let n = nodes
                .get(heading)
                .ok_or_else(|| UpliftError::UnknownHeading(heading.clone()))?;
            let Some(value) = *value else { continue };
            if value < 0.0 || !value.is_finite() {
                return Err(UpliftError::data(
                    format!("row {}, heading {heading}", i + 1),
                    format!("negative or non-finite reading {value}"),
                ));
            }
            let e = reg.mint_evaluation(heading, &row.utc_timestamp)?;
            out.push((
                heading.clone(),
                value,
                [
                    Triple::new(&n.property, &v.evaluation, &e),
                    Triple::new(&e, &v.rdf_type, &v.electric_power_evaluation),
                    Triple::new(&e, &v.evaluated_value, Term::double(value)?),
                    Triple::new(&e, &v.result_time, Term::date_time(&row.utc_timestamp)),
                ],
            ));
        }
        Ok((*i, *row, out))
    })?;

    let mut g = Graph::new();
    let mut stats: BTreeMap<String, CellStats> = BTreeMap::new();
    let mut seen: HashMap<(&str, chrono::DateTime<chrono::Utc>), f64> = HashMap::new();
    let mut linked: HashSet<&str> = HashSet::new();
    for (i, row, cells) in per_row {
        for (heading, value) in &row.readings {
            let s = stats.entry(heading.clone()).or_default();
            if value.is_some() {
                s.filled += 1;
            } else {
                s.empty += 1;
            }
        }
        for (heading, value, triples) in cells {
            let heading: &str = nodes.get_key_value(heading.as_str()).expect("known heading").0;
            if let Some(prev) = seen.insert((heading, row.utc_timestamp), value) {
                if prev.to_bits() != value.to_bits() {
                    return Err(UpliftError::data(
                        format!("row {}, heading {heading}", i + 1),
                        format!("conflicting duplicate reading at {}", row.utc_timestamp),
                    ));
                }
            }
            if linked.insert(heading) {
                let n = &nodes[heading];
                g.insert(Triple::new(&n.device, &n.power, &n.property));
            }
            for t in triples {
                g.insert(t);
            }
        }
    }
    Ok((g, stats))
}
