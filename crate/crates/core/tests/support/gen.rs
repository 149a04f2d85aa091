//! Random graphs, descriptors and tables with independently known triple counts.

use std::collections::BTreeSet;

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use energykg_core::{Graph, Iri, PowerRole, RoleTable, SiteKind, SystemDescriptor, Term, Triple};
use rand::seq::IndexedRandom;
use rand::Rng;

const ALPHABET: &[char] = &['a', 'Z', '0', ' ', '"', '\\', '\n', '\r', '\t', 'é', '∀', '😀', '<', '>', '\u{7f}', '\u{1}'];

fn random_text(rng: &mut impl Rng) -> String {
    let n = rng.random_range(0..12);
    (0..n).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

fn random_iri(rng: &mut impl Rng, pool: usize) -> Iri {
    let hosts = ["http://example.org/energykg/", "https://w3id.org/seas/", "urn:x:", "http://r/a%20b/"];
    Iri::new(format!("{}n{}", hosts.choose(rng).unwrap(), rng.random_range(0..pool))).unwrap()
}

pub fn random_term(rng: &mut impl Rng, pool: usize) -> Term {
    match rng.random_range(0..7) {
        0 | 1 => Term::Iri(random_iri(rng, pool)),
        2 => Term::plain(random_text(rng)),
        3 => Term::double(rng.random_range(-1e9..1e9)).unwrap(),
        4 => Term::date_time(&DateTime::from_timestamp(rng.random_range(0..4_000_000_000), 0).unwrap()),
        5 => Term::typed(
            rng.random_range(-1000i64..1000).to_string(),
            Iri::new("http://www.w3.org/2001/XMLSchema#integer").unwrap(),
        )
        .unwrap(),
        _ => Term::typed(random_text(rng), Iri::new("http://example.org/dt#custom").unwrap()).unwrap(),
    }
}

/// Up to `max` triples over a vocabulary small enough to produce repeats.
pub fn random_graph(rng: &mut impl Rng, max: usize) -> Graph {
    let n = rng.random_range(0..=max);
    let pool = (n / 4).max(3);
    (0..n)
        .map(|_| {
            let s = random_iri(rng, pool);
            let p = random_iri(rng, 8);
            Triple::new(&s, &p, random_term(rng, pool))
        })
        .collect()
}

fn upper(rng: &mut impl Rng, n: usize) -> String {
    (0..n).map(|_| char::from(b'A' + rng.random_range(0..26u8))).collect()
}

pub fn random_descriptor(rng: &mut impl Rng, roles: &RoleTable) -> SystemDescriptor {
    let kinds: Vec<(&str, PowerRole)> = roles.kinds().collect();
    let (kind, role) = *kinds.choose(rng).unwrap();
    let mut locality = upper(rng, 1);
    for _ in 0..rng.random_range(0..3) {
        locality.push(if rng.random_bool(0.5) { 'X' } else { '7' });
    }
    SystemDescriptor {
        country: upper(rng, 2),
        locality,
        site_kind: *SiteKind::ALL.choose(rng).unwrap(),
        site_ordinal: rng.random_range(1..200),
        device_kind: kind.to_string(),
        device_ordinal: rng.random_bool(0.4).then(|| rng.random_range(1..9)),
        power_role: role,
    }
}

/// A table and climate file whose triple counts follow from how they were built.
pub struct CountCase {
    pub energy_csv: String,
    pub climate_csv: String,
    /// Topology of the single `DE_KN` network, without the weather link.
    pub topology: usize,
    pub active_headings: usize,
    pub filled_cells: usize,
    pub climate_records: usize,
    pub stations: usize,
}

pub fn random_count_case(rng: &mut impl Rng) -> CountCase {
    let kinds = ["pv", "pv_facade", "grid_import", "grid_export", "freezer", "heat_pump", "storage_charge"];
    let site_kinds = ["residential", "industrial", "public"];
    let mut headings = BTreeSet::new();
    let n = rng.random_range(1..=8);
    while headings.len() < n {
        let site = format!("{}{}", site_kinds.choose(rng).unwrap(), rng.random_range(1..=3));
        let ord = if rng.random_bool(0.3) { format!("_{}", rng.random_range(1..3)) } else { String::new() };
        headings.insert((site, format!("{}{ord}", kinds.choose(rng).unwrap())));
    }
    let headings: Vec<(String, String)> = headings.into_iter().collect();
    let sites: BTreeSet<&str> = headings.iter().map(|(s, _)| s.as_str()).collect();
    let with = |k: &str| {
        headings
            .iter()
            .filter(|(_, d)| d.split('_').take(2).collect::<Vec<_>>().join("_") == k)
            .map(|(s, _)| s.as_str())
            .collect::<BTreeSet<_>>()
            .len()
    };
    let topology = 1 + 2 * headings.len() + 3 * sites.len() + 1 + with("grid_import") + with("grid_export");

    let rows = rng.random_range(0..30);
    let blank_p = [0.0, 0.2, 0.9][rng.random_range(0..3)];
    let mut energy = String::from("utc_timestamp");
    for (s, d) in &headings {
        energy.push_str(&format!(",DE_KN_{s}_{d}"));
    }
    energy.push('\n');
    let mut filled = 0;
    let mut active = vec![false; headings.len()];
    let t0 = Utc.with_ymd_and_hms(2016, 3, 1, 0, 0, 0).unwrap();
    for r in 0..rows {
        energy.push_str(&(t0 + Duration::minutes(15 * r)).format("%Y-%m-%dT%H:%M:%SZ").to_string());
        for a in active.iter_mut() {
            energy.push(',');
            if !rng.random_bool(blank_p) {
                energy.push_str(&format!("{:.3}", 10.0 + r as f64 * rng.random_range(0.0..2.0)));
                filled += 1;
                *a = true;
            }
        }
        energy.push('\n');
    }

    let mut climate = String::from("station,date,datatype,value,unit\n");
    let stations = rng.random_range(1..=3);
    let mut records = 0;
    let d0 = NaiveDate::from_ymd_opt(2016, 1, 1).unwrap();
    for st in 0..stations {
        for day in 0..rng.random_range(1..40) {
            for code in ["TMAX", "PRCP"] {
                if rng.random_bool(0.8) {
                    let line = format!("ST{st},{},{code},{},tenths\n", d0 + Duration::days(day), (day * 7 + st) % 300);
                    climate.push_str(&line);
                    records += 1;
                    // Exact duplicates collapse.
                    if rng.random_bool(0.05) {
                        climate.push_str(&line);
                    }
                }
            }
        }
    }
    let stations_used = climate.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect::<BTreeSet<_>>().len();

    CountCase {
        energy_csv: energy,
        climate_csv: climate,
        topology,
        active_headings: active.iter().filter(|a| **a).count(),
        filled_cells: filled,
        climate_records: records,
        stations: stations_used,
    }
}
