//! Synthetic household/weather tables and a flat-file correlation oracle.
//!
//! The oracle reads the same CSV text as the RDF pipeline but never builds a
//! graph: per-day last counter readings, day-over-day differences, scaled
//! weather values, date join, textbook two-pass Pearson.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Datelike, Duration, NaiveDate, TimeZone, Timelike, Utc};
use rand::Rng;

pub const STATION: &str = "GME00121042";
pub const CODES: [&str; 2] = ["TMAX", "PRCP"];

#[derive(Clone, Debug)]
pub struct Fixture {
    pub energy_csv: String,
    pub climate_csv: String,
    pub headings: Vec<String>,
    pub year: i32,
    pub days: i64,
}

fn random_headings(rng: &mut impl Rng) -> Vec<String> {
    let n = rng.random_range(1..=6);
    let mut out = BTreeSet::new();
    while out.len() < n {
        let kind = ["residential", "industrial", "public"][rng.random_range(0..3)];
        let site = rng.random_range(1..=4);
        let ord = match rng.random_range(0..3) {
            0 => String::new(),
            k => format!("_{k}"),
        };
        out.insert(format!("DE_KN_{kind}{site}_pv{ord}"));
    }
    let mut v: Vec<String> = out.into_iter().collect();
    // Column order should not matter; shuffle it anyway.
    for i in (1..v.len()).rev() {
        v.swap(i, rng.random_range(0..=i));
    }
    v
}

/// 7-60 days, 1-6 PV counters with blank cells and one counter reset, plus
/// daily TMAX/PRCP records in tenths.
pub fn random_fixture(rng: &mut impl Rng) -> Fixture {
    let year = 2016;
    let headings = random_headings(rng);
    let days = rng.random_range(7..=60);
    let start = NaiveDate::from_ymd_opt(2015, 12, 26).unwrap() + Duration::days(rng.random_range(0..340));
    let step_minutes = [15, 30, 60, 120][rng.random_range(0..4)];

    let mut tmax = BTreeMap::new();
    let mut prcp = BTreeMap::new();
    let mut climate = String::from("station,date,datatype,value,unit\n");
    for k in -1..=days {
        let d = start + Duration::days(k);
        let season = (f64::from(d.ordinal()) / 366.0 * std::f64::consts::TAU).cos();
        let t = (120.0 - 110.0 * season + rng.random_range(-40.0..40.0)).round();
        let p = if rng.random_bool(0.5) { 0.0 } else { f64::from(rng.random_range(1..250)) };
        tmax.insert(d, t);
        prcp.insert(d, p);
        if rng.random_bool(0.98) {
            climate.push_str(&format!("{STATION},{d},TMAX,{t},tenths\n"));
        }
        if rng.random_bool(0.95) {
            climate.push_str(&format!("{STATION},{d},PRCP,{p},tenths\n"));
        }
    }

    let t0 = Utc.from_utc_datetime(&start.and_hms_opt(0, 0, 0).unwrap());
    let steps = days * 24 * 60 / step_minutes;
    let capacity: Vec<f64> = headings.iter().map(|_| rng.random_range(0.5..3.0)).collect();
    let mut counters: Vec<f64> = headings.iter().map(|_| rng.random_range(1000.0..5000.0)).collect();
    let reset_device = rng.random_range(0..headings.len());
    let reset_step = rng.random_range(steps / 4..steps * 3 / 4);
    let daylight_steps = (12 * 60 / step_minutes) as f64;

    let mut energy = String::from("utc_timestamp,cet_cest_timestamp");
    for h in &headings {
        energy.push(',');
        energy.push_str(h);
    }
    energy.push_str(",interpolated\n");
    for s in 0..steps {
        let t = t0 + Duration::minutes(s * step_minutes);
        let day = t.date_naive();
        let hour = t.hour();
        energy.push_str(&t.format("%Y-%m-%dT%H:%M:%SZ").to_string());
        energy.push(',');
        energy.push_str(&(t + Duration::hours(1)).format("%Y-%m-%dT%H:%M:%S+0100").to_string());
        for (i, _) in headings.iter().enumerate() {
            if (6..18).contains(&hour) {
                let daily = (0.4 + 0.05 * tmax[&day] / 10.0 - 0.01 * prcp[&day] / 10.0 + rng.random_range(-0.3..0.3))
                    .max(0.0)
                    * capacity[i];
                counters[i] += daily / daylight_steps;
            }
            if i == reset_device && s == reset_step {
                counters[i] = rng.random_range(0.0..1.0);
            }
            energy.push(',');
            if rng.random_bool(0.97) {
                energy.push_str(&counters[i].to_string());
            }
        }
        energy.push(',');
        if rng.random_bool(0.05) {
            energy.push_str(&headings[0]);
        }
        energy.push('\n');
    }
    Fixture {
        energy_csv: energy,
        climate_csv: climate,
        headings,
        year,
        days,
    }
}

/// `(datatype, device heading, r, n)` in `CODES` order, then heading order.
pub fn flat_oracle(f: &Fixture) -> Vec<(String, String, f64, usize)> {
    let mut reader = csv::Reader::from_reader(f.energy_csv.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    let mut last: Vec<BTreeMap<NaiveDate, (DateTime<Utc>, f64)>> = vec![BTreeMap::new(); f.headings.len()];
    for rec in reader.records() {
        let rec = rec.unwrap();
        let t: DateTime<Utc> = DateTime::parse_from_rfc3339(&rec[0]).unwrap().with_timezone(&Utc);
        for (i, h) in f.headings.iter().enumerate() {
            let col = header.iter().position(|c| c == h).unwrap();
            if rec[col].is_empty() {
                continue;
            }
            let v: f64 = rec[col].parse().unwrap();
            let slot = last[i].entry(t.date_naive()).or_insert((t, v));
            if t >= slot.0 {
                *slot = (t, v);
            }
        }
    }
    let daily: Vec<BTreeMap<NaiveDate, f64>> = last
        .iter()
        .map(|days| {
            let mut out = BTreeMap::new();
            let entries: Vec<(&NaiveDate, &(DateTime<Utc>, f64))> = days.iter().collect();
            for w in entries.windows(2) {
                let diff = w[1].1 .1 - w[0].1 .1;
                if diff >= 0.0 && w[1].0.year() == f.year {
                    out.insert(*w[1].0, diff);
                }
            }
            out
        })
        .collect();

    let mut weather: BTreeMap<&str, BTreeMap<NaiveDate, f64>> = BTreeMap::new();
    let mut reader = csv::Reader::from_reader(f.climate_csv.as_bytes());
    for rec in reader.records() {
        let rec = rec.unwrap();
        let code = CODES.iter().find(|c| **c == &rec[2]).copied().unwrap();
        let date: NaiveDate = rec[1].parse().unwrap();
        if date.year() == f.year {
            // Both codes are reported in tenths.
            weather.entry(code).or_default().insert(date, rec[3].parse::<f64>().unwrap() * 0.1);
        }
    }

    let mut out = Vec::new();
    for code in CODES {
        let w = weather.get(code).cloned().unwrap_or_default();
        for (i, h) in f.headings.iter().enumerate() {
            let (x, y): (Vec<f64>, Vec<f64>) = daily[i]
                .iter()
                .filter_map(|(d, e)| w.get(d).map(|v| (*e, *v)))
                .unzip();
            if let Some(r) = two_pass_pearson(&x, &y) {
                out.push((code.to_string(), h.clone(), r, x.len()));
            }
        }
    }
    out
}

/// Textbook definition: means first, then centered sums.
pub fn two_pass_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
