//! Column headings of the household tables.
//!
//! A heading such as `DE_KN_industrial1_pv_1` reads
//! `COUNTRY _ LOCALITY _ SITEKIND SITEORD _ DEVICEKIND [_ DEVICEORD]`.
//! Device kinds may contain underscores (`heat_pump`, `storage_charge`) but no
//! underscore-separated segment of a kind may start with a digit, so a trailing
//! `_<digits>` is always the device ordinal.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::vocab::{IndividualKind, Iri, TermRegistry, VocabError, Vocabulary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeadingError {
    #[error("heading {heading:?}: malformed {segment_name} segment {segment:?}")]
    Malformed {
        heading: String,
        segment_name: &'static str,
        segment: String,
    },
    #[error("heading {heading:?}: unknown site kind in segment {segment:?}")]
    UnknownSiteKind { heading: String, segment: String },
    #[error("heading {heading:?}: device kind {segment:?} is not in the role table")]
    UnknownDeviceKind { heading: String, segment: String },
    #[error("role table line {line}: {message}")]
    RoleFile { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SiteKind {
    Residential,
    Industrial,
    Public,
}

impl SiteKind {
    pub const ALL: [SiteKind; 3] = [SiteKind::Residential, SiteKind::Industrial, SiteKind::Public];

    pub fn as_str(self) -> &'static str {
        match self {
            SiteKind::Residential => "residential",
            SiteKind::Industrial => "industrial",
            SiteKind::Public => "public",
        }
    }

    fn from_token(s: &str) -> Option<SiteKind> {
        SiteKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PowerRole {
    Produced,
    Consumed,
}

impl PowerRole {
    pub fn as_str(self) -> &'static str {
        match self {
            PowerRole::Produced => "produced",
            PowerRole::Consumed => "consumed",
        }
    }
}

/// Grid connection of a site, derived from the `grid_import`/`grid_export` devices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GridFeed {
    Import,
    Export,
}

/// Typed decomposition of one heading.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemDescriptor {
    pub country: String,
    pub locality: String,
    pub site_kind: SiteKind,
    pub site_ordinal: u32,
    pub device_kind: String,
    pub device_ordinal: Option<u32>,
    pub power_role: PowerRole,
}

impl SystemDescriptor {
    /// `industrial1`
    pub fn site_name(&self) -> String {
        format!("{}{}", self.site_kind.as_str(), self.site_ordinal)
    }

    pub fn heading(&self) -> String {
        canonical_heading(self)
    }

    pub fn grid_feed(&self) -> Option<GridFeed> {
        match self.device_kind.as_str() {
            "grid_import" => Some(GridFeed::Import),
            "grid_export" => Some(GridFeed::Export),
            _ => None,
        }
    }

    pub fn device_iri(&self, reg: &TermRegistry) -> Result<Iri, VocabError> {
        let site = self.site_name();
        let ord = self.device_ordinal.map(|o| o.to_string());
        let mut parts = vec![
            self.country.as_str(),
            self.locality.as_str(),
            site.as_str(),
            self.device_kind.as_str(),
        ];
        if let Some(o) = &ord {
            parts.push(o);
        }
        reg.mint_individual(IndividualKind::Device, &parts)
    }

    pub fn site_iri(&self, reg: &TermRegistry) -> Result<Iri, VocabError> {
        reg.mint_individual(
            IndividualKind::Site,
            &[&self.country, &self.locality, &self.site_name()],
        )
    }

    pub fn locality_iri(&self, reg: &TermRegistry) -> Result<Iri, VocabError> {
        reg.mint_individual(IndividualKind::Locality, &[&self.country, &self.locality])
    }

    /// Node between the device and its evaluations.
    pub fn property_iri(&self, reg: &TermRegistry) -> Result<Iri, VocabError> {
        reg.mint_individual(
            IndividualKind::Property,
            &[&self.heading(), self.power_role.as_str()],
        )
    }
}

impl fmt::Display for SystemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonical_heading(self))
    }
}

/// Device kind → power role. Ships with defaults and accepts overrides from a
/// `device_kind<TAB>produced|consumed` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleTable {
    roles: BTreeMap<String, PowerRole>,
}

const DEFAULT_PRODUCERS: &[&str] = &["chp", "grid_export", "pv", "pv_facade", "pv_roof", "storage_decharge"];

const DEFAULT_CONSUMERS: &[&str] = &[
    "area_offices",
    "area_room",
    "circulation_pump",
    "compressor",
    "cooling_aggregate",
    "cooling_pumps",
    "dishwasher",
    "ev",
    "freezer",
    "grid_import",
    "heat_pump",
    "machine",
    "refrigerator",
    "storage_charge",
    "ventilation",
    "washing_machine",
];

impl Default for RoleTable {
    fn default() -> Self {
        let roles = DEFAULT_PRODUCERS
            .iter()
            .map(|k| (k.to_string(), PowerRole::Produced))
            .chain(DEFAULT_CONSUMERS.iter().map(|k| (k.to_string(), PowerRole::Consumed)))
            .collect();
        RoleTable { roles }
    }
}

/// Lowercase underscore-separated words, none of which starts with a digit.
pub fn valid_device_kind(kind: &str) -> bool {
    !kind.is_empty()
        && kind.split('_').all(|w| {
            w.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                && w.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        })
}

impl RoleTable {
    pub fn empty() -> Self {
        RoleTable {
            roles: BTreeMap::new(),
        }
    }

    pub fn role(&self, kind: &str) -> Option<PowerRole> {
        self.roles.get(kind).copied()
    }

    pub fn kinds(&self) -> impl Iterator<Item = (&str, PowerRole)> {
        self.roles.iter().map(|(k, r)| (k.as_str(), *r))
    }

    pub fn insert(&mut self, kind: &str, role: PowerRole) -> Result<(), HeadingError> {
        if !valid_device_kind(kind) {
            return Err(HeadingError::RoleFile {
                line: 0,
                message: format!("invalid device kind {kind:?}"),
            });
        }
        self.roles.insert(kind.to_string(), role);
        Ok(())
    }

    /// Applies `device_kind<TAB>produced|consumed` lines on top of this table.
    pub fn extend_from_text(&mut self, text: &str) -> Result<(), HeadingError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: String| HeadingError::RoleFile { line, message };
            let (kind, role) = raw
                .split_once('\t')
                .ok_or_else(|| err("expected device_kind<TAB>produced|consumed".into()))?;
            let role = match role.trim() {
                "produced" => PowerRole::Produced,
                "consumed" => PowerRole::Consumed,
                other => return Err(err(format!("unknown role {other:?}"))),
            };
            let kind = kind.trim();
            if !valid_device_kind(kind) {
                return Err(err(format!("invalid device kind {kind:?}")));
            }
            self.roles.insert(kind.to_string(), role);
        }
        Ok(())
    }
}

fn parse_ordinal(s: &str) -> Option<u32> {
    if s.is_empty() || s.starts_with('0') || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn parse_heading(text: &str, roles: &RoleTable) -> Result<SystemDescriptor, HeadingError> {
    let malformed = |segment_name, segment: &str| HeadingError::Malformed {
        heading: text.to_string(),
        segment_name,
        segment: segment.to_string(),
    };
    let mut it = text.splitn(4, '_');
    let country = it.next().unwrap_or_default();
    let locality = it.next().ok_or_else(|| malformed("locality", ""))?;
    let site = it.next().ok_or_else(|| malformed("site", ""))?;
    let device = it.next().ok_or_else(|| malformed("device", ""))?;

    if country.len() != 2 || !country.bytes().all(|b| b.is_ascii_uppercase()) {
        return Err(malformed("country", country));
    }
    let locality_ok = locality.bytes().next().is_some_and(|b| b.is_ascii_uppercase())
        && locality
            .bytes()
            .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit());
    if !locality_ok {
        return Err(malformed("locality", locality));
    }

    let split = site
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| malformed("site", site))?;
    let (site_word, site_ord) = site.split_at(split);
    let site_kind = SiteKind::from_token(site_word).ok_or_else(|| HeadingError::UnknownSiteKind {
        heading: text.to_string(),
        segment: site.to_string(),
    })?;
    let site_ordinal = parse_ordinal(site_ord).ok_or_else(|| malformed("site", site))?;

    let (device_kind, device_ordinal) = match device.rsplit_once('_') {
        Some((kind, ord)) if ord.bytes().all(|b| b.is_ascii_digit()) => {
            let ord = parse_ordinal(ord).ok_or_else(|| malformed("device", device))?;
            (kind, Some(ord))
        }
        _ => (device, None),
    };
    if !valid_device_kind(device_kind) {
        return Err(malformed("device", device));
    }
    let power_role = roles
        .role(device_kind)
        .ok_or_else(|| HeadingError::UnknownDeviceKind {
            heading: text.to_string(),
            segment: device_kind.to_string(),
        })?;

    Ok(SystemDescriptor {
        country: country.to_string(),
        locality: locality.to_string(),
        site_kind,
        site_ordinal,
        device_kind: device_kind.to_string(),
        device_ordinal,
        power_role,
    })
}

pub fn canonical_heading(d: &SystemDescriptor) -> String {
    let mut s = format!(
        "{}_{}_{}{}_{}",
        d.country,
        d.locality,
        d.site_kind.as_str(),
        d.site_ordinal,
        d.device_kind
    );
    if let Some(o) = d.device_ordinal {
        s.push('_');
        s.push_str(&o.to_string());
    }
    s
}

/// `seas:producedElectricPower` or `seas:consumedElectricPower`.
pub fn power_property<'v>(d: &SystemDescriptor, vocab: &'v Vocabulary) -> &'v Iri {
    match d.power_role {
        PowerRole::Produced => &vocab.produced_electric_power,
        PowerRole::Consumed => &vocab.consumed_electric_power,
    }
}
