use std::collections::BTreeMap;

use super::UpliftError;
use crate::heading::{GridFeed, SystemDescriptor};
use crate::rdf::{Graph, Term, Triple};
use crate::vocab::{Iri, TermRegistry};

/// Network/site/device hierarchy for a set of descriptors.
///
/// Emits the network type; per device `subSystemOf` its site and a type
/// (`seas:ElectricPowerTransmissionSystem` for grid feeds, `seas:System`
/// otherwise); per site `subSystemOf` the network, `:locatedIn` its locality
/// and `a seas:System`; per locality an `rdfs:label`. Sites with a
/// `grid_import` device get `network seas:powers site`, sites with a
/// `grid_export` device get `network seas:isPoweredBy site`.
pub fn build_topology(
    descriptors: &[SystemDescriptor],
    network: &Iri,
    locality_label: &str,
    reg: &TermRegistry,
) -> Result<Graph, UpliftError> {
    let v = reg.terms();
    let mut by_heading: BTreeMap<String, &SystemDescriptor> = BTreeMap::new();
    for d in descriptors {
        let heading = d.heading();
        if let Some(prev) = by_heading.insert(heading.clone(), d) {
            if prev.power_role != d.power_role {
                return Err(UpliftError::Topology(format!(
                    "{heading} declared both {} and {}",
                    prev.power_role.as_str(),
                    d.power_role.as_str()
                )));
            }
        }
    }

    let mut g = Graph::new();
    g.insert(Triple::new(network, &v.rdf_type, &v.electric_power_distribution_network));
    for d in by_heading.values() {
        let device = d.device_iri(reg)?;
        let site = d.site_iri(reg)?;
        let locality = d.locality_iri(reg)?;
        let device_class = match d.grid_feed() {
            Some(_) => &v.electric_power_transmission_system,
            None => &v.system,
        };
        g.insert(Triple::new(&device, &v.sub_system_of, &site));
        g.insert(Triple::new(&device, &v.rdf_type, device_class));
        g.insert(Triple::new(&site, &v.sub_system_of, network));
        g.insert(Triple::new(&site, &v.located_in, &locality));
        g.insert(Triple::new(&site, &v.rdf_type, &v.system));
        g.insert(Triple::new(&locality, &v.rdfs_label, Term::plain(locality_label)));
        match d.grid_feed() {
            Some(GridFeed::Import) => {
                g.insert(Triple::new(network, &v.powers, &site));
            }
            Some(GridFeed::Export) => {
                g.insert(Triple::new(network, &v.is_powered_by, &site));
            }
            None => {}
        }
    }
    Ok(g)
}

/// `subject cap:retrieveWeatherFrom station`. A self-link is allowed but logged;
/// [`super::audit_graph`] reports it as a warning too.
pub fn link_weather(subject: &Iri, station: &Iri, reg: &TermRegistry) -> Triple {
    if subject == station {
        log::warn!("{subject} retrieves weather from itself");
    }
    Triple::new(subject, &reg.terms().retrieve_weather_from, station)
}
