use super::{Emitter, MapError, Reader};
use crate::model::{timestamp_literal, AgentRole, Interval, MachineInfo};
use crate::store::Graph;
use crate::term::RdfTerm;
use crate::vocab::{dcat, dct, pko_ind, pro, rdf, Iri};

pub fn lower_role(role: &AgentRole) -> Graph {
    let mut e = Emitter::new();
    let node = RdfTerm::from(role.node.clone());
    e.add(role.agent.clone(), pro::HOLDS_ROLE_IN_TIME, node.clone());
    e.add(node.clone(), rdf::TYPE, pro::ROLE_IN_TIME.iri());
    e.add(node.clone(), pro::WITH_ROLE, role.role.clone());
    e.add_opt(&node, pro::RELATES_TO_DOCUMENT, role.document.clone());
    if let Some(i) = &role.interval {
        let period = RdfTerm::from(i.node.clone());
        e.add(node, dct::TEMPORAL, period.clone());
        e.add(period.clone(), rdf::TYPE, dct::PERIOD_OF_TIME.iri());
        e.add_opt(&period, dcat::START_DATE, i.start.as_ref().map(timestamp_literal));
        e.add_opt(&period, dcat::END_DATE, i.end.as_ref().map(timestamp_literal));
    }
    e.graph
}

/// Every role held by `agent`, ordered by role node.
pub fn lift_roles(g: &Graph, agent: &Iri) -> Result<Vec<AgentRole>, MapError> {
    let a = Reader::new(g, agent.clone());
    let mut out = Vec::new();
    for node in a.nodes(pro::HOLDS_ROLE_IN_TIME) {
        let r = Reader::new(g, node.clone());
        let interval = match r.node(dct::TEMPORAL) {
            None => None,
            Some(pn) => {
                let p = Reader::new(g, pn.clone());
                Some(Interval {
                    node: pn,
                    start: p.time(dcat::START_DATE)?,
                    end: p.time(dcat::END_DATE)?,
                })
            }
        };
        out.push(AgentRole {
            agent: agent.clone(),
            role: r.required_iri(pro::WITH_ROLE, "role")?,
            document: r.iri(pro::RELATES_TO_DOCUMENT),
            interval,
            node,
        });
    }
    Ok(out)
}

pub fn lower_machine(m: &MachineInfo) -> Graph {
    let mut e = Emitter::new();
    let node = RdfTerm::Iri(m.id.clone());
    e.add(node.clone(), rdf::TYPE, pko_ind::MACHINE.iri());
    e.add_opt(&node, pko_ind::HAS_MACHINE_TYPE, m.machine_type.clone());
    e.add_opt(&node, pko_ind::HAS_LOCATION, m.location.clone());
    e.add_opt(&node, pko_ind::WAS_MANUFACTURED_BY, m.manufacturer.clone());
    e.graph
}

pub fn lift_machine(g: &Graph, id: &Iri) -> Result<MachineInfo, MapError> {
    let r = Reader::new(g, id.clone());
    if !(r.has_type(pko_ind::MACHINE) || r.has_type(pko_ind::DEVICE)) {
        return Err(MapError::Malformed {
            node: format!("<{id}>"),
            message: "not a pko-ind:Machine or pko-ind:Device".into(),
        });
    }
    Ok(MachineInfo {
        id: id.clone(),
        machine_type: r.iri(pko_ind::HAS_MACHINE_TYPE),
        location: r.iri(pko_ind::HAS_LOCATION),
        manufacturer: r.iri(pko_ind::WAS_MANUFACTURED_BY),
    })
}
