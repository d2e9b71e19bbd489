use std::collections::HashSet;
use std::fmt;

use super::{AddressKey, Engine, PopulationKey};
use crate::kinetics::{kinetic_kind, partial_propensity_wrt_owner};
use crate::rules::RuleSet;
use crate::specie::SpecieId;

/// Relative tolerance between a stored propensity and its recomputation.
pub const STRUCTURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    VoidNotFirst,
    VoidCount(u64),
    EmptyPopulation(SpecieId),
    IndexMismatch(SpecieId),
    BrokenLink { owner: SpecieId, partner: SpecieId, detail: &'static str },
    DuplicateRelation { owner: SpecieId, partner: SpecieId },
    WrongKind { owner: SpecieId, partner: SpecieId },
    OwnerAfterPartner { owner: SpecieId, partner: SpecieId },
    PartialPropensity { owner: SpecieId, partner: SpecieId, reaction: usize, stored: f64, expected: f64 },
    Psi { owner: SpecieId, partner: SpecieId, stored: f64, expected: f64 },
    Lambda { specie: SpecieId, stored: f64, expected: f64 },
    Sigma { specie: SpecieId, stored: f64, expected: f64 },
    TotalPropensity { stored: f64, expected: f64 },
    OrphanNodes { relations: usize, addresses: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            VoidNotFirst => write!(f, "void population is not first"),
            VoidCount(n) => write!(f, "void population has count {n}"),
            EmptyPopulation(s) => write!(f, "population {s} is live with count 0"),
            IndexMismatch(s) => write!(f, "species index disagrees with population list at {s}"),
            BrokenLink { owner, partner, detail } => write!(f, "relation ({owner}, {partner}): {detail}"),
            DuplicateRelation { owner, partner } => write!(f, "relation ({owner}, {partner}) stored twice"),
            WrongKind { owner, partner } => write!(f, "relation ({owner}, {partner}) has the wrong kind"),
            OwnerAfterPartner { owner, partner } => {
                write!(f, "relation ({owner}, {partner}) owned by the later population")
            }
            PartialPropensity { owner, partner, reaction, stored, expected } => {
                write!(f, "relation ({owner}, {partner}) reaction {reaction}: π = {stored}, expected {expected}")
            }
            Psi { owner, partner, stored, expected } => {
                write!(f, "relation ({owner}, {partner}): Ψ = {stored}, expected {expected}")
            }
            Lambda { specie, stored, expected } => write!(f, "population {specie}: Λ = {stored}, expected {expected}"),
            Sigma { specie, stored, expected } => write!(f, "population {specie}: Σ = {stored}, expected {expected}"),
            TotalPropensity { stored, expected } => write!(f, "total propensity {stored}, expected {expected}"),
            OrphanNodes { relations, addresses } => {
                write!(f, "{relations} relations and {addresses} addresses are not reachable from any population")
            }
        }
    }
}

fn close(stored: f64, expected: f64) -> bool {
    (stored - expected).abs() <= STRUCTURE_TOLERANCE * stored.abs().max(expected.abs())
}

impl<R: RuleSet> Engine<R> {
    /// Recomputes every π, Ψ, Λ, Σ and the total propensity from counts and
    /// rates, and checks every handle. An empty result means the structure
    /// is valid.
    pub fn validate_structure(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let positions: std::collections::HashMap<PopulationKey, usize> =
            self.populations.iter(&self.order).enumerate().map(|(i, (k, _))| (k, i)).collect();

        match self.populations.first(&self.order) {
            Some(k) if k == self.void => {}
            _ => out.push(Violation::VoidNotFirst),
        }
        if self.index.len() != self.order.len() {
            out.push(Violation::IndexMismatch(SpecieId::void()));
        }

        let held: HashSet<(PopulationKey, AddressKey)> = self
            .populations
            .iter(&self.order)
            .flat_map(|(k, p)| p.address_slab.iter(&p.addresses).map(move |(a, _)| (k, a)))
            .collect();
        let mut pairs: HashSet<(PopulationKey, PopulationKey)> = HashSet::new();
        let mut reachable_relations = 0;
        let mut reachable_addresses = 0;
        let mut stored_relations = 0;
        let mut stored_addresses = 0;
        let mut total = 0.0;

        for (key, pop) in self.populations.iter(&self.order) {
            if pop.specie.is_void() {
                if pop.count != 1 {
                    out.push(Violation::VoidCount(pop.count));
                }
            } else if pop.count == 0 {
                out.push(Violation::EmptyPopulation(pop.specie.clone()));
            }
            if self.index.get(&pop.specie) != Some(&key) {
                out.push(Violation::IndexMismatch(pop.specie.clone()));
            }

            let mut lambda = 0.0;
            stored_relations += pop.relation_slab.len();
            stored_addresses += pop.address_slab.len();
            for (rel_key, rel) in pop.relation_slab.iter(&pop.relations) {
                reachable_relations += 1;
                let owner = pop.specie.clone();
                let partner = rel.partner_id.clone();
                let broken = |detail| Violation::BrokenLink { owner: owner.clone(), partner: partner.clone(), detail };

                if rel.owner != key || rel.owner_id != pop.specie {
                    out.push(broken("owner does not match the holding population"));
                }
                let Some(partner_pop) = self.populations.get(rel.partner) else {
                    out.push(broken("partner population is not live"));
                    continue;
                };
                if partner_pop.specie != rel.partner_id {
                    out.push(broken("partner id does not match partner population"));
                }
                if !pairs.insert((key, rel.partner)) {
                    out.push(Violation::DuplicateRelation { owner: owner.clone(), partner: partner.clone() });
                }
                if rel.kind != kinetic_kind(&pop.specie, &partner_pop.specie) {
                    out.push(Violation::WrongKind { owner: owner.clone(), partner: partner.clone() });
                }
                if positions.get(&key) > positions.get(&rel.partner) {
                    out.push(Violation::OwnerAfterPartner { owner: owner.clone(), partner: partner.clone() });
                }
                match rel.back_address.and_then(|a| partner_pop.address_slab.get(a).map(|ra| (a, ra))) {
                    None => out.push(broken("back address is not live")),
                    Some((addr_key, ra)) => {
                        if ra.relation != rel_key || ra.owner_population != key || ra.holder != rel.partner {
                            out.push(broken("back address points elsewhere"));
                        } else if !held.contains(&(rel.partner, addr_key)) {
                            out.push(broken("back address missing from partner's list"));
                        }
                    }
                }

                let mut psi = 0.0;
                for (i, rec) in rel.reactions.iter().enumerate() {
                    let pi = partial_propensity_wrt_owner(rel.kind, rec.rate, pop.count, partner_pop.count);
                    if !close(rec.pi, pi) {
                        out.push(Violation::PartialPropensity {
                            owner: owner.clone(),
                            partner: partner.clone(),
                            reaction: i,
                            stored: rec.pi,
                            expected: pi,
                        });
                    }
                    psi += pi;
                }
                if !close(rel.psi, psi) {
                    out.push(Violation::Psi { owner, partner, stored: rel.psi, expected: psi });
                }
                lambda += psi;
            }

            for (addr_key, ra) in pop.address_slab.iter(&pop.addresses) {
                reachable_addresses += 1;
                let rel = self.relation(ra.owner_population, ra.relation);
                let ok = ra.holder == key
                    && rel.map(|r| r.back_address == Some(addr_key) && r.owner == ra.owner_population && r.partner == key)
                        .unwrap_or(false);
                if !ok {
                    let owner = self
                        .populations
                        .get(ra.owner_population)
                        .map(|p| p.specie.clone())
                        .unwrap_or_else(SpecieId::void);
                    out.push(Violation::BrokenLink {
                        owner,
                        partner: pop.specie.clone(),
                        detail: "address does not resolve to a relation pointing back at it",
                    });
                }
            }

            if !close(pop.lambda, lambda) {
                out.push(Violation::Lambda { specie: pop.specie.clone(), stored: pop.lambda, expected: lambda });
            }
            let sigma = pop.count as f64 * lambda;
            if !close(pop.sigma, sigma) {
                out.push(Violation::Sigma { specie: pop.specie.clone(), stored: pop.sigma, expected: sigma });
            }
            total += sigma;
        }

        if !close(self.total_propensity, total) {
            out.push(Violation::TotalPropensity { stored: self.total_propensity, expected: total });
        }
        if reachable_relations != stored_relations || reachable_addresses != stored_addresses {
            out.push(Violation::OrphanNodes {
                relations: stored_relations - reachable_relations.min(stored_relations),
                addresses: stored_addresses - reachable_addresses.min(stored_addresses),
            });
        }
        out
    }
}
