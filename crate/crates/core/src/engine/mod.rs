//! Expandable partial-propensity direct method.
//!
//! Only species with a nonzero count are stored. Each live species has a
//! [`Population`]; the reactions possible between two live species form a
//! [`Relation`] owned by whichever of the two was added first, and the
//! other participant keeps a [`RelationAddress`] pointing back at it. Every
//! reaction stores its partial propensity with respect to the owner, so the
//! full propensity of everything owned by a population is `n · Λ`.
//!
//! ```text
//! Engine ── populations (insertion order)
//!            ├─ ∅   relations: [∅∅, ∅A, ∅B]   addresses: [→∅∅]
//!            ├─ A   relations: [AA, AB]        addresses: [→∅A, →AA]
//!            └─ B   relations: []              addresses: [→∅B, →AB]
//! ```
//!
//! Sampling walks populations, then the chosen population's relations, then
//! the chosen relation's reactions, so a step costs O(N + α) to sample and
//! O(αN) to update.
//!
//! Each population keeps the nodes of its own relation and address lists in
//! a private slab, so walking one population's relations touches contiguous
//! memory however many species are live.

mod sampling;
mod validate;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::arena::{Key, ListArena, ListHead};
use crate::kinetics::{kinetic_kind, partial_propensity_wrt_owner, ReactionKind};
use crate::reaction::{net_stoichiometry, ChannelKey, Event, FiredReaction, StoichiometryDelta, Step};
use crate::rng::{self, SimRng};
use crate::rules::{RuleError, RuleSet};
use crate::specie::SpecieId;

pub use sampling::Selection;
pub use validate::Violation;

pub type PopulationKey = Key<Population>;
pub type RelationKey = Key<Relation>;
pub type AddressKey = Key<RelationAddress>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("species {0} is already live")]
    DuplicateSpecie(SpecieId),
    #[error("species {0} cannot be added with a count of zero")]
    ZeroCount(SpecieId),
    #[error("the void species is reserved")]
    VoidReserved,
    #[error("population handle is not live")]
    UnknownPopulation,
    #[error("population {specie} still holds {count} molecules")]
    NotEmpty { specie: SpecieId, count: u64 },
    #[error("count of {specie} would become negative ({count} {delta:+})")]
    NegativeCount { specie: SpecieId, count: u64, delta: i64 },
    #[error("total propensity is zero")]
    Exhausted,
    #[error("selection does not refer to a live reaction")]
    InvalidSelection,
    #[error("no reaction with positive propensity under a population with positive propensity")]
    NoPositivePropensity,
    #[error(transparent)]
    Rule(#[from] RuleError),
}

#[derive(Debug, Clone)]
pub struct Population {
    specie: SpecieId,
    count: u64,
    lambda: f64,
    sigma: f64,
    // owned relations with Ψ > 0
    active: usize,
    relations: ListHead,
    relation_slab: ListArena<Relation>,
    addresses: ListHead,
    address_slab: ListArena<RelationAddress>,
}

impl Population {
    pub fn specie(&self) -> &SpecieId {
        &self.specie
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Sum of partial propensities of everything this population owns.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Full propensity of everything this population owns.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn owned_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn held_addresses(&self) -> usize {
        self.addresses.len()
    }
}

#[derive(Debug, Clone)]
pub struct Relation {
    owner: PopulationKey,
    partner: PopulationKey,
    owner_id: SpecieId,
    partner_id: SpecieId,
    kind: ReactionKind,
    reactions: Vec<ReactionRecord>,
    psi: f64,
    back_address: Option<AddressKey>,
}

impl Relation {
    pub fn owner(&self) -> &SpecieId {
        &self.owner_id
    }

    pub fn partner(&self) -> &SpecieId {
        &self.partner_id
    }

    pub fn kind(&self) -> ReactionKind {
        self.kind
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn reactions(&self) -> &[ReactionRecord] {
        &self.reactions
    }
}

/// Back-handle kept by the non-owner participant of a relation. It lives in
/// the address list of `holder`.
#[derive(Debug, Clone, Copy)]
pub struct RelationAddress {
    relation: RelationKey,
    owner_population: PopulationKey,
    holder: PopulationKey,
}

#[derive(Debug, Clone)]
pub struct ReactionRecord {
    rate: f64,
    pi: f64,
    delta: StoichiometryDelta,
}

impl ReactionRecord {
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Partial propensity with respect to the relation's owner.
    pub fn pi(&self) -> f64 {
        self.pi
    }

    pub fn delta(&self) -> &StoichiometryDelta {
        &self.delta
    }
}

pub struct Engine<R> {
    rules: R,
    populations: ListArena<Population>,
    order: ListHead,
    index: HashMap<SpecieId, PopulationKey>,
    void: PopulationKey,
    total_propensity: f64,
    time: f64,
    reaction_count: u64,
    seed: u64,
    rng: SimRng,
}

/// Reactions generated for one (owner, new species) pair, before insertion.
struct PendingRelation {
    owner: Option<PopulationKey>,
    kind: ReactionKind,
    reactions: Vec<(f64, StoichiometryDelta)>,
}

impl<R: RuleSet> Engine<R> {
    /// Builds an engine holding the void species followed by `initial`, in
    /// order.
    pub fn new(rules: R, initial: &[(SpecieId, u64)], seed: u64) -> Result<Self, EngineError> {
        let mut engine = Engine {
            rules,
            populations: ListArena::new(),
            order: ListHead::default(),
            index: HashMap::new(),
            void: Key::dangling(),
            total_propensity: 0.0,
            time: 0.0,
            reaction_count: 0,
            seed,
            rng: rng::seeded(seed),
        };
        engine.void = engine.insert_population(SpecieId::void(), 1)?;
        for (id, n) in initial {
            engine.add_population(id.clone(), *n)?;
        }
        Ok(engine)
    }

    pub fn rules(&self) -> &R {
        &self.rules
    }

    pub fn total_propensity(&self) -> f64 {
        self.total_propensity
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn reaction_count(&self) -> u64 {
        self.reaction_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn void_population(&self) -> PopulationKey {
        self.void
    }

    pub fn find(&self, id: &SpecieId) -> Option<PopulationKey> {
        self.index.get(id).copied()
    }

    pub fn population(&self, key: PopulationKey) -> Option<&Population> {
        self.populations.get(key)
    }

    /// Relation `key` owned by population `owner`.
    pub fn relation(&self, owner: PopulationKey, key: RelationKey) -> Option<&Relation> {
        self.populations.get(owner)?.relation_slab.get(key)
    }

    fn relation_mut(&mut self, owner: PopulationKey, key: RelationKey) -> Option<&mut Relation> {
        self.populations.get_mut(owner)?.relation_slab.get_mut(key)
    }

    /// Live populations in insertion order, the void first.
    pub fn populations(&self) -> impl Iterator<Item = (PopulationKey, &Population)> + '_ {
        self.populations.iter(&self.order)
    }

    /// Relations owned by `key`, in insertion order.
    pub fn relations_of(&self, key: PopulationKey) -> impl Iterator<Item = (RelationKey, &Relation)> + '_ {
        self.populations.get(key).into_iter().flat_map(|p| p.relation_slab.iter(&p.relations))
    }

    pub fn count(&self, id: &SpecieId) -> u64 {
        self.find(id).map(|k| self.populations.get(k).unwrap().count).unwrap_or(0)
    }

    /// Number of live non-void species.
    pub fn live_species(&self) -> usize {
        self.order.len() - 1
    }

    /// Number of reaction records currently stored.
    pub fn tracked_reactions(&self) -> usize {
        self.populations()
            .flat_map(|(_, p)| p.relation_slab.iter(&p.relations))
            .map(|(_, r)| r.reactions.len())
            .sum()
    }

    /// Counts of all live non-void species.
    pub fn snapshot(&self) -> BTreeMap<SpecieId, u64> {
        self.populations()
            .filter(|(_, p)| !p.specie.is_void())
            .map(|(_, p)| (p.specie.clone(), p.count))
            .collect()
    }

    /// Every stored reaction with its current full propensity.
    pub fn channels(&self) -> Vec<(ChannelKey, f64)> {
        let mut out = Vec::with_capacity(self.tracked_reactions());
        for (_, pop) in self.populations() {
            for (_, rel) in pop.relation_slab.iter(&pop.relations) {
                for rec in &rel.reactions {
                    let key = ChannelKey::new(&rel.owner_id, &rel.partner_id, rec.delta.clone(), rec.rate);
                    out.push((key, pop.count as f64 * rec.pi));
                }
            }
        }
        out
    }

    /// Adds a live species, generating its reactions with every live species
    /// (itself included). Each new relation is owned by the earlier
    /// population and addressed from the new one.
    pub fn add_population(&mut self, id: SpecieId, n: u64) -> Result<PopulationKey, EngineError> {
        if id.is_void() {
            return Err(EngineError::VoidReserved);
        }
        self.insert_population(id, n)
    }

    fn insert_population(&mut self, id: SpecieId, n: u64) -> Result<PopulationKey, EngineError> {
        if n == 0 {
            return Err(EngineError::ZeroCount(id));
        }
        if self.index.contains_key(&id) {
            return Err(EngineError::DuplicateSpecie(id));
        }

        // Ask the rules first so a rule error leaves the structure untouched.
        let mut pending = Vec::new();
        let existing: Vec<(Option<PopulationKey>, SpecieId)> = self
            .populations
            .iter(&self.order)
            .map(|(k, p)| (Some(k), p.specie.clone()))
            .chain(std::iter::once((None, id.clone())))
            .collect();
        for (owner, owner_id) in existing {
            let specs = self.rules.generate(&id, &owner_id)?;
            if specs.is_empty() {
                continue;
            }
            let kind = kinetic_kind(&owner_id, &id);
            let reactions = specs
                .iter()
                .map(|s| net_stoichiometry(kind, (&owner_id, &id), s).map(|d| (s.rate, d)))
                .collect::<Result<Vec<_>, _>>()?;
            pending.push(PendingRelation { owner, kind, reactions });
        }

        let new_key = self.populations.push_back(
            &mut self.order,
            Population {
                specie: id.clone(),
                count: n,
                lambda: 0.0,
                sigma: 0.0,
                active: 0,
                relations: ListHead::default(),
                relation_slab: ListArena::new(),
                addresses: ListHead::default(),
                address_slab: ListArena::new(),
            },
        );
        self.index.insert(id.clone(), new_key);

        for PendingRelation { owner, kind, reactions } in pending {
            let owner = owner.unwrap_or(new_key);
            let (owner_id, n_owner) = {
                let p = self.populations.get(owner).expect("live owner");
                (p.specie.clone(), p.count)
            };
            let mut psi = 0.0;
            let reactions: Vec<ReactionRecord> = reactions
                .into_iter()
                .map(|(rate, delta)| {
                    let pi = partial_propensity_wrt_owner(kind, rate, n_owner, n);
                    psi += pi;
                    ReactionRecord { rate, pi, delta }
                })
                .collect();
            let relation = Relation {
                owner,
                partner: new_key,
                owner_id,
                partner_id: id.clone(),
                kind,
                reactions,
                psi,
                back_address: None,
            };
            let owner_pop = self.populations.get_mut(owner).expect("live owner");
            let rel_key = owner_pop.relation_slab.push_back(&mut owner_pop.relations, relation);
            owner_pop.lambda += psi;
            owner_pop.active += usize::from(psi > 0.0);
            owner_pop.sigma = owner_pop.count as f64 * owner_pop.lambda;

            let holder = self.populations.get_mut(new_key).expect("new population");
            let addr_key = holder.address_slab.push_back(
                &mut holder.addresses,
                RelationAddress { relation: rel_key, owner_population: owner, holder: new_key },
            );
            self.relation_mut(owner, rel_key).expect("new relation").back_address = Some(addr_key);
        }

        self.recompute_total_propensity();
        Ok(new_key)
    }

    /// Removes an empty population and every relation it participates in.
    ///
    /// All propensities involving an empty species are zero, so no
    /// propensity sum of the remaining populations changes.
    pub fn delete_population(&mut self, key: PopulationKey) -> Result<(), EngineError> {
        if key == self.void {
            return Err(EngineError::VoidReserved);
        }
        let pop = self.populations.get(key).ok_or(EngineError::UnknownPopulation)?;
        if pop.count != 0 {
            return Err(EngineError::NotEmpty { specie: pop.specie.clone(), count: pop.count });
        }

        // Addresses held by partners of relations this population owns, and
        // relations owned by others in which this population is the partner.
        // The population's own slabs go away with it.
        let back: Vec<(PopulationKey, AddressKey)> = pop
            .relation_slab
            .iter(&pop.relations)
            .filter(|(_, r)| r.partner != key)
            .filter_map(|(_, r)| r.back_address.map(|a| (r.partner, a)))
            .collect();
        let owned_by_others: Vec<(PopulationKey, RelationKey)> = pop
            .address_slab
            .iter(&pop.addresses)
            .filter(|(_, a)| a.owner_population != key)
            .map(|(_, a)| (a.owner_population, a.relation))
            .collect();
        for (holder, addr_key) in back {
            let holder_pop = self.populations.get_mut(holder).expect("address holder");
            holder_pop.address_slab.remove(&mut holder_pop.addresses, addr_key);
        }
        for (owner, rel_key) in owned_by_others {
            let owner_pop = self.populations.get_mut(owner).expect("relation owner");
            let removed = owner_pop.relation_slab.remove(&mut owner_pop.relations, rel_key);
            debug_assert!(removed.map(|r| r.psi == 0.0).unwrap_or(false));
        }

        let pop = self.populations.remove(&mut self.order, key).expect("checked above");
        self.index.remove(&pop.specie);
        Ok(())
    }

    /// Sets the count of a live population and refreshes every propensity
    /// that depends on it. Setting zero does not delete the population; see
    /// [`Engine::delete_population`].
    pub fn set_count(&mut self, key: PopulationKey, n: u64) -> Result<(), EngineError> {
        if key == self.void {
            return Err(EngineError::VoidReserved);
        }
        if !self.populations.contains(key) {
            return Err(EngineError::UnknownPopulation);
        }
        self.update_count(key, n);
        self.recompute_total_propensity();
        Ok(())
    }

    fn update_count(&mut self, key: PopulationKey, n: u64) {
        let pop = self.populations.get_mut(key).expect("live population");
        pop.count = n;
        pop.sigma = n as f64 * pop.lambda;
        let mut cursor = pop.address_slab.first(&pop.addresses);
        while let Some(addr_key) = cursor {
            let pop = self.populations.get(key).expect("live population");
            let addr = *pop.address_slab.get(addr_key).expect("held address");
            cursor = pop.address_slab.next(addr_key);
            self.refresh_relation(addr.relation, addr.owner_population);
        }
    }

    /// Recomputes π and Ψ of one relation from current counts and adjusts
    /// the owner's Λ and Σ by the change in Ψ.
    fn refresh_relation(&mut self, rel_key: RelationKey, owner: PopulationKey) {
        let partner = self.relation(owner, rel_key).expect("addressed relation").partner;
        let n_partner = self.populations.get(partner).expect("relation partner").count;
        let owner_pop = self.populations.get_mut(owner).expect("relation owner");
        let n_owner = owner_pop.count;
        let rel = owner_pop.relation_slab.get_mut(rel_key).expect("addressed relation");
        let old_psi = rel.psi;
        let mut psi = 0.0;
        for rec in &mut rel.reactions {
            rec.pi = partial_propensity_wrt_owner(rel.kind, rec.rate, n_owner, n_partner);
            psi += rec.pi;
        }
        rel.psi = psi;

        owner_pop.active = owner_pop.active + usize::from(psi > 0.0) - usize::from(old_psi > 0.0);
        // Cancellation residue from the difference update would otherwise
        // keep a population with no live reactions at a tiny nonzero Λ.
        owner_pop.lambda = if owner_pop.active == 0 { 0.0 } else { owner_pop.lambda - old_psi + psi };
        owner_pop.sigma = owner_pop.count as f64 * owner_pop.lambda;
    }

    fn recompute_total_propensity(&mut self) {
        self.total_propensity = self.populations.iter(&self.order).map(|(_, p)| p.sigma).sum();
    }

    /// Time to the next reaction for a uniform draw `r1 ∈ (0, 1]`, or
    /// `None` when no reaction is possible.
    pub fn sample_tau(&self, r1: f64) -> Option<f64> {
        if self.total_propensity > 0.0 {
            Some((1.0 / r1).ln() / self.total_propensity)
        } else {
            None
        }
    }

    /// Fires a previously sampled reaction: updates counts and dependent
    /// propensities, adds populations for new products, then deletes
    /// populations that became empty.
    pub fn apply_reaction(&mut self, selection: Selection) -> Result<(), EngineError> {
        let delta = self.record(selection)?.delta.clone();

        for (id, sigma) in delta.entries() {
            let current = self.count(id);
            if current as i64 + sigma < 0 {
                return Err(EngineError::NegativeCount { specie: id.clone(), count: current, delta: *sigma });
            }
        }

        let mut emptied = Vec::new();
        for (id, sigma) in delta.entries() {
            match self.find(id) {
                Some(key) => {
                    let n = (self.populations.get(key).unwrap().count as i64 + sigma) as u64;
                    self.update_count(key, n);
                    if n == 0 {
                        emptied.push(key);
                    }
                }
                None => {
                    self.insert_population(id.clone(), *sigma as u64)?;
                }
            }
        }
        for key in emptied {
            self.delete_population(key)?;
        }
        self.recompute_total_propensity();
        Ok(())
    }

    pub fn describe(&self, selection: Selection) -> Result<FiredReaction, EngineError> {
        let rel = self.relation(selection.population, selection.relation).ok_or(EngineError::InvalidSelection)?;
        let rec = rel.reactions.get(selection.reaction).ok_or(EngineError::InvalidSelection)?;
        Ok(FiredReaction {
            owner: rel.owner_id.clone(),
            partner: rel.partner_id.clone(),
            rate: rec.rate,
            delta: rec.delta.clone(),
        })
    }

    pub fn channel_of(&self, selection: Selection) -> Result<ChannelKey, EngineError> {
        let fired = self.describe(selection)?;
        Ok(ChannelKey::new(&fired.owner, &fired.partner, fired.delta, fired.rate))
    }

    fn record(&self, selection: Selection) -> Result<&ReactionRecord, EngineError> {
        self.relation(selection.population, selection.relation)
            .and_then(|r| r.reactions.get(selection.reaction))
            .ok_or(EngineError::InvalidSelection)
    }

    /// Executes one reaction.
    pub fn step(&mut self) -> Result<Step, EngineError> {
        self.step_until(f64::INFINITY)
    }

    /// Executes one reaction unless it would occur after `horizon`, in which
    /// case the clock is advanced to `horizon` and nothing fires.
    pub fn step_until(&mut self, horizon: f64) -> Result<Step, EngineError> {
        if self.total_propensity.is_nan() || self.total_propensity <= 0.0 {
            return Ok(Step::Exhausted);
        }
        let r1 = rng::open_closed_unit(&mut self.rng);
        let r2 = rng::closed_open_unit(&mut self.rng);
        let tau = self.sample_tau(r1).ok_or(EngineError::Exhausted)?;
        if self.time + tau > horizon {
            self.time = horizon;
            return Ok(Step::HorizonReached);
        }
        let selection = self.sample_reaction(r2)?;
        let fired = self.describe(selection)?;
        self.apply_reaction(selection)?;
        self.time += tau;
        self.reaction_count += 1;
        Ok(Step::Fired(Event { tau, fired }))
    }
}
