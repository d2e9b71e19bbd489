//! Gillespie's direct method over a fully enumerated network.
//!
//! Every channel's propensity is recomputed each step and the fired channel
//! is found by a linear scan, so a step costs O(M). This is the reference
//! the partial-propensity engine is checked against.

use std::collections::HashMap;

use thiserror::Error;

use crate::kinetics::{kinetic_kind, ReactionKind};
use crate::reaction::{net_stoichiometry, ChannelKey, Event, FiredReaction, StoichiometryDelta, Step};
use crate::rng::{self, SimRng};
use crate::rules::{RuleError, RuleSet};
use crate::specie::SpecieId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("species {0} is not in the enumerated universe")]
    OutsideUniverse(SpecieId),
    #[error("species {0} appears twice in the universe")]
    DuplicateSpecie(SpecieId),
    #[error("the void species cannot be listed in the universe")]
    VoidInUniverse,
    #[error("count of {specie} would become negative ({count} {delta:+})")]
    NegativeCount { specie: SpecieId, count: u64, delta: i64 },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// Number of distinct reagent combinations for a channel.
pub fn h_mu(kind: ReactionKind, n_first: u64, n_second: u64) -> u64 {
    match kind {
        ReactionKind::Source => 1,
        ReactionKind::Unimolecular => n_first,
        ReactionKind::BimolecularDistinct => n_first * n_second,
        ReactionKind::BimolecularIdentical => n_first * n_first.saturating_sub(1) / 2,
    }
}

#[derive(Debug, Clone)]
pub struct ReactionChannel {
    pub rate: f64,
    pub kind: ReactionKind,
    /// Universe indices of the reagents; `None` stands for the void.
    pub reagents: (Option<usize>, Option<usize>),
    pub delta: Vec<(usize, i64)>,
    pub key: ChannelKey,
}

#[derive(Debug, Clone)]
pub struct StaticNetwork {
    species: Vec<SpecieId>,
    index: HashMap<SpecieId, usize>,
    channels: Vec<ReactionChannel>,
    alpha: usize,
}

impl StaticNetwork {
    /// Calls the rules once for every unordered pair drawn from the universe
    /// plus the void species. Every product must belong to the universe.
    pub fn enumerate<R: RuleSet>(rules: &R, universe: &[SpecieId]) -> Result<Self, OracleError> {
        let mut index = HashMap::with_capacity(universe.len());
        for (i, s) in universe.iter().enumerate() {
            if s.is_void() {
                return Err(OracleError::VoidInUniverse);
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(OracleError::DuplicateSpecie(s.clone()));
            }
        }
        let slots: Vec<Option<usize>> = std::iter::once(None).chain((0..universe.len()).map(Some)).collect();
        let id_of = |slot: Option<usize>| slot.map(|i| universe[i].clone()).unwrap_or_else(SpecieId::void);

        let mut channels = Vec::new();
        let mut alpha = 0;
        for (i, &a) in slots.iter().enumerate() {
            for &b in &slots[i..] {
                let (ia, ib) = (id_of(a), id_of(b));
                let specs = rules.generate(&ia, &ib)?;
                alpha = alpha.max(specs.len());
                let kind = kinetic_kind(&ia, &ib);
                for spec in specs {
                    let delta = net_stoichiometry(kind, (&ia, &ib), &spec)?;
                    let indexed = delta
                        .entries()
                        .iter()
                        .map(|(s, d)| index.get(s).map(|&i| (i, *d)).ok_or_else(|| OracleError::OutsideUniverse(s.clone())))
                        .collect::<Result<Vec<_>, _>>()?;
                    // Unimolecular reagent goes first so h_mu sees its count.
                    let reagents = if a.is_none() { (b, a) } else { (a, b) };
                    channels.push(ReactionChannel {
                        rate: spec.rate,
                        kind,
                        reagents,
                        delta: indexed,
                        key: ChannelKey::new(&ia, &ib, delta, spec.rate),
                    });
                }
            }
        }
        Ok(StaticNetwork { species: universe.to_vec(), index, channels, alpha })
    }

    pub fn species(&self) -> &[SpecieId] {
        &self.species
    }

    pub fn channels(&self) -> &[ReactionChannel] {
        &self.channels
    }

    /// Number of channels `M`.
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Largest number of channels generated for a single pair.
    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn index_of(&self, id: &SpecieId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// `a_μ = h_μ c_μ` for every channel.
    pub fn propensities(&self, counts: &[u64]) -> Vec<f64> {
        self.channels.iter().map(|ch| self.propensity(ch, counts)).collect()
    }

    #[inline]
    fn propensity(&self, ch: &ReactionChannel, counts: &[u64]) -> f64 {
        let n = |slot: Option<usize>| slot.map(|i| counts[i]).unwrap_or(1);
        h_mu(ch.kind, n(ch.reagents.0), n(ch.reagents.1)) as f64 * ch.rate
    }

    fn fired(&self, ch: &ReactionChannel) -> FiredReaction {
        let id = |slot: Option<usize>| slot.map(|i| self.species[i].clone()).unwrap_or_else(SpecieId::void);
        FiredReaction {
            owner: id(ch.reagents.0),
            partner: id(ch.reagents.1),
            rate: ch.rate,
            delta: ch.key.delta.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DmState {
    counts: Vec<u64>,
    time: f64,
    reaction_count: u64,
    rng: SimRng,
    // reused between steps
    scratch: Vec<f64>,
}

impl DmState {
    /// Species of `net` absent from `initial` start at zero.
    pub fn new(net: &StaticNetwork, initial: &[(SpecieId, u64)], seed: u64) -> Result<Self, OracleError> {
        let mut counts = vec![0; net.species.len()];
        for (id, n) in initial {
            let i = net.index_of(id).ok_or_else(|| OracleError::OutsideUniverse(id.clone()))?;
            counts[i] = *n;
        }
        Ok(DmState {
            counts,
            time: 0.0,
            reaction_count: 0,
            rng: rng::seeded(seed),
            scratch: Vec::with_capacity(net.len()),
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, net: &StaticNetwork, id: &SpecieId) -> u64 {
        net.index_of(id).map(|i| self.counts[i]).unwrap_or(0)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn reaction_count(&self) -> u64 {
        self.reaction_count
    }

    /// Nonzero counts keyed by species.
    pub fn snapshot(&self, net: &StaticNetwork) -> std::collections::BTreeMap<SpecieId, u64> {
        net.species
            .iter()
            .zip(&self.counts)
            .filter(|(_, &n)| n > 0)
            .map(|(s, &n)| (s.clone(), n))
            .collect()
    }

    /// Applies a net change without sampling, e.g. to replay events fired by
    /// another engine.
    pub fn apply_delta(&mut self, net: &StaticNetwork, delta: &StoichiometryDelta) -> Result<(), OracleError> {
        let mut indexed = Vec::with_capacity(delta.len());
        for (id, d) in delta.entries() {
            let i = net.index_of(id).ok_or_else(|| OracleError::OutsideUniverse(id.clone()))?;
            indexed.push((i, *d));
        }
        self.apply_indexed(net, &indexed)
    }

    fn apply_indexed(&mut self, net: &StaticNetwork, delta: &[(usize, i64)]) -> Result<(), OracleError> {
        for &(i, d) in delta {
            if (self.counts[i] as i64) + d < 0 {
                return Err(OracleError::NegativeCount { specie: net.species[i].clone(), count: self.counts[i], delta: d });
            }
        }
        for &(i, d) in delta {
            self.counts[i] = (self.counts[i] as i64 + d) as u64;
        }
        Ok(())
    }

    pub fn step(&mut self, net: &StaticNetwork) -> Result<Step, OracleError> {
        self.step_until(net, f64::INFINITY)
    }

    /// One direct-method step; stops at `horizon` like
    /// [`crate::Engine::step_until`].
    pub fn step_until(&mut self, net: &StaticNetwork, horizon: f64) -> Result<Step, OracleError> {
        self.scratch.clear();
        let mut total = 0.0;
        for ch in &net.channels {
            let a = net.propensity(ch, &self.counts);
            total += a;
            self.scratch.push(a);
        }
        if total.is_nan() || total <= 0.0 {
            return Ok(Step::Exhausted);
        }
        let r1 = rng::open_closed_unit(&mut self.rng);
        let r2 = rng::closed_open_unit(&mut self.rng);
        let tau = (1.0 / r1).ln() / total;
        if self.time + tau > horizon {
            self.time = horizon;
            return Ok(Step::HorizonReached);
        }
        let j = select_channel(&self.scratch, total * r2);
        let ch = &net.channels[j];
        self.apply_indexed(net, &ch.delta)?;
        self.time += tau;
        self.reaction_count += 1;
        Ok(Step::Fired(Event { tau, fired: net.fired(ch) }))
    }
}

/// Index `j` with `Σ_{μ<j} a_μ ≤ target < Σ_{μ≤j} a_μ`; overruns go to the
/// last positive entry.
pub fn select_channel(propensities: &[f64], target: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, &a) in propensities.iter().enumerate() {
        if a > 0.0 {
            acc += a;
            if target < acc {
                return j;
            }
            last_positive = j;
        }
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reaction::ReactionSpec;

    struct Elastic;

    impl RuleSet for Elastic {
        fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
            if a.is_void() || b.is_void() {
                return Ok(vec![]);
            }
            Ok(vec![ReactionSpec::new(0.5, [(a.clone(), 1), (b.clone(), 1)])])
        }
    }

    fn ids(tokens: &[&str]) -> Vec<SpecieId> {
        tokens.iter().map(SpecieId::new).collect()
    }

    #[test]
    fn h_mu_examples() {
        assert_eq!(h_mu(ReactionKind::BimolecularIdentical, 4, 4), 6);
        assert_eq!(h_mu(ReactionKind::BimolecularDistinct, 3, 5), 15);
        assert_eq!(h_mu(ReactionKind::BimolecularIdentical, 0, 0), 0);
        assert_eq!(h_mu(ReactionKind::Unimolecular, 0, 1), 0);
        assert_eq!(h_mu(ReactionKind::Source, 0, 0), 1);
    }

    #[test]
    fn colliding_three_species_has_six_channels() {
        let net = StaticNetwork::enumerate(&Elastic, &ids(&["P1", "P2", "P3"])).unwrap();
        assert_eq!(net.len(), 6);
        assert_eq!(net.alpha(), 1);
    }

    #[test]
    fn empty_universe_only_sources() {
        let net = StaticNetwork::enumerate(&Elastic, &[]).unwrap();
        assert!(net.is_empty());
    }

    #[test]
    fn single_channel_always_selected() {
        assert_eq!(select_channel(&[0.0, 3.0, 0.0], 0.0), 1);
        assert_eq!(select_channel(&[0.0, 3.0, 0.0], 2.9), 1);
        assert_eq!(select_channel(&[0.0, 3.0, 0.0], 3.5), 1);
    }

    #[test]
    fn frozen_three_channel_frequencies() {
        let props = [2.0, 1.0, 1.0];
        let mut rng = rng::seeded(5);
        let draws = 100_000;
        let mut hits = [0usize; 3];
        for _ in 0..draws {
            hits[select_channel(&props, 4.0 * rng::closed_open_unit(&mut rng))] += 1;
        }
        for (h, p) in hits.iter().zip([0.5, 0.25, 0.25]) {
            let mean = draws as f64 * p;
            let sd = (draws as f64 * p * (1.0 - p)).sqrt();
            assert!((*h as f64 - mean).abs() < 3.0 * sd);
        }
    }

    #[test]
    fn colliding_state_is_invariant() {
        let universe = ids(&["P1", "P2", "P3"]);
        let net = StaticNetwork::enumerate(&Elastic, &universe).unwrap();
        let initial: Vec<_> = universe.iter().map(|s| (s.clone(), 50)).collect();
        let mut state = DmState::new(&net, &initial, 3).unwrap();
        let before = state.snapshot(&net);
        for _ in 0..5000 {
            assert!(matches!(state.step(&net).unwrap(), Step::Fired(_)));
        }
        assert_eq!(state.snapshot(&net), before);
        assert_eq!(state.reaction_count(), 5000);
    }

    #[test]
    fn total_propensity_matches_enumeration() {
        let universe = ids(&["P1", "P2", "P3"]);
        let net = StaticNetwork::enumerate(&Elastic, &universe).unwrap();
        let counts = vec![50; 3];
        let total: f64 = net.propensities(&counts).iter().sum();
        assert_eq!(total, 5587.5);
    }

    #[test]
    fn products_outside_universe_rejected() {
        struct Grows;
        impl RuleSet for Grows {
            fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
                if a.is_void() && b.is_void() {
                    Ok(vec![ReactionSpec::new(1.0, [(SpecieId::new("X"), 1)])])
                } else {
                    Ok(vec![])
                }
            }
        }
        assert!(matches!(
            StaticNetwork::enumerate(&Grows, &ids(&["A"])),
            Err(OracleError::OutsideUniverse(_))
        ));
    }

    #[test]
    fn exhausted_without_propensity() {
        let net = StaticNetwork::enumerate(&Elastic, &ids(&["P1"])).unwrap();
        let mut state = DmState::new(&net, &[(SpecieId::new("P1"), 1)], 0).unwrap();
        assert_eq!(state.step(&net).unwrap(), Step::Exhausted);
        assert_eq!(state.time(), 0.0);
    }
}
