use std::collections::BTreeMap;

use crate::kinetics::ReactionKind;
use crate::rules::RuleError;
use crate::specie::SpecieId;

/// One reaction produced by a rule set for a pair of species: its rate
/// constant and its products. Reagents are implied by the pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionSpec {
    pub rate: f64,
    products: Vec<(SpecieId, u32)>,
}

impl ReactionSpec {
    /// Duplicate product entries are summed.
    pub fn new<I>(rate: f64, products: I) -> Self
    where
        I: IntoIterator<Item = (SpecieId, u32)>,
    {
        let mut merged: BTreeMap<SpecieId, u32> = BTreeMap::new();
        for (id, m) in products {
            *merged.entry(id).or_default() += m;
        }
        ReactionSpec {
            rate,
            products: merged.into_iter().collect(),
        }
    }

    pub fn products(&self) -> &[(SpecieId, u32)] {
        &self.products
    }
}

/// Net change of counts caused by one firing, sorted by species, with zero
/// entries omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StoichiometryDelta(Vec<(SpecieId, i64)>);

impl StoichiometryDelta {
    pub fn entries(&self) -> &[(SpecieId, i64)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, id: &SpecieId) -> i64 {
        self.0
            .binary_search_by(|(s, _)| s.cmp(id))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn from_map(map: BTreeMap<SpecieId, i64>) -> Self {
        StoichiometryDelta(map.into_iter().filter(|(_, v)| *v != 0).collect())
    }
}

/// Products minus the reagents implied by `kind` for the pair `(a, b)`.
pub fn net_stoichiometry(
    kind: ReactionKind,
    pair: (&SpecieId, &SpecieId),
    spec: &ReactionSpec,
) -> Result<StoichiometryDelta, RuleError> {
    if !(spec.rate >= 0.0 && spec.rate.is_finite()) {
        return Err(RuleError::InvalidReaction(format!(
            "rate {} for pair ({}, {}) is not a nonnegative finite number",
            spec.rate, pair.0, pair.1
        )));
    }
    let mut net: BTreeMap<SpecieId, i64> = BTreeMap::new();
    for (id, m) in spec.products() {
        if id.is_void() {
            return Err(RuleError::InvalidReaction(format!(
                "void species listed as a product of ({}, {})",
                pair.0, pair.1
            )));
        }
        if *m == 0 {
            return Err(RuleError::InvalidReaction(format!(
                "zero multiplicity for product {id}"
            )));
        }
        *net.entry(id.clone()).or_default() += i64::from(*m);
    }
    let (a, b) = pair;
    match kind {
        ReactionKind::Source => {}
        ReactionKind::Unimolecular => {
            let real = if a.is_void() { b } else { a };
            *net.entry(real.clone()).or_default() -= 1;
        }
        ReactionKind::BimolecularDistinct => {
            *net.entry(a.clone()).or_default() -= 1;
            *net.entry(b.clone()).or_default() -= 1;
        }
        ReactionKind::BimolecularIdentical => {
            *net.entry(a.clone()).or_default() -= 2;
        }
    }
    Ok(StoichiometryDelta::from_map(net))
}

/// Identifies a reaction channel independently of which engine holds it:
/// the unordered reagent pair, the net change and the rate constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelKey {
    pub first: SpecieId,
    pub second: SpecieId,
    pub delta: StoichiometryDelta,
    pub rate_bits: u64,
}

impl ChannelKey {
    pub fn new(a: &SpecieId, b: &SpecieId, delta: StoichiometryDelta, rate: f64) -> Self {
        let (first, second) = if a <= b { (a, b) } else { (b, a) };
        ChannelKey {
            first: first.clone(),
            second: second.clone(),
            delta,
            rate_bits: rate.to_bits(),
        }
    }

    pub fn rate(&self) -> f64 {
        f64::from_bits(self.rate_bits)
    }
}

/// A reaction that fired.
#[derive(Debug, Clone, PartialEq)]
pub struct FiredReaction {
    pub owner: SpecieId,
    pub partner: SpecieId,
    pub rate: f64,
    pub delta: StoichiometryDelta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    /// Time elapsed since the previous event.
    pub tau: f64,
    pub fired: FiredReaction,
}

/// Outcome of advancing a simulation by one event.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Fired(Event),
    /// Total propensity is zero; no further reaction can occur.
    Exhausted,
    /// The next event would have happened after the requested horizon; the
    /// clock was moved to the horizon and nothing fired.
    HorizonReached,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> SpecieId {
        SpecieId::new(s)
    }

    fn delta(entries: &[(&str, i64)]) -> StoichiometryDelta {
        StoichiometryDelta::from_map(entries.iter().map(|(s, v)| (id(s), *v)).collect())
    }

    #[test]
    fn elastic_collision_has_empty_delta() {
        let spec = ReactionSpec::new(0.5, [(id("A"), 1), (id("B"), 1)]);
        let d = net_stoichiometry(ReactionKind::BimolecularDistinct, (&id("A"), &id("B")), &spec).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn unimolecular_conversion() {
        let spec = ReactionSpec::new(1.0, [(id("B"), 2)]);
        let d = net_stoichiometry(ReactionKind::Unimolecular, (&id("A"), &SpecieId::void()), &spec).unwrap();
        assert_eq!(d, delta(&[("A", -1), ("B", 2)]));
        let d = net_stoichiometry(ReactionKind::Unimolecular, (&SpecieId::void(), &id("A")), &spec).unwrap();
        assert_eq!(d, delta(&[("A", -1), ("B", 2)]));
    }

    #[test]
    fn identical_pair_consumes_two() {
        let spec = ReactionSpec::new(1.0, [(id("A"), 1), (id("C"), 1)]);
        let d = net_stoichiometry(ReactionKind::BimolecularIdentical, (&id("A"), &id("A")), &spec).unwrap();
        assert_eq!(d, delta(&[("A", -1), ("C", 1)]));
        assert_eq!(d.get(&id("A")), -1);
        assert_eq!(d.get(&id("Z")), 0);
    }

    #[test]
    fn source_has_no_reagents() {
        let spec = ReactionSpec::new(2.0, [(id("A"), 1)]);
        let v = SpecieId::void();
        let d = net_stoichiometry(ReactionKind::Source, (&v, &v), &spec).unwrap();
        assert_eq!(d, delta(&[("A", 1)]));
    }

    #[test]
    fn void_product_rejected() {
        let spec = ReactionSpec::new(1.0, [(SpecieId::void(), 1)]);
        let v = SpecieId::void();
        assert!(net_stoichiometry(ReactionKind::Source, (&v, &v), &spec).is_err());
    }

    #[test]
    fn bad_rates_rejected() {
        let v = SpecieId::void();
        for rate in [-1.0, f64::NAN, f64::INFINITY] {
            let spec = ReactionSpec::new(rate, []);
            assert!(net_stoichiometry(ReactionKind::Source, (&v, &v), &spec).is_err());
        }
    }

    #[test]
    fn duplicate_products_are_aggregated() {
        let split = ReactionSpec::new(1.0, [(id("B"), 1), (id("C"), 1), (id("B"), 1)]);
        let merged = ReactionSpec::new(1.0, [(id("C"), 1), (id("B"), 2)]);
        assert_eq!(split, merged);
        let pair = (&id("A"), &id("B"));
        assert_eq!(
            net_stoichiometry(ReactionKind::BimolecularDistinct, pair, &split).unwrap(),
            net_stoichiometry(ReactionKind::BimolecularDistinct, pair, &merged).unwrap()
        );
    }

    #[test]
    fn channel_key_is_order_insensitive() {
        let d = delta(&[("A", -1)]);
        assert_eq!(
            ChannelKey::new(&id("A"), &id("B"), d.clone(), 1.0),
            ChannelKey::new(&id("B"), &id("A"), d, 1.0)
        );
    }
}
