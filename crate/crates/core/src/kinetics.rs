//! Mass-action propensities for reactions with at most two reagents.
//!
//! Every reaction is treated as a reaction between an unordered pair of
//! species, with the void species standing in for a missing reagent. The
//! pair alone determines the [`ReactionKind`], and the kind fixes both the
//! combinatorial factor of the full propensity and the reagent
//! stoichiometry.

use crate::specie::SpecieId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReactionKind {
    /// `∅ + ∅ → products`
    Source,
    /// `S + ∅ → products`
    Unimolecular,
    /// `S + T → products` with `S ≠ T`
    BimolecularDistinct,
    /// `S + S → products`
    BimolecularIdentical,
}

impl ReactionKind {
    pub const ALL: [ReactionKind; 4] = [
        ReactionKind::Source,
        ReactionKind::Unimolecular,
        ReactionKind::BimolecularDistinct,
        ReactionKind::BimolecularIdentical,
    ];
}

/// Classifies the unordered pair `{a, b}`. Symmetric in its arguments.
pub fn kinetic_kind(a: &SpecieId, b: &SpecieId) -> ReactionKind {
    match (a.is_void(), b.is_void()) {
        (true, true) => ReactionKind::Source,
        (true, false) | (false, true) => ReactionKind::Unimolecular,
        (false, false) if a == b => ReactionKind::BimolecularIdentical,
        (false, false) => ReactionKind::BimolecularDistinct,
    }
}

/// Full propensity `a_μ`.
///
/// For [`ReactionKind::Unimolecular`] `n_first` is the count of the real
/// reagent; for [`ReactionKind::BimolecularIdentical`] only `n_first` is
/// read; for [`ReactionKind::Source`] both counts are ignored.
pub fn full_propensity(kind: ReactionKind, rate: f64, n_first: u64, n_second: u64) -> f64 {
    match kind {
        ReactionKind::Source => rate,
        ReactionKind::Unimolecular => n_first as f64 * rate,
        ReactionKind::BimolecularDistinct => n_first as f64 * n_second as f64 * rate,
        ReactionKind::BimolecularIdentical => pairs_of(n_first) * rate,
    }
}

/// Partial propensity with respect to the owner of a relation, i.e. the full
/// propensity divided by the owner's count, computed without forming `0/0`.
///
/// A unimolecular relation is always owned by the void species, so its
/// partial propensity is `n_partner · c` (the void count being one). An
/// identical-pair relation with an empty owner yields zero.
pub fn partial_propensity_wrt_owner(
    kind: ReactionKind,
    rate: f64,
    n_owner: u64,
    n_partner: u64,
) -> f64 {
    match kind {
        ReactionKind::Source => rate,
        ReactionKind::Unimolecular => n_partner as f64 * rate,
        ReactionKind::BimolecularDistinct => n_partner as f64 * rate,
        ReactionKind::BimolecularIdentical => 0.5 * n_owner.saturating_sub(1) as f64 * rate,
    }
}

#[inline]
fn pairs_of(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        0.5 * n as f64 * (n - 1) as f64
    }
}
