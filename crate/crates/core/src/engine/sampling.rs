use super::{Engine, EngineError, PopulationKey, RelationKey};
use crate::rules::RuleSet;

/// Handles of a sampled reaction: its owner population, relation, and
/// position within the relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub population: PopulationKey,
    pub relation: RelationKey,
    pub reaction: usize,
}

impl<R: RuleSet> Engine<R> {
    /// Selects a reaction with probability `a_μ / a` for a uniform draw
    /// `r2 ∈ [0, 1)`.
    ///
    /// Stage one accumulates Σ over populations forward so it picks exactly
    /// the population whose interval contains `a · r2`. Stages two and three
    /// divide the remainder by the owner's count and subtract Ψ, then π,
    /// until it falls inside an interval. If rounding carries the target
    /// past the end of a stage, the last element with positive propensity
    /// is taken; an element with zero propensity is never selected.
    pub fn sample_reaction(&self, r2: f64) -> Result<Selection, EngineError> {
        let a = self.total_propensity;
        if a.is_nan() || a <= 0.0 {
            return Err(EngineError::Exhausted);
        }
        let target = a * r2;

        let mut below = 0.0;
        let mut chosen = None;
        let mut last_positive = None;
        for (key, pop) in self.populations.iter(&self.order) {
            if pop.sigma > 0.0 {
                let above = below + pop.sigma;
                if target < above {
                    chosen = Some((key, below));
                    break;
                }
                last_positive = Some((key, below));
                below = above;
            }
        }
        let (pop_key, below) = chosen.or(last_positive).ok_or(EngineError::NoPositivePropensity)?;
        let pop = self.populations.get(pop_key).expect("sampled population");

        let mut g = (target - below) / pop.count as f64;
        let mut chosen = None;
        let mut last_positive = None;
        for (key, rel) in pop.relation_slab.iter(&pop.relations) {
            if rel.psi > 0.0 {
                if g < rel.psi {
                    chosen = Some((key, g));
                    break;
                }
                last_positive = Some((key, f64::INFINITY));
                g -= rel.psi;
            }
        }
        let (rel_key, mut g) = chosen.or(last_positive).ok_or(EngineError::NoPositivePropensity)?;
        let rel = pop.relation_slab.get(rel_key).expect("sampled relation");

        let mut chosen = None;
        let mut last_positive = None;
        for (i, rec) in rel.reactions.iter().enumerate() {
            if rec.pi > 0.0 {
                if g < rec.pi {
                    chosen = Some(i);
                    break;
                }
                last_positive = Some(i);
                g -= rec.pi;
            }
        }
        let reaction = chosen.or(last_positive).ok_or(EngineError::NoPositivePropensity)?;

        Ok(Selection { population: pop_key, relation: rel_key, reaction })
    }
}
