use crate::reaction::ReactionSpec;
use crate::rules::{Parameters, RuleError, RuleSet};
use crate::specie::SpecieId;

use super::{param, parse_index};

/// Rigid-sphere collisions `P_i + P_j → P_i + P_j` among `N` species, every
/// pair (including `i = j`) at rate `k`. Tokens are `P<i>`, `1 ≤ i ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollidingParticles {
    pub species: u64,
    pub rate: f64,
    pub initial_count: u64,
}

impl CollidingParticles {
    pub const KEYS: &'static [&'static str] = &["N", "k", "n0"];

    pub fn new(species: u64, rate: f64, initial_count: u64) -> Result<Self, RuleError> {
        if species < 1 {
            return Err(RuleError::Parameter("N must be at least 1".into()));
        }
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(RuleError::Parameter("k must be a nonnegative number".into()));
        }
        if initial_count < 1 {
            return Err(RuleError::Parameter("n0 must be at least 1".into()));
        }
        Ok(CollidingParticles { species, rate, initial_count })
    }

    pub fn from_params(params: &Parameters) -> Result<Self, RuleError> {
        Self::new(param(params, "N", 10)?, param(params, "k", 0.5)?, param(params, "n0", 50)?)
    }

    pub fn token(i: u64) -> SpecieId {
        SpecieId::new(format!("P{i}"))
    }

    pub fn universe(&self) -> Vec<SpecieId> {
        (1..=self.species).map(Self::token).collect()
    }

    pub fn initial_state(&self) -> Vec<(SpecieId, u64)> {
        self.universe().into_iter().map(|s| (s, self.initial_count)).collect()
    }

    fn check(&self, id: &SpecieId) -> Result<(), RuleError> {
        match id.as_str().strip_prefix('P').and_then(parse_index) {
            Some(i) if (1..=self.species).contains(&i) => Ok(()),
            _ => Err(RuleError::UnknownSpecie(id.to_string())),
        }
    }
}

impl RuleSet for CollidingParticles {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        if a.is_void() || b.is_void() {
            for s in [a, b] {
                if !s.is_void() {
                    self.check(s)?;
                }
            }
            return Ok(vec![]);
        }
        self.check(a)?;
        self.check(b)?;
        Ok(vec![ReactionSpec::new(self.rate, [(a.clone(), 1), (b.clone(), 1)])])
    }

    fn parameters(&self) -> Parameters {
        [
            ("N", self.species.to_string()),
            ("k", self.rate.to_string()),
            ("n0", self.initial_count.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}
