use crate::reaction::ReactionSpec;
use crate::rules::{Parameters, RuleError, RuleSet};
use crate::specie::SpecieId;

use super::param;

/// `∅ → A` (b), `A → ∅` (d), `2A → B` (c), `B → 2A` (u). Small enough to
/// enumerate, and exercises all four reaction kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathDimer {
    pub birth: f64,
    pub death: f64,
    pub dimerization: f64,
    pub dissociation: f64,
    pub initial_a: u64,
    pub initial_b: u64,
}

impl BirthDeathDimer {
    pub const KEYS: &'static [&'static str] = &["b", "d", "c", "u", "A0", "B0"];

    pub fn new(birth: f64, death: f64, dimerization: f64, dissociation: f64) -> Result<Self, RuleError> {
        for (name, v) in [("b", birth), ("d", death), ("c", dimerization), ("u", dissociation)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(RuleError::Parameter(format!("{name} must be a nonnegative number")));
            }
        }
        Ok(BirthDeathDimer { birth, death, dimerization, dissociation, initial_a: 0, initial_b: 0 })
    }

    pub fn with_initial(mut self, a: u64, b: u64) -> Self {
        self.initial_a = a;
        self.initial_b = b;
        self
    }

    pub fn from_params(params: &Parameters) -> Result<Self, RuleError> {
        Ok(Self::new(
            param(params, "b", 1.0)?,
            param(params, "d", 0.1)?,
            param(params, "c", 0.05)?,
            param(params, "u", 0.2)?,
        )?
        .with_initial(param(params, "A0", 0)?, param(params, "B0", 0)?))
    }

    pub fn a() -> SpecieId {
        SpecieId::new("A")
    }

    pub fn b() -> SpecieId {
        SpecieId::new("B")
    }

    pub fn universe(&self) -> Vec<SpecieId> {
        vec![Self::a(), Self::b()]
    }

    pub fn initial_state(&self) -> Vec<(SpecieId, u64)> {
        [(Self::a(), self.initial_a), (Self::b(), self.initial_b)]
            .into_iter()
            .filter(|(_, n)| *n > 0)
            .collect()
    }
}

impl RuleSet for BirthDeathDimer {
    fn generate(&self, x: &SpecieId, y: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        let mut pair = [x.as_str(), y.as_str()];
        pair.sort();
        let reactions = match pair {
            ["", ""] => vec![ReactionSpec::new(self.birth, [(Self::a(), 1)])],
            ["", "A"] => vec![ReactionSpec::new(self.death, [])],
            ["", "B"] => vec![ReactionSpec::new(self.dissociation, [(Self::a(), 2)])],
            ["A", "A"] => vec![ReactionSpec::new(self.dimerization, [(Self::b(), 1)])],
            ["A", "B"] | ["B", "B"] => vec![],
            _ => {
                let bad = if matches!(x.as_str(), "" | "A" | "B") { y } else { x };
                return Err(RuleError::UnknownSpecie(bad.to_string()));
            }
        };
        Ok(reactions)
    }

    fn parameters(&self) -> Parameters {
        [
            ("b", self.birth.to_string()),
            ("d", self.death.to_string()),
            ("c", self.dimerization.to_string()),
            ("u", self.dissociation.to_string()),
            ("A0", self.initial_a.to_string()),
            ("B0", self.initial_b.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}
