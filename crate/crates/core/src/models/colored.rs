use crate::reaction::ReactionSpec;
use crate::rules::{Parameters, RuleError, RuleSet};
use crate::specie::SpecieId;

use super::{param, parse_index};

/// Particles of `N` types carrying one of `Ω` colors. Every collision
/// `P_i^α + P_j^β → P_i^{α+1} + P_j^{β+1}` happens at rate `k`, colors
/// wrapping from `Ω` back to 1. Tokens are `P<i>.<α>` with 1-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoredParticles {
    pub types: u64,
    pub colors: u64,
    pub rate: f64,
    /// Color of every particle at the start; one particle per type.
    pub initial_color: u64,
}

impl ColoredParticles {
    pub const KEYS: &'static [&'static str] = &["N", "Omega", "k", "color0"];

    pub fn new(types: u64, colors: u64, rate: f64, initial_color: u64) -> Result<Self, RuleError> {
        if types < 1 {
            return Err(RuleError::Parameter("N must be at least 1".into()));
        }
        if colors < 2 {
            return Err(RuleError::Parameter("Omega must be at least 2".into()));
        }
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(RuleError::Parameter("k must be a nonnegative number".into()));
        }
        if !(1..=colors).contains(&initial_color) {
            return Err(RuleError::Parameter("color0 must lie in [1, Omega]".into()));
        }
        Ok(ColoredParticles { types, colors, rate, initial_color })
    }

    pub fn from_params(params: &Parameters) -> Result<Self, RuleError> {
        Self::new(
            param(params, "N", 10)?,
            param(params, "Omega", 10)?,
            param(params, "k", 0.5)?,
            param(params, "color0", 1)?,
        )
    }

    pub fn token(particle: u64, color: u64) -> SpecieId {
        SpecieId::new(format!("P{particle}.{color}"))
    }

    pub fn parse(&self, id: &SpecieId) -> Result<(u64, u64), RuleError> {
        let unknown = || RuleError::UnknownSpecie(id.to_string());
        let rest = id.as_str().strip_prefix('P').ok_or_else(unknown)?;
        let (i, c) = rest.split_once('.').ok_or_else(unknown)?;
        let (i, c) = (parse_index(i).ok_or_else(unknown)?, parse_index(c).ok_or_else(unknown)?);
        if (1..=self.types).contains(&i) && (1..=self.colors).contains(&c) {
            Ok((i, c))
        } else {
            Err(unknown())
        }
    }

    fn successor(&self, id: &SpecieId) -> Result<SpecieId, RuleError> {
        let (i, c) = self.parse(id)?;
        Ok(Self::token(i, if c == self.colors { 1 } else { c + 1 }))
    }

    pub fn universe_size(&self) -> u64 {
        self.types.saturating_mul(self.colors)
    }

    pub fn universe(&self) -> Vec<SpecieId> {
        (1..=self.types)
            .flat_map(|i| (1..=self.colors).map(move |c| Self::token(i, c)))
            .collect()
    }

    pub fn initial_state(&self) -> Vec<(SpecieId, u64)> {
        (1..=self.types).map(|i| (Self::token(i, self.initial_color), 1)).collect()
    }
}

impl RuleSet for ColoredParticles {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        if a.is_void() || b.is_void() {
            for s in [a, b] {
                if !s.is_void() {
                    self.parse(s)?;
                }
            }
            return Ok(vec![]);
        }
        let products = [(self.successor(a)?, 1), (self.successor(b)?, 1)];
        Ok(vec![ReactionSpec::new(self.rate, products)])
    }

    fn parameters(&self) -> Parameters {
        [
            ("N", self.types.to_string()),
            ("Omega", self.colors.to_string()),
            ("k", self.rate.to_string()),
            ("color0", self.initial_color.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::kinetic_kind;
    use crate::reaction::{net_stoichiometry, StoichiometryDelta};

    fn delta_of(m: &ColoredParticles, a: &str, b: &str) -> StoichiometryDelta {
        let (a, b) = (SpecieId::new(a), SpecieId::new(b));
        let specs = m.generate(&a, &b).unwrap();
        assert_eq!(specs.len(), 1);
        net_stoichiometry(kinetic_kind(&a, &b), (&a, &b), &specs[0]).unwrap()
    }

    fn delta(entries: &[(&str, i64)]) -> StoichiometryDelta {
        StoichiometryDelta::from_map(entries.iter().map(|(s, v)| (SpecieId::new(s), *v)).collect())
    }

    #[test]
    fn both_colors_advance() {
        let m = ColoredParticles::new(2, 3, 1.0, 1).unwrap();
        assert_eq!(
            delta_of(&m, "P1.1", "P2.1"),
            delta(&[("P1.1", -1), ("P2.1", -1), ("P1.2", 1), ("P2.2", 1)])
        );
    }

    #[test]
    fn top_color_wraps_to_one() {
        let m = ColoredParticles::new(2, 3, 1.0, 1).unwrap();
        assert_eq!(delta_of(&m, "P1.3", "P1.3"), delta(&[("P1.3", -2), ("P1.1", 2)]));
        assert_eq!(
            delta_of(&m, "P1.3", "P2.2"),
            delta(&[("P1.3", -1), ("P2.2", -1), ("P1.1", 1), ("P2.3", 1)])
        );
    }

    #[test]
    fn malformed_tokens_rejected() {
        let m = ColoredParticles::new(2, 3, 1.0, 1).unwrap();
        for bad in ["P1", "P3.1", "P1.4", "P1.0", "X1.1", "P1.", ".1", "P1.1.1"] {
            assert!(m.generate(&SpecieId::new(bad), &SpecieId::new("P1.1")).is_err(), "{bad}");
        }
    }

    #[test]
    fn small_universe_channel_count() {
        // N = 2, Ω = 2: four species and 4·5/2 pairs with one reaction each
        let m = ColoredParticles::new(2, 2, 1.0, 1).unwrap();
        let net = crate::dm::StaticNetwork::enumerate(&m, &m.universe()).unwrap();
        assert_eq!(m.universe().len(), 4);
        assert_eq!(net.len(), 10);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ColoredParticles::new(0, 3, 1.0, 1).is_err());
        assert!(ColoredParticles::new(2, 1, 1.0, 1).is_err());
        assert!(ColoredParticles::new(2, 3, 1.0, 4).is_err());
    }
}
