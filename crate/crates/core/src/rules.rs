use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::reaction::ReactionSpec;
use crate::specie::SpecieId;

/// Model parameters as loaded from a configuration file.
pub type Parameters = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("unknown species token {0:?}")]
    UnknownSpecie(String),
    #[error("invalid reaction: {0}")]
    InvalidReaction(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Generator of every reaction possible between an unordered pair of
/// species.
///
/// `generate(a, b)` and `generate(b, a)` must describe the same reactions
/// (the engines call it once per unordered pair, in either orientation),
/// and the output must depend only on the pair and the rule set's
/// parameters. Either argument may be the void species.
pub trait RuleSet {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError>;

    fn parameters(&self) -> Parameters {
        Parameters::new()
    }
}

impl<R: RuleSet + ?Sized> RuleSet for &R {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        (**self).generate(a, b)
    }

    fn parameters(&self) -> Parameters {
        (**self).parameters()
    }
}

impl<R: RuleSet + ?Sized> RuleSet for Box<R> {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        (**self).generate(a, b)
    }

    fn parameters(&self) -> Parameters {
        (**self).parameters()
    }
}

impl<R: RuleSet + ?Sized> RuleSet for Arc<R> {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        (**self).generate(a, b)
    }

    fn parameters(&self) -> Parameters {
        (**self).parameters()
    }
}
