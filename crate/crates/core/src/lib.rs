//! Exact stochastic simulation of reaction systems whose species are
//! generated on the fly.
//!
//! [`Engine`] implements the expandable partial-propensity direct method:
//! species exist in the engine only while their count is positive, and the
//! reactions between a newly created species and every live one are
//! produced by a user-supplied [`RuleSet`]. [`dm`] holds a textbook direct
//! method over an enumerated network, used as the reference the engine is
//! tested against.
//!
//! ```
//! use epdm_core::{Engine, Step};
//! use epdm_core::models::BirthDeathDimer;
//!
//! let rules = BirthDeathDimer::new(1.0, 0.1, 0.05, 0.2).unwrap();
//! let mut engine = Engine::new(rules, &[], 7).unwrap();
//! while engine.time() < 5.0 {
//!     match engine.step_until(5.0).unwrap() {
//!         Step::Fired(_) => {}
//!         Step::HorizonReached | Step::Exhausted => break,
//!     }
//! }
//! assert!(engine.validate_structure().is_empty());
//! ```

pub mod arena;
pub mod dm;
pub mod engine;
pub mod kinetics;
pub mod models;
pub mod reaction;
pub mod rng;
pub mod rules;
pub mod specie;
pub mod stats;

pub use engine::{Engine, EngineError, Population, PopulationKey, Relation, RelationKey, Selection, Violation};
pub use kinetics::{full_propensity, kinetic_kind, partial_propensity_wrt_owner, ReactionKind};
pub use reaction::{net_stoichiometry, ChannelKey, Event, FiredReaction, ReactionSpec, Step, StoichiometryDelta};
pub use rules::{Parameters, RuleError, RuleSet};
pub use specie::SpecieId;
