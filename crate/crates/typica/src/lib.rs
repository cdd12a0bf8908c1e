//! An inference engine for default ("typically") knowledge based on
//! possibility theory.
//!
//! Knowledge lives in fuzzy sets over finite universes. A default rule
//! `typically if ANT then CONS` becomes the material form
//! `¬ANT ∪ blocked(CONS) ∪ CONS`, where the blocked term guards the rule:
//! it can be discharged only while the consequent is still possible
//! against what is already known. Rules are introduced in priority layers
//! (facts first, then by temporal and specialization priority), each layer
//! is distributed into disjuncts, and the second-order blocked terms are
//! effected into scalar β factors. Queries project the final joint
//! relation onto a variable and report possibility/certainty grades.
//!
//! ```
//! use typica::engine::{infer, query, Classification};
//! use typica::kb::KnowledgeBase;
//!
//! let kb = KnowledgeBase::builtin("yale").unwrap();
//! let state = infer(&kb).unwrap();
//! let verdict = query(&state, "alive@3", None).unwrap();
//! assert_eq!(verdict.classification, Classification::Refuted);
//! ```

pub mod engine;
pub mod error;
pub mod fuzzy;
pub mod kb;
pub mod parser;
pub mod relation;
pub mod schedule;
pub mod second_order;
pub mod trace;

pub use engine::{apply_default, infer, query, Classification, KnowledgeState, Verdict};
pub use error::{Error, Result};
pub use fuzzy::{FuzzySet, Universe};
pub use kb::KnowledgeBase;
pub use parser::parse_kb;
pub use relation::{JointSpace, Relation, Variable};
