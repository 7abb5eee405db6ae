//! Dynamic epistemic logic with edge-conditioned event models and general
//! attention.

pub mod attention;
pub mod equivalence;
pub mod error;
pub mod events;
pub mod formula;
pub mod models;
pub mod parse;
pub mod random;
pub mod sat;
pub mod semantics;
pub mod tableau;
pub mod transforms;

pub use error::{Error, Result};
pub use events::{CondEdge, Ecem, EventModel, Gau, Kind, Sem};
pub use formula::{Agent, Atom, Formula, LanguageTag, Literal};
pub use models::{KripkeModel, PointedModel, Prop};
