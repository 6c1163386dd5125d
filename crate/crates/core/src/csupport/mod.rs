//! Compactly supported extensions of measures on compact objects, and the
//! identities they must satisfy.

mod checks;
mod compactify;
mod extend;
mod measure;

pub use checks::{additivity_check, consistency_check, independence_check, CheckReport, ConsistencyArgs, ConsistencyKind};
pub use compactify::{ChoiceSummary, CompactificationChoice, CompactificationProvider, ToricCompletion};
pub use extend::{extend_measure, extend_with_choice, ExtensionResult, TraceStep};
pub use measure::MeasureOnCompacts;
