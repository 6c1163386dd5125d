//! Symbolic expressions over varieties and their classes in K₀(Var).

mod class;
mod expr;
mod gmap;
mod normalize;
mod parse;
mod relations;

pub use class::{KClass, Monomial};
pub use expr::{Builtin, DerivedTerm, Generator, VarietyExpr};
pub use gmap::{
    expr_dim, f_map, g_map, is_compact_expr, CompactPresentation, Compactification, CompactificationTable,
};
pub use normalize::{normalize, projective_class, Normalizer, DEFAULT_REWRITE_BUDGET};
pub use parse::parse_expr;
pub use relations::{GeneratorDecl, Relation, RelationKind, RelationRecord, RelationSet};
pub use crate::site::{verify_square_relation, SquareRelationReport};
