//! The span category, distinguished squares and simple covers.

mod cover;
mod dimension;
mod object;
mod presentation;
mod span;
mod square;

pub use cover::{check_c_complete, enumerate_simple_covers, CCompleteVerdict, CoverTree, SimpleCover, DEFAULT_DEPTH};
pub use dimension::{check_dim_compatible, is_direct, DimVerdict, DimVerdictSummary};
pub use object::{Backend, DeclaredObject, SiteObject};
pub use presentation::{
    BackendRef, CompositionRecord, FanRef, MorphismRecord, ObjectRecord, PullbackRecord, SiteFile, SitePresentation,
    SquareRecord,
};
pub use span::{compose, DeclaredSpan, DeclaredWindow, SpanMorphism, ToricSpan};
pub use square::{
    localization_square, validate_square, verify_square_relation, CheckEntry, CheckStatus, DeclaredFlags,
    DistinguishedSquare, SquareKind, SquareRelationReport, ValidationReport,
};
