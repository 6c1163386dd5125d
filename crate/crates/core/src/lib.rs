//! Classes of varieties in the Grothendieck ring, compactly supported
//! extensions of motivic measures, and a toric backend on which both can be
//! checked exactly.

pub mod csupport;
pub mod error;
pub mod kring;
pub mod measures;
pub mod poly;
pub mod site;
pub mod toric;

pub use error::{Error, Result};
