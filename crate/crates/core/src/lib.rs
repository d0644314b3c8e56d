//! Lorentzian differential geometry of ruled surfaces in Minkowski 3-space,
//! with construction and verification of Mannheim offsets.

pub mod calculus;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod jet;
pub mod lorentz;
pub mod mannheim;
pub mod par;
pub mod ruled;

pub use error::{Error, Result};
pub use lorentz::{lcross, mdot, mixed, mnorm, CausalCharacter, MVec3};
