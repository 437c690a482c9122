//! Branched and connected Floer-theoretic invariants of arborescent knots,
//! computed from negative definite plumbing trees through graded roots.

pub mod error;
pub mod gf2;
pub mod linalg;
pub mod plumbing;
pub mod root;
pub mod complex;
pub mod config;
pub mod connected;
pub mod knots;

pub use error::{Error, Result};
