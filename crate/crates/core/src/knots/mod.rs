//! Knot specifications, their plumbing presentations and the invariant
//! pipeline.

mod goeritz;
mod independence;
mod pipeline;
mod presentation;
mod seifert;
mod spec;

pub use goeritz::{goeritz_oracle, parallel_columns, pretzel_determinant};
pub use presentation::{montesinos_plumbing, presentation, pretzel_plumbing, torus_plumbing, InvolutionKind, Presentation};
pub use seifert::{brieskorn, negative_continued_fraction, SeifertData};
pub use spec::KnotSpec;
pub use pipeline::{evaluate, invariants, invariants_many, plumbing_root, presentation_root, tree_root, Check, Evaluated, InvariantPackage};
pub use independence::{independence, IndependenceReport};
