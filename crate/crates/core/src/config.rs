//! Run-time knobs shared by the library pipeline and the command line.

use crate::complex::DEFAULT_RANK_BOUND;
use crate::error::{Error, Result};

/// Largest full complex (rank) tensored for the branched homology of a sum.
pub const DEFAULT_FULL_RANK_CAP: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunConfig {
    /// Forced truncation level of graded roots; `None` applies the stability
    /// policy.
    pub n_max: Option<i64>,
    /// Clip radius for the box engine; setting it selects that engine.
    pub box_radius: Option<i64>,
    /// Rank bound for the maximal self-local search.
    pub rank_bound: usize,
    /// Extra `U`-powers checked when reading off homology.
    pub margin: i64,
    /// Rank cap for full tensor products.
    pub full_rank_cap: usize,
    /// Thread count; `None` uses every core.
    pub workers: Option<usize>,
    /// Run the cross-oracle checks inline.
    pub verify: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_max: None,
            box_radius: None,
            rank_bound: DEFAULT_RANK_BOUND,
            margin: 2,
            full_rank_cap: DEFAULT_FULL_RANK_CAP,
            workers: None,
            verify: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Consistency(format!("{what} must be positive")));
        if self.n_max.is_some_and(|n| n < 0) {
            return Err(Error::Consistency("n_max must be non-negative".into()));
        }
        if self.box_radius.is_some_and(|r| r < 1) {
            return bad("box radius");
        }
        if self.rank_bound == 0 {
            return bad("rank bound");
        }
        if self.margin < 1 {
            return bad("truncation margin");
        }
        if self.workers == Some(0) {
            return bad("worker count");
        }
        Ok(())
    }
}
