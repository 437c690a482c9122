//! `omega`-based certificates that knots are independent modulo torus and
//! quasi-alternating knots.
//!
//! `omega` vanishes on that subgroup and a sum takes the largest `omega` of
//! its summands, so pairwise distinct nonzero values rule out any relation.

use std::fmt;

use rayon::prelude::*;

use super::pipeline::invariants;
use super::spec::KnotSpec;
use crate::config::RunConfig;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceReport {
    pub knots: Vec<(String, u32)>,
    /// `omega` of `K_i # K_j` over the knots with nonzero `omega`.
    pub pair_sums: Vec<(usize, usize, u32)>,
    pub certified: bool,
    pub reason: String,
}

impl IndependenceReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": 1,
            "knots": self.knots.iter().map(|(s, w)| serde_json::json!({"spec": s, "omega": w})).collect::<Vec<_>>(),
            "pair_sums": self.pair_sums.iter().map(|&(i, j, w)| serde_json::json!({"pair": [i, j], "omega": w})).collect::<Vec<_>>(),
            "certified": self.certified,
            "reason": self.reason,
        })
    }
}

impl fmt::Display for IndependenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, w)) in self.knots.iter().enumerate() {
            writeln!(f, "[{i}] omega = {w}  {s}")?;
        }
        for &(i, j, w) in &self.pair_sums {
            writeln!(f, "[{i}]#[{j}] omega = {w}")?;
        }
        write!(f, "certified: {} ({})", self.certified, self.reason)
    }
}

pub fn independence(specs: &[KnotSpec], config: &RunConfig) -> Result<IndependenceReport> {
    // only connected homology matters here
    let config = RunConfig { full_rank_cap: 0, verify: false, ..config.clone() };
    let omegas: Vec<u32> = specs.par_iter().map(|s| invariants(s, &config).map(|p| p.omega)).collect::<Result<_>>()?;
    let live: Vec<usize> = (0..specs.len()).filter(|&i| omegas[i] > 0).collect();
    let pairs: Vec<(usize, usize)> =
        live.iter().enumerate().flat_map(|(a, &i)| live[a + 1..].iter().map(move |&j| (i, j))).collect();
    let pair_sums: Vec<(usize, usize, u32)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let sum = KnotSpec::Sum(vec![specs[i].clone(), specs[j].clone()]);
            invariants(&sum, &config).map(|p| (i, j, p.omega))
        })
        .collect::<Result<_>>()?;
    let mut values: Vec<u32> = live.iter().map(|&i| omegas[i]).collect();
    values.sort_unstable();
    let distinct = values.windows(2).all(|w| w[0] != w[1]);
    let additive = pair_sums.iter().all(|&(i, j, w)| w == omegas[i].max(omegas[j]));
    let (certified, reason) = if live.is_empty() {
        (false, "every omega vanishes".to_string())
    } else if !distinct {
        (false, "nonzero omega values repeat".to_string())
    } else if !additive {
        (false, "a pair sum does not take the larger omega".to_string())
    } else {
        (true, format!("{} knots with distinct nonzero omega", live.len()))
    };
    Ok(IndependenceReport {
        knots: specs.iter().zip(&omegas).map(|(s, &w)| (s.to_string(), w)).collect(),
        pair_sums,
        certified,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(specs: &[&str]) -> IndependenceReport {
        let specs: Vec<KnotSpec> = specs.iter().map(|s| s.parse().unwrap()).collect();
        independence(&specs, &RunConfig::default()).unwrap()
    }

    #[test]
    fn distinct_omegas_certify() {
        let r = report(&["pretzel(7,-3,5)", "pretzel(11,-5,9)", "torus(3,7)"]);
        assert_eq!(r.knots.iter().map(|k| k.1).collect::<Vec<_>>(), vec![1, 2, 0]);
        assert_eq!(r.pair_sums, vec![(0, 1, 2)]);
        assert!(r.certified, "{r}");
    }

    #[test]
    fn ties_do_not_certify() {
        let r = report(&["pretzel(2,-3,-7)", "pretzel(2,-3,-7)"]);
        assert!(!r.certified);
        assert!(!report(&["torus(3,7)"]).certified);
    }
}
