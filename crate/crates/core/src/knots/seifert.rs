//! Seifert invariants of double branched covers and their star plumbings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::plumbing::PlumbingTree;

/// `p/q = b_1 - 1/(b_2 - ...)` with every `b_i >= 2`, for `p > q >= 1`.
pub fn negative_continued_fraction(p: i64, q: i64) -> Vec<i64> {
    assert!(p > q && q >= 1, "need p > q >= 1");
    let (mut p, mut q) = (p, q);
    let mut out = Vec::new();
    while q != 0 {
        let b = Integer::div_ceil(&p, &q);
        out.push(b);
        (p, q) = (q, b * q - p);
    }
    out
}

/// Normalized Seifert data: central weight `e0` and legs `(alpha, beta)` with
/// `0 < beta < alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertData {
    pub e0: i64,
    pub legs: Vec<(i64, i64)>,
}

impl SeifertData {
    /// Normalizes `e + sum r_i`, moving integer parts into the center.
    pub fn from_fractions(e: i64, fractions: &[Rational]) -> Result<Self> {
        let mut e0 = BigInt::from(e);
        let mut legs = Vec::new();
        for r in fractions {
            if r.denom().is_zero() {
                return Err(Error::InvalidKnot("zero denominator".into()));
            }
            let fl = r.floor();
            e0 += fl.to_integer();
            let frac = r - fl;
            if !frac.is_zero() {
                let to = |x: &BigInt| x.to_i64().ok_or_else(|| Error::InvalidKnot("fraction too large".into()));
                legs.push((to(frac.denom())?, to(frac.numer())?));
            }
        }
        let e0 = e0.to_i64().ok_or_else(|| Error::InvalidKnot("central weight too large".into()))?;
        Ok(SeifertData { e0, legs })
    }

    /// `e0 + sum beta/alpha`.
    pub fn euler(&self) -> Rational {
        self.legs
            .iter()
            .fold(Rational::from_integer(self.e0.into()), |acc, &(a, b)| acc + Rational::new(b.into(), a.into()))
    }

    /// Order of the first homology, `|e| * prod alpha`.
    pub fn homology_order(&self) -> BigInt {
        let prod: BigInt = self.legs.iter().map(|&(a, _)| BigInt::from(a)).product();
        let v = self.euler().abs() * Rational::from_integer(prod);
        debug_assert!(v.is_integer());
        v.to_integer()
    }

    pub fn leg_weights(&self) -> Vec<Vec<i64>> {
        self.legs.iter().map(|&(a, b)| negative_continued_fraction(a, b).into_iter().map(|x| -x).collect()).collect()
    }

    /// Star plumbing with center `e0`; a single vertex when there are no legs.
    pub fn to_tree(&self) -> Result<PlumbingTree> {
        PlumbingTree::star(self.e0, &self.leg_weights())
    }

    /// Vertex permutation exchanging legs `i` and `j`, which must agree.
    pub fn leg_swap(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        let w = self.leg_weights();
        if w[i] != w[j] {
            return Err(Error::Automorphism("swapped legs differ".into()));
        }
        let mut starts = Vec::with_capacity(w.len());
        let mut next = 1;
        for leg in &w {
            starts.push(next);
            next += leg.len();
        }
        let mut perm: Vec<usize> = (0..next).collect();
        for t in 0..w[i].len() {
            perm[starts[i] + t] = starts[j] + t;
            perm[starts[j] + t] = starts[i] + t;
        }
        Ok(perm)
    }

    pub fn negated(&self) -> SeifertData {
        let fracs: Vec<Rational> = self.legs.iter().map(|&(a, b)| Rational::new((-b).into(), a.into())).collect();
        SeifertData::from_fractions(-self.e0, &fracs).expect("normalized data stays valid")
    }
}

/// Seifert invariants of a Brieskorn sphere-like link `e = -1/lcm` with the
/// given multiplicities; `tie` forces equal `beta` on the listed legs.
pub fn brieskorn(alphas: &[i64], tie: Option<(usize, usize)>) -> Result<SeifertData> {
    let l = alphas.iter().fold(1i64, |acc, &a| acc.lcm(&a));
    let ranges: Vec<Vec<i64>> = alphas.iter().map(|&a| if a == 1 { vec![0] } else { (1..a).collect() }).collect();
    let mut idx = vec![0usize; alphas.len()];
    loop {
        let betas: Vec<i64> = idx.iter().zip(&ranges).map(|(&i, r)| r[i]).collect();
        let tied = tie.is_none_or(|(a, b)| betas[a] == betas[b]);
        let s: i64 = betas.iter().zip(alphas).map(|(&b, &a)| b * (l / a)).sum();
        if tied && (-1 - s).rem_euclid(l) == 0 {
            let legs = alphas.iter().zip(&betas).filter(|(&a, _)| a > 1).map(|(&a, &b)| (a, b)).collect();
            return Ok(SeifertData { e0: (-1 - s) / l, legs });
        }
        // odometer over the beta ranges
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Err(Error::InvalidKnot(format!("no Seifert invariants for multiplicities {alphas:?}")));
            }
            idx[pos] += 1;
            if idx[pos] < ranges[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
