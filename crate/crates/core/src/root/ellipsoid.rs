//! Sublevel sets of `chi_k` as lattice points in an ellipsoid.
//!
//! With `A = -Q` and `x0 = A^{-1} k / 2` we have
//! `chi(l) = k^2/8 + (l - x0)^T A (l - x0) / 2`, so `chi <= N` is an ellipsoid.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Rational};
use crate::plumbing::{self, CharVector, PlumbingTree};

const EPS: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct Ellipsoid {
    dim: usize,
    q: Vec<Vec<i64>>,
    k: Vec<i64>,
    x0: Vec<f64>,
    ainv_diag: Vec<f64>,
    /// `k^2/4`, exact.
    k2_quarter: Rational,
    d: Vec<f64>,
    u: Vec<Vec<f64>>,
}

fn to_f64(x: &Rational) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

impl Ellipsoid {
    pub fn new(t: &PlumbingTree, k: &CharVector) -> Result<Self> {
        t.require_negative_definite()?;
        let k = CharVector::new(t, k.values().to_vec())?;
        let n = t.len();
        let q = t.form_i64();
        let inv = linalg::inverse(&t.intersection_form())?;
        let pd = plumbing::dual_rational(t, &k)?;
        let x0 = pd.iter().map(|x| -to_f64(x) / 2.0).collect();
        let ainv_diag = (0..n).map(|i| -to_f64(&inv[i][i])).collect();
        let k2_quarter = plumbing::k_square(t, &k)? / Rational::from_integer(4.into());
        // A = U^T D U with U unit upper triangular
        let a: Vec<Vec<f64>> = q.iter().map(|r| r.iter().map(|&x| -(x as f64)).collect()).collect();
        let mut d = vec![0.0; n];
        let mut u = vec![vec![0.0; n]; n];
        for i in 0..n {
            d[i] = a[i][i] - (0..i).map(|m| d[m] * u[m][i] * u[m][i]).sum::<f64>();
            u[i][i] = 1.0;
            for j in i + 1..n {
                u[i][j] = (a[i][j] - (0..i).map(|m| d[m] * u[m][i] * u[m][j]).sum::<f64>()) / d[i];
            }
        }
        Ok(Ellipsoid { dim: n, q, k: k.0, x0, ainv_diag, k2_quarter, d, u })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chi(&self, l: &[i64]) -> i64 {
        plumbing::twice_chi(&self.q, &self.k, l) / 2
    }

    /// Greatest integer not exceeding the real minimum `k^2/8` of chi.
    pub fn chi_lower_bound(&self) -> i64 {
        let m = &self.k2_quarter / Rational::from_integer(2.into());
        m.floor().to_integer().to_i64().unwrap()
    }

    /// `2N - k^2/4`, the squared A-radius of `chi <= N`.
    fn radius_sq(&self, n_top: i64) -> f64 {
        to_f64(&(Rational::from_integer((2 * n_top).into()) - &self.k2_quarter))
    }

    /// Integer ranges containing every point with `chi <= n_top`.
    pub fn coordinate_bounds(&self, n_top: i64) -> Vec<(i64, i64)> {
        let b = self.radius_sq(n_top).max(0.0);
        (0..self.dim)
            .map(|i| {
                let s = (b * self.ainv_diag[i]).sqrt() + EPS;
                ((self.x0[i] - s).ceil() as i64, (self.x0[i] + s).floor() as i64)
            })
            .collect()
    }

    /// All points with `chi <= n_top`, optionally clipped to the cube of radius `r`
    /// about the centre,
    /// as `(chi, point)` sorted by chi and then lexicographically.
    pub fn enumerate(&self, n_top: i64, clip: Option<i64>, budget: u128) -> Result<Vec<(i64, Vec<i64>)>> {
        let b = self.radius_sq(n_top);
        if b < 0.0 {
            return Ok(Vec::new());
        }
        let n = self.dim;
        let count = AtomicU64::new(0);
        let over = AtomicBool::new(false);
        let top = n - 1;
        let (lo, hi) = self.range(top, b, 0.0, clip);
        let slabs: Vec<Vec<(i64, Vec<i64>)>> = (lo..=hi)
            .into_par_iter()
            .map(|v| {
                let mut out = Vec::new();
                let mut l = vec![0i64; n];
                l[top] = v;
                let y = v as f64 - self.x0[top];
                let used = self.d[top] * y * y;
                if used <= b + EPS {
                    self.descend(top, b - used, &mut l, n_top, clip, &mut out, &count, &over, budget);
                }
                out
            })
            .collect();
        if over.load(Ordering::Relaxed) {
            return Err(Error::Budget { points: count.load(Ordering::Relaxed) as u128, budget });
        }
        let mut pts: Vec<(i64, Vec<i64>)> = slabs.into_iter().flatten().collect();
        pts.sort();
        Ok(pts)
    }

    fn range(&self, i: usize, rem: f64, shift: f64, clip: Option<i64>) -> (i64, i64) {
        let s = (rem.max(0.0) / self.d[i]).sqrt() + EPS;
        let c = self.x0[i] - shift;
        let (mut lo, mut hi) = ((c - s).ceil() as i64, (c + s).floor() as i64);
        if let Some(r) = clip {
            // centred on x0, which the lattice involution fixes
            lo = lo.max((self.x0[i] - r as f64 - EPS).ceil() as i64);
            hi = hi.min((self.x0[i] + r as f64 + EPS).floor() as i64);
        }
        (lo, hi)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        fixed_from: usize,
        rem: f64,
        l: &mut Vec<i64>,
        n_top: i64,
        clip: Option<i64>,
        out: &mut Vec<(i64, Vec<i64>)>,
        count: &AtomicU64,
        over: &AtomicBool,
        budget: u128,
    ) {
        if over.load(Ordering::Relaxed) {
            return;
        }
        if fixed_from == 0 {
            let c = self.chi(l);
            if c <= n_top {
                if count.fetch_add(1, Ordering::Relaxed) as u128 + 1 > budget {
                    over.store(true, Ordering::Relaxed);
                    return;
                }
                out.push((c, l.clone()));
            }
            return;
        }
        let i = fixed_from - 1;
        let shift: f64 = (i + 1..self.dim).map(|j| self.u[i][j] * (l[j] as f64 - self.x0[j])).sum();
        let (lo, hi) = self.range(i, rem, shift, clip);
        for v in lo..=hi {
            let y = v as f64 - self.x0[i] + shift;
            let used = self.d[i] * y * y;
            if used <= rem + EPS {
                l[i] = v;
                self.descend(i, rem - used, l, n_top, clip, out, count, over, budget);
            }
        }
        l[i] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plumbing::canonical_char;

    fn brute(t: &PlumbingTree, k: &CharVector, n_top: i64, r: i64) -> Vec<(i64, Vec<i64>)> {
        let n = t.len();
        let side = (2 * r + 1) as usize;
        let mut out = Vec::new();
        for code in 0..side.pow(n as u32) {
            let mut c = code;
            let l: Vec<i64> = (0..n)
                .map(|_| {
                    let v = (c % side) as i64 - r;
                    c /= side;
                    v
                })
                .collect();
            let x = plumbing::chi(t, k, &l).unwrap();
            if x <= n_top {
                out.push((x, l));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn matches_brute_force_on_small_trees() {
        for (center, legs) in [
            (-1, vec![vec![-2], vec![-3], vec![-7]]),
            (-2, vec![vec![-2], vec![-2], vec![-2]]),
            (-3, vec![]),
            (-2, vec![vec![-3, -2]]),
        ] {
            let t = PlumbingTree::star(center, &legs).unwrap();
            let k = canonical_char(&t);
            let e = Ellipsoid::new(&t, &k).unwrap();
            for n_top in 0..4 {
                let r = e.coordinate_bounds(n_top).iter().map(|&(a, b)| a.abs().max(b.abs())).max().unwrap();
                assert_eq!(e.enumerate(n_top, None, u128::MAX).unwrap(), brute(&t, &k, n_top, r + 1));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let t = PlumbingTree::star(-2, &[vec![-2], vec![-2, -2], vec![-2, -2, -2, -2]]).unwrap();
        let e = Ellipsoid::new(&t, &canonical_char(&t)).unwrap();
        assert!(matches!(e.enumerate(3, None, 10), Err(Error::Budget { .. })));
    }
}
