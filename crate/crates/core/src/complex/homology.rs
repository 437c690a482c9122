//! Homology of a free complex, one grading at a time.
//!
//! In grading `g` the chain group is spanned by `U^m x_i` with
//! `gr(x_i) - 2m = g`, so it is the coordinate subspace of generators with
//! `gr >= g` of the same parity, and multiplication by `U` is the inclusion
//! of coordinate subspaces. Module structure is read off from the ranks of
//! `U^m` on homology.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;

use super::{F2Mat, GradedUModule, UComplex};
use crate::error::{Error, Result};
use crate::gf2::{Bits, LinearSystem, Subspace};
use crate::linalg::Rational;

pub(crate) struct Graded<'a> {
    gr: &'a [i64],
    d: &'a F2Mat,
    min: i64,
    max: i64,
    cache: RefCell<HashMap<i64, (Subspace, Subspace)>>,
}

impl<'a> Graded<'a> {
    pub fn new(gr: &'a [i64], d: &'a F2Mat) -> Self {
        let min = gr.iter().copied().min().unwrap_or(0);
        let max = gr.iter().copied().max().unwrap_or(0);
        Graded { gr, d, min, max, cache: RefCell::new(HashMap::new()) }
    }

    pub fn min(&self) -> i64 {
        self.min
    }

    pub fn max(&self) -> i64 {
        self.max
    }

    /// Below `min - 1` every chain group is the whole parity class.
    fn clamp(&self, g: i64) -> i64 {
        if g >= self.min - 2 {
            g
        } else if (self.min - 2 - g) % 2 == 0 {
            self.min - 2
        } else {
            self.min - 1
        }
    }

    pub fn support(&self, g: i64) -> Vec<usize> {
        (0..self.gr.len()).filter(|&i| self.gr[i] >= g && (self.gr[i] - g) % 2 == 0).collect()
    }

    /// Cycles and boundaries in grading `g`.
    pub fn spaces(&self, g: i64) -> (Subspace, Subspace) {
        let g = self.clamp(g);
        if let Some(s) = self.cache.borrow().get(&g) {
            return s.clone();
        }
        let n = self.gr.len();
        let supp = self.support(g);
        let mut in_supp = vec![false; n];
        for &i in &supp {
            in_supp[i] = true;
        }
        let mut sys = LinearSystem::new(n);
        for i in 0..n {
            if !in_supp[i] {
                sys.push(Bits::unit(n, i), false);
            }
            sys.push(self.d.row(i).clone(), false);
        }
        let z = Subspace::spanned_by(n, &sys.solve().expect("homogeneous").kernel);
        let cols: Vec<Bits> = self.support(g + 1).into_iter().map(|j| self.d.col(j)).collect();
        let b = Subspace::spanned_by(n, &cols);
        self.cache.borrow_mut().insert(g, (z.clone(), b.clone()));
        (z, b)
    }

    /// Rank of `U^m` from homology in grading `g` to grading `g - 2m`.
    pub fn u_rank(&self, g: i64, m: i64) -> usize {
        let (z, _) = self.spaces(g);
        let (_, b) = self.spaces(g - 2 * m);
        let mut s = b.clone();
        s.extend(&z);
        s.dim() - b.dim()
    }

    pub fn dim(&self, g: i64) -> usize {
        self.u_rank(g, 0)
    }

    /// Rank of the map induced on homology in grading `g` by a
    /// grading-preserving chain map.
    pub fn map_rank(&self, f: &F2Mat, g: i64) -> usize {
        let (z, b) = self.spaces(g);
        let mut s = b.clone();
        for v in z.basis() {
            s.insert(f.mul_vec(v));
        }
        s.dim() - b.dim()
    }

    /// Tower tops and torsion `(top, length)` using `U`-powers up to `l`.
    fn decompose(&self, l: i64) -> (Vec<i64>, Vec<(i64, u32)>) {
        let mut towers = Vec::new();
        let mut torsion = Vec::new();
        let r = |g: i64, m: i64| self.u_rank(g, m) as i64;
        for g in self.min - 1..=self.max {
            let t = r(g, l) - r(g + 2, l);
            for _ in 0..t.max(0) {
                towers.push(g);
            }
            for n in 1..=l {
                let c = r(g, n - 1) - r(g, n) - r(g + 2, n) + r(g + 2, n + 1);
                for _ in 0..c.max(0) {
                    torsion.push((g, n as u32));
                }
            }
        }
        (towers, torsion)
    }
}

fn to_module(shift: &Rational, towers: Vec<i64>, torsion: Vec<(i64, u32)>) -> GradedUModule {
    let q = |g: i64| shift + Rational::from_integer(BigInt::from(g));
    GradedUModule::new(towers.into_iter().map(q).collect(), torsion.into_iter().map(|(g, n)| (q(g), n)).collect())
}

/// Homology as a graded module; the `U`-power cutoff is checked for stability.
pub fn homology(c: &UComplex) -> Result<GradedUModule> {
    homology_with_margin(c, 2)
}

pub fn homology_with_margin(c: &UComplex, margin: i64) -> Result<GradedUModule> {
    let h = Graded::new(&c.gr, &c.d);
    module_of(&h, &c.shift, c.rank(), margin)
}

pub(crate) fn module_of(h: &Graded<'_>, shift: &Rational, rank: usize, margin: i64) -> Result<GradedUModule> {
    let l = (h.max() - h.min()) / 2 + rank as i64 + margin;
    let first = h.decompose(l);
    let second = h.decompose(l + 2);
    if first != second {
        return Err(Error::TruncationUnstable);
    }
    let (towers, torsion) = first;
    Ok(to_module(shift, towers, torsion))
}

/// `dim H_g` for every grading where homology can be nonzero above the
/// stable range, keyed by grading relative to the complex's shift.
pub fn per_grading_dims(c: &UComplex) -> BTreeMap<i64, usize> {
    let h = Graded::new(&c.gr, &c.d);
    (h.min() - 3..=h.max()).map(|g| (g, h.dim(g))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_int;

    #[test]
    fn single_generator() {
        let m = homology(&UComplex::trivial(rat_int(0))).unwrap();
        assert_eq!(m, GradedUModule::tower(rat_int(0)));
    }

    #[test]
    fn c_minus_two() {
        let m = homology(&UComplex::c_r(rat_int(-2))).unwrap();
        assert_eq!(m, GradedUModule::new(vec![rat_int(-2)], vec![(rat_int(-2), 1)]));
    }

    #[test]
    fn long_torsion() {
        // a, b at 0; c at -5 with dc = U^2 a + U^2 b: torsion of length 2
        let d = F2Mat::from_entries(3, 3, &[(0, 2), (1, 2)]);
        let c = UComplex::without_involution(rat_int(0), vec![0, 0, -3], d, vec!["a".into(), "b".into(), "c".into()])
            .unwrap();
        let m = homology(&c).unwrap();
        assert_eq!(m, GradedUModule::new(vec![rat_int(0)], vec![(rat_int(0), 2)]));
    }

    #[test]
    fn acyclic_pair_plus_tower() {
        // x at 0, y at 3, z at 2 with dy = z
        let d = F2Mat::from_entries(3, 3, &[(2, 1)]);
        let c = UComplex::without_involution(rat_int(0), vec![0, 3, 2], d, vec!["x".into(), "y".into(), "z".into()])
            .unwrap();
        assert_eq!(homology(&c).unwrap(), GradedUModule::tower(rat_int(0)));
    }
}
