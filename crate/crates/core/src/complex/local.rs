//! Local maps between iota-complexes as solutions of `F_2`-linear systems.
//!
//! A local map `f: X -> Y` together with a homotopy `H` satisfies
//! `f d = d f`, `f iota + iota f = d H + H d` and pairs the localized
//! generators nontrivially. All three conditions are affine in `(f, H)`.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::{allowed, homology, F2Mat, GradedUModule, UComplex};
use crate::error::{Error, Result};
use crate::gf2::{Bits, LinearSystem, Subspace};

/// Largest complex rank the kernel enumeration accepts by default.
pub const DEFAULT_RANK_BOUND: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMap {
    pub f: F2Mat,
    pub homotopy: F2Mat,
}

/// Unknown entries of a homogeneous map of a fixed degree.
struct Vars {
    offset: usize,
    list: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl Vars {
    fn new(to: &[i64], from: &[i64], degree: i64, offset: usize) -> Self {
        let mut list = Vec::new();
        for (i, &a) in to.iter().enumerate() {
            for (j, &b) in from.iter().enumerate() {
                if allowed(a, b, degree) {
                    list.push((i, j));
                }
            }
        }
        let index = list.iter().enumerate().map(|(k, &p)| (p, offset + k)).collect();
        Vars { offset, list, index }
    }

    fn len(&self) -> usize {
        self.list.len()
    }

    fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.index.get(&(i, j)).copied()
    }

    fn read(&self, sol: &Bits, rows: usize, cols: usize) -> F2Mat {
        let mut m = F2Mat::zeros(rows, cols);
        for (k, &(i, j)) in self.list.iter().enumerate() {
            if sol.get(self.offset + k) {
                m.set(i, j, true);
            }
        }
        m
    }
}

/// Equations indexed by matrix position `(i, j)` of a `rows x cols` map.
struct Equations {
    cols: usize,
    eqs: Vec<Bits>,
}

impl Equations {
    fn new(rows: usize, cols: usize, nvars: usize) -> Self {
        Equations { cols, eqs: vec![Bits::zeros(nvars); rows * cols] }
    }

    fn toggle(&mut self, i: usize, j: usize, var: usize) {
        self.eqs[i * self.cols + j].flip(var);
    }

    /// Adds `left * M` where `M` is the unknown map and `left` a fixed matrix.
    fn left_product(&mut self, left: &F2Mat, vars: &Vars) {
        for (k, &(r, j)) in vars.list.iter().enumerate() {
            for i in 0..left.rows() {
                if left.get(i, r) {
                    self.toggle(i, j, vars.offset + k);
                }
            }
        }
    }

    /// Adds `M * right`.
    fn right_product(&mut self, right: &F2Mat, vars: &Vars) {
        for (k, &(i, c)) in vars.list.iter().enumerate() {
            for j in right.row(c).ones() {
                self.toggle(i, j, vars.offset + k);
            }
        }
    }

    fn push_into(self, sys: &mut LinearSystem, rhs: Option<&F2Mat>) {
        let cols = self.cols;
        for (p, e) in self.eqs.into_iter().enumerate() {
            let b = rhs.is_some_and(|m| m.get(p / cols, p % cols));
            sys.push(e, b);
        }
    }
}

/// A homotopy `H: X -> Y` of degree one with `dY H + H dX = target`.
pub fn solve_homotopy(x_gr: &[i64], y_gr: &[i64], dx: &F2Mat, dy: &F2Mat, target: &F2Mat) -> Option<F2Mat> {
    let h = Vars::new(y_gr, x_gr, 1, 0);
    let mut sys = LinearSystem::new(h.len());
    let mut eq = Equations::new(y_gr.len(), x_gr.len(), h.len());
    eq.left_product(dy, &h);
    eq.right_product(dx, &h);
    eq.push_into(&mut sys, Some(target));
    sys.solve().map(|s| h.read(&s.particular, y_gr.len(), x_gr.len()))
}

struct LocalSystem {
    sys: LinearSystem,
    f: Vars,
    h: Vars,
    rows: usize,
    cols: usize,
}

/// The affine system for local maps `X -> Y` whose matrices kill `kernel`.
fn local_system(x: &UComplex, y: &UComplex, kernel: &[Bits]) -> Option<LocalSystem> {
    let gy = y.rebased(&x.shift)?;
    let gx = &x.gr;
    let (zx, _) = x.localization_witness()?;
    let (_, phi_y) = y.localization_witness()?;
    let f = Vars::new(&gy, gx, 0, 0);
    let h = Vars::new(&gy, gx, 1, f.len());
    let nvars = f.len() + h.len();
    let (rows, cols) = (y.rank(), x.rank());
    let mut sys = LinearSystem::new(nvars);

    let mut chain = Equations::new(rows, cols, nvars);
    chain.left_product(&y.d, &f);
    chain.right_product(&x.d, &f);
    chain.push_into(&mut sys, None);

    let mut commute = Equations::new(rows, cols, nvars);
    commute.right_product(&x.iota, &f);
    commute.left_product(&y.iota, &f);
    commute.left_product(&y.d, &h);
    commute.right_product(&x.d, &h);
    commute.push_into(&mut sys, None);

    let mut loc = Bits::zeros(nvars);
    for (k, &(i, j)) in f.list.iter().enumerate() {
        if phi_y.get(i) && zx.get(j) {
            loc.flip(k);
        }
    }
    sys.push(loc, true);

    for b in kernel {
        for i in 0..rows {
            let e = Bits::from_indices(nvars, b.ones().filter_map(|j| f.get(i, j)));
            sys.push(e, false);
        }
    }
    Some(LocalSystem { sys, f, h, rows, cols })
}

/// A local map `X -> Y`, if one exists.
pub fn find_local_equivalence(x: &UComplex, y: &UComplex) -> Option<LocalMap> {
    let ls = local_system(x, y, &[])?;
    let sol = ls.sys.solve()?;
    Some(LocalMap {
        f: ls.f.read(&sol.particular, ls.rows, ls.cols),
        homotopy: ls.h.read(&sol.particular, ls.rows, ls.cols),
    })
}

/// Checks every defining property of a local map for a given matrix.
pub fn is_local_equivalence(x: &UComplex, y: &UComplex, f: &F2Mat) -> bool {
    let Some(gy) = y.rebased(&x.shift) else { return false };
    if f.rows() != y.rank() || f.cols() != x.rank() {
        return false;
    }
    if f.entries().iter().any(|&(i, j)| !allowed(gy[i], x.gr[j], 0)) {
        return false;
    }
    if y.d.mul(f) != f.mul(&x.d) {
        return false;
    }
    let (Some((zx, _)), Some((_, phi_y))) = (x.localization_witness(), y.localization_witness()) else {
        return false;
    };
    if !phi_y.dot(&f.mul_vec(&zx)) {
        return false;
    }
    let target = f.mul(&x.iota).add(&y.iota.mul(f));
    solve_homotopy(&x.gr, &gy, &x.d, &y.d, &target).is_some()
}

fn check_bound(x: &UComplex, bound: usize) -> Result<()> {
    if x.rank() > bound {
        Err(Error::RankBound { rank: x.rank(), bound })
    } else {
        Ok(())
    }
}

/// Every self-local equivalence of `x` (matrices only, homotopies dropped).
pub fn self_local_equivalences(x: &UComplex, bound: usize) -> Result<Vec<F2Mat>> {
    check_bound(x, bound)?;
    let ls = local_system(x, x, &[]).ok_or_else(|| Error::InvalidComplex("not an iota-complex".into()))?;
    let sol = ls.sys.solve().ok_or_else(|| Error::Consistency("identity is not local".into()))?;
    let nf = ls.f.len();
    let project = |v: &Bits| Bits::from_indices(nf, v.ones().filter(|&k| k < nf));
    let directions = Subspace::spanned_by(nf, &sol.kernel.iter().map(project).collect::<Vec<_>>());
    if directions.dim() > 20 {
        return Err(Error::RankBound { rank: x.rank(), bound });
    }
    let base = project(&sol.particular);
    let basis = directions.basis();
    let mut out = Vec::with_capacity(1 << basis.len());
    for mask in 0u32..(1 << basis.len()) {
        let mut v = base.clone();
        for (b, vec) in basis.iter().enumerate() {
            if mask >> b & 1 == 1 {
                v.xor_assign(vec);
            }
        }
        let mut full = Bits::zeros(ls.f.len() + ls.h.len());
        for k in v.ones() {
            full.set(k, true);
        }
        out.push(ls.f.read(&full, ls.rows, ls.cols));
    }
    Ok(out)
}

/// Result of the maximal-kernel search.
#[derive(Clone, Debug)]
pub struct MaximalSearch {
    /// Dimension of the kernel after setting `U = 1`.
    pub kernel_dim: usize,
    /// One map for each kernel of maximal dimension found (only the first
    /// unless all were requested).
    pub maps: Vec<LocalMap>,
}

/// All subspaces of the span of `basis` (independent vectors) of dimension `m`.
fn subspaces(basis: &[Bits], m: usize) -> Vec<Vec<Bits>> {
    let r = basis.len();
    let mut out = Vec::new();
    if m > r {
        return out;
    }
    let combine = |coords: &[bool]| {
        let mut v = Bits::zeros(basis.first().map_or(0, Bits::len));
        for (c, b) in coords.iter().zip(basis) {
            if *c {
                v.xor_assign(b);
            }
        }
        v
    };
    // reduced echelon forms: choose pivots, then free entries right of each
    // pivot in non-pivot columns
    for pivots in combinations(r, m) {
        let free: Vec<(usize, usize)> = (0..m)
            .flat_map(|row| ((pivots[row] + 1)..r).filter(|c| !pivots.contains(c)).map(move |c| (row, c)))
            .collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut rows = vec![vec![false; r]; m];
            for (row, &p) in pivots.iter().enumerate() {
                rows[row][p] = true;
            }
            for (b, &(row, c)) in free.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    rows[row][c] = true;
                }
            }
            out.push(rows.iter().map(|coords| combine(coords)).collect());
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Candidate kernels: acyclic subcomplexes of the `U = 1` complex split by
/// grading parity, with `2 * (m0 + m1)` dimensions.
fn acyclic_subcomplexes(x: &UComplex, m0: usize, m1: usize) -> Vec<Vec<Bits>> {
    let n = x.rank();
    let parity = |i: usize| x.gr[i].rem_euclid(2) as usize;
    let class = |p: usize| -> Vec<usize> { (0..n).filter(|&i| parity(i) == p).collect() };
    // parity-homogeneous bases of cycles and boundaries
    let ker = x.d.kernel();
    let split = |vs: &[Bits], p: usize| -> Vec<Bits> {
        let cls = class(p);
        let projected: Vec<Bits> = vs.iter().map(|v| Bits::from_indices(n, v.ones().filter(|i| cls.contains(i)))).collect();
        Subspace::spanned_by(n, &projected).basis().to_vec()
    };
    let z = [split(&ker, 0), split(&ker, 1)];
    let im_cols: Vec<Bits> = (0..n).map(|j| x.d.col(j)).collect();
    let im = [split(&im_cols, 0), split(&im_cols, 1)];
    let mut out = Vec::new();
    for b0 in subspaces(&im[0], m0) {
        for b1 in subspaces(&im[1], m1) {
            let b = [b0.clone(), b1.clone()];
            // lifts of each boundary, adjusted by cycles of the other parity
            // modulo the chosen boundaries there
            let mut lifts: [Vec<Bits>; 2] = [Vec::new(), Vec::new()];
            let mut comps: [Vec<Bits>; 2] = [Vec::new(), Vec::new()];
            for p in 0..2 {
                let q = 1 - p;
                lifts[p] = b[p].iter().map(|v| preimage(x, v, q)).collect();
                let bq = Subspace::spanned_by(n, &b[q]);
                let mut s = bq.clone();
                comps[p] = z[q].iter().filter(|v| s.insert((*v).clone())).cloned().collect();
            }
            let choices0 = b[0].len() * comps[0].len();
            let choices1 = b[1].len() * comps[1].len();
            for mask in 0u64..(1u64 << (choices0 + choices1)) {
                let mut k: Vec<Bits> = b[0].iter().chain(&b[1]).cloned().collect();
                let mut bit = 0;
                for p in 0..2 {
                    for lift in &lifts[p] {
                        let mut v = lift.clone();
                        for c in &comps[p] {
                            if mask >> bit & 1 == 1 {
                                v.xor_assign(c);
                            }
                            bit += 1;
                        }
                        k.push(v);
                    }
                }
                out.push(k);
            }
        }
    }
    out
}

/// Some `u` in parity class `q` with `d u = v`.
fn preimage(x: &UComplex, v: &Bits, q: usize) -> Bits {
    let n = x.rank();
    let mut sys = LinearSystem::new(n);
    for i in 0..n {
        sys.push(x.d.row(i).clone(), v.get(i));
        if x.gr[i].rem_euclid(2) as usize != q {
            sys.push(Bits::unit(n, i), false);
        }
    }
    sys.solve().expect("boundary has a preimage").particular
}

/// Searches kernels from the largest dimension down; the first dimension
/// with a local self-map killing some candidate is maximal.
pub fn maximal_self_local(x: &UComplex, bound: usize, all: bool) -> Result<MaximalSearch> {
    check_bound(x, bound)?;
    x.localization_witness().ok_or_else(|| Error::InvalidComplex("not an iota-complex".into()))?;
    let n = x.rank();
    let im_rank = x.d.rank();
    for total in (0..=im_rank).rev() {
        let mut candidates = Vec::new();
        for m0 in 0..=total {
            candidates.extend(acyclic_subcomplexes(x, m0, total - m0));
        }
        // deduplicate by span
        let mut seen = BTreeSet::new();
        candidates.retain(|k| {
            let s = Subspace::spanned_by(n, k);
            let mut key: Vec<Bits> = s.basis().to_vec();
            key.sort();
            s.dim() == 2 * total && seen.insert(key)
        });
        let solve = |k: &Vec<Bits>| -> Option<LocalMap> {
            let ls = local_system(x, x, k)?;
            let sol = ls.sys.solve()?;
            Some(LocalMap {
                f: ls.f.read(&sol.particular, ls.rows, ls.cols),
                homotopy: ls.h.read(&sol.particular, ls.rows, ls.cols),
            })
        };
        let solve = |k: &Vec<Bits>| solve(k).and_then(|m| idempotent(x, &m.f));
        let maps: Vec<LocalMap> = if all {
            candidates.par_iter().filter_map(solve).collect()
        } else {
            candidates.par_iter().find_map_first(solve).into_iter().collect()
        };
        if !maps.is_empty() {
            return Ok(MaximalSearch { kernel_dim: 2 * total, maps });
        }
    }
    Err(Error::Consistency("identity is not a self-local equivalence".into()))
}

/// The idempotent power of a self-local map, with a fresh homotopy. A map
/// of maximal kernel is invertible on its image, so the power has the same
/// kernel and image and is a projection onto it.
fn idempotent(x: &UComplex, f: &F2Mat) -> Option<LocalMap> {
    let mut p = f.clone();
    while p.mul(&p) != p {
        p = p.mul(f);
    }
    let target = p.mul(&x.iota).add(&x.iota.mul(&p));
    let homotopy = solve_homotopy(&x.gr, &x.gr, &x.d, &x.d, &target)?;
    Some(LocalMap { f: p, homotopy })
}

/// The image of a self-map as an iota-complex with `f iota` restricted.
pub fn image_complex(x: &UComplex, f: &F2Mat) -> Result<UComplex> {
    let n = x.rank();
    let mut basis: Vec<Bits> = Vec::new();
    let mut grads: Vec<i64> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (-x.gr[j], j));
    let mut spans = [Subspace::new(n), Subspace::new(n)];
    for j in order {
        let v = f.col(j);
        let p = x.gr[j].rem_euclid(2) as usize;
        if spans[p].insert(v.clone()) {
            basis.push(v);
            grads.push(x.gr[j]);
        }
    }
    let r = basis.len();
    let express = |v: &Bits| -> Result<Bits> {
        let mut sys = LinearSystem::new(r);
        for i in 0..n {
            sys.push(Bits::from_indices(r, (0..r).filter(|&c| basis[c].get(i))), v.get(i));
        }
        sys.solve()
            .map(|s| s.particular)
            .ok_or_else(|| Error::Consistency("image is not closed".into()))
    };
    let mut d = F2Mat::zeros(r, r);
    let mut iota = F2Mat::zeros(r, r);
    let fi = f.mul(&x.iota);
    for (j, b) in basis.iter().enumerate() {
        for i in express(&x.d.mul_vec(b))?.ones() {
            d.set(i, j, true);
        }
        for i in express(&fi.mul_vec(b))?.ones() {
            iota.set(i, j, true);
        }
    }
    let names = (0..r).map(|i| format!("y{i}")).collect();
    UComplex::new(x.shift.clone(), grads, d, iota, names)
}

/// Image of a maximal self-local equivalence.
pub fn connected_complex(x: &UComplex, bound: usize) -> Result<UComplex> {
    let search = maximal_self_local(x, bound, false)?;
    image_complex(x, &search.maps[0].f)
}

pub fn connected_homology(x: &UComplex, bound: usize) -> Result<GradedUModule> {
    homology(&connected_complex(x, bound)?)
}
