//! Dense linear algebra over the two-element field on packed bit vectors.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut b = Self::zeros(len);
        b.set(i, true);
        b
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Self::zeros(len);
        for i in idx {
            b.flip(i);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &Bits) -> Bits {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Bits { len: self.len, words }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the bitwise AND, i.e. the standard dot product.
    pub fn dot(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "Bits({s})")
    }
}

/// A subspace of `F_2^n` kept as a reduced echelon basis keyed by pivot.
#[derive(Clone, Debug)]
pub struct Subspace {
    n: usize,
    rows: Vec<Bits>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(n: usize) -> Self {
        Subspace { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn spanned_by<'a>(n: usize, vs: impl IntoIterator<Item = &'a Bits>) -> Self {
        let mut s = Self::new(n);
        for v in vs {
            s.insert(v.clone());
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Bits] {
        &self.rows
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, mut v: Bits) -> Bits {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(r);
            }
        }
        v
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: Bits) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.first_one() else { return false };
        for r in self.rows.iter_mut() {
            if r.get(p) {
                r.xor_assign(&v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    pub fn extend(&mut self, other: &Subspace) {
        for r in &other.rows {
            self.insert(r.clone());
        }
    }
}

pub fn rank(vectors: &[Bits]) -> usize {
    let n = vectors.first().map_or(0, Bits::len);
    Subspace::spanned_by(n, vectors).dim()
}

/// Affine linear system `A x = b` over F_2, built one equation at a time.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    nvars: usize,
    rows: Vec<(Bits, bool)>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Bits,
    pub kernel: Vec<Bits>,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem { nvars, rows: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn push(&mut self, coeffs: Bits, rhs: bool) {
        debug_assert_eq!(coeffs.len(), self.nvars);
        if coeffs.is_zero() && !rhs {
            return;
        }
        self.rows.push((coeffs, rhs));
    }

    pub fn solve(&self) -> Option<Solution> {
        let n = self.nvars;
        // augmented rows: variable bits followed by the right-hand side
        let mut rows: Vec<Bits> = self
            .rows
            .iter()
            .map(|(c, r)| {
                let mut b = Bits::zeros(n + 1);
                for i in c.ones() {
                    b.set(i, true);
                }
                b.set(n, *r);
                b
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let Some(p) = (row..rows.len()).find(|&i| rows[i].get(col)) else { continue };
            rows.swap(row, p);
            let pr = rows[row].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i != row && r.get(col) {
                    r.xor_assign(&pr);
                }
            }
            pivots.push(col);
            row += 1;
            if row == rows.len() {
                break;
            }
        }
        if rows[row..].iter().any(|r| r.get(n)) {
            return None;
        }
        let mut particular = Bits::zeros(n);
        for (i, &c) in pivots.iter().enumerate() {
            particular.set(c, rows[i].get(n));
        }
        let is_pivot = {
            let mut v = vec![false; n];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut kernel = Vec::new();
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut k = Bits::unit(n, free);
            for (i, &c) in pivots.iter().enumerate() {
                if rows[i].get(free) {
                    k.set(c, true);
                }
            }
            kernel.push(k);
        }
        Some(Solution { particular, kernel })
    }
}
