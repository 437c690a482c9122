//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers; plumbing
//! determinants grow quickly with leg length and would overflow `i64`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        let data = rows.iter().flat_map(|x| x.iter().cloned().map(Into::into)).collect();
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// `x^T M y` for integer vectors.
    pub fn bilinear(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let my = self.mul_vec(y);
        x.iter().zip(&my).map(|(a, b)| a * b).sum()
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

/// Bareiss elimination without pivoting. Returns the leading principal
/// minors `M_1..M_k` up to (and including) the first vanishing one.
fn bareiss_minors(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.rows;
    let mut a = m.data.clone();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a[k * n + k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&pivot * &a[i * n + j] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = pivot;
    }
    minors
}

/// Exact determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    m.require_square()?;
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&pivot * a.get(i, j) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
        }
        prev = pivot;
    }
    Ok(sign * a.get(n - 1, n - 1))
}

/// Sylvester's criterion with exact leading principal minors.
pub fn is_negative_definite(m: &IntMatrix) -> Result<bool> {
    m.require_square()?;
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let minors = bareiss_minors(m);
    if minors.len() < m.rows {
        return Ok(false);
    }
    Ok(minors.iter().enumerate().all(|(i, d)| {
        // M_{i+1} must have sign (-1)^{i+1}
        if i % 2 == 0 {
            d.is_negative()
        } else {
            d.is_positive()
        }
    }))
}

/// Inertia `(positive, negative, zero)` of a symmetric rational matrix via
/// symmetric Gaussian elimination.
pub fn inertia(m: &[Vec<Rational>]) -> (usize, usize, usize) {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0, 0);
    while !active.is_empty() {
        if let Some(&p) = active.iter().find(|&&i| !a[i][i].is_zero()) {
            let piv = a[p][p].clone();
            if piv.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            active.retain(|&i| i != p);
            for &i in &active {
                let f = &a[i][p] / &piv;
                if f.is_zero() {
                    continue;
                }
                for &j in &active {
                    let v = &a[i][j] - &f * &a[p][j];
                    a[i][j] = v;
                }
            }
            continue;
        }
        // all remaining diagonal entries vanish; use an off-diagonal pair
        let pair = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i != j && !a[i][j].is_zero());
        match pair {
            None => break,
            Some((i, j)) => {
                // replace row/col i by i + j, which makes the diagonal nonzero
                for &r in &active {
                    let v = &a[r][i] + &a[r][j];
                    a[r][i] = v;
                }
                for &c in &active {
                    let v = &a[i][c] + &a[j][c];
                    a[i][c] = v;
                }
            }
        }
    }
    (pos, neg, n - pos - neg)
}

/// Signature of a symmetric integer matrix.
pub fn signature(m: &IntMatrix) -> Result<i64> {
    m.require_square()?;
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let q: Vec<Vec<Rational>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| Rational::from_integer(m.get(i, j).clone())).collect())
        .collect();
    let (p, n, _) = inertia(&q);
    Ok(p as i64 - n as i64)
}

/// Solves `m x = b` exactly over the rationals.
pub fn solve_exact(m: &IntMatrix, b: &[BigInt]) -> Result<Vec<Rational>> {
    m.require_square()?;
    let n = m.rows;
    if b.len() != n {
        return Err(Error::Dimension { expected: n, got: b.len() });
    }
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> =
                (0..n).map(|j| Rational::from_integer(m.get(i, j).clone())).collect();
            row.push(Rational::from_integer(b[i].clone()));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::Singular)?;
        a.swap(k, p);
        let piv = a[k][k].clone();
        for v in a[k].iter_mut() {
            *v = &*v / &piv;
        }
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k || row[k].is_zero() {
                continue;
            }
            let f = row[k].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x - &f * y;
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Exact inverse over the rationals.
pub fn inverse(m: &IntMatrix) -> Result<Vec<Vec<Rational>>> {
    m.require_square()?;
    let n = m.rows;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<BigInt> = (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect();
        cols.push(solve_exact(m, &e)?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Diagonal entries of `D` (length `min(rows, cols)`), non-negative,
    /// each dividing the next.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

/// Smith normal form `D = L m R` with `L`, `R` unimodular.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (r, c) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut left = IntMatrix::identity(r);
    let mut right = IntMatrix::identity(c);

    // elementary operations, mirrored into the transforms
    fn row_add(d: &mut IntMatrix, l: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
        for j in 0..d.cols {
            let v = d.get(dst, j) + f * d.get(src, j);
            d.set(dst, j, v);
        }
        for j in 0..l.cols {
            let v = l.get(dst, j) + f * l.get(src, j);
            l.set(dst, j, v);
        }
    }
    fn col_add(d: &mut IntMatrix, rt: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
        for i in 0..d.rows {
            let v = d.get(i, dst) + f * d.get(i, src);
            d.set(i, dst, v);
        }
        for i in 0..rt.rows {
            let v = rt.get(i, dst) + f * rt.get(i, src);
            rt.set(i, dst, v);
        }
    }

    let steps = r.min(c);
    let mut t = 0;
    while t < steps {
        // pick the smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let v = d.get(i, j);
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < d.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        left.swap_rows(t, pi);
        d.swap_cols(t, pj);
        right.swap_cols(t, pj);

        let mut dirty = false;
        for i in t + 1..r {
            if d.get(i, t).is_zero() {
                continue;
            }
            let q = -d.get(i, t).div_floor(d.get(t, t));
            row_add(&mut d, &mut left, i, t, &q);
            if !d.get(i, t).is_zero() {
                dirty = true;
            }
        }
        for j in t + 1..c {
            if d.get(t, j).is_zero() {
                continue;
            }
            let q = -d.get(t, j).div_floor(d.get(t, t));
            col_add(&mut d, &mut right, j, t, &q);
            if !d.get(t, j).is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // divisibility: the pivot must divide every remaining entry
        let mut fixed = false;
        'outer: for i in t + 1..r {
            for j in t + 1..c {
                if !(d.get(i, j) % d.get(t, t)).is_zero() {
                    let one = BigInt::one();
                    row_add(&mut d, &mut left, t, i, &one);
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        if d.get(t, t).is_negative() {
            let v = -d.get(t, t);
            d.set(t, t, v);
            for j in 0..left.cols {
                let v = -left.get(t, j);
                left.set(t, j, v);
            }
        }
        t += 1;
    }
    let diagonal = (0..steps).map(|i| d.get(i, i).clone()).collect();
    SmithForm { diagonal, left, right }
}
