//! Free graded chain complexes over `F_2[U]` with a homotopy involution.
//!
//! Every map we handle is homogeneous, so an entry between two generators is
//! either zero or a single power of `U` fixed by their gradings. Maps are
//! therefore stored as `F_2` coefficient matrices and composition is the plain
//! matrix product.

mod cone;
mod homology;
mod local;
mod model;

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::gf2::{Bits, Subspace};
use crate::linalg::Rational;
use crate::root::{fmt_rational, rational_json};

pub use cone::{branched_homology, BranchedHomology};
pub use homology::{homology, homology_with_margin, per_grading_dims};
pub use local::{
    connected_complex, connected_homology, find_local_equivalence, image_complex, is_local_equivalence, maximal_self_local,
    self_local_equivalences, solve_homotopy, LocalMap, MaximalSearch, DEFAULT_RANK_BOUND,
};
pub use model::{lift_involution, model_complex, root_complex};

/// Dense matrix over `F_2`, stored by rows. Entry `(i, j)` is the coefficient
/// of generator `i` in the image of generator `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Mat {
    rows: usize,
    cols: usize,
    data: Vec<Bits>,
}

impl F2Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Mat { rows, cols, data: vec![Bits::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: &[(usize, usize)]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for &(i, j) in entries {
            m.flip(i, j);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i].set(j, v)
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i].flip(j)
    }

    pub fn row(&self, i: usize) -> &Bits {
        &self.data[i]
    }

    pub fn col(&self, j: usize) -> Bits {
        Bits::from_indices(self.rows, (0..self.rows).filter(|&i| self.get(i, j)))
    }

    pub fn entries(&self) -> Vec<(usize, usize)> {
        (0..self.rows).flat_map(|i| self.data[i].ones().map(move |j| (i, j))).collect()
    }

    pub fn transpose(&self) -> F2Mat {
        let mut t = F2Mat::zeros(self.cols, self.rows);
        for (i, j) in self.entries() {
            t.set(j, i, true);
        }
        t
    }

    pub fn mul(&self, other: &F2Mat) -> F2Mat {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = F2Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in self.data[i].ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Bits) -> Bits {
        Bits::from_indices(self.rows, (0..self.rows).filter(|&i| self.data[i].dot(v)))
    }

    pub fn add(&self, other: &F2Mat) -> F2Mat {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Bits::is_zero)
    }

    pub fn rank(&self) -> usize {
        crate::gf2::rank(&self.data)
    }

    /// Kernel of the matrix acting on column vectors.
    pub fn kernel(&self) -> Vec<Bits> {
        let mut sys = crate::gf2::LinearSystem::new(self.cols);
        for r in &self.data {
            sys.push(r.clone(), false);
        }
        sys.solve().expect("homogeneous system").kernel
    }

    pub fn image(&self) -> Subspace {
        let cols: Vec<Bits> = (0..self.cols).map(|j| self.col(j)).collect();
        Subspace::spanned_by(self.rows, &cols)
    }
}

impl fmt::Debug for F2Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Mat {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// A free `F_2[U]`-complex with grading-preserving map `iota`. Gradings are
/// `shift + gr[i]` with integer `gr`.
#[derive(Clone, PartialEq, Eq)]
pub struct UComplex {
    shift: Rational,
    gr: Vec<i64>,
    d: F2Mat,
    iota: F2Mat,
    names: Vec<String>,
}

/// Whether a homogeneous map raising grading by `degree` may have a nonzero
/// entry from a generator in grading `from` to one in grading `to`.
pub(crate) fn allowed(to: i64, from: i64, degree: i64) -> bool {
    let e = to - from - degree;
    e >= 0 && e % 2 == 0
}

impl UComplex {
    pub fn new(shift: Rational, gr: Vec<i64>, d: F2Mat, iota: F2Mat, names: Vec<String>) -> Result<Self> {
        let n = gr.len();
        if d.rows != n || d.cols != n || iota.rows != n || iota.cols != n || names.len() != n {
            return Err(Error::InvalidComplex("dimension mismatch".into()));
        }
        for (i, j) in d.entries() {
            if !allowed(gr[i], gr[j], -1) {
                return Err(Error::InvalidComplex(format!("differential entry ({i},{j}) is not homogeneous")));
            }
        }
        for (i, j) in iota.entries() {
            if !allowed(gr[i], gr[j], 0) {
                return Err(Error::InvalidComplex(format!("involution entry ({i},{j}) is not homogeneous")));
            }
        }
        if !d.mul(&d).is_zero() {
            return Err(Error::InvalidComplex("differential does not square to zero".into()));
        }
        if d.mul(&iota) != iota.mul(&d) {
            return Err(Error::InvalidComplex("involution is not a chain map".into()));
        }
        Ok(UComplex { shift, gr, d, iota, names })
    }

    /// Complex with identity involution.
    pub fn without_involution(shift: Rational, gr: Vec<i64>, d: F2Mat, names: Vec<String>) -> Result<Self> {
        let n = gr.len();
        Self::new(shift, gr, d, F2Mat::identity(n), names)
    }

    /// One generator in the given grading, trivial involution.
    pub fn trivial(grading: Rational) -> Self {
        UComplex {
            shift: grading,
            gr: vec![0],
            d: F2Mat::zeros(1, 1),
            iota: F2Mat::identity(1),
            names: vec!["x".into()],
        }
    }

    /// `C[r]`: generators `a, b` in degree `r`, `c` in degree `r - 1`,
    /// `dc = Ua + Ub`, and the involution swapping `a` and `b`.
    pub fn c_r(r: Rational) -> Self {
        let d = F2Mat::from_entries(3, 3, &[(0, 2), (1, 2)]);
        let iota = F2Mat::from_entries(3, 3, &[(1, 0), (0, 1), (2, 2)]);
        UComplex::new(r, vec![0, 0, -1], d, iota, vec!["a".into(), "b".into(), "c".into()]).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.gr.len()
    }

    pub fn shift(&self) -> &Rational {
        &self.shift
    }

    /// Integer gradings relative to `shift`.
    pub fn gradings(&self) -> &[i64] {
        &self.gr
    }

    pub fn grading(&self, i: usize) -> Rational {
        &self.shift + Rational::from_integer(BigInt::from(self.gr[i]))
    }

    pub fn d(&self) -> &F2Mat {
        &self.d
    }

    pub fn iota(&self) -> &F2Mat {
        &self.iota
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn with_iota(&self, iota: F2Mat) -> Result<Self> {
        Self::new(self.shift.clone(), self.gr.clone(), self.d.clone(), iota, self.names.clone())
    }

    pub fn shifted(&self, by: &Rational) -> Self {
        let mut c = self.clone();
        c.shift += by;
        c
    }

    /// Re-expresses gradings against a new base; the difference must be integral.
    pub(crate) fn rebased(&self, shift: &Rational) -> Option<Vec<i64>> {
        let diff = &self.shift - shift;
        if !diff.is_integer() {
            return None;
        }
        let diff: i64 = diff.to_integer().try_into().ok()?;
        Some(self.gr.iter().map(|g| g + diff).collect())
    }

    pub fn tensor(&self, other: &UComplex) -> UComplex {
        let (n, m) = (self.rank(), other.rank());
        let idx = |i: usize, j: usize| i * m + j;
        let mut gr = Vec::with_capacity(n * m);
        let mut names = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                gr.push(self.gr[i] + other.gr[j]);
                names.push(format!("{}{}", self.names[i], other.names[j]));
            }
        }
        let mut d = F2Mat::zeros(n * m, n * m);
        let mut iota = F2Mat::zeros(n * m, n * m);
        for (a, b) in self.d.entries() {
            for j in 0..m {
                d.flip(idx(a, j), idx(b, j));
            }
        }
        for (a, b) in other.d.entries() {
            for i in 0..n {
                d.flip(idx(i, a), idx(i, b));
            }
        }
        for (a, b) in self.iota.entries() {
            for (c, e) in other.iota.entries() {
                iota.flip(idx(a, c), idx(b, e));
            }
        }
        UComplex::new(&self.shift + &other.shift, gr, d, iota, names).expect("tensor of valid complexes")
    }

    /// `Hom(C, F_2[U])`: gradings negated, maps transposed.
    pub fn dual(&self) -> UComplex {
        UComplex::new(
            -self.shift.clone(),
            self.gr.iter().map(|g| -g).collect(),
            self.d.transpose(),
            self.iota.transpose(),
            self.names.iter().map(|s| format!("{s}*")).collect(),
        )
        .expect("dual of a valid complex")
    }

    /// A cycle generating homology after setting `U = 1`, together with a
    /// cocycle pairing to one with it. `None` unless that homology has rank one.
    pub fn localization_witness(&self) -> Option<(Bits, Bits)> {
        let n = self.rank();
        let im = self.d.image();
        let ker = self.d.kernel();
        if ker.len() != im.dim() + 1 {
            return None;
        }
        let z = ker.into_iter().find(|v| !im.contains(v))?;
        // cocycles vanish on boundaries; pick one that detects z
        let dt = self.d.transpose();
        let cocycles = dt.kernel();
        let phi = cocycles.into_iter().find(|c| c.dot(&z))?;
        debug_assert_eq!(phi.len(), n);
        Some((z, phi))
    }

    pub fn check_localization(&self) -> Result<()> {
        self.localization_witness()
            .map(|_| ())
            .ok_or_else(|| Error::InvalidComplex("localized homology is not a single tower".into()))
    }

    /// Verifies `iota^2 ~ id` by solving for a homotopy.
    pub fn check_iota_squared(&self) -> Result<F2Mat> {
        let target = self.iota.mul(&self.iota).add(&F2Mat::identity(self.rank()));
        if target.is_zero() {
            return Ok(F2Mat::zeros(self.rank(), self.rank()));
        }
        solve_homotopy(&self.gr, &self.gr, &self.d, &self.d, &target)
            .ok_or_else(|| Error::InvalidComplex("iota squared is not homotopic to the identity".into()))
    }

    /// Full set of checks for an iota-complex.
    pub fn verify(&self) -> Result<()> {
        self.check_localization()?;
        self.check_iota_squared()?;
        Ok(())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let exp = |i: usize, j: usize, deg: i64| (self.gr[i] - self.gr[j] - deg) / 2;
        let gens: Vec<serde_json::Value> = (0..self.rank())
            .map(|i| serde_json::json!({"id": i, "name": self.names[i], "grading": rational_json(&self.grading(i))}))
            .collect();
        let d: Vec<[i64; 3]> = self.d.entries().into_iter().map(|(i, j)| [i as i64, j as i64, exp(i, j, -1)]).collect();
        let iota: Vec<[i64; 3]> =
            self.iota.entries().into_iter().map(|(i, j)| [i as i64, j as i64, exp(i, j, 0)]).collect();
        serde_json::json!({"generators": gens, "differential": d, "iota": iota})
    }
}

impl fmt::Debug for UComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "UComplex (shift {})", fmt_rational(&self.shift))?;
        for i in 0..self.rank() {
            let targets: Vec<String> = self
                .d
                .col(i)
                .ones()
                .map(|t| format!("U^{} {}", (self.gr[t] - self.gr[i] + 1) / 2, self.names[t]))
                .collect();
            writeln!(f, "  {} [{}] d -> {}", self.names[i], self.gr[i], targets.join(" + "))?;
        }
        Ok(())
    }
}

/// Isomorphism class of a finitely generated graded `F_2[U]`-module.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedUModule {
    /// Top degrees of the free summands, descending.
    pub towers: Vec<Rational>,
    /// `(top degree, length)` of each `F[U]/U^n` summand, sorted.
    pub torsion: Vec<(Rational, u32)>,
}

impl GradedUModule {
    pub fn new(mut towers: Vec<Rational>, mut torsion: Vec<(Rational, u32)>) -> Self {
        towers.sort_by(|a, b| b.cmp(a));
        torsion.sort();
        GradedUModule { towers, torsion }
    }

    pub fn tower(d: Rational) -> Self {
        Self::new(vec![d], vec![])
    }

    /// The single tower degree of an iota-complex's homology.
    pub fn tower_degree(&self) -> Result<Rational> {
        match self.towers.as_slice() {
            [d] => Ok(d.clone()),
            _ => Err(Error::InvalidComplex(format!("{} towers, expected one", self.towers.len()))),
        }
    }

    pub fn shifted(&self, by: &Rational) -> Self {
        Self::new(
            self.towers.iter().map(|d| d + by).collect(),
            self.torsion.iter().map(|(d, n)| (d + by, *n)).collect(),
        )
    }

    /// The torsion part as a module of its own.
    pub fn reduced(&self) -> GradedUModule {
        Self::new(vec![], self.torsion.clone())
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Least `n` with `U^n` killing the torsion.
    pub fn max_torsion_length(&self) -> u32 {
        self.torsion.iter().map(|&(_, n)| n).max().unwrap_or(0)
    }

    /// Shape with gradings measured from the top tower, for comparisons up to
    /// an overall shift.
    pub fn normalized(&self) -> GradedUModule {
        match self.towers.first() {
            Some(top) => self.shifted(&-top.clone()),
            None => self.clone(),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "towers": self.towers.iter().map(rational_json).collect::<Vec<_>>(),
            "torsion": self.torsion.iter().map(|(d, n)| serde_json::json!({"degree": rational_json(d), "length": n})).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for GradedUModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.towers.iter().map(|d| format!("F[U]_({})", fmt_rational(d))).collect();
        for (d, n) in &self.torsion {
            if *n == 1 {
                parts.push(format!("F_({})", fmt_rational(d)));
            } else {
                parts.push(format!("F[U]/U^{n}_({})", fmt_rational(d)));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
