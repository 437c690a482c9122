//! Graded roots of negative definite plumbings.

mod boxed;
mod ellipsoid;
mod star;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::plumbing::{self, CharVector, PlumbingTree};

pub use boxed::{build_root_box, build_root_box_with, DEFAULT_BUDGET};
pub use ellipsoid::Ellipsoid;
pub use star::{build_root_star, build_root_star_with};

/// How lattice points are moved by an involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symmetry {
    None,
    /// `l -> -l - pd` with `pd = PD(k)`.
    Lattice(Vec<i64>),
    /// Coordinate permutation induced by a graph automorphism.
    Graph(Vec<usize>),
}

impl Symmetry {
    pub fn apply(&self, p: &[i64]) -> Vec<i64> {
        match self {
            Symmetry::None => p.to_vec(),
            Symmetry::Lattice(pd) => plumbing::reflect(pd, p),
            Symmetry::Graph(perm) => {
                let mut q = vec![0; p.len()];
                for (i, &x) in p.iter().enumerate() {
                    q[perm[i]] = x;
                }
                q
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Symmetry::None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Box radius, or `None` when the whole ellipsoid was enumerated.
    Box(Option<i64>),
    Star,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootVertex {
    pub level: i64,
    pub weight: Rational,
    /// A lattice point of the component.
    pub rep: Vec<i64>,
}

/// Finite truncation of a graded root. Vertices are sorted by level, then by
/// representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRoot {
    pub(crate) vertices: Vec<RootVertex>,
    pub(crate) successor: Vec<Option<usize>>,
    pub(crate) involution: Option<Vec<usize>>,
    pub(crate) base: Rational,
    pub(crate) truncation_level: i64,
    pub(crate) stable: bool,
    pub(crate) engine: Engine,
}

impl GradedRoot {
    /// Builds a root from explicit data; used for hand-made roots and tests.
    /// `levels[i]` is the level of vertex `i`, weights are `base - 2 level`.
    pub fn from_parts(
        base: Rational,
        levels: Vec<i64>,
        successor: Vec<Option<usize>>,
        involution: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = levels.len();
        if n == 0 || successor.len() != n {
            return Err(Error::Consistency("root shape mismatch".into()));
        }
        let vertices = levels
            .iter()
            .map(|&l| RootVertex { level: l, weight: weight_at(&base, l), rep: vec![] })
            .collect();
        let truncation_level = *levels.iter().max().unwrap();
        let root = GradedRoot {
            vertices,
            successor,
            involution,
            base,
            truncation_level,
            stable: true,
            engine: Engine::Star,
        };
        root.validate()?;
        Ok(root)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let mut finals = 0;
        for v in 0..n {
            match self.successor[v] {
                Some(s) => {
                    if s >= n || self.vertices[s].level != self.vertices[v].level + 1 {
                        return Err(Error::Consistency("successor must drop weight by 2".into()));
                    }
                }
                None => finals += 1,
            }
        }
        if finals != 1 {
            return Err(Error::Consistency(format!("{finals} final vertices")));
        }
        let f = self.final_vertex();
        if self.vertices[f].level != self.truncation_level {
            return Err(Error::Consistency("final vertex below truncation level".into()));
        }
        if let Some(j) = &self.involution {
            if j.len() != n || (0..n).any(|v| j[v] >= n || j[j[v]] != v) {
                return Err(Error::Consistency("involution is not an involution".into()));
            }
            for v in 0..n {
                if self.vertices[j[v]].level != self.vertices[v].level {
                    return Err(Error::Consistency("involution changes weight".into()));
                }
                if self.successor[v].map(|s| j[s]) != self.successor[j[v]] {
                    return Err(Error::Consistency("involution does not commute with successor".into()));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[RootVertex] {
        &self.vertices
    }

    pub fn level(&self, v: usize) -> i64 {
        self.vertices[v].level
    }

    pub fn weight(&self, v: usize) -> &Rational {
        &self.vertices[v].weight
    }

    pub fn successor(&self, v: usize) -> Option<usize> {
        self.successor[v]
    }

    pub fn involution(&self) -> Option<&[usize]> {
        self.involution.as_deref()
    }

    /// `J(v)`, the identity when no involution is attached.
    pub fn j(&self, v: usize) -> usize {
        self.involution.as_ref().map_or(v, |j| j[v])
    }

    pub fn base_weight(&self) -> &Rational {
        &self.base
    }

    pub fn truncation_level(&self) -> i64 {
        self.truncation_level
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn require_stable(&self) -> Result<()> {
        if self.stable {
            Ok(())
        } else {
            Err(Error::Unstable(format!("truncated at level {}", self.truncation_level)))
        }
    }

    pub fn with_involution(mut self, j: Vec<usize>) -> Result<Self> {
        self.involution = Some(j);
        self.validate()?;
        Ok(self)
    }

    pub fn without_involution(mut self) -> Self {
        self.involution = None;
        self
    }

    pub fn final_vertex(&self) -> usize {
        (0..self.len()).find(|&v| self.successor[v].is_none()).expect("validated root")
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for v in 0..self.len() {
            if let Some(s) = self.successor[v] {
                pred[s].push(v);
            }
        }
        pred
    }

    pub fn leaves(&self) -> Vec<usize> {
        let pred = self.predecessors();
        (0..self.len()).filter(|&v| pred[v].is_empty()).collect()
    }

    pub fn top_level(&self) -> i64 {
        self.vertices.iter().map(|v| v.level).min().unwrap()
    }

    pub fn count_at_level(&self, level: i64) -> usize {
        self.vertices.iter().filter(|v| v.level == level).count()
    }

    /// Whether `a` lies on the path from `b` down the stem.
    pub fn is_below(&self, a: usize, b: usize) -> bool {
        let mut x = Some(b);
        while let Some(y) = x {
            if y == a {
                return true;
            }
            if self.vertices[y].level > self.vertices[a].level {
                return false;
            }
            x = self.successor[y];
        }
        false
    }

    /// Meeting vertex of the two downward paths.
    pub fn meet(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        while a != b {
            if self.level(a) <= self.level(b) {
                a = self.successor[a].expect("paths meet on the stem");
            } else {
                b = self.successor[b].expect("paths meet on the stem");
            }
        }
        a
    }

    /// Leaves in depth-first order from the final vertex, children visited in
    /// vertex order.
    pub fn leaves_dfs(&self) -> Vec<usize> {
        let pred = self.predecessors();
        let mut out = Vec::new();
        let mut stack = vec![self.final_vertex()];
        while let Some(v) = stack.pop() {
            if pred[v].is_empty() {
                out.push(v);
            }
            for &c in pred[v].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Maximum weight, the correction term of the boundary.
    pub fn d_invariant(&self) -> Rational {
        self.vertices.iter().map(|v| v.weight.clone()).max().unwrap()
    }

    /// Copy cut at `level`; vertices strictly below it are dropped.
    pub fn truncated(&self, level: i64) -> Result<GradedRoot> {
        if level > self.truncation_level {
            return Err(Error::Consistency("cannot deepen a truncation".into()));
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&v| self.vertices[v].level <= level).collect();
        let at_level = keep.iter().filter(|&&v| self.vertices[v].level == level).count();
        if at_level != 1 {
            return Err(Error::Unstable(format!("{at_level} components at level {level}")));
        }
        Ok(self.restrict(&keep, level))
    }

    /// Sub-root on the vertex set `keep`, which must be closed under successor
    /// up to `level`.
    /// Subroot on the given vertices, which must be closed under successor
    /// and, when present, the involution. Vertex `i` of the result is the
    /// `i`-th smallest id of `keep`.
    pub fn subroot(&self, keep: &[usize]) -> Result<GradedRoot> {
        let keep: Vec<usize> = keep.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let set: BTreeSet<usize> = keep.iter().copied().collect();
        if !set.contains(&self.final_vertex()) {
            return Err(Error::Consistency("subroot must contain the stem".into()));
        }
        for &v in &keep {
            if self.successor[v].is_some_and(|s| !set.contains(&s)) {
                return Err(Error::Consistency(format!("vertex {v} kept without its successor")));
            }
            if self.involution.as_ref().is_some_and(|j| !set.contains(&j[v])) {
                return Err(Error::Consistency(format!("vertex {v} kept without its image")));
            }
        }
        Ok(self.restrict(&keep, self.truncation_level))
    }

    pub(crate) fn restrict(&self, keep: &[usize], level: i64) -> GradedRoot {
        let mut index = BTreeMap::new();
        for (i, &v) in keep.iter().enumerate() {
            index.insert(v, i);
        }
        let vertices = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let successor = keep
            .iter()
            .map(|&v| {
                if self.vertices[v].level == level {
                    None
                } else {
                    Some(index[&self.successor[v].unwrap()])
                }
            })
            .collect();
        let involution = self.involution.as_ref().map(|j| keep.iter().map(|&v| index[&j[v]]).collect());
        GradedRoot {
            vertices,
            successor,
            involution,
            base: self.base.clone(),
            truncation_level: level,
            stable: self.stable,
            engine: self.engine,
        }
    }

    /// Isomorphism-invariant encoding of the weighted tree with involution.
    pub fn canonical_form(&self) -> String {
        let pred = self.predecessors();
        let f = self.final_vertex();
        let tag = if self.involution.is_some() { "J" } else { "-" };
        format!("{tag}{}", self.encode_fixed(f, &pred))
    }

    /// Same encoding with the involution forgotten.
    pub fn shape(&self) -> String {
        let pred = self.predecessors();
        self.encode_plain(self.final_vertex(), &pred)
    }

    fn encode_plain(&self, v: usize, pred: &[Vec<usize>]) -> String {
        let mut kids: Vec<String> = pred[v].iter().map(|&c| self.encode_plain(c, pred)).collect();
        kids.sort();
        format!("({}{})", fmt_rational(&self.vertices[v].weight), kids.concat())
    }

    fn encode_fixed(&self, v: usize, pred: &[Vec<usize>]) -> String {
        let mut kids = Vec::new();
        for &c in &pred[v] {
            let jc = self.j(c);
            if jc == c {
                kids.push(self.encode_fixed(c, pred));
            } else if c < jc {
                kids.push(format!("P{}", self.encode_plain(c, pred)));
            }
        }
        kids.sort();
        format!("({}{})", fmt_rational(&self.vertices[v].weight), kids.concat())
    }

    pub fn render_dot(&self) -> String {
        let mut s = String::from("digraph graded_root {\n  rankdir=TB;\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{}\"];", fmt_rational(&v.weight));
        }
        for v in 0..self.len() {
            if let Some(t) = self.successor[v] {
                let _ = writeln!(s, "  v{v} -> v{t};");
            }
        }
        if let Some(j) = &self.involution {
            for v in 0..self.len() {
                if v < j[v] {
                    let _ = writeln!(s, "  v{v} -> v{} [style=dashed, dir=none, constraint=false];", j[v]);
                }
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let vertices: Vec<serde_json::Value> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| {
                serde_json::json!({"id": id, "level": v.level, "weight": rational_json(&v.weight)})
            })
            .collect();
        let successor: serde_json::Map<String, serde_json::Value> = (0..self.len())
            .filter_map(|v| self.successor[v].map(|s| (v.to_string(), serde_json::json!(s))))
            .collect();
        let involution: serde_json::Map<String, serde_json::Value> = match &self.involution {
            Some(j) => (0..self.len()).map(|v| (v.to_string(), serde_json::json!(j[v]))).collect(),
            None => serde_json::Map::new(),
        };
        serde_json::json!({
            "vertices": vertices,
            "successor": successor,
            "leaves": self.leaves(),
            "involution": involution,
            "truncation_level": self.truncation_level,
            "stable": self.stable,
        })
    }
}

pub(crate) fn weight_at(base: &Rational, level: i64) -> Rational {
    base - Rational::from_integer(BigInt::from(2 * level))
}

/// `(k^2 + |G|)/4`, the weight of level zero.
pub fn base_weight(t: &PlumbingTree, k: &CharVector) -> Result<Rational> {
    let k2 = plumbing::k_square(t, k)?;
    Ok((k2 + Rational::from_integer(BigInt::from(t.len()))) / Rational::from_integer(BigInt::from(4)))
}

pub fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_json(x: &Rational) -> serde_json::Value {
    use num_traits::ToPrimitive;
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(n), Some(d)) => serde_json::json!([n, d]),
        _ => serde_json::json!([x.numer().to_string(), x.denom().to_string()]),
    }
}

/// Which points of the profile or lattice move under the knot's involution.
pub fn lattice_symmetry(t: &PlumbingTree, k: &CharVector) -> Result<Symmetry> {
    Ok(Symmetry::Lattice(plumbing::dual_integral(t, k)?))
}

pub fn graph_symmetry(t: &PlumbingTree, k: &CharVector) -> Result<Symmetry> {
    let perm = t
        .automorphism()
        .ok_or_else(|| Error::Automorphism("tree has no automorphism".into()))?
        .to_vec();
    if !k.is_invariant_under(&perm) {
        return Err(Error::Automorphism("characteristic vector is not invariant".into()));
    }
    Ok(Symmetry::Graph(perm))
}

/// Rebuilds `root` with the given symmetry and attaches the induced
/// involution, checking that the underlying tree is unchanged.
fn attach(t: &PlumbingTree, k: &CharVector, root: &GradedRoot, sym: Symmetry) -> Result<GradedRoot> {
    let rebuilt = match root.engine {
        Engine::Box(radius) => build_root_box_with(t, k, Some(root.truncation_level), radius, sym, DEFAULT_BUDGET)?,
        Engine::Star => build_root_star_with(t, k, Some(root.truncation_level), sym)?,
    };
    if rebuilt.shape() != root.shape() {
        return Err(Error::Consistency("root changed while attaching involution".into()));
    }
    Ok(rebuilt)
}

pub fn lattice_involution(t: &PlumbingTree, k: &CharVector, root: &GradedRoot) -> Result<GradedRoot> {
    attach(t, k, root, lattice_symmetry(t, k)?)
}

pub fn graph_involution(t: &PlumbingTree, k: &CharVector, root: &GradedRoot) -> Result<GradedRoot> {
    attach(t, k, root, graph_symmetry(t, k)?)
}

/// Raw output of an engine sweep: every level up to the sweep's top.
#[derive(Clone, Debug, Default)]
pub(crate) struct Levels {
    pub vertices: Vec<RootVertex>,
    pub successor: Vec<Option<usize>>,
    pub involution: Option<Vec<usize>>,
    pub counts: BTreeMap<i64, usize>,
}

/// Runs `sweep` at a fixed top level, or raises the top level until the
/// truncation policy is met. Returns the sweep, the truncation level and
/// whether the policy holds there.
pub(crate) fn drive(
    lower: i64,
    n_max: Option<i64>,
    sweep: impl Fn(i64) -> Result<Levels>,
) -> Result<(Levels, i64, bool)> {
    if let Some(n) = n_max {
        let lv = sweep(n)?;
        let stable = settled_level(&lv.counts).is_some_and(|s| s + 2 <= n);
        return Ok((lv, n, stable));
    }
    let mut n = lower + 2;
    for _ in 0..40 {
        let lv = sweep(n)?;
        if let Some(s) = settled_level(&lv.counts) {
            if s + 2 <= n {
                return Ok((lv, s + 2, true));
            }
        }
        n += (n - lower).max(2);
    }
    Err(Error::Unstable(format!("sublevel sets still disconnected at level {n}")))
}

/// Cuts a sweep at level `n` and packages it as a root.
pub(crate) fn finish(lv: Levels, base: &Rational, n: i64, engine: Engine, stable: bool) -> Result<GradedRoot> {
    let Levels { vertices, successor, involution, counts } = lv;
    match counts.get(&n) {
        Some(1) => {}
        Some(c) => return Err(Error::Unstable(format!("{c} components at truncation level {n}"))),
        None => return Err(Error::Unstable(format!("sublevel set empty at level {n}"))),
    }
    let keep: Vec<usize> = (0..vertices.len()).filter(|&v| vertices[v].level <= n).collect();
    let full = GradedRoot {
        vertices,
        successor,
        involution,
        base: base.clone(),
        truncation_level: n,
        stable,
        engine,
    };
    let root = full.restrict(&keep, n);
    root.validate()?;
    Ok(root)
}

/// Smallest level `n` with one component at `n`, `n+1` and `n+2`.
pub(crate) fn settled_level(counts: &BTreeMap<i64, usize>) -> Option<i64> {
    let levels: Vec<i64> = counts.keys().copied().collect();
    levels.iter().copied().find(|&n| (0..3).all(|i| counts.get(&(n + i)) == Some(&1)))
}

#[cfg(test)]
mod tests;
