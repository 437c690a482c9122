//! Plumbing trees, their intersection lattices and characteristic vectors.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{Bits, LinearSystem};
use crate::linalg::{self, IntMatrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: i64,
    pub weight: i64,
}

/// A weighted tree; vertices are kept sorted by id and addressed by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlumbingTree {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    automorphism: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    vertices: Vec<Vertex>,
    edges: Vec<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    automorphism: Option<BTreeMap<i64, i64>>,
}

impl PlumbingTree {
    /// Builds a tree from vertices and edges given by vertex id.
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<(i64, i64)>,
        automorphism: Option<BTreeMap<i64, i64>>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidTree("empty tree".into()));
        }
        let mut vertices = vertices;
        vertices.sort_by_key(|v| v.id);
        if vertices.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidTree("duplicate vertex id".into()));
        }
        let index: BTreeMap<i64, usize> = vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let lookup = |id: i64| {
            index.get(&id).copied().ok_or_else(|| Error::InvalidTree(format!("unknown vertex {id}")))
        };
        let n = vertices.len();
        let mut seen = BTreeSet::new();
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (a, b) = (lookup(a)?, lookup(b)?);
            if a == b {
                return Err(Error::InvalidTree("self-loop".into()));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidTree("repeated edge".into()));
            }
            idx_edges.push(e);
        }
        if idx_edges.len() + 1 != n {
            return Err(Error::InvalidTree(format!("{} edges for {} vertices", idx_edges.len(), n)));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &idx_edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
        }
        // n-1 edges plus connectivity makes a tree
        let mut visited = vec![false; n];
        let mut stack = vec![0];
        visited[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !visited[w] {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
        if visited.iter().any(|&x| !x) {
            return Err(Error::InvalidTree("graph is disconnected".into()));
        }
        idx_edges.sort_unstable();
        let mut tree = PlumbingTree { vertices, edges: idx_edges, adjacency, automorphism: None };
        if let Some(map) = automorphism {
            let mut perm = vec![usize::MAX; n];
            for (a, b) in map {
                perm[lookup(a)?] = lookup(b)?;
            }
            // unspecified vertices are fixed
            for (i, p) in perm.iter_mut().enumerate() {
                if *p == usize::MAX {
                    *p = i;
                }
            }
            tree.set_automorphism(perm)?;
        }
        Ok(tree)
    }

    /// Star-shaped tree: vertex 0 is the center, legs listed outward from it.
    pub fn star(center: i64, legs: &[Vec<i64>]) -> Result<Self> {
        let mut vertices = vec![Vertex { id: 0, weight: center }];
        let mut edges = Vec::new();
        let mut next = 1;
        for leg in legs {
            let mut prev = 0;
            for &w in leg {
                vertices.push(Vertex { id: next, weight: w });
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        Self::new(vertices, edges, None)
    }

    /// Linear chain with the given weights.
    pub fn chain(weights: &[i64]) -> Result<Self> {
        let vertices = weights.iter().enumerate().map(|(i, &w)| Vertex { id: i as i64, weight: w }).collect();
        let edges = (1..weights.len()).map(|i| (i as i64 - 1, i as i64)).collect();
        Self::new(vertices, edges, None)
    }

    pub fn with_automorphism(mut self, perm: Vec<usize>) -> Result<Self> {
        self.set_automorphism(perm)?;
        Ok(self)
    }

    fn set_automorphism(&mut self, perm: Vec<usize>) -> Result<()> {
        let n = self.len();
        if perm.len() != n || perm.iter().any(|&p| p >= n) {
            return Err(Error::Automorphism("not a permutation of the vertices".into()));
        }
        if (0..n).any(|i| perm[perm[i]] != i) {
            return Err(Error::Automorphism("not an involution".into()));
        }
        if (0..n).any(|i| self.vertices[i].weight != self.vertices[perm[i]].weight) {
            return Err(Error::Automorphism("does not preserve weights".into()));
        }
        let mut mapped: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
            .collect();
        mapped.sort_unstable();
        if mapped != self.edges {
            return Err(Error::Automorphism("does not preserve adjacency".into()));
        }
        self.automorphism = Some(perm);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn weights(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| v.weight).collect()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn automorphism(&self) -> Option<&[usize]> {
        self.automorphism.as_deref()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Center of a star-shaped tree: the unique vertex of degree at least
    /// three, or a middle vertex of a chain.
    pub fn star_center(&self) -> Option<usize> {
        let high: Vec<usize> = (0..self.len()).filter(|&v| self.degree(v) >= 3).collect();
        match high.len() {
            0 => Some(0),
            1 => Some(high[0]),
            _ => None,
        }
    }

    pub fn intersection_form(&self) -> IntMatrix {
        let n = self.len();
        let mut q = IntMatrix::zeros(n, n);
        for (i, v) in self.vertices.iter().enumerate() {
            q.set(i, i, BigInt::from(v.weight));
        }
        for &(a, b) in &self.edges {
            q.set(a, b, BigInt::one());
            q.set(b, a, BigInt::one());
        }
        q
    }

    /// Small-integer copy of the intersection form for hot loops.
    pub fn form_i64(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut q = vec![vec![0i64; n]; n];
        for (i, v) in self.vertices.iter().enumerate() {
            q[i][i] = v.weight;
        }
        for &(a, b) in &self.edges {
            q[a][b] = 1;
            q[b][a] = 1;
        }
        q
    }

    pub fn determinant(&self) -> BigInt {
        linalg::determinant(&self.intersection_form()).expect("square by construction")
    }

    pub fn is_negative_definite(&self) -> bool {
        linalg::is_negative_definite(&self.intersection_form()).expect("symmetric by construction")
    }

    pub fn require_negative_definite(&self) -> Result<()> {
        if self.is_negative_definite() {
            Ok(())
        } else {
            Err(Error::NotNegativeDefinite)
        }
    }

    pub fn to_json(&self) -> String {
        let doc = TreeDoc {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|&(a, b)| [self.vertices[a].id, self.vertices[b].id]).collect(),
            automorphism: self.automorphism.as_ref().map(|p| {
                p.iter()
                    .enumerate()
                    .map(|(i, &j)| (self.vertices[i].id, self.vertices[j].id))
                    .collect()
            }),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TreeDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(doc.vertices, doc.edges.into_iter().map(|[a, b]| (a, b)).collect(), doc.automorphism)
    }
}

/// Values `k(v)` of a characteristic covector on the vertex basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharVector(pub Vec<i64>);

impl CharVector {
    pub fn new(tree: &PlumbingTree, values: Vec<i64>) -> Result<Self> {
        if values.len() != tree.len() {
            return Err(Error::Dimension { expected: tree.len(), got: values.len() });
        }
        for (i, (k, v)) in values.iter().zip(tree.vertices()).enumerate() {
            if (k - v.weight).rem_euclid(2) != 0 {
                return Err(Error::NotCharacteristic(i));
            }
        }
        Ok(CharVector(values))
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn is_invariant_under(&self, perm: &[usize]) -> bool {
        (0..self.0.len()).all(|i| self.0[i] == self.0[perm[i]])
    }
}

/// `k(v) = -2 - e_v`.
pub fn canonical_char(tree: &PlumbingTree) -> CharVector {
    CharVector(tree.vertices().iter().map(|v| -2 - v.weight).collect())
}

/// `chi_k(l) = -(k(l) + l.l)/2`.
pub fn chi(tree: &PlumbingTree, k: &CharVector, l: &[i64]) -> Result<i64> {
    if l.len() != tree.len() {
        return Err(Error::Dimension { expected: tree.len(), got: l.len() });
    }
    let twice = twice_chi(&tree.form_i64(), k.values(), l);
    if twice % 2 != 0 {
        let bad = (0..tree.len())
            .find(|&i| (k.values()[i] - tree.vertices()[i].weight).rem_euclid(2) != 0)
            .unwrap_or(0);
        return Err(Error::NotCharacteristic(bad));
    }
    Ok(twice / 2)
}

/// `2 chi_k(l)` on a small-integer form.
pub fn twice_chi(q: &[Vec<i64>], k: &[i64], l: &[i64]) -> i64 {
    let n = l.len();
    let mut s = 0i64;
    for i in 0..n {
        if l[i] == 0 {
            continue;
        }
        s += k[i] * l[i];
        let mut row = 0i64;
        for j in 0..n {
            row += q[i][j] * l[j];
        }
        s += l[i] * row;
    }
    -s
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `PD(k) = Q^{-1} k` as exact rationals.
pub fn dual_rational(tree: &PlumbingTree, k: &CharVector) -> Result<Vec<Rational>> {
    linalg::solve_exact(&tree.intersection_form(), &big(k.values()))
}

/// `PD(k)` when it is integral.
pub fn dual_integral(tree: &PlumbingTree, k: &CharVector) -> Result<Vec<i64>> {
    dual_rational(tree, k)?
        .into_iter()
        .map(|x| {
            if x.is_integer() {
                x.to_integer().to_i64().ok_or(Error::NonIntegralDual)
            } else {
                Err(Error::NonIntegralDual)
            }
        })
        .collect()
}

/// `k^2 = k^T Q^{-1} k`.
pub fn k_square(tree: &PlumbingTree, k: &CharVector) -> Result<Rational> {
    let x = dual_rational(tree, k)?;
    Ok(k.values().iter().zip(&x).map(|(&a, b)| Rational::from_integer(BigInt::from(a)) * b).sum())
}

/// The `{0,1}` lattice vector `w` with `Q w = diag(Q)` mod 2.
pub fn wu_class(tree: &PlumbingTree) -> Result<Vec<i64>> {
    let n = tree.len();
    let q = tree.form_i64();
    let mut sys = LinearSystem::new(n);
    for i in 0..n {
        let row = Bits::from_indices(n, (0..n).filter(|&j| q[i][j].rem_euclid(2) == 1));
        sys.push(row, q[i][i].rem_euclid(2) == 1);
    }
    let sol = sys
        .solve()
        .ok_or_else(|| Error::Consistency("mod-2 Wu system inconsistent".into()))?;
    Ok((0..n).map(|i| sol.particular.get(i) as i64).collect())
}

/// Neumann-Siebenmann invariant `(sign(Q) - w^2)/8` of a negative definite tree.
pub fn mu_bar(tree: &PlumbingTree) -> Result<Rational> {
    tree.require_negative_definite()?;
    let w = wu_class(tree)?;
    let q = tree.intersection_form();
    let w2 = q.bilinear(&big(&w), &big(&w));
    let sign = -(tree.len() as i64);
    Ok(Rational::new(BigInt::from(sign) - w2, BigInt::from(8)))
}

/// Characteristic vector `Q w` of the spin structure; its dual is the Wu class.
pub fn spin_char(tree: &PlumbingTree) -> Result<CharVector> {
    let w = wu_class(tree)?;
    let q = tree.form_i64();
    let k = (0..tree.len()).map(|i| (0..tree.len()).map(|j| q[i][j] * w[j]).sum()).collect();
    CharVector::new(tree, k)
}

/// A characteristic vector in the self-conjugate class: `k` itself when its
/// dual is integral, otherwise the spin representative `Q w`.
pub fn self_conjugate_char(tree: &PlumbingTree, k: &CharVector) -> Result<CharVector> {
    match dual_integral(tree, k) {
        Ok(_) => Ok(k.clone()),
        Err(Error::NonIntegralDual) => spin_char(tree),
        Err(e) => Err(e),
    }
}

/// The lattice reflection `l -> -l - PD(k)`.
pub fn reflect(pd: &[i64], l: &[i64]) -> Vec<i64> {
    l.iter().zip(pd).map(|(a, b)| -a - b).collect()
}

/// Determinant parity check for knot double covers.
pub fn has_odd_determinant(tree: &PlumbingTree) -> bool {
    tree.determinant().is_odd()
}

pub fn is_integral(x: &Rational) -> bool {
    x.denom().is_one() || x.numer().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, rat_int};

    pub(crate) fn gamma(q: i64) -> PlumbingTree {
        PlumbingTree::star(-1, &[vec![-2], vec![-3], vec![-q]]).unwrap()
    }

    #[test]
    fn rejects_bad_trees() {
        assert!(PlumbingTree::new(vec![], vec![], None).is_err());
        let v = |id, weight| Vertex { id, weight };
        assert!(PlumbingTree::new(vec![v(0, -2), v(1, -2), v(2, -2)], vec![(0, 1)], None).is_err());
        assert!(PlumbingTree::new(vec![v(0, -2), v(1, -2)], vec![(0, 0)], None).is_err());
        assert!(PlumbingTree::new(vec![v(0, -2), v(0, -2)], vec![], None).is_err());
    }

    #[test]
    fn intersection_forms() {
        let single = PlumbingTree::chain(&[-1]).unwrap();
        assert_eq!(single.intersection_form(), IntMatrix::from_rows(&[vec![-1]]));
        let g7 = gamma(7).intersection_form();
        assert_eq!((0..4).map(|j| g7.get(0, j).clone()).collect::<Vec<_>>(), big(&[-1, 1, 1, 1]));
        assert_eq!(
            PlumbingTree::chain(&[-2, -2]).unwrap().intersection_form(),
            IntMatrix::from_rows(&[vec![-2, 1], vec![1, -2]])
        );
    }

    #[test]
    fn canonical_vectors() {
        assert_eq!(canonical_char(&gamma(7)).0, vec![-1, 0, 1, 5]);
        assert_eq!(canonical_char(&PlumbingTree::chain(&[-2]).unwrap()).0, vec![0]);
        assert_eq!(canonical_char(&PlumbingTree::chain(&[-1]).unwrap()).0, vec![-1]);
    }

    #[test]
    fn chi_examples() {
        let t = gamma(7);
        let k = canonical_char(&t);
        assert_eq!(chi(&t, &k, &[0, 0, 0, 0]).unwrap(), 0);
        assert_eq!(chi(&t, &k, &[1, 0, 0, 0]).unwrap(), 1);
        let bad = CharVector(vec![0, 0, 1, 5]);
        assert!(matches!(chi(&t, &bad, &[1, 0, 0, 0]), Err(Error::NotCharacteristic(_))));
        assert!(CharVector::new(&t, vec![0, 0, 1, 5]).is_err());
    }

    #[test]
    fn chi_matches_closed_form_and_q_shift() {
        // 2chi = a^2 + 2b^2 + 3c^2 + q d^2 - 2a(b+c+d) + a - c - (q-2)d
        for q in [7i64, 9, 11, 13] {
            let t = gamma(q);
            let k = canonical_char(&t);
            let t7 = gamma(7);
            let k7 = canonical_char(&t7);
            for a in -2..=2 {
                for b in -2..=2 {
                    for c in -2..=2 {
                        for d in -2..=2i64 {
                            let l = [a, b, c, d];
                            let closed = a * a + 2 * b * b + 3 * c * c + q * d * d - 2 * a * (b + c + d) + a - c
                                - (q - 2) * d;
                            let x = chi(&t, &k, &l).unwrap();
                            assert_eq!(2 * x, closed);
                            assert_eq!(2 * x - 2 * chi(&t7, &k7, &l).unwrap(), (q - 7) * (d * d - d));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn k_square_examples() {
        let s3 = PlumbingTree::chain(&[-1]).unwrap();
        assert_eq!(k_square(&s3, &CharVector(vec![-1])).unwrap(), rat_int(-1));
        let m2 = PlumbingTree::chain(&[-2]).unwrap();
        assert_eq!(k_square(&m2, &CharVector(vec![0])).unwrap(), rat_int(0));
        let t = gamma(7);
        assert_eq!(k_square(&t, &canonical_char(&t)).unwrap(), rat_int(-4));
    }

    fn wu_oracle(t: &PlumbingTree) -> Vec<Vec<i64>> {
        let n = t.len();
        let q = t.form_i64();
        (0..1u32 << n)
            .map(|m| (0..n).map(|i| (m >> i & 1) as i64).collect::<Vec<_>>())
            .filter(|w| (0..n).all(|i| ((0..n).map(|j| q[i][j] * w[j]).sum::<i64>() - q[i][i]).rem_euclid(2) == 0))
            .collect()
    }

    #[test]
    fn wu_examples() {
        assert_eq!(wu_class(&PlumbingTree::chain(&[-1]).unwrap()).unwrap(), vec![1]);
        assert_eq!(wu_class(&PlumbingTree::chain(&[-2]).unwrap()).unwrap(), vec![0]);
        let t = gamma(7);
        let solutions = wu_oracle(&t);
        assert_eq!(solutions.len(), 1);
        assert_eq!(wu_class(&t).unwrap(), solutions[0]);
        assert_eq!(solutions[0], vec![0, 1, 1, 1]);
    }

    #[test]
    fn mu_bar_examples() {
        assert_eq!(mu_bar(&PlumbingTree::chain(&[-1]).unwrap()).unwrap(), rat_int(0));
        assert_eq!(mu_bar(&PlumbingTree::chain(&[-2]).unwrap()).unwrap(), rat(-1, 8));
        assert_eq!(mu_bar(&gamma(7)).unwrap(), rat_int(1));
        // E8: even form, w = 0
        let e8 = PlumbingTree::star(-2, &[vec![-2], vec![-2, -2], vec![-2, -2, -2, -2]]).unwrap();
        assert_eq!(mu_bar(&e8).unwrap(), rat_int(-1));
    }

    #[test]
    fn json_round_trip_with_automorphism() {
        let t = PlumbingTree::star(-1, &[vec![-7], vec![-7]]).unwrap();
        let t = t.with_automorphism(vec![0, 2, 1]).unwrap();
        let back = PlumbingTree::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(PlumbingTree::star(-1, &[vec![-7], vec![-5]]).unwrap().with_automorphism(vec![0, 2, 1]).is_err());
    }

    #[test]
    fn spin_representative() {
        let t = PlumbingTree::chain(&[-3]).unwrap();
        let k = canonical_char(&t);
        assert!(dual_integral(&t, &k).is_err());
        let s = self_conjugate_char(&t, &k).unwrap();
        assert_eq!(s.0, vec![-3]);
        assert_eq!(dual_integral(&t, &s).unwrap(), vec![1]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reflection_preserves_chi(q in prop::sample::select(vec![7i64, 9, 11]),
                                        l in proptest::collection::vec(-4i64..=4, 4)) {
                let t = gamma(q);
                let k = spin_char(&t).unwrap();
                let pd = dual_integral(&t, &k).unwrap();
                prop_assert_eq!(chi(&t, &k, &l).unwrap(), chi(&t, &k, &reflect(&pd, &l)).unwrap());
            }

            #[test]
            fn canonical_is_characteristic(ws in proptest::collection::vec(-9i64..=-1, 1..6)) {
                let t = PlumbingTree::chain(&ws).unwrap();
                prop_assert!(CharVector::new(&t, canonical_char(&t).0).is_ok());
            }
        }
    }
}
