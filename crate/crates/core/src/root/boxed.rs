//! Graded roots by direct enumeration of sublevel sets.

use std::collections::HashMap;

use super::ellipsoid::Ellipsoid;
use super::{base_weight, drive, finish, Engine, GradedRoot, Levels, RootVertex, Symmetry};
use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::plumbing::{CharVector, PlumbingTree};

/// Default cap on the number of enumerated lattice points.
pub const DEFAULT_BUDGET: u128 = 20_000_000;

/// Box engine without involution. `None` for `n_max` applies the truncation
/// policy; `None` for the radius enumerates the whole sublevel ellipsoid.
pub fn build_root_box(
    t: &PlumbingTree,
    k: &CharVector,
    n_max: Option<i64>,
    box_radius: Option<i64>,
) -> Result<GradedRoot> {
    build_root_box_with(t, k, n_max, box_radius, Symmetry::None, DEFAULT_BUDGET)
}

pub fn build_root_box_with(
    t: &PlumbingTree,
    k: &CharVector,
    n_max: Option<i64>,
    box_radius: Option<i64>,
    sym: Symmetry,
    budget: u128,
) -> Result<GradedRoot> {
    if let Some(r) = box_radius {
        if r < 1 {
            return Err(Error::Consistency("box radius must be positive".into()));
        }
    }
    let ell = Ellipsoid::new(t, k)?;
    let base = base_weight(t, k)?;
    let (levels, n, mut stable) =
        drive(ell.chi_lower_bound(), n_max, |n| sweep(&ell, &base, n, box_radius, &sym, budget))?;
    if stable {
        if let Some(r) = box_radius {
            // a clipped box is trusted only when one more layer changes nothing
            let wider = sweep(&ell, &base, n + 1, Some(r + 1), &sym, budget)
                .and_then(|lv| finish(lv, &base, n + 1, Engine::Box(Some(r + 1)), true))
                .and_then(|root| root.truncated(n));
            let here = finish(levels.clone(), &base, n, Engine::Box(box_radius), true)?;
            stable = matches!(wider, Ok(w) if w.canonical_form() == here.canonical_form());
        }
    }
    let mut root = finish(levels, &base, n, Engine::Box(box_radius), stable)?;
    if sym.is_none() {
        root.involution = None;
    }
    Ok(root)
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    min_rank: Vec<u32>,
}

impl UnionFind {
    fn find(&mut self, mut x: u32) -> u32 {
        let mut r = x;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    /// Merges the classes; returns the absorbed root when they were distinct.
    fn union(&mut self, a: u32, b: u32) -> Option<u32> {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return None;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        self.min_rank[a as usize] = self.min_rank[a as usize].min(self.min_rank[b as usize]);
        Some(b)
    }
}

fn sweep(
    ell: &Ellipsoid,
    base: &Rational,
    n_top: i64,
    clip: Option<i64>,
    sym: &Symmetry,
    budget: u128,
) -> Result<Levels> {
    let pts = ell.enumerate(n_top, clip, budget)?;
    let mut out = Levels::default();
    if pts.is_empty() {
        return Ok(out);
    }
    let len = pts.len();
    let index: HashMap<&[i64], u32> = pts.iter().enumerate().map(|(i, (_, p))| (p.as_slice(), i as u32)).collect();
    let mut order: Vec<u32> = (0..len as u32).collect();
    order.sort_by(|&a, &b| pts[a as usize].1.cmp(&pts[b as usize].1));
    let mut rank = vec![0u32; len];
    for (r, &i) in order.iter().enumerate() {
        rank[i as usize] = r as u32;
    }
    let mut uf = UnionFind { parent: (0..len as u32).collect(), size: vec![1; len], min_rank: rank };
    let mut active = vec![false; len];
    let mut roots = std::collections::BTreeSet::new();
    let mut prev: Vec<(u32, usize)> = Vec::new();
    let mut pos = 0;
    let mut nb = vec![0i64; ell.dim()];
    for level in pts[0].0..=n_top {
        while pos < len && pts[pos].0 == level {
            let i = pos as u32;
            active[pos] = true;
            roots.insert(i);
            nb.copy_from_slice(&pts[pos].1);
            for v in 0..ell.dim() {
                for s in [-1, 1] {
                    nb[v] += s;
                    if let Some(&j) = index.get(nb.as_slice()) {
                        if active[j as usize] {
                            if let Some(gone) = uf.union(i, j) {
                                roots.remove(&gone);
                            }
                        }
                    }
                    nb[v] -= s;
                }
            }
            pos += 1;
        }
        let mut comps: Vec<u32> = roots.iter().copied().collect();
        comps.sort_by_key(|&r| uf.min_rank[r as usize]);
        let mut vertex_of = HashMap::new();
        let first = out.vertices.len();
        for &r in &comps {
            let rep = pts[order[uf.min_rank[r as usize] as usize] as usize].1.clone();
            vertex_of.insert(r, out.vertices.len());
            out.vertices.push(RootVertex { level, weight: super::weight_at(base, level), rep });
            out.successor.push(None);
        }
        for &(r, v) in &prev {
            let root = uf.find(r);
            out.successor[v] = Some(vertex_of[&root]);
        }
        if !sym.is_none() {
            let inv = out.involution.get_or_insert_with(Vec::new);
            for v in first..out.vertices.len() {
                let image = sym.apply(&out.vertices[v].rep);
                let j = match index.get(image.as_slice()) {
                    Some(&j) if active[j as usize] => j,
                    _ => {
                        return Err(Error::Unstable(format!(
                            "involution image of a level-{level} component lies outside the box"
                        )))
                    }
                };
                let root = uf.find(j);
                inv.push(vertex_of[&root]);
            }
        }
        out.counts.insert(level, comps.len());
        prev = comps.iter().map(|&r| (r, vertex_of[&r])).collect();
    }
    Ok(out)
}
