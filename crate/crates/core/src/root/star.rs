//! Graded roots of star-shaped trees from a one-dimensional profile.
//!
//! Fixing the central coordinate `t` decouples the legs, each a path lattice
//! minimized by dynamic programming. The profile `tau(t)` is the minimum of
//! `chi` over the fibre, and sublevel components of `chi` are the maximal
//! intervals of `{tau <= n}`.

use super::ellipsoid::Ellipsoid;
use super::{base_weight, drive, finish, Engine, GradedRoot, Levels, RootVertex, Symmetry};
use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::plumbing::{CharVector, PlumbingTree};

pub fn build_root_star(t: &PlumbingTree, k: &CharVector) -> Result<GradedRoot> {
    build_root_star_with(t, k, None, Symmetry::None)
}

pub fn build_root_star_with(
    t: &PlumbingTree,
    k: &CharVector,
    n_max: Option<i64>,
    sym: Symmetry,
) -> Result<GradedRoot> {
    let ell = Ellipsoid::new(t, k)?;
    let layout = Layout::new(t, &sym)?;
    let base = base_weight(t, k)?;
    let (levels, n, stable) = drive(ell.chi_lower_bound(), n_max, |n| {
        let profile = Profile::compute(t, k.values(), &layout, &ell, n);
        sweep(&profile, &layout, &base, n, &sym)
    })?;
    let mut root = finish(levels, &base, n, Engine::Star, stable)?;
    if sym.is_none() {
        root.involution = None;
    }
    Ok(root)
}

/// Center index and legs listed outward from the center.
struct Layout {
    center: usize,
    legs: Vec<Vec<usize>>,
}

impl Layout {
    fn new(t: &PlumbingTree, sym: &Symmetry) -> Result<Self> {
        let high: Vec<usize> = (0..t.len()).filter(|&v| t.degree(v) >= 3).collect();
        let center = match high.len() {
            0 => match sym {
                // a chain: pick the middle vertex fixed by the automorphism
                Symmetry::Graph(perm) => (0..t.len())
                    .find(|&v| perm[v] == v)
                    .ok_or_else(|| Error::Automorphism("no fixed vertex on the chain".into()))?,
                _ => 0,
            },
            1 => high[0],
            _ => return Err(Error::NotStarShaped),
        };
        if let Symmetry::Graph(perm) = sym {
            if perm[center] != center {
                return Err(Error::Automorphism("automorphism moves the center".into()));
            }
        }
        let mut legs = Vec::new();
        for &first in t.neighbors(center) {
            let mut leg = vec![first];
            let mut prev = center;
            let mut cur = first;
            loop {
                let next: Vec<usize> = t.neighbors(cur).iter().copied().filter(|&w| w != prev).collect();
                match next.len() {
                    0 => break,
                    1 => {
                        prev = cur;
                        cur = next[0];
                        leg.push(cur);
                    }
                    _ => return Err(Error::NotStarShaped),
                }
            }
            legs.push(leg);
        }
        Ok(Layout { center, legs })
    }
}

/// Dynamic-programming tables for one leg over bounded coordinate ranges.
struct LegTable {
    /// `lo[i]` is the smallest allowed value of the i-th leg coordinate.
    lo: Vec<i64>,
    /// `arg[i][x - lo[i]]`: best next coordinate given coordinate `i` is `x`.
    arg: Vec<Vec<i64>>,
    /// Minimum of the leg's part of `2 chi` given the first coordinate.
    first: Vec<Option<i64>>,
}

struct Profile {
    t_lo: i64,
    /// `2 chi` minimized over the fibre; `None` outside the ellipsoid.
    twice_tau: Vec<Option<i64>>,
    best_first: Vec<Vec<i64>>,
    legs: Vec<LegTable>,
}

impl Profile {
    fn compute(t: &PlumbingTree, k: &[i64], layout: &Layout, ell: &Ellipsoid, n_top: i64) -> Profile {
        let bounds = ell.coordinate_bounds(n_top);
        let w = t.weights();
        let legs: Vec<LegTable> = layout
            .legs
            .iter()
            .map(|leg| {
                let s = leg.len();
                let lo: Vec<i64> = leg.iter().map(|&v| bounds[v].0).collect();
                let hi: Vec<i64> = leg.iter().map(|&v| bounds[v].1).collect();
                let mut arg = vec![Vec::new(); s];
                let own = |i: usize, x: i64| -w[leg[i]] * x * x - k[leg[i]] * x;
                // h holds the DP value for coordinate i over its range
                let mut h: Vec<Option<i64>> = (lo[s - 1]..=hi[s - 1]).map(|x| Some(own(s - 1, x))).collect();
                for i in (0..s - 1).rev() {
                    let mut next = Vec::new();
                    let mut args = Vec::new();
                    for x in lo[i]..=hi[i] {
                        let mut best: Option<(i64, i64)> = None;
                        for (yi, hy) in h.iter().enumerate() {
                            if let Some(hy) = hy {
                                let y = lo[i + 1] + yi as i64;
                                let val = hy - 2 * x * y;
                                if best.is_none_or(|(b, _)| val < b) {
                                    best = Some((val, y));
                                }
                            }
                        }
                        next.push(best.map(|(b, _)| b + own(i, x)));
                        args.push(best.map_or(0, |(_, y)| y));
                    }
                    arg[i] = args;
                    h = next;
                }
                LegTable { lo, arg, first: h }
            })
            .collect();
        let (t_lo, t_hi) = bounds[layout.center];
        let c = layout.center;
        let mut twice_tau = Vec::new();
        let mut best_first = Vec::new();
        for tv in t_lo..=t_hi {
            let mut total = Some(-w[c] * tv * tv - k[c] * tv);
            let mut firsts = Vec::new();
            for leg in &legs {
                let mut best: Option<(i64, i64)> = None;
                for (xi, g) in leg.first.iter().enumerate() {
                    if let Some(g) = g {
                        let x = leg.lo[0] + xi as i64;
                        let val = g - 2 * tv * x;
                        if best.is_none_or(|(b, _)| val < b) {
                            best = Some((val, x));
                        }
                    }
                }
                total = match (total, best) {
                    (Some(a), Some((b, x))) => {
                        firsts.push(x);
                        Some(a + b)
                    }
                    _ => None,
                };
            }
            twice_tau.push(total);
            best_first.push(firsts);
        }
        Profile { t_lo, twice_tau, best_first, legs }
    }

    fn tau(&self, i: usize) -> Option<i64> {
        self.twice_tau[i].map(|x| x / 2)
    }

    /// A minimizing lattice point in the fibre over index `i`.
    fn point(&self, layout: &Layout, dim: usize, i: usize) -> Vec<i64> {
        let mut p = vec![0; dim];
        p[layout.center] = self.t_lo + i as i64;
        for (j, leg) in layout.legs.iter().enumerate() {
            let table = &self.legs[j];
            let mut x = self.best_first[i][j];
            for (pos, &v) in leg.iter().enumerate() {
                p[v] = x;
                if pos + 1 < leg.len() {
                    x = table.arg[pos][(x - table.lo[pos]) as usize];
                }
            }
        }
        p
    }
}

fn sweep(profile: &Profile, layout: &Layout, base: &Rational, n_top: i64, sym: &Symmetry) -> Result<Levels> {
    let mut out = Levels::default();
    let len = profile.twice_tau.len();
    let Some(min) = (0..len).filter_map(|i| profile.tau(i)).min() else {
        return Ok(out);
    };
    let dim = layout.legs.iter().map(Vec::len).sum::<usize>() + 1;
    let mut prev: Vec<(usize, usize, usize)> = Vec::new();
    for level in min..=n_top {
        let mut intervals = Vec::new();
        let mut i = 0;
        while i < len {
            if profile.tau(i).is_some_and(|x| x <= level) {
                let start = i;
                while i < len && profile.tau(i).is_some_and(|x| x <= level) {
                    i += 1;
                }
                intervals.push((start, i - 1));
            } else {
                i += 1;
            }
        }
        let first = out.vertices.len();
        for &(a, b) in &intervals {
            let best = (a..=b).min_by_key(|&i| profile.tau(i).unwrap()).unwrap();
            out.vertices.push(RootVertex {
                level,
                weight: super::weight_at(base, level),
                rep: profile.point(layout, dim, best),
            });
            out.successor.push(None);
        }
        let find = |i: usize| intervals.iter().position(|&(a, b)| a <= i && i <= b);
        for &(a, _, v) in &prev {
            out.successor[v] = Some(first + find(a).expect("sublevel intervals are nested"));
        }
        match sym {
            Symmetry::None => {}
            Symmetry::Graph(_) => {
                let inv = out.involution.get_or_insert_with(Vec::new);
                inv.extend(first..out.vertices.len());
            }
            Symmetry::Lattice(pd) => {
                let inv = out.involution.get_or_insert_with(Vec::new);
                for &(a, _) in &intervals {
                    let image = -(profile.t_lo + a as i64) - pd[layout.center] - profile.t_lo;
                    let j = usize::try_from(image)
                        .ok()
                        .filter(|&j| j < len)
                        .and_then(find)
                        .ok_or_else(|| Error::Consistency("profile is not symmetric under J".into()))?;
                    inv.push(first + j);
                }
            }
        }
        out.counts.insert(level, intervals.len());
        prev = intervals.iter().enumerate().map(|(idx, &(a, b))| (a, b, first + idx)).collect();
    }
    Ok(out)
}
