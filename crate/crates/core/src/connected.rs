//! Root-level shortcuts for the connected invariants: the monotone subroot,
//! reduction of a symmetric root to one with trivial involution, and `omega`.

use std::collections::BTreeSet;

use crate::complex::{homology, is_local_equivalence, root_complex, F2Mat, GradedUModule, UComplex};
use crate::error::{Error, Result};
use crate::gf2::{Bits, LinearSystem};
use crate::root::GradedRoot;

/// Leaves reachable from each vertex by an upward path.
pub fn leaf_sets(root: &GradedRoot) -> Vec<BTreeSet<usize>> {
    let mut sets = vec![BTreeSet::new(); root.len()];
    for leaf in root.leaves() {
        let mut v = Some(leaf);
        while let Some(u) = v {
            sets[u].insert(leaf);
            v = root.successor(u);
        }
    }
    sets
}

fn involution(root: &GradedRoot) -> Result<&[usize]> {
    root.involution()
        .ok_or_else(|| Error::InvalidComplex("root carries no involution".into()))
}

/// Pair `{v, Jv}` of highest weight among `leaves` whose weight beats `above`
/// (a level; smaller is higher), ties broken by smallest ids.
fn best_pair(leaves: &BTreeSet<usize>, root: &GradedRoot, j: &[usize], above: Option<i64>) -> Option<(usize, usize)> {
    leaves
        .iter()
        .filter(|&&v| above.is_none_or(|l| root.level(v) < l))
        .map(|&v| (root.level(v), v.min(j[v]), v.max(j[v])))
        .min()
        .map(|(_, a, b)| (a, b))
}

#[derive(Clone, Debug)]
pub struct MonotoneSubroot {
    pub root: GradedRoot,
    /// Selected leaves, as ids in the source root.
    pub selected: Vec<usize>,
}

impl MonotoneSubroot {
    pub fn homology(&self) -> Result<GradedUModule> {
        homology(&root_complex(&self.root)?)
    }
}

pub fn monotone_subroot(root: &GradedRoot) -> Result<MonotoneSubroot> {
    root.require_stable()?;
    let j = involution(root)?;
    let v0 = (0..root.len())
        .filter(|&v| j[v] == v)
        .min_by_key(|&v| (root.level(v), v))
        .ok_or_else(|| Error::Consistency("no invariant vertex".into()))?;
    let sets = leaf_sets(root);
    let mut selected = BTreeSet::new();
    let mut top = None::<i64>;
    let add = |(a, b): (usize, usize), selected: &mut BTreeSet<usize>, top: &mut Option<i64>| {
        selected.insert(a);
        selected.insert(b);
        let l = root.level(a);
        *top = Some(top.map_or(l, |t| t.min(l)));
    };
    if let Some(p) = best_pair(&sets[v0], root, j, None) {
        add(p, &mut selected, &mut top);
    }
    let mut cur = v0;
    while let Some(next) = root.successor(cur) {
        if sets[next].len() > sets[cur].len() {
            if let Some(p) = best_pair(&sets[next], root, j, top) {
                add(p, &mut selected, &mut top);
            }
        }
        cur = next;
    }
    let mut keep = BTreeSet::new();
    for &leaf in &selected {
        let mut v = Some(leaf);
        while let Some(u) = v {
            if !keep.insert(u) {
                break;
            }
            v = root.successor(u);
        }
    }
    let keep: Vec<usize> = keep.into_iter().collect();
    Ok(MonotoneSubroot { root: root.subroot(&keep)?, selected: selected.into_iter().collect() })
}

#[derive(Clone, Debug)]
pub struct SymmetricReduction {
    pub root: GradedRoot,
    /// Number of leaf pairs removed.
    pub deletions: usize,
    /// A non-invariant leaf with no invariant vertex in its grading, if the
    /// reduction had to stop.
    pub obstruction: Option<usize>,
}

impl SymmetricReduction {
    pub fn is_complete(&self) -> bool {
        self.obstruction.is_none()
    }
}

/// Removes the branch above the merge point of `leaf`, returning the kept ids.
fn prune(root: &GradedRoot, sets: &[BTreeSet<usize>], leaves: [usize; 2]) -> Vec<usize> {
    let mut drop = BTreeSet::new();
    for leaf in leaves {
        let mut v = Some(leaf);
        while let Some(u) = v {
            if sets[u].len() > 1 {
                break;
            }
            drop.insert(u);
            v = root.successor(u);
        }
    }
    (0..root.len()).filter(|v| !drop.contains(v)).collect()
}

/// Completes a map given on the leaves of a model complex to a chain map by
/// solving for the images of the angles one column at a time.
fn extend_to_angles(x: &UComplex, y: &UComplex, f: &mut F2Mat, leaves: usize) -> Option<()> {
    let (gx, gy) = (x.gradings(), y.gradings());
    for a in leaves..x.rank() {
        let target = f.mul_vec(&x.d().col(a));
        let rows: Vec<usize> = (0..y.rank()).filter(|&i| gy[i] >= gx[a] && (gy[i] - gx[a]) % 2 == 0).collect();
        let mut sys = LinearSystem::new(rows.len());
        for i in 0..y.rank() {
            let row = Bits::from_indices(rows.len(), (0..rows.len()).filter(|&k| y.d().get(i, rows[k])));
            sys.push(row, target.get(i));
        }
        let sol = sys.solve()?;
        for k in sol.particular.ones() {
            f.set(rows[k], a, true);
        }
    }
    Some(())
}

/// The leaf-collapsing map of one deletion step: leaves go to themselves,
/// the deleted pair to a leaf above `x`.
fn collapse_map(root: &GradedRoot, next: &GradedRoot, keep: &[usize], x: usize, pair: [usize; 2]) -> Result<bool> {
    let cx = root_complex(root)?;
    let cy = root_complex(next)?;
    if cx.shift() != cy.shift() {
        return Err(Error::Consistency("deletion changed the base weight".into()));
    }
    let pos = |v: usize| keep.binary_search(&v).ok();
    let src = root.leaves_dfs();
    let dst = next.leaves_dfs();
    let dst_pos = |v: usize| dst.iter().position(|&u| u == v);
    let x_new = pos(x).ok_or_else(|| Error::Consistency("invariant vertex was deleted".into()))?;
    let above = leaf_sets(next)[x_new].iter().copied().min().expect("vertex has a leaf");
    let mut f = F2Mat::zeros(cy.rank(), cx.rank());
    for (i, &v) in src.iter().enumerate() {
        let image = if pair.contains(&v) { above } else { pos(v).expect("kept leaf") };
        f.set(dst_pos(image).expect("leaf of the reduced root"), i, true);
    }
    if extend_to_angles(&cx, &cy, &mut f, src.len()).is_none() {
        return Ok(false);
    }
    Ok(is_local_equivalence(&cx, &cy, &f))
}

/// Deletes pairs of swapped leaves while an invariant vertex shares their
/// grading, checking each step is a local equivalence of model complexes.
pub fn symmetric_reduction(root: &GradedRoot) -> Result<SymmetricReduction> {
    involution(root)?;
    let mut cur = root.clone();
    let mut deletions = 0;
    loop {
        let j = involution(&cur)?.to_vec();
        let Some(v) = cur.leaves().into_iter().find(|&v| j[v] != v) else {
            return Ok(SymmetricReduction { root: cur, deletions, obstruction: None });
        };
        let Some(x) = (0..cur.len()).find(|&u| j[u] == u && cur.level(u) == cur.level(v)) else {
            return Ok(SymmetricReduction { root: cur, deletions, obstruction: Some(v) });
        };
        let sets = leaf_sets(&cur);
        let pair = [v, j[v]];
        let keep = prune(&cur, &sets, pair);
        let next = cur.subroot(&keep)?;
        if !collapse_map(&cur, &next, &keep, x, pair)? {
            return Err(Error::Consistency(format!("deleting leaf {v} is not a local equivalence")));
        }
        deletions += 1;
        cur = next;
    }
}

/// Smallest `n` with `U^n` killing the torsion.
pub fn omega(m: &GradedUModule) -> u32 {
    m.max_torsion_length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_int;
    use crate::plumbing::{canonical_char, self_conjugate_char, PlumbingTree};
    use crate::root::{build_root_box, lattice_involution};

    fn root_of(t: &PlumbingTree) -> GradedRoot {
        let k = self_conjugate_char(t, &canonical_char(t)).unwrap();
        let r = build_root_box(t, &k, None, None).unwrap();
        lattice_involution(t, &k, &r).unwrap()
    }

    fn gamma(q: i64) -> GradedRoot {
        root_of(&PlumbingTree::star(-1, &[vec![-2], vec![-3], vec![-q]]).unwrap())
    }

    /// Two leaves at levels 0 swapped, plus a fixed leaf at level 1, all
    /// meeting at level 2.
    fn swapped_with_fixed_leaf() -> GradedRoot {
        GradedRoot::from_parts(
            rat_int(0),
            vec![0, 0, 1, 1, 2],
            vec![Some(2), Some(2), Some(4), Some(4), None],
            Some(vec![1, 0, 2, 3, 4]),
        )
        .unwrap()
    }

    #[test]
    fn stem_is_its_own_subroot() {
        let t = PlumbingTree::chain(&[-2, -2]).unwrap();
        let r = root_of(&t);
        let m = monotone_subroot(&r).unwrap();
        assert_eq!(m.root.shape(), r.shape());
        assert!(m.homology().unwrap().is_torsion_free());
    }

    #[test]
    fn gamma_seven_keeps_both_leaves() {
        let r = gamma(7);
        let m = monotone_subroot(&r).unwrap();
        assert_eq!(m.selected.len(), 2);
        assert_eq!(m.root.canonical_form(), r.canonical_form());
        let h = m.homology().unwrap().shifted(&rat_int(-2));
        assert_eq!(h, GradedUModule::new(vec![rat_int(-2)], vec![(rat_int(-2), 1)]));
    }

    #[test]
    fn subroot_is_idempotent() {
        for r in [gamma(7), gamma(11), swapped_with_fixed_leaf()] {
            let m = monotone_subroot(&r).unwrap();
            let again = monotone_subroot(&m.root).unwrap();
            assert_eq!(again.root.canonical_form(), m.root.canonical_form());
        }
    }

    #[test]
    fn subroot_matches_connected_homology() {
        for r in [gamma(7), gamma(13), swapped_with_fixed_leaf()] {
            let m = monotone_subroot(&r).unwrap();
            let c = root_complex(&r).unwrap();
            let conn = crate::complex::connected_homology(&c, crate::complex::DEFAULT_RANK_BOUND).unwrap();
            assert_eq!(m.homology().unwrap(), conn);
        }
    }

    #[test]
    fn trivial_involution_needs_no_deletions() {
        let r = root_of(&PlumbingTree::chain(&[-3, -2]).unwrap());
        let red = symmetric_reduction(&r).unwrap();
        assert_eq!(red.deletions, 0);
        assert!(red.is_complete());
    }

    #[test]
    fn swapped_pair_collapses_onto_fixed_vertex() {
        // the pair sits at level 0 where nothing is invariant
        let red = symmetric_reduction(&swapped_with_fixed_leaf()).unwrap();
        assert_eq!(red.obstruction, Some(0));
        // one level lower an invariant leaf waits
        let r = GradedRoot::from_parts(
            rat_int(0),
            vec![1, 1, 0, 2, 1],
            vec![Some(3), Some(3), Some(4), None, Some(3)],
            Some(vec![1, 0, 2, 3, 4]),
        )
        .unwrap();
        let red = symmetric_reduction(&r).unwrap();
        assert!(red.is_complete());
        assert_eq!(red.deletions, 1);
        assert_eq!(red.root.leaves().len(), 1);
    }

    #[test]
    fn gamma_seven_is_obstructed() {
        let red = symmetric_reduction(&gamma(7)).unwrap();
        assert!(!red.is_complete());
        assert_eq!(red.deletions, 0);
    }

    #[test]
    fn omega_reads_torsion() {
        assert_eq!(omega(&GradedUModule::tower(rat_int(0))), 0);
        let m = GradedUModule::new(vec![rat_int(0)], vec![(rat_int(-2), 3), (rat_int(0), 1)]);
        assert_eq!(omega(&m), 3);
    }
}
