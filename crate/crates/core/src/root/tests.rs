use super::*;
use crate::linalg::rat_int;
use crate::plumbing::canonical_char;
use proptest::prelude::*;
use std::collections::{HashSet, VecDeque};

fn gamma(q: i64) -> PlumbingTree {
    PlumbingTree::star(-1, &[vec![-2], vec![-3], vec![-q]]).unwrap()
}

fn e8() -> PlumbingTree {
    PlumbingTree::star(-2, &[vec![-2], vec![-2, -2], vec![-2, -2, -2, -2]]).unwrap()
}

/// Component count of `{chi <= n}` inside a cube, by breadth-first search.
fn components_oracle(t: &PlumbingTree, k: &CharVector, n: i64, r: i64) -> usize {
    let dim = t.len();
    let side = (2 * r + 1) as usize;
    let mut pts = HashSet::new();
    for code in 0..side.pow(dim as u32) {
        let mut c = code;
        let l: Vec<i64> = (0..dim)
            .map(|_| {
                let v = (c % side) as i64 - r;
                c /= side;
                v
            })
            .collect();
        if plumbing::chi(t, k, &l).unwrap() <= n {
            pts.insert(l);
        }
    }
    let mut seen = HashSet::new();
    let mut comps = 0;
    for p in &pts {
        if seen.contains(p) {
            continue;
        }
        comps += 1;
        let mut queue = VecDeque::from([p.clone()]);
        seen.insert(p.clone());
        while let Some(x) = queue.pop_front() {
            for i in 0..dim {
                for s in [-1, 1] {
                    let mut y = x.clone();
                    y[i] += s;
                    if pts.contains(&y) && seen.insert(y.clone()) {
                        queue.push_back(y);
                    }
                }
            }
        }
    }
    comps
}

#[test]
fn s3_is_a_bare_stem() {
    let t = PlumbingTree::chain(&[-1]).unwrap();
    let k = canonical_char(&t);
    let root = build_root_box(&t, &k, None, None).unwrap();
    assert!(root.is_stable());
    assert_eq!(root.leaves().len(), 1);
    assert_eq!(root.d_invariant(), rat_int(0));
    let root = lattice_involution(&t, &k, &root).unwrap();
    assert!((0..root.len()).all(|v| root.j(v) == v));
    let dot = root.render_dot();
    assert_eq!(dot.matches(" -> ").count(), root.len() - 1);
    assert_eq!(dot.matches("label=").count(), root.len());
}

#[test]
fn gamma7_two_components_then_one() {
    let t = gamma(7);
    let k = canonical_char(&t);
    let root = build_root_box(&t, &k, None, None).unwrap();
    assert_eq!(root.top_level(), 0);
    assert_eq!(root.count_at_level(0), 2);
    assert_eq!(root.count_at_level(1), 1);
    assert_eq!(components_oracle(&t, &k, 0, 3), 2);
    assert_eq!(components_oracle(&t, &k, 1, 3), 1);
    // correction term of the Brieskorn sphere with d(S^3) = 0
    assert_eq!(root.d_invariant(), rat_int(0));
    assert_eq!(root.leaves().len(), 2);
}

#[test]
fn gamma7_reflection_swaps_the_leaves() {
    let t = gamma(7);
    let k = canonical_char(&t);
    for root in [build_root_box(&t, &k, None, None).unwrap(), build_root_star(&t, &k).unwrap()] {
        let root = lattice_involution(&t, &k, &root).unwrap();
        let leaves = root.leaves();
        assert_eq!(root.j(leaves[0]), leaves[1]);
        for v in 0..root.len() {
            assert_eq!(root.j(root.j(v)), v);
            assert_eq!(root.weight(root.j(v)), root.weight(v));
        }
    }
}

#[test]
fn gamma_q_roots_share_a_shape() {
    let shape = |q: i64| {
        let t = gamma(q);
        let k = canonical_char(&t);
        let root = build_root_star(&t, &k).unwrap();
        let shift = root.d_invariant();
        // weights relative to the top
        let rel: Vec<i64> = root.leaves().iter().map(|&v| root.level(v) - root.top_level()).collect();
        (root.leaves().len(), rel, root.count_at_level(root.top_level() + 1), shift)
    };
    let (n7, rel7, c7, _) = shape(7);
    for q in [9, 11, 13] {
        let (n, rel, c, _) = shape(q);
        assert_eq!((n, &rel, c), (n7, &rel7, c7));
    }
}

#[test]
fn e8_correction_term() {
    let t = e8();
    let k = canonical_char(&t);
    let root = build_root_box(&t, &k, None, None).unwrap();
    assert_eq!(root.leaves().len(), 1);
    assert_eq!(root.d_invariant(), rat_int(2));
    assert_eq!(build_root_star(&t, &k).unwrap().canonical_form(), root.canonical_form());
}

#[test]
fn lens_space_chains_are_stems() {
    for ws in [vec![-2], vec![-2, -2], vec![-3, -2], vec![-2, -5, -2], vec![-4, -3]] {
        let t = PlumbingTree::chain(&ws).unwrap();
        let k = canonical_char(&t);
        let b = build_root_box(&t, &k, None, None).unwrap();
        let s = build_root_star(&t, &k).unwrap();
        assert_eq!(b.leaves().len(), 1, "{ws:?}");
        assert_eq!(b.canonical_form(), s.canonical_form());
    }
}

#[test]
fn symmetric_chain_with_leg_swap() {
    let t = PlumbingTree::star(-2, &[vec![-3], vec![-3]]).unwrap().with_automorphism(vec![0, 2, 1]).unwrap();
    let k = canonical_char(&t);
    let root = build_root_box(&t, &k, None, None).unwrap();
    let root = graph_involution(&t, &k, &root).unwrap();
    assert_eq!(root.leaves().len(), 1);
    assert!((0..root.len()).all(|v| root.j(v) == v));
    let bad = CharVector(vec![0, 1, 3]);
    assert!(graph_involution(&t, &bad, &root).is_err());
}

#[test]
fn torus_two_seven_graph_involution_fixes_the_top() {
    let t = PlumbingTree::star(-1, &[vec![-7], vec![-7]]).unwrap().with_automorphism(vec![0, 2, 1]).unwrap();
    let k = canonical_char(&t);
    let root = build_root_box(&t, &k, None, None).unwrap();
    let root = graph_involution(&t, &k, &root).unwrap();
    let top = root.d_invariant();
    assert!((0..root.len()).any(|v| root.weight(v) == &top && root.j(v) == v));
}

#[test]
fn forced_shallow_truncation_is_unstable() {
    let t = gamma(7);
    let k = canonical_char(&t);
    assert!(matches!(build_root_box(&t, &k, Some(0), None), Err(Error::Unstable(_))));
    let r = build_root_box(&t, &k, Some(1), None).unwrap();
    assert!(!r.is_stable());
}

#[test]
fn clipped_box_agrees_when_large_enough() {
    let t = gamma(7);
    let k = canonical_char(&t);
    let exact = build_root_box(&t, &k, None, None).unwrap();
    let clipped = build_root_box(&t, &k, Some(exact.truncation_level()), Some(12)).unwrap();
    assert!(clipped.is_stable());
    assert_eq!(clipped.canonical_form(), exact.canonical_form());
    let deeper = build_root_box(&t, &k, Some(exact.truncation_level() + 2), None).unwrap();
    assert_eq!(deeper.truncated(exact.truncation_level()).unwrap().canonical_form(), exact.canonical_form());
}

#[test]
fn dot_and_json_are_deterministic() {
    let t = gamma(7);
    let k = canonical_char(&t);
    let a = lattice_involution(&t, &k, &build_root_box(&t, &k, None, None).unwrap()).unwrap();
    let b = lattice_involution(&t, &k, &build_root_box(&t, &k, None, None).unwrap()).unwrap();
    assert_eq!(a.render_dot(), b.render_dot());
    assert!(a.render_dot().contains("style=dashed"));
    let j = a.to_json_value();
    assert_eq!(j["leaves"].as_array().unwrap().len(), 2);
    assert_eq!(j["vertices"][0]["weight"], serde_json::json!([0, 1]));
}

#[test]
fn hand_built_root_validation() {
    let base = rat_int(0);
    // two leaves at level 0 joining at level 1
    let ok = GradedRoot::from_parts(base.clone(), vec![0, 0, 1], vec![Some(2), Some(2), None], Some(vec![1, 0, 2]));
    assert!(ok.is_ok());
    let bad = GradedRoot::from_parts(base.clone(), vec![0, 0, 1], vec![Some(2), Some(2), None], Some(vec![1, 2, 0]));
    assert!(bad.is_err());
    let skip = GradedRoot::from_parts(base, vec![0, 2], vec![Some(1), None], None);
    assert!(skip.is_err());
}

fn star_trees() -> impl Strategy<Value = PlumbingTree> {
    let leg = proptest::collection::vec(-5i64..=-2, 1..=2);
    (-3i64..=-1, proptest::collection::vec(leg, 0..=3))
        .prop_map(|(c, legs)| PlumbingTree::star(c, &legs).unwrap())
        .prop_filter("negative definite", |t| t.is_negative_definite() && t.len() <= 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn engines_agree_on_small_stars(t in star_trees()) {
        let k = canonical_char(&t);
        let b = build_root_box(&t, &k, None, None).unwrap();
        let s = build_root_star(&t, &k).unwrap();
        prop_assert_eq!(b.canonical_form(), s.canonical_form());
        if let Ok(sym) = lattice_symmetry(&t, &k) {
            let bj = build_root_box_with(&t, &k, None, None, sym.clone(), DEFAULT_BUDGET).unwrap();
            let sj = build_root_star_with(&t, &k, None, sym).unwrap();
            prop_assert_eq!(bj.canonical_form(), sj.canonical_form());
        }
    }

    #[test]
    fn roots_match_component_oracle(t in star_trees()) {
        prop_assume!(t.len() <= 4);
        let k = canonical_char(&t);
        let root = build_root_box(&t, &k, None, None).unwrap();
        let r = Ellipsoid::new(&t, &k).unwrap()
            .coordinate_bounds(root.truncation_level())
            .iter().map(|&(a, b)| a.abs().max(b.abs())).max().unwrap() + 1;
        for n in root.top_level()..=root.truncation_level() {
            prop_assert_eq!(root.count_at_level(n), components_oracle(&t, &k, n, r));
        }
    }
}
