//! Negative definite plumbing presentations of double branched covers.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::seifert::{brieskorn, SeifertData};
use super::spec::KnotSpec;
use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::plumbing::{canonical_char, self_conjugate_char, CharVector, PlumbingTree};

/// How the covering involution acts on the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InvolutionKind {
    /// Reflection `l -> -l - PD(k)` of an arborescent knot.
    Lattice,
    /// The declared leg swap of the tree.
    Graph,
    /// Homotopic to the identity.
    Trivial,
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub seifert: SeifertData,
    pub tree: PlumbingTree,
    pub k: CharVector,
    pub involution: InvolutionKind,
    /// The tree bounds the cover of the mirror of the requested knot.
    pub mirrored: bool,
}

impl Presentation {
    pub fn determinant(&self) -> BigInt {
        self.seifert.homology_order()
    }
}

/// Seifert data with negative Euler number, mirroring when necessary.
fn definite_side(e: i64, fractions: &[Rational]) -> Result<(SeifertData, bool)> {
    let s = SeifertData::from_fractions(e, fractions)?;
    let eu = s.euler();
    if eu.is_zero() {
        return Err(Error::NotNegativeDefinite);
    }
    let (s, mirrored) = if eu.is_positive() { (s.negated(), true) } else { (s, false) };
    let det = s.homology_order();
    if det.clone() % 2u32 == BigInt::zero() {
        return Err(Error::InvalidKnot(format!("determinant {det} is even, not a knot")));
    }
    Ok((s, mirrored))
}

fn arborescent(e: i64, fractions: &[Rational]) -> Result<Presentation> {
    let (seifert, mirrored) = definite_side(e, fractions)?;
    let tree = seifert.to_tree()?;
    tree.require_negative_definite()?;
    let k = self_conjugate_char(&tree, &canonical_char(&tree))?;
    Ok(Presentation { seifert, tree, k, involution: InvolutionKind::Lattice, mirrored })
}

/// `montesinos(e; t_1, ...)`: the cover is Seifert fibered with Euler number
/// `e - sum t_i`.
pub fn montesinos_plumbing(e: i64, fractions: &[(i64, i64)]) -> Result<Presentation> {
    KnotSpec::Montesinos(e, fractions.to_vec()).validate()?;
    let r: Vec<Rational> = KnotSpec::fractions(fractions).into_iter().map(|t| -t).collect();
    arborescent(e, &r)
}

/// `pretzel(a_1, ...)` is `montesinos(0; 1/a_1, ...)`.
pub fn pretzel_plumbing(a: &[i64]) -> Result<Presentation> {
    KnotSpec::Pretzel(a.to_vec()).validate()?;
    let fr: Vec<(i64, i64)> = a.iter().map(|&x| (1, x)).collect();
    montesinos_plumbing(0, &fr)
}

/// Double cover of `T(p,q)` is the Brieskorn sphere `Sigma(2,p,q)`: fibers
/// `(2,p,q)` with trivial involution when `pq` is odd, otherwise fibers
/// `(p/2, q, q)` whose two equal legs the involution swaps.
pub fn torus_plumbing(p: i64, q: i64) -> Result<Presentation> {
    KnotSpec::Torus(p, q).validate()?;
    let mirrored = (p < 0) != (q < 0);
    let (p, q) = (p.abs(), q.abs());
    let (seifert, involution, swap) = if p % 2 == 1 && q % 2 == 1 {
        (brieskorn(&[2, p, q], None)?, InvolutionKind::Trivial, None)
    } else {
        let (even, odd) = if p % 2 == 0 { (p, q) } else { (q, p) };
        let m = even / 2;
        let s = brieskorn(&[m, odd, odd], Some((1, 2)))?;
        let legs = if m == 1 { (0, 1) } else { (1, 2) };
        (s, InvolutionKind::Graph, Some(legs))
    };
    let mut tree = seifert.to_tree()?;
    if let Some((i, j)) = swap {
        tree = tree.with_automorphism(seifert.leg_swap(i, j)?)?;
    }
    tree.require_negative_definite()?;
    let k = match involution {
        InvolutionKind::Graph => canonical_char(&tree),
        _ => self_conjugate_char(&tree, &canonical_char(&tree))?,
    };
    Ok(Presentation { seifert, tree, k, involution, mirrored })
}

/// Presentation of a single constructor; `None` for mirrors and sums.
pub fn presentation(spec: &KnotSpec) -> Result<Option<Presentation>> {
    Ok(match spec {
        KnotSpec::Torus(p, q) => Some(torus_plumbing(*p, *q)?),
        KnotSpec::Pretzel(a) => Some(pretzel_plumbing(a)?),
        KnotSpec::Montesinos(e, fr) => Some(montesinos_plumbing(*e, fr)?),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::goeritz::pretzel_determinant;

    #[test]
    fn two_three_seven_star() {
        let pres = pretzel_plumbing(&[2, -3, -7]).unwrap();
        assert!(!pres.mirrored);
        let expect = PlumbingTree::star(-1, &[vec![-2], vec![-3], vec![-7]]).unwrap();
        assert_eq!(pres.tree.weights(), expect.weights());
        assert_eq!(pres.tree.edges(), expect.edges());
        for q in [9, 11] {
            let pres = pretzel_plumbing(&[2, -3, -q]).unwrap();
            assert_eq!(pres.tree.weights(), vec![-1, -2, -3, -q]);
        }
    }

    #[test]
    fn mirror_pretzel_flips_side() {
        let pres = pretzel_plumbing(&[-2, 3, 7]).unwrap();
        assert!(pres.mirrored);
        assert_eq!(pres.tree.weights(), vec![-1, -2, -3, -7]);
    }

    #[test]
    fn determinants_match_the_diagram() {
        for a in [vec![7, -3, 5], vec![11, -5, 9], vec![15, -7, 13], vec![-3, 5, 7], vec![2, -3, -7]] {
            let pres = pretzel_plumbing(&a).unwrap();
            assert_eq!(pres.tree.determinant().abs(), pretzel_determinant(&a));
            assert_eq!(pres.determinant(), pretzel_determinant(&a));
        }
    }

    #[test]
    fn montesinos_matches_pretzel() {
        let m = montesinos_plumbing(0, &[(1, 2), (-1, 3), (-1, 7)]).unwrap();
        let p = pretzel_plumbing(&[2, -3, -7]).unwrap();
        assert_eq!(m.tree.weights(), p.tree.weights());
        assert_eq!(m.mirrored, p.mirrored);
    }

    #[test]
    fn single_fraction_is_a_chain() {
        let m = montesinos_plumbing(0, &[(3, 5)]).unwrap();
        assert!(m.tree.vertices().iter().enumerate().all(|(v, _)| m.tree.degree(v) <= 2));
        assert_eq!(m.determinant(), BigInt::from(3));
    }

    #[test]
    fn rejects_links_and_degenerate_data() {
        assert!(montesinos_plumbing(0, &[]).is_err());
        assert!(pretzel_plumbing(&[2, 2, 2]).is_err());
        // euler number zero
        assert!(matches!(montesinos_plumbing(0, &[(1, 2), (-1, 2)]), Err(Error::NotNegativeDefinite) | Err(Error::InvalidKnot(_))));
    }

    #[test]
    fn torus_presentations() {
        // |det Q| = |Alexander polynomial at -1|: 1 for pq odd, q for T(2m,q)
        let t = torus_plumbing(3, 5).unwrap();
        assert_eq!(t.involution, InvolutionKind::Trivial);
        assert_eq!(t.tree.determinant().abs(), BigInt::from(1));
        assert_eq!(t.tree.len(), 8);
        let t = torus_plumbing(2, 7).unwrap();
        assert_eq!(t.involution, InvolutionKind::Graph);
        assert_eq!(t.tree.determinant().abs(), BigInt::from(7));
        assert!(t.tree.automorphism().is_some());
        let t = torus_plumbing(4, 5).unwrap();
        assert_eq!(t.tree.determinant().abs(), BigInt::from(5));
        assert!(t.k.is_invariant_under(t.tree.automorphism().unwrap()));
        assert!(torus_plumbing(-3, 7).unwrap().mirrored);
        assert!(!torus_plumbing(-3, -7).unwrap().mirrored);
    }
}
