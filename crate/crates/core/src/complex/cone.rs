//! The mapping cone of `iota + id` and the two tower invariants.

use super::homology::{module_of, Graded};
use super::{F2Mat, GradedUModule, UComplex};
use crate::error::{Error, Result};
use crate::linalg::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchedHomology {
    /// Homology of the cone, gradings as in the input complex.
    pub module: GradedUModule,
    pub delta_bar: Rational,
    pub delta_under: Rational,
}

/// Cone on `Q(id + iota)`: generators `x` and `Qx` with `gr(Qx) = gr(x) - 1`,
/// `d(x) = dx + Q(x + iota x)` and `d(Qx) = Q dx`.
pub fn cone_complex(c: &UComplex) -> UComplex {
    let n = c.rank();
    let mut gr = c.gr.clone();
    gr.extend(c.gr.iter().map(|g| g - 1));
    let mut d = F2Mat::zeros(2 * n, 2 * n);
    for (i, j) in c.d.entries() {
        d.flip(i, j);
        d.flip(n + i, n + j);
    }
    for (i, j) in c.iota.add(&F2Mat::identity(n)).entries() {
        d.flip(n + i, j);
    }
    let mut names = c.names.clone();
    names.extend(c.names.iter().map(|s| format!("Q{s}")));
    UComplex::without_involution(c.shift.clone(), gr, d, names).expect("cone of an iota-complex")
}

/// Homology of the cone and the tower degrees read off it. A tower in the
/// parity of the ordinary tower `d` sits at the lower invariant; the other
/// sits one below the upper invariant.
pub fn branched_homology(c: &UComplex) -> Result<BranchedHomology> {
    let d = super::homology(c)?.tower_degree()?;
    let cone = cone_complex(c);
    let h = Graded::new(&cone.gr, &cone.d);
    let module = module_of(&h, &cone.shift, cone.rank(), 2)?;
    if module.towers.len() != 2 {
        return Err(Error::InvalidComplex(format!("cone has {} towers", module.towers.len())));
    }
    let mut bar = None;
    let mut under = None;
    for g in &module.towers {
        let diff = g - &d;
        if diff.is_integer() && diff.to_integer() % 2 == 0.into() {
            under = Some(g.clone());
        } else {
            bar = Some(g + Rational::from_integer(1.into()));
        }
    }
    let (Some(delta_bar), Some(delta_under)) = (bar, under) else {
        return Err(Error::InvalidComplex("cone towers have the same parity".into()));
    };
    cross_check(c, &cone)?;
    Ok(BranchedHomology { module, delta_bar, delta_under })
}

/// Grading-wise `Ker(1+J)[-1] + Coker(1+J)` on homology must match the cone.
fn cross_check(c: &UComplex, cone: &UComplex) -> Result<()> {
    let n = c.rank();
    let one_plus = c.iota.add(&F2Mat::identity(n));
    let h = Graded::new(&c.gr, &c.d);
    let hc = Graded::new(&cone.gr, &cone.d);
    for g in h.min() - 4..=h.max() + 1 {
        let coker = h.dim(g + 1) - h.map_rank(&one_plus, g + 1);
        let ker = h.dim(g) - h.map_rank(&one_plus, g);
        if hc.dim(g) != coker + ker {
            return Err(Error::Consistency(format!("cone homology disagrees with Ker/Coker(1+J) in grading {g}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_int;

    #[test]
    fn identity_involution_doubles_the_tower() {
        let b = branched_homology(&UComplex::trivial(rat_int(0))).unwrap();
        assert_eq!(b.module.towers, vec![rat_int(0), rat_int(-1)]);
        assert_eq!((b.delta_bar, b.delta_under), (rat_int(0), rat_int(0)));
    }

    #[test]
    fn c_zero_splits_the_invariants() {
        let b = branched_homology(&UComplex::c_r(rat_int(0))).unwrap();
        assert_eq!(b.delta_bar, rat_int(0));
        assert_eq!(b.delta_under, rat_int(-2));
        assert_eq!(b.module.towers.len(), 2);
        assert_eq!(b.module.torsion.len(), 1);
    }

    #[test]
    fn trivial_iota_on_c_zero() {
        let c = UComplex::c_r(rat_int(0));
        let c = c.with_iota(F2Mat::identity(3)).unwrap();
        let b = branched_homology(&c).unwrap();
        assert_eq!(b.module.towers, vec![rat_int(0), rat_int(-1)]);
        assert_eq!(b.module.torsion, vec![(rat_int(-1), 1), (rat_int(0), 1)]);
        assert_eq!((b.delta_bar, b.delta_under), (rat_int(0), rat_int(0)));
    }
}
