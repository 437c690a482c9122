//! The model complex of a graded root and the lift of its involution.

use std::collections::HashMap;

use super::{F2Mat, UComplex};
use crate::error::{Error, Result};
use crate::root::GradedRoot;

/// Leaves in depth-first order are the even generators; the angle between
/// consecutive leaves `l, l'` meeting at `m` has grading `w(m) + 1` and
/// `d(angle) = U^{(w(l)-w(m))/2} l + U^{(w(l')-w(m))/2} l'`.
pub fn model_complex(root: &GradedRoot) -> Result<UComplex> {
    root.require_stable()?;
    let leaves = root.leaves_dfs();
    let l = leaves.len();
    let mut gr: Vec<i64> = leaves.iter().map(|&v| -2 * root.level(v)).collect();
    let mut names: Vec<String> = (0..l).map(|i| format!("v{i}")).collect();
    let mut entries = Vec::new();
    for i in 0..l.saturating_sub(1) {
        let m = root.meet(leaves[i], leaves[i + 1]);
        gr.push(-2 * root.level(m) + 1);
        names.push(format!("a{i}"));
        entries.push((i, l + i));
        entries.push((i + 1, l + i));
    }
    let n = gr.len();
    UComplex::without_involution(root.base_weight().clone(), gr, F2Mat::from_entries(n, n, &entries), names)
}

/// Lifts the root involution: leaves are permuted, and an angle goes to the
/// sum of angles spanning the image leaves, with the `U`-powers that make the
/// result a chain map.
pub fn lift_involution(root: &GradedRoot, c: &UComplex) -> Result<UComplex> {
    let j = root
        .involution()
        .ok_or_else(|| Error::InvalidComplex("root carries no involution".into()))?;
    let leaves = root.leaves_dfs();
    let l = leaves.len();
    if c.rank() != 2 * l - 1 {
        return Err(Error::InvalidComplex("complex is not the model of this root".into()));
    }
    let pos: HashMap<usize, usize> = leaves.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = c.rank();
    let mut iota = F2Mat::zeros(n, n);
    for (i, &v) in leaves.iter().enumerate() {
        let image = *pos.get(&j[v]).ok_or_else(|| Error::InvalidComplex("involution does not fix the leaf set".into()))?;
        iota.set(image, i, true);
    }
    for i in 0..l.saturating_sub(1) {
        let p = pos[&j[leaves[i]]];
        let q = pos[&j[leaves[i + 1]]];
        for k in p.min(q)..p.max(q) {
            iota.flip(l + k, l + i);
        }
    }
    let lifted = c.with_iota(iota)?;
    lifted.check_iota_squared()?;
    Ok(lifted)
}

/// Model complex with the lifted involution when the root has one.
pub fn root_complex(root: &GradedRoot) -> Result<UComplex> {
    let c = model_complex(root)?;
    if root.involution().is_some() {
        lift_involution(root, &c)
    } else {
        Ok(c)
    }
}
