//! Determinant and signature of a pretzel knot from its standard diagram,
//! independent of any plumbing.
//!
//! Column `i` carries `a_i` half twists between white regions `R_{i-1}` and
//! `R_i` (cyclically). The Goeritz matrix is the reduced Laplacian of this
//! weighted cycle, and crossings in columns whose two strands run the same
//! way are the ones needing the Gordon-Litherland correction.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::linalg::{signature, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Corner {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

/// Traces the diagram. Returns, per column, whether the strands entering at
/// the top left and top right both run downward or both upward.
pub fn parallel_columns(a: &[i64]) -> Result<Vec<bool>> {
    let k = a.len();
    if k < 2 || a.contains(&0) {
        return Err(Error::InvalidKnot("pretzel needs at least two nonzero columns".into()));
    }
    // downward[i][s]: direction of the strand through top corner s of column i
    let mut downward: Vec<[Option<bool>; 2]> = vec![[None, None]; k];
    let (mut col, mut corner) = (0usize, Corner::TopLeft);
    let mut visited = 0;
    loop {
        // traverse column `col` entering at `corner`
        let odd = a[col].rem_euclid(2) == 1;
        let (top_slot, exit, down) = match corner {
            Corner::TopLeft => (0, if odd { Corner::BottomRight } else { Corner::BottomLeft }, true),
            Corner::TopRight => (1, if odd { Corner::BottomLeft } else { Corner::BottomRight }, true),
            Corner::BottomLeft => (if odd { 1 } else { 0 }, if odd { Corner::TopRight } else { Corner::TopLeft }, false),
            Corner::BottomRight => (if odd { 0 } else { 1 }, if odd { Corner::TopLeft } else { Corner::TopRight }, false),
        };
        if downward[col][top_slot].is_some() {
            break;
        }
        downward[col][top_slot] = Some(down);
        visited += 1;
        // follow the arc leaving the exit corner
        (col, corner) = match exit {
            Corner::TopRight => ((col + 1) % k, Corner::TopLeft),
            Corner::TopLeft => ((col + k - 1) % k, Corner::TopRight),
            Corner::BottomRight => ((col + 1) % k, Corner::BottomLeft),
            Corner::BottomLeft => ((col + k - 1) % k, Corner::BottomRight),
        };
    }
    if visited != 2 * k {
        return Err(Error::InvalidKnot("pretzel diagram is a link".into()));
    }
    Ok(downward.iter().map(|d| d[0] == d[1]).collect())
}

/// `|sum_i prod_{j != i} a_j|`.
pub fn pretzel_determinant(a: &[i64]) -> BigInt {
    let total: BigInt = (0..a.len())
        .map(|i| a.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| BigInt::from(x)).product::<BigInt>())
        .sum();
    total.abs()
}

/// `(det, sigma)` with the convention that positive knots have negative
/// signature; `P(-2,3,7)` is positive.
pub fn goeritz_oracle(a: &[i64]) -> Result<(BigInt, i64)> {
    let parallel = parallel_columns(a)?;
    let k = a.len();
    // regions R_0..R_{k-1}; column i joins R_{(i+k-1)%k} and R_i; drop R_{k-1}
    let n = k - 1;
    let mut g = IntMatrix::zeros(n, n);
    for (i, &w) in a.iter().enumerate() {
        let (p, q) = ((i + k - 1) % k, i);
        for (x, y, s) in [(p, p, 1), (q, q, 1), (p, q, -1), (q, p, -1)] {
            if x < n && y < n {
                let cur = g.get(x, y).clone();
                g.set(x, y, cur + BigInt::from(s * w));
            }
        }
    }
    let det = crate::linalg::determinant(&g)?.abs();
    if det.clone() % 2u32 == BigInt::from(0) {
        return Err(Error::InvalidKnot("even determinant".into()));
    }
    let correction: i64 = a.iter().zip(&parallel).filter(|(_, &p)| p).map(|(&x, _)| x).sum();
    Ok((det, signature(&g)? - correction))
}
