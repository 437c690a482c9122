//! From a knot expression to its invariant package.
//!
//! Leaves are built from the graded root of their plumbing, mirrors dualize
//! and sums tensor. Connected complexes travel alongside the full ones so
//! sums only ever tensor small complexes.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use rayon::prelude::*;

use super::goeritz::goeritz_oracle;
use super::presentation::{presentation, InvolutionKind, Presentation};
use super::spec::KnotSpec;
use crate::complex::{
    branched_homology, connected_complex, connected_homology, homology_with_margin, root_complex, GradedUModule,
    UComplex,
};
use crate::config::RunConfig;
use crate::connected::{monotone_subroot, omega};
use crate::error::{Error, Result};
use crate::linalg::{rat_int, Rational};
use crate::plumbing::{canonical_char, self_conjugate_char, CharVector, PlumbingTree};
use crate::root::{
    build_root_box, build_root_star, build_root_star_with, fmt_rational, graph_involution, lattice_involution,
    rational_json, GradedRoot, Symmetry,
};

type RootKey = (String, Vec<i64>, InvolutionKind, Option<i64>, Option<i64>);

fn root_cache() -> &'static Mutex<HashMap<RootKey, GradedRoot>> {
    static CACHE: OnceLock<Mutex<HashMap<RootKey, GradedRoot>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Graded root of a presentation with the covering involution attached.
pub fn presentation_root(pres: &Presentation, config: &RunConfig) -> Result<GradedRoot> {
    plumbing_root(&pres.tree, &pres.k, pres.involution, config)
}

/// Root of a bare plumbing tree: the graph involution when the tree carries
/// an automorphism, the lattice involution otherwise.
pub fn tree_root(t: &PlumbingTree, config: &RunConfig) -> Result<GradedRoot> {
    t.require_negative_definite()?;
    match t.automorphism() {
        Some(_) => plumbing_root(t, &canonical_char(t), InvolutionKind::Graph, config),
        None => plumbing_root(t, &self_conjugate_char(t, &canonical_char(t))?, InvolutionKind::Lattice, config),
    }
}

pub fn plumbing_root(t: &PlumbingTree, k: &CharVector, kind: InvolutionKind, config: &RunConfig) -> Result<GradedRoot> {
    let key = (t.to_json(), k.values().to_vec(), kind, config.n_max, config.box_radius);
    if let Some(r) = root_cache().lock().expect("root cache").get(&key) {
        return Ok(r.clone());
    }
    let plain = match config.box_radius {
        Some(_) => build_root_box(t, k, config.n_max, config.box_radius)?,
        None => match build_root_star_with(t, k, config.n_max, Symmetry::None) {
            Err(Error::NotStarShaped) => build_root_box(t, k, config.n_max, None)?,
            r => r?,
        },
    };
    plain.require_stable()?;
    let root = match kind {
        InvolutionKind::Lattice => lattice_involution(t, k, &plain)?,
        InvolutionKind::Graph => graph_involution(t, k, &plain)?,
        InvolutionKind::Trivial => {
            let n = plain.len();
            plain.with_involution((0..n).collect())?
        }
    };
    root_cache().lock().expect("root cache").insert(key, root.clone());
    Ok(root)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.into(), passed, detail }
    }
}

/// Complexes of a (possibly composite) knot.
#[derive(Clone, Debug)]
pub struct Evaluated {
    /// The whole complex, unless a sum outgrew the rank cap.
    pub full: Option<UComplex>,
    pub conn: UComplex,
    pub det: BigInt,
    pub signature: Option<i64>,
    pub checks: Vec<Check>,
}

fn leaf(spec: &KnotSpec, pres: &Presentation, config: &RunConfig) -> Result<Evaluated> {
    let root = presentation_root(pres, config)?;
    let mut full = root_complex(&root)?;
    let sub = monotone_subroot(&root)?;
    let mut conn = root_complex(&sub.root)?;
    let mut checks = Vec::new();
    let signature = match spec {
        KnotSpec::Pretzel(a) => Some(goeritz_oracle(a)?),
        _ => None,
    };
    if config.verify {
        checks.extend(leaf_checks(spec, pres, &root, &full, &conn, signature.as_ref(), config)?);
    }
    if pres.mirrored {
        full = full.dual();
        conn = conn.dual();
    }
    Ok(Evaluated { full: Some(full), conn, det: pres.determinant(), signature: signature.map(|s| s.1), checks })
}

fn leaf_checks(
    spec: &KnotSpec,
    pres: &Presentation,
    root: &GradedRoot,
    full: &UComplex,
    conn: &UComplex,
    goeritz: Option<&(BigInt, i64)>,
    config: &RunConfig,
) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let h = homology_with_margin(full, config.margin)?;
    let d = h.tower_degree()?;
    out.push(Check::new(
        "tower equals d-invariant",
        d == root.d_invariant(),
        format!("{spec}: tower {} vs root {}", fmt_rational(&d), fmt_rational(&root.d_invariant())),
    ));
    let hc = homology_with_margin(conn, config.margin)?;
    if full.rank() <= config.rank_bound {
        let brute = connected_homology(full, config.rank_bound)?;
        out.push(Check::new("monotone subroot matches maximal search", brute == hc, format!("{spec}: {brute} vs {hc}")));
    }
    if pres.tree.len() <= 6 && config.box_radius.is_none() {
        let b = build_root_box(&pres.tree, &pres.k, config.n_max, None)?;
        let s = build_root_star(&pres.tree, &pres.k)?;
        out.push(Check::new("box and star engines agree", b.shape() == s.shape(), format!("{spec}")));
    }
    if let Some((det, sigma)) = goeritz {
        out.push(Check::new("determinant matches Goeritz", *det == pres.determinant(), format!("{spec}: {det}")));
        let b = branched_homology(conn)?;
        // the identity lives on the definite side, so mirror the oracle's value
        let sigma = if pres.mirrored { -sigma } else { *sigma };
        let expect = Rational::new(BigInt::from(-sigma), BigInt::from(4));
        out.push(Check::new(
            "lower invariant equals -sigma/4 on the definite side",
            b.delta_under == expect,
            format!("{spec}: {} vs {}", fmt_rational(&b.delta_under), fmt_rational(&expect)),
        ));
        out.push(Check::new("upper invariant equals d on the definite side", b.delta_bar == d, format!("{spec}")));
    }
    Ok(out)
}

/// Tensor of connected complexes, reduced to a connected complex again.
fn connected_sum(a: &UComplex, b: &UComplex, config: &RunConfig) -> Result<UComplex> {
    let t = a.tensor(b);
    if a.rank() == 1 || b.rank() == 1 {
        return Ok(t);
    }
    connected_complex(&t, config.rank_bound)
}

pub fn evaluate(spec: &KnotSpec, config: &RunConfig) -> Result<Evaluated> {
    match spec {
        KnotSpec::Mirror(k) => {
            let e = evaluate(k, config)?;
            Ok(Evaluated {
                full: e.full.map(|c| c.dual()),
                conn: e.conn.dual(),
                det: e.det,
                signature: e.signature.map(|s| -s),
                checks: e.checks,
            })
        }
        KnotSpec::Sum(ks) => {
            let parts: Vec<Evaluated> = ks.par_iter().map(|k| evaluate(k, config)).collect::<Result<_>>()?;
            let mut it = parts.into_iter();
            let mut acc = it.next().ok_or_else(|| Error::InvalidKnot("empty sum".into()))?;
            for e in it {
                acc.full = match (acc.full, e.full) {
                    (Some(a), Some(b)) if a.rank() * b.rank() <= config.full_rank_cap => Some(a.tensor(&b)),
                    _ => None,
                };
                acc.conn = connected_sum(&acc.conn, &e.conn, config)?;
                acc.det *= e.det;
                acc.signature = acc.signature.zip(e.signature).map(|(a, b)| a + b);
                acc.checks.extend(e.checks);
            }
            Ok(acc)
        }
        _ => {
            let pres = presentation(spec)?.expect("leaf constructor");
            leaf(spec, &pres, config)
        }
    }
}

/// Every reported module uses the `HF^-(S^3) = F[U]_(-2)` normalization.
fn reported(m: &GradedUModule) -> GradedUModule {
    m.shifted(&rat_int(-2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPackage {
    pub spec: String,
    pub delta: Rational,
    pub delta_bar: Rational,
    pub delta_under: Rational,
    pub hf: Option<GradedUModule>,
    pub hfb: Option<GradedUModule>,
    pub hfb_conn: GradedUModule,
    pub hfb_red_conn: GradedUModule,
    pub omega: u32,
    pub det: BigInt,
    pub signature: Option<i64>,
    pub checks: Vec<Check>,
}

impl InvariantPackage {
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let module = |m: &Option<GradedUModule>| m.as_ref().map_or(serde_json::Value::Null, |m| m.to_json_value());
        let det = self.det.to_string().parse::<i64>().map_or(serde_json::json!(self.det.to_string()), |d| serde_json::json!(d));
        let mut v = serde_json::json!({
            "schema": 1,
            "spec": self.spec,
            "delta": rational_json(&self.delta),
            "delta_bar": rational_json(&self.delta_bar),
            "delta_under": rational_json(&self.delta_under),
            "hf": module(&self.hf),
            "hfb": module(&self.hfb),
            "hfb_conn": self.hfb_conn.to_json_value(),
            "red_conn": self.hfb_red_conn.to_json_value()["torsion"].clone(),
            "omega": self.omega,
            "det": det,
            "signature": self.signature,
        });
        if !self.checks.is_empty() {
            v["checks"] = self
                .checks
                .iter()
                .map(|c| serde_json::json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                .collect();
        }
        v
    }
}

impl fmt::Display for InvariantPackage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |m: &Option<GradedUModule>| m.as_ref().map_or("(not computed)".to_string(), ToString::to_string);
        writeln!(f, "knot:        {}", self.spec)?;
        writeln!(f, "delta:       {}", fmt_rational(&self.delta))?;
        writeln!(f, "delta_bar:   {}", fmt_rational(&self.delta_bar))?;
        writeln!(f, "delta_under: {}", fmt_rational(&self.delta_under))?;
        writeln!(f, "HF^-:        {}", opt(&self.hf))?;
        writeln!(f, "HFB^-:       {}", opt(&self.hfb))?;
        writeln!(f, "HFB^-_conn:  {}", self.hfb_conn)?;
        writeln!(f, "red-conn:    {}", self.hfb_red_conn)?;
        writeln!(f, "omega:       {}", self.omega)?;
        write!(f, "det:         {}", self.det)?;
        if let Some(s) = self.signature {
            write!(f, "\nsignature:   {s}")?;
        }
        for c in &self.checks {
            write!(f, "\ncheck {}: {} ({})", if c.passed { "ok" } else { "FAILED" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

pub fn invariants(spec: &KnotSpec, config: &RunConfig) -> Result<InvariantPackage> {
    config.validate()?;
    let e = evaluate(spec, config)?;
    let hc = homology_with_margin(&e.conn, config.margin)?;
    let delta = hc.tower_degree()?;
    let b = branched_homology(&e.conn)?;
    let hf = e.full.as_ref().map(|c| homology_with_margin(c, config.margin)).transpose()?;
    let hfb = e.full.as_ref().map(branched_homology).transpose()?.map(|b| reported(&b.module));
    let mut checks = e.checks;
    if config.verify {
        checks.push(Check::new(
            "lower <= d <= upper",
            b.delta_under <= delta && delta <= b.delta_bar,
            format!("{} <= {} <= {}", fmt_rational(&b.delta_under), fmt_rational(&delta), fmt_rational(&b.delta_bar)),
        ));
        let two = rat_int(2);
        let even = |a: &Rational, b: &Rational| {
            let q = (a - b) / &two;
            q.is_integer()
        };
        checks.push(Check::new(
            "differences are even",
            even(&delta, &b.delta_under) && even(&b.delta_bar, &delta),
            String::new(),
        ));
        let vanishes = hc.is_torsion_free();
        let equal = b.delta_under == delta && b.delta_bar == delta;
        checks.push(Check::new("reduced part vanishes iff invariants agree", vanishes == equal, String::new()));
    }
    let hfb_conn = reported(&hc);
    let red = hfb_conn.reduced();
    Ok(InvariantPackage {
        spec: spec.to_string(),
        delta,
        delta_bar: b.delta_bar,
        delta_under: b.delta_under,
        hf: hf.map(|m| reported(&m)),
        hfb,
        omega: omega(&red),
        hfb_conn,
        hfb_red_conn: red,
        det: e.det,
        signature: e.signature,
        checks,
    })
}

/// `invariants` for many knots at once, in input order.
pub fn invariants_many(specs: &[KnotSpec], config: &RunConfig) -> Vec<Result<InvariantPackage>> {
    specs.par_iter().map(|s| invariants(s, config)).collect()
}
