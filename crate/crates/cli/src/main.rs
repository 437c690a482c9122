//! `hfb`: batch computation of branched and connected invariants of
//! arborescent knots, and graded-root export.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hfb_core::config::{RunConfig, DEFAULT_FULL_RANK_CAP};
use hfb_core::knots::{independence, invariants_many, presentation, presentation_root, tree_root, KnotSpec};
use hfb_core::plumbing::PlumbingTree;
use hfb_core::root::GradedRoot;
use hfb_core::Error;

/// Directory for cached JSON results.
const CACHE_ENV: &str = "HFB_CACHE_DIR";

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DEFINITE: u8 = 3;
const EXIT_UNSTABLE: u8 = 4;
const EXIT_CHECK: u8 = 5;

#[derive(Parser)]
#[command(name = "hfb", version, about = "Branched and connected Floer invariants of arborescent knots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Force the truncation level of graded roots.
    #[arg(long, global = true)]
    n_max: Option<i64>,
    /// Use the box engine with this clip radius.
    #[arg(long = "box", global = true, value_name = "RADIUS")]
    box_radius: Option<i64>,
    /// Largest rank searched for self-local equivalences.
    #[arg(long, global = true, default_value_t = hfb_core::complex::DEFAULT_RANK_BOUND)]
    rank_bound: usize,
    /// Extra U-powers checked when reading off homology.
    #[arg(long, global = true, default_value_t = 2)]
    margin: i64,
    /// Largest full tensor product computed for sums.
    #[arg(long, global = true, default_value_t = DEFAULT_FULL_RANK_CAP)]
    full_rank_cap: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Run cross-oracle checks inline.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant package of each knot; reads one spec per line from stdin
    /// when none are given.
    Invariants { specs: Vec<String> },
    /// Graded root of a leaf knot, or of plumbing JSON read from stdin.
    Root {
        /// Knot spec; omit or pass `-` to read plumbing JSON from stdin.
        input: Option<String>,
    },
    /// Omega of each knot and of pairwise sums, with an independence verdict.
    Independence { specs: Vec<String> },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::InvalidKnot(_) => EXIT_PARSE,
            Error::NotNegativeDefinite => EXIT_DEFINITE,
            Error::Unstable(_) | Error::TruncationUnstable => EXIT_UNSTABLE,
            _ => EXIT_OTHER,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: &str) -> Failure {
    Failure { code: EXIT_PARSE, message: message.into() }
}

fn config(o: &Opts) -> RunConfig {
    RunConfig {
        n_max: o.n_max,
        box_radius: o.box_radius,
        rank_bound: o.rank_bound,
        margin: o.margin,
        full_rank_cap: o.full_rank_cap,
        workers: o.workers,
        verify: o.verify,
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s).map_err(|e| Failure { code: EXIT_OTHER, message: e.to_string() })?;
    Ok(s)
}

fn parse_specs(specs: Vec<String>) -> Result<Vec<KnotSpec>, Failure> {
    let texts = if specs.is_empty() {
        read_stdin()?.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()
    } else {
        specs
    };
    if texts.is_empty() {
        return Err(usage("no knot specs given"));
    }
    texts.iter().map(|s| KnotSpec::parse(s).map_err(Failure::from)).collect()
}

fn to_json(v: &serde_json::Value) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn cache_file(spec: &KnotSpec, cfg: &RunConfig) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    let key = format!(
        "{spec}|{:?}|{:?}|{}|{}|{}|{}",
        cfg.n_max, cfg.box_radius, cfg.rank_bound, cfg.margin, cfg.full_rank_cap, cfg.verify
    );
    let name: String = key.bytes().map(|b| format!("{b:02x}")).collect();
    Some(PathBuf::from(dir).join(format!("{name}.json")))
}

fn cached(spec: &KnotSpec, cfg: &RunConfig) -> Option<serde_json::Value> {
    let text = std::fs::read_to_string(cache_file(spec, cfg)?).ok()?;
    serde_json::from_str(&text).ok()
}

fn store(spec: &KnotSpec, cfg: &RunConfig, v: &serde_json::Value) {
    if let Some(path) = cache_file(spec, cfg) {
        // a cache that cannot be written is only a missed speedup
        let _ = path.parent().map(std::fs::create_dir_all);
        let _ = std::fs::write(path, to_json(v));
    }
}

fn cmd_invariants(specs: Vec<String>, opts: &Opts) -> Result<String, Failure> {
    let specs = parse_specs(specs)?;
    let cfg = config(opts);
    match opts.format {
        Format::Dot => Err(usage("dot output is only available for `root`")),
        Format::Text => {
            let mut out = Vec::new();
            let mut failed = false;
            for p in invariants_many(&specs, &cfg) {
                let p = p?;
                failed |= !p.checks_passed();
                out.push(p.to_string());
            }
            finish(out.join("\n\n"), failed)
        }
        Format::Json => {
            let hits: Vec<Option<serde_json::Value>> = specs.iter().map(|s| cached(s, &cfg)).collect();
            let missing: Vec<KnotSpec> =
                specs.iter().zip(&hits).filter(|(_, h)| h.is_none()).map(|(s, _)| s.clone()).collect();
            let mut fresh = invariants_many(&missing, &cfg).into_iter();
            let mut out = Vec::new();
            let mut failed = false;
            for (spec, hit) in specs.iter().zip(hits) {
                let v = match hit {
                    Some(v) => v,
                    None => {
                        let p = fresh.next().expect("one result per missing spec")?;
                        let v = p.to_json_value();
                        store(spec, &cfg, &v);
                        v
                    }
                };
                failed |= v["checks"].as_array().is_some_and(|c| c.iter().any(|c| c["passed"] == false));
                out.push(v);
            }
            let v = if out.len() == 1 { out.pop().expect("one package") } else { serde_json::Value::Array(out) };
            finish(to_json(&v), failed)
        }
    }
}

fn finish(text: String, failed: bool) -> Result<String, Failure> {
    if failed {
        emit(&text);
        Err(Failure { code: EXIT_CHECK, message: "verification checks failed".into() })
    } else {
        Ok(text)
    }
}

fn cmd_root(input: Option<String>, opts: &Opts) -> Result<String, Failure> {
    let cfg = config(opts);
    let (root, mirrored): (GradedRoot, bool) = match input.as_deref() {
        None | Some("-") => (tree_root(&PlumbingTree::from_json(&read_stdin()?)?, &cfg)?, false),
        Some(text) => {
            let spec = KnotSpec::parse(text)?;
            let (leaf, mirrored) = strip_mirrors(&spec);
            let pres = presentation(leaf)?.ok_or_else(|| usage("`root` takes a single torus, pretzel or Montesinos knot"))?;
            (presentation_root(&pres, &cfg)?, mirrored ^ pres.mirrored)
        }
    };
    Ok(match opts.format {
        Format::Dot => root.render_dot(),
        Format::Text => format!("{}\nd = {}", root.shape(), hfb_core::root::fmt_rational(&root.d_invariant())),
        Format::Json => {
            let mut v = root.to_json_value();
            v["schema"] = 1.into();
            v["d_invariant"] = hfb_core::root::rational_json(&root.d_invariant());
            // the root always belongs to the negative definite side
            v["mirrored"] = mirrored.into();
            to_json(&v)
        }
    })
}

fn strip_mirrors(spec: &KnotSpec) -> (&KnotSpec, bool) {
    match spec {
        KnotSpec::Mirror(k) => {
            let (leaf, m) = strip_mirrors(k);
            (leaf, !m)
        }
        _ => (spec, false),
    }
}

fn cmd_independence(specs: Vec<String>, opts: &Opts) -> Result<String, Failure> {
    let specs = parse_specs(specs)?;
    let report = independence(&specs, &config(opts))?;
    match opts.format {
        Format::Json => Ok(to_json(&report.to_json_value())),
        Format::Text => Ok(report.to_string()),
        Format::Dot => Err(usage("dot output is only available for `root`")),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    config(&cli.opts).validate()?;
    if let Some(n) = cli.opts.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: EXIT_OTHER, message: e.to_string() })?;
    }
    match cli.command {
        Command::Invariants { specs } => cmd_invariants(specs, &cli.opts),
        Command::Root { input } => cmd_root(input, &cli.opts),
        Command::Independence { specs } => cmd_independence(specs, &cli.opts),
    }
}

fn emit(text: &str) {
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            emit(&text);
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
