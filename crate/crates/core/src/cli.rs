//! Command-line front end. Exit codes: 0 all proved, 1 verification failure,
//! 2 usage or configuration error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::hset::table::Prelude;
use crate::hset::CoverSettings;
use crate::integrator::Settings;
use crate::model::ModelParams;
use crate::proofs::{ProofSettings, Prover, RunStats, Verdict, THEOREMS};
use crate::scatter::{default_seeds, manifold_scatter, section_scatter, FloatMap};

pub const EXIT_PROVED: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hyperion", version, about = "Rigorous covering relations for the Hyperion rotation model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run proofs and write JSON certificates.
    Prove(ProveArgs),
    /// Orbits of the Poincare map as CSV (theta, phi, orbit_id); not rigorous.
    SectionScatter(ScatterArgs),
    /// Stable and unstable manifold fragments of a fixed point as CSV; not rigorous.
    ManifoldScatter(ManifoldArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Selector {
    All,
    FixedPoints,
    P1p2,
    P1p1,
    P2p2,
    P3p3,
    P1p3,
    P2p3,
}

impl Selector {
    fn theorems(self) -> Vec<&'static str> {
        match self {
            Selector::All => THEOREMS.to_vec(),
            Selector::FixedPoints => Vec::new(),
            Selector::P1p2 => vec!["p1p2"],
            Selector::P1p1 => vec!["p1p1"],
            Selector::P2p2 => vec!["p2p2"],
            Selector::P3p3 => vec!["p3p3"],
            Selector::P1p3 => vec!["p1p3"],
            Selector::P2p3 => vec!["p2p3"],
        }
    }

    fn fixed_points(self) -> bool {
        matches!(self, Selector::All | Selector::FixedPoints)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Parameter overrides, e.g. `e=0.1,omega2=0.79`.
    #[arg(long, env = "HYPERION_PARAMS", default_value = "")]
    pub params: String,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams, String> {
        ModelParams::parse_overrides(&self.params).map_err(|e| format!("--params: {e}"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProveArgs {
    #[arg(long, value_enum, env = "HYPERION_THEOREM", default_value = "all")]
    pub theorem: Selector,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Taylor order of the integrator.
    #[arg(long, env = "HYPERION_ORDER")]
    pub order: Option<usize>,
    /// Bound on the local remainder of an accepted step.
    #[arg(long, env = "HYPERION_TOL")]
    pub tol: Option<f64>,
    /// Bisection depth cap of the covering checks.
    #[arg(long, env = "HYPERION_SUBDIV_DEPTH")]
    pub subdiv_depth: Option<u32>,
    /// Directory for certificates.
    #[arg(long, env = "HYPERION_OUT", default_value = "certificates")]
    pub out: PathBuf,
    /// Worker threads (wall time only; results do not depend on it).
    #[arg(long, env = "HYPERION_THREADS")]
    pub threads: Option<usize>,
    /// Also rerun each theorem with boxes inflated by 20% (informational).
    #[arg(long)]
    pub robustness: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScatterArgs {
    #[arg(long, default_value_t = 12)]
    pub orbits: usize,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    /// Seeds `theta:phi` separated by commas; `phi` alone means theta = pi/2.
    #[arg(long)]
    pub seeds: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ManifoldArgs {
    #[arg(long, default_value = "P3")]
    pub point: String,
    /// Half-length of the initial segment along each eigenvector.
    #[arg(long, default_value_t = 1e-4)]
    pub length: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 6)]
    pub iters: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Timing record written next to the certificates.
#[derive(Debug, Serialize)]
struct Timing<'a> {
    id: &'a str,
    verdict: Verdict,
    #[serde(flatten)]
    stats: &'a RunStats,
}

fn settings_of(a: &ProveArgs) -> Result<ProofSettings, String> {
    let mut integrator = Settings::default();
    if let Some(o) = a.order {
        if !(2..=60).contains(&o) {
            return Err(format!("--order {o} is outside 2..=60"));
        }
        integrator.order = o;
    }
    if let Some(t) = a.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(format!("--tol {t} must be positive"));
        }
        integrator.tol = t;
    }
    let mut cover = CoverSettings::default();
    if let Some(d) = a.subdiv_depth {
        if d > 30 {
            return Err(format!("--subdiv-depth {d} exceeds 30"));
        }
        cover.max_depth = d;
        integrator.max_subdiv_depth = d;
    }
    Ok(ProofSettings {
        params: a.model.params()?,
        integrator,
        cover,
    })
}

fn write_json<T: Serialize>(dir: &Path, name: &str, v: &T) -> io::Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(io::Error::other)?;
    s.push('\n');
    fs::write(dir.join(name), s)
}

/// `prove`: returns the exit code.
pub fn cmd_prove(a: &ProveArgs, out: &mut dyn Write) -> Result<i32, String> {
    let settings = settings_of(a)?;
    if let Some(n) = a.threads {
        // Fails harmlessly if a pool already exists (repeated calls in tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    fs::create_dir_all(&a.out).map_err(|e| format!("{}: {e}", a.out.display()))?;
    let io = |e: io::Error| e.to_string();
    let prover = Prover::new(settings).map_err(|e| e.to_string())?;
    let mut all_ok = true;
    let mut timings = Vec::new();

    let fixed = a.theorem.fixed_points().then(|| prover.prove_fixed_points());
    if let Some(f) = fixed {
        write_json(&a.out, "fixed-points.json", f).map_err(io)?;
        for p in &f.points {
            let phi = p
                .proof
                .as_ref()
                .and_then(|q| q.axis_phi)
                .map_or("-".to_string(), |x| x.to_string());
            writeln!(
                out,
                "{}: phi in {phi} (table {}): inside {}, hyperbolic {}, eigenvectors meet {} {}",
                p.name, p.table_phi, p.within_table, p.hyperbolic, p.frame, p.eigenvectors_match
            )
            .map_err(io)?;
            for d in &p.diagnostics {
                writeln!(out, "  {d}").map_err(io)?;
            }
        }
        writeln!(out, "fixed-points: {:?}", f.verdict).map_err(io)?;
        all_ok &= f.verdict == Verdict::Proved;
        timings.push(serde_json::to_value(Timing { id: "fixed-points", verdict: f.verdict, stats: &f.stats }).map_err(|e| e.to_string())?);
    }

    let ids = a.theorem.theorems();
    let reports = prover.prove_many(&ids);
    for (id, r) in ids.iter().zip(&reports) {
        let r = r.as_ref().ok_or_else(|| format!("unknown theorem {id}"))?;
        write_json(&a.out, &format!("{id}.json"), r).map_err(io)?;
        writeln!(out, "{id}: {:?} ({} relations, {:.1} s)", r.verdict, r.certificates.len(), r.stats.wall_seconds)
            .map_err(io)?;
        if let Some(first) = r.failures.first() {
            writeln!(out, "  first failure: {first}").map_err(io)?;
        }
        if let Some(s) = &r.symbolic {
            writeln!(
                out,
                "  symbolic dynamics in {} and {} for P^{}: {}",
                s.symbols[0], s.symbols[1], s.power, s.holds
            )
            .map_err(io)?;
        }
        all_ok &= r.verdict == Verdict::Proved;
        timings.push(serde_json::to_value(Timing { id, verdict: r.verdict, stats: &r.stats }).map_err(|e| e.to_string())?);
        if a.robustness {
            if let Some(rb) = prover.robustness(id, "1.2") {
                writeln!(out, "  boxes x1.2: {:?}", rb.verdict).map_err(io)?;
                write_json(&a.out, &format!("{id}-robustness.json"), &rb).map_err(io)?;
            }
        }
    }
    write_json(&a.out, "timings.json", &timings).map_err(io)?;
    Ok(if all_ok { EXIT_PROVED } else { EXIT_FAILED })
}

fn parse_seeds(s: &str) -> Result<Vec<[f64; 2]>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad seed {t}"));
            match t.split_once(':') {
                Some((th, ph)) => Ok([num(th)?, num(ph)?]),
                None => Ok([std::f64::consts::FRAC_PI_2, num(t)?]),
            }
        })
        .collect()
}

fn sink(path: &Option<PathBuf>, out: &mut dyn Write, body: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| format!("{}: {e}", p.display())),
        None => out.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    }
}

pub fn cmd_section_scatter(a: &ScatterArgs, out: &mut dyn Write) -> Result<i32, String> {
    let params = a.model.params()?;
    let seeds = match &a.seeds {
        Some(s) => parse_seeds(s)?,
        None => default_seeds(a.orbits),
    };
    let pts = section_scatter(&FloatMap::new(&params), &seeds, a.iters);
    let mut body = String::from("theta,phi,orbit_id\n");
    for p in pts {
        body.push_str(&format!("{},{},{}\n", p.theta, p.phi, p.orbit));
    }
    sink(&a.out, out, &body)?;
    Ok(EXIT_PROVED)
}

pub fn cmd_manifold_scatter(a: &ManifoldArgs, out: &mut dyn Write) -> Result<i32, String> {
    let params = a.model.params()?;
    let prelude = Prelude::builtin();
    let pt = prelude
        .points
        .get(&a.point)
        .ok_or_else(|| format!("unknown point {}; expected one of P1, P2, P3", a.point))?;
    if !(a.length >= 0.0 && a.length.is_finite()) {
        return Err(format!("--length {} must be non-negative", a.length));
    }
    let p = [
        pt.base.theta.interval().mid(),
        pt.base.phi.parse::<f64>().map_err(|e| e.to_string())?,
    ];
    let pts = manifold_scatter(&FloatMap::new(&params), p, a.length, a.points, a.iters)
        .ok_or_else(|| format!("{} is not a saddle for these parameters", a.point))?;
    let mut body = String::from("branch,iterate,index,theta,phi\n");
    for q in pts {
        body.push_str(&format!("{},{},{},{},{}\n", q.branch.as_str(), q.iterate, q.index, q.theta, q.phi));
    }
    sink(&a.out, out, &body)?;
    Ok(EXIT_PROVED)
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_PROVED;
        }
    };
    let res = match &cli.command {
        Command::Prove(a) => cmd_prove(a, out),
        Command::SectionScatter(a) => cmd_section_scatter(a, out),
        Command::ManifoldScatter(a) => cmd_manifold_scatter(a, out),
    };
    match res {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}
