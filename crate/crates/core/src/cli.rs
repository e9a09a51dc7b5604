//! Command-line front end: flat JSON configuration, dispatch to the
//! experiment drivers, and report persistence.
//!
//! Exit status is 0 when every verdict passes, 2 when a verdict fails and 1
//! for any input error (the message names the offending key).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::estimates::{decay_sweep, DecaySetup};
use crate::evolution::{apriori_experiment, bona_smith_tail, convergence_experiment, solve_ivp, SolverConfig};
use crate::experiments::{
    cor33_ensemble, energy_experiment, kato_ponce_ensemble, leibniz_ensemble, lp_check, oscillatory_sweep,
    refined_ensemble, smooth_data, strichartz_ensemble, uniqueness_pair,
};
use crate::illposedness::{growth_fit, QuadPanels};
use crate::report::{emit_plotdata, fmt_short, NormReport, PlotKind, Verdict};
use crate::spectral::{s_alpha, write_snapshot, GridSpec, SobolevIndex};
use crate::synth::synthetic_hs;

/// Seed used when the configuration does not name one.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Simulate,
    Decay,
    Strichartz,
    Cor33,
    Refined,
    Illposed,
    Energy,
    Apriori,
    Uniqueness,
    BonaSmith,
    Convergence,
    LpCheck,
    KatoPonce,
    Leibniz,
    Oscillatory,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Decay => "decay",
            Kind::Strichartz => "strichartz",
            Kind::Cor33 => "cor33",
            Kind::Refined => "refined",
            Kind::Illposed => "illposed",
            Kind::Energy => "energy",
            Kind::Apriori => "apriori",
            Kind::Uniqueness => "uniqueness",
            Kind::BonaSmith => "bona-smith",
            Kind::Convergence => "convergence",
            Kind::LpCheck => "lp-check",
            Kind::KatoPonce => "kato-ponce",
            Kind::Leibniz => "leibniz",
            Kind::Oscillatory => "oscillatory",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::value_variants().iter().copied().find(|k| k.name() == name)
    }

    /// Keys this experiment reads, besides `experiment`, `seed` and `out`.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::Simulate => &[
                "nx", "ny", "lx", "ly", "alpha", "s", "T", "dt", "k_width", "amplitude", "nonlinear", "snapshots",
            ],
            Kind::Decay => &["alpha", "samples"],
            Kind::Strichartz => &["nx", "ny", "lx", "ly", "alpha", "q", "T", "samples", "draws"],
            Kind::Cor33 | Kind::Refined => &["nx", "ny", "lx", "ly", "alpha", "delta", "T", "samples", "draws"],
            Kind::Illposed => &["alpha", "eps", "s", "t", "n_ladder", "outer_panels", "inner_panels"],
            Kind::Energy => &["nx", "ny", "lx", "ly", "alpha", "s", "T", "dt", "k_width", "amplitude"],
            Kind::Apriori => &["nx", "ny", "lx", "ly", "alpha", "s", "dt", "k_width", "amplitude", "a_values"],
            Kind::Uniqueness => &["nx", "ny", "lx", "ly", "alpha", "T", "dt", "k_width", "amplitude", "perturbation"],
            Kind::BonaSmith => &["nx", "ny", "lx", "ly", "s", "gamma", "sigmas", "n_ladder"],
            Kind::Convergence => &["nx", "ny", "lx", "ly", "alpha", "s", "gamma", "T", "dt", "n_ladder"],
            Kind::LpCheck => &["nx", "ny", "lx", "ly", "draws"],
            Kind::KatoPonce => &["nx", "ny", "lx", "ly", "s", "draws"],
            Kind::Leibniz => &["n", "length", "sigma", "draws"],
            Kind::Oscillatory => &["alpha", "lambda_min", "lambda_max", "lambda_points"],
        }
    }
}

/// Flat experiment configuration. Every field is optional and filled with a
/// per-experiment default; `seed` always has a value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Kind>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub lx: Option<f64>,
    pub ly: Option<f64>,
    pub alpha: Option<f64>,
    pub s: Option<f64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    /// Evaluation time of the ill-posedness quadrature.
    pub t: Option<f64>,
    pub dt: Option<f64>,
    pub n_ladder: Option<Vec<f64>>,
    pub draws: Option<usize>,
    pub samples: Option<usize>,
    pub q: Option<f64>,
    pub sigma: Option<f64>,
    pub n: Option<usize>,
    pub length: Option<f64>,
    pub k_width: Option<f64>,
    pub amplitude: Option<f64>,
    pub nonlinear: Option<bool>,
    pub snapshots: Option<bool>,
    pub a_values: Option<Vec<f64>>,
    pub perturbation: Option<f64>,
    pub gamma: Option<f64>,
    pub sigmas: Option<Vec<f64>>,
    pub outer_panels: Option<usize>,
    pub inner_panels: Option<usize>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_points: Option<usize>,
}

impl ExperimentConfig {
    /// Parses a configuration for `kind`. Rejects empty objects, keys the
    /// experiment does not read, and a mismatching `experiment` entry.
    pub fn parse(text: &str, kind: Kind) -> Result<Self> {
        let map: Map<String, Value> = serde_json::from_str(text)?;
        if map.is_empty() {
            return Err(Error::param("config", "configuration is empty"));
        }
        let cfg: Self = serde_json::from_value(Value::Object(map.clone()))?;
        if let Some(k) = cfg.experiment {
            if k != kind {
                return Err(Error::param(
                    "experiment",
                    format!("config names `{}` but `{}` was requested", k.name(), kind.name()),
                ));
            }
        }
        let allowed = kind.keys();
        for key in map.keys() {
            if !matches!(key.as_str(), "experiment" | "seed" | "out") && !allowed.contains(&key.as_str()) {
                return Err(Error::InvalidParameter {
                    name: "config",
                    reason: format!("key `{key}` does not apply to experiment `{}`", kind.name()),
                });
            }
        }
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn grid(&self, n: usize, l: f64) -> Result<GridSpec> {
        let nx = self.nx.unwrap_or(n);
        let ny = self.ny.unwrap_or(nx);
        let lx = self.lx.unwrap_or(l);
        let ly = self.ly.unwrap_or(lx);
        for (name, v) in [("nx", nx), ("ny", ny)] {
            if v < 4 || !v.is_power_of_two() {
                return Err(Error::param(name, format!("{v} must be a power of two >= 4")));
            }
        }
        for (name, v) in [("lx", lx), ("ly", ly)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("{v} must be positive")));
            }
        }
        GridSpec::new(nx, ny, lx, ly)
    }

    fn alpha(&self, default: f64) -> Result<f64> {
        let a = self.alpha.unwrap_or(default);
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::param("alpha", format!("{a} must lie in (0, 1]")));
        }
        Ok(a)
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(name, format!("{v} must be positive and finite")))
    }
}

fn ladder(name: &'static str, v: &[f64]) -> Result<Vec<f64>> {
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(name, "values must be positive and strictly increasing"));
    }
    Ok(v.to_vec())
}

/// Default ladder `10^3, 10^3.5, …, 10^5`.
fn default_n_ladder() -> Vec<f64> {
    (0..5).map(|i| 10f64.powf(3.0 + 0.5 * i as f64)).collect()
}

/// Report plus any snapshots to persist.
pub struct Outcome {
    pub report: NormReport,
    pub plot: Option<PlotKind>,
    /// `(file stem, field, t)`.
    pub snapshots: Vec<(String, crate::spectral::RealField, f64)>,
    pub alpha: f64,
}

impl Outcome {
    fn plain(report: NormReport) -> Self {
        Self {
            report,
            plot: None,
            snapshots: Vec::new(),
            alpha: f64::NAN,
        }
    }
}

/// Runs `kind` with `cfg`; no files are written.
pub fn run_experiment(kind: Kind, cfg: &ExperimentConfig) -> Result<Outcome> {
    let seed = cfg.seed();
    let two_pi = 2.0 * std::f64::consts::PI;
    let draws = cfg.draws.unwrap_or(crate::estimates::ensemble::MIN_DRAWS);
    let t_end = positive("T", cfg.t_end.unwrap_or(1.0))?;
    let mut out = match kind {
        Kind::Simulate => {
            let grid = cfg.grid(64, 16.0)?;
            let alpha = cfg.alpha(1.0)?;
            let dt = positive("dt", cfg.dt.unwrap_or(0.01))?;
            let u0 = smooth_data(grid, seed, positive("k_width", cfg.k_width.unwrap_or(1.0))?, cfg.amplitude.unwrap_or(0.5));
            let solver = SolverConfig {
                nonlinear: cfg.nonlinear.unwrap_or(true),
                sobolev: SobolevIndex::new(cfg.s.unwrap_or(s_alpha(alpha))),
                ..SolverConfig::default()
            };
            let traj = solve_ivp(&u0, alpha, t_end, dt, &solver)?;
            let mut rep = traj.report();
            let t = rep.column("t").unwrap_or_default();
            let mean = rep.column("mean").unwrap_or_default();
            let l2 = rep.column("l2").unwrap_or_default();
            let mean_drift = mean.iter().map(|m| (m - mean[0]).abs()).fold(0.0, f64::max);
            let l2_drift = l2.iter().map(|v| (v - l2[0]).abs()).fold(0.0, f64::max) / l2[0].max(f64::MIN_POSITIVE);
            rep.param("seed", seed);
            rep.fit("mean_drift", mean_drift);
            rep.fit("l2_relative_drift", l2_drift);
            rep.verdict(Verdict::new("time column increasing", "strict", t.len() as f64, t.windows(2).all(|w| w[1] > w[0])));
            rep.verdict(Verdict::below("mean drift", mean_drift, 1e-10 * mean[0].abs().max(1.0)));
            if solver.nonlinear {
                rep.verdict(Verdict::below("relative L2 drift", l2_drift, 1e-6));
            }
            let snapshots = if cfg.snapshots.unwrap_or(false) {
                traj.times
                    .iter()
                    .zip(&traj.fields)
                    .enumerate()
                    .map(|(i, (t, f))| (format!("snapshot_{i:04}"), f.to_real_unchecked(), *t))
                    .collect()
            } else {
                Vec::new()
            };
            Outcome {
                report: rep,
                plot: None,
                snapshots,
                alpha,
            }
        }
        Kind::Decay => {
            let alpha = cfg.alpha(0.5)?;
            let setup = DecaySetup::for_alpha(alpha)?;
            let mut rep = decay_sweep(&setup.data(), alpha, cfg.samples.unwrap_or(16))?;
            rep.param("k0", setup.k0).param("nx", setup.grid.nx).param("ny", setup.grid.ny);
            Outcome {
                plot: Some(PlotKind::Decay),
                ..Outcome::plain(rep)
            }
        }
        Kind::Strichartz => Outcome::plain(strichartz_ensemble(
            cfg.grid(64, two_pi)?,
            cfg.q.unwrap_or(4.0),
            cfg.alpha(0.5)?,
            t_end,
            cfg.samples.unwrap_or(64),
            draws,
            seed,
        )?),
        Kind::Cor33 => Outcome::plain(cor33_ensemble(
            cfg.grid(64, two_pi)?,
            cfg.delta.unwrap_or(0.25),
            cfg.alpha(0.5)?,
            t_end,
            cfg.samples.unwrap_or(64),
            draws,
            seed,
        )?),
        Kind::Refined => Outcome::plain(refined_ensemble(
            cfg.grid(64, two_pi)?,
            cfg.delta.unwrap_or(0.25),
            cfg.alpha(0.5)?,
            t_end,
            cfg.samples.unwrap_or(65),
            draws,
            seed,
        )?),
        Kind::Illposed => {
            let alpha = cfg.alpha(0.5)?;
            let quad = QuadPanels {
                outer: cfg.outer_panels.unwrap_or(QuadPanels::default().outer),
                inner: cfg.inner_panels.unwrap_or(QuadPanels::default().inner),
            };
            let ns = ladder("n_ladder", &cfg.n_ladder.clone().unwrap_or_else(default_n_ladder))?;
            let rep = growth_fit(
                alpha,
                cfg.eps.unwrap_or(0.05),
                cfg.s.unwrap_or(s_alpha(alpha)),
                positive("t", cfg.t.unwrap_or(0.75))?,
                &ns,
                quad,
            )?;
            Outcome {
                plot: Some(PlotKind::Growth),
                ..Outcome::plain(rep)
            }
        }
        Kind::Energy => {
            let grid = cfg.grid(128, 16.0)?;
            let alpha = cfg.alpha(0.5)?;
            let u0 = smooth_data(grid, seed, positive("k_width", cfg.k_width.unwrap_or(1.0))?, cfg.amplitude.unwrap_or(1.0));
            let s = SobolevIndex::new(cfg.s.unwrap_or(s_alpha(alpha)));
            Outcome::plain(energy_experiment(&u0, s, alpha, t_end, positive("dt", cfg.dt.unwrap_or(0.01))?)?)
        }
        Kind::Apriori => {
            let grid = cfg.grid(64, 16.0)?;
            let alpha = cfg.alpha(0.5)?;
            let u0 = smooth_data(grid, seed, positive("k_width", cfg.k_width.unwrap_or(1.0))?, cfg.amplitude.unwrap_or(1.0));
            let s = SobolevIndex::new(cfg.s.unwrap_or(s_alpha(alpha)));
            let a = cfg.a_values.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.0, 4.0]);
            Outcome::plain(apriori_experiment(&u0, &s, alpha, &a, positive("dt", cfg.dt.unwrap_or(0.005))?, &SolverConfig::default())?)
        }
        Kind::Uniqueness => {
            let grid = cfg.grid(64, 16.0)?;
            let alpha = cfg.alpha(0.5)?;
            let width = positive("k_width", cfg.k_width.unwrap_or(1.0))?;
            let u0 = smooth_data(grid, seed, width, cfg.amplitude.unwrap_or(1.0));
            let du = smooth_data(grid, seed.wrapping_add(1), width, cfg.perturbation.unwrap_or(1e-3));
            let dt = positive("dt", cfg.dt.unwrap_or(0.01))?;
            Outcome::plain(uniqueness_pair(&u0, &du, alpha, t_end, dt, &SolverConfig::default())?)
        }
        Kind::BonaSmith => {
            let grid = cfg.grid(256, two_pi)?;
            let s = positive("s", cfg.s.unwrap_or(1.5))?;
            let u0 = synthetic_hs(grid, seed, s, positive("gamma", cfg.gamma.unwrap_or(0.1))?);
            let ns = ladder("n_ladder", &cfg.n_ladder.clone().unwrap_or_else(|| vec![4.0, 8.0, 16.0, 32.0, 64.0]))?;
            Outcome::plain(bona_smith_tail(&u0, s, &cfg.sigmas.clone().unwrap_or_else(|| vec![0.0]), &ns)?)
        }
        Kind::Convergence => {
            let grid = cfg.grid(64, two_pi)?;
            let alpha = cfg.alpha(0.5)?;
            let s = SobolevIndex::new(cfg.s.unwrap_or(s_alpha(alpha)));
            let u0 = synthetic_hs(grid, seed, s.s, positive("gamma", cfg.gamma.unwrap_or(0.5))?).scaled(0.5);
            let ns = ladder("n_ladder", &cfg.n_ladder.clone().unwrap_or_else(|| vec![4.0, 8.0, 16.0, 32.0]))?;
            let rep = convergence_experiment(
                &u0,
                &s,
                alpha,
                positive("T", cfg.t_end.unwrap_or(0.1))?,
                positive("dt", cfg.dt.unwrap_or(0.002))?,
                &ns,
                &SolverConfig::default(),
            )?;
            Outcome {
                plot: Some(PlotKind::Convergence),
                ..Outcome::plain(rep)
            }
        }
        Kind::LpCheck => Outcome::plain(lp_check(cfg.grid(64, two_pi)?, draws, seed)?),
        Kind::KatoPonce => Outcome::plain(kato_ponce_ensemble(cfg.grid(64, two_pi)?, cfg.s.unwrap_or(2.0), draws, seed)?),
        Kind::Leibniz => Outcome::plain(leibniz_ensemble(
            cfg.n.unwrap_or(256),
            positive("length", cfg.length.unwrap_or(two_pi))?,
            cfg.sigma.unwrap_or(0.5),
            draws,
            seed,
        )?),
        Kind::Oscillatory => Outcome::plain(oscillatory_sweep(
            cfg.alpha(1.0)?,
            cfg.lambda_min.unwrap_or(-20.0),
            cfg.lambda_max.unwrap_or(20.0),
            cfg.lambda_points.unwrap_or(41),
        )?),
    };
    out.report.param("seed", seed);
    Ok(out)
}

/// Writes `<name>.csv`, `<name>.json`, plot data and snapshots into `dir`.
pub fn write_outcome(outcome: &Outcome, dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let stem = outcome.report.experiment.clone();
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    outcome.report.write_csv(&csv)?;
    outcome.report.write_json(&json, Some(seed))?;
    let mut paths = vec![csv, json];
    if let Some(kind) = outcome.plot {
        paths.extend(emit_plotdata(&outcome.report, kind, dir)?);
    }
    for (name, field, t) in &outcome.snapshots {
        let p = dir.join(format!("{name}.fbo2"));
        write_snapshot(&p, field, *t, outcome.alpha)?;
        paths.push(p);
    }
    Ok(paths)
}

#[derive(Debug, Parser)]
#[command(name = "fbo2d", about = "Dispersive estimate experiments on a periodic box")]
pub struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: Kind,
    /// Path to the flat JSON configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides the `out` key.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn run_args(args: &Args) -> Result<NormReport> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Error::param("threads", "must be at least 1"));
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = fs::read_to_string(&args.config)?;
    let cfg = ExperimentConfig::parse(&text, args.experiment)?;
    let outcome = run_experiment(args.experiment, &cfg)?;
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("fbo2d-out"));
    for p in write_outcome(&outcome, &dir, cfg.seed())? {
        println!("wrote {}", p.display());
    }
    Ok(outcome.report)
}

/// Entry point behind the binary.
pub fn main_with(args: &Args) -> ExitCode {
    match run_args(args) {
        Ok(rep) => {
            for v in &rep.verdicts {
                println!("{} {}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.name, fmt_short(v.value), v.rule);
            }
            if rep.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
