//! Scenario files, output formats and the command-line subcommands.
//!
//! Every `cmd_*` function writes to the given sinks and returns the process
//! exit code: 0 on success, 1 on input errors, 2 when the horizon is exceeded
//! (or, for `oracle-compare`, when a cross-check fails).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{
    delta_bound, eq15_rhs, h_alpha, h_bar, problem1_oracle, problem2_oracle_at, sample_lemma4_state, solve_problem2,
    CertificateKind,
};
use crate::evasion::DEFAULT_IO_TOL;
use crate::geometry::Vec2;
use crate::matching::{certify_pair, PairInput};
use crate::model::{
    validate_scenario, EvaderSpec, EvaderState, EvaderStrategy, GameParams, MotionKind, PursuerSpec, PursuerState,
    Scenario,
};
use crate::numerics::{real_roots, Polynomial};
use crate::sim::{run, AgentKind, Event, SimConfig, SimResult};

/// The only goal region the engine supports.
pub const GOAL_HALF_PLANE: &str = "half_plane_y_leq_0";

/// Relative tolerance of the closed-form versus lattice-oracle comparison.
pub const ORACLE_REL_TOL: f64 = 1e-3;

/// Slack of the relaxation bound against the forward-scan oracle.
pub const SANDWICH_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PursuerEntry {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub speed: f64,
    pub kappa: f64,
    pub capture_radius: f64,
    pub model: MotionKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    Optimal,
    Constant,
    RandomGoal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaderEntry {
    pub x: f64,
    pub y: f64,
    pub speed: f64,
    pub strategy: StrategyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
}

/// On-disk scenario document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub goal: String,
    pub pursuers: Vec<PursuerEntry>,
    pub evaders: Vec<EvaderEntry>,
    /// Drives `random_goal` evaders; zero when absent.
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed scenario: {e}"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    /// Converts and validates; messages use one-based indices.
    pub fn to_scenario(&self) -> Result<Scenario, String> {
        if self.goal != GOAL_HALF_PLANE {
            return Err(format!(
                "field `goal`: expected \"{GOAL_HALF_PLANE}\", got \"{}\"",
                self.goal
            ));
        }
        let pursuers = self
            .pursuers
            .iter()
            .map(|p| PursuerSpec {
                state: PursuerState::new(Vec2::new(p.x, p.y), p.theta),
                motion: p.model,
                speed: p.speed,
                kappa: p.kappa,
                capture_radius: p.capture_radius,
            })
            .collect();
        let mut evaders = Vec::with_capacity(self.evaders.len());
        for (j, e) in self.evaders.iter().enumerate() {
            let strategy = match (e.strategy, e.heading) {
                (StrategyName::Constant, Some(heading)) => EvaderStrategy::Constant { heading },
                (StrategyName::Constant, None) => {
                    return Err(format!("evaders[{}]: strategy \"constant\" needs `heading`", j + 1))
                }
                (_, Some(_)) => {
                    return Err(format!(
                        "evaders[{}]: `heading` is only allowed with strategy \"constant\"",
                        j + 1
                    ))
                }
                (StrategyName::Optimal, None) => EvaderStrategy::Optimal,
                (StrategyName::RandomGoal, None) => EvaderStrategy::RandomGoal,
            };
            evaders.push(EvaderSpec {
                state: EvaderState::new(Vec2::new(e.x, e.y)),
                speed: e.speed,
                strategy,
            });
        }
        let sc = Scenario {
            pursuers,
            evaders,
            seed: self.seed,
        };
        let violations = validate_scenario(&sc);
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(format!("invalid scenario: {}", msgs.join("; ")));
        }
        Ok(sc)
    }

    pub fn from_scenario(sc: &Scenario) -> Self {
        Self {
            goal: GOAL_HALF_PLANE.to_string(),
            pursuers: sc
                .pursuers
                .iter()
                .map(|p| PursuerEntry {
                    x: p.state.pos.x,
                    y: p.state.pos.y,
                    theta: p.state.theta,
                    speed: p.speed,
                    kappa: p.kappa,
                    capture_radius: p.capture_radius,
                    model: p.motion,
                })
                .collect(),
            evaders: sc
                .evaders
                .iter()
                .map(|e| {
                    let (strategy, heading) = match e.strategy {
                        EvaderStrategy::Optimal => (StrategyName::Optimal, None),
                        EvaderStrategy::Constant { heading } => (StrategyName::Constant, Some(heading)),
                        EvaderStrategy::RandomGoal => (StrategyName::RandomGoal, None),
                    };
                    EvaderEntry {
                        x: e.state.pos.x,
                        y: e.state.pos.y,
                        speed: e.speed,
                        strategy,
                        heading,
                    }
                })
                .collect(),
            seed: sc.seed,
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ScenarioFile::parse(&text)?.to_scenario()
}

/// `printf("%.9g")`.
pub fn fmt_g9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const TRAJECTORY_HEADER: &str = "t,agent,kind,x,y,theta,u,status,target";

/// Trajectory table sorted by time, then kind, then agent; indices are one-based.
pub fn trajectory_csv(res: &SimResult) -> String {
    let mut rows: Vec<(f64, AgentKind, usize, String)> = Vec::new();
    for a in &res.trajectories {
        for p in &a.points {
            let opt = |v: Option<f64>| v.map(fmt_g9).unwrap_or_default();
            let line = format!(
                "{},{},{},{},{},{},{},{},{}",
                fmt_g9(p.t),
                a.index + 1,
                a.kind.as_str(),
                fmt_g9(p.pos.x),
                fmt_g9(p.pos.y),
                opt(p.theta),
                opt(p.control),
                p.status.as_str(),
                p.target.map(|j| (j + 1).to_string()).unwrap_or_default(),
            );
            rows.push((p.t, a.kind, a.index, line));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = String::with_capacity(rows.len() * 64);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (_, _, _, line) in rows {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct EventRecord<'a> {
    t: f64,
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pursuer: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evader: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

/// Game events and diagnostics as JSON lines in time order, one-based indices.
pub fn events_jsonl(res: &SimResult) -> String {
    let mut all: Vec<&Event> = res.events.iter().chain(res.diagnostics.iter()).collect();
    all.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut out = String::new();
    for e in all {
        let rec = EventRecord {
            t: e.t,
            kind: e.kind.as_str(),
            pursuer: e.pursuer.map(|i| i + 1),
            evader: e.evader.map(|j| j + 1),
            value: e.value,
        };
        out.push_str(&serde_json::to_string(&rec).expect("event serializes"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Parser)]
#[command(
    name = "chauffeur",
    about = "Dubins-pursuer reach-avoid games: simulation and certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write the trajectory and events.
    Run(RunArgs),
    /// Print winning certificates for pursuer-evader pairs.
    Certify(CertifyArgs),
    /// Tabulate the parameter-region curves over a range of speed ratios.
    SweepRegions(SweepArgs),
    /// Cross-check the closed-form bound against both brute-force oracles.
    OracleCompare(OracleArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub dt: f64,
    #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
    pub max_time: f64,
    #[arg(long, default_value_t = 1)]
    pub matching_period: usize,
    #[arg(long)]
    pub sticky: bool,
    #[arg(long, default_value = "trajectory.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "events.jsonl")]
    pub events_out: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "which")]
pub struct PairSelect {
    /// One-based pair `I,J`.
    #[arg(long, value_parser = parse_pair)]
    pub pair: Option<(usize, usize)>,
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[command(flatten)]
    pub which: PairSelect,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1.05)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lattice and heading resolution of the oracles.
    #[arg(long, default_value_t = 720)]
    pub grid: usize,
    /// Defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected I,J, got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad pursuer index {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad evader index {b:?}"))?;
    Ok((a, b))
}

/// Parses `args` (program name first) and dispatches.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match cli.command {
        Command::Run(a) => cmd_run(&a, out, err),
        Command::Certify(a) => cmd_certify(&a, out, err),
        Command::SweepRegions(a) => cmd_sweep_regions(&a, out, err),
        Command::OracleCompare(a) => cmd_oracle_compare(&a, out, err),
    }
}

fn fail(err: &mut dyn Write, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {msg}");
    1
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

pub fn cmd_run(a: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if !(a.dt > 0.0) {
        return fail(err, "dt must be positive");
    }
    let sc = match load_scenario(&a.scenario) {
        Ok(s) => s,
        Err(e) => return fail(err, e),
    };
    let cfg = SimConfig {
        dt: a.dt,
        max_time: a.max_time,
        matching_period: a.matching_period,
        io_tol: DEFAULT_IO_TOL,
        sticky: a.sticky,
        seed: sc.seed,
    };
    if let Err(e) = cfg.validate() {
        return fail(err, e.to_string().trim_start_matches("invalid parameter: "));
    }
    let res = match run(&sc, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(err, e),
    };
    if let Err(e) = write_output(Some(&a.out), &trajectory_csv(&res), out)
        .and_then(|_| write_output(Some(&a.events_out), &events_jsonl(&res), out))
    {
        return fail(err, e);
    }
    use crate::sim::EventKind::*;
    let _ = writeln!(
        out,
        "captures={} goal_arrivals={} final_time={} horizon_exceeded={}",
        res.count(Capture),
        res.count(GoalArrival),
        fmt_g9(res.final_time),
        res.horizon_exceeded
    );
    if res.horizon_exceeded {
        let _ = writeln!(err, "horizon exceeded with active evaders");
        2
    } else {
        0
    }
}

/// One `key=value` record describing the certificate of pair `(i, j)`, zero-based.
pub fn certificate_record(sc: &Scenario, i: usize, j: usize) -> Result<String, String> {
    let params = sc.params(i, j).map_err(|e| e.to_string())?;
    let state = sc.joint_state(i, j);
    let pair = PairInput {
        pursuer: i,
        evader: j,
        state,
        params,
        motion: sc.pursuers[i].motion,
    };
    let cert = certify_pair(&pair, DEFAULT_IO_TOL).map_err(|e| e.to_string())?;
    let ev = &cert.evidence;
    let (delta, rho) = if ev.io {
        (None, None)
    } else {
        let delta = delta_bound(&state, &params).ok().map(|d| d.delta);
        let rho = ev
            .rho_hat
            .or_else(|| solve_problem2(&state, &params).ok().map(|s| s.rho_hat));
        (delta, rho)
    };
    let opt = |v: Option<f64>| v.map(fmt_g9).unwrap_or_else(|| "-".into());
    Ok(format!(
        "pair={},{} kind={} sc={} io={} h_alpha={} delta={} rho_hat={} region={} er_goal_distance={}{}",
        i + 1,
        j + 1,
        cert.kind.as_str(),
        ev.sc,
        ev.io,
        fmt_g9(ev.h_alpha),
        opt(delta),
        opt(rho),
        ev.region.as_str(),
        fmt_g9(ev.er_goal_distance.to_f64()),
        if ev.kkt_failed { " kkt_failed=true" } else { "" },
    ))
}

pub fn cmd_certify(a: &CertifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let sc = match load_scenario(&a.scenario) {
        Ok(s) => s,
        Err(e) => return fail(err, e),
    };
    let (np, ne) = (sc.pursuers.len(), sc.evaders.len());
    let pairs: Vec<(usize, usize)> = match a.which.pair {
        Some((i, j)) => {
            if i == 0 || j == 0 || i > np || j > ne {
                return fail(err, format!("pair {i},{j} out of range: {np} pursuers, {ne} evaders"));
            }
            vec![(i - 1, j - 1)]
        }
        None => (0..np).flat_map(|i| (0..ne).map(move |j| (i, j))).collect(),
    };
    for (i, j) in pairs {
        match certificate_record(&sc, i, j) {
            Ok(line) => {
                let _ = writeln!(out, "{line}");
            }
            Err(e) => return fail(err, e),
        }
    }
    0
}

/// Speed ratio at which the closed-form bound and the heading-adjustment curve meet.
pub fn alpha0() -> f64 {
    let cubic = Polynomial::new(vec![-1.0, 0.0, -1.0, 1.0]).expect("nonzero cubic");
    real_roots(&cubic, 1.0, 2.0, 1e-14).expect("valid bracket")[0]
}

pub fn sweep_csv(alpha_min: f64, alpha_max: f64, samples: usize) -> Result<String, String> {
    if !(alpha_min > 1.0 && alpha_min < alpha_max && alpha_max.is_finite()) {
        return Err(format!(
            "need 1 < alpha-min < alpha-max, got {alpha_min} and {alpha_max}"
        ));
    }
    if samples < 2 {
        return Err(format!("need at least 2 samples, got {samples}"));
    }
    let rows: Vec<String> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let a = alpha_min + (alpha_max - alpha_min) * k as f64 / (samples - 1) as f64;
            let h = h_alpha(a).expect("alpha above one");
            format!(
                "{},{},{},{}",
                fmt_g9(a),
                fmt_g9(h),
                fmt_g9(h_bar(a)),
                fmt_g9(eq15_rhs(a))
            )
        })
        .collect();
    let mut s = format!("# alpha0={:.10}\nalpha,h_alpha,h_bar,eq15_rhs\n", alpha0());
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    Ok(s)
}

pub fn cmd_sweep_regions(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match sweep_csv(a.alpha_min, a.alpha_max, a.samples).and_then(|s| write_output(a.out.as_deref(), &s, out)) {
        Ok(()) => 0,
        Err(e) => fail(err, e),
    }
}

/// One cross-check of the closed-form relaxation against both oracles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleTrial {
    pub rho_hat: f64,
    pub lambda2: f64,
    pub kkt_residual: f64,
    pub problem2_oracle: f64,
    pub problem1_oracle: f64,
    pub rel_diff: f64,
    pub violation: bool,
}

/// Reference parameters used by the oracle comparison.
pub fn oracle_params() -> GameParams {
    GameParams::with_ratio(0.3, 6.3, 0.0625, 0.1).expect("valid parameters")
}

pub fn oracle_trials(trials: usize, seed: u64, grid: usize) -> Vec<Option<OracleTrial>> {
    let p = oracle_params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<_> = (0..trials)
        .map(|_| sample_lemma4_state(&mut rng, &p, 0.2, 3.0, 0.0))
        .collect();
    states
        .par_iter()
        .map(|x| {
            let sol = solve_problem2(x, &p).ok()?;
            let db = delta_bound(x, &p).ok()?;
            let o2 = problem2_oracle_at(db.x_c, x.x_e(), p.alpha, p.kappa, grid);
            let o1 = problem1_oracle(x, &p, grid).ok()?.to_f64();
            let rel_diff = (sol.rho_hat - o2).abs() / (1.0 + sol.rho_hat.abs());
            let in_bracket = sol.lambda2 >= p.alpha - 1.0 && sol.lambda2 <= p.alpha + 1.0;
            let violation = rel_diff > ORACLE_REL_TOL || sol.rho_hat > o1 + SANDWICH_TOL || !in_bracket;
            Some(OracleTrial {
                rho_hat: sol.rho_hat,
                lambda2: sol.lambda2,
                kkt_residual: sol.kkt_residual,
                problem2_oracle: o2,
                problem1_oracle: o1,
                rel_diff,
                violation,
            })
        })
        .collect()
}

pub fn cmd_oracle_compare(a: &OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if a.trials == 0 {
        return fail(err, "need at least one trial");
    }
    let trials = oracle_trials(a.trials, a.seed, a.grid);
    let mut csv =
        String::from("trial,rho_hat,problem2_oracle,problem1_oracle,lambda2,kkt_residual,rel_diff,violation\n");
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for (k, t) in trials.iter().enumerate() {
        match t {
            Some(t) => {
                violations += t.violation as usize;
                worst = worst.max(t.rel_diff);
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    k + 1,
                    fmt_g9(t.rho_hat),
                    fmt_g9(t.problem2_oracle),
                    fmt_g9(t.problem1_oracle),
                    fmt_g9(t.lambda2),
                    fmt_g9(t.kkt_residual),
                    fmt_g9(t.rel_diff),
                    t.violation
                ));
            }
            None => {
                violations += 1;
                csv.push_str(&format!("{},,,,,,,true\n", k + 1));
            }
        }
    }
    let summary = format!(
        "trials={} violations={} max_rel_diff={}\n",
        a.trials,
        violations,
        fmt_g9(worst)
    );
    let written = match &a.out {
        Some(p) => fs::write(p, &csv).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => out.write_all(csv.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        return fail(err, e);
    }
    let _ = out.write_all(summary.as_bytes());
    if violations == 0 {
        0
    } else {
        2
    }
}

/// Certificate kinds for every pair, zero-based, in row-major order.
pub fn certificate_table(sc: &Scenario) -> Result<Vec<(usize, usize, CertificateKind)>, String> {
    let mut out = Vec::new();
    for i in 0..sc.pursuers.len() {
        for j in 0..sc.evaders.len() {
            let params = sc.params(i, j).map_err(|e| e.to_string())?;
            let pair = PairInput {
                pursuer: i,
                evader: j,
                state: sc.joint_state(i, j),
                params,
                motion: sc.pursuers[i].motion,
            };
            out.push((
                i,
                j,
                certify_pair(&pair, DEFAULT_IO_TOL).map_err(|e| e.to_string())?.kind,
            ));
        }
    }
    Ok(out)
}
