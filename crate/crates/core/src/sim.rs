//! Receding-horizon multiplayer game loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificates::CertificateKind;
use crate::error::{GameError, Result};
use crate::evasion::{heading_error, DEFAULT_IO_TOL};
use crate::geometry::Vec2;
use crate::matching::{assign, build_graph, max_matching, sticky_matching, Assignment, Matching, PairInput, WinGraph};
use crate::model::{
    integrate_arc, validate_scenario, EvaderState, EvaderStrategy, GameParams, JointState, MotionKind, PursuerState,
    Scenario,
};
use crate::strategy::{
    evader_optimal, evader_random_goal, heading_adjust_step, pursuit_sc_io_step, pursuit_simple, CLAMP_REPORT_THRESHOLD,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub max_time: f64,
    /// Steps between graph and matching rebuilds.
    pub matching_period: usize,
    pub io_tol: f64,
    /// Keep still-certified pairs when re-matching.
    pub sticky: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            max_time: 60.0,
            matching_period: 1,
            io_tol: DEFAULT_IO_TOL,
            sticky: false,
            seed: 0,
        }
    }
}

impl SimConfig {
    /// Defaults with the scenario's seed.
    pub fn for_scenario(sc: &Scenario) -> Self {
        Self {
            seed: sc.seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(GameError::InvalidParameter("dt must be positive".into()));
        }
        if !(self.max_time >= self.dt) {
            return Err(GameError::InvalidParameter("max_time must be at least dt".into()));
        }
        if self.matching_period == 0 {
            return Err(GameError::InvalidParameter("matching_period must be at least 1".into()));
        }
        if !(self.io_tol > 0.0) {
            return Err(GameError::InvalidParameter("io_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Evader,
    Pursuer,
}

impl AgentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AgentKind::Evader => "evader",
            AgentKind::Pursuer => "pursuer",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentStatus {
    Active,
    Captured,
    ReachedGoal,
}

impl AgentStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            AgentStatus::Active => "active",
            AgentStatus::Captured => "captured",
            AgentStatus::ReachedGoal => "reached_goal",
        }
    }
}

/// State at `t` and the control held over the following step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub pos: Vec2,
    pub theta: Option<f64>,
    /// Turn rate for Dubins pursuers, heading angle otherwise; absent on the final row.
    pub control: Option<f64>,
    pub mode: String,
    pub status: AgentStatus,
    pub target: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentTrajectory {
    pub kind: AgentKind,
    pub index: usize,
    pub points: Vec<TrajectoryPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Capture,
    GoalArrival,
    IoAchieved,
    MatchingChanged,
    /// A pursuit control had to be clamped beyond rounding noise.
    ControlClamped,
    /// An unmatched pursuer found no unmatched evader.
    AssignmentFallback,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Capture => "capture",
            EventKind::GoalArrival => "goal_arrival",
            EventKind::IoAchieved => "io_achieved",
            EventKind::MatchingChanged => "matching_changed",
            EventKind::ControlClamped => "control_clamped",
            EventKind::AssignmentFallback => "assignment_fallback",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub pursuer: Option<usize>,
    pub evader: Option<usize>,
    /// Event-specific number: capture distance, clamp excess.
    pub value: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaderOutcome {
    pub status: AgentStatus,
    pub time: Option<f64>,
    pub by: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSnapshot {
    pub t: f64,
    pub edges: Vec<(usize, usize, CertificateKind)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trajectories: Vec<AgentTrajectory>,
    /// Game events in time order.
    pub events: Vec<Event>,
    /// Precondition diagnostics in time order.
    pub diagnostics: Vec<Event>,
    pub outcome: Vec<EvaderOutcome>,
    pub matching_history: Vec<(f64, Matching)>,
    /// Certified edge sets, recorded whenever they change.
    pub graph_history: Vec<GraphSnapshot>,
    pub final_time: f64,
    pub horizon_exceeded: bool,
}

impl SimResult {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn trajectory(&self, kind: AgentKind, index: usize) -> Option<&AgentTrajectory> {
        self.trajectories.iter().find(|a| a.kind == kind && a.index == index)
    }
}

/// Fraction of a step at which a quantity falling from `prev` to `next` reaches `threshold`.
pub fn detect_crossing(prev: f64, next: f64, threshold: f64) -> Option<f64> {
    if prev == threshold && next == threshold {
        return Some(0.0);
    }
    if prev > threshold && threshold >= next {
        return Some((prev - threshold) / (prev - next));
    }
    None
}

struct PursuerRt {
    state: PursuerState,
    io: bool,
    last_target: Option<usize>,
}

struct EvaderRt {
    state: EvaderState,
    status: AgentStatus,
    heading: Option<f64>,
}

/// Control of one pursuer over one step, and how it was chosen.
struct PursuerMove {
    control: f64,
    mode: &'static str,
    clamp_excess: f64,
    snap: bool,
}

pub fn run(sc: &Scenario, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    if let Some(v) = validate_scenario(sc).first() {
        return Err(GameError::InvalidParameter(v.to_string()));
    }
    let np = sc.pursuers.len();
    let ne = sc.evaders.len();
    let params: Vec<Vec<GameParams>> = (0..np)
        .map(|i| (0..ne).map(|j| sc.params(i, j)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pursuers: Vec<PursuerRt> = sc
        .pursuers
        .iter()
        .map(|p| PursuerRt {
            state: p.state,
            io: false,
            last_target: None,
        })
        .collect();
    let mut evaders: Vec<EvaderRt> = sc
        .evaders
        .iter()
        .map(|e| {
            let heading = match e.strategy {
                EvaderStrategy::Constant { heading } => Some(heading),
                EvaderStrategy::RandomGoal => Some(evader_random_goal(&mut rng)),
                EvaderStrategy::Optimal => None,
            };
            EvaderRt {
                state: e.state,
                status: AgentStatus::Active,
                heading,
            }
        })
        .collect();

    let mut trajectories: Vec<AgentTrajectory> = (0..ne)
        .map(|j| AgentTrajectory {
            kind: AgentKind::Evader,
            index: j,
            points: Vec::new(),
        })
        .chain((0..np).map(|i| AgentTrajectory {
            kind: AgentKind::Pursuer,
            index: i,
            points: Vec::new(),
        }))
        .collect();
    let mut events = Vec::new();
    let mut diagnostics = Vec::new();
    let mut outcome = vec![
        EvaderOutcome {
            status: AgentStatus::Active,
            time: None,
            by: None
        };
        ne
    ];
    let mut matching_history: Vec<(f64, Matching)> = Vec::new();
    let mut graph_history: Vec<GraphSnapshot> = Vec::new();
    let mut assignment = Assignment::default();
    let mut graph = WinGraph::empty(np, ne);

    let mut k: u64 = 0;
    let mut t = 0.0;
    let mut horizon_exceeded = false;
    loop {
        if evaders.iter().all(|e| e.status != AgentStatus::Active) {
            break;
        }
        if t >= cfg.max_time {
            horizon_exceeded = true;
            break;
        }
        let t_next = (k + 1) as f64 * cfg.dt;
        let dt = t_next - t;

        if k % cfg.matching_period as u64 == 0 {
            let pairs: Vec<PairInput> = (0..np)
                .flat_map(|i| (0..ne).map(move |j| (i, j)))
                .filter(|&(_, j)| evaders[j].status == AgentStatus::Active)
                .map(|(i, j)| PairInput {
                    pursuer: i,
                    evader: j,
                    state: JointState {
                        pursuer: pursuers[i].state,
                        evader: evaders[j].state,
                    },
                    params: params[i][j],
                    motion: sc.pursuers[i].motion,
                })
                .collect();
            graph = build_graph(np, ne, &pairs, cfg.io_tol)?;
            let edges: Vec<_> = graph.edges.iter().map(|(&(i, j), c)| (i, j, c.kind)).collect();
            if graph_history.last().map_or(true, |g| g.edges != edges) {
                graph_history.push(GraphSnapshot { t, edges });
            }
            let m = if cfg.sticky {
                sticky_matching(&graph, &assignment.matched)
            } else {
                max_matching(&graph)
            };
            let ppos: Vec<Vec2> = pursuers.iter().map(|p| p.state.pos).collect();
            let epos: Vec<Option<Vec2>> = evaders
                .iter()
                .map(|e| (e.status == AgentStatus::Active).then_some(e.state.pos))
                .collect();
            let new_assignment = assign(&m, &ppos, &epos);
            if matching_history
                .last()
                .map_or(true, |(_, prev)| *prev != new_assignment.matched)
            {
                matching_history.push((t, new_assignment.matched.clone()));
                events.push(Event {
                    t,
                    kind: EventKind::MatchingChanged,
                    pursuer: None,
                    evader: None,
                    value: None,
                });
            }
            if new_assignment.fallback && !assignment.fallback {
                diagnostics.push(Event {
                    t,
                    kind: EventKind::AssignmentFallback,
                    pursuer: None,
                    evader: None,
                    value: None,
                });
            }
            assignment = new_assignment;
        }

        // evaders commit first; pursuers observe their controls
        let mut u_e = vec![Vec2::ZERO; ne];
        for j in 0..ne {
            if evaders[j].status != AgentStatus::Active {
                continue;
            }
            u_e[j] = match evaders[j].heading {
                Some(h) => Vec2::from_angle(h),
                None => {
                    let i = chaser_of(j, &assignment, &pursuers, &evaders[j]);
                    let x = JointState {
                        pursuer: pursuers[i].state,
                        evader: evaders[j].state,
                    };
                    evader_optimal(&x, &params[i][j])?
                }
            };
        }

        let mut moves = Vec::with_capacity(np);
        for i in 0..np {
            let target = assignment
                .target(i)
                .filter(|&j| evaders[j].status == AgentStatus::Active);
            let mv = match target {
                None => PursuerMove {
                    control: 0.0,
                    mode: "idle",
                    clamp_excess: 0.0,
                    snap: false,
                },
                Some(j) => {
                    let x = JointState {
                        pursuer: pursuers[i].state,
                        evader: evaders[j].state,
                    };
                    let p = &params[i][j];
                    match sc.pursuers[i].motion {
                        MotionKind::Simple => {
                            let dir = pursuit_simple(x.x_p(), x.x_e(), p.alpha)?;
                            PursuerMove {
                                control: dir.angle(),
                                mode: "simple",
                                clamp_excess: 0.0,
                                snap: false,
                            }
                        }
                        MotionKind::Dubins => {
                            let kind = graph.edges.get(&(i, j)).map(|c| c.kind);
                            dubins_move(&x, u_e[j], p, dt, cfg.io_tol, kind, assignment.is_matched(i))?
                        }
                    }
                }
            };
            if mv.clamp_excess > CLAMP_REPORT_THRESHOLD {
                diagnostics.push(Event {
                    t,
                    kind: EventKind::ControlClamped,
                    pursuer: Some(i),
                    evader: target,
                    value: Some(mv.clamp_excess),
                });
            }
            trajectories[ne + i].points.push(TrajectoryPoint {
                t,
                pos: pursuers[i].state.pos,
                theta: Some(pursuers[i].state.theta),
                control: Some(mv.control),
                mode: mv.mode.to_string(),
                status: AgentStatus::Active,
                target,
            });
            moves.push((target, mv));
        }
        for j in 0..ne {
            let e = &evaders[j];
            let active = e.status == AgentStatus::Active;
            trajectories[j].points.push(TrajectoryPoint {
                t,
                pos: e.state.pos,
                theta: None,
                control: active.then(|| u_e[j].angle()),
                mode: match (active, &sc.evaders[j].strategy) {
                    (false, _) => "stopped",
                    (true, EvaderStrategy::Optimal) => "optimal",
                    (true, EvaderStrategy::Constant { .. }) => "constant",
                    (true, EvaderStrategy::RandomGoal) => "random_goal",
                }
                .to_string(),
                status: e.status,
                target: None,
            });
        }

        // integrate with sub-step closures so events can be located inside the step
        let old_p: Vec<PursuerState> = pursuers.iter().map(|p| p.state).collect();
        let old_e: Vec<EvaderState> = evaders.iter().map(|e| e.state).collect();
        let pursuer_at = |i: usize, frac: f64| -> PursuerState {
            let (_, mv) = &moves[i];
            let spec = &sc.pursuers[i];
            let len = spec.speed * dt * frac;
            match (spec.motion, moves[i].0) {
                (_, None) => integrate_arc(old_p[i], 0.0, len, spec.kappa),
                (MotionKind::Simple, Some(_)) => PursuerState {
                    pos: old_p[i].pos + Vec2::from_angle(mv.control) * len,
                    theta: mv.control,
                },
                (MotionKind::Dubins, Some(_)) => integrate_arc(old_p[i], mv.control, len, spec.kappa),
            }
        };
        let moving: Vec<bool> = evaders.iter().map(|e| e.status == AgentStatus::Active).collect();
        let evader_at = |j: usize, frac: f64| -> Vec2 {
            if !moving[j] {
                return old_e[j].pos;
            }
            old_e[j].pos + u_e[j] * (sc.evaders[j].speed * dt * frac)
        };

        for i in 0..np {
            let mut s = pursuer_at(i, 1.0);
            if moves[i].1.snap {
                let j = moves[i].0.expect("snap requires a target");
                let x = JointState {
                    pursuer: s,
                    evader: EvaderState { pos: evader_at(j, 1.0) },
                };
                if let Ok(err) = heading_error(&x, &params[i][j]) {
                    if err.abs() <= cfg.io_tol {
                        s = PursuerState::new(s.pos, s.theta + err);
                    }
                }
            }
            pursuers[i].state = s;
        }

        let mut step_events: Vec<(f64, Event, usize)> = Vec::new();
        for j in 0..ne {
            if evaders[j].status != AgentStatus::Active {
                continue;
            }
            let mut best: Option<(f64, usize)> = None;
            for i in 0..np {
                let r = sc.pursuers[i].capture_radius;
                let d0 = old_p[i].pos.distance(old_e[j].pos);
                let d1 = pursuers[i].state.pos.distance(evader_at(j, 1.0));
                if let Some(f_lin) = detect_crossing(d0, d1, r) {
                    let dist = |f: f64| pursuer_at(i, f).pos.distance(evader_at(j, f));
                    let f = refine_capture(dist, r, f_lin);
                    if best.map_or(true, |(bf, _)| f < bf) {
                        best = Some((f, i));
                    }
                }
            }
            let y0 = old_e[j].pos.y;
            let y1 = evader_at(j, 1.0).y;
            let goal = detect_crossing(y0, y1, 0.0);
            let (frac, kind, by) = match (best, goal) {
                (Some((fc, i)), Some(fg)) if fc <= fg => (fc, EventKind::Capture, Some(i)),
                (Some(_), Some(fg)) | (None, Some(fg)) => (fg, EventKind::GoalArrival, None),
                (Some((fc, i)), None) => (fc, EventKind::Capture, Some(i)),
                (None, None) => continue,
            };
            let te = t + frac * dt;
            let pos = evader_at(j, frac);
            let value = by.map(|i| pursuer_at(i, frac).pos.distance(pos));
            evaders[j].state.pos = pos;
            evaders[j].status = if kind == EventKind::Capture {
                AgentStatus::Captured
            } else {
                AgentStatus::ReachedGoal
            };
            outcome[j] = EvaderOutcome {
                status: evaders[j].status,
                time: Some(te),
                by,
            };
            step_events.push((
                te,
                Event {
                    t: te,
                    kind,
                    pursuer: by,
                    evader: Some(j),
                    value,
                },
                j,
            ));
        }
        for j in 0..ne {
            if evaders[j].status == AgentStatus::Active {
                evaders[j].state.pos = evader_at(j, 1.0);
            }
        }

        for i in 0..np {
            let target = moves[i].0.filter(|&j| evaders[j].status == AgentStatus::Active);
            let io = match target {
                Some(j) if sc.pursuers[i].motion == MotionKind::Dubins => {
                    let x = JointState {
                        pursuer: pursuers[i].state,
                        evader: evaders[j].state,
                    };
                    heading_error(&x, &params[i][j])
                        .map(|e| e.abs() <= cfg.io_tol)
                        .unwrap_or(false)
                }
                _ => false,
            };
            if io && target == pursuers[i].last_target && !pursuers[i].io {
                step_events.push((
                    t_next,
                    Event {
                        t: t_next,
                        kind: EventKind::IoAchieved,
                        pursuer: Some(i),
                        evader: target,
                        value: None,
                    },
                    usize::MAX,
                ));
            }
            pursuers[i].io = io;
            pursuers[i].last_target = target;
        }
        step_events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        events.extend(step_events.into_iter().map(|(_, e, _)| e));

        k += 1;
        t = t_next;
    }

    for j in 0..ne {
        trajectories[j].points.push(TrajectoryPoint {
            t,
            pos: evaders[j].state.pos,
            theta: None,
            control: None,
            mode: "final".into(),
            status: evaders[j].status,
            target: None,
        });
    }
    for i in 0..np {
        trajectories[ne + i].points.push(TrajectoryPoint {
            t,
            pos: pursuers[i].state.pos,
            theta: Some(pursuers[i].state.theta),
            control: None,
            mode: "final".into(),
            status: AgentStatus::Active,
            target: None,
        });
    }

    Ok(SimResult {
        trajectories,
        events,
        diagnostics,
        outcome,
        matching_history,
        graph_history,
        final_time: t,
        horizon_exceeded,
    })
}

/// Pursuer whose interception point an optimal evader steers for.
fn chaser_of(j: usize, a: &Assignment, pursuers: &[PursuerRt], e: &EvaderRt) -> usize {
    if let Some((&i, _)) = a.matched.iter().find(|(_, &jj)| jj == j) {
        return i;
    }
    if let Some((&i, _)) = a.opportunistic.iter().find(|(_, &jj)| jj == j) {
        return i;
    }
    let mut best = (0, f64::INFINITY);
    for (i, p) in pursuers.iter().enumerate() {
        let d = p.state.pos.distance(e.state.pos);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

fn dubins_move(
    x: &JointState,
    u_e: Vec2,
    p: &GameParams,
    dt: f64,
    io_tol: f64,
    cert: Option<CertificateKind>,
    matched: bool,
) -> Result<PursuerMove> {
    let err = heading_error(x, p)?;
    let two_step = matched && cert == Some(CertificateKind::Theorem5);
    if err.abs() <= io_tol {
        let c = pursuit_sc_io_step(x, u_e, p, dt)?;
        let mode = if two_step { "two_step_intercepting" } else { "sc_io" };
        return Ok(PursuerMove {
            control: c.value,
            mode,
            clamp_excess: c.excess,
            snap: false,
        });
    }
    let step = heading_adjust_step(x, u_e, p, dt, io_tol)?;
    let mode = if two_step {
        "two_step_adjusting"
    } else {
        "heading_adjust"
    };
    Ok(PursuerMove {
        control: step.control,
        mode,
        clamp_excess: 0.0,
        snap: step.lands,
    })
}

/// Smallest step fraction with exact separation at most `r`, seeded by the linear estimate.
fn refine_capture(dist: impl Fn(f64) -> f64, r: f64, f_lin: f64) -> f64 {
    if dist(f_lin) <= r {
        // walk back to the first touching fraction
        let (mut lo, mut hi) = (0.0, f_lin);
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if dist(m) <= r {
                hi = m;
            } else {
                lo = m;
            }
        }
        return hi;
    }
    let (mut lo, mut hi) = (f_lin, 1.0);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if dist(m) <= r {
            hi = m;
        } else {
            lo = m;
        }
    }
    hi
}
