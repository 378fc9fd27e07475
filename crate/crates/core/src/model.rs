//! Player dynamics, the goal half-plane and scenario validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::geometry::{normalize_angle, Vec2};

/// Below this magnitude a turn command is integrated as a straight segment.
pub const STRAIGHT_CONTROL_EPS: f64 = 1e-12;

/// Tolerance on the evader control norm.
pub const EVADER_CONTROL_SLACK: f64 = 1e-12;

/// Constants of one pursuer-evader pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub v_p: f64,
    pub v_e: f64,
    /// Minimum turning radius of the pursuer.
    pub kappa: f64,
    /// Capture radius.
    pub r: f64,
    /// Speed ratio `v_p / v_e`.
    pub alpha: f64,
}

impl GameParams {
    pub fn new(v_p: f64, v_e: f64, kappa: f64, r: f64) -> Result<Self> {
        for (name, v) in [("v_p", v_p), ("v_e", v_e), ("kappa", kappa), ("r", r)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(GameError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let alpha = v_p / v_e;
        if alpha <= 1.0 {
            return Err(GameError::InvalidParameter(format!(
                "speed ratio must exceed 1, got {alpha}"
            )));
        }
        Ok(Self {
            v_p,
            v_e,
            kappa,
            r,
            alpha,
        })
    }

    /// Builds parameters from the pursuer speed and the speed ratio.
    pub fn with_ratio(v_p: f64, alpha: f64, kappa: f64, r: f64) -> Result<Self> {
        let mut p = Self::new(v_p, v_p / alpha, kappa, r)?;
        // keep the caller's ratio bit-exact
        p.alpha = alpha;
        Ok(p)
    }

    /// Turning period `2πκ / v_p` of a pursuer on its tightest circle.
    pub fn turning_period(&self) -> f64 {
        std::f64::consts::TAU * self.kappa / self.v_p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PursuerState {
    pub pos: Vec2,
    /// Heading in `[0, 2π)`.
    pub theta: f64,
}

impl PursuerState {
    pub fn new(pos: Vec2, theta: f64) -> Self {
        Self {
            pos,
            theta: normalize_angle(theta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaderState {
    pub pos: Vec2,
}

impl EvaderState {
    pub fn new(pos: Vec2) -> Self {
        Self { pos }
    }
}

/// Pursuer pose plus evader position at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub pursuer: PursuerState,
    pub evader: EvaderState,
}

impl JointState {
    pub fn new(pursuer_pos: Vec2, theta: f64, evader_pos: Vec2) -> Self {
        Self {
            pursuer: PursuerState::new(pursuer_pos, theta),
            evader: EvaderState::new(evader_pos),
        }
    }

    pub fn x_p(&self) -> Vec2 {
        self.pursuer.pos
    }

    pub fn x_e(&self) -> Vec2 {
        self.evader.pos
    }

    pub fn separation(&self) -> f64 {
        self.pursuer.pos.distance(self.evader.pos)
    }
}

/// Value of the goal function: the y-coordinate. Non-positive means inside the goal.
pub fn goal_value(x: Vec2) -> f64 {
    x.y
}

/// Integrates the Dubins-car pursuer exactly over `dt` with `u_p` held constant.
pub fn step_pursuer(s: PursuerState, u_p: f64, dt: f64, p: &GameParams) -> Result<PursuerState> {
    if !s.pos.is_finite() || !s.theta.is_finite() {
        return Err(GameError::NonFinite("pursuer state"));
    }
    if !u_p.is_finite() || !dt.is_finite() {
        return Err(GameError::NonFinite("pursuer control or time step"));
    }
    if dt <= 0.0 {
        return Err(GameError::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if u_p.abs() > 1.0 + 1e-9 {
        return Err(GameError::InvalidParameter(format!(
            "pursuer control {u_p} outside [-1, 1]"
        )));
    }
    Ok(integrate_arc(s, u_p, p.v_p * dt, p.kappa))
}

/// Moves along an arc of signed curvature `u / kappa` for path length `length`.
pub(crate) fn integrate_arc(s: PursuerState, u: f64, length: f64, kappa: f64) -> PursuerState {
    if u.abs() < STRAIGHT_CONTROL_EPS {
        return PursuerState {
            pos: s.pos + Vec2::from_angle(s.theta) * length,
            theta: s.theta,
        };
    }
    let turn = length * u / kappa;
    let half = 0.5 * turn;
    // chord of the arc along the mid-heading; avoids cancellation for small |u|
    let chord = if half.abs() < 1e-8 {
        length * (1.0 - half * half / 6.0)
    } else {
        length * half.sin() / half
    };
    PursuerState {
        pos: s.pos + Vec2::from_angle(s.theta + half) * chord,
        theta: normalize_angle(s.theta + turn),
    }
}

/// Moves the simple-motion evader by `v_e·dt·u_e`.
pub fn step_evader(s: EvaderState, u_e: Vec2, dt: f64, p: &GameParams) -> Result<EvaderState> {
    if !s.pos.is_finite() || !u_e.is_finite() || !dt.is_finite() {
        return Err(GameError::NonFinite("evader state, control or time step"));
    }
    if dt <= 0.0 {
        return Err(GameError::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let n = u_e.norm();
    if n > 1.0 + EVADER_CONTROL_SLACK {
        return Err(GameError::ControlOutOfRange(n));
    }
    Ok(EvaderState {
        pos: s.pos + u_e * (p.v_e * dt),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionKind {
    Dubins,
    Simple,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EvaderStrategy {
    /// Heads for the interception point of its current pursuer.
    Optimal,
    /// Fixed heading for the whole game.
    Constant { heading: f64 },
    /// Heading drawn once from `(π, 2π)` using the scenario seed.
    RandomGoal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PursuerSpec {
    pub state: PursuerState,
    pub motion: MotionKind,
    pub speed: f64,
    pub kappa: f64,
    pub capture_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaderSpec {
    pub state: EvaderState,
    pub speed: f64,
    pub strategy: EvaderStrategy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub pursuers: Vec<PursuerSpec>,
    pub evaders: Vec<EvaderSpec>,
    pub seed: u64,
}

impl Scenario {
    /// Parameters of pair `(i, j)`; fails when the pair violates the speed or positivity rules.
    pub fn params(&self, i: usize, j: usize) -> Result<GameParams> {
        let p = &self.pursuers[i];
        GameParams::new(p.speed, self.evaders[j].speed, p.kappa, p.capture_radius)
    }

    pub fn joint_state(&self, i: usize, j: usize) -> JointState {
        JointState {
            pursuer: self.pursuers[i].state,
            evader: self.evaders[j].state,
        }
    }
}

/// A broken deployment assumption. Indices are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    PursuersCoincide(usize, usize),
    EvadersCoincide(usize, usize),
    EvaderInsideCaptureDisk { pursuer: usize, evader: usize },
    EvaderNotInPlayRegion(usize),
    SpeedRatioNotAboveOne { pursuer: usize, evader: usize },
    NonPositiveParameter { what: String },
    NonFinite { what: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PursuersCoincide(a, b) => write!(f, "pursuers coincide: P{} and P{}", a + 1, b + 1),
            Violation::EvadersCoincide(a, b) => write!(f, "evaders coincide: E{} and E{}", a + 1, b + 1),
            Violation::EvaderInsideCaptureDisk { pursuer, evader } => write!(
                f,
                "evader inside capture disk: E{} within capture radius of P{}",
                evader + 1,
                pursuer + 1
            ),
            Violation::EvaderNotInPlayRegion(j) => write!(f, "evader not in play region: E{}", j + 1),
            Violation::SpeedRatioNotAboveOne { pursuer, evader } => {
                write!(f, "speed ratio not above one: P{} vs E{}", pursuer + 1, evader + 1)
            }
            Violation::NonPositiveParameter { what } => write!(f, "non-positive parameter: {what}"),
            Violation::NonFinite { what } => write!(f, "non-finite value: {what}"),
        }
    }
}

/// Checks the initial-deployment and speed-ratio assumptions. Empty means valid.
pub fn validate_scenario(sc: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, p) in sc.pursuers.iter().enumerate() {
        if !p.state.pos.is_finite() || !p.state.theta.is_finite() {
            out.push(Violation::NonFinite {
                what: format!("P{} state", i + 1),
            });
        }
        for (name, v) in [
            ("speed", p.speed),
            ("kappa", p.kappa),
            ("capture_radius", p.capture_radius),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                out.push(Violation::NonPositiveParameter {
                    what: format!("P{} {name}", i + 1),
                });
            }
        }
    }
    for (j, e) in sc.evaders.iter().enumerate() {
        if !e.state.pos.is_finite() {
            out.push(Violation::NonFinite {
                what: format!("E{} position", j + 1),
            });
        }
        if !(e.speed > 0.0) || !e.speed.is_finite() {
            out.push(Violation::NonPositiveParameter {
                what: format!("E{} speed", j + 1),
            });
        }
    }
    for a in 0..sc.pursuers.len() {
        for b in a + 1..sc.pursuers.len() {
            if sc.pursuers[a].state.pos.distance(sc.pursuers[b].state.pos) <= 0.0 {
                out.push(Violation::PursuersCoincide(a, b));
            }
        }
    }
    for a in 0..sc.evaders.len() {
        for b in a + 1..sc.evaders.len() {
            if sc.evaders[a].state.pos.distance(sc.evaders[b].state.pos) <= 0.0 {
                out.push(Violation::EvadersCoincide(a, b));
            }
        }
    }
    for (i, p) in sc.pursuers.iter().enumerate() {
        for (j, e) in sc.evaders.iter().enumerate() {
            if !(e.state.pos.distance(p.state.pos) > p.capture_radius) {
                out.push(Violation::EvaderInsideCaptureDisk { pursuer: i, evader: j });
            }
            if !(p.speed / e.speed > 1.0) {
                out.push(Violation::SpeedRatioNotAboveOne { pursuer: i, evader: j });
            }
        }
    }
    for (j, e) in sc.evaders.iter().enumerate() {
        if !(goal_value(e.state.pos) > 0.0) {
            out.push(Violation::EvaderNotInPlayRegion(j));
        }
    }
    out
}
