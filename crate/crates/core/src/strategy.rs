//! Feedback strategies for both teams as pure state-to-control maps.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::evasion::{heading_error, interception};
use crate::geometry::{wrap_angle, Vec2};
use crate::model::{integrate_arc, GameParams, JointState, PursuerState};

/// Width of the measure-zero "heading exactly opposite" branch of [`heading_adjust`].
pub const DEFAULT_TOL_PI: f64 = 1e-9;

/// Clamping beyond this excess is reported as a precondition violation.
pub const CLAMP_REPORT_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoStepPhase {
    Adjusting,
    Intercepting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PursuitMode {
    SimpleMotion,
    ScIo,
    HeadingAdjust,
    TwoStep(TwoStepPhase),
}

impl PursuitMode {
    pub fn label(&self) -> &'static str {
        match self {
            PursuitMode::SimpleMotion => "simple",
            PursuitMode::ScIo => "sc_io",
            PursuitMode::HeadingAdjust => "heading_adjust",
            PursuitMode::TwoStep(TwoStepPhase::Adjusting) => "two_step_adjusting",
            PursuitMode::TwoStep(TwoStepPhase::Intercepting) => "two_step_intercepting",
        }
    }
}

/// The pair `(F(X), G(X))` of the curvature-matching pursuit law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FgValue {
    pub f: Vec2,
    pub g: f64,
}

impl FgValue {
    pub fn control(&self, u_e: Vec2) -> f64 {
        self.f.dot(u_e) + self.g
    }

    /// Largest `|F·u + G|` over unit `u`.
    pub fn worst_case(&self) -> f64 {
        self.f.norm() + self.g.abs()
    }
}

/// A control clamped to `[-1, 1]` together with how far it had to be moved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClampedControl {
    pub value: f64,
    pub excess: f64,
}

impl ClampedControl {
    pub fn new(raw: f64) -> Self {
        let value = raw.clamp(-1.0, 1.0);
        Self {
            value,
            excess: (raw - value).abs(),
        }
    }

    /// True when the unclamped value exceeded the admissible range beyond rounding noise.
    pub fn is_violation(&self) -> bool {
        self.excess > CLAMP_REPORT_THRESHOLD
    }
}

/// Simple-motion pursuit: unit vector from the pursuer toward the interception point.
pub fn pursuit_simple(x_p: Vec2, x_e: Vec2, alpha: f64) -> Result<Vec2> {
    let ip = interception(x_p, x_e, alpha)?;
    (ip.x_i - x_p).normalized().ok_or(GameError::CoincidentPositions)
}

pub fn fg(x: &JointState, p: &GameParams) -> Result<FgValue> {
    let diff = x.x_p() - x.x_e();
    let d = diff.norm();
    if !(d > 0.0) {
        return Err(GameError::CoincidentPositions);
    }
    let a = p.alpha;
    let dy = diff.y;
    let lead = a * d + dy;
    let den = (a * a + 1.0) * d + 2.0 * a * dy;
    let base = p.kappa * lead / (d * d * den);
    Ok(FgValue {
        f: Vec2::new(dy * base, -diff.x * base),
        g: -p.kappa * a * diff.x * lead / (d.powf(1.5) * den.powf(1.5)),
    })
}

/// Pursuit law for states with separation and interception orientation.
///
/// The result lies in `[-1, 1]` whenever the capture-radius condition holds and
/// the players are at least `r` apart; otherwise it is clamped and the excess reported.
pub fn pursuit_sc_io(x: &JointState, u_e: Vec2, p: &GameParams) -> Result<ClampedControl> {
    Ok(ClampedControl::new(fg(x, p)?.control(u_e)))
}

/// Bang-bang turn toward the interception angle.
pub fn heading_adjust(x: &JointState, p: &GameParams, tol_pi: f64) -> Result<f64> {
    let err = heading_error(x, p)?;
    Ok(turn_direction(err, tol_pi))
}

pub(crate) fn turn_direction(err: f64, tol_pi: f64) -> f64 {
    if (err.abs() - PI).abs() <= tol_pi {
        return -1.0;
    }
    let s = err.sin();
    if s > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn predicted_error(x: &JointState, u_p: f64, u_e: Vec2, p: &GameParams, dt: f64) -> Result<(f64, JointState)> {
    let pursuer = integrate_arc(x.pursuer, u_p, p.v_p * dt, p.kappa);
    let mut next = *x;
    next.pursuer = pursuer;
    next.evader.pos = x.x_e() + u_e * (p.v_e * dt);
    Ok((heading_error(&next, p)?, next))
}

/// Outcome of one zero-order-hold step of the heading adjustment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjustStep {
    pub control: f64,
    /// The step ends with the heading error inside `io_tol`.
    pub lands: bool,
}

/// Heading adjustment over one step of length `dt` with the evader control held.
///
/// Returns the full-rate turn of [`heading_adjust`] unless that turn would carry
/// the heading past the interception angle within the step; then the turn rate
/// is reduced so the step ends oriented.
pub fn heading_adjust_step(x: &JointState, u_e: Vec2, p: &GameParams, dt: f64, io_tol: f64) -> Result<AdjustStep> {
    let err0 = heading_error(x, p)?;
    let u_full = turn_direction(err0, DEFAULT_TOL_PI);
    let crossed = |e: f64| e.abs() < PI / 2.0 && (e == 0.0 || (e > 0.0) != (err0 > 0.0));
    let (err_full, _) = predicted_error(x, u_full, u_e, p, dt)?;
    if err_full.abs() <= io_tol {
        return Ok(AdjustStep {
            control: u_full,
            lands: true,
        });
    }
    if !crossed(err_full) {
        return Ok(AdjustStep {
            control: u_full,
            lands: false,
        });
    }
    let (err_zero, _) = predicted_error(x, 0.0, u_e, p, dt)?;
    if crossed(err_zero) || err_zero.abs() <= io_tol {
        return Ok(AdjustStep {
            control: 0.0,
            lands: err_zero.abs() <= io_tol,
        });
    }
    // err(0) keeps the initial sign, err(u_full) has crossed: bisect the turn rate
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = u_full;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let (e, _) = predicted_error(x, mid * u_full, u_e, p, dt)?;
        best = mid * u_full;
        if e.abs() <= io_tol * 1e-3 {
            break;
        }
        if crossed(e) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (e, _) = predicted_error(x, best, u_e, p, dt)?;
    Ok(AdjustStep {
        control: best,
        lands: e.abs() <= io_tol,
    })
}

/// Curvature-matching law held over one step of length `dt`, corrected so the
/// step ends exactly oriented.
///
/// Zero-order hold lets the heading slip off the interception angle by
/// `O(dt²)` per step. Starting from the continuous-time law, a few Newton
/// steps on the predicted end-of-step heading error remove that slip.
pub fn pursuit_sc_io_step(x: &JointState, u_e: Vec2, p: &GameParams, dt: f64) -> Result<ClampedControl> {
    let gain = p.v_p * dt / p.kappa;
    let mut u = fg(x, p)?.control(u_e) + heading_error(x, p)? / gain;
    for _ in 0..4 {
        let (e, _) = predicted_error(x, u, u_e, p, dt)?;
        if e.abs() < 1e-15 {
            break;
        }
        u += e / gain;
    }
    Ok(ClampedControl::new(u))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoStepOutput {
    pub control: f64,
    pub mode: PursuitMode,
    /// Heading to adopt when the adjustment phase ends inside the tolerance band.
    pub snapped_heading: Option<f64>,
    pub clamp_excess: f64,
}

/// Heading adjustment until oriented, then the curvature-matching law.
pub fn two_step(x: &JointState, u_e: Vec2, p: &GameParams, mode: PursuitMode, io_tol: f64) -> Result<TwoStepOutput> {
    let PursuitMode::TwoStep(phase) = mode else {
        return Err(GameError::InvalidParameter(format!("two_step called in mode {mode:?}")));
    };
    match phase {
        TwoStepPhase::Adjusting => {
            let err = heading_error(x, p)?;
            if err.abs() <= io_tol {
                let theta_i = interception(x.x_p(), x.x_e(), p.alpha)?.theta_i;
                let mut snapped = *x;
                snapped.pursuer = PursuerState::new(x.x_p(), theta_i);
                let c = pursuit_sc_io(&snapped, u_e, p)?;
                Ok(TwoStepOutput {
                    control: c.value,
                    mode: PursuitMode::TwoStep(TwoStepPhase::Intercepting),
                    snapped_heading: Some(theta_i),
                    clamp_excess: c.excess,
                })
            } else {
                Ok(TwoStepOutput {
                    control: turn_direction(err, DEFAULT_TOL_PI),
                    mode,
                    snapped_heading: None,
                    clamp_excess: 0.0,
                })
            }
        }
        TwoStepPhase::Intercepting => {
            let c = pursuit_sc_io(x, u_e, p)?;
            Ok(TwoStepOutput {
                control: c.value,
                mode,
                snapped_heading: None,
                clamp_excess: c.excess,
            })
        }
    }
}

/// Evader heads straight for the interception point.
pub fn evader_optimal(x: &JointState, p: &GameParams) -> Result<Vec2> {
    let ip = interception(x.x_p(), x.x_e(), p.alpha)?;
    (ip.x_i - x.x_e()).normalized().ok_or(GameError::CoincidentPositions)
}

pub fn evader_constant(theta_e: f64) -> Vec2 {
    Vec2::from_angle(theta_e)
}

/// Heading drawn uniformly from the open interval `(π, 2π)`, so the evader descends.
pub fn evader_random_goal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        let theta = PI + PI * u;
        if u > 0.0 && theta < TAU {
            return theta;
        }
    }
}

/// Wrapped difference helper for callers that track `cos(θ_I − θ_P)`.
pub fn orientation_cosine(x: &JointState, p: &GameParams) -> Result<f64> {
    Ok(wrap_angle(heading_error(x, p)?).cos())
}
