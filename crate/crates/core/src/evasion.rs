//! Evasion region (the Apollonius disk of points the evader reaches first),
//! the interception point on it, and the separation / orientation predicates.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::geometry::{wrap_angle, Vec2};
use crate::model::{GameParams, JointState};

/// Default band for the interception-orientation test, in radians.
pub const DEFAULT_IO_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

impl Circle {
    pub fn point_at(&self, t: f64) -> Vec2 {
        self.center + Vec2::from_angle(t) * self.radius
    }

    pub fn contains(&self, x: Vec2) -> bool {
        x.distance(self.center) <= self.radius
    }
}

/// A real number extended with both infinities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_nonnegative(self) -> bool {
        match self {
            ExtReal::NegInfinity => false,
            ExtReal::Finite(v) => v >= 0.0,
            ExtReal::PosInfinity => true,
        }
    }

    /// Lossy view for CSV output and plotting.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInfinity => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInfinity => f64::INFINITY,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInfinity => f.write_str("-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInfinity => f.write_str("+inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterceptionData {
    /// Lowest point of the closed evasion region.
    pub x_i: Vec2,
    /// Bearing from the pursuer to `x_i`, in `[0, 2π)`.
    pub theta_i: f64,
    /// Signed distance of `x_i` to the goal boundary.
    pub rho_t_at_i: f64,
    /// Offset from the region center down to `x_i`.
    pub upsilon: Vec2,
}

/// `‖x − x_P‖ − α‖x − x_E‖`; positive exactly inside the evasion region.
pub fn potential(x: Vec2, x_p: Vec2, x_e: Vec2, alpha: f64) -> f64 {
    x.distance(x_p) - alpha * x.distance(x_e)
}

fn check_distinct(x_p: Vec2, x_e: Vec2) -> Result<()> {
    if !x_p.is_finite() || !x_e.is_finite() {
        return Err(GameError::NonFinite("player position"));
    }
    if x_p == x_e {
        return Err(GameError::CoincidentPositions);
    }
    Ok(())
}

pub fn evasion_region(x_p: Vec2, x_e: Vec2, alpha: f64) -> Result<Circle> {
    check_distinct(x_p, x_e)?;
    let k = alpha * alpha - 1.0;
    Ok(Circle {
        center: (x_e * (alpha * alpha) - x_p) / k,
        radius: alpha * x_p.distance(x_e) / k,
    })
}

pub fn interception(x_p: Vec2, x_e: Vec2, alpha: f64) -> Result<InterceptionData> {
    let er = evasion_region(x_p, x_e, alpha)?;
    let upsilon = Vec2::new(0.0, -er.radius);
    let x_i = er.center + upsilon;
    Ok(InterceptionData {
        x_i,
        theta_i: (x_i - x_p).angle(),
        rho_t_at_i: x_i.y,
        upsilon,
    })
}

/// Set distance between the closed evasion region and the goal half-plane.
///
/// Negative infinity when the disk interior meets the open goal half-plane.
pub fn er_goal_distance(x_p: Vec2, x_e: Vec2, alpha: f64) -> Result<ExtReal> {
    let y = interception(x_p, x_e, alpha)?.rho_t_at_i;
    Ok(if y >= 0.0 {
        ExtReal::Finite(y)
    } else {
        ExtReal::NegInfinity
    })
}

/// Separation condition.
pub fn check_sc(x: &JointState, p: &GameParams) -> Result<bool> {
    Ok(er_goal_distance(x.x_p(), x.x_e(), p.alpha)?.is_nonnegative())
}

/// Wrapped heading error `θ_I − θ_P` in `(−π, π]`.
pub fn heading_error(x: &JointState, p: &GameParams) -> Result<f64> {
    let ip = interception(x.x_p(), x.x_e(), p.alpha)?;
    Ok(wrap_angle(ip.theta_i - x.pursuer.theta))
}

/// Interception orientation, within `tol` radians.
pub fn check_io(x: &JointState, p: &GameParams, tol: f64) -> Result<bool> {
    Ok(heading_error(x, p)?.abs() <= tol)
}
