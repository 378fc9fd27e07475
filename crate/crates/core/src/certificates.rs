//! Parameter conditions, the heading-adjustment bound, the relaxed lowest
//! interception problem and its oracles, and per-pair winning certificates.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{OnceLock, RwLock};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::evasion::{check_io, er_goal_distance, heading_error, interception, ExtReal, DEFAULT_IO_TOL};
use crate::geometry::{sgn, wrap_angle, Vec2};
use crate::model::{integrate_arc, GameParams, JointState};
use crate::numerics::{max_on_circle, real_roots, Polynomial, DEFAULT_CIRCLE_RESOLUTION};
use crate::strategy::turn_direction;

/// Maximum-norm bound on the stationarity residual of an accepted sextic root.
pub const KKT_TOL: f64 = 1e-6;

/// Steps per `Δ` in the forward scan of [`problem1_oracle`].
pub const PROBLEM1_STEPS_PER_DELTA: f64 = 2000.0;

/// Cap on forward-scan steps per heading when `Δ` is tiny against the turning period.
const PROBLEM1_MAX_STEPS: usize = 200_000;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(GameError::InvalidParameter(format!(
            "speed ratio must exceed one, got {alpha}"
        )));
    }
    Ok(())
}

fn h_cache() -> &'static RwLock<HashMap<u64, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Worst-case curvature demand of the interception law, per unit `κ / ‖x_P − x_E‖`.
pub fn h_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let key = alpha.to_bits();
    if let Some(&v) = h_cache().read().expect("h cache poisoned").get(&key) {
        return Ok(v);
    }
    let m = max_on_circle(|x, y| h_objective(alpha, x, y), DEFAULT_CIRCLE_RESOLUTION);
    h_cache().write().expect("h cache poisoned").insert(key, m.max_value);
    Ok(m.max_value)
}

/// The function maximized by [`h_alpha`].
pub fn h_objective(alpha: f64, x: f64, y: f64) -> f64 {
    let den = 2.0 * alpha * y + alpha * alpha + 1.0;
    (y + alpha) / den + alpha * x * (y + alpha) / den.powf(1.5)
}

/// Closed-form upper bound on [`h_alpha`].
pub fn h_bar(alpha: f64) -> f64 {
    (2.0 * alpha - 1.0) / ((alpha - 1.0) * (alpha - 1.0))
}

/// Right-hand side of the heading-adjustment parameter condition.
pub fn eq15_rhs(alpha: f64) -> f64 {
    (alpha + 1.0) * (alpha + 1.0) / (alpha * (alpha - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    I,
    II,
    III,
    IV,
    V,
}

impl RegionLabel {
    /// Label from the three curve comparisons of `r/κ`.
    ///
    /// The red curve lies below the other two, so everything under it is `I`;
    /// `II` and `IV` are the two regions above both red and blue.
    pub fn from_comparisons(above_red: bool, above_green: bool, above_blue: bool) -> Self {
        match (above_red, above_green, above_blue) {
            (false, _, _) => RegionLabel::I,
            (true, false, false) => RegionLabel::III,
            (true, true, false) => RegionLabel::V,
            (true, false, true) => RegionLabel::II,
            (true, true, true) => RegionLabel::IV,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::I => "I",
            RegionLabel::II => "II",
            RegionLabel::III => "III",
            RegionLabel::IV => "IV",
            RegionLabel::V => "V",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRegion {
    pub label: RegionLabel,
    pub h_alpha: f64,
    pub h_bar: f64,
    pub eq15_rhs: f64,
    pub ratio: f64,
}

impl ParamRegion {
    pub fn above_red(&self) -> bool {
        self.ratio >= self.h_alpha
    }

    pub fn above_green(&self) -> bool {
        self.ratio >= self.h_bar
    }

    pub fn above_blue(&self) -> bool {
        self.ratio > self.eq15_rhs
    }
}

pub fn classify_region(r: f64, kappa: f64, alpha: f64) -> Result<ParamRegion> {
    let h = h_alpha(alpha)?;
    let mut region = ParamRegion {
        label: RegionLabel::I,
        h_alpha: h,
        h_bar: h_bar(alpha),
        eq15_rhs: eq15_rhs(alpha),
        ratio: r / kappa,
    };
    region.label = RegionLabel::from_comparisons(region.above_red(), region.above_green(), region.above_blue());
    Ok(region)
}

/// `r ≥ κ h(α)`: the interception law stays admissible.
pub fn check_eq9(r: f64, kappa: f64, alpha: f64) -> Result<bool> {
    Ok(r - kappa * h_alpha(alpha)? >= 0.0)
}

/// `r/κ > (α+1)²/(α(α−1))`: heading adjustment reaches orientation in finite time.
pub fn check_eq15(r: f64, kappa: f64, alpha: f64) -> Result<bool> {
    check_alpha(alpha)?;
    Ok(r / kappa > eq15_rhs(alpha))
}

/// `r/κ > max{h(α), (α+1)²/(α(α−1))}`.
pub fn check_eq27(r: f64, kappa: f64, alpha: f64) -> Result<bool> {
    Ok(r / kappa > h_alpha(alpha)?.max(eq15_rhs(alpha)))
}

/// Upper bound on the heading-adjustment time and the turning circle it is measured on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaBound {
    pub x_c: Vec2,
    pub theta_c: f64,
    pub theta_e_angle: f64,
    /// Turn direction during the adjustment, `±1`.
    pub turn: f64,
    pub n: u32,
    pub delta: f64,
}

pub fn delta_bound(x: &JointState, p: &GameParams) -> Result<DeltaBound> {
    let err = heading_error(x, p)?;
    if err == 0.0 {
        return Err(GameError::AlreadyOriented);
    }
    let s = turn_direction(err, crate::strategy::DEFAULT_TOL_PI);
    let theta_c = x.pursuer.theta + s * PI / 2.0;
    let x_c = x.x_p() + Vec2::from_angle(theta_c) * p.kappa;
    let theta_e_angle = (x.x_e() - x_c).angle();
    let phi_p = (x.x_p() - x_c).angle();
    // both angles lie in [0, 2π), so the raw sweep lies in (−2π, 2π)
    let raw = s * (theta_e_angle - phi_p);
    let n: u32 = if raw > 0.0 { 0 } else { 1 };
    let sweep = raw + TAU * n as f64;
    Ok(DeltaBound {
        x_c,
        theta_c: theta_c.rem_euclid(TAU),
        theta_e_angle,
        turn: s,
        n,
        delta: sweep * p.kappa / p.v_p,
    })
}

/// Strict clearance `‖x_C − x_E‖ > κ + v_P Δ / √(α² − 1)`.
pub fn lemma4_condition3(x: &JointState, p: &GameParams) -> Result<bool> {
    let db = delta_bound(x, p)?;
    Ok(condition3_with(&db, x, p))
}

fn condition3_with(db: &DeltaBound, x: &JointState, p: &GameParams) -> bool {
    db.x_c.distance(x.x_e()) > p.kappa + p.v_p * db.delta / (p.alpha * p.alpha - 1.0).sqrt()
}

/// Heading-adjustment premises: separated players, not oriented, and the clearance inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Check {
    pub separated: bool,
    pub not_oriented: bool,
    pub clearance: bool,
    pub delta: Option<DeltaBound>,
}

impl Lemma4Check {
    pub fn holds(&self) -> bool {
        self.separated && self.not_oriented && self.clearance
    }
}

pub fn lemma4_check(x: &JointState, p: &GameParams, io_tol: f64) -> Result<Lemma4Check> {
    let separated = x.separation() > p.r;
    let not_oriented = !check_io(x, p, io_tol)?;
    let mut out = Lemma4Check {
        separated,
        not_oriented,
        clearance: false,
        delta: None,
    };
    if heading_error(x, p)? != 0.0 {
        let db = delta_bound(x, p)?;
        out.clearance = condition3_with(&db, x, p);
        out.delta = Some(db);
    }
    Ok(out)
}

/// Coefficients `k_0..k_6` of the multiplier equation, ascending.
pub fn sextic_coeffs(x_c: Vec2, x_e: Vec2, alpha: f64, kappa: f64) -> Result<Polynomial> {
    let a2 = alpha * alpha;
    let q = 2.0 * PI + 1.0;
    let dyc = x_c.y - x_e.y;
    let dxc = x_c.x - x_e.x;
    let k6 = x_c.distance(x_e).powi(2);
    let k5 = kappa * (4.0 * PI + 2.0) * dyc;
    let k4 = q * q * kappa * kappa - 2.0 * (1.0 + a2) * k6;
    let k3 = kappa * (8.0 * PI + 4.0) * (1.0 + a2) * (-dyc);
    let k2 = (1.0 + a2).powi(2) * dxc * dxc + (1.0 - a2).powi(2) * dyc * dyc - 2.0 * kappa * kappa * q * q * (1.0 + a2);
    let k1 = kappa * (4.0 * PI + 2.0) * (1.0 - a2).powi(2) * dyc;
    let k0 = kappa * kappa * q * q * (1.0 - a2).powi(2);
    Polynomial::new(vec![k0, k1, k2, k3, k4, k5, k6])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem2Solution {
    /// Lowest reachable signed distance of the interception point, `objective / (α² − 1)`.
    pub rho_hat: f64,
    /// `α² y_E* − y_P* − α ‖x_P* − x_E*‖`.
    pub objective: f64,
    pub x_p_star: Vec2,
    pub x_e_star: Vec2,
    pub lambda2: f64,
    pub sigma: i8,
    pub kkt_residual: f64,
}

fn problem2_objective(x_p: Vec2, x_e: Vec2, alpha: f64) -> f64 {
    alpha * alpha * x_e.y - x_p.y - alpha * x_p.distance(x_e)
}

struct Candidate {
    x_p: Vec2,
    x_e: Vec2,
    residual: f64,
}

fn reconstruct(lambda: f64, x_c: Vec2, x_e: Vec2, sigma: f64, alpha: f64, kappa: f64) -> Candidate {
    let a2 = alpha * alpha;
    let l2 = lambda * lambda;
    let phi = (2.0 * (1.0 + a2) * l2 - l2 * l2 - (1.0 - a2).powi(2)).max(0.0).sqrt();
    let x_p = Vec2::new(
        x_c.x + sigma * kappa * phi / (2.0 * lambda),
        x_c.y + (1.0 - a2 + l2) * kappa / (2.0 * lambda),
    );
    let x_es = Vec2::new(
        x_e.x - sigma * PI * kappa * phi / (a2 * lambda),
        x_e.y + (1.0 - a2 - l2) * PI * kappa / (a2 * lambda),
    );
    let d = x_p.distance(x_es);
    let lambda1 = alpha * lambda;
    let rho_e = TAU * kappa / alpha;
    let residual = if d > 0.0 {
        let r = [
            alpha * (x_p.x - x_es.x) / d + lambda1 * (x_es.x - x_e.x) / rho_e,
            alpha * (x_p.y - x_es.y) / d + lambda1 * (x_es.y - x_e.y) / rho_e + a2,
            alpha * (x_es.x - x_p.x) / d + lambda * (x_p.x - x_c.x) / kappa,
            alpha * (x_es.y - x_p.y) / d + lambda * (x_p.y - x_c.y) / kappa - 1.0,
        ];
        r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        f64::INFINITY
    };
    Candidate {
        x_p,
        x_e: x_es,
        residual,
    }
}

/// Closed-form minimizer of the relaxed lowest-interception problem.
///
/// Every root of the multiplier sextic in `[α−1, α+1]` is reconstructed; survivors
/// of the sign law and the stationarity check compete on the objective.
pub fn solve_problem2(x: &JointState, p: &GameParams) -> Result<Problem2Solution> {
    let db = delta_bound(x, p)?;
    solve_problem2_at(db.x_c, x.x_e(), p.alpha, p.kappa)
}

/// [`solve_problem2`] with the turning-circle center given directly.
pub fn solve_problem2_at(x_c: Vec2, x_e: Vec2, alpha: f64, kappa: f64) -> Result<Problem2Solution> {
    check_alpha(alpha)?;
    let poly = sextic_coeffs(x_c, x_e, alpha, kappa)?;
    // horizontal offsets at rounding level count as symmetric
    let scale = 1.0 + x_c.distance(x_e);
    let side = |dx: f64| if dx.abs() <= 1e-9 * scale { 0.0 } else { sgn(dx) };
    let sigma = side(x_c.x - x_e.x);
    let roots = real_roots(&poly, alpha - 1.0, alpha + 1.0, 1e-12)?;
    let mut best: Option<Problem2Solution> = None;
    for lambda in roots {
        if !(lambda > 0.0) {
            continue;
        }
        let c = reconstruct(lambda, x_c, x_e, sigma, alpha, kappa);
        let sign_ok =
            side(c.x_p.x - x_c.x) == sigma && side(x_e.x - c.x_e.x) == sigma && side(c.x_p.x - c.x_e.x) == sigma;
        if !sign_ok || !(c.residual < KKT_TOL) {
            continue;
        }
        let objective = problem2_objective(c.x_p, c.x_e, alpha);
        if best.map_or(true, |b| objective < b.objective) {
            best = Some(Problem2Solution {
                rho_hat: objective / (alpha * alpha - 1.0),
                objective,
                x_p_star: c.x_p,
                x_e_star: c.x_e,
                lambda2: lambda,
                sigma: sigma as i8,
                kkt_residual: c.residual,
            });
        }
    }
    best.ok_or(GameError::KktReconstructionFailed)
}

/// Brute-force minimum of the relaxed problem over the two constraint circles.
///
/// Scans a `grid × grid` lattice of boundary angles, then refines the best cell
/// by compass search. Returns the signed-distance scale, `objective / (α² − 1)`.
pub fn problem2_oracle(x: &JointState, p: &GameParams, grid: usize) -> Result<f64> {
    let db = delta_bound(x, p)?;
    Ok(problem2_oracle_at(db.x_c, x.x_e(), p.alpha, p.kappa, grid))
}

pub fn problem2_oracle_at(x_c: Vec2, x_e: Vec2, alpha: f64, kappa: f64, grid: usize) -> f64 {
    let n = grid.max(4);
    let rho_e = TAU * kappa / alpha;
    let f = |a: f64, b: f64| {
        let xp = x_c + Vec2::from_angle(a) * kappa;
        let xe = x_e + Vec2::from_angle(b) * rho_e;
        problem2_objective(xp, xe, alpha)
    };
    let h = TAU / n as f64;
    let pe: Vec<Vec2> = (0..n).map(|k| x_c + Vec2::from_angle(h * k as f64) * kappa).collect();
    let ee: Vec<Vec2> = (0..n).map(|k| x_e + Vec2::from_angle(h * k as f64) * rho_e).collect();
    let (mut ia, mut ib, mut best) = (0, 0, f64::INFINITY);
    for (i, xp) in pe.iter().enumerate() {
        for (j, xe) in ee.iter().enumerate() {
            let v = problem2_objective(*xp, *xe, alpha);
            if v < best {
                best = v;
                ia = i;
                ib = j;
            }
        }
    }
    let (mut a, mut b) = (h * ia as f64, h * ib as f64);
    let mut step = h;
    while step > 1e-13 {
        let mut moved = false;
        for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = f(a + da, b + db);
            if v < best {
                best = v;
                a += da;
                b += db;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best / (alpha * alpha - 1.0)
}

/// Forward scan of the unrelaxed problem for one constant evader heading.
///
/// Returns the termination time and the interception height there, or `None`
/// if neither capture nor orientation occurs within one turning period.
pub fn problem1_heading(x: &JointState, p: &GameParams, theta_e: f64, dt: f64) -> Option<(f64, f64)> {
    let err0 = heading_error(x, p).ok()?;
    let s = turn_direction(err0, crate::strategy::DEFAULT_TOL_PI);
    let u_e = Vec2::from_angle(theta_e);
    let horizon = TAU * p.kappa / p.v_p;
    let at = |t: f64| -> JointState {
        let mut st = *x;
        st.pursuer = integrate_arc(x.pursuer, s, p.v_p * t, p.kappa);
        st.evader.pos = x.x_e() + u_e * (p.v_e * t);
        st
    };
    let gap = |t: f64| at(t).separation() - p.r;
    let err = |t: f64| {
        let st = at(t);
        if st.x_p() == st.x_e() {
            return 0.0;
        }
        heading_error(&st, p).unwrap_or(0.0)
    };
    let crossed = |a: f64, b: f64| b == 0.0 || (a.abs() < PI / 2.0 && b.abs() < PI / 2.0 && (a > 0.0) != (b > 0.0));
    let y_i = |t: f64| {
        let st = at(t);
        interception(st.x_p(), st.x_e(), p.alpha)
            .map(|ip| ip.x_i.y)
            .unwrap_or(f64::NEG_INFINITY)
    };
    if gap(0.0) <= 0.0 {
        return Some((0.0, y_i(0.0)));
    }
    let steps = ((horizon / dt).ceil() as usize).clamp(1, PROBLEM1_MAX_STEPS);
    let h = horizon / steps as f64;
    let (mut t0, mut e0) = (0.0, err0);
    for k in 1..=steps {
        let t1 = if k == steps { horizon } else { h * k as f64 };
        let e1 = err(t1);
        let g1 = gap(t1);
        let mut event: Option<f64> = None;
        if g1 <= 0.0 {
            event = Some(bisect_time(|t| gap(t) > 0.0, t0, t1));
        }
        if crossed(e0, e1) {
            let te = if e1 == 0.0 {
                t1
            } else {
                bisect_time(
                    |t| {
                        let e = err(t);
                        e != 0.0 && (e > 0.0) == (err0 > 0.0)
                    },
                    t0,
                    t1,
                )
            };
            event = Some(event.map_or(te, |c: f64| c.min(te)));
        }
        if let Some(t) = event {
            return Some((t, y_i(t)));
        }
        t0 = t1;
        e0 = e1;
    }
    None
}

/// Last time in `[a, b]` at which `before` still holds, to floating-point resolution.
fn bisect_time(before: impl Fn(f64) -> bool, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if before(m) {
            a = m;
        } else {
            b = m;
        }
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem1Report {
    pub value: ExtReal,
    /// Largest termination time over the scanned headings.
    pub max_termination_time: f64,
    /// Headings that neither captured nor oriented within one turning period.
    pub unterminated: usize,
}

/// Lowest interception height reached at termination over `grid` constant evader headings.
pub fn problem1_oracle(x: &JointState, p: &GameParams, grid: usize) -> Result<ExtReal> {
    Ok(problem1_report(x, p, grid)?.value)
}

pub fn problem1_report(x: &JointState, p: &GameParams, grid: usize) -> Result<Problem1Report> {
    if x.separation() <= p.r || check_io(x, p, DEFAULT_IO_TOL)? {
        return Ok(Problem1Report {
            value: ExtReal::PosInfinity,
            max_termination_time: 0.0,
            unterminated: 0,
        });
    }
    let db = delta_bound(x, p)?;
    let dt = db.delta / PROBLEM1_STEPS_PER_DELTA;
    let n = grid.max(1);
    let results: Vec<Option<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|k| problem1_heading(x, p, TAU * k as f64 / n as f64, dt))
        .collect();
    let mut value = f64::INFINITY;
    let mut max_t = 0.0f64;
    let mut unterminated = 0;
    for r in results {
        match r {
            Some((t, y)) => {
                value = value.min(y);
                max_t = max_t.max(t);
            }
            None => unterminated += 1,
        }
    }
    let value = if value == f64::INFINITY {
        ExtReal::PosInfinity
    } else {
        ExtReal::Finite(value)
    };
    Ok(Problem1Report {
        value,
        max_termination_time: max_t,
        unterminated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertificateKind {
    /// Separation alone, for simple-motion pursuers.
    Theorem1,
    Theorem2,
    Theorem5,
    None,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::Theorem1 => "Theorem1",
            CertificateKind::Theorem2 => "Theorem2",
            CertificateKind::Theorem5 => "Theorem5",
            CertificateKind::None => "None",
        }
    }
}

/// Predicate values behind a certificate; fields not reached by the short circuit stay `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub sc: bool,
    pub er_goal_distance: ExtReal,
    pub io: bool,
    pub heading_error: f64,
    pub eq9: bool,
    pub eq15: bool,
    pub eq27: bool,
    pub h_alpha: f64,
    pub region: RegionLabel,
    pub lemma4: Option<Lemma4Check>,
    pub rho_hat: Option<f64>,
    pub kkt_failed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub evidence: Evidence,
}

impl Certificate {
    pub fn is_win(&self) -> bool {
        self.kind != CertificateKind::None
    }
}

pub fn certify_win(x: &JointState, p: &GameParams) -> Result<Certificate> {
    certify_win_with_tol(x, p, DEFAULT_IO_TOL)
}

pub fn certify_win_with_tol(x: &JointState, p: &GameParams, io_tol: f64) -> Result<Certificate> {
    let region = classify_region(p.r, p.kappa, p.alpha)?;
    let goal = er_goal_distance(x.x_p(), x.x_e(), p.alpha)?;
    let err = heading_error(x, p)?;
    let mut ev = Evidence {
        sc: goal.is_nonnegative(),
        er_goal_distance: goal,
        io: err.abs() <= io_tol,
        heading_error: err,
        eq9: region.above_red(),
        eq15: region.above_blue(),
        eq27: region.ratio > region.h_alpha.max(region.eq15_rhs),
        h_alpha: region.h_alpha,
        region: region.label,
        lemma4: None,
        rho_hat: None,
        kkt_failed: false,
    };
    let done = |kind, evidence| Ok(Certificate { kind, evidence });
    if !ev.sc {
        return done(CertificateKind::None, ev);
    }
    if ev.io {
        let kind = if ev.eq9 {
            CertificateKind::Theorem2
        } else {
            CertificateKind::None
        };
        return done(kind, ev);
    }
    let l4 = lemma4_check(x, p, io_tol)?;
    ev.lemma4 = Some(l4);
    if !ev.eq27 || !l4.holds() {
        return done(CertificateKind::None, ev);
    }
    let db = l4.delta.expect("clearance implies a delta bound");
    match solve_problem2_at(db.x_c, x.x_e(), p.alpha, p.kappa) {
        Ok(sol) => {
            ev.rho_hat = Some(sol.rho_hat);
            let kind = if sol.rho_hat >= 0.0 {
                CertificateKind::Theorem5
            } else {
                CertificateKind::None
            };
            done(kind, ev)
        }
        Err(GameError::KktReconstructionFailed) => {
            ev.kkt_failed = true;
            done(CertificateKind::None, ev)
        }
        Err(e) => Err(e),
    }
}

/// Random state meeting the heading-adjustment premises and the separation condition.
///
/// The evader sits in `[-2, 2] × [y_min, y_min + 4]`, the pursuer at distance
/// `d ∈ [d_min, d_max]` in a uniform direction, heading uniform; draws failing
/// any premise are rejected.
pub fn sample_lemma4_state<R: Rng + ?Sized>(
    rng: &mut R,
    p: &GameParams,
    d_min: f64,
    d_max: f64,
    y_min: f64,
) -> JointState {
    loop {
        let x_e = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(y_min..y_min + 4.0));
        let d = rng.gen_range(d_min..d_max);
        let x_p = x_e + Vec2::from_angle(rng.gen_range(0.0..TAU)) * d;
        let x = JointState::new(x_p, rng.gen_range(0.0..TAU), x_e);
        let sc = er_goal_distance(x_p, x_e, p.alpha)
            .map(|g| g.is_nonnegative())
            .unwrap_or(false);
        if sc && lemma4_check(&x, p, DEFAULT_IO_TOL).map(|c| c.holds()).unwrap_or(false) {
            return x;
        }
    }
}

/// Absolute angle between two headings, for callers comparing against `Δ`.
pub fn heading_gap(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}
