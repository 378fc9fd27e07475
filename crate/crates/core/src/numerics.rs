//! Root finding for low-degree real polynomials and global maximization on the unit circle.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

/// Minimum number of samples in the sign-change scan of [`real_roots`].
pub const ROOT_SCAN_SAMPLES: usize = 4096;

/// Default scan resolution of [`max_on_circle`].
pub const DEFAULT_CIRCLE_RESOLUTION: usize = 4096;

const MAX_DEGREE: usize = 6;
const GOLDEN_TOL: f64 = 1e-12;

/// Real polynomial, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trims trailing zeros; rejects the zero polynomial and degrees above six.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(GameError::NonFinite("polynomial coefficient"));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(GameError::ZeroPolynomial);
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(GameError::InvalidParameter(format!(
                "degree {} exceeds {MAX_DEGREE}",
                coeffs.len() - 1
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `None` when the derivative vanishes identically.
    pub fn derivative(&self) -> Option<Polynomial> {
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial::new(d).ok()
    }

    fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Bisects a sign change of `f` on `[a, b]` down to floating-point resolution.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Odd-multiplicity roots: exact zeros on the grid plus bisected sign changes.
fn sign_change_roots(p: &Polynomial, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (hi - lo) / samples as f64;
    let xs = |k: usize| if k == samples { hi } else { lo + step * k as f64 };
    let mut x0 = xs(0);
    let mut f0 = p.eval(x0);
    if f0 == 0.0 {
        roots.push(x0);
    }
    for k in 1..=samples {
        let x1 = xs(k);
        let f1 = p.eval(x1);
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && (f0 > 0.0) != (f1 > 0.0) {
            roots.push(bisect(|x| p.eval(x), x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// All real roots of `p` in `[lo, hi]`, sorted and merged at spacing `tol`.
///
/// Sign changes on a dense grid are refined by bisection. Even-multiplicity
/// roots do not change sign, so the critical points of `p` (found the same way
/// on `p'`) and the interval ends are also accepted when `p` nearly vanishes there.
pub fn real_roots(p: &Polynomial, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>> {
    if !(lo < hi) || !(tol > 0.0) {
        return Err(GameError::InvalidParameter(format!(
            "need lo < hi and tol > 0, got [{lo}, {hi}] and {tol}"
        )));
    }
    let samples = ROOT_SCAN_SAMPLES;
    let mut roots = sign_change_roots(p, lo, hi, samples);

    let scale = 1.0 + p.max_abs_coeff() * lo.abs().max(hi.abs()).max(1.0).powi(p.degree() as i32);
    let touch_tol = tol * scale * 1e-3;
    for end in [lo, hi] {
        if p.eval(end).abs() <= touch_tol {
            roots.push(end);
        }
    }
    if let Some(dp) = p.derivative() {
        for c in sign_change_roots(&dp, lo, hi, samples) {
            if p.eval(c).abs() <= touch_tol {
                roots.push(c);
            }
        }
    }

    roots.sort_by(|a, b| a.total_cmp(b));
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last() {
            Some(&last) if r - last <= tol => {
                // keep whichever candidate has the smaller residual
                if p.eval(r).abs() < p.eval(last).abs() {
                    *merged.last_mut().unwrap() = r;
                }
            }
            _ => merged.push(r),
        }
    }
    Ok(merged)
}

/// Result of a bracketed global maximization over a periodic parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketedMax {
    /// Maximizing angle `t`, the point is `(cos t, sin t)`.
    pub argmax: f64,
    pub max_value: f64,
    /// Spacing of the initial scan in `t`.
    pub certified_resolution: f64,
}

/// Golden-section maximization of a unimodal `g` on `[a, b]`.
pub fn golden_section_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while (b - a).abs() > tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Maximizes `f(x, y)` over the unit circle.
///
/// Scans `t ∈ [0, 2π)` at `resolution` points, then refines the best sample's
/// neighbourhood by golden-section search to `1e-12` in `t`.
pub fn max_on_circle(f: impl Fn(f64, f64) -> f64, resolution: usize) -> BracketedMax {
    let n = resolution.max(3);
    let h = TAU / n as f64;
    let g = |t: f64| {
        let (s, c) = t.sin_cos();
        f(c, s)
    };
    let (mut best_k, mut best_v) = (0usize, f64::NEG_INFINITY);
    for k in 0..n {
        let v = g(h * k as f64);
        if v > best_v {
            best_v = v;
            best_k = k;
        }
    }
    let t0 = h * best_k as f64;
    let (t, v) = golden_section_max(g, t0 - h, t0 + h, GOLDEN_TOL);
    let (argmax, max_value) = if v >= best_v { (t, v) } else { (t0, best_v) };
    BracketedMax {
        argmax: argmax.rem_euclid(TAU),
        max_value,
        certified_resolution: h,
    }
}
