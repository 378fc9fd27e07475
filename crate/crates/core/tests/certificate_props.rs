use std::f64::consts::TAU;

use chauffeur::certificates::{
    certify_win, classify_region, delta_bound, h_alpha, h_objective, problem1_report, problem2_oracle,
    sample_lemma4_state, solve_problem2, CertificateKind, RegionLabel,
};
use chauffeur::evasion::{er_goal_distance, interception, ExtReal};
use chauffeur::model::{EvaderSpec, EvaderState, EvaderStrategy, MotionKind, PursuerSpec, PursuerState};
use chauffeur::sim::{run, AgentKind, EventKind, SimConfig};
use chauffeur::{GameParams, JointState, Scenario, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference_params() -> GameParams {
    GameParams::with_ratio(0.3, 6.3, 0.0625, 0.1).unwrap()
}

fn green(alpha: f64) -> f64 {
    (2.0 * alpha - 1.0) / (alpha - 1.0).powi(2)
}

fn blue(alpha: f64) -> f64 {
    (alpha + 1.0).powi(2) / (alpha * (alpha - 1.0))
}

/// Independent relaxed-problem minimum: coarse angle lattice, then a shrinking local lattice.
fn relaxed_min(x_c: Vec2, x_e: Vec2, alpha: f64, kappa: f64) -> f64 {
    let re = TAU * kappa / alpha;
    let f = |a: f64, b: f64| {
        let xp = x_c + Vec2::from_angle(a) * kappa;
        let xe = x_e + Vec2::from_angle(b) * re;
        alpha * alpha * xe.y - xp.y - alpha * xp.distance(xe)
    };
    let n = 400;
    let h = TAU / n as f64;
    let (mut a0, mut b0, mut best) = (0.0, 0.0, f64::INFINITY);
    for i in 0..n {
        for j in 0..n {
            let v = f(h * i as f64, h * j as f64);
            if v < best {
                (a0, b0, best) = (h * i as f64, h * j as f64, v);
            }
        }
    }
    let mut w = h;
    while w > 1e-12 {
        let (ca, cb) = (a0, b0);
        for i in -4..=4 {
            for j in -4..=4 {
                let (a, b) = (ca + w * i as f64 / 4.0, cb + w * j as f64 / 4.0);
                let v = f(a, b);
                if v < best {
                    (a0, b0, best) = (a, b, v);
                }
            }
        }
        w *= 0.5;
    }
    best / (alpha * alpha - 1.0)
}

fn sign(v: f64, scale: f64) -> i8 {
    if v.abs() <= 1e-9 * (1.0 + scale) {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

#[test]
fn h_below_closed_form_bound() {
    for k in 0..100 {
        let alpha = 1.05 * (20.0f64 / 1.05).powf(k as f64 / 99.0);
        let h = h_alpha(alpha).unwrap();
        assert!(h <= green(alpha) + 1e-9, "alpha {alpha}: {h}");
        assert!(h >= h_objective(alpha, 0.0, -1.0) - 1e-12);
    }
}

#[test]
fn region_label_from_comparisons() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = [false; 5];
    for _ in 0..2000 {
        let alpha = rng.gen_range(1.05..12.0);
        let kappa = rng.gen_range(0.05..1.0);
        let ratio = 10f64.powf(rng.gen_range(-1.5..2.0));
        let reg = classify_region(ratio * kappa, kappa, alpha).unwrap();
        assert!(reg.h_alpha > 0.0 && reg.h_bar > 0.0 && reg.eq15_rhs > 0.0);
        assert!((reg.h_bar - green(alpha)).abs() < 1e-12 * green(alpha));
        assert!((reg.eq15_rhs - blue(alpha)).abs() < 1e-12 * blue(alpha));
        let red = reg.ratio >= reg.h_alpha;
        let grn = reg.ratio >= green(alpha);
        let blu = reg.ratio > blue(alpha);
        // red sits under both other curves
        assert!(reg.h_alpha < green(alpha).min(blue(alpha)));
        let want = match (red, grn, blu) {
            (false, _, _) => RegionLabel::I,
            (true, false, false) => RegionLabel::III,
            (true, true, false) => RegionLabel::V,
            (true, false, true) => RegionLabel::II,
            (true, true, true) => RegionLabel::IV,
        };
        assert_eq!(reg.label, want);
        assert_eq!(
            RegionLabel::from_comparisons(reg.above_red(), reg.above_green(), reg.above_blue()),
            reg.label
        );
        seen[reg.label as usize] = true;
    }
    assert!(seen.iter().all(|&s| s), "{seen:?}");
}

#[test]
fn delta_bound_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5000 {
        let p = GameParams::with_ratio(
            rng.gen_range(0.1..2.0),
            rng.gen_range(1.1..10.0),
            rng.gen_range(0.01..1.0),
            0.1,
        )
        .unwrap();
        let xe = Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0));
        let xp = xe + Vec2::from_angle(rng.gen_range(0.0..TAU)) * rng.gen_range(0.05..4.0);
        let x = JointState::new(xp, rng.gen_range(0.0..TAU), xe);
        let db = match delta_bound(&x, &p) {
            Ok(db) => db,
            Err(_) => continue,
        };
        assert!(db.delta > 0.0 && db.delta <= TAU * p.kappa / p.v_p * (1.0 + 1e-12));
        assert!(db.n <= 1);
        assert!((db.x_c.distance(xp) - p.kappa).abs() <= 1e-12 * (1.0 + p.kappa));
    }
}

#[test]
fn problem2_solution_invariants() {
    let p = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..200 {
        let x = sample_lemma4_state(&mut rng, &p, 0.6, 3.0, 0.0);
        let sol = solve_problem2(&x, &p).unwrap();
        let x_c = delta_bound(&x, &p).unwrap().x_c;
        let re = TAU * p.kappa / p.alpha;
        assert!((sol.x_e_star.distance(x.x_e()) - re).abs() <= 1e-9 * re);
        assert!((sol.x_p_star.distance(x_c) - p.kappa).abs() <= 1e-9 * p.kappa);
        let scale = x_c.distance(x.x_e());
        let s = sign(x_c.x - x.x_e().x, scale);
        assert_eq!(sol.sigma, s);
        assert_eq!(sign(sol.x_p_star.x - x_c.x, scale), s);
        assert_eq!(sign(x.x_e().x - sol.x_e_star.x, scale), s);
        assert_eq!(sign(sol.x_p_star.x - sol.x_e_star.x, scale), s);
        assert!(sol.lambda2 >= p.alpha - 1.0 - 1e-9 && sol.lambda2 <= p.alpha + 1.0 + 1e-9);
        let a2 = p.alpha * p.alpha;
        let obj = a2 * sol.x_e_star.y - sol.x_p_star.y - p.alpha * sol.x_p_star.distance(sol.x_e_star);
        assert_eq!(sol.objective, obj);
        assert!((sol.rho_hat - obj / (a2 - 1.0)).abs() <= 1e-15 * (1.0 + obj.abs()));
        assert!(sol.kkt_residual < 1e-6);
    }
}

#[test]
fn closed_form_matches_brute_force() {
    let p = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let x = sample_lemma4_state(&mut rng, &p, 0.6, 3.0, 0.0);
        let sol = solve_problem2(&x, &p).unwrap();
        let x_c = delta_bound(&x, &p).unwrap().x_c;
        let brute = relaxed_min(x_c, x.x_e(), p.alpha, p.kappa);
        let lib = problem2_oracle(&x, &p, 720).unwrap();
        let tol = 1e-3 * (1.0 + brute.abs());
        assert!((sol.rho_hat - brute).abs() <= tol, "{} vs {}", sol.rho_hat, brute);
        assert!((lib - brute).abs() <= tol);
        // the closed form is a global minimum
        assert!(sol.rho_hat <= brute + 1e-9 * (1.0 + brute.abs()));
    }
}

#[test]
fn relaxation_is_a_lower_bound() {
    let p = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..50 {
        let x = sample_lemma4_state(&mut rng, &p, 0.6, 3.0, 0.0);
        let sol = solve_problem2(&x, &p).unwrap();
        let delta = delta_bound(&x, &p).unwrap().delta;
        let rep = problem1_report(&x, &p, 360).unwrap();
        assert_eq!(rep.unterminated, 0);
        assert!(rep.max_termination_time <= delta * (1.0 + 1e-9));
        match rep.value {
            ExtReal::Finite(v) => assert!(sol.rho_hat <= v + 1e-3, "{} > {v}", sol.rho_hat),
            ExtReal::PosInfinity => {}
            ExtReal::NegInfinity => panic!("unexpected"),
        }
    }
}

fn one_on_one(xp: Vec2, theta: f64, xe: Vec2, p: &GameParams) -> Scenario {
    Scenario {
        pursuers: vec![PursuerSpec {
            state: PursuerState::new(xp, theta),
            motion: MotionKind::Dubins,
            speed: p.v_p,
            kappa: p.kappa,
            capture_radius: p.r,
        }],
        evaders: vec![EvaderSpec {
            state: EvaderState::new(xe),
            speed: p.v_e,
            strategy: EvaderStrategy::Optimal,
        }],
        seed: 0,
    }
}

#[test]
fn theorem2_certificate_wins_in_simulation() {
    let p = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0;
    while checked < 20 {
        let xe = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.5..3.0));
        let xp = xe + Vec2::from_angle(rng.gen_range(0.0..TAU)) * rng.gen_range(0.3..2.0);
        let th = interception(xp, xe, p.alpha).unwrap().theta_i;
        let x = JointState::new(xp, th, xe);
        if certify_win(&x, &p).unwrap().kind != CertificateKind::Theorem2 {
            continue;
        }
        checked += 1;
        let res = run(
            &one_on_one(xp, th, xe, &p),
            &SimConfig {
                max_time: 30.0,
                ..SimConfig::default()
            },
        )
        .unwrap();
        assert_eq!(res.count(EventKind::GoalArrival), 0);
        assert_eq!(res.count(EventKind::Capture), 1);
        let pt = &res.trajectory(AgentKind::Pursuer, 0).unwrap().points;
        let et = &res.trajectory(AgentKind::Evader, 0).unwrap().points;
        for (a, b) in pt.iter().zip(et) {
            assert!(b.pos.y > 0.0);
            if a.pos.distance(b.pos) > p.r {
                let g = er_goal_distance(a.pos, b.pos, p.alpha).unwrap();
                assert!(matches!(g, ExtReal::Finite(v) if v >= -1e-6), "SC lost at t={}", a.t);
            }
        }
    }
}
