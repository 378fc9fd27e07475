//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use chauffeur::certificates::{
    check_eq27, check_eq9, delta_bound, eq15_rhs, h_alpha, h_bar, lemma4_check, problem1_oracle, problem2_oracle,
    sample_lemma4_state, solve_problem2, CertificateKind,
};
use chauffeur::cli::{load_scenario, main_with_args};
use chauffeur::evasion::{er_goal_distance, heading_error, interception, ExtReal};
use chauffeur::matching::{max_matching_adj, Matching};
use chauffeur::model::{step_evader, step_pursuer};
use chauffeur::sim::{run, EventKind, SimConfig};
use chauffeur::strategy::{evader_optimal, heading_adjust_step, pursuit_sc_io};
use chauffeur::{GameParams, JointState, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn reference_params() -> GameParams {
    GameParams::with_ratio(0.3, 6.3, 0.0625, 0.1).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(elapsed: Duration, secs: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < secs, || {
        format!("runtime {:.2} s over budget {secs} s", elapsed.as_secs_f64())
    })
}

fn goal_distance(x: &JointState, p: &GameParams) -> Result<f64, String> {
    match er_goal_distance(x.x_p(), x.x_e(), p.alpha).map_err(|e| e.to_string())? {
        ExtReal::Finite(v) => Ok(v),
        other => Err(format!("separation lost: {other}")),
    }
}

fn c1_reference_parameters() -> Check {
    let start = Instant::now();
    let p = reference_params();
    ensure(check_eq9(p.r, p.kappa, p.alpha).unwrap(), || "check_eq9 fails".into())?;
    ensure(check_eq27(p.r, p.kappa, p.alpha).unwrap(), || "check_eq27 fails".into())?;
    let hb = h_bar(6.3);
    let blue = eq15_rhs(6.3);
    ensure((hb - 0.412958).abs() <= 1e-6, || format!("h_bar(6.3) = {hb}"))?;
    ensure((blue - 1.595987).abs() <= 1e-6, || format!("blue(6.3) = {blue}"))?;
    within_budget(start.elapsed(), 1.0)?;
    Ok(format!("h_bar={hb:.7} blue={blue:.7} h={:.7}", h_alpha(6.3).unwrap()))
}

fn c2_lemma1_bound() -> Check {
    let start = Instant::now();
    let mut worst_gap = f64::INFINITY;
    for k in 0..100 {
        let a = 1.05 * (20.0f64 / 1.05).powf(k as f64 / 99.0);
        let h = h_alpha(a).map_err(|e| e.to_string())?;
        ensure(h <= h_bar(a) + 1e-9, || {
            format!("h({a}) = {h} above h_bar {}", h_bar(a))
        })?;
        ensure(h >= 1.0 / (a - 1.0) - 1e-9, || format!("h({a}) = {h} below 1/(a-1)"))?;
        worst_gap = worst_gap.min(h_bar(a) - h);
    }
    within_budget(start.elapsed(), 10.0)?;
    Ok(format!("min(h_bar - h) = {worst_gap:.3e}"))
}

fn io_start(p: &GameParams) -> JointState {
    let xp = Vec2::new(-0.3, 0.9);
    let xe = Vec2::new(0.3, 1.8);
    JointState::new(xp, interception(xp, xe, p.alpha).unwrap().theta_i, xe)
}

fn c3_conservation() -> Check {
    let p = reference_params();
    let dt = 1e-4;
    let mut x = io_start(&p);
    let g0 = goal_distance(&x, &p)?;
    let mut drift: f64 = 0.0;
    let mut umax: f64 = 0.0;
    for _ in 0..10_000 {
        ensure(x.separation() > p.r, || "captured before t = 1".into())?;
        let ue = evader_optimal(&x, &p).map_err(|e| e.to_string())?;
        let u = pursuit_sc_io(&x, ue, &p).map_err(|e| e.to_string())?;
        umax = umax.max(u.value.abs());
        ensure(u.value.abs() <= 1.0 + 1e-9, || format!("|u_P| = {}", u.value.abs()))?;
        x.pursuer = step_pursuer(x.pursuer, u.value, dt, &p).map_err(|e| e.to_string())?;
        x.evader = step_evader(x.evader, ue, dt, &p).map_err(|e| e.to_string())?;
        drift = drift.max((goal_distance(&x, &p)? - g0).abs());
        ensure(drift <= 1e-3, || format!("drift {drift}"))?;
    }
    Ok(format!("max drift {drift:.3e}, max |u_P| {umax:.4}"))
}

fn c4_monotonicity() -> Check {
    let p = reference_params();
    let dt = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let ue = Vec2::from_angle(rng.gen_range(0.0..TAU));
        let mut x = io_start(&p);
        let mut prev = goal_distance(&x, &p)?;
        for _ in 0..10_000 {
            if x.separation() <= p.r {
                break;
            }
            let u = pursuit_sc_io(&x, ue, &p).map_err(|e| e.to_string())?;
            x.pursuer = step_pursuer(x.pursuer, u.value, dt, &p).map_err(|e| e.to_string())?;
            x.evader = step_evader(x.evader, ue, dt, &p).map_err(|e| e.to_string())?;
            let g = goal_distance(&x, &p)?;
            worst = worst.max(prev - g);
            ensure(prev - g <= 1e-6, || {
                format!("decrease {} at heading {}", prev - g, ue.angle())
            })?;
            prev = g;
        }
    }
    Ok(format!("largest one-step decrease {worst:.3e}"))
}

/// Reference parameters for even trials; otherwise random parameters strictly above the blue curve.
fn eq15_params(rng: &mut ChaCha8Rng, trial: usize) -> GameParams {
    if trial % 2 == 0 {
        return reference_params();
    }
    let alpha = rng.gen_range(2.0..10.0);
    let kappa = rng.gen_range(0.02..0.1);
    let r = kappa * eq15_rhs(alpha) * rng.gen_range(1.01..1.5);
    GameParams::with_ratio(rng.gen_range(0.2..1.0), alpha, kappa, r).unwrap()
}

fn c5_heading_adjustment() -> Check {
    let dt = 1e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_ratio: f64 = 0.0;
    for trial in 0..100 {
        let p = eq15_params(&mut rng, trial);
        ensure(
            chauffeur::certificates::check_eq15(p.r, p.kappa, p.alpha).unwrap(),
            || "check_eq15 fails".into(),
        )?;
        let x0 = sample_lemma4_state(&mut rng, &p, 0.6, 3.0, 0.0);
        ensure(lemma4_check(&x0, &p, 1e-6).unwrap().holds(), || {
            "sampled state misses heading-adjustment premises".into()
        })?;
        let delta = delta_bound(&x0, &p).map_err(|e| e.to_string())?.delta;
        let ue = Vec2::from_angle(rng.gen_range(0.0..TAU));
        let mut x = x0;
        let mut q = heading_error(&x, &p).unwrap().cos();
        let mut t = 0.0;
        loop {
            ensure(x.separation() > p.r, || format!("trial {trial}: captured before IO"))?;
            ensure(t <= delta + dt, || format!("trial {trial}: no IO by Δ = {delta}"))?;
            let step = heading_adjust_step(&x, ue, &p, dt, 1e-6).map_err(|e| e.to_string())?;
            x.pursuer = step_pursuer(x.pursuer, step.control, dt, &p).map_err(|e| e.to_string())?;
            x.evader = step_evader(x.evader, ue, dt, &p).map_err(|e| e.to_string())?;
            t += dt;
            let err = heading_error(&x, &p).unwrap();
            ensure(err.cos() >= q, || {
                format!("trial {trial}: cos fell from {q} to {}", err.cos())
            })?;
            q = err.cos();
            if err.abs() <= 1e-6 {
                break;
            }
        }
        ensure(t <= delta, || format!("trial {trial}: IO at {t} after Δ = {delta}"))?;
        worst_ratio = worst_ratio.max(t / delta);
    }
    Ok(format!("max t_IO/Δ = {worst_ratio:.3}"))
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

fn c6_closed_form_vs_oracle() -> Check {
    let start = Instant::now();
    let p = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let x = sample_lemma4_state(&mut rng, &p, 0.6, 3.0, 0.0);
        let sol = solve_problem2(&x, &p).map_err(|e| format!("trial {trial}: {e}"))?;
        let oracle = problem2_oracle(&x, &p, 720).map_err(|e| e.to_string())?;
        let diff = (sol.rho_hat - oracle).abs();
        worst = worst.max(diff / (1.0 + sol.rho_hat.abs()));
        ensure(diff <= 1e-3 * (1.0 + sol.rho_hat.abs()), || {
            format!("trial {trial}: {} vs {oracle}", sol.rho_hat)
        })?;
        let x_c = delta_bound(&x, &p).unwrap().x_c;
        let re = TAU * p.kappa / p.alpha;
        ensure((sol.x_e_star.distance(x.x_e()) - re).abs() <= 1e-9 * re, || {
            format!("trial {trial}: evader constraint")
        })?;
        ensure((sol.x_p_star.distance(x_c) - p.kappa).abs() <= 1e-9 * p.kappa, || {
            format!("trial {trial}: pursuer constraint")
        })?;
        let scale = x_c.distance(x.x_e());
        let s = sign(x_c.x - x.x_e().x, scale);
        ensure(
            sol.sigma == s
                && sign(sol.x_p_star.x - x_c.x, scale) == s
                && sign(x.x_e().x - sol.x_e_star.x, scale) == s
                && sign(sol.x_p_star.x - sol.x_e_star.x, scale) == s,
            || format!("trial {trial}: sign law"),
        )?;
        ensure(
            sol.lambda2 >= p.alpha - 1.0 - 1e-9 && sol.lambda2 <= p.alpha + 1.0 + 1e-9,
            || format!("trial {trial}: lambda {}", sol.lambda2),
        )?;
        ensure(sol.kkt_residual < 1e-6, || {
            format!("trial {trial}: KKT residual {}", sol.kkt_residual)
        })?;
    }
    within_budget(start.elapsed(), 60.0)?;
    Ok(format!("max relative gap {worst:.3e}"))
}

fn c7_sandwich() -> Check {
    let start = Instant::now();
    let p = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut slack = f64::INFINITY;
    for trial in 0..50 {
        let x = sample_lemma4_state(&mut rng, &p, 0.6, 3.0, 0.0);
        let rho = solve_problem2(&x, &p)
            .map_err(|e| format!("trial {trial}: {e}"))?
            .rho_hat;
        match problem1_oracle(&x, &p, 720).map_err(|e| e.to_string())? {
            ExtReal::Finite(v) => {
                ensure(rho <= v + 1e-3, || format!("trial {trial}: {rho} > {v}"))?;
                slack = slack.min(v - rho);
            }
            ExtReal::PosInfinity => {}
            ExtReal::NegInfinity => return Err(format!("trial {trial}: oracle diverged")),
        }
    }
    within_budget(start.elapsed(), 120.0)?;
    Ok(format!("min(problem1 - rho_hat) = {slack:.3e}"))
}

fn brute_force(adj: &[Vec<usize>], i: usize, used: &mut Vec<bool>) -> usize {
    if i == adj.len() {
        return 0;
    }
    let mut best = brute_force(adj, i + 1, used);
    for &j in &adj[i] {
        if !used[j] {
            used[j] = true;
            best = best.max(1 + brute_force(adj, i + 1, used));
            used[j] = false;
        }
    }
    best
}

fn c8_matching() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut total = 0;
    for trial in 0..200 {
        let np = rng.gen_range(1..=8);
        let ne = rng.gen_range(1..=8);
        let density = rng.gen_range(0.05..0.9);
        let adj: Vec<Vec<usize>> = (0..np)
            .map(|_| (0..ne).filter(|_| rng.gen_bool(density)).collect())
            .collect();
        let m = max_matching_adj(ne, &adj, &Matching::new());
        let mut seen = vec![false; ne];
        for (&i, &j) in &m {
            ensure(adj[i].contains(&j) && !seen[j], || {
                format!("trial {trial}: invalid matching")
            })?;
            seen[j] = true;
        }
        let best = brute_force(&adj, 0, &mut vec![false; ne]);
        ensure(m.len() == best, || {
            format!("trial {trial}: {} vs optimum {best}", m.len())
        })?;
        total += best;
    }
    Ok(format!("200 graphs, {total} matched pairs in total"))
}

fn c9_golden_run() -> Check {
    let start = Instant::now();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/5v5_reference.json");
    let sc = load_scenario(&path)?;
    let cfg = SimConfig::for_scenario(&sc);
    let res = run(&sc, &cfg).map_err(|e| e.to_string())?;
    let first = res.graph_history.first().ok_or("no graph recorded")?;
    ensure(first.t == 0.0, || "first graph not at t = 0".into())?;
    let initial: Vec<(usize, usize)> = first.edges.iter().map(|&(i, j, _)| (i, j)).collect();
    ensure(initial == vec![(0, 3), (2, 2), (3, 1), (4, 0)], || {
        format!("initial edges {initial:?}")
    })?;
    let late = res
        .graph_history
        .iter()
        .find(|g| {
            g.edges
                .iter()
                .any(|&(i, j, k)| (i, j) == (1, 4) && k != CertificateKind::None)
        })
        .ok_or("pair (P2, E5) never certified")?;
    ensure(late.t > 0.0, || "pair (P2, E5) certified at t = 0".into())?;
    let captures = res.count(EventKind::Capture);
    let arrivals = res.count(EventKind::GoalArrival);
    ensure(captures == 5 && arrivals == 0, || {
        format!("{captures} captures, {arrivals} goal arrivals")
    })?;
    let again = run(&sc, &cfg).map_err(|e| e.to_string())?;
    ensure(again == res, || "rerun differs".into())?;
    within_budget(start.elapsed(), 10.0)?;
    Ok(format!(
        "P2-E5 certified at t={:.3}, captures={captures}, goal_arrivals={arrivals}, final t={:.3}",
        late.t, res.final_time
    ))
}

fn c10_region_sweep() -> Check {
    let dir = std::env::temp_dir().join(format!("chauffeur-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let out_path = dir.join("regions.csv");
    let args = [
        "chauffeur",
        "sweep-regions",
        "--alpha-min",
        "1.05",
        "--alpha-max",
        "10",
        "--samples",
        "500",
        "--out",
        out_path.to_str().unwrap(),
    ];
    let code = main_with_args(args, &mut std::io::sink(), &mut std::io::sink());
    ensure(code == 0, || format!("exit code {code}"))?;
    let text = std::fs::read_to_string(&out_path).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty output")?;
    let a0: f64 = header
        .strip_prefix("# alpha0=")
        .ok_or_else(|| format!("bad header {header}"))?
        .trim()
        .parse()
        .map_err(|_| format!("bad header {header}"))?;
    ensure((a0 - 1.4655712).abs() <= 1e-5, || format!("alpha0 {a0}"))?;
    ensure(lines.next() == Some("alpha,h_alpha,h_bar,eq15_rhs"), || {
        "bad column header".into()
    })?;
    let rows: Vec<[f64; 4]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect();
    ensure(rows.len() == 500, || format!("{} rows", rows.len()))?;
    for r in &rows {
        ensure(r[1] <= r[2], || format!("h above h_bar at alpha {}", r[0]))?;
    }
    // sign change of green minus blue between consecutive rows
    let bracket = rows
        .windows(2)
        .find(|w| (w[0][2] - w[0][3]) > 0.0 && (w[1][2] - w[1][3]) <= 0.0)
        .ok_or("no green/blue crossing")?;
    ensure(bracket[0][0] <= a0 && a0 <= bracket[1][0], || {
        format!("crossing [{}, {}]", bracket[0][0], bracket[1][0])
    })?;
    // refine the crossing between the bracketing rows by bisection on the closed forms
    let (mut lo, mut hi) = (bracket[0][0], bracket[1][0]);
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if h_bar(m) > eq15_rhs(m) {
            lo = m;
        } else {
            hi = m;
        }
    }
    ensure((lo - 1.4655712).abs() <= 1e-5, || format!("refined crossing {lo}"))?;
    Ok(format!(
        "alpha0={a0:.7}, crossing in [{:.4}, {:.4}], refined {lo:.7}",
        bracket[0][0], bracket[1][0]
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("reference-parameter certificate check", c1_reference_parameters),
        ("h(alpha) below the closed-form bound", c2_lemma1_bound),
        ("goal distance conserved against the optimal evader", c3_conservation),
        ("goal distance monotone against constant headings", c4_monotonicity),
        ("heading adjustment reaches IO within the bound", c5_heading_adjustment),
        (
            "closed-form relaxation matches the brute-force oracle",
            c6_closed_form_vs_oracle,
        ),
        ("relaxation bounds the unrelaxed problem", c7_sandwich),
        ("maximum matching is optimal", c8_matching),
        ("5v5 golden run", c9_golden_run),
        ("region diagram data", c10_region_sweep),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2} s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2} s): {why}", k + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
