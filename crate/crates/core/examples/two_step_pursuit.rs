//! A pursuer facing the wrong way turns onto the interception heading, then pursues.

use std::f64::consts::PI;

use chauffeur::certificates::{certify_win, delta_bound, sample_lemma4_state, CertificateKind};
use chauffeur::model::{EvaderSpec, EvaderState, EvaderStrategy, MotionKind, PursuerSpec, PursuerState};
use chauffeur::sim::{run, EventKind, SimConfig};
use chauffeur::{GameParams, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> chauffeur::Result<()> {
    let p = GameParams::with_ratio(0.3, 6.3, 0.0625, 0.1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (x, cert) = loop {
        let x = sample_lemma4_state(&mut rng, &p, 0.8, 2.5, 0.5);
        let cert = certify_win(&x, &p)?;
        if cert.kind == CertificateKind::Theorem5 {
            break (x, cert);
        }
    };
    let db = delta_bound(&x, &p)?;
    println!(
        "heading error {:.3} rad, adjustment bound {:.4}, lowest reachable interception height {:.4}",
        cert.evidence.heading_error,
        db.delta,
        cert.evidence.rho_hat.unwrap_or(f64::NAN)
    );

    for heading in [1.1 * PI, 1.5 * PI, 1.9 * PI] {
        let sc = Scenario {
            pursuers: vec![PursuerSpec {
                state: PursuerState::new(x.x_p(), x.pursuer.theta),
                motion: MotionKind::Dubins,
                speed: p.v_p,
                kappa: p.kappa,
                capture_radius: p.r,
            }],
            evaders: vec![EvaderSpec {
                state: EvaderState::new(x.x_e()),
                speed: p.v_e,
                strategy: EvaderStrategy::Constant { heading },
            }],
            seed: 0,
        };
        let res = run(&sc, &SimConfig::for_scenario(&sc))?;
        let at = |k| {
            res.events
                .iter()
                .find(|e| e.kind == k)
                .map(|e| format!("{:.3}", e.t))
                .unwrap_or("-".into())
        };
        println!(
            "evader heading {heading:.3}: oriented at t={}, captured at t={}, goal arrivals {}",
            at(EventKind::IoAchieved),
            at(EventKind::Capture),
            res.count(EventKind::GoalArrival)
        );
    }
    Ok(())
}
