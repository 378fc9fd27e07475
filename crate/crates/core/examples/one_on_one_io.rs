//! One pursuer already oriented at the interception point holds the evader off the goal.

use chauffeur::certificates::certify_win;
use chauffeur::evasion::{er_goal_distance, interception};
use chauffeur::model::{EvaderSpec, EvaderState, EvaderStrategy, MotionKind, PursuerSpec, PursuerState};
use chauffeur::sim::{run, AgentKind, SimConfig};
use chauffeur::{GameParams, JointState, Scenario, Vec2};

fn main() -> chauffeur::Result<()> {
    let p = GameParams::with_ratio(0.3, 6.3, 0.0625, 0.1)?;
    let xp = Vec2::new(0.0, 1.0);
    let xe = Vec2::new(0.4, 2.0);
    let ip = interception(xp, xe, p.alpha)?;
    let x = JointState::new(xp, ip.theta_i, xe);
    let cert = certify_win(&x, &p)?;
    println!(
        "x_I = ({:.4}, {:.4}), certificate {}",
        ip.x_i.x,
        ip.x_i.y,
        cert.kind.as_str()
    );

    let sc = Scenario {
        pursuers: vec![PursuerSpec {
            state: PursuerState::new(xp, ip.theta_i),
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
    };
    let res = run(&sc, &SimConfig::for_scenario(&sc))?;
    let pt = &res.trajectory(AgentKind::Pursuer, 0).expect("pursuer row").points;
    let et = &res.trajectory(AgentKind::Evader, 0).expect("evader row").points;
    for k in (0..pt.len()).step_by(500) {
        let g = er_goal_distance(pt[k].pos, et[k].pos, p.alpha)?;
        println!("t={:6.3}  goal distance of the evasion region {g}", pt[k].t);
    }
    let o = res.outcome[0];
    println!(
        "evader {} at t={:.4}",
        o.status.as_str(),
        o.time.unwrap_or(res.final_time)
    );
    Ok(())
}
