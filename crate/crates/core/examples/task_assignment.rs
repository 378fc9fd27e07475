//! Certificate graph and maximum matching for a small team, plus the fallback targets.

use chauffeur::cli::ScenarioFile;
use chauffeur::evasion::interception;
use chauffeur::matching::{assign, build_graph, max_matching, PairInput};
use chauffeur::Vec2;

const SCENARIO: &str = r#"{
  "goal": "half_plane_y_leq_0",
  "pursuers": [
    {"x": 0.0, "y": 0.5, "theta": 1.2, "speed": 0.3, "kappa": 0.0625, "capture_radius": 0.1, "model": "dubins"},
    {"x": 2.0, "y": 0.3, "theta": 1.6, "speed": 0.3, "kappa": 0.0625, "capture_radius": 0.1, "model": "simple"},
    {"x": 4.0, "y": 0.2, "theta": 4.0, "speed": 0.3, "kappa": 0.0625, "capture_radius": 0.1, "model": "dubins"}
  ],
  "evaders": [
    {"x": 0.3, "y": 1.2, "speed": 0.05, "strategy": "optimal"},
    {"x": 2.2, "y": 0.9, "speed": 0.05, "strategy": "optimal"},
    {"x": 3.5, "y": 1.5, "speed": 0.05, "strategy": "constant", "heading": 4.7},
    {"x": 5.0, "y": 0.6, "speed": 0.05, "strategy": "optimal"}
  ]
}"#;

fn main() -> chauffeur::Result<()> {
    let mut sc = ScenarioFile::parse(SCENARIO)
        .and_then(|f| f.to_scenario())
        .expect("valid scenario");
    // P1 starts on its interception heading against E1
    let alpha = sc.pursuers[0].speed / sc.evaders[0].speed;
    sc.pursuers[0].state.theta = interception(sc.pursuers[0].state.pos, sc.evaders[0].state.pos, alpha)?.theta_i;
    let (np, ne) = (sc.pursuers.len(), sc.evaders.len());
    let mut pairs = Vec::new();
    for i in 0..np {
        for j in 0..ne {
            let params = sc.params(i, j)?;
            pairs.push(PairInput {
                pursuer: i,
                evader: j,
                state: sc.joint_state(i, j),
                params,
                motion: sc.pursuers[i].motion,
            });
        }
    }
    let g = build_graph(np, ne, &pairs, 1e-6)?;
    for (&(i, j), c) in &g.edges {
        println!("edge P{} -> E{}: {}", i + 1, j + 1, c.kind.as_str());
    }
    let m = max_matching(&g);
    let pursuers: Vec<Vec2> = sc.pursuers.iter().map(|p| p.state.pos).collect();
    let evaders: Vec<Option<Vec2>> = sc.evaders.iter().map(|e| Some(e.state.pos)).collect();
    let a = assign(&m, &pursuers, &evaders);
    for i in 0..np {
        let how = if a.is_matched(i) {
            "matched"
        } else {
            "nearest unmatched"
        };
        match a.target(i) {
            Some(j) => println!("P{} chases E{} ({how})", i + 1, j + 1),
            None => println!("P{} idle", i + 1),
        }
    }
    Ok(())
}
