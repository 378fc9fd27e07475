//! The bundled five-on-five scenario: receding-horizon matching until every evader is caught.

use std::path::Path;

use chauffeur::cli::{certificate_table, load_scenario};
use chauffeur::sim::{run, EventKind, SimConfig};

fn main() -> Result<(), String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/5v5_reference.json");
    let sc = load_scenario(&path)?;
    for (i, j, kind) in certificate_table(&sc)? {
        if kind.as_str() != "None" {
            println!("t=0: P{} certified against E{} by {}", i + 1, j + 1, kind.as_str());
        }
    }
    let res = run(&sc, &SimConfig::for_scenario(&sc)).map_err(|e| e.to_string())?;
    for e in &res.events {
        if matches!(
            e.kind,
            EventKind::Capture | EventKind::GoalArrival | EventKind::IoAchieved
        ) {
            let who = |k: Option<usize>, c: char| k.map(|k| format!("{c}{}", k + 1)).unwrap_or_default();
            println!(
                "t={:.3} {} {} {}",
                e.t,
                e.kind.as_str(),
                who(e.pursuer, 'P'),
                who(e.evader, 'E')
            );
        }
    }
    println!(
        "captures={} goal_arrivals={} final_time={:.3}",
        res.count(EventKind::Capture),
        res.count(EventKind::GoalArrival),
        res.final_time
    );
    Ok(())
}
