//! Closed-form lower bound on the post-adjustment interception height against brute force.

use chauffeur::certificates::{problem1_oracle, problem2_oracle, sample_lemma4_state, solve_problem2};
use chauffeur::GameParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> chauffeur::Result<()> {
    let p = GameParams::with_ratio(0.3, 6.3, 0.0625, 0.1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    println!(
        "{:>10} {:>10} {:>10} {:>8} {:>6}",
        "closed", "relaxed", "unrelaxed", "lambda", "sigma"
    );
    for _ in 0..8 {
        let x = sample_lemma4_state(&mut rng, &p, 0.6, 3.0, 0.0);
        let sol = solve_problem2(&x, &p)?;
        let relaxed = problem2_oracle(&x, &p, 720)?;
        let unrelaxed = problem1_oracle(&x, &p, 360)?;
        println!(
            "{:>10.5} {:>10.5} {:>10} {:>8.4} {:>6}",
            sol.rho_hat,
            relaxed,
            format!("{:.5}", unrelaxed.to_f64()),
            sol.lambda2,
            sol.sigma
        );
    }
    Ok(())
}
