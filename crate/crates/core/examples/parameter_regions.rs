//! Which guarantees a capture radius, turning radius and speed ratio admit.

use chauffeur::certificates::{check_eq15, check_eq27, check_eq9, classify_region};
use chauffeur::cli::{alpha0, sweep_csv};

fn main() -> chauffeur::Result<()> {
    println!("green and blue curves cross at alpha0 = {:.7}", alpha0());
    let cases = [
        (0.1, 0.0625, 6.3),
        (0.5, 1.0, 2.0),
        (1.5, 1.0, 2.0),
        (3.2, 1.0, 2.0),
        (9.0, 1.0, 1.3),
        (30.0, 1.0, 1.2),
    ];
    println!(
        "{:>6} {:>7} {:>5} {:>6} {:>9} {:>9} {:>9}  eq9 eq15 eq27",
        "r", "kappa", "alpha", "region", "h", "h_bar", "blue"
    );
    for (r, kappa, alpha) in cases {
        let reg = classify_region(r, kappa, alpha)?;
        println!(
            "{r:>6} {kappa:>7} {alpha:>5} {:>6} {:>9.4} {:>9.4} {:>9.4}  {:<3} {:<4} {}",
            reg.label.as_str(),
            reg.h_alpha,
            reg.h_bar,
            reg.eq15_rhs,
            check_eq9(r, kappa, alpha)?,
            check_eq15(r, kappa, alpha)?,
            check_eq27(r, kappa, alpha)?
        );
    }
    let table = sweep_csv(1.05, 3.0, 8).expect("valid range");
    print!("{table}");
    Ok(())
}
