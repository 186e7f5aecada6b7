//! CHSH correlations at the maximal-violation settings (0, pi/4, pi/8,
//! 3pi/8) for the three descriptions, analytically and from seeded trials.
//!
//! ```bash
//! cargo run --example chsh_violation
//! ```

use biphoton::models::{ModelKind, SourceSpec};
use biphoton::state::BellKind;
use biphoton::stats::{chsh, chsh_sampled, ChshSettings, RngSeed};

fn main() -> Result<(), biphoton::Error> {
    let settings = ChshSettings::default();
    let n = 200_000;
    let seed = RngSeed(8);

    println!(
        "CHSH S at settings (a, a', b, b') = ({:.4}, {:.4}, {:.4}, {:.4}), {n} trials per pair:",
        settings.a, settings.a_prime, settings.b, settings.b_prime
    );
    println!(
        "{:<18} {:<15} {:>12} {:>12} {:>10}",
        "model", "source", "S analytic", "S sampled", "verdict"
    );
    for (model, source) in [
        (ModelKind::StandardQm, SourceSpec::Bell(BellKind::PhiPlus)),
        (ModelKind::CorrelatedRule, SourceSpec::CircularPair),
        (ModelKind::LocalCircular, SourceSpec::CircularPair),
    ] {
        let analytic = chsh(model, source, settings)?;
        let sampled = chsh_sampled(model, source, settings, n, seed)?;
        let verdict = if analytic.within_classical_bound() {
            "classical"
        } else {
            "violates"
        };
        println!(
            "{:<18} {:<15} {:>12.6} {:>12.6} {:>10}",
            model.name(),
            source.name(),
            analytic.s,
            sampled.s,
            verdict
        );
    }

    println!();
    println!(
        "both entangled descriptions reach 2*sqrt(2) ~ {:.6}; the factorized",
        2.0 * std::f64::consts::SQRT_2
    );
    println!("local model cannot exceed 2 (here its correlations vanish entirely).");
    Ok(())
}
