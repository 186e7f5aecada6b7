//! Circular-polarization detectors (quarter-wave plate + polaroid at
//! +-pi/4) on both arms. Matched detectors fire together on half the pairs
//! and crossed detectors never fire together, identically for the
//! state-vector description and for pairs with a definite shared
//! handedness.
//!
//! ```bash
//! cargo run --example circular_coincidence
//! ```

use biphoton::experiments::{circular_coincidence_matrix, circular_coincidence_tallies};
use biphoton::models::{ModelKind, SourceSpec};
use biphoton::state::{BellKind, Handedness};
use biphoton::stats::RngSeed;

fn main() -> Result<(), biphoton::Error> {
    let combos = [
        (ModelKind::StandardQm, SourceSpec::Bell(BellKind::PhiPlus)),
        (ModelKind::LocalCircular, SourceSpec::CircularPair),
    ];

    for (model, source) in combos {
        let matrix = circular_coincidence_matrix(model, source, 0.0, 0.0)?;
        println!("{} on {}:", model.name(), source.name());
        println!("  coincidence probabilities (A detector x B detector):");
        println!(
            "  {:>14} {:>10} {:>10}",
            "", "B: right", "B: left"
        );
        for ha in Handedness::BOTH {
            let row: Vec<String> = Handedness::BOTH
                .iter()
                .map(|hb| format!("{:>10.6}", matrix.coincidence(ha, *hb)))
                .collect();
            println!("  {:>14} {}", format!("A: {ha:?}"), row.join(" "));
        }

        let crossed = matrix.joint(Handedness::Right, Handedness::Left);
        println!(
            "  crossed R/L pairing: exactly one station clicks per pair (p = {:.6})",
            crossed.p_pa + crossed.p_ap
        );
        println!();
    }

    println!("empirical zero-cell check, 100000 pairs per pairing (standard-qm):");
    let tallies = circular_coincidence_tallies(
        ModelKind::StandardQm,
        SourceSpec::Bell(BellKind::PhiPlus),
        0.0,
        0.0,
        100_000,
        RngSeed(100),
    )?;
    println!(
        "  RR coincidences: {}   RL coincidences: {} (must be 0)",
        tallies[0][0].n_pp, tallies[0][1].n_pp
    );
    println!(
        "  LR coincidences: {} (must be 0)   LL coincidences: {}",
        tallies[1][0].n_pp, tallies[1][1].n_pp
    );

    println!();
    println!("matched settings cannot separate \"the pair was R or L all along\"");
    println!("from the entangled state vector: the matrices coincide cell by cell.");
    Ok(())
}
