//! Weighted Karcher mean of random SPD matrices.
//!
//! ```bash
//! cargo run --example karcher_mean
//! ```

use gkemean::solver::{karcher_mean, SolverConfig, WeightVector};
use gkemean::spd::{random_spd, thompson_distance};

fn main() -> gkemean::Result<()> {
    let mats: Vec<_> = (0..4).map(|s| random_spd(4, 3.0, 100 + s)).collect();
    let weights = WeightVector::new(vec![0.1, 0.2, 0.3, 0.4])?;

    let report = karcher_mean(&weights, &mats, &SolverConfig::default())?;
    println!(
        "karcher mean: {} iterations ({} Newton), residual {:.2e}",
        report.iterations, report.newton_steps, report.residual
    );
    println!("eigenvalues {:?}", report.solution.eigenvalues()?);

    // Two matrices: the geodesic closed form.
    let pair = WeightVector::pair(0.3)?;
    let two = karcher_mean(&pair, &mats[..2], &SolverConfig::default())?;
    let geo = mats[0].geodesic(&mats[1], 0.3)?;
    println!(
        "two-point mean vs A #_0.3 B: Thompson distance {:.2e}",
        thompson_distance(&two.solution, &geo)?
    );

    // The Karcher mean commutes with inversion.
    let inverses = mats.iter().map(|a| a.inverse()).collect::<gkemean::Result<Vec<_>>>()?;
    let of_inverses = karcher_mean(&weights, &inverses, &SolverConfig::default())?;
    println!(
        "inversion duality: Thompson distance {:.2e}",
        thompson_distance(&of_inverses.solution.inverse()?, &report.solution)?
    );
    Ok(())
}
