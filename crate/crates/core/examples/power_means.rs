//! Power means interpolate harmonic, geometric and arithmetic means.
//!
//! ```bash
//! cargo run --example power_means
//! ```

use gkemean::solver::{arithmetic_mean, harmonic_mean, power_mean, SolverConfig, WeightVector};
use gkemean::spd::{loewner_leq, random_spd};

fn main() -> gkemean::Result<()> {
    let mats: Vec<_> = (0..3).map(|s| random_spd(3, 2.5, 7 + s)).collect();
    let weights = WeightVector::new(vec![0.5, 0.3, 0.2])?;
    let config = SolverConfig::default();

    println!("{:>6}  {:>10}  {:>6}", "t", "||P_t||", "iters");
    let mut previous = None;
    for k in -4..=4 {
        let t = k as f64 / 4.0;
        let r = power_mean(&weights, &mats, t, &config)?;
        println!("{t:>6.2}  {:>10.6}  {:>6}", r.solution.norm2()?, r.iterations);
        if let Some(prev) = previous {
            assert!(loewner_leq(&prev, &r.solution, 1e-8)?, "P_t should increase with t");
        }
        previous = Some(r.solution);
    }

    let h = harmonic_mean(&weights, &mats)?;
    let a = arithmetic_mean(&weights, &mats)?;
    println!("||harmonic|| = {:.6}, ||arithmetic|| = {:.6}", h.norm2()?, a.norm2()?);
    Ok(())
}
