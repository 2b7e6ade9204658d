//! Scalar representing functions f_λ of two-point means.
//!
//! ```bash
//! cargo run --example representing_functions
//! ```

use gkemean::generator::{log_grid, Generator};
use gkemean::repfn::{rep_eval, rep_inverse, rep_range, DEFAULT_TOL};

fn main() -> gkemean::Result<()> {
    let lambda = 0.25;
    let xs = log_grid(0.01, 100.0, 5);

    print!("{:>12}", "x");
    for x in &xs {
        print!("{x:>11.3}");
    }
    println!();
    for g in Generator::catalogue() {
        print!("{:>12}", g.to_string());
        for &x in &xs {
            print!("{:>11.5}", rep_eval(&g, lambda, x, DEFAULT_TOL)?);
        }
        println!();
    }

    // Closed form for the Möbius generator at λ = 1/4.
    let m = Generator::moebius();
    for &x in &xs {
        let exact = 0.25 * ((1.0 - x) + ((1.0 - x).powi(2) + 16.0 * x).sqrt());
        let y = rep_eval(&m, lambda, x, DEFAULT_TOL)?;
        println!("moebius f(x={x:.3}) = {y:.12} (closed form {exact:.12})");
    }
    let range = rep_range(&m, lambda)?;
    println!("moebius range at 1/4: ({:.6}, {:.6})", range.lower, range.upper);

    let y = rep_eval(&Generator::log(), 0.3, 5.0, DEFAULT_TOL)?;
    println!("log: f(5) = {y:.12}, inverse gives back {:.12}", rep_inverse(&Generator::log(), 0.3, y)?);
    Ok(())
}
