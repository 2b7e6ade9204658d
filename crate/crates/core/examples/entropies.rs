//! Relative and Tsallis operator entropies.
//!
//! ```bash
//! cargo run --example entropies
//! ```

use gkemean::solver::{relative_entropy, tsallis_entropy};
use gkemean::spd::random_spd;

fn main() -> gkemean::Result<()> {
    let a = random_spd(3, 2.0, 1);
    let b = random_spd(3, 2.0, 2);

    let s = relative_entropy(&a, &b)?;
    println!("S(A|B) trace = {:.10}", s.trace());
    for t in [1.0, 0.5, 0.1, 1e-3, 1e-6] {
        let tt = tsallis_entropy(&a, &b, t)?;
        let gap = (&tt - &s).frobenius_norm() / s.frobenius_norm();
        println!("T_{t:<6} trace = {:>14.10}  relative gap to S = {gap:.2e}", tt.trace());
    }
    let t1 = tsallis_entropy(&a, &b, 1.0)?;
    println!(
        "T_1 - (B - A) = {:.2e}",
        (&t1 - &(b.matrix() - a.matrix())).max_abs()
    );
    Ok(())
}
