//! The built-in generators, their ranges and the class checks.
//!
//! ```bash
//! cargo run --example generator_catalogue
//! ```

use gkemean::generator::{log_grid, Generator};

fn main() -> gkemean::Result<()> {
    let grid = log_grid(1e-6, 1e6, 241);
    println!("{:<12} {:>10} {:>10} {:>5} {:>6}", "spec", "g(0+)", "g(inf)", "case", "clean");
    for g in Generator::catalogue() {
        let r = g.range_endpoints();
        println!(
            "{:<12} {:>10.4} {:>10.4} {:>5} {:>6}",
            g.to_string(),
            r.lower,
            r.upper,
            r.case_id(),
            g.class_l_report(&grid).is_clean()
        );
    }

    let spec = "deform:2:power:0.5";
    let g: Generator = spec.parse()?;
    println!("{spec} -> {g}, g(4) = {}, power exponent {:?}", g.eval(4.0), g.power_exponent());
    assert_eq!(g.to_string(), spec);
    Ok(())
}
