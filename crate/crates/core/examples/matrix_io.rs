//! Save matrices to JSON and drive the command-line interface in-process.
//!
//! ```bash
//! cargo run --example matrix_io
//! ```

use gkemean::cli::{load_matrices, run, save_matrices};
use gkemean::spd::random_spd;

fn main() -> gkemean::Result<()> {
    let dir = std::env::temp_dir().join(format!("gkemean-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| gkemean::Error::Io(e.to_string()))?;
    let path = dir.join("inputs.json");

    let mats = vec![random_spd(2, 1.0, 1), random_spd(2, 1.0, 2)];
    save_matrices(&path, &mats)?;
    assert_eq!(load_matrices(&path)?, mats);

    let out = run([
        "gkemean",
        "mean",
        "--g",
        "power:0.5",
        "--weights",
        "0.25,0.75",
        "--inputs",
        path.to_str().expect("utf-8 temp path"),
    ]);
    println!("exit {}\n{}{}", out.code, out.stdout, out.stderr);

    let out = run(["gkemean", "repfn", "--g", "moebius", "--lambda", "0.5", "--xmin", "1", "--xmax", "4", "--points", "2"]);
    print!("{}", out.stdout);

    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
