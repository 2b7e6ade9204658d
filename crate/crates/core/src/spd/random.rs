use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Matrix, SpdMatrix};

/// Largest log-condition accepted by [`random_spd`]; beyond it the matrix
/// would fall under the positivity cutoff.
pub const MAX_LOG_CONDITION: f64 = 25.0;

/// Reproducible random SPD matrix `Q · diag(e^{s₁}, …, e^{sₙ}) · Qᵀ` with `Q`
/// Haar-like orthogonal and log-eigenvalues spread over
/// `[-log_condition/2, log_condition/2]`, both ends attained when `dim ≥ 2`.
///
/// Panics if `dim == 0` or `log_condition` is outside `[0, MAX_LOG_CONDITION]`.
pub fn random_spd(dim: usize, log_condition: f64, seed: u64) -> SpdMatrix {
    assert!(dim >= 1, "dim must be at least 1");
    assert!(
        (0.0..=MAX_LOG_CONDITION).contains(&log_condition),
        "log_condition {log_condition} outside [0, {MAX_LOG_CONDITION}]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.5 * log_condition;

    let mut logs: Vec<f64> = (0..dim).map(|_| rng.random_range(-half..=half)).collect();
    if dim >= 2 {
        logs[0] = -half;
        logs[dim - 1] = half;
    } else {
        logs[0] = 0.0;
    }
    let values: Vec<f64> = logs.iter().map(|s| s.exp()).collect();

    let q = random_orthogonal(dim, &mut rng);
    let d = Matrix::diag(&values);
    let m = q.matmul(&d).matmul(&q.transpose()).symmetrized();
    SpdMatrix::new(m).expect("random_spd produced a matrix outside the SPD cone")
}

/// Modified Gram-Schmidt on a Gaussian matrix.
fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut ok = true;
        for j in 0..dim {
            for k in 0..j {
                let dot: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (x, y) in tail[0].iter_mut().zip(&head[k]) {
                    *x -= dot * y;
                }
            }
            let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols[j].iter_mut().for_each(|v| *v /= norm);
        }
        if ok {
            let mut q = Matrix::zeros(dim);
            for (j, col) in cols.iter().enumerate() {
                for (i, v) in col.iter().enumerate() {
                    q[(i, j)] = *v;
                }
            }
            return q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spread_gives_identity() {
        let m = random_spd(3, 0.0, 11);
        assert!((m.matrix() - &Matrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(random_spd(4, 2.0, 5), random_spd(4, 2.0, 5));
        assert_ne!(random_spd(4, 2.0, 5), random_spd(4, 2.0, 6));
    }

    #[test]
    fn condition_matches_request() {
        for seed in 0..20 {
            let ev = random_spd(5, 3.0, seed).eigenvalues().unwrap();
            let ratio = ev[4] / ev[0];
            let target = 3f64.exp();
            assert!(ratio >= target / 2.0 && ratio <= 2.0 * target, "ratio {ratio}");
        }
    }
}
