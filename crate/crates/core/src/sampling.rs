//! Seeded random sampling. Sample `i` of a loop always draws from stream `i` of the
//! generator seeded with the run seed, so results do not depend on how the loop is
//! split across threads.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Haar-distributed orthonormal `k`-frame in `R^dim`, as matrix columns.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> DMatrix<f64> {
    assert!(k <= dim && k > 0, "frame size out of range");
    loop {
        let a = gaussian_matrix(rng, dim, k);
        let qr = a.qr();
        let r = qr.r();
        if (0..k).all(|i| r[(i, i)].abs() > 1e-10) {
            let mut q = qr.q();
            // fix column signs so the distribution is Haar
            for i in 0..k {
                if r[(i, i)] < 0.0 {
                    q.column_mut(i).neg_mut();
                }
            }
            return q;
        }
    }
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    random_orthonormal(rng, dim, 1).column(0).into_owned()
}

/// Random symmetric matrix with standard-normal upper triangle.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = gaussian_matrix(rng, n, n);
    (&a + a.transpose()) * 0.5
}

/// Pairwise summation in a fixed order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
