//! Seeded random streams, uniform sampling on `S^n`, Haar rotations and the
//! batched Monte Carlo driver.
//!
//! Seeding contract: a master seed plus a domain tag select a ChaCha8 key;
//! each independent cell of work gets its own stream id, and batch `b` of
//! that cell starts at word position `b << 40`. Batches are therefore
//! addressable without generating their predecessors, and a run produces
//! the same partial sums regardless of how batches are scheduled on
//! threads. Partial sums are reduced sequentially in batch order.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Fixed seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Samples per Monte Carlo batch.
pub const BATCH_SIZE: usize = 1 << 14;

pub const DOMAIN_VALIDATION: u64 = 1;
pub const DOMAIN_SPHERE: u64 = 2;
pub const DOMAIN_ROTATION: u64 = 3;
pub const DOMAIN_TUBE: u64 = 4;
pub const DOMAIN_RADIALIZE: u64 = 5;
pub const DOMAIN_SHELL: u64 = 6;
pub const DOMAIN_BARYCENTER: u64 = 7;
pub const DOMAIN_HARMONIC: u64 = 8;
pub const DOMAIN_CIRCLE: u64 = 9;

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for stream `stream` of `domain` under the master seed.
pub fn stream_rng(seed: u64, domain: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ mix(domain)));
    rng.set_stream(stream);
    rng
}

/// Generator positioned at the start of batch `batch` of a stream.
pub fn batch_rng(seed: u64, domain: u64, stream: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = stream_rng(seed, domain, stream);
    rng.set_word_pos((batch as u128) << 40);
    rng
}

/// Overwrites `out` with a uniform point on the unit sphere of its length.
pub fn fill_unit_vector<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut r2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            r2 += *v * *v;
        }
        if r2 > 1e-300 {
            let inv = 1.0 / r2.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    fill_unit_vector(rng, &mut x);
    x
}

/// `count` i.i.d. uniform points on `S^n` (vectors of length `n + 1`).
pub fn sample_sphere(n: u32, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let dim = n as usize + 1;
    let batches = count.div_ceil(BATCH_SIZE);
    (0..batches)
        .flat_map(|b| {
            let mut rng = batch_rng(seed, DOMAIN_SPHERE, 0, b as u64);
            let len = BATCH_SIZE.min(count - b * BATCH_SIZE);
            (0..len)
                .map(move |_| random_unit_vector(&mut rng, dim))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Runs `work(batch_index, batch_len)` for every batch of an `n_samples`
/// run on the current rayon pool and returns the results in batch order.
pub fn run_batches<T, F>(n_samples: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, usize) -> T + Sync,
{
    let batches = n_samples.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|b| work(b as u64, BATCH_SIZE.min(n_samples - b * BATCH_SIZE)))
        .collect()
}

/// A proper rotation of `R^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    pub matrix: DMatrix<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        Rotation {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == DMatrix::identity(self.dim(), self.dim())
    }

    /// `out = R x`
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        for (i, o) in out.iter_mut().enumerate().take(d) {
            *o = (0..d).map(|j| self.matrix[(i, j)] * x[j]).sum();
        }
    }

    /// `out = R^T x = R^{-1} x`
    pub fn apply_inverse(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        for (i, o) in out.iter_mut().enumerate().take(d) {
            *o = (0..d).map(|j| self.matrix[(j, i)] * x[j]).sum();
        }
    }

    /// `max |R^T R - I|`
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.dim();
        let e = self.matrix.transpose() * &self.matrix - DMatrix::<f64>::identity(d, d);
        e.amax()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Hex digest of the matrix entries (row-major little-endian bytes),
    /// truncated to 16 characters.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                h.update(self.matrix[(i, j)].to_le_bytes());
            }
        }
        hex::encode(h.finalize())[..16].to_string()
    }
}

/// Haar-distributed rotation from a Gaussian matrix: `Q` from `A = QR` with
/// columns rescaled by `sign(R_ii)`, then one column negated if needed to
/// land in `SO(n+1)`.
pub fn haar_rotation_from<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Rotation {
    let a = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    Rotation { matrix: q }
}

pub fn haar_rotation(n: u32, seed: u64) -> Rotation {
    let mut rng = stream_rng(seed, DOMAIN_ROTATION, 0);
    haar_rotation_from(&mut rng, n as usize + 1)
}

/// Rotation number `index` of a verification batch: index 0 is the
/// identity, index `i >= 1` is Haar from its own stream.
pub fn indexed_rotation(n: u32, seed: u64, index: usize) -> Rotation {
    if index == 0 {
        return Rotation::identity(n as usize + 1);
    }
    let mut rng = stream_rng(seed, DOMAIN_ROTATION, index as u64);
    haar_rotation_from(&mut rng, n as usize + 1)
}

/// The identity followed by `haar_count` Haar rotations.
pub fn rotation_batch(n: u32, haar_count: usize, seed: u64) -> Vec<Rotation> {
    (0..=haar_count).map(|i| indexed_rotation(n, seed, i)).collect()
}

/// Monte Carlo mean with standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub sum: f64,
    pub sum_sq: f64,
    pub count: usize,
}

impl Moments {
    pub fn new() -> Self {
        Moments {
            sum: 0.0,
            sum_sq: 0.0,
            count: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.sum / self.count as f64
    }

    /// Standard error of the mean, from the unbiased sample variance.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

impl Default for Moments {
    fn default() -> Self {
        Self::new()
    }
}
