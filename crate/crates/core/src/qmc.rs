//! Halton low-discrepancy points.

use crate::error::{invalid, Result};

pub const MAX_DIM: usize = 64;

const PRIMES: [u64; MAX_DIM] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103,
    107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311,
];

pub fn radical_inverse(base: u64, mut i: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

#[derive(Debug, Clone, Copy)]
pub struct Halton {
    dim: usize,
}

impl Halton {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("Halton dimension must be in 1..={MAX_DIM}, got {dim}")));
        }
        Ok(Halton { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Point number `k` (0-based), i.e. radical inverses of `k + 1`.
    pub fn point(&self, k: u64, out: &mut [f64]) {
        for (d, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = radical_inverse(PRIMES[d], k + 1);
        }
    }
}

pub fn quasi_mc_points(dim: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    let h = Halton::new(dim)?;
    Ok((0..n as u64)
        .map(|k| {
            let mut p = vec![0.0; dim];
            h.point(k, &mut p);
            p
        })
        .collect())
}
