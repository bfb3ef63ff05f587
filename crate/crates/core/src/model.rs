//! Lattice parameters and the truncated spherical-harmonic product basis.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default cap on Hilbert-space dimension for assembled Hamiltonians.
pub const DEFAULT_DIM_CAP: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_sites: usize,
    pub g_sq: f64,
    pub l_max: u32,
    #[serde(default)]
    pub boundary: Boundary,
}

impl ModelParams {
    pub fn new(n_sites: usize, g_sq: f64, l_max: u32) -> Result<Self> {
        let p = ModelParams {
            n_sites,
            g_sq,
            l_max,
            boundary: Boundary::Periodic,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(invalid(format!("n_sites must be at least 2, got {}", self.n_sites)));
        }
        if !(self.g_sq.is_finite() && self.g_sq > 0.0) {
            return Err(invalid(format!("g_sq must be positive and finite, got {}", self.g_sq)));
        }
        if self.l_max > crate::angular::MAX_J as u32 - 1 {
            return Err(invalid(format!("l_max = {} too large", self.l_max)));
        }
        Ok(())
    }

    pub fn g(&self) -> f64 {
        self.g_sq.sqrt()
    }

    pub fn local_dim(&self) -> usize {
        (self.l_max as usize + 1).pow(2)
    }

    /// Hilbert-space dimension, refusing anything above `cap`.
    pub fn dimension(&self, cap: usize) -> Result<usize> {
        let dim = (self.local_dim() as u128).checked_pow(self.n_sites as u32);
        match dim {
            Some(d) if d <= cap as u128 => Ok(d as usize),
            Some(d) => Err(Error::DimensionOverflow { dim: d, cap }),
            None => Err(Error::DimensionOverflow { dim: u128::MAX, cap }),
        }
    }

    /// Nearest-neighbour links `(x, x+1 mod L)`. For L = 2 both links join the same pair.
    pub fn links(&self) -> Vec<(usize, usize)> {
        (0..self.n_sites).map(|x| (x, (x + 1) % self.n_sites)).collect()
    }

    pub fn with_l_max(&self, l_max: u32) -> Self {
        ModelParams { l_max, ..self.clone() }
    }
}

/// Position of `(l, m)` inside one site: l ascending, then m from -l to l.
pub fn local_index(l: u32, m: i32) -> usize {
    let l = l as i64;
    (l * l + l + m as i64) as usize
}

pub fn local_quanta(idx: usize) -> (u32, i32) {
    let l = (idx as f64).sqrt() as usize;
    // guard against rounding at perfect squares
    let l = if (l + 1) * (l + 1) <= idx { l + 1 } else if l * l > idx { l - 1 } else { l };
    let m = idx as i64 - (l * l + l) as i64;
    (l as u32, m as i32)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AngularBasisState {
    pub quanta: Vec<(u32, i32)>,
}

impl AngularBasisState {
    pub fn new(params: &ModelParams, quanta: Vec<(u32, i32)>) -> Result<Self> {
        if quanta.len() != params.n_sites {
            return Err(invalid(format!(
                "expected {} sites, got {}",
                params.n_sites,
                quanta.len()
            )));
        }
        for &(l, m) in &quanta {
            if l > params.l_max || m.unsigned_abs() > l {
                return Err(invalid(format!("invalid site state (l={l}, m={m})")));
            }
        }
        Ok(AngularBasisState { quanta })
    }

    /// Site-major flat index: site 0 is the most significant digit.
    pub fn index(&self, params: &ModelParams) -> usize {
        let d = params.local_dim();
        self.quanta
            .iter()
            .fold(0usize, |acc, &(l, m)| acc * d + local_index(l, m))
    }

    pub fn from_index(params: &ModelParams, mut idx: usize) -> Self {
        let d = params.local_dim();
        let mut quanta = vec![(0, 0); params.n_sites];
        for slot in quanta.iter_mut().rev() {
            *slot = local_quanta(idx % d);
            idx /= d;
        }
        AngularBasisState { quanta }
    }

    pub fn total_m(&self) -> i32 {
        self.quanta.iter().map(|q| q.1).sum()
    }
}

/// Flat indices of basis states with the given total magnetic quantum number.
pub fn sector_indices(params: &ModelParams, total_m: i32, cap: usize) -> Result<Vec<usize>> {
    let dim = params.dimension(cap)?;
    let d = params.local_dim();
    let m_of: Vec<i32> = (0..d).map(|i| local_quanta(i).1).collect();
    Ok((0..dim)
        .filter(|&i| {
            let mut rest = i;
            let mut m = 0;
            for _ in 0..params.n_sites {
                m += m_of[rest % d];
                rest /= d;
            }
            m == total_m
        })
        .collect())
}
