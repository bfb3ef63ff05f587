//! The truncated O(3) rotor Hamiltonian
//! `H = Σ_x L²(x)/(2g²) − g² Σ_x n(x)·n(x+1)` in the spherical-harmonic basis.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::x_matrix_element;
use crate::eigen::low_eigenvalues;
use crate::error::{invalid, Result};
use crate::model::{local_quanta, sector_indices, ModelParams, DEFAULT_DIM_CAP};
use crate::sparse::SparseHermitian;

/// Nonzero `<a'|X_M|a>` for each local state `a`, as `(a', M, value)`.
fn x_table(l_max: u32) -> Result<Vec<Vec<(usize, i32, f64)>>> {
    let d = (l_max as usize + 1).pow(2);
    let mut table = vec![Vec::new(); d];
    for (a, row) in table.iter_mut().enumerate() {
        let (l, m) = local_quanta(a);
        for ap in 0..d {
            let (lp, mp) = local_quanta(ap);
            for big_m in -1..=1 {
                let v = x_matrix_element(lp as i32, mp, big_m, l as i32, m)?;
                if v != 0.0 {
                    row.push((ap, big_m, v));
                }
            }
        }
    }
    Ok(table)
}

/// `Σ_x l(x)(l(x)+1)` on every basis state.
pub fn casimir_diagonal(params: &ModelParams, cap: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let dim = params.dimension(cap)?;
    let d = params.local_dim();
    let per_site: Vec<f64> = (0..d)
        .map(|a| {
            let l = f64::from(local_quanta(a).0);
            l * (l + 1.0)
        })
        .collect();
    Ok((0..dim)
        .into_par_iter()
        .map(|mut i| {
            let mut s = 0.0;
            for _ in 0..params.n_sites {
                s += per_site[i % d];
                i /= d;
            }
            s
        })
        .collect())
}

/// Matrix of `n(x)·n(y) = −X₊₁X₋₁ − X₋₁X₊₁ + X₀X₀` for two distinct sites.
pub fn link_operator(params: &ModelParams, x: usize, y: usize, cap: usize) -> Result<SparseHermitian> {
    params.validate()?;
    if x == y || x >= params.n_sites || y >= params.n_sites {
        return Err(invalid(format!("invalid link ({x}, {y})")));
    }
    let dim = params.dimension(cap)?;
    let d = params.local_dim();
    let table = x_table(params.l_max)?;
    let stride = |site: usize| d.pow((params.n_sites - 1 - site) as u32);
    let (sx, sy) = (stride(x), stride(y));

    let triplets: Vec<(usize, usize, Complex64)> = (0..dim)
        .into_par_iter()
        .flat_map_iter(|col| {
            let a = (col / sx) % d;
            let b = (col / sy) % d;
            let base = col - a * sx - b * sy;
            let mut out = Vec::new();
            for &(ap, mx, vx) in &table[a] {
                for &(bp, my, vy) in &table[b] {
                    if mx + my != 0 {
                        continue;
                    }
                    let coeff = if mx == 0 { 1.0 } else { -1.0 };
                    let row = base + ap * sx + bp * sy;
                    if row <= col {
                        out.push((row, col, Complex64::new(coeff * vx * vy, 0.0)));
                    }
                }
            }
            out.into_iter()
        })
        .collect();
    SparseHermitian::from_upper_triplets(dim, triplets)
}

/// `Σ_links n(x)·n(x+1)` with periodic wrap. For L = 2 the single pair is counted twice.
pub fn interaction_operator(params: &ModelParams, cap: usize) -> Result<SparseHermitian> {
    let ops = params
        .links()
        .into_iter()
        .map(|(x, y)| link_operator(params, x, y, cap))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(&SparseHermitian, f64)> = ops.iter().map(|o| (o, 1.0)).collect();
    SparseHermitian::linear_combination(&terms, None)
}

pub fn build_rotor_hamiltonian(params: &ModelParams) -> Result<SparseHermitian> {
    build_rotor_hamiltonian_with_cap(params, DEFAULT_DIM_CAP)
}

pub fn build_rotor_hamiltonian_with_cap(params: &ModelParams, cap: usize) -> Result<SparseHermitian> {
    let kin: Vec<f64> = casimir_diagonal(params, cap)?
        .into_iter()
        .map(|c| c / (2.0 * params.g_sq))
        .collect();
    let nn = interaction_operator(params, cap)?;
    SparseHermitian::linear_combination(&[(&nn, -params.g_sq)], Some(&kin))
}

/// Lowest two levels of `h` restricted to total M = 0.
///
/// Every O(3) multiplet has an M = 0 member and the ground state is a singlet,
/// so these are E₀ and E₁ of the full spectrum.
pub fn lowest_two_m0(params: &ModelParams, h: &SparseHermitian) -> Result<(f64, f64)> {
    let idx = sector_indices(params, 0, h.dim().max(1))?;
    let sub = h.restrict(&idx)?;
    let vals = low_eigenvalues(&sub, 2)?;
    Ok((vals[0], vals[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdSummary {
    pub e0_per_site: f64,
    pub e0_truncation_error: f64,
    pub gap: f64,
    pub gap_truncation_error: f64,
}

fn levels(params: &ModelParams) -> Result<(f64, f64)> {
    let h = build_rotor_hamiltonian(params)?;
    lowest_two_m0(params, &h)
}

/// Gap at `l_max` and its distance from the `l_max − 1` result.
pub fn mass_gap(params: &ModelParams) -> Result<(f64, f64)> {
    let s = ed_summary(params)?;
    Ok((s.gap, s.gap_truncation_error))
}

pub fn ed_summary(params: &ModelParams) -> Result<EdSummary> {
    if params.l_max < 2 {
        return Err(invalid("truncation error needs l_max >= 2"));
    }
    let (e0, e1) = levels(params)?;
    let (p0, p1) = levels(&params.with_l_max(params.l_max - 1))?;
    let l = params.n_sites as f64;
    Ok(EdSummary {
        e0_per_site: e0 / l,
        e0_truncation_error: ((e0 - p0) / l).abs(),
        gap: e1 - e0,
        gap_truncation_error: ((e1 - e0) - (p1 - p0)).abs(),
    })
}
