//! Deterministic two-site CC energies by quadrature.
//!
//! With two sites every integrand depends on the radii and on `u = n(0)·n(1)`
//! only (the excited state after averaging over global rotations), so the
//! Rayleigh quotient is a one-dimensional integral in the O(3) limit and a
//! three-dimensional one at finite cutoff.

use crate::cc::CcState;
use crate::error::{invalid, Result};
use crate::quad::{gauss_legendre, gauss_legendre_on};
use crate::sphere::radial::SphereBasisSpec;

const U_NODES: usize = 96;
const R_NODES: usize = 96;

/// Numerator and denominator contributions for fixed radii, relative to a
/// common factor `e^{2α r0 r1}`.
fn angular_sums(g_sq: f64, alpha: f64, r0: f64, r1: f64, state: CcState, u: &[f64], w: &[f64]) -> (f64, f64) {
    let k = 2.0 * alpha * r0 * r1;
    let (r0s, r1s) = (r0 * r0, r1 * r1);
    let mut num = 0.0;
    let mut den = 0.0;
    for (&u, &wu) in u.iter().zip(w) {
        let weight = wu * (k * (u - 1.0)).exp();
        let sin2 = 1.0 - u * u;
        let pot = r0s + r1s - 2.0 * r0 * r1 * u - 2.0 * g_sq;
        match state {
            CcState::Ground => {
                let kin = alpha * alpha * r0s * r1s * sin2 / g_sq;
                num += weight * (kin + pot);
                den += weight;
            }
            CcState::Excited => {
                let v2 = r0s + r1s + 2.0 * r0 * r1 * u;
                let kin = (2.0 * alpha * alpha * r0s * r1s * sin2 * v2
                    + 4.0 * alpha * r0s * r1s * sin2
                    + 2.0 * (r0s + r1s))
                    / (6.0 * g_sq);
                num += weight * (kin + pot * v2 / 3.0);
                den += weight * v2 / 3.0;
            }
        }
    }
    (num, den)
}

/// CC energy per site at L = 2. `spec = None` is the O(3) limit.
pub fn cc_energy_l2_quadrature(g_sq: f64, alpha: f64, spec: Option<&SphereBasisSpec>, state: CcState) -> Result<f64> {
    if !(g_sq > 0.0 && alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("need g² > 0 and α ≥ 0, got g² = {g_sq}, α = {alpha}")));
    }
    let (u, w) = gauss_legendre(U_NODES);
    let g = g_sq.sqrt();
    match spec {
        None => {
            let (num, den) = angular_sums(g_sq, alpha, g, g, state, &u, &w);
            Ok(num / den / 2.0)
        }
        Some(spec) => {
            spec.validate()?;
            let (lo, hi) = spec.support();
            let peak = spec.g.clamp(lo, hi);
            // split at the peak so both flanks get a full rule
            let (mut rs, mut ws) = gauss_legendre_on(R_NODES / 2, lo, peak);
            let (r2, w2) = gauss_legendre_on(R_NODES / 2, peak, hi);
            rs.extend(r2);
            ws.extend(w2);
            let ln_radial: Vec<f64> = rs
                .iter()
                .zip(&ws)
                .map(|(&r, &w)| w.ln() + 2.0 * r.ln() + spec.ln_density(r))
                .collect();
            let mut terms = Vec::with_capacity(rs.len() * rs.len());
            for (i, &r0) in rs.iter().enumerate() {
                for (j, &r1) in rs.iter().enumerate() {
                    // |Ψ|² radial factor e^{−α(r0−r1)²} after pulling out e^{2αr0r1}
                    let lw = ln_radial[i] + ln_radial[j] - alpha * (r0 - r1) * (r0 - r1);
                    let (n, d) = angular_sums(g_sq, alpha, r0, r1, state, &u, &w);
                    terms.push((lw, n, d));
                }
            }
            let shift = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
            let (mut num, mut den) = (0.0, 0.0);
            for (lw, n, d) in terms {
                let e = (lw - shift).exp();
                num += e * n;
                den += e * d;
            }
            Ok(num / den / 2.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::closed_form::{cc_energy_l2_closed_form, cc_excited_l2_closed_form};
    use approx::assert_abs_diff_eq;

    #[test]
    fn matches_closed_forms() {
        for g in [0.5, 1.0, 4.0] {
            for a in [0.0, 0.2, 0.5, 0.839, 1.5] {
                let q0 = cc_energy_l2_quadrature(g, a, None, CcState::Ground).unwrap();
                assert_abs_diff_eq!(q0, cc_energy_l2_closed_form(g, a), epsilon = 1e-12);
                let q1 = cc_energy_l2_quadrature(g, a, None, CcState::Excited).unwrap();
                assert_abs_diff_eq!(q1, cc_excited_l2_closed_form(g, a), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn finite_cutoff_approaches_o3() {
        let o3 = cc_energy_l2_closed_form(1.0, 0.839);
        let mut prev = f64::INFINITY;
        for l in [1.0, 3.2, 10.0, 40.0] {
            let s = SphereBasisSpec::new(l, 1.0).unwrap();
            let e = cc_energy_l2_quadrature(1.0, 0.839, Some(&s), CcState::Ground).unwrap();
            let dev = (e - o3).abs();
            assert!(dev < prev, "Λ={l}: {dev} !< {prev}");
            prev = dev;
        }
        assert!(prev < 2e-3);
    }

    #[test]
    fn zero_alpha_finite_cutoff_is_product_state() {
        // Ω: no kinetic energy, potential 2·(⟨r²⟩ − g²) per two links
        let s = SphereBasisSpec::new(3.2, 1.0).unwrap();
        let e = cc_energy_l2_quadrature(1.0, 0.0, Some(&s), CcState::Ground).unwrap();
        assert_abs_diff_eq!(e, 1.11178335015177 - 1.0, epsilon = 1e-9);
    }
}
