//! Derivative-free minimization over a bracket in α.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub alpha: f64,
    pub value: f64,
    /// Minimizer within `tol` of a bracket edge.
    pub at_boundary: bool,
    pub evaluations: usize,
}

pub const DEFAULT_ALPHA_TOL: f64 = 1e-4;
const GRID: usize = 32;

/// Grid scan followed by golden-section refinement around the best grid point.
/// The objective must be deterministic; NaN values count as +∞.
pub fn minimize_alpha<F>(mut objective: F, bracket: (f64, f64), tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || !(tol > 0.0) {
        return Err(invalid(format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let mut evaluations = 0;
    let mut eval = |x: f64| -> Result<f64> {
        evaluations += 1;
        let v = objective(x)?;
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    };

    let xs: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let mut fs = Vec::with_capacity(xs.len());
    for &x in &xs {
        fs.push(eval(x)?);
    }
    let best = (0..xs.len()).min_by(|&a, &b| fs[a].total_cmp(&fs[b])).expect("grid");
    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(GRID)];

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let mut alpha = 0.5 * (a + b);
    let mut value = eval(alpha)?;
    // a grid endpoint may still beat the interior estimate
    for (x, f) in [(xs[0], fs[0]), (xs[GRID], fs[GRID])] {
        if f < value {
            alpha = x;
            value = f;
        }
    }
    let at_boundary = alpha - lo < tol || hi - alpha < tol;
    Ok(Minimum {
        alpha,
        value,
        at_boundary,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::closed_form::{cc_energy_l2_closed_form, cc_excited_l2_closed_form};
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic() {
        let m = minimize_alpha(|a| Ok((a - 2.0) * (a - 2.0)), (0.0, 5.0), 1e-6).unwrap();
        assert_abs_diff_eq!(m.alpha, 2.0, epsilon = 1e-6);
        assert!(!m.at_boundary);
    }

    #[test]
    fn boundary_flag() {
        let m = minimize_alpha(Ok, (1.0, 3.0), 1e-4).unwrap();
        assert_eq!(m.alpha, 1.0);
        assert!(m.at_boundary);
    }

    #[test]
    fn closed_form_minima() {
        // (g², α0*, E0/2, α1*, E1/2) from 40-digit golden-section searches
        let cases = [
            (0.5, 0.49204060967, -0.0409989035763, 0.324931246, 0.815665143707),
            (1.0, 0.83946196691, -0.276504847525052, 0.588720820659, 0.0456715146806753),
            (2.0, 0.991081882664, -1.12604429126513, 0.830472986, -0.992904519379),
            (4.0, 0.999987281154, -3.06250078782718, 0.929578645, -2.99809564657),
        ];
        for (g, a0, e0, a1, e1) in cases {
            let m0 = minimize_alpha(|a| Ok(cc_energy_l2_closed_form(g, a)), (0.0, 4.0 * g), 1e-6).unwrap();
            assert_abs_diff_eq!(m0.alpha, a0, epsilon = 2e-4);
            assert_abs_diff_eq!(m0.value, e0, epsilon = 1e-10);
            let m1 = minimize_alpha(|a| Ok(cc_excited_l2_closed_form(g, a)), (0.0, 4.0 * g), 1e-6).unwrap();
            assert_abs_diff_eq!(m1.alpha, a1, epsilon = 2e-4);
            assert_abs_diff_eq!(m1.value, e1, epsilon = 1e-10);
        }
    }

    #[test]
    fn weak_coupling_minimum_is_small_and_interior() {
        // dE/dα at 0 is −2g⁴/3 < 0, so the optimum sits near α = g², not at 0
        let g = 0.05;
        let m = minimize_alpha(|a| Ok(cc_energy_l2_closed_form(g, a)), (0.0, 4.0 * g), 1e-6).unwrap();
        assert_abs_diff_eq!(m.alpha, 0.0499999166671, epsilon = 1e-5);
        assert_abs_diff_eq!(m.value, -4.16665972225e-5, epsilon = 1e-12);
        assert!(m.alpha < 2.0 * g);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(minimize_alpha(Ok, (1.0, 1.0), 1e-4).is_err());
        assert!(minimize_alpha(Ok, (0.0, 1.0), 0.0).is_err());
    }
}
