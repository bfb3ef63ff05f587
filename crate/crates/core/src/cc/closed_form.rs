//! Closed-form two-site coupled-cluster energies in the O(3) limit.

/// Langevin function `coth x − 1/x`, accurate for small `x`.
fn langevin(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * (1.0 / 3.0 - x2 * (1.0 / 45.0 - x2 * (2.0 / 945.0 - x2 / 4725.0)))
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}

/// Ground-state CC energy per site at L = 2,
/// `E₀/L = −1/(4g²) + 1/(2α) + ((α−2g²)/2) coth(2g²α)`,
/// evaluated as the equivalent `(α/2 − g²)(coth x − 1/x)` with `x = 2g²α`.
pub fn cc_energy_l2_closed_form(g_sq: f64, alpha: f64) -> f64 {
    debug_assert!(g_sq > 0.0 && alpha >= 0.0);
    (0.5 * alpha - g_sq) * langevin(2.0 * g_sq * alpha)
}

/// First-excited CC energy per site at L = 2.
///
/// Three regimes in `y = 4g²α`: a Taylor series in `y` at fixed α for small
/// `y`, an `expm1` form in between, and the form divided by `e^y` above 40.
pub fn cc_excited_l2_closed_form(g_sq: f64, alpha: f64) -> f64 {
    debug_assert!(g_sq > 0.0 && alpha >= 0.0);
    let a = alpha;
    let y = 4.0 * g_sq * a;
    if a == 0.0 {
        return 0.5 / g_sq - g_sq / 3.0;
    }
    let a2 = a * a;
    // R such that E₁/L = −g² + R
    let r = if y < 1e-2 {
        2.0 * a / y
            + y * ((a2 + 2.0) / (12.0 * a)
                + y * (-(a2 + 5.0) / (180.0 * a)
                    + y * ((4.0 - a2) / (2160.0 * a)
                        + y * (a / 9072.0 + 1.0 / (6480.0 * a) - y * (a2 + 50.0) / (1_360_800.0 * a)))))
    } else if y > 40.0 {
        let e = (-y).exp();
        let num = e * (-2.0 * a2 + y * (-2.0 * a2 + y + 2.0)) + (2.0 * a2 + y * y * (a2 + 1.0) - 2.0 * y);
        let den = 2.0 * a * y * ((y - 1.0) + e);
        num / den
    } else {
        let em = y.exp_m1();
        let em2 = if y < 0.5 {
            // e^y − 1 − y without cancellation
            let mut term = 0.5 * y * y;
            let mut sum = term;
            for k in 3..30 {
                term *= y / f64::from(k);
                sum += term;
                if term < 1e-17 * sum {
                    break;
                }
            }
            sum
        } else {
            em - y
        };
        let num = 2.0 * a2 * em2 + a2 * y * y - 2.0 * y * em2 + em * y * y * (a2 + 1.0);
        let den = 2.0 * a * y * (y * em - em2);
        num / den
    };
    -g_sq + r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // 40-digit evaluations of the unsimplified expressions
    const E0: [(f64, f64, f64); 10] = [
        (0.5, 0.2, -0.0265958253757891),
        (0.5, 0.5, -0.0409883534346632),
        (1.0, 0.2, -0.11873919764897),
        (1.0, 0.5, -0.234776464124498),
        (1.0, 0.839, -0.276504778408667),
        (1.0, 1.5, -0.167909122495089),
        (4.0, 0.2, -1.79395607100753),
        (4.0, 0.5, -2.81501681400631),
        (4.0, 0.839, -3.04706303604885),
        (4.0, 1.5, -2.97916666691205),
    ];
    const E1: [(f64, f64, f64); 10] = [
        (0.5, 0.2, 0.818205109563045),
        (0.5, 0.5, 0.820429542885239),
        (1.0, 0.2, 0.0953589605393848),
        (1.0, 0.5, 0.0480073050552939),
        (1.0, 0.839, 0.0620734295092561),
        (1.0, 1.5, 0.216518015230081),
        (4.0, 0.2, -2.25875830721924),
        (4.0, 0.5, -2.84781722653003),
        (4.0, 0.839, -2.99372314379134),
        (4.0, 1.5, -2.89583333332349),
    ];

    #[test]
    fn frozen_values() {
        for (g, a, v) in E0 {
            assert_relative_eq!(cc_energy_l2_closed_form(g, a), v, max_relative = 1e-12);
        }
        for (g, a, v) in E1 {
            assert_relative_eq!(cc_excited_l2_closed_form(g, a), v, max_relative = 1e-12);
        }
        assert_relative_eq!(cc_energy_l2_closed_form(10.0, 1.0), -9.025, max_relative = 1e-14);
        assert_relative_eq!(cc_excited_l2_closed_form(10.0, 1.0), -8.99935897435897, max_relative = 1e-12);
    }

    #[test]
    fn small_alpha_branch_is_continuous() {
        let expected = [
            0.12668493241662,
            0.162267357355077,
            0.166222674024624,
            0.166622226740691,
            0.166662222267407,
            0.166666222222674,
            0.166666622222227,
        ];
        for (k, v) in expected.iter().enumerate() {
            let a = 10f64.powi(-(k as i32) - 1);
            assert_relative_eq!(cc_excited_l2_closed_form(1.0, a), *v, max_relative = 1e-11);
        }
        // both sides of each switch point
        for y in [1e-2, 40.0] {
            let a = y / 4.0;
            let lo = cc_excited_l2_closed_form(1.0, a * (1.0 - 1e-9));
            let hi = cc_excited_l2_closed_form(1.0, a * (1.0 + 1e-9));
            assert!((lo - hi).abs() < 1e-8 * lo.abs().max(1.0));
        }
    }

    #[test]
    fn limits() {
        assert_eq!(cc_energy_l2_closed_form(1.0, 0.0), 0.0);
        assert!(cc_energy_l2_closed_form(1.0, 1e-9).abs() < 1e-8);
        // a single l = 1 excitation at weak coupling
        let g = 1e-3;
        assert_relative_eq!(cc_excited_l2_closed_form(g, 1e-6), 0.5 / g, max_relative = 1e-6);
        // strong coupling plateau −g² + 1
        assert_relative_eq!(cc_excited_l2_closed_form(10.0, 1.0), -9.0, max_relative = 1e-3);
        assert!(cc_excited_l2_closed_form(1e3, 1.0).is_finite());
        assert!(cc_energy_l2_closed_form(1e3, 1e3).is_finite());
    }
}
