//! Wigner 3j symbols and the dipole matrix elements of the unit vector `n`.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{invalid, Result};

/// Angular momentum quantum number stored as twice its value, so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn int(v: i32) -> Self {
        HalfInt(2 * v)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl From<i32> for HalfInt {
    fn from(v: i32) -> Self {
        HalfInt::int(v)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Largest j accepted by [`wigner_3j`]; the log-factorial table is sized for it.
pub const MAX_J: i32 = 20;
const FACT_LEN: usize = 4 * MAX_J as usize + 2;

fn ln_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACT_LEN);
        let mut acc = 0.0_f64;
        t.push(0.0);
        for k in 1..FACT_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

fn lf(n: i32) -> f64 {
    ln_factorials()[n as usize]
}

/// Wigner 3j symbol via the Racah sum.
///
/// Returns exactly zero when a selection rule fails. Negative j, |m| > j, or
/// j and m of different integrality are rejected.
pub fn wigner_3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64> {
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if j.0 < 0 {
            return Err(invalid(format!("negative angular momentum j = {j}")));
        }
        if j.0 > 2 * MAX_J {
            return Err(invalid(format!("j = {j} above supported maximum {MAX_J}")));
        }
        if m.0.abs() > j.0 {
            return Err(invalid(format!("|m| = |{m}| exceeds j = {j}")));
        }
        if (j.0 + m.0) % 2 != 0 {
            return Err(invalid(format!("j = {j} and m = {m} differ by a half-integer")));
        }
    }
    let (tj1, tj2, tj3) = (j1.0, j2.0, j3.0);
    let (tm1, tm2, tm3) = (m1.0, m2.0, m3.0);

    if tm1 + tm2 + tm3 != 0 {
        return Ok(0.0);
    }
    if tj3 < (tj1 - tj2).abs() || tj3 > tj1 + tj2 || (tj1 + tj2 + tj3) % 2 != 0 {
        return Ok(0.0);
    }
    if tm1 == 0 && tm2 == 0 && tm3 == 0 && ((tj1 + tj2 + tj3) / 2) % 2 != 0 {
        return Ok(0.0);
    }

    // everything below is in plain integers
    let a = (tj1 + tj2 - tj3) / 2;
    let b = (tj1 - tj2 + tj3) / 2;
    let c = (-tj1 + tj2 + tj3) / 2;
    let big = (tj1 + tj2 + tj3) / 2 + 1;
    let ln_delta = lf(a) + lf(b) + lf(c) - lf(big);
    let ln_m = lf((tj1 + tm1) / 2)
        + lf((tj1 - tm1) / 2)
        + lf((tj2 + tm2) / 2)
        + lf((tj2 - tm2) / 2)
        + lf((tj3 + tm3) / 2)
        + lf((tj3 - tm3) / 2);
    let pre = 0.5 * (ln_delta + ln_m);

    let d1 = (tj3 - tj2 + tm1) / 2;
    let d2 = (tj3 - tj1 - tm2) / 2;
    let d3 = (tj1 - tm1) / 2;
    let d4 = (tj2 + tm2) / 2;
    let kmin = 0.max(-d1).max(-d2);
    let kmax = a.min(d3).min(d4);

    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = lf(k) + lf(d1 + k) + lf(d2 + k) + lf(a - k) + lf(d3 - k) + lf(d4 - k);
        let term = (pre - den).exp();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let phase = (tj1 - tj2 - tm3) / 2;
    Ok(if phase.rem_euclid(2) == 0 { sum } else { -sum })
}

/// Integer-argument convenience wrapper around [`wigner_3j`].
pub fn wigner_3j_int(l1: i32, l2: i32, l3: i32, m1: i32, m2: i32, m3: i32) -> Result<f64> {
    wigner_3j(
        l1.into(),
        l2.into(),
        l3.into(),
        m1.into(),
        m2.into(),
        m3.into(),
    )
}

/// `<l1,m1| X_M |l2,m2>` for the spherical components of the unit vector,
/// with `n^± = ∓X_{±1}` and `n^z = X_0`.
pub fn x_matrix_element(l1: i32, m1: i32, big_m: i32, l2: i32, m2: i32) -> Result<f64> {
    if !(-1..=1).contains(&big_m) {
        return Err(invalid(format!("spherical component M = {big_m} not in {{-1,0,1}}")));
    }
    for (l, m) in [(l1, m1), (l2, m2)] {
        if l < 0 || m.abs() > l {
            return Err(invalid(format!("invalid angular state (l={l}, m={m})")));
        }
    }
    if (l1 - l2).abs() != 1 || -m1 + big_m + m2 != 0 {
        return Ok(0.0);
    }
    let sign = if m1.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let norm = f64::from((2 * l1 + 1) * (2 * l2 + 1)).sqrt();
    Ok(sign
        * norm
        * wigner_3j_int(l1, 1, l2, 0, 0, 0)?
        * wigner_3j_int(l1, 1, l2, -m1, big_m, m2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        let inv_sqrt3 = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(wigner_3j_int(1, 1, 0, 0, 0, 0).unwrap(), -inv_sqrt3, epsilon = 1e-15);
        assert_eq!(wigner_3j_int(1, 1, 1, 0, 0, 0).unwrap(), 0.0);
        assert_eq!(wigner_3j_int(2, 1, 5, 0, 0, 0).unwrap(), 0.0);
        // (2 1 1; 0 0 0) = sqrt(2/15)
        assert_abs_diff_eq!(wigner_3j_int(2, 1, 1, 0, 0, 0).unwrap(), (2.0f64 / 15.0).sqrt(), epsilon = 1e-15);
        // (1 1 1; 1 -1 0) = 1/sqrt(6)
        assert_abs_diff_eq!(wigner_3j_int(1, 1, 1, 1, -1, 0).unwrap(), 1.0 / 6f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn half_integer_values() {
        let h = HalfInt::from_twice;
        // (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
        let v = wigner_3j(h(1), h(1), h(2), h(1), h(-1), h(0)).unwrap();
        assert_abs_diff_eq!(v, 1.0 / 6f64.sqrt(), epsilon = 1e-15);
        // (1/2 1/2 0; 1/2 -1/2 0) = 1/sqrt(2)
        let v = wigner_3j(h(1), h(1), h(0), h(1), h(-1), h(0)).unwrap();
        assert_abs_diff_eq!(v, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(wigner_3j_int(-1, 1, 0, 0, 0, 0).is_err());
        assert!(wigner_3j_int(1, 1, 0, 2, 0, 0).is_err());
        let h = HalfInt::from_twice;
        assert!(wigner_3j(h(1), h(1), h(0), h(0), h(0), h(0)).is_err());
        assert!(x_matrix_element(1, 0, 2, 0, 0).is_err());
        assert!(x_matrix_element(1, 2, 0, 0, 0).is_err());
    }

    #[test]
    fn x_elements() {
        let inv_sqrt3 = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(x_matrix_element(1, 0, 0, 0, 0).unwrap(), inv_sqrt3, epsilon = 1e-15);
        assert_eq!(x_matrix_element(2, 0, 0, 0, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(x_matrix_element(1, 1, 1, 0, 0).unwrap(), inv_sqrt3, epsilon = 1e-15);
    }

    #[test]
    fn n_squared_is_identity_in_the_interior() {
        // n·n = -X+ X- - X- X+ + X0 X0 must be 1 on states with l < lmax.
        let lmax = 4;
        for l in 0..lmax {
            for m in -l..=l {
                let mut diag = 0.0;
                for lp in 0..=lmax {
                    for mp in -lp..=lp {
                        let xp = |a: (i32, i32), mm: i32, b: (i32, i32)| {
                            x_matrix_element(a.0, a.1, mm, b.0, b.1).unwrap()
                        };
                        let s = (l, m);
                        let mid = (lp, mp);
                        diag += -xp(s, 1, mid) * xp(mid, -1, s) - xp(s, -1, mid) * xp(mid, 1, s)
                            + xp(s, 0, mid) * xp(mid, 0, s);
                    }
                }
                assert_abs_diff_eq!(diag, 1.0, epsilon = 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn orthogonality(j1 in 0i32..=4, j2 in 0i32..=4, dj in 0i32..=8, m3s in 0i32..=16) {
            let lo = (j1 - j2).abs();
            let j3 = lo + dj % (j1 + j2 - lo + 1);
            let m3 = -j3 + m3s % (2 * j3 + 1);
            let mut total = 0.0;
            for m1 in -j1..=j1 {
                for m2 in -j2..=j2 {
                    let w = wigner_3j_int(j1, j2, j3, m1, m2, m3).unwrap();
                    total += f64::from(2 * j3 + 1) * w * w;
                }
            }
            prop_assert!((total - 1.0).abs() < 1e-12, "sum = {total}");
        }

        #[test]
        fn column_swap_symmetry(j1 in 0i32..=5, j2 in 0i32..=5, j3 in 0i32..=5, s1 in 0i32..11, s2 in 0i32..11) {
            let m1 = -j1 + s1 % (2 * j1 + 1);
            let m2 = -j2 + s2 % (2 * j2 + 1);
            prop_assume!((m1 + m2).abs() <= j3);
            let a = wigner_3j_int(j1, j2, j3, m1, m2, -m1 - m2).unwrap();
            let b = wigner_3j_int(j2, j1, j3, m2, m1, -m1 - m2).unwrap();
            let sign = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a - sign * b).abs() < 1e-13);
        }
    }
}
