//! Truncated single-mode operators in the Fock basis `|0⟩…|d−1⟩`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = c((n as f64).sqrt());
    }
    m
}

pub fn creation(d: usize) -> CMatrix {
    annihilation(d).adjoint()
}

pub fn number(d: usize) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |n, _| c(n as f64)))
}

/// `q = (a† + a)/√2`.
pub fn position(d: usize) -> CMatrix {
    (creation(d) + annihilation(d)) * c(std::f64::consts::FRAC_1_SQRT_2)
}

/// `p = i(a† − a)/√2`.
pub fn momentum(d: usize) -> CMatrix {
    (creation(d) - annihilation(d)) * (I * std::f64::consts::FRAC_1_SQRT_2)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `A ⊗ B` with the first factor on the slow index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `exp(iH)` for Hermitian `H`, through its eigendecomposition.
pub fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    let herm = (h + h.adjoint()) * c(0.5);
    let e = herm.symmetric_eigen();
    let v = &e.eigenvectors;
    let mut scaled = v.clone();
    for (k, lam) in e.eigenvalues.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, *lam);
        for x in scaled.column_mut(k).iter_mut() {
            *x *= ph;
        }
    }
    scaled * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_commutator_except_top_level() {
        let d = 9;
        let (q, p) = (position(d), momentum(d));
        let comm = &q * &p - &p * &q;
        for n in 0..d {
            for m in 0..d {
                let expect = if n == m && n < d - 1 { I } else if n == m { c(-((d - 1) as f64)) * I } else { c(0.0) };
                assert!((comm[(n, m)] - expect).norm() < 1e-12, "({n},{m}) {}", comm[(n, m)]);
            }
        }
    }

    #[test]
    fn number_from_ladder() {
        let d = 6;
        let n = creation(d) * annihilation(d);
        assert!((n - number(d)).norm() < 1e-14);
    }

    #[test]
    fn exponential_of_diagonal() {
        let h = number(4);
        let u = exp_i_hermitian(&h);
        for n in 0..4 {
            assert!((u[(n, n)] - Complex64::from_polar(1.0, n as f64)).norm() < 1e-13);
        }
    }
}
