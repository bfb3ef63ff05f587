//! Radial profile `ψ_Λ(r) = exp(−Λ²(r²−g²)²/(8g²))` of the cutoff basis states.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::{gauss_legendre_on, integrate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereBasisSpec {
    pub lambda_cutoff: f64,
    pub g: f64,
}

impl SphereBasisSpec {
    pub fn new(lambda_cutoff: f64, g: f64) -> Result<Self> {
        let s = SphereBasisSpec { lambda_cutoff, g };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_cutoff.is_finite() && self.lambda_cutoff > 0.0) {
            return Err(invalid(format!("cutoff must be positive, got {}", self.lambda_cutoff)));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(invalid(format!("g must be positive, got {}", self.g)));
        }
        Ok(())
    }

    /// `ln ψ²(r)`.
    pub fn ln_density(&self, r: f64) -> f64 {
        let (l, g) = (self.lambda_cutoff, self.g);
        let d = r * r - g * g;
        -l * l * d * d / (4.0 * g * g)
    }

    pub fn psi(&self, r: f64) -> f64 {
        (0.5 * self.ln_density(r)).exp()
    }

    /// Interval outside which `r² ψ²(r)` is below `e^{-60}` of its scale.
    pub fn support(&self) -> (f64, f64) {
        let (l, g) = (self.lambda_cutoff, self.g);
        let spread = 2.0 * g * 60f64.sqrt() / l;
        ((g * g - spread).max(0.0).sqrt(), (g * g + spread).sqrt())
    }

    fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let g = self.g.clamp(lo, hi);
        let mut pts = Vec::new();
        for k in 0..=8 {
            pts.push(lo + (g - lo) * f64::from(k) / 8.0);
        }
        for k in 1..=8 {
            pts.push(g + (hi - g) * f64::from(k) / 8.0);
        }
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-300);
        pts
    }
}

/// Unnormalized moments `m_k = ∫ r^{2+k} ψ²(r) dr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMoments {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub m4: f64,
}

impl RadialMoments {
    /// `⟨r²⟩ = m2/m0`.
    pub fn r2(&self) -> f64 {
        self.m2 / self.m0
    }

    /// `⟨r⟩² = (m1/m0)²`, the scale of the two-site coupling.
    pub fn r1_sq(&self) -> f64 {
        (self.m1 / self.m0).powi(2)
    }

    pub fn r4(&self) -> f64 {
        self.m4 / self.m0
    }
}

pub fn radial_moment(spec: &SphereBasisSpec, k: i32) -> Result<f64> {
    spec.validate()?;
    let pts = spec.breakpoints();
    let r = integrate(|r| r.powi(2 + k) * spec.ln_density(r).exp(), &pts, 1e-11, 0.0)?;
    Ok(r.value)
}

pub fn radial_moments(spec: &SphereBasisSpec) -> Result<RadialMoments> {
    Ok(RadialMoments {
        m0: radial_moment(spec, 0)?,
        m1: radial_moment(spec, 1)?,
        m2: radial_moment(spec, 2)?,
        m4: radial_moment(spec, 4)?,
    })
}

/// `⟨0|ω⟩` for one site: overlap of the three-mode Fock vacuum
/// `π^{-3/4} e^{-|φ|²/2}` with the normalized `l = 0` cutoff state.
pub fn vacuum_overlap(spec: &SphereBasisSpec) -> Result<f64> {
    spec.validate()?;
    let m0 = radial_moment(spec, 0)?;
    let pts = spec.breakpoints();
    let num = integrate(
        |r| r * r * (-0.5 * r * r + 0.5 * spec.ln_density(r)).exp(),
        &pts,
        1e-11,
        0.0,
    )?;
    let four_pi = 4.0 * std::f64::consts::PI;
    Ok(std::f64::consts::PI.powf(-0.75) * four_pi * num.value / (four_pi * m0).sqrt())
}

/// Inverse-CDF table for the radial density `r² ψ²(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    pub spec: SphereBasisSpec,
    pub r: Vec<f64>,
    /// Normalized cumulative distribution at the grid points; `cdf[0] = 0`, last = 1.
    pub cdf: Vec<f64>,
    pub m0: f64,
}

pub const DEFAULT_TABLE_POINTS: usize = 8192;

impl RadialTable {
    pub fn build(spec: &SphereBasisSpec, points: usize) -> Result<Self> {
        spec.validate()?;
        if points < 16 {
            return Err(invalid("radial table needs at least 16 points"));
        }
        let (lo, hi) = spec.support();
        let r: Vec<f64> = (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect();
        let mut cdf = Vec::with_capacity(points);
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in r.windows(2) {
            let (x, wt) = gauss_legendre_on(6, w[0], w[1]);
            acc += x.iter().zip(&wt).map(|(r, w)| w * r * r * spec.ln_density(*r).exp()).sum::<f64>();
            cdf.push(acc);
        }
        if !(acc.is_finite() && acc > 0.0) {
            return Err(Error::Quadrature { error: acc, evaluations: 6 * points });
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(RadialTable { spec: *spec, r, cdf, m0: acc })
    }

    /// Map `u ∈ [0, 1)` to a radius distributed as `r² ψ²(r)`.
    pub fn sample(&self, u: f64) -> f64 {
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.r[k - 1] + t.clamp(0.0, 1.0) * (self.r[k] - self.r[k - 1])
    }

    pub fn matches(&self, spec: &SphereBasisSpec) -> bool {
        self.spec == *spec
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(l: f64) -> SphereBasisSpec {
        SphereBasisSpec::new(l, 1.0).unwrap()
    }

    #[test]
    fn frozen_moments() {
        // independent 40-digit quadrature
        let m = radial_moments(&spec(1.0)).unwrap();
        assert_relative_eq!(m.m0, 1.5842215010289836, max_relative = 1e-10);
        assert_relative_eq!(m.m1, 2.1263087149369553, max_relative = 1e-10);
        assert_relative_eq!(m.m2, 3.1048834439720416, max_relative = 1e-10);
        assert_relative_eq!(m.m4, 7.8575479470589925, max_relative = 1e-10);
        let m = radial_moments(&spec(3.2)).unwrap();
        assert_relative_eq!(m.m0, 0.536599684533799, max_relative = 1e-10);
        assert_relative_eq!(m.m1, 0.554890900869870, max_relative = 1e-10);
        assert_relative_eq!(m.m2, 0.596582594961370, max_relative = 1e-10);
        assert_relative_eq!(m.m4, 0.753789533789631, max_relative = 1e-10);
        let m = radial_moments(&spec(10.0)).unwrap();
        assert_relative_eq!(m.m0, 0.176793482049929, max_relative = 1e-10);
        assert_relative_eq!(m.m1, 0.177245385090554, max_relative = 1e-10);
        assert_relative_eq!(m.m2, 0.178579865919617, max_relative = 1e-10);
    }

    #[test]
    fn large_cutoff_asymptotics() {
        let m = radial_moments(&spec(10.0)).unwrap();
        let asym = std::f64::consts::PI.sqrt() / 10.0;
        assert!((m.m0 / asym - 1.0).abs() < 0.01);
        let mut prev = f64::INFINITY;
        for l in [10.0, 20.0, 40.0, 80.0] {
            let dev = (radial_moments(&spec(l)).unwrap().r2() - 1.0).abs();
            // O(Λ⁻²): each doubling cuts the deviation by about four
            assert!(dev < prev / 3.5, "Λ={l}: {dev}");
            prev = dev;
        }
    }

    #[test]
    fn small_coupling_large_cutoff_is_resolved() {
        let s = SphereBasisSpec::new(50.0, 0.2).unwrap();
        let m = radial_moments(&s).unwrap();
        assert_relative_eq!(m.r2(), 0.04, max_relative = 0.02);
    }

    #[test]
    fn vacuum_overlaps() {
        assert_relative_eq!(vacuum_overlap(&spec(1.0)).unwrap(), 0.953387124440088, max_relative = 1e-10);
        assert_relative_eq!(vacuum_overlap(&spec(3.2)).unwrap(), 0.843266354925744, max_relative = 1e-10);
        assert_relative_eq!(vacuum_overlap(&spec(20.0)).unwrap(), 0.382753825449492, max_relative = 1e-10);
    }

    #[test]
    fn table_reproduces_moments() {
        let s = spec(3.2);
        let t = RadialTable::build(&s, DEFAULT_TABLE_POINTS).unwrap();
        assert_relative_eq!(t.m0, 0.536599684533799, max_relative = 1e-9);
        // midpoint rule over u reproduces ⟨r²⟩
        let n = 20000;
        let mean: f64 = (0..n).map(|i| t.sample((i as f64 + 0.5) / n as f64).powi(2)).sum::<f64>() / n as f64;
        assert_relative_eq!(mean, 1.11178335015177, max_relative = 1e-5);
        assert!(t.sample(0.0) >= t.r[0] && t.sample(0.999999) <= *t.r.last().unwrap());
    }
}
