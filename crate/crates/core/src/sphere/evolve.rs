//! Return probabilities from radial sampling of `⟨Ω|e^{−itH(r)}|Ω⟩`.
//!
//! `H` never moves the radii, so for fixed radii it is an angular matrix with
//! couplings `−r(x)r(y) n·n` and on-site terms `½(r(x)²+r(y)²) − g²` per link.
//! The amplitude is averaged over radii drawn from `r²ψ²` and squared afterwards.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cc::CCConfig;
use crate::error::{invalid, Result};
use crate::model::{ModelParams, DEFAULT_DIM_CAP};
use crate::rotor::{casimir_diagonal, link_operator};
use crate::sparse::SparseHermitian;
use crate::sphere::hamiltonian::check_spec;
use crate::sphere::radial::{RadialTable, SphereBasisSpec, DEFAULT_TABLE_POINTS};
use crate::stats::{block_sizes, jackknife, MCEstimate};

/// Which state the evolved `|Ω⟩` is projected on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnTarget {
    Omega,
    /// The photon-number vacuum of all `3L` field modes.
    FockVacuum,
}

/// Angular pieces restricted to the states reachable from `l = m = 0` everywhere.
#[derive(Debug, Clone)]
struct AngularBlock {
    kinetic: Vec<f64>,
    links: Vec<(usize, usize, DMatrix<f64>)>,
}

impl AngularBlock {
    fn new(params: &ModelParams) -> Result<Self> {
        let cap = DEFAULT_DIM_CAP;
        let ops = params
            .links()
            .into_iter()
            .map(|(x, y)| Ok((x, y, link_operator(params, x, y, cap)?)))
            .collect::<Result<Vec<_>>>()?;
        let terms: Vec<(&SparseHermitian, f64)> = ops.iter().map(|o| (&o.2, 1.0)).collect();
        let all = SparseHermitian::linear_combination(&terms, None)?;
        let sector = all.reachable_from(0);
        let cas = casimir_diagonal(params, cap)?;
        let kinetic = sector.iter().map(|&i| cas[i] / (2.0 * params.g_sq)).collect();
        let links = ops
            .iter()
            .map(|(x, y, op)| {
                let m = op.restrict(&sector)?.to_dense_real().expect("n·n is real");
                Ok((*x, *y, m))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AngularBlock { kinetic, links })
    }

    fn dim(&self) -> usize {
        self.kinetic.len()
    }

    /// Interaction part of `H(r)`, constant shift included.
    fn potential(&self, g_sq: f64, r: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        let mut v = DMatrix::<f64>::zeros(d, d);
        let mut shift = 0.0;
        for (x, y, m) in &self.links {
            shift += 0.5 * (r[*x] * r[*x] + r[*y] * r[*y]) - g_sq;
            v += m * (-r[*x] * r[*y]);
        }
        for i in 0..d {
            v[(i, i)] += shift;
        }
        v
    }

    /// `⟨0|e^{−itH(r)}|0⟩` for each `t`.
    fn amplitudes(&self, g_sq: f64, r: &[f64], times: &[f64], out: &mut [Complex64]) {
        let d = self.dim();
        let mut h = self.potential(g_sq, r);
        for (i, k) in self.kinetic.iter().enumerate() {
            h[(i, i)] += k;
        }
        let e = SymmetricEigen::new(h);
        for (o, &t) in out.iter_mut().zip(times) {
            if t == 0.0 {
                *o = Complex64::new(1.0, 0.0);
                continue;
            }
            *o = (0..d)
                .map(|k| {
                    let w = e.eigenvectors[(0, k)].powi(2);
                    Complex64::from_polar(w, -t * e.eigenvalues[k])
                })
                .sum();
        }
    }
}

impl AngularBlock {
    /// `⟨0|(e^{−iΔt K} e^{−iΔt V})^steps|0⟩` with `Δt = t/steps`.
    fn trotter_amplitudes(&self, g_sq: f64, r: &[f64], times: &[f64], steps: usize, out: &mut [Complex64]) {
        let d = self.dim();
        let e = SymmetricEigen::new(self.potential(g_sq, r));
        let q = &e.eigenvectors;
        let mut psi = vec![Complex64::new(0.0, 0.0); d];
        let mut tmp = vec![Complex64::new(0.0, 0.0); d];
        for (o, &t) in out.iter_mut().zip(times) {
            let dt = t / steps as f64;
            psi.iter_mut().for_each(|p| *p = Complex64::new(0.0, 0.0));
            psi[0] = Complex64::new(1.0, 0.0);
            for _ in 0..steps {
                for k in 0..d {
                    let c: Complex64 = (0..d).map(|i| q[(i, k)] * psi[i]).sum();
                    tmp[k] = c * Complex64::from_polar(1.0, -dt * e.eigenvalues[k]);
                }
                for (i, p) in psi.iter_mut().enumerate() {
                    let v: Complex64 = (0..d).map(|k| q[(i, k)] * tmp[k]).sum();
                    *p = v * Complex64::from_polar(1.0, -dt * self.kinetic[i]);
                }
            }
            *o = psi[0];
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReturnProbabilityOracle {
    params: ModelParams,
    spec: SphereBasisSpec,
    table: Arc<RadialTable>,
    block: AngularBlock,
}

impl ReturnProbabilityOracle {
    pub fn new(params: &ModelParams, spec: &SphereBasisSpec) -> Result<Self> {
        check_spec(params, spec)?;
        let table = Arc::new(RadialTable::build(spec, DEFAULT_TABLE_POINTS)?);
        Self::with_table(params, table)
    }

    pub fn with_table(params: &ModelParams, table: Arc<RadialTable>) -> Result<Self> {
        check_spec(params, &table.spec)?;
        Ok(ReturnProbabilityOracle {
            params: params.clone(),
            spec: table.spec,
            block: AngularBlock::new(params)?,
            table,
        })
    }

    /// Size of the angular block actually exponentiated.
    pub fn sector_dim(&self) -> usize {
        self.block.dim()
    }

    /// One estimate per time, all from the same radial samples.
    pub fn curve(&self, times: &[f64], cfg: &CCConfig, target: ReturnTarget) -> Result<Vec<MCEstimate>> {
        self.sampled(times, cfg, target, None)
    }

    /// Same samples as [`Self::curve`], but evolved with first-order splitting,
    /// interaction first, in `steps` equal slices.
    pub fn trotter_curve(&self, times: &[f64], cfg: &CCConfig, target: ReturnTarget, steps: usize) -> Result<Vec<MCEstimate>> {
        if steps == 0 {
            return Err(invalid("need at least one Trotter step"));
        }
        self.sampled(times, cfg, target, Some(steps))
    }

    fn sampled(&self, times: &[f64], cfg: &CCConfig, target: ReturnTarget, steps: Option<usize>) -> Result<Vec<MCEstimate>> {
        cfg.validate(&self.params)?;
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(invalid("times must be finite and non-negative"));
        }
        let nt = times.len();
        let l = self.params.n_sites;
        let g_sq = self.params.g_sq;
        // normalized radial function is ψ/√m0; Fock vacuum radial part is π^{-3/4}√(4π) e^{-r²/2}
        let vac_pref = std::f64::consts::PI.powf(-0.75) * (4.0 * std::f64::consts::PI).sqrt() * self.table.m0.sqrt();
        let sizes = block_sizes(cfg.n_samples, cfg.blocks);
        let blocks: Vec<Vec<f64>> = (0..sizes.len())
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(b as u64);
                let mut acc = vec![0.0; 2 * nt + 1];
                let mut r = vec![0.0; l];
                let mut amp = vec![Complex64::new(0.0, 0.0); nt];
                for _ in 0..sizes[b] {
                    for ri in r.iter_mut() {
                        *ri = self.table.sample(rng.random());
                    }
                    match steps {
                        None => self.block.amplitudes(g_sq, &r, times, &mut amp),
                        Some(n) => self.block.trotter_amplitudes(g_sq, &r, times, n, &mut amp),
                    }
                    let w = match target {
                        ReturnTarget::Omega => 1.0,
                        ReturnTarget::FockVacuum => r
                            .iter()
                            .map(|&ri| vac_pref * (-0.5 * ri * ri).exp() / self.spec.psi(ri))
                            .product(),
                    };
                    for (k, a) in amp.iter().enumerate() {
                        acc[2 * k] += w * a.re;
                        acc[2 * k + 1] += w * a.im;
                    }
                    acc[2 * nt] += 1.0;
                }
                acc
            })
            .collect();
        Ok((0..nt)
            .map(|k| {
                let (mean, stderr) = jackknife(&blocks, |s| (s[2 * k].powi(2) + s[2 * k + 1].powi(2)) / s[2 * nt].powi(2));
                MCEstimate {
                    mean,
                    stderr,
                    n_samples: cfg.n_samples,
                    deterministic: false,
                }
            })
            .collect())
    }
}

/// `|⟨Ω|e^{−itH}|Ω⟩|²` with radii sampled from the cutoff profile.
pub fn evolve_return_probability_mc(
    params: &ModelParams,
    spec: &SphereBasisSpec,
    t: f64,
    cfg: &CCConfig,
) -> Result<MCEstimate> {
    let oracle = ReturnProbabilityOracle::new(params, spec)?;
    Ok(oracle.curve(&[t], cfg, ReturnTarget::Omega)?[0])
}

/// Fixed-radius (O(3) rotor) return probability of the `l = 0` product state.
pub fn o3_return_probability(params: &ModelParams, times: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    let block = AngularBlock::new(params)?;
    let r = vec![params.g(); params.n_sites];
    let mut amp = vec![Complex64::new(0.0, 0.0); times.len()];
    block.amplitudes(params.g_sq, &r, times, &mut amp);
    Ok(amp.iter().map(|a| a.norm_sqr()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::radial::vacuum_overlap;
    use approx::assert_abs_diff_eq;

    fn params() -> ModelParams {
        ModelParams::new(2, 1.0, 3).unwrap()
    }

    #[test]
    fn o3_curve_matches_oracle() {
        let p = o3_return_probability(&params(), &[0.0, 0.5, 1.0, 2.0, 4.0]).unwrap();
        let expect = [1.0, 0.729425, 0.396513, 0.945612, 0.802101];
        for (a, b) in p.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn reachable_block_is_small() {
        let o = ReturnProbabilityOracle::new(&params(), &SphereBasisSpec::new(3.2, 1.0).unwrap()).unwrap();
        assert_eq!(o.sector_dim(), 24);
    }

    #[test]
    fn sampled_curve_matches_radial_quadrature() {
        // 120×120 Gauss–Legendre radial quadrature of the same amplitude
        let o = ReturnProbabilityOracle::new(&params(), &SphereBasisSpec::new(3.2, 1.0).unwrap()).unwrap();
        let cfg = CCConfig::new(0.0, 20_000, Some(3.2));
        let est = o.curve(&[0.0, 0.5, 1.0, 2.0, 4.0], &cfg, ReturnTarget::Omega).unwrap();
        assert_eq!(est[0].mean, 1.0);
        for (e, x) in est[1..].iter().zip([0.640771, 0.361848, 0.559808, 0.159008]) {
            assert!((e.mean - x).abs() < 3.5 * e.stderr + 1e-4, "{e:?} vs {x}");
            assert!(e.mean <= 1.0 + 3.0 * e.stderr);
        }
    }

    #[test]
    fn vacuum_target_at_zero_time() {
        let spec = SphereBasisSpec::new(3.2, 1.0).unwrap();
        let o = ReturnProbabilityOracle::new(&params(), &spec).unwrap();
        let cfg = CCConfig::new(0.0, 50_000, Some(3.2));
        let est = o.curve(&[0.0], &cfg, ReturnTarget::FockVacuum).unwrap()[0];
        let exact = vacuum_overlap(&spec).unwrap().powi(4);
        assert!((est.mean - exact).abs() < 3.5 * est.stderr, "{est:?} vs {exact}");
    }

    #[test]
    fn trotter_curve_converges_at_first_order() {
        let o = ReturnProbabilityOracle::new(&params(), &SphereBasisSpec::new(3.2, 1.0).unwrap()).unwrap();
        let cfg = CCConfig::new(0.0, 2_000, Some(3.2));
        let t = [1.0];
        let exact = o.curve(&t, &cfg, ReturnTarget::FockVacuum).unwrap()[0].mean;
        let dev: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&n| (o.trotter_curve(&t, &cfg, ReturnTarget::FockVacuum, n).unwrap()[0].mean - exact).abs())
            .collect();
        assert!(dev[1] < dev[0] / 1.6 && dev[2] < dev[1] / 1.6, "{dev:?}");
        assert!(o.trotter_curve(&t, &cfg, ReturnTarget::Omega, 0).is_err());
    }
}
