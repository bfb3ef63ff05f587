//! Monte-Carlo CC energies for any lattice size.
//!
//! The Rayleigh quotient is a ratio of integrals over radii and unit vectors.
//! The kinetic term uses `⟨Ψ|L²|Ψ⟩ = ∫|∇_S Ψ|²`, with the angular gradient of
//! the Ansatz taken analytically.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cc::CcState;
use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;
use crate::qmc::{Halton, MAX_DIM};
use crate::sphere::radial::{RadialTable, SphereBasisSpec, DEFAULT_TABLE_POINTS};
use crate::stats::{block_sizes, jackknife, MCEstimate, DEFAULT_BLOCKS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    QuasiMc,
    GaussianRadial,
    ExactRadialAlpha0,
}

impl Sampler {
    /// Stochastic sampler for final estimates: Gaussian radial proposal for
    /// Λ ≥ 3, the exact α = 0 radial density below. The O(3) limit has no
    /// radial coordinate, so either choice reduces to uniform angles.
    pub fn for_cutoff(lambda: Option<f64>) -> Self {
        match lambda {
            Some(l) if l < 3.0 => Sampler::ExactRadialAlpha0,
            _ => Sampler::GaussianRadial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CCConfig {
    pub alpha: f64,
    pub n_samples: u64,
    pub sampler: Sampler,
    pub seed: u64,
    #[serde(default)]
    pub lambda_cutoff: Option<f64>,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
}

fn default_blocks() -> usize {
    DEFAULT_BLOCKS
}

impl CCConfig {
    pub fn new(alpha: f64, n_samples: u64, lambda_cutoff: Option<f64>) -> Self {
        CCConfig {
            alpha,
            n_samples,
            sampler: Sampler::for_cutoff(lambda_cutoff),
            seed: 1,
            lambda_cutoff,
            blocks: DEFAULT_BLOCKS,
        }
    }

    /// 500k samples up to g² = 1, 5M above.
    pub fn default_samples(g_sq: f64) -> u64 {
        if g_sq <= 1.0 {
            500_000
        } else {
            5_000_000
        }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        params.validate()?;
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(invalid(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        if self.n_samples == 0 {
            return Err(invalid("n_samples must be positive"));
        }
        if self.blocks < 2 || self.blocks as u64 > self.n_samples {
            return Err(invalid(format!("blocks = {} incompatible with {} samples", self.blocks, self.n_samples)));
        }
        if let Some(l) = self.lambda_cutoff {
            SphereBasisSpec::new(l, params.g())?;
        }
        Ok(())
    }
}

/// Energies per site with their split into kinetic and potential parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcEstimate {
    pub energy: MCEstimate,
    pub kinetic: MCEstimate,
    pub potential: MCEstimate,
}

/// Reusable sampler state: lattice, cutoff, and the radial table if any.
#[derive(Debug, Clone)]
pub struct CcIntegrator {
    params: ModelParams,
    spec: Option<SphereBasisSpec>,
    table: Option<Arc<RadialTable>>,
    links: Vec<(usize, usize)>,
}

struct Sample {
    r: Vec<f64>,
    n: Vec<[f64; 3]>,
    ln_w: f64,
}

impl CcIntegrator {
    pub fn new(params: &ModelParams, lambda_cutoff: Option<f64>) -> Result<Self> {
        params.validate()?;
        let spec = lambda_cutoff.map(|l| SphereBasisSpec::new(l, params.g())).transpose()?;
        let table = spec
            .as_ref()
            .map(|s| RadialTable::build(s, DEFAULT_TABLE_POINTS).map(Arc::new))
            .transpose()?;
        Ok(CcIntegrator {
            params: params.clone(),
            spec,
            table,
            links: params.links(),
        })
    }

    /// Use a prebuilt (for example cached) radial table.
    pub fn with_table(params: &ModelParams, table: Arc<RadialTable>) -> Result<Self> {
        params.validate()?;
        if (table.spec.g - params.g()).abs() > 1e-12 * params.g() {
            return Err(invalid("radial table built for a different coupling"));
        }
        Ok(CcIntegrator {
            params: params.clone(),
            spec: Some(table.spec),
            table: Some(table),
            links: params.links(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn qmc_dim(&self) -> usize {
        self.params.n_sites * if self.spec.is_some() { 3 } else { 2 }
    }

    fn unit_vector(u_cos: f64, u_phi: f64) -> [f64; 3] {
        let c = 2.0 * u_cos - 1.0;
        let s = (1.0 - c * c).max(0.0).sqrt();
        let (sp, cp) = (2.0 * PI * u_phi).sin_cos();
        [s * cp, s * sp, c]
    }

    fn draw(&self, sampler: Sampler, rng: &mut ChaCha8Rng, halton: Option<(&Halton, u64, &mut [f64])>, out: &mut Sample) {
        let l = self.params.n_sites;
        out.ln_w = 0.0;
        if let Some((h, k, buf)) = halton {
            h.point(k, buf);
            for x in 0..l {
                match &self.table {
                    None => {
                        out.r[x] = self.params.g();
                        out.n[x] = Self::unit_vector(buf[2 * x], buf[2 * x + 1]);
                    }
                    Some(t) => {
                        out.r[x] = t.sample(buf[3 * x]);
                        out.n[x] = Self::unit_vector(buf[3 * x + 1], buf[3 * x + 2]);
                    }
                }
            }
            return;
        }
        for x in 0..l {
            out.n[x] = Self::unit_vector(rng.random(), rng.random());
            out.r[x] = match (&self.table, sampler) {
                (None, _) => self.params.g(),
                (Some(t), Sampler::ExactRadialAlpha0 | Sampler::QuasiMc) => t.sample(rng.random()),
                (Some(t), Sampler::GaussianRadial) => {
                    let spec = &t.spec;
                    let sigma = 1.0 / spec.lambda_cutoff;
                    let z: f64 = rng.sample(StandardNormal);
                    let r = spec.g + sigma * z;
                    if r <= 0.0 {
                        out.ln_w = f64::NEG_INFINITY;
                        spec.g
                    } else {
                        out.ln_w += 2.0 * r.ln() + spec.ln_density(r) + 0.5 * z * z;
                        r
                    }
                }
            };
        }
    }

    /// Accumulates one sample into `acc`. Returns false for a non-finite sample.
    fn accumulate(&self, alpha: f64, state: CcState, s: &Sample, b: &mut [[f64; 3]], acc: &mut [f64]) -> bool {
        let g_sq = self.params.g_sq;
        let l = self.params.n_sites;
        let c = alpha / l as f64;
        let mut ln_w = s.ln_w;
        if ln_w == f64::NEG_INFINITY {
            return true;
        }
        b.iter_mut().for_each(|v| *v = [0.0; 3]);
        let phi = |x: usize| [s.r[x] * s.n[x][0], s.r[x] * s.n[x][1], s.r[x] * s.n[x][2]];
        let mut pot = 0.0;
        for &(x, y) in &self.links {
            let (px, py) = (phi(x), phi(y));
            let d2: f64 = (0..3).map(|i| (px[i] - py[i]).powi(2)).sum();
            ln_w -= c * d2;
            pot += 0.5 * d2 - g_sq;
            for i in 0..3 {
                b[x][i] += c * s.r[x] * py[i];
                b[y][i] += c * s.r[y] * px[i];
            }
        }
        let w = ln_w.exp();
        let proj = |x: usize| {
            let nb: f64 = (0..3).map(|i| s.n[x][i] * b[x][i]).sum();
            [b[x][0] - nb * s.n[x][0], b[x][1] - nb * s.n[x][1], b[x][2] - nb * s.n[x][2]]
        };
        let vals: [f64; 5] = match state {
            CcState::Ground => {
                let kin: f64 = (0..l).map(|x| proj(x).iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / (2.0 * g_sq);
                [w, w * kin, w * pot, 0.0, 0.0]
            }
            CcState::Excited => {
                let big_s: f64 = (0..l).map(|x| s.r[x] * s.n[x][2]).sum();
                let mut kin = 0.0;
                for x in 0..l {
                    let pb = proj(x);
                    let n3 = s.n[x][2];
                    let zhat = [-n3 * s.n[x][0], -n3 * s.n[x][1], 1.0 - n3 * n3];
                    kin += (0..3).map(|i| (big_s * pb[i] + s.r[x] * zhat[i]).powi(2)).sum::<f64>();
                }
                kin /= 2.0 * g_sq;
                let s2 = big_s * big_s;
                [w * s2, w * kin, w * s2 * pot, w * big_s, w]
            }
        };
        let ok = vals.iter().all(|v| v.is_finite());
        if ok {
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += v;
            }
        }
        ok
    }

    fn block_sums(&self, alpha: f64, state: CcState, sampler: Sampler, n: u64, seed: u64, blocks: usize) -> Result<Vec<Vec<f64>>> {
        let quasi = sampler == Sampler::QuasiMc;
        let halton = if quasi {
            if self.qmc_dim() > MAX_DIM {
                return Err(invalid("too many sites for quasi-MC points"));
            }
            Some(Halton::new(self.qmc_dim())?)
        } else {
            None
        };
        let sizes = block_sizes(n, blocks);
        let starts: Vec<u64> = sizes
            .iter()
            .scan(0u64, |acc, &s| {
                let start = *acc;
                *acc += s;
                Some(start)
            })
            .collect();
        let results: Vec<(Vec<f64>, usize)> = (0..sizes.len())
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b as u64);
                let mut sample = Sample {
                    r: vec![0.0; self.params.n_sites],
                    n: vec![[0.0; 3]; self.params.n_sites],
                    ln_w: 0.0,
                };
                let mut buf = vec![0.0; self.qmc_dim()];
                let mut grad = vec![[0.0; 3]; self.params.n_sites];
                let mut acc = vec![0.0; 5];
                let mut bad = 0;
                for k in 0..sizes[b] {
                    let hal = halton.as_ref().map(|h| (h, starts[b] + k, buf.as_mut_slice()));
                    self.draw(sampler, &mut rng, hal, &mut sample);
                    if !self.accumulate(alpha, state, &sample, &mut grad, &mut acc) {
                        bad += 1;
                    }
                }
                (acc, bad)
            })
            .collect();
        let bad: usize = results.iter().map(|r| r.1).sum();
        if bad > 0 {
            return Err(Error::NonFinite { count: bad });
        }
        Ok(results.into_iter().map(|r| r.0).collect())
    }

    /// Energy per site of the ground or excited Ansatz.
    pub fn estimate(&self, cfg: &CCConfig, state: CcState) -> Result<CcEstimate> {
        cfg.validate(&self.params)?;
        if cfg.lambda_cutoff != self.spec.map(|s| s.lambda_cutoff) {
            return Err(invalid("config cutoff does not match the integrator"));
        }
        let sums = self.block_sums(cfg.alpha, state, cfg.sampler, cfg.n_samples, cfg.seed, cfg.blocks)?;
        let l = self.params.n_sites as f64;
        let est = |f: &dyn Fn(&[f64]) -> f64| {
            let (mean, stderr) = jackknife(&sums, f);
            let det = cfg.sampler == Sampler::QuasiMc;
            MCEstimate {
                mean,
                stderr: if det { 0.0 } else { stderr },
                n_samples: cfg.n_samples,
                deterministic: det,
            }
        };
        // ground sums: [w, wK, wV]; excited: [wS², wK₁, wS²V, wS, w]
        Ok(CcEstimate {
            energy: est(&|t| (t[1] + t[2]) / t[0] / l),
            kinetic: est(&|t| t[1] / t[0] / l),
            potential: est(&|t| t[2] / t[0] / l),
        })
    }

    /// Normalized overlap `⟨CC|CC₁⟩ / (‖CC‖‖CC₁‖)`.
    pub fn overlap(&self, cfg: &CCConfig) -> Result<MCEstimate> {
        cfg.validate(&self.params)?;
        let sums = self.block_sums(cfg.alpha, CcState::Excited, cfg.sampler, cfg.n_samples, cfg.seed, cfg.blocks)?;
        let (mean, stderr) = jackknife(&sums, |t| t[3] / (t[0] * t[4]).sqrt());
        Ok(MCEstimate {
            mean,
            stderr,
            n_samples: cfg.n_samples,
            deterministic: cfg.sampler == Sampler::QuasiMc,
        })
    }
}

pub fn cc_energy_mc(params: &ModelParams, cfg: &CCConfig) -> Result<MCEstimate> {
    Ok(CcIntegrator::new(params, cfg.lambda_cutoff)?.estimate(cfg, CcState::Ground)?.energy)
}

pub fn cc_excited_mc(params: &ModelParams, cfg: &CCConfig) -> Result<MCEstimate> {
    Ok(CcIntegrator::new(params, cfg.lambda_cutoff)?.estimate(cfg, CcState::Excited)?.energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::closed_form::{cc_energy_l2_closed_form, cc_excited_l2_closed_form};
    use crate::cc::l2::cc_energy_l2_quadrature;

    fn p(n: usize, g: f64) -> ModelParams {
        ModelParams::new(n, g, 3).unwrap()
    }

    #[test]
    fn agrees_with_closed_form() {
        for g in [0.5, 1.0, 4.0] {
            let integ = CcIntegrator::new(&p(2, g), None).unwrap();
            for a in [0.2, 0.5, 0.839, 1.5] {
                let mut cfg = CCConfig::new(a, 200_000, None);
                cfg.seed = 7;
                let e0 = integ.estimate(&cfg, CcState::Ground).unwrap().energy;
                let exact = cc_energy_l2_closed_form(g, a);
                assert!((e0.mean - exact).abs() < 3.0 * e0.stderr, "g²={g} α={a}: {e0:?} vs {exact}");
                let e1 = integ.estimate(&cfg, CcState::Excited).unwrap().energy;
                let exact1 = cc_excited_l2_closed_form(g, a);
                assert!((e1.mean - exact1).abs() < 3.0 * e1.stderr, "g²={g} α={a}: {e1:?} vs {exact1}");
            }
        }
    }

    #[test]
    fn zero_alpha_is_exactly_zero() {
        for n in [2, 3, 5] {
            let cfg = CCConfig::new(0.0, 10_000, None);
            let e = CcIntegrator::new(&p(n, 1.0), None).unwrap().estimate(&cfg, CcState::Ground).unwrap();
            assert_eq!(e.kinetic.mean, 0.0);
            // −g²⟨n·n⟩ averages to zero, up to sampling noise
            assert!(e.energy.mean.abs() < 4.0 * e.energy.stderr + 1e-12);
        }
    }

    #[test]
    fn stderr_scales_with_sample_count() {
        let integ = CcIntegrator::new(&p(3, 1.0), None).unwrap();
        let mut errs = Vec::new();
        for n in [100_000, 200_000] {
            let mut cfg = CCConfig::new(0.8, n, None);
            cfg.seed = 11;
            errs.push(integ.estimate(&cfg, CcState::Ground).unwrap().energy.stderr);
        }
        let ratio = errs[1] / errs[0];
        assert!((ratio - 0.5f64.sqrt()).abs() < 0.2 * 0.5f64.sqrt(), "ratio {ratio}");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let integ = CcIntegrator::new(&p(3, 1.0), Some(3.2)).unwrap();
        let cfg = CCConfig::new(0.7, 20_000, Some(3.2));
        let a = integ.estimate(&cfg, CcState::Excited).unwrap();
        let b = integ.estimate(&cfg, CcState::Excited).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn finite_cutoff_samplers_agree_with_quadrature() {
        for lambda in [1.0, 3.2, 10.0] {
            let integ = CcIntegrator::new(&p(2, 1.0), Some(lambda)).unwrap();
            let spec = SphereBasisSpec::new(lambda, 1.0).unwrap();
            for state in [CcState::Ground, CcState::Excited] {
                let exact = cc_energy_l2_quadrature(1.0, 0.8, Some(&spec), state).unwrap();
                for sampler in [Sampler::GaussianRadial, Sampler::ExactRadialAlpha0] {
                    let mut cfg = CCConfig::new(0.8, 200_000, Some(lambda));
                    cfg.sampler = sampler;
                    let e = integ.estimate(&cfg, state).unwrap().energy;
                    assert!(
                        (e.mean - exact).abs() < 3.5 * e.stderr,
                        "Λ={lambda} {state:?} {sampler:?}: {e:?} vs {exact}"
                    );
                }
                let mut cfg = CCConfig::new(0.8, 1 << 16, Some(lambda));
                cfg.sampler = Sampler::QuasiMc;
                let q = integ.estimate(&cfg, state).unwrap().energy;
                assert!(q.deterministic && q.stderr == 0.0);
                assert!((q.mean - exact).abs() < 5e-3, "Λ={lambda} {state:?} qmc {} vs {exact}", q.mean);
            }
        }
    }

    #[test]
    fn excited_state_is_orthogonal_and_above_ground() {
        let params = p(3, 1.0);
        let integ = CcIntegrator::new(&params, None).unwrap();
        let cfg = CCConfig::new(0.7, 100_000, None);
        let ov = integ.overlap(&cfg).unwrap();
        assert!(ov.mean.abs() < 3.0 * ov.stderr, "{ov:?}");
        let e0 = integ.estimate(&cfg, CcState::Ground).unwrap().energy;
        let e1 = integ.estimate(&cfg, CcState::Excited).unwrap().energy;
        assert!(e1.mean > e0.mean - 3.0 * (e0.stderr.hypot(e1.stderr)));
    }

    #[test]
    fn validation() {
        let params = p(2, 1.0);
        assert!(cc_energy_mc(&params, &CCConfig::new(-1.0, 1000, None)).is_err());
        assert!(cc_energy_mc(&params, &CCConfig::new(1.0, 0, None)).is_err());
        assert!(cc_energy_mc(&params, &CCConfig::new(1.0, 1000, Some(-2.0))).is_err());
    }
}
