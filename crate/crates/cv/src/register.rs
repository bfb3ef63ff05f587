//! Dense Fock-basis state of several qumodes.
//!
//! Amplitudes are stored row-major with mode 0 as the slowest index.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, CvError, Result};
use crate::gate::{CompiledGate, GateAction, GateSpec, LocalOp};
use crate::ops::CMatrix;

pub const DEFAULT_AMPLITUDE_CAP: usize = 200_000_000;
pub const DEFAULT_LEAKAGE_LIMIT: f64 = 1e-3;
pub const POST_SELECTION_FLOOR: f64 = 1e-12;

const CHUNK: usize = 1 << 12;

#[derive(Debug, Clone)]
pub struct QumodeRegister {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
    cap: usize,
    leakage: f64,
    leakage_limit: Option<f64>,
    gates: usize,
    success: f64,
}

/// Digits and strides of the target modes of a local operator.
struct Targets {
    dims: Vec<usize>,
    strides: Vec<usize>,
    /// Flat-index offset contributed by each local index.
    offsets: Vec<usize>,
}

impl Targets {
    #[inline]
    fn local(&self, i: usize) -> usize {
        let mut k = 0;
        for (d, s) in self.dims.iter().zip(&self.strides) {
            k = k * d + (i / s) % d;
        }
        k
    }
}

fn checked_len(dims: &[usize], cap: usize) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(invalid(format!("mode dimensions must be positive, got {dims:?}")));
    }
    let total: u128 = dims.iter().map(|&d| d as u128).product();
    if total > cap as u128 {
        return Err(CvError::MemoryCap { requested: total, cap });
    }
    Ok(total as usize)
}

impl QumodeRegister {
    pub fn vacuum(n_modes: usize, n_max: usize) -> Result<Self> {
        Self::vacuum_with_dims(&vec![n_max; n_modes])
    }

    pub fn vacuum_with_dims(dims: &[usize]) -> Result<Self> {
        Self::vacuum_with_cap(dims, DEFAULT_AMPLITUDE_CAP)
    }

    pub fn vacuum_with_cap(dims: &[usize], cap: usize) -> Result<Self> {
        let n = checked_len(dims, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self::raw(dims.to_vec(), amps, cap))
    }

    fn raw(dims: Vec<usize>, amps: Vec<Complex64>, cap: usize) -> Self {
        QumodeRegister {
            dims,
            amps,
            cap,
            leakage: 0.0,
            leakage_limit: Some(DEFAULT_LEAKAGE_LIMIT),
            gates: 0,
            success: 1.0,
        }
    }

    pub fn from_amplitudes(dims: &[usize], amps: Vec<Complex64>) -> Result<Self> {
        let n = checked_len(dims, DEFAULT_AMPLITUDE_CAP)?;
        if amps.len() != n {
            return Err(CvError::ShapeMismatch(format!("{} amplitudes for dims {dims:?}", amps.len())));
        }
        Ok(Self::raw(dims.to_vec(), amps, DEFAULT_AMPLITUDE_CAP))
    }

    /// Product Fock state `|n_0, n_1, …⟩`.
    pub fn fock(dims: &[usize], occupation: &[usize]) -> Result<Self> {
        if occupation.len() != dims.len() || occupation.iter().zip(dims).any(|(n, d)| n >= d) {
            return Err(invalid(format!("occupation {occupation:?} does not fit dims {dims:?}")));
        }
        let mut reg = Self::vacuum_with_dims(dims)?;
        reg.amps[0] = Complex64::new(0.0, 0.0);
        let idx = reg.flat_index(occupation);
        reg.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(reg)
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        self.amps[self.flat_index(occupation)]
    }

    pub fn flat_index(&self, occupation: &[usize]) -> usize {
        occupation.iter().zip(&self.dims).fold(0, |acc, (n, d)| acc * d + n)
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.par_iter().with_min_len(CHUNK).map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm_sq();
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("cannot normalize a zero or non-finite state"));
        }
        let s = 1.0 / n.sqrt();
        self.amps.par_iter_mut().with_min_len(CHUNK).for_each(|a| *a *= s);
        Ok(n)
    }

    /// Accumulated leakage estimate over all gates applied so far.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn gate_count(&self) -> usize {
        self.gates
    }

    /// Product of all post-selection probabilities so far.
    pub fn success_probability(&self) -> f64 {
        self.success
    }

    pub fn leakage_limit(&self) -> Option<f64> {
        self.leakage_limit
    }

    pub fn set_leakage_limit(&mut self, limit: Option<f64>) {
        self.leakage_limit = limit;
    }

    /// Adds leakage from operations applied outside [`Self::apply_compiled`].
    pub(crate) fn record_leakage(&mut self, leak: f64, gates: usize) -> Result<()> {
        self.leakage += leak;
        self.gates += gates;
        match self.leakage_limit {
            Some(limit) if self.leakage > limit => {
                Err(CvError::LeakageExceeded { accumulated: self.leakage, limit, gates: self.gates })
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn absorb_history(&mut self, leakage: f64, success: f64, gates: usize) {
        self.leakage += leakage;
        self.success *= success;
        self.gates += gates;
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for m in (0..self.dims.len().saturating_sub(1)).rev() {
            s[m] = s[m + 1] * self.dims[m + 1];
        }
        s
    }

    fn targets(&self, targets: &[usize], dims: &[usize]) -> Result<Targets> {
        if targets.iter().any(|&t| t >= self.n_modes()) {
            return Err(invalid(format!("targets {targets:?} out of range for {} modes", self.n_modes())));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(invalid("two-mode operation on a single mode"));
        }
        let tdims: Vec<usize> = targets.iter().map(|&t| self.dims[t]).collect();
        if tdims != dims {
            return Err(CvError::ShapeMismatch(format!("operator built for {dims:?}, modes have {tdims:?}")));
        }
        let all = self.strides();
        let strides: Vec<usize> = targets.iter().map(|&t| all[t]).collect();
        let n: usize = dims.iter().product();
        let offsets = (0..n)
            .map(|k| match dims.len() {
                1 => k * strides[0],
                _ => (k / dims[1]) * strides[0] + (k % dims[1]) * strides[1],
            })
            .collect();
        Ok(Targets { dims: tdims, strides, offsets })
    }

    fn apply_local(&mut self, t: &Targets, op: &LocalOp) {
        let x = &self.amps;
        let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
            for (j, o) in chunk.iter_mut().enumerate() {
                let i = ci * CHUNK + j;
                let r = t.local(i);
                let base = i - t.offsets[r];
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, v) in op.row(r) {
                    acc += v * x[base + t.offsets[c]];
                }
                *o = acc;
            }
        });
        self.amps = out;
    }

    fn expect_local(&self, t: &Targets, op: &LocalOp) -> Complex64 {
        let x = &self.amps;
        (0..x.len())
            .into_par_iter()
            .with_min_len(CHUNK)
            .map(|i| {
                let r = t.local(i);
                let base = i - t.offsets[r];
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, v) in op.row(r) {
                    acc += v * x[base + t.offsets[c]];
                }
                x[i].conj() * acc
            })
            .sum()
    }

    fn leak_of(&self, t: &Targets, gate: &CompiledGate) -> f64 {
        match &gate.leak {
            Some(m) => self.expect_local(t, m).re.max(0.0).sqrt(),
            None => 0.0,
        }
    }

    /// Applies a compiled gate and returns this gate's leakage estimate.
    pub fn apply_compiled(&mut self, gate: &CompiledGate, targets: &[usize]) -> Result<f64> {
        let t = self.targets(targets, &gate.dims)?;
        let leak_in = self.leak_of(&t, gate);
        match &gate.action {
            GateAction::Diagonal(ph) => {
                self.amps.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                    for (j, a) in chunk.iter_mut().enumerate() {
                        *a *= ph[t.local(ci * CHUNK + j)];
                    }
                });
            }
            GateAction::General(op) => self.apply_local(&t, op),
        }
        let leak = leak_in.max(self.leak_of(&t, gate));
        self.record_leakage(leak, 1)?;
        Ok(leak)
    }

    pub fn apply_gate(&mut self, spec: &GateSpec) -> Result<f64> {
        let dims: Vec<usize> = spec
            .targets
            .iter()
            .map(|&t| self.dims.get(t).copied().ok_or_else(|| invalid(format!("target {t} out of range"))))
            .collect::<Result<_>>()?;
        let gate = CompiledGate::compile(spec.kind, &dims)?;
        self.apply_compiled(&gate, &spec.targets)
    }

    /// Applies a non-unitary local map, renormalizes, and records its
    /// success probability.
    pub fn apply_kraus(&mut self, op: &CompiledGate, targets: &[usize]) -> Result<f64> {
        let t = self.targets(targets, &op.dims)?;
        let before = self.norm_sq();
        match &op.action {
            GateAction::General(m) => self.apply_local(&t, m),
            GateAction::Diagonal(_) => return Err(invalid("diagonal gates are not post-selecting maps")),
        }
        let p = self.norm_sq() / before;
        if !(p >= POST_SELECTION_FLOOR) {
            return Err(CvError::DegeneratePostSelection { probability: p, threshold: POST_SELECTION_FLOOR });
        }
        self.normalize()?;
        self.success *= p;
        Ok(p)
    }

    /// `⟨ψ|M|ψ⟩/⟨ψ|ψ⟩` for a local operator on one or two modes.
    pub fn expectation(&self, targets: &[usize], m: &CMatrix) -> Result<Complex64> {
        let dims: Vec<usize> = targets.iter().map(|&t| *self.dims.get(t).unwrap_or(&0)).collect();
        let t = self.targets(targets, &dims)?;
        let n: usize = dims.iter().product();
        if m.nrows() != n || m.ncols() != n {
            return Err(CvError::ShapeMismatch(format!("operator {}x{} on local dim {n}", m.nrows(), m.ncols())));
        }
        Ok(self.expect_local(&t, &LocalOp::from_dense(m)) / self.norm_sq())
    }

    fn digit_moment(&self, f: impl Fn(&[usize]) -> f64 + Sync, modes: &[usize]) -> f64 {
        let strides = self.strides();
        let dims = &self.dims;
        let num: f64 = self
            .amps
            .par_iter()
            .enumerate()
            .with_min_len(CHUNK)
            .map(|(i, a)| {
                let mut digits = [0usize; 2];
                for (k, &m) in modes.iter().enumerate() {
                    digits[k] = (i / strides[m]) % dims[m];
                }
                a.norm_sqr() * f(&digits[..modes.len()])
            })
            .sum();
        num / self.norm_sq()
    }

    pub fn expectation_number(&self, mode: usize) -> f64 {
        assert!(mode < self.n_modes());
        self.digit_moment(|d| d[0] as f64, &[mode])
    }

    pub fn expectation_number_sq(&self, mode: usize) -> f64 {
        assert!(mode < self.n_modes());
        self.digit_moment(|d| (d[0] * d[0]) as f64, &[mode])
    }

    pub fn expectation_cross_number(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n_modes() && j < self.n_modes());
        if i == j {
            return self.expectation_number_sq(i);
        }
        self.digit_moment(|d| (d[0] * d[1]) as f64, &[i, j])
    }

    /// `⟨(N_i + N_j)²⟩`.
    pub fn expectation_pair_number_sq(&self, i: usize, j: usize) -> f64 {
        self.digit_moment(|d| ((d[0] + d[1]) * (d[0] + d[1])) as f64, &[i, j])
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &QumodeRegister) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(CvError::ShapeMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(self
            .amps
            .par_iter()
            .zip(&other.amps)
            .with_min_len(CHUNK)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Keeps the branch with `n` photons in `mode` and removes that mode.
    ///
    /// Returns the renormalized register and the branch probability.
    pub fn project_mode(&self, mode: usize, n: usize) -> Result<(QumodeRegister, f64)> {
        if mode >= self.n_modes() || n >= self.dims[mode] {
            return Err(invalid(format!("cannot project mode {mode} onto |{n}⟩")));
        }
        if self.n_modes() == 1 {
            return Err(invalid("cannot remove the last mode"));
        }
        let stride = self.strides()[mode];
        let d = self.dims[mode];
        let mut dims = self.dims.clone();
        dims.remove(mode);
        let len: usize = dims.iter().product();
        let amps: Vec<Complex64> = (0..len)
            .into_par_iter()
            .with_min_len(CHUNK)
            .map(|j| {
                let (hi, lo) = (j / stride, j % stride);
                self.amps[hi * d * stride + n * stride + lo]
            })
            .collect();
        let total = self.norm_sq();
        let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let p = kept / total;
        if !(p >= POST_SELECTION_FLOOR) {
            return Err(CvError::DegeneratePostSelection { probability: p, threshold: POST_SELECTION_FLOOR });
        }
        let mut out = QumodeRegister { dims, amps, ..self.clone_meta() };
        out.normalize()?;
        out.success *= p;
        Ok((out, p))
    }

    fn clone_meta(&self) -> QumodeRegister {
        QumodeRegister {
            dims: Vec::new(),
            amps: Vec::new(),
            cap: self.cap,
            leakage: self.leakage,
            leakage_limit: self.leakage_limit,
            gates: self.gates,
            success: self.success,
        }
    }

    /// `self ⊗ other`, with the modes of `self` first.
    pub fn tensor(&self, other: &QumodeRegister) -> Result<QumodeRegister> {
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        checked_len(&dims, self.cap)?;
        let m = other.amps.len();
        let amps: Vec<Complex64> = (0..self.amps.len() * m)
            .into_par_iter()
            .with_min_len(CHUNK)
            .map(|k| self.amps[k / m] * other.amps[k % m])
            .collect();
        let mut out = QumodeRegister { dims, amps, ..self.clone_meta() };
        out.absorb_history(other.leakage, other.success, other.gates);
        Ok(out)
    }

    pub fn append_vacuum(&self, dim: usize) -> Result<QumodeRegister> {
        self.tensor(&QumodeRegister::vacuum_with_dims(&[dim])?)
    }
}
