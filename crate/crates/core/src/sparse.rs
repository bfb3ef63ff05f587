//! Upper-triangle storage for Hermitian operators.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Hermitian matrix stored as its upper triangle (`row <= col`), sorted and
/// free of duplicates. The lower triangle is implied by conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHermitian {
    /// Build from arbitrary triplets. Entries below the diagonal are conjugated
    /// into the upper triangle and duplicates are summed, so callers may push
    /// both halves or either half of each pair.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(invalid(format!("entry ({r}, {c}) outside dimension {dim}")));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(invalid(format!("non-finite entry at ({r}, {c})")));
            }
            if r <= c {
                entries.push((r, c, v));
            } else {
                entries.push((c, r, v.conj()));
            }
        }
        Self::from_upper_unchecked(dim, entries)
    }

    /// Same as [`Self::from_triplets`] but rejects anything below the diagonal.
    pub fn from_upper_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let entries: Vec<_> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = entries.iter().find(|e| e.0 > e.1) {
            return Err(invalid(format!("entry ({r}, {c}) is below the diagonal")));
        }
        Self::from_triplets(dim, entries)
    }

    fn from_upper_unchecked(dim: usize, mut entries: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        entries.par_sort_unstable_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        for e in merged.iter_mut().filter(|e| e.0 == e.1) {
            if e.2.im.abs() > 1e-12 * e.2.re.abs().max(1.0) {
                return Err(invalid(format!("diagonal entry {} has imaginary part {}", e.0, e.2.im)));
            }
            e.2.im = 0.0;
        }
        merged.retain(|e| e.2 != Complex64::new(0.0, 0.0));
        Ok(SparseHermitian { dim, entries: merged })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_triplets(
            diag.len(),
            diag.iter().enumerate().map(|(i, &d)| (i, i, Complex64::new(d, 0.0))),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored upper-triangle entries, sorted by (row, col).
    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn nnz_upper(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let (r, c, conj) = if row <= col { (row, col, false) } else { (col, row, true) };
        match self.entries.binary_search_by_key(&(r, c), |e| (e.0, e.1)) {
            Ok(i) if conj => self.entries[i].2.conj(),
            Ok(i) => self.entries[i].2,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.2.im == 0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for e in self.entries.iter().filter(|e| e.0 == e.1) {
            d[e.0] = e.2.re;
        }
        d
    }

    /// `Σ cᵢ Hᵢ + diag(extra)`. All terms must share one dimension.
    pub fn linear_combination(terms: &[(&SparseHermitian, f64)], extra_diag: Option<&[f64]>) -> Result<Self> {
        let dim = match (terms.first(), extra_diag) {
            (Some((h, _)), _) => h.dim,
            (None, Some(d)) => d.len(),
            (None, None) => return Err(invalid("empty linear combination")),
        };
        if terms.iter().any(|(h, _)| h.dim != dim) || extra_diag.is_some_and(|d| d.len() != dim) {
            return Err(invalid("dimension mismatch in linear combination"));
        }
        let mut entries = Vec::with_capacity(terms.iter().map(|t| t.0.entries.len()).sum());
        for (h, c) in terms {
            entries.extend(h.entries.iter().map(|&(r, col, v)| (r, col, v * *c)));
        }
        if let Some(d) = extra_diag {
            entries.extend(d.iter().enumerate().map(|(i, &x)| (i, i, Complex64::new(x, 0.0))));
        }
        Self::from_upper_unchecked(dim, entries)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
        m
    }

    /// Dense real matrix, if every entry is real.
    pub fn to_dense_real(&self) -> Option<DMatrix<f64>> {
        if !self.is_real() {
            return None;
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v.re;
            m[(c, r)] = v.re;
        }
        Some(m)
    }

    /// Principal submatrix on `indices` (which must be strictly increasing).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("restriction indices must be strictly increasing"));
        }
        if indices.last().is_some_and(|&i| i >= self.dim) {
            return Err(invalid("restriction index out of range"));
        }
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            pos[i] = k;
        }
        let entries = self
            .entries
            .iter()
            .filter(|e| pos[e.0] != usize::MAX && pos[e.1] != usize::MAX)
            .map(|&(r, c, v)| (pos[r], pos[c], v))
            .collect();
        Self::from_upper_unchecked(indices.len(), entries)
    }

    /// Indices connected to `start` through nonzero off-diagonal entries, sorted.
    pub fn reachable_from(&self, start: usize) -> Vec<usize> {
        let csr = self.to_csr();
        let mut seen = vec![false; self.dim];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &csr.indices[csr.indptr[i]..csr.indptr[i + 1]] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        (0..self.dim).filter(|&i| seen[i]).collect()
    }

    /// Full (both triangles) compressed-row form for matrix-vector products.
    pub fn to_csr(&self) -> Csr {
        let mut counts = vec![0usize; self.dim + 1];
        for &(r, c, _) in &self.entries {
            counts[r + 1] += 1;
            if r != c {
                counts[c + 1] += 1;
            }
        }
        for i in 0..self.dim {
            counts[i + 1] += counts[i];
        }
        let nnz = counts[self.dim];
        let mut fill = counts.clone();
        let mut indices = vec![0usize; nnz];
        let mut values = vec![Complex64::new(0.0, 0.0); nnz];
        for &(r, c, v) in &self.entries {
            indices[fill[r]] = c;
            values[fill[r]] = v;
            fill[r] += 1;
            if r != c {
                indices[fill[c]] = r;
                values[fill[c]] = v.conj();
                fill[c] += 1;
            }
        }
        Csr {
            dim: self.dim,
            indptr: counts,
            indices,
            values,
        }
    }

    /// Largest absolute row sum; an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dim];
        for &(r, c, v) in &self.entries {
            rows[r] += v.norm();
            if r != c {
                rows[c] += v.norm();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Write the upper triangle as `row col re im` lines under a
    /// `dim N hermitian upper` header. Indices are 0-based.
    pub fn write_triplets<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "dim {} hermitian upper", self.dim)?;
        for &(r, c, v) in &self.entries {
            writeln!(w, "{r} {c} {:e} {:e}", v.re, v.im)?;
        }
        Ok(())
    }

    /// Inverse of [`Self::write_triplets`]. Blank lines and `#` comments are skipped.
    pub fn parse_triplets(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| invalid("empty triplet file"))?;
        let dim = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["dim", n, "hermitian", "upper"] => n
                .parse::<usize>()
                .map_err(|_| invalid(format!("bad dimension in header: {header}")))?,
            _ => return Err(invalid(format!("expected 'dim N hermitian upper', got: {header}"))),
        };
        let mut entries = Vec::new();
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || invalid(format!("line {}: expected 'row col re im'", i + 1));
            if f.len() != 4 {
                return Err(bad());
            }
            let r = f[0].parse::<usize>().map_err(|_| bad())?;
            let c = f[1].parse::<usize>().map_err(|_| bad())?;
            let re = f[2].parse::<f64>().map_err(|_| bad())?;
            let im = f[3].parse::<f64>().map_err(|_| bad())?;
            entries.push((r, c, Complex64::new(re, im)));
        }
        Self::from_upper_triplets(dim, entries)
    }
}

#[derive(Debug, Clone)]
pub struct Csr {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl Csr {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `y = A x`, parallel over rows.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.par_iter_mut().enumerate().with_min_len(256).for_each(|(i, yi)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yi = acc;
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lower_entries_are_conjugated_and_merged() {
        let h = SparseHermitian::from_triplets(
            2,
            vec![(0, 1, c(1.0, 2.0)), (1, 0, c(1.0, -2.0)), (0, 0, c(3.0, 0.0))],
        )
        .unwrap();
        assert_eq!(h.entries(), &[(0, 0, c(3.0, 0.0)), (0, 1, c(2.0, 4.0))]);
        assert_eq!(h.get(1, 0), c(2.0, -4.0));
        let d = h.to_dense();
        assert_eq!(d, d.adjoint());
    }

    #[test]
    fn rejects_out_of_range_and_complex_diagonal() {
        assert!(SparseHermitian::from_triplets(2, vec![(0, 2, c(1.0, 0.0))]).is_err());
        assert!(SparseHermitian::from_triplets(2, vec![(1, 1, c(1.0, 0.5))]).is_err());
        assert!(SparseHermitian::from_upper_triplets(2, vec![(1, 0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn matvec_matches_dense() {
        let h = SparseHermitian::from_triplets(
            3,
            vec![(0, 1, c(1.0, 1.0)), (1, 2, c(0.0, -2.0)), (2, 2, c(5.0, 0.0)), (0, 0, c(-1.0, 0.0))],
        )
        .unwrap();
        let x = vec![c(1.0, 0.0), c(0.5, -0.5), c(-2.0, 1.0)];
        let mut y = vec![c(0.0, 0.0); 3];
        h.to_csr().matvec(&x, &mut y);
        let dense = h.to_dense() * nalgebra::DVector::from_vec(x);
        for i in 0..3 {
            assert_abs_diff_eq!(y[i].re, dense[i].re, epsilon = 1e-14);
            assert_abs_diff_eq!(y[i].im, dense[i].im, epsilon = 1e-14);
        }
    }

    #[test]
    fn restrict_and_reachability() {
        let h = SparseHermitian::from_triplets(
            4,
            vec![(0, 2, c(1.0, 0.0)), (1, 3, c(1.0, 0.0)), (2, 2, c(4.0, 0.0))],
        )
        .unwrap();
        assert_eq!(h.reachable_from(0), vec![0, 2]);
        let r = h.restrict(&[0, 2]).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.get(0, 1), c(1.0, 0.0));
        assert_eq!(r.get(1, 1), c(4.0, 0.0));
    }

    #[test]
    fn triplet_file_round_trip() {
        let h = SparseHermitian::from_triplets(
            3,
            vec![(0, 1, c(0.1, -2.5e-7)), (2, 2, c(-3.0, 0.0)), (1, 2, c(1.0 / 3.0, 0.0))],
        )
        .unwrap();
        let mut buf = Vec::new();
        h.write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("dim 3 hermitian upper\n"));
        assert_eq!(SparseHermitian::parse_triplets(&text).unwrap(), h);
        assert!(SparseHermitian::parse_triplets("dim 2 hermitian upper\n1 0 1 0").is_err());
        assert!(SparseHermitian::parse_triplets("dim 2\n0 0 1 0").is_err());
    }

    #[test]
    fn linear_combination_scales_and_adds_diagonal() {
        let a = SparseHermitian::from_triplets(2, vec![(0, 1, c(1.0, 0.0))]).unwrap();
        let s = SparseHermitian::linear_combination(&[(&a, -2.0)], Some(&[1.0, 3.0])).unwrap();
        assert_eq!(s.get(0, 1), c(-2.0, 0.0));
        assert_eq!(s.diagonal(), vec![1.0, 3.0]);
    }
}
