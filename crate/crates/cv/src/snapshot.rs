//! Register snapshots: one JSON header line followed by little-endian
//! complex amplitudes (real, imaginary interleaved).

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CvError, Result};
use crate::register::QumodeRegister;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Complex64,
    Complex128,
}

impl Precision {
    fn bytes(self) -> usize {
        match self {
            Precision::Complex64 => 8,
            Precision::Complex128 => 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub dims: Vec<usize>,
    pub dtype: Precision,
    pub byte_order: String,
    pub layout: String,
    pub success_probability: f64,
    pub leakage: f64,
}

pub fn write_snapshot<W: Write>(reg: &QumodeRegister, precision: Precision, mut w: W) -> Result<()> {
    let header = SnapshotHeader {
        dims: reg.dims().to_vec(),
        dtype: precision,
        byte_order: "little".into(),
        layout: "row-major, mode 0 slowest".into(),
        success_probability: reg.success_probability(),
        leakage: reg.leakage(),
    };
    let line = serde_json::to_string(&header).map_err(|e| invalid(e.to_string()))?;
    writeln!(w, "{line}")?;
    let mut buf = Vec::with_capacity(reg.amplitudes().len() * precision.bytes());
    for a in reg.amplitudes() {
        match precision {
            Precision::Complex64 => {
                buf.extend_from_slice(&(a.re as f32).to_le_bytes());
                buf.extend_from_slice(&(a.im as f32).to_le_bytes());
            }
            Precision::Complex128 => {
                buf.extend_from_slice(&a.re.to_le_bytes());
                buf.extend_from_slice(&a.im.to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: BufRead>(mut r: R) -> Result<(SnapshotHeader, QumodeRegister)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: SnapshotHeader = serde_json::from_str(line.trim_end()).map_err(|e| invalid(format!("bad header: {e}")))?;
    if header.byte_order != "little" {
        return Err(invalid(format!("unsupported byte order {}", header.byte_order)));
    }
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let n: usize = header.dims.iter().product();
    if data.len() != n * header.dtype.bytes() {
        return Err(CvError::ShapeMismatch(format!("{} bytes for {n} amplitudes", data.len())));
    }
    let amps = match header.dtype {
        Precision::Complex64 => data
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes(c[..4].try_into().unwrap());
                let im = f32::from_le_bytes(c[4..].try_into().unwrap());
                Complex64::new(re as f64, im as f64)
            })
            .collect(),
        Precision::Complex128 => data
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect(),
    };
    let reg = QumodeRegister::from_amplitudes(&header.dims, amps)?;
    Ok((header, reg))
}
