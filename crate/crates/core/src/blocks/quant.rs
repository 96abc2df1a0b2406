use super::{check_block_size, CoeffBlock, FreqPos, LevelBlock};
use crate::error::{Error, Result};

/// Baseline luminance quantization table (row = vertical frequency).
pub const JPEG_LUMA_BASE: [u8; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QuantKind {
    /// IJG-scaled JPEG table, parameter is the quality 1..=100.
    JpegQuality,
    /// Frequency-flat step doubling every 6 QP, parameter is the QP 0..=51.
    QpUniform,
}

impl QuantKind {
    pub fn code(self) -> u8 {
        match self {
            QuantKind::JpegQuality => 0,
            QuantKind::QpUniform => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(QuantKind::JpegQuality),
            1 => Ok(QuantKind::QpUniform),
            _ => Err(Error::stream(format!("unknown quantizer kind {code}"))),
        }
    }
}

/// Quantizer description: a deterministic function of (kind, parameter, N).
#[derive(Clone, Debug, PartialEq)]
pub struct QuantSpec {
    pub kind: QuantKind,
    /// Quality for [`QuantKind::JpegQuality`], QP for [`QuantKind::QpUniform`].
    pub param: u8,
    pub size: usize,
    table: Vec<f64>,
}

/// Step of the uniform quantizer at `qp`.
pub fn qp_step(qp: u8) -> f64 {
    0.625 * 2f64.powf(qp as f64 / 6.0)
}

impl QuantSpec {
    pub fn jpeg(quality: u8, size: usize) -> Result<Self> {
        check_block_size(size)?;
        if !(1..=100).contains(&quality) {
            return Err(Error::invalid(format!("JPEG quality must be in 1..=100, got {quality}")));
        }
        let q = quality as i64;
        let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
        let mut table = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                let base = JPEG_LUMA_BASE[r * 8 + c] as i64;
                // round(base * scale / 100), half away from zero on positive values
                let v = (base * scale + 50) / 100;
                table.push(v.clamp(1, 255) as f64);
            }
        }
        Ok(Self { kind: QuantKind::JpegQuality, param: quality, size, table })
    }

    pub fn qp(qp: u8, size: usize) -> Result<Self> {
        check_block_size(size)?;
        if qp > 51 {
            return Err(Error::invalid(format!("QP must be in 0..=51, got {qp}")));
        }
        let step = qp_step(qp);
        Ok(Self { kind: QuantKind::QpUniform, param: qp, size, table: vec![step; size * size] })
    }

    pub fn from_parts(kind: QuantKind, param: u8, size: usize) -> Result<Self> {
        match kind {
            QuantKind::JpegQuality => Self::jpeg(param, size),
            QuantKind::QpUniform => Self::qp(param, size),
        }
    }

    /// A quantizer with the same step everywhere; used by tests and experiments.
    pub fn flat(step: f64, size: usize) -> Result<Self> {
        check_block_size(size)?;
        if !(step >= 1.0) {
            return Err(Error::invalid("quantizer steps must be >= 1"));
        }
        Ok(Self { kind: QuantKind::QpUniform, param: 0, size, table: vec![step; size * size] })
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn step(&self, k: FreqPos) -> f64 {
        self.table[k.index(self.size)]
    }

    pub fn mean_step(&self) -> f64 {
        self.table.iter().sum::<f64>() / self.table.len() as f64
    }

    fn uniform_step(&self) -> Option<f64> {
        let first = self.table[0];
        self.table.iter().all(|&s| s == first).then_some(first)
    }
}

/// Scalar quantization with round-half-away-from-zero.
#[inline]
pub fn quantize_value(c: f64, step: f64) -> i32 {
    (c / step).round() as i32
}

pub fn quantize(coeffs: &CoeffBlock, q: &QuantSpec) -> Result<LevelBlock> {
    if coeffs.size != q.size {
        return Err(Error::invalid(format!("block size {} does not match quantizer size {}", coeffs.size, q.size)));
    }
    let levels = coeffs.coeffs.iter().zip(&q.table).map(|(&c, &s)| quantize_value(c, s)).collect();
    Ok(LevelBlock { size: coeffs.size, levels })
}

pub fn dequantize(levels: &LevelBlock, q: &QuantSpec) -> Result<CoeffBlock> {
    if levels.size != q.size {
        return Err(Error::invalid(format!("block size {} does not match quantizer size {}", levels.size, q.size)));
    }
    let coeffs = levels.levels.iter().zip(&q.table).map(|(&l, &s)| l as f64 * s).collect();
    Ok(CoeffBlock { size: levels.size, coeffs, quantized: true, qstep_used: q.uniform_step() })
}
