use std::fmt;

use crate::error::{Error, Result};

/// A frequency position inside an N×N coefficient block.
///
/// `row` is the vertical frequency index and `col` the horizontal one, so
/// `FreqPos::new(1, 0)` is the coefficient usually written `c10`: it varies
/// from the top of the block to the bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct FreqPos {
    pub row: u8,
    pub col: u8,
}

impl FreqPos {
    pub const DC: FreqPos = FreqPos { row: 0, col: 0 };

    pub const fn new(row: u8, col: u8) -> Self {
        Self { row, col }
    }

    #[inline]
    pub fn index(self, n: usize) -> usize {
        self.row as usize * n + self.col as usize
    }

    pub fn from_index(idx: usize, n: usize) -> Self {
        Self { row: (idx / n) as u8, col: (idx % n) as u8 }
    }

    pub fn is_dc(self) -> bool {
        self == Self::DC
    }

    /// Parses the `cRC` notation (`c10`, `c01`, ...) or a bare `RC` pair.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t.strip_prefix('c').or_else(|| t.strip_prefix('C')).unwrap_or(t);
        let digits: Vec<u32> = digits.chars().filter_map(|c| c.to_digit(10)).collect();
        if digits.len() != 2 || t.chars().filter(|c| c.is_ascii_digit()).count() != 2 {
            return Err(Error::invalid(format!("bad coefficient position `{s}` (expected e.g. c10)")));
        }
        Ok(Self::new(digits[0] as u8, digits[1] as u8))
    }
}

impl fmt::Display for FreqPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}{}", self.row, self.col)
    }
}

/// Transform coefficients of one N×N block, row-major over [`FreqPos`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffBlock {
    pub size: usize,
    pub coeffs: Vec<f64>,
    /// True once the block went through quantize/dequantize.
    pub quantized: bool,
    /// The uniform step that produced the block, when a single step was used.
    pub qstep_used: Option<f64>,
}

impl CoeffBlock {
    pub fn new(size: usize, coeffs: Vec<f64>) -> Result<Self> {
        super::check_block_size(size)?;
        if coeffs.len() != size * size {
            return Err(Error::invalid(format!("coefficient block of size {size} needs {} values", size * size)));
        }
        Ok(Self { size, coeffs, quantized: false, qstep_used: None })
    }

    pub fn zeros(size: usize) -> Self {
        Self { size, coeffs: vec![0.0; size * size], quantized: false, qstep_used: None }
    }

    #[inline]
    pub fn get(&self, k: FreqPos) -> f64 {
        self.coeffs[k.index(self.size)]
    }

    #[inline]
    pub fn set(&mut self, k: FreqPos, v: f64) {
        self.coeffs[k.index(self.size)] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }
}

/// Integer quantization levels of one block, row-major over [`FreqPos`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelBlock {
    pub size: usize,
    pub levels: Vec<i32>,
}

impl LevelBlock {
    pub fn zeros(size: usize) -> Self {
        Self { size, levels: vec![0; size * size] }
    }

    #[inline]
    pub fn get(&self, k: FreqPos) -> i32 {
        self.levels[k.index(self.size)]
    }

    #[inline]
    pub fn set(&mut self, k: FreqPos, v: i32) {
        self.levels[k.index(self.size)] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_positions() {
        assert_eq!(FreqPos::parse("c10").unwrap(), FreqPos::new(1, 0));
        assert_eq!(FreqPos::parse("01").unwrap(), FreqPos::new(0, 1));
        assert!(FreqPos::parse("c1").is_err());
        assert!(FreqPos::parse("c123").is_err());
        assert_eq!(FreqPos::new(2, 3).to_string(), "c23");
    }

    #[test]
    fn index_roundtrip() {
        for idx in 0..64 {
            assert_eq!(FreqPos::from_index(idx, 8).index(8), idx);
        }
    }
}
