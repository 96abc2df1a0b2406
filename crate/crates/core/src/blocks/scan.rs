use std::str::FromStr;

use super::{check_block_size, FreqPos};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// Classic JPEG zigzag.
    Zigzag,
    /// Row by row: (0,0), (0,1), ... then (1,0), ...
    RowFirst,
    /// Column by column: (0,0), (1,0), ... then (0,1), ...
    ColumnFirst,
    /// Anti-diagonals, each walked from top-right to bottom-left.
    DiagDownLeft,
}

impl FromStr for ScanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "zigzag" => Ok(ScanKind::Zigzag),
            "row_first" => Ok(ScanKind::RowFirst),
            "column_first" => Ok(ScanKind::ColumnFirst),
            "diag_downleft" | "diag_down_left" => Ok(ScanKind::DiagDownLeft),
            _ => Err(Error::invalid(format!("unknown scan kind `{s}`"))),
        }
    }
}

/// A bijective ordering of the N² frequency positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOrder {
    pub kind: ScanKind,
    pub size: usize,
    pub positions: Vec<FreqPos>,
}

impl ScanOrder {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Index of `k` in the scan.
    pub fn rank(&self, k: FreqPos) -> usize {
        self.positions.iter().position(|&p| p == k).expect("scan covers every position")
    }
}

pub fn make_scan(kind: ScanKind, n: usize) -> Result<ScanOrder> {
    check_block_size(n)?;
    let mut positions = Vec::with_capacity(n * n);
    match kind {
        ScanKind::RowFirst => {
            for r in 0..n {
                for c in 0..n {
                    positions.push(FreqPos::new(r as u8, c as u8));
                }
            }
        }
        ScanKind::ColumnFirst => {
            for c in 0..n {
                for r in 0..n {
                    positions.push(FreqPos::new(r as u8, c as u8));
                }
            }
        }
        ScanKind::Zigzag | ScanKind::DiagDownLeft => {
            for s in 0..(2 * n - 1) {
                let lo = s.saturating_sub(n - 1);
                let hi = s.min(n - 1);
                let rows: Vec<usize> = (lo..=hi).collect();
                // odd diagonals (and every diagonal of DiagDownLeft) go down-left
                let down = kind == ScanKind::DiagDownLeft || s % 2 == 1;
                let iter: Box<dyn Iterator<Item = &usize>> =
                    if down { Box::new(rows.iter()) } else { Box::new(rows.iter().rev()) };
                for &r in iter {
                    positions.push(FreqPos::new(r as u8, (s - r) as u8));
                }
            }
        }
    }
    Ok(ScanOrder { kind, size: n, positions })
}
