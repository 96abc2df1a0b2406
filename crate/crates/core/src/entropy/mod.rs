//! Bitstream container, adaptive binary range coder and the coefficient /
//! mode syntax shared by the image and intra-video codecs.

mod bitio;
mod container;
mod range;
mod syntax;

use std::collections::HashMap;

pub use bitio::{BitstreamReader, BitstreamWriter};
pub use container::{read_segment, write_segment, CodecId, StreamHeader, FLAG_MODE_MASKS, FLAG_VCRESPRED, HEADER_LEN, MAGIC, VERSION};
pub use range::{BinCounter, BinCtx, BinDecoder, BinEncoder, CostEstimator, RangeDecoder, RangeEncoder};
pub use syntax::{
    decode_levels, decode_mode, encode_levels, encode_mode, most_probable_mode, CoeffContexts, ModeContexts, MAX_ABS_LEVEL, NUM_MODES,
};

use crate::error::{Error, Result};

/// Order-0 Shannon entropy of a symbol sequence, in bits per symbol.
pub fn entropy_estimate(levels: &[i32]) -> Result<f64> {
    if levels.is_empty() {
        return Err(Error::invalid("entropy of an empty sequence"));
    }
    let mut hist: HashMap<i32, usize> = HashMap::new();
    for &l in levels {
        *hist.entry(l).or_default() += 1;
    }
    let n = levels.len() as f64;
    let mut counts: Vec<usize> = hist.into_values().collect();
    // fixed summation order keeps the result independent of hash seeding
    counts.sort_unstable();
    Ok(counts.iter().map(|&c| {
        let p = c as f64 / n;
        -p * p.log2()
    }).sum::<f64>().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_closed_forms() {
        assert_eq!(entropy_estimate(&[7; 10]).unwrap(), 0.0);
        assert!((entropy_estimate(&[0, 1, 2, 3]).unwrap() - 2.0).abs() < 1e-12);
        assert!((entropy_estimate(&[1, 1, 2, 3]).unwrap() - 1.5).abs() < 1e-12);
        assert!(entropy_estimate(&[]).is_err());
    }
}
