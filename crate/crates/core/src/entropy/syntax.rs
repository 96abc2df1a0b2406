//! Residual-coefficient and intra-mode binarization.
//!
//! A block's levels, given in scan order, are coded as
//!
//! * `cbf` — one context bin, 0 for an all-zero block;
//! * for each position up to the last nonzero level: `sig` (context keyed by
//!   the scan-position quartile), then after a significant level a `last`
//!   bin; the final scan position is always inferred significant;
//! * for each significant level: `|l| - 1` as a truncated-unary prefix of up
//!   to 14 context bins followed by an order-0 Exp-Golomb bypass suffix, then
//!   a bypass sign bin.

use super::range::{BinCtx, BinDecoder, BinEncoder};
use crate::error::{Error, Result};

/// Largest magnitude the syntax accepts.
pub const MAX_ABS_LEVEL: i32 = 1 << 15;
const PREFIX_BINS: u32 = 14;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoeffContexts {
    cbf: BinCtx,
    sig: [BinCtx; 4],
    last: [BinCtx; 4],
    abs: [[BinCtx; 3]; 4],
}

#[inline]
fn quartile(pos: usize, len: usize) -> usize {
    4 * pos / len
}

fn encode_eg0<E: BinEncoder>(enc: &mut E, v: u32) {
    let x = v as u64 + 1;
    let nb = 63 - x.leading_zeros();
    for _ in 0..nb {
        enc.encode_bypass(true);
    }
    enc.encode_bypass(false);
    for i in (0..nb).rev() {
        enc.encode_bypass((x >> i) & 1 == 1);
    }
}

fn decode_eg0<D: BinDecoder>(dec: &mut D) -> Result<u32> {
    let mut nb = 0;
    while dec.decode_bypass()? {
        nb += 1;
        if nb > 20 {
            return Err(Error::stream("Exp-Golomb prefix too long"));
        }
    }
    let mut x = 1u64;
    for _ in 0..nb {
        x = (x << 1) | dec.decode_bypass()? as u64;
    }
    Ok((x - 1) as u32)
}

/// Codes one block of levels (in scan order).
pub fn encode_levels<E: BinEncoder>(enc: &mut E, ctx: &mut CoeffContexts, levels: &[i32]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::invalid("empty level block"));
    }
    if let Some(l) = levels.iter().find(|l| l.unsigned_abs() > MAX_ABS_LEVEL as u32) {
        return Err(Error::invalid(format!("level {l} exceeds the coded range")));
    }
    let len = levels.len();
    let Some(last) = levels.iter().rposition(|&l| l != 0) else {
        enc.encode_bin(&mut ctx.cbf, false);
        return Ok(());
    };
    enc.encode_bin(&mut ctx.cbf, true);
    for (p, &l) in levels.iter().enumerate().take(last + 1) {
        let q = quartile(p, len);
        if p + 1 < len {
            enc.encode_bin(&mut ctx.sig[q], l != 0);
        }
        if l == 0 {
            continue;
        }
        if p + 1 < len {
            enc.encode_bin(&mut ctx.last[q], p == last);
        }
        let m = l.unsigned_abs() - 1;
        for i in 0..m.min(PREFIX_BINS) {
            enc.encode_bin(&mut ctx.abs[q][(i as usize).min(2)], true);
        }
        if m < PREFIX_BINS {
            enc.encode_bin(&mut ctx.abs[q][(m as usize).min(2)], false);
        } else {
            encode_eg0(enc, m - PREFIX_BINS);
        }
        enc.encode_bypass(l < 0);
    }
    Ok(())
}

/// Inverse of [`encode_levels`] for a block of `len` positions.
pub fn decode_levels<D: BinDecoder>(dec: &mut D, ctx: &mut CoeffContexts, len: usize) -> Result<Vec<i32>> {
    let mut levels = vec![0i32; len];
    if !dec.decode_bin(&mut ctx.cbf)? {
        return Ok(levels);
    }
    for p in 0..len {
        let q = quartile(p, len);
        let sig = p + 1 == len || dec.decode_bin(&mut ctx.sig[q])?;
        if !sig {
            continue;
        }
        let is_last = p + 1 == len || dec.decode_bin(&mut ctx.last[q])?;
        let mut m = 0u32;
        while m < PREFIX_BINS && dec.decode_bin(&mut ctx.abs[q][(m as usize).min(2)])? {
            m += 1;
        }
        if m == PREFIX_BINS {
            m += decode_eg0(dec)?;
        }
        if m >= MAX_ABS_LEVEL as u32 {
            return Err(Error::stream("level magnitude out of range"));
        }
        let mag = m as i32 + 1;
        levels[p] = if dec.decode_bypass()? { -mag } else { mag };
        if is_last {
            break;
        }
    }
    Ok(levels)
}

/// Number of intra modes.
pub const NUM_MODES: u8 = 9;
const DC_MODE: u8 = 2;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModeContexts {
    mpm: BinCtx,
    rem: [BinCtx; 3],
}

/// Most probable mode: the smaller of the left and top modes, an unavailable
/// neighbour counting as DC.
pub fn most_probable_mode(left: Option<u8>, top: Option<u8>) -> u8 {
    left.unwrap_or(DC_MODE).min(top.unwrap_or(DC_MODE))
}

pub fn encode_mode<E: BinEncoder>(enc: &mut E, ctx: &mut ModeContexts, mode: u8, mpm: u8) -> Result<()> {
    if mode >= NUM_MODES || mpm >= NUM_MODES {
        return Err(Error::invalid(format!("intra mode {mode} out of range")));
    }
    enc.encode_bin(&mut ctx.mpm, mode == mpm);
    if mode != mpm {
        let rem = if mode < mpm { mode } else { mode - 1 };
        for (i, c) in ctx.rem.iter_mut().enumerate() {
            enc.encode_bin(c, (rem >> (2 - i)) & 1 == 1);
        }
    }
    Ok(())
}

pub fn decode_mode<D: BinDecoder>(dec: &mut D, ctx: &mut ModeContexts, mpm: u8) -> Result<u8> {
    if dec.decode_bin(&mut ctx.mpm)? {
        return Ok(mpm);
    }
    let mut rem = 0u8;
    for c in ctx.rem.iter_mut() {
        rem = (rem << 1) | dec.decode_bin(c)? as u8;
    }
    Ok(if rem < mpm { rem } else { rem + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{BinCounter, CostEstimator, RangeDecoder, RangeEncoder};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_block_is_one_bin() {
        let mut c = BinCounter::default();
        encode_levels(&mut c, &mut CoeffContexts::default(), &[0; 16]).unwrap();
        assert_eq!(c, BinCounter { context_bins: 1, bypass_bins: 0 });
    }

    #[test]
    fn front_loaded_block_is_cheaper() {
        let mut front = [0; 16];
        front[0] = 5;
        let mut back = [0; 16];
        back[15] = 5;
        let cost = |lv: &[i32]| {
            let mut e = CostEstimator::default();
            encode_levels(&mut e, &mut CoeffContexts::default(), lv).unwrap();
            e.bits
        };
        assert!(cost(&front) < cost(&back));
    }

    #[test]
    fn overflow_is_rejected() {
        let mut e = RangeEncoder::new();
        assert!(encode_levels(&mut e, &mut CoeffContexts::default(), &[MAX_ABS_LEVEL + 1, 0, 0, 0]).is_err());
        encode_levels(&mut e, &mut CoeffContexts::default(), &[-MAX_ABS_LEVEL, 0, 0, 0]).unwrap();
    }

    #[test]
    fn random_sparse_blocks_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let blocks: Vec<Vec<i32>> = (0..100_000)
            .map(|_| {
                let len = if rng.gen() { 16 } else { 64 };
                let density = rng.gen_range(0.0..0.5);
                (0..len)
                    .map(|_| {
                        if !rng.gen_bool(density) {
                            0
                        } else if rng.gen_bool(0.02) {
                            rng.gen_range(-MAX_ABS_LEVEL..=MAX_ABS_LEVEL)
                        } else {
                            rng.gen_range(-20..=20)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut enc = RangeEncoder::new();
        let mut ctx = CoeffContexts::default();
        for b in &blocks {
            encode_levels(&mut enc, &mut ctx, b).unwrap();
        }
        let bytes = enc.finish();
        let mut dec = RangeDecoder::new(&bytes).unwrap();
        let mut ctx = CoeffContexts::default();
        for b in &blocks {
            assert_eq!(&decode_levels(&mut dec, &mut ctx, b.len()).unwrap(), b);
        }
    }

    #[test]
    fn modes_roundtrip_and_bin_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pairs: Vec<(u8, u8)> = (0..5000).map(|_| (rng.gen_range(0..9), rng.gen_range(0..9))).collect();
        let mut enc = RangeEncoder::new();
        let mut ctx = ModeContexts::default();
        for &(m, mpm) in &pairs {
            let mut c = BinCounter::default();
            encode_mode(&mut c, &mut ModeContexts::default(), m, mpm).unwrap();
            assert_eq!(c.context_bins, if m == mpm { 1 } else { 4 });
            encode_mode(&mut enc, &mut ctx, m, mpm).unwrap();
        }
        let bytes = enc.finish();
        let mut dec = RangeDecoder::new(&bytes).unwrap();
        let mut ctx = ModeContexts::default();
        for &(m, mpm) in &pairs {
            assert_eq!(decode_mode(&mut dec, &mut ctx, mpm).unwrap(), m);
        }
        assert!(encode_mode(&mut BinCounter::default(), &mut ModeContexts::default(), 9, 0).is_err());
        assert_eq!(most_probable_mode(None, Some(0)), 0);
        assert_eq!(most_probable_mode(Some(7), None), 2);
    }
}
