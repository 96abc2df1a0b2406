//! Adaptive binary range coder (LZMA-style carry propagation).

use crate::error::{Error, Result};

const PROB_BITS: u32 = 12;
const PROB_ONE: u16 = 1 << PROB_BITS;
const ADAPT_SHIFT: u32 = 5;
const TOP: u32 = 1 << 24;

/// Adaptive probability that the next bin is 0, in units of 2^-12.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinCtx(u16);

impl Default for BinCtx {
    fn default() -> Self {
        BinCtx(PROB_ONE / 2)
    }
}

impl BinCtx {
    pub fn p_zero(self) -> f64 {
        self.0 as f64 / PROB_ONE as f64
    }

    /// Ideal code length of `bit` in bits under the current state.
    pub fn cost(self, bit: bool) -> f64 {
        let p = self.p_zero();
        -(if bit { 1.0 - p } else { p }).log2()
    }

    #[inline]
    fn update(&mut self, bit: bool) {
        if bit {
            self.0 -= self.0 >> ADAPT_SHIFT;
        } else {
            self.0 += (PROB_ONE - self.0) >> ADAPT_SHIFT;
        }
    }
}

/// Anything that consumes binarized symbols: the real coder, a bin counter
/// or a cost estimator.
pub trait BinEncoder {
    fn encode_bin(&mut self, ctx: &mut BinCtx, bit: bool);
    fn encode_bypass(&mut self, bit: bool);
}

pub trait BinDecoder {
    fn decode_bin(&mut self, ctx: &mut BinCtx) -> Result<bool>;
    fn decode_bypass(&mut self) -> Result<bool>;
}

#[derive(Clone, Debug)]
pub struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
    ctx_bins: u64,
    bypass_bins: u64,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        Self { low: 0, range: u32::MAX, cache: 0, cache_size: 1, out: Vec::new(), ctx_bins: 0, bypass_bins: 0 }
    }

    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || (self.low >> 32) != 0 {
            let carry = (self.low >> 32) as u8;
            let mut temp = self.cache;
            loop {
                self.out.push(temp.wrapping_add(carry));
                temp = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    #[inline]
    fn normalize(&mut self) {
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    pub fn context_bins(&self) -> u64 {
        self.ctx_bins
    }

    pub fn bypass_bins(&self) -> u64 {
        self.bypass_bins
    }

    /// Flushes and returns the coded bytes. The leading byte of the LZMA
    /// scheme is always zero and is not emitted.
    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        debug_assert_eq!(self.out[0], 0);
        self.out.remove(0);
        self.out
    }
}

impl BinEncoder for RangeEncoder {
    #[inline]
    fn encode_bin(&mut self, ctx: &mut BinCtx, bit: bool) {
        let bound = (self.range >> PROB_BITS) * ctx.0 as u32;
        if bit {
            self.low += bound as u64;
            self.range -= bound;
        } else {
            self.range = bound;
        }
        ctx.update(bit);
        self.ctx_bins += 1;
        self.normalize();
    }

    #[inline]
    fn encode_bypass(&mut self, bit: bool) {
        self.range >>= 1;
        if bit {
            self.low += self.range as u64;
        }
        self.bypass_bins += 1;
        self.normalize();
    }
}

#[derive(Clone, Debug)]
pub struct RangeDecoder<'a> {
    data: &'a [u8],
    pos: usize,
    range: u32,
    code: u32,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(data: &'a [u8]) -> Result<Self> {
        let mut d = Self { data, pos: 0, range: u32::MAX, code: 0 };
        for _ in 0..4 {
            d.code = (d.code << 8) | d.next_byte()? as u32;
        }
        Ok(d)
    }

    #[inline]
    fn next_byte(&mut self) -> Result<u8> {
        let b = *self.data.get(self.pos).ok_or_else(|| Error::stream("arithmetic segment truncated"))?;
        self.pos += 1;
        Ok(b)
    }

    #[inline]
    fn normalize(&mut self) -> Result<()> {
        while self.range < TOP {
            self.range <<= 8;
            self.code = (self.code << 8) | self.next_byte()? as u32;
        }
        Ok(())
    }

    /// Bytes consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    /// Checks the segment ended exactly where the encoder's flush put it:
    /// every byte consumed and nothing left in the code register. Catches
    /// damage that happens not to change any decoded bin.
    pub fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::stream(format!("{} trailing bytes in arithmetic segment", self.data.len() - self.pos)));
        }
        if self.code != 0 {
            return Err(Error::stream("arithmetic segment does not terminate cleanly"));
        }
        Ok(())
    }
}

impl BinDecoder for RangeDecoder<'_> {
    #[inline]
    fn decode_bin(&mut self, ctx: &mut BinCtx) -> Result<bool> {
        let bound = (self.range >> PROB_BITS) * ctx.0 as u32;
        let bit = if self.code < bound {
            self.range = bound;
            false
        } else {
            self.code -= bound;
            self.range -= bound;
            true
        };
        ctx.update(bit);
        self.normalize()?;
        Ok(bit)
    }

    #[inline]
    fn decode_bypass(&mut self) -> Result<bool> {
        self.range >>= 1;
        let bit = if self.code >= self.range {
            self.code -= self.range;
            true
        } else {
            false
        };
        self.normalize()?;
        Ok(bit)
    }
}

/// Counts bins without coding them. Contexts are left untouched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BinCounter {
    pub context_bins: u64,
    pub bypass_bins: u64,
}

impl BinEncoder for BinCounter {
    fn encode_bin(&mut self, _ctx: &mut BinCtx, _bit: bool) {
        self.context_bins += 1;
    }

    fn encode_bypass(&mut self, _bit: bool) {
        self.bypass_bins += 1;
    }
}

/// Accumulates the ideal code length while adapting contexts like the coder.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CostEstimator {
    pub bits: f64,
}

impl BinEncoder for CostEstimator {
    fn encode_bin(&mut self, ctx: &mut BinCtx, bit: bool) {
        self.bits += ctx.cost(bit);
        ctx.update(bit);
    }

    fn encode_bypass(&mut self, _bit: bool) {
        self.bits += 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probabilities_stay_open() {
        let mut c = BinCtx::default();
        for _ in 0..10_000 {
            c.update(true);
        }
        assert!(c.0 > 0);
        for _ in 0..10_000 {
            c.update(false);
        }
        assert!(c.0 < PROB_ONE);
    }

    #[test]
    fn mixed_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ops: Vec<(Option<usize>, bool)> = (0..20_000)
            .map(|_| {
                let ctx = if rng.gen_bool(0.2) { None } else { Some(rng.gen_range(0..8)) };
                let p = ctx.map_or(0.5, |c| 0.05 + 0.11 * c as f64);
                (ctx, rng.gen_bool(p))
            })
            .collect();
        let mut enc = RangeEncoder::new();
        let mut ctxs = [BinCtx::default(); 8];
        for &(c, b) in &ops {
            match c {
                Some(i) => enc.encode_bin(&mut ctxs[i], b),
                None => enc.encode_bypass(b),
            }
        }
        let bytes = enc.finish();
        let mut dec = RangeDecoder::new(&bytes).unwrap();
        let mut ctxs = [BinCtx::default(); 8];
        for &(c, b) in &ops {
            let got = match c {
                Some(i) => dec.decode_bin(&mut ctxs[i]).unwrap(),
                None => dec.decode_bypass().unwrap(),
            };
            assert_eq!(got, b);
        }
        assert_eq!(dec.position(), bytes.len());
        dec.finish().unwrap();
    }

    #[test]
    fn finish_rejects_any_damaged_byte() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bits: Vec<bool> = (0..3000).map(|_| rng.gen_bool(0.3)).collect();
        let mut enc = RangeEncoder::new();
        let mut ctx = BinCtx::default();
        for &b in &bits {
            enc.encode_bin(&mut ctx, b);
        }
        let bytes = enc.finish();
        for i in 0..bytes.len() {
            for flip in [0x01u8, 0x80] {
                let mut bad = bytes.clone();
                bad[i] ^= flip;
                let mut ctx = BinCtx::default();
                let outcome = RangeDecoder::new(&bad).and_then(|mut d| {
                    let mut same = true;
                    for &b in &bits {
                        same &= d.decode_bin(&mut ctx)? == b;
                    }
                    d.finish()?;
                    Ok(same)
                });
                assert!(!matches!(outcome, Ok(true)), "byte {i} flip {flip:#x} went unnoticed");
            }
        }
    }

    #[test]
    fn empty_and_truncated_segments() {
        let bytes = RangeEncoder::new().finish();
        assert_eq!(bytes.len(), 4);
        RangeDecoder::new(&bytes).unwrap().finish().unwrap();
        assert!(RangeDecoder::new(&bytes[..3]).is_err());
    }
}
