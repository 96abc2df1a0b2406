use crate::error::{Error, Result};

/// MSB-first bit writer over a growable byte buffer.
#[derive(Clone, Debug, Default)]
pub struct BitstreamWriter {
    buf: Vec<u8>,
    acc: u8,
    nbits: u8,
}

impl BitstreamWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write_bit(&mut self, bit: bool) {
        self.acc = (self.acc << 1) | bit as u8;
        self.nbits += 1;
        if self.nbits == 8 {
            self.buf.push(self.acc);
            self.acc = 0;
            self.nbits = 0;
        }
    }

    /// Writes the low `n` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, n: u32) {
        assert!(n <= 64);
        for i in (0..n).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    pub fn write_u8(&mut self, v: u8) {
        self.write_bits(v as u64, 8);
    }

    pub fn write_u16(&mut self, v: u16) {
        self.write_bits(v as u64, 16);
    }

    pub fn write_u32(&mut self, v: u32) {
        self.write_bits(v as u64, 32);
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        if self.nbits == 0 {
            self.buf.extend_from_slice(bytes);
        } else {
            bytes.iter().for_each(|&b| self.write_u8(b));
        }
    }

    pub fn bit_len(&self) -> usize {
        self.buf.len() * 8 + self.nbits as usize
    }

    /// Pads the final partial byte with zeros.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.acc <<= 8 - self.nbits;
            self.buf.push(self.acc);
        }
        self.buf
    }
}

/// Reader matching [`BitstreamWriter`]; every read past the end is an error.
#[derive(Clone, Debug)]
pub struct BitstreamReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> BitstreamReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = *self.buf.get(self.pos / 8).ok_or_else(|| Error::stream("truncated stream"))?;
        let bit = (byte >> (7 - self.pos % 8)) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        assert!(n <= 64);
        if self.bits_left() < n as usize {
            return Err(Error::stream("truncated stream"));
        }
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_u8(&mut self) -> Result<u8> {
        Ok(self.read_bits(8)? as u8)
    }

    pub fn read_u16(&mut self) -> Result<u16> {
        Ok(self.read_bits(16)? as u16)
    }

    pub fn read_u32(&mut self) -> Result<u32> {
        Ok(self.read_bits(32)? as u32)
    }

    /// Reads `n` whole bytes; the cursor must be byte-aligned.
    pub fn read_bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos % 8 != 0 {
            return Err(Error::stream("unaligned byte read"));
        }
        let start = self.pos / 8;
        let out = self.buf.get(start..start + n).ok_or_else(|| Error::stream("truncated stream"))?;
        self.pos += 8 * n;
        Ok(out)
    }

    pub fn bits_left(&self) -> usize {
        self.buf.len() * 8 - self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn primitive_writes_roundtrip(ops in proptest::collection::vec((any::<u64>(), 0u32..=64), 0..64)) {
            let mut w = BitstreamWriter::new();
            for &(v, n) in &ops {
                w.write_bits(v, n);
            }
            let bits = w.bit_len();
            let bytes = w.finish();
            prop_assert_eq!(bytes.len(), bits.div_ceil(8));
            let mut r = BitstreamReader::new(&bytes);
            for &(v, n) in &ops {
                let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
                prop_assert_eq!(r.read_bits(n).unwrap(), v & mask);
            }
        }
    }

    #[test]
    fn truncation_is_an_error() {
        let mut w = BitstreamWriter::new();
        w.write_u16(0xBEEF);
        let bytes = w.finish();
        let mut r = BitstreamReader::new(&bytes);
        assert_eq!(r.read_u16().unwrap(), 0xBEEF);
        assert!(r.read_bit().is_err());
        assert!(BitstreamReader::new(&bytes).read_u32().is_err());
    }
}
