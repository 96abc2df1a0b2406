//! Byte-exact stream container: a fixed header followed by length-prefixed
//! arithmetic-coded segments (one per frame).

use super::bitio::{BitstreamReader, BitstreamWriter};
use crate::blocks::QuantKind;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"VCRP";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

pub const FLAG_VCRESPRED: u8 = 1 << 0;
pub const FLAG_MODE_MASKS: u8 = 1 << 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodecId {
    Image = 0,
    IntraVideo = 1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamHeader {
    pub codec: CodecId,
    pub width: u16,
    pub height: u16,
    pub block_size: u8,
    pub quant_kind: QuantKind,
    /// JPEG quality or QP.
    pub param: u8,
    pub flags: u8,
    pub frame_count: u16,
}

impl StreamHeader {
    pub fn write(&self, w: &mut BitstreamWriter) {
        w.write_bytes(MAGIC);
        w.write_u8(VERSION);
        w.write_u8(self.codec as u8);
        w.write_u16(self.width);
        w.write_u16(self.height);
        w.write_u8(self.block_size);
        w.write_u8(self.quant_kind.code());
        w.write_u8(self.param);
        w.write_u8(self.flags);
        w.write_u16(self.frame_count);
    }

    pub fn read(r: &mut BitstreamReader<'_>) -> Result<Self> {
        if r.read_bytes(4)? != MAGIC {
            return Err(Error::stream("bad magic"));
        }
        let version = r.read_u8()?;
        if version != VERSION {
            return Err(Error::stream(format!("unsupported stream version {version}")));
        }
        let codec = match r.read_u8()? {
            0 => CodecId::Image,
            1 => CodecId::IntraVideo,
            c => return Err(Error::stream(format!("unknown codec id {c}"))),
        };
        let width = r.read_u16()?;
        let height = r.read_u16()?;
        let block_size = r.read_u8()?;
        if block_size != 4 && block_size != 8 {
            return Err(Error::stream(format!("bad block size {block_size}")));
        }
        let quant_kind = QuantKind::from_code(r.read_u8()?)?;
        let param = r.read_u8()?;
        let flags = r.read_u8()?;
        let frame_count = r.read_u16()?;
        if width == 0 || height == 0 {
            return Err(Error::stream("zero frame dimension"));
        }
        Ok(Self { codec, width, height, block_size, quant_kind, param, flags, frame_count })
    }
}

pub fn write_segment(w: &mut BitstreamWriter, payload: &[u8]) {
    w.write_u32(payload.len() as u32);
    w.write_bytes(payload);
}

pub fn read_segment<'a>(r: &mut BitstreamReader<'a>) -> Result<&'a [u8]> {
    let len = r.read_u32()? as usize;
    r.read_bytes(len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_byte_exact() {
        let h = StreamHeader {
            codec: CodecId::IntraVideo,
            width: 352,
            height: 288,
            block_size: 4,
            quant_kind: QuantKind::QpUniform,
            param: 27,
            flags: FLAG_VCRESPRED | FLAG_MODE_MASKS,
            frame_count: 49,
        };
        let mut w = BitstreamWriter::new();
        h.write(&mut w);
        let bytes = w.finish();
        assert_eq!(bytes, [b'V', b'C', b'R', b'P', 1, 1, 0x01, 0x60, 0x01, 0x20, 4, 1, 27, 3, 0, 49]);
        assert_eq!(bytes.len(), HEADER_LEN);
        assert_eq!(StreamHeader::read(&mut BitstreamReader::new(&bytes)).unwrap(), h);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(StreamHeader::read(&mut BitstreamReader::new(&bad)).is_err());
        assert!(StreamHeader::read(&mut BitstreamReader::new(&bytes[..10])).is_err());
    }

    #[test]
    fn segments_frame_without_markers() {
        let mut w = BitstreamWriter::new();
        write_segment(&mut w, b"abc");
        write_segment(&mut w, b"");
        write_segment(&mut w, b"de");
        let bytes = w.finish();
        let mut r = BitstreamReader::new(&bytes);
        assert_eq!(read_segment(&mut r).unwrap(), b"abc");
        assert_eq!(read_segment(&mut r).unwrap(), b"");
        assert_eq!(read_segment(&mut r).unwrap(), b"de");
        assert!(read_segment(&mut r).is_err());
    }
}
