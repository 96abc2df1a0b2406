//! YUV4MPEG2 input/output of luma planes.

use std::io::{Read, Write};
use std::path::Path;

use y4m::Colorspace;

use crate::blocks::PixelPlane;
use crate::error::{Error, Result};

/// Luma frames of a sequence plus its frame rate.
#[derive(Clone, Debug, PartialEq)]
pub struct LumaSequence {
    pub width: usize,
    pub height: usize,
    /// Frame rate as `num / den`.
    pub fps_num: usize,
    pub fps_den: usize,
    pub frames: Vec<PixelPlane>,
}

impl LumaSequence {
    pub fn fps(&self) -> f64 {
        self.fps_num as f64 / self.fps_den as f64
    }
}

fn y4m_err(e: y4m::Error) -> Error {
    match e {
        y4m::Error::IoError(io) => Error::Io(io),
        other => Error::invalid(format!("Y4M: {other:?}")),
    }
}

/// Reads at most `max_frames` frames (all when `None`), keeping luma only.
/// 8-bit 4:2:0, 4:2:2, 4:4:4 and mono inputs are accepted.
pub fn read_y4m<R: Read>(reader: R, max_frames: Option<usize>) -> Result<LumaSequence> {
    let mut dec = y4m::decode(reader).map_err(y4m_err)?;
    match dec.get_colorspace() {
        Colorspace::Cmono
        | Colorspace::C420
        | Colorspace::C420jpeg
        | Colorspace::C420paldv
        | Colorspace::C420mpeg2
        | Colorspace::C422
        | Colorspace::C444 => {}
        other => return Err(Error::invalid(format!("unsupported Y4M colorspace {other:?}"))),
    }
    let (width, height) = (dec.get_width(), dec.get_height());
    let rate = dec.get_framerate();
    if rate.num == 0 || rate.den == 0 {
        return Err(Error::invalid("Y4M frame rate must be positive"));
    }
    let mut frames = Vec::new();
    while max_frames.is_none_or(|m| frames.len() < m) {
        match dec.read_frame() {
            Ok(f) => frames.push(PixelPlane::from_u8(width, height, f.get_y_plane())?),
            Err(y4m::Error::EOF) => break,
            Err(e) => return Err(y4m_err(e)),
        }
    }
    if frames.is_empty() {
        return Err(Error::invalid("Y4M input holds no frames"));
    }
    Ok(LumaSequence { width, height, fps_num: rate.num, fps_den: rate.den, frames })
}

pub fn read_y4m_file(path: impl AsRef<Path>, max_frames: Option<usize>) -> Result<LumaSequence> {
    let f = std::fs::File::open(path)?;
    read_y4m(std::io::BufReader::new(f), max_frames)
}

/// Writes 4:2:0 frames with neutral chroma.
pub fn write_y4m<W: Write>(writer: W, seq: &LumaSequence) -> Result<()> {
    let (w, h) = (seq.width, seq.height);
    let mut enc = y4m::encode(w, h, y4m::Ratio::new(seq.fps_num, seq.fps_den))
        .with_colorspace(Colorspace::C420jpeg)
        .write_header(writer)
        .map_err(y4m_err)?;
    let chroma = vec![128u8; w.div_ceil(2) * h.div_ceil(2)];
    for f in &seq.frames {
        if f.width() != w || f.height() != h {
            return Err(Error::invalid("frame size differs from the sequence size"));
        }
        let y = f.to_u8();
        enc.write_frame(&y4m::Frame::new([&y, &chroma, &chroma], None)).map_err(y4m_err)?;
    }
    Ok(())
}

pub fn write_y4m_file(path: impl AsRef<Path>, seq: &LumaSequence) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_y4m(std::io::BufWriter::new(f), seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_frame_cap() {
        let frames: Vec<PixelPlane> =
            (0..3).map(|i| PixelPlane::from_u8(8, 4, &(0..32).map(|v| (v * 7 + i * 3) as u8).collect::<Vec<_>>()).unwrap()).collect();
        let seq = LumaSequence { width: 8, height: 4, fps_num: 30, fps_den: 1, frames };
        let mut buf = Vec::new();
        write_y4m(&mut buf, &seq).unwrap();
        assert!(buf.starts_with(b"YUV4MPEG2 W8 H4 F30:1"));
        assert_eq!(read_y4m(&buf[..], None).unwrap(), seq);
        assert_eq!(read_y4m(&buf[..], Some(2)).unwrap().frames.len(), 2);
        assert!(read_y4m(&b"garbage"[..], None).is_err());
    }
}
