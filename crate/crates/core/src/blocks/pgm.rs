//! Binary 8-bit PGM (P5) input and output for [`PixelPlane`].

use std::io::{BufRead, Cursor, Seek, Write};
use std::path::Path;

use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageDecoder, ImageEncoder};

use super::PixelPlane;
use crate::error::{Error, Result};

fn image_err(e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(io) => Error::Io(io),
        other => Error::invalid(format!("PGM: {other}")),
    }
}

pub fn read_pgm_from<R: BufRead + Seek>(reader: R) -> Result<PixelPlane> {
    let decoder = PnmDecoder::new(reader).map_err(image_err)?;
    if decoder.color_type() != image::ColorType::L8 {
        return Err(Error::invalid(format!("expected 8-bit grayscale PGM, got {:?}", decoder.color_type())));
    }
    let (w, h) = decoder.dimensions();
    let mut buf = vec![0u8; decoder.total_bytes() as usize];
    decoder.read_image(&mut buf).map_err(image_err)?;
    PixelPlane::from_u8(w as usize, h as usize, &buf)
}

pub fn write_pgm_to<W: Write>(plane: &PixelPlane, writer: W) -> Result<()> {
    PnmEncoder::new(writer)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&plane.to_u8(), plane.width() as u32, plane.height() as u32, ExtendedColorType::L8)
        .map_err(image_err)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<PixelPlane> {
    let bytes = std::fs::read(path)?;
    read_pgm_from(Cursor::new(bytes))
}

pub fn write_pgm(plane: &PixelPlane, path: impl AsRef<Path>) -> Result<()> {
    let mut out = Vec::new();
    write_pgm_to(plane, &mut out)?;
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_in_memory() {
        let data: Vec<u8> = (0..24u8).map(|v| v * 10).collect();
        let p = PixelPlane::from_u8(6, 4, &data).unwrap();
        let mut buf = Vec::new();
        write_pgm_to(&p, &mut buf).unwrap();
        assert!(buf.starts_with(b"P5"));
        let back = read_pgm_from(Cursor::new(buf)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_pgm_from(Cursor::new(b"P2 nope".to_vec())).is_err());
    }
}
