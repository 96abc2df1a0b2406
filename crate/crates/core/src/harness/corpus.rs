use std::path::{Path, PathBuf};

use crate::blocks::{read_pgm, PixelPlane};
use crate::error::{Error, Result};
use crate::videocodec::LumaSequence;

/// Fails with one message naming every path that does not exist.
pub fn check_inputs<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> Result<()> {
    let missing: Vec<String> = paths.into_iter().filter(|p| !p.is_file()).map(|p| p.display().to_string()).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::invalid(format!("missing input files: {}", missing.join(", "))))
    }
}

/// File stem used as the label of a corpus entry.
pub fn label_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

pub fn load_pgm_corpus(paths: &[PathBuf]) -> Result<Vec<(String, PixelPlane)>> {
    check_inputs(paths)?;
    paths.iter().map(|p| Ok((label_of(p), read_pgm(p)?))).collect()
}

/// A `width`×`height` window sliding over a still image by `step` pixels per
/// frame: a camera pan standing in for natural video content.
pub fn panning_sequence(src: &PixelPlane, width: usize, height: usize, frames: usize, step: (usize, usize)) -> Result<LumaSequence> {
    let span = |len: usize, s: usize| len + s * frames.saturating_sub(1);
    if frames == 0 || span(width, step.0) > src.width() || span(height, step.1) > src.height() {
        return Err(Error::invalid(format!(
            "a {frames}-frame {width}x{height} pan with step {step:?} does not fit in {}x{}",
            src.width(),
            src.height()
        )));
    }
    let frames = (0..frames)
        .map(|f| {
            let (ox, oy) = (f * step.0, f * step.1);
            let mut v = Vec::with_capacity(width * height);
            for y in 0..height {
                v.extend_from_slice(&src.samples()[(oy + y) * src.width() + ox..][..width]);
            }
            PixelPlane::new(width, height, v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LumaSequence { width, height, fps_num: 30, fps_den: 1, frames })
}
