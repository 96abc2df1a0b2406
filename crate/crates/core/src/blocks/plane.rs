use crate::error::{Error, Result};

/// Bit depth of every plane handled by the codecs.
pub const BIT_DEPTH: u32 = 8;
pub const MAX_SAMPLE: f64 = 255.0;

/// A 2-D grid of luma samples.
///
/// Samples are stored as reals so that restoration can move them
/// continuously; [`PixelPlane::to_u8`] clamps and rounds at export time.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelPlane {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl PixelPlane {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!("plane dimensions must be positive, got {width}x{height}")));
        }
        if samples.len() != width * height {
            return Err(Error::invalid(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                samples.len()
            )));
        }
        Ok(Self { width, height, samples })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_u8(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        Self::new(width, height, data.iter().map(|&v| v as f64).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u32 {
        BIT_DEPTH
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.samples[y * self.width + x] = v;
    }

    /// Sample at clamped coordinates (replicate padding outside the plane).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    /// Clamp to [0, 255] and round half away from zero.
    pub fn to_u8(&self) -> Vec<u8> {
        self.samples.iter().map(|&v| v.clamp(0.0, MAX_SAMPLE).round() as u8).collect()
    }

    /// The plane as it would look after an 8-bit export.
    pub fn quantized_8bit(&self) -> PixelPlane {
        PixelPlane {
            width: self.width,
            height: self.height,
            samples: self.to_u8().into_iter().map(|v| v as f64).collect(),
        }
    }

    /// Fails unless both dimensions are multiples of `n`.
    pub fn check_block_aligned(&self, n: usize) -> Result<()> {
        if self.width % n != 0 || self.height % n != 0 {
            return Err(Error::invalid(format!(
                "plane {}x{} is not divisible by block size {n}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// Block origins `(x, y)` in raster order.
    pub fn block_origins(&self, n: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (w, h) = (self.width, self.height);
        (0..h / n).flat_map(move |by| (0..w / n).map(move |bx| (bx * n, by * n)))
    }

    pub fn block(&self, x: usize, y: usize, n: usize) -> Block {
        let mut samples = Vec::with_capacity(n * n);
        for r in 0..n {
            let start = (y + r) * self.width + x;
            samples.extend_from_slice(&self.samples[start..start + n]);
        }
        Block { origin: (x, y), size: n, samples }
    }

    pub fn put_block(&mut self, block: &Block) {
        let (x, y) = block.origin;
        let n = block.size;
        for r in 0..n {
            let start = (y + r) * self.width + x;
            self.samples[start..start + n].copy_from_slice(&block.samples[r * n..(r + 1) * n]);
        }
    }
}

/// One N×N block of samples located at `origin` (pixel offset, x then y).
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub origin: (usize, usize),
    pub size: usize,
    /// Row-major samples.
    pub samples: Vec<f64>,
}

impl Block {
    pub fn new(origin: (usize, usize), size: usize, samples: Vec<f64>) -> Result<Self> {
        check_block_size(size)?;
        if samples.len() != size * size {
            return Err(Error::invalid(format!("block of size {size} needs {} samples", size * size)));
        }
        if origin.0 % size != 0 || origin.1 % size != 0 {
            return Err(Error::invalid(format!("block origin {origin:?} not aligned to {size}")));
        }
        Ok(Self { origin, size, samples })
    }

    pub fn zeros(size: usize) -> Self {
        Self { origin: (0, 0), size, samples: vec![0.0; size * size] }
    }

    pub fn filled(size: usize, value: f64) -> Self {
        Self { origin: (0, 0), size, samples: vec![value; size * size] }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.size + col]
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }
}

pub fn check_block_size(n: usize) -> Result<()> {
    match n {
        4 | 8 => Ok(()),
        _ => Err(Error::invalid(format!("block size must be 4 or 8, got {n}"))),
    }
}
