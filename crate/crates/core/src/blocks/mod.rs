//! Pixel planes, coefficient blocks, the orthonormal block DCT, quantizers
//! and scan orders shared by both codecs.

mod coeffs;
mod dct;
mod pgm;
mod plane;
mod quant;
mod scan;

pub use coeffs::{CoeffBlock, FreqPos, LevelBlock};
pub use dct::{basis, forward_bdct, inverse_bdct, DctBasis};
pub use pgm::{read_pgm, read_pgm_from, write_pgm, write_pgm_to};
pub use plane::{check_block_size, Block, PixelPlane, BIT_DEPTH, MAX_SAMPLE};
pub use quant::{dequantize, qp_step, quantize, quantize_value, QuantKind, QuantSpec, JPEG_LUMA_BASE};
pub use scan::{make_scan, ScanKind, ScanOrder};
