//! Orthonormal 2-D DCT-II on 4×4 and 8×8 blocks.
//!
//! The kernel is `phi(row, col; i, j) = C(i) C(j) cos((2 row + 1) i pi / 2N) cos((2 col + 1) j pi / 2N)`
//! with `C(0) = sqrt(1/N)` and `C(i) = sqrt(2/N)`. Because the basis is
//! orthonormal the inverse transform is the adjoint.

use std::sync::OnceLock;

use super::{check_block_size, Block, CoeffBlock, FreqPos};
use crate::error::{Error, Result};

/// 1-D orthonormal DCT matrix, `m[k * n + x]`.
pub struct DctBasis {
    n: usize,
    m: Vec<f64>,
    /// 2-D basis images, one N×N image per frequency (row-major over FreqPos).
    images: Vec<Vec<f64>>,
}

impl DctBasis {
    fn build(n: usize) -> Self {
        let mut m = vec![0.0; n * n];
        for k in 0..n {
            let c = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            for x in 0..n {
                m[k * n + x] = c * (((2 * x + 1) * k) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
            }
        }
        let mut images = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut img = vec![0.0; n * n];
                for r in 0..n {
                    for c in 0..n {
                        img[r * n + c] = m[i * n + r] * m[j * n + c];
                    }
                }
                images.push(img);
            }
        }
        Self { n, m, images }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// The 1-D matrix entry `C(k) cos((2x+1) k pi / 2N)`.
    #[inline]
    pub fn entry(&self, k: usize, x: usize) -> f64 {
        self.m[k * self.n + x]
    }

    /// Basis image for frequency `k`, row-major N×N.
    #[inline]
    pub fn image(&self, k: FreqPos) -> &[f64] {
        &self.images[k.index(self.n)]
    }

    /// Separable forward transform of row-major samples.
    pub fn forward(&self, src: &[f64], dst: &mut [f64]) {
        let n = self.n;
        let mut tmp = [0.0f64; 64];
        // rows: tmp[r][j] = sum_c src[r][c] m[j][c]
        for r in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for c in 0..n {
                    acc += src[r * n + c] * self.m[j * n + c];
                }
                tmp[r * n + j] = acc;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for r in 0..n {
                    acc += self.m[i * n + r] * tmp[r * n + j];
                }
                dst[i * n + j] = acc;
            }
        }
    }

    /// Separable inverse transform (adjoint of [`DctBasis::forward`]).
    pub fn inverse(&self, src: &[f64], dst: &mut [f64]) {
        let n = self.n;
        let mut tmp = [0.0f64; 64];
        // tmp[i][c] = sum_j src[i][j] m[j][c]
        for i in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += src[i * n + j] * self.m[j * n + c];
                }
                tmp[i * n + c] = acc;
            }
        }
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += self.m[i * n + r] * tmp[i * n + c];
                }
                dst[r * n + c] = acc;
            }
        }
    }

    /// Single coefficient: inner product of `samples` with the basis image of `k`.
    #[inline]
    pub fn project(&self, samples: &[f64], k: FreqPos) -> f64 {
        self.image(k).iter().zip(samples).map(|(a, b)| a * b).sum()
    }
}

/// Shared basis tables for N = 4 and N = 8.
pub fn basis(n: usize) -> &'static DctBasis {
    static B4: OnceLock<DctBasis> = OnceLock::new();
    static B8: OnceLock<DctBasis> = OnceLock::new();
    match n {
        4 => B4.get_or_init(|| DctBasis::build(4)),
        8 => B8.get_or_init(|| DctBasis::build(8)),
        _ => panic!("unsupported block size {n}"),
    }
}

pub fn forward_bdct(block: &Block) -> Result<CoeffBlock> {
    check_block_size(block.size)?;
    if block.samples.len() != block.size * block.size {
        return Err(Error::invalid("block sample count does not match its size"));
    }
    if !block.is_finite() {
        return Err(Error::invalid("non-finite sample in block"));
    }
    let mut coeffs = vec![0.0; block.size * block.size];
    basis(block.size).forward(&block.samples, &mut coeffs);
    Ok(CoeffBlock { size: block.size, coeffs, quantized: false, qstep_used: None })
}

pub fn inverse_bdct(coeffs: &CoeffBlock) -> Result<Block> {
    check_block_size(coeffs.size)?;
    if coeffs.coeffs.len() != coeffs.size * coeffs.size {
        return Err(Error::invalid("coefficient count does not match block size"));
    }
    if !coeffs.is_finite() {
        return Err(Error::invalid("non-finite coefficient"));
    }
    let mut samples = vec![0.0; coeffs.size * coeffs.size];
    basis(coeffs.size).inverse(&coeffs.coeffs, &mut samples);
    Ok(Block { origin: (0, 0), size: coeffs.size, samples })
}
