use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::IMAGE_BLOCK;
use crate::blocks::{dequantize, quantize, FreqPos, PixelPlane, QuantSpec};
use crate::entropy::entropy_estimate;
use crate::error::{Error, Result};
use crate::harness::psnr_db;
use crate::tvcore::{descend_plane, BlockGrid, DescentConfig};

/// Step that a relative `gamma0` refers to when nothing is quantized.
pub const UNQUANTIZED_REFERENCE_STEP: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CancellationResult {
    pub cancelled: usize,
    /// PSNR of the zero-filled image against the original.
    pub psnr_before: f64,
    /// PSNR after TV restoration of the cancelled coefficients.
    pub psnr_after: f64,
}

/// Cancels `pct` percent of the AC coefficients of `plane` (chosen with a
/// seeded RNG), restores them jointly by TV descent and reports PSNR before
/// and after restoration.
pub fn random_cancellation_experiment(plane: &PixelPlane, pct: f64, seed: u64, cfg: &DescentConfig) -> Result<CancellationResult> {
    if !(pct > 0.0 && pct < 100.0) {
        return Err(Error::invalid("percentage must be in (0, 100)"));
    }
    let n = IMAGE_BLOCK;
    let mut grid = BlockGrid::from_plane(plane, n)?;
    let ac_per_block = n * n - 1;
    let total = grid.blocks.len() * ac_per_block;
    let count = ((pct / 100.0) * total as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets: Vec<Vec<FreqPos>> = vec![Vec::new(); grid.blocks.len()];
    let mut chosen = sample(&mut rng, total, count).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        let (b, k) = (i / ac_per_block, FreqPos::from_index(1 + i % ac_per_block, n));
        grid.blocks[b].set(k, 0.0);
        sets[b].push(k);
    }
    let psnr_before = psnr_db(plane, &grid.to_plane())?;
    let cfg = cfg.resolved(UNQUANTIZED_REFERENCE_STEP);
    descend_plane(&mut grid, &|b| sets[b].clone(), None, &cfg)?;
    let psnr_after = psnr_db(plane, &grid.to_plane())?;
    Ok(CancellationResult { cancelled: count, psnr_before, psnr_after })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PositionRow {
    pub quality: u8,
    pub position: String,
    /// Mean order-0 entropy (bits/symbol) of the deleted levels.
    pub entropy_reduction: f64,
    /// Mean PSNR loss (dB) after deleting and restoring the position.
    pub psnr_reduction: f64,
}

/// Every AC position of an `n`×`n` block, row-major.
pub fn ac_positions(n: usize) -> Vec<FreqPos> {
    (1..n * n).map(|i| FreqPos::from_index(i, n)).collect()
}

/// For each quality and AC position: delete that position in every block,
/// restore it by TV descent, and record the entropy saved and PSNR lost,
/// averaged over the corpus.
pub fn position_study(corpus: &[PixelPlane], qualities: &[u8], positions: &[FreqPos], cfg: &DescentConfig) -> Result<Vec<PositionRow>> {
    if corpus.is_empty() || qualities.is_empty() {
        return Err(Error::invalid("position study needs images and qualities"));
    }
    if positions.iter().any(|k| k.is_dc()) {
        return Err(Error::invalid("DC is excluded from the position study"));
    }
    let n = IMAGE_BLOCK;
    let mut rows = Vec::new();
    for &quality in qualities {
        let q = QuantSpec::jpeg(quality, n)?;
        let dcfg = cfg.resolved(q.mean_step());
        let mut acc = vec![(0.0, 0.0); positions.len()];
        for plane in corpus {
            let grid = BlockGrid::from_plane(plane, n)?;
            let levels = grid.blocks.iter().map(|b| quantize(b, &q)).collect::<Result<Vec<_>>>()?;
            let deq = BlockGrid::new(grid.width, grid.height, n, levels.iter().map(|l| dequantize(l, &q)).collect::<Result<_>>()?)?;
            let base = psnr_db(plane, &deq.to_plane())?;
            for (slot, &k) in acc.iter_mut().zip(positions) {
                let column: Vec<i32> = levels.iter().map(|l| l.get(k)).collect();
                let h = entropy_estimate(&column)?;
                let mut g = deq.clone();
                g.blocks.iter_mut().for_each(|b| b.set(k, 0.0));
                descend_plane(&mut g, &|_| vec![k], None, &dcfg)?;
                slot.0 += h;
                slot.1 += base - psnr_db(plane, &g.to_plane())?;
            }
        }
        let m = corpus.len() as f64;
        for (&(h, p), k) in acc.iter().zip(positions) {
            rows.push(PositionRow { quality, position: k.to_string(), entropy_reduction: h / m, psnr_reduction: p / m });
        }
    }
    Ok(rows)
}
