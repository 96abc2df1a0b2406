//! Whole-plane TV descent over block-DCT coefficients.
//!
//! Every block sees its true neighbours, so this is the joint form of
//! [`restore_block`](super::restore_block) used by the still-image experiments.

use super::restore::DescentConfig;
use crate::blocks::{basis, dequantize, CoeffBlock, FreqPos, LevelBlock, PixelPlane, QuantSpec};
use crate::error::{Error, Result};

/// Discrete TV of a whole plane with replicated borders.
pub fn plane_tv(plane: &PixelPlane, eps: f64) -> f64 {
    let (w, h) = (plane.width(), plane.height());
    let s = plane.samples();
    let mut tv = 0.0;
    for y in 0..h {
        for x in 0..w {
            let u = s[y * w + x];
            let dx = if x + 1 < w { s[y * w + x + 1] - u } else { 0.0 };
            let dy = if y + 1 < h { s[(y + 1) * w + x] - u } else { 0.0 };
            tv += (dx * dx + dy * dy + eps * eps).sqrt();
        }
    }
    tv
}

/// Curvature of a whole plane; `-dTV/du` for [`plane_tv`].
pub fn plane_curvature(plane: &PixelPlane, eps: f64) -> Vec<f64> {
    let (w, h) = (plane.width(), plane.height());
    let s = plane.samples();
    let mut px = vec![0.0; w * h];
    let mut py = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let u = s[i];
            let dx = if x + 1 < w { s[i + 1] - u } else { 0.0 };
            let dy = if y + 1 < h { s[i + w] - u } else { 0.0 };
            let mag = (dx * dx + dy * dy + eps * eps).sqrt();
            px[i] = dx / mag;
            py[i] = dy / mag;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let mut v = px[i] + py[i];
            if x > 0 {
                v -= px[i - 1];
            }
            if y > 0 {
                v -= py[i - w];
            }
            out[i] = v;
        }
    }
    out
}

/// Coefficients of every block of a plane, in raster order.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockGrid {
    pub width: usize,
    pub height: usize,
    pub n: usize,
    pub blocks: Vec<CoeffBlock>,
}

impl BlockGrid {
    pub fn new(width: usize, height: usize, n: usize, blocks: Vec<CoeffBlock>) -> Result<Self> {
        if width % n != 0 || height % n != 0 {
            return Err(Error::invalid(format!("{width}x{height} is not divisible by {n}")));
        }
        if blocks.len() != (width / n) * (height / n) {
            return Err(Error::invalid("block count does not match the plane geometry"));
        }
        Ok(Self { width, height, n, blocks })
    }

    pub fn from_plane(plane: &PixelPlane, n: usize) -> Result<Self> {
        plane.check_block_aligned(n)?;
        let dct = basis(n);
        let blocks = plane
            .block_origins(n)
            .map(|(x, y)| {
                let b = plane.block(x, y, n);
                let mut c = vec![0.0; n * n];
                dct.forward(&b.samples, &mut c);
                CoeffBlock { size: n, coeffs: c, quantized: false, qstep_used: None }
            })
            .collect();
        Self::new(plane.width(), plane.height(), n, blocks)
    }

    pub fn blocks_per_row(&self) -> usize {
        self.width / self.n
    }

    pub fn origin(&self, idx: usize) -> (usize, usize) {
        let bpr = self.blocks_per_row();
        ((idx % bpr) * self.n, (idx / bpr) * self.n)
    }

    pub fn to_plane(&self) -> PixelPlane {
        let n = self.n;
        let dct = basis(n);
        let mut plane = PixelPlane::filled(self.width, self.height, 0.0).expect("non-empty geometry");
        let mut buf = vec![0.0; n * n];
        for (idx, b) in self.blocks.iter().enumerate() {
            dct.inverse(&b.coeffs, &mut buf);
            let (x, y) = self.origin(idx);
            for r in 0..n {
                for c in 0..n {
                    plane.set(x + c, y + r, buf[r * n + c]);
                }
            }
        }
        plane
    }
}

/// Per-coefficient interval the descent must stay inside.
pub type Bounds<'a> = dyn Fn(usize, FreqPos) -> Option<(f64, f64)> + 'a;

/// Summary of a plane descent.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneDescent {
    pub iters_run: usize,
    pub tv_trace: Vec<f64>,
    pub converged: bool,
}

/// TV descent over the coefficients `free(block_index)` of every block at once.
///
/// `bounds`, when given, clamps each updated coefficient after every step.
/// `cfg.gamma0` is absolute here.
pub fn descend_plane(
    grid: &mut BlockGrid,
    free: &dyn Fn(usize) -> Vec<FreqPos>,
    bounds: Option<&Bounds<'_>>,
    cfg: &DescentConfig,
) -> Result<PlaneDescent> {
    cfg.validate()?;
    let n = grid.n;
    let dct = basis(n);
    let free_sets: Vec<Vec<FreqPos>> = (0..grid.blocks.len()).map(free).collect();
    if free_sets.iter().all(|s| s.is_empty()) {
        return Ok(PlaneDescent { iters_run: 0, tv_trace: Vec::new(), converged: true });
    }
    let mut plane = grid.to_plane();
    let delta = cfg.delta(n) * (grid.blocks.len() as f64).sqrt();
    let mut trace = Vec::new();
    let mut curv_block = vec![0.0; n * n];
    let mut pix_delta = vec![0.0; n * n];
    let mut curv_coeffs = vec![0.0; n * n];
    let mut coeff_delta = vec![0.0; n * n];
    for iter in 0..cfg.max_iters {
        trace.push(plane_tv(&plane, cfg.curv_eps));
        let curv = plane_curvature(&plane, cfg.curv_eps);
        let gamma = cfg.gamma(iter);
        let mut change = 0.0;
        for (idx, set) in free_sets.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            let (x0, y0) = grid.origin(idx);
            for r in 0..n {
                curv_block[r * n..(r + 1) * n].copy_from_slice(&curv[(y0 + r) * grid.width + x0..][..n]);
            }
            // dense sets go through the fast separable transforms
            let dense = set.len() > 4;
            if dense {
                dct.forward(&curv_block, &mut curv_coeffs);
                coeff_delta.iter_mut().for_each(|v| *v = 0.0);
            } else {
                pix_delta.iter_mut().for_each(|v| *v = 0.0);
            }
            let block = &mut grid.blocks[idx];
            for &k in set {
                let old = block.get(k);
                let g = if dense { curv_coeffs[k.index(n)] } else { dct.project(&curv_block, k) };
                let mut new = old + gamma * g;
                if let Some((lo, hi)) = bounds.and_then(|b| b(idx, k)) {
                    new = new.clamp(lo, hi);
                }
                let d = new - old;
                if d != 0.0 {
                    block.set(k, new);
                    change += d * d;
                    if dense {
                        coeff_delta[k.index(n)] = d;
                    } else {
                        for (p, phi) in pix_delta.iter_mut().zip(dct.image(k)) {
                            *p += d * phi;
                        }
                    }
                }
            }
            if dense {
                dct.inverse(&coeff_delta, &mut pix_delta);
            }
            let s = plane.samples_mut();
            for r in 0..n {
                for c in 0..n {
                    s[(y0 + r) * grid.width + x0 + c] += pix_delta[r * n + c];
                }
            }
        }
        if change.sqrt() <= delta {
            return Ok(PlaneDescent { iters_run: iter + 1, tv_trace: trace, converged: true });
        }
    }
    Ok(PlaneDescent { iters_run: cfg.max_iters, tv_trace: trace, converged: false })
}

/// Descent used for [`optimal_reconstruct`]: harmonic steps of 0.001 × the
/// mean quantizer step. Every AC coefficient moves at once, so steps must be
/// far smaller than for a single coefficient.
pub fn optimal_reconstruct_descent() -> DescentConfig {
    DescentConfig { gamma0: 0.001, schedule: super::restore::GammaSchedule::Harmonic, ..DescentConfig::default() }
}

/// TV-regularized decoding of a quantized plane.
///
/// All AC coefficients descend TV jointly and are clamped back into their
/// quantization bins `[(l - 1/2) s, (l + 1/2) s]` after every step; DC stays at
/// its dequantized value.
pub fn optimal_reconstruct(width: usize, height: usize, levels: &[LevelBlock], q: &QuantSpec, cfg: &DescentConfig) -> Result<PixelPlane> {
    let n = q.size;
    let blocks = levels.iter().map(|l| dequantize(l, q)).collect::<Result<Vec<_>>>()?;
    let mut grid = BlockGrid::new(width, height, n, blocks)?;
    let cfg = cfg.resolved(q.mean_step());
    let ac: Vec<FreqPos> = (1..n * n).map(|i| FreqPos::from_index(i, n)).collect();
    let bounds = |idx: usize, k: FreqPos| {
        let s = q.step(k);
        let centre = levels[idx].get(k) as f64 * s;
        Some((centre - 0.5 * s, centre + 0.5 * s))
    };
    descend_plane(&mut grid, &|_| ac.clone(), Some(&bounds), &cfg)?;
    Ok(grid.to_plane())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::quantize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plane_curvature_is_negative_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = PixelPlane::new(6, 5, (0..30).map(|_| rng.gen_range(0.0..255.0)).collect()).unwrap();
        let curv = plane_curvature(&p, 1e-3);
        let h = 1e-4;
        for i in 0..30 {
            let mut a = p.clone();
            a.samples_mut()[i] += h;
            let mut b = p.clone();
            b.samples_mut()[i] -= h;
            let fd = (plane_tv(&a, 1e-3) - plane_tv(&b, 1e-3)) / (2.0 * h);
            assert!((fd + curv[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn grid_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = PixelPlane::new(16, 8, (0..128).map(|_| rng.gen_range(0.0..255.0)).collect()).unwrap();
        let back = BlockGrid::from_plane(&p, 8).unwrap().to_plane();
        for (a, b) in p.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn bin_projection_bounds_the_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data: Vec<f64> = (0..256).map(|i| ((i % 16) * 9) as f64 + rng.gen_range(-3.0..3.0)).collect();
        let p = PixelPlane::new(16, 16, data.iter().map(|v| v.round()).collect()).unwrap();
        let q = QuantSpec::flat(1.0, 8).unwrap();
        let grid = BlockGrid::from_plane(&p, 8).unwrap();
        let levels: Vec<LevelBlock> = grid.blocks.iter().map(|b| quantize(b, &q).unwrap()).collect();
        let out = optimal_reconstruct(16, 16, &levels, &q, &DescentConfig::absolute(0.1)).unwrap();
        let out_grid = BlockGrid::from_plane(&out, 8).unwrap();
        for (lv, b) in levels.iter().zip(&out_grid.blocks) {
            for i in 0..64 {
                let k = FreqPos::from_index(i, 8);
                let d = b.get(k) - lv.get(k) as f64;
                assert!(d.abs() <= 0.5 + 1e-9);
                if k.is_dc() {
                    assert!(d.abs() < 1e-9);
                }
            }
        }
    }
}
