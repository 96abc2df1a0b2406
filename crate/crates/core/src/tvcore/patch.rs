use crate::blocks::{basis, Block, CoeffBlock, FreqPos, PixelPlane};
use crate::error::{Error, Result};

/// Width of the known-sample border around a block core.
pub const RING: usize = 2;

/// Which ring regions hold real decoded samples.
///
/// Unavailable regions are synthesized by replication (see [`Patch::refresh`]).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RingAvailability {
    pub top: bool,
    pub bottom: bool,
    pub left: bool,
    pub right: bool,
    pub top_left: bool,
    pub top_right: bool,
    pub bottom_left: bool,
    pub bottom_right: bool,
}

impl RingAvailability {
    pub const NONE: RingAvailability = RingAvailability {
        top: false,
        bottom: false,
        left: false,
        right: false,
        top_left: false,
        top_right: false,
        bottom_left: false,
        bottom_right: false,
    };

    pub const ALL: RingAvailability = RingAvailability {
        top: true,
        bottom: true,
        left: true,
        right: true,
        top_left: true,
        top_right: true,
        bottom_left: true,
        bottom_right: true,
    };

    /// Every neighbour that lies inside a `width`×`height` plane.
    pub fn inside_plane(origin: (usize, usize), n: usize, width: usize, height: usize) -> Self {
        let (x, y) = origin;
        let top = y > 0;
        let left = x > 0;
        let bottom = y + n < height;
        let right = x + n < width;
        Self {
            top,
            bottom,
            left,
            right,
            top_left: top && left,
            top_right: top && right,
            bottom_left: bottom && left,
            bottom_right: bottom && right,
        }
    }

    /// Raster-causal neighbours: top, left, top-left, and top-right when that block is already coded.
    pub fn causal(origin: (usize, usize), n: usize, width: usize) -> Self {
        let (x, y) = origin;
        let top = y > 0;
        let left = x > 0;
        Self {
            top,
            left,
            top_left: top && left,
            top_right: top && x + n < width,
            ..Self::NONE
        }
    }
}

/// A block core surrounded by a [`RING`]-pixel border.
///
/// Samples are stored in an `(n + 2 RING)²` row-major array. Ring regions that
/// are not available copy their nearest available sample, so differences
/// across an unavailable side are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    n: usize,
    avail: RingAvailability,
    data: Vec<f64>,
}

impl Patch {
    fn stride(n: usize) -> usize {
        n + 2 * RING
    }

    /// A patch with the given core and every ring region unavailable.
    pub fn isolated(core: &Block) -> Self {
        let n = core.size;
        let m = Self::stride(n);
        let mut p = Self { n, avail: RingAvailability::NONE, data: vec![0.0; m * m] };
        p.set_core(&core.samples);
        p
    }

    /// Builds a patch from a function giving the sample at core-relative
    /// coordinates `(row, col)`, both in `-RING..n + RING`.
    pub fn from_fn(n: usize, avail: RingAvailability, mut f: impl FnMut(isize, isize) -> f64) -> Self {
        let m = Self::stride(n);
        let mut data = vec![0.0; m * m];
        for r in 0..m {
            for c in 0..m {
                data[r * m + c] = f(r as isize - RING as isize, c as isize - RING as isize);
            }
        }
        let mut p = Self { n, avail, data };
        p.refresh();
        p
    }

    /// Core from `core`, ring read from `plane` around `origin` where `avail` allows.
    pub fn from_plane(plane: &PixelPlane, origin: (usize, usize), core: &[f64], n: usize, avail: RingAvailability) -> Result<Self> {
        if core.len() != n * n {
            return Err(Error::invalid("patch core has the wrong number of samples"));
        }
        let (ox, oy) = (origin.0 as isize, origin.1 as isize);
        let mut p = Self::from_fn(n, avail, |r, c| {
            if (0..n as isize).contains(&r) && (0..n as isize).contains(&c) {
                core[r as usize * n + c as usize]
            } else {
                plane.get_clamped(ox + c, oy + r)
            }
        });
        p.refresh();
        Ok(p)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn availability(&self) -> RingAvailability {
        self.avail
    }

    #[inline]
    fn idx(&self, r: isize, c: isize) -> usize {
        let m = Self::stride(self.n) as isize;
        ((r + RING as isize) * m + (c + RING as isize)) as usize
    }

    /// Sample at core-relative coordinates.
    #[inline]
    pub fn at(&self, r: isize, c: isize) -> f64 {
        self.data[self.idx(r, c)]
    }

    pub fn core(&self) -> Vec<f64> {
        let n = self.n as isize;
        let mut out = Vec::with_capacity(self.n * self.n);
        for r in 0..n {
            for c in 0..n {
                out.push(self.at(r, c));
            }
        }
        out
    }

    pub fn set_core(&mut self, core: &[f64]) {
        let n = self.n;
        let m = Self::stride(n);
        for r in 0..n {
            let start = (r + RING) * m + RING;
            self.data[start..start + n].copy_from_slice(&core[r * n..(r + 1) * n]);
        }
        self.refresh();
    }

    /// Adds `scale * delta` to the core samples.
    pub fn add_to_core(&mut self, delta: &[f64], scale: f64) {
        let n = self.n;
        let m = Self::stride(n);
        for r in 0..n {
            let start = (r + RING) * m + RING;
            for (d, s) in self.data[start..start + n].iter_mut().zip(&delta[r * n..(r + 1) * n]) {
                *d += scale * s;
            }
        }
        self.refresh();
    }

    /// Re-synthesizes unavailable ring regions from their nearest available samples.
    pub fn refresh(&mut self) {
        let n = self.n as isize;
        let rg = RING as isize;
        let a = self.avail;
        let last = n - 1;
        for r in -rg..n + rg {
            for c in -rg..n + rg {
                let in_rows = (0..n).contains(&r);
                let in_cols = (0..n).contains(&c);
                if in_rows && in_cols {
                    continue;
                }
                let src = if in_cols {
                    // top or bottom side
                    if r < 0 {
                        (!a.top).then_some((0, c))
                    } else {
                        (!a.bottom).then_some((last, c))
                    }
                } else if in_rows {
                    if c < 0 {
                        (!a.left).then_some((r, 0))
                    } else {
                        (!a.right).then_some((r, last))
                    }
                } else {
                    // corners: fall back to the adjacent side when it exists, else the core
                    let (top, left) = (r < 0, c < 0);
                    let (corner, vert_side, horiz_side) = match (top, left) {
                        (true, true) => (a.top_left, a.top, a.left),
                        (true, false) => (a.top_right, a.top, a.right),
                        (false, true) => (a.bottom_left, a.bottom, a.left),
                        (false, false) => (a.bottom_right, a.bottom, a.right),
                    };
                    let edge_c = if left { 0 } else { last };
                    let edge_r = if top { 0 } else { last };
                    if corner {
                        None
                    } else if vert_side {
                        Some((r, edge_c))
                    } else if horiz_side {
                        Some((edge_r, c))
                    } else {
                        Some((edge_r, edge_c))
                    }
                };
                if let Some((sr, sc)) = src {
                    let v = self.at(sr, sc);
                    let i = self.idx(r, c);
                    self.data[i] = v;
                }
            }
        }
    }

    /// Grid points `(r, c)` whose forward-difference term enters [`discrete_tv`].
    pub(crate) fn tv_terms(&self) -> Vec<(isize, isize)> {
        let n = self.n as isize;
        let mut out = Vec::with_capacity((self.n + 1) * (self.n + 1));
        if self.avail.top {
            out.extend((0..n).map(|c| (-1, c)));
        }
        for r in 0..n {
            if self.avail.left {
                out.push((r, -1));
            }
            out.extend((0..n).map(|c| (r, c)));
        }
        out
    }

    /// Forward differences `(dx, dy)` at grid point `(r, c)`.
    #[inline]
    pub(crate) fn diffs(&self, r: isize, c: isize) -> (f64, f64) {
        let u = self.at(r, c);
        (self.at(r, c + 1) - u, self.at(r + 1, c) - u)
    }

    /// Discrete total variation of the patch, see [`discrete_tv`].
    pub fn tv(&self, eps: f64) -> f64 {
        discrete_tv(self, eps)
    }
}

/// Normalized gradient field over rows/cols `-1..n` (an `(n+1)²` grid) and
/// the TV accumulated over the terms that involve core samples.
struct FluxField {
    n1: usize,
    px: Vec<f64>,
    py: Vec<f64>,
    tv: f64,
}

fn flux(patch: &Patch, eps: f64) -> FluxField {
    let n = patch.n as isize;
    let n1 = patch.n + 1;
    let eps2 = eps * eps;
    let mut px = vec![0.0; n1 * n1];
    let mut py = vec![0.0; n1 * n1];
    let mut tv = 0.0;
    let a = patch.avail;
    for r in -1..n {
        for c in -1..n {
            let u = patch.at(r, c);
            let dx = patch.at(r, c + 1) - u;
            let dy = patch.at(r + 1, c) - u;
            let mag = (dx * dx + dy * dy + eps2).sqrt();
            let i = (r + 1) as usize * n1 + (c + 1) as usize;
            px[i] = dx / mag;
            py[i] = dy / mag;
            let counted = match (r < 0, c < 0) {
                (false, false) => true,
                (false, true) => a.left,
                (true, false) => a.top,
                (true, true) => false,
            };
            if counted {
                tv += mag;
            }
        }
    }
    FluxField { n1, px, py, tv }
}

/// Discrete TV of a patch.
///
/// Sum of `sqrt(dx² + dy² + eps²)` with forward differences, over the core
/// samples plus, where those sides are available, the ring column left of the
/// core and the ring row above it. These are exactly the terms that depend
/// on core samples, so [`curvature`] is the negative gradient of this value.
pub fn discrete_tv(patch: &Patch, eps: f64) -> f64 {
    flux(patch, eps).tv
}

/// Curvature `div(grad u / |grad u|_eps)` at each core sample (row-major N×N),
/// with forward differences for the gradient and backward differences for the
/// divergence. Equals `-dTV/du` for the core samples.
pub fn curvature(patch: &Patch, eps: f64) -> Vec<f64> {
    curvature_and_tv(patch, eps).0
}

pub fn curvature_and_tv(patch: &Patch, eps: f64) -> (Vec<f64>, f64) {
    let n = patch.n;
    let f = flux(patch, eps);
    let n1 = f.n1;
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            let i = (r + 1) * n1 + (c + 1);
            out[r * n + c] = f.px[i] - f.px[i - 1] + f.py[i] - f.py[i - n1];
        }
    }
    (out, f.tv)
}

/// `dTV/dr_k` for the block reconstruction `predictor + IDCT(residual)` placed
/// in the core of `patch`: the k-th DCT coefficient of `-curvature`.
pub fn tv_gradient_dct(patch: &Patch, predictor: &Block, residual: &CoeffBlock, k: FreqPos, eps: f64) -> Result<f64> {
    let n = patch.size();
    if predictor.size != n || residual.size != n {
        return Err(Error::invalid("predictor, residual and patch sizes differ"));
    }
    let mut core = vec![0.0; n * n];
    basis(n).inverse(&residual.coeffs, &mut core);
    for (u, p) in core.iter_mut().zip(&predictor.samples) {
        *u += p;
    }
    let mut work = patch.clone();
    work.set_core(&core);
    let curv = curvature(&work, eps);
    Ok(-basis(n).project(&curv, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-3;

    fn random_patch(rng: &mut ChaCha8Rng, n: usize, avail: RingAvailability) -> Patch {
        Patch::from_fn(n, avail, |_, _| rng.gen_range(0.0..255.0))
    }

    fn random_avail(rng: &mut ChaCha8Rng) -> RingAvailability {
        RingAvailability {
            top: rng.gen(),
            bottom: rng.gen(),
            left: rng.gen(),
            right: rng.gen(),
            top_left: rng.gen(),
            top_right: rng.gen(),
            bottom_left: rng.gen(),
            bottom_right: rng.gen(),
        }
    }

    /// Independent double loop over the TV terms, written from the definition.
    fn tv_oracle(p: &Patch, eps: f64) -> f64 {
        let n = p.size() as isize;
        let a = p.availability();
        let mut total = 0.0;
        let mut term = |r: isize, c: isize| {
            let dx = p.at(r, c + 1) - p.at(r, c);
            let dy = p.at(r + 1, c) - p.at(r, c);
            total += (dx * dx + dy * dy + eps * eps).sqrt();
        };
        for r in 0..n {
            for c in 0..n {
                term(r, c);
            }
        }
        if a.left {
            for r in 0..n {
                term(r, -1);
            }
        }
        if a.top {
            for c in 0..n {
                term(-1, c);
            }
        }
        total
    }

    #[test]
    fn constant_patch_tv_is_n2_eps() {
        let p = Patch::isolated(&Block::filled(4, 100.0));
        assert!((discrete_tv(&p, EPS) - 16.0 * EPS).abs() < 1e-15);
        assert!(curvature(&p, EPS).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vertical_step_edge() {
        let h = 37.0;
        let mut b = Block::zeros(4);
        for r in 0..4 {
            for c in 2..4 {
                b.samples[r * 4 + c] = h;
            }
        }
        let tv = discrete_tv(&Patch::isolated(&b), EPS);
        assert!((tv - 4.0 * h).abs() < 16.0 * EPS + 1e-9, "tv = {tv}");
    }

    #[test]
    fn tv_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = if rng.gen() { 4 } else { 8 };
            let avail = random_avail(&mut rng);
            let p = random_patch(&mut rng, n, avail);
            let (got, want) = (discrete_tv(&p, EPS), tv_oracle(&p, EPS));
            // same terms, different summation order
            assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn affine_patch_has_zero_curvature() {
        let p = Patch::from_fn(8, RingAvailability::ALL, |r, c| 2.0 * c as f64 + 3.0 * r as f64);
        for v in curvature(&p, EPS) {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn curvature_is_negative_tv_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-4;
        for _ in 0..50 {
            let n = if rng.gen() { 4 } else { 8 };
            let avail = random_avail(&mut rng);
            let p = random_patch(&mut rng, n, avail);
            let curv = curvature(&p, EPS);
            let core = p.core();
            for i in 0..n * n {
                let mut plus = core.clone();
                plus[i] += h;
                let mut minus = core.clone();
                minus[i] -= h;
                let mut pp = p.clone();
                pp.set_core(&plus);
                let mut pm = p.clone();
                pm.set_core(&minus);
                let fd = (discrete_tv(&pp, EPS) - discrete_tv(&pm, EPS)) / (2.0 * h);
                assert!((fd + curv[i]).abs() < 1e-6, "fd {fd} curv {}", curv[i]);
            }
        }
    }

    #[test]
    fn replication_follows_availability() {
        let p = Patch::from_fn(4, RingAvailability { top: true, ..RingAvailability::NONE }, |r, c| (r * 10 + c) as f64);
        // top is real, left replicates the core, top-right replicates the top row
        assert_eq!(p.at(-1, 2), -8.0);
        assert_eq!(p.at(2, -1), p.at(2, 0));
        assert_eq!(p.at(-1, 4), p.at(-1, 3));
        assert_eq!(p.at(4, 4), p.at(3, 3));
    }

    #[test]
    fn gradient_is_zero_for_constant_reconstruction() {
        let p = Patch::isolated(&Block::filled(8, 0.0));
        let pred = Block::filled(8, 77.0);
        let res = CoeffBlock::zeros(8);
        for idx in 0..64 {
            let g = tv_gradient_dct(&p, &pred, &res, FreqPos::from_index(idx, 8), EPS).unwrap();
            assert!(g.abs() < 1e-12);
        }
    }
}
