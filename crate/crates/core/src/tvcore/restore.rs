use std::collections::HashSet;

use super::patch::Patch;
use crate::blocks::{basis, Block, CoeffBlock, FreqPos};
use crate::error::{Error, Result};

/// Split of a block's positions into predicted coefficients (`I_DCT`, kept in
/// prediction order) and support coefficients (`I_O`, everything else).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffMask {
    size: usize,
    order: Vec<FreqPos>,
}

impl CoeffMask {
    pub fn new(size: usize, order: Vec<FreqPos>) -> Result<Self> {
        crate::blocks::check_block_size(size)?;
        let mut seen = HashSet::new();
        for k in &order {
            if k.row as usize >= size || k.col as usize >= size {
                return Err(Error::invalid(format!("{k} lies outside a {size}x{size} block")));
            }
            if !seen.insert(*k) {
                return Err(Error::invalid(format!("{k} listed twice in mask")));
            }
        }
        Ok(Self { size, order })
    }

    pub fn empty(size: usize) -> Self {
        Self { size, order: Vec::new() }
    }

    /// Parses `c10,c01` style lists; an empty string is the empty mask.
    pub fn parse(size: usize, s: &str) -> Result<Self> {
        let order = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(FreqPos::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(size, order)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `I_DCT` in prediction order.
    pub fn i_dct(&self) -> &[FreqPos] {
        &self.order
    }

    /// `I_O` in natural (row-major) order.
    pub fn i_o(&self) -> Vec<FreqPos> {
        (0..self.size * self.size)
            .map(|i| FreqPos::from_index(i, self.size))
            .filter(|k| !self.contains(*k))
            .collect()
    }

    pub fn contains(&self, k: FreqPos) -> bool {
        self.order.contains(&k)
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn to_list_string(&self) -> String {
        self.order.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSchedule {
    Fixed,
    /// `gamma_n = gamma0 / (1 + n / 20)`
    Harmonic,
}

/// Gradient-descent parameters.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct DescentConfig {
    /// Initial step. Absolute unless `gamma_relative` is set, in which case
    /// the codecs multiply it by the block's mean quantization step.
    pub gamma0: f64,
    pub gamma_relative: bool,
    pub schedule: GammaSchedule,
    pub max_iters: usize,
    /// L2 threshold on the coefficient update; `None` means `1e-4 * N`.
    pub stationarity_eps: Option<f64>,
    pub curv_eps: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            gamma0: 0.05,
            gamma_relative: true,
            schedule: GammaSchedule::Fixed,
            max_iters: 100,
            stationarity_eps: None,
            curv_eps: 1e-3,
        }
    }
}

impl DescentConfig {
    pub fn absolute(gamma0: f64) -> Self {
        Self { gamma0, gamma_relative: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0) || !self.gamma0.is_finite() {
            return Err(Error::invalid("gamma0 must be positive"));
        }
        if self.max_iters < 1 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if let Some(d) = self.stationarity_eps {
            if !(d >= 0.0) {
                return Err(Error::invalid("stationarity threshold must be >= 0"));
            }
        }
        if !(self.curv_eps > 0.0) {
            return Err(Error::invalid("curvature epsilon must be positive"));
        }
        Ok(())
    }

    /// Absolute-step copy of this config for a block quantized with `mean_step`.
    pub fn resolved(&self, mean_step: f64) -> DescentConfig {
        let mut out = self.clone();
        if self.gamma_relative {
            out.gamma0 = self.gamma0 * mean_step;
            out.gamma_relative = false;
        }
        out
    }

    #[inline]
    pub fn gamma(&self, iter: usize) -> f64 {
        match self.schedule {
            GammaSchedule::Fixed => self.gamma0,
            GammaSchedule::Harmonic => self.gamma0 / (1.0 + iter as f64 / 20.0),
        }
    }

    pub fn delta(&self, n: usize) -> f64 {
        self.stationarity_eps.unwrap_or(1e-4 * n as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestoreResult {
    pub coeffs: CoeffBlock,
    pub iters_run: usize,
    /// TV at the start of each iteration.
    pub tv_trace: Vec<f64>,
    pub converged: bool,
}

/// Descends TV over the coefficients in `free`, updating `beta` and the patch
/// core (which must hold `predictor + IDCT(beta)` on entry) in place.
///
/// The block only moves along the basis images of `free`, and the ring is
/// either fixed or a linear copy of the core, so every TV term is
/// `|a + sum_k t_k b_k|_eps` with precomputed differences `a`, `b_k`. Its
/// derivative in `t_k` is exactly `-<phi_k, curvature>`, the update of the
/// full formulation, at a fraction of the cost.
pub(crate) fn descend(patch: &mut Patch, beta: &mut [f64], free: &[FreqPos], cfg: &DescentConfig) -> (usize, Vec<f64>, bool) {
    let n = patch.size();
    let dct = basis(n);
    let m = free.len();
    let delta = cfg.delta(n);
    let eps2 = cfg.curv_eps * cfg.curv_eps;
    let terms = patch.tv_terms();
    let nt = terms.len();
    let (mut dx, mut dy): (Vec<f64>, Vec<f64>) = terms.iter().map(|&(r, c)| patch.diffs(r, c)).unzip();
    let mut bx = vec![0.0; m * nt];
    let mut by = vec![0.0; m * nt];
    for (j, &k) in free.iter().enumerate() {
        let phi = dct.image(k);
        let dir = Patch::from_fn(n, patch.availability(), |r, c| {
            if (0..n as isize).contains(&r) && (0..n as isize).contains(&c) {
                phi[r as usize * n + c as usize]
            } else {
                0.0
            }
        });
        for (i, &(r, c)) in terms.iter().enumerate() {
            (bx[j * nt + i], by[j * nt + i]) = dir.diffs(r, c);
        }
    }
    let mut t = vec![0.0; m];
    let mut grad = vec![0.0; m];
    let mut trace = Vec::with_capacity(cfg.max_iters);
    let mut result = (cfg.max_iters, false);
    for iter in 0..cfg.max_iters {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut tv = 0.0;
        for i in 0..nt {
            let mag = (dx[i] * dx[i] + dy[i] * dy[i] + eps2).sqrt();
            tv += mag;
            let (nx, ny) = (dx[i] / mag, dy[i] / mag);
            for (j, g) in grad.iter_mut().enumerate() {
                *g += nx * bx[j * nt + i] + ny * by[j * nt + i];
            }
        }
        trace.push(tv);
        let gamma = cfg.gamma(iter);
        let mut change = 0.0;
        for j in 0..m {
            let s = -gamma * grad[j];
            t[j] += s;
            change += s * s;
            for i in 0..nt {
                dx[i] += s * bx[j * nt + i];
                dy[i] += s * by[j * nt + i];
            }
        }
        if change.sqrt() <= delta {
            result = (iter + 1, true);
            break;
        }
    }
    let mut core_delta = vec![0.0; n * n];
    for (&k, &tk) in free.iter().zip(&t) {
        beta[k.index(n)] += tk;
        for (d, phi) in core_delta.iter_mut().zip(dct.image(k)) {
            *d += tk * phi;
        }
    }
    patch.add_to_core(&core_delta, 1.0);
    (result.0, trace, result.1)
}

/// Restores the `I_DCT` coefficients of `residual` by TV gradient descent.
///
/// The block is `predictor + IDCT(r)` placed inside `context`, whose ring
/// supplies the neighbourhood. Only positions in `mask` move; all other
/// coefficients are returned bit-identical. `cfg.gamma0` is used as an
/// absolute step here.
pub fn restore_block(context: &Patch, predictor: &Block, residual: &CoeffBlock, mask: &CoeffMask, cfg: &DescentConfig) -> Result<RestoreResult> {
    let n = context.size();
    if predictor.size != n || residual.size != n || mask.size() != n {
        return Err(Error::invalid("patch, predictor, residual and mask sizes differ"));
    }
    cfg.validate()?;
    if mask.is_empty() {
        return Ok(RestoreResult { coeffs: residual.clone(), iters_run: 0, tv_trace: Vec::new(), converged: true });
    }
    let mut beta = residual.coeffs.clone();
    let mut core = vec![0.0; n * n];
    basis(n).inverse(&beta, &mut core);
    for (u, p) in core.iter_mut().zip(&predictor.samples) {
        *u += p;
    }
    let mut patch = context.clone();
    patch.set_core(&core);
    let (iters_run, tv_trace, converged) = descend(&mut patch, &mut beta, mask.i_dct(), cfg);
    // I_O positions are copied back verbatim
    let mut coeffs = residual.clone();
    for &k in mask.i_dct() {
        coeffs.set(k, beta[k.index(n)]);
    }
    coeffs.quantized = false;
    Ok(RestoreResult { coeffs, iters_run, tv_trace, converged })
}
