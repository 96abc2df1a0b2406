#![allow(dead_code)]

use std::path::PathBuf;

use dctpred_core::blocks::{read_pgm, Block, CoeffBlock, PixelPlane};
use dctpred_core::tvcore::{Patch, RingAvailability};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const CORPUS: [&str; 8] = ["camera", "astronaut", "coffee", "chelsea", "rocket", "motorcycle", "coins", "moon"];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus").join(format!("{name}.pgm"))
}

pub fn corpus_image(name: &str) -> PixelPlane {
    read_pgm(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn crop(p: &PixelPlane, x0: usize, y0: usize, w: usize, h: usize) -> PixelPlane {
    let mut v = Vec::with_capacity(w * h);
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            v.push(p.get(x, y));
        }
    }
    PixelPlane::new(w, h, v).unwrap()
}

/// Minimizer of a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// TV of `context` with its core replaced by `predictor + IDCT(residual)`,
/// where `residual[k] = t`.
pub fn tv_along(
    context: &dctpred_core::tvcore::Patch,
    predictor: &dctpred_core::blocks::Block,
    residual: &dctpred_core::blocks::CoeffBlock,
    k: dctpred_core::blocks::FreqPos,
    t: f64,
    eps: f64,
) -> f64 {
    let mut r = residual.clone();
    r.set(k, t);
    let core = dctpred_core::blocks::inverse_bdct(&r).unwrap();
    let samples: Vec<f64> = core.samples.iter().zip(&predictor.samples).map(|(a, b)| a + b).collect();
    let mut p = context.clone();
    p.set_core(&samples);
    dctpred_core::tvcore::discrete_tv(&p, eps)
}

/// A random patch/predictor/residual triple at size 4 or 8, half of them
/// smooth, with a random ring availability.
pub fn random_case(rng: &mut ChaCha8Rng) -> (Patch, Block, CoeffBlock, usize) {
    let n = if rng.gen_bool(0.5) { 4 } else { 8 };
    let smooth = rng.gen_bool(0.5);
    let (ax, ay) = (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
    let amp = if smooth { 4.0 } else { 120.0 };
    let avail = RingAvailability {
        top: rng.gen(),
        left: rng.gen(),
        bottom: rng.gen(),
        right: rng.gen(),
        top_left: rng.gen(),
        top_right: rng.gen(),
        bottom_left: rng.gen(),
        bottom_right: rng.gen(),
    };
    let ctx = Patch::from_fn(n, avail, |r, c| 128.0 + ax * c as f64 + ay * r as f64 + rng.gen_range(-amp..amp));
    let pred = Block::new((0, 0), n, (0..n * n).map(|_| rng.gen_range(60.0..200.0)).collect()).unwrap();
    let res = CoeffBlock::new(n, (0..n * n).map(|_| rng.gen_range(-40.0..40.0)).collect()).unwrap();
    (ctx, pred, res, n)
}
