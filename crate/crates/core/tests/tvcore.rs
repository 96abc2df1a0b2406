mod common;

use common::{golden_section, random_case, tv_along};
use dctpred_core::blocks::{forward_bdct, Block, CoeffBlock, FreqPos, PixelPlane};
use dctpred_core::tvcore::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-3;

fn ramp_plane() -> PixelPlane {
    // gentle ramp with a slow bend
    let (w, h) = (24, 24);
    PixelPlane::new(w, h, (0..w * h).map(|i| {
        let (x, y) = ((i % w) as f64, (i / w) as f64);
        40.0 + 3.0 * x + 1.5 * y + 0.05 * x * x
    }).collect()).unwrap()
}

#[test]
fn ramp_restoration_beats_zero_fill_and_finds_the_tv_minimum() {
    let plane = ramp_plane();
    let n = 8;
    let origin = (8, 8);
    let block = plane.block(8, 8, n);
    let truth = forward_bdct(&block).unwrap();
    let k = FreqPos::new(0, 1);
    let mut res = truth.clone();
    res.set(k, 0.0);
    let ctx = Patch::from_plane(&plane, origin, &block.samples, n, RingAvailability::ALL).unwrap();
    let cfg = DescentConfig { gamma0: 2.0, gamma_relative: false, schedule: GammaSchedule::Harmonic, ..Default::default() };
    let out = restore_block(&ctx, &Block::zeros(n), &res, &CoeffMask::new(n, vec![k]).unwrap(), &cfg).unwrap();
    let got = out.coeffs.get(k);
    assert!((got - truth.get(k)).abs() < truth.get(k).abs());
    let oracle = golden_section(|t| tv_along(&ctx, &Block::zeros(n), &res, k, t, EPS), -500.0, 500.0, 200);
    assert!((got - oracle).abs() <= 0.05 * oracle.abs(), "restored {got}, oracle {oracle}");
}

#[test]
fn dct_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let h = 1e-3;
    for case in 0..300 {
        let (ctx, pred, res, n) = random_case(&mut rng);
        let k = FreqPos::from_index(rng.gen_range(0..n * n), n);
        let g = tv_gradient_dct(&ctx, &pred, &res, k, EPS).unwrap();
        let r0 = res.get(k);
        let fd = (tv_along(&ctx, &pred, &res, k, r0 + h, EPS) - tv_along(&ctx, &pred, &res, k, r0 - h, EPS)) / (2.0 * h);
        let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-6);
        assert!(rel < 1e-3, "case {case}: analytic {g}, numeric {fd}");
    }
}

#[test]
fn residual_path_and_pixel_injection_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let (ctx, pred, res, n) = random_case(&mut rng);
        let folded = {
            let r = dctpred_core::blocks::inverse_bdct(&res).unwrap();
            Block::new((0, 0), n, r.samples.iter().zip(&pred.samples).map(|(a, b)| a + b).collect()).unwrap()
        };
        for i in 0..n * n {
            let k = FreqPos::from_index(i, n);
            let a = tv_gradient_dct(&ctx, &pred, &res, k, EPS).unwrap();
            let b = tv_gradient_dct(&ctx, &folded, &CoeffBlock::zeros(n), k, EPS).unwrap();
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn restoration_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let (ctx, pred, res, n) = random_case(&mut rng);
        let mask = CoeffMask::new(n, vec![FreqPos::new(1, 0), FreqPos::new(0, 1), FreqPos::new(1, 1)]).unwrap();
        let cfg = DescentConfig::absolute(0.3);
        let a = restore_block(&ctx, &pred, &res, &mask, &cfg).unwrap();
        let b = restore_block(&ctx, &pred, &res, &mask, &cfg).unwrap();
        let bits = |r: &RestoreResult| r.coeffs.coeffs.iter().chain(&r.tv_trace).map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!((a.iters_run, a.converged), (b.iters_run, b.converged));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn small_fixed_steps_never_raise_tv(seed in any::<u64>(), mask_bits in 1u16..) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ctx, pred, res, n) = random_case(&mut rng);
        let free: Vec<FreqPos> = (1..n * n).filter(|i| mask_bits & (1 << (i % 16)) != 0).map(|i| FreqPos::from_index(i, n)).collect();
        prop_assume!(!free.is_empty());
        let mask = CoeffMask::new(n, free).unwrap();
        let out = restore_block(&ctx, &pred, &res, &mask, &DescentConfig::absolute(0.01)).unwrap();
        prop_assert_eq!(out.tv_trace.len(), out.iters_run);
        for w in out.tv_trace.windows(2) {
            prop_assert!(w[1] <= w[0], "TV rose from {} to {}", w[0], w[1]);
        }
        for k in mask.i_o() {
            prop_assert_eq!(out.coeffs.get(k).to_bits(), res.get(k).to_bits());
        }
    }
}
