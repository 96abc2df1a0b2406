use dctpred_core::blocks::*;
use proptest::prelude::*;

fn sizes() -> impl Strategy<Value = usize> {
    prop_oneof![Just(4usize), Just(8usize)]
}

fn block_of(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-255.0f64..510.0, n * n)
}

proptest! {
    #[test]
    fn inverse_undoes_forward(samples in sizes().prop_flat_map(block_of)) {
        let n = (samples.len() as f64).sqrt() as usize;
        let b = Block::new((0, 0), n, samples.clone()).unwrap();
        let c = forward_bdct(&b).unwrap();
        let back = inverse_bdct(&c).unwrap();
        for (a, z) in samples.iter().zip(&back.samples) {
            prop_assert!((a - z).abs() < 1e-9);
        }
        let e_px: f64 = samples.iter().map(|v| v * v).sum();
        let e_c: f64 = c.coeffs.iter().map(|v| v * v).sum();
        prop_assert!((e_px - e_c).abs() <= 1e-9 * e_px.max(1.0));
    }

    #[test]
    fn dequantized_levels_quantize_back(n in sizes(), q in 1u8..=100, seed_levels in proptest::collection::vec(-300i32..300, 64)) {
        let quant = QuantSpec::jpeg(q, n).unwrap();
        let levels = LevelBlock { size: n, levels: seed_levels[..n * n].to_vec() };
        let again = quantize(&dequantize(&levels, &quant).unwrap(), &quant).unwrap();
        prop_assert_eq!(again, levels);
    }

    #[test]
    fn quantization_is_idempotent(samples in sizes().prop_flat_map(block_of), qp in 0u8..=51) {
        let n = (samples.len() as f64).sqrt() as usize;
        let quant = QuantSpec::qp(qp, n).unwrap();
        let c = CoeffBlock::new(n, samples).unwrap();
        let once = quantize(&c, &quant).unwrap();
        let twice = quantize(&dequantize(&once, &quant).unwrap(), &quant).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn scans_are_permutations(n in sizes(), kind in prop_oneof![
        Just(ScanKind::Zigzag), Just(ScanKind::RowFirst), Just(ScanKind::ColumnFirst), Just(ScanKind::DiagDownLeft)
    ]) {
        let s = make_scan(kind, n).unwrap();
        for (i, &k) in s.positions.iter().enumerate() {
            prop_assert_eq!(s.rank(k), i);
        }
        prop_assert_eq!(s.positions[0], FreqPos::DC);
    }
}

#[test]
fn basis_is_orthonormal() {
    for n in [4, 8] {
        let b = basis(n);
        for k in 0..n * n {
            for l in 0..n * n {
                let dot: f64 = b.image(FreqPos::from_index(k, n)).iter().zip(b.image(FreqPos::from_index(l, n))).map(|(x, y)| x * y).sum();
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-12, "n {n}: <{k},{l}> = {dot}");
            }
        }
    }
}

#[test]
fn pgm_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.pgm");
    let p = PixelPlane::new(8, 4, (0..32).map(|v| (v * 7 % 256) as f64).collect()).unwrap();
    write_pgm(&p, &path).unwrap();
    assert_eq!(read_pgm(&path).unwrap(), p);
}
