mod common;

use common::{corpus_image, crop};
use dctpred_core::blocks::{FreqPos, PixelPlane};
use dctpred_core::harness::psnr_db;
use dctpred_core::imagecodec::*;
use dctpred_core::tvcore::CoeffMask;
use dctpred_core::Error;

fn sample() -> PixelPlane {
    crop(&corpus_image("camera"), 160, 48, 96, 80)
}

fn masked(q: u8, mask: &str) -> ImageCodecConfig {
    ImageCodecConfig::with_mask(q, CoeffMask::parse(8, mask).unwrap()).unwrap()
}

#[test]
fn disabled_restoration_is_the_plain_coder() {
    let p = sample();
    let base = ImageCodecConfig::baseline(50).unwrap();
    let mut off = masked(50, "c10,c01");
    off.restore_enabled = false;
    let (b0, r0) = encode_image(&p, &base).unwrap();
    let (b1, r1) = encode_image(&p, &off).unwrap();
    assert_eq!(b0, b1);
    assert_eq!(r0.reconstruction, r1.reconstruction);
    let (dec, stages) = decode_image(&b0, &base).unwrap();
    assert_eq!(dec, r0.reconstruction);
    assert_eq!(stages.support_only, stages.reconstructed);
    assert_eq!(stages.predicted, stages.reconstructed);
}

#[test]
fn decoder_reproduces_the_encoder_reconstruction() {
    let images = [sample(), crop(&corpus_image("coins"), 64, 64, 64, 64)];
    for p in &images {
        for q in [25u8, 50, 75] {
            for mask in ["c10", "c10,c01", "c10,c01,c11,c20"] {
                for ring in [RingContext::Causal, RingContext::Full] {
                    let mut cfg = masked(q, mask);
                    cfg.ring = ring;
                    let (bytes, rep) = encode_image(p, &cfg).unwrap();
                    let (dec, _) = decode_image(&bytes, &cfg).unwrap();
                    assert_eq!(dec.samples(), rep.reconstruction.samples(), "q {q} mask {mask} {ring:?}");
                }
            }
        }
    }
}

#[test]
fn each_decoding_stage_improves_quality() {
    for name in ["camera", "astronaut", "coffee"] {
        let p = crop(&corpus_image(name), 128, 128, 128, 128);
        let cfg = masked(50, "c10,c01");
        let (bytes, _) = encode_image(&p, &cfg).unwrap();
        let (_, st) = decode_image(&bytes, &cfg).unwrap();
        let s1 = psnr_db(&p, &st.support_only).unwrap();
        let s2 = psnr_db(&p, &st.predicted).unwrap();
        let s3 = psnr_db(&p, &st.reconstructed).unwrap();
        assert!(s1 < s2 && s2 < s3, "{name}: {s1:.2} / {s2:.2} / {s3:.2}");
    }
}

#[test]
fn gray_input_has_identical_stages() {
    let p = PixelPlane::filled(32, 24, 128.0).unwrap();
    let cfg = masked(50, "c10,c01");
    let (bytes, _) = encode_image(&p, &cfg).unwrap();
    let (_, st) = decode_image(&bytes, &cfg).unwrap();
    assert_eq!(st.support_only, st.predicted);
    assert_eq!(st.predicted, st.reconstructed);
}

#[test]
fn truncated_stream_reports_the_block() {
    let p = sample();
    let cfg = masked(50, "c10,c01");
    let (bytes, _) = encode_image(&p, &cfg).unwrap();
    let cut = &bytes[..bytes.len() * 2 / 3];
    // the segment length now exceeds the data: rejected before block decoding
    assert!(matches!(decode_image(cut, &cfg), Err(Error::Stream { .. })));
    // keep the framing but truncate the arithmetic payload itself
    let mut framed = bytes[..16].to_vec();
    let payload = &bytes[20..];
    let short = &payload[..payload.len() / 3];
    framed.extend_from_slice(&(short.len() as u32).to_be_bytes());
    framed.extend_from_slice(short);
    match decode_image(&framed, &cfg) {
        Err(Error::Stream { block: Some((x, y)), .. }) => assert!(x % 8 == 0 && y % 8 == 0 && y < 80),
        other => panic!("expected a positioned stream error, got {other:?}"),
    }
}

#[test]
fn damaged_image_streams_never_decode_silently() {
    let p = crop(&corpus_image("coffee"), 200, 120, 48, 40);
    let cfg = masked(50, "c10,c01");
    let (bytes, rep) = encode_image(&p, &cfg).unwrap();
    for i in 20..bytes.len() {
        let mut bad = bytes.clone();
        bad[i] ^= 0x10;
        if let Ok((dec, _)) = decode_image(&bad, &cfg) {
            assert_ne!(dec, rep.reconstruction, "byte {i}");
        }
    }
}

#[test]
fn mismatched_configuration_is_rejected() {
    let p = sample();
    let (bytes, _) = encode_image(&p, &masked(50, "c10")).unwrap();
    assert!(decode_image(&bytes, &masked(75, "c10")).is_err());
    assert!(decode_image(&bytes, &ImageCodecConfig::baseline(50).unwrap()).is_err());
    assert!(ImageCodecConfig::with_mask(50, CoeffMask::parse(8, "c00").unwrap()).unwrap().validate().is_err());
    assert!(encode_image(&PixelPlane::filled(12, 8, 0.0).unwrap(), &masked(50, "c10")).is_err());
}

#[test]
fn random_cancellation_behaves() {
    let p = crop(&corpus_image("coffee"), 96, 96, 128, 128);
    let cfg = ImageCodecConfig::default_descent();
    let tiny = random_cancellation_experiment(&p, 0.01, 1, &cfg).unwrap();
    assert_eq!(tiny.cancelled, (0.0001f64 * (16 * 16 * 63) as f64).round() as usize);
    // next to nothing removed: the image stays near-lossless either way
    assert!(tiny.psnr_before > 50.0 && tiny.psnr_after > 50.0, "{tiny:?}");
    let r = random_cancellation_experiment(&p, 10.0, 7, &cfg).unwrap();
    assert!(r.psnr_after > r.psnr_before + 0.5, "{r:?}");
    assert_eq!(r, random_cancellation_experiment(&p, 10.0, 7, &cfg).unwrap());
    assert!(random_cancellation_experiment(&p, 0.0, 7, &cfg).is_err());
}

#[test]
fn position_study_reports_each_position() {
    let corpus = [crop(&corpus_image("camera"), 0, 0, 64, 64)];
    let positions = [FreqPos::new(1, 0), FreqPos::new(0, 1), FreqPos::new(4, 4)];
    let rows = position_study(&corpus, &[50], &positions, &ImageCodecConfig::default_descent()).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.entropy_reduction >= 0.0 && r.psnr_reduction.is_finite());
    }
    // low frequencies carry more information than a high one
    assert!(rows[0].entropy_reduction > rows[2].entropy_reduction);
    assert!(position_study(&corpus, &[50], &[FreqPos::DC], &ImageCodecConfig::default_descent()).is_err());
    assert_eq!(ac_positions(8).len(), 63);
}
