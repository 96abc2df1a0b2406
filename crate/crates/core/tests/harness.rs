mod common;

use common::{corpus_image, corpus_path, crop};
use dctpred_core::blocks::write_pgm;
use dctpred_core::harness::*;
use dctpred_core::videocodec::{encode_frame, write_y4m_file, VideoCodecConfig};

fn curve(label: &str, pts: &[(f64, f64)]) -> RDCurve {
    RDCurve::new(label, pts.iter().map(|&(bitrate, psnr)| RDPoint { bitrate, psnr }).collect()).unwrap()
}

#[test]
fn bd_rate_is_consistent_both_ways_for_log_shifts() {
    let anchor = curve("a", &[(100.0, 30.0), (180.0, 33.0), (320.0, 36.0), (600.0, 39.5)]);
    for factor in [0.5, 0.8, 1.25, 3.0] {
        let test = curve("t", &anchor.points.iter().map(|p| (p.bitrate * factor, p.psnr)).collect::<Vec<_>>());
        let ab = bd_rate(&anchor, &test).unwrap() / 100.0;
        let ba = bd_rate(&test, &anchor).unwrap() / 100.0;
        assert!((ab - (factor - 1.0)).abs() < 1e-9);
        assert!((ab + ba / (1.0 + ba)).abs() < 1e-9);
    }
}

#[test]
fn disjoint_quality_ranges_are_a_domain_error() {
    let a = curve("a", &[(1.0, 20.0), (2.0, 21.0), (3.0, 22.0), (4.0, 23.0)]);
    let b = curve("b", &[(1.0, 30.0), (2.0, 31.0), (3.0, 32.0), (4.0, 33.0)]);
    assert!(matches!(bd_rate(&a, &b), Err(dctpred_core::Error::Domain(_))));
}

fn small_manifest(dir: &std::path::Path) -> RunManifest {
    let img = dir.join("tile.pgm");
    write_pgm(&crop(&corpus_image("camera"), 200, 100, 48, 40), &img).unwrap();
    let seq = panning_sequence(&corpus_image("astronaut"), 32, 24, 2, (2, 1)).unwrap();
    let y4m = dir.join("pan.y4m");
    write_y4m_file(&y4m, &seq).unwrap();
    RunManifest {
        name: "tiny".into(),
        images: vec![img],
        qualities: vec![25, 50, 75, 90],
        sequences: vec![y4m],
        qps: vec![22, 27, 32, 37],
        seed: 3,
        ..Default::default()
    }
}

#[test]
fn sweep_outputs_are_deterministic_and_traceable() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_manifest(dir.path());
    let r1 = rd_sweep(&m, 1).unwrap();
    let r2 = rd_sweep(&m, 2).unwrap();
    assert_eq!(r1, r2);
    let out1 = write_sweep_outputs(&r1, &m, &dir.path().join("a")).unwrap();
    let out2 = write_sweep_outputs(&r2, &m, &dir.path().join("b")).unwrap();
    for (a, b) in out1.iter().zip(&out2) {
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), "{}", a.display());
    }
    assert_eq!(r1.points.len(), 2 * 4 + 2 * 4);
    assert_eq!(r1.bd.len(), 2);
    assert!(r1.bd.iter().all(|b| b.bd_rate_pct.is_some_and(f64::is_finite)));
    let csv = std::fs::read_to_string(dir.path().join("a/rd_points.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.ends_with("provenance"));
    for line in csv.lines().skip(1) {
        assert!(line.contains("images[0]=") || line.contains("sequences[0]="), "{line}");
    }
    let manifest_back = RunManifest::from_toml_str(&std::fs::read_to_string(dir.path().join("a/manifest.toml")).unwrap()).unwrap();
    assert_eq!(manifest_back, m);
    assert!(std::fs::read_to_string(dir.path().join("a/gain_vs_rate.svg")).unwrap().contains("<polyline"));
}

#[test]
fn sweep_lists_missing_inputs_before_encoding() {
    let m = RunManifest {
        images: vec![corpus_path("camera"), "/nope/one.pgm".into()],
        sequences: vec!["/nope/two.y4m".into()],
        ..Default::default()
    };
    let msg = rd_sweep(&m, 1).unwrap_err().to_string();
    assert!(msg.contains("one.pgm") && msg.contains("two.y4m") && !msg.contains("camera"));
}

#[test]
fn costmap_of_a_real_frame() {
    let frame = crop(&corpus_image("motorcycle"), 100, 100, 64, 48);
    let (_, res) = encode_frame(&frame, &VideoCodecConfig::vcrespred(27)).unwrap();
    let map = &res.stats.costmap;
    assert_eq!((map.blocks_x, map.blocks_y), (16, 12));
    let pgm = costmap_pgm(map).unwrap();
    assert_eq!((pgm.width(), pgm.height()), (64, 48));
    assert_eq!(costmap_from_csv(&costmap_to_csv(map).unwrap()).unwrap(), *map);
    let svg = costmap_svg(map);
    let gains = map.savings().filter(|&d| d > 0).count();
    let losses = map.savings().filter(|&d| d < 0).count();
    assert_eq!(svg.matches("#00a000").count(), gains);
    assert_eq!(svg.matches("#0040ff").count(), losses);
}
