//! Baseline-vs-prediction rate-distortion sweeps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{check_inputs, label_of};
use super::metrics::{bd_rate, mse, psnr, RDCurve, RDPoint};
use crate::blocks::read_pgm;
use crate::error::{Error, Result};
use crate::imagecodec::{encode_image, ImageCodecConfig, IMAGE_BLOCK};
use crate::tvcore::{CoeffMask, DescentConfig};
use crate::videocodec::{encode_sequence, read_y4m_file, ModeMaskTable, VideoCodecConfig};

fn default_qualities() -> Vec<u8> {
    vec![25, 50, 75]
}

fn default_qps() -> Vec<u8> {
    vec![22, 27, 32, 37]
}

fn default_mask() -> String {
    "c10,c01".into()
}

/// Everything that determines a sweep; written next to its results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(default)]
    pub name: String,
    /// PGM images for the still-image codec.
    #[serde(default)]
    pub images: Vec<PathBuf>,
    #[serde(default = "default_qualities")]
    pub qualities: Vec<u8>,
    #[serde(default = "default_mask")]
    pub image_mask: String,
    /// Y4M sequences for the intra video codec.
    #[serde(default)]
    pub sequences: Vec<PathBuf>,
    #[serde(default = "default_qps")]
    pub qps: Vec<u8>,
    /// Frame cap per sequence.
    #[serde(default)]
    pub frames: Option<usize>,
    /// Mode mask table override (TOML).
    #[serde(default)]
    pub mode_table: Option<PathBuf>,
    #[serde(default)]
    pub image_descent: Option<DescentConfig>,
    #[serde(default)]
    pub video_descent: Option<DescentConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl Default for RunManifest {
    fn default() -> Self {
        Self {
            name: String::new(),
            images: Vec::new(),
            qualities: default_qualities(),
            image_mask: default_mask(),
            sequences: Vec::new(),
            qps: default_qps(),
            frames: None,
            mode_table: None,
            image_descent: None,
            video_descent: None,
            seed: 0,
            out_dir: None,
        }
    }
}

impl RunManifest {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("bad manifest: {e}")))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.images.is_empty() && self.sequences.is_empty() {
            return Err(Error::invalid("manifest lists no images and no sequences"));
        }
        if !self.images.is_empty() && self.qualities.is_empty() {
            return Err(Error::invalid("empty quality list"));
        }
        if !self.sequences.is_empty() && self.qps.is_empty() {
            return Err(Error::invalid("empty QP list"));
        }
        if let Some(q) = self.qualities.iter().find(|q| !(1..=100).contains(*q)) {
            return Err(Error::invalid(format!("quality {q} out of range")));
        }
        if let Some(q) = self.qps.iter().find(|&&q| q > 51) {
            return Err(Error::invalid(format!("QP {q} out of range")));
        }
        if self.frames == Some(0) {
            return Err(Error::invalid("frame cap must be positive"));
        }
        CoeffMask::parse(IMAGE_BLOCK, &self.image_mask)?;
        for d in self.image_descent.iter().chain(&self.video_descent) {
            d.validate()?;
        }
        check_inputs(self.images.iter().chain(&self.sequences).chain(&self.mode_table))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Image,
    Video,
}

impl SourceKind {
    pub fn unit(self) -> &'static str {
        match self {
            SourceKind::Image => "bpp",
            SourceKind::Video => "kbps",
        }
    }
}

/// One encode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RdRow {
    pub source: String,
    pub kind: SourceKind,
    pub codec: &'static str,
    pub param: u8,
    pub bits: u64,
    pub bitrate: f64,
    pub unit: &'static str,
    pub psnr: f64,
    pub provenance: String,
}

/// Rate saving of the prediction at one operating point (positive = saving).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GainRow {
    pub source: String,
    pub kind: SourceKind,
    pub param: u8,
    pub baseline_bitrate: f64,
    pub vcrespred_bitrate: f64,
    pub gain_pct: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BdRow {
    pub source: String,
    pub kind: SourceKind,
    /// Negative = the prediction saves rate; absent with fewer than 4 points.
    pub bd_rate_pct: Option<f64>,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub points: Vec<RdRow>,
    pub gains: Vec<GainRow>,
    pub bd: Vec<BdRow>,
}

impl SweepReport {
    pub fn mean_bd_rate(&self, kind: SourceKind) -> Option<f64> {
        let v: Vec<f64> = self.bd.iter().filter(|r| r.kind == kind).filter_map(|r| r.bd_rate_pct).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn gain(&self, source: &str, param: u8) -> Option<f64> {
        self.gains.iter().find(|g| g.source == source && g.param == param).map(|g| g.gain_pct)
    }
}

struct Job {
    kind: SourceKind,
    index: usize,
    path: PathBuf,
    param: u8,
    predict: bool,
}

impl Job {
    fn provenance(&self) -> String {
        let (list, key) = match self.kind {
            SourceKind::Image => ("images", "quality"),
            SourceKind::Video => ("sequences", "qp"),
        };
        format!("{list}[{}]={};{key}={}", self.index, self.path.display(), self.param)
    }
}

fn run_job(job: &Job, m: &RunManifest, table: &ModeMaskTable) -> Result<RdRow> {
    let codec = if job.predict { "vcrespred" } else { "baseline" };
    let (bits, bitrate, quality) = match job.kind {
        SourceKind::Image => {
            let plane = read_pgm(&job.path)?;
            let mut cfg = if job.predict {
                ImageCodecConfig::with_mask(job.param, CoeffMask::parse(IMAGE_BLOCK, &m.image_mask)?)?
            } else {
                ImageCodecConfig::baseline(job.param)?
            };
            if let Some(d) = &m.image_descent {
                cfg.descent = d.clone();
            }
            let (bytes, report) = encode_image(&plane, &cfg)?;
            let bits = bytes.len() as u64 * 8;
            let bpp = bits as f64 / (plane.width() * plane.height()) as f64;
            (bits, bpp, psnr(&plane, &report.reconstruction.quantized_8bit())?.db())
        }
        SourceKind::Video => {
            let seq = read_y4m_file(&job.path, m.frames)?;
            let mut cfg = if job.predict { VideoCodecConfig::vcrespred(job.param) } else { VideoCodecConfig::baseline(job.param) };
            cfg.table = table.clone();
            if let Some(d) = &m.video_descent {
                cfg.descent = d.clone();
            }
            let (bytes, frames) = encode_sequence(&seq.frames, &cfg)?;
            let bits = bytes.len() as u64 * 8;
            let kbps = bits as f64 * seq.fps() / seq.frames.len() as f64 / 1000.0;
            let mut sum = 0.0;
            for (src, res) in seq.frames.iter().zip(&frames) {
                sum += mse_to_psnr(mse(src, &res.recon)?);
            }
            (bits, kbps, sum / frames.len() as f64)
        }
    };
    Ok(RdRow {
        source: label_of(&job.path),
        kind: job.kind,
        codec,
        param: job.param,
        bits,
        bitrate,
        unit: job.kind.unit(),
        psnr: quality,
        provenance: job.provenance(),
    })
}

/// Per-frame PSNR; a lossless frame is capped at 100 dB so averages stay finite.
fn mse_to_psnr(m: f64) -> f64 {
    if m == 0.0 {
        100.0
    } else {
        (10.0 * (255.0 * 255.0 / m).log10()).min(100.0)
    }
}

/// Encodes every source at every operating point with and without the
/// prediction. Jobs run on `threads` workers; results are assembled in
/// manifest order, so the report does not depend on scheduling.
pub fn rd_sweep(m: &RunManifest, threads: usize) -> Result<SweepReport> {
    m.validate()?;
    let table = match &m.mode_table {
        Some(p) => ModeMaskTable::from_toml_str(&std::fs::read_to_string(p)?)?,
        None => ModeMaskTable::default(),
    };
    let mut jobs = Vec::new();
    for (kind, paths, params) in [(SourceKind::Image, &m.images, &m.qualities), (SourceKind::Video, &m.sequences, &m.qps)] {
        for (index, path) in paths.iter().enumerate() {
            for &param in params {
                for predict in [false, true] {
                    jobs.push(Job { kind, index, path: path.clone(), param, predict });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().map_err(|e| Error::invalid(e.to_string()))?;
    let points: Vec<RdRow> = pool.install(|| jobs.par_iter().map(|j| run_job(j, m, &table)).collect::<Result<_>>())?;

    let mut gains = Vec::new();
    let mut bd = Vec::new();
    for pair in points.chunks(2) {
        let (b, t) = (&pair[0], &pair[1]);
        gains.push(GainRow {
            source: b.source.clone(),
            kind: b.kind,
            param: b.param,
            baseline_bitrate: b.bitrate,
            vcrespred_bitrate: t.bitrate,
            gain_pct: 100.0 * (1.0 - t.bitrate / b.bitrate),
            provenance: b.provenance.clone(),
        });
    }
    for (kind, paths, params) in [(SourceKind::Image, &m.images, &m.qualities), (SourceKind::Video, &m.sequences, &m.qps)] {
        let per = 2 * params.len();
        let offset = if kind == SourceKind::Image { 0 } else { 2 * m.images.len() * m.qualities.len() };
        for (i, path) in paths.iter().enumerate() {
            let rows = &points[offset + i * per..offset + (i + 1) * per];
            let curve = |predict: usize, label: &str| {
                RDCurve::new(label, rows.iter().skip(predict).step_by(2).map(|r| RDPoint { bitrate: r.bitrate, psnr: r.psnr }).collect())
            };
            let bd_rate_pct = if params.len() >= 4 { Some(bd_rate(&curve(0, "baseline")?, &curve(1, "vcrespred")?)?) } else { None };
            let list = if kind == SourceKind::Image { "images" } else { "sequences" };
            let joined: Vec<String> = params.iter().map(u8::to_string).collect();
            bd.push(BdRow {
                source: label_of(path),
                kind,
                bd_rate_pct,
                provenance: format!("{list}[{i}]={};params={}", path.display(), joined.join("/")),
            });
        }
    }
    Ok(SweepReport { points, gains, bd })
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

/// Gain-vs-bitrate polylines, one per source of `kind`.
pub fn gain_svg(report: &SweepReport, kind: SourceKind) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let rows: Vec<&GainRow> = report.gains.iter().filter(|g| g.kind == kind).collect();
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    if rows.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (x0, x1) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), g| (a.min(g.baseline_bitrate), b.max(g.baseline_bitrate)));
    let (y0, y1) = rows.iter().fold((0.0f64, 0.0f64), |(a, b), g| (a.min(g.gain_pct), b.max(g.gain_pct)));
    let (y0, y1) = (y0.floor() - 0.5, y1.ceil() + 0.5);
    let sx = |v: f64| PAD + (W - 2.0 * PAD) * if x1 > x0 { (v - x0) / (x1 - x0) } else { 0.5 };
    let sy = |v: f64| H - PAD - (H - 2.0 * PAD) * (v - y0) / (y1 - y0);
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{0:.1}" x2="{1:.1}" y2="{0:.1}" stroke="black"/>"#, sy(0.0), W - PAD);
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{:.1}" stroke="black"/>"#, H - PAD);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">bitrate ({})</text>"#, W / 2.0, H - 10.0, kind.unit());
    let _ = writeln!(s, r#"<text x="15" y="{:.1}" transform="rotate(-90 15 {:.1})" text-anchor="middle">rate gain (%)</text>"#, H / 2.0, H / 2.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y1:.1}</text><text x="{:.1}" y="{:.1}" text-anchor="end">{y0:.1}</text>"#, PAD - 4.0, sy(y1), PAD - 4.0, sy(y0));
    let mut sources: Vec<&str> = rows.iter().map(|g| g.source.as_str()).collect();
    sources.dedup();
    for (i, src) in sources.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> = rows.iter().filter(|g| g.source == *src).map(|g| (g.baseline_bitrate, g.gain_pct)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let poly: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#, poly.join(" "));
        for &(x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{colour}"/>"#, sx(x), sy(y));
        }
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" fill="{colour}">{src}</text>"#, W - PAD - 100.0, PAD + 16.0 * i as f64);
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `manifest.toml`, `rd_points.csv`, `gain_vs_rate.csv`,
/// `bd_rate.csv`, `image_gain.csv` and `gain_vs_rate.svg` into `dir`.
pub fn write_sweep_outputs(report: &SweepReport, manifest: &RunManifest, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let image_gains: Vec<GainRow> = report.gains.iter().filter(|g| g.kind == SourceKind::Image).cloned().collect();
    let svg_kind = if report.gains.iter().any(|g| g.kind == SourceKind::Video) { SourceKind::Video } else { SourceKind::Image };
    let files = [
        ("manifest.toml", manifest.to_toml_string()?),
        ("rd_points.csv", csv_string(&report.points)?),
        ("gain_vs_rate.csv", csv_string(&report.gains)?),
        ("bd_rate.csv", csv_string(&report.bd)?),
        ("image_gain.csv", csv_string(&image_gains)?),
        ("gain_vs_rate.svg", gain_svg(report, svg_kind)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
    }
    Ok(written)
}
