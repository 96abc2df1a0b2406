//! `dctpred`: encode, decode and study block-DCT streams with TV-based
//! prediction of transform coefficients.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dctpred_core::blocks::{dequantize, quantize, read_pgm, write_pgm, LevelBlock, PixelPlane, QuantSpec};
use dctpred_core::harness::*;
use dctpred_core::imagecodec::*;
use dctpred_core::tvcore::{optimal_reconstruct, optimal_reconstruct_descent, BlockGrid, CoeffMask};
use dctpred_core::videocodec::*;
use dctpred_core::{Error, Result};

use config::CliConfig;

#[derive(Parser, Debug)]
#[command(name = "dctpred", version, about = "Block-DCT codecs with TV-based coefficient prediction")]
struct Cli {
    /// TOML file with mask, mode-table and descent overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized experiments (and rd-sweep manifests).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Relative output paths are resolved against this directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Encode a PGM with the still-image codec.
    ImageEncode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 50)]
        q: u8,
        /// Predicted positions, e.g. "c10,c01"; "none" for the plain coder.
        #[arg(long)]
        mask: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the encoder's reconstruction.
        #[arg(long)]
        recon: Option<PathBuf>,
    },
    /// Decode a still-image stream.
    ImageDecode {
        #[arg(long = "in")]
        input: PathBuf,
        /// Must match the mask used at the encoder.
        #[arg(long)]
        mask: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the support-only, predicted and reconstructed stages here.
        #[arg(long)]
        stages_dir: Option<PathBuf>,
    },
    /// Entropy saved and PSNR lost when each AC position is predicted.
    PositionStudy {
        /// Directory of PGM images.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "25,50,75")]
        q: Vec<u8>,
        /// Positions to study; all AC positions by default.
        #[arg(long)]
        positions: Option<String>,
        #[arg(long, default_value = "position_study.csv")]
        csv: PathBuf,
    },
    /// Random-cancellation experiment: zero a share of AC coefficients and
    /// restore them by TV descent.
    Restore {
        #[arg(long = "in")]
        input: PathBuf,
        /// Percentage of AC coefficients to cancel.
        #[arg(long, default_value_t = 10.0)]
        pct: f64,
    },
    /// TV-regularized dequantization of a JPEG-quantized image.
    OptimalReconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 25)]
        q: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a Y4M sequence with the intra video codec.
    IntraEncode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 27)]
        qp: u8,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        vcrespred: Switch,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Symbol-cost map summed over all frames (.pgm, .svg or .csv).
        #[arg(long)]
        costmap: Option<PathBuf>,
        /// Also write the encoder's reconstruction (Y4M).
        #[arg(long)]
        recon: Option<PathBuf>,
    },
    /// Decode an intra video stream to Y4M.
    IntraDecode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Frame rate written to the Y4M header.
        #[arg(long, default_value_t = 30)]
        fps: usize,
    },
    /// Rate-distortion sweep described by a TOML manifest.
    RdSweep {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// BD-rate between two RD curves given as CSV (columns bitrate,psnr).
    BdRate {
        #[arg(long)]
        anchor: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
    /// Render a symbol-cost map CSV as PGM or SVG (chosen by extension).
    Costmap {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Ctx {
    cfg: CliConfig,
    seed: Option<u64>,
    threads: usize,
    out_dir: Option<PathBuf>,
}

impl Ctx {
    fn output(&self, p: &Path) -> Result<PathBuf> {
        let path = match &self.out_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        };
        if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        Ok(path)
    }

    fn default_output(&self, input: &Path, ext: &str) -> Result<PathBuf> {
        let stem = input.file_stem().map(PathBuf::from).unwrap_or_else(|| "out".into());
        self.output(&stem.with_extension(ext))
    }

    fn image_config(&self, q: u8, mask: Option<&str>) -> Result<ImageCodecConfig> {
        let mask = mask.or(self.cfg.image_mask.as_deref()).unwrap_or("c10,c01");
        let mut c = if mask.is_empty() || mask == "none" {
            ImageCodecConfig::baseline(q)?
        } else {
            ImageCodecConfig::with_mask(q, CoeffMask::parse(IMAGE_BLOCK, mask)?)?
        };
        if let Some(r) = self.cfg.ring {
            c.ring = r;
        }
        if let Some(d) = &self.cfg.image_descent {
            c.descent = d.clone();
        }
        c.validate()?;
        Ok(c)
    }

    fn video_config(&self, qp: u8, vcrespred: bool) -> Result<VideoCodecConfig> {
        let mut c = if vcrespred { VideoCodecConfig::vcrespred(qp) } else { VideoCodecConfig::baseline(qp) };
        c.table = self.cfg.mode_table()?;
        if let Some(d) = &self.cfg.video_descent {
            c.descent = d.clone();
        }
        Ok(c)
    }
}

fn read_input(p: &Path) -> Result<Vec<u8>> {
    check_inputs([&p.to_path_buf()])?;
    Ok(std::fs::read(p)?)
}

fn pgm_input(p: &Path) -> Result<PixelPlane> {
    check_inputs([&p.to_path_buf()])?;
    read_pgm(p)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Validation(e.to_string())
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx { cfg: CliConfig::load(cli.config.as_deref())?, seed: cli.seed, threads: cli.threads, out_dir: cli.out_dir };
    match cli.cmd {
        Cmd::ImageEncode { input, q, mask, out, recon } => {
            let plane = pgm_input(&input)?;
            let cfg = ctx.image_config(q, mask.as_deref())?;
            let (bytes, report) = encode_image(&plane, &cfg)?;
            let out = match out {
                Some(o) => ctx.output(&o)?,
                None => ctx.default_output(&input, "vcrp")?,
            };
            std::fs::write(&out, &bytes)?;
            let rec = report.reconstruction.quantized_8bit();
            if let Some(r) = recon {
                write_pgm(&rec, ctx.output(&r)?)?;
            }
            println!("{}: {} bits, {:.4} bpp, PSNR {:.3} dB", out.display(), report.bits, report.rate_bpp, psnr(&plane, &rec)?.db());
        }
        Cmd::ImageDecode { input, mask, out, stages_dir } => {
            let bytes = read_input(&input)?;
            let mut cfg = ctx.image_config(50, mask.as_deref())?;
            cfg = ImageCodecConfig { descent: cfg.descent, ring: cfg.ring, ..ImageCodecConfig::for_stream(&bytes, cfg.mask)? };
            let (plane, stages) = decode_image(&bytes, &cfg)?;
            let out = match out {
                Some(o) => ctx.output(&o)?,
                None => ctx.default_output(&input, "pgm")?,
            };
            write_pgm(&plane.quantized_8bit(), &out)?;
            if let Some(dir) = stages_dir {
                for (name, p) in [("support_only", &stages.support_only), ("predicted", &stages.predicted), ("reconstructed", &stages.reconstructed)] {
                    write_pgm(&p.quantized_8bit(), ctx.output(&dir.join(format!("{name}.pgm")))?)?;
                }
            }
            println!("{}: {}x{}, Q{}", out.display(), plane.width(), plane.height(), cfg.quant.param);
        }
        Cmd::PositionStudy { corpus, q, positions, csv } => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(&corpus)
                .map_err(|e| Error::Validation(format!("{}: {e}", corpus.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(Error::Validation(format!("no .pgm files in {}", corpus.display())));
            }
            let images: Vec<PixelPlane> = load_pgm_corpus(&paths)?.into_iter().map(|(_, p)| p).collect();
            let positions = match positions {
                Some(s) => CoeffMask::parse(IMAGE_BLOCK, &s)?.i_dct().to_vec(),
                None => ac_positions(IMAGE_BLOCK),
            };
            let descent = ctx.cfg.restore_descent.clone().unwrap_or_else(ImageCodecConfig::default_descent);
            let rows = position_study(&images, &q, &positions, &descent)?;
            let out = ctx.output(&csv)?;
            let mut w = csv::Writer::from_path(&out).map_err(csv_error)?;
            for r in &rows {
                w.serialize(r).map_err(csv_error)?;
            }
            w.flush()?;
            println!("{}: {} rows from {} images", out.display(), rows.len(), images.len());
        }
        Cmd::Restore { input, pct } => {
            let plane = pgm_input(&input)?;
            let descent = ctx.cfg.restore_descent.clone().unwrap_or_else(ImageCodecConfig::default_descent);
            let r = random_cancellation_experiment(&plane, pct, ctx.seed.unwrap_or(0), &descent)?;
            println!("cancelled {} coefficients: PSNR {:.3} dB zero-filled, {:.3} dB restored ({:+.3} dB)", r.cancelled, r.psnr_before, r.psnr_after, r.psnr_after - r.psnr_before);
        }
        Cmd::OptimalReconstruct { input, q, out } => {
            let plane = pgm_input(&input)?;
            let quant = QuantSpec::jpeg(q, IMAGE_BLOCK)?;
            let grid = BlockGrid::from_plane(&plane, IMAGE_BLOCK)?;
            let levels: Vec<LevelBlock> = grid.blocks.iter().map(|b| quantize(b, &quant)).collect::<Result<_>>()?;
            let plain = BlockGrid::new(plane.width(), plane.height(), IMAGE_BLOCK, levels.iter().map(|l| dequantize(l, &quant)).collect::<Result<_>>()?)?.to_plane();
            let descent = ctx.cfg.optimal_descent.clone().unwrap_or_else(optimal_reconstruct_descent);
            let tv = optimal_reconstruct(plane.width(), plane.height(), &levels, &quant, &descent)?.quantized_8bit();
            let (p0, p1) = (psnr(&plane, &plain.quantized_8bit())?.db(), psnr(&plane, &tv)?.db());
            if let Some(o) = out {
                write_pgm(&tv, ctx.output(&o)?)?;
            }
            println!("Q{q}: PSNR {p0:.3} dB dequantized, {p1:.3} dB TV-reconstructed ({:+.3} dB)", p1 - p0);
        }
        Cmd::IntraEncode { input, qp, frames, vcrespred, out, costmap, recon } => {
            check_inputs([&input])?;
            let seq = read_y4m_file(&input, frames)?;
            let cfg = ctx.video_config(qp, vcrespred == Switch::On)?;
            let (bytes, results) = encode_sequence(&seq.frames, &cfg)?;
            let out = match out {
                Some(o) => ctx.output(&o)?,
                None => ctx.default_output(&input, "vcrp")?,
            };
            std::fs::write(&out, &bytes)?;
            if let Some(path) = costmap {
                let mut total = results[0].stats.costmap.clone();
                for r in &results[1..] {
                    for (a, b) in total.baseline.iter_mut().zip(&r.stats.costmap.baseline) {
                        *a += b;
                    }
                    for (a, b) in total.coded.iter_mut().zip(&r.stats.costmap.coded) {
                        *a += b;
                    }
                }
                write_costmap(&total, &ctx.output(&path)?)?;
            }
            if let Some(r) = recon {
                let rec = LumaSequence { frames: results.iter().map(|r| r.recon.clone()).collect(), ..seq.clone() };
                write_y4m_file(ctx.output(&r)?, &rec)?;
            }
            let kbps = bytes.len() as f64 * 8.0 * seq.fps() / seq.frames.len() as f64 / 1000.0;
            let mut sum = 0.0;
            for (src, r) in seq.frames.iter().zip(&results) {
                sum += psnr(src, &r.recon)?.db().min(100.0);
            }
            println!("{}: {} frames, {} bits, {kbps:.2} kbps, mean PSNR {:.3} dB", out.display(), results.len(), bytes.len() * 8, sum / results.len() as f64);
        }
        Cmd::IntraDecode { input, out, fps } => {
            let bytes = read_input(&input)?;
            let cfg = ctx.video_config(0, false)?;
            let dec = decode_sequence(&bytes, &cfg)?;
            let seq = LumaSequence { width: dec.header.width as usize, height: dec.header.height as usize, fps_num: fps, fps_den: 1, frames: dec.frames };
            let out = ctx.output(&out)?;
            write_y4m_file(&out, &seq)?;
            println!("{}: {} frames, QP {}", out.display(), seq.frames.len(), dec.header.param);
        }
        Cmd::RdSweep { manifest } => {
            check_inputs([&manifest])?;
            let mut m = RunManifest::from_toml_str(&std::fs::read_to_string(&manifest)?).map_err(|e| Error::Validation(e.to_string()))?;
            let base = manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
            for p in m.images.iter_mut().chain(m.sequences.iter_mut()).chain(m.mode_table.iter_mut()) {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
            if let Some(s) = ctx.seed {
                m.seed = s;
            }
            let dir = match (&ctx.out_dir, &m.out_dir) {
                (Some(d), _) => d.clone(),
                (None, Some(d)) if d.is_relative() => base.join(d),
                (None, Some(d)) => d.clone(),
                (None, None) => PathBuf::from("."),
            };
            let report = rd_sweep(&m, ctx.threads)?;
            std::fs::create_dir_all(&dir)?;
            let written = write_sweep_outputs(&report, &m, &dir)?;
            for r in &report.bd {
                match r.bd_rate_pct {
                    Some(bd) => println!("{} ({:?}): BD-rate {bd:+.3}%", r.source, r.kind),
                    None => println!("{} ({:?}): BD-rate needs at least 4 operating points", r.source, r.kind),
                }
            }
            println!("wrote {} files to {}", written.len(), dir.display());
        }
        Cmd::BdRate { anchor, test } => {
            let load = |p: &Path| -> Result<RDCurve> {
                check_inputs([&p.to_path_buf()])?;
                let mut r = csv::Reader::from_path(p).map_err(csv_error)?;
                let points = r.deserialize::<RDPoint>().collect::<std::result::Result<Vec<_>, _>>().map_err(csv_error)?;
                RDCurve::new(&label_of(p), points)
            };
            let bd = bd_rate(&load(&anchor)?, &load(&test)?)?;
            println!("BD-rate {bd:+.4}%");
        }
        Cmd::Costmap { input, out } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Error::Validation(format!("{}: {e}", input.display())))?;
            let map = costmap_from_csv(&text)?;
            let out = ctx.output(&out)?;
            write_costmap(&map, &out)?;
            println!("{}: {}x{} blocks", out.display(), map.blocks_x, map.blocks_y);
        }
    }
    Ok(())
}

fn write_costmap(map: &SymbolCostMap, path: &Path) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("svg") => std::fs::write(path, costmap_svg(map))?,
        Some("csv") => std::fs::write(path, costmap_to_csv(map)?)?,
        Some("pgm") => write_pgm(&costmap_pgm(map)?, path)?,
        _ => return Err(Error::Validation(format!("{}: costmap output must end in .pgm, .svg or .csv", path.display()))),
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Stream { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
