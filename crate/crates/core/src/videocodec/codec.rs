use sha2::{Digest, Sha256};

use super::intra::{choose_mode, intra_predict, IntraMode, Neighbors};
use super::masks::{ModeEntry, ModeMaskTable};
use crate::blocks::{basis, make_scan, quantize_value, Block, FreqPos, PixelPlane, QuantKind, QuantSpec, ScanKind, ScanOrder};
use crate::entropy::{
    decode_levels, decode_mode, encode_levels, encode_mode, most_probable_mode, read_segment, write_segment, BinCounter, BitstreamReader,
    BitstreamWriter, CodecId, CoeffContexts, ModeContexts, RangeDecoder, RangeEncoder, StreamHeader, FLAG_MODE_MASKS, FLAG_VCRESPRED,
};
use crate::error::{Error, Result};
use crate::tvcore::{descend, CoeffMask, DescentConfig, GammaSchedule, Patch, RingAvailability};

/// Block size used for a frame of the given width.
pub fn block_size_for_width(width: usize) -> usize {
    if width >= 832 {
        8
    } else {
        4
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VideoCodecConfig {
    pub qp: u8,
    pub vcrespred: bool,
    /// Per-mode masks and scans; otherwise a static mask with zigzag scan.
    pub per_mode_masks: bool,
    pub table: ModeMaskTable,
    pub descent: DescentConfig,
}

impl VideoCodecConfig {
    pub fn baseline(qp: u8) -> Self {
        Self {
            qp,
            vcrespred: false,
            per_mode_masks: false,
            table: ModeMaskTable::default(),
            descent: Self::default_descent(),
        }
    }

    /// Small harmonic steps, relative to the quantizer step: one-coefficient
    /// descents only need to nudge the prediction off zero.
    pub fn default_descent() -> DescentConfig {
        DescentConfig { gamma0: 0.005, schedule: GammaSchedule::Harmonic, ..DescentConfig::default() }
    }

    pub fn vcrespred(qp: u8) -> Self {
        Self { vcrespred: true, per_mode_masks: true, ..Self::baseline(qp) }
    }

    pub fn flags(&self) -> u8 {
        let mut f = 0;
        if self.vcrespred {
            f |= FLAG_VCRESPRED;
            if self.per_mode_masks {
                f |= FLAG_MODE_MASKS;
            }
        }
        f
    }

    fn with_flags(&self, qp: u8, flags: u8) -> Self {
        Self {
            qp,
            vcrespred: flags & FLAG_VCRESPRED != 0,
            per_mode_masks: flags & FLAG_MODE_MASKS != 0,
            table: self.table.clone(),
            descent: self.descent.clone(),
        }
    }
}

/// Mask and scan a block is coded with.
#[derive(Clone, Debug)]
pub struct BlockTools {
    pub mask: CoeffMask,
    pub scan: ScanOrder,
}

impl BlockTools {
    pub fn baseline(n: usize) -> Result<Self> {
        Ok(Self { mask: CoeffMask::empty(n), scan: make_scan(ScanKind::Zigzag, n)? })
    }

    fn select(cfg: &VideoCodecConfig, n: usize, mode: IntraMode) -> Result<Self> {
        if !cfg.vcrespred {
            return Self::baseline(n);
        }
        if cfg.per_mode_masks {
            let ModeEntry { mask, scan } = cfg.table.get(n, mode).clone();
            return Ok(Self { mask, scan });
        }
        Ok(Self { mask: CoeffMask::parse(n, "c10,c01")?, scan: make_scan(ScanKind::Zigzag, n)? })
    }
}

/// Hash of a reconstructed block, compared between encoder and decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SyncProof(pub [u8; 32]);

impl SyncProof {
    pub fn of(block: &Block) -> Self {
        let bytes: Vec<u8> = block.samples.iter().map(|&v| v as u8).collect();
        SyncProof(Sha256::digest(&bytes).into())
    }
}

#[derive(Clone, Debug)]
pub struct EncodedBlock {
    /// Coded levels in scan order; masked positions hold prediction errors.
    pub levels: Vec<i32>,
    pub recon: Block,
    pub proof: SyncProof,
    /// One entry per masked coefficient, in prediction order.
    pub steps: Vec<PredictionStep>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionStep {
    pub coeff: FreqPos,
    /// Value the descent predicted for the coefficient.
    pub prediction: f64,
    pub error_level: i32,
    /// Positions still unknown at this point (the rest was support).
    pub unknown: Vec<FreqPos>,
}

/// Algorithm 1: hierarchical prediction of the masked coefficients.
///
/// `support` holds dequantized coefficients at unmasked positions (masked
/// ones are ignored). Masked coefficients are handled one at a time in mask
/// order: a TV descent over that coefficient alone (the others still
/// unknown are zero) gives a prediction, `error_level` supplies the coded
/// error, and the corrected value joins the support.
#[allow(clippy::too_many_arguments)]
fn hierarchical_reconstruct(
    pred: &Block,
    recon: &PixelPlane,
    origin: (usize, usize),
    support: &[f64],
    mask: &CoeffMask,
    q: &QuantSpec,
    cfg: &DescentConfig,
    mut error_level: impl FnMut(FreqPos, f64) -> Result<i32>,
    mut observe: impl FnMut(PredictionStep),
) -> Result<Block> {
    let n = pred.size;
    let dct = basis(n);
    let mut beta = support.to_vec();
    for &k in mask.i_dct() {
        beta[k.index(n)] = 0.0;
    }
    let mut samples = vec![0.0; n * n];
    if !mask.is_empty() {
        let mut core = vec![0.0; n * n];
        dct.inverse(&beta, &mut core);
        for (u, p) in core.iter_mut().zip(&pred.samples) {
            *u += p;
        }
        let avail = RingAvailability::causal(origin, n, recon.width());
        let mut patch = Patch::from_plane(recon, origin, &core, n, avail)?;
        let cfg = cfg.resolved(q.mean_step());
        let order = mask.i_dct();
        for (i, &k) in order.iter().enumerate() {
            descend(&mut patch, &mut beta, &[k], &cfg);
            let p = beta[k.index(n)];
            let e = error_level(k, p)?;
            observe(PredictionStep { coeff: k, prediction: p, error_level: e, unknown: order[i..].to_vec() });
            let corr = e as f64 * q.step(k);
            if corr != 0.0 {
                beta[k.index(n)] = p + corr;
                let delta: Vec<f64> = dct.image(k).iter().map(|phi| corr * phi).collect();
                patch.add_to_core(&delta, 1.0);
            }
        }
    }
    dct.inverse(&beta, &mut samples);
    for (u, p) in samples.iter_mut().zip(&pred.samples) {
        *u = (*u + p).round().clamp(0.0, 255.0);
    }
    Ok(Block { origin, size: n, samples })
}

/// Encodes one block given its prediction; `recon` is the frame
/// reconstructed so far (read for the curvature ring only).
pub fn vcrespred_encode_block(
    original: &Block,
    pred: &Block,
    recon: &PixelPlane,
    tools: &BlockTools,
    q: &QuantSpec,
    cfg: &DescentConfig,
) -> Result<EncodedBlock> {
    let n = original.size;
    if pred.size != n || tools.scan.size != n || tools.mask.size() != n || q.size != n {
        return Err(Error::invalid("block, prediction, tools and quantizer sizes differ"));
    }
    let diff: Vec<f64> = original.samples.iter().zip(&pred.samples).map(|(o, p)| o - p).collect();
    let mut r = vec![0.0; n * n];
    basis(n).forward(&diff, &mut r);
    let mut levels_nat: Vec<i32> = (0..n * n).map(|i| quantize_value(r[i], q.step(FreqPos::from_index(i, n)))).collect();
    let support: Vec<f64> = (0..n * n).map(|i| levels_nat[i] as f64 * q.step(FreqPos::from_index(i, n))).collect();
    let mut steps = Vec::new();
    let block = hierarchical_reconstruct(
        pred,
        recon,
        original.origin,
        &support,
        &tools.mask,
        q,
        cfg,
        |k, p| {
            let e = quantize_value(r[k.index(n)] - p, q.step(k));
            levels_nat[k.index(n)] = e;
            Ok(e)
        },
        |step| steps.push(step),
    )?;
    let levels = tools.scan.positions.iter().map(|k| levels_nat[k.index(n)]).collect();
    Ok(EncodedBlock { levels, proof: SyncProof::of(&block), recon: block, steps })
}

/// Rebuilds a block from its coded levels (scan order); the exact mirror of
/// [`vcrespred_encode_block`].
pub fn vcrespred_decode_block(
    levels: &[i32],
    pred: &Block,
    recon: &PixelPlane,
    tools: &BlockTools,
    q: &QuantSpec,
    cfg: &DescentConfig,
) -> Result<Block> {
    let n = pred.size;
    if levels.len() != n * n {
        return Err(Error::invalid("level count does not match the block size"));
    }
    let mut nat = vec![0i32; n * n];
    for (&l, k) in levels.iter().zip(&tools.scan.positions) {
        nat[k.index(n)] = l;
    }
    let support: Vec<f64> = (0..n * n).map(|i| nat[i] as f64 * q.step(FreqPos::from_index(i, n))).collect();
    hierarchical_reconstruct(pred, recon, pred.origin, &support, &tools.mask, q, cfg, |k, _| Ok(nat[k.index(n)]), |_| {})
}

/// Per-block context-coded residual bins: the baseline syntax versus what
/// was actually coded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolCostMap {
    pub blocks_x: usize,
    pub blocks_y: usize,
    pub block_size: usize,
    pub baseline: Vec<u32>,
    pub coded: Vec<u32>,
}

impl SymbolCostMap {
    pub fn new(blocks_x: usize, blocks_y: usize, block_size: usize) -> Self {
        Self { blocks_x, blocks_y, block_size, baseline: vec![0; blocks_x * blocks_y], coded: vec![0; blocks_x * blocks_y] }
    }

    /// Baseline minus coded bins per block (positive = saving).
    pub fn savings(&self) -> impl Iterator<Item = i64> + '_ {
        self.baseline.iter().zip(&self.coded).map(|(&b, &c)| b as i64 - c as i64)
    }
}

#[derive(Clone, Debug)]
pub struct FrameStats {
    pub bits: usize,
    pub mode_bins: u64,
    pub residual_bins: u64,
    pub bypass_bins: u64,
    pub costmap: SymbolCostMap,
}

#[derive(Clone, Debug)]
pub struct FrameResult {
    pub recon: PixelPlane,
    pub modes: Vec<IntraMode>,
    pub proofs: Vec<SyncProof>,
    pub stats: FrameStats,
}

fn count_bins(levels: &[i32]) -> Result<u32> {
    let mut c = BinCounter::default();
    encode_levels(&mut c, &mut CoeffContexts::default(), levels)?;
    Ok(c.context_bins as u32)
}

fn mode_neighbours(modes: &[IntraMode], idx: usize, bpr: usize) -> (Option<u8>, Option<u8>) {
    let left = (idx % bpr > 0).then(|| modes[idx - 1].id());
    let top = (idx >= bpr).then(|| modes[idx - bpr].id());
    (left, top)
}

fn encode_frame_segment(plane: &PixelPlane, cfg: &VideoCodecConfig, n: usize) -> Result<(Vec<u8>, FrameResult)> {
    plane.check_block_aligned(n)?;
    let q = QuantSpec::qp(cfg.qp, n)?;
    let (w, h) = (plane.width(), plane.height());
    let (bpr, bpc) = (w / n, h / n);
    let mut recon = PixelPlane::filled(w, h, 0.0)?;
    let mut enc = RangeEncoder::new();
    let mut cctx = CoeffContexts::default();
    let mut mctx = ModeContexts::default();
    let mut modes = Vec::with_capacity(bpr * bpc);
    let mut proofs = Vec::with_capacity(bpr * bpc);
    let mut costmap = SymbolCostMap::new(bpr, bpc, n);
    let base_tools = BlockTools::baseline(n)?;
    let mut mode_bins = 0;
    for (idx, (x, y)) in plane.block_origins(n).enumerate() {
        let original = plane.block(x, y, n);
        // open-loop decision on source samples: identical with and without prediction
        let mode = choose_mode(&original, &Neighbors::gather(plane, (x, y), n))?;
        let mut pred = intra_predict(mode, &Neighbors::gather(&recon, (x, y), n))?;
        pred.origin = (x, y);
        let tools = BlockTools::select(cfg, n, mode)?;
        let coded = vcrespred_encode_block(&original, &pred, &recon, &tools, &q, &cfg.descent)?;
        let (left, top) = mode_neighbours(&modes, idx, bpr);
        let before = enc.context_bins();
        encode_mode(&mut enc, &mut mctx, mode.id(), most_probable_mode(left, top))?;
        mode_bins += enc.context_bins() - before;
        encode_levels(&mut enc, &mut cctx, &coded.levels)?;
        costmap.coded[idx] = count_bins(&coded.levels)?;
        costmap.baseline[idx] = if cfg.vcrespred {
            // shadow baseline: plain levels of the same residual
            let shadow = vcrespred_encode_block(&original, &pred, &recon, &base_tools, &q, &cfg.descent)?;
            count_bins(&shadow.levels)?
        } else {
            costmap.coded[idx]
        };
        recon.put_block(&coded.recon);
        modes.push(mode);
        proofs.push(coded.proof);
    }
    let residual_bins = enc.context_bins() - mode_bins;
    let bypass_bins = enc.bypass_bins();
    let bytes = enc.finish();
    let stats = FrameStats { bits: (bytes.len() + 4) * 8, mode_bins, residual_bins, bypass_bins, costmap };
    Ok((bytes, FrameResult { recon, modes, proofs, stats }))
}

fn decode_frame_segment(seg: &[u8], w: usize, h: usize, n: usize, cfg: &VideoCodecConfig) -> Result<(PixelPlane, Vec<SyncProof>)> {
    let q = QuantSpec::qp(cfg.qp, n)?;
    let bpr = w / n;
    let mut recon = PixelPlane::filled(w, h, 0.0)?;
    let mut dec = RangeDecoder::new(seg)?;
    let mut cctx = CoeffContexts::default();
    let mut mctx = ModeContexts::default();
    let mut modes: Vec<IntraMode> = Vec::new();
    let mut proofs = Vec::new();
    let origins: Vec<(usize, usize)> = recon.block_origins(n).collect();
    for (idx, (x, y)) in origins.into_iter().enumerate() {
        let at = |e: Error| e.at_block(x, y);
        let (left, top) = mode_neighbours(&modes, idx, bpr);
        let mode = IntraMode::from_id(decode_mode(&mut dec, &mut mctx, most_probable_mode(left, top)).map_err(at)?)
            .map_err(|e| Error::Stream { msg: e.to_string(), block: Some((x, y)) })?;
        let levels = decode_levels(&mut dec, &mut cctx, n * n).map_err(at)?;
        let nb = Neighbors::gather(&recon, (x, y), n);
        let mut pred = intra_predict(mode, &nb)?;
        pred.origin = (x, y);
        let tools = BlockTools::select(cfg, n, mode)?;
        let block = vcrespred_decode_block(&levels, &pred, &recon, &tools, &q, &cfg.descent)?;
        proofs.push(SyncProof::of(&block));
        recon.put_block(&block);
        modes.push(mode);
    }
    dec.finish()?;
    Ok((recon, proofs))
}

/// Intra-codes every frame of a sequence into one container stream.
pub fn encode_sequence(frames: &[PixelPlane], cfg: &VideoCodecConfig) -> Result<(Vec<u8>, Vec<FrameResult>)> {
    let first = frames.first().ok_or_else(|| Error::invalid("no frames to encode"))?;
    let (w, h) = (first.width(), first.height());
    if frames.iter().any(|f| f.width() != w || f.height() != h) {
        return Err(Error::invalid("frames differ in size"));
    }
    if w > u16::MAX as usize || h > u16::MAX as usize || frames.len() > u16::MAX as usize {
        return Err(Error::invalid("sequence too large for the container"));
    }
    let n = block_size_for_width(w);
    first.check_block_aligned(n)?;
    QuantSpec::qp(cfg.qp, n)?;
    let mut out = BitstreamWriter::new();
    StreamHeader {
        codec: CodecId::IntraVideo,
        width: w as u16,
        height: h as u16,
        block_size: n as u8,
        quant_kind: QuantKind::QpUniform,
        param: cfg.qp,
        flags: cfg.flags(),
        frame_count: frames.len() as u16,
    }
    .write(&mut out);
    let mut results = Vec::with_capacity(frames.len());
    for f in frames {
        let (seg, res) = encode_frame_segment(f, cfg, n)?;
        write_segment(&mut out, &seg);
        results.push(res);
    }
    Ok((out.finish(), results))
}

/// Single-frame stream.
pub fn encode_frame(plane: &PixelPlane, cfg: &VideoCodecConfig) -> Result<(Vec<u8>, FrameResult)> {
    let (bytes, mut res) = encode_sequence(std::slice::from_ref(plane), cfg)?;
    Ok((bytes, res.remove(0)))
}

#[derive(Clone, Debug)]
pub struct DecodedSequence {
    pub header: StreamHeader,
    pub frames: Vec<PixelPlane>,
    pub proofs: Vec<Vec<SyncProof>>,
}

/// Decodes a stream. QP and flags come from the header; the mask table and
/// descent parameters from `cfg` (they are static codec configuration).
pub fn decode_sequence(bytes: &[u8], cfg: &VideoCodecConfig) -> Result<DecodedSequence> {
    let mut r = BitstreamReader::new(bytes);
    let header = StreamHeader::read(&mut r)?;
    if header.codec != CodecId::IntraVideo || header.quant_kind != QuantKind::QpUniform {
        return Err(Error::stream("not an intra-video stream"));
    }
    let (w, h, n) = (header.width as usize, header.height as usize, header.block_size as usize);
    if n != block_size_for_width(w) || w % n != 0 || h % n != 0 {
        return Err(Error::stream("inconsistent block size in header"));
    }
    if header.param > 51 {
        return Err(Error::stream("QP out of range"));
    }
    let cfg = cfg.with_flags(header.param, header.flags);
    let mut frames = Vec::with_capacity(header.frame_count as usize);
    let mut proofs = Vec::with_capacity(header.frame_count as usize);
    for _ in 0..header.frame_count {
        let seg = read_segment(&mut r)?;
        let (f, p) = decode_frame_segment(seg, w, h, n, &cfg)?;
        frames.push(f);
        proofs.push(p);
    }
    if r.bits_left() != 0 {
        return Err(Error::stream("trailing data after the last frame"));
    }
    Ok(DecodedSequence { header, frames, proofs })
}
