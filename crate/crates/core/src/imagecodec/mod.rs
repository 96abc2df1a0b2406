//! JPEG-like still-image coder with TV restoration of a static coefficient
//! set.
//!
//! Blocks are 8×8, levels are coded in zigzag order with the DC level sent
//! as a difference from the previous block's. When a mask is active its
//! positions carry prediction errors instead of levels: the decoder first
//! rebuilds the image from the support coefficients alone (stage 1), then in
//! raster order restores each block's masked coefficients by TV descent
//! (stage 2) and adds the dequantized errors (stage 3). The encoder runs the
//! identical procedure, so no side information is needed.

mod experiments;

pub use experiments::{ac_positions, position_study, random_cancellation_experiment, CancellationResult, PositionRow, UNQUANTIZED_REFERENCE_STEP};

use crate::blocks::{
    basis, dequantize, make_scan, quantize, quantize_value, Block, CoeffBlock, FreqPos, LevelBlock, PixelPlane, QuantKind, QuantSpec, ScanKind,
};
use crate::entropy::{
    decode_levels, encode_levels, entropy_estimate, read_segment, write_segment, BitstreamReader, BitstreamWriter, CodecId, CoeffContexts,
    RangeDecoder, RangeEncoder, StreamHeader, FLAG_VCRESPRED,
};
use crate::error::{Error, Result};
use crate::tvcore::{restore_block, CoeffMask, DescentConfig, GammaSchedule, Patch, RingAvailability};

pub const IMAGE_BLOCK: usize = 8;

/// Which neighbours the restoration of a block may look at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingContext {
    /// Top/left neighbours only (already fully reconstructed).
    Causal,
    /// All neighbours; blocks not yet reconstructed contribute their stage-1 samples.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageCodecConfig {
    pub quant: QuantSpec,
    pub mask: CoeffMask,
    pub descent: DescentConfig,
    pub restore_enabled: bool,
    pub ring: RingContext,
}

impl ImageCodecConfig {
    pub fn baseline(quality: u8) -> Result<Self> {
        Ok(Self {
            quant: QuantSpec::jpeg(quality, IMAGE_BLOCK)?,
            mask: CoeffMask::empty(IMAGE_BLOCK),
            descent: Self::default_descent(),
            restore_enabled: false,
            ring: RingContext::Full,
        })
    }

    /// Harmonic steps of 0.05 × the mean quantizer step.
    pub fn default_descent() -> DescentConfig {
        DescentConfig { schedule: GammaSchedule::Harmonic, ..DescentConfig::default() }
    }

    pub fn with_mask(quality: u8, mask: CoeffMask) -> Result<Self> {
        Ok(Self { mask, restore_enabled: true, ..Self::baseline(quality)? })
    }

    /// Decoder configuration for `bytes`: quality and whether restoration is
    /// on come from the stream header, the mask from the caller (it is never
    /// transmitted).
    pub fn for_stream(bytes: &[u8], mask: CoeffMask) -> Result<Self> {
        let hdr = StreamHeader::read(&mut BitstreamReader::new(bytes))?;
        if hdr.codec != CodecId::Image || hdr.quant_kind != QuantKind::JpegQuality {
            return Err(Error::stream("not a still-image stream"));
        }
        if hdr.flags & FLAG_VCRESPRED == 0 {
            Self::baseline(hdr.param)
        } else {
            Self::with_mask(hdr.param, mask)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.quant.size != IMAGE_BLOCK || self.mask.size() != IMAGE_BLOCK {
            return Err(Error::invalid("the image codec works on 8x8 blocks"));
        }
        if self.quant.kind != QuantKind::JpegQuality {
            return Err(Error::invalid("the image codec uses the JPEG quality quantizer"));
        }
        if self.mask.contains(FreqPos::DC) {
            return Err(Error::invalid("DC cannot be predicted in image mode"));
        }
        self.descent.validate()
    }

    fn active_mask(&self) -> Option<&CoeffMask> {
        (self.restore_enabled && !self.mask.is_empty()).then_some(&self.mask)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodeReport {
    pub bits: usize,
    pub rate_bpp: f64,
    /// Order-0 entropy (bits/symbol) of the coded symbols at each position.
    pub position_entropy: Vec<(FreqPos, f64)>,
    pub reconstruction: PixelPlane,
}

/// The three decoding stages; identical when no mask is active.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeStages {
    pub support_only: PixelPlane,
    pub predicted: PixelPlane,
    pub reconstructed: PixelPlane,
}

/// Runs the three stages. `error_level(block, k, predicted)` supplies the
/// coded prediction error for masked position `k`.
fn run_stages(
    width: usize,
    height: usize,
    support: &[LevelBlock],
    cfg: &ImageCodecConfig,
    mut error_level: impl FnMut(usize, FreqPos, f64) -> Result<i32>,
) -> Result<DecodeStages> {
    let n = IMAGE_BLOCK;
    let dct = basis(n);
    let q = &cfg.quant;
    let coeffs: Vec<CoeffBlock> = support.iter().map(|l| dequantize(l, q)).collect::<Result<_>>()?;
    let mut stage1 = PixelPlane::filled(width, height, 0.0)?;
    let origins: Vec<(usize, usize)> = stage1.block_origins(n).collect();
    let mut buf = vec![0.0; n * n];
    for (c, &(x, y)) in coeffs.iter().zip(&origins) {
        dct.inverse(&c.coeffs, &mut buf);
        stage1.put_block(&Block { origin: (x, y), size: n, samples: buf.clone() });
    }
    let Some(mask) = cfg.active_mask() else {
        return Ok(DecodeStages { support_only: stage1.clone(), predicted: stage1.clone(), reconstructed: stage1 });
    };
    let dcfg = cfg.descent.resolved(q.mean_step());
    let mut predicted = stage1.clone();
    let mut work = stage1.clone();
    let zero = Block::zeros(n);
    for (idx, (c, &(x, y))) in coeffs.iter().zip(&origins).enumerate() {
        let avail = match cfg.ring {
            RingContext::Causal => RingAvailability::causal((x, y), n, width),
            RingContext::Full => RingAvailability::inside_plane((x, y), n, width, height),
        };
        dct.inverse(&c.coeffs, &mut buf);
        let patch = Patch::from_plane(&work, (x, y), &buf, n, avail)?;
        let restored = restore_block(&patch, &zero, c, mask, &dcfg)?;
        dct.inverse(&restored.coeffs.coeffs, &mut buf);
        predicted.put_block(&Block { origin: (x, y), size: n, samples: buf.clone() });
        let mut fin = restored.coeffs;
        for &k in mask.i_dct() {
            let p = fin.get(k);
            let e = error_level(idx, k, p).map_err(|e| e.at_block(x, y))?;
            fin.set(k, p + e as f64 * q.step(k));
        }
        dct.inverse(&fin.coeffs, &mut buf);
        work.put_block(&Block { origin: (x, y), size: n, samples: buf.clone() });
    }
    Ok(DecodeStages { support_only: stage1, predicted, reconstructed: work })
}

fn header(plane_w: usize, plane_h: usize, cfg: &ImageCodecConfig) -> Result<StreamHeader> {
    let too_big = |v: usize| v > u16::MAX as usize;
    if too_big(plane_w) || too_big(plane_h) {
        return Err(Error::invalid("image too large for the container"));
    }
    Ok(StreamHeader {
        codec: CodecId::Image,
        width: plane_w as u16,
        height: plane_h as u16,
        block_size: IMAGE_BLOCK as u8,
        quant_kind: cfg.quant.kind,
        param: cfg.quant.param,
        flags: if cfg.active_mask().is_some() { FLAG_VCRESPRED } else { 0 },
        frame_count: 1,
    })
}

pub fn encode_image(plane: &PixelPlane, cfg: &ImageCodecConfig) -> Result<(Vec<u8>, EncodeReport)> {
    cfg.validate()?;
    plane.check_block_aligned(IMAGE_BLOCK)?;
    let n = IMAGE_BLOCK;
    let q = &cfg.quant;
    let dct = basis(n);
    let (w, h) = (plane.width(), plane.height());
    let mut original = Vec::new();
    let mut support = Vec::new();
    for (x, y) in plane.block_origins(n) {
        let b = plane.block(x, y, n);
        let mut c = vec![0.0; n * n];
        dct.forward(&b.samples, &mut c);
        let c = CoeffBlock { size: n, coeffs: c, quantized: false, qstep_used: None };
        let mut l = quantize(&c, q)?;
        if let Some(m) = cfg.active_mask() {
            for &k in m.i_dct() {
                l.set(k, 0);
            }
        }
        original.push(c);
        support.push(l);
    }
    let mut coded = support.clone();
    let stages = run_stages(w, h, &support, cfg, |idx, k, pred| {
        let e = quantize_value(original[idx].get(k) - pred, q.step(k));
        coded[idx].set(k, e);
        Ok(e)
    })?;

    let scan = make_scan(ScanKind::Zigzag, n)?;
    let mut enc = RangeEncoder::new();
    let mut ctx = CoeffContexts::default();
    let mut prev_dc = 0;
    let mut symbols = vec![Vec::with_capacity(coded.len()); n * n];
    let mut seq = vec![0i32; n * n];
    for l in &coded {
        for (s, &k) in seq.iter_mut().zip(&scan.positions) {
            *s = l.get(k);
        }
        let dc = seq[0];
        seq[0] = dc - prev_dc;
        prev_dc = dc;
        for (i, &k) in scan.positions.iter().enumerate() {
            symbols[k.index(n)].push(seq[i]);
        }
        encode_levels(&mut enc, &mut ctx, &seq)?;
    }
    let mut out = BitstreamWriter::new();
    header(w, h, cfg)?.write(&mut out);
    write_segment(&mut out, &enc.finish());
    let bytes = out.finish();
    let position_entropy = symbols
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((FreqPos::from_index(i, n), entropy_estimate(s)?)))
        .collect::<Result<_>>()?;
    let bits = bytes.len() * 8;
    let report = EncodeReport { bits, rate_bpp: bits as f64 / (w * h) as f64, position_entropy, reconstruction: stages.reconstructed };
    Ok((bytes, report))
}

/// Decodes a stream produced by [`encode_image`] with the same configuration.
pub fn decode_image(bytes: &[u8], cfg: &ImageCodecConfig) -> Result<(PixelPlane, DecodeStages)> {
    cfg.validate()?;
    let n = IMAGE_BLOCK;
    let mut r = BitstreamReader::new(bytes);
    let hdr = StreamHeader::read(&mut r)?;
    if hdr.codec != CodecId::Image || hdr.block_size as usize != n || hdr.frame_count != 1 {
        return Err(Error::stream("not a still-image stream"));
    }
    if hdr.quant_kind != cfg.quant.kind || hdr.param != cfg.quant.param {
        return Err(Error::stream("stream quantizer does not match the configuration"));
    }
    if (hdr.flags & FLAG_VCRESPRED != 0) != cfg.active_mask().is_some() {
        return Err(Error::stream("stream restoration flag does not match the configuration"));
    }
    let (w, h) = (hdr.width as usize, hdr.height as usize);
    if w % n != 0 || h % n != 0 {
        return Err(Error::stream("image dimensions are not block aligned"));
    }
    let payload = read_segment(&mut r)?;
    let mut dec = RangeDecoder::new(payload)?;
    let scan = make_scan(ScanKind::Zigzag, n)?;
    let mut ctx = CoeffContexts::default();
    let mut prev_dc = 0;
    let bpr = w / n;
    let mut coded = Vec::with_capacity(bpr * (h / n));
    for idx in 0..bpr * (h / n) {
        let mut seq = decode_levels(&mut dec, &mut ctx, n * n).map_err(|e| e.at_block((idx % bpr) * n, (idx / bpr) * n))?;
        seq[0] += prev_dc;
        prev_dc = seq[0];
        let mut l = LevelBlock::zeros(n);
        for (&v, &k) in seq.iter().zip(&scan.positions) {
            l.set(k, v);
        }
        coded.push(l);
    }
    dec.finish()?;
    if r.bits_left() != 0 {
        return Err(Error::stream("trailing data after the image segment"));
    }
    let mut support = coded.clone();
    if let Some(m) = cfg.active_mask() {
        for l in &mut support {
            for &k in m.i_dct() {
                l.set(k, 0);
            }
        }
    }
    let stages = run_stages(w, h, &support, cfg, |idx, k, _| Ok(coded[idx].get(k)))?;
    Ok((stages.reconstructed.clone(), stages))
}
