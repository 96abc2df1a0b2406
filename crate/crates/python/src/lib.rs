//! Python bindings: planes, the still-image and intra-video codecs, the TV
//! reconstruction experiments and BD-rate.

use dctpred_core::blocks::{self, dequantize, quantize, Block, CoeffBlock, LevelBlock, PixelPlane, QuantSpec};
use dctpred_core::harness::{self, RDCurve, RDPoint};
use dctpred_core::imagecodec::{self, ImageCodecConfig, IMAGE_BLOCK};
use dctpred_core::tvcore::{self, BlockGrid, CoeffMask};
use dctpred_core::videocodec::{self, VideoCodecConfig};
use dctpred_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

create_exception!(dctpred, StreamError, PyException, "Malformed or mismatched bitstream.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Stream { .. } => StreamError::new_err(e.to_string()),
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for dctpred_core::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// A grayscale plane of f64 samples.
#[pyclass(name = "Plane", module = "dctpred", skip_from_py_object)]
#[derive(Clone)]
pub struct Plane {
    inner: PixelPlane,
}

impl From<PixelPlane> for Plane {
    fn from(inner: PixelPlane) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl Plane {
    #[new]
    fn new(width: usize, height: usize, samples: Vec<f64>) -> PyResult<Self> {
        Ok(PixelPlane::new(width, height, samples).or_py()?.into())
    }

    /// Plane from 8-bit samples in raster order.
    #[staticmethod]
    fn from_bytes(width: usize, height: usize, data: &[u8]) -> PyResult<Self> {
        Ok(PixelPlane::from_u8(width, height, data).or_py()?.into())
    }

    #[staticmethod]
    fn read_pgm(path: &str) -> PyResult<Self> {
        Ok(blocks::read_pgm(path).or_py()?.into())
    }

    fn write_pgm(&self, path: &str) -> PyResult<()> {
        blocks::write_pgm(&self.inner.quantized_8bit(), path).or_py()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    fn samples(&self) -> Vec<f64> {
        self.inner.samples().to_vec()
    }

    /// Samples rounded and clamped to 8 bits.
    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_u8())
    }

    fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> PyResult<Self> {
        if x + width > self.inner.width() || y + height > self.inner.height() {
            return Err(PyValueError::new_err("crop window exceeds the plane"));
        }
        let v = (y..y + height).flat_map(|r| (x..x + width).map(move |c| (c, r))).map(|(c, r)| self.inner.get(c, r)).collect();
        Ok(PixelPlane::new(width, height, v).or_py()?.into())
    }

    fn __eq__(&self, other: PyRef<'_, Plane>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Plane({}x{})", self.inner.width(), self.inner.height())
    }
}

fn square_size(len: usize) -> PyResult<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len {
        return Err(PyValueError::new_err("block must hold n*n samples"));
    }
    Ok(n)
}

/// Orthonormal 2-D DCT-II of a square block given in raster order.
#[pyfunction]
fn forward_dct(samples: Vec<f64>) -> PyResult<Vec<f64>> {
    let n = square_size(samples.len())?;
    let b = Block::new((0, 0), n, samples).or_py()?;
    Ok(blocks::forward_bdct(&b).or_py()?.coeffs)
}

#[pyfunction]
fn inverse_dct(coeffs: Vec<f64>) -> PyResult<Vec<f64>> {
    let n = square_size(coeffs.len())?;
    let c = CoeffBlock::new(n, coeffs).or_py()?;
    Ok(blocks::inverse_bdct(&c).or_py()?.samples)
}

/// PSNR in dB; infinite for identical planes.
#[pyfunction]
fn psnr(a: PyRef<'_, Plane>, b: PyRef<'_, Plane>) -> PyResult<f64> {
    Ok(harness::psnr(&a.inner, &b.inner).or_py()?.db())
}

fn image_config(q: u8, mask: &str) -> PyResult<ImageCodecConfig> {
    if mask.is_empty() || mask == "none" {
        ImageCodecConfig::baseline(q).or_py()
    } else {
        ImageCodecConfig::with_mask(q, CoeffMask::parse(IMAGE_BLOCK, mask).or_py()?).or_py()
    }
}

/// Encodes a plane; returns `(stream, reconstruction)`.
#[pyfunction]
#[pyo3(signature = (plane, q = 50, mask = "c10,c01"))]
fn encode_image<'py>(py: Python<'py>, plane: PyRef<'_, Plane>, q: u8, mask: &str) -> PyResult<(Bound<'py, PyBytes>, Plane)> {
    let cfg = image_config(q, mask)?;
    let (bytes, report) = imagecodec::encode_image(&plane.inner, &cfg).or_py()?;
    Ok((PyBytes::new(py, &bytes), report.reconstruction.into()))
}

/// Decodes a still-image stream; `mask` must match the encoder's.
#[pyfunction]
#[pyo3(signature = (data, mask = "c10,c01"))]
fn decode_image(data: &[u8], mask: &str) -> PyResult<Plane> {
    let mask = if mask.is_empty() || mask == "none" { CoeffMask::empty(IMAGE_BLOCK) } else { CoeffMask::parse(IMAGE_BLOCK, mask).or_py()? };
    let cfg = ImageCodecConfig::for_stream(data, mask).or_py()?;
    Ok(imagecodec::decode_image(data, &cfg).or_py()?.0.into())
}

/// JPEG-quantizes the plane at quality `q` and returns
/// `(dequantized, tv_reconstructed)`.
#[pyfunction]
#[pyo3(signature = (plane, q = 25))]
fn optimal_reconstruct(plane: PyRef<'_, Plane>, q: u8) -> PyResult<(Plane, Plane)> {
    let p = &plane.inner;
    let quant = QuantSpec::jpeg(q, IMAGE_BLOCK).or_py()?;
    let grid = BlockGrid::from_plane(p, IMAGE_BLOCK).or_py()?;
    let levels: Vec<LevelBlock> = grid.blocks.iter().map(|b| quantize(b, &quant)).collect::<dctpred_core::Result<_>>().or_py()?;
    let deq = levels.iter().map(|l| dequantize(l, &quant)).collect::<dctpred_core::Result<_>>().or_py()?;
    let plain = BlockGrid::new(p.width(), p.height(), IMAGE_BLOCK, deq).or_py()?.to_plane();
    let tv = tvcore::optimal_reconstruct(p.width(), p.height(), &levels, &quant, &tvcore::optimal_reconstruct_descent()).or_py()?;
    Ok((plain.into(), tv.into()))
}

/// Cancels `pct` percent of the AC coefficients and restores them; returns
/// `(cancelled, psnr_before, psnr_after)`.
#[pyfunction]
#[pyo3(signature = (plane, pct, seed = 0))]
fn random_cancellation(plane: PyRef<'_, Plane>, pct: f64, seed: u64) -> PyResult<(usize, f64, f64)> {
    let r = imagecodec::random_cancellation_experiment(&plane.inner, pct, seed, &ImageCodecConfig::default_descent()).or_py()?;
    Ok((r.cancelled, r.psnr_before, r.psnr_after))
}

/// Intra-codes a list of equally sized planes; returns
/// `(stream, reconstructions)`.
#[pyfunction]
#[pyo3(signature = (frames, qp = 27, vcrespred = true))]
fn encode_intra<'py>(py: Python<'py>, frames: Vec<PyRef<'_, Plane>>, qp: u8, vcrespred: bool) -> PyResult<(Bound<'py, PyBytes>, Vec<Plane>)> {
    let cfg = if vcrespred { VideoCodecConfig::vcrespred(qp) } else { VideoCodecConfig::baseline(qp) };
    let frames: Vec<PixelPlane> = frames.iter().map(|f| f.inner.clone()).collect();
    let (bytes, results) = videocodec::encode_sequence(&frames, &cfg).or_py()?;
    Ok((PyBytes::new(py, &bytes), results.into_iter().map(|r| r.recon.into()).collect()))
}

#[pyfunction]
fn decode_intra(data: &[u8]) -> PyResult<Vec<Plane>> {
    let dec = videocodec::decode_sequence(data, &VideoCodecConfig::baseline(0)).or_py()?;
    Ok(dec.frames.into_iter().map(Plane::from).collect())
}

fn curve(label: &str, points: Vec<(f64, f64)>) -> dctpred_core::Result<RDCurve> {
    RDCurve::new(label, points.into_iter().map(|(bitrate, psnr)| RDPoint { bitrate, psnr }).collect())
}

/// Bjontegaard delta rate in percent between two lists of
/// `(bitrate, psnr)` pairs; negative means `test` saves rate.
#[pyfunction]
fn bd_rate(anchor: Vec<(f64, f64)>, test: Vec<(f64, f64)>) -> PyResult<f64> {
    harness::bd_rate(&curve("anchor", anchor).or_py()?, &curve("test", test).or_py()?).or_py()
}

#[pymodule]
fn dctpred(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("StreamError", m.py().get_type::<StreamError>())?;
    m.add_class::<Plane>()?;
    m.add_function(wrap_pyfunction!(forward_dct, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_dct, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(encode_image, m)?)?;
    m.add_function(wrap_pyfunction!(decode_image, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(random_cancellation, m)?)?;
    m.add_function(wrap_pyfunction!(encode_intra, m)?)?;
    m.add_function(wrap_pyfunction!(decode_intra, m)?)?;
    m.add_function(wrap_pyfunction!(bd_rate, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_keeps_point_order() {
        let c = curve("a", vec![(100.0, 30.0), (200.0, 33.0), (400.0, 36.0), (800.0, 39.0)]).unwrap();
        assert_eq!(c.points[1], RDPoint { bitrate: 200.0, psnr: 33.0 });
        assert!(curve("b", vec![(100.0, 30.0)]).is_err());
    }
}
