use nalgebra::{DMatrix, DVector};

use crate::blocks::{PixelPlane, MAX_SAMPLE};
use crate::error::{Error, Result};

/// PSNR value; identical planes are reported as [`Psnr::Lossless`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psnr {
    Db(f64),
    Lossless,
}

impl Psnr {
    /// Decibels, with `+inf` for lossless.
    pub fn db(self) -> f64 {
        match self {
            Psnr::Db(v) => v,
            Psnr::Lossless => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psnr::Db(v) => write!(f, "{v:.4} dB"),
            Psnr::Lossless => f.write_str("lossless"),
        }
    }
}

pub fn mse(a: &PixelPlane, b: &PixelPlane) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::invalid(format!("plane sizes differ: {}x{} vs {}x{}", a.width(), a.height(), b.width(), b.height())));
    }
    let sum: f64 = a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.samples().len() as f64)
}

/// `10 log10(255² / MSE)`.
pub fn psnr(a: &PixelPlane, b: &PixelPlane) -> Result<Psnr> {
    let m = mse(a, b)?;
    Ok(if m == 0.0 { Psnr::Lossless } else { Psnr::Db(10.0 * (MAX_SAMPLE * MAX_SAMPLE / m).log10()) })
}

pub fn psnr_db(a: &PixelPlane, b: &PixelPlane) -> Result<f64> {
    Ok(psnr(a, b)?.db())
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RDPoint {
    /// kbps for video, bpp for images.
    pub bitrate: f64,
    pub psnr: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RDCurve {
    pub label: String,
    pub points: Vec<RDPoint>,
}

impl RDCurve {
    /// Sorts by bitrate and checks the curve is usable for the BD metric.
    pub fn new(label: impl Into<String>, mut points: Vec<RDPoint>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::invalid("an RD curve needs at least 4 points"));
        }
        if points.iter().any(|p| !(p.bitrate > 0.0) || !p.psnr.is_finite() || !p.bitrate.is_finite()) {
            return Err(Error::invalid("RD points need positive bitrate and finite PSNR"));
        }
        points.sort_by(|a, b| a.bitrate.total_cmp(&b.bitrate));
        if points.windows(2).any(|w| w[0].bitrate >= w[1].bitrate) {
            return Err(Error::invalid("RD curve bitrates must be strictly increasing"));
        }
        Ok(Self { label: label.into(), points })
    }

    fn psnr_range(&self) -> (f64, f64) {
        let lo = self.points.iter().map(|p| p.psnr).fold(f64::INFINITY, f64::min);
        let hi = self.points.iter().map(|p| p.psnr).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Least-squares cubic `log10(rate) = c0 + c1 t + c2 t² + c3 t³`, `t = psnr - shift`.
fn fit_cubic(curve: &RDCurve, shift: f64) -> Result<[f64; 4]> {
    let m = curve.points.len();
    let a = DMatrix::from_fn(m, 4, |i, j| (curve.points[i].psnr - shift).powi(j as i32));
    let b = DVector::from_iterator(m, curve.points.iter().map(|p| p.bitrate.log10()));
    let sol = a.svd(true, true).solve(&b, 1e-12).map_err(|e| Error::Domain(format!("cubic fit failed: {e}")))?;
    Ok([sol[0], sol[1], sol[2], sol[3]])
}

fn integral(c: &[f64; 4], lo: f64, hi: f64) -> f64 {
    let prim = |t: f64| c[0] * t + c[1] * t * t / 2.0 + c[2] * t.powi(3) / 3.0 + c[3] * t.powi(4) / 4.0;
    prim(hi) - prim(lo)
}

/// Bjontegaard delta rate in percent (negative = `test` needs less rate).
pub fn bd_rate(anchor: &RDCurve, test: &RDCurve) -> Result<f64> {
    let (alo, ahi) = anchor.psnr_range();
    let (tlo, thi) = test.psnr_range();
    let (lo, hi) = (alo.max(tlo), ahi.min(thi));
    if !(hi > lo) {
        return Err(Error::Domain("RD curves have no overlapping PSNR range".into()));
    }
    let ca = fit_cubic(anchor, lo)?;
    let ct = fit_cubic(test, lo)?;
    let avg = (integral(&ct, 0.0, hi - lo) - integral(&ca, 0.0, hi - lo)) / (hi - lo);
    Ok((10f64.powf(avg) - 1.0) * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(rates: &[f64], psnrs: &[f64]) -> RDCurve {
        RDCurve::new("c", rates.iter().zip(psnrs).map(|(&bitrate, &psnr)| RDPoint { bitrate, psnr }).collect()).unwrap()
    }

    #[test]
    fn psnr_closed_forms() {
        let a = PixelPlane::filled(8, 8, 10.0).unwrap();
        let b = PixelPlane::filled(8, 8, 11.0).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), Psnr::Lossless);
        assert!((psnr_db(&a, &b).unwrap() - 48.1308036086791).abs() < 1e-9);
        assert!(psnr(&a, &PixelPlane::filled(4, 8, 0.0).unwrap()).is_err());
    }

    #[test]
    fn bd_rate_identities() {
        let rates = [100.0, 180.0, 320.0, 600.0];
        let psnrs = [30.0, 33.0, 36.5, 39.0];
        let a = curve(&rates, &psnrs);
        assert!(bd_rate(&a, &a).unwrap().abs() < 1e-9);
        let half: Vec<f64> = rates.iter().map(|r| r / 2.0).collect();
        assert!((bd_rate(&a, &curve(&half, &psnrs)).unwrap() + 50.0).abs() < 1e-6);
        let far = curve(&rates, &[50.0, 51.0, 52.0, 53.0]);
        assert!(matches!(bd_rate(&a, &far), Err(Error::Domain(_))));
        assert!(RDCurve::new("x", vec![RDPoint { bitrate: 1.0, psnr: 30.0 }; 3]).is_err());
    }
}
