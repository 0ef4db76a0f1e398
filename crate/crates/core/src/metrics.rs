//! Imperceptibility (PSNR on luminance) and extraction fidelity (similarity).

use crate::colorspace::luma;
use crate::error::{Error, Result};
use crate::pixmap::{RgbImage, WatermarkBitmap, WATERMARK_BITS};
use crate::scalar::Real;

/// Similarity above which an extracted mark counts as a match.
pub const MATCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport<T> {
    /// `+inf` when the images are identical.
    pub psnr_db: T,
    pub sigma: f64,
    pub matched: bool,
}

impl<T: Real> MetricsReport<T> {
    pub fn new(psnr_db: T, sigma: f64) -> Self {
        Self { psnr_db, sigma, matched: decide(sigma) }
    }
}

/// PSNR between two equal-length luminance planes; `+inf` for zero error.
pub fn psnr_planes<T: Real>(reference: &[T], test: &[T]) -> T {
    assert_eq!(reference.len(), test.len(), "plane lengths differ");
    let sse = reference
        .iter()
        .zip(test)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
    if sse == T::zero() {
        return T::infinity();
    }
    let peak = T::lit(255.0 * 255.0);
    T::lit(10.0) * (peak * T::from_count(reference.len()) / sse).log10()
}

/// PSNR in dB over the luminance planes of two images.
pub fn psnr<T: Real>(reference: &RgbImage, test: &RgbImage) -> Result<T> {
    if reference.dimensions() != test.dimensions() {
        return Err(Error::DimensionMismatch {
            left_width: reference.width(),
            left_height: reference.height(),
            right_width: test.width(),
            right_height: test.height(),
        });
    }
    let a: Vec<T> = reference.pixels().map(luma).collect();
    let b: Vec<T> = test.pixels().map(luma).collect();
    Ok(psnr_planes(&a, &b))
}

/// Fraction of the 1024 positions where the two bitmaps agree.
pub fn similarity(reference: &WatermarkBitmap, extracted: &WatermarkBitmap) -> f64 {
    let agree = reference
        .bits()
        .iter()
        .zip(extracted.bits())
        .filter(|(a, b)| a == b)
        .count();
    agree as f64 / WATERMARK_BITS as f64
}

/// Match verdict: strictly above one half.
pub fn decide(sigma: f64) -> bool {
    sigma > MATCH_THRESHOLD
}

/// Fixed three-decimal rendering, `inf` for the infinite sentinel.
pub fn format_db<T: Real>(db: T) -> String {
    if db.is_infinite() && db > T::zero() {
        "inf".to_string()
    } else {
        format!("{:.3}", db.to_f64().unwrap_or(f64::NAN))
    }
}
