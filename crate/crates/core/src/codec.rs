//! Watermark embedding and non-blind extraction.
//!
//! Bit `i` of the 32x32 watermark (row-major) lives in plan block `i / 64`
//! at row-major position `i % 64` inside that block. A white bit adds
//! `alpha` to that pixel's luminance, a black bit subtracts it. Extraction
//! recomputes the plan from the original and reads the sign of
//! `Y_marked - Y_original`: zero or positive is white.

use crate::colorspace::{luma, rgb_to_ycbcr, ycbcr_to_rgb, YcbcrImage};
use crate::error::{Error, Result};
use crate::pixmap::{RgbImage, WatermarkBitmap, WATERMARK_BITS};
use crate::scalar::Real;
use crate::selection::{select_blocks, SelectionPlan, DEFAULT_DELTA};

/// Default luminance offset.
pub const DEFAULT_ALPHA: u32 = 3;
/// Below this, reconstruction rounding can flip extracted bits.
pub const MIN_RELIABLE_ALPHA: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedParams<T> {
    pub alpha: u32,
    pub delta: T,
}

impl<T: Real> Default for EmbedParams<T> {
    fn default() -> Self {
        Self { alpha: DEFAULT_ALPHA, delta: T::lit(DEFAULT_DELTA) }
    }
}

impl<T: Real> EmbedParams<T> {
    pub fn with_alpha(alpha: u32) -> Self {
        Self { alpha, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha == 0 {
            return Err(Error::InvalidParameter("alpha must be at least 1".into()));
        }
        if !(self.delta > T::zero()) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }
}

/// Selection plan computed from an image's own luminance.
pub fn plan_for<T: Real>(img: &RgbImage, delta: T) -> Result<SelectionPlan<T>> {
    select_blocks(&rgb_to_ycbcr::<T>(img), delta)
}

/// Applies the +/-alpha rule to the Y plane in place.
pub fn embed_luma<T: Real>(
    ycc: &mut YcbcrImage<T>,
    watermark: &WatermarkBitmap,
    plan: &SelectionPlan<T>,
    alpha: u32,
) -> Result<()> {
    plan.check_fits(ycc.width(), ycc.height())?;
    let width = ycc.width();
    let alpha = T::from_u32(alpha).expect("alpha representable");
    let y = ycc.y_plane_mut();
    for (i, &white) in watermark.bits().iter().enumerate() {
        let (px, py) = plan.pixel_for_bit(i);
        let s = &mut y[py * width + px];
        if white {
            *s += alpha;
        } else {
            *s -= alpha;
        }
    }
    Ok(())
}

/// Embeds with an explicit plan.
pub fn embed_with_plan<T: Real>(
    original: &RgbImage,
    watermark: &WatermarkBitmap,
    plan: &SelectionPlan<T>,
    alpha: u32,
) -> Result<RgbImage> {
    let mut ycc = rgb_to_ycbcr::<T>(original);
    embed_luma(&mut ycc, watermark, plan, alpha)?;
    Ok(ycbcr_to_rgb(&ycc))
}

/// Embeds `watermark` into `original`, selecting blocks from the original's luminance.
pub fn embed<T: Real>(
    original: &RgbImage,
    watermark: &WatermarkBitmap,
    params: &EmbedParams<T>,
) -> Result<RgbImage> {
    params.validate()?;
    let mut ycc = rgb_to_ycbcr::<T>(original);
    let plan = select_blocks(&ycc, params.delta)?;
    embed_luma(&mut ycc, watermark, &plan, params.alpha)?;
    Ok(ycbcr_to_rgb(&ycc))
}

fn check_same_size(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::DimensionMismatch {
            left_width: a.width(),
            left_height: a.height(),
            right_width: b.width(),
            right_height: b.height(),
        });
    }
    Ok(())
}

/// Extracts with an explicit plan.
pub fn extract_with_plan<T: Real>(
    original: &RgbImage,
    watermarked: &RgbImage,
    plan: &SelectionPlan<T>,
) -> Result<WatermarkBitmap> {
    check_same_size(original, watermarked)?;
    plan.check_fits(original.width(), original.height())?;
    let mut bits = [false; WATERMARK_BITS];
    for (i, b) in bits.iter_mut().enumerate() {
        let (x, y) = plan.pixel_for_bit(i);
        let diff = luma::<T>(watermarked.pixel(x, y)) - luma::<T>(original.pixel(x, y));
        *b = diff >= T::zero();
    }
    Ok(WatermarkBitmap::from_bits(bits))
}

/// Non-blind extraction: the plan is recomputed from `original`.
pub fn extract<T: Real>(
    original: &RgbImage,
    watermarked: &RgbImage,
    params: &EmbedParams<T>,
) -> Result<WatermarkBitmap> {
    params.validate()?;
    check_same_size(original, watermarked)?;
    let plan = plan_for(original, params.delta)?;
    extract_with_plan(original, watermarked, &plan)
}
