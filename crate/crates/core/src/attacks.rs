//! Deterministic robustness attacks: border crop, grayscale, DCT quantization.
//!
//! All attacks keep the image dimensions so non-blind extraction against the
//! original stays well defined.

use crate::colorspace::{luma, quantize_channel, rgb_to_ycbcr, ycbcr_to_rgb};
use crate::dct::DctBasis;
use crate::error::{Error, Result};
use crate::pixmap::RgbImage;
use crate::scalar::Real;
use crate::selection::BLOCK_SIZE;

/// JPEG Annex K luminance quantization table, row-major.
pub const LUMA_QUANT_TABLE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Rectangle kept by a crop, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub const fn full(width: usize, height: usize) -> Self {
        Self::new(0, 0, width, height)
    }

    /// Centred half-width, half-height rectangle.
    pub const fn centered_half(width: usize, height: usize) -> Self {
        Self::new(width / 4, height / 4, width / 2, height / 2)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x..self.x + self.w).contains(&x) && (self.y..self.y + self.h).contains(&y)
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    fn check_within(&self, width: usize, height: usize) -> Result<()> {
        let fits = |o: usize, len: usize, lim: usize| o.checked_add(len).is_some_and(|end| end <= lim);
        if fits(self.x, self.w, width) && fits(self.y, self.h, height) {
            Ok(())
        } else {
            Err(Error::RectOutOfBounds {
                x: self.x,
                y: self.y,
                w: self.w,
                h: self.h,
                width,
                height,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackSpec {
    Crop(Rect),
    Grayscale,
    /// Compression factor in (0, 1]; 1 is the mildest.
    Compress { quality: f64 },
}

impl AttackSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AttackSpec::Compress { quality } => check_quality(quality),
            _ => Ok(()),
        }
    }

    /// Short name used in reports, e.g. `compress-0.75`.
    pub fn label(&self) -> String {
        match self {
            AttackSpec::Crop(_) => "crop".into(),
            AttackSpec::Grayscale => "grayscale".into(),
            AttackSpec::Compress { quality } => format!("compress-{quality}"),
        }
    }
}

fn check_quality(quality: f64) -> Result<()> {
    if quality > 0.0 && quality <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("quality must be in (0, 1], got {quality}")))
    }
}

/// Blacks out everything outside `keep`.
pub fn crop_attack(img: &RgbImage, keep: Rect) -> Result<RgbImage> {
    keep.check_within(img.width(), img.height())?;
    Ok(RgbImage::from_fn(img.width(), img.height(), |x, y| {
        if keep.contains(x, y) {
            img.pixel(x, y)
        } else {
            [0, 0, 0]
        }
    }))
}

/// Replaces each pixel by its rounded luminance on all three channels.
pub fn grayscale_attack(img: &RgbImage) -> RgbImage {
    RgbImage::from_fn(img.width(), img.height(), |x, y| {
        let g = quantize_channel(luma::<f64>(img.pixel(x, y)));
        [g, g, g]
    })
}

/// Table scale for a compression factor: `(1 - q) * 2 + 0.02`.
pub fn quality_scale(quality: f64) -> f64 {
    (1.0 - quality) * 2.0 + 0.02
}

/// Effective quantizer steps for a compression factor (never below 1).
pub fn quant_steps(quality: f64) -> [f64; 64] {
    let s = quality_scale(quality);
    LUMA_QUANT_TABLE.map(|q| (f64::from(q) * s).max(1.0))
}

/// JPEG-style degradation: blockwise DCT of every YCbCr plane, quantize
/// with the scaled luminance table, dequantize, inverse DCT, back to RGB.
/// Pixels outside whole 8x8 blocks pass through untouched.
pub fn compress_attack<T: Real>(img: &RgbImage, quality: f64) -> Result<RgbImage> {
    check_quality(quality)?;
    let steps = quant_steps(quality).map(T::lit);
    let basis = DctBasis::<T>::new();
    let mut ycc = rgb_to_ycbcr::<T>(img);
    let width = img.width();
    let (cols, rows) = (img.width() / BLOCK_SIZE, img.height() / BLOCK_SIZE);

    for plane in ycc.planes_mut() {
        for row in 0..rows {
            for col in 0..cols {
                let (x0, y0) = (col * BLOCK_SIZE, row * BLOCK_SIZE);
                let mut block = [T::zero(); 64];
                for (i, v) in block.iter_mut().enumerate() {
                    *v = plane[(y0 + i / BLOCK_SIZE) * width + x0 + i % BLOCK_SIZE];
                }
                let mut coeffs = basis.forward(&block);
                for (c, &q) in coeffs.iter_mut().zip(steps.iter()) {
                    *c = (*c / q).round() * q;
                }
                let restored = basis.inverse(&coeffs);
                for (i, v) in restored.iter().enumerate() {
                    plane[(y0 + i / BLOCK_SIZE) * width + x0 + i % BLOCK_SIZE] = *v;
                }
            }
        }
    }
    Ok(ycbcr_to_rgb(&ycc))
}

/// Runs the attack described by `spec`.
pub fn apply(img: &RgbImage, spec: &AttackSpec) -> Result<RgbImage> {
    match *spec {
        AttackSpec::Crop(rect) => crop_attack(img, rect),
        AttackSpec::Grayscale => Ok(grayscale_attack(img)),
        AttackSpec::Compress { quality } => compress_attack::<f64>(img, quality),
    }
}
