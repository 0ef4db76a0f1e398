//! RGB <-> YCbCr conversion.
//!
//! The forward matrix is the YIQ-like one this scheme is defined with; only
//! the luminance row matters to the watermark, the chroma rows just have to
//! make the pair invert on 8-bit input. With these coefficients every one of
//! the 2^24 RGB triples survives `rgb -> ycbcr -> rgb` unchanged.

use crate::pixmap::RgbImage;
use crate::scalar::Real;

/// Forward coefficients, rows Y, Cb, Cr over columns R, G, B.
pub const FORWARD: [[f64; 3]; 3] = [
    [0.299, 0.587, 0.114],
    [0.596, -0.275, -0.321],
    [0.212, -0.523, 0.311],
];

/// Inverse coefficients, rows R, G, B over columns Y, Cb, Cr.
pub const INVERSE: [[f64; 3]; 3] = [
    [1.0, 0.956, 0.620],
    [1.0, -0.272, -0.647],
    [1.0, -1.108, 1.705],
];

/// Largest per-channel `|rgb - ycbcr_to_rgb(rgb_to_ycbcr(rgb))|` over the
/// whole 8-bit colour cube, measured exhaustively in `f64`.
pub const ROUNDTRIP_MAX_ERROR: [u8; 3] = [0, 0, 0];

/// Real-valued Y/Cb/Cr planes, row-major. Values are not clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct YcbcrImage<T> {
    width: usize,
    height: usize,
    y: Vec<T>,
    cb: Vec<T>,
    cr: Vec<T>,
}

impl<T: Real> YcbcrImage<T> {
    /// Assembles planes; panics if any plane has the wrong length.
    pub fn from_planes(width: usize, height: usize, y: Vec<T>, cb: Vec<T>, cr: Vec<T>) -> Self {
        let n = width * height;
        assert!(
            y.len() == n && cb.len() == n && cr.len() == n,
            "plane length mismatch for {width}x{height}"
        );
        Self { width, height, y, cb, cr }
    }

    /// Uniform image with the given sample.
    pub fn filled(width: usize, height: usize, sample: [T; 3]) -> Self {
        let n = width * height;
        Self::from_planes(width, height, vec![sample[0]; n], vec![sample[1]; n], vec![sample[2]; n])
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn y_plane(&self) -> &[T] {
        &self.y
    }

    pub fn cb_plane(&self) -> &[T] {
        &self.cb
    }

    pub fn cr_plane(&self) -> &[T] {
        &self.cr
    }

    pub fn y_plane_mut(&mut self) -> &mut [T] {
        &mut self.y
    }

    /// Mutable Y, Cb and Cr planes.
    pub fn planes_mut(&mut self) -> [&mut [T]; 3] {
        [&mut self.y, &mut self.cb, &mut self.cr]
    }

    #[inline]
    pub fn luma(&self, x: usize, y: usize) -> T {
        self.y[y * self.width + x]
    }

    #[inline]
    pub fn sample(&self, x: usize, y: usize) -> [T; 3] {
        let i = y * self.width + x;
        [self.y[i], self.cb[i], self.cr[i]]
    }
}

#[inline]
fn mat<T: Real>(m: &[[f64; 3]; 3]) -> [[T; 3]; 3] {
    m.map(|row| row.map(T::lit))
}

#[inline]
fn apply<T: Real>(m: &[[T; 3]; 3], v: [T; 3]) -> [T; 3] {
    m.map(|row| row[0] * v[0] + row[1] * v[1] + row[2] * v[2])
}

/// Rounds half away from zero and clamps into a channel value.
#[inline]
pub fn quantize_channel<T: Real>(v: T) -> u8 {
    let r = v.round();
    if r <= T::zero() {
        0
    } else if r >= T::lit(255.0) {
        255
    } else {
        r.to_u8().expect("value within channel range")
    }
}

/// Luminance of one RGB triple.
#[inline]
pub fn luma<T: Real>(rgb: [u8; 3]) -> T {
    let [r, g, b] = rgb.map(T::from_channel);
    T::lit(FORWARD[0][0]) * r + T::lit(FORWARD[0][1]) * g + T::lit(FORWARD[0][2]) * b
}

#[inline]
pub fn rgb_to_ycbcr_pixel<T: Real>(rgb: [u8; 3]) -> [T; 3] {
    apply(&mat::<T>(&FORWARD), rgb.map(T::from_channel))
}

#[inline]
pub fn ycbcr_to_rgb_pixel<T: Real>(ycc: [T; 3]) -> [u8; 3] {
    apply(&mat::<T>(&INVERSE), ycc).map(quantize_channel)
}

/// Converts an RGB image to full-precision YCbCr planes.
pub fn rgb_to_ycbcr<T: Real>(img: &RgbImage) -> YcbcrImage<T> {
    let m = mat::<T>(&FORWARD);
    let n = img.pixel_count();
    let (mut y, mut cb, mut cr) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for p in img.pixels() {
        let [a, b, c] = apply(&m, p.map(T::from_channel));
        y.push(a);
        cb.push(b);
        cr.push(c);
    }
    YcbcrImage { width: img.width(), height: img.height(), y, cb, cr }
}

/// Converts YCbCr planes back to 8-bit RGB, rounding half away from zero and
/// clamping each channel to [0, 255].
pub fn ycbcr_to_rgb<T: Real>(img: &YcbcrImage<T>) -> RgbImage {
    let m = mat::<T>(&INVERSE);
    RgbImage::from_fn(img.width, img.height, |x, y| {
        apply(&m, img.sample(x, y)).map(quantize_channel)
    })
}

/// Per-channel maximum absolute error of a full conversion round trip.
pub fn roundtrip_error<T: Real>(img: &RgbImage) -> [u8; 3] {
    let back = ycbcr_to_rgb(&rgb_to_ycbcr::<T>(img));
    let mut err = [0u8; 3];
    for (a, b) in img.pixels().zip(back.pixels()) {
        for c in 0..3 {
            err[c] = err[c].max(a[c].abs_diff(b[c]));
        }
    }
    err
}
