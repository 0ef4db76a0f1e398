//! Image and watermark containers with bit-exact portable anymap I/O.
//!
//! Colour images travel as binary `P6` pixmaps with a maxval of 255.
//! Watermarks are 32x32 portable bitmaps (`P1` or `P4` on read, `P4` on
//! write). PBM stores 1 for black ink; that convention is inverted at this
//! boundary so a set bit inside [`WatermarkBitmap`] always means white (255).
//!
//! Header comments are accepted on read and never emitted on write, which
//! keeps encoder output canonical.

use rand::Rng;
use thiserror::Error;

/// Side length of the square watermark.
pub const WATERMARK_SIDE: usize = 32;
/// Number of watermark bits.
pub const WATERMARK_BITS: usize = WATERMARK_SIDE * WATERMARK_SIDE;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PixmapError {
    #[error("MalformedHeader: {0}")]
    MalformedHeader(String),
    #[error("TruncatedPayload: expected {expected} payload bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("TrailingData: expected {expected} payload bytes, found {found}")]
    TrailingData { expected: usize, found: usize },
    #[error("WrongDimensions: watermark must be 32x32, got {width}x{height}")]
    WrongDimensions { width: usize, height: usize },
}

type Result<T> = std::result::Result<T, PixmapError>;

fn malformed(msg: impl Into<String>) -> PixmapError {
    PixmapError::MalformedHeader(msg.into())
}

/// 8-bit interleaved RGB raster, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for RgbImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RgbImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl RgbImage {
    /// Wraps an interleaved RGB buffer. Fails if either dimension is zero or
    /// the buffer length is not `3 * width * height`.
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(malformed(format!("zero dimension {width}x{height}")));
        }
        let expected = payload_len(width, height)?;
        if data.len() < expected {
            return Err(PixmapError::TruncatedPayload { expected, found: data.len() });
        }
        if data.len() > expected {
            return Err(PixmapError::TrailingData { expected, found: data.len() });
        }
        Ok(Self { width, height, data })
    }

    /// Uniform image.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self::from_fn(width, height, |_, _| rgb)
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    ///
    /// Panics on a zero dimension.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self { width, height, data }
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

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Pixels in row-major order.
    pub fn pixels(&self) -> impl ExactSizeIterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    /// Interleaved channel bytes.
    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }
}

fn payload_len(width: usize, height: usize) -> Result<usize> {
    width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| malformed(format!("dimensions {width}x{height} overflow")))
}

/// 32x32 binary watermark, row-major. `true` is white (255), `false` black (0).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WatermarkBitmap {
    bits: [bool; WATERMARK_BITS],
}

impl std::fmt::Debug for WatermarkBitmap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "WatermarkBitmap(")?;
        for row in self.bits.chunks(WATERMARK_SIDE) {
            let line: String = row.iter().map(|&b| if b { '.' } else { '#' }).collect();
            writeln!(f, "  {line}")?;
        }
        write!(f, ")")
    }
}

impl Default for WatermarkBitmap {
    fn default() -> Self {
        Self::all_white()
    }
}

impl WatermarkBitmap {
    pub fn from_bits(bits: [bool; WATERMARK_BITS]) -> Self {
        Self { bits }
    }

    /// Builds a bitmap from `f(x, y)`; `true` means white.
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = [false; WATERMARK_BITS];
        for (i, b) in bits.iter_mut().enumerate() {
            *b = f(i % WATERMARK_SIDE, i / WATERMARK_SIDE);
        }
        Self { bits }
    }

    pub fn all_white() -> Self {
        Self { bits: [true; WATERMARK_BITS] }
    }

    pub fn all_black() -> Self {
        Self { bits: [false; WATERMARK_BITS] }
    }

    /// Uniformly random bitmap.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut bits = [false; WATERMARK_BITS];
        for b in bits.iter_mut() {
            *b = rng.gen();
        }
        Self { bits }
    }

    /// Bits in row-major order.
    pub fn bits(&self) -> &[bool; WATERMARK_BITS] {
        &self.bits
    }

    #[inline]
    pub fn bit(&self, x: usize, y: usize) -> bool {
        self.bits[y * WATERMARK_SIDE + x]
    }

    #[inline]
    pub fn set_bit(&mut self, x: usize, y: usize, white: bool) {
        self.bits[y * WATERMARK_SIDE + x] = white;
    }

    /// Pixel values in the 0/255 convention.
    pub fn values(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().map(|&b| if b { 255 } else { 0 })
    }

    pub fn white_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Every bit flipped.
    pub fn complement(&self) -> Self {
        let mut bits = self.bits;
        for b in bits.iter_mut() {
            *b = !*b;
        }
        Self { bits }
    }
}

/// Cursor over a PNM header: whitespace-separated tokens, `#` comments.
struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn magic(&mut self) -> Result<[u8; 2]> {
        match self.bytes {
            [b'P', d, ..] => {
                self.pos = 2;
                Ok([b'P', *d])
            }
            _ => Err(malformed("missing P magic number")),
        }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        // At least one separator is required between header fields.
        match self.bytes.get(self.pos) {
            Some(c) if c.is_ascii_whitespace() || *c == b'#' => {}
            Some(_) => return Err(malformed(format!("expected whitespace before {what}"))),
            None => return Err(malformed(format!("missing {what}"))),
        }
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(malformed(format!("{what} is not a decimal number")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(format!("{what} out of range")))
    }

    /// Consumes the single whitespace byte that separates a binary header
    /// from its payload and returns the payload.
    fn binary_payload(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(c) if c.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            Some(_) => Err(malformed("expected single whitespace before payload")),
            None => Err(malformed("header ends without payload separator")),
        }
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.pos..]
    }
}

fn check_exact_len(payload: &[u8], expected: usize) -> Result<()> {
    use std::cmp::Ordering::*;
    match payload.len().cmp(&expected) {
        Less => Err(PixmapError::TruncatedPayload { expected, found: payload.len() }),
        Greater => Err(PixmapError::TrailingData { expected, found: payload.len() }),
        Equal => Ok(()),
    }
}

/// Decodes a binary `P6` pixmap with maxval 255.
pub fn read_rgb_image(bytes: &[u8]) -> Result<RgbImage> {
    let mut cur = HeaderCursor::new(bytes);
    let magic = cur.magic()?;
    if &magic != b"P6" {
        return Err(malformed(format!(
            "expected P6, found {}{}",
            magic[0] as char, magic[1] as char
        )));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(malformed(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(malformed(format!("maxval must be 255, found {maxval}")));
    }
    let payload = cur.binary_payload()?;
    let expected = payload_len(width, height)?;
    check_exact_len(payload, expected)?;
    Ok(RgbImage { width, height, data: payload.to_vec() })
}

/// Canonical `P6` encoding: `P6\n<w> <h>\n255\n` followed by the payload.
pub fn write_rgb_image(img: &RgbImage) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.data.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.data);
    out
}

/// Decodes a 32x32 `P1` or `P4` bitmap, inverting PBM ink so that bit set
/// means white.
pub fn read_watermark(bytes: &[u8]) -> Result<WatermarkBitmap> {
    let mut cur = HeaderCursor::new(bytes);
    let magic = cur.magic()?;
    let binary = match &magic {
        b"P1" => false,
        b"P4" => true,
        _ => {
            return Err(malformed(format!(
                "expected P1 or P4, found {}{}",
                magic[0] as char, magic[1] as char
            )))
        }
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    if width != WATERMARK_SIDE || height != WATERMARK_SIDE {
        return Err(PixmapError::WrongDimensions { width, height });
    }

    let mut bits = [false; WATERMARK_BITS];
    if binary {
        let row_bytes = WATERMARK_SIDE.div_ceil(8);
        let payload = cur.binary_payload()?;
        check_exact_len(payload, row_bytes * WATERMARK_SIDE)?;
        for (i, b) in bits.iter_mut().enumerate() {
            let (x, y) = (i % WATERMARK_SIDE, i / WATERMARK_SIDE);
            let byte = payload[y * row_bytes + x / 8];
            let ink = (byte >> (7 - x % 8)) & 1 == 1;
            *b = !ink;
        }
    } else {
        // Plain PBM: digits may be packed or separated by whitespace/comments.
        let mut n = 0;
        cur.skip_space_and_comments();
        let mut rest = cur.rest().iter();
        while let Some(&c) = rest.next() {
            match c {
                b'0' | b'1' => {
                    if n == WATERMARK_BITS {
                        return Err(PixmapError::TrailingData { expected: WATERMARK_BITS, found: n + 1 });
                    }
                    bits[n] = c == b'0';
                    n += 1;
                }
                b'#' => {
                    for &c in rest.by_ref() {
                        if c == b'\n' || c == b'\r' {
                            break;
                        }
                    }
                }
                c if c.is_ascii_whitespace() => {}
                other => return Err(malformed(format!("unexpected byte 0x{other:02x} in P1 raster"))),
            }
        }
        if n < WATERMARK_BITS {
            return Err(PixmapError::TruncatedPayload { expected: WATERMARK_BITS, found: n });
        }
    }
    Ok(WatermarkBitmap { bits })
}

/// Canonical `P4` encoding of a watermark (`P4\n32 32\n` + 128 bytes).
pub fn write_watermark(w: &WatermarkBitmap) -> Vec<u8> {
    let row_bytes = WATERMARK_SIDE.div_ceil(8);
    let mut out = format!("P4\n{WATERMARK_SIDE} {WATERMARK_SIDE}\n").into_bytes();
    let start = out.len();
    out.resize(start + row_bytes * WATERMARK_SIDE, 0);
    for (i, &white) in w.bits.iter().enumerate() {
        if !white {
            let (x, y) = (i % WATERMARK_SIDE, i / WATERMARK_SIDE);
            out[start + y * row_bytes + x / 8] |= 0x80 >> (x % 8);
        }
    }
    out
}
