use thiserror::Error;

use crate::pixmap::PixmapError;

/// Errors raised by the watermarking pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Pixmap(#[from] PixmapError),

    #[error("ImageTooSmall: {width}x{height} image admits no 8x8 block")]
    ImageTooSmall { width: usize, height: usize },

    #[error("InsufficientCandidates: {found} candidate blocks, {needed} required")]
    InsufficientCandidates { found: usize, needed: usize },

    #[error("EmptyRegion: log-average luminance of zero samples")]
    EmptyRegion,

    #[error("DimensionMismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("RectOutOfBounds: rectangle {x},{y},{w},{h} outside {width}x{height} image")]
    RectOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    #[error("InvalidPlan: {0}")]
    InvalidPlan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
