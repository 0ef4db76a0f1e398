//! Spatial-domain watermarking of colour images in the luminance channel.
//!
//! A 32x32 monochrome mark is spread over 16 8x8 blocks chosen by
//! log-average luminance, walking a spiral out from the image centre. Each
//! mark pixel nudges one image pixel's Y by `+alpha` (white) or `-alpha`
//! (black); extraction compares against the original image.
//!
//! The real-valued stages are generic over [`Real`] (`f32` or `f64`); the
//! `*F64`/`*F32` aliases below pin the common choices.
//!
//! ```
//! use lumamark::{codec, corpus, metrics, EmbedParamsF64};
//!
//! let img = corpus::Scene::Blobs.render(128, 128);
//! let mark = corpus::logo();
//! let params = EmbedParamsF64::default();
//! let marked = codec::embed(&img, &mark, &params).unwrap();
//! let back = codec::extract(&img, &marked, &params).unwrap();
//! assert_eq!(metrics::similarity(&mark, &back), 1.0);
//! ```

pub mod attacks;
pub mod codec;
pub mod colorspace;
pub mod corpus;
mod dct;
mod error;
pub mod experiment;
pub mod metrics;
pub mod pixmap;
mod scalar;
pub mod selection;

pub use attacks::{AttackSpec, Rect};
pub use codec::EmbedParams;
pub use colorspace::YcbcrImage;
pub use error::{Error, Result};
pub use experiment::ReportRow;
pub use metrics::MetricsReport;
pub use pixmap::{PixmapError, RgbImage, WatermarkBitmap};
pub use scalar::Real;
pub use selection::{BlockRef, SelectionPlan};

pub type YcbcrImageF64 = YcbcrImage<f64>;
pub type YcbcrImageF32 = YcbcrImage<f32>;
pub type SelectionPlanF64 = SelectionPlan<f64>;
pub type SelectionPlanF32 = SelectionPlan<f32>;
pub type EmbedParamsF64 = EmbedParams<f64>;
pub type EmbedParamsF32 = EmbedParams<f32>;
pub type MetricsReportF64 = MetricsReport<f64>;
pub type MetricsReportF32 = MetricsReport<f32>;
pub type ReportRowF64 = ReportRow<f64>;
