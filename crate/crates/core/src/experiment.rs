//! The robustness experiment grid: embed once, then attack and extract.

use std::fmt::Write as _;

use crate::attacks::{compress_attack, crop_attack, grayscale_attack, Rect};
use crate::codec::{embed, extract, EmbedParams};
use crate::error::Result;
use crate::metrics::{decide, format_db, psnr, similarity};
use crate::pixmap::{RgbImage, WatermarkBitmap};
use crate::scalar::Real;

/// Compression factor used by the report.
pub const REPORT_QUALITY: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow<T> {
    pub test: String,
    /// `None` where PSNR is not meaningful (grayscale).
    pub psnr_db: Option<T>,
    pub sigma: f64,
    pub matched: bool,
}

impl<T: Real> ReportRow<T> {
    fn new(test: impl Into<String>, psnr_db: Option<T>, sigma: f64) -> Self {
        Self { test: test.into(), psnr_db, sigma, matched: decide(sigma) }
    }
}

/// Runs no-change, centred-half crop, compression at 0.75 and grayscale.
/// PSNR compares the image handed to the extractor with the original.
pub fn run_report<T: Real>(
    original: &RgbImage,
    watermark: &WatermarkBitmap,
    params: &EmbedParams<T>,
) -> Result<Vec<ReportRow<T>>> {
    let marked = embed(original, watermark, params)?;
    let (w, h) = original.dimensions();
    let mut rows = Vec::with_capacity(4);

    let mut row = |name: String, attacked: &RgbImage, with_psnr: bool| -> Result<()> {
        let sigma = similarity(watermark, &extract(original, attacked, params)?);
        let db = if with_psnr { Some(psnr::<T>(original, attacked)?) } else { None };
        rows.push(ReportRow::new(name, db, sigma));
        Ok(())
    };

    row("no-change".into(), &marked, true)?;
    row("crop".into(), &crop_attack(&marked, Rect::centered_half(w, h))?, true)?;
    row(
        format!("compress-{REPORT_QUALITY}"),
        &compress_attack::<T>(&marked, REPORT_QUALITY)?,
        true,
    )?;
    row("grayscale".into(), &grayscale_attack(&marked), false)?;
    Ok(rows)
}

/// CSV with header `test,psnr_db,sigma,matched`; empty PSNR field where absent.
pub fn report_csv<T: Real>(rows: &[ReportRow<T>]) -> String {
    let mut s = String::from("test,psnr_db,sigma,matched\n");
    for r in rows {
        let db = r.psnr_db.map(format_db).unwrap_or_default();
        writeln!(s, "{},{},{:.3},{}", r.test, db, r.sigma, r.matched).unwrap();
    }
    s
}
