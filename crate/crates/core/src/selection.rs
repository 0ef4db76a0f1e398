//! Block selection by log-average luminance.
//!
//! The Y plane is cut into 8x8 blocks (right/bottom remainders belong to no
//! block). A block is a candidate when its log-average luminance is at least
//! that of the whole image, remainder pixels included. Candidates are then
//! visited along a clockwise square spiral that starts at the centre block
//! and heads right first; the first 16 hits form the [`SelectionPlan`].

use std::fmt::Write as _;

use crate::colorspace::YcbcrImage;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Block side in pixels.
pub const BLOCK_SIZE: usize = 8;
/// Pixels per block.
pub const BLOCK_PIXELS: usize = BLOCK_SIZE * BLOCK_SIZE;
/// Blocks carried by a plan (one per 64 watermark bits).
pub const PLAN_BLOCKS: usize = 16;
/// Offset inside the logarithm that keeps black pixels finite.
pub const DEFAULT_DELTA: f64 = 1e-4;

/// Position of a block on the block grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockRef {
    pub col: usize,
    pub row: usize,
}

impl BlockRef {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }

    /// Top-left pixel of the block.
    pub const fn origin(self) -> (usize, usize) {
        (self.col * BLOCK_SIZE, self.row * BLOCK_SIZE)
    }

    /// Pixel coordinates of the block in row-major order.
    pub fn pixels(self) -> impl Iterator<Item = (usize, usize)> {
        let (x0, y0) = self.origin();
        (0..BLOCK_PIXELS).map(move |i| (x0 + i % BLOCK_SIZE, y0 + i / BLOCK_SIZE))
    }
}

/// `exp(mean(ln(delta + y)))` over the samples.
pub fn log_average_luminance<T: Real>(samples: impl IntoIterator<Item = T>, delta: T) -> Result<T> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    // Logs are accumulated relative to the first one, so any constant
    // region yields exactly delta + c regardless of its size.
    let mut samples = samples.into_iter();
    let anchor = match samples.next() {
        Some(y) => (delta + y).ln(),
        None => return Err(Error::EmptyRegion),
    };
    let mut sum = T::zero();
    let mut n = 1usize;
    for y in samples {
        sum += (delta + y).ln() - anchor;
        n += 1;
    }
    let avg = (anchor + sum / T::from_count(n)).exp();
    if !avg.is_finite() {
        return Err(Error::InvalidParameter("luminance samples must be non-negative".into()));
    }
    Ok(avg)
}

/// Number of whole blocks across and down.
pub fn partition_grid(width: usize, height: usize) -> Result<(usize, usize)> {
    if width < BLOCK_SIZE || height < BLOCK_SIZE {
        return Err(Error::ImageTooSmall { width, height });
    }
    Ok((width / BLOCK_SIZE, height / BLOCK_SIZE))
}

/// Log-average luminance of one block.
pub fn block_log_average<T: Real>(img: &YcbcrImage<T>, block: BlockRef, delta: T) -> Result<T> {
    log_average_luminance(block.pixels().map(|(x, y)| img.luma(x, y)), delta)
}

/// Whole-image log-average plus every block's log-average in row-major grid order.
struct BlockStats<T> {
    cols: usize,
    rows: usize,
    image_avg: T,
    block_avgs: Vec<T>,
}

impl<T: Real> BlockStats<T> {
    fn compute(img: &YcbcrImage<T>, delta: T) -> Result<Self> {
        let (cols, rows) = partition_grid(img.width(), img.height())?;
        let image_avg = log_average_luminance(img.y_plane().iter().copied(), delta)?;
        let mut block_avgs = Vec::with_capacity(cols * rows);
        for row in 0..rows {
            for col in 0..cols {
                block_avgs.push(block_log_average(img, BlockRef::new(col, row), delta)?);
            }
        }
        Ok(Self { cols, rows, image_avg, block_avgs })
    }

    fn is_candidate(&self, b: BlockRef) -> bool {
        self.block_avgs[b.row * self.cols + b.col] >= self.image_avg
    }
}

/// Every block whose log-average is at least the whole image's, row-major.
pub fn candidate_blocks<T: Real>(img: &YcbcrImage<T>, delta: T) -> Result<Vec<BlockRef>> {
    let stats = BlockStats::compute(img, delta)?;
    Ok((0..stats.rows)
        .flat_map(|row| (0..stats.cols).map(move |col| BlockRef::new(col, row)))
        .filter(|&b| stats.is_candidate(b))
        .collect())
}

/// Unbounded clockwise square spiral: right 1, down 1, left 2, up 2, right 3, ...
#[derive(Debug, Clone)]
struct SquareSpiral {
    pos: (i64, i64),
    dir: usize,
    run: i64,
    left_in_run: i64,
    runs_at_length: u8,
    started: bool,
}

const DIRECTIONS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

impl SquareSpiral {
    fn new(start: (i64, i64)) -> Self {
        Self { pos: start, dir: 0, run: 1, left_in_run: 1, runs_at_length: 0, started: false }
    }
}

impl Iterator for SquareSpiral {
    type Item = (i64, i64);

    fn next(&mut self) -> Option<(i64, i64)> {
        if !self.started {
            self.started = true;
            return Some(self.pos);
        }
        let (dx, dy) = DIRECTIONS[self.dir];
        self.pos = (self.pos.0 + dx, self.pos.1 + dy);
        self.left_in_run -= 1;
        if self.left_in_run == 0 {
            self.dir = (self.dir + 1) % 4;
            self.runs_at_length += 1;
            if self.runs_at_length == 2 {
                self.runs_at_length = 0;
                self.run += 1;
            }
            self.left_in_run = self.run;
        }
        Some(self.pos)
    }
}

/// All grid cells in centre-out spiral order. Cells the spiral passes
/// outside the grid are skipped.
pub fn spiral_order(grid_cols: usize, grid_rows: usize) -> Vec<BlockRef> {
    let total = grid_cols * grid_rows;
    let start = ((grid_cols / 2) as i64, (grid_rows / 2) as i64);
    let (w, h) = (grid_cols as i64, grid_rows as i64);
    SquareSpiral::new(start)
        .filter(|&(c, r)| (0..w).contains(&c) && (0..h).contains(&r))
        .take(total)
        .map(|(c, r)| BlockRef::new(c as usize, r as usize))
        .collect()
}

/// Ordered blocks that carry the watermark, plus the inputs that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionPlan<T> {
    blocks: Vec<BlockRef>,
    grid_cols: usize,
    grid_rows: usize,
    image_log_avg: T,
    delta: T,
}

/// Walks the spiral and keeps the first 16 candidate blocks.
pub fn select_blocks<T: Real>(img: &YcbcrImage<T>, delta: T) -> Result<SelectionPlan<T>> {
    let stats = BlockStats::compute(img, delta)?;
    let blocks: Vec<BlockRef> = spiral_order(stats.cols, stats.rows)
        .into_iter()
        .filter(|&b| stats.is_candidate(b))
        .take(PLAN_BLOCKS)
        .collect();
    if blocks.len() < PLAN_BLOCKS {
        return Err(Error::InsufficientCandidates { found: blocks.len(), needed: PLAN_BLOCKS });
    }
    Ok(SelectionPlan {
        blocks,
        grid_cols: stats.cols,
        grid_rows: stats.rows,
        image_log_avg: stats.image_avg,
        delta,
    })
}

impl<T: Real> SelectionPlan<T> {
    /// Builds a plan from parts, checking it has 16 distinct in-grid blocks.
    pub fn from_parts(
        blocks: Vec<BlockRef>,
        grid_cols: usize,
        grid_rows: usize,
        image_log_avg: T,
        delta: T,
    ) -> Result<Self> {
        if blocks.len() != PLAN_BLOCKS {
            return Err(Error::InvalidPlan(format!("expected {PLAN_BLOCKS} blocks, got {}", blocks.len())));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.col >= grid_cols || b.row >= grid_rows {
                return Err(Error::InvalidPlan(format!(
                    "block {},{} outside {grid_cols}x{grid_rows} grid",
                    b.col, b.row
                )));
            }
            if blocks[..i].contains(b) {
                return Err(Error::InvalidPlan(format!("block {},{} listed twice", b.col, b.row)));
            }
        }
        if !(delta > T::zero()) {
            return Err(Error::InvalidPlan(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { blocks, grid_cols, grid_rows, image_log_avg, delta })
    }

    pub fn blocks(&self) -> &[BlockRef] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        BLOCK_SIZE
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.grid_cols, self.grid_rows)
    }

    pub fn image_log_avg(&self) -> T {
        self.image_log_avg
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Checks that the plan's grid is the one a `width` x `height` image produces.
    pub fn check_fits(&self, width: usize, height: usize) -> Result<()> {
        let grid = partition_grid(width, height)?;
        if grid != self.grid() {
            return Err(Error::InvalidPlan(format!(
                "plan grid {}x{} does not match {}x{} image",
                self.grid_cols, self.grid_rows, width, height
            )));
        }
        Ok(())
    }

    /// Pixel carrying watermark bit `index` (row-major over the 32x32 mark):
    /// block `index / 64`, row-major position `index % 64` inside it.
    pub fn pixel_for_bit(&self, index: usize) -> (usize, usize) {
        let (x0, y0) = self.blocks[index / BLOCK_PIXELS].origin();
        let within = index % BLOCK_PIXELS;
        (x0 + within % BLOCK_SIZE, y0 + within / BLOCK_SIZE)
    }

    /// Canonical text form: `key=value` header lines, then one `col,row`
    /// line per block in plan order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "block_size={BLOCK_SIZE}").unwrap();
        writeln!(s, "grid={}x{}", self.grid_cols, self.grid_rows).unwrap();
        writeln!(s, "delta={}", self.delta).unwrap();
        writeln!(s, "image_log_avg={}", self.image_log_avg).unwrap();
        for b in &self.blocks {
            writeln!(s, "{},{}", b.col, b.row).unwrap();
        }
        s
    }

    /// Parses the form written by [`SelectionPlan::to_text`].
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidPlan(msg);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut field = |key: &str| -> Result<&str> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| bad(format!("expected {key}=..., found {line:?}")))
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad integer {s:?}")));
        let real = |s: &str| s.parse::<T>().map_err(|_| bad(format!("bad number {s:?}")));

        let block_size = num(field("block_size")?)?;
        if block_size != BLOCK_SIZE {
            return Err(bad(format!("block_size must be {BLOCK_SIZE}, got {block_size}")));
        }
        let (cols, rows) = field("grid")?
            .split_once('x')
            .ok_or_else(|| bad("grid must be COLSxROWS".into()))?;
        let (cols, rows) = (num(cols)?, num(rows)?);
        let delta = real(field("delta")?)?;
        let image_log_avg = real(field("image_log_avg")?)?;
        let blocks = lines
            .map(|l| {
                let (c, r) = l.split_once(',').ok_or_else(|| bad(format!("bad block line {l:?}")))?;
                Ok(BlockRef::new(num(c.trim())?, num(r.trim())?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(blocks, cols, rows, image_log_avg, delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn luma_image(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> YcbcrImage<f64> {
        let y = (0..width * height).map(|i| f(i % width, i / width)).collect();
        let n = width * height;
        YcbcrImage::from_planes(width, height, y, vec![0.0; n], vec![0.0; n])
    }

    #[test]
    fn constant_samples_give_delta_plus_value() {
        let v = log_average_luminance(std::iter::repeat(0.0f64).take(64), 1e-4).unwrap();
        assert!((v - 1e-4).abs() < 1e-15);
        let v = log_average_luminance(std::iter::repeat(37.0f64).take(10), 1e-4).unwrap();
        assert!((v - 37.0001).abs() < 1e-10);
    }

    #[test]
    fn two_level_log_average() {
        // sqrt(0.0001 * 255.0001)
        let expected = (1e-4f64 * 255.0001).sqrt();
        let v = log_average_luminance([0.0f64, 255.0], 1e-4).unwrap();
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 0.1597).abs() < 5e-5);
    }

    #[test]
    fn log_average_errors() {
        assert_eq!(log_average_luminance(Vec::<f64>::new(), 1e-4), Err(Error::EmptyRegion));
        assert!(matches!(log_average_luminance([1.0f64], 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(log_average_luminance([-5.0f64], 1e-4), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn grid_partition() {
        assert_eq!(partition_grid(512, 512).unwrap(), (64, 64));
        assert_eq!(partition_grid(100, 60).unwrap(), (12, 7));
        assert_eq!(partition_grid(7, 100), Err(Error::ImageTooSmall { width: 7, height: 100 }));
    }

    #[test]
    fn uniform_image_every_block_is_candidate() {
        let img = luma_image(40, 24, |_, _| 90.0);
        assert_eq!(candidate_blocks(&img, 1e-4).unwrap().len(), 15);
    }

    #[test]
    fn single_block_image() {
        let img = luma_image(8, 8, |x, y| (x * y) as f64);
        assert_eq!(candidate_blocks(&img, 1e-4).unwrap(), vec![BlockRef::new(0, 0)]);
    }

    #[test]
    fn bright_left_half_is_the_candidate_set() {
        let img = luma_image(32, 16, |x, _| if x < 16 { 200.0 } else { 50.0 });
        let got = candidate_blocks(&img, 1e-4).unwrap();
        let want: Vec<_> = (0..2).flat_map(|r| (0..2).map(move |c| BlockRef::new(c, r))).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn remainder_pixels_count_toward_image_average() {
        // 9x8 image: the only block is dark, the extra column is bright, so
        // the image average exceeds the block's.
        let img = luma_image(9, 8, |x, _| if x == 8 { 250.0 } else { 10.0 });
        assert!(candidate_blocks(&img, 1e-4).unwrap().is_empty());
    }

    #[test]
    fn spiral_small_cases() {
        assert_eq!(spiral_order(1, 1), vec![BlockRef::new(0, 0)]);
        let got: Vec<_> = spiral_order(3, 3).iter().map(|b| (b.col, b.row)).collect();
        assert_eq!(
            got,
            vec![(1, 1), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1), (0, 0), (1, 0), (2, 0)]
        );
    }

    #[test]
    fn spiral_on_strips() {
        let got: Vec<_> = spiral_order(4, 1).iter().map(|b| b.col).collect();
        assert_eq!(got, vec![2, 3, 1, 0]);
        let got: Vec<_> = spiral_order(1, 3).iter().map(|b| b.row).collect();
        assert_eq!(got, vec![1, 2, 0]);
    }

    #[test]
    fn uniform_image_selects_first_sixteen_of_spiral() {
        let img = luma_image(512, 512, |_, _| 128.0);
        let plan = select_blocks(&img, 1e-4).unwrap();
        assert_eq!(plan.blocks(), &spiral_order(64, 64)[..16]);
        assert_eq!(plan.blocks()[0], BlockRef::new(32, 32));
        assert_eq!(plan.grid(), (64, 64));
        assert_eq!(plan.block_size(), 8);
    }

    #[test]
    fn fifteen_bright_blocks_are_not_enough() {
        let bright: Vec<BlockRef> = (0..15).map(|i| BlockRef::new(i % 8, i / 8)).collect();
        let img = luma_image(64, 64, |x, y| {
            if bright.contains(&BlockRef::new(x / 8, y / 8)) {
                200.0
            } else {
                50.0
            }
        });
        // brute-force count of blocks at or above the image average
        let all: Vec<f64> = img.y_plane().to_vec();
        let image_avg = log_average_luminance(all.iter().copied(), 1e-4).unwrap();
        let count = (0..64)
            .filter(|&i| {
                let b = BlockRef::new(i % 8, i / 8);
                block_log_average(&img, b, 1e-4).unwrap() >= image_avg
            })
            .count();
        assert_eq!(count, 15);
        assert_eq!(
            select_blocks(&img, 1e-4),
            Err(Error::InsufficientCandidates { found: 15, needed: 16 })
        );
    }

    #[test]
    fn too_small_for_any_block() {
        let img = luma_image(7, 7, |_, _| 1.0);
        assert!(matches!(select_blocks(&img, 1e-4), Err(Error::ImageTooSmall { .. })));
    }

    #[test]
    fn bit_to_pixel_mapping() {
        let img = luma_image(512, 512, |_, _| 128.0);
        let plan = select_blocks(&img, 1e-4).unwrap();
        assert_eq!(plan.pixel_for_bit(0), (256, 256));
        assert_eq!(plan.pixel_for_bit(9), (257, 257));
        assert_eq!(plan.pixel_for_bit(63), (263, 263));
        // second spiral block is (33, 32)
        assert_eq!(plan.pixel_for_bit(64), (264, 256));
    }

    #[test]
    fn plan_text_round_trip() {
        let img = luma_image(128, 96, |x, y| ((x * 7 + y * 3) % 251) as f64 + 0.25);
        let plan = select_blocks(&img, 1e-4).unwrap();
        let text = plan.to_text();
        assert!(text.starts_with("block_size=8\ngrid=16x12\ndelta=0.0001\nimage_log_avg="));
        assert_eq!(text.lines().count(), 4 + 16);
        let back = SelectionPlan::<f64>::parse(&text).unwrap();
        assert_eq!(back, plan);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn plan_parse_rejects_bad_input() {
        let img = luma_image(64, 64, |_, _| 10.0);
        let text = select_blocks(&img, 1e-4).unwrap().to_text();
        let dup = text.replace("5,3\n", "4,4\n");
        assert!(matches!(SelectionPlan::<f64>::parse(&dup), Err(Error::InvalidPlan(_))));
        let short: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(matches!(SelectionPlan::<f64>::parse(&short), Err(Error::InvalidPlan(_))));
        let bad_size = text.replace("block_size=8", "block_size=16");
        assert!(matches!(SelectionPlan::<f64>::parse(&bad_size), Err(Error::InvalidPlan(_))));
        let out_of_grid = text.replace("grid=8x8", "grid=4x4");
        assert!(matches!(SelectionPlan::<f64>::parse(&out_of_grid), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn plan_fit_check() {
        let img = luma_image(64, 64, |_, _| 10.0);
        let plan = select_blocks(&img, 1e-4).unwrap();
        assert!(plan.check_fits(70, 71).is_ok());
        assert!(matches!(plan.check_fits(72, 64), Err(Error::InvalidPlan(_))));
    }
}
