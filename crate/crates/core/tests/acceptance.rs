//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use lumamark::attacks::{compress_attack, crop_attack, grayscale_attack, Rect};
use lumamark::codec::{embed, extract, plan_for};
use lumamark::colorspace::{
    rgb_to_ycbcr, roundtrip_error, rgb_to_ycbcr_pixel, ycbcr_to_rgb_pixel, ROUNDTRIP_MAX_ERROR,
};
use lumamark::metrics::{decide, psnr, psnr_planes, similarity};
use lumamark::selection::{spiral_order, BlockRef, BLOCK_SIZE};
use lumamark::{corpus, EmbedParamsF64, RgbImage, WatermarkBitmap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Fixture {
    images: Vec<(&'static str, RgbImage)>,
    logo: WatermarkBitmap,
    params: EmbedParamsF64,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_perfect_round_trip(fx: &Fixture) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    for (name, img) in &fx.images {
        for k in 0..100 {
            let wm = WatermarkBitmap::random(&mut rng);
            let marked = embed(img, &wm, &fx.params).map_err(|e| e.to_string())?;
            let got = extract(img, &marked, &fx.params).map_err(|e| e.to_string())?;
            let sigma = similarity(&wm, &got);
            ensure(sigma == 1.0, || format!("{name}, watermark #{k}: sigma={sigma}"))?;
        }
    }
    Ok("sigma=1.0 for 3 images x 100 random watermarks".into())
}

fn c2_imperceptibility(fx: &Fixture) -> Outcome {
    let mut report = Vec::new();
    for (name, img) in &fx.images {
        let marked = embed(img, &fx.logo, &fx.params).map_err(|e| e.to_string())?;
        let db: f64 = psnr(img, &marked).map_err(|e| e.to_string())?;
        ensure((62.0..=63.0).contains(&db), || format!("{name}: psnr={db:.3} outside [62, 63]"))?;
        report.push(format!("{name}={db:.3}"));
    }
    Ok(format!("psnr_db {}", report.join(" ")))
}

fn sigma_after(
    fx: &Fixture,
    img: &RgbImage,
    wm: &WatermarkBitmap,
    attack: impl Fn(&RgbImage) -> RgbImage,
) -> Result<f64, String> {
    let marked = embed(img, wm, &fx.params).map_err(|e| e.to_string())?;
    let attacked = attack(&marked);
    let got = extract(img, &attacked, &fx.params).map_err(|e| e.to_string())?;
    Ok(similarity(wm, &got))
}

fn marks(fx: &Fixture, seed: u64) -> Vec<WatermarkBitmap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![fx.logo.clone()];
    v.extend((0..4).map(|_| WatermarkBitmap::random(&mut rng)));
    v
}

fn c3_grayscale(fx: &Fixture) -> Outcome {
    for (name, img) in &fx.images {
        for wm in marks(fx, 0xC3) {
            let s = sigma_after(fx, img, &wm, grayscale_attack)?;
            ensure(s == 1.0, || format!("{name}: sigma={s} after grayscale"))?;
        }
    }
    Ok("sigma=1.0 after grayscale on every image (logo + 4 random marks)".into())
}

fn c4_crop(fx: &Fixture) -> Outcome {
    for (name, img) in &fx.images {
        let rect = Rect::centered_half(img.width(), img.height());
        for wm in marks(fx, 0xC4) {
            let s = sigma_after(fx, img, &wm, |m| crop_attack(m, rect).unwrap())?;
            ensure(s == 1.0, || format!("{name}: sigma={s} after crop {rect:?}"))?;
        }
    }
    Ok("sigma=1.0 after centred half crop on every image".into())
}

fn c5_compression(fx: &Fixture) -> Outcome {
    let qualities = [1.0, 0.9, 0.75, 0.5];
    let mut report = Vec::new();
    for (name, img) in &fx.images {
        let sigmas = qualities
            .iter()
            .map(|&q| sigma_after(fx, img, &fx.logo, |m| compress_attack::<f64>(m, q).unwrap()))
            .collect::<Result<Vec<f64>, String>>()?;
        let at_075 = sigmas[2];
        ensure(decide(at_075), || format!("{name}: sigma={at_075:.3} at quality 0.75 not > 0.5"))?;
        ensure(sigmas.windows(2).all(|w| w[1] <= w[0]), || {
            format!("{name}: sigma not non-increasing over {qualities:?}: {sigmas:?}")
        })?;
        report.push(format!(
            "{name}=[{}]",
            sigmas.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>().join(",")
        ));
    }
    Ok(format!("sigma over q={qualities:?}: {}", report.join(" ")))
}

/// Spiral built by the "turn clockwise whenever the next cell is free" rule
/// on a padded canvas, then clipped to the grid.
fn brute_force_spiral(cols: usize, rows: usize) -> Vec<BlockRef> {
    let radius = cols.max(rows) as i64 + 1;
    let side = (2 * radius + 1) as usize;
    let mut visited = vec![false; side * side];
    let idx = |x: i64, y: i64| ((y + radius) as usize) * side + (x + radius) as usize;
    let dirs = [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)];
    let (cx, cy) = ((cols / 2) as i64, (rows / 2) as i64);
    let (mut x, mut y, mut d) = (0i64, 0i64, 0usize);
    let mut out = Vec::new();
    loop {
        visited[idx(x, y)] = true;
        let (gx, gy) = (x + cx, y + cy);
        if gx >= 0 && gy >= 0 && (gx as usize) < cols && (gy as usize) < rows {
            out.push(BlockRef::new(gx as usize, gy as usize));
            if out.len() == cols * rows {
                return out;
            }
        }
        let (nx, ny) = (x + dirs[d].0, y + dirs[d].1);
        x = nx;
        y = ny;
        let turn = (d + 1) % 4;
        if !visited[idx(x + dirs[turn].0, y + dirs[turn].1)] {
            d = turn;
        }
    }
}

fn brute_force_candidate(img: &RgbImage, block: BlockRef, delta: f64) -> bool {
    let ycc = rgb_to_ycbcr::<f64>(img);
    let mean_log = |it: &mut dyn Iterator<Item = f64>| {
        let (s, n) = it.fold((0.0, 0usize), |(s, n), y| (s + (delta + y).ln(), n + 1));
        (s / n as f64).exp()
    };
    let image = mean_log(&mut ycc.y_plane().iter().copied());
    let (x0, y0) = (block.col * BLOCK_SIZE, block.row * BLOCK_SIZE);
    let mut px = (0..64).map(|i| ycc.luma(x0 + i % 8, y0 + i / 8));
    let blk = mean_log(&mut px);
    blk >= image * (1.0 - 1e-12)
}

fn c6_selection_oracle(fx: &Fixture) -> Outcome {
    let mut grids = 0;
    for cols in 1..=9 {
        for rows in 1..=9 {
            let got = spiral_order(cols, rows);
            let want = brute_force_spiral(cols, rows);
            ensure(got == want, || format!("spiral {cols}x{rows} differs from brute force"))?;
            let mut sorted = got.clone();
            sorted.sort();
            sorted.dedup();
            ensure(sorted.len() == cols * rows, || format!("spiral {cols}x{rows} not a permutation"))?;
            grids += 1;
        }
    }
    let mut images: Vec<(String, RgbImage)> =
        fx.images.iter().map(|(n, i)| (n.to_string(), i.clone())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
    for k in 0..4 {
        let (w, h) = (rng.gen_range(40..140), rng.gen_range(40..140));
        let img = RgbImage::from_fn(w, h, |_, _| [rng.gen(), rng.gen(), rng.gen()]);
        images.push((format!("random#{k} {w}x{h}"), img));
    }
    let mut checked = 0;
    for (name, img) in &images {
        let plan = plan_for::<f64>(img, fx.params.delta).map_err(|e| format!("{name}: {e}"))?;
        for &b in plan.blocks() {
            ensure(brute_force_candidate(img, b, fx.params.delta), || {
                format!("{name}: block {b:?} fails candidate predicate")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{grids} grids match brute-force spiral; {checked} planned blocks pass predicate"))
}

fn c7_null_hypothesis(fx: &Fixture) -> Outcome {
    let (_, a) = &fx.images[0];
    let (_, b) = &fx.images[1];
    let extracted = extract(a, b, &fx.params).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    let trials = 1000;
    let mean = (0..trials)
        .map(|_| similarity(&WatermarkBitmap::random(&mut rng), &extracted))
        .sum::<f64>()
        / trials as f64;
    ensure((mean - 0.5).abs() <= 0.005, || format!("mean sigma {mean:.5} outside 0.5 +/- 0.005"))?;
    ensure(!decide(0.5), || "decide(0.5) returned true".into())?;
    Ok(format!("mean sigma={mean:.5} over {trials} random marks; decide(0.5)=false"))
}

fn c8_colorspace(_: &Fixture) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let samples = 1_000_000;
    let mut worst = [0u8; 3];
    for _ in 0..samples {
        let p: [u8; 3] = [rng.gen(), rng.gen(), rng.gen()];
        let back = ycbcr_to_rgb_pixel(rgb_to_ycbcr_pixel::<f64>(p));
        for c in 0..3 {
            worst[c] = worst[c].max(p[c].abs_diff(back[c]));
        }
    }
    ensure((0..3).all(|c| worst[c] <= ROUNDTRIP_MAX_ERROR[c]), || {
        format!("round-trip error {worst:?} exceeds frozen {ROUNDTRIP_MAX_ERROR:?}")
    })?;
    let grays = RgbImage::from_fn(256, 1, |x, _| [x as u8; 3]);
    let gray_err = roundtrip_error::<f64>(&grays);
    ensure(gray_err == [0, 0, 0], || format!("gray round-trip error {gray_err:?}"))?;
    Ok(format!("max error {worst:?} over {samples} triples (E_max {ROUNDTRIP_MAX_ERROR:?}); gray exact"))
}

fn c9_metrics(fx: &Fixture) -> Outcome {
    let w = &fx.logo;
    ensure(similarity(w, w) == 1.0, || "similarity(w, w) != 1".into())?;
    ensure(similarity(w, &w.complement()) == 0.0, || "similarity(w, !w) != 0".into())?;
    let img = &fx.images[0].1;
    let p: f64 = psnr(img, img).map_err(|e| e.to_string())?;
    ensure(p.is_infinite() && p > 0.0, || format!("psnr of identical images = {p}"))?;
    let a = vec![120.0f64; 512 * 512];
    let mut b = a.clone();
    for (i, s) in b.iter_mut().enumerate().step_by(256).take(1024) {
        *s += if i % 512 == 0 { 3.0 } else { -3.0 };
    }
    let db = psnr_planes(&a, &b);
    ensure((db - 62.67).abs() <= 0.01, || format!("synthetic +/-3 fixture psnr={db:.4}"))?;
    Ok(format!("similarity 1.0/0.0; identical psnr=inf; 1024-pixel +/-3 fixture psnr={db:.3}"))
}

fn main() -> ExitCode {
    let fx = Fixture {
        images: corpus::standard(),
        logo: corpus::logo(),
        params: EmbedParamsF64::default(),
    };
    let criteria: [(&str, fn(&Fixture) -> Outcome); 9] = [
        ("C1 perfect round-trip", c1_perfect_round_trip),
        ("C2 imperceptibility", c2_imperceptibility),
        ("C3 grayscale robustness", c3_grayscale),
        ("C4 crop robustness", c4_crop),
        ("C5 compression robustness", c5_compression),
        ("C6 selection oracle equivalence", c6_selection_oracle),
        ("C7 null-hypothesis behaviour", c7_null_hypothesis),
        ("C8 colorspace regression", c8_colorspace),
        ("C9 metrics unit checks", c9_metrics),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let outcome = check(&fx);
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({ms} ms)"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail} ({ms} ms)");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
