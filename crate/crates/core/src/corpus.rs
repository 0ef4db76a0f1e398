//! Seeded synthetic test scenes and a 32x32 logo.
//!
//! Three 512x512 scenes with different statistics stand in for the usual
//! photographic test set: dense fur-like texture, smooth coloured blobs, and
//! a shaded portrait-like composition. Every pixel is a pure function of the
//! seed, so goldens computed from them are stable across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pixmap::{RgbImage, WatermarkBitmap};

/// Side of the standard corpus images.
pub const CORPUS_SIDE: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scene {
    Fur,
    Blobs,
    Portrait,
}

impl Scene {
    pub const ALL: [Scene; 3] = [Scene::Fur, Scene::Blobs, Scene::Portrait];

    pub fn name(self) -> &'static str {
        match self {
            Scene::Fur => "fur",
            Scene::Blobs => "blobs",
            Scene::Portrait => "portrait",
        }
    }

    fn seed(self) -> u64 {
        match self {
            Scene::Fur => 0x5eed_0001,
            Scene::Blobs => 0x5eed_0002,
            Scene::Portrait => 0x5eed_0003,
        }
    }

    /// Renders the scene at `width` x `height`.
    pub fn render(self, width: usize, height: usize) -> RgbImage {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed());
        match self {
            Scene::Fur => fur(&mut rng, width, height),
            Scene::Blobs => blobs(&mut rng, width, height),
            Scene::Portrait => portrait(&mut rng, width, height),
        }
    }
}

/// The three standard 512x512 scenes with their names.
pub fn standard() -> Vec<(&'static str, RgbImage)> {
    Scene::ALL
        .iter()
        .map(|s| (s.name(), s.render(CORPUS_SIDE, CORPUS_SIDE)))
        .collect()
}

/// A 32x32 ring-and-bar logo: black ink on white.
pub fn logo() -> WatermarkBitmap {
    WatermarkBitmap::from_fn(|x, y| {
        let (dx, dy) = (x as f64 - 15.5, y as f64 - 15.5);
        let r = (dx * dx + dy * dy).sqrt();
        let ring = (9.0..13.5).contains(&r);
        let bar = (x as i64 - y as i64).abs() <= 1 && r < 9.0;
        let border = x == 0 || y == 0 || x == 31 || y == 31;
        !(ring || bar || border)
    })
}

/// Bilinear value noise over a random lattice with smoothstep weights.
struct ValueNoise {
    cell: f64,
    cols: usize,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, width: usize, height: usize, cell: f64) -> Self {
        let cols = (width as f64 / cell).ceil() as usize + 2;
        let rows = (height as f64 / cell).ceil() as usize + 2;
        let lattice = (0..cols * rows).map(|_| rng.gen::<f64>()).collect();
        Self { cell, cols, lattice }
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        let (fx, fy) = (x as f64 / self.cell, y as f64 / self.cell);
        let (ix, iy) = (fx as usize, fy as usize);
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (smooth(fx - ix as f64), smooth(fy - iy as f64));
        let v = |c: usize, r: usize| self.lattice[r * self.cols + c];
        let top = v(ix, iy) * (1.0 - tx) + v(ix + 1, iy) * tx;
        let bottom = v(ix, iy + 1) * (1.0 - tx) + v(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

fn channel(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn fur(rng: &mut ChaCha8Rng, width: usize, height: usize) -> RgbImage {
    let layers: Vec<[ValueNoise; 3]> = [48.0, 12.0, 3.0]
        .iter()
        .map(|&c| {
            [
                ValueNoise::new(rng, width, height, c),
                ValueNoise::new(rng, width, height, c),
                ValueNoise::new(rng, width, height, c),
            ]
        })
        .collect();
    let weights = [0.55, 0.3, 0.15];
    let mut grain = ChaCha8Rng::seed_from_u64(rng.gen());
    RgbImage::from_fn(width, height, |x, y| {
        let mut rgb = [0.0; 3];
        for (layer, w) in layers.iter().zip(weights) {
            for c in 0..3 {
                rgb[c] += w * layer[c].at(x, y);
            }
        }
        let g: f64 = grain.gen_range(-18.0..18.0);
        [
            channel(30.0 + 200.0 * rgb[0] + g),
            channel(20.0 + 190.0 * rgb[1] + g),
            channel(25.0 + 170.0 * rgb[2] + g * 0.5),
        ]
    })
}

fn blobs(rng: &mut ChaCha8Rng, width: usize, height: usize) -> RgbImage {
    struct Blob {
        cx: f64,
        cy: f64,
        radius: f64,
        color: [f64; 3],
    }
    let (w, h) = (width as f64, height as f64);
    let blobs: Vec<Blob> = (0..14)
        .map(|_| Blob {
            cx: rng.gen_range(0.0..w),
            cy: rng.gen_range(0.0..h),
            radius: rng.gen_range(0.08..0.3) * w.min(h),
            color: [rng.gen_range(40.0..250.0), rng.gen_range(20.0..230.0), rng.gen_range(10.0..200.0)],
        })
        .collect();
    let shade = ValueNoise::new(rng, width, height, 64.0);
    RgbImage::from_fn(width, height, |x, y| {
        let mut rgb = [60.0, 70.0, 40.0];
        for b in &blobs {
            let d2 = ((x as f64 - b.cx).powi(2) + (y as f64 - b.cy).powi(2)) / (b.radius * b.radius);
            let wgt = (-d2 * d2).exp();
            for c in 0..3 {
                rgb[c] = rgb[c] * (1.0 - wgt) + b.color[c] * wgt;
            }
        }
        let s = 0.85 + 0.3 * shade.at(x, y);
        rgb.map(|v| channel(v * s))
    })
}

fn portrait(rng: &mut ChaCha8Rng, width: usize, height: usize) -> RgbImage {
    let (w, h) = (width as f64, height as f64);
    let texture = ValueNoise::new(rng, width, height, 6.0);
    let hair = ValueNoise::new(rng, width, height, 20.0);
    let mut grain = ChaCha8Rng::seed_from_u64(rng.gen());
    RgbImage::from_fn(width, height, |x, y| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        // warm backdrop with a diagonal light falloff
        let light = 0.55 + 0.45 * (1.0 - (u * 0.6 + v * 0.4));
        let mut rgb = [200.0 * light, 120.0 * light, 110.0 * light];
        // face ellipse
        let (fx, fy) = ((u - 0.52) / 0.22, (v - 0.5) / 0.3);
        let face = fx * fx + fy * fy;
        if face < 1.0 {
            let shading = 1.0 - 0.35 * face;
            rgb = [235.0 * shading, 180.0 * shading, 150.0 * shading];
        }
        // hat brim band and hair texture on the left
        if (0.12..0.2).contains(&(v - 0.3 * u)) {
            rgb = [120.0, 60.0 + 80.0 * hair.at(x, y), 90.0];
        }
        if u < 0.3 && v > 0.2 {
            let t = hair.at(x, y);
            rgb = [90.0 + 100.0 * t, 60.0 + 70.0 * t, 40.0 + 50.0 * t];
        }
        let fine = 24.0 * (texture.at(x, y) - 0.5) + grain.gen_range(-4.0..4.0);
        rgb.map(|c| channel(c + fine))
    })
}
