//! Orthonormal 8x8 type-II DCT and its inverse.

use crate::scalar::Real;

pub const N: usize = 8;

/// Row `k` holds the `k`-th orthonormal cosine basis vector.
pub struct DctBasis<T> {
    c: [[T; N]; N],
}

impl<T: Real> DctBasis<T> {
    pub fn new() -> Self {
        let mut c = [[T::zero(); N]; N];
        let n = N as f64;
        for (k, row) in c.iter_mut().enumerate() {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            for (i, v) in row.iter_mut().enumerate() {
                let angle = std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * n);
                *v = T::lit(scale * angle.cos());
            }
        }
        Self { c }
    }

    /// `C * X * C^T` on a row-major block.
    pub fn forward(&self, block: &[T; N * N]) -> [T; N * N] {
        let mut tmp = [T::zero(); N * N];
        let mut out = [T::zero(); N * N];
        // rows: tmp[y][k] = sum_x X[y][x] C[k][x]
        for y in 0..N {
            for k in 0..N {
                tmp[y * N + k] = (0..N).fold(T::zero(), |s, x| s + block[y * N + x] * self.c[k][x]);
            }
        }
        // columns: out[l][k] = sum_y C[l][y] tmp[y][k]
        for l in 0..N {
            for k in 0..N {
                out[l * N + k] = (0..N).fold(T::zero(), |s, y| s + self.c[l][y] * tmp[y * N + k]);
            }
        }
        out
    }

    /// `C^T * F * C` on a row-major coefficient block.
    pub fn inverse(&self, coeffs: &[T; N * N]) -> [T; N * N] {
        let mut tmp = [T::zero(); N * N];
        let mut out = [T::zero(); N * N];
        for l in 0..N {
            for x in 0..N {
                tmp[l * N + x] = (0..N).fold(T::zero(), |s, k| s + coeffs[l * N + k] * self.c[k][x]);
            }
        }
        for y in 0..N {
            for x in 0..N {
                out[y * N + x] = (0..N).fold(T::zero(), |s, l| s + self.c[l][y] * tmp[l * N + x]);
            }
        }
        out
    }
}
