//! Raster primitives shared by the geometry and render modules: pixel grids,
//! exact Euclidean distance transforms and connected-component labelling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex_serde;

/// Affine map between pixel indices and the complex plane.
///
/// `origin` is the plane coordinate of the top-left corner of the raster.
/// Pixel `(col, row)` covers the square whose center is
/// `origin + (col + 0.5)·pixel_size − i·(row + 0.5)·pixel_size`, so rows grow
/// downwards while the imaginary axis points up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PixelGrid {
    pub width: usize,
    pub height: usize,
    #[serde(with = "complex_serde")]
    pub origin: Complex64,
    pub pixel_size: f64,
}

impl PixelGrid {
    /// Square grid of `resolution²` pixels covering `[c−h, c+h]²` with `h = half_side`.
    pub fn square(center: Complex64, half_side: f64, resolution: usize) -> Self {
        let pixel_size = 2.0 * half_side / resolution as f64;
        PixelGrid {
            width: resolution,
            height: resolution,
            origin: Complex64::new(center.re - half_side, center.im + half_side),
            pixel_size,
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn center(&self, col: usize, row: usize) -> Complex64 {
        Complex64::new(
            self.origin.re + (col as f64 + 0.5) * self.pixel_size,
            self.origin.im - (row as f64 + 0.5) * self.pixel_size,
        )
    }

    #[inline]
    pub fn center_of_index(&self, idx: usize) -> Complex64 {
        self.center(idx % self.width, idx / self.width)
    }

    /// Plane coordinate of the lattice corner `(x, y)`, `0 ≤ x ≤ width`, `0 ≤ y ≤ height`.
    #[inline]
    pub fn corner(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new(
            self.origin.re + x * self.pixel_size,
            self.origin.im - y * self.pixel_size,
        )
    }

    /// Pixel containing `z`, if any.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let x = (z.re - self.origin.re) / self.pixel_size;
        let y = (self.origin.im - z.im) / self.pixel_size;
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let (col, row) = (x.floor() as usize, y.floor() as usize);
        (col < self.width && row < self.height).then_some((col, row))
    }

    pub fn diagonal(&self) -> f64 {
        self.pixel_size * std::f64::consts::SQRT_2
    }

    pub fn translated(&self, by: Complex64) -> Self {
        PixelGrid {
            origin: self.origin + by,
            ..*self
        }
    }

    /// True when both grids index the same pixel centers (up to 1e-9 pixel).
    pub fn same_as(&self, other: &PixelGrid) -> bool {
        let tol = 1e-9 * self.pixel_size;
        self.width == other.width
            && self.height == other.height
            && (self.pixel_size - other.pixel_size).abs() <= tol
            && (self.origin - other.origin).norm() <= tol
    }

    /// Whether the raster window contains the closed disk of `radius` about 0.
    pub fn covers_disk(&self, radius: f64) -> bool {
        let right = self.origin.re + self.width as f64 * self.pixel_size;
        let bottom = self.origin.im - self.height as f64 * self.pixel_size;
        self.origin.re <= -radius && right >= radius && self.origin.im >= radius && bottom <= -radius
    }
}

const FAR: f64 = 1e20;

/// One-dimensional squared distance transform of a sampled function
/// (lower envelope of parabolas).
fn dt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let qf = q as f64;
        loop {
            let p = v[k];
            let pf = p as f64;
            let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * qf - 2.0 * pf);
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while z[k + 1] < qf {
            k += 1;
        }
        let d = qf - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Exact squared Euclidean distance (in pixel units, center to center) from
/// every pixel to the nearest pixel whose value equals `target`.
///
/// Pixels with no such pixel anywhere get a huge sentinel (`>= 1e20`).
pub fn squared_distance_to(bits: &[bool], width: usize, height: usize, target: bool) -> Vec<f64> {
    assert_eq!(bits.len(), width * height);
    let mut grid: Vec<f64> = bits
        .iter()
        .map(|&b| if b == target { 0.0 } else { FAR })
        .collect();

    let longest = width.max(height);
    let mut f = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let mut v = vec![0usize; longest];
    let mut z = vec![0.0; longest + 1];

    for col in 0..width {
        for row in 0..height {
            f[row] = grid[row * width + col];
        }
        dt_1d(&f[..height], &mut out[..height], &mut v, &mut z);
        for row in 0..height {
            grid[row * width + col] = out[row];
        }
    }
    for row in 0..height {
        let line = &mut grid[row * width..(row + 1) * width];
        f[..width].copy_from_slice(line);
        dt_1d(&f[..width], &mut out[..width], &mut v, &mut z);
        line.copy_from_slice(&out[..width]);
    }
    grid
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Labels the connected components of the `true` pixels.
///
/// Returns per-pixel labels (`0` = background, components numbered from `1`
/// in row-major order of their first pixel) and the component count.
pub fn label_components(
    bits: &[bool],
    width: usize,
    height: usize,
    connectivity: Connectivity,
) -> (Vec<u32>, usize) {
    let mut labels = vec![0u32; bits.len()];
    let mut count = 0u32;
    let mut stack = Vec::new();
    const N4: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    const N8: [(isize, isize); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];
    let offsets: &[(isize, isize)] = match connectivity {
        Connectivity::Four => &N4,
        Connectivity::Eight => &N8,
    };
    for start in 0..bits.len() {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        stack.push(start);
        while let Some(p) = stack.pop() {
            let (c, r) = ((p % width) as isize, (p / width) as isize);
            for &(dc, dr) in offsets {
                let (nc, nr) = (c + dc, r + dr);
                if nc < 0 || nr < 0 || nc >= width as isize || nr >= height as isize {
                    continue;
                }
                let q = nr as usize * width + nc as usize;
                if bits[q] && labels[q] == 0 {
                    labels[q] = count;
                    stack.push(q);
                }
            }
        }
    }
    (labels, count as usize)
}

/// Number of 4-connected components of the `false` pixels that do not reach
/// the raster border. The plane outside the raster counts as complement, so
/// the complement is connected exactly when this is zero.
pub fn enclosed_complement_components(bits: &[bool], width: usize, height: usize) -> usize {
    let complement: Vec<bool> = bits.iter().map(|b| !b).collect();
    let (labels, count) = label_components(&complement, width, height, Connectivity::Four);
    let mut touches = vec![false; count + 1];
    for col in 0..width {
        touches[labels[col] as usize] = true;
        touches[labels[(height - 1) * width + col] as usize] = true;
    }
    for row in 0..height {
        touches[labels[row * width] as usize] = true;
        touches[labels[row * width + width - 1] as usize] = true;
    }
    (1..=count).filter(|&l| !touches[l]).count()
}

/// `true` pixels having at least one 4-neighbour that is `false` or off-raster.
pub fn boundary_pixels(bits: &[bool], width: usize, height: usize) -> Vec<bool> {
    let mut out = vec![false; bits.len()];
    for row in 0..height {
        for col in 0..width {
            let idx = row * width + col;
            if !bits[idx] {
                continue;
            }
            let edge = col == 0
                || row == 0
                || col + 1 == width
                || row + 1 == height
                || !bits[idx - 1]
                || !bits[idx + 1]
                || !bits[idx - width]
                || !bits[idx + width];
            out[idx] = edge;
        }
    }
    out
}
