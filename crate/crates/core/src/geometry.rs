//! Shape ingestion and regularization, boundary extraction, centering and
//! Hausdorff distances on rasterized compact sets.
//!
//! A [`ShapeMask`] is a membership bitmap together with a [`PixelGrid`] that
//! places it in the complex plane. Set pixels are treated as 8-connected and
//! the complement as 4-connected.

use std::collections::{BTreeSet, HashMap};
use std::io::Cursor;

use image::{GrayImage, ImageFormat, Luma};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex_serde;
use crate::raster::{self, PixelGrid};

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("could not decode image: {0}")]
    Decode(String),
    #[error("could not encode image: {0}")]
    Encode(String),
    #[error("empty set: no pixel is darker than the threshold")]
    EmptySet,
    #[error("set touches the raster border")]
    TouchesBorder,
    #[error("invalid pixel size {0}")]
    InvalidPixelSize(f64),
    #[error("bitmap has {got} pixels but the grid needs {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("epsilon {epsilon} is below the minimum {minimum} resolvable on this raster")]
    EpsilonTooSmall { epsilon: f64, minimum: f64 },
    #[error("regularized set is empty")]
    EmptyResult,
    #[error("regularized set still encloses {0} complement region(s); the complement of the interior is not connected at this epsilon")]
    EnclosedComplement(usize),
    #[error("target spacing {target} is below one pixel ({pixel})")]
    SpacingTooSmall { target: f64, pixel: f64 },
    #[error("mask has no interior pixel; thicken or regularize the shape first")]
    NoInteriorPixel,
    #[error("masks do not share a common plane window")]
    WindowMismatch,
}

/// Square plane window a raster is fitted into.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWindow {
    #[serde(with = "complex_serde")]
    pub center: Complex64,
    pub side: f64,
}

impl Default for PlaneWindow {
    fn default() -> Self {
        PlaneWindow {
            center: Complex64::new(0.0, 0.0),
            side: 4.0,
        }
    }
}

impl PlaneWindow {
    /// Grid for a `width × height` raster: the longer side spans the window.
    pub fn grid_for(&self, width: usize, height: usize) -> PixelGrid {
        let pixel_size = self.side / width.max(height) as f64;
        PixelGrid {
            width,
            height,
            origin: Complex64::new(
                self.center.re - 0.5 * width as f64 * pixel_size,
                self.center.im + 0.5 * height as f64 * pixel_size,
            ),
            pixel_size,
        }
    }
}

/// Rasterized compact set `E`.
///
/// `center_offset` is the translation already applied to the plane
/// coordinates relative to the source image frame (zero until
/// [`center_interior`] runs).
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeMask {
    grid: PixelGrid,
    center_offset: Complex64,
    bits: Vec<bool>,
}

impl ShapeMask {
    /// Validating constructor: nonempty, positive pixel size, no set pixel on
    /// the raster border.
    pub fn new(grid: PixelGrid, bits: Vec<bool>, center_offset: Complex64) -> Result<Self, GeometryError> {
        if !(grid.pixel_size > 0.0 && grid.pixel_size.is_finite()) {
            return Err(GeometryError::InvalidPixelSize(grid.pixel_size));
        }
        if bits.len() != grid.len() {
            return Err(GeometryError::SizeMismatch {
                got: bits.len(),
                expected: grid.len(),
            });
        }
        if !bits.iter().any(|&b| b) {
            return Err(GeometryError::EmptySet);
        }
        let (w, h) = (grid.width, grid.height);
        let on_border = (0..w).any(|c| bits[c] || bits[(h - 1) * w + c])
            || (0..h).any(|r| bits[r * w] || bits[r * w + w - 1]);
        if on_border {
            return Err(GeometryError::TouchesBorder);
        }
        Ok(ShapeMask {
            grid,
            center_offset,
            bits,
        })
    }

    /// Rasterizes `inside` at every pixel center.
    pub fn from_predicate(grid: PixelGrid, inside: impl Fn(Complex64) -> bool) -> Result<Self, GeometryError> {
        let bits = (0..grid.len()).map(|i| inside(grid.center_of_index(i))).collect();
        Self::new(grid, bits, Complex64::new(0.0, 0.0))
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn pixel_size(&self) -> f64 {
        self.grid.pixel_size
    }

    pub fn origin(&self) -> Complex64 {
        self.grid.origin
    }

    pub fn center_offset(&self) -> Complex64 {
        self.center_offset
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.grid.width + col]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Plane coordinates of all set pixel centers.
    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.grid.center_of_index(i))
    }

    /// Set pixels all of whose 8 neighbours are set.
    pub fn interior_pixels(&self) -> Vec<bool> {
        let (w, h) = (self.grid.width, self.grid.height);
        let mut out = vec![false; self.bits.len()];
        for row in 1..h.saturating_sub(1) {
            for col in 1..w.saturating_sub(1) {
                let idx = row * w + col;
                out[idx] = self.bits[idx]
                    && (-1isize..=1).all(|dr| {
                        (-1isize..=1).all(|dc| {
                            self.bits[(row as isize + dr) as usize * w + (col as isize + dc) as usize]
                        })
                    });
            }
        }
        out
    }

    /// Converts a point of this mask's frame to the frame with `other_offset`.
    pub fn to_frame(&self, z: Complex64, other_offset: Complex64) -> Complex64 {
        z - self.center_offset + other_offset
    }

    /// Nearest-neighbour resampling onto `grid` (same plane frame).
    pub fn resample(&self, grid: PixelGrid) -> Result<ShapeMask, GeometryError> {
        let bits = (0..grid.len())
            .map(|i| {
                self.grid
                    .locate(grid.center_of_index(i))
                    .is_some_and(|(c, r)| self.get(c, r))
            })
            .collect();
        ShapeMask::new(grid, bits, self.center_offset)
    }

    /// 8-bit grayscale PNG, black = in set.
    pub fn to_png(&self) -> Result<Vec<u8>, GeometryError> {
        let img = GrayImage::from_fn(self.grid.width as u32, self.grid.height as u32, |c, r| {
            Luma([if self.get(c as usize, r as usize) { 0 } else { 255 }])
        });
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png)
            .map_err(|e| GeometryError::Encode(e.to_string()))?;
        Ok(out.into_inner())
    }

    pub fn sidecar(&self) -> MaskSidecar {
        MaskSidecar {
            origin: self.grid.origin,
            pixel_size: self.grid.pixel_size,
            width: self.grid.width,
            height: self.grid.height,
            center_offset: self.center_offset,
        }
    }

    /// Reloads a mask written by [`ShapeMask::to_png`] with its sidecar.
    pub fn from_png_with_sidecar(bytes: &[u8], sidecar: &MaskSidecar) -> Result<ShapeMask, GeometryError> {
        let luminance = decode_luminance(bytes)?;
        if luminance.0 != sidecar.width || luminance.1 != sidecar.height {
            return Err(GeometryError::SizeMismatch {
                got: luminance.0 * luminance.1,
                expected: sidecar.width * sidecar.height,
            });
        }
        let grid = PixelGrid {
            width: sidecar.width,
            height: sidecar.height,
            origin: sidecar.origin,
            pixel_size: sidecar.pixel_size,
        };
        let bits = luminance.2.iter().map(|&l| l < 0.5).collect();
        ShapeMask::new(grid, bits, sidecar.center_offset)
    }
}

/// JSON sidecar describing the plane placement of a mask PNG.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskSidecar {
    #[serde(with = "complex_serde")]
    pub origin: Complex64,
    pub pixel_size: f64,
    pub width: usize,
    pub height: usize,
    #[serde(with = "complex_serde")]
    pub center_offset: Complex64,
}

/// Boundary points of a mask in the mask's plane frame.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySample {
    pub points: Vec<Complex64>,
    /// Largest gap between consecutive samples along a contour.
    pub spacing: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialBounds {
    /// `r(E)`: distance from 0 to the boundary.
    pub inner: f64,
    /// `R(E)`: largest modulus over the set.
    pub outer: f64,
    #[serde(with = "complex_serde")]
    pub center_offset: Complex64,
}

fn decode_luminance(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>), GeometryError> {
    let img = image::load_from_memory(bytes).map_err(|e| GeometryError::Decode(e.to_string()))?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let lum = rgb
        .pixels()
        .map(|p| (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) / 255.0)
        .collect();
    Ok((w, h, lum))
}

/// Decodes a gray or RGB image; pixels with luminance below `threshold` are
/// in the set. The raster is fitted into `window`.
pub fn load_mask(bytes: &[u8], threshold: f64, window: PlaneWindow) -> Result<ShapeMask, GeometryError> {
    let (w, h, lum) = decode_luminance(bytes)?;
    if w == 0 || h == 0 {
        return Err(GeometryError::EmptySet);
    }
    let bits = lum.iter().map(|&l| l < threshold).collect();
    ShapeMask::new(window.grid_for(w, h), bits, Complex64::new(0.0, 0.0))
}

/// Smallest epsilon accepted by [`regularize`], in pixels.
pub const MIN_EPSILON_PIXELS: f64 = 8.0;

/// Replaces `S` by `K^ε = E^ε ∪ F^ε`.
///
/// `E^ε` keeps the set pixels at distance at least `ε` from the complement
/// of the interior. `F^ε` places a square of side `ε/4` at the center of every
/// cell of the side-`ε/2` grid (anchored at the plane origin) that meets the
/// boundary of `S`.
pub fn regularize(mask: &ShapeMask, epsilon: f64) -> Result<ShapeMask, GeometryError> {
    let grid = mask.grid;
    let ps = grid.pixel_size;
    let minimum = (MIN_EPSILON_PIXELS * ps).max(2.0 * grid.diagonal());
    if !(epsilon >= minimum) {
        return Err(GeometryError::EpsilonTooSmall { epsilon, minimum });
    }
    let (w, h) = (grid.width, grid.height);

    let to_complement = raster::squared_distance_to(&mask.bits, w, h, false);
    let mut bits: Vec<bool> = mask
        .bits
        .iter()
        .zip(&to_complement)
        .map(|(&b, &d2)| b && (d2.sqrt() - 0.5) * ps >= epsilon)
        .collect();

    let cell = epsilon / 2.0;
    let mut cells = BTreeSet::new();
    let mut mark = |z: Complex64| {
        cells.insert(((z.re / cell).floor() as i64, (z.im / cell).floor() as i64));
    };
    for (a, b) in boundary_edges(mask) {
        let (pa, pb) = (grid.corner(a.0 as f64, a.1 as f64), grid.corner(b.0 as f64, b.1 as f64));
        mark(pa);
        mark(pb);
        mark(0.5 * (pa + pb));
    }

    let half = epsilon / 8.0;
    for &(cx, cy) in &cells {
        let center = Complex64::new((cx as f64 + 0.5) * cell, (cy as f64 + 0.5) * cell);
        let mut any = false;
        let col_lo = ((center.re - half - grid.origin.re) / ps - 0.5).ceil().max(0.0) as usize;
        let col_hi = ((center.re + half - grid.origin.re) / ps - 0.5).floor();
        let row_lo = ((grid.origin.im - (center.im + half)) / ps - 0.5).ceil().max(0.0) as usize;
        let row_hi = ((grid.origin.im - (center.im - half)) / ps - 0.5).floor();
        if col_hi >= 0.0 && row_hi >= 0.0 {
            let col_hi = (col_hi as usize).min(w - 1);
            let row_hi = (row_hi as usize).min(h - 1);
            for row in row_lo..=row_hi {
                for col in col_lo..=col_hi {
                    bits[row * w + col] = true;
                    any = true;
                }
            }
        }
        if !any {
            if let Some((c, r)) = grid.locate(center) {
                bits[r * w + c] = true;
            }
        }
    }

    if !bits.iter().any(|&b| b) {
        return Err(GeometryError::EmptyResult);
    }
    let holes = raster::enclosed_complement_components(&bits, w, h);
    if holes > 0 {
        return Err(GeometryError::EnclosedComplement(holes));
    }
    ShapeMask::new(grid, bits, mask.center_offset)
}

type Vertex = (usize, usize);

/// Directed pixel edges between set and non-set pixels, oriented so the set
/// pixel lies to the left when walking in the image's (y-down) lattice.
fn boundary_edges(mask: &ShapeMask) -> Vec<(Vertex, Vertex)> {
    let (w, h) = (mask.grid.width, mask.grid.height);
    let outside = |c: isize, r: isize| {
        c < 0 || r < 0 || c >= w as isize || r >= h as isize || !mask.get(c as usize, r as usize)
    };
    let mut edges = Vec::new();
    for row in 0..h {
        for col in 0..w {
            if !mask.get(col, row) {
                continue;
            }
            let (c, r) = (col as isize, row as isize);
            if outside(c, r - 1) {
                edges.push(((col + 1, row), (col, row)));
            }
            if outside(c - 1, r) {
                edges.push(((col, row), (col, row + 1)));
            }
            if outside(c, r + 1) {
                edges.push(((col, row + 1), (col + 1, row + 1)));
            }
            if outside(c + 1, r) {
                edges.push(((col + 1, row + 1), (col + 1, row)));
            }
        }
    }
    edges
}

/// Chains boundary edges into closed loops of edge indices.
fn trace_loops(edges: &[(Vertex, Vertex)]) -> Vec<Vec<usize>> {
    let mut outgoing: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for (i, (a, _)) in edges.iter().enumerate() {
        outgoing.entry(*a).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut loops = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut chain = vec![start];
        used[start] = true;
        let mut at = edges[start].1;
        while let Some(&next) = outgoing
            .get(&at)
            .and_then(|cands| cands.iter().find(|&&e| !used[e]))
        {
            used[next] = true;
            chain.push(next);
            at = edges[next].1;
        }
        loops.push(chain);
    }
    loops
}

/// Pixel-edge marching with midpoint placement, thinned per contour so that
/// consecutive samples are at most `target_spacing` apart. Every contour keeps
/// at least four samples.
pub fn extract_boundary(mask: &ShapeMask, target_spacing: f64) -> Result<BoundarySample, GeometryError> {
    let grid = mask.grid;
    let ps = grid.pixel_size;
    if !(target_spacing >= ps * (1.0 - 1e-12)) {
        return Err(GeometryError::SpacingTooSmall {
            target: target_spacing,
            pixel: ps,
        });
    }
    let edges = boundary_edges(mask);
    let midpoint = |e: usize| {
        let ((ax, ay), (bx, by)) = edges[e];
        grid.corner(0.5 * (ax + bx) as f64, 0.5 * (ay + by) as f64)
    };

    let mut points = Vec::new();
    let mut spacing: f64 = 0.0;
    for chain in trace_loops(&edges) {
        let pts: Vec<Complex64> = chain.iter().map(|&e| midpoint(e)).collect();
        let len = pts.len();
        let mut keep = vec![false; len];
        keep[0] = true;
        let mut last = 0;
        for i in 1..len {
            if (pts[i] - pts[last]).norm() > target_spacing && i - 1 != last {
                keep[i - 1] = true;
                last = i - 1;
            }
        }
        if (pts[0] - pts[last]).norm() > target_spacing {
            keep[len - 1] = true;
        }
        for q in 1..4 {
            keep[q * len / 4] = true;
        }
        let kept: Vec<Complex64> = (0..len).filter(|&i| keep[i]).map(|i| pts[i]).collect();
        for (k, p) in kept.iter().enumerate() {
            spacing = spacing.max((kept[(k + 1) % kept.len()] - p).norm());
        }
        points.extend(kept);
    }
    Ok(BoundarySample { points, spacing })
}

/// Translates the plane so the deepest set pixel (largest exact Euclidean
/// distance to the complement; ties go to the lowest row, then column) sits
/// at 0, and reports the inner and outer radii about it.
pub fn center_interior(mask: &ShapeMask) -> Result<(ShapeMask, RadialBounds), GeometryError> {
    let interior = mask.interior_pixels();
    if !interior.iter().any(|&b| b) {
        return Err(GeometryError::NoInteriorPixel);
    }
    let grid = mask.grid;
    let ps = grid.pixel_size;
    let d2 = raster::squared_distance_to(&mask.bits, grid.width, grid.height, false);
    let mut best = usize::MAX;
    for (i, (&b, &d)) in mask.bits.iter().zip(&d2).enumerate() {
        if b && (best == usize::MAX || d > d2[best]) {
            best = i;
        }
    }
    let center = grid.center_of_index(best);
    let shift = -center;
    let moved = grid.translated(shift);
    let inner = (d2[best].sqrt() - 0.5) * ps;
    let outer = mask
        .bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| moved.center_of_index(i).norm())
        .fold(0.0, f64::max)
        + 0.5 * ps;
    let offset = mask.center_offset + shift;
    let centered = ShapeMask {
        grid: moved,
        center_offset: offset,
        bits: mask.bits.clone(),
    };
    Ok((
        centered,
        RadialBounds {
            inner,
            outer,
            center_offset: offset,
        },
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HausdorffMode {
    /// Between the set pixels.
    Sets,
    /// Between the boundary pixels (set pixels with a non-set 4-neighbour).
    Boundaries,
}

/// Directed Hausdorff distance in pixel units from `from` to `to` on a shared raster.
pub(crate) fn directed_pixels(from: &[bool], to: &[bool], width: usize, height: usize) -> f64 {
    let d2 = raster::squared_distance_to(to, width, height, true);
    from.iter()
        .zip(&d2)
        .filter(|(&f, _)| f)
        .map(|(_, &d)| d)
        .fold(0.0, f64::max)
        .sqrt()
}

/// Symmetric Hausdorff distance in pixel units between two pixel sets on a shared raster.
pub(crate) fn symmetric_pixels(a: &[bool], b: &[bool], width: usize, height: usize) -> f64 {
    directed_pixels(a, b, width, height).max(directed_pixels(b, a, width, height))
}

/// Symmetric Hausdorff distance in plane units. Both masks must share their
/// grid; see [`ShapeMask::resample`].
pub fn hausdorff(a: &ShapeMask, b: &ShapeMask, mode: HausdorffMode) -> Result<f64, GeometryError> {
    if !a.grid.same_as(&b.grid) {
        return Err(GeometryError::WindowMismatch);
    }
    if a.count() == 0 || b.count() == 0 {
        return Err(GeometryError::EmptySet);
    }
    let (w, h) = (a.grid.width, a.grid.height);
    let d = match mode {
        HausdorffMode::Sets => symmetric_pixels(&a.bits, &b.bits, w, h),
        HausdorffMode::Boundaries => symmetric_pixels(
            &raster::boundary_pixels(&a.bits, w, h),
            &raster::boundary_pixels(&b.bits, w, h),
            w,
            h,
        ),
    };
    Ok(d * a.grid.pixel_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{label_components, Connectivity};
    use image::RgbImage;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn default_grid(res: usize) -> PixelGrid {
        PlaneWindow::default().grid_for(res, res)
    }

    fn disk(res: usize, center: Complex64, radius: f64) -> ShapeMask {
        ShapeMask::from_predicate(default_grid(res), |z| (z - center).norm() <= radius).unwrap()
    }

    fn png_gray(w: u32, h: u32, f: impl Fn(u32, u32) -> u8) -> Vec<u8> {
        let img = GrayImage::from_fn(w, h, |x, y| Luma([f(x, y)]));
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png).unwrap();
        out.into_inner()
    }

    #[test]
    fn loads_all_black_image() {
        // All-black touches the border; it is accepted only when padded, so
        // check membership on a padded copy and the error on the raw one.
        let raw = png_gray(10, 10, |_, _| 0);
        assert!(matches!(
            load_mask(&raw, 0.5, PlaneWindow::default()),
            Err(GeometryError::TouchesBorder)
        ));
        let padded = png_gray(12, 12, |x, y| if (1..11).contains(&x) && (1..11).contains(&y) { 0 } else { 255 });
        let mask = load_mask(&padded, 0.5, PlaneWindow::default()).unwrap();
        assert_eq!(mask.count(), 100);
    }

    #[test]
    fn all_white_is_empty() {
        let bytes = png_gray(10, 10, |_, _| 255);
        assert!(matches!(
            load_mask(&bytes, 0.5, PlaneWindow::default()),
            Err(GeometryError::EmptySet)
        ));
    }

    #[test]
    fn garbage_bytes_fail_to_decode() {
        assert!(matches!(
            load_mask(b"not a png", 0.5, PlaneWindow::default()),
            Err(GeometryError::Decode(_))
        ));
    }

    #[test]
    fn centered_block_has_25_pixels_and_centered_bbox() {
        let bytes = png_gray(20, 20, |x, y| if (8..13).contains(&x) && (8..13).contains(&y) { 0 } else { 255 });
        let mask = load_mask(&bytes, 0.5, PlaneWindow::default()).unwrap();
        assert_eq!(mask.count(), 25);
        let pts: Vec<_> = mask.points().collect();
        let (min_re, max_re) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), z| (a.min(z.re), b.max(z.re)));
        // Columns 8..=12 of 20 give a bbox centered half a pixel right of 0 (pixel size 0.2).
        assert!(((min_re + max_re) / 2.0 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rgb_luminance_weights() {
        // Pure green: 0.587 > 0.5 so outside; pure red: 0.299 < 0.5 so inside.
        let img = RgbImage::from_fn(5, 5, |x, y| {
            if x == 2 && y == 2 {
                image::Rgb([255, 0, 0])
            } else {
                image::Rgb([0, 255, 0])
            }
        });
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png).unwrap();
        let mask = load_mask(out.get_ref(), 0.5, PlaneWindow::default()).unwrap();
        assert_eq!(mask.count(), 1);
        assert!(mask.get(2, 2));
    }

    #[test]
    fn png_sidecar_round_trip() {
        let (mask, _) = center_interior(&disk(64, c(0.3, 0.1), 1.0)).unwrap();
        let back = ShapeMask::from_png_with_sidecar(&mask.to_png().unwrap(), &mask.sidecar()).unwrap();
        assert_eq!(back, mask);
    }

    #[test]
    fn regularize_disk_keeps_complement_connected() {
        let mask = disk(256, c(0.0, 0.0), 1.2);
        let eps = 0.25;
        let k = regularize(&mask, eps).unwrap();
        assert_eq!(raster::enclosed_complement_components(k.bits(), 256, 256), 0);
        // Eroded core: deep points kept, points within eps of the edge dropped
        // unless covered by a boundary square.
        let g = k.grid();
        let at = |z: Complex64| g.locate(z).map(|(c, r)| k.get(c, r)).unwrap();
        assert!(at(c(0.0, 0.0)));
        assert!(at(c(0.9, 0.0)));
        let slack = g.diagonal();
        assert!(hausdorff(&mask, &k, HausdorffMode::Sets).unwrap() <= eps + slack);
        assert!(hausdorff(&mask, &k, HausdorffMode::Boundaries).unwrap() <= eps + slack);
        // Several boundary squares plus the eroded disk.
        let (_, comps) = label_components(k.bits(), 256, 256, Connectivity::Eight);
        assert!(comps > 10);
    }

    #[test]
    fn regularize_thin_annulus_punches_through() {
        let grid = default_grid(256);
        let annulus = ShapeMask::from_predicate(grid, |z| (0.9..=1.1).contains(&z.norm())).unwrap();
        assert_eq!(raster::enclosed_complement_components(annulus.bits(), 256, 256), 1);
        let k = regularize(&annulus, 0.25).unwrap();
        assert_eq!(raster::enclosed_complement_components(k.bits(), 256, 256), 0);
        let slack = grid.diagonal();
        assert!(hausdorff(&annulus, &k, HausdorffMode::Sets).unwrap() <= 0.25 + slack);
        assert!(hausdorff(&annulus, &k, HausdorffMode::Boundaries).unwrap() <= 0.25 + slack);
    }

    #[test]
    fn regularize_thick_annulus_is_rejected() {
        let annulus = ShapeMask::from_predicate(default_grid(256), |z| (0.4..=1.6).contains(&z.norm())).unwrap();
        assert!(matches!(
            regularize(&annulus, 0.2),
            Err(GeometryError::EnclosedComplement(1))
        ));
    }

    #[test]
    fn regularize_two_disks() {
        let grid = default_grid(256);
        let mask = ShapeMask::from_predicate(grid, |z| {
            (z - c(-0.9, 0.0)).norm() <= 0.6 || (z - c(0.9, 0.0)).norm() <= 0.6
        })
        .unwrap();
        let k = regularize(&mask, 0.2).unwrap();
        let (_, comps) = label_components(k.bits(), 256, 256, Connectivity::Eight);
        assert!(comps >= 2);
        assert_eq!(raster::enclosed_complement_components(k.bits(), 256, 256), 0);
    }

    #[test]
    fn regularize_rejects_tiny_epsilon() {
        let mask = disk(128, c(0.0, 0.0), 1.0);
        assert!(matches!(
            regularize(&mask, mask.pixel_size()),
            Err(GeometryError::EpsilonTooSmall { .. })
        ));
    }

    #[test]
    fn square_boundary_sampling() {
        // Side-2 square on a 0.01 pixel grid.
        let grid = PlaneWindow { center: c(0.0, 0.0), side: 2.2 }.grid_for(220, 220);
        let mask = ShapeMask::from_predicate(grid, |z| z.re.abs() < 1.0 && z.im.abs() < 1.0).unwrap();
        let b = extract_boundary(&mask, 0.1).unwrap();
        assert!(b.points.len() >= 80, "{}", b.points.len());
        assert!(b.spacing <= 0.1 + 1e-12);
        for p in &b.points {
            let edge_gap = (p.re.abs() - 1.0).abs().min((p.im.abs() - 1.0).abs());
            assert!(edge_gap <= grid.pixel_size, "{p}");
        }
    }

    #[test]
    fn single_pixel_boundary() {
        let grid = default_grid(9);
        let mut bits = vec![false; 81];
        bits[4 * 9 + 4] = true;
        let mask = ShapeMask::new(grid, bits, c(0.0, 0.0)).unwrap();
        let b = extract_boundary(&mask, grid.pixel_size).unwrap();
        assert!((4..=8).contains(&b.points.len()));
        let b = extract_boundary(&mask, 10.0).unwrap();
        assert!((4..=8).contains(&b.points.len()));
    }

    #[test]
    fn disk_boundary_lies_on_circle() {
        let mask = disk(400, c(0.0, 0.0), 1.0);
        let b = extract_boundary(&mask, 0.05).unwrap();
        let ps = mask.pixel_size();
        assert!(b.spacing <= 0.05);
        for p in &b.points {
            assert!((p.norm() - 1.0).abs() <= ps, "{p}");
        }
        for (i, p) in b.points.iter().enumerate() {
            for q in &b.points[i + 1..] {
                assert_ne!(p, q);
            }
        }
    }

    #[test]
    fn spacing_below_pixel_is_rejected() {
        let mask = disk(64, c(0.0, 0.0), 1.0);
        assert!(matches!(
            extract_boundary(&mask, mask.pixel_size() / 2.0),
            Err(GeometryError::SpacingTooSmall { .. })
        ));
    }

    #[test]
    fn center_offset_disk() {
        let grid = PlaneWindow { center: c(3.0, 0.0), side: 4.0 }.grid_for(256, 256);
        let mask = ShapeMask::from_predicate(grid, |z| (z - c(3.0, 0.0)).norm() <= 1.0).unwrap();
        let (centered, b) = center_interior(&mask).unwrap();
        let ps = grid.pixel_size;
        assert!((b.center_offset - c(-3.0, 0.0)).norm() <= ps);
        assert!((b.inner - 1.0).abs() <= 2.0 * ps);
        assert!((b.outer - 1.0).abs() <= 2.0 * ps);
        assert_eq!(centered.center_offset(), b.center_offset);
    }

    #[test]
    fn center_unit_square() {
        let grid = PlaneWindow { center: c(0.5, 0.5), side: 2.0 }.grid_for(200, 200);
        let mask = ShapeMask::from_predicate(grid, |z| (0.0..=1.0).contains(&z.re) && (0.0..=1.0).contains(&z.im)).unwrap();
        let (_, b) = center_interior(&mask).unwrap();
        let ps = grid.pixel_size;
        assert!((-b.center_offset - c(0.5, 0.5)).norm() <= ps);
        assert!((b.inner - 0.5).abs() <= ps);
        assert!((b.outer - 0.5 * 2f64.sqrt()).abs() <= 2.0 * ps);
    }

    #[test]
    fn center_l_shape_matches_brute_force_scan() {
        let grid = default_grid(60);
        let mask = ShapeMask::from_predicate(grid, |z| {
            let in_bar = (-1.5..=-0.5).contains(&z.re) && (-1.5..=1.5).contains(&z.im);
            let in_foot = (-1.5..=1.5).contains(&z.re) && (-1.5..=-0.5).contains(&z.im);
            in_bar || in_foot
        })
        .unwrap();
        let (_, b) = center_interior(&mask).unwrap();
        // Oracle: for each set pixel, distance to the nearest non-set pixel
        // by direct double loop.
        let ps = grid.pixel_size;
        let (w, h) = (60usize, 60usize);
        let mut best = 0.0f64;
        for p in 0..w * h {
            if !mask.bits()[p] {
                continue;
            }
            let (pc, pr) = ((p % w) as f64, (p / w) as f64);
            let nearest = (0..w * h)
                .filter(|&q| !mask.bits()[q])
                .map(|q| ((q % w) as f64 - pc).hypot((q / w) as f64 - pr))
                .fold(f64::MAX, f64::min);
            best = best.max(nearest);
        }
        assert!((b.inner - (best - 0.5) * ps).abs() < 1e-12);
    }

    #[test]
    fn curve_has_no_interior() {
        let grid = default_grid(64);
        let mask = ShapeMask::from_predicate(grid, |z| z.im.abs() < grid.pixel_size && z.re.abs() < 1.0).unwrap();
        assert!(matches!(center_interior(&mask), Err(GeometryError::NoInteriorPixel)));
    }

    #[test]
    fn hausdorff_identity_and_shift() {
        let a = disk(400, c(0.0, 0.0), 1.0);
        assert_eq!(hausdorff(&a, &a, HausdorffMode::Sets).unwrap(), 0.0);
        assert_eq!(hausdorff(&a, &a, HausdorffMode::Boundaries).unwrap(), 0.0);
        let b = disk(400, c(0.3, 0.0), 1.0);
        let diag = a.grid().diagonal();
        for mode in [HausdorffMode::Sets, HausdorffMode::Boundaries] {
            let d = hausdorff(&a, &b, mode).unwrap();
            assert!((d - 0.3).abs() <= diag, "{mode:?} {d}");
        }
    }

    #[test]
    fn hausdorff_disk_with_hole() {
        let grid = default_grid(400);
        let a = disk(400, c(0.0, 0.0), 1.0);
        let b = ShapeMask::from_predicate(grid, |z| (0.2..=1.0).contains(&z.norm())).unwrap();
        let diag = grid.diagonal();
        let sets = hausdorff(&a, &b, HausdorffMode::Sets).unwrap();
        let bounds = hausdorff(&a, &b, HausdorffMode::Boundaries).unwrap();
        assert!((sets - 0.2).abs() <= diag, "{sets}");
        assert!((bounds - 0.8).abs() <= diag, "{bounds}");
    }

    #[test]
    fn hausdorff_window_mismatch() {
        let a = disk(64, c(0.0, 0.0), 1.0);
        let b = disk(65, c(0.0, 0.0), 1.0);
        assert!(matches!(hausdorff(&a, &b, HausdorffMode::Sets), Err(GeometryError::WindowMismatch)));
        let r = b.resample(*a.grid()).unwrap();
        assert!(hausdorff(&a, &r, HausdorffMode::Sets).unwrap() <= 2.0 * a.grid().diagonal());
    }
}
