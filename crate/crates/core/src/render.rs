//! Escape-time rasters of filled Julia sets and their comparison with the
//! target shape.

use std::io::Cursor;

use image::{GrayImage, ImageFormat, Luma, Rgb, RgbImage};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex_serde;
use crate::geometry::{self, GeometryError, MaskSidecar, ShapeMask};
use crate::polyjulia::ShapedPolynomial;
use crate::raster::{self, Connectivity, PixelGrid};

pub const MIN_RESOLUTION: usize = 16;

/// Auto window half-side as a multiple of the escape radius.
pub const WINDOW_MARGIN: f64 = 1.2;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("resolution {0} below the minimum of {MIN_RESOLUTION}")]
    ResolutionTooSmall(usize),
    #[error("max_iter must be at least 1")]
    ZeroIterations,
    #[error("render window does not cover the escape disk of radius {0}")]
    WindowTooSmall(f64),
    #[error("no bounded pixels in the raster")]
    EmptyBounded,
    #[error("image encoding failed: {0}")]
    Encode(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Escape-time raster in the polynomial's centered frame.
#[derive(Clone, Debug, PartialEq)]
pub struct JuliaRaster {
    pub grid: PixelGrid,
    pub escaped: Vec<bool>,
    /// Escape step for escaped pixels, `max_iter` for bounded ones.
    pub iters: Vec<u32>,
    pub max_iter: u32,
    pub center_offset: Complex64,
}

impl JuliaRaster {
    pub fn bounded(&self) -> Vec<bool> {
        self.escaped.iter().map(|e| !e).collect()
    }

    pub fn bounded_count(&self) -> usize {
        self.escaped.iter().filter(|&&e| !e).count()
    }

    /// The bounded pixels as a mask in the same frame.
    pub fn bounded_mask(&self) -> Result<ShapeMask, RenderError> {
        if self.bounded_count() == 0 {
            return Err(RenderError::EmptyBounded);
        }
        Ok(ShapeMask::new(self.grid, self.bounded(), self.center_offset)?)
    }
}

/// Square grid of half-side `1.2·R(E)e^s` about 0.
pub fn auto_grid(p: &ShapedPolynomial, resolution: usize) -> PixelGrid {
    PixelGrid::square(Complex64::new(0.0, 0.0), WINDOW_MARGIN * p.escape_radius(), resolution)
}

pub fn render(p: &ShapedPolynomial, resolution: usize, max_iter: u32) -> Result<JuliaRaster, RenderError> {
    if resolution < MIN_RESOLUTION {
        return Err(RenderError::ResolutionTooSmall(resolution));
    }
    render_on(p, auto_grid(p, resolution), max_iter)
}

/// Classifies every pixel center of `grid`, which must cover the escape disk.
pub fn render_on(p: &ShapedPolynomial, grid: PixelGrid, max_iter: u32) -> Result<JuliaRaster, RenderError> {
    if max_iter == 0 {
        return Err(RenderError::ZeroIterations);
    }
    if !grid.covers_disk(p.escape_radius()) {
        return Err(RenderError::WindowTooSmall(p.escape_radius()));
    }
    let mut iters = vec![0u32; grid.len()];
    let mut escaped = vec![false; grid.len()];
    iters
        .par_chunks_mut(grid.width)
        .zip(escaped.par_chunks_mut(grid.width))
        .enumerate()
        .for_each(|(row, (it, es))| {
            for col in 0..grid.width {
                let orbit = p.classify_unchecked(grid.center(col, row), max_iter);
                it[col] = orbit.iterations;
                es[col] = orbit.escaped;
            }
        });
    Ok(JuliaRaster {
        grid,
        escaped,
        iters,
        max_iter,
        center_offset: p.bounds.center_offset,
    })
}

/// Number of 8-connected components of the bounded pixels.
pub fn bounded_components(r: &JuliaRaster) -> usize {
    raster::label_components(&r.bounded(), r.grid.width, r.grid.height, Connectivity::Eight).1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub set_distance: f64,
    pub boundary_distance: f64,
}

/// Hausdorff distances between the target set and the rendered bounded set,
/// measured on the target's grid. Target pixels outside the raster window
/// count as escaped.
pub fn compare(target: &ShapeMask, r: &JuliaRaster) -> Result<Comparison, RenderError> {
    if r.bounded_count() == 0 {
        return Err(RenderError::EmptyBounded);
    }
    let grid = target.grid();
    let bits: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let z = target.to_frame(grid.center_of_index(i), r.center_offset);
            r.grid
                .locate(z)
                .is_some_and(|(c, row)| !r.escaped[row * r.grid.width + c])
        })
        .collect();
    if !bits.iter().any(|&b| b) {
        return Err(RenderError::EmptyBounded);
    }
    let (w, h) = (grid.width, grid.height);
    let tbits = target.bits();
    let ps = grid.pixel_size;
    let set_distance = geometry::symmetric_pixels(tbits, &bits, w, h) * ps;
    let boundary_distance = geometry::symmetric_pixels(
        &raster::boundary_pixels(tbits, w, h),
        &raster::boundary_pixels(&bits, w, h),
        w,
        h,
    ) * ps;
    Ok(Comparison {
        set_distance,
        boundary_distance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    /// Bounded black, escaped white.
    Binary,
    /// Bounded black, escaped colored by escape step.
    Iter,
}

/// Color of an escaped pixel that left at `step` out of `max_iter`.
fn iter_color(step: u32, max_iter: u32) -> Rgb<u8> {
    let t = (step as f64 / max_iter as f64).clamp(0.0, 1.0).sqrt();
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    Rgb([lerp(250.0, 20.0), lerp(245.0, 70.0), lerp(225.0, 160.0)])
}

pub fn export_png(r: &JuliaRaster, palette: Palette) -> Result<Vec<u8>, RenderError> {
    let (w, h) = (r.grid.width as u32, r.grid.height as u32);
    let mut out = Cursor::new(Vec::new());
    let result = match palette {
        Palette::Binary => GrayImage::from_fn(w, h, |c, row| {
            let i = row as usize * r.grid.width + c as usize;
            Luma([if r.escaped[i] { 255 } else { 0 }])
        })
        .write_to(&mut out, ImageFormat::Png),
        Palette::Iter => RgbImage::from_fn(w, h, |c, row| {
            let i = row as usize * r.grid.width + c as usize;
            if r.escaped[i] {
                iter_color(r.iters[i], r.max_iter)
            } else {
                Rgb([0, 0, 0])
            }
        })
        .write_to(&mut out, ImageFormat::Png),
    };
    result.map_err(|e| RenderError::Encode(e.to_string()))?;
    Ok(out.into_inner())
}

/// JSON header written next to a rendered PNG.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterSidecar {
    #[serde(with = "complex_serde")]
    pub origin: Complex64,
    pub pixel_size: f64,
    pub width: usize,
    pub height: usize,
    #[serde(with = "complex_serde")]
    pub center_offset: Complex64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub max_iter: u32,
}

impl RasterSidecar {
    pub fn new(r: &JuliaRaster, p: &ShapedPolynomial) -> Self {
        RasterSidecar {
            origin: r.grid.origin,
            pixel_size: r.grid.pixel_size,
            width: r.grid.width,
            height: r.grid.height,
            center_offset: r.center_offset,
            n: p.n(),
            s: p.s(),
            max_iter: r.max_iter,
        }
    }

    pub fn mask_sidecar(&self) -> MaskSidecar {
        MaskSidecar {
            origin: self.origin,
            pixel_size: self.pixel_size,
            width: self.width,
            height: self.height,
            center_offset: self.center_offset,
        }
    }
}
