//! Subcommands of the `shapejulia` tool: `fit`, `render`, `verify` and
//! `capacity`. Each reads and writes plain files so the expensive fit can be
//! rendered and checked repeatedly.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use shapejulia::geometry::{self, GeometryError, MaskSidecar, PlaneWindow, ShapeMask};
use shapejulia::polyjulia::{self, PolyError, PolynomialFile, ShapedPolynomial, DEFAULT_MAX_ITER};
use shapejulia::potential::{self, LejaSequence, PotentialError};
use shapejulia::render::{self, Comparison, Palette, RasterSidecar, RenderError};
use shapejulia::{ConditionReport, PixelGrid, SLevel};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GEOMETRY: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "SHAPEJULIA_THREADS";

/// Green's-function margin above the outer level for exterior samples.
pub const EXTERIOR_MARGIN: f64 = 0.05;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("mask center offset {mask} does not match the polynomial's {poly}")]
    OffsetMismatch { mask: Complex64, poly: Complex64 },
}

fn geometry_code(e: &GeometryError) -> i32 {
    match e {
        GeometryError::Decode(_) | GeometryError::Encode(_) | GeometryError::EmptySet | GeometryError::SizeMismatch { .. } => {
            EXIT_INPUT
        }
        _ => EXIT_GEOMETRY,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } | CliError::Json { .. } => EXIT_INPUT,
            CliError::Geometry(e) => geometry_code(e),
            CliError::OffsetMismatch { .. } => EXIT_GEOMETRY,
            CliError::Potential(PotentialError::TooFewPoints(_) | PotentialError::NotEnoughCandidates { .. }) => {
                EXIT_INPUT
            }
            CliError::Potential(_) => EXIT_NUMERIC,
            CliError::Poly(e) => match e {
                PolyError::InvalidS(_)
                | PolyError::InvalidPower(_)
                | PolyError::NonFinite
                | PolyError::ZeroIterations
                | PolyError::Format(_) => EXIT_INPUT,
                PolyError::Potential(PotentialError::TooFewPoints(_)) => EXIT_INPUT,
                _ => EXIT_NUMERIC,
            },
            CliError::Render(e) => match e {
                RenderError::ResolutionTooSmall(_) | RenderError::ZeroIterations => EXIT_INPUT,
                RenderError::Geometry(g) => geometry_code(g),
                _ => EXIT_NUMERIC,
            },
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_slice(&read(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write(path, text.as_bytes())
}

/// `dir/stem.png` → `dir/stem.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Parses `"auto"` or a positive number.
pub fn parse_s(text: &str) -> Result<SLevel, String> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(SLevel::Auto);
    }
    let v: f64 = text.parse().map_err(|_| format!("invalid s {text:?}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(SLevel::Value(v))
    } else {
        Err(format!("s must be positive, got {v}"))
    }
}

/// Parses `"auto"`/`"off"` (as `None`) or a positive plane length.
pub fn parse_length(text: &str) -> Result<Option<f64>, String> {
    if text.eq_ignore_ascii_case("auto") || text.eq_ignore_ascii_case("off") {
        return Ok(None);
    }
    let v: f64 = text.parse().map_err(|_| format!("invalid length {text:?}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(Some(v))
    } else {
        Err(format!("length must be positive, got {v}"))
    }
}

/// How a mask image is placed in the plane when it has no sidecar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaskInput {
    pub window: PlaneWindow,
    pub threshold: f64,
}

impl Default for MaskInput {
    fn default() -> Self {
        MaskInput {
            window: PlaneWindow::default(),
            threshold: 0.5,
        }
    }
}

/// Reads a mask: with its `.json` sidecar when one sits next to the image,
/// otherwise placed by `input`.
pub fn read_mask(path: &Path, input: &MaskInput) -> Result<(ShapeMask, bool), CliError> {
    let bytes = read(path)?;
    let side = sibling(path, "json");
    if side.is_file() {
        let sidecar: MaskSidecar = read_json(&side)?;
        Ok((ShapeMask::from_png_with_sidecar(&bytes, &sidecar)?, true))
    } else {
        Ok((geometry::load_mask(&bytes, input.threshold, input.window)?, false))
    }
}

/// Boundary spacing used when none is given: 1/2048 of the window side, but
/// never below one pixel.
pub fn auto_spacing(mask: &ShapeMask) -> f64 {
    let side = mask.width().max(mask.height()) as f64 * mask.pixel_size();
    (side / 2048.0).max(mask.pixel_size())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub n: usize,
    pub s: SLevel,
    /// `None` = auto.
    pub boundary_spacing: Option<f64>,
    pub seed_index: usize,
    /// `None` = off.
    pub epsilon_regularize: Option<f64>,
    /// Build the lemniscate variant with this power instead of the Leja polynomial.
    pub hilbert_k: Option<u32>,
    pub input: MaskInput,
}

impl FitConfig {
    pub fn new(n: usize, s: SLevel) -> Self {
        FitConfig {
            n,
            s,
            boundary_spacing: None,
            seed_index: 0,
            epsilon_regularize: None,
            hilbert_k: None,
            input: MaskInput::default(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(CliError::Input(format!("n must be at least 2, got {}", self.n)));
        }
        if let SLevel::Value(s) = self.s {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::Input(format!("s must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitOutputs {
    pub polynomial: PathBuf,
    pub log: PathBuf,
    pub mask: PathBuf,
    pub mask_sidecar: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitLog {
    pub n: usize,
    pub s: Option<f64>,
    pub k: Option<u32>,
    pub capacity_estimate: f64,
    pub log_cap_estimate: f64,
    pub boundary_points: usize,
    pub spacing: f64,
    pub inner: f64,
    pub outer: f64,
    pub center_offset: [f64; 2],
    pub seed_index: usize,
    pub epsilon_regularize: Option<f64>,
    pub conditions: Option<ConditionReport>,
    pub elapsed_seconds: f64,
}

/// Processed mask, centered, with its Leja sequence and polynomial.
pub struct Fit {
    pub mask: ShapeMask,
    pub sequence: LejaSequence,
    pub polynomial: ShapedPolynomial,
    pub spacing: f64,
    pub boundary_points: usize,
}

/// The in-memory part of `fit`.
pub fn fit_mask(mask: &ShapeMask, cfg: &FitConfig) -> Result<Fit, CliError> {
    cfg.validate()?;
    let regular = match cfg.epsilon_regularize {
        Some(eps) => geometry::regularize(mask, eps)?,
        None => mask.clone(),
    };
    let (centered, bounds) = geometry::center_interior(&regular)?;
    let target = cfg.boundary_spacing.unwrap_or_else(|| auto_spacing(&centered));
    let boundary = geometry::extract_boundary(&centered, target)?;
    let sequence = potential::compute_leja(&boundary, cfg.n, cfg.seed_index)?;
    let polynomial = match cfg.hilbert_k {
        Some(k) => polyjulia::hilbert_build(&sequence, &boundary, bounds, k)?,
        None => polyjulia::build(&sequence, bounds, cfg.s)?,
    };
    Ok(Fit {
        mask: centered,
        sequence,
        polynomial,
        spacing: boundary.spacing,
        boundary_points: boundary.points.len(),
    })
}

/// `fit`: writes `out` (polynomial), `<stem>.log.json`, and the processed
/// mask as `<stem>.mask.png` with sidecar `<stem>.mask.json`.
pub fn cmd_fit(mask_path: &Path, out: &Path, cfg: &FitConfig) -> Result<FitOutputs, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let (mask, _) = read_mask(mask_path, &cfg.input)?;
    let fit = fit_mask(&mask, cfg)?;
    let p = &fit.polynomial;

    let outputs = FitOutputs {
        polynomial: out.to_path_buf(),
        log: sibling(out, "log.json"),
        mask: sibling(out, "mask.png"),
        mask_sidecar: sibling(out, "mask.json"),
    };
    write_json(&outputs.polynomial, &p.to_file())?;
    write(&outputs.mask, &fit.mask.to_png()?)?;
    write_json(&outputs.mask_sidecar, &fit.mask.sidecar())?;
    let conditions = polyjulia::check_conditions(p, &fit.sequence).ok();
    let log = FitLog {
        n: p.n(),
        s: p.s(),
        k: cfg.hilbert_k,
        capacity_estimate: fit.sequence.capacity_estimate(),
        log_cap_estimate: fit.sequence.log_cap_estimate,
        boundary_points: fit.boundary_points,
        spacing: fit.spacing,
        inner: p.bounds.inner,
        outer: p.bounds.outer,
        center_offset: [p.bounds.center_offset.re, p.bounds.center_offset.im],
        seed_index: cfg.seed_index,
        epsilon_regularize: cfg.epsilon_regularize,
        conditions,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(&outputs.log, &log)?;
    Ok(outputs)
}

pub fn load_polynomial(path: &Path) -> Result<ShapedPolynomial, CliError> {
    let file: PolynomialFile = read_json(path)?;
    Ok(ShapedPolynomial::from_file(file)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    pub resolution: usize,
    pub max_iter: u32,
    pub palette: Palette,
    /// Overrides the automatic half-side `1.2·R(E)e^s`.
    pub half_side: Option<f64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            resolution: 1000,
            max_iter: DEFAULT_MAX_ITER,
            palette: Palette::Iter,
            half_side: None,
        }
    }
}

pub fn render_polynomial(p: &ShapedPolynomial, opts: &RenderOptions) -> Result<render::JuliaRaster, CliError> {
    let raster = match opts.half_side {
        None => render::render(p, opts.resolution, opts.max_iter)?,
        Some(h) => {
            if opts.resolution < render::MIN_RESOLUTION {
                return Err(RenderError::ResolutionTooSmall(opts.resolution).into());
            }
            let grid = PixelGrid::square(Complex64::new(0.0, 0.0), h, opts.resolution);
            render::render_on(p, grid, opts.max_iter)?
        }
    };
    Ok(raster)
}

/// `render`: writes the PNG to `out` and its header to `<stem>.json`.
pub fn cmd_render(poly: &Path, out: &Path, opts: &RenderOptions) -> Result<render::JuliaRaster, CliError> {
    let p = load_polynomial(poly)?;
    let raster = render_polynomial(&p, opts)?;
    write(out, &render::export_png(&raster, opts.palette)?)?;
    write_json(&sibling(out, "json"), &RasterSidecar::new(&raster, &p))?;
    Ok(raster)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub resolution: usize,
    pub max_iter: u32,
    pub input: MaskInput,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            resolution: 1000,
            max_iter: DEFAULT_MAX_ITER,
            input: MaskInput::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    /// Interior pixels of the shape that escape within `10·max_iter` steps.
    pub interior_violations: usize,
    /// Pixels beyond the outer level plus margin that do not escape within `max_iter`.
    pub exterior_nonescapes: usize,
    pub interior_samples: usize,
    pub exterior_samples: usize,
    pub samples: usize,
}

/// `passed` needs at least one interior sample, zero violations, and for
/// the Leja construction conditions c1, c3 and c4.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// `None` for the lemniscate construction, which has no such conditions.
    pub conditions: Option<ConditionReport>,
    pub containment: Containment,
    /// `None` when nothing in the raster stays bounded.
    pub distances: Option<Comparison>,
    pub capacity: f64,
    pub components: usize,
    pub passed: bool,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_VERIFY_FAILED
        }
    }
}

/// Checks a fitted polynomial against the mask it came from.
pub fn verify_fit(mask: &ShapeMask, p: &ShapedPolynomial, opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let offset = p.bounds.center_offset;
    if (mask.center_offset() - offset).norm() > 1e-9 * mask.pixel_size() {
        return Err(CliError::OffsetMismatch {
            mask: mask.center_offset(),
            poly: offset,
        });
    }
    let conditions = match p.s() {
        Some(_) => {
            let n = p.n();
            let mut log_a = vec![f64::NAN; n];
            log_a[n - 1] = n as f64 * p.log_cap_estimate;
            let seq = LejaSequence::from_parts(p.roots.clone(), log_a, 0);
            Some(polyjulia::check_conditions(p, &seq)?)
        }
        None => None,
    };

    let raster = render::render(p, opts.resolution, opts.max_iter)?;
    let grid = raster.grid;
    let on_grid = mask.resample(grid)?;
    let interior = on_grid.interior_pixels();
    let long_iter = opts.max_iter.saturating_mul(10);
    let level = p.outer_level() + EXTERIOR_MARGIN;

    let (interior_samples, interior_violations, exterior_samples, exterior_nonescapes) = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let z = grid.center_of_index(i);
            if interior[i] {
                let escaped = raster.escaped[i] || p.classify(z, long_iter).map(|o| o.escaped).unwrap_or(true);
                (1, escaped as usize, 0, 0)
            } else if p.green(z) > level {
                (0, 0, 1, !raster.escaped[i] as usize)
            } else {
                (0, 0, 0, 0)
            }
        })
        .reduce(|| (0, 0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3));

    let distances = match raster.bounded_count() {
        0 => None,
        _ => Some(render::compare(mask, &raster)?),
    };
    let components = render::bounded_components(&raster);
    let containment = Containment {
        interior_violations,
        exterior_nonescapes,
        interior_samples,
        exterior_samples,
        samples: interior_samples + exterior_samples,
    };
    let passed = distances.is_some()
        && interior_samples > 0
        && interior_violations == 0
        && exterior_nonescapes == 0
        && conditions.as_ref().is_none_or(ConditionReport::passes);
    Ok(VerifyReport {
        conditions,
        containment,
        distances,
        capacity: p.log_cap_estimate.exp(),
        components,
        passed,
    })
}

/// `verify`: the mask is read with its sidecar if present, otherwise placed
/// by `opts.input` and centered the same way `fit` centers it.
pub fn cmd_verify(mask_path: &Path, poly: &Path, opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let p = load_polynomial(poly)?;
    let (mask, from_sidecar) = read_mask(mask_path, &opts.input)?;
    let mask = if from_sidecar {
        mask
    } else {
        geometry::center_interior(&mask)?.0
    };
    verify_fit(&mask, &p, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub capacity: f64,
    pub log_cap_estimate: f64,
    pub n: usize,
    pub boundary_points: usize,
    pub spacing: f64,
}

/// `capacity`: `a_n^{1/n}` for Leja points on the mask boundary.
pub fn cmd_capacity(
    mask_path: &Path,
    n: usize,
    spacing: Option<f64>,
    input: &MaskInput,
) -> Result<CapacityReport, CliError> {
    if n < 2 {
        return Err(CliError::Input(format!("n must be at least 2, got {n}")));
    }
    let (mask, _) = read_mask(mask_path, input)?;
    let boundary = geometry::extract_boundary(&mask, spacing.unwrap_or_else(|| auto_spacing(&mask)))?;
    let seq = potential::compute_leja(&boundary, n, 0)?;
    Ok(CapacityReport {
        capacity: seq.capacity_estimate(),
        log_cap_estimate: seq.log_cap_estimate,
        n,
        boundary_points: boundary.points.len(),
        spacing: boundary.spacing,
    })
}

/// One bundled corpus shape and its pinned fit parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub mask: String,
    pub window: PlaneWindow,
    pub n: usize,
    /// `"auto"` or a number.
    pub s: String,
    /// Pinned boundary spacing; auto when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_spacing: Option<f64>,
    #[serde(default)]
    pub connected: bool,
    /// Known logarithmic capacity, for shapes where it has a closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
}

impl CorpusEntry {
    pub fn mask_path(&self) -> PathBuf {
        corpus_dir().join(&self.mask)
    }

    pub fn fit_config(&self) -> Result<FitConfig, CliError> {
        let s = parse_s(&self.s).map_err(CliError::Input)?;
        let mut cfg = FitConfig::new(self.n, s);
        cfg.input.window = self.window;
        cfg.boundary_spacing = self.boundary_spacing;
        Ok(cfg)
    }
}

/// Directory holding the bundled corpus.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn load_corpus() -> Result<Vec<CorpusEntry>, CliError> {
    read_json(&corpus_dir().join("corpus.json"))
}
