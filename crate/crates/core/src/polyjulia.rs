//! The shaped polynomial `P̃(z) = z·e^{−ns/2}·cap^{−n}·∏(z − z_j)` built on
//! Leja points, the lemniscate alternative `z·(q/‖q‖)^k`, their
//! exponent-tracked evaluation and escape-time classification.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex_serde;
use crate::geometry::{BoundarySample, RadialBounds};
use crate::potential::{sup_norm, LejaSequence, PotentialError};
use crate::scaled::ScaledComplex;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("escape parameter s must be positive and finite, got {0}")]
    InvalidS(f64),
    #[error("lemniscate power k must be at least 1, got {0}")]
    InvalidPower(u32),
    #[error("empty root set")]
    NoRoots,
    #[error("invalid radial bounds (inner {inner}, outer {outer})")]
    InvalidBounds { inner: f64, outer: f64 },
    #[error("non-finite input point")]
    NonFinite,
    #[error("max_iter must be at least 1")]
    ZeroIterations,
    #[error("operation needs a Leja-kind polynomial")]
    NotLeja,
    #[error("polynomial file: {0}")]
    Format(String),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Escape parameter: a fixed level or `1/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SLevel {
    Auto,
    Value(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Construction {
    /// `z·e^{−ns/2}·cap^{−n}·q(z)` with escape parameter `s`.
    Leja { s: f64 },
    /// `z·(q(z)/N)^k` with `N = (1+δ)‖q‖_E`.
    Hilbert { k: u32 },
}

/// Relative slack `δ` making the normalized lemniscate polynomial strictly below 1 on `E`.
pub const HILBERT_SLACK: f64 = 1e-3;

/// Default iteration budget for classification.
pub const DEFAULT_MAX_ITER: u32 = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct ShapedPolynomial {
    pub construction: Construction,
    /// Roots in the centered plane frame.
    pub roots: Vec<Complex64>,
    /// Natural log of the constant factor.
    pub log_prefactor: f64,
    pub log_cap_estimate: f64,
    pub bounds: RadialBounds,
    trap_radius: f64,
}

/// Outcome of iterating a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub escaped: bool,
    /// Step at which the orbit left the escape disk, or `max_iter` if it never did.
    pub iterations: u32,
}

impl ShapedPolynomial {
    fn assemble(
        construction: Construction,
        roots: Vec<Complex64>,
        log_prefactor: f64,
        log_cap_estimate: f64,
        bounds: RadialBounds,
    ) -> Result<Self, PolyError> {
        if roots.is_empty() {
            return Err(PolyError::NoRoots);
        }
        if !(bounds.inner > 0.0 && bounds.inner <= bounds.outer && bounds.outer.is_finite()) {
            return Err(PolyError::InvalidBounds {
                inner: bounds.inner,
                outer: bounds.outer,
            });
        }
        if !log_prefactor.is_finite() {
            return Err(PolyError::Format(format!("non-finite log_prefactor {log_prefactor}")));
        }
        let mut p = ShapedPolynomial {
            construction,
            roots,
            log_prefactor,
            log_cap_estimate,
            bounds,
            trap_radius: 0.0,
        };
        p.trap_radius = p.certify_trap_radius();
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.roots.len()
    }

    fn power(&self) -> u32 {
        match self.construction {
            Construction::Leja { .. } => 1,
            Construction::Hilbert { k } => k,
        }
    }

    pub fn degree(&self) -> usize {
        self.n() * self.power() as usize + 1
    }

    pub fn s(&self) -> Option<f64> {
        match self.construction {
            Construction::Leja { s } => Some(s),
            Construction::Hilbert { .. } => None,
        }
    }

    /// Bailout radius: `R(E)e^s` for the Leja construction, `R(E)` for the lemniscate one.
    pub fn escape_radius(&self) -> f64 {
        match self.construction {
            Construction::Leja { s } => self.bounds.outer * s.exp(),
            Construction::Hilbert { .. } => self.bounds.outer,
        }
    }

    /// Green's-function level of the outer containment target: `s` for the
    /// Leja construction, the lemniscate level `log N / n − log cap` otherwise.
    pub fn outer_level(&self) -> f64 {
        match self.construction {
            Construction::Leja { s } => s,
            Construction::Hilbert { k } => {
                -self.log_prefactor / (k as f64 * self.n() as f64) - self.log_cap_estimate
            }
        }
    }

    /// Radius `ρ` with `P(D̄(0,ρ)) ⊂ D(0,ρ)`, certified at construction time
    /// (0 when no candidate radius could be certified). Orbits entering this
    /// disk are bounded.
    pub fn trap_radius(&self) -> f64 {
        self.trap_radius
    }

    /// Tries `ρ = t·r(E)` for decreasing `t`. On `|z| = ρ` the maximum of `|P|`
    /// is bounded by the sampled maximum over `M` equispaced points divided
    /// by `1 − π·deg/M` (Bernstein's inequality for the derivative).
    fn certify_trap_radius(&self) -> f64 {
        let deg = self.degree() as f64;
        let samples = (32 * self.degree()).max(64);
        let slack = (1.0 - PI * deg / samples as f64).ln();
        for t in [0.9, 0.6, 0.3, 0.1] {
            let rho = t * self.bounds.inner;
            let mut worst = f64::NEG_INFINITY;
            for k in 0..samples {
                let z = Complex64::from_polar(rho, 2.0 * PI * k as f64 / samples as f64);
                worst = worst.max(self.eval(z).ln_abs());
                if worst - slack >= rho.ln() {
                    break;
                }
            }
            if worst - slack < rho.ln() {
                return rho;
            }
        }
        0.0
    }

    /// Exponent-tracked evaluation: the root product is accumulated with
    /// binary renormalization, then `z` and `e^{log_prefactor}` are folded in.
    pub fn eval(&self, z: Complex64) -> ScaledComplex {
        let mut acc = ScaledComplex::ONE;
        for &r in &self.roots {
            acc.mul_complex(z - r);
            if acc.is_zero() {
                return ScaledComplex::ZERO;
            }
        }
        let power = self.power();
        if power > 1 {
            acc = acc.powi(power);
        }
        acc.mul_complex(z);
        if acc.is_zero() {
            return ScaledComplex::ZERO;
        }
        acc.scale_by_exp(self.log_prefactor);
        acc
    }

    /// `log|∏(z − z_j)|`, `-∞` at a root.
    pub fn log_abs_roots(&self, z: Complex64) -> f64 {
        let mut acc = ScaledComplex::ONE;
        for &r in &self.roots {
            acc.mul_complex(z - r);
        }
        acc.ln_abs()
    }

    /// Empirical Green's function of the roots, `max(0, log|q(z)|/n − log cap)`.
    pub fn green(&self, z: Complex64) -> f64 {
        (self.log_abs_roots(z) / self.n() as f64 - self.log_cap_estimate).max(0.0)
    }

    /// Iterates `z ← P(z)` until `|z|` exceeds the escape radius or
    /// `max_iter` steps have been taken.
    pub fn classify(&self, z: Complex64, max_iter: u32) -> Result<Orbit, PolyError> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        if max_iter == 0 {
            return Err(PolyError::ZeroIterations);
        }
        Ok(self.classify_unchecked(z, max_iter))
    }

    pub(crate) fn classify_unchecked(&self, mut z: Complex64, max_iter: u32) -> Orbit {
        let log_escape = self.escape_radius().ln();
        let trap_sq = self.trap_radius * self.trap_radius;
        for step in 1..=max_iter {
            let w = self.eval(z);
            if w.ln_abs() > log_escape {
                return Orbit {
                    escaped: true,
                    iterations: step,
                };
            }
            z = w.to_complex();
            if z.norm_sqr() < trap_sq {
                break;
            }
        }
        Orbit {
            escaped: false,
            iterations: max_iter,
        }
    }

    pub fn to_file(&self) -> PolynomialFile {
        let (kind, s, k) = match self.construction {
            Construction::Leja { s } => ("leja", Some(s), None),
            Construction::Hilbert { k } => ("hilbert", None, Some(k)),
        };
        PolynomialFile {
            kind: kind.to_string(),
            n: self.n(),
            s,
            k,
            log_prefactor: self.log_prefactor,
            log_cap_estimate: self.log_cap_estimate,
            center_offset: self.bounds.center_offset,
            bounds: BoundsFile {
                inner: self.bounds.inner,
                outer: self.bounds.outer,
            },
            roots: self.roots.clone(),
        }
    }

    pub fn from_file(file: PolynomialFile) -> Result<Self, PolyError> {
        let construction = match (file.kind.as_str(), file.s, file.k) {
            ("leja", Some(s), _) => Construction::Leja { s },
            ("hilbert", _, Some(k)) => Construction::Hilbert { k },
            (kind, _, _) => return Err(PolyError::Format(format!("unknown or incomplete kind {kind:?}"))),
        };
        if file.n != file.roots.len() {
            return Err(PolyError::Format(format!(
                "n = {} but {} roots listed",
                file.n,
                file.roots.len()
            )));
        }
        let bounds = RadialBounds {
            inner: file.bounds.inner,
            outer: file.bounds.outer,
            center_offset: file.center_offset,
        };
        Self::assemble(construction, file.roots, file.log_prefactor, file.log_cap_estimate, bounds)
    }
}

/// On-disk polynomial schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFile {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub log_prefactor: f64,
    pub log_cap_estimate: f64,
    #[serde(with = "complex_serde")]
    pub center_offset: Complex64,
    pub bounds: BoundsFile,
    #[serde(with = "complex_serde::vec")]
    pub roots: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsFile {
    pub inner: f64,
    pub outer: f64,
}

/// Assembles `P̃_{n,s}` from a Leja sequence; `SLevel::Auto` picks `s = 1/n`.
pub fn build(seq: &LejaSequence, bounds: RadialBounds, s: SLevel) -> Result<ShapedPolynomial, PolyError> {
    if seq.points.is_empty() {
        return Err(PolyError::NoRoots);
    }
    let n = seq.n as f64;
    let s = match s {
        SLevel::Auto => 1.0 / n,
        SLevel::Value(v) => v,
    };
    if !(s > 0.0 && s.is_finite()) {
        return Err(PolyError::InvalidS(s));
    }
    let log_prefactor = -n * s / 2.0 - n * seq.log_cap_estimate;
    ShapedPolynomial::assemble(
        Construction::Leja { s },
        seq.points.clone(),
        log_prefactor,
        seq.log_cap_estimate,
        bounds,
    )
}

/// Lemniscate construction `P_k(z) = z·Q(z)^k` with `Q = q/((1+δ)‖q‖_E)`,
/// `q` the monic polynomial on the Leja points.
pub fn hilbert_build(
    seq: &LejaSequence,
    boundary: &BoundarySample,
    bounds: RadialBounds,
    k: u32,
) -> Result<ShapedPolynomial, PolyError> {
    if k < 1 {
        return Err(PolyError::InvalidPower(k));
    }
    let log_norm = sup_norm(&seq.points, boundary)? + HILBERT_SLACK.ln_1p();
    ShapedPolynomial::assemble(
        Construction::Hilbert { k },
        seq.points.clone(),
        -(k as f64) * log_norm,
        seq.log_cap_estimate,
        bounds,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    fn le(lhs: f64, rhs: f64) -> Self {
        Inequality {
            holds: lhs <= rhs,
            lhs,
            rhs,
        }
    }
}

/// The four sufficient conditions for `E ⊂ int K(P̃) ⊂ E_s`, evaluated in
/// log-space. Each side is stored as the log of the original quantity where
/// the original is a product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `1/n ≤ s`.
    pub c1: Inequality,
    /// `C(E)·log n/√n ≤ s/4` with `C(E)` taken as 1.
    pub c2: Inequality,
    /// `ns/4 ≥ log R + s − log r`, stored as `rhs ≤ lhs` flipped to `lhs ≤ rhs`.
    pub c3: Inequality,
    /// `(log R + s − log r)/n + (log a_n)/n − log cap ≤ s/2`.
    pub c4: Inequality,
    /// Always true: `c2` is reported, never enforced.
    pub c2_informational: bool,
}

impl ConditionReport {
    pub fn passes(&self) -> bool {
        self.c1.holds && self.c3.holds && self.c4.holds
    }
}

pub fn check_conditions(p: &ShapedPolynomial, seq: &LejaSequence) -> Result<ConditionReport, PolyError> {
    let s = p.s().ok_or(PolyError::NotLeja)?;
    let n = seq.n as f64;
    let log_ratio = p.bounds.outer.ln() + s - p.bounds.inner.ln();
    Ok(ConditionReport {
        c1: Inequality::le(1.0 / n, s),
        c2: Inequality::le(n.ln() / n.sqrt(), s / 4.0),
        c3: Inequality::le(log_ratio, n * s / 4.0),
        c4: Inequality::le(log_ratio / n + (seq.log_a_n() / n - seq.log_cap_estimate), s / 2.0),
        c2_informational: true,
    })
}
