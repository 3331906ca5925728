//! Discrete potential theory on boundary samples: Leja sequences, exhaustive
//! Fekete tuples for tiny `n`, capacity estimates, sup norms and the
//! empirical Green's function.
//!
//! Every product of distances is accumulated as a sum of logarithms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex_serde;
use crate::geometry::BoundarySample;
use crate::raster::PixelGrid;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("need n >= 2 Leja points, got {0}")]
    TooFewPoints(usize),
    #[error("{requested} points requested but only {available} candidates (need n + 1)")]
    NotEnoughCandidates { requested: usize, available: usize },
    #[error("seed index {seed} out of range for {available} candidates")]
    SeedOutOfRange { seed: usize, available: usize },
    #[error("all remaining candidates coincide with chosen points at step {0}")]
    Degenerate(usize),
    #[error("exhaustive Fekete search over C({candidates}, {n}) subsets exceeds the budget")]
    BudgetExceeded { candidates: usize, n: usize },
    #[error("empty input")]
    Empty,
    #[error("degenerate sampling window")]
    DegenerateWindow,
}

#[inline]
fn log_dist(a: Complex64, b: Complex64) -> f64 {
    0.5 * (a - b).norm_sqr().ln()
}

/// Greedy Leja points `z_1..z_n` with the running log-products.
///
/// `log_a[k-1] = Σ_{j≤k} log|z_{k+1} − z_j|` for `k = 1..n−1`, and the final
/// entry `log a_n` is the maximum of `Σ_{j≤n} log|z − z_j|` over the
/// remaining candidates. `log_cap_estimate = log_a[n−1] / n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LejaSequence {
    pub n: usize,
    #[serde(with = "complex_serde::vec")]
    pub points: Vec<Complex64>,
    pub log_a: Vec<f64>,
    pub log_cap_estimate: f64,
    pub seed_index: usize,
}

impl LejaSequence {
    /// Assembles a sequence from precomputed parts (e.g. for `n = 1` or
    /// externally chosen points); `log_a` must end with `log a_n`.
    pub fn from_parts(points: Vec<Complex64>, log_a: Vec<f64>, seed_index: usize) -> Self {
        let n = points.len();
        let log_cap_estimate = log_a.last().copied().unwrap_or(f64::NAN) / n as f64;
        LejaSequence {
            n,
            points,
            log_a,
            log_cap_estimate,
            seed_index,
        }
    }

    /// `log a_n`, the maximized final log-product.
    pub fn log_a_n(&self) -> f64 {
        *self.log_a.last().expect("nonempty sequence")
    }

    pub fn capacity_estimate(&self) -> f64 {
        self.log_cap_estimate.exp()
    }

    /// `(1/n) Σ log|z − z_j| − log cap`, unclamped (`-∞` at a Leja point).
    pub fn potential_gap(&self, z: Complex64) -> f64 {
        let sum: f64 = self.points.iter().map(|&p| log_dist(z, p)).sum();
        sum / self.n as f64 - self.log_cap_estimate
    }

    /// Empirical Green's function with pole at infinity, clamped at 0.
    pub fn green(&self, z: Complex64) -> GreenValue {
        let raw = self.potential_gap(z);
        if raw == f64::NEG_INFINITY {
            return GreenValue {
                value: 0.0,
                at_root: true,
            };
        }
        GreenValue {
            value: raw.max(0.0),
            at_root: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    /// `z` coincides with a Leja point; `value` is then 0.
    pub at_root: bool,
}

/// Leja points on the boundary samples, starting from `seed_index`.
///
/// Chosen candidates leave the pool; ties go to the lowest candidate index.
pub fn compute_leja(boundary: &BoundarySample, n: usize, seed_index: usize) -> Result<LejaSequence, PotentialError> {
    let cands = &boundary.points;
    if n < 2 {
        return Err(PotentialError::TooFewPoints(n));
    }
    if cands.len() < n + 1 {
        return Err(PotentialError::NotEnoughCandidates {
            requested: n,
            available: cands.len(),
        });
    }
    if seed_index >= cands.len() {
        return Err(PotentialError::SeedOutOfRange {
            seed: seed_index,
            available: cands.len(),
        });
    }

    let mut acc = vec![0.0f64; cands.len()];
    let mut taken = vec![false; cands.len()];
    let mut points = Vec::with_capacity(n);
    let mut log_a = Vec::with_capacity(n);
    let mut last = seed_index;
    taken[last] = true;
    points.push(cands[last]);

    for step in 1..=n {
        let newest = cands[last];
        let (best, best_val) = acc
            .par_iter_mut()
            .zip(cands.par_iter())
            .zip(taken.par_iter())
            .enumerate()
            .map(|(i, ((a, &c), &t))| {
                if t {
                    (i, f64::NEG_INFINITY)
                } else {
                    *a += log_dist(c, newest);
                    (i, *a)
                }
            })
            .reduce(
                || (usize::MAX, f64::NEG_INFINITY),
                |x, y| {
                    if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                        y
                    } else {
                        x
                    }
                },
            );
        if best == usize::MAX || best_val == f64::NEG_INFINITY {
            return Err(PotentialError::Degenerate(step));
        }
        log_a.push(best_val);
        if step < n {
            taken[best] = true;
            points.push(cands[best]);
            last = best;
        }
    }
    Ok(LejaSequence::from_parts(points, log_a, seed_index))
}

/// A maximizer of `∏_{j<k}|w_j − w_k|` over `n`-subsets of the candidates.
#[derive(Clone, Debug, PartialEq)]
pub struct FeketeTuple {
    pub points: Vec<Complex64>,
    pub indices: Vec<usize>,
    pub log_product: f64,
    /// `δ_n = exp(2·log_product / (n(n−1)))`.
    pub n_diameter: f64,
}

/// Upper limit on the number of subsets the exhaustive search visits.
pub const FEKETE_SUBSET_BUDGET: u64 = 1_000_000_000;

fn binomial(m: usize, k: usize) -> u64 {
    let k = k.min(m - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((m - i) as u64) / (i as u64 + 1))
}

/// Exhaustive Fekete search for `n ≤ 7` points among at most 64 candidates.
/// Ties resolve to the lexicographically first index tuple.
pub fn fekete_bruteforce(candidates: &[Complex64], n: usize) -> Result<FeketeTuple, PotentialError> {
    let m = candidates.len();
    if n < 2 {
        return Err(PotentialError::TooFewPoints(n));
    }
    if m < n {
        return Err(PotentialError::NotEnoughCandidates {
            requested: n,
            available: m,
        });
    }
    if n > 7 || m > 64 || binomial(m, n) > FEKETE_SUBSET_BUDGET {
        return Err(PotentialError::BudgetExceeded { candidates: m, n });
    }
    let logd: Vec<Vec<f64>> = candidates
        .iter()
        .map(|&a| candidates.iter().map(|&b| log_dist(a, b)).collect())
        .collect();

    struct Search<'a> {
        logd: &'a [Vec<f64>],
        n: usize,
        stack: Vec<usize>,
        best: Vec<usize>,
        best_val: f64,
    }
    impl Search<'_> {
        fn walk(&mut self, from: usize, partial: f64) {
            let m = self.logd.len();
            if self.stack.len() == self.n {
                let tol = 1e-12 * (1.0 + self.best_val.abs());
                if self.best.is_empty() || partial > self.best_val + tol {
                    self.best_val = partial;
                    self.best = self.stack.clone();
                }
                return;
            }
            let need = self.n - self.stack.len();
            for i in from..=(m - need) {
                let add: f64 = self.stack.iter().map(|&j| self.logd[i][j]).sum();
                if add == f64::NEG_INFINITY {
                    continue;
                }
                self.stack.push(i);
                self.walk(i + 1, partial + add);
                self.stack.pop();
            }
        }
    }
    let mut search = Search {
        logd: &logd,
        n,
        stack: Vec::with_capacity(n),
        best: Vec::new(),
        best_val: f64::NEG_INFINITY,
    };
    search.walk(0, 0.0);
    if search.best.is_empty() {
        return Err(PotentialError::Empty);
    }
    let points: Vec<Complex64> = search.best.iter().map(|&i| candidates[i]).collect();
    let n_diameter = if n == 2 {
        (points[0] - points[1]).norm()
    } else {
        (2.0 * search.best_val / (n * (n - 1)) as f64).exp()
    };
    Ok(FeketeTuple {
        points,
        indices: search.best,
        log_product: search.best_val,
        n_diameter,
    })
}

/// `max_{z ∈ boundary} Σ log|z − root|`, the log of the sup norm of the monic
/// polynomial with the given roots over the sampled set.
pub fn sup_norm(roots: &[Complex64], boundary: &BoundarySample) -> Result<f64, PotentialError> {
    if boundary.points.is_empty() {
        return Err(PotentialError::Empty);
    }
    Ok(boundary
        .points
        .par_iter()
        .map(|&z| roots.iter().map(|&r| log_dist(z, r)).sum::<f64>())
        .reduce(|| f64::NEG_INFINITY, f64::max))
}

/// Sampled Green's function over a pixel grid.
///
/// Cells where the unclamped estimate is negative (the estimator places them
/// in `E`) hold `-∞`; all other values are nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialField {
    pub grid: PixelGrid,
    pub values: Vec<f64>,
    pub s_level: f64,
    /// Cells with `g ≤ 1/n`, where the potential approximation carries no rate guarantee.
    pub low_confidence: Vec<bool>,
    pub n: usize,
}

impl PotentialField {
    /// Membership of each cell in the sampled `E_s`.
    pub fn level_set(&self) -> Vec<bool> {
        self.values.iter().map(|&g| g <= self.s_level).collect()
    }
}

/// Discrete `E_s` sampling over a `resolution.0 × resolution.1` grid spanning
/// the rectangle with corners `lower_left` and `upper_right`.
pub fn field_sample(
    seq: &LejaSequence,
    lower_left: Complex64,
    upper_right: Complex64,
    resolution: (usize, usize),
    s: f64,
) -> Result<PotentialField, PotentialError> {
    let (w, h) = resolution;
    let span = upper_right - lower_left;
    if w < 2 || h < 2 || !(span.re > 0.0 && span.im > 0.0) {
        return Err(PotentialError::DegenerateWindow);
    }
    if (span.re / w as f64 - span.im / h as f64).abs() > 1e-9 * span.re {
        return Err(PotentialError::DegenerateWindow);
    }
    let grid = PixelGrid {
        width: w,
        height: h,
        origin: Complex64::new(lower_left.re, upper_right.im),
        pixel_size: span.re / w as f64,
    };
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let raw = seq.potential_gap(grid.center_of_index(i));
            if raw < 0.0 || raw == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                raw
            }
        })
        .collect();
    let inv_n = 1.0 / seq.n as f64;
    let low_confidence = values.iter().map(|&g| g <= inv_n).collect();
    Ok(PotentialField {
        grid,
        values,
        s_level: s,
        low_confidence,
        n: seq.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(m: usize, radius: f64) -> BoundarySample {
        let points: Vec<Complex64> = (0..m)
            .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / m as f64))
            .collect();
        BoundarySample {
            spacing: 2.0 * radius * (PI / m as f64).sin(),
            points,
        }
    }

    fn segment(m: usize, half: f64) -> BoundarySample {
        let points = (0..m)
            .map(|k| Complex64::new(-half + 2.0 * half * k as f64 / (m - 1) as f64, 0.0))
            .collect();
        BoundarySample {
            points,
            spacing: 2.0 * half / (m - 1) as f64,
        }
    }

    #[test]
    fn circle_capacity() {
        let seq = compute_leja(&circle(10_000, 1.0), 200, 0).unwrap();
        assert!((seq.capacity_estimate() - 1.0).abs() <= 0.02, "{}", seq.capacity_estimate());
        assert_eq!(seq.log_a.len(), 200);
        assert_eq!(seq.points.len(), 200);
    }

    #[test]
    fn segment_capacity_is_quarter_length() {
        let seq = compute_leja(&segment(10_000, 2.0), 400, 0).unwrap();
        assert!((seq.capacity_estimate() - 1.0).abs() <= 0.05, "{}", seq.capacity_estimate());
    }

    #[test]
    fn second_point_is_farthest() {
        let b = BoundarySample {
            points: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 3.0),
                Complex64::new(-2.0, 0.0),
            ],
            spacing: 1.0,
        };
        let seq = compute_leja(&b, 2, 0).unwrap();
        assert_eq!(seq.points[1], Complex64::new(0.0, 3.0));
        assert!((seq.log_a[0] - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn leja_errors() {
        let b = circle(5, 1.0);
        assert_eq!(compute_leja(&b, 1, 0), Err(PotentialError::TooFewPoints(1)));
        assert!(matches!(compute_leja(&b, 5, 0), Err(PotentialError::NotEnoughCandidates { .. })));
        assert!(matches!(compute_leja(&b, 2, 9), Err(PotentialError::SeedOutOfRange { .. })));
        let dup = BoundarySample {
            points: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            spacing: 1.0,
        };
        assert_eq!(compute_leja(&dup, 2, 0), Err(PotentialError::Degenerate(2)));
    }

    #[test]
    fn leja_points_distinct_and_from_candidates() {
        let b = circle(500, 1.3);
        let seq = compute_leja(&b, 60, 7).unwrap();
        for (i, p) in seq.points.iter().enumerate() {
            assert!(b.points.contains(p));
            assert!(!seq.points[i + 1..].contains(p));
        }
        assert_eq!(seq.points[0], b.points[7]);
    }

    #[test]
    fn running_products_bound_capacity_from_above() {
        let seq = compute_leja(&circle(4000, 1.0), 300, 0).unwrap();
        for (k, la) in seq.log_a.iter().enumerate() {
            assert!(la / (k + 1) as f64 >= -1e-12, "k={k}");
        }
    }

    #[test]
    fn seed_robustness_on_disk() {
        let b = circle(8000, 1.0);
        let a = compute_leja(&b, 400, 0).unwrap().capacity_estimate();
        let c = compute_leja(&b, 400, 3001).unwrap().capacity_estimate();
        assert!((a - c).abs() / a <= 0.02);
    }

    #[test]
    fn fekete_square_on_16_gon() {
        let cands = circle(16, 1.0).points;
        let t = fekete_bruteforce(&cands, 4).unwrap();
        let mut idx = t.indices.clone();
        idx.sort();
        for k in 1..4 {
            assert_eq!(idx[k] - idx[k - 1], 4);
        }
        // Inscribed square: four sides of √2 and two diagonals of 2 give (√2)⁴·2² = 16.
        assert!((t.log_product - 16f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fekete_pair_is_diameter() {
        let cands = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, 0.9),
            Complex64::new(-1.2, 0.4),
            Complex64::new(0.8, -0.7),
        ];
        let t = fekete_bruteforce(&cands, 2).unwrap();
        let diam = cands
            .iter()
            .flat_map(|a| cands.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        assert_eq!(t.n_diameter, diam);
    }

    #[test]
    fn fekete_three_collinear() {
        let cands = vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let t = fekete_bruteforce(&cands, 3).unwrap();
        assert_eq!(t.indices, vec![0, 1, 2]);
        assert!((t.log_product - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn fekete_budget_guard() {
        let cands = circle(65, 1.0).points;
        assert!(matches!(fekete_bruteforce(&cands, 3), Err(PotentialError::BudgetExceeded { .. })));
        let cands = circle(20, 1.0).points;
        assert!(matches!(fekete_bruteforce(&cands, 8), Err(PotentialError::BudgetExceeded { .. })));
    }

    #[test]
    fn fekete_diameters_nonincreasing() {
        // An irregular candidate set: perturbed ellipse.
        let cands: Vec<Complex64> = (0..24)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 24.0;
                Complex64::new(1.5 * t.cos() + 0.1 * (3.0 * t).sin(), t.sin())
            })
            .collect();
        let mut prev = f64::INFINITY;
        for n in 2..=6 {
            let d = fekete_bruteforce(&cands, n).unwrap().n_diameter;
            assert!(d <= prev + 1e-12, "n={n}");
            prev = d;
        }
    }

    #[test]
    fn green_on_disk() {
        let seq = compute_leja(&circle(10_000, 1.0), 200, 0).unwrap();
        let g = seq.green(Complex64::new(2.0, 0.0));
        assert!((g.value - 2f64.ln()).abs() <= 0.05);
        let far = Complex64::new(0.0, 1e6);
        let expected = 1e6f64.ln() - seq.log_cap_estimate;
        assert!((seq.green(far).value - expected).abs() < 1e-6);
        let at = seq.green(seq.points[5]);
        assert!(at.at_root);
        assert_eq!(at.value, 0.0);
        // On the sampled boundary.
        let on = seq.green(Complex64::from_polar(1.0, 0.123));
        assert!(on.value <= 0.1);
    }

    #[test]
    fn field_levels_on_disk() {
        let seq = compute_leja(&circle(10_000, 1.0), 200, 0).unwrap();
        let ll = Complex64::new(-2.0, -2.0);
        let ur = Complex64::new(2.0, 2.0);
        let field = field_sample(&seq, ll, ur, (200, 200), 0.1).unwrap();
        let level = field.level_set();
        let target = 0.1f64.exp();
        let ps = field.grid.pixel_size;
        for (i, &inside) in level.iter().enumerate() {
            let r = field.grid.center_of_index(i).norm();
            if (r - target).abs() > 2.0 * ps + 0.01 {
                assert_eq!(inside, r < target, "r={r}");
            }
        }
        for &g in &field.values {
            assert!(g == f64::NEG_INFINITY || g >= 0.0);
        }

        let all = field_sample(&seq, ll, ur, (50, 50), 10.0).unwrap();
        assert!(all.level_set().iter().all(|&b| b));

        let zero = field_sample(&seq, ll, ur, (200, 200), 0.0).unwrap();
        let zero_set = zero.level_set();
        let (mut agree, mut total) = (0usize, 0usize);
        for (i, &inside) in zero_set.iter().enumerate() {
            let r = zero.grid.center_of_index(i).norm();
            total += 1;
            agree += usize::from(inside == (r <= 1.0));
        }
        assert!(agree as f64 / total as f64 > 0.99);
    }

    #[test]
    fn field_rejects_degenerate_window() {
        let seq = compute_leja(&circle(100, 1.0), 10, 0).unwrap();
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(field_sample(&seq, z, z, (10, 10), 0.1), Err(PotentialError::DegenerateWindow));
        assert_eq!(
            field_sample(&seq, z, Complex64::new(1.0, 1.0), (1, 10), 0.1),
            Err(PotentialError::DegenerateWindow)
        );
    }

    #[test]
    fn sup_norm_identities() {
        let b = circle(2000, 1.0);
        let seq = compute_leja(&b, 50, 0).unwrap();
        let sup = sup_norm(&seq.points, &b).unwrap();
        assert!((sup - seq.log_a_n()).abs() < 1e-12);

        let zero = sup_norm(&[Complex64::new(0.0, 0.0)], &b).unwrap();
        assert!(zero.abs() < 1e-15);

        let fek = fekete_bruteforce(&circle(16, 1.0).points, 4).unwrap();
        let s = sup_norm(&fek.points, &b).unwrap();
        assert!(s / 4.0 <= fek.n_diameter.ln() + 1e-12);
        assert_eq!(
            sup_norm(&[], &BoundarySample { points: vec![], spacing: 0.0 }),
            Err(PotentialError::Empty)
        );
    }

    #[test]
    fn json_round_trip_is_bit_identical() {
        let seq = compute_leja(&circle(300, 1.1), 40, 3).unwrap();
        let text = serde_json::to_string(&seq).unwrap();
        let back: LejaSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back, seq);
        for (a, b) in back.log_a.iter().zip(&seq.log_a) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
