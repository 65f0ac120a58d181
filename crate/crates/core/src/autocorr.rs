//! Empirical autocorrelation coefficients `η(z)`, the autocorrelation
//! pseudo-metric `ϱ`, ε-almost periods, and finite-volume checks of the
//! translation-boundedness and uniform-discreteness assumptions.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;

use crate::algebra::ModuleElement;
use crate::comb::{Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::fmt_float;

/// Quantum used to key differences of real (inexact) positions.
const REAL_KEY_QUANTUM: f64 = 1e-9;

/// Exact identity of a difference `x − y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiffKey {
    Integer(i64),
    Module(ModuleElement),
    /// Real difference rounded to a multiple of 1e-9.
    Quantized(i64),
}

impl DiffKey {
    fn neg(self) -> Self {
        match self {
            DiffKey::Integer(z) => DiffKey::Integer(-z),
            DiffKey::Module(z) => DiffKey::Module(-z),
            DiffKey::Quantized(z) => DiffKey::Quantized(-z),
        }
    }
}

/// One autocorrelation coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficient {
    pub z: f64,
    pub key: DiffKey,
    pub eta: Complex64,
}

/// Finite-radius estimate of the autocorrelation coefficients of a comb.
#[derive(Clone, Debug)]
pub struct AutocorrelationEstimate {
    coefficients: Vec<Coefficient>,
    radius: f64,
    volume: f64,
    max_diff: f64,
}

impl AutocorrelationEstimate {
    /// Coefficients sorted by `z`; differences never observed are absent.
    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coefficients
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn max_diff(&self) -> f64 {
        self.max_diff
    }

    /// `η(0)`, real and non-negative.
    pub fn zero_coefficient(&self) -> f64 {
        self.lookup(0.0).re
    }

    /// `η(z)`, zero for differences that were never observed.
    pub fn eta(&self, z: f64) -> Complex64 {
        self.lookup(z)
    }

    fn lookup(&self, z: f64) -> Complex64 {
        let tol = 1e-9 * (1.0 + z.abs());
        let i = self.coefficients.partition_point(|c| c.z < z - tol);
        match self.coefficients.get(i) {
            Some(c) if (c.z - z).abs() <= tol => c.eta,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// `η` by exact key.
    pub fn eta_exact(&self, key: DiffKey) -> Complex64 {
        self.coefficients
            .iter()
            .find(|c| c.key == key)
            .map_or(Complex64::new(0.0, 0.0), |c| c.eta)
    }

    /// Differences with `η(z) ≠ 0` (the essential difference set at this radius).
    pub fn essential_support(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .filter(|c| c.eta.norm() > 0.0)
            .map(|c| c.z)
            .collect()
    }

    /// Writes `z,re_eta,im_eta` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        w.write_record(["z", "re_eta", "im_eta"])?;
        for c in &self.coefficients {
            w.write_record([fmt_float(c.z), fmt_float(c.eta.re), fmt_float(c.eta.im)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn key_of(positions: &Positions, coords: &[f64], j: usize, i: usize) -> DiffKey {
    match positions {
        Positions::Integer(v) => DiffKey::Integer(v[j] - v[i]),
        Positions::Module { elements, .. } => DiffKey::Module(elements[j] - elements[i]),
        _ => DiffKey::Quantized(((coords[j] - coords[i]) / REAL_KEY_QUANTUM).round() as i64),
    }
}

/// Estimates `η(z) = (1/vol B_n) Σ_{x−y=z} v(x) conj(v(y))` for all observed
/// differences with `|z| ≤ max_diff`.
///
/// Each unordered pair contributes to `z` and `−z` with conjugate terms, so
/// the estimate is exactly Hermitian.
pub fn estimate_autocorrelation(
    comb: &WeightedComb,
    max_diff: f64,
) -> Result<AutocorrelationEstimate> {
    comb.require_dim(1)?;
    if comb.is_empty() {
        return Err(Error::EmptyInput("comb has no points"));
    }
    if !(max_diff >= 0.0) || max_diff > 2.0 * comb.radius() {
        return Err(Error::OutOfRange(format!(
            "max_diff {max_diff} must lie in [0, 2·radius = {}]",
            2.0 * comb.radius()
        )));
    }
    let coords = comb.coords()?;
    let weights = comb.weights();
    let positions = comb.positions();
    let reach = max_diff + 1e-9 * (1.0 + max_diff);

    let mut sums: HashMap<DiffKey, (f64, Complex64)> = HashMap::new();
    let zero_key = key_of(positions, &coords, 0, 0);
    let diag: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
    sums.insert(zero_key, (0.0, Complex64::new(diag, 0.0)));
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let z = coords[j] - coords[i];
            if z > reach {
                break;
            }
            let key = key_of(positions, &coords, j, i);
            let term = weights[j] * weights[i].conj();
            let e = sums.entry(key).or_insert((z, Complex64::new(0.0, 0.0)));
            e.1 += term;
            let e = sums
                .entry(key.neg())
                .or_insert((-z, Complex64::new(0.0, 0.0)));
            e.1 += term.conj();
        }
    }
    let volume = comb.volume();
    let mut coefficients: Vec<Coefficient> = sums
        .into_iter()
        .map(|(key, (z, s))| Coefficient {
            z,
            key,
            eta: s / volume,
        })
        .collect();
    coefficients.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.key.cmp(&b.key)));
    Ok(AutocorrelationEstimate {
        coefficients,
        radius: comb.radius(),
        volume,
        max_diff,
    })
}

/// `ϱ(s, t) = |1 − η(s−t)/η(0)|^{1/2}`, with `η = 0` off the observed
/// difference set.
pub fn pseudo_metric(est: &AutocorrelationEstimate, s: f64, t: f64) -> Result<f64> {
    let eta0 = est.zero_coefficient();
    if !(eta0 > 0.0) {
        return Err(Error::DegenerateAutocorrelation);
    }
    let z = s - t;
    if z.abs() > est.max_diff * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::OutOfRange(format!(
            "difference {z} exceeds the estimated range ±{}",
            est.max_diff
        )));
    }
    Ok((Complex64::new(1.0, 0.0) - est.lookup(z) / eta0)
        .norm()
        .sqrt())
}

/// `P_ε ∩ candidates = {t | ϱ(t, 0) < ε}`, sorted. With no candidates given,
/// the observed difference set (which contains 0) is used.
pub fn epsilon_almost_periods(
    est: &AutocorrelationEstimate,
    epsilon: f64,
    candidates: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if !(epsilon > 0.0 && epsilon <= std::f64::consts::SQRT_2) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, √2], got {epsilon}"
        )));
    }
    let default: Vec<f64>;
    let candidates = match candidates {
        Some(c) => c,
        None => {
            default = est.coefficients.iter().map(|c| c.z).collect();
            &default
        }
    };
    let mut out = Vec::new();
    for &t in candidates {
        if pseudo_metric(est, t, 0.0)? < epsilon {
            out.push(t);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Largest gap between consecutive points inside `[lo, hi]`, counting the
/// gaps to both window edges. Infinite if no point lies in the window.
pub fn max_gap(points: &[f64], window: (f64, f64)) -> f64 {
    let (lo, hi) = window;
    let inside: Vec<f64> = points
        .iter()
        .copied()
        .filter(|x| *x >= lo && *x <= hi)
        .collect();
    let (Some(first), Some(last)) = (inside.first(), inside.last()) else {
        return f64::INFINITY;
    };
    let interior = inside
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    interior.max(first - lo).max(hi - last)
}

/// Outcome of the finite-volume assumption checks.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    /// `sup_t Σ_{x ∈ [t, t+1)} |v(x)|`.
    pub translation_bound: f64,
    /// Smallest distance between distinct points of the essential difference set.
    pub min_essential_separation: f64,
    /// Whether balls of radius `r` around the essential differences are disjoint.
    pub uniformly_discrete: bool,
}

/// Checks translation boundedness (unit sliding window) and uniform
/// discreteness of the essential difference set at separation `2r`.
pub fn check_assumptions(
    comb: &WeightedComb,
    est: &AutocorrelationEstimate,
    r: f64,
) -> Result<AssumptionReport> {
    let coords = comb.coords()?;
    let weights = comb.weights();
    let mut translation_bound = 0.0f64;
    let mut window_sum = 0.0f64;
    let mut hi = 0;
    // A maximal half-open window can always be slid right until its left
    // edge hits a point.
    for lo in 0..coords.len() {
        while hi < coords.len() && coords[hi] < coords[lo] + 1.0 {
            window_sum += weights[hi].norm();
            hi += 1;
        }
        translation_bound = translation_bound.max(window_sum);
        window_sum -= weights[lo].norm();
    }
    let support = est.essential_support();
    let min_essential_separation = support
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(AssumptionReport {
        translation_bound,
        min_essential_separation,
        uniformly_discrete: min_essential_separation >= 2.0 * r,
    })
}

/// Result of comparing estimates at radii `n` and `2n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub max_deviation: f64,
    pub converged: bool,
}

/// Operational convergence check: `η` at radius `n` and `2n` must agree
/// within `tol` for all `|z| ≤ max_diff`.
pub fn convergence_check(
    comb: &WeightedComb,
    n: f64,
    max_diff: f64,
    tol: f64,
) -> Result<ConvergenceReport> {
    let small = estimate_autocorrelation(&comb.restrict(n)?, max_diff)?;
    let large = estimate_autocorrelation(&comb.restrict(2.0 * n)?, max_diff)?;
    let mut max_deviation = 0.0f64;
    for c in large.coefficients() {
        max_deviation = max_deviation.max((c.eta - small.eta_exact(c.key)).norm());
    }
    for c in small.coefficients() {
        max_deviation = max_deviation.max((c.eta - large.eta_exact(c.key)).norm());
    }
    Ok(ConvergenceReport {
        max_deviation,
        converged: max_deviation <= tol,
    })
}
