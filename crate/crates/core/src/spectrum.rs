//! Finite-volume diffraction: periodograms of weighted combs, Bragg peak
//! extraction, the closed-form paperfolding spectrum, and numerical checks of
//! lattice periodicity and complement homometry.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::comb::{Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::fmt_float;
use crate::lattice::LatticeBasis;
use crate::measure::{Atom, Provenance, SpectralMeasure};

/// Steps of the phase recurrence between exact re-evaluations.
const ANCHOR_STRIDE: usize = 256;

/// `e^{-2πiθ}` with the argument reduced modulo 1 first.
fn cis_neg(theta: f64) -> Complex64 {
    let r = theta - theta.round();
    let a = -2.0 * PI * r;
    Complex64::new(a.cos(), a.sin())
}

/// `F(k_0 + j·dk) = Σ_x w_x e^{-2πi (k_0 + j dk) x}` for `j < count`.
///
/// Each stride of `ANCHOR_STRIDE` frequencies starts from exactly evaluated
/// phases and advances by complex multiplication.
fn amplitudes(
    coords: &[f64],
    weights: &[Complex64],
    k0: f64,
    dk: f64,
    count: usize,
) -> Vec<Complex64> {
    let strides: Vec<usize> = (0..count).step_by(ANCHOR_STRIDE).collect();
    let blocks: Vec<Vec<Complex64>> = strides
        .par_iter()
        .map(|&start| {
            let len = ANCHOR_STRIDE.min(count - start);
            let k_start = k0 + start as f64 * dk;
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            for (&x, &w) in coords.iter().zip(weights) {
                let step = cis_neg(dk * x);
                let mut z = w * cis_neg(k_start * x);
                for a in acc.iter_mut() {
                    *a += z;
                    z *= step;
                }
            }
            acc
        })
        .collect();
    blocks.concat()
}

/// Fourier amplitude `Σ_x w_x e^{-2πikx}` at arbitrary frequencies.
pub fn amplitudes_at(comb: &WeightedComb, ks: &[f64]) -> Result<Vec<Complex64>> {
    let coords = comb.coords()?;
    let weights = comb.weights();
    Ok(ks
        .par_iter()
        .map(|&k| {
            coords
                .iter()
                .zip(weights)
                .map(|(&x, &w)| w * cis_neg(k * x))
                .sum()
        })
        .collect())
}

/// `|Σ_x w_x e^{-2πikx}|² / vol(B_n)` at arbitrary frequencies.
pub fn periodogram_at(comb: &WeightedComb, ks: &[f64]) -> Result<Vec<f64>> {
    let vol = comb.volume();
    Ok(amplitudes_at(comb, ks)?
        .iter()
        .map(|a| a.norm_sqr() / vol)
        .collect())
}

/// Bragg intensity estimate `|Σ w e^{-2πikx}|² / vol(B_n)²` at one frequency.
pub fn bragg_intensity(comb: &WeightedComb, k: f64) -> Result<f64> {
    Ok(periodogram_at(comb, &[k])?[0] / comb.volume())
}

/// Periodogram on a uniform grid `k_min + j·dk`.
#[derive(Clone, Debug, PartialEq)]
pub struct Periodogram {
    k_min: f64,
    dk: f64,
    values: Vec<f64>,
    radius: f64,
    volume: f64,
}

impl Periodogram {
    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn k(&self, j: usize) -> f64 {
        self.k_min + j as f64 * self.dk
    }

    pub fn ks(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.k(j)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Value at the grid point nearest to `k`.
    pub fn value_near(&self, k: f64) -> Option<f64> {
        let j = ((k - self.k_min) / self.dk).round();
        (j >= 0.0 && (j as usize) < self.len()).then(|| self.values[j as usize])
    }

    /// Writes `k,value` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        w.write_record(["k", "value"])?;
        for (j, v) in self.values.iter().enumerate() {
            w.write_record([fmt_float(self.k(j)), fmt_float(*v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn grid_len(k_min: f64, k_max: f64, dk: f64) -> Result<usize> {
    if !(dk > 0.0 && dk.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dk must be positive, got {dk}"
        )));
    }
    if !(k_min.is_finite() && k_max.is_finite() && k_min <= k_max) {
        return Err(Error::InvalidParameter(format!(
            "invalid k range [{k_min}, {k_max}]"
        )));
    }
    let n = ((k_max - k_min) / dk * (1.0 + 1e-12)).floor() as usize + 1;
    if n > 200_000_000 {
        return Err(Error::OutOfRange(format!(
            "grid of {n} frequencies is too large"
        )));
    }
    Ok(n)
}

/// Direct-summation periodogram on `[k_min, k_max]` with spacing `dk`.
pub fn periodogram(comb: &WeightedComb, k_min: f64, k_max: f64, dk: f64) -> Result<Periodogram> {
    if comb.is_empty() {
        return Err(Error::EmptyInput("comb has no points"));
    }
    let count = grid_len(k_min, k_max, dk)?;
    let coords = comb.coords()?;
    let volume = comb.volume();
    let values = amplitudes(&coords, comb.weights(), k_min, dk, count)
        .iter()
        .map(|a| a.norm_sqr() / volume)
        .collect();
    Ok(Periodogram {
        k_min,
        dk,
        values,
        radius: comb.radius(),
        volume,
    })
}

/// FFT periodogram for integer-supported combs. Requires `1/dk` to be an
/// integer `L`; one transform of length `L` covers a full period.
pub fn periodogram_fft(
    comb: &WeightedComb,
    k_min: f64,
    k_max: f64,
    dk: f64,
) -> Result<Periodogram> {
    let Positions::Integer(xs) = comb.positions() else {
        return Err(Error::InvalidParameter(
            "FFT periodogram needs integer positions".into(),
        ));
    };
    if xs.is_empty() {
        return Err(Error::EmptyInput("comb has no points"));
    }
    let count = grid_len(k_min, k_max, dk)?;
    let l = (1.0 / dk).round();
    if (l * dk - 1.0).abs() > 1e-9 || l < 1.0 {
        return Err(Error::GridMismatch(1.0));
    }
    let l = l as usize;
    let x0 = xs[0];
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for (&x, &w) in xs.iter().zip(comb.weights()) {
        let r = (x - x0).rem_euclid(l as i64) as usize;
        buf[r] += w * cis_neg(k_min * x as f64);
    }
    FftPlanner::new().plan_fft_forward(l).process(&mut buf);
    let volume = comb.volume();
    let values = (0..count)
        .map(|j| {
            // e^{-2πi j x0 / L} restores the offset removed before folding.
            let shift = cis_neg((j as i64 * x0).rem_euclid(l as i64) as f64 / l as f64);
            (buf[j % l] * shift).norm_sqr() / volume
        })
        .collect();
    Ok(Periodogram {
        k_min,
        dk,
        values,
        radius: comb.radius(),
        volume,
    })
}

/// Multiplies weights by the unit-power Hann taper
/// `√(8/3)·cos²(πx/(2R))` on `[-R, R]`.
///
/// The factor `√(8/3)` keeps `Σ|w|²/vol` unchanged on average, so tapered
/// periodograms estimate the same absolutely continuous density while
/// suppressing the `O(1/R)` truncation term of the sharp window.
pub fn hann_taper(comb: &WeightedComb) -> Result<WeightedComb> {
    let coords = comb.coords()?;
    let r = comb.radius();
    let scale = (8.0f64 / 3.0).sqrt();
    let weights = coords
        .iter()
        .zip(comb.weights())
        .map(|(&x, &w)| w * scale * (PI * x / (2.0 * r)).cos().powi(2))
        .collect();
    comb.with_weights(weights)
}

/// Band average of the periodogram: for each centre, the mean over `points`
/// equally spaced frequencies spanning `[k − half_width, k + half_width]`.
pub fn band_averaged_periodogram(
    comb: &WeightedComb,
    centers: &[f64],
    half_width: f64,
    points: usize,
) -> Result<Vec<f64>> {
    if points == 0 || !(half_width >= 0.0) {
        return Err(Error::InvalidParameter(
            "band needs at least one point and a non-negative half width".into(),
        ));
    }
    let coords = comb.coords()?;
    let volume = comb.volume();
    let dk = if points > 1 {
        2.0 * half_width / (points - 1) as f64
    } else {
        0.0
    };
    let start = if points > 1 { half_width } else { 0.0 };
    Ok(centers
        .iter()
        .map(|&c| {
            let amps = amplitudes(&coords, comb.weights(), c - start, dk, points);
            amps.iter().map(|a| a.norm_sqr()).sum::<f64>() / (points as f64 * volume)
        })
        .collect())
}

/// Grid local maxima with `value / vol ≥ threshold`, intensity `value / vol`.
pub fn bragg_extract(pgram: &Periodogram, threshold: f64) -> Result<Vec<Atom>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let v = pgram.values();
    let mut atoms = Vec::new();
    for j in 0..v.len() {
        let left = if j > 0 { v[j - 1] } else { f64::NEG_INFINITY };
        let right = if j + 1 < v.len() {
            v[j + 1]
        } else {
            f64::NEG_INFINITY
        };
        // Plateaus count once, at their left end.
        if v[j] > left && v[j] >= right {
            let intensity = v[j] / pgram.volume();
            if intensity >= threshold {
                atoms.push(Atom {
                    k: pgram.k(j),
                    intensity,
                });
            }
        }
    }
    Ok(atoms)
}

/// Maximizes `|F(k)|²` over `[k − h, k + h]` by golden-section search and
/// returns `(k*, intensity)` with intensity `|F(k*)|² / vol²`.
pub fn refine_peak(comb: &WeightedComb, k: f64, h: f64) -> Result<(f64, f64)> {
    let coords = comb.coords()?;
    let weights = comb.weights();
    let vol = comb.volume();
    let value = |k: f64| -> f64 {
        coords
            .iter()
            .zip(weights)
            .map(|(&x, &w)| w * cis_neg(k * x))
            .sum::<Complex64>()
            .norm_sqr()
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (k - h, k + h);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (value(c), value(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = value(d);
        }
        if b - a < 1e-13 * (1.0 + k.abs()) {
            break;
        }
    }
    // Never report less than the unrefined centre.
    let (mut best_k, mut best) = if fc > fd { (c, fc) } else { (d, fd) };
    let f0 = value(k);
    if f0 >= best {
        best_k = k;
        best = f0;
    }
    Ok((best_k, best / (vol * vol)))
}

/// Grid peaks refined by [`refine_peak`] within one grid step.
pub fn bragg_extract_refined(
    comb: &WeightedComb,
    pgram: &Periodogram,
    threshold: f64,
) -> Result<Vec<Atom>> {
    let mut out = Vec::new();
    for a in bragg_extract(pgram, threshold)? {
        let (k, intensity) = refine_peak(comb, a.k, pgram.dk())?;
        out.push(Atom { k, intensity });
    }
    Ok(out)
}

/// Scaling class of a periodogram peak.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeakClass {
    Bragg,
    Continuous,
}

/// Ratio test on a peak: refined height at radius `R` over height at `R/2`.
/// Bragg peaks grow linearly with volume (ratio ≈ 2); diffuse ones do not.
pub fn classify_peak(comb: &WeightedComb, k: f64) -> Result<(f64, PeakClass)> {
    let half = comb.restrict(comb.radius() / 2.0)?;
    let h = 1.0 / (4.0 * comb.radius());
    let (_, big) = refine_peak(comb, k, h)?;
    let (_, small) = refine_peak(&half, k, 2.0 * h)?;
    // Heights are |F|²/vol; intensities above are |F|²/vol².
    let ratio = (big * comb.volume()) / (small * half.volume());
    let class = if ratio >= 1.7 {
        PeakClass::Bragg
    } else {
        PeakClass::Continuous
    };
    Ok((ratio, class))
}

/// The paperfolding diffraction with letter weights `A, B, C, D`: atoms on
/// `Z`, at odd `m/2`, odd `m/4` and odd `m/2^r` for `3 ≤ r ≤ r_max`.
pub fn paperfolding_spectrum(
    weights: [Complex64; 4],
    r_max: u32,
    k_range: (f64, f64),
) -> Result<SpectralMeasure> {
    if !(3..=40).contains(&r_max) {
        return Err(Error::InvalidParameter(format!(
            "r_max must lie in 3..=40, got {r_max}"
        )));
    }
    let (lo, hi) = k_range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "invalid k range [{lo}, {hi}]"
        )));
    }
    let [a, b, c, d] = weights;
    let level_intensity = |r: u32| -> f64 {
        match r {
            0 => ((a + b + c + d) / 4.0).norm_sqr(),
            1 => ((a - b + c - d) / 4.0).norm_sqr(),
            2 => ((a - c) / 4.0).norm_sqr(),
            _ => ((b - d) / 2f64.powi(r as i32)).norm_sqr(),
        }
    };
    let mut atoms = Vec::new();
    for r in 0..=r_max {
        let intensity = level_intensity(r);
        if intensity == 0.0 {
            continue;
        }
        let denom = (1u64 << r) as f64;
        let first = (lo * denom).ceil() as i64;
        let last = (hi * denom).floor() as i64;
        for m in first..=last {
            if r == 0 || m.rem_euclid(2) == 1 {
                atoms.push(Atom {
                    k: m as f64 / denom,
                    intensity,
                });
            }
        }
    }
    SpectralMeasure::pure_point(atoms, Provenance::ClosedForm)
}

/// Outcome of the dual-lattice periodicity check.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicityReport {
    pub period: f64,
    pub compared: usize,
    pub max_abs_discrepancy: f64,
    /// Largest discrepancy divided by the largest periodogram value.
    pub max_rel_discrepancy: f64,
    /// Mean discrepancy divided by the mean periodogram value.
    pub mean_rel_discrepancy: f64,
    pub passed: bool,
}

/// Compares `P(k + γ*)` with `P(k)` where both lie on the grid, `γ*` the
/// first dual basis vector of a one-dimensional lattice.
pub fn lattice_periodicity_check(
    pgram: &Periodogram,
    dual_basis: &LatticeBasis,
    tolerance: f64,
) -> Result<PeriodicityReport> {
    if dual_basis.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            expected: 1,
            found: dual_basis.dim(),
        });
    }
    let period = dual_basis.column(0)[0].abs();
    let steps = period / pgram.dk();
    let shift = steps.round();
    if (steps - shift).abs() > 1e-6 || shift < 1.0 {
        return Err(Error::GridMismatch(period));
    }
    let shift = shift as usize;
    if pgram.len() <= shift {
        return Err(Error::OutOfRange(format!(
            "grid of {} points is shorter than one period ({shift} steps)",
            pgram.len()
        )));
    }
    let v = pgram.values();
    let diffs: Vec<f64> = (0..v.len() - shift)
        .map(|j| (v[j + shift] - v[j]).abs())
        .collect();
    let max_abs = diffs.iter().copied().fold(0.0f64, f64::max);
    let peak = v.iter().copied().fold(0.0f64, f64::max);
    let mean_v = v.iter().sum::<f64>() / v.len() as f64;
    let mean_d = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let max_rel = if peak > 0.0 { max_abs / peak } else { 0.0 };
    let mean_rel = if mean_v > 0.0 { mean_d / mean_v } else { 0.0 };
    Ok(PeriodicityReport {
        period,
        compared: diffs.len(),
        max_abs_discrepancy: max_abs,
        max_rel_discrepancy: max_rel,
        mean_rel_discrepancy: mean_rel,
        passed: max_rel <= tolerance,
    })
}

/// Outcome of the complement comparison for `S ⊂ Γ ∩ B_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementReport {
    pub dens_s: f64,
    pub dens_complement: f64,
    pub dens_lattice: f64,
    /// `max_{|z| ≤ n/2} |(η_{S^c}(z) − dens S^c) − (η_S(z) − dens S)|`.
    pub identity_max_deviation: f64,
    /// Largest error of `(P_{S^c} − P_S)/vol` at dual lattice points against
    /// `(dens S^c − dens S)·dens Γ`.
    pub bragg_shift_max_deviation: f64,
    /// `max_k |P_S − P_{S^c}| / vol` over the grid (Bragg intensity units).
    pub max_intensity_difference: f64,
    /// Mean of `|P_S − P_{S^c}|` over grid points farther than `1/n` from
    /// the dual lattice (density units).
    pub mean_abs_difference_off_lattice: f64,
    /// `|S| = |S^c|`, so the sets should be homometric.
    pub equal_density: bool,
    /// `S = Γ ∩ B_n`; all checks hold trivially.
    pub complement_empty: bool,
}

/// Checks the complement identities for a subset of a one-dimensional
/// lattice `Γ = γZ` inside `[-n, n]`; spectra are compared on `[0, k_max]`
/// with spacing `1/(8n)`.
pub fn complement_check(
    subset: &[f64],
    gamma: &LatticeBasis,
    radius: f64,
    k_max: f64,
) -> Result<ComplementReport> {
    if gamma.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            expected: 1,
            found: gamma.dim(),
        });
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let g = gamma.column(0)[0].abs();
    let j_max = (radius / g * (1.0 + 1e-12)).floor() as i64;
    let size = (2 * j_max + 1) as usize;
    let mut in_s = vec![false; size];
    for &x in subset {
        let j = (x / g).round();
        if (x / g - j).abs() > 1e-9 || x.abs() > radius * (1.0 + 1e-12) {
            return Err(Error::NotSubset(format!(
                "{x} is not a lattice point of B_n"
            )));
        }
        let idx = (j as i64 + j_max) as usize;
        if in_s[idx] {
            return Err(Error::InvalidParameter(format!("{x} appears twice")));
        }
        in_s[idx] = true;
    }
    let vol = 2.0 * radius;
    let count_s = in_s.iter().filter(|&&b| b).count();
    let count_c = size - count_s;
    let dens_s = count_s as f64 / vol;
    let dens_complement = count_c as f64 / vol;
    let dens_lattice = size as f64 / vol;

    let identity_max_deviation = {
        let z_max = ((radius / 2.0) / g).floor() as usize;
        (0..=z_max.min(size - 1))
            .into_par_iter()
            .map(|z| {
                let mut both_s = 0usize;
                let mut both_c = 0usize;
                for i in 0..size - z {
                    match (in_s[i], in_s[i + z]) {
                        (true, true) => both_s += 1,
                        (false, false) => both_c += 1,
                        _ => {}
                    }
                }
                let eta_s = both_s as f64 / vol;
                let eta_c = both_c as f64 / vol;
                ((eta_c - dens_complement) - (eta_s - dens_s)).abs()
            })
            .reduce(|| 0.0, f64::max)
    };

    let point = |i: usize| (i as i64 - j_max) as f64 * g;
    let s_pts: Vec<f64> = (0..size).filter(|&i| in_s[i]).map(point).collect();
    let c_pts: Vec<f64> = (0..size).filter(|&i| !in_s[i]).map(point).collect();
    let complement_empty = c_pts.is_empty();
    let mk = |pts: Vec<f64>| -> Result<Option<WeightedComb>> {
        if pts.is_empty() {
            return Ok(None);
        }
        Ok(Some(WeightedComb::unit(Positions::Real(pts), radius)?))
    };
    let comb_s = mk(s_pts)?;
    let comb_c = mk(c_pts)?;
    let dk = 1.0 / (8.0 * radius);
    let grid = |c: &Option<WeightedComb>, n: usize| -> Result<Vec<f64>> {
        match c {
            Some(c) => Ok(periodogram(c, 0.0, k_max, dk)?.values().to_vec()),
            None => Ok(vec![0.0; n]),
        }
    };
    let n_grid = grid_len(0.0, k_max, dk)?;
    let p_s = grid(&comb_s, n_grid)?;
    let p_c = grid(&comb_c, n_grid)?;

    let dual_period = 1.0 / g;
    let mut bragg_shift_max_deviation = 0.0f64;
    let predicted = (dens_complement - dens_s) * dens_lattice;
    let lattice_ks: Vec<f64> = (0..=((k_max / dual_period).floor() as i64))
        .map(|j| j as f64 * dual_period)
        .collect();
    let amp = |c: &Option<WeightedComb>| -> Result<Vec<f64>> {
        match c {
            Some(c) => periodogram_at(c, &lattice_ks),
            None => Ok(vec![0.0; lattice_ks.len()]),
        }
    };
    for (a, b) in amp(&comb_c)?.iter().zip(amp(&comb_s)?) {
        bragg_shift_max_deviation =
            bragg_shift_max_deviation.max(((a - b) / vol - predicted).abs());
    }

    let mut max_intensity_difference = 0.0f64;
    let mut off_sum = 0.0;
    let mut off_count = 0usize;
    for j in 0..n_grid {
        let k = j as f64 * dk;
        let diff = (p_s[j] - p_c[j]).abs();
        max_intensity_difference = max_intensity_difference.max(diff / vol);
        let nearest = (k / dual_period).round() * dual_period;
        if (k - nearest).abs() > 1.0 / radius {
            off_sum += diff;
            off_count += 1;
        }
    }
    Ok(ComplementReport {
        dens_s,
        dens_complement,
        dens_lattice,
        identity_max_deviation,
        bragg_shift_max_deviation,
        max_intensity_difference,
        mean_abs_difference_off_lattice: if off_count > 0 {
            off_sum / off_count as f64
        } else {
            0.0
        },
        equal_density: count_s == count_c,
        complement_empty,
    })
}

/// `(1/K) Σ_j P(j/K)` over one period of an integer comb, with
/// `K = max(min_points, span + 1)`; equals `η(0) = Σ|w|²/vol` exactly when
/// no aliasing occurs.
pub fn parseval_mean(comb: &WeightedComb, min_points: usize) -> Result<f64> {
    let Positions::Integer(xs) = comb.positions() else {
        return Err(Error::InvalidParameter(
            "Parseval check needs integer positions".into(),
        ));
    };
    let (Some(&first), Some(&last)) = (xs.first(), xs.last()) else {
        return Err(Error::EmptyInput("comb has no points"));
    };
    let k = min_points.max((last - first + 1) as usize);
    let dk = 1.0 / k as f64;
    let p = periodogram_fft(comb, 0.0, (k - 1) as f64 * dk, dk)?;
    Ok(p.values().iter().sum::<f64>() / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lattice(n: i64) -> WeightedComb {
        WeightedComb::unit(Positions::Integer((-n..=n).collect()), n as f64).unwrap()
    }

    #[test]
    fn single_point_is_flat() {
        let comb = WeightedComb::unit(Positions::Integer(vec![0]), 5.0).unwrap();
        let p = periodogram(&comb, 0.0, 3.0, 0.37).unwrap();
        assert!(p.values().iter().all(|v| (v - 0.1).abs() < 1e-15));
    }

    #[test]
    fn dirichlet_kernel_values() {
        let n = 1000;
        let comb = lattice(n);
        let p = periodogram(&comb, 0.0, 2.0, 0.5).unwrap();
        let expected = (2 * n + 1) as f64 * (2 * n + 1) as f64 / (2 * n) as f64;
        assert!((p.values()[0] - expected).abs() / expected < 1e-12);
        assert!((p.values()[2] - expected).abs() / expected < 1e-9);
        // At k = 1/2 the sum of ±1 over 2n + 1 points is 1.
        assert!((p.values()[1] - 1.0 / (2 * n) as f64).abs() < 1e-9);
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let comb = lattice(300).with_weights(
            (0..601)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64).cos()))
                .collect(),
        );
        let comb = comb.unwrap();
        let p = periodogram(&comb, 0.013, 3.1, 0.0007).unwrap();
        let direct = periodogram_at(&comb, &p.ks()).unwrap();
        for (a, b) in p.values().iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + b));
        }
    }

    #[test]
    fn fft_path_agrees_with_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<i64> = (-500..=500).filter(|_| rng.gen_bool(0.5)).collect();
        let ws = xs
            .iter()
            .map(|_| Complex64::new(rng.gen(), rng.gen()))
            .collect();
        let comb = WeightedComb::new(Positions::Integer(xs), ws, 500.0).unwrap();
        let a = periodogram(&comb, 0.25, 2.75, 1.0 / 1024.0).unwrap();
        let b = periodogram_fft(&comb, 0.25, 2.75, 1.0 / 1024.0).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()), "{x} vs {y}");
        }
        assert!(matches!(
            periodogram_fft(&comb, 0.0, 1.0, 0.3),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn conjugate_comb_mirrors_spectrum() {
        let comb = lattice(50)
            .with_weights(
                (0..101)
                    .map(|i| Complex64::new(1.0, i as f64 * 0.1))
                    .collect(),
            )
            .unwrap();
        let ks = [0.1, 0.33, 0.9];
        let neg: Vec<f64> = ks.iter().map(|k| -k).collect();
        let a = periodogram_at(&comb, &ks).unwrap();
        let b = periodogram_at(&comb.conjugate(), &neg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn lattice_bragg_atoms() {
        let n = 1000;
        let comb = lattice(n);
        let p = periodogram(&comb, 0.0, 5.0, 1.0 / (8.0 * n as f64)).unwrap();
        let atoms = bragg_extract(&p, 0.5).unwrap();
        let ks: Vec<f64> = atoms.iter().map(|a| a.k).collect();
        assert_eq!(ks, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        for a in atoms {
            assert!((a.intensity - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn white_noise_has_few_false_peaks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1000;
        let ws = (-n..=n)
            .map(|_| Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let comb = lattice(n).with_weights(ws).unwrap();
        let p = periodogram(&comb, 0.0, 5.0, 1.0 / (8.0 * n as f64)).unwrap();
        assert!(bragg_extract(&p, 0.05).unwrap().len() <= 2);
    }

    #[test]
    fn refine_recovers_offgrid_peak() {
        let comb = lattice(200);
        let (k, i) = refine_peak(&comb, 1.0007, 0.002).unwrap();
        assert!((k - 1.0).abs() < 1e-6);
        let exact = (401.0f64 / 400.0).powi(2);
        assert!((i - exact).abs() < 1e-6);
    }

    #[test]
    fn lattice_peak_is_bragg() {
        let comb = lattice(2000);
        let (ratio, class) = classify_peak(&comb, 1.0).unwrap();
        assert_eq!(class, PeakClass::Bragg);
        assert!((ratio - 2.0).abs() < 0.01);
    }

    #[test]
    fn paperfolding_closed_form_cases() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let all = paperfolding_spectrum([one; 4], 8, (0.0, 3.0)).unwrap();
        assert_eq!(all.atoms().len(), 4);
        assert!(all
            .atoms()
            .iter()
            .all(|a| (a.intensity - 1.0).abs() < 1e-15));

        let bin = paperfolding_spectrum([one, one, zero, zero], 20, (0.0, 1.0 - 1e-12)).unwrap();
        assert_eq!(bin.intensity_at(0.0, 1e-12), 0.25);
        assert_eq!(bin.intensity_at(0.5, 1e-12), 0.0);
        assert_eq!(bin.intensity_at(0.25, 1e-12), 1.0 / 16.0);
        assert_eq!(bin.intensity_at(0.375, 1e-12), 1.0 / 64.0);
        assert_eq!(bin.intensity_at(1.0 / 16.0, 1e-15), 1.0 / 256.0);
        // The levels r > 20 carry 2^{-21} of the total.
        assert!((bin.total_pp_intensity() - 0.5).abs() < 1e-6);

        let i = Complex64::new(0.0, 1.0);
        let quat = paperfolding_spectrum([one, i, -one, -i], 5, (0.0, 1.0)).unwrap();
        assert_eq!(quat.intensity_at(1.0, 1e-12), 0.0);
        assert_eq!(quat.intensity_at(0.5, 1e-12), 0.0);
        assert_eq!(quat.intensity_at(0.25, 1e-12), 0.25);
        assert_eq!(quat.intensity_at(0.125, 1e-12), 4.0 / 64.0);
        assert!(paperfolding_spectrum([one; 4], 2, (0.0, 1.0)).is_err());
    }

    #[test]
    fn periodicity_of_lattice_comb() {
        let comb = lattice(300);
        let p = periodogram(&comb, 0.0, 2.5, 1.0 / 2400.0).unwrap();
        let dual = LatticeBasis::identity(1).dual().unwrap();
        let r = lattice_periodicity_check(&p, &dual, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        let odd = periodogram(&comb, 0.0, 2.5, 0.3).unwrap();
        assert!(matches!(
            lattice_periodicity_check(&odd, &dual, 1e-6),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn even_odd_complement() {
        let n = 1000.0;
        let evens: Vec<f64> = (-500..=500).map(|j| 2.0 * j as f64).collect();
        let r = complement_check(&evens, &LatticeBasis::identity(1), n, 2.0).unwrap();
        assert!(!r.equal_density);
        assert!(r.max_intensity_difference < 1e-2);
        assert!(r.bragg_shift_max_deviation < 1e-9);
        assert!(r.identity_max_deviation < 1e-2);
    }

    #[test]
    fn full_lattice_complement_is_empty() {
        let all: Vec<f64> = (-10..=10).map(|j| j as f64).collect();
        let r = complement_check(&all, &LatticeBasis::identity(1), 10.0, 1.0).unwrap();
        assert!(r.complement_empty);
        assert_eq!(r.dens_complement, 0.0);
        assert!(complement_check(&[0.5], &LatticeBasis::identity(1), 10.0, 1.0).is_err());
    }

    #[test]
    fn parseval_on_integer_comb() {
        let comb = lattice(100)
            .with_weights(
                (0..201)
                    .map(|i| Complex64::new((i % 3) as f64, 0.0))
                    .collect(),
            )
            .unwrap();
        let eta0: f64 = comb.weights().iter().map(|w| w.norm_sqr()).sum::<f64>() / comb.volume();
        assert!((parseval_mean(&comb, 10_000).unwrap() - eta0).abs() < 1e-9 * eta0);
    }

    #[test]
    fn hann_taper_keeps_mean_power() {
        let comb = lattice(10_000);
        let t = hann_taper(&comb).unwrap();
        let p0: f64 = comb.weights().iter().map(|w| w.norm_sqr()).sum();
        let p1: f64 = t.weights().iter().map(|w| w.norm_sqr()).sum();
        assert!((p1 / p0 - 1.0).abs() < 1e-3);
    }
}
