//! Binary random tilings of the line: i.i.d. intervals of lengths `u` and
//! `v` with probabilities `p` and `q = 1 − p`. Provides sampling with exact
//! endpoint coordinates, the closed-form density and diffraction, and the
//! internal-space (height) distributions of the Fibonacci case.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::erf::{erf, erfc};
use statrs::function::factorial::ln_binomial;

use crate::algebra::{ratio_f64, GoldenNumber, ModuleElement, QuadraticModule};
use crate::comb::{Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::measure::{Atom, Provenance, SpectralMeasure};
use crate::spectrum;

/// Tolerance for deciding `k·w ∈ Z` at the excluded points of `g`.
const INTEGER_TOL: f64 = 1e-9;

/// Parameters of the Bernoulli tiling ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomTilingSpec {
    u: GoldenNumber,
    v: GoldenNumber,
    p: f64,
    /// `α = u/v = a/b` in lowest terms, when rational.
    ratio: Option<(i64, i64)>,
}

impl RandomTilingSpec {
    pub fn new(u: GoldenNumber, v: GoldenNumber, p: f64) -> Result<Self> {
        if !(u.value() > 0.0 && v.value() > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lengths must be positive: u = {u}, v = {v}"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in (0, 1), got {p}"
            )));
        }
        let ratio = u
            .rational_ratio(&v)
            .map(|r: Rational64| (*r.numer(), *r.denom()));
        Ok(Self { u, v, p, ratio })
    }

    /// `u = τ`, `v = 1`, `p = 1/τ`.
    pub fn fibonacci() -> Self {
        Self::new(
            GoldenNumber::tau(),
            GoldenNumber::integer(1),
            1.0 / crate::TAU,
        )
        .expect("Fibonacci parameters are valid")
    }

    pub fn u(&self) -> GoldenNumber {
        self.u
    }

    pub fn v(&self) -> GoldenNumber {
        self.v
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// `(a, b)` with `u/v = a/b` coprime, if the length ratio is rational.
    pub fn ratio(&self) -> Option<(i64, i64)> {
        self.ratio
    }

    pub fn is_rational(&self) -> bool {
        self.ratio.is_some()
    }

    /// `ξ = u/a = v/b` in the rational case.
    pub fn xi(&self) -> Option<f64> {
        self.ratio.map(|(a, _)| self.u.value() / a as f64)
    }

    /// Whether endpoints have heights, i.e. `u, v ∈ Z[τ]` with `u/v ∉ Q`.
    pub fn has_heights(&self) -> bool {
        !self.is_rational()
            && self.u.as_module_element().is_some()
            && self.v.as_module_element().is_some()
    }

    /// Heights `u⋆` and `v⋆` of the two interval types.
    fn star_lengths(&self) -> Result<(f64, f64)> {
        if !self.has_heights() {
            return Err(Error::InvalidParameter(
                "heights need irrational length ratio with u, v ∈ Z[τ]".into(),
            ));
        }
        Ok((self.u.conjugate_value(), self.v.conjugate_value()))
    }

    /// Mean and variance of the height increment per interval.
    fn step_moments(&self) -> Result<(f64, f64)> {
        let (us, vs) = self.star_lengths()?;
        let (p, q) = (self.p, self.q());
        Ok((p * us + q * vs, p * q * (us - vs) * (us - vs)))
    }
}

/// `d = 1/(pu + qv)`.
pub fn density(spec: &RandomTilingSpec) -> f64 {
    1.0 / (spec.p * spec.u.value() + spec.q() * spec.v.value())
}

/// Pure point part: `d²δ_0` for irrational `α`, else `d²` on `(1/ξ)Z` for
/// `|k| ≤ k_max`.
pub fn pp_part(spec: &RandomTilingSpec, k_max: f64) -> Result<SpectralMeasure> {
    if !(k_max >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "k_max must be ≥ 0, got {k_max}"
        )));
    }
    let d2 = density(spec).powi(2);
    let atoms = match spec.xi() {
        None => vec![Atom {
            k: 0.0,
            intensity: d2,
        }],
        Some(xi) => {
            let j_max = (k_max * xi * (1.0 + 1e-12)).floor() as i64;
            (-j_max..=j_max)
                .map(|j| Atom {
                    k: j as f64 / xi,
                    intensity: d2,
                })
                .collect()
        }
    };
    SpectralMeasure::pure_point(atoms, Provenance::ClosedForm)
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_TOL * (1.0 + x.abs())
}

/// Density `g(k)` of the absolutely continuous part, continued to the
/// excluded points `k(u − v) ∈ Z` by the exact case analysis.
pub fn ac_density(spec: &RandomTilingSpec, k: f64) -> f64 {
    let (u, v, p, q) = (spec.u.value(), spec.v.value(), spec.p, spec.q());
    let d = density(spec);
    if near_integer(k * (u - v)) {
        return match spec.ratio {
            None if k == 0.0 => d * p * q * (u - v).powi(2) / (p * u + q * v).powi(2),
            None => 0.0,
            Some((a, b)) if near_integer(k * u) => {
                let (a, b) = (a as f64, b as f64);
                d * p * q * (a - b).powi(2) / (p * a + q * b).powi(2)
            }
            Some(_) => 0.0,
        };
    }
    let s2 = |x: f64| (PI * x).sin().powi(2);
    let num = d * p * q * s2(k * (u - v));
    let den = p * s2(k * u) + q * s2(k * v) - p * q * s2(k * (u - v));
    num / den
}

/// `ac_density` on a grid, as the `ac_grid` of a closed-form measure
/// together with `pp_part`.
pub fn closed_form_spectrum(spec: &RandomTilingSpec, ks: &[f64]) -> Result<SpectralMeasure> {
    let k_max = ks.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let pp = pp_part(spec, k_max)?;
    let grid = ks.iter().map(|&k| (k, ac_density(spec, k))).collect();
    SpectralMeasure::new(pp.atoms().to_vec(), grid, Provenance::ClosedForm, None)
}

/// Interval type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tile {
    U,
    V,
}

/// One realization: `M` intervals on each side of the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct TilingSample {
    seed: u64,
    spec: RandomTilingSpec,
    /// Intervals to the right of 0, in order of increasing position.
    right: Vec<Tile>,
    /// Intervals to the left of 0, in order of decreasing position.
    left: Vec<Tile>,
    /// Walk coordinates `(#u, #v)` of all `2M + 1` endpoints, ascending.
    walk: Vec<(i64, i64)>,
}

fn draw(rng: &mut ChaCha8Rng, p: f64, m: usize) -> Vec<Tile> {
    (0..m)
        .map(|_| {
            if rng.gen::<f64>() < p {
                Tile::U
            } else {
                Tile::V
            }
        })
        .collect()
}

/// Samples `M` intervals on each side of 0 with a ChaCha8 generator seeded
/// from `seed`. The two sides use separate streams, so a sample with larger
/// `M` extends one with smaller `M`.
pub fn sample(spec: &RandomTilingSpec, m: usize, seed: u64) -> Result<TilingSample> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "need at least one interval per side".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let right = draw(&mut rng, spec.p, m);
    rng.set_stream(1);
    rng.set_word_pos(0);
    let left = draw(&mut rng, spec.p, m);
    let step = |t: Tile| match t {
        Tile::U => (1, 0),
        Tile::V => (0, 1),
    };
    let mut walk = Vec::with_capacity(2 * m + 1);
    let (mut a, mut b) = (0i64, 0i64);
    let mut lefts = Vec::with_capacity(m);
    for &t in &left {
        let (da, db) = step(t);
        a -= da;
        b -= db;
        lefts.push((a, b));
    }
    walk.extend(lefts.into_iter().rev());
    walk.push((0, 0));
    let (mut a, mut b) = (0i64, 0i64);
    for &t in &right {
        let (da, db) = step(t);
        a += da;
        b += db;
        walk.push((a, b));
    }
    Ok(TilingSample {
        seed,
        spec: *spec,
        right,
        left,
        walk,
    })
}

impl TilingSample {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &RandomTilingSpec {
        &self.spec
    }

    pub fn right_tiles(&self) -> &[Tile] {
        &self.right
    }

    pub fn left_tiles(&self) -> &[Tile] {
        &self.left
    }

    /// `(#u, #v)` counts (signed) of each endpoint, ascending in position.
    pub fn walk(&self) -> &[(i64, i64)] {
        &self.walk
    }

    /// Index of the origin in [`walk`](Self::walk).
    pub fn origin_index(&self) -> usize {
        self.left.len()
    }

    fn exact_position(&self, (a, b): (i64, i64)) -> (Rational64, Rational64) {
        let (u, v) = (self.spec.u, self.spec.v);
        let (a, b) = (Rational64::from_integer(a), Rational64::from_integer(b));
        (a * u.tau + b * v.tau, a * u.one + b * v.one)
    }

    /// Endpoint positions `a·u + b·v`.
    pub fn endpoints(&self) -> Vec<f64> {
        self.walk
            .iter()
            .map(|&w| {
                let (t, o) = self.exact_position(w);
                ratio_f64(t) * crate::TAU + ratio_f64(o)
            })
            .collect()
    }

    /// Heights `x⋆` of all endpoints (Fibonacci-type specs).
    pub fn heights(&self) -> Result<Vec<f64>> {
        let (us, vs) = self.spec.star_lengths()?;
        Ok(self
            .walk
            .iter()
            .map(|&(a, b)| a as f64 * us + b as f64 * vs)
            .collect())
    }

    /// Positions in the most exact available representation.
    pub fn positions(&self) -> Positions {
        let exact: Vec<(Rational64, Rational64)> =
            self.walk.iter().map(|&w| self.exact_position(w)).collect();
        if exact.iter().all(|(t, o)| *t.numer() == 0 && o.is_integer()) {
            return Positions::Integer(exact.iter().map(|(_, o)| o.to_integer()).collect());
        }
        if exact.iter().all(|(t, o)| t.is_integer() && o.is_integer()) {
            return Positions::Module {
                module: QuadraticModule::golden(),
                elements: exact
                    .iter()
                    .map(|(t, o)| ModuleElement::new(t.to_integer(), o.to_integer()))
                    .collect(),
            };
        }
        Positions::Real(self.endpoints())
    }

    /// Largest `R` with `[-R, R]` inside the sampled patch.
    pub fn symmetric_radius(&self) -> f64 {
        let e = self.endpoints();
        (-e[0]).min(e[e.len() - 1])
    }

    /// Unit-weight comb of all endpoints in `[-R, R]`, `R` the symmetric radius.
    pub fn comb(&self) -> Result<WeightedComb> {
        let full = WeightedComb::unit(
            self.positions(),
            self.symmetric_radius()
                .max(self.endpoints().iter().fold(0.0f64, |m, x| m.max(x.abs()))),
        )?;
        full.restrict(self.symmetric_radius())
    }
}

/// Height `x⋆` of a point of `Z[τ]`.
pub fn height(x: ModuleElement) -> f64 {
    QuadraticModule::golden().star(x)
}

/// `C(M, m) p^m q^{M−m}`: probability that `M` intervals contain exactly `m`
/// of type `u`.
pub fn endpoint_distribution(spec: &RandomTilingSpec, big_m: u64, m: u64) -> Result<f64> {
    if m > big_m {
        return Err(Error::OutOfRange(format!("m = {m} exceeds M = {big_m}")));
    }
    let (p, q) = (spec.p, spec.q());
    let ln = ln_binomial(big_m, m) + m as f64 * p.ln() + (big_m - m) as f64 * q.ln();
    Ok(ln.exp())
}

/// Height reached after `M` intervals of which `m` are of type `u`.
pub fn endpoint_height(spec: &RandomTilingSpec, big_m: u64, m: u64) -> Result<f64> {
    let (us, vs) = spec.star_lengths()?;
    Ok(m as f64 * us + (big_m - m) as f64 * vs)
}

/// Normalization of internal-space distributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Integral over internal space equals 1.
    #[default]
    UnitMass,
    /// Integral equals the point density `d`.
    PointDensity,
}

fn norm_factor(spec: &RandomTilingSpec, n: Normalization) -> f64 {
    match n {
        Normalization::UnitMass => 1.0,
        Normalization::PointDensity => density(spec),
    }
}

/// Gaussian limit of the endpoint distribution after `M` intervals.
///
/// With step mean `μ = pu⋆ + qv⋆` and variance `s² = pq(u⋆ − v⋆)²` this is
/// the normal density with mean `Mμ` and variance `Ms²`. For Fibonacci
/// `μ = 0`, `s² = 1/τ`, giving `√(τ/(2πM)) exp(−τx⋆²/(2M))`.
pub fn gaussian_endpoint_density(
    spec: &RandomTilingSpec,
    big_m: u64,
    x_star: f64,
    normalization: Normalization,
) -> Result<f64> {
    if big_m == 0 {
        return Err(Error::InvalidParameter("M must be ≥ 1".into()));
    }
    let (mu, s2) = spec.step_moments()?;
    let var = big_m as f64 * s2;
    let y = x_star - big_m as f64 * mu;
    Ok(norm_factor(spec, normalization) * (-y * y / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
}

/// `f(z) = 2(e^{−z²}/√π − |z| erfc|z|)`.
pub fn scaling_profile(z: f64) -> f64 {
    let a = z.abs();
    2.0 * ((-a * a).exp() / PI.sqrt() - a * erfc(a))
}

/// `∫_{−∞}^{z} f`, using `∫_0^z f = erf(z)/2 − z² erfc(z) + z e^{−z²}/√π`
/// for `z ≥ 0`.
pub fn scaling_profile_cdf(z: f64) -> f64 {
    let a = z.abs();
    let half = erf(a) / 2.0 - a * a * erfc(a) + a * (-a * a).exp() / PI.sqrt();
    if z >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Scale `s` with `ρ(x⋆) = s·f(s·x⋆)`: `s = 1/√(2N·s²_step)`, which is
/// `√(τ/2N)` for Fibonacci.
fn internal_scale(spec: &RandomTilingSpec, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be ≥ 1".into()));
    }
    let (mu, s2) = spec.step_moments()?;
    if mu.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "height walk has drift {mu}; the scaling form needs a balanced ensemble"
        )));
    }
    Ok(1.0 / (2.0 * n as f64 * s2).sqrt())
}

/// Leading-order distribution of all endpoint heights of patches of `N`
/// intervals: `ρ(x⋆) = s·f(s·x⋆)` with `s = √(τ/2N)` in the Fibonacci case.
pub fn internal_distribution(
    spec: &RandomTilingSpec,
    n: u64,
    x_star: f64,
    normalization: Normalization,
) -> Result<f64> {
    let s = internal_scale(spec, n)?;
    Ok(norm_factor(spec, normalization) * s * scaling_profile(s * x_star))
}

/// `∫_a^b ρ` under unit-mass normalization.
pub fn internal_mass(spec: &RandomTilingSpec, n: u64, a: f64, b: f64) -> Result<f64> {
    let s = internal_scale(spec, n)?;
    Ok(scaling_profile_cdf(s * b) - scaling_profile_cdf(s * a))
}

/// Which half-patches contribute to a height histogram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sides {
    /// The `N` endpoints to the right of 0.
    Positive,
    /// The `N` endpoints on each side, pooled.
    Both,
}

/// Pooled histogram of endpoint heights; bin `j` covers
/// `[(j − ½)w, (j + ½)w)` for `j ∈ [j_min, j_min + counts.len())`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightHistogram {
    pub bin_width: f64,
    pub j_min: i64,
    pub counts: Vec<u64>,
    /// Number of pooled heights.
    pub total: u64,
    /// Sample mean and standard deviation of the pooled heights.
    pub mean: f64,
    pub std: f64,
}

impl HeightHistogram {
    pub fn center(&self, i: usize) -> f64 {
        (self.j_min + i as i64) as f64 * self.bin_width
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let c = self.center(i);
        (c - self.bin_width / 2.0, c + self.bin_width / 2.0)
    }
}

/// Default bin width `(1/20)·√(2N/τ)`, one twentieth of `1/s`.
pub fn default_bin_width(spec: &RandomTilingSpec, n: u64) -> Result<f64> {
    Ok(1.0 / (20.0 * internal_scale(spec, n)?))
}

/// Heights of the endpoints `1..=N` of one or both half-patches of each seed,
/// pooled into a histogram.
pub fn empirical_height_histogram(
    spec: &RandomTilingSpec,
    n: usize,
    seeds: &[u64],
    bin_width: Option<f64>,
    sides: Sides,
) -> Result<HeightHistogram> {
    if seeds.is_empty() {
        return Err(Error::EmptyInput("no seeds"));
    }
    let width = match bin_width {
        Some(w) if w > 0.0 => w,
        Some(w) => {
            return Err(Error::InvalidParameter(format!(
                "bin width must be positive, got {w}"
            )))
        }
        None => default_bin_width(spec, n as u64)?,
    };
    let per_seed: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<f64>> {
            let s = sample(spec, n, seed)?;
            let h = s.heights()?;
            let o = s.origin_index();
            let mut out: Vec<f64> = h[o + 1..].to_vec();
            if sides == Sides::Both {
                out.extend_from_slice(&h[..o]);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let all: Vec<f64> = per_seed.concat();
    let total = all.len() as u64;
    let mean = all.iter().sum::<f64>() / total as f64;
    let var = all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (total as f64 - 1.0).max(1.0);
    let bin = |x: f64| (x / width).round() as i64;
    let j_min = all.iter().map(|&x| bin(x)).min().unwrap_or(0);
    let j_max = all.iter().map(|&x| bin(x)).max().unwrap_or(0);
    let mut counts = vec![0u64; (j_max - j_min + 1) as usize];
    for &x in &all {
        counts[(bin(x) - j_min) as usize] += 1;
    }
    Ok(HeightHistogram {
        bin_width: width,
        j_min,
        counts,
        total,
        mean,
        std: var.sqrt(),
    })
}

/// Comparison of a histogram with `ρ`: the largest deviation between counts
/// and the predicted bin mass `total·∫_bin ρ`, relative to the largest
/// predicted count.
pub fn histogram_deviation(spec: &RandomTilingSpec, n: u64, hist: &HeightHistogram) -> Result<f64> {
    let mut max_dev = 0.0f64;
    let mut peak = 0.0f64;
    let s = internal_scale(spec, n)?;
    // Cover the histogram and the bulk of ρ on both sides.
    let reach = ((8.0 / s) / hist.bin_width).ceil() as i64;
    let lo = hist.j_min.min(-reach);
    let hi = (hist.j_min + hist.counts.len() as i64 - 1).max(reach);
    for j in lo..=hi {
        let c = j as f64 * hist.bin_width;
        let expected = hist.total as f64
            * internal_mass(spec, n, c - hist.bin_width / 2.0, c + hist.bin_width / 2.0)?;
        let idx = j - hist.j_min;
        let observed = if idx >= 0 && (idx as usize) < hist.counts.len() {
            hist.counts[idx as usize] as f64
        } else {
            0.0
        };
        max_dev = max_dev.max((observed - expected).abs());
        peak = peak.max(expected);
    }
    Ok(max_dev / peak)
}

/// Band-averaging settings for ensemble periodograms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Smoothing {
    pub half_width: f64,
    pub points: usize,
    /// Apply the unit-power Hann taper before transforming.
    pub taper: bool,
}

impl Smoothing {
    /// Plain periodogram at the centre frequency.
    pub const NONE: Smoothing = Smoothing {
        half_width: 0.0,
        points: 1,
        taper: false,
    };
}

/// Mean over seeds of the (band-averaged) periodogram of the symmetric
/// patch comb at each centre frequency. Seeds are processed in parallel and
/// summed in the given order.
pub fn ensemble_periodogram(
    spec: &RandomTilingSpec,
    m: usize,
    seeds: &[u64],
    centers: &[f64],
    smoothing: Smoothing,
) -> Result<Vec<f64>> {
    if seeds.is_empty() {
        return Err(Error::EmptyInput("no seeds"));
    }
    let per_seed: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<f64>> {
            let mut comb = sample(spec, m, seed)?.comb()?;
            if smoothing.taper {
                comb = spectrum::hann_taper(&comb)?;
            }
            spectrum::band_averaged_periodogram(
                &comb,
                centers,
                smoothing.half_width,
                smoothing.points,
            )
        })
        .collect::<Result<_>>()?;
    let mut mean = vec![0.0; centers.len()];
    for row in &per_seed {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    let n = seeds.len() as f64;
    Ok(mean.into_iter().map(|v| v / n).collect())
}

/// Mean over seeds of the Bragg intensity `|F(k)|²/vol²` at each `k`.
pub fn ensemble_bragg(
    spec: &RandomTilingSpec,
    m: usize,
    seeds: &[u64],
    ks: &[f64],
) -> Result<Vec<f64>> {
    if seeds.is_empty() {
        return Err(Error::EmptyInput("no seeds"));
    }
    let per_seed: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<f64>> {
            let comb = sample(spec, m, seed)?.comb()?;
            let vol = comb.volume();
            Ok(spectrum::amplitudes_at(&comb, ks)?
                .iter()
                .map(|a: &Complex64| a.norm_sqr() / (vol * vol))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut mean = vec![0.0; ks.len()];
    for row in &per_seed {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    Ok(mean.into_iter().map(|v| v / seeds.len() as f64).collect())
}

/// Local maxima of `g` on `[k_lo, k_hi]`, located on a grid of spacing `h`
/// and refined by golden-section search.
pub fn ac_local_maxima(spec: &RandomTilingSpec, k_lo: f64, k_hi: f64, h: f64) -> Vec<f64> {
    let n = ((k_hi - k_lo) / h).ceil() as usize;
    let g: Vec<f64> = (0..=n)
        .map(|i| ac_density(spec, k_lo + i as f64 * h))
        .collect();
    let mut out = Vec::new();
    for i in 1..n {
        if g[i] > g[i - 1] && g[i] >= g[i + 1] {
            let (mut a, mut b) = (k_lo + (i - 1) as f64 * h, k_lo + (i + 1) as f64 * h);
            let r = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..100 {
                let c = b - r * (b - a);
                let d = a + r * (b - a);
                if ac_density(spec, c) > ac_density(spec, d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            out.push((a + b) / 2.0);
        }
    }
    out
}

/// `count` frequencies evenly spaced by arc length over the part of
/// `[k_lo, k_hi]` farther than `exclude` from every local maximum of `g` and,
/// in the rational case, from every atom.
pub fn comparison_points(
    spec: &RandomTilingSpec,
    k_lo: f64,
    k_hi: f64,
    count: usize,
    exclude: f64,
) -> Result<Vec<f64>> {
    if !(k_lo < k_hi) || count < 2 || !(exclude >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need k_lo < k_hi, count ≥ 2 and exclude ≥ 0 (got {k_lo}, {k_hi}, {count}, {exclude})"
        )));
    }
    let mut centers = ac_local_maxima(spec, k_lo - exclude - 1e-3, k_hi + exclude + 1e-3, 1e-4);
    if spec.is_rational() {
        centers.extend(
            pp_part(spec, k_hi.abs().max(k_lo.abs()) + exclude)?
                .atoms()
                .iter()
                .map(|a| a.k),
        );
    }
    centers.sort_by(f64::total_cmp);
    // Admissible intervals.
    let mut intervals = Vec::new();
    let mut start = k_lo;
    for c in centers {
        let (a, b) = (c - exclude, c + exclude);
        if b <= start || a >= k_hi {
            continue;
        }
        if a > start {
            intervals.push((start, a));
        }
        start = start.max(b);
    }
    if start < k_hi {
        intervals.push((start, k_hi));
    }
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    if !(total > 0.0) {
        return Err(Error::EmptyInput("no admissible frequencies"));
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut s = total * i as f64 / (count - 1) as f64;
        for (j, &(a, b)) in intervals.iter().enumerate() {
            if s <= b - a || j + 1 == intervals.len() {
                out.push((a + s).min(b));
                break;
            }
            s -= b - a;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{TAU, TAU_CONJ};

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn rational(u: i64, v: i64, p: f64) -> RandomTilingSpec {
        RandomTilingSpec::new(GoldenNumber::integer(u), GoldenNumber::integer(v), p).unwrap()
    }

    #[test]
    fn spec_validation_and_ratio() {
        assert!(
            RandomTilingSpec::new(GoldenNumber::integer(1), GoldenNumber::integer(1), 1.0).is_err()
        );
        assert!(
            RandomTilingSpec::new(GoldenNumber::integer(0), GoldenNumber::integer(1), 0.5).is_err()
        );
        let s = rational(4, 2, 0.5);
        assert_eq!(s.ratio(), Some((2, 1)));
        assert_eq!(s.xi(), Some(2.0));
        assert!(!RandomTilingSpec::fibonacci().is_rational());
    }

    #[test]
    fn densities() {
        assert_eq!(density(&rational(1, 1, 0.3)), 1.0);
        let d = density(&RandomTilingSpec::fibonacci());
        assert!((d - TAU * TAU / (TAU * TAU + 1.0)).abs() < 1e-15);
        assert!((d - 0.723607).abs() < 1e-6);
        assert!((density(&rational(2, 1, 0.5)) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pure_point_parts() {
        let f = pp_part(&RandomTilingSpec::fibonacci(), 10.0).unwrap();
        assert_eq!(f.atoms().len(), 1);
        assert!((f.atoms()[0].intensity - 0.523607).abs() < 1e-4);
        let r = pp_part(&rational(2, 1, 0.5), 3.0).unwrap();
        assert_eq!(r.atoms().len(), 7);
        assert!(r
            .atoms()
            .iter()
            .all(|a| (a.intensity - 4.0 / 9.0).abs() < 1e-15));
        assert_eq!(pp_part(&rational(2, 1, 0.5), 0.0).unwrap().atoms().len(), 1);
    }

    #[test]
    fn ac_density_values() {
        let eq = rational(1, 1, 0.4);
        for k in [0.0, 0.3, 1.7] {
            assert_eq!(ac_density(&eq, k), 0.0);
        }
        let f = RandomTilingSpec::fibonacci();
        assert!((ac_density(&f, 0.0) - 0.0341641).abs() < 1e-7);
        // The continuation at 0 is the limit of the formula.
        assert!((ac_density(&f, 1e-6) - ac_density(&f, 0.0)).abs() < 1e-8);
        assert_eq!(ac_density(&f, TAU), 0.0);
        let r = rational(2, 1, 0.5);
        assert!((ac_density(&r, 1.0) - 2.0 / 27.0).abs() < 1e-15);
        assert!((ac_density(&r, 1.0 + 1e-6) - 2.0 / 27.0).abs() < 1e-6);
        for k in [0.123, 0.77, 1.31] {
            assert!((ac_density(&r, k) - ac_density(&r, k + 1.0)).abs() < 1e-10);
            assert!(ac_density(&f, k) >= 0.0);
        }
    }

    #[test]
    fn sampling_is_exact_and_deterministic() {
        let f = RandomTilingSpec::fibonacci();
        let a = sample(&f, 500, 42).unwrap();
        assert_eq!(a, sample(&f, 500, 42).unwrap());
        assert_ne!(a.walk(), sample(&f, 500, 43).unwrap().walk());
        let longer = sample(&f, 800, 42).unwrap();
        assert_eq!(&longer.right_tiles()[..500], a.right_tiles());
        let Positions::Module { elements, .. } = a.positions() else {
            panic!()
        };
        for w in elements.windows(2) {
            let d = w[1] - w[0];
            assert!(d == ModuleElement::new(1, 0) || d == ModuleElement::new(0, 1));
        }
        assert_eq!(elements[a.origin_index()], ModuleElement::ZERO);
        let r = sample(&rational(2, 1, 0.5), 100, 1).unwrap();
        let Positions::Integer(xs) = r.positions() else {
            panic!()
        };
        assert!(xs.windows(2).all(|w| w[1] - w[0] == 1 || w[1] - w[0] == 2));
    }

    #[test]
    fn degenerate_bernoulli_gives_lattice() {
        let s = RandomTilingSpec::new(
            GoldenNumber::integer(2),
            GoldenNumber::integer(1),
            1.0 - 1e-12,
        )
        .unwrap();
        let t = sample(&s, 1000, 3).unwrap();
        assert!(t.right_tiles().iter().all(|&x| x == Tile::U));
    }

    #[test]
    fn u_fraction_concentrates() {
        let f = RandomTilingSpec::fibonacci();
        let m = 100_000;
        let t = sample(&f, m, 9).unwrap();
        let us = t
            .right_tiles()
            .iter()
            .chain(t.left_tiles())
            .filter(|&&x| x == Tile::U)
            .count();
        let frac = us as f64 / (2 * m) as f64;
        let se = (f.p() * f.q() / (2 * m) as f64).sqrt();
        assert!((frac - f.p()).abs() < 4.0 * se);
        // Density of the patch.
        let e = t.endpoints();
        let d_emp = (2 * m) as f64 / (e[e.len() - 1] - e[0]);
        assert!((d_emp - density(&f)).abs() < 0.01);
    }

    #[test]
    fn heights() {
        assert_eq!(height(ModuleElement::ZERO), 0.0);
        assert!((height(ModuleElement::new(1, 0)) - TAU_CONJ).abs() < 1e-15);
        let t = sample(&RandomTilingSpec::fibonacci(), 10, 1).unwrap();
        let h = t.heights().unwrap();
        assert_eq!(h[t.origin_index()], 0.0);
        assert!(sample(&rational(2, 1, 0.5), 3, 1)
            .unwrap()
            .heights()
            .is_err());
    }

    #[test]
    fn binomial_masses() {
        let f = RandomTilingSpec::fibonacci();
        assert!((endpoint_distribution(&f, 1, 1).unwrap() - f.p()).abs() < 1e-15);
        for big_m in 1..=60 {
            let s: f64 = (0..=big_m)
                .map(|m| endpoint_distribution(&f, big_m, m).unwrap())
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        let masses: Vec<f64> = (0..=20)
            .map(|m| endpoint_distribution(&f, 20, m).unwrap())
            .collect();
        let argmax = masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmax, 12);
        assert!(endpoint_distribution(&f, 3, 4).is_err());
    }

    #[test]
    fn de_moivre_density_normalized_and_close_to_binomial() {
        let f = RandomTilingSpec::fibonacci();
        let m = 10_000;
        let rho = |x: f64| gaussian_endpoint_density(&f, m, x, Normalization::UnitMass).unwrap();
        assert!((rho(3.0) - rho(-3.0)).abs() < 1e-15);
        let total = simpson(rho, -600.0, 600.0, 60_000);
        assert!((total - 1.0).abs() < 1e-6);
        // Admissible heights after M steps are spaced by τ.
        let mut sup = 0.0f64;
        for k in 0..=m {
            let x = endpoint_height(&f, m, k).unwrap();
            let mass = endpoint_distribution(&f, m, k).unwrap();
            sup = sup.max((mass / TAU - rho(x)).abs());
        }
        assert!(sup <= 0.01 * rho(0.0), "sup = {sup}");
        let pd = gaussian_endpoint_density(&f, m, 0.0, Normalization::PointDensity).unwrap();
        assert!((pd / rho(0.0) - density(&f)).abs() < 1e-15);
    }

    #[test]
    fn scaling_profile_properties() {
        assert!((scaling_profile(0.0) - 2.0 / PI.sqrt()).abs() < 1e-15);
        let total = simpson(scaling_profile, -12.0, 0.0, 200_000) * 2.0;
        assert!((total - 1.0).abs() < 1e-8);
        assert!(scaling_profile(3.0) <= 1e-4);
        let mut prev = scaling_profile(0.0);
        for i in 1..400 {
            let v = scaling_profile(i as f64 * 0.01);
            assert!(v < prev);
            prev = v;
        }
        for z in [-2.0, -0.3, 0.0, 0.7, 4.0] {
            let q = simpson(scaling_profile, -12.0, z, 200_000);
            assert!((scaling_profile_cdf(z) - q).abs() < 1e-9);
        }
    }

    #[test]
    fn internal_distribution_scaling() {
        let f = RandomTilingSpec::fibonacci();
        let n = 10_000;
        let s = (TAU / (2.0 * n as f64)).sqrt();
        let v = internal_distribution(&f, n, 5.0, Normalization::UnitMass).unwrap();
        assert!((v - s * scaling_profile(s * 5.0)).abs() < 1e-15);
        assert!((internal_mass(&f, n, -1e6, 1e6).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            internal_distribution(&rational(2, 1, 0.5), 10, 0.0, Normalization::UnitMass).is_err()
        );
    }

    #[test]
    fn histogram_mass_and_width() {
        let f = RandomTilingSpec::fibonacci();
        let seeds: Vec<u64> = (0..10).collect();
        let h = empirical_height_histogram(&f, 400, &seeds, None, Sides::Positive).unwrap();
        assert_eq!(h.total, 4000);
        assert_eq!(h.counts.iter().sum::<u64>(), 4000);
        let b = empirical_height_histogram(&f, 400, &seeds, None, Sides::Both).unwrap();
        assert_eq!(b.total, 8000);
        assert!((h.bin_width - (2.0 * 400.0 / TAU).sqrt() / 20.0).abs() < 1e-12);
    }

    #[test]
    fn needle_positions() {
        let f = RandomTilingSpec::fibonacci();
        let peaks = ac_local_maxima(&f, 0.05, 2.1, 1e-4);
        assert_eq!(peaks.len(), 3);
        for (p, e) in peaks.iter().zip([0.6631, 1.1823, 1.8920]) {
            assert!((p - e).abs() < 1e-3, "{p} vs {e}");
        }
    }

    #[test]
    fn comparison_points_avoid_needles() {
        let f = RandomTilingSpec::fibonacci();
        let ks = comparison_points(&f, 0.05, 2.0, 100, 0.02).unwrap();
        assert_eq!(ks.len(), 100);
        assert_eq!(ks[0], 0.05);
        assert!((ks[99] - 2.0).abs() < 1e-12);
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
        for p in ac_local_maxima(&f, 0.0, 2.1, 1e-4) {
            assert!(ks.iter().all(|k| (k - p).abs() >= 0.02 - 1e-12));
        }
        let r = comparison_points(&rational(2, 1, 0.5), 0.05, 2.0, 50, 0.02).unwrap();
        assert!(r.iter().all(|k| (k - 1.0).abs() >= 0.02 - 1e-12));
    }
}
