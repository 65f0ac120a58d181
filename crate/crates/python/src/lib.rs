//! Python module `aperiodica`: combs, model sets, substitutions, random
//! tilings, autocorrelations and spectra.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use aperiodica_core::autocorr;
use aperiodica_core::cps::{
    self, density_weighted_comb, paperfolding_windows, spec_file, weighted_spectrum,
    CutProjectScheme, FixedPointChoice, InternalProfile, Window,
};
use aperiodica_core::randomtiling::{self, RandomTilingSpec};
use aperiodica_core::spectrum;
use aperiodica_core::substitution::{
    self, dekking_coincidence, mfs_from_substitution, modular_coincidence, Coincidence,
    SubstitutionRule,
};
use aperiodica_core::{Atom, Error, GoldenNumber, Positions, WeightedComb};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn atoms(list: &[Atom]) -> Vec<(f64, f64)> {
    list.iter().map(|a| (a.k, a.intensity)).collect()
}

fn choice(name: &str) -> PyResult<FixedPointChoice> {
    match name {
        "w1" => Ok(FixedPointChoice::W1),
        "w2" => Ok(FixedPointChoice::W2),
        other => Err(PyValueError::new_err(format!(
            "fixed point must be 'w1' or 'w2', got {other:?}"
        ))),
    }
}

/// Weighted Dirac comb restricted to `[-radius, radius]`.
#[pyclass(name = "Comb", module = "aperiodica", frozen)]
pub struct PyComb {
    inner: WeightedComb,
}

#[pymethods]
impl PyComb {
    #[new]
    #[pyo3(signature = (positions, radius, weights = None))]
    fn new(positions: Vec<f64>, radius: f64, weights: Option<Vec<Complex64>>) -> PyResult<Self> {
        let weights = weights.unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); positions.len()]);
        let positions = if positions
            .iter()
            .all(|x| x.fract() == 0.0 && x.abs() < 9.0e15)
        {
            Positions::Integer(positions.iter().map(|&x| x as i64).collect())
        } else {
            Positions::Real(positions)
        };
        Ok(Self {
            inner: WeightedComb::new(positions, weights, radius).map_err(py_err)?,
        })
    }

    fn positions(&self) -> PyResult<Vec<f64>> {
        self.inner.coords().map_err(py_err)
    }

    fn weights(&self) -> Vec<Complex64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius()
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.inner.volume()
    }

    fn restrict(&self, radius: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.restrict(radius).map_err(py_err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Comb(points={}, radius={})",
            self.inner.len(),
            self.inner.radius()
        )
    }
}

/// Fibonacci model set: points `m·τ + n` in `region` with `m·τ′ + n` in `window`.
#[pyfunction]
#[pyo3(signature = (lo, hi, window = (-1.0, aperiodica_core::TAU - 1.0)))]
fn fibonacci_model_set(lo: f64, hi: f64, window: (f64, f64)) -> PyResult<PyComb> {
    let w = Window::interval(window.0, window.1).map_err(py_err)?;
    let inner =
        cps::generate_model_set(&CutProjectScheme::fibonacci(), &w, (lo, hi)).map_err(py_err)?;
    Ok(PyComb { inner })
}

/// Model set of a JSON scheme description inside `[lo, hi]`.
#[pyfunction]
fn model_set(scheme_json: &str, lo: f64, hi: f64) -> PyResult<PyComb> {
    let (scheme, window) = spec_file::parse_scheme(scheme_json).map_err(py_err)?;
    let inner = cps::generate_model_set(&scheme, &window, (lo, hi)).map_err(py_err)?;
    Ok(PyComb { inner })
}

/// Positions of one paperfolding letter in `[lo, hi]` from the 2-adic windows.
#[pyfunction]
#[pyo3(signature = (letter, lo, hi, fixed_point = "w1"))]
fn paperfolding_letter(letter: char, lo: i64, hi: i64, fixed_point: &str) -> PyResult<Vec<i64>> {
    let bound = lo.unsigned_abs().max(hi.unsigned_abs()).max(2);
    let m_max = (64 - (bound - 1).leading_zeros()).max(1);
    let w = paperfolding_windows(choice(fixed_point)?, m_max).map_err(py_err)?;
    let window = match letter {
        'a' => &w.a,
        'b' => &w.b,
        'c' => &w.c,
        'd' => &w.d,
        other => return Err(py_err(Error::UnknownLetter(other))),
    };
    let comb = cps::generate_model_set(
        &CutProjectScheme::qadic(2).map_err(py_err)?,
        window,
        (lo as f64, hi as f64),
    )
    .map_err(py_err)?;
    match comb.positions() {
        Positions::Integer(v) => Ok(v.clone()),
        _ => unreachable!("2-adic model sets are integral"),
    }
}

/// Word of the two-sided fixed point on `[lo, hi)`.
#[pyfunction]
fn fixed_point_segment(rule: &str, seed: (char, char), lo: i64, hi: i64) -> PyResult<String> {
    let rule = SubstitutionRule::parse(rule).map_err(py_err)?;
    let mut word = substitution::fixed_point(&rule, seed).map_err(py_err)?;
    Ok(word.segment_str(lo, hi))
}

/// Coincidence power of a constant-length rule, or `None` if there is none.
/// Raises `ValueError` if none is found up to `max_power` without a proof.
#[pyfunction]
#[pyo3(signature = (rule, max_power = 20))]
fn coincidence(rule: &str, max_power: u32) -> PyResult<Option<u32>> {
    let rule = SubstitutionRule::parse(rule).map_err(py_err)?;
    let columns = dekking_coincidence(&rule).map_err(py_err)?;
    match modular_coincidence(&mfs_from_substitution(&rule).map_err(py_err)?, max_power)
        .map_err(py_err)?
    {
        Coincidence::At(m) => Ok(Some(m)),
        Coincidence::Never => Ok(None),
        Coincidence::NotFoundUpTo(m) => match columns {
            None => Ok(None),
            Some(_) => Err(PyValueError::new_err(format!(
                "no coincidence up to power {m}"
            ))),
        },
    }
}

/// Autocorrelation coefficients `[(z, η(z))]` for `|z| ≤ max_diff`.
#[pyfunction]
fn autocorrelation(comb: &PyComb, max_diff: f64) -> PyResult<Vec<(f64, Complex64)>> {
    let est = autocorr::estimate_autocorrelation(&comb.inner, max_diff).map_err(py_err)?;
    Ok(est.coefficients().iter().map(|c| (c.z, c.eta)).collect())
}

/// `ϱ(s, t)` from the autocorrelation of `comb` up to `max_diff`.
#[pyfunction]
fn pseudo_metric(comb: &PyComb, max_diff: f64, s: f64, t: f64) -> PyResult<f64> {
    let est = autocorr::estimate_autocorrelation(&comb.inner, max_diff).map_err(py_err)?;
    autocorr::pseudo_metric(&est, s, t).map_err(py_err)
}

/// `ε`-almost periods among the observed differences up to `max_diff`.
#[pyfunction]
fn almost_periods(comb: &PyComb, max_diff: f64, epsilon: f64) -> PyResult<Vec<f64>> {
    let est = autocorr::estimate_autocorrelation(&comb.inner, max_diff).map_err(py_err)?;
    autocorr::epsilon_almost_periods(&est, epsilon, None).map_err(py_err)
}

/// Periodogram `(ks, |F(k)|²/vol)` on `[k_min, k_max]` with spacing `dk`.
#[pyfunction]
fn periodogram(
    py: Python<'_>,
    comb: &PyComb,
    k_min: f64,
    k_max: f64,
    dk: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let p = py
        .detach(|| spectrum::periodogram(&comb.inner, k_min, k_max, dk))
        .map_err(py_err)?;
    Ok((p.ks(), p.values().to_vec()))
}

/// Grid maxima `[(k, intensity)]` of the periodogram above `threshold`.
#[pyfunction]
fn bragg_peaks(
    py: Python<'_>,
    comb: &PyComb,
    k_min: f64,
    k_max: f64,
    dk: f64,
    threshold: f64,
) -> PyResult<Vec<(f64, f64)>> {
    let found = py
        .detach(|| {
            spectrum::periodogram(&comb.inner, k_min, k_max, dk)
                .and_then(|p| spectrum::bragg_extract(&p, threshold))
        })
        .map_err(py_err)?;
    Ok(atoms(&found))
}

/// `|F(k)|²/vol²` at `k`.
#[pyfunction]
fn bragg_intensity(comb: &PyComb, k: f64) -> PyResult<f64> {
    spectrum::bragg_intensity(&comb.inner, k).map_err(py_err)
}

/// Paperfolding atoms `[(k, intensity)]` for letter weights `(A, B, C, D)`.
#[pyfunction]
#[pyo3(signature = (weights, r_max = 12, k_min = 0.0, k_max = 1.0))]
fn paperfolding_spectrum(
    weights: [Complex64; 4],
    r_max: u32,
    k_min: f64,
    k_max: f64,
) -> PyResult<Vec<(f64, f64)>> {
    let m = spectrum::paperfolding_spectrum(weights, r_max, (k_min, k_max)).map_err(py_err)?;
    Ok(atoms(m.atoms()))
}

/// Fibonacci comb with Gaussian weights `exp(−x⋆²/(2σ²))` on `[lo, hi]`.
#[pyfunction]
fn gaussian_fibonacci_comb(sigma: f64, lo: f64, hi: f64) -> PyResult<PyComb> {
    let profile = InternalProfile::gaussian(sigma).map_err(py_err)?;
    let inner = density_weighted_comb(&CutProjectScheme::fibonacci(), &profile, (lo, hi))
        .map_err(py_err)?;
    Ok(PyComb { inner })
}

/// Closed-form atoms of the Gaussian-weighted Fibonacci comb.
#[pyfunction]
fn gaussian_fibonacci_spectrum(sigma: f64, k_min: f64, k_max: f64) -> PyResult<Vec<(f64, f64)>> {
    let profile = InternalProfile::gaussian(sigma).map_err(py_err)?;
    let m = weighted_spectrum(&CutProjectScheme::fibonacci(), &profile, (k_min, k_max))
        .map_err(py_err)?;
    Ok(atoms(m.atoms()))
}

/// Bernoulli tiling with lengths `u`, `v` (`"tau"`, `"2"`, `"3/2"`, ...) and
/// probability `p` of `u`.
#[pyclass(name = "RandomTiling", module = "aperiodica", frozen)]
pub struct PyRandomTiling {
    spec: RandomTilingSpec,
}

#[pymethods]
impl PyRandomTiling {
    #[new]
    #[pyo3(signature = (u = "tau", v = "1", p = None))]
    fn new(u: &str, v: &str, p: Option<f64>) -> PyResult<Self> {
        let u = GoldenNumber::parse(u).map_err(py_err)?;
        let v = GoldenNumber::parse(v).map_err(py_err)?;
        let spec =
            RandomTilingSpec::new(u, v, p.unwrap_or(1.0 / aperiodica_core::TAU)).map_err(py_err)?;
        Ok(Self { spec })
    }

    #[getter]
    fn density(&self) -> f64 {
        randomtiling::density(&self.spec)
    }

    fn ac_density(&self, k: f64) -> f64 {
        randomtiling::ac_density(&self.spec, k)
    }

    fn pp_atoms(&self, k_max: f64) -> PyResult<Vec<(f64, f64)>> {
        Ok(atoms(
            randomtiling::pp_part(&self.spec, k_max)
                .map_err(py_err)?
                .atoms(),
        ))
    }

    /// Symmetric patch of `intervals` tiles per side.
    fn sample(&self, intervals: usize, seed: u64) -> PyResult<PyComb> {
        let s = randomtiling::sample(&self.spec, intervals, seed).map_err(py_err)?;
        Ok(PyComb {
            inner: s.comb().map_err(py_err)?,
        })
    }

    /// Endpoint positions and heights of one sample.
    fn heights(&self, intervals: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let s = randomtiling::sample(&self.spec, intervals, seed).map_err(py_err)?;
        Ok((s.endpoints(), s.heights().map_err(py_err)?))
    }

    /// Unit-mass height density of patches of `n` tiles.
    fn internal_distribution(&self, n: u64, x: f64) -> PyResult<f64> {
        randomtiling::internal_distribution(&self.spec, n, x, randomtiling::Normalization::UnitMass)
            .map_err(py_err)
    }

    /// Mean periodogram over `seeds`, band-averaged and tapered.
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (intervals, seeds, ks, half_width = 0.002, points = 64, taper = true))]
    fn ensemble_periodogram(
        &self,
        py: Python<'_>,
        intervals: usize,
        seeds: Vec<u64>,
        ks: Vec<f64>,
        half_width: f64,
        points: usize,
        taper: bool,
    ) -> PyResult<Vec<f64>> {
        let smoothing = randomtiling::Smoothing {
            half_width,
            points,
            taper,
        };
        py.detach(|| {
            randomtiling::ensemble_periodogram(&self.spec, intervals, &seeds, &ks, smoothing)
        })
        .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "RandomTiling(u={}, v={}, p={})",
            self.spec.u(),
            self.spec.v(),
            self.spec.p()
        )
    }
}

/// `f(z) = 2(e^{−z²}/√π − |z| erfc|z|)`.
#[pyfunction]
fn scaling_profile(z: f64) -> f64 {
    randomtiling::scaling_profile(z)
}

#[pymodule]
fn aperiodica(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TAU", aperiodica_core::TAU)?;
    m.add_class::<PyComb>()?;
    m.add_class::<PyRandomTiling>()?;
    m.add_function(wrap_pyfunction!(fibonacci_model_set, m)?)?;
    m.add_function(wrap_pyfunction!(model_set, m)?)?;
    m.add_function(wrap_pyfunction!(paperfolding_letter, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point_segment, m)?)?;
    m.add_function(wrap_pyfunction!(coincidence, m)?)?;
    m.add_function(wrap_pyfunction!(autocorrelation, m)?)?;
    m.add_function(wrap_pyfunction!(pseudo_metric, m)?)?;
    m.add_function(wrap_pyfunction!(almost_periods, m)?)?;
    m.add_function(wrap_pyfunction!(periodogram, m)?)?;
    m.add_function(wrap_pyfunction!(bragg_peaks, m)?)?;
    m.add_function(wrap_pyfunction!(bragg_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(paperfolding_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_fibonacci_comb, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_fibonacci_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_profile, m)?)?;
    Ok(())
}
