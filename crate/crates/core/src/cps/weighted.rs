//! Dirac combs on a Euclidean model-set module weighted by an internal-space
//! profile, `ω = Σ_{x∈L} φ(x⋆) δ_x`, with the closed-form autocorrelation
//! and diffraction for Gaussian profiles.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{generate_model_set, slab_candidates, CutProjectScheme, InternalSpace, Window};
use crate::algebra::ModuleElement;
use crate::comb::{Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::measure::{Atom, Provenance, SpectralMeasure};

/// Weights below this value are dropped when enumerating Gaussian combs.
pub const PROFILE_CUTOFF: f64 = 1e-12;
/// Closed-form atoms below this intensity are pruned.
pub const ATOM_CUTOFF: f64 = 1e-14;

/// Internal-space weight function `φ`.
#[derive(Clone, Debug, PartialEq)]
pub enum InternalProfile {
    /// `φ(u) = exp(−u²/(2σ²))`.
    Gaussian { sigma: f64 },
    /// Characteristic function of a window; lacks the decay needed for the
    /// closed-form spectrum.
    Indicator(Window),
}

impl InternalProfile {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(InternalProfile::Gaussian { sigma })
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            InternalProfile::Gaussian { sigma } => (-u * u / (2.0 * sigma * sigma)).exp(),
            InternalProfile::Indicator(w) => {
                if w.contains_real(u) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether `|y|^{2+α} φ(y) → 0` for some `α > 0`.
    pub fn decays(&self) -> bool {
        matches!(self, InternalProfile::Gaussian { .. })
    }

    fn sigma(&self) -> Result<f64> {
        match self {
            InternalProfile::Gaussian { sigma } => Ok(*sigma),
            InternalProfile::Indicator(_) => Err(Error::UnsupportedProfile(
                "closed forms require a decaying (Gaussian) profile",
            )),
        }
    }

    /// Half-width of the region where `φ ≥ PROFILE_CUTOFF`.
    fn support_radius(&self) -> Result<f64> {
        Ok(self.sigma()? * (2.0 * (1.0 / PROFILE_CUTOFF).ln()).sqrt())
    }

    /// `φ̂(k) = ∫ φ(u) e^{−2πiku} du = σ√(2π) exp(−2π²σ²k²)`.
    pub fn fourier(&self, k: f64) -> Result<f64> {
        let s = self.sigma()?;
        Ok(s * (2.0 * PI).sqrt() * (-2.0 * PI * PI * s * s * k * k).exp())
    }

    /// `∫ φ`.
    pub fn integral(&self) -> f64 {
        match self {
            InternalProfile::Gaussian { sigma } => sigma * (2.0 * PI).sqrt(),
            InternalProfile::Indicator(w) => w.measure(),
        }
    }
}

fn euclidean(scheme: &CutProjectScheme) -> Result<crate::algebra::QuadraticModule> {
    match scheme.internal() {
        InternalSpace::Euclidean { module } => Ok(module),
        InternalSpace::QAdic { .. } => Err(Error::UnsupportedLattice(
            "weighted combs need a Euclidean internal space".into(),
        )),
    }
}

/// `ω` restricted to `region`, weight `φ(x⋆)` at each module point. Gaussian
/// weights below `PROFILE_CUTOFF` are not enumerated.
pub fn density_weighted_comb(
    scheme: &CutProjectScheme,
    profile: &InternalProfile,
    region: (f64, f64),
) -> Result<WeightedComb> {
    let module = euclidean(scheme)?;
    match profile {
        InternalProfile::Indicator(w) => generate_model_set(scheme, w, region),
        InternalProfile::Gaussian { .. } => {
            let (lo, hi) = region;
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidParameter(format!(
                    "invalid region [{lo}, {hi}]"
                )));
            }
            let c = profile.support_radius()?;
            let elements: Vec<ModuleElement> = slab_candidates(module, region, (-c, c))
                .into_iter()
                .filter(|&x| {
                    let e = module.embed(x);
                    e >= lo && e <= hi && module.star(x).abs() <= c
                })
                .collect();
            let weights = elements
                .iter()
                .map(|&x| Complex64::new(profile.value(module.star(x)), 0.0))
                .collect();
            let radius = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
            WeightedComb::new(Positions::Module { module, elements }, weights, radius)
        }
    }
}

/// Point density `ρ = (1/vol FD) ∫ φ`.
pub fn profile_density(scheme: &CutProjectScheme, profile: &InternalProfile) -> f64 {
    profile.integral() / scheme.fd_volume()
}

/// `η(z) = (1/vol FD) ∫ φ(u) φ(u − z⋆) du`.
///
/// For `φ(u) = exp(−u²/(2σ²))` completing the square gives
/// `η(z) = σ√π exp(−(z⋆)²/(4σ²)) / vol FD`.
pub fn weighted_autocorrelation(
    scheme: &CutProjectScheme,
    profile: &InternalProfile,
    z: ModuleElement,
) -> Result<Complex64> {
    let sigma = profile.sigma()?;
    let s = scheme.star_real(z)?;
    let value = sigma * PI.sqrt() * (-s * s / (4.0 * sigma * sigma)).exp() / scheme.fd_volume();
    Ok(Complex64::new(value, 0.0))
}

/// Pure point diffraction `Σ_{y ∈ L*} |φ̂(−y⋆)|²/vol(FD)² δ_y` restricted to
/// `k_range`; `L*` is the projected dual of the embedding lattice.
pub fn weighted_spectrum(
    scheme: &CutProjectScheme,
    profile: &InternalProfile,
    k_range: (f64, f64),
) -> Result<SpectralMeasure> {
    let sigma = profile.sigma()?;
    if !scheme.is_orthogonal() {
        return Err(Error::NonOrthogonal);
    }
    let (lo, hi) = k_range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "invalid k range [{lo}, {hi}]"
        )));
    }
    let vol = scheme.fd_volume();
    let dual = scheme.embedding_basis()?.dual()?;
    let peak = profile.fourier(0.0)?.powi(2) / (vol * vol);
    // Largest |y⋆| with intensity above the pruning cutoff.
    let y_max = if peak > ATOM_CUTOFF {
        (peak / ATOM_CUTOFF).ln().sqrt() / (2.0 * PI * sigma)
    } else {
        return SpectralMeasure::pure_point(Vec::new(), Provenance::ClosedForm);
    };
    // Integer coordinates (a, b) of y = a·d₁ + b·d₂ are B^T y.
    let primal = scheme.embedding_basis()?;
    let bt = primal.matrix().transpose();
    let corners = [(lo, -y_max), (lo, y_max), (hi, -y_max), (hi, y_max)];
    let coord = |row: usize, (p, q): (f64, f64)| bt[(row, 0)] * p + bt[(row, 1)] * q;
    let range = |row: usize| {
        let vals = corners.map(|c| coord(row, c));
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min.floor() as i64 - 1, max.ceil() as i64 + 1)
    };
    let (a_lo, a_hi) = range(0);
    let (b_lo, b_hi) = range(1);
    let d = dual.matrix();
    let mut atoms = Vec::new();
    for a in a_lo..=a_hi {
        for b in b_lo..=b_hi {
            let y = d[(0, 0)] * a as f64 + d[(0, 1)] * b as f64;
            let y_star = d[(1, 0)] * a as f64 + d[(1, 1)] * b as f64;
            if y < lo || y > hi {
                continue;
            }
            let amp = profile.fourier(-y_star)?;
            let intensity = amp * amp / (vol * vol);
            if intensity >= ATOM_CUTOFF {
                atoms.push(Atom { k: y, intensity });
            }
        }
    }
    SpectralMeasure::pure_point(atoms, Provenance::ClosedForm)
}
