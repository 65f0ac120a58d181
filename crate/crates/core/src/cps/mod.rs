//! Cut and project schemes with a Euclidean internal line (module `Z[θ]`
//! with the star map `mθ + n ↦ mθ′ + n`) or a Q-adic internal space
//! (integers tested against residue-class windows).

mod paperfolding;
pub mod spec_file;
mod weighted;
mod window;

pub use paperfolding::{
    binary_reduction, paperfolding_binary_closed_form, paperfolding_windows, FixedPointChoice,
    PaperfoldingWindows,
};
pub use weighted::{
    density_weighted_comb, profile_density, weighted_autocorrelation, weighted_spectrum,
    InternalProfile,
};
pub use window::{ResidueClass, ResidueWindow, Window};

use crate::algebra::{ModuleElement, QuadraticModule};
use crate::comb::{Positions, WeightedComb};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;

/// Internal space of a scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InternalSpace {
    /// Internal line `R`; the lattice is `{(x, x⋆) | x ∈ Z[θ]}`.
    Euclidean { module: QuadraticModule },
    /// Q-adic integers; the lattice is the diagonal `{(m, m) | m ∈ Z}`.
    QAdic { q: i64 },
}

/// Image of a module point in internal space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InternalPoint {
    Real(f64),
    /// A Q-adic integer represented by the rational integer itself.
    Adic(i64),
}

/// A one-dimensional cut and project scheme `R ← R × H → H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutProjectScheme {
    internal: InternalSpace,
    orthogonal: bool,
}

impl CutProjectScheme {
    /// Euclidean scheme over `Z[θ]`. Physical and internal space are the two
    /// factors of `R × R`, so the canonical projections are orthogonal.
    pub fn euclidean(module: QuadraticModule) -> Self {
        Self {
            internal: InternalSpace::Euclidean { module },
            orthogonal: true,
        }
    }

    /// Euclidean scheme whose projections are declared oblique. Closed-form
    /// spectra refuse such schemes.
    pub fn euclidean_oblique(module: QuadraticModule) -> Self {
        Self {
            internal: InternalSpace::Euclidean { module },
            orthogonal: false,
        }
    }

    /// The Fibonacci scheme over `Z[τ]`.
    pub fn fibonacci() -> Self {
        Self::euclidean(QuadraticModule::golden())
    }

    pub fn qadic(q: i64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!("q must be ≥ 2, got {q}")));
        }
        Ok(Self {
            internal: InternalSpace::QAdic { q },
            orthogonal: true,
        })
    }

    pub fn internal(&self) -> InternalSpace {
        self.internal
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn physical_dim(&self) -> usize {
        1
    }

    /// Embedding lattice basis with columns `(θ, θ′)` and `(1, 1)`.
    pub fn embedding_basis(&self) -> Result<LatticeBasis> {
        match self.internal {
            InternalSpace::Euclidean { module } => LatticeBasis::from_columns(&[
                vec![module.theta(), module.theta_conj()],
                vec![1.0, 1.0],
            ]),
            InternalSpace::QAdic { .. } => Err(Error::UnsupportedLattice(
                "Q-adic schemes have no Euclidean embedding basis".into(),
            )),
        }
    }

    /// Volume of a fundamental domain of the embedding lattice: `|θ − θ′|`
    /// (√5 for Fibonacci). For Q-adic schemes with Haar measure normalized
    /// to 1 on the Q-adic integers it is 1.
    pub fn fd_volume(&self) -> f64 {
        match self.internal {
            InternalSpace::Euclidean { module } => (module.theta() - module.theta_conj()).abs(),
            InternalSpace::QAdic { .. } => 1.0,
        }
    }

    pub fn module(&self) -> Option<QuadraticModule> {
        match self.internal {
            InternalSpace::Euclidean { module } => Some(module),
            InternalSpace::QAdic { .. } => None,
        }
    }

    /// The star map. For Q-adic schemes only the `n` coordinate is used.
    pub fn star(&self, x: ModuleElement) -> InternalPoint {
        match self.internal {
            InternalSpace::Euclidean { module } => InternalPoint::Real(module.star(x)),
            InternalSpace::QAdic { .. } => InternalPoint::Adic(x.n),
        }
    }

    /// Star map as a real number (Euclidean schemes).
    pub fn star_real(&self, x: ModuleElement) -> Result<f64> {
        match self.star(x) {
            InternalPoint::Real(u) => Ok(u),
            InternalPoint::Adic(_) => Err(Error::UnsupportedLattice(
                "real star map requested on a Q-adic scheme".into(),
            )),
        }
    }
}

fn check_region(region: (f64, f64)) -> Result<f64> {
    let (lo, hi) = region;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "invalid region [{lo}, {hi}]"
        )));
    }
    Ok(lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE))
}

/// Module points `x = mθ + n` with `x ∈ [lo, hi]` and `x⋆ ∈ [u_lo, u_hi]`,
/// as a superset (one lattice row of slack); callers filter exactly.
pub(crate) fn slab_candidates(
    module: QuadraticModule,
    region: (f64, f64),
    internal: (f64, f64),
) -> Vec<ModuleElement> {
    let (lo, hi) = region;
    let (u_lo, u_hi) = internal;
    let (t, tc) = (module.theta(), module.theta_conj());
    // x − x⋆ = m (θ − θ′)
    let spread = t - tc;
    let m_a = (lo - u_hi) / spread;
    let m_b = (hi - u_lo) / spread;
    let m_min = m_a.min(m_b).floor() as i64 - 1;
    let m_max = m_a.max(m_b).ceil() as i64 + 1;
    let mut out = Vec::new();
    for m in m_min..=m_max {
        let mf = m as f64;
        let n_lo = (lo - mf * t).max(u_lo - mf * tc).floor() as i64 - 1;
        let n_hi = (hi - mf * t).min(u_hi - mf * tc).ceil() as i64 + 1;
        out.extend((n_lo..=n_hi).map(|n| ModuleElement::new(m, n)));
    }
    out
}

/// The model set `Λ(W) = {x ∈ L | x⋆ ∈ W}` inside `region`, with unit
/// weights. The comb radius is `max(|lo|, |hi|)`.
pub fn generate_model_set(
    scheme: &CutProjectScheme,
    window: &Window,
    region: (f64, f64),
) -> Result<WeightedComb> {
    let radius = check_region(region)?;
    let (lo, hi) = region;
    match (scheme.internal, window) {
        (InternalSpace::Euclidean { module }, Window::Intervals(_)) => {
            let bounds = window.bounds().ok_or(Error::EmptyWindow)?;
            let elements: Vec<ModuleElement> = slab_candidates(module, region, bounds)
                .into_iter()
                .filter(|&x| {
                    let e = module.embed(x);
                    e >= lo && e <= hi && window.contains_real(module.star(x))
                })
                .collect();
            WeightedComb::unit(Positions::Module { module, elements }, radius)
        }
        (InternalSpace::QAdic { q }, Window::Residues(w)) => {
            if w.q() != q {
                return Err(Error::InvalidParameter(format!(
                    "window is {}-adic but scheme is {q}-adic",
                    w.q()
                )));
            }
            if w.is_empty() {
                return Err(Error::EmptyWindow);
            }
            let first = lo.ceil() as i64;
            let last = hi.floor() as i64;
            if let Some(bound) = w.exact_below() {
                if first <= -bound || last >= bound {
                    return Err(Error::OutOfRange(format!(
                        "region [{lo}, {hi}] exceeds the exact range |x| < {bound} of the truncated window"
                    )));
                }
            }
            let points: Vec<i64> = (first..=last).filter(|&x| w.contains(x)).collect();
            WeightedComb::unit(Positions::Integer(points), radius)
        }
        _ => Err(Error::InvalidParameter(
            "window type does not match the scheme's internal space".into(),
        )),
    }
}
