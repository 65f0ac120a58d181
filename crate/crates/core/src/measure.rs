use serde::Serialize;

use crate::error::{Error, Result};

/// Where a spectral measure came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Estimated,
}

/// A Bragg atom `I·δ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub k: f64,
    pub intensity: f64,
}

/// A diffraction measure: pure point atoms plus an absolutely continuous
/// density sampled on a grid. Singular continuous parts are not represented.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralMeasure {
    pp_atoms: Vec<Atom>,
    ac_grid: Vec<(f64, f64)>,
    provenance: Provenance,
    radius: Option<f64>,
}

impl SpectralMeasure {
    /// Atoms are sorted by position; intensities and densities must be ≥ 0
    /// and atom positions pairwise distinct.
    pub fn new(
        mut pp_atoms: Vec<Atom>,
        ac_grid: Vec<(f64, f64)>,
        provenance: Provenance,
        radius: Option<f64>,
    ) -> Result<Self> {
        if let Some(a) = pp_atoms
            .iter()
            .find(|a| !(a.intensity >= 0.0) || !a.k.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "atom at k = {} has invalid intensity {}",
                a.k, a.intensity
            )));
        }
        if let Some((k, g)) = ac_grid.iter().find(|(_, g)| !(*g >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "negative density {g} at k = {k}"
            )));
        }
        pp_atoms.sort_by(|a, b| a.k.total_cmp(&b.k));
        if pp_atoms.windows(2).any(|w| w[0].k == w[1].k) {
            return Err(Error::InvalidParameter(
                "atom positions are not distinct".into(),
            ));
        }
        Ok(Self {
            pp_atoms,
            ac_grid,
            provenance,
            radius,
        })
    }

    pub fn pure_point(atoms: Vec<Atom>, provenance: Provenance) -> Result<Self> {
        Self::new(atoms, Vec::new(), provenance, None)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.pp_atoms
    }

    pub fn ac_grid(&self) -> &[(f64, f64)] {
        &self.ac_grid
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// Intensity of the atom at `k` (within `tol`), zero if there is none.
    pub fn intensity_at(&self, k: f64, tol: f64) -> f64 {
        let i = self.pp_atoms.partition_point(|a| a.k < k - tol);
        self.pp_atoms
            .get(i)
            .filter(|a| (a.k - k).abs() <= tol)
            .map_or(0.0, |a| a.intensity)
    }

    pub fn total_pp_intensity(&self) -> f64 {
        self.pp_atoms.iter().map(|a| a.intensity).sum()
    }
}
