use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A lattice in `R^d` given by a basis, one vector per column.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeBasis {
    matrix: DMatrix<f64>,
}

impl LatticeBasis {
    /// Builds a lattice from basis columns. The columns must be independent.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let d = columns.len();
        if d == 0 || columns.iter().any(|c| c.len() != d) {
            return Err(Error::InvalidParameter(
                "lattice basis must be a non-empty square matrix".into(),
            ));
        }
        let matrix = DMatrix::from_fn(d, d, |i, j| columns[j][i]);
        Self::from_matrix(matrix)
    }

    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "lattice basis must be square".into(),
            ));
        }
        let det = matrix.determinant();
        let scale = matrix.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
        if !det.is_finite() || det.abs() <= 1e-12 * scale.powi(matrix.nrows() as i32) {
            return Err(Error::DegenerateLattice(det));
        }
        Ok(Self { matrix })
    }

    /// `Z^d`.
    pub fn identity(d: usize) -> Self {
        Self {
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.matrix.column(j).iter().copied().collect()
    }

    /// Covolume `|det B|`.
    pub fn covolume(&self) -> f64 {
        self.matrix.determinant().abs()
    }

    /// Lattice point `B · c` for integer coordinates `c`.
    pub fn point(&self, coords: &[i64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                coords
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| self.matrix[(i, j)] * c as f64)
                    .sum()
            })
            .collect()
    }

    /// The dual lattice `{k | <k, x> ∈ Z for all x}`, with basis `B^{-T}`.
    pub fn dual(&self) -> Result<Self> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateLattice(self.matrix.determinant()))?;
        Self::from_matrix(inv.transpose())
    }
}

/// Free-function form of [`LatticeBasis::dual`].
pub fn dual_lattice(basis: &LatticeBasis) -> Result<LatticeBasis> {
    basis.dual()
}
