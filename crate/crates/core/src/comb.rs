//! Weighted Dirac combs: finite scatterer sets with complex weights, truncated
//! to a ball `B_n` around the origin.

use std::cmp::Ordering;
use std::io::{Read, Write};

use num_complex::Complex64;

use crate::algebra::{ModuleElement, QuadraticModule};
use crate::error::{Error, Result};
use crate::fmt_float;

/// Scatterer positions. One-dimensional positions are kept exact whenever
/// a generator can provide them.
#[derive(Clone, Debug, PartialEq)]
pub enum Positions {
    Integer(Vec<i64>),
    Module {
        module: QuadraticModule,
        elements: Vec<ModuleElement>,
    },
    Real(Vec<f64>),
    Plane(Vec<[f64; 2]>),
}

impl Positions {
    pub fn len(&self) -> usize {
        match self {
            Positions::Integer(v) => v.len(),
            Positions::Module { elements, .. } => elements.len(),
            Positions::Real(v) => v.len(),
            Positions::Plane(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Positions::Plane(_) => 2,
            _ => 1,
        }
    }

    /// Real coordinate of the `i`-th point (dimension 1 only).
    fn coord(&self, i: usize) -> f64 {
        match self {
            Positions::Integer(v) => v[i] as f64,
            Positions::Module { module, elements } => module.embed(elements[i]),
            Positions::Real(v) => v[i],
            Positions::Plane(_) => unreachable!("coord on planar positions"),
        }
    }

    fn norm(&self, i: usize) -> f64 {
        match self {
            Positions::Plane(v) => v[i][0].hypot(v[i][1]),
            _ => self.coord(i).abs(),
        }
    }

    fn select(&self, keep: &[usize]) -> Positions {
        match self {
            Positions::Integer(v) => Positions::Integer(keep.iter().map(|&i| v[i]).collect()),
            Positions::Module { module, elements } => Positions::Module {
                module: *module,
                elements: keep.iter().map(|&i| elements[i]).collect(),
            },
            Positions::Real(v) => Positions::Real(keep.iter().map(|&i| v[i]).collect()),
            Positions::Plane(v) => Positions::Plane(keep.iter().map(|&i| v[i]).collect()),
        }
    }

    fn compare(&self, i: usize, j: usize) -> Ordering {
        match self {
            Positions::Integer(v) => v[i].cmp(&v[j]),
            Positions::Plane(v) => v[i][0]
                .total_cmp(&v[j][0])
                .then(v[i][1].total_cmp(&v[j][1])),
            _ => self.coord(i).total_cmp(&self.coord(j)),
        }
    }

    fn same_point(&self, i: usize, j: usize) -> bool {
        match self {
            Positions::Integer(v) => v[i] == v[j],
            Positions::Module { elements, .. } => elements[i] == elements[j],
            Positions::Real(v) => v[i] == v[j],
            Positions::Plane(v) => v[i] == v[j],
        }
    }
}

/// A finite weighted Dirac comb `ω_n = Σ_{x ∈ S ∩ B_n} v(x) δ_x`.
///
/// Points are pairwise distinct, sorted ascending in dimension 1 (and
/// lexicographically in dimension 2), and contained in the closed ball of the
/// stated radius.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComb {
    positions: Positions,
    weights: Vec<Complex64>,
    radius: f64,
}

impl WeightedComb {
    pub fn new(positions: Positions, weights: Vec<Complex64>, radius: f64) -> Result<Self> {
        if positions.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} positions but {} weights",
                positions.len(),
                weights.len()
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if weights
            .iter()
            .any(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(Error::InvalidParameter("weights must be finite".into()));
        }
        if let Positions::Real(v) = &positions {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("positions must be finite".into()));
            }
        }
        if let Positions::Plane(v) = &positions {
            if v.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("positions must be finite".into()));
            }
        }
        for i in 0..positions.len() {
            if positions.norm(i) > radius * (1.0 + 1e-12) {
                return Err(Error::OutOfRange(format!(
                    "point {i} lies outside the ball of radius {radius}"
                )));
            }
        }
        let mut order: Vec<usize> = (0..positions.len()).collect();
        order.sort_by(|&i, &j| positions.compare(i, j));
        if order.windows(2).any(|w| positions.same_point(w[0], w[1])) {
            return Err(Error::InvalidParameter(
                "positions are not pairwise distinct".into(),
            ));
        }
        let positions = positions.select(&order);
        let weights = order.iter().map(|&i| weights[i]).collect();
        Ok(Self {
            positions,
            weights,
            radius,
        })
    }

    /// Comb with all weights equal to one.
    pub fn unit(positions: Positions, radius: f64) -> Result<Self> {
        let w = vec![Complex64::new(1.0, 0.0); positions.len()];
        Self::new(positions, w, radius)
    }

    pub fn dim(&self) -> usize {
        self.positions.dim()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn positions(&self) -> &Positions {
        &self.positions
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Volume of the averaging ball: `2n` on the line, `πn²` in the plane.
    pub fn volume(&self) -> f64 {
        ball_volume(self.dim(), self.radius)
    }

    /// Embedded real coordinates (dimension 1).
    pub fn coords(&self) -> Result<Vec<f64>> {
        self.require_dim(1)?;
        Ok((0..self.len()).map(|i| self.positions.coord(i)).collect())
    }

    pub fn planar_coords(&self) -> Result<&[[f64; 2]]> {
        match &self.positions {
            Positions::Plane(v) => Ok(v),
            _ => Err(Error::UnsupportedDimension {
                expected: 2,
                found: 1,
            }),
        }
    }

    pub(crate) fn require_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::UnsupportedDimension {
                expected: d,
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// Same support with new weights.
    pub fn with_weights(&self, weights: Vec<Complex64>) -> Result<Self> {
        Self::new(self.positions.clone(), weights, self.radius)
    }

    /// Same support with weights conjugated.
    pub fn conjugate(&self) -> Self {
        Self {
            positions: self.positions.clone(),
            weights: self.weights.iter().map(|w| w.conj()).collect(),
            radius: self.radius,
        }
    }

    /// `ω|_{B_r}`: the points with `|x| ≤ r`, weights unchanged.
    pub fn restrict(&self, radius: f64) -> Result<Self> {
        if radius > self.radius {
            return Err(Error::OutOfRange(format!(
                "restriction radius {radius} exceeds comb radius {}",
                self.radius
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.positions.norm(i) <= radius)
            .collect();
        Ok(Self {
            positions: self.positions.select(&keep),
            weights: keep.iter().map(|&i| self.weights[i]).collect(),
            radius,
        })
    }

    /// Writes `x,re_weight,im_weight` (or `x,y,re_weight,im_weight`) rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        match &self.positions {
            Positions::Plane(v) => {
                w.write_record(["x", "y", "re_weight", "im_weight"])?;
                for (p, wt) in v.iter().zip(&self.weights) {
                    w.write_record([
                        fmt_float(p[0]),
                        fmt_float(p[1]),
                        fmt_float(wt.re),
                        fmt_float(wt.im),
                    ])?;
                }
            }
            Positions::Integer(v) => {
                w.write_record(["x", "re_weight", "im_weight"])?;
                for (x, wt) in v.iter().zip(&self.weights) {
                    w.write_record([x.to_string(), fmt_float(wt.re), fmt_float(wt.im)])?;
                }
            }
            _ => {
                w.write_record(["x", "re_weight", "im_weight"])?;
                for (i, wt) in self.weights.iter().enumerate() {
                    w.write_record([
                        fmt_float(self.positions.coord(i)),
                        fmt_float(wt.re),
                        fmt_float(wt.im),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a comb from CSV. Integral one-dimensional coordinates are stored
    /// exactly. The radius defaults to the largest point norm.
    pub fn read_csv<R: Read>(reader: R, radius: Option<f64>) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let dim = match header.as_slice() {
            [x, re, im] if x == "x" && re == "re_weight" && im == "im_weight" => 1,
            [x, y, re, im] if x == "x" && y == "y" && re == "re_weight" && im == "im_weight" => 2,
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected CSV header {header:?}; expected x,re_weight,im_weight or x,y,re_weight,im_weight"
                )))
            }
        };
        let mut coords: Vec<[f64; 2]> = Vec::new();
        let mut weights = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let field = |j: usize| -> Result<f64> {
                rec.get(j)
                    .ok_or_else(|| Error::Parse(format!("row {}: missing column {j}", line + 2)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))
            };
            let x = field(0)?;
            let y = if dim == 2 { field(1)? } else { 0.0 };
            coords.push([x, y]);
            weights.push(Complex64::new(field(dim)?, field(dim + 1)?));
        }
        let positions = if dim == 2 {
            Positions::Plane(coords)
        } else if coords
            .iter()
            .all(|c| c[0].fract() == 0.0 && c[0].abs() < 9.0e15)
        {
            Positions::Integer(coords.iter().map(|c| c[0] as i64).collect())
        } else {
            Positions::Real(coords.iter().map(|c| c[0]).collect())
        };
        let max_norm = (0..positions.len())
            .map(|i| positions.norm(i))
            .fold(0.0f64, f64::max);
        let radius = radius.unwrap_or(if max_norm > 0.0 { max_norm } else { 1.0 });
        Self::new(positions, weights, radius)
    }
}

/// Volume of `B_n`: length `2n` in dimension 1, area `πn²` in dimension 2.
pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    match dim {
        1 => 2.0 * radius,
        _ => std::f64::consts::PI * radius * radius,
    }
}

/// Free-function form of [`WeightedComb::restrict`].
pub fn restrict(comb: &WeightedComb, radius: f64) -> Result<WeightedComb> {
    comb.restrict(radius)
}
