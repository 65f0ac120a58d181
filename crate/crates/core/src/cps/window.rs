use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// `r mod q^level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueClass {
    pub residue: i64,
    pub modulus: i64,
}

impl ResidueClass {
    pub fn new(residue: i64, modulus: i64) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidParameter(format!(
                "modulus must be ≥ 1, got {modulus}"
            )));
        }
        Ok(Self {
            residue: residue.rem_euclid(modulus),
            modulus,
        })
    }

    pub fn contains(&self, x: i64) -> bool {
        x.rem_euclid(self.modulus) == self.residue
    }
}

/// A Q-adic window: a finite union of cylinder sets (residue classes modulo
/// powers of `q`) adjusted by finitely many added and removed integers.
///
/// Limit-periodic windows are truncated; `exact_below` records the bound
/// `|x| < exact_below` within which the truncation is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueWindow {
    q: i64,
    classes: Vec<ResidueClass>,
    added: BTreeSet<i64>,
    removed: BTreeSet<i64>,
    exact_below: Option<i64>,
}

impl ResidueWindow {
    pub fn new(
        q: i64,
        classes: Vec<ResidueClass>,
        added: BTreeSet<i64>,
        removed: BTreeSet<i64>,
        exact_below: Option<i64>,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!("q must be ≥ 2, got {q}")));
        }
        for c in &classes {
            let mut m = c.modulus;
            while m % q == 0 {
                m /= q;
            }
            if m != 1 {
                return Err(Error::InvalidParameter(format!(
                    "modulus {} is not a power of {q}",
                    c.modulus
                )));
            }
        }
        if let Some(x) = added.intersection(&removed).next() {
            return Err(Error::InvalidParameter(format!(
                "{x} is both added and removed"
            )));
        }
        let mut classes = classes;
        classes.sort();
        classes.dedup();
        Ok(Self {
            q,
            classes,
            added,
            removed,
            exact_below,
        })
    }

    /// The full group of Q-adic integers.
    pub fn everything(q: i64) -> Result<Self> {
        Self::new(
            q,
            vec![ResidueClass::new(0, 1)?],
            BTreeSet::new(),
            BTreeSet::new(),
            None,
        )
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn classes(&self) -> &[ResidueClass] {
        &self.classes
    }

    pub fn added(&self) -> &BTreeSet<i64> {
        &self.added
    }

    pub fn removed(&self) -> &BTreeSet<i64> {
        &self.removed
    }

    pub fn exact_below(&self) -> Option<i64> {
        self.exact_below
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty() && self.added.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        if self.removed.contains(&x) {
            return false;
        }
        self.added.contains(&x) || self.classes.iter().any(|c| c.contains(x))
    }

    /// Haar measure of the window (exceptional points have measure zero).
    pub fn measure(&self) -> f64 {
        // Classes are pairwise disjoint for the windows built here; overlap
        // is removed by checking each class against coarser ones.
        let mut total = 0.0;
        for (i, c) in self.classes.iter().enumerate() {
            let covered = self.classes[..i]
                .iter()
                .chain(&self.classes[i + 1..])
                .any(|d| {
                    d.modulus < c.modulus && c.modulus % d.modulus == 0 && d.contains(c.residue)
                });
            if !covered {
                total += 1.0 / c.modulus as f64;
            }
        }
        total
    }

    /// Union of two windows over the same `q`.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::InvalidParameter("windows use different q".into()));
        }
        let removed = self
            .removed
            .union(&other.removed)
            .copied()
            .filter(|&x| !self.contains(x) && !other.contains(x))
            .collect();
        let exact_below = match (self.exact_below, other.exact_below) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::new(
            self.q,
            self.classes.iter().chain(&other.classes).copied().collect(),
            self.added.union(&other.added).copied().collect(),
            removed,
            exact_below,
        )
    }
}

/// An acceptance window in internal space.
#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    /// Disjoint half-open intervals `[a, b)` in a Euclidean internal line.
    Intervals(Vec<(f64, f64)>),
    Residues(ResidueWindow),
}

impl Window {
    /// Half-open intervals, sorted; they must be non-degenerate and disjoint.
    pub fn intervals(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if intervals
            .iter()
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b))
        {
            return Err(Error::InvalidParameter(
                "window intervals must be finite with a < b".into(),
            ));
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        if intervals.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidParameter("window intervals overlap".into()));
        }
        Ok(Window::Intervals(intervals))
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::intervals(vec![(a, b)])
    }

    /// Membership of a Euclidean internal coordinate.
    pub fn contains_real(&self, u: f64) -> bool {
        match self {
            Window::Intervals(iv) => iv.iter().any(|&(a, b)| a <= u && u < b),
            Window::Residues(_) => false,
        }
    }

    /// Lebesgue or Haar measure of the window.
    pub fn measure(&self) -> f64 {
        match self {
            Window::Intervals(iv) => iv.iter().map(|(a, b)| b - a).sum(),
            Window::Residues(r) => r.measure(),
        }
    }

    pub(crate) fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            Window::Intervals(iv) => Some((iv.first()?.0, iv.last()?.1)),
            Window::Residues(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_membership() {
        let c = ResidueClass::new(-1, 8).unwrap();
        assert_eq!(c.residue, 7);
        assert!(c.contains(-1) && c.contains(15) && !c.contains(1));
    }

    #[test]
    fn non_power_modulus_rejected() {
        let c = ResidueClass::new(0, 6).unwrap();
        assert!(ResidueWindow::new(2, vec![c], BTreeSet::new(), BTreeSet::new(), None).is_err());
    }

    #[test]
    fn added_and_removed_must_differ() {
        let s = BTreeSet::from([3]);
        assert!(ResidueWindow::new(2, vec![], s.clone(), s, None).is_err());
    }

    #[test]
    fn interval_validation() {
        assert!(matches!(Window::intervals(vec![]), Err(Error::EmptyWindow)));
        assert!(Window::intervals(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(Window::interval(1.0, 1.0).is_err());
        let w = Window::intervals(vec![(2.0, 3.0), (0.0, 1.0)]).unwrap();
        assert!(w.contains_real(0.0) && !w.contains_real(1.0) && w.contains_real(2.5));
        assert_eq!(w.measure(), 2.0);
    }

    #[test]
    fn union_keeps_exceptions_consistent() {
        let a = ResidueWindow::new(
            2,
            vec![ResidueClass::new(0, 4).unwrap()],
            BTreeSet::new(),
            BTreeSet::from([8]),
            None,
        )
        .unwrap();
        let b = ResidueWindow::new(2, vec![], BTreeSet::from([8]), BTreeSet::new(), None).unwrap();
        let u = a.union(&b).unwrap();
        assert!(u.contains(8) && u.contains(4) && !u.contains(2));
        assert!((u.measure() - 0.25).abs() < 1e-15);
    }
}
