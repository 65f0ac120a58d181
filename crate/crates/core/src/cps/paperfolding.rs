//! 2-adic windows of the paperfolding letter sets.
//!
//! `Ω_a = 4Z`, `Ω_c = 4Z + 2`, `Ω_b = ⋃_{m≥1} 2^{m+2}Z + 2^m − 1` and
//! `Ω_d = ⋃_{m≥1} 2^{m+2}Z + 3·2^m − 1`, with the point −1 going to `Ω_b`
//! for the fixed point `w₁` and to `Ω_d` for `w₂`.

use std::collections::BTreeSet;

use super::window::{ResidueClass, ResidueWindow, Window};
use crate::error::{Error, Result};

/// Which two-sided paperfolding fixed point: `w₁` (seed `b|a`) or `w₂`
/// (seed `d|a`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPointChoice {
    W1,
    W2,
}

impl FixedPointChoice {
    pub fn seed(self) -> (char, char) {
        match self {
            FixedPointChoice::W1 => ('b', 'a'),
            FixedPointChoice::W2 => ('d', 'a'),
        }
    }
}

/// Windows `W_a … W_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PaperfoldingWindows {
    pub a: Window,
    pub b: Window,
    pub c: Window,
    pub d: Window,
}

impl PaperfoldingWindows {
    /// Windows in alphabet order `a, b, c, d`.
    pub fn as_array(&self) -> [&Window; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

fn pow2(m: u32) -> Result<i64> {
    1i64.checked_shl(m)
        .filter(|&v| v > 0)
        .ok_or_else(|| Error::OutOfRange(format!("2^{m} overflows")))
}

/// Builds the four windows, truncating the limit-periodic unions at
/// `m ≤ m_max`. The truncation is exact for `|x| < 2^{m_max}`.
pub fn paperfolding_windows(choice: FixedPointChoice, m_max: u32) -> Result<PaperfoldingWindows> {
    if !(1..=60).contains(&m_max) {
        return Err(Error::InvalidParameter(format!(
            "m_max must lie in 1..=60, got {m_max}"
        )));
    }
    let bound = pow2(m_max)?;
    let class = |r: i64, m: i64| ResidueClass::new(r, m);
    let none = BTreeSet::new;
    let minus_one = || BTreeSet::from([-1]);
    let a = ResidueWindow::new(2, vec![class(0, 4)?], none(), none(), None)?;
    let c = ResidueWindow::new(2, vec![class(2, 4)?], none(), none(), None)?;
    let mut b_classes = Vec::new();
    let mut d_classes = Vec::new();
    for m in 1..=m_max {
        let p = pow2(m)?;
        let modulus = pow2(m + 2)?;
        b_classes.push(class(p - 1, modulus)?);
        d_classes.push(class(3 * p - 1, modulus)?);
    }
    // The closures of both unions contain −1; it belongs to exactly one side.
    let (b_add, b_rm, d_add, d_rm) = match choice {
        FixedPointChoice::W1 => (minus_one(), none(), none(), minus_one()),
        FixedPointChoice::W2 => (none(), minus_one(), minus_one(), none()),
    };
    let b = ResidueWindow::new(2, b_classes, b_add, b_rm, Some(bound))?;
    let d = ResidueWindow::new(2, d_classes, d_add, d_rm, Some(bound))?;
    Ok(PaperfoldingWindows {
        a: Window::Residues(a),
        b: Window::Residues(b),
        c: Window::Residues(c),
        d: Window::Residues(d),
    })
}

/// The binary reduction `a, b ↦ 1` and `c, d ↦ 0`: returns
/// `(W_a ∪ W_b, W_c ∪ W_d)`.
pub fn binary_reduction(windows: &PaperfoldingWindows) -> Result<(Window, Window)> {
    let res = |w: &Window| match w {
        Window::Residues(r) => Ok(r.clone()),
        Window::Intervals(_) => Err(Error::InvalidParameter(
            "binary reduction needs residue-class windows".into(),
        )),
    };
    let one = res(&windows.a)?.union(&res(&windows.b)?)?;
    let zero = res(&windows.c)?.union(&res(&windows.d)?)?;
    Ok((Window::Residues(one), Window::Residues(zero)))
}

/// Closed forms `⋃_{m≥0} 2^{m+2}Z + 2^m − 1` (digit 1) and
/// `⋃_{m≥0} 2^{m+2}Z + 3·2^m − 1` (digit 0), truncated at `m_max`, with −1
/// placed according to `choice`.
pub fn paperfolding_binary_closed_form(
    choice: FixedPointChoice,
    m_max: u32,
) -> Result<(Window, Window)> {
    let bound = pow2(m_max)?;
    let mut ones = Vec::new();
    let mut zeros = Vec::new();
    for m in 0..=m_max {
        let p = pow2(m)?;
        ones.push(ResidueClass::new(p - 1, pow2(m + 2)?)?);
        zeros.push(ResidueClass::new(3 * p - 1, pow2(m + 2)?)?);
    }
    let (one_add, zero_add) = match choice {
        FixedPointChoice::W1 => (BTreeSet::from([-1]), BTreeSet::new()),
        FixedPointChoice::W2 => (BTreeSet::new(), BTreeSet::from([-1])),
    };
    let one = ResidueWindow::new(2, ones, one_add, BTreeSet::new(), Some(bound))?;
    let zero = ResidueWindow::new(2, zeros, zero_add, BTreeSet::new(), Some(bound))?;
    Ok((Window::Residues(one), Window::Residues(zero)))
}
