//! Exact arithmetic in rank-2 modules `Z[θ] = {mθ + n}` and in `Q(τ)`.
//!
//! Positions of model sets and random tilings are kept as integer pairs and
//! only embedded into the reals on demand, so that the star map (algebraic
//! conjugation) stays exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;

use crate::error::{Error, Result};

/// The golden ratio τ = (1 + √5)/2.
pub const TAU: f64 = 1.618_033_988_749_895;
/// Algebraic conjugate τ′ = (1 − √5)/2 = −1/τ.
pub const TAU_CONJ: f64 = -0.618_033_988_749_894_9;

/// A rank-2 module `Z[θ]` described by an irrational generator and its conjugate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticModule {
    theta: f64,
    theta_conj: f64,
}

impl QuadraticModule {
    pub fn new(theta: f64, theta_conj: f64) -> Result<Self> {
        if !theta.is_finite() || !theta_conj.is_finite() || theta == theta_conj {
            return Err(Error::InvalidParameter(format!(
                "generator {theta} and conjugate {theta_conj} must be finite and distinct"
            )));
        }
        Ok(Self { theta, theta_conj })
    }

    /// `Z[τ]` with τ′ = −1/τ.
    pub fn golden() -> Self {
        Self {
            theta: TAU,
            theta_conj: TAU_CONJ,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta_conj(&self) -> f64 {
        self.theta_conj
    }

    /// `mθ + n`.
    pub fn embed(&self, x: ModuleElement) -> f64 {
        x.m as f64 * self.theta + x.n as f64
    }

    /// `mθ′ + n`.
    pub fn star(&self, x: ModuleElement) -> f64 {
        x.m as f64 * self.theta_conj + x.n as f64
    }
}

/// An element `mθ + n` of a rank-2 module, stored as its integer coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleElement {
    pub m: i64,
    pub n: i64,
}

impl ModuleElement {
    pub const ZERO: Self = Self { m: 0, n: 0 };

    pub const fn new(m: i64, n: i64) -> Self {
        Self { m, n }
    }
}

impl Add for ModuleElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.m + rhs.m, self.n + rhs.n)
    }
}

impl Sub for ModuleElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.m - rhs.m, self.n - rhs.n)
    }
}

impl Neg for ModuleElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.m, -self.n)
    }
}

impl Mul<i64> for ModuleElement {
    type Output = Self;
    fn mul(self, k: i64) -> Self {
        Self::new(self.m * k, self.n * k)
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}θ{:+}", self.m, self.n)
    }
}

/// An element `aτ + b` of the field `Q(τ)` with rational coordinates.
///
/// Used for tile lengths so that rationality of the length ratio is decided
/// exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GoldenNumber {
    pub tau: Rational64,
    pub one: Rational64,
}

impl GoldenNumber {
    pub fn new(tau: Rational64, one: Rational64) -> Self {
        Self { tau, one }
    }

    pub fn rational(r: Rational64) -> Self {
        Self::new(Rational64::from_integer(0), r)
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational64::from_integer(n))
    }

    pub fn tau() -> Self {
        Self::new(Rational64::from_integer(1), Rational64::from_integer(0))
    }

    pub fn value(&self) -> f64 {
        ratio_f64(self.tau) * TAU + ratio_f64(self.one)
    }

    /// Galois conjugate `aτ′ + b`.
    pub fn conjugate_value(&self) -> f64 {
        ratio_f64(self.tau) * TAU_CONJ + ratio_f64(self.one)
    }

    pub fn is_rational(&self) -> bool {
        self.tau == Rational64::from_integer(0)
    }

    /// Integer coordinates in `Z[τ]`, if both coefficients are integers.
    pub fn as_module_element(&self) -> Option<ModuleElement> {
        (self.tau.is_integer() && self.one.is_integer())
            .then(|| ModuleElement::new(self.tau.to_integer(), self.one.to_integer()))
    }

    /// Exact ratio `self / other` when it is rational.
    pub fn rational_ratio(&self, other: &Self) -> Option<Rational64> {
        // (a1 τ + b1)/(a2 τ + b2) ∈ Q  ⇔  a1 b2 = a2 b1
        if self.tau * other.one != other.tau * self.one {
            return None;
        }
        if other.tau != Rational64::from_integer(0) {
            Some(self.tau / other.tau)
        } else if other.one != Rational64::from_integer(0) {
            Some(self.one / other.one)
        } else {
            None
        }
    }

    /// Parses `tau`, a rational `p/q`, `c*tau`, or `c*tau+d` / `c*tau-d`.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty length".into()));
        }
        let (tau_part, rest) = match s.find("tau") {
            Some(pos) => {
                let coeff = s[..pos].trim_end_matches('*');
                let coeff = match coeff {
                    "" | "+" => Rational64::from_integer(1),
                    "-" => Rational64::from_integer(-1),
                    c => parse_rational(c)?,
                };
                (coeff, &s[pos + 3..])
            }
            None => (Rational64::from_integer(0), s.as_str()),
        };
        let one = if rest.is_empty() {
            Rational64::from_integer(0)
        } else {
            parse_rational(rest.trim_start_matches('+'))?
        };
        Ok(Self::new(tau_part, one))
    }
}

impl fmt::Display for GoldenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.one)
        } else {
            write!(f, "{}*tau+{}", self.tau, self.one)
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.parse().map_err(|_| bad())?;
            let q: i64 = q.parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => {
            if let Ok(n) = s.parse::<i64>() {
                return Ok(Rational64::from_integer(n));
            }
            // Decimal literal, e.g. "1.5", converted exactly.
            let (int, frac) = s.split_once('.').ok_or_else(bad)?;
            if frac.is_empty() || frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let denom = 10i64.pow(frac.len() as u32);
            let frac: i64 = frac.parse().map_err(|_| bad())?;
            let num = int.abs() * denom + frac;
            Ok(Rational64::new(if neg { -num } else { num }, denom))
        }
    }
}

pub(crate) fn ratio_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
