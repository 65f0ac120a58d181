//! JSON description of a scheme together with its window.
//!
//! ```json
//! {"kind": "euclidean", "theta": "tau", "window": [[-0.4, 0.6]]}
//! {"kind": "euclidean", "theta": 1.4142135623730951, "theta_conj": -1.4142135623730951,
//!  "window": [[0.0, 1.0]]}
//! {"kind": "qadic", "q": 2, "classes": [[0, 4]], "added": [], "removed": []}
//! {"kind": "paperfolding", "fixed_point": "w1", "letter": "b", "m_max": 24}
//! {"kind": "paperfolding-binary", "fixed_point": "w2", "digit": 1}
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use super::{
    binary_reduction, paperfolding_windows, CutProjectScheme, FixedPointChoice, ResidueClass,
    ResidueWindow, Window,
};
use crate::algebra::QuadraticModule;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Generator {
    Named(String),
    Value(f64),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Choice {
    W1,
    W2,
}

impl From<Choice> for FixedPointChoice {
    fn from(c: Choice) -> Self {
        match c {
            Choice::W1 => FixedPointChoice::W1,
            Choice::W2 => FixedPointChoice::W2,
        }
    }
}

fn default_m_max() -> u32 {
    24
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum SchemeFile {
    Euclidean {
        theta: Generator,
        theta_conj: Option<f64>,
        window: Vec<(f64, f64)>,
    },
    Qadic {
        q: i64,
        classes: Vec<(i64, i64)>,
        #[serde(default)]
        added: BTreeSet<i64>,
        #[serde(default)]
        removed: BTreeSet<i64>,
    },
    Paperfolding {
        fixed_point: Choice,
        letter: char,
        #[serde(default = "default_m_max")]
        m_max: u32,
    },
    PaperfoldingBinary {
        fixed_point: Choice,
        digit: u8,
        #[serde(default = "default_m_max")]
        m_max: u32,
    },
}

/// Parses a scheme description from JSON text.
pub fn parse_scheme(text: &str) -> Result<(CutProjectScheme, Window)> {
    let file: SchemeFile = serde_json::from_str(text)?;
    match file {
        SchemeFile::Euclidean {
            theta,
            theta_conj,
            window,
        } => {
            let module = match (theta, theta_conj) {
                (Generator::Named(name), None) if name.trim() == "tau" => QuadraticModule::golden(),
                (Generator::Named(name), _) => {
                    return Err(Error::Parse(format!(
                        "unknown generator {name:?}; use \"tau\" or a number with theta_conj"
                    )))
                }
                (Generator::Value(t), Some(tc)) => QuadraticModule::new(t, tc)?,
                (Generator::Value(_), None) => {
                    return Err(Error::Parse("numeric theta requires theta_conj".into()))
                }
            };
            Ok((
                CutProjectScheme::euclidean(module),
                Window::intervals(window)?,
            ))
        }
        SchemeFile::Qadic {
            q,
            classes,
            added,
            removed,
        } => {
            let classes = classes
                .into_iter()
                .map(|(r, m)| ResidueClass::new(r, m))
                .collect::<Result<Vec<_>>>()?;
            let w = ResidueWindow::new(q, classes, added, removed, None)?;
            Ok((CutProjectScheme::qadic(q)?, Window::Residues(w)))
        }
        SchemeFile::Paperfolding {
            fixed_point,
            letter,
            m_max,
        } => {
            let w = paperfolding_windows(fixed_point.into(), m_max)?;
            let window = match letter {
                'a' => w.a,
                'b' => w.b,
                'c' => w.c,
                'd' => w.d,
                other => return Err(Error::UnknownLetter(other)),
            };
            Ok((CutProjectScheme::qadic(2)?, window))
        }
        SchemeFile::PaperfoldingBinary {
            fixed_point,
            digit,
            m_max,
        } => {
            let (one, zero) = binary_reduction(&paperfolding_windows(fixed_point.into(), m_max)?)?;
            let window = match digit {
                1 => one,
                0 => zero,
                d => {
                    return Err(Error::InvalidParameter(format!(
                        "digit must be 0 or 1, got {d}"
                    )))
                }
            };
            Ok((CutProjectScheme::qadic(2)?, window))
        }
    }
}

/// Reads and parses a scheme file.
pub fn read_scheme(path: &Path) -> Result<(CutProjectScheme, Window)> {
    parse_scheme(&std::fs::read_to_string(path)?)
}
