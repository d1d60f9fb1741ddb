//! Structured outcome of a positivity test.

use std::fmt;

/// Where a test failed (or where it came closest to failing).
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// A point on the half-line and the (signed) value observed there.
    Location { t: f64, value: f64 },
    /// A lattice index of a two-variable weight diagram.
    Index { k1: usize, k2: usize },
    /// A named functional together with the offending point.
    Tagged {
        which: &'static str,
        t: f64,
        value: f64,
    },
    /// Free-form diagnosis for failures that have no numeric witness.
    Reason(String),
}

/// Outcome of a positivity test: pass/fail, the margin by which it
/// passed or failed, and a witness for the extremal value.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub pass: bool,
    pub margin: f64,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass(margin: f64, witness: Option<Witness>) -> Self {
        Verdict {
            pass: true,
            margin,
            witness,
        }
    }

    pub fn fail(margin: f64, witness: Witness) -> Self {
        Verdict {
            pass: false,
            margin,
            witness: Some(witness),
        }
    }

    pub fn fail_because(reason: impl Into<String>) -> Self {
        Verdict {
            pass: false,
            margin: f64::NEG_INFINITY,
            witness: Some(Witness::Reason(reason.into())),
        }
    }

    /// Conjunction of two verdicts; keeps the worse margin and its witness.
    pub fn and(self, other: Verdict) -> Verdict {
        let (worse, _better) = if self.margin <= other.margin {
            (self.clone(), other.clone())
        } else {
            (other.clone(), self.clone())
        };
        Verdict {
            pass: self.pass && other.pass,
            margin: worse.margin,
            witness: worse.witness,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (margin {:.6e}",
            if self.pass { "pass" } else { "fail" },
            self.margin
        )?;
        match &self.witness {
            Some(Witness::Location { t, value }) => write!(f, ", at t={t} value={value:.6e})"),
            Some(Witness::Index { k1, k2 }) => write!(f, ", at k=({k1},{k2}))"),
            Some(Witness::Tagged { which, t, value }) => {
                write!(f, ", {which} at t={t} value={value:.6e})")
            }
            Some(Witness::Reason(r)) => write!(f, ", {r})"),
            None => write!(f, ")"),
        }
    }
}
