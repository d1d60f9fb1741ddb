//! Finite positive/signed measures on `[0, M] ⊂ ℝ₊`.
//!
//! A measure is a finite list of atoms plus a finite list of density pieces,
//! each piece being a sum of power terms `c·t^p` on an interval. The family
//! is closed under moment tilts (`dμ ↦ (t^n/γ_n)dμ`), pushforwards under
//! `t ↦ t^m`, division by `t`, and signed linear combination, which is
//! exactly what the Berger-measure calculus requires.

use crate::verdict::{Verdict, Witness};
use crate::ATOM_MERGE_TOL;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of Chebyshev-distributed sample points per density piece used by
/// the positivity check (endpoints are added separately).
const DENSITY_GRID: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("integral of t^{exponent} is not defined: {reason}")]
    NonIntegrable { exponent: f64, reason: String },
    #[error("supplied gamma_{n} = {supplied} does not match moment {computed}")]
    GammaMismatch {
        n: u32,
        supplied: f64,
        computed: f64,
    },
    #[error("invalid measure: {0}")]
    Invalid(String),
}

/// One power term `coefficient · t^exponent` of a density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

/// A density `Σ cᵢ t^{pᵢ}` supported on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<PowerTerm>,
}

impl DensityPiece {
    /// Pointwise density value at `t`.
    pub fn density_at(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|pt| pt.coefficient * t.powf(pt.exponent))
            .sum()
    }

    /// `∫ t^r · density dt` over the piece, `None` when divergent at 0.
    fn integral_power(&self, r: f64) -> Vec<(f64, Option<f64>)> {
        self.terms
            .iter()
            .map(|pt| {
                let q = pt.exponent + r;
                if self.lo == 0.0 && q <= -1.0 {
                    (pt.coefficient, None)
                } else {
                    (pt.coefficient, Some(power_primitive(self.lo, self.hi, q)))
                }
            })
            .collect()
    }
}

/// `∫_lo^hi t^q dt` (requires the integral to exist; `lo > 0` or `q > -1`).
fn power_primitive(lo: f64, hi: f64, q: f64) -> f64 {
    if (q + 1.0).abs() < 1e-9 {
        (hi / lo).ln()
    } else {
        let e = q + 1.0;
        (hi.powf(e) - if lo == 0.0 { 0.0 } else { lo.powf(e) }) / e
    }
}

/// Value of an integral that may legitimately be `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integral {
    Finite(f64),
    Infinite,
}

impl Integral {
    pub fn is_finite(self) -> bool {
        matches!(self, Integral::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Integral::Finite(v) => Some(v),
            Integral::Infinite => None,
        }
    }
}

/// Finite measure on `[0, M]`: sorted atoms plus density pieces.
#[derive(Clone, Debug)]
pub struct Measure1D {
    atoms: Vec<(f64, f64)>,
    pieces: Vec<DensityPiece>,
    signed: bool,
}

impl Measure1D {
    /// The zero measure.
    pub fn zero() -> Self {
        Measure1D {
            atoms: vec![],
            pieces: vec![],
            signed: false,
        }
    }

    /// Point mass of weight 1 at `loc`.
    pub fn dirac(loc: f64) -> Self {
        Measure1D {
            atoms: vec![(loc, 1.0)],
            pieces: vec![],
            signed: false,
        }
    }

    /// Positive purely atomic measure.
    pub fn atomic(atoms: &[(f64, f64)]) -> Result<Self, MeasureError> {
        Self::new_positive(atoms.to_vec(), vec![])
    }

    /// Lebesgue measure (density 1) on `[lo, hi]`.
    pub fn lebesgue(lo: f64, hi: f64) -> Result<Self, MeasureError> {
        Self::new_positive(
            vec![],
            vec![DensityPiece {
                lo,
                hi,
                terms: vec![PowerTerm {
                    coefficient: 1.0,
                    exponent: 0.0,
                }],
            }],
        )
    }

    /// A measure flagged positive; the flag is verified with the default
    /// positivity tolerance.
    pub fn new_positive(
        atoms: Vec<(f64, f64)>,
        pieces: Vec<DensityPiece>,
    ) -> Result<Self, MeasureError> {
        let m = Self::normalised(atoms, pieces, false)?;
        let v = m.is_nonnegative(crate::DEFAULT_TOL);
        if !v.pass {
            return Err(MeasureError::Invalid(format!("flagged positive but {v}")));
        }
        Ok(m)
    }

    /// A measure that is allowed to carry negative masses or densities.
    pub fn new_signed(
        atoms: Vec<(f64, f64)>,
        pieces: Vec<DensityPiece>,
    ) -> Result<Self, MeasureError> {
        Self::normalised(atoms, pieces, true)
    }

    fn normalised(
        atoms: Vec<(f64, f64)>,
        pieces: Vec<DensityPiece>,
        signed: bool,
    ) -> Result<Self, MeasureError> {
        for &(loc, mass) in &atoms {
            if !loc.is_finite() || !mass.is_finite() || loc < 0.0 {
                return Err(MeasureError::Invalid(format!("bad atom ({loc}, {mass})")));
            }
        }
        let atoms = merge_atoms(atoms);
        let mut out = Vec::with_capacity(pieces.len());
        for p in pieces {
            if !p.lo.is_finite() || !p.hi.is_finite() || p.lo < 0.0 || p.hi <= p.lo {
                return Err(MeasureError::Invalid(format!(
                    "bad piece interval [{}, {}]",
                    p.lo, p.hi
                )));
            }
            let terms = merge_terms(p.terms);
            for t in &terms {
                if !t.coefficient.is_finite() || !t.exponent.is_finite() {
                    return Err(MeasureError::Invalid("non-finite density term".into()));
                }
                if p.lo == 0.0 && t.exponent <= -1.0 {
                    return Err(MeasureError::Invalid(format!(
                        "piece touching 0 has non-integrable exponent {}",
                        t.exponent
                    )));
                }
            }
            if !terms.is_empty() {
                out.push(DensityPiece {
                    lo: p.lo,
                    hi: p.hi,
                    terms,
                });
            }
        }
        out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in out.windows(2) {
            if w[0].hi > w[1].lo + 1e-12 * (1.0 + w[1].lo.abs()) {
                return Err(MeasureError::Invalid(format!(
                    "pieces [{},{}] and [{},{}] overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(Measure1D {
            atoms,
            pieces: out,
            signed,
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn is_flagged_signed(&self) -> bool {
        self.signed
    }

    /// Converts to a positive-flagged measure after verifying nonnegativity.
    pub fn into_positive(mut self, tol: f64) -> Result<Self, MeasureError> {
        let v = self.is_nonnegative(tol);
        if !v.pass {
            return Err(MeasureError::Invalid(format!("not nonnegative: {v}")));
        }
        self.signed = false;
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    /// Total mass `∫ dμ`.
    pub fn mass(&self) -> f64 {
        self.moment(0)
    }

    /// Upper bound on the total variation (exact for atomic measures and
    /// single-sign densities).
    pub fn total_variation_bound(&self) -> f64 {
        let a: f64 = self.atoms.iter().map(|&(_, m)| m.abs()).sum();
        let p: f64 = self
            .pieces
            .iter()
            .flat_map(|p| {
                p.terms
                    .iter()
                    .map(move |t| t.coefficient.abs() * power_primitive(p.lo, p.hi, t.exponent))
            })
            .sum();
        a + p
    }

    /// Largest point of the support (0 for the zero measure).
    pub fn max_support(&self) -> f64 {
        let a = self.atoms.last().map(|&(l, _)| l).unwrap_or(0.0);
        let p = self.pieces.last().map(|p| p.hi).unwrap_or(0.0);
        a.max(p)
    }

    /// Mass of the atom at 0, if any.
    pub fn mass_at_zero(&self) -> f64 {
        self.atoms
            .first()
            .filter(|&&(l, _)| l == 0.0)
            .map(|&(_, m)| m)
            .unwrap_or(0.0)
    }

    /// The measure with the atom at 0 removed.
    pub fn restricted_off_zero(&self) -> Self {
        let atoms = self
            .atoms
            .iter()
            .copied()
            .filter(|&(l, _)| l != 0.0)
            .collect();
        Measure1D {
            atoms,
            pieces: self.pieces.clone(),
            signed: self.signed,
        }
    }

    /// `∫ t^k dμ`; finite for every `k ≥ 0`.
    pub fn moment(&self, k: u32) -> f64 {
        let a: f64 = self
            .atoms
            .iter()
            .map(|&(loc, mass)| {
                if k == 0 {
                    mass
                } else {
                    mass * loc.powi(k as i32)
                }
            })
            .sum();
        let p: f64 = self
            .pieces
            .iter()
            .flat_map(|p| {
                p.terms.iter().map(move |t| {
                    t.coefficient * power_primitive(p.lo, p.hi, t.exponent + k as f64)
                })
            })
            .sum();
        a + p
    }

    /// `∫ t^r dμ` for real `r`.
    ///
    /// Returns `Infinite` when a positive part diverges (atom at 0 with
    /// `r < 0`, or a divergent density tail at 0); an error when a negative
    /// contribution diverges, which would make the integral ill-defined.
    pub fn integrate_power(&self, r: f64) -> Result<Integral, MeasureError> {
        let mut total = 0.0;
        let mut infinite = false;
        let mut diverge = |c: f64| -> Result<(), MeasureError> {
            if c > 0.0 {
                infinite = true;
                Ok(())
            } else {
                Err(MeasureError::NonIntegrable {
                    exponent: r,
                    reason: "negative part diverges at 0".into(),
                })
            }
        };
        for &(loc, mass) in &self.atoms {
            if loc == 0.0 {
                if r == 0.0 {
                    total += mass;
                } else if r > 0.0 {
                    // t^r vanishes at 0
                } else if mass != 0.0 {
                    diverge(mass)?;
                }
            } else {
                total += mass * loc.powf(r);
            }
        }
        for p in &self.pieces {
            for (c, v) in p.integral_power(r) {
                match v {
                    Some(x) => total += c * x,
                    None => {
                        if c != 0.0 {
                            diverge(c)?;
                        }
                    }
                }
            }
        }
        Ok(if infinite {
            Integral::Infinite
        } else {
            Integral::Finite(total)
        })
    }

    /// Image measure under `t ↦ t^m`: `moment(result, k) = moment(self, m·k)`.
    pub fn pushforward_power(&self, m: u32) -> Self {
        assert!(m >= 1, "pushforward exponent must be at least 1");
        if m == 1 {
            return self.clone();
        }
        let atoms = self
            .atoms
            .iter()
            .map(|&(loc, mass)| (loc.powi(m as i32), mass))
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| DensityPiece {
                lo: p.lo.powi(m as i32),
                hi: p.hi.powi(m as i32),
                terms: p
                    .terms
                    .iter()
                    .map(|t| PowerTerm {
                        coefficient: t.coefficient / m as f64,
                        exponent: (t.exponent + 1.0) / m as f64 - 1.0,
                    })
                    .collect(),
            })
            .collect();
        Measure1D {
            atoms,
            pieces,
            signed: self.signed,
        }
    }

    /// Restriction tilt `dμ ↦ (t^n / γ_n) dμ`. The caller supplies `γ_n`
    /// for cross-checking against `moment(n)`.
    pub fn tilt(&self, n: u32, gamma_n: f64) -> Result<Self, MeasureError> {
        let computed = self.moment(n);
        if (computed - gamma_n).abs() > 1e-9 * gamma_n.abs().max(1.0) {
            return Err(MeasureError::GammaMismatch {
                n,
                supplied: gamma_n,
                computed,
            });
        }
        if gamma_n == 0.0 {
            return Err(MeasureError::Invalid("tilt by vanishing moment".into()));
        }
        let atoms = self
            .atoms
            .iter()
            .filter(|&&(loc, _)| !(loc == 0.0 && n > 0))
            .map(|&(loc, mass)| {
                (
                    loc,
                    mass * if n == 0 { 1.0 } else { loc.powi(n as i32) } / gamma_n,
                )
            })
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| DensityPiece {
                lo: p.lo,
                hi: p.hi,
                terms: p
                    .terms
                    .iter()
                    .map(|t| PowerTerm {
                        coefficient: t.coefficient / gamma_n,
                        exponent: t.exponent + n as f64,
                    })
                    .collect(),
            })
            .collect();
        Ok(Measure1D {
            atoms,
            pieces,
            signed: self.signed,
        })
    }

    /// `dμ ↦ (1/t) dμ`; total mass of the result is `∫ t⁻¹ dμ`.
    pub fn divide_by_t(&self) -> Result<Self, MeasureError> {
        if self.mass_at_zero() != 0.0 {
            return Err(MeasureError::NonIntegrable {
                exponent: -1.0,
                reason: "measure charges {0}".into(),
            });
        }
        let atoms = self
            .atoms
            .iter()
            .map(|&(loc, mass)| (loc, mass / loc))
            .collect();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let terms: Vec<PowerTerm> = p
                .terms
                .iter()
                .map(|t| PowerTerm {
                    coefficient: t.coefficient,
                    exponent: t.exponent - 1.0,
                })
                .collect();
            if p.lo == 0.0 {
                for t in &terms {
                    if t.exponent <= -1.0 && t.coefficient != 0.0 {
                        return Err(MeasureError::NonIntegrable {
                            exponent: -1.0,
                            reason: "density non-integrable at 0 after division".into(),
                        });
                    }
                }
            }
            pieces.push(DensityPiece {
                lo: p.lo,
                hi: p.hi,
                terms,
            });
        }
        Ok(Measure1D {
            atoms,
            pieces,
            signed: self.signed,
        })
    }

    /// `c·μ`.
    pub fn scaled(&self, c: f64) -> Self {
        linear_combine(&[(c, self)])
    }

    /// Decides `μ ≥ 0` up to `tol`.
    ///
    /// Atoms are checked directly. Each density piece is sampled at
    /// [`DENSITY_GRID`] Chebyshev-distributed points plus both endpoints;
    /// a piece touching 0 whose dominant exponent is negative is decided by
    /// the sign of that dominant coefficient. The verdict carries the
    /// most-negative value found and its location.
    pub fn is_nonnegative(&self, tol: f64) -> Verdict {
        let mut min_val = f64::INFINITY;
        let mut min_loc = 0.0;
        let mut record = |t: f64, v: f64| {
            if v < min_val {
                min_val = v;
                min_loc = t;
            }
        };
        for &(loc, mass) in &self.atoms {
            record(loc, mass);
        }
        for p in &self.pieces {
            let half = 0.5 * (p.hi - p.lo);
            let mid = 0.5 * (p.hi + p.lo);
            for j in 0..DENSITY_GRID {
                let theta = std::f64::consts::PI * (j as f64 + 0.5) / DENSITY_GRID as f64;
                let t = mid + half * theta.cos();
                record(t, p.density_at(t));
            }
            record(p.hi, p.density_at(p.hi));
            let p_min = p
                .terms
                .iter()
                .map(|t| t.exponent)
                .fold(f64::INFINITY, f64::min);
            if p.lo == 0.0 && p_min < 0.0 {
                // the dominant power decides the sign of the limit at 0+
                let c: f64 = p
                    .terms
                    .iter()
                    .filter(|t| (t.exponent - p_min).abs() < 1e-12)
                    .map(|t| t.coefficient)
                    .sum();
                record(
                    0.0,
                    if c < 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        p.density_at(2.0 * half * 1e-9)
                    },
                );
            } else {
                record(p.lo, p.density_at(p.lo));
            }
        }
        if min_val == f64::INFINITY {
            // the zero measure sits on the boundary of the cone
            return Verdict::pass(0.0, None);
        }
        let witness = Witness::Location {
            t: min_loc,
            value: min_val,
        };
        if min_val >= -tol {
            Verdict::pass(min_val, Some(witness))
        } else {
            Verdict::fail(min_val, witness)
        }
    }
}

fn merge_atoms(mut atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (loc, mass) in atoms {
        match out.last_mut() {
            Some(last) if loc - last.0 <= ATOM_MERGE_TOL => last.1 += mass,
            _ => out.push((loc, mass)),
        }
    }
    out.retain(|&(_, m)| m != 0.0);
    out
}

fn merge_terms(terms: Vec<PowerTerm>) -> Vec<PowerTerm> {
    let mut sorted = terms;
    sorted.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
    let mut out: Vec<PowerTerm> = Vec::with_capacity(sorted.len());
    for t in sorted {
        match out.last_mut() {
            Some(last) if (t.exponent - last.exponent).abs() <= 1e-12 => {
                last.coefficient += t.coefficient
            }
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coefficient != 0.0);
    out
}

/// Signed linear combination `Σ cᵢ μᵢ`.
///
/// Atoms are merged within [`ATOM_MERGE_TOL`]; density pieces are refined on
/// the common interval grid and their terms combined exponent by exponent,
/// so `μ − μ` collapses to the zero measure.
pub fn linear_combine(terms: &[(f64, &Measure1D)]) -> Measure1D {
    let mut atoms = Vec::new();
    for &(c, m) in terms {
        if c == 0.0 {
            continue;
        }
        atoms.extend(m.atoms.iter().map(|&(l, v)| (l, c * v)));
    }
    let atoms = merge_atoms(atoms);

    let mut cuts: Vec<f64> = terms
        .iter()
        .filter(|&&(c, _)| c != 0.0)
        .flat_map(|&(_, m)| m.pieces.iter().flat_map(|p| [p.lo, p.hi]))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

    let mut pieces: Vec<DensityPiece> = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= 1e-14 * (1.0 + hi.abs()) {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let mut sub = Vec::new();
        for &(c, m) in terms {
            if c == 0.0 {
                continue;
            }
            for p in &m.pieces {
                if p.lo <= mid && mid <= p.hi {
                    sub.extend(p.terms.iter().map(|t| PowerTerm {
                        coefficient: c * t.coefficient,
                        exponent: t.exponent,
                    }));
                }
            }
        }
        let sub = merge_terms(sub);
        if sub.is_empty() {
            continue;
        }
        match pieces.last_mut() {
            // fuse with the previous piece when the density continues unchanged
            Some(last) if last.hi == lo && last.terms == sub => last.hi = hi,
            _ => pieces.push(DensityPiece { lo, hi, terms: sub }),
        }
    }

    Measure1D {
        atoms,
        pieces,
        signed: true,
    }
}

/// Set-wise order `μ ≤ ν`, decided as `ν − μ ≥ 0`.
pub fn measure_leq(mu: &Measure1D, nu: &Measure1D, tol: f64) -> Verdict {
    linear_combine(&[(1.0, nu), (-1.0, mu)]).is_nonnegative(tol)
}

impl std::fmt::Display for Measure1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(loc, mass) in &self.atoms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{mass:.12}·δ({loc})")?;
            first = false;
        }
        for p in &self.pieces {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "[")?;
            for (i, t) in p.terms.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "{:.12}·t^{}", t.coefficient, t.exponent)?;
            }
            write!(f, " dt on ({}, {})]", p.lo, p.hi)?;
            first = false;
        }
        Ok(())
    }
}

// JSON shape: {"atoms": [[loc, mass], ...],
//              "pieces": [{"lo": r, "hi": r, "terms": [[coef, exponent], ...]}, ...]}
#[derive(Serialize, Deserialize)]
struct PieceRepr {
    lo: f64,
    hi: f64,
    terms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<(f64, f64)>,
    pieces: Vec<PieceRepr>,
}

impl Serialize for Measure1D {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MeasureRepr {
            atoms: self.atoms.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceRepr {
                    lo: p.lo,
                    hi: p.hi,
                    terms: p
                        .terms
                        .iter()
                        .map(|t| (t.coefficient, t.exponent))
                        .collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Measure1D {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        let negative = repr.atoms.iter().any(|&(_, m)| m < 0.0)
            || repr
                .pieces
                .iter()
                .any(|p| p.terms.iter().any(|&(c, _)| c < 0.0));
        let pieces = repr
            .pieces
            .into_iter()
            .map(|p| DensityPiece {
                lo: p.lo,
                hi: p.hi,
                terms: p
                    .terms
                    .into_iter()
                    .map(|(c, e)| PowerTerm {
                        coefficient: c,
                        exponent: e,
                    })
                    .collect(),
            })
            .collect();
        let m = Measure1D::normalised(repr.atoms, pieces, negative).map_err(D::Error::custom)?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atoms() -> Measure1D {
        Measure1D::atomic(&[(0.25, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn moments_of_point_masses_and_lebesgue() {
        assert_eq!(Measure1D::dirac(1.0).moment(5), 1.0);
        let leb = Measure1D::lebesgue(0.0, 1.0).unwrap();
        assert!((leb.moment(2) - 1.0 / 3.0).abs() < 1e-15);
        let sa = Measure1D::atomic(&[(0.0, 0.51), (1.0, 0.49)]).unwrap();
        assert!((sa.moment(3) - 0.49).abs() < 1e-15);
    }

    #[test]
    fn integrate_power_inverse_t() {
        assert_eq!(
            Measure1D::dirac(1.0).integrate_power(-1.0).unwrap(),
            Integral::Finite(1.0)
        );
        let m = two_atoms();
        assert_eq!(m.integrate_power(-1.0).unwrap(), Integral::Finite(2.5));
        let charged = Measure1D::atomic(&[(0.0, 0.75), (1.0, 0.25)]).unwrap();
        assert_eq!(charged.integrate_power(-1.0).unwrap(), Integral::Infinite);
    }

    #[test]
    fn pushforward_atoms_and_density() {
        let m = Measure1D::dirac(0.5).pushforward_power(2);
        assert_eq!(m.atoms(), &[(0.25, 1.0)]);
        let m = Measure1D::dirac(1.0).pushforward_power(7);
        assert_eq!(m.atoms(), &[(1.0, 1.0)]);

        let leb = Measure1D::lebesgue(0.0, 1.0).unwrap();
        let push = leb.pushforward_power(2);
        // density (1/2)·s^{-1/2} on [0,1]
        assert_eq!(push.pieces().len(), 1);
        let t = &push.pieces()[0].terms[0];
        assert!((t.coefficient - 0.5).abs() < 1e-15 && (t.exponent + 0.5).abs() < 1e-15);
        assert!((push.moment(1) - leb.moment(2)).abs() < 1e-15);
    }

    #[test]
    fn tilt_examples() {
        let d1 = Measure1D::dirac(1.0);
        let t = d1.tilt(3, 1.0).unwrap();
        assert_eq!(t.atoms(), &[(1.0, 1.0)]);

        let sa = Measure1D::atomic(&[(0.0, 0.51), (1.0, 0.49)]).unwrap();
        let t = sa.tilt(1, 0.49).unwrap();
        assert_eq!(t.atoms(), &[(1.0, 1.0)]);

        let m = two_atoms();
        let t = m.tilt(1, 0.625).unwrap();
        assert!((t.atoms()[0].1 - 0.2).abs() < 1e-15);
        assert!((t.atoms()[1].1 - 0.8).abs() < 1e-15);

        assert!(matches!(
            m.tilt(1, 0.7),
            Err(MeasureError::GammaMismatch { .. })
        ));
    }

    #[test]
    fn divide_by_t_examples() {
        let d1 = Measure1D::dirac(1.0).divide_by_t().unwrap();
        assert_eq!(d1.atoms(), &[(1.0, 1.0)]);

        let m = two_atoms().divide_by_t().unwrap();
        assert_eq!(m.atoms(), &[(0.25, 2.0), (1.0, 0.5)]);

        let charged = Measure1D::atomic(&[(0.0, 0.75), (1.0, 0.25)]).unwrap();
        assert!(matches!(
            charged.divide_by_t(),
            Err(MeasureError::NonIntegrable { .. })
        ));
    }

    #[test]
    fn linear_combine_merges_and_cancels() {
        let d1 = Measure1D::dirac(1.0);
        let psi = linear_combine(&[(1.0, &d1), (-0.49, &d1)]);
        assert_eq!(psi.atoms().len(), 1);
        assert!((psi.atoms()[0].1 - 0.51).abs() < 1e-15);

        let m = two_atoms();
        assert!(linear_combine(&[(1.0, &m), (-1.0, &m)]).is_zero());
        let leb = Measure1D::lebesgue(0.0, 1.0).unwrap();
        assert!(linear_combine(&[(1.0, &leb), (-1.0, &leb)]).is_zero());

        let d0 = Measure1D::dirac(0.0);
        let both = linear_combine(&[(1.0, &d0), (1.0, &d1)]);
        let diff = linear_combine(&[(1.0, &both), (-2.0, &d0)]);
        assert_eq!(diff.atoms(), &[(0.0, -1.0), (1.0, 1.0)]);
    }

    #[test]
    fn nonnegativity_verdicts() {
        let psi = Measure1D::dirac(1.0).scaled(0.51);
        let v = psi.is_nonnegative(1e-9);
        assert!(v.pass);
        assert!((v.margin - 0.51).abs() < 1e-15);

        let d0 = Measure1D::dirac(0.0);
        let d1 = Measure1D::dirac(1.0);
        let bad = linear_combine(&[(-1.0, &d0), (1.0, &d1)]);
        let v = bad.is_nonnegative(1e-9);
        assert!(!v.pass);
        assert_eq!(
            v.witness,
            Some(Witness::Location {
                t: 0.0,
                value: -1.0
            })
        );

        // density 0.5 - t on [0,1] dips negative near t = 1
        let p = Measure1D::new_signed(
            vec![],
            vec![DensityPiece {
                lo: 0.0,
                hi: 1.0,
                terms: vec![
                    PowerTerm {
                        coefficient: 0.5,
                        exponent: 0.0,
                    },
                    PowerTerm {
                        coefficient: -1.0,
                        exponent: 1.0,
                    },
                ],
            }],
        )
        .unwrap();
        let v = p.is_nonnegative(1e-9);
        assert!(!v.pass);
        match v.witness {
            Some(Witness::Location { t, value }) => {
                assert!(t > 0.99 && (value + 0.5).abs() < 1e-2);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn measure_order_examples() {
        let d1 = Measure1D::dirac(1.0);
        assert!(measure_leq(&d1, &d1.scaled(2.0), 1e-9).pass);
        assert!(!measure_leq(&Measure1D::dirac(0.0), &d1, 1e-9).pass);

        // 0.49·0.64·δ₁ ≤ 0.64δ₀ + 0.36δ₁ with margin 0.36 − 0.3136
        let lhs = d1.scaled(0.49 * 0.64);
        let rhs = Measure1D::atomic(&[(0.0, 0.64), (1.0, 0.36)]).unwrap();
        let v = measure_leq(&lhs, &rhs, 1e-9);
        assert!(v.pass);
        assert!((v.margin - 0.0464).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_integrable_pieces_touching_zero() {
        let bad = Measure1D::new_signed(
            vec![],
            vec![DensityPiece {
                lo: 0.0,
                hi: 1.0,
                terms: vec![PowerTerm {
                    coefficient: 1.0,
                    exponent: -1.0,
                }],
            }],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn json_round_trip_field_names() {
        let m = Measure1D::new_positive(
            vec![(0.0, 0.36)],
            vec![DensityPiece {
                lo: 0.0,
                hi: 1.0,
                terms: vec![PowerTerm {
                    coefficient: 0.5,
                    exponent: 0.0,
                }],
            }],
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(
            s.contains("\"atoms\"")
                && s.contains("\"pieces\"")
                && s.contains("\"lo\"")
                && s.contains("\"terms\"")
        );
        let back: Measure1D = serde_json::from_str(&s).unwrap();
        for k in 0..6 {
            assert!((back.moment(k) - m.moment(k)).abs() < 1e-15);
        }
    }
}
