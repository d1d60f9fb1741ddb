//! Two-variable weighted shifts whose core is of tensor form.
//!
//! Such a shift is determined by five parameters `⟨σ, τ, a, ξ, η⟩`: the
//! Berger measures of the 0-th row and 0-th column, the first weight `a` of
//! row 1, and the Berger measures `ξ, η` of the horizontal and vertical
//! core shifts. Everything else in the weight diagram is forced by
//! commutativity.
//!
//! The module provides the diagram builder, the ψ/φ subnormality criterion,
//! the direct-sum decomposition of powers `(T₁^m, T₂^n)` into shifts of the
//! same class, a verifier for the power-invariance of subnormality, and the
//! Berger-measure reconstruction for subnormal tuples.

use crate::measure1d::{linear_combine, Integral, Measure1D, MeasureError};
use crate::measure2d::{backward_ext_2var, Measure2D, ProductTerm};
use crate::shift1d::{power_measure, restriction_measure, weights_from_measure, ShiftError};
use crate::shift2d::{GridError, ShiftGrid};
use crate::verdict::{Verdict, Witness};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TcError {
    #[error("unbounded weight diagram: {0}")]
    Unbounded(String),
    #[error("not subnormal: {0}")]
    NotSubnormal(String),
    #[error("invalid five-tuple: {0}")]
    Invalid(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Default guaranteed window of grids built from a five-tuple.
pub const DEFAULT_GRID_WINDOW: (usize, usize) = (48, 48);

/// Canonical parameterization `⟨σ, τ, a, ξ, η⟩` of a shift with tensor core.
///
/// All four measures have total mass 1. They are normally positive; signed
/// row/column measures can arise transiently inside power decompositions of
/// invalid candidates and make `is_subnormal` fail with a witness, which is
/// the correct verdict because compactly supported moment sequences have
/// unique representing measures.
#[derive(Clone, Debug)]
pub struct FiveTuple {
    sigma: Measure1D,
    tau: Measure1D,
    a: f64,
    xi: Measure1D,
    eta: Measure1D,
}

impl FiveTuple {
    pub fn new(
        sigma: Measure1D,
        tau: Measure1D,
        a: f64,
        xi: Measure1D,
        eta: Measure1D,
    ) -> Result<Self, TcError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(TcError::Invalid(format!(
                "a must be a positive real, got {a}"
            )));
        }
        for (name, m) in [("sigma", &sigma), ("tau", &tau), ("xi", &xi), ("eta", &eta)] {
            let mass = m.mass();
            if (mass - 1.0).abs() > 1e-9 {
                return Err(TcError::Invalid(format!(
                    "{name} must have mass 1, got {mass}"
                )));
            }
        }
        Ok(FiveTuple {
            sigma,
            tau,
            a,
            xi,
            eta,
        })
    }

    pub fn sigma(&self) -> &Measure1D {
        &self.sigma
    }

    pub fn tau(&self) -> &Measure1D {
        &self.tau
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn xi(&self) -> &Measure1D {
        &self.xi
    }

    pub fn eta(&self) -> &Measure1D {
        &self.eta
    }

    /// `x₀ = √∫s dσ`, the first weight of the 0-th row.
    pub fn x0(&self) -> f64 {
        self.sigma.moment(1).sqrt()
    }

    /// `y₀ = β₀₀ = √∫t dτ`, the first weight of the 0-th column.
    pub fn y0(&self) -> f64 {
        self.tau.moment(1).sqrt()
    }
}

#[derive(Serialize, Deserialize)]
struct FiveTupleRepr {
    sigma: Measure1D,
    tau: Measure1D,
    a: f64,
    xi: Measure1D,
    eta: Measure1D,
}

impl Serialize for FiveTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FiveTupleRepr {
            sigma: self.sigma.clone(),
            tau: self.tau.clone(),
            a: self.a,
            xi: self.xi.clone(),
            eta: self.eta.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiveTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = FiveTupleRepr::deserialize(d)?;
        FiveTuple::new(r.sigma, r.tau, r.a, r.xi, r.eta).map_err(D::Error::custom)
    }
}

/// Grid input accepted by the command line: either a five-tuple or an
/// explicit window of weight rows with a tensor tail.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridDescriptor {
    Tc {
        tc: FiveTuple,
    },
    Explicit {
        #[serde(rename = "alphaRows")]
        alpha_rows: Vec<Vec<f64>>,
        #[serde(rename = "betaRows")]
        beta_rows: Vec<Vec<f64>>,
        tail: ExplicitTail,
    },
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug)]
pub enum ExplicitTail {
    #[serde(rename = "tensor")]
    Tensor,
}

impl GridDescriptor {
    pub fn build(&self, window: (usize, usize)) -> Result<ShiftGrid, TcError> {
        match self {
            GridDescriptor::Tc { tc } => build_grid_windowed(tc, window),
            GridDescriptor::Explicit {
                alpha_rows,
                beta_rows,
                ..
            } => Ok(ShiftGrid::from_rows(alpha_rows.clone(), beta_rows.clone())?),
        }
    }
}

/// Builds the weight diagram with the default window promise.
pub fn build_grid(ft: &FiveTuple) -> Result<ShiftGrid, TcError> {
    build_grid_windowed(ft, DEFAULT_GRID_WINDOW)
}

/// Builds the weight diagram of the five-tuple.
///
/// Row 0 and column 0 carry the weights of `σ` and `τ`; the core carries
/// the weights of `ξ` and `η`; the two seams are forced by commutativity:
///
/// - `α_{(0,k₂)} = a·β₁···β_{k₂−1}/(y₁···y_{k₂−1})`
/// - `β_{(k₁,0)} = a·y₀·α₁···α_{k₁−1}/(x₀···x_{k₁−1})`
///
/// Fails with `Unbounded` when a seam weight exceeds a fixed large bound
/// inside the promised window.
pub fn build_grid_windowed(ft: &FiveTuple, window: (usize, usize)) -> Result<ShiftGrid, TcError> {
    let sig = Arc::new(weights_from_measure(&ft.sigma)?);
    let tau = Arc::new(weights_from_measure(&ft.tau)?);
    let xi = Arc::new(weights_from_measure(&ft.xi)?);
    let eta = Arc::new(weights_from_measure(&ft.eta)?);
    let a = ft.a;
    let y0 = ft.y0();

    let alpha = {
        let (sig, xi, eta, tau) = (sig.clone(), xi.clone(), eta.clone(), tau.clone());
        move |k1: usize, k2: usize| -> f64 {
            let r = if k2 == 0 {
                sig.weight(k1 as u32)
            } else if k1 >= 1 {
                xi.weight((k1 - 1) as u32)
            } else {
                // a·β₁···β_{k2−1}/(y₁···y_{k2−1}) through the moment ladders
                (|| {
                    Ok::<f64, ShiftError>(
                        a * y0 * (eta.gamma((k2 - 1) as u32)? / tau.gamma(k2 as u32)?).sqrt(),
                    )
                })()
            };
            r.expect("weights exist inside the promised window")
        }
    };
    let beta = {
        let (sig, xi, eta, tau) = (sig.clone(), xi.clone(), eta.clone(), tau.clone());
        move |k1: usize, k2: usize| -> f64 {
            let r = if k1 == 0 {
                tau.weight(k2 as u32)
            } else if k2 >= 1 {
                eta.weight((k2 - 1) as u32)
            } else {
                (|| {
                    Ok::<f64, ShiftError>(
                        a * y0 * (xi.gamma((k1 - 1) as u32)? / sig.gamma(k1 as u32)?).sqrt(),
                    )
                })()
            };
            r.expect("weights exist inside the promised window")
        }
    };

    // probe the window: every weight must exist and stay bounded
    const BOUND: f64 = 1e8;
    let check = |w: Result<f64, ShiftError>, what: &str, k: usize| -> Result<(), TcError> {
        let w = w.map_err(TcError::from)?;
        if !w.is_finite() || w > BOUND {
            return Err(TcError::Unbounded(format!(
                "{what} weight at index {k} is {w}"
            )));
        }
        Ok(())
    };
    for k1 in 0..=(window.0 + 2) as u32 {
        check(sig.weight(k1), "row-0", k1 as usize)?;
        check(xi.weight(k1), "core horizontal", k1 as usize)?;
        check(
            (|| Ok::<f64, ShiftError>(a * y0 * (xi.gamma(k1)? / sig.gamma(k1 + 1)?).sqrt()))(),
            "column seam",
            k1 as usize,
        )?;
    }
    for k2 in 0..=(window.1 + 2) as u32 {
        check(tau.weight(k2), "column-0", k2 as usize)?;
        check(eta.weight(k2), "core vertical", k2 as usize)?;
        check(
            (|| Ok::<f64, ShiftError>(a * y0 * (eta.gamma(k2)? / tau.gamma(k2 + 1)?).sqrt()))(),
            "row seam",
            k2 as usize,
        )?;
    }

    Ok(ShiftGrid::from_generators(
        alpha,
        beta,
        (window.0 + 2, window.1 + 2),
    ))
}

fn finite(i: Integral, what: &str) -> Result<f64, TcError> {
    i.finite().ok_or_else(|| {
        TcError::Measure(MeasureError::NonIntegrable {
            exponent: -1.0,
            reason: format!("{what} diverges"),
        })
    })
}

/// The pair of signed functionals deciding subnormality:
///
/// - `ψ = τ₁ − a²‖1/s‖_{L¹(ξ)} η` with `τ₁` the level-1 restriction of `τ`,
/// - `φ = σ − y₀²‖1/t‖_{L¹(ψ)} δ₀ − a²y₀²‖1/t‖_{L¹(η)} (ξ/s)`,
///
/// where the norm against the signed `ψ` is the signed integral `∫t⁻¹dψ`.
pub fn psi_phi(ft: &FiveTuple) -> Result<(Measure1D, Measure1D), TcError> {
    let y0_sq = ft.tau.moment(1);
    let tau1 = restriction_measure(&ft.tau, 1)?;
    let inv_s_xi = finite(ft.xi.integrate_power(-1.0)?, "‖1/s‖ over ξ")?;
    let psi = linear_combine(&[(1.0, &tau1), (-ft.a * ft.a * inv_s_xi, &ft.eta)]);
    let inv_t_psi = finite(psi.integrate_power(-1.0)?, "∫1/t dψ")?;
    let inv_t_eta = finite(ft.eta.integrate_power(-1.0)?, "‖1/t‖ over η")?;
    let xi_over_s = ft.xi.divide_by_t()?;
    let zero = Measure1D::dirac(0.0);
    let phi = linear_combine(&[
        (1.0, &ft.sigma),
        (-y0_sq * inv_t_psi, &zero),
        (-ft.a * ft.a * y0_sq * inv_t_eta, &xi_over_s),
    ]);
    Ok((psi, phi))
}

fn tagged(which: &'static str, v: Verdict) -> Verdict {
    let witness = match v.witness {
        Some(Witness::Location { t, value }) => Some(Witness::Tagged { which, t, value }),
        other => other,
    };
    Verdict {
        pass: v.pass,
        margin: v.margin,
        witness,
    }
}

/// Subnormality of the tuple: all five parameters valid and `ψ ≥ 0`, `φ ≥ 0`.
pub fn is_subnormal(ft: &FiveTuple, tol: f64) -> Verdict {
    for (name, m) in [
        ("sigma", &ft.sigma),
        ("tau", &ft.tau),
        ("xi", &ft.xi),
        ("eta", &ft.eta),
    ] {
        let v = m.is_nonnegative(tol);
        if !v.pass {
            return Verdict {
                pass: false,
                margin: v.margin,
                witness: Some(Witness::Reason(format!(
                    "{name} is not a positive measure: {v}"
                ))),
            };
        }
    }
    match psi_phi(ft) {
        Ok((psi, phi)) => {
            let vp = tagged("psi", psi.is_nonnegative(tol));
            let vf = tagged("phi", phi.is_nonnegative(tol));
            vp.and(vf)
        }
        Err(e) => Verdict::fail_because(e.to_string()),
    }
}

/// The index-swapped tuple `⟨τ, σ, a·y₀/x₀, η, ξ⟩`; its diagram is the
/// transpose of the original diagram.
pub fn transpose(ft: &FiveTuple) -> Result<FiveTuple, TcError> {
    let x0 = ft.x0();
    let y0 = ft.y0();
    if x0 <= 0.0 || y0 <= 0.0 {
        return Err(TcError::Invalid(
            "transpose needs positive first moments".into(),
        ));
    }
    FiveTuple::new(
        ft.tau.clone(),
        ft.sigma.clone(),
        ft.a * y0 / x0,
        ft.eta.clone(),
        ft.xi.clone(),
    )
}

/// Berger measure candidate of a backward extension `[a, ξ]`, allowing the
/// supercritical case: the δ₀ coefficient `1 − a²‖1/t‖` may be negative, in
/// which case the result is a signed (non-Berger) measure that makes the
/// subnormality test fail downstream.
fn back_ext_measure_signed(a: f64, xi: &Measure1D) -> Result<Measure1D, TcError> {
    let norm = finite(xi.integrate_power(-1.0)?, "‖1/t‖ over the extended measure")?;
    let divided = xi.divide_by_t()?;
    let zero = Measure1D::dirac(0.0);
    Ok(linear_combine(&[
        (a * a, &divided),
        (1.0 - a * a * norm, &zero),
    ]))
}

/// Decomposition of `(T₁, T₂^n)` into `n` tuples of the same class, ordered
/// by the residue `q` of the vertical index.
fn power_one_n(ft: &FiveTuple, n: u32) -> Result<Vec<FiveTuple>, TcError> {
    assert!(n >= 1);
    let y0 = ft.y0();
    let mut out = Vec::with_capacity(n as usize);
    for q in 0..n {
        let tau_q = power_measure(&ft.tau, n, q)?;
        let a_q = ft.a * y0 * (ft.eta.moment(n - 1 + q) / ft.tau.moment(n + q)).sqrt();
        let (sigma_q, eta_q) = if q == 0 {
            (ft.sigma.clone(), power_measure(&ft.eta, n, n - 1)?)
        } else {
            let seam = ft.a * y0 * (ft.eta.moment(q - 1) / ft.tau.moment(q)).sqrt();
            let sigma_q = back_ext_measure_signed(seam, &ft.xi)?;
            // Berger measure of the once-restricted packet shift of the core
            // column: the offset-(q−1) packet of η, restricted one step.
            let eta_q = restriction_measure(&power_measure(&ft.eta, n, q - 1)?, 1)?;
            (sigma_q, eta_q)
        };
        out.push(FiveTuple::new(sigma_q, tau_q, a_q, ft.xi.clone(), eta_q)?);
    }
    Ok(out)
}

/// Direct-sum decomposition of the power `(T₁^m, T₂^n)` into `m·n` tuples of
/// the same class, ordered row-major in the residues `(p, q)`.
pub fn power(ft: &FiveTuple, m: u32, n: u32) -> Result<Vec<FiveTuple>, TcError> {
    assert!(m >= 1 && n >= 1, "powers must be at least 1");
    let qs = power_one_n(ft, n)?;
    let mut per_q = Vec::with_capacity(qs.len());
    for g in &qs {
        per_q.push(power_one_n(&transpose(g)?, m)?);
    }
    let mut out = Vec::with_capacity((m * n) as usize);
    for p in 0..m as usize {
        for row in &per_q {
            out.push(transpose(&row[p])?);
        }
    }
    Ok(out)
}

/// Agreement status of one power against the base tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    /// Disagreement with a margin below `tol` on either side: positivity is
    /// exact in ℝ but floating verdicts flip at the boundary.
    Inconclusive,
    Defect,
}

#[derive(Clone, Debug)]
pub struct PowerEntry {
    pub m: u32,
    pub n: u32,
    pub all_subnormal: bool,
    /// Worst summand margin (most negative on failure, smallest on pass).
    pub margin: f64,
    pub failing_summand: Option<(u32, u32)>,
    pub agreement: Agreement,
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub base: Verdict,
    pub entries: Vec<PowerEntry>,
}

impl TheoremReport {
    pub fn defects(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.agreement == Agreement::Defect)
            .count()
    }

    pub fn all_agree(&self) -> bool {
        self.entries.iter().all(|e| e.agreement == Agreement::Agree)
    }
}

/// Verifies that subnormality of the tuple and of each power
/// `(T₁^m, T₂^n)`, `(m, n) ≤ (m_max, n_max)`, agree. A power is subnormal
/// exactly when every summand of its decomposition is.
pub fn verify_theorem(ft: &FiveTuple, m_max: u32, n_max: u32, tol: f64) -> TheoremReport {
    let base = is_subnormal(ft, crate::DEFAULT_TOL);
    let mut entries = Vec::new();
    for m in 1..=m_max {
        for n in 1..=n_max {
            let (all, margin, failing) = match power(ft, m, n) {
                Ok(summands) => {
                    let mut all = true;
                    let mut margin = f64::INFINITY;
                    let mut failing = None;
                    for (idx, s) in summands.iter().enumerate() {
                        let v = is_subnormal(s, crate::DEFAULT_TOL);
                        if !v.pass && failing.is_none() {
                            failing = Some(((idx as u32) / n, (idx as u32) % n));
                        }
                        all &= v.pass;
                        margin = margin.min(v.margin);
                    }
                    (all, margin, failing)
                }
                Err(_) => (false, f64::NEG_INFINITY, None),
            };
            let agreement = if all == base.pass {
                Agreement::Agree
            } else if base.margin.abs() < tol || margin.abs() < tol {
                Agreement::Inconclusive
            } else {
                Agreement::Defect
            };
            entries.push(PowerEntry {
                m,
                n,
                all_subnormal: all,
                margin,
                failing_summand: failing,
                agreement,
            });
        }
    }
    TheoremReport { base, entries }
}

/// Berger measure of a subnormal tuple.
///
/// The restriction to the rows `k₂ ≥ 1` has measure
/// `μ_M = a²·(ξ/s ⊗ η) + δ₀ ⊗ ψ`, and the full measure follows from the
/// subnormal backward extension in the t-direction with row measure `σ` and
/// first vertical weight `y₀`.
pub fn berger_measure(ft: &FiveTuple, tol: f64) -> Result<Measure2D, TcError> {
    let sub = is_subnormal(ft, tol);
    if !sub.pass {
        return Err(TcError::NotSubnormal(sub.to_string()));
    }
    let (psi, _) = psi_phi(ft)?;
    let mu_m = Measure2D::from_terms(vec![
        ProductTerm {
            weight: ft.a * ft.a,
            s: ft.xi.divide_by_t()?,
            t: ft.eta.clone(),
        },
        ProductTerm {
            weight: 1.0,
            s: Measure1D::dirac(0.0),
            t: psi,
        },
    ]);
    let (v, mu) = backward_ext_2var(&mu_m, &ft.sigma, ft.y0(), tol)?;
    match mu {
        Some(mu) if v.pass => Ok(mu),
        _ => Err(TcError::NotSubnormal(format!(
            "reconstruction rejected: {v}"
        ))),
    }
}

/// Convenience: the tuple of the worked flat example — `σ = [x, δ₁]`,
/// `τ = [y, δ₁]`, `ξ = η = δ₁`.
pub fn flat_tuple(x: f64, y: f64, a: f64) -> Result<FiveTuple, TcError> {
    let d1 = Measure1D::dirac(1.0);
    let sigma = Measure1D::atomic(&[(0.0, 1.0 - x * x), (1.0, x * x)]).map_err(TcError::Measure)?;
    let tau = Measure1D::atomic(&[(0.0, 1.0 - y * y), (1.0, y * y)]).map_err(TcError::Measure)?;
    FiveTuple::new(sigma, tau, a, d1.clone(), d1)
}
