//! Unilateral weighted shifts: weights ↔ moments ↔ Berger measures.
//!
//! A shift is identified with its weight sequence. Sequences can be given
//! explicitly (with an optional constant tail), backed by a probability
//! measure whose moments generate the weights, backward-extended by a
//! prepended weight, or formed as size-`m` packets of another sequence
//! (the building block of the direct-sum decomposition of powers).

use crate::measure1d::{linear_combine, Integral, Measure1D, MeasureError};
use crate::verdict::{Verdict, Witness};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ShiftError {
    #[error("weight sequence degenerates: moment ratio is not positive at index {index}")]
    DegenerateTail { index: u32 },
    #[error(
        "weight {index} requested from an explicit sequence of length {len} with no tail rule"
    )]
    WindowExceeded { index: u32, len: usize },
    #[error("no subnormal completion: {0}")]
    NotCompletable(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Tail rule for explicitly listed weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    #[serde(rename = "constant")]
    Constant,
    #[serde(rename = "none")]
    None,
}

#[derive(Clone, Debug)]
enum Source {
    Explicit {
        weights: Vec<f64>,
        tail: Tail,
    },
    MeasureBacked {
        measure: Measure1D,
    },
    BackExtended {
        a: f64,
        inner: Arc<WeightSeq>,
    },
    Packet {
        inner: Arc<WeightSeq>,
        m: u32,
        offset: u32,
    },
}

/// A weight sequence with a memoised moment ladder `γ_k = α₀²···α_{k−1}²`.
#[derive(Debug)]
pub struct WeightSeq {
    source: Source,
    gammas: Mutex<Vec<f64>>,
}

impl Clone for WeightSeq {
    fn clone(&self) -> Self {
        WeightSeq {
            source: self.source.clone(),
            gammas: Mutex::new(self.gammas.lock().unwrap().clone()),
        }
    }
}

impl WeightSeq {
    pub fn explicit(weights: Vec<f64>, tail: Tail) -> Result<Self, ShiftError> {
        if weights.is_empty() && tail == Tail::Constant {
            return Err(ShiftError::NotCompletable(
                "constant tail needs at least one weight".into(),
            ));
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w <= 0.0 {
                return Err(ShiftError::DegenerateTail { index: i as u32 });
            }
        }
        Ok(WeightSeq {
            source: Source::Explicit { weights, tail },
            gammas: Mutex::new(vec![1.0]),
        })
    }

    fn measure_backed(measure: Measure1D) -> Self {
        WeightSeq {
            source: Source::MeasureBacked { measure },
            gammas: Mutex::new(vec![1.0]),
        }
    }

    pub fn back_extended(a: f64, inner: WeightSeq) -> Result<Self, ShiftError> {
        if !a.is_finite() || a <= 0.0 {
            return Err(ShiftError::DegenerateTail { index: 0 });
        }
        Ok(WeightSeq {
            source: Source::BackExtended {
                a,
                inner: Arc::new(inner),
            },
            gammas: Mutex::new(vec![1.0]),
        })
    }

    /// The Berger measure, when this sequence is measure-backed.
    pub fn measure(&self) -> Option<&Measure1D> {
        match &self.source {
            Source::MeasureBacked { measure } => Some(measure),
            _ => None,
        }
    }

    /// Moment `γ_k ≡ γ_k(α) = 1` for `k = 0`, `α₀²···α_{k−1}²` for `k > 0`.
    pub fn gamma(&self, k: u32) -> Result<f64, ShiftError> {
        match &self.source {
            // for a measure-backed shift the moment ladder is the measure's
            Source::MeasureBacked { measure } => {
                let mut cache = self.gammas.lock().unwrap();
                while cache.len() <= k as usize {
                    let next = measure.moment(cache.len() as u32);
                    cache.push(next);
                }
                let g = cache[k as usize];
                if !(g.is_finite() && g > 0.0) {
                    return Err(ShiftError::DegenerateTail { index: k });
                }
                Ok(g)
            }
            Source::BackExtended { a, inner } => {
                if k == 0 {
                    Ok(1.0)
                } else {
                    Ok(a * a * inner.gamma(k - 1)?)
                }
            }
            Source::Packet { inner, m, offset } => {
                Ok(inner.gamma(m * k + offset)? / inner.gamma(*offset)?)
            }
            Source::Explicit { .. } => {
                let mut cache = self.gammas.lock().unwrap();
                while cache.len() <= k as usize {
                    let n = (cache.len() - 1) as u32;
                    let w = self.explicit_weight(n)?;
                    let g = cache[n as usize] * w * w;
                    cache.push(g);
                }
                Ok(cache[k as usize])
            }
        }
    }

    fn explicit_weight(&self, n: u32) -> Result<f64, ShiftError> {
        match &self.source {
            Source::Explicit { weights, tail } => {
                if let Some(w) = weights.get(n as usize) {
                    Ok(*w)
                } else {
                    match tail {
                        Tail::Constant => Ok(*weights.last().expect("non-empty by construction")),
                        Tail::None => Err(ShiftError::WindowExceeded {
                            index: n,
                            len: weights.len(),
                        }),
                    }
                }
            }
            _ => unreachable!("explicit_weight is only called on explicit sources"),
        }
    }

    /// The `n`-th weight `α_n`.
    pub fn weight(&self, n: u32) -> Result<f64, ShiftError> {
        match &self.source {
            Source::Explicit { .. } => self.explicit_weight(n),
            Source::BackExtended { a, inner } => {
                if n == 0 {
                    Ok(*a)
                } else {
                    inner.weight(n - 1)
                }
            }
            _ => {
                let ratio = self.gamma(n + 1)? / self.gamma(n)?;
                if !(ratio.is_finite() && ratio > 0.0) {
                    return Err(ShiftError::DegenerateTail { index: n });
                }
                Ok(ratio.sqrt())
            }
        }
    }

    /// Size-`m` packet sequence starting at `offset`; its `j`-th weight is
    /// `α_{mj+offset}···α_{mj+offset+m−1}`.
    pub fn packet(self: &Arc<Self>, m: u32, offset: u32) -> WeightSeq {
        WeightSeq {
            source: Source::Packet {
                inner: Arc::clone(self),
                m,
                offset,
            },
            gammas: Mutex::new(vec![1.0]),
        }
    }
}

// JSON shape: {"weights": [...], "tail": "constant"|"none"}
//            | {"measure": <Measure1D>} | {"backext": {"a": r, "inner": <WeightSeq>}}
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightSeqRepr {
    Explicit {
        weights: Vec<f64>,
        tail: Option<Tail>,
    },
    Measure {
        measure: Measure1D,
    },
    BackExtended {
        backext: BackExtRepr,
    },
}

#[derive(Serialize, Deserialize)]
struct BackExtRepr {
    a: f64,
    inner: Box<WeightSeq>,
}

impl Serialize for WeightSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match &self.source {
            // a missing tail rule rides the wire as null
            Source::Explicit { weights, tail } => WeightSeqRepr::Explicit {
                weights: weights.clone(),
                tail: if *tail == Tail::Constant {
                    Some(Tail::Constant)
                } else {
                    None
                },
            },
            Source::MeasureBacked { measure } => WeightSeqRepr::Measure {
                measure: measure.clone(),
            },
            Source::BackExtended { a, inner } => WeightSeqRepr::BackExtended {
                backext: BackExtRepr {
                    a: *a,
                    inner: Box::new((**inner).clone()),
                },
            },
            Source::Packet { inner, m, offset } => {
                // packets have no wire form of their own; expand a prefix
                let mut weights = Vec::new();
                for j in 0..32 {
                    match inner
                        .gamma(m * (j + 1) + offset)
                        .and_then(|hi| Ok(hi / inner.gamma(m * j + offset)?))
                    {
                        Ok(r) if r.is_finite() && r > 0.0 => weights.push(r.sqrt()),
                        _ => break,
                    }
                }
                WeightSeqRepr::Explicit {
                    weights,
                    tail: None,
                }
            }
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match WeightSeqRepr::deserialize(d)? {
            WeightSeqRepr::Explicit { weights, tail } => {
                WeightSeq::explicit(weights, tail.unwrap_or(Tail::None)).map_err(D::Error::custom)
            }
            WeightSeqRepr::Measure { measure } => {
                weights_from_measure(&measure).map_err(D::Error::custom)
            }
            WeightSeqRepr::BackExtended { backext } => {
                WeightSeq::back_extended(backext.a, *backext.inner).map_err(D::Error::custom)
            }
        }
    }
}

/// The shift whose moments are those of the probability measure `mu`:
/// `α_n = √(γ_{n+1}/γ_n)` with `γ_k = ∫ t^k dμ`.
pub fn weights_from_measure(mu: &Measure1D) -> Result<WeightSeq, ShiftError> {
    let mass = mu.mass();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(ShiftError::Measure(MeasureError::Invalid(format!(
            "not a probability measure (mass {mass})"
        ))));
    }
    let w = WeightSeq::measure_backed(mu.clone());
    w.weight(0)?; // surfaces DegenerateTail for measures concentrated at 0
    Ok(w)
}

/// Berger measure of the restriction `W|_{∨{e_h : h ≥ n}}`:
/// `dξ_n = (t^n/γ_n) dξ`.
pub fn restriction_measure(mu: &Measure1D, n: u32) -> Result<Measure1D, MeasureError> {
    mu.tilt(n, mu.moment(n))
}

/// Berger measure of the size-`m` packet shift at offset `i`:
/// the pushforward of `(t^i/γ_i) dμ` under `t ↦ t^m`.
pub fn power_measure(mu: &Measure1D, m: u32, i: u32) -> Result<Measure1D, MeasureError> {
    let tilted = if i == 0 {
        mu.clone()
    } else {
        mu.tilt(i, mu.moment(i))?
    };
    Ok(tilted.pushforward_power(m))
}

/// One summand of the direct-sum decomposition of a power `W^m`.
#[derive(Clone, Debug)]
pub struct Packet {
    pub shift: WeightSeq,
    /// Berger measure `μ_(m,i)` when the decomposed shift is measure-backed.
    pub measure: Option<Measure1D>,
}

/// Splits `W^m` into its `m` packet shifts; measure-backed inputs carry the
/// packet Berger measures along.
pub fn power_decompose(w: &WeightSeq, m: u32) -> Result<Vec<Packet>, ShiftError> {
    assert!(m >= 1, "power must be at least 1");
    let inner = Arc::new(w.clone());
    (0..m)
        .map(|i| {
            let shift = inner.packet(m, i);
            shift.weight(0)?;
            let measure = match w.measure() {
                Some(mu) => Some(power_measure(mu, m, i)?),
                None => None,
            };
            Ok(Packet { shift, measure })
        })
        .collect()
}

/// Subnormality test for the backward extension of a subnormal shift with
/// Berger measure `xi` by a prepended weight `a`, together with the Berger
/// measure `[a, ξ] = a²·(ξ/t) + (1 − a²‖1/t‖)·δ₀` of the extension on pass.
pub fn backward_extension(
    a: f64,
    xi: &Measure1D,
) -> Result<(Verdict, Option<Measure1D>), MeasureError> {
    let norm = match xi.integrate_power(-1.0)? {
        Integral::Finite(v) => v,
        Integral::Infinite => {
            return Ok((
                Verdict::fail_because("1/t not integrable against the restriction measure"),
                None,
            ))
        }
    };
    let margin = 1.0 - a * a * norm;
    if margin < -crate::DEFAULT_TOL {
        return Ok((
            Verdict::fail(
                margin,
                Witness::Reason(format!("a²‖1/t‖ = {} exceeds 1", a * a * norm)),
            ),
            None,
        ));
    }
    let divided = xi.divide_by_t()?;
    let zero = Measure1D::dirac(0.0);
    let measure =
        linear_combine(&[(a * a, &divided), (margin, &zero)]).into_positive(crate::DEFAULT_TOL)?;
    Ok((Verdict::pass(margin, None), Some(measure)))
}

/// The 2-atomic Berger measure of the subnormal completion of three strictly
/// increasing initial weights.
///
/// The atoms are the roots of the quadratic built from the Hankel system on
/// `γ₀..γ₃`, and the masses come from matching `γ₀` and `γ₁`; the remaining
/// moments then satisfy the same two-term recursion, which is exactly the
/// recursively generated completion.
pub fn stampfli_completion(w0: f64, w1: f64, w2: f64) -> Result<Measure1D, ShiftError> {
    if !(w0 > 0.0 && w0 < w1 && w1 < w2 && w2.is_finite()) {
        return Err(ShiftError::NotCompletable(format!(
            "weights must satisfy 0 < {w0} < {w1} < {w2} strictly"
        )));
    }
    let g1 = w0 * w0;
    let g2 = g1 * w1 * w1;
    let g3 = g2 * w2 * w2;
    let det = g2 - g1 * g1;
    if det <= 0.0 {
        return Err(ShiftError::NotCompletable("singular Hankel system".into()));
    }
    let c0 = (g2 * g2 - g1 * g3) / det;
    let c1 = (g3 - g1 * g2) / det;
    let disc = c1 * c1 + 4.0 * c0;
    if disc <= 0.0 {
        return Err(ShiftError::NotCompletable(
            "quadrature roots are not real".into(),
        ));
    }
    let root = disc.sqrt();
    let t0 = 0.5 * (c1 - root);
    let t1 = 0.5 * (c1 + root);
    if !(t0 > 0.0 && t1 > t0) {
        return Err(ShiftError::NotCompletable(format!(
            "quadrature atoms ({t0}, {t1}) leave [0, ∞)"
        )));
    }
    let rho1 = (g1 - t0) / (t1 - t0);
    let rho0 = 1.0 - rho1;
    if !(rho0 > 0.0 && rho1 > 0.0) {
        return Err(ShiftError::NotCompletable(format!(
            "negative quadrature masses ({rho0}, {rho1})"
        )));
    }
    Ok(Measure1D::atomic(&[(t0, rho0), (t1, rho1)])?)
}

/// Positivity of the shifted Hankel matrices `(γ_{u+i+j})_{0≤i,j≤k}` for
/// every base `u ≤ window`: a necessary condition for subnormality at
/// order `k`. A pass means "no obstruction up to this order and window".
pub fn hankel_check(w: &WeightSeq, k: u32, window: u32) -> Verdict {
    let dim = (k + 1) as usize;
    let mut worst = f64::INFINITY;
    let mut worst_u = 0;
    for u in 0..=window {
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                match w.gamma(u + (i + j) as u32) {
                    Ok(g) => m[(i, j)] = g,
                    Err(e) => return Verdict::fail_because(format!("moments unavailable: {e}")),
                }
            }
        }
        let trace = m.trace();
        let min_eig = m
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let floor = -1e-10 * trace.max(f64::MIN_POSITIVE);
        if min_eig < worst {
            worst = min_eig;
            worst_u = u;
        }
        if min_eig < floor {
            return Verdict::fail(
                min_eig,
                Witness::Index {
                    k1: u as usize,
                    k2: k as usize,
                },
            );
        }
    }
    Verdict::pass(
        worst,
        Some(Witness::Index {
            k1: worst_u as usize,
            k2: k as usize,
        }),
    )
}
