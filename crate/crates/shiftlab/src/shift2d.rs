//! Two-variable weighted shifts on a finite index window.
//!
//! A grid holds generators for the horizontal weights `α_k` and vertical
//! weights `β_k`; the window is a promise that the generators evaluate
//! there, not an allocation, so large scans stay cheap. Tests scan base
//! points in row-major order (`k₂` outer, `k₁` inner) so that witnesses are
//! comparable across the different positivity tests.

use crate::verdict::{Verdict, Witness};
use nalgebra::DMatrix;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error(
        "moment paths disagree at k=({k1},{k2}): row-first {row_first} vs column-first {col_first}"
    )]
    PathMismatch {
        k1: usize,
        k2: usize,
        row_first: f64,
        col_first: f64,
    },
    #[error("invalid grid: {0}")]
    Invalid(String),
}

type Generator = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

/// A two-variable weight diagram backed by generator closures.
#[derive(Clone)]
pub struct ShiftGrid {
    alpha: Generator,
    beta: Generator,
    window: (usize, usize),
}

impl fmt::Debug for ShiftGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShiftGrid {{ window: {:?} }}", self.window)
    }
}

impl ShiftGrid {
    pub fn from_generators(
        alpha: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
        beta: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
        window: (usize, usize),
    ) -> Self {
        ShiftGrid {
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            window,
        }
    }

    /// Grid from explicitly listed rows (`rows[k2][k1]`), extended beyond the
    /// listed data by clamping each index to the last available entry.
    pub fn from_rows(
        alpha_rows: Vec<Vec<f64>>,
        beta_rows: Vec<Vec<f64>>,
    ) -> Result<Self, GridError> {
        for rows in [&alpha_rows, &beta_rows] {
            if rows.is_empty() || rows.iter().any(|r| r.is_empty()) {
                return Err(GridError::Invalid("weight rows must be non-empty".into()));
            }
            if rows.iter().flatten().any(|w| !w.is_finite() || *w <= 0.0) {
                return Err(GridError::Invalid("weights must be positive".into()));
            }
        }
        let pick = move |rows: &Vec<Vec<f64>>, k1: usize, k2: usize| -> f64 {
            let row = &rows[k2.min(rows.len() - 1)];
            row[k1.min(row.len() - 1)]
        };
        let a = alpha_rows;
        let b = beta_rows;
        Ok(ShiftGrid {
            alpha: Arc::new(move |k1, k2| pick(&a, k1, k2)),
            beta: Arc::new(move |k1, k2| pick(&b, k1, k2)),
            window: (4096, 4096),
        })
    }

    pub fn alpha(&self, k1: usize, k2: usize) -> f64 {
        (self.alpha)(k1, k2)
    }

    pub fn beta(&self, k1: usize, k2: usize) -> f64 {
        (self.beta)(k1, k2)
    }

    pub fn window(&self) -> (usize, usize) {
        self.window
    }

    fn assert_window(&self, need: (usize, usize), what: &str) {
        assert!(
            need.0 <= self.window.0 && need.1 <= self.window.1,
            "{what} needs indices up to {need:?} but the grid only promises {:?}",
            self.window
        );
    }

    fn scan(bound: (usize, usize)) -> impl Iterator<Item = (usize, usize)> {
        (0..=bound.1).flat_map(move |k2| (0..=bound.0).map(move |k1| (k1, k2)))
    }

    /// Checks the commutation identity `β_{k+ε₁} α_k = α_{k+ε₂} β_k` on the
    /// window `k ≤ bound`.
    pub fn commutes(&self, bound: (usize, usize)) -> Verdict {
        self.assert_window((bound.0 + 1, bound.1 + 1), "commutes");
        let mut worst = 0.0f64;
        let mut worst_at = (0, 0);
        for (k1, k2) in Self::scan(bound) {
            let lhs = self.beta(k1 + 1, k2) * self.alpha(k1, k2);
            let rhs = self.alpha(k1, k2 + 1) * self.beta(k1, k2);
            let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300);
            if rel > worst {
                worst = rel;
                worst_at = (k1, k2);
            }
        }
        let witness = Witness::Index {
            k1: worst_at.0,
            k2: worst_at.1,
        };
        if worst <= 1e-12 {
            Verdict::pass(-worst, Some(witness))
        } else {
            Verdict::fail(-worst, witness)
        }
    }

    /// Moment `γ_k` of the diagram, evaluated along the row-then-column
    /// path and cross-checked against the column-then-row path.
    pub fn gamma2d(&self, k: (usize, usize)) -> Result<f64, GridError> {
        self.assert_window(k, "gamma2d");
        let (k1, k2) = k;
        let mut row_first = 1.0;
        for i in 0..k1 {
            let a = self.alpha(i, 0);
            row_first *= a * a;
        }
        for j in 0..k2 {
            let b = self.beta(k1, j);
            row_first *= b * b;
        }
        let mut col_first = 1.0;
        for j in 0..k2 {
            let b = self.beta(0, j);
            col_first *= b * b;
        }
        for i in 0..k1 {
            let a = self.alpha(i, k2);
            col_first *= a * a;
        }
        let scale = row_first.abs().max(col_first.abs()).max(1e-300);
        if (row_first - col_first).abs() > 1e-12 * scale {
            return Err(GridError::PathMismatch {
                k1,
                k2,
                row_first,
                col_first,
            });
        }
        Ok(row_first)
    }

    /// Joint hyponormality via the Six-point Test: at every `k ≤ bound` the
    /// 2×2 matrix
    /// `[[α_{k+ε₁}² − α_k², α_{k+ε₂}β_{k+ε₁} − α_k β_k], [·, β_{k+ε₂}² − β_k²]]`
    /// must be positive semidefinite (trace and determinant within `tol`).
    pub fn six_point_test(&self, bound: (usize, usize), tol: f64) -> Verdict {
        self.assert_window((bound.0 + 2, bound.1 + 2), "six_point_test");
        let mut worst = f64::INFINITY;
        let mut worst_at = (0, 0);
        for (k1, k2) in Self::scan(bound) {
            let a = self.alpha(k1, k2);
            let a_e1 = self.alpha(k1 + 1, k2);
            let a_e2 = self.alpha(k1, k2 + 1);
            let b = self.beta(k1, k2);
            let b_e1 = self.beta(k1 + 1, k2);
            let b_e2 = self.beta(k1, k2 + 1);
            let m11 = a_e1 * a_e1 - a * a;
            let m22 = b_e2 * b_e2 - b * b;
            let m12 = a_e2 * b_e1 - a * b;
            let scale = m11.abs().max(m22.abs()).max(m12.abs()).max(1.0);
            let trace = m11 + m22;
            let det = m11 * m22 - m12 * m12;
            let margin = (det / (scale * scale)).min(trace / scale);
            if margin < worst {
                worst = margin;
                worst_at = (k1, k2);
            }
            if det < -tol * scale * scale || trace < -tol * scale {
                return Verdict::fail(det, Witness::Index { k1, k2 });
            }
        }
        Verdict::pass(
            worst,
            Some(Witness::Index {
                k1: worst_at.0,
                k2: worst_at.1,
            }),
        )
    }

    /// Windowed joint k-hyponormality: for every base `u ≤ bound` the moment
    /// matrix `(γ_{u+v+w})_{v,w}` over monomial offsets `v, w` of total
    /// degree at most `k` must be positive semidefinite.
    ///
    /// This is a necessary condition at finite order; a pass means
    /// "no obstruction up to (k, bound)".
    pub fn k_hyponormal_window(&self, k: usize, bound: (usize, usize), tol: f64) -> Verdict {
        assert!(k >= 1, "order must be at least 1");
        self.assert_window((bound.0 + 2 * k, bound.1 + 2 * k), "k_hyponormal_window");
        let mut monomials = vec![(0usize, 0usize)];
        for d in 1..=k {
            for q in 0..=d {
                monomials.push((d - q, q));
            }
        }
        let dim = monomials.len();
        let mut worst = f64::INFINITY;
        let mut worst_at = (0, 0);
        for (u1, u2) in Self::scan(bound) {
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..=i {
                    let idx = (
                        u1 + monomials[i].0 + monomials[j].0,
                        u2 + monomials[i].1 + monomials[j].1,
                    );
                    let g = match self.gamma2d(idx) {
                        Ok(g) => g,
                        Err(e) => return Verdict::fail_because(e.to_string()),
                    };
                    m[(i, j)] = g;
                    m[(j, i)] = g;
                }
            }
            // congruence by the diagonal keeps the test scale-free
            let d: Vec<f64> = (0..dim).map(|i| m[(i, i)].sqrt().recip()).collect();
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] *= d[i] * d[j];
                }
            }
            let min_eig = m
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if min_eig < worst {
                worst = min_eig;
                worst_at = (u1, u2);
            }
            if min_eig < -tol * (1.0 + dim as f64) {
                return Verdict::fail(min_eig, Witness::Index { k1: u1, k2: u2 });
            }
        }
        Verdict::pass(
            worst,
            Some(Witness::Index {
                k1: worst_at.0,
                k2: worst_at.1,
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tensor_grid(aw: &'static [f64], bw: &'static [f64]) -> ShiftGrid {
        ShiftGrid::from_generators(
            move |k1, _| aw[k1.min(aw.len() - 1)],
            move |_, k2| bw[k2.min(bw.len() - 1)],
            (64, 64),
        )
    }

    #[test]
    fn tensor_grids_commute_and_perturbations_fail() {
        let g = tensor_grid(&[0.5, 0.8, 1.0], &[0.6, 0.9, 1.0]);
        assert!(g.commutes((10, 10)).pass);

        let g = ShiftGrid::from_generators(
            |k1, k2| {
                let base = [0.5f64, 0.8, 1.0][k1.min(2)];
                if (k1, k2) == (1, 1) {
                    base + 1e-3
                } else {
                    base
                }
            },
            |_, k2| [0.6f64, 0.9, 1.0][k2.min(2)],
            (64, 64),
        );
        let v = g.commutes((5, 5));
        assert!(!v.pass);
        assert_eq!(v.witness, Some(Witness::Index { k1: 1, k2: 0 }));
    }

    #[test]
    fn gamma2d_values() {
        let g = tensor_grid(&[1.0], &[1.0]);
        assert_eq!(g.gamma2d((0, 0)).unwrap(), 1.0);
        assert_eq!(g.gamma2d((5, 7)).unwrap(), 1.0);

        let g = tensor_grid(&[0.5, 1.0], &[0.25, 1.0]);
        assert!((g.gamma2d((2, 1)).unwrap() - 0.25 * 0.0625).abs() < 1e-15);
    }

    #[test]
    fn six_point_on_tensor_of_subnormals_passes() {
        let g = tensor_grid(&[0.7, 1.0], &[0.4, 1.0]);
        assert!(g.six_point_test((8, 8), 1e-9).pass);
    }

    #[test]
    fn six_point_flags_decreasing_alpha() {
        let g = ShiftGrid::from_generators(
            |k1, _| if k1 == 0 { 0.9 } else { 0.5 },
            |_, _| 1.0,
            (64, 64),
        );
        let v = g.six_point_test((3, 3), 1e-9);
        assert!(!v.pass);
        assert_eq!(v.witness, Some(Witness::Index { k1: 0, k2: 0 }));
    }

    #[test]
    fn gamma2d_rejects_non_commuting_grids() {
        let g = ShiftGrid::from_generators(
            |k1, k2| if (k1, k2) == (0, 1) { 0.9 } else { 0.5 },
            |_, _| 0.7,
            (16, 16),
        );
        assert!(!g.commutes((3, 3)).pass);
        assert!(matches!(
            g.gamma2d((1, 1)),
            Err(GridError::PathMismatch { .. })
        ));
    }

    #[test]
    fn grids_are_shareable_across_threads() {
        fn check<T: Send + Sync>(_: &T) {}
        let g = tensor_grid(&[1.0], &[1.0]);
        check(&g);
    }

    #[test]
    fn k1_hyponormality_matches_six_point_on_a_tensor() {
        let g = tensor_grid(&[0.7, 1.0], &[0.4, 1.0]);
        let a = g.six_point_test((5, 5), 1e-9);
        let b = g.k_hyponormal_window(1, (5, 5), 1e-9);
        assert_eq!(a.pass, b.pass);
        assert!(g.k_hyponormal_window(2, (5, 5), 1e-9).pass);
    }
}
