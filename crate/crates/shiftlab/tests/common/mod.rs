//! Seeded generators shared by the integration suites.
//!
//! Tuples are built constructively around the ψ/φ criterion so that both
//! verdict directions occur with margins far above the test tolerances:
//! subnormal tuples get explicit positive slack in ψ and φ, broken tuples
//! get an explicit deficit in exactly one functional.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shiftlab::tensor_core::FiveTuple;
use shiftlab::{linear_combine, Measure1D};

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two atoms at `{low, 1}` with masses `{1−top, top}`.
fn two_atoms(low: f64, top: f64) -> Measure1D {
    Measure1D::atomic(&[(low, 1.0 - top), (1.0, top)]).unwrap()
}

pub struct TupleParts {
    pub tuple: FiveTuple,
    pub tau1: Measure1D,
}

/// A subnormal tuple with at most three atoms per measure and positivity
/// margins well above 1e−6 in both ψ and φ.
pub fn random_subnormal(rng: &mut ChaCha8Rng) -> TupleParts {
    let s_low = rng.gen_range(0.25..0.9);
    let t_low = rng.gen_range(0.25..0.9);
    let xi = two_atoms(s_low, rng.gen_range(0.2..0.8));
    let eta = two_atoms(t_low, rng.gen_range(0.2..0.8));

    let ns = xi.integrate_power(-1.0).unwrap().finite().unwrap();
    let u1: f64 = rng.gen_range(0.15..0.75);
    let a = (u1 / ns).sqrt();

    // τ₁ = c·η + (1−c)·ν keeps ψ = (c − a²‖1/s‖)η + (1−c)ν strictly positive
    let c = u1 + rng.gen_range(0.25..0.85) * (1.0 - u1);
    let nu = two_atoms(t_low, rng.gen_range(0.2..0.8));
    let tau1 = linear_combine(&[(c, &eta), (1.0 - c, &nu)])
        .into_positive(1e-12)
        .unwrap();

    let n_tau1 = tau1.integrate_power(-1.0).unwrap().finite().unwrap();
    let r = rng.gen_range(0.3..0.9);
    let y0_sq = r / n_tau1;
    let zero = Measure1D::dirac(0.0);
    let tau1_over_t = tau1.divide_by_t().unwrap();
    let tau = linear_combine(&[(y0_sq, &tau1_over_t), (1.0 - r, &zero)])
        .into_positive(1e-12)
        .unwrap();

    // σ carries exactly the mass φ needs plus (1−r) of slack spread over
    // δ₀, δ₁ and the ξ/s direction, so every φ coefficient stays clearly
    // positive
    let n_eta = eta.integrate_power(-1.0).unwrap().finite().unwrap();
    let n_psi = n_tau1 - a * a * ns * n_eta;
    let xi_over_s = xi.divide_by_t().unwrap();
    let w0 = rng.gen_range(0.2..0.45);
    let w1 = rng.gen_range(0.2..0.45);
    let w2 = 1.0 - w0 - w1;
    let one = Measure1D::dirac(1.0);
    let sigma = linear_combine(&[
        (y0_sq * n_psi, &zero),
        (a * a * y0_sq * n_eta, &xi_over_s),
        ((1.0 - r) * w0, &zero),
        ((1.0 - r) * w1, &one),
        ((1.0 - r) * w2 / ns, &xi_over_s),
    ])
    .into_positive(1e-12)
    .unwrap();

    let tuple = FiveTuple::new(sigma, tau, a, xi, eta).unwrap();
    TupleParts { tuple, tau1 }
}

/// A tuple failing subnormality decisively, through ψ or through φ.
pub fn random_non_subnormal(rng: &mut ChaCha8Rng) -> TupleParts {
    let parts = random_subnormal(rng);
    let ft = &parts.tuple;
    if rng.gen_bool(0.5) {
        // ψ-break: inflate a until τ₁ − a²‖1/s‖η dips negative
        let ns = ft.xi().integrate_power(-1.0).unwrap().finite().unwrap();
        let tau1 = &parts.tau1;
        // smallest ratio τ₁{t}/η{t} over the atoms of η bounds admissible a²‖1/s‖
        let critical = ft
            .eta()
            .atoms()
            .iter()
            .map(|&(loc, em)| {
                let tm = tau1
                    .atoms()
                    .iter()
                    .find(|&&(l, _)| (l - loc).abs() < 1e-9)
                    .map(|&(_, m)| m)
                    .unwrap_or(0.0);
                tm / em
            })
            .fold(f64::INFINITY, f64::min);
        let a = ((critical + rng.gen_range(0.05..0.25)) / ns).sqrt();
        let tuple = FiveTuple::new(
            ft.sigma().clone(),
            ft.tau().clone(),
            a,
            ft.xi().clone(),
            ft.eta().clone(),
        )
        .unwrap();
        TupleParts {
            tuple,
            tau1: parts.tau1,
        }
    } else {
        // φ-break: φ's coefficient at 0 is σ{0} − y₀²∫t⁻¹dψ; moving that
        // slack plus a bit more from δ₀ up to δ₁ drives it negative
        let (psi, phi) = shiftlab::tensor_core::psi_phi(ft).unwrap();
        let y0_sq = ft.tau().moment(1);
        let n_psi = psi.integrate_power(-1.0).unwrap().finite().unwrap();
        let slack0 = phi.mass_at_zero();
        let e = (0.5 * y0_sq * n_psi).min(0.1) * rng.gen_range(0.5..1.0);
        let zero = Measure1D::dirac(0.0);
        let one = Measure1D::dirac(1.0);
        let d = slack0 + e;
        let sigma = linear_combine(&[(1.0, ft.sigma()), (-d, &zero), (d, &one)])
            .into_positive(1e-12)
            .unwrap();
        let tuple = FiveTuple::new(
            sigma,
            ft.tau().clone(),
            ft.a(),
            ft.xi().clone(),
            ft.eta().clone(),
        )
        .unwrap();
        TupleParts {
            tuple,
            tau1: parts.tau1,
        }
    }
}

/// A random positive measure with a couple of atoms and one power-density
/// piece, normalised to total mass 1.
pub fn random_probability_measure(rng: &mut ChaCha8Rng) -> Measure1D {
    let n_atoms = rng.gen_range(1..=3);
    let mut atoms = Vec::new();
    for _ in 0..n_atoms {
        atoms.push((rng.gen_range(0.1..1.0), rng.gen_range(0.2..1.0)));
    }
    atoms.push((1.0, rng.gen_range(0.2..1.0)));
    let mut pieces = Vec::new();
    if rng.gen_bool(0.7) {
        let lo = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.05..0.4)
        };
        let hi = rng.gen_range(0.6..1.0);
        pieces.push(shiftlab::DensityPiece {
            lo,
            hi,
            terms: vec![shiftlab::PowerTerm {
                coefficient: rng.gen_range(0.1..1.5),
                exponent: rng.gen_range(-0.5..3.0),
            }],
        });
    }
    let m = Measure1D::new_positive(atoms, pieces).unwrap();
    let mass = m.mass();
    m.scaled(1.0 / mass).into_positive(1e-12).unwrap()
}
