//! Implementation of the `shiftlab` command line.
//!
//! The scan subcommand reproduces a two-parameter family of shifts with
//! tensor core: the 0-th row measure is
//! `σ(κ) = (1−κ²)δ₀ + (κ²/2)dt + (κ²/2)δ₁`, the 0-th column is the
//! backward extension of the 2-atomic Stampfli completion measure `τ₁` by a
//! free weight `y₀`, the horizontal core is `δ₁`, and the vertical core is
//! the point mass at the larger atom `t₁` of `τ₁` (the value forced by the
//! closed forms for `s(κ)` and by boundedness of the diagram). For each κ
//! the closed forms
//!
//! - `s(κ) = min{ √(t₁ρ₁)/a, √((1−κ²)/(‖1/t‖ − a²/t₁)), √(t₁κ²/2)/a, ‖1/t‖^{-1/2} }`
//! - `h(κ) = √( x₀²y₁²(x₁²−x₀²) / (x₀²(x₁²−x₀²) + (a²−x₀²)²) )`
//!
//! bound the band `s(κ) < y₀ < h(κ)` in which the shift is expected to be
//! jointly hyponormal but to have no subnormal power. The audit samples
//! interior points and verifies exactly that, reporting any counterexample;
//! it also reports columns where the full windowed Six-point Test bites
//! below `h(κ)` (h is exact at the base point k = (0,0) only, and at small
//! κ deeper lattice points give a strictly smaller hyponormality bound, so
//! audit points are placed below that envelope).

use shiftlab::tensor_core::{
    self, build_grid_windowed, is_subnormal, psi_phi, verify_theorem, Agreement, FiveTuple,
    GridDescriptor, TcError,
};
use shiftlab::{
    linear_combine, stampfli_completion, Integral, Measure1D, MeasureError, ShiftError, ShiftGrid,
    Verdict,
};
use std::fmt::Write as _;
use thiserror::Error;

pub mod exit_code {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const INCONCLUSIVE: i32 = 2;
    pub const PARSE_ERROR: i32 = 3;
    pub const THEOREM_DEFECT: i32 = 4;
    pub const CONSTRUCTION_ERROR: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Tc(#[from] TcError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Positivity tolerance: `SHIFTLAB_TOL` when set, else the library default.
pub fn tolerance() -> f64 {
    std::env::var("SHIFTLAB_TOL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(shiftlab::DEFAULT_TOL)
}

// ---------------------------------------------------------------------------
// check / theorem / sixpoint
// ---------------------------------------------------------------------------

pub fn run_check(input: &str, tol: f64, out: &mut impl std::io::Write) -> i32 {
    let ft: FiveTuple = match serde_json::from_str(input) {
        Ok(ft) => ft,
        Err(e) => {
            let _ = writeln!(out, "parse error: {e}");
            return exit_code::PARSE_ERROR;
        }
    };
    match psi_phi(&ft) {
        Ok((psi, phi)) => {
            let vp = psi.is_nonnegative(tol);
            let vf = phi.is_nonnegative(tol);
            let _ = writeln!(out, "psi = {psi}");
            let _ = writeln!(out, "phi = {phi}");
            let _ = writeln!(out, "psi >= 0: {vp}");
            let _ = writeln!(out, "phi >= 0: {vf}");
            let v = is_subnormal(&ft, tol);
            let _ = writeln!(out, "subnormal: {v}");
            if v.margin.abs() < tol {
                let _ = writeln!(
                    out,
                    "verdict is within tolerance of the boundary; inconclusive"
                );
                exit_code::INCONCLUSIVE
            } else if v.pass {
                exit_code::PASS
            } else {
                exit_code::FAIL
            }
        }
        Err(e) => {
            let v = is_subnormal(&ft, tol);
            let _ = writeln!(out, "functionals unavailable ({e}); subnormal: {v}");
            if v.pass {
                exit_code::PASS
            } else {
                exit_code::FAIL
            }
        }
    }
}

pub fn run_theorem(
    input: &str,
    m_max: u32,
    n_max: u32,
    tol: f64,
    out: &mut impl std::io::Write,
) -> i32 {
    let ft: FiveTuple = match serde_json::from_str(input) {
        Ok(ft) => ft,
        Err(e) => {
            let _ = writeln!(out, "parse error: {e}");
            return exit_code::PARSE_ERROR;
        }
    };
    let report = verify_theorem(&ft, m_max, n_max, tol.max(1e-6));
    let _ = writeln!(out, "base tuple subnormal: {}", report.base);
    for e in &report.entries {
        let status = match e.agreement {
            Agreement::Agree => "agree",
            Agreement::Inconclusive => "inconclusive",
            Agreement::Defect => "DEFECT",
        };
        let failing = match e.failing_summand {
            Some((p, q)) => format!(" first failing summand ({p},{q})"),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "power ({},{}): all summands subnormal = {} margin {:.3e} [{status}]{failing}",
            e.m, e.n, e.all_subnormal, e.margin
        );
    }
    if report.defects() > 0 {
        exit_code::THEOREM_DEFECT
    } else {
        exit_code::PASS
    }
}

pub fn run_sixpoint(
    input: &str,
    k: (usize, usize),
    tol: f64,
    out: &mut impl std::io::Write,
) -> i32 {
    let descriptor: GridDescriptor = match serde_json::from_str(input) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(out, "parse error: {e}");
            return exit_code::PARSE_ERROR;
        }
    };
    let grid = match descriptor.build((k.0 + 2, k.1 + 2)) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(out, "cannot build grid: {e}");
            return exit_code::CONSTRUCTION_ERROR;
        }
    };
    let v = grid.six_point_test(k, tol);
    let _ = writeln!(out, "six-point test on window {k:?}: {v}");
    if v.pass {
        exit_code::PASS
    } else {
        exit_code::FAIL
    }
}

// ---------------------------------------------------------------------------
// the parameter-region scan
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ScanConfig {
    /// Squared weights `(ω₀, ω₁, ω₂)` seeding the Stampfli completion.
    pub omega: [f64; 3],
    pub a: f64,
    pub kappa_steps: usize,
    pub y0_steps: usize,
    /// Powers `(m, n) ≤ powers` audited at each sample point.
    pub powers: (u32, u32),
    /// Window of the Six-point Test used by the audit.
    pub window: (usize, usize),
    pub tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        // a triple whose completion concentrates enough mass at the larger
        // atom to keep the diagram hyponormal across a wide κ range
        ScanConfig {
            omega: [0.5, 0.66, 0.92],
            a: 0.3,
            kappa_steps: 24,
            y0_steps: 160,
            powers: (2, 2),
            window: (40, 40),
            tol: shiftlab::DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanRow {
    pub kappa: f64,
    pub s: f64,
    pub h: f64,
    pub nonempty: bool,
}

#[derive(Clone, Debug)]
pub struct Scan {
    pub rows: Vec<ScanRow>,
    pub tau1: Measure1D,
    /// Larger atom of `τ₁` and its mass.
    pub t1: f64,
    pub rho1: f64,
    /// `‖1/t‖_{L¹(τ₁)}`.
    pub inv_norm: f64,
    pub y1: f64,
}

/// `σ(κ) = (1−κ²)δ₀ + (κ²/2)dt + (κ²/2)δ₁` on `[0, 1]`.
pub fn example_sigma(kappa: f64) -> Result<Measure1D, MeasureError> {
    let k2 = kappa * kappa;
    let mut atoms = vec![(1.0, k2 / 2.0)];
    if 1.0 - k2 > 0.0 {
        atoms.push((0.0, 1.0 - k2));
    }
    Measure1D::new_positive(
        atoms,
        vec![shiftlab::DensityPiece {
            lo: 0.0,
            hi: 1.0,
            terms: vec![shiftlab::PowerTerm {
                coefficient: k2 / 2.0,
                exponent: 0.0,
            }],
        }],
    )
}

/// The audited five-tuple at `(κ, y₀)`: `τ = [y₀, τ₁]`, `ξ = δ₁`,
/// `η = δ_{t₁}`. The column measure is allowed to leave the positive cone
/// (negative mass at 0) when `y₀²‖1/t‖ > 1`; subnormality then fails with
/// that witness.
pub fn example_tuple(scan: &Scan, kappa: f64, y0: f64, a: f64) -> Result<FiveTuple, CliError> {
    let sigma = example_sigma(kappa)?;
    let over_t = scan.tau1.divide_by_t()?;
    let zero = Measure1D::dirac(0.0);
    let tau = linear_combine(&[(y0 * y0, &over_t), (1.0 - y0 * y0 * scan.inv_norm, &zero)]);
    Ok(FiveTuple::new(
        sigma,
        tau,
        a,
        Measure1D::dirac(1.0),
        Measure1D::dirac(scan.t1),
    )?)
}

fn example_grid(
    scan: &Scan,
    kappa: f64,
    y0: f64,
    a: f64,
    window: (usize, usize),
) -> Result<ShiftGrid, CliError> {
    let ft = example_tuple(scan, kappa, y0, a)?;
    Ok(build_grid_windowed(&ft, window)?)
}

pub fn scan(cfg: &ScanConfig) -> Result<Scan, CliError> {
    let [w0, w1, w2] = cfg.omega;
    if cfg.kappa_steps < 2 || cfg.y0_steps < 2 {
        return Err(CliError::Parse(
            "kappa-steps and y0-steps must be at least 2".into(),
        ));
    }
    if cfg.a.is_nan() || cfg.a <= 0.0 {
        return Err(CliError::Parse("a must be positive".into()));
    }
    let tau1 = stampfli_completion(w0.sqrt(), w1.sqrt(), w2.sqrt())?;
    let atoms = tau1.atoms();
    let (t1, rho1) = *atoms.last().expect("completion is 2-atomic");
    let inv_norm = match tau1.integrate_power(-1.0)? {
        Integral::Finite(v) => v,
        Integral::Infinite => unreachable!("completion atoms are strictly positive"),
    };
    let y1 = w0.sqrt();
    let a = cfg.a;

    let mut rows = Vec::with_capacity(cfg.kappa_steps);
    for i in 1..=cfg.kappa_steps {
        let kappa = i as f64 / (cfg.kappa_steps + 1) as f64;
        let sigma = example_sigma(kappa)?;
        let x0_sq = sigma.moment(1);
        let x1_sq = sigma.moment(2) / sigma.moment(1);
        let h = (x0_sq * y1 * y1 * (x1_sq - x0_sq)
            / (x0_sq * (x1_sq - x0_sq) + (a * a - x0_sq).powi(2)))
        .sqrt();
        let term1 = (t1 * rho1).sqrt() / a;
        let denom = inv_norm - a * a / t1;
        let term2 = if denom > 0.0 {
            ((1.0 - kappa * kappa) / denom).sqrt()
        } else {
            f64::INFINITY
        };
        let term3 = (t1 * kappa * kappa / 2.0).sqrt() / a;
        let term4 = inv_norm.powf(-0.5);
        let s = term1.min(term2).min(term3).min(term4);
        rows.push(ScanRow {
            kappa,
            s,
            h,
            nonempty: s < h,
        });
    }
    Ok(Scan {
        rows,
        tau1,
        t1,
        rho1,
        inv_norm,
        y1,
    })
}

pub fn render_csv(scan: &Scan) -> String {
    let mut out = String::from("kappa,s_kappa,h_kappa,region_nonempty\n");
    for r in &scan.rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{}",
            r.kappa,
            r.s,
            r.h,
            u8::from(r.nonempty)
        );
    }
    out
}

pub fn render_svg(scan: &Scan, cfg: &ScanConfig) -> String {
    let (w, h) = (800.0, 560.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 30.0, 50.0);
    let ymax = scan
        .rows
        .iter()
        .map(|r| r.h.max(r.s))
        .fold(1.0f64, f64::max)
        * 1.05;
    let px = |kappa: f64| ml + kappa * (w - ml - mr);
    let py = |y: f64| h - mb - (y / ymax) * (h - mt - mb);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="13">"#
    );
    // shaded band on each contiguous run of non-empty columns
    let mut run: Vec<&ScanRow> = Vec::new();
    let mut bands = Vec::new();
    for r in scan.rows.iter().chain(std::iter::once(&ScanRow {
        kappa: f64::NAN,
        s: 0.0,
        h: 0.0,
        nonempty: false,
    })) {
        if r.nonempty {
            run.push(r);
        } else if !run.is_empty() {
            let mut pts = String::new();
            for q in &run {
                let _ = write!(pts, "{:.2},{:.2} ", px(q.kappa), py(q.h));
            }
            for q in run.iter().rev() {
                let _ = write!(pts, "{:.2},{:.2} ", px(q.kappa), py(q.s));
            }
            bands.push(pts.trim_end().to_string());
            run.clear();
        }
    }
    for pts in bands {
        let _ = writeln!(
            svg,
            r##"  <polygon points="{pts}" fill="#bfbfbf" stroke="none" opacity="0.8"/>"##
        );
    }
    for (vals, color, label) in [
        (
            scan.rows.iter().map(|r| (r.kappa, r.s)).collect::<Vec<_>>(),
            "#1f4fa0",
            "s(k)",
        ),
        (
            scan.rows.iter().map(|r| (r.kappa, r.h)).collect::<Vec<_>>(),
            "#101010",
            "h(k)",
        ),
    ] {
        let mut pts = String::new();
        for (x, y) in &vals {
            let _ = write!(pts, "{:.2},{:.2} ", px(*x), py(*y));
        }
        let _ = writeln!(
            svg,
            r#"  <polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.trim_end()
        );
        if let Some((x, y)) = vals.last() {
            let _ = writeln!(
                svg,
                r#"  <text x="{:.2}" y="{:.2}" fill="{color}">{label}</text>"#,
                px(*x) + 4.0,
                py(*y)
            );
        }
    }
    // axes and ticks
    let _ = writeln!(
        svg,
        r#"  <line x1="{ml}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        h - mb,
        w - mr,
        h - mb
    );
    let _ = writeln!(
        svg,
        r#"  <line x1="{ml}" y1="{mt}" x2="{ml}" y2="{}" stroke="black"/>"#,
        h - mb
    );
    let mut tick = 0.0;
    while tick <= 1.0 + 1e-9 {
        let _ = writeln!(
            svg,
            r#"  <line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4:.1}</text>"#,
            px(tick),
            h - mb,
            h - mb + 5.0,
            h - mb + 20.0,
            tick
        );
        tick += 0.2;
    }
    let mut ytick = 0.0;
    while ytick <= ymax + 1e-9 {
        let _ = writeln!(
            svg,
            r#"  <line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="black"/><text x="{3:.2}" y="{1:.2}" text-anchor="end">{4:.1}</text>"#,
            ml - 5.0,
            py(ytick),
            ml,
            ml - 9.0,
            ytick
        );
        ytick += 0.2;
    }
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle">kappa</text>"#,
        (ml + w - mr) / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        svg,
        r#"  <text x="18" y="{:.2}" transform="rotate(-90 18 {:.2})">y0</text>"#,
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0
    );
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="20">hyponormal, no subnormal power: s(k) &lt; y0 &lt; h(k)  [omega = {:?}, a = {}]</text>"#,
        ml, cfg.omega, cfg.a
    );
    svg.push_str("</svg>\n");
    svg
}

// ---------------------------------------------------------------------------
// the audit
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PowerAudit {
    pub m: u32,
    pub n: u32,
    pub all_subnormal: bool,
    pub failing_summand: Option<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub struct AuditSample {
    pub kappa: f64,
    pub y0: f64,
    pub six_point: Verdict,
    pub subnormal: Verdict,
    pub powers: Vec<PowerAudit>,
    /// True when the windowed Six-point envelope bites strictly below h(κ)
    /// at this column (the h formula is exact at the base point (0,0) only).
    pub clipped: bool,
    /// A paired check just below `s(κ)` where the tuple must be subnormal;
    /// present when the parameters admit a subnormal phase at all.
    pub below: Option<(f64, bool)>,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub samples: Vec<AuditSample>,
}

impl AuditReport {
    pub fn counterexamples(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.counterexample.is_some())
            .count()
    }
}

/// Largest `y₀ ≤ hi` passing the windowed Six-point Test at this column.
/// Every entry of the test is monotone against `y₀`, so the passing set is
/// an interval and bisection is exact; `y0_steps` sets the resolution.
fn six_point_envelope(
    scan: &Scan,
    kappa: f64,
    a: f64,
    hi: f64,
    cfg: &ScanConfig,
) -> Result<f64, CliError> {
    let passes = |y0: f64| -> Result<bool, CliError> {
        let g = example_grid(scan, kappa, y0, a, (cfg.window.0 + 2, cfg.window.1 + 2))?;
        Ok(g.six_point_test(cfg.window, cfg.tol).pass)
    };
    if passes(hi * (1.0 - 1e-12))? {
        return Ok(hi);
    }
    let iters = (cfg.y0_steps as f64).log2().ceil() as usize + 30;
    let (mut lo, mut up) = (0.0f64, hi);
    for _ in 0..iters {
        let mid = 0.5 * (lo + up);
        if passes(mid)? {
            lo = mid;
        } else {
            up = mid;
        }
    }
    Ok(lo)
}

pub fn audit(
    cfg: &ScanConfig,
    scan_data: &Scan,
    n_samples: usize,
) -> Result<AuditReport, CliError> {
    let nonempty: Vec<&ScanRow> = scan_data.rows.iter().filter(|r| r.nonempty).collect();
    if nonempty.is_empty() {
        return Err(CliError::Parse(
            "the region is empty for this configuration; nothing to audit".into(),
        ));
    }
    let a = cfg.a;
    let mut samples = Vec::with_capacity(n_samples);
    for j in 0..n_samples {
        let idx = if n_samples > 1 {
            j * (nonempty.len() - 1) / (n_samples - 1)
        } else {
            nonempty.len() / 2
        };
        let row = nonempty[idx];
        let envelope = six_point_envelope(scan_data, row.kappa, a, row.h, cfg)?;
        let clipped = envelope < row.h * (1.0 - 1e-9);
        let upper = row.h.min(envelope);
        let mut counterexample = None;
        if upper <= row.s {
            counterexample = Some(format!(
                "no hyponormal point above s: envelope {envelope} is not above s = {}",
                row.s
            ));
        }
        let y0 = if upper > row.s {
            0.5 * (row.s + upper)
        } else {
            0.5 * (row.s + row.h)
        };

        let grid = example_grid(
            scan_data,
            row.kappa,
            y0,
            a,
            (cfg.window.0 + 2, cfg.window.1 + 2),
        )?;
        let six_point = grid.six_point_test(cfg.window, cfg.tol);
        if !six_point.pass && counterexample.is_none() {
            counterexample = Some(format!(
                "six-point test failed inside the region: {six_point}"
            ));
        }

        let tuple = example_tuple(scan_data, row.kappa, y0, a)?;
        let subnormal = is_subnormal(&tuple, cfg.tol);
        if subnormal.pass && counterexample.is_none() {
            counterexample = Some("tuple is subnormal inside the region".into());
        }

        let mut powers = Vec::new();
        for m in 1..=cfg.powers.0 {
            for n in 1..=cfg.powers.1 {
                let summands = tensor_core::power(&tuple, m, n)?;
                let mut all = true;
                let mut failing = None;
                for (k, s) in summands.iter().enumerate() {
                    if !is_subnormal(s, cfg.tol).pass {
                        all = false;
                        failing = Some((k as u32 / n, k as u32 % n));
                        break;
                    }
                }
                if all && counterexample.is_none() {
                    counterexample =
                        Some(format!("power ({m},{n}) is subnormal inside the region"));
                }
                powers.push(PowerAudit {
                    m,
                    n,
                    all_subnormal: all,
                    failing_summand: failing,
                });
            }
        }

        // paired check: just below s the tuple should be subnormal, provided
        // the parameters admit a subnormal phase (a² < ρ₁) at all
        let below = if a * a < scan_data.rho1 - 1e-6 {
            let yb = 0.9 * row.s;
            let vb = is_subnormal(&example_tuple(scan_data, row.kappa, yb, a)?, cfg.tol);
            if !vb.pass && counterexample.is_none() {
                counterexample = Some(format!("point below s is not subnormal: {vb}"));
            }
            Some((yb, vb.pass))
        } else {
            None
        };

        samples.push(AuditSample {
            kappa: row.kappa,
            y0,
            six_point,
            subnormal,
            powers,
            clipped,
            below,
            counterexample,
        });
    }
    Ok(AuditReport { samples })
}

pub fn render_audit(report: &AuditReport, out: &mut impl std::io::Write) {
    for s in &report.samples {
        let powers: Vec<String> = s
            .powers
            .iter()
            .map(|p| {
                let tail = match p.failing_summand {
                    Some((a, b)) => format!("fail@({a},{b})"),
                    None => "all-pass".into(),
                };
                format!("({},{}):{tail}", p.m, p.n)
            })
            .collect();
        let _ = writeln!(
            out,
            "audit kappa={:.4} y0={:.6} sixpoint={} subnormal={} powers[{}]{}{}{}",
            s.kappa,
            s.y0,
            if s.six_point.pass { "pass" } else { "FAIL" },
            if s.subnormal.pass { "PASS" } else { "fail" },
            powers.join(" "),
            if s.clipped {
                " [h clipped to the windowed six-point envelope]"
            } else {
                ""
            },
            match s.below {
                Some((yb, ok)) => format!(
                    " below-s y0={yb:.6} subnormal={}",
                    if ok { "pass" } else { "FAIL" }
                ),
                None => String::new(),
            },
            match &s.counterexample {
                Some(c) => format!(" COUNTEREXAMPLE: {c}"),
                None => String::new(),
            }
        );
    }
    let _ = writeln!(
        out,
        "audit summary: {} samples, {} counterexamples",
        report.samples.len(),
        report.counterexamples()
    );
}

/// Runs the scan (and optionally the audit). The rendered CSV/SVG goes to
/// `artifact` when no output path is given, so stdout stays pipeable; all
/// status and audit lines go to `report`.
pub fn run_scan(
    cfg: &ScanConfig,
    audit_samples: usize,
    out_path: Option<&std::path::Path>,
    artifact: &mut impl std::io::Write,
    report: &mut impl std::io::Write,
) -> i32 {
    let scan_data = match scan(cfg) {
        Ok(s) => s,
        Err(CliError::Parse(e)) => {
            let _ = writeln!(report, "invalid configuration: {e}");
            return exit_code::PARSE_ERROR;
        }
        Err(e) => {
            let _ = writeln!(report, "construction failed: {e}");
            return exit_code::CONSTRUCTION_ERROR;
        }
    };
    let rendered =
        match out_path.and_then(|p| p.extension().map(|e| e.to_string_lossy().to_string())) {
            Some(ext) if ext.eq_ignore_ascii_case("svg") => render_svg(&scan_data, cfg),
            _ => render_csv(&scan_data),
        };
    match out_path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &rendered) {
                let _ = writeln!(report, "cannot write {}: {e}", p.display());
                return exit_code::CONSTRUCTION_ERROR;
            }
            let _ = writeln!(report, "wrote {}", p.display());
        }
        None => {
            let _ = write!(artifact, "{rendered}");
        }
    }
    let nonempty = scan_data.rows.iter().filter(|r| r.nonempty).count();
    let _ = writeln!(
        report,
        "region non-empty on {nonempty}/{} kappa columns",
        scan_data.rows.len()
    );
    if audit_samples > 0 {
        match audit(cfg, &scan_data, audit_samples) {
            Ok(audit_report) => {
                render_audit(&audit_report, report);
                if audit_report.counterexamples() > 0 {
                    return exit_code::FAIL;
                }
            }
            Err(e) => {
                let _ = writeln!(report, "audit failed: {e}");
                return exit_code::CONSTRUCTION_ERROR;
            }
        }
    }
    exit_code::PASS
}
