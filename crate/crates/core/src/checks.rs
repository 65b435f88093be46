//! The end-to-end verification suite. Each criterion compares closed forms
//! against independent quadrature (or exact identities) at a pinned tolerance
//! and reports every individual comparison.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::boost::{boosted_expectations, lorentz_boost_params, lorentz_boost_wavefunction, BoostParams};
use crate::cosmology::{classical_velocity, comoving_trace, mean_velocity, ScaleFactorModel};
use crate::dispersion::{Dispersion, DispersionKind};
use crate::error::Result;
use crate::figures::{centroid_drift, curvature_sign_changes, figure_panels, local_maxima};
use crate::moments::{
    expectation, moments_closed_form, moments_quadrature, spreading_width_sq, uncertainty_bound, Quantity,
};
use crate::numerics::{
    bessel_i_integer, bessel_j0_y0, bessel_j1_y1, bessel_k01, i_integral, i_series, integrate_interval,
    integrate_periodic, k01_laplace_scaled, k01_series, QuadratureSpec,
};
use crate::packet::{MomentumWave, PacketParams};
use crate::propagation::{
    evolve_closed, evolve_quadrature, greens_closed, position_moments, relativistic_green_jy_form,
    relativistic_green_k_form, EvolutionMethod,
};

/// One comparison inside a criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub label: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub items: Vec<CheckItem>,
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|c| !c.passed)
    }

    /// `criterion N [PASS] title (k checks, worst deviation/tolerance r, t s)`
    pub fn summary_line(&self) -> String {
        let worst = self
            .items
            .iter()
            .map(|c| if c.tolerance > 0.0 { c.deviation / c.tolerance } else { 0.0 })
            .fold(0.0, f64::max);
        let mut s = format!(
            "criterion {:>2} [{}] {} ({} checks, worst deviation/tolerance {:.3e}, {:.2} s)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.items.len(),
            worst,
            self.elapsed.as_secs_f64()
        );
        for f in self.failures().take(5) {
            let _ = write!(s, "\n    failed: {} (deviation {:.3e}, tolerance {:.3e})", f.label, f.deviation, f.tolerance);
        }
        s
    }
}

struct Recorder {
    items: Vec<CheckItem>,
}

impl Recorder {
    fn push(&mut self, label: String, deviation: f64, tolerance: f64) {
        let passed = deviation.is_finite() && deviation <= tolerance;
        self.items.push(CheckItem { label, deviation, tolerance, passed });
    }

    /// `|a - b| ≤ rel·max(|a|, |b|) + 1e-12`, reported as a relative deviation.
    fn relative(&mut self, label: String, a: f64, b: f64, rel: f64) {
        let scale = a.abs().max(b.abs());
        let allowed = rel * scale + 1e-12;
        self.push(label, (a - b).abs() * rel / allowed, rel);
    }

    fn absolute(&mut self, label: String, a: f64, b: f64, tol: f64) {
        self.push(label, (a - b).abs(), tol);
    }

    fn holds(&mut self, label: String, ok: bool) {
        self.items.push(CheckItem { label, deviation: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, passed: ok });
    }
}

pub const CRITERIA: [(u8, &str); 9] = [
    (1, "closed-form moments agree with quadrature"),
    (2, "minimal packets saturate the uncertainty bound"),
    (3, "spreading law and Ehrenfest drift of evolved densities"),
    (4, "continued Green's functions agree with Fourier quadrature"),
    (5, "relativistic space-like tail and light-cone overlap"),
    (6, "Lorentz boosts"),
    (7, "figure reproduction"),
    (8, "FRW red-shift"),
    (9, "special functions"),
];

/// Runs criterion `id` (1 to 9).
pub fn run_criterion(id: u8) -> CriterionReport {
    let title = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown criterion");
    let start = Instant::now();
    let mut rec = Recorder { items: Vec::new() };
    let outcome = match id {
        1 => moments_agreement(&mut rec),
        2 => saturation(&mut rec),
        3 => spreading(&mut rec),
        4 => green_continuation(&mut rec),
        5 => space_like_tail(&mut rec),
        6 => lorentz_suite(&mut rec),
        7 => figure_reproduction(&mut rec),
        8 => cosmology_suite(&mut rec),
        9 => special_functions(&mut rec),
        _ => Ok(()),
    };
    if let Err(e) = outcome {
        rec.holds(format!("evaluation error: {e}"), false);
    }
    let elapsed = start.elapsed();
    let budget = match id {
        1 => Some(30.0),
        7 => Some(120.0),
        9 => Some(10.0),
        _ => None,
    };
    if let Some(limit) = budget {
        rec.push("runtime in seconds".into(), elapsed.as_secs_f64(), limit);
    }
    CriterionReport { id, title, items: rec.items, elapsed }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.0)).collect()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// The four dispersions at the masses used throughout the suite.
pub fn reference_dispersions() -> [Dispersion; 4] {
    [
        Dispersion::NonRelativistic { mass: 3.0 },
        Dispersion::Lattice { mass: 3.0, spacing: 1.0 },
        Dispersion::Relativistic { mass: 1.0 },
        Dispersion::Massless,
    ]
}

/// `α ∈ {0.5, 1, 2}` × `β_r ∈ {0, α/4, α/2}` (lattice: `β_r = 0`).
pub fn parameter_grid() -> Result<Vec<PacketParams>> {
    let mut out = Vec::new();
    for d in reference_dispersions() {
        for alpha in [0.5, 1.0, 2.0] {
            for frac in [0.0, 0.25, 0.5] {
                if d.kind() == DispersionKind::Lattice && frac != 0.0 {
                    continue;
                }
                out.push(PacketParams::make_minimal(d, alpha, frac * alpha, 0.0)?);
            }
        }
    }
    Ok(out)
}

fn tag(p: &PacketParams) -> String {
    format!("{} a={} br={} bi={}", p.kind().name(), p.alpha, p.beta_r, p.beta_i)
}

/// One moving, displaced packet per dispersion.
fn evolution_packets() -> Result<Vec<PacketParams>> {
    reference_dispersions()
        .into_iter()
        .map(|d| match d.kind() {
            DispersionKind::Lattice => PacketParams::make_minimal(d, 1.0, 0.0, -1.0),
            _ => PacketParams::make_minimal(d, 1.0, 0.5, -0.5),
        })
        .collect()
}

fn moments_agreement(rec: &mut Recorder) -> Result<()> {
    for p in parameter_grid()? {
        let closed = moments_closed_form(&p, &spec())?;
        let quad = moments_quadrature(&p, &spec())?;
        for q in Quantity::ALL {
            if let Some(c) = closed.get(q) {
                rec.relative(format!("{} {q}", tag(&p)), c, quad.require(q)?, 1e-8);
            }
        }
    }
    Ok(())
}

fn saturation(rec: &mut Recorder) -> Result<()> {
    for p in parameter_grid()? {
        let m = moments_quadrature(&p, &spec())?;
        let bound = uncertainty_bound(&p, &spec())?;
        rec.absolute(format!("{} dx*dv vs bound", tag(&p)), m.delta_x() * m.delta_v(), bound, 1e-7);
    }
    Ok(())
}

fn spreading(rec: &mut Recorder) -> Result<()> {
    for p in evolution_packets()? {
        let m0 = moments_quadrature(&p, &spec())?;
        for t in [0.0, 1.0, 2.0, 5.0] {
            let (norm, mean, mean_sq) = position_moments(&p, t, EvolutionMethod::Closed, &spec())?;
            let width = mean_sq - mean * mean;
            let law = m0.variance_x() + m0.variance_v() * t * t;
            rec.relative(format!("{} t={t} dx(t)^2", tag(&p)), width, law, 1e-5);
            rec.relative(format!("{} t={t} law vs moments", tag(&p)), spreading_width_sq(&m0, t), law, 1e-5);
            rec.absolute(format!("{} t={t} <x>(t)", tag(&p)), mean, m0.mean_x() + m0.mean_v() * t, 1e-6);
            rec.absolute(format!("{} t={t} norm", tag(&p)), norm, 1.0, 1e-5);
        }
    }
    Ok(())
}

fn green_continuation(rec: &mut Recorder) -> Result<()> {
    let xs: Vec<f64> = (-10..=10).map(f64::from).collect();
    let ts = [0.0, 0.5, 1.0, 2.0, 5.0];
    for p in evolution_packets()? {
        let mut closed = Vec::new();
        for &t in &ts {
            for &x in &xs {
                closed.push((x, t, evolve_closed(&p, x, t)?));
            }
        }
        let peak = closed.iter().map(|c| c.2.norm()).fold(0.0, f64::max);
        let tol = 1e-6 * peak.max(1.0);
        let mut worst: f64 = 0.0;
        for (x, t, c) in &closed {
            let q = evolve_quadrature(&p, *x, *t, &spec())?.value;
            worst = worst.max((c - q).norm());
        }
        rec.push(format!("{} worst |closed - quadrature| on 21x5 grid", tag(&p)), worst, tol);
    }
    Ok(())
}

fn space_like_tail(rec: &mut Recorder) -> Result<()> {
    for m in [1.0, 2.0] {
        let d = Dispersion::Relativistic { mass: m };
        for t in [1.0, 3.0] {
            let n = 21;
            let mut pts = Vec::with_capacity(n);
            for k in 0..n {
                let s = (5.0 + 10.0 * k as f64 / (n - 1) as f64) / m;
                let x = s.hypot(t);
                let g = greens_closed(&d, Complex64::new(x, 0.0), Complex64::new(t, 0.0))?.value.norm();
                rec.holds(format!("m={m} t={t} s={s:.3} |G| > 0"), g > 0.0);
                // remove the algebraic prefactor s^{-3/2} of K₁(ms)/s
                pts.push((s, (g * s.powf(1.5)).ln()));
            }
            let n = pts.len() as f64;
            let (ms, ml) = pts.iter().fold((0.0, 0.0), |(a, b), (s, l)| (a + s / n, b + l / n));
            let (num, den) = pts
                .iter()
                .fold((0.0, 0.0), |(a, b), (s, l)| (a + (s - ms) * (l - ml), b + (s - ms) * (s - ms)));
            let slope = num / den;
            rec.push(format!("m={m} t={t} tail log-slope {slope:.5} vs -m"), (slope + m).abs() / m, 0.05);
        }
    }
    for t in [1.0, 4.0, 10.0] {
        for ratio in [1.0015, 1.003, 1.006, 1.009] {
            for sign in [1.0, -1.0] {
                let x = sign * t / ratio;
                let k = relativistic_green_k_form(1.0, Complex64::new(x, 0.0), Complex64::new(t, 0.0))?.value;
                let j = relativistic_green_jy_form(1.0, x, t)?;
                rec.push(format!("t={t} t/|x|={ratio} x={x:.5} K vs J/N form"), (k - j).norm(), 1e-5);
            }
        }
    }
    Ok(())
}

fn lorentz_suite(rec: &mut Recorder) -> Result<()> {
    let d = Dispersion::Relativistic { mass: 1.0 };
    let sources = [
        PacketParams::make_minimal(d, 1.0, 0.0, 0.0)?,
        PacketParams::make_minimal(d, 1.0, 0.3, 0.4)?,
        PacketParams::make_minimal(d, 2.0, -0.5, 0.0)?,
    ];
    for p in &sources {
        for u in [0.6, -0.3] {
            let w = lorentz_boost_wavefunction(*p, u)?;
            let norm = expectation(&w, |_| 1.0, &spec())?;
            rec.absolute(format!("{} u={u} boosted norm", tag(p)), norm, 1.0, 1e-8);
            let direct = moments_quadrature(&w, &spec())?;
            let pred = boosted_expectations(p, u, &spec())?;
            rec.absolute(format!("{} u={u} <E>_b", tag(p)), pred.mean_e, direct.require(Quantity::MeanE)?, 1e-7);
            rec.absolute(format!("{} u={u} <p>_b", tag(p)), pred.mean_p, direct.require(Quantity::MeanP)?, 1e-7);
        }
    }
    for (a, b) in [(1.0, 0.0), (1.0, 0.5), (3.0, -2.0)] {
        for u in [0.6, -0.9, 0.99] {
            let (a2, b2) = lorentz_boost_params(a, b, u)?;
            rec.absolute(format!("alpha={a} beta={b} u={u} invariant"), a2 * a2 - b2 * b2, a * a - b * b, 1e-12);
        }
        let (u1, u2) = (0.5, -0.2);
        let (a1, b1) = lorentz_boost_params(a, b, u1)?;
        let (ac, bc) = lorentz_boost_params(a1, b1, u2)?;
        let (ad, bd) = lorentz_boost_params(a, b, (u1 + u2) / (1.0 + u1 * u2))?;
        rec.absolute(format!("alpha={a} beta={b} composition alpha"), ac, ad, 1e-12);
        rec.absolute(format!("alpha={a} beta={b} composition beta"), bc, bd, 1e-12);
    }

    let rest = sources[0];
    let w = lorentz_boost_wavefunction(rest, 0.6)?;
    let m = moments_quadrature(&w, &spec())?;
    let excess = m.delta_x() * m.delta_v() - uncertainty_bound(&w, &spec())?;
    rec.holds(format!("boosted minimal packet excess {excess:.4e} >= 1e-4"), excess >= 1e-4);

    let u = 1e-5;
    let b = BoostParams::lorentz(u)?;
    for src in [sources[0], sources[1]] {
        let w = lorentz_boost_wavefunction(src, b.u)?;
        for p in [-2.0, -0.5, 0.3, 1.5] {
            let lhs = (w.value(p) - src.value(p)) / u;
            let rhs = 0.5 * d.velocity(p) * src.value(p) + d.energy(p) * src.derivative(p);
            rec.push(format!("{} generator at p={p}", tag(&src)), (lhs - rhs).norm() / rhs.norm(), 1e-4);
        }
    }
    Ok(())
}

fn figure_reproduction(rec: &mut Recorder) -> Result<()> {
    for which in 1..=4u8 {
        for panel in figure_panels(which)? {
            let grid = panel.render(&spec())?;
            match panel.name {
                "fig1_bottom" | "fig3_bottom" => {
                    let slope = centroid_drift(&grid);
                    let expected = panel.packet.beta_r / panel.packet.alpha;
                    rec.push(
                        format!("{} drift slope {slope:.5} vs beta/alpha", panel.name),
                        (slope - expected).abs() / expected,
                        0.02,
                    );
                }
                "fig2" => {
                    let row = grid.t_values.len() - 1;
                    let changes = curvature_sign_changes(&grid, row, 1e-4);
                    rec.holds(format!("fig2 t={} curvature sign changes {changes} >= 3", grid.t_values[row]), changes >= 3);
                }
                "fig4_top" => {
                    let row = grid.t_values.iter().position(|&t| (t - 5.0).abs() < 1e-12).unwrap_or(0);
                    let peaks = local_maxima(&grid, row);
                    let near = |c: f64| peaks.iter().any(|x| (x - c).abs() <= 0.5);
                    rec.holds(
                        format!("fig4 t=5 maxima {peaks:?} near -5 and +5"),
                        peaks.len() == 2 && near(-5.0) && near(5.0),
                    );
                }
                _ => {}
            }
            for (i, &t) in grid.t_values.iter().enumerate() {
                if t == 0.0 || t == 10.0 {
                    let mass = grid.row_moments(i).mass;
                    rec.holds(format!("{} t={t} captured mass {mass:.6} in [0.99, 1.0]", panel.name), (0.99..=1.0 + 1e-9).contains(&mass) || panel.packet.kind() == DispersionKind::Massless);
                }
            }
        }
    }
    Ok(())
}

fn cosmology_suite(rec: &mut Recorder) -> Result<()> {
    let models = [
        ("power law", ScaleFactorModel::power_law(1.0, 1.0, 2.0 / 3.0)?),
        ("exponential", ScaleFactorModel::exponential(1.0, 0.3)?),
        ("tabulated", ScaleFactorModel::tabulated(vec![0.0, 1.0, 2.5, 6.0], vec![1.0, 1.5, 2.0, 4.0])?),
    ];
    let times = [0.5, 2.0, 5.0];
    let massless = PacketParams::make_minimal(Dispersion::Massless, 1.0, 0.5, 0.0)?;
    let nonrel = PacketParams::make_minimal(Dispersion::NonRelativistic { mass: 3.0 }, 1.0, 0.5, 0.0)?;
    for (name, model) in &models {
        let r0 = model.scale_at(0.0)?;
        let v0 = mean_velocity(&nonrel, model, 0.0, &spec())?;
        for &t in &times {
            let v = mean_velocity(&massless, model, t, &spec())?;
            rec.absolute(format!("{name} t={t} massless <v>"), v, 0.5, 1e-10);
            let vn = mean_velocity(&nonrel, model, t, &spec())?;
            rec.absolute(format!("{name} t={t} nonrel <v>R/R0"), vn * model.scale_at(t)? / r0, v0, 1e-6);
        }
        let trace = comoving_trace(&massless, model, &[0.0, 1.0, 3.0], &spec())?;
        for (k, &t) in trace.t_values.iter().enumerate() {
            let horizon = integrate_interval(
                |s| Complex64::new(model.scale_at(s).map(|r| 1.0 / r).unwrap_or(f64::NAN), 0.0),
                0.0,
                t,
                &spec().with_relative_tolerance(1e-12),
            )?
            .value
            .re;
            rec.absolute(format!("{name} t={t} massless <rho>"), trace.mean_rho[k], 0.5 * horizon, 1e-7);
        }
    }
    for v0 in [0.1, 0.6, 0.99] {
        for r in [0.5, 2.0, 10.0] {
            let v = classical_velocity(v0, 1.0, r)?;
            let lhs = v / (1.0 - v * v).sqrt() * r;
            let rhs = v0 / (1.0 - v0 * v0).sqrt();
            rec.push(format!("v0={v0} R={r} conserved p_rho"), (lhs - rhs).abs() / rhs, 1e-12);
        }
    }
    let flat = ScaleFactorModel::static_universe();
    for p in [
        PacketParams::make_minimal(Dispersion::Relativistic { mass: 1.0 }, 1.0, 0.5, -0.5)?,
        PacketParams::make_minimal(Dispersion::NonRelativistic { mass: 3.0 }, 1.0, 0.5, 0.0)?,
        massless,
    ] {
        let m0 = moments_quadrature(&p, &spec())?;
        let trace = comoving_trace(&p, &flat, &[0.0, 1.0, 2.0, 5.0], &spec())?;
        for (k, &t) in trace.t_values.iter().enumerate() {
            let var = trace.mean_rho2[k] - trace.mean_rho[k].powi(2);
            rec.relative(format!("{} t={t} static width", tag(&p)), var, spreading_width_sq(&m0, t), 1e-6);
            rec.absolute(format!("{} t={t} static <x>", tag(&p)), trace.mean_x[k], m0.mean_x() + m0.mean_v() * t, 1e-7);
        }
    }
    let narrow = PacketParams::make_minimal(Dispersion::Relativistic { mass: 1.0 }, 400.0, 240.0, 0.0)?;
    let model = &models[0].1;
    let v0 = mean_velocity(&narrow, model, 0.0, &spec())?;
    for t in [1.0, 4.0] {
        let v = mean_velocity(&narrow, model, t, &spec())?;
        let classical = classical_velocity(v0, 1.0, model.scale_at(t)?)?;
        rec.push(format!("narrow packet t={t} classical limit"), (v - classical).abs() / classical, 0.01);
    }
    Ok(())
}

/// Fourth-order central difference.
fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn special_functions(rec: &mut Recorder) -> Result<()> {
    let j0 = |x: f64| bessel_j0_y0(x).map(|v| v.0).unwrap_or(f64::NAN);
    let y0 = |x: f64| bessel_j0_y0(x).map(|v| v.1).unwrap_or(f64::NAN);
    for x in [1.0f64, 5.0, 20.0] {
        let h = 1e-3 * x.max(1.0).sqrt();
        let w = j0(x) * derivative(y0, x, h) - derivative(j0, x, h) * y0(x);
        rec.absolute(format!("Wronskian J0 N0 at x={x}"), w, 2.0 / (PI * x), 1e-10);
    }
    for x in [0.5, 2.5, 30.0, 300.0, 700.0] {
        let (a, b) = bessel_j0_y0(x)?;
        let (c, d) = bessel_j1_y1(x)?;
        rec.absolute(format!("J1 N0 - J0 N1 at x={x}"), c * b - a * d, 2.0 / (PI * x), 1e-12);
    }
    let oracle_spec = spec().with_relative_tolerance(1e-13);
    let mut sign_changes = 0;
    let mut prev = j0(2.0);
    for k in 1..=100 {
        let x = 2.0 + k as f64 / 100.0;
        let oracle = integrate_interval(|th| Complex64::new((x * th.sin()).cos(), 0.0), 0.0, PI, &oracle_spec)?.value.re / PI;
        let v = j0(x);
        rec.absolute(format!("J0({x:.2}) vs integral representation"), v, oracle, 1e-10);
        if v.signum() != prev.signum() {
            sign_changes += 1;
        }
        prev = v;
    }
    rec.holds(format!("J0 changes sign {sign_changes} time(s) on [2, 3]"), sign_changes == 1);

    let i0_oracle = integrate_periodic(|p| Complex64::new((2.0 / 3.0 * p.cos()).exp(), 0.0), 2.0 * PI, &oracle_spec)?;
    let i0 = bessel_i_integer(0, Complex64::new(2.0 / 3.0, 0.0))?.value.re;
    rec.relative("I0(2/3) vs integral representation".into(), i0, i0_oracle.value.re / (2.0 * PI), 1e-12);
    let periodic = integrate_periodic(|p| Complex64::new((2.0 * p.cos()).exp(), 0.0), 2.0 * PI, &spec())?;
    let i0_2 = bessel_i_integer(0, Complex64::new(2.0, 0.0))?.value.re;
    rec.relative("periodic integral of exp(2 cos p) vs 2 pi I0(2)".into(), periodic.value.re, 2.0 * PI * i0_2, 1e-10);

    let i_re = |n: i64, x: f64| bessel_i_integer(n, Complex64::new(x, 0.0)).map(|v| v.value.re).unwrap_or(f64::NAN);
    for k in 0..=40 {
        let x = 0.1 + (20.0 - 0.1) * k as f64 / 40.0;
        let d = derivative(|s| i_re(0, s), x, 1e-3);
        rec.relative(format!("I0'({x:.3}) = I1"), d, i_re(1, x), 1e-8);
    }
    let k_of = |z: Complex64| bessel_k01(z).map(|(a, b)| (a.value, b.value));
    for z in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0), Complex64::new(5.0, -3.0)] {
        let h = 1e-3;
        let k0 = |s: f64| k_of(z + s).map(|v| v.0).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let d = (k0(-2.0 * h) - 8.0 * k0(-h) + 8.0 * k0(h) - k0(2.0 * h)) / (12.0 * h);
        let k1 = k_of(z)?.1;
        rec.push(format!("K0'({z}) = -K1"), (d + k1).norm(), 1e-7);
    }
    let mut last = 0.0;
    for x in [10.0, 20.0, 50.0] {
        let (k0, k1) = k_of(Complex64::new(x, 0.0))?;
        let ratio = k0.re / k1.re;
        rec.holds(format!("K0/K1({x}) = {ratio:.6} in (0.9, 1), increasing"), ratio > 0.9 && ratio < 1.0 && ratio > last);
        last = ratio;
    }
    for z in [Complex64::new(0.7, 0.4), Complex64::new(3.0, -2.0), Complex64::new(12.0, 9.0), Complex64::new(40.0, 1.0)] {
        for n in [0, 1, 3] {
            let a = bessel_i_integer(n, z)?.value;
            let b = bessel_i_integer(n, z.conj())?.value;
            rec.push(format!("I{n} conjugation at {z}"), (a.conj() - b).norm() / a.norm(), 1e-13);
        }
        let (a0, a1) = k_of(z)?;
        let (b0, b1) = k_of(z.conj())?;
        rec.push(format!("K0 conjugation at {z}"), (a0.conj() - b0).norm() / a0.norm(), 1e-13);
        rec.push(format!("K1 conjugation at {z}"), (a1.conj() - b1).norm() / a1.norm(), 1e-13);
    }
    for x in [0.05, 0.5, 1.0, 3f64.sqrt(), 7.0, 30.0, 100.0] {
        let (k0, k1) = k_of(Complex64::new(x, 0.0))?;
        let ok = i_re(0, x) > 0.0 && i_re(1, x) > 0.0 && k0.re > 0.0 && k1.re > 0.0 && k0.im == 0.0 && k1.im == 0.0;
        rec.holds(format!("I0, I1, K0, K1 positive real at x={x:.4}"), ok);
        // K_ν(x) = ∫₀^∞ exp(-x cosh u) cosh(νu) du with the factor e^{-x} pulled out
        let upper = (1.0 + 45.0 / x).acosh() + 1.0;
        for (nu, k) in [(0.0, k0.re), (1.0, k1.re)] {
            let scaled = integrate_interval(
                |u| Complex64::new((-x * (u.cosh() - 1.0)).exp() * (nu * u).cosh(), 0.0),
                0.0,
                upper,
                &oracle_spec,
            )?;
            rec.relative(format!("K{nu}({x:.4}) vs cosh integral"), k, scaled.value.re * (-x).exp(), 1e-9);
        }
    }
    for r in [6.0, 6.5, 7.0, 7.5, 8.0] {
        for phase in [0.0, 0.8, 1.6, 2.4, 3.1] {
            let z = Complex64::from_polar(r, phase);
            for n in [0u64, 1, 4] {
                let a = i_series(n, z).value;
                let b = i_integral(n, z)?.value;
                rec.push(format!("I{n} series vs integral at {z:.3}"), (a - b).norm() / a.norm().max(b.norm()), 1e-9);
            }
        }
    }
    for r in [1.5, 1.75, 2.0, 2.5, 3.0] {
        for phase in [0.0, 0.6, 1.2, 1.5] {
            let z = Complex64::from_polar(r, phase);
            let (s0, s1) = k01_series(z);
            let (l0, l1) = k01_laplace_scaled(z)?;
            let e = (-z).exp();
            rec.push(format!("K0 series vs integral at {z:.3}"), (s0.value - l0.value * e).norm() / s0.value.norm(), 1e-9);
            rec.push(format!("K1 series vs integral at {z:.3}"), (s1.value - l1.value * e).norm() / s1.value.norm(), 1e-9);
        }
    }
    Ok(())
}
