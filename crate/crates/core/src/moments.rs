//! Expectation values of minimal packets: a quadrature oracle that works for any
//! [`MomentumWave`], the closed forms for each dispersion, the uncertainty bound
//! and the free-evolution laws for `⟨x⟩(t)` and `Δx(t)²`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::dispersion::Dispersion;
use crate::error::{Error, Result};
use crate::numerics::{bessel_i_integer, bessel_k01_scaled, integrate_partition, QuadratureSpec};
use crate::packet::{MomentumWave, PacketParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    MeanX,
    MeanX2,
    MeanV,
    MeanV2,
    MeanP,
    MeanP2,
    MeanE,
    MeanE2,
    /// `⟨vx + xv⟩`
    CorrVx,
}

impl Quantity {
    pub const ALL: [Quantity; 9] = [
        Quantity::MeanX,
        Quantity::MeanX2,
        Quantity::MeanV,
        Quantity::MeanV2,
        Quantity::MeanP,
        Quantity::MeanP2,
        Quantity::MeanE,
        Quantity::MeanE2,
        Quantity::CorrVx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::MeanX => "mean_x",
            Quantity::MeanX2 => "mean_x2",
            Quantity::MeanV => "mean_v",
            Quantity::MeanV2 => "mean_v2",
            Quantity::MeanP => "mean_p",
            Quantity::MeanP2 => "mean_p2",
            Quantity::MeanE => "mean_E",
            Quantity::MeanE2 => "mean_E2",
            Quantity::CorrVx => "corr_vx",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
}

/// The nine moments of a packet. Quantities without a closed form for the
/// dispersion are `None`, never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    values: [Option<f64>; 9],
    errors: [f64; 9],
    pub provenance: Provenance,
}

impl MomentSet {
    fn empty(provenance: Provenance) -> Self {
        MomentSet { values: [None; 9], errors: [0.0; 9], provenance }
    }

    fn set(&mut self, q: Quantity, value: f64, error: f64) {
        self.values[q.index()] = Some(value);
        self.errors[q.index()] = error;
    }

    pub fn get(&self, q: Quantity) -> Option<f64> {
        self.values[q.index()]
    }

    pub fn error(&self, q: Quantity) -> f64 {
        self.errors[q.index()]
    }

    pub fn require(&self, q: Quantity) -> Result<f64> {
        self.get(q).ok_or(Error::Absent(q.name()))
    }

    fn always(&self, q: Quantity) -> f64 {
        self.get(q).expect("position and velocity moments are always present")
    }

    pub fn mean_x(&self) -> f64 {
        self.always(Quantity::MeanX)
    }

    pub fn mean_x2(&self) -> f64 {
        self.always(Quantity::MeanX2)
    }

    pub fn mean_v(&self) -> f64 {
        self.always(Quantity::MeanV)
    }

    pub fn mean_v2(&self) -> f64 {
        self.always(Quantity::MeanV2)
    }

    pub fn corr_vx(&self) -> f64 {
        self.always(Quantity::CorrVx)
    }

    pub fn variance_x(&self) -> f64 {
        self.mean_x2() - self.mean_x().powi(2)
    }

    pub fn variance_v(&self) -> f64 {
        self.mean_v2() - self.mean_v().powi(2)
    }

    pub fn delta_x(&self) -> f64 {
        self.variance_x().max(0.0).sqrt()
    }

    pub fn delta_v(&self) -> f64 {
        self.variance_v().max(0.0).sqrt()
    }
}

const INV_2PI: f64 = 1.0 / (2.0 * PI);

/// `(1/2π)∫ w(p)|Ψ(p)|² dp` for a weight periodic on the lattice zone (or any
/// weight on the line).
pub fn expectation<W, F>(wave: &W, weight: F, spec: &QuadratureSpec) -> Result<f64>
where
    W: MomentumWave + ?Sized,
    F: Fn(f64) -> f64,
{
    let r = wave
        .support()
        .integrate(|p| Complex64::new(weight(p) * wave.value(p).norm_sqr(), 0.0), spec)?;
    Ok(r.value.re * INV_2PI)
}

fn expectation_with_error<W, F>(wave: &W, weight: F, periodic: bool, spec: &QuadratureSpec) -> Result<(f64, f64)>
where
    W: MomentumWave + ?Sized,
    F: Fn(f64) -> Complex64,
{
    let support = wave.support();
    let r = if periodic {
        support.integrate(weight, spec)?
    } else {
        support.integrate_aperiodic(weight, spec)?
    };
    Ok((r.value.re * INV_2PI, r.abs_error * INV_2PI))
}

/// All nine moments by quadrature, with `x = i∂ₚ` applied through the wave's
/// analytic derivative.
pub fn moments_quadrature<W>(wave: &W, spec: &QuadratureSpec) -> Result<MomentSet>
where
    W: MomentumWave + ?Sized,
{
    let d = wave.dispersion();
    let i = Complex64::new(0.0, 1.0);
    let dens = |p: f64| wave.value(p).norm_sqr();
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut out = MomentSet::empty(Provenance::Quadrature);

    let jobs: [(Quantity, bool, Box<dyn Fn(f64) -> Complex64 + '_>); 9] = [
        (Quantity::MeanX, true, Box::new(|p| wave.value(p).conj() * i * wave.derivative(p))),
        (Quantity::MeanX2, true, Box::new(|p| c(wave.derivative(p).norm_sqr()))),
        (Quantity::MeanV, true, Box::new(|p| c(d.velocity(p) * dens(p)))),
        (Quantity::MeanV2, true, Box::new(|p| c(d.velocity(p).powi(2) * dens(p)))),
        (Quantity::MeanP, false, Box::new(|p| c(p * dens(p)))),
        (Quantity::MeanP2, false, Box::new(|p| c(p * p * dens(p)))),
        (Quantity::MeanE, true, Box::new(|p| c(d.energy(p) * dens(p)))),
        (Quantity::MeanE2, true, Box::new(|p| c(d.energy(p).powi(2) * dens(p)))),
        (
            Quantity::CorrVx,
            true,
            Box::new(|p| 2.0 * (d.velocity(p) * wave.value(p)).conj() * i * wave.derivative(p)),
        ),
    ];
    for (q, periodic, f) in jobs.iter() {
        let (v, e) = expectation_with_error(wave, f, *periodic, spec)?;
        out.set(*q, v, e);
    }
    Ok(out)
}

/// `∫_α^∞ K₀(2m√(α'² − β²)) dα' / K₁(2m√(α² − β²))`, computed from scaled
/// Bessel functions so that neither factor underflows.
fn k0_tail_over_k1(mass: f64, alpha: f64, beta: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let z = 2.0 * mass * ((alpha - beta) * (alpha + beta)).sqrt();
    let (_, k1s) = bessel_k01_scaled(Complex64::new(z, 0.0))?;
    let k1s = k1s.value.re;
    let integrand = |s: f64| {
        let a = alpha + s;
        let w = 2.0 * mass * ((a - beta) * (a + beta)).sqrt();
        match bessel_k01_scaled(Complex64::new(w, 0.0)) {
            Ok((k0s, _)) => Complex64::new(k0s.value.re / k1s * (z - w).exp(), 0.0),
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    // the integrand decays at least like exp(-2m s)
    let upper = ((1.0 / spec.absolute_floor.max(1e-300)).ln() + 10.0) / (2.0 * mass);
    let mut points = vec![0.0];
    let mut b = alpha.min(1.0 / mass).max(1e-3);
    while b < upper {
        points.push(b);
        b *= 8.0;
    }
    points.push(upper);
    let r = integrate_partition(integrand, &points, spec)?;
    if !r.value.re.is_finite() {
        return Err(Error::NoConvergence("K0 tail integral is not finite".into()));
    }
    Ok((r.value.re, r.abs_error))
}

/// Closed-form moments. Lattice `⟨p²⟩` has no closed form and is left absent.
pub fn moments_closed_form(packet: &PacketParams, spec: &QuadratureSpec) -> Result<MomentSet> {
    let PacketParams { alpha: a, beta_r: b, beta_i: bi, .. } = *packet;
    let mut out = MomentSet::empty(Provenance::ClosedForm);
    out.set(Quantity::MeanX, -bi, 0.0);
    match packet.dispersion {
        Dispersion::NonRelativistic { mass: m } => {
            let mu = m * b / a;
            let s2 = m / (2.0 * a);
            let p2 = mu * mu + s2;
            let p4 = mu.powi(4) + 6.0 * mu * mu * s2 + 3.0 * s2 * s2;
            out.set(Quantity::MeanX2, a / (2.0 * m) + bi * bi, 0.0);
            out.set(Quantity::MeanV, b / a, 0.0);
            out.set(Quantity::MeanV2, 1.0 / (2.0 * m * a) + b * b / (a * a), 0.0);
            out.set(Quantity::MeanP, mu, 0.0);
            out.set(Quantity::MeanP2, p2, 0.0);
            out.set(Quantity::MeanE, p2 / (2.0 * m), 0.0);
            out.set(Quantity::MeanE2, p4 / (4.0 * m * m), 0.0);
        }
        Dispersion::Lattice { mass: m, spacing: s } => {
            let z = Complex64::new(2.0 * a / (m * s * s), 0.0);
            let i0 = bessel_i_integer(0, z)?.value.re;
            let i1 = bessel_i_integer(1, z)?.value.re;
            let ratio = i1 / i0;
            out.set(Quantity::MeanX2, a * ratio / (2.0 * m) + bi * bi, 0.0);
            out.set(Quantity::MeanV, 0.0, 0.0);
            out.set(Quantity::MeanV2, ratio / (2.0 * a * m), 0.0);
            out.set(Quantity::MeanP, 0.0, 0.0);
            out.set(Quantity::MeanE, -ratio / (m * s * s), 0.0);
            out.set(Quantity::MeanE2, (1.0 - ratio / z.re) / (m * m * s.powi(4)), 0.0);
        }
        Dispersion::Relativistic { mass: m } => {
            let k2 = (a - b) * (a + b);
            let kappa = k2.sqrt();
            let z = 2.0 * m * kappa;
            let (k0s, k1s) = bessel_k01_scaled(Complex64::new(z, 0.0))?;
            let r = k0s.value.re / k1s.value.re;
            let fac = 1.0 + m * kappa * r;
            let spread = (a * a + 3.0 * b * b) / (2.0 * k2 * k2) * fac;
            let (tail, tail_err) = k0_tail_over_k1(m, a, b, spec)?;
            out.set(Quantity::MeanV, b / a, 0.0);
            out.set(Quantity::MeanV2, 1.0 - 2.0 * m * kappa * tail / a, 2.0 * m * kappa * tail_err / a);
            out.set(Quantity::MeanX2, k2 - 2.0 * a * m * kappa * tail + bi * bi, 2.0 * a * m * kappa * tail_err);
            out.set(Quantity::MeanP, b * fac / k2, 0.0);
            out.set(Quantity::MeanP2, m * m * b * b / k2 + spread, 0.0);
            out.set(Quantity::MeanE, a * fac / k2 - 0.5 / a, 0.0);
            out.set(Quantity::MeanE2, m * m * a * a / k2 + spread, 0.0);
        }
        Dispersion::Massless => {
            let k2 = (a - b) * (a + b);
            out.set(Quantity::MeanX2, k2 + bi * bi, 0.0);
            out.set(Quantity::MeanV, b / a, 0.0);
            out.set(Quantity::MeanV2, 1.0, 0.0);
            out.set(Quantity::MeanP, b / k2, 0.0);
            out.set(Quantity::MeanP2, (a * a + 3.0 * b * b) / (2.0 * k2 * k2), 0.0);
            out.set(Quantity::MeanE, (a * a + b * b) / (2.0 * a * k2), 0.0);
            out.set(Quantity::MeanE2, (a * a + 3.0 * b * b) / (2.0 * k2 * k2), 0.0);
        }
    }
    // minimal packets start with ⟨vx + xv⟩ = 2⟨v⟩⟨x⟩
    let corr = 2.0 * out.mean_v() * out.mean_x();
    out.set(Quantity::CorrVx, corr, 0.0);
    Ok(out)
}

/// `⟨∂ₚ²E⟩`. The massless curvature `2δ(p)` contributes `2|Ψ(0)|²/2π`.
pub fn mean_curvature<W>(wave: &W, spec: &QuadratureSpec) -> Result<f64>
where
    W: MomentumWave + ?Sized,
{
    let d = wave.dispersion();
    match d {
        Dispersion::Massless => Ok(2.0 * wave.value(0.0).norm_sqr() * INV_2PI),
        _ => expectation(wave, |p| d.curvature_unchecked(p), spec),
    }
}

/// `½|⟨∂ₚ²E⟩|`, the lower bound on `Δx Δv`.
pub fn uncertainty_bound<W>(wave: &W, spec: &QuadratureSpec) -> Result<f64>
where
    W: MomentumWave + ?Sized,
{
    Ok(0.5 * mean_curvature(wave, spec)?.abs())
}

/// `Δx Δv - ½|⟨∂ₚ²E⟩|`; zero for minimal packets.
pub fn saturation_residual(m: &MomentSet, bound: f64) -> f64 {
    m.delta_x() * m.delta_v() - bound
}

/// `⟨x⟩(t) = ⟨x⟩(0) + ⟨v⟩t`.
pub fn ehrenfest_position(m0: &MomentSet, t: f64) -> f64 {
    m0.mean_x() + m0.mean_v() * t
}

/// `Δx(t)² = Δx(0)² + (⟨vx+xv⟩ - 2⟨v⟩⟨x⟩)t + (Δv)²t²`.
pub fn spreading_width_sq(m0: &MomentSet, t: f64) -> f64 {
    let linear = m0.corr_vx() - 2.0 * m0.mean_v() * m0.mean_x();
    m0.variance_x() + linear * t + m0.variance_v() * t * t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-12
    }

    #[test]
    fn nonrel_reference_values() {
        let p = PacketParams::make_minimal(Dispersion::non_relativistic(3.0).unwrap(), 1.0, 0.0, 0.0).unwrap();
        let q = moments_quadrature(&p, &spec()).unwrap();
        assert!(close(q.mean_x2(), 1.0 / 6.0, 1e-10));
        assert!(close(q.mean_v2(), 1.0 / 6.0, 1e-10));
        assert!(close(uncertainty_bound(&p, &spec()).unwrap(), 1.0 / 6.0, 1e-12));
        assert!(close(spreading_width_sq(&q, 2.0), 5.0 / 6.0, 1e-9));
    }

    #[test]
    fn massless_reference_values() {
        let p = PacketParams::make_minimal(Dispersion::massless(), 1.0, 0.5, 0.0).unwrap();
        let q = moments_quadrature(&p, &spec()).unwrap();
        assert!(close(q.mean_v(), 0.5, 1e-10));
        assert!(close(q.mean_v2(), 1.0, 1e-10));
        assert!(close(q.mean_x2(), 0.75, 1e-10));
        let c = moments_closed_form(&p, &spec()).unwrap();
        assert!(close(c.require(Quantity::MeanE).unwrap(), 5.0 / 6.0, 1e-15));
        assert!(close(uncertainty_bound(&p, &spec()).unwrap(), 0.75, 1e-12));
        assert!(close(spreading_width_sq(&c, 10.0), 75.75, 1e-12));
    }

    #[test]
    fn lattice_reference_values() {
        let p = PacketParams::make_minimal(Dispersion::lattice(3.0, 1.0).unwrap(), 1.0, 0.0, 0.0).unwrap();
        let c = moments_closed_form(&p, &spec()).unwrap();
        let z = Complex64::new(2.0 / 3.0, 0.0);
        let r = bessel_i_integer(1, z).unwrap().value.re / bessel_i_integer(0, z).unwrap().value.re;
        assert!(close(c.mean_x2(), r / 6.0, 1e-15));
        assert_eq!(c.get(Quantity::MeanP2), None);
        assert!(matches!(c.require(Quantity::MeanP2), Err(Error::Absent(_))));
        let b = uncertainty_bound(&p, &spec()).unwrap();
        assert!(close(b, 0.5 * r / 3.0, 1e-10));
    }

    #[test]
    fn relativistic_mean_p_formula() {
        let p = PacketParams::make_minimal(Dispersion::relativistic(1.0).unwrap(), 1.0, 0.5, 0.0).unwrap();
        let q = moments_quadrature(&p, &spec()).unwrap();
        let c = moments_closed_form(&p, &spec()).unwrap();
        let z = Complex64::new(3f64.sqrt(), 0.0);
        let (k0, k1) = crate::numerics::bessel_k01(z).unwrap();
        let expected = 2.0 / 3.0 * (1.0 + 3f64.sqrt() / 2.0 * k0.value.re / k1.value.re);
        assert!(close(c.require(Quantity::MeanP).unwrap(), expected, 1e-14));
        assert!(close(q.require(Quantity::MeanP).unwrap(), expected, 1e-9));
    }

    #[test]
    fn relativistic_energy_identity() {
        for (a, b) in [(1.0, 0.5), (0.5, 0.0), (2.0, -1.0)] {
            let p = PacketParams::make_minimal(Dispersion::relativistic(1.3).unwrap(), a, b, 0.0).unwrap();
            let c = moments_closed_form(&p, &spec()).unwrap();
            let e2 = c.require(Quantity::MeanE2).unwrap();
            let p2 = c.require(Quantity::MeanP2).unwrap();
            assert!(close(e2, p2 + 1.69, 1e-10), "{e2} vs {}", p2 + 1.69);
        }
    }

    #[test]
    fn ehrenfest_examples() {
        let p = PacketParams::make_minimal(Dispersion::massless(), 1.0, 0.5, 0.0).unwrap();
        let c = moments_closed_form(&p, &spec()).unwrap();
        assert_eq!(ehrenfest_position(&c, 0.0), c.mean_x());
        assert!(close(ehrenfest_position(&c, 4.0), 2.0, 1e-15));
    }
}
