//! Packets in a one-dimensional expanding (FRW) background
//! `ds² = dt² − R(t)² dρ²`. The comoving momentum `p_ρ = p R(0)` is conserved,
//! so the physical velocity of each momentum component is `v(p R(0)/R(t))`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{Dispersion, DispersionKind};
use crate::error::{Error, Result};
use crate::moments::{expectation, moments_quadrature};
use crate::numerics::{integrate_partition, QuadratureSpec};
use crate::packet::{MomentumWave, PacketParams};

/// Scale factor `R(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleFactorModel {
    /// `R₀ (1 + t/t₀)ⁿ`
    PowerLaw { r0: f64, t0: f64, exponent: f64 },
    /// `R₀ e^{Ht}`
    Exponential { r0: f64, rate: f64 },
    /// Piecewise linear in `ln R` between samples `(t_k, R_k)`.
    Tabulated { times: Vec<f64>, scales: Vec<f64> },
}

impl ScaleFactorModel {
    pub fn power_law(r0: f64, t0: f64, exponent: f64) -> Result<Self> {
        if !(r0 > 0.0 && t0 > 0.0 && exponent >= 0.0) || !(r0 * t0 * exponent).is_finite() {
            return Err(Error::InvalidInput(format!(
                "power law needs R0 > 0, t0 > 0, n >= 0 (got {r0}, {t0}, {exponent})"
            )));
        }
        Ok(ScaleFactorModel::PowerLaw { r0, t0, exponent })
    }

    pub fn exponential(r0: f64, rate: f64) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() || !rate.is_finite() {
            return Err(Error::InvalidInput(format!("exponential needs R0 > 0 and finite H (got {r0}, {rate})")));
        }
        Ok(ScaleFactorModel::Exponential { r0, rate })
    }

    pub fn tabulated(times: Vec<f64>, scales: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != scales.len() {
            return Err(Error::InvalidInput("tabulated R(t) needs at least two (t, R) pairs".into()));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("tabulated times must be finite and increasing".into()));
        }
        if scales.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidInput("tabulated scale factors must be positive".into()));
        }
        Ok(ScaleFactorModel::Tabulated { times, scales })
    }

    /// A model with `R ≡ 1`.
    pub fn static_universe() -> Self {
        ScaleFactorModel::Exponential { r0: 1.0, rate: 0.0 }
    }

    pub fn scale_at(&self, t: f64) -> Result<f64> {
        let r = match self {
            ScaleFactorModel::PowerLaw { r0, t0, exponent } => {
                let base = 1.0 + t / t0;
                if base <= 0.0 {
                    return Err(Error::InvalidInput(format!("power law undefined at t = {t}")));
                }
                r0 * base.powf(*exponent)
            }
            ScaleFactorModel::Exponential { r0, rate } => r0 * (rate * t).exp(),
            ScaleFactorModel::Tabulated { times, scales } => {
                let (first, last) = (times[0], times[times.len() - 1]);
                if !(t >= first && t <= last) {
                    return Err(Error::InvalidInput(format!(
                        "t = {t} outside the tabulated range [{first}, {last}]"
                    )));
                }
                let k = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
                let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                ((1.0 - w) * scales[k - 1].ln() + w * scales[k].ln()).exp()
            }
        };
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidInput(format!("R({t}) = {r} is not positive and finite")));
        }
        Ok(r)
    }

    /// Interior kinks of `R` on `(a, b)`.
    fn kinks(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            ScaleFactorModel::Tabulated { times, .. } => times.iter().copied().filter(|&s| s > a && s < b).collect(),
            _ => Vec::new(),
        }
    }
}

/// Velocity of a classical particle launched with `v0` when the scale factor
/// has grown from `R0` to `R`.
pub fn classical_velocity(v0: f64, r0: f64, r: f64) -> Result<f64> {
    if !(v0.abs() <= 1.0) || !(r0 > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidInput(format!(
            "classical velocity needs |v0| <= 1 and positive scale factors (got {v0}, {r0}, {r})"
        )));
    }
    let s = r0 / r;
    Ok(s * v0 / (1.0 - v0 * v0 + v0 * v0 * s * s).sqrt())
}

fn continuum(packet: &PacketParams) -> Result<Dispersion> {
    if packet.kind() == DispersionKind::Lattice {
        return Err(Error::KindMismatch("FRW propagation of a lattice packet".into()));
    }
    Ok(packet.dispersion)
}

fn time_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    spec.with_relative_tolerance((spec.relative_tolerance * 10.0).min(1e-9))
}

/// Integral over `[0, t]` of a smooth function of time, breaking at kinks of R.
fn integrate_time<F>(model: &ScaleFactorModel, t: f64, f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if t == 0.0 {
        return Ok(0.0);
    }
    let (a, b, sign) = if t > 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
    let mut pts = vec![a];
    pts.extend(model.kinks(a, b));
    pts.push(b);
    let r = integrate_partition(|s| Complex64::new(f(s), 0.0), &pts, spec)?;
    Ok(sign * r.value.re)
}

/// Integrand evaluation may fail (R outside a table); the first error is kept.
struct Fallible {
    error: std::cell::RefCell<Option<Error>>,
}

impl Fallible {
    fn new() -> Self {
        Fallible { error: std::cell::RefCell::new(None) }
    }

    fn take<T>(&self, v: Result<T>, fallback: T) -> T {
        match v {
            Ok(v) => v,
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                fallback
            }
        }
    }

    fn check(self) -> Result<()> {
        match self.error.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// `⟨v(t)⟩ = (1/2π)∫|Φ(p)|² v(p R(0)/R(t)) dp`.
pub fn mean_velocity(packet: &PacketParams, model: &ScaleFactorModel, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let d = continuum(packet)?;
    let shrink = model.scale_at(0.0)? / model.scale_at(t)?;
    expectation(packet, |p| d.velocity(p * shrink), spec)
}

/// Comoving and physical position moments over time.
#[derive(Debug, Clone, PartialEq)]
pub struct ComovingTrace {
    pub t_values: Vec<f64>,
    pub mean_rho: Vec<f64>,
    pub mean_rho2: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub mean_v: Vec<f64>,
}

/// Follows `⟨ρ⟩`, `⟨ρ²⟩`, `⟨x⟩ = R⟨ρ⟩` and `⟨v⟩` of a packet released at `t = 0`.
///
/// With `ρ(t) = ρ(0) + D(p, t)`, `D = ∫₀ᵗ v(t', p)/R(t') dt'`:
/// `⟨ρ⟩ = ⟨ρ(0)⟩ + ∫₀ᵗ ⟨v(t')⟩/R(t') dt'` and
/// `⟨ρ²⟩ = ⟨ρ(0)²⟩ + ∫₀ᵗ ⟨vρ + ρv⟩(t')/R(t') dt' + ⟨D²⟩`, where `ρ(0) = (i/R(0))∂ₚ`.
pub fn comoving_trace(
    packet: &PacketParams,
    model: &ScaleFactorModel,
    t_values: &[f64],
    spec: &QuadratureSpec,
) -> Result<ComovingTrace> {
    let d = continuum(packet)?;
    if t_values.iter().any(|t| !t.is_finite()) || !t_values.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::InvalidInput("trace times must be finite and sorted".into()));
    }
    let r0 = model.scale_at(0.0)?;
    let m0 = moments_quadrature(packet, spec)?;
    let rho0 = m0.mean_x() / r0;
    let rho0_sq = m0.mean_x2() / (r0 * r0);
    let tspec = time_spec(spec);
    let support = packet.support();
    let inv2pi = 1.0 / (2.0 * PI);

    let velocity_at = |p: f64, r: f64| d.velocity(p * r0 / r);

    let mut out = ComovingTrace {
        t_values: t_values.to_vec(),
        mean_rho: Vec::with_capacity(t_values.len()),
        mean_rho2: Vec::with_capacity(t_values.len()),
        mean_x: Vec::with_capacity(t_values.len()),
        mean_v: Vec::with_capacity(t_values.len()),
    };
    for &t in t_values {
        let fail = Fallible::new();
        let drift = integrate_time(
            model,
            t,
            |s| {
                let r = fail.take(model.scale_at(s), 1.0);
                let v = fail.take(mean_velocity(packet, model, s, spec), 0.0);
                v / r
            },
            &tspec,
        )?;
        let cross = integrate_time(
            model,
            t,
            |s| {
                let r = fail.take(model.scale_at(s), 1.0);
                let sym = support.integrate(
                    |p| {
                        let v = velocity_at(p, r);
                        2.0 * (v * packet.value(p)).conj() * Complex64::new(0.0, 1.0 / r0) * packet.derivative(p)
                    },
                    spec,
                );
                fail.take(sym.map(|c| c.value.re * inv2pi), 0.0) / r
            },
            &tspec,
        )?;
        let spread = support.integrate(
            |p| {
                let dp = integrate_time(
                    model,
                    t,
                    |s| {
                        let r = fail.take(model.scale_at(s), 1.0);
                        velocity_at(p, r) / r
                    },
                    &tspec,
                );
                let dp = fail.take(dp, 0.0);
                Complex64::new(dp * dp * packet.value(p).norm_sqr(), 0.0)
            },
            spec,
        )?;
        let v_now = mean_velocity(packet, model, t, spec)?;
        fail.check()?;
        let rho = rho0 + drift;
        out.mean_rho.push(rho);
        out.mean_rho2.push(rho0_sq + cross + spread.value.re * inv2pi);
        out.mean_x.push(model.scale_at(t)? * rho);
        out.mean_v.push(v_now);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::spreading_width_sq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn classical_velocity_examples() {
        assert_eq!(classical_velocity(1.0, 1.0, 7.0).unwrap(), 1.0);
        assert_eq!(classical_velocity(0.4, 2.0, 2.0).unwrap(), 0.4);
        let v = classical_velocity(0.6, 1.0, 2.0).unwrap();
        assert!((v - 0.3 / 0.73f64.sqrt()).abs() < 1e-15);
        assert!(classical_velocity(1.2, 1.0, 1.0).is_err());
    }

    #[test]
    fn models() {
        let p = ScaleFactorModel::power_law(2.0, 1.0, 0.5).unwrap();
        assert!((p.scale_at(3.0).unwrap() - 4.0).abs() < 1e-15);
        let e = ScaleFactorModel::exponential(1.0, 0.5).unwrap();
        assert!((e.scale_at(2.0).unwrap() - 1f64.exp()).abs() < 1e-15);
        let t = ScaleFactorModel::tabulated(vec![0.0, 1.0, 3.0], vec![1.0, 2.0, 8.0]).unwrap();
        assert!((t.scale_at(0.5).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((t.scale_at(2.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(t.scale_at(3.5).is_err());
        assert!(ScaleFactorModel::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(ScaleFactorModel::power_law(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn massless_mean_velocity_is_not_redshifted() {
        let p = PacketParams::make_minimal(Dispersion::massless(), 1.0, 0.5, 0.0).unwrap();
        let m = ScaleFactorModel::power_law(1.0, 1.0, 2.0 / 3.0).unwrap();
        for t in [0.0, 1.0, 10.0] {
            assert!((mean_velocity(&p, &m, t, &spec()).unwrap() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn nonrel_mean_velocity_redshifts() {
        let p = PacketParams::make_minimal(Dispersion::non_relativistic(3.0).unwrap(), 1.0, 0.5, 0.0).unwrap();
        let m = ScaleFactorModel::exponential(1.0, 2f64.ln()).unwrap();
        assert!((mean_velocity(&p, &m, 1.0, &spec()).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn lattice_is_rejected() {
        let p = PacketParams::make_minimal(Dispersion::lattice(3.0, 1.0).unwrap(), 1.0, 0.0, 0.0).unwrap();
        let m = ScaleFactorModel::static_universe();
        assert!(matches!(mean_velocity(&p, &m, 1.0, &spec()), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn static_universe_reduces_to_flat_laws() {
        let p = PacketParams::make_minimal(Dispersion::relativistic(1.0).unwrap(), 1.0, 0.4, -0.5).unwrap();
        let m = ScaleFactorModel::static_universe();
        let m0 = moments_quadrature(&p, &spec()).unwrap();
        let trace = comoving_trace(&p, &m, &[0.0, 1.0, 3.0], &spec()).unwrap();
        for (k, &t) in trace.t_values.iter().enumerate() {
            assert!((trace.mean_x[k] - (m0.mean_x() + m0.mean_v() * t)).abs() < 1e-7);
            let var = trace.mean_rho2[k] - trace.mean_rho[k].powi(2);
            let expected = spreading_width_sq(&m0, t);
            assert!((var - expected).abs() < 1e-6 * expected, "t={t}: {var} vs {expected}");
        }
    }
}
