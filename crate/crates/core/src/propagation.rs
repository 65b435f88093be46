//! Free time evolution. Minimal packets evolve in closed form through the
//! analytically continued Green's function, `Φ(x,t) = A G(x - iβ, t - iα)`;
//! the Fourier integral `(1/2π)∫Φ(p) exp(-iE(p)t + ipx) dp` is the oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::Dispersion;
use crate::error::{Error, Result};
use crate::numerics::{
    bessel_i_integer, bessel_j1_y1, bessel_k01_continued, bessel_k01_scaled, integrate_mapped_line,
    ComplexAmplitude, QuadratureSpec,
};
use crate::packet::{MomentumWave, PacketParams};

const LIGHT_CONE_BAND: f64 = 1e-12;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn is_real(z: Complex64) -> bool {
    z.im == 0.0
}

fn check_light_cone(x: Complex64, t: Complex64) -> Result<()> {
    if is_real(x) && is_real(t) {
        let (x, t) = (x.re, t.re);
        if (x * x - t * t).abs() <= LIGHT_CONE_BAND * (x * x).max(t * t) {
            return Err(Error::LightConeSingular { x, t });
        }
    }
    Ok(())
}

fn lattice_site(x: f64, spacing: f64) -> Result<i64> {
    let n = x / spacing;
    let r = n.round();
    if (n - r).abs() > 1e-9 * r.abs().max(1.0) {
        return Err(Error::NonIntegerSite(x));
    }
    Ok(r as i64)
}

/// Relativistic `G(x,t) = i m t K₁(m w)/(π w)`, `w = √(x² − t²)` on the principal
/// branch. Valid on the whole complexified plane off the light cone, including
/// real points inside the cone where `w` is imaginary.
pub fn relativistic_green_k_form(mass: f64, x: Complex64, t: Complex64) -> Result<ComplexAmplitude> {
    check_light_cone(x, t)?;
    let w2 = x * x - t * t;
    let w = if is_real(x) && is_real(t) && w2.re < 0.0 {
        // boundary value from Im t < 0
        Complex64::new(0.0, (-w2.re).sqrt() * t.re.signum())
    } else {
        w2.sqrt()
    };
    let (_, k1) = bessel_k01_continued(mass * w)?;
    Ok(k1.scale(i() * mass * t / (PI * w)))
}

/// Relativistic Green's function at real points inside the light cone,
/// `G = -(m t / 2u) [J₁(mu) - iY₁(mu)]`, `u = √(t² − x²)`, continued to `t < 0`
/// by `G(x, -t) = G(x, t)*`.
pub fn relativistic_green_jy_form(mass: f64, x: f64, t: f64) -> Result<Complex64> {
    if !(x.abs() < t.abs()) {
        return Err(Error::InvalidInput(format!("({x}, {t}) is not inside the light cone")));
    }
    check_light_cone(Complex64::new(x, 0.0), Complex64::new(t, 0.0))?;
    let ta = t.abs();
    let u = ((ta - x) * (ta + x)).sqrt();
    let (j1, y1) = bessel_j1_y1(mass * u)?;
    let g = -(mass * ta / (2.0 * u)) * Complex64::new(j1, -y1);
    Ok(if t < 0.0 { g.conj() } else { g })
}

/// Closed-form Green's function at (possibly complex) `x`, `t`.
pub fn greens_closed(d: &Dispersion, x: Complex64, t: Complex64) -> Result<ComplexAmplitude> {
    match *d {
        Dispersion::NonRelativistic { mass } => {
            if t.norm() == 0.0 {
                return Err(Error::InvalidInput("non-relativistic G is singular at t = 0".into()));
            }
            let pref = (mass / (2.0 * PI * i() * t)).sqrt();
            let v = pref * (i() * mass * x * x / (2.0 * t)).exp();
            Ok(ComplexAmplitude::new(v, 4.0 * f64::EPSILON * v.norm()))
        }
        Dispersion::Lattice { mass, spacing } => {
            if !is_real(x) {
                return Err(Error::InvalidInput("lattice positions must be real sites".into()));
            }
            let n = lattice_site(x.re, spacing)?;
            let z = i() * t / (mass * spacing * spacing);
            Ok(bessel_i_integer(n, z)?.scale(Complex64::new(1.0 / spacing, 0.0)))
        }
        Dispersion::Relativistic { mass } => {
            if is_real(x) && is_real(t) && x.re.abs() < t.re.abs() {
                let v = relativistic_green_jy_form(mass, x.re, t.re)?;
                return Ok(ComplexAmplitude::new(v, 1e-13 * v.norm()));
            }
            relativistic_green_k_form(mass, x, t)
        }
        Dispersion::Massless => {
            check_light_cone(x, t)?;
            let v = i() / PI * t / (x * x - t * t);
            Ok(ComplexAmplitude::new(v, 4.0 * f64::EPSILON * v.norm()))
        }
    }
}

/// `Φ(x,t) = A G(x - iβ, t - iα)` for a minimal packet.
pub fn evolve_closed(packet: &PacketParams, x: f64, t: f64) -> Result<Complex64> {
    let xs = Complex64::new(x + packet.beta_i, -packet.beta_r);
    let ts = Complex64::new(t, -packet.alpha);
    match packet.dispersion {
        Dispersion::Relativistic { mass } => {
            // K₁ and A are combined in log form so that neither overflows
            let w = (xs * xs - ts * ts).sqrt();
            let (_, k1s) = bessel_k01_scaled(mass * w)?;
            let scale = (packet.log_norm - mass * w).exp();
            Ok(k1s.value * scale * i() * mass * ts / (PI * w))
        }
        Dispersion::Lattice { spacing, .. } => {
            lattice_site(x + packet.beta_i, spacing)?;
            let g = greens_closed(&packet.dispersion, Complex64::new(x + packet.beta_i, 0.0), ts)?;
            Ok(g.value * packet.norm_a)
        }
        _ => Ok(greens_closed(&packet.dispersion, xs, ts)?.value * packet.norm_a),
    }
}

/// `(1/2π)∫Ψ(p) exp(-iE(p)t + ipx) dp` by quadrature.
pub fn evolve_quadrature<W>(wave: &W, x: f64, t: f64, spec: &QuadratureSpec) -> Result<ComplexAmplitude>
where
    W: MomentumWave + ?Sized,
{
    let d = wave.dispersion();
    let f = |p: f64| wave.value(p) * Complex64::from_polar(1.0, p * x - d.energy(p) * t);
    let support = wave.support();
    let on_site = match d {
        Dispersion::Lattice { spacing, .. } => lattice_site(x, spacing).is_ok(),
        _ => true,
    };
    let r = if on_site { support.integrate(f, spec)? } else { support.integrate_aperiodic(f, spec)? };
    Ok(r.scale(Complex64::new(1.0 / (2.0 * PI), 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMethod {
    Closed,
    Quadrature,
}

/// `|Φ(x_j, t_i)|²` on a rectangular grid, one row per time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub x_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub density: Vec<Vec<f64>>,
    pub method: EvolutionMethod,
    /// `(row, column)` of points where the closed form was singular and the
    /// quadrature value was used instead.
    pub fallback: Vec<(usize, usize)>,
}

/// Trapezoid-rule moments of one grid row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowMoments {
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
}

impl DensityGrid {
    pub fn row_moments(&self, row: usize) -> RowMoments {
        let xs = &self.x_values;
        let ds = &self.density[row];
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for k in 0..xs.len().saturating_sub(1) {
            let h = 0.5 * (xs[k + 1] - xs[k]);
            for j in [k, k + 1] {
                m0 += h * ds[j];
                m1 += h * ds[j] * xs[j];
                m2 += h * ds[j] * xs[j] * xs[j];
            }
        }
        let mean = m1 / m0;
        RowMoments { mass: m0, mean, variance: m2 / m0 - mean * mean }
    }
}

fn ordered(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| x.is_finite())
}

/// Density of the evolved packet on a grid; rows are evaluated in parallel.
pub fn density_grid(
    packet: &PacketParams,
    x_values: &[f64],
    t_values: &[f64],
    method: EvolutionMethod,
    spec: &QuadratureSpec,
) -> Result<DensityGrid> {
    if x_values.is_empty() || t_values.is_empty() || !ordered(x_values) || !ordered(t_values) {
        return Err(Error::InvalidInput("grid axes must be non-empty, finite and increasing".into()));
    }
    let rows: Vec<Result<(Vec<f64>, Vec<usize>)>> = t_values
        .par_iter()
        .map(|&t| {
            let mut row = Vec::with_capacity(x_values.len());
            let mut fell_back = Vec::new();
            for (j, &x) in x_values.iter().enumerate() {
                let v = match method {
                    EvolutionMethod::Quadrature => evolve_quadrature(packet, x, t, spec)?.value,
                    EvolutionMethod::Closed => match evolve_closed(packet, x, t) {
                        Ok(v) => v,
                        Err(Error::LightConeSingular { .. }) | Err(Error::Overflow(_)) => {
                            fell_back.push(j);
                            evolve_quadrature(packet, x, t, spec)?.value
                        }
                        Err(e) => return Err(e),
                    },
                };
                row.push(v.norm_sqr());
            }
            Ok((row, fell_back))
        })
        .collect();
    let mut density = Vec::with_capacity(t_values.len());
    let mut fallback = Vec::new();
    for (r, row) in rows.into_iter().enumerate() {
        let (values, fb) = row?;
        fallback.extend(fb.into_iter().map(|j| (r, j)));
        density.push(values);
    }
    Ok(DensityGrid {
        x_values: x_values.to_vec(),
        t_values: t_values.to_vec(),
        density,
        method,
        fallback,
    })
}

/// `(∫|Φ|², ⟨x⟩, ⟨x²⟩)` of the evolved packet in coordinate space. Continuum
/// kinds integrate over the whole line through `x = c + s tan θ` centred on the
/// packet, so algebraic tails are captured; lattice kinds sum over sites with
/// weight `a`.
pub fn position_moments(
    packet: &PacketParams,
    t: f64,
    method: EvolutionMethod,
    spec: &QuadratureSpec,
) -> Result<(f64, f64, f64)> {
    let eval = |x: f64| -> Result<Complex64> {
        match method {
            EvolutionMethod::Closed => evolve_closed(packet, x, t),
            EvolutionMethod::Quadrature => Ok(evolve_quadrature(packet, x, t, spec)?.value),
        }
    };
    let m0 = crate::moments::moments_closed_form(packet, spec)?;
    let center = crate::moments::ehrenfest_position(&m0, t);
    let width = crate::moments::spreading_width_sq(&m0, t).max(1e-300).sqrt();

    if let Dispersion::Lattice { spacing, .. } = packet.dispersion {
        let origin = (center / spacing).round() as i64;
        let (mut n0, mut n1, mut n2) = (0.0, 0.0, 0.0);
        let mut add = |n: i64| -> Result<f64> {
            let x = n as f64 * spacing;
            let d = eval(x)?.norm_sqr() * spacing;
            n0 += d;
            n1 += d * x;
            n2 += d * x * x;
            Ok(d)
        };
        add(origin)?;
        for side in [1i64, -1] {
            let mut k = 1i64;
            let mut quiet = 0;
            loop {
                let d = add(origin + side * k)?;
                let x = (k as f64) * spacing;
                quiet = if d * (1.0 + x * x) < 1e-30 { quiet + 1 } else { 0 };
                if quiet >= 8 || k > 1_000_000 {
                    break;
                }
                k += 1;
            }
        }
        return Ok((n0, n1 / n0, n2 / n0));
    }

    let moment = |power: i32| -> Result<f64> {
        let err = std::cell::Cell::new(None);
        let r = integrate_mapped_line(
            |x| match eval(x) {
                Ok(v) => Complex64::new(v.norm_sqr() * x.powi(power), 0.0),
                Err(e) => {
                    err.set(Some(e));
                    Complex64::new(0.0, 0.0)
                }
            },
            center,
            width,
            spec,
        )?;
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(r.value.re)
    };
    let n0 = moment(0)?;
    Ok((n0, moment(1)? / n0, moment(2)? / n0))
}
