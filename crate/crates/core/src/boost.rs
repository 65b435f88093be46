//! Galilean and Lorentz boosts of packets.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{Dispersion, DispersionKind};
use crate::error::{Error, Result};
use crate::moments::{expectation, moments_quadrature, Quantity};
use crate::numerics::QuadratureSpec;
use crate::packet::{MomentumWave, PacketParams, Support};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostParams {
    pub u: f64,
    pub gamma: f64,
}

impl BoostParams {
    pub fn lorentz(u: f64) -> Result<Self> {
        if !(u.abs() < 1.0) {
            return Err(Error::InvalidBoost(u.abs()));
        }
        Ok(BoostParams { u, gamma: 1.0 / ((1.0 - u) * (1.0 + u)).sqrt() })
    }

    pub fn galilean(u: f64) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::InvalidInput(format!("boost velocity must be finite, got {u}")));
        }
        Ok(BoostParams { u, gamma: 1.0 })
    }
}

/// `β → β - uα` for a non-relativistic packet.
pub fn galilean_boost(packet: &PacketParams, u: f64) -> Result<PacketParams> {
    if packet.kind() != DispersionKind::NonRelativistic {
        return Err(Error::KindMismatch(format!("Galilean boost of a {} packet", packet.kind().name())));
    }
    BoostParams::galilean(u)?;
    PacketParams::make_minimal(packet.dispersion, packet.alpha, packet.beta_r - u * packet.alpha, packet.beta_i)
}

/// `(α, β) → (γ(α - uβ), γ(β - uα))`.
pub fn lorentz_boost_params(alpha: f64, beta_r: f64, u: f64) -> Result<(f64, f64)> {
    let b = BoostParams::lorentz(u)?;
    Ok((b.gamma * (alpha - u * beta_r), b.gamma * (beta_r - u * alpha)))
}

/// `Ψ_b(p') = A(-p') Ψ(p)` with `p = γ(p' + uE(p'))` and the real positive
/// amplitude `A(-p') = √(γ(1 + u v(p')))`.
#[derive(Debug, Clone)]
pub struct BoostedWave<W> {
    pub source: W,
    pub boost: BoostParams,
    mass: f64,
}

impl<W: MomentumWave> BoostedWave<W> {
    fn source_momentum(&self, pb: f64) -> f64 {
        let e = pb.hypot(self.mass);
        self.boost.gamma * (pb + self.boost.u * e)
    }

    fn boosted_momentum(&self, p: f64) -> f64 {
        let e = p.hypot(self.mass);
        self.boost.gamma * (p - self.boost.u * e)
    }

    /// `A(-p')`.
    pub fn residual_factor(&self, pb: f64) -> f64 {
        let vb = pb / pb.hypot(self.mass);
        (self.boost.gamma * (1.0 + self.boost.u * vb)).sqrt()
    }
}

impl<W: MomentumWave> MomentumWave for BoostedWave<W> {
    fn dispersion(&self) -> Dispersion {
        self.source.dispersion()
    }

    fn value(&self, pb: f64) -> Complex64 {
        self.source.value(self.source_momentum(pb)) * self.residual_factor(pb)
    }

    fn derivative(&self, pb: f64) -> Complex64 {
        let BoostParams { u, gamma } = self.boost;
        let e = pb.hypot(self.mass);
        let vb = pb / e;
        let a = self.residual_factor(pb);
        let da = gamma * u * self.mass * self.mass / (e * e * e) / (2.0 * a);
        let p = self.source_momentum(pb);
        da * self.source.value(p) + a * gamma * (1.0 + u * vb) * self.source.derivative(p)
    }

    fn support(&self) -> Support {
        match self.source.support() {
            Support::Line { lo, hi, breaks } => Support::Line {
                lo: self.boosted_momentum(lo),
                hi: self.boosted_momentum(hi),
                breaks: breaks.into_iter().map(|b| self.boosted_momentum(b)).collect(),
            },
            periodic => periodic,
        }
    }
}

/// Lorentz-boosts a relativistic momentum-space wave function.
pub fn lorentz_boost_wavefunction<W: MomentumWave>(psi: W, u: f64) -> Result<BoostedWave<W>> {
    let boost = BoostParams::lorentz(u)?;
    match psi.dispersion() {
        Dispersion::Relativistic { mass } => Ok(BoostedWave { source: psi, boost, mass }),
        other => Err(Error::KindMismatch(format!(
            "Lorentz boost of a {} wave function",
            other.kind().name()
        ))),
    }
}

/// Boosted-frame expectations predicted from the source packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostedExpectations {
    pub mean_e: f64,
    pub mean_p: f64,
    pub mean_v: f64,
    pub mean_v2: f64,
    pub mean_x: f64,
    pub mean_x2: f64,
    /// `½ m² ⟨E'^{-3}⟩`
    pub bound: f64,
}

impl BoostedExpectations {
    pub fn delta_x(&self) -> f64 {
        (self.mean_x2 - self.mean_x * self.mean_x).max(0.0).sqrt()
    }

    pub fn delta_v(&self) -> f64 {
        (self.mean_v2 - self.mean_v * self.mean_v).max(0.0).sqrt()
    }

    /// `Δx Δv` above the boosted-frame bound.
    pub fn excess(&self) -> f64 {
        self.delta_x() * self.delta_v() - self.bound
    }
}

/// Expectations in the frame moving at `u`, evaluated on the source wave:
/// `⟨E⟩_b = γ(⟨E⟩ - u⟨p⟩)`, `⟨p⟩_b = γ(⟨p⟩ - u⟨E⟩)`, `⟨v⟩_b = ⟨(v-u)/(1-uv)⟩`, and
/// the position moments from `x_b = γ[x + (u/2)(v'x + xv')]`.
pub fn boosted_expectations<W: MomentumWave>(psi: &W, u: f64, spec: &QuadratureSpec) -> Result<BoostedExpectations> {
    let BoostParams { u, gamma } = BoostParams::lorentz(u)?;
    let d = psi.dispersion();
    let Dispersion::Relativistic { mass } = d else {
        return Err(Error::KindMismatch(format!("boosted expectations of a {} wave", d.kind().name())));
    };
    let m0 = moments_quadrature(psi, spec)?;
    let mean_e = m0.require(Quantity::MeanE)?;
    let mean_p = m0.require(Quantity::MeanP)?;

    let vb = |p: f64| {
        let v = d.velocity(p);
        (v - u) / (1.0 - u * v)
    };
    let mean_v = expectation(psi, vb, spec)?;
    let mean_v2 = expectation(psi, |p| vb(p).powi(2), spec)?;
    let bound = 0.5
        * expectation(
            psi,
            |p| {
                let eb = gamma * (d.energy(p) - u * p);
                mass * mass / (eb * eb * eb)
            },
            spec,
        )?;

    let op = |p: f64| {
        let v = d.velocity(p);
        let e = d.energy(p);
        let vp = mass * mass / (e * e * e);
        let vbp = vp * (1.0 - u * u) / (1.0 - u * v).powi(2);
        Complex64::new(0.0, 1.0) * ((1.0 + u * vb(p)) * psi.derivative(p) + 0.5 * u * vbp * psi.value(p))
    };
    let support = psi.support();
    let x = support.integrate(|p| psi.value(p).conj() * op(p), spec)?;
    let x2 = support.integrate(|p| Complex64::new(op(p).norm_sqr(), 0.0), spec)?;
    let inv = 1.0 / (2.0 * PI);

    Ok(BoostedExpectations {
        mean_e: gamma * (mean_e - u * mean_p),
        mean_p: gamma * (mean_p - u * mean_e),
        mean_v,
        mean_v2,
        mean_x: gamma * x.value.re * inv,
        mean_x2: gamma * gamma * x2.value.re * inv,
        bound,
    })
}
