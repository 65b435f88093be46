//! Minimal uncertainty packets `Φ(p) = A exp(-αE(p) + βp)`, `β = β_r + iβ_i`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{Dispersion, DispersionKind, MomentumDomain};
use crate::error::{Error, Result};
use crate::moments;
use crate::numerics::{
    bessel_i_integer, bessel_k01_scaled, integrate_interval, integrate_partition, integrate_periodic,
    ComplexAmplitude, QuadratureSpec,
};

/// Drop of `ln|Φ|²` from its peak at which the momentum window is cut.
const WINDOW_LOG_DROP: f64 = 83.0;

/// Integration region of a momentum-space wave function.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    /// Finite window of the real line with interior breakpoints (kinks, peaks).
    Line { lo: f64, hi: f64, breaks: Vec<f64> },
    /// One period `]-period/2, period/2]`.
    Periodic { period: f64 },
}

impl Support {
    fn partition(lo: f64, hi: f64, breaks: &[f64]) -> Vec<f64> {
        let mut pts = vec![lo];
        pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `∫ f dp` over the support.
    pub fn integrate<F>(&self, f: F, spec: &QuadratureSpec) -> Result<ComplexAmplitude>
    where
        F: Fn(f64) -> Complex64,
    {
        match self {
            Support::Line { lo, hi, breaks } => {
                integrate_partition(f, &Support::partition(*lo, *hi, breaks), spec)
            }
            Support::Periodic { period } => integrate_periodic(f, *period, spec),
        }
    }

    /// `∫ f dp` for integrands that are not periodic (e.g. weighted by `p`):
    /// Gauss-Kronrod on the zone instead of the trapezoid rule.
    pub fn integrate_aperiodic<F>(&self, f: F, spec: &QuadratureSpec) -> Result<ComplexAmplitude>
    where
        F: Fn(f64) -> Complex64,
    {
        match self {
            Support::Periodic { period } => integrate_interval(f, -0.5 * period, 0.5 * period, spec),
            line => line.integrate(f, spec),
        }
    }
}

/// A normalized momentum-space wave function under `(1/2π)∫dp`.
pub trait MomentumWave: Sync {
    fn dispersion(&self) -> Dispersion;
    /// `Ψ(p)`; momenta are not domain-checked.
    fn value(&self, p: f64) -> Complex64;
    /// `∂ₚΨ(p)`.
    fn derivative(&self, p: f64) -> Complex64;
    fn support(&self) -> Support;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams {
    pub dispersion: Dispersion,
    pub alpha: f64,
    pub beta_r: f64,
    pub beta_i: f64,
    /// Normalization constant `A`, real positive. May underflow to 0 for
    /// extreme parameters; evaluation uses `log_norm`.
    pub norm_a: f64,
    pub log_norm: f64,
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be finite, got {v}")))
    }
}

/// Lattice packets need `β_r = 0` and `β_i/a` integral.
fn check_lattice_shift(beta_r: f64, beta_i: f64, spacing: f64) -> Result<()> {
    let sites = beta_i / spacing;
    if beta_r != 0.0 || (sites - sites.round()).abs() > 1e-9 * sites.abs().max(1.0) {
        return Err(Error::LatticePeriodicity { beta_r, sites });
    }
    Ok(())
}

fn log_norm(dispersion: Dispersion, alpha: f64, beta_r: f64) -> Result<f64> {
    let ln_a2 = match dispersion {
        Dispersion::NonRelativistic { mass } => {
            (2.0 * PI).ln() - 0.5 * (PI * mass / alpha).ln() - beta_r * beta_r * mass / alpha
        }
        Dispersion::Lattice { mass, spacing } => {
            let i0 = bessel_i_integer(0, Complex64::new(2.0 * alpha / (mass * spacing * spacing), 0.0))?;
            spacing.ln() - i0.value.re.ln()
        }
        Dispersion::Relativistic { mass } => {
            let kappa = ((alpha - beta_r) * (alpha + beta_r)).sqrt();
            let z = 2.0 * mass * kappa;
            let (_, k1_scaled) = bessel_k01_scaled(Complex64::new(z, 0.0))?;
            (PI * kappa / (mass * alpha)).ln() - k1_scaled.value.re.ln() + z
        }
        Dispersion::Massless => (2.0 * PI * (alpha - beta_r) * (alpha + beta_r) / alpha).ln(),
    };
    Ok(0.5 * ln_a2)
}

impl PacketParams {
    /// Builds the normalized minimal packet.
    pub fn make_minimal(dispersion: Dispersion, alpha: f64, beta_r: f64, beta_i: f64) -> Result<Self> {
        check_finite("alpha", alpha)?;
        check_finite("beta_r", beta_r)?;
        check_finite("beta_i", beta_i)?;
        if !(alpha > 0.0) {
            return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
        }
        match dispersion {
            Dispersion::Relativistic { .. } | Dispersion::Massless if alpha <= beta_r.abs() => {
                return Err(Error::InvalidParams(format!(
                    "alpha = {alpha} must exceed |beta_r| = {}",
                    beta_r.abs()
                )));
            }
            Dispersion::Lattice { spacing, .. } => check_lattice_shift(beta_r, beta_i, spacing)?,
            _ => {}
        }
        let log_norm = log_norm(dispersion, alpha, beta_r)?;
        Ok(PacketParams {
            dispersion,
            alpha,
            beta_r,
            beta_i,
            norm_a: log_norm.exp(),
            log_norm,
        })
    }

    pub fn kind(&self) -> DispersionKind {
        self.dispersion.kind()
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.beta_r, self.beta_i)
    }

    /// Same packet with `β_i` replaced; translates it in position space.
    pub fn with_beta_i(&self, beta_i: f64) -> Result<Self> {
        PacketParams::make_minimal(self.dispersion, self.alpha, self.beta_r, beta_i)
    }

    /// `Φ(p)` with the momentum domain enforced.
    pub fn amplitude(&self, p: f64) -> Result<Complex64> {
        let domain = self.dispersion.momentum_domain();
        if !domain.contains(p) {
            return Err(Error::Domain { p, domain: format!("{domain:?}") });
        }
        Ok(self.value(p))
    }

    /// `ln Φ(p)` up to the phase; used where `Φ` itself underflows.
    pub fn log_modulus(&self, p: f64) -> f64 {
        self.log_norm - self.alpha * self.dispersion.energy(p) + self.beta_r * p
    }

    /// Momentum at which `|Φ|` peaks.
    pub fn peak_momentum(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta_r);
        match self.dispersion {
            Dispersion::NonRelativistic { mass } => mass * b / a,
            Dispersion::Relativistic { mass } => mass * b / ((a - b) * (a + b)).sqrt(),
            Dispersion::Lattice { .. } | Dispersion::Massless => 0.0,
        }
    }

    fn window_edge(&self, peak: f64, direction: f64) -> f64 {
        let g = |p: f64| self.alpha * self.dispersion.energy(p) - self.beta_r * p;
        let g0 = g(peak);
        let target = 0.5 * WINDOW_LOG_DROP;
        let mut inner = 0.0;
        let mut outer = 1.0;
        while g(peak + direction * outer) - g0 < target {
            inner = outer;
            outer *= 2.0;
            if outer > 1e12 {
                break;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (inner + outer);
            if g(peak + direction * mid) - g0 < target {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        peak + direction * outer
    }

    /// `(1/2π)∫|Φ|²dp` by quadrature; should be 1.
    pub fn normalization_quadrature(&self, spec: &QuadratureSpec) -> Result<ComplexAmplitude> {
        let r = self.support().integrate(|p| Complex64::new(self.value(p).norm_sqr(), 0.0), spec)?;
        Ok(r.scale(Complex64::new(1.0 / (2.0 * PI), 0.0)))
    }
}

impl MomentumWave for PacketParams {
    fn dispersion(&self) -> Dispersion {
        self.dispersion
    }

    fn value(&self, p: f64) -> Complex64 {
        Complex64::from_polar(self.log_modulus(p).exp(), self.beta_i * p)
    }

    fn derivative(&self, p: f64) -> Complex64 {
        (self.beta() - self.alpha * self.dispersion.velocity(p)) * self.value(p)
    }

    fn support(&self) -> Support {
        match self.dispersion.momentum_domain() {
            MomentumDomain::Periodic { lo, hi } => Support::Periodic { period: hi - lo },
            MomentumDomain::FullLine => {
                let peak = self.peak_momentum();
                let lo = self.window_edge(peak, -1.0);
                let hi = self.window_edge(peak, 1.0);
                Support::Line { lo, hi, breaks: vec![peak, 0.0] }
            }
        }
    }
}

/// How the packet width is specified to [`solve_parameters`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Width {
    Alpha(f64),
    DeltaX(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTargets {
    pub mean_velocity: f64,
    pub mean_position: f64,
    pub width: Width,
}

fn mean_velocity_of(dispersion: Dispersion, alpha: f64, beta_r: f64, spec: &QuadratureSpec) -> Result<f64> {
    let packet = PacketParams::make_minimal(dispersion, alpha, beta_r, 0.0)?;
    moments::expectation(&packet, |p| dispersion.velocity(p), spec)
}

/// Bisection for `β_r` such that the quadrature `⟨v⟩` hits the target at fixed `α`.
fn solve_beta_r(dispersion: Dispersion, alpha: f64, target: f64, spec: &QuadratureSpec) -> Result<f64> {
    if dispersion.kind() == DispersionKind::Lattice {
        return Ok(0.0);
    }
    let eps = 1e-6 * alpha;
    let f = |b: f64| mean_velocity_of(dispersion, alpha, b, spec).map(|v| v - target);
    let (mut lo, mut hi) = match dispersion.max_speed() {
        Some(_) => (-alpha + eps, alpha - eps),
        None => {
            let mut w = alpha.max(1.0);
            while f(-w)? > 0.0 || f(w)? < 0.0 {
                w *= 2.0;
                if w > 1e8 {
                    return Err(Error::NoConvergence("could not bracket beta_r".into()));
                }
            }
            (-w, w)
        }
    };
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::Unsatisfiable(format!(
            "mean velocity {target} not reachable with alpha = {alpha}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * alpha.max(mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Finds `(α, β_r, β_i)` meeting the targets. `β_r` is found by bisection on the
/// quadrature mean velocity; with [`Width::DeltaX`] an outer bisection adjusts `α`.
pub fn solve_parameters(
    dispersion: Dispersion,
    targets: MomentTargets,
    spec: &QuadratureSpec,
) -> Result<PacketParams> {
    let MomentTargets { mean_velocity, mean_position, width } = targets;
    if !mean_velocity.is_finite() || !mean_position.is_finite() {
        return Err(Error::InvalidInput("targets must be finite".into()));
    }
    if let Some(vmax) = dispersion.max_speed() {
        if dispersion.kind() == DispersionKind::Lattice {
            if mean_velocity != 0.0 {
                return Err(Error::Unsatisfiable(format!(
                    "lattice minimal packets do not move (requested mean velocity {mean_velocity})"
                )));
            }
        } else if mean_velocity.abs() >= vmax {
            return Err(Error::Unsatisfiable(format!(
                "|mean velocity| = {} must stay below {vmax}",
                mean_velocity.abs()
            )));
        }
    }
    let beta_i = -mean_position;
    if let Some(a) = dispersion.spacing() {
        check_lattice_shift(0.0, beta_i, a)?;
    }

    match width {
        Width::Alpha(alpha) => {
            if !(alpha > 0.0) {
                return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
            }
            let beta_r = solve_beta_r(dispersion, alpha, mean_velocity, spec)?;
            PacketParams::make_minimal(dispersion, alpha, beta_r, beta_i)
        }
        Width::DeltaX(dx) => {
            if !(dx > 0.0) || !dx.is_finite() {
                return Err(Error::InvalidInput(format!("target width must be positive, got {dx}")));
            }
            let width_at = |alpha: f64| -> Result<(f64, f64)> {
                let beta_r = solve_beta_r(dispersion, alpha, mean_velocity, spec)?;
                let packet = PacketParams::make_minimal(dispersion, alpha, beta_r, 0.0)?;
                let m = moments::moments_quadrature(&packet, spec)?;
                Ok((m.variance_x(), beta_r))
            };
            let target = dx * dx;
            let (mut lo, mut hi) = (1.0, 1.0);
            while width_at(lo)?.0 > target {
                lo *= 0.5;
                if lo < 1e-12 {
                    return Err(Error::Unsatisfiable(format!("width {dx} below the reachable range")));
                }
            }
            while width_at(hi)?.0 < target {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(Error::Unsatisfiable(format!("width {dx} above the reachable range")));
                }
            }
            let mut best = (hi, width_at(hi)?.1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let (w, b) = width_at(mid)?;
                best = (mid, b);
                if ((w.sqrt() - dx) / dx).abs() < 1e-10 {
                    break;
                }
                if w < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi {
                    break;
                }
            }
            PacketParams::make_minimal(dispersion, best.0, best.1, beta_i)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bessel_k01;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn relativistic_closed_norm_matches_bessel_formula() {
        let d = Dispersion::relativistic(1.0).unwrap();
        let p = PacketParams::make_minimal(d, 1.0, 0.5, 0.0).unwrap();
        let z = 3f64.sqrt();
        let k1 = bessel_k01(Complex64::new(z, 0.0)).unwrap().1.value.re;
        let expected = PI * z / 2.0 / k1;
        assert!((p.norm_a * p.norm_a - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn closed_and_quadrature_normalizations_agree() {
        let cases = [
            (Dispersion::non_relativistic(3.0).unwrap(), 1.0, 0.0, 0.0),
            (Dispersion::non_relativistic(3.0).unwrap(), 0.7, 1.3, -2.0),
            (Dispersion::lattice(3.0, 1.0).unwrap(), 1.0, 0.0, 2.0),
            (Dispersion::lattice(0.5, 0.5).unwrap(), 2.0, 0.0, -1.5),
            (Dispersion::relativistic(1.0).unwrap(), 1.0, 0.5, 0.3),
            (Dispersion::relativistic(2.0).unwrap(), 0.5, -0.45, 0.0),
            (Dispersion::massless(), 1.0, 0.5, 0.0),
            (Dispersion::massless(), 2.0, -1.9, 4.0),
        ];
        for (d, a, br, bi) in cases {
            let p = PacketParams::make_minimal(d, a, br, bi).unwrap();
            let n = p.normalization_quadrature(&spec()).unwrap();
            assert!((n.value.re - 1.0).abs() < 1e-10, "{d:?} {a} {br}: {}", n.value.re);
        }
    }

    #[test]
    fn nonrel_norm_from_gaussian_integral() {
        // (1/2π)∫exp(-p²/3)dp = √(3π)/(2π), so A² = 2π/√(3π)
        let p = PacketParams::make_minimal(Dispersion::non_relativistic(3.0).unwrap(), 1.0, 0.0, 0.0).unwrap();
        let expected = 2.0 * PI / (3.0 * PI).sqrt();
        assert!((p.norm_a.powi(2) - expected).abs() < 1e-13);
    }

    #[test]
    fn invalid_parameters() {
        let lat = Dispersion::lattice(3.0, 1.0).unwrap();
        assert!(matches!(
            PacketParams::make_minimal(lat, 1.0, 0.1, 0.0),
            Err(Error::LatticePeriodicity { .. })
        ));
        assert!(matches!(
            PacketParams::make_minimal(lat, 1.0, 0.0, 0.5),
            Err(Error::LatticePeriodicity { .. })
        ));
        let rel = Dispersion::relativistic(1.0).unwrap();
        assert!(matches!(PacketParams::make_minimal(rel, 1.0, 1.0, 0.0), Err(Error::InvalidParams(_))));
        assert!(matches!(
            PacketParams::make_minimal(Dispersion::massless(), -1.0, 0.0, 0.0),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn amplitude_shapes() {
        let rel = PacketParams::make_minimal(Dispersion::relativistic(1.0).unwrap(), 1.0, 0.0, 0.0).unwrap();
        let v = rel.amplitude(0.0).unwrap();
        assert!((v.re - rel.norm_a * (-1.0f64).exp()).abs() < 1e-15 && v.im == 0.0);
        let ml = PacketParams::make_minimal(Dispersion::massless(), 1.0, 0.0, 0.0).unwrap();
        assert_eq!(ml.amplitude(1.7).unwrap(), ml.amplitude(-1.7).unwrap());
        let lat = PacketParams::make_minimal(Dispersion::lattice(3.0, 1.0).unwrap(), 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(lat.amplitude(3.5), Err(Error::Domain { .. })));
        let shifted = rel.with_beta_i(2.5).unwrap();
        for p in [-3.0, 0.2, 4.0] {
            assert!((shifted.value(p).norm() - rel.value(p).norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn window_drops_far_enough() {
        let p = PacketParams::make_minimal(Dispersion::relativistic(1.0).unwrap(), 1.0, 0.9, 0.0).unwrap();
        let Support::Line { lo, hi, .. } = p.support() else { panic!("expected line support") };
        let peak = p.log_modulus(p.peak_momentum());
        assert!(2.0 * (peak - p.log_modulus(lo)) >= WINDOW_LOG_DROP * 0.999);
        assert!(2.0 * (peak - p.log_modulus(hi)) >= WINDOW_LOG_DROP * 0.999);
    }

    #[test]
    fn solve_direct_mode() {
        let nr = solve_parameters(
            Dispersion::non_relativistic(3.0).unwrap(),
            MomentTargets { mean_velocity: 0.5, mean_position: 1.0, width: Width::Alpha(1.0) },
            &spec(),
        )
        .unwrap();
        assert!((nr.beta_r - 0.5).abs() < 1e-9);
        assert_eq!(nr.beta_i, -1.0);
        let rel = solve_parameters(
            Dispersion::relativistic(1.0).unwrap(),
            MomentTargets { mean_velocity: 0.5, mean_position: 0.0, width: Width::Alpha(1.0) },
            &spec(),
        )
        .unwrap();
        assert!((rel.beta_r - 0.5).abs() < 1e-9);
    }

    #[test]
    fn solve_rejects_moving_lattice_packets() {
        let r = solve_parameters(
            Dispersion::lattice(3.0, 1.0).unwrap(),
            MomentTargets { mean_velocity: 0.3, mean_position: 0.0, width: Width::Alpha(1.0) },
            &spec(),
        );
        assert!(matches!(r, Err(Error::Unsatisfiable(_))));
    }

    #[test]
    fn solve_width_mode() {
        // non-relativistic Δx² = α/2m, so Δx = 0.5 at m = 3 needs α = 1.5
        let p = solve_parameters(
            Dispersion::non_relativistic(3.0).unwrap(),
            MomentTargets { mean_velocity: 0.2, mean_position: 0.0, width: Width::DeltaX(0.5) },
            &spec(),
        )
        .unwrap();
        assert!((p.alpha - 1.5).abs() < 1e-7);
        assert!((p.beta_r - 0.3).abs() < 1e-7);
    }
}
