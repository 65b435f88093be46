//! Dispersion relations `E(p)` and their first two derivatives.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DispersionKind {
    NonRelativistic,
    Lattice,
    Relativistic,
    Massless,
}

impl DispersionKind {
    pub fn name(self) -> &'static str {
        match self {
            DispersionKind::NonRelativistic => "nonrel",
            DispersionKind::Lattice => "lattice",
            DispersionKind::Relativistic => "rel",
            DispersionKind::Massless => "massless",
        }
    }
}

/// One of the four supported dispersion relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dispersion {
    /// `E = p²/2m`
    NonRelativistic { mass: f64 },
    /// `E = -cos(pa)/(m a²)` on the Brillouin zone `]-π/a, π/a]`
    Lattice { mass: f64, spacing: f64 },
    /// `E = √(p² + m²)`
    Relativistic { mass: f64 },
    /// `E = |p|`
    Massless,
}

/// `(E, ∂ₚE, ∂ₚ²E)` at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub energy: f64,
    pub velocity: f64,
    pub curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentumDomain {
    FullLine,
    /// The half-open zone `]lo, hi]`.
    Periodic { lo: f64, hi: f64 },
}

impl MomentumDomain {
    pub fn contains(&self, p: f64) -> bool {
        match *self {
            MomentumDomain::FullLine => p.is_finite(),
            MomentumDomain::Periodic { lo, hi } => p > lo && p <= hi,
        }
    }

    pub fn period(&self) -> Option<f64> {
        match *self {
            MomentumDomain::FullLine => None,
            MomentumDomain::Periodic { lo, hi } => Some(hi - lo),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Dispersion {
    pub fn non_relativistic(mass: f64) -> Result<Self> {
        Ok(Dispersion::NonRelativistic { mass: positive("mass", mass)? })
    }

    pub fn lattice(mass: f64, spacing: f64) -> Result<Self> {
        Ok(Dispersion::Lattice {
            mass: positive("mass", mass)?,
            spacing: positive("lattice spacing", spacing)?,
        })
    }

    pub fn relativistic(mass: f64) -> Result<Self> {
        Ok(Dispersion::Relativistic { mass: positive("mass", mass)? })
    }

    pub fn massless() -> Self {
        Dispersion::Massless
    }

    pub fn kind(&self) -> DispersionKind {
        match self {
            Dispersion::NonRelativistic { .. } => DispersionKind::NonRelativistic,
            Dispersion::Lattice { .. } => DispersionKind::Lattice,
            Dispersion::Relativistic { .. } => DispersionKind::Relativistic,
            Dispersion::Massless => DispersionKind::Massless,
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Dispersion::NonRelativistic { mass }
            | Dispersion::Lattice { mass, .. }
            | Dispersion::Relativistic { mass } => mass,
            Dispersion::Massless => 0.0,
        }
    }

    pub fn spacing(&self) -> Option<f64> {
        match *self {
            Dispersion::Lattice { spacing, .. } => Some(spacing),
            _ => None,
        }
    }

    pub fn momentum_domain(&self) -> MomentumDomain {
        match *self {
            Dispersion::Lattice { spacing, .. } => MomentumDomain::Periodic {
                lo: -PI / spacing,
                hi: PI / spacing,
            },
            _ => MomentumDomain::FullLine,
        }
    }

    /// Least upper bound of `|v|`; `None` when velocities are unbounded.
    pub fn max_speed(&self) -> Option<f64> {
        match *self {
            Dispersion::NonRelativistic { .. } => None,
            Dispersion::Lattice { mass, spacing } => Some(1.0 / (mass * spacing)),
            Dispersion::Relativistic { .. } | Dispersion::Massless => Some(1.0),
        }
    }

    /// `E(p)` without domain checks. Lattice momenta are used as given.
    pub fn energy(&self, p: f64) -> f64 {
        match *self {
            Dispersion::NonRelativistic { mass } => 0.5 * p * p / mass,
            Dispersion::Lattice { mass, spacing } => -(p * spacing).cos() / (mass * spacing * spacing),
            Dispersion::Relativistic { mass } => p.hypot(mass),
            Dispersion::Massless => p.abs(),
        }
    }

    /// `∂ₚE(p)` without domain checks. The massless velocity at `p = 0` is 0.
    pub fn velocity(&self, p: f64) -> f64 {
        match *self {
            Dispersion::NonRelativistic { mass } => p / mass,
            Dispersion::Lattice { mass, spacing } => (p * spacing).sin() / (mass * spacing),
            Dispersion::Relativistic { mass } => p / p.hypot(mass),
            Dispersion::Massless => {
                if p == 0.0 {
                    0.0
                } else {
                    p.signum()
                }
            }
        }
    }

    /// `∂ₚ²E(p)` without domain checks; zero for massless (valid for `p ≠ 0`).
    pub fn curvature_unchecked(&self, p: f64) -> f64 {
        match *self {
            Dispersion::NonRelativistic { mass } => 1.0 / mass,
            Dispersion::Lattice { mass, spacing } => (p * spacing).cos() / mass,
            Dispersion::Relativistic { mass } => {
                let e = p.hypot(mass);
                mass * mass / (e * e * e)
            }
            Dispersion::Massless => 0.0,
        }
    }

    /// `(E, v, ∂ₚ²E)` at momentum `p`.
    pub fn evaluate(&self, p: f64) -> Result<DispersionPoint> {
        let domain = self.momentum_domain();
        if !domain.contains(p) {
            return Err(Error::Domain { p, domain: format!("{domain:?}") });
        }
        if matches!(self, Dispersion::Massless) && p == 0.0 {
            return Err(Error::CurvatureSingular);
        }
        Ok(DispersionPoint {
            energy: self.energy(p),
            velocity: self.velocity(p),
            curvature: self.curvature_unchecked(p),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spot_values() {
        let r = Dispersion::relativistic(1.0).unwrap().evaluate(0.0).unwrap();
        assert_eq!((r.energy, r.velocity, r.curvature), (1.0, 0.0, 1.0));
        let n = Dispersion::non_relativistic(2.0).unwrap().evaluate(2.0).unwrap();
        assert_eq!((n.energy, n.velocity, n.curvature), (1.0, 1.0, 0.5));
        let l = Dispersion::lattice(3.0, 1.0).unwrap().evaluate(0.0).unwrap();
        assert!((l.energy + 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(l.velocity, 0.0);
        assert!((l.curvature - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn domains() {
        assert_eq!(Dispersion::relativistic(1.0).unwrap().momentum_domain(), MomentumDomain::FullLine);
        assert_eq!(
            Dispersion::lattice(3.0, 1.0).unwrap().momentum_domain(),
            MomentumDomain::Periodic { lo: -PI, hi: PI }
        );
        assert_eq!(
            Dispersion::lattice(3.0, 0.5).unwrap().momentum_domain(),
            MomentumDomain::Periodic { lo: -2.0 * PI, hi: 2.0 * PI }
        );
    }

    #[test]
    fn lattice_rejects_outside_zone() {
        let l = Dispersion::lattice(1.0, 1.0).unwrap();
        assert!(matches!(l.evaluate(-PI), Err(Error::Domain { .. })));
        assert!(l.evaluate(PI).is_ok());
        assert!(matches!(l.evaluate(4.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn massless_kink_is_an_error() {
        assert_eq!(Dispersion::massless().evaluate(0.0), Err(Error::CurvatureSingular));
        let e = Dispersion::massless().evaluate(-2.0).unwrap();
        assert_eq!((e.energy, e.velocity, e.curvature), (2.0, -1.0, 0.0));
    }

    #[test]
    fn constructors_validate() {
        assert!(Dispersion::non_relativistic(0.0).is_err());
        assert!(Dispersion::lattice(1.0, -1.0).is_err());
        assert!(Dispersion::relativistic(f64::NAN).is_err());
    }

    fn any_dispersion() -> impl Strategy<Value = Dispersion> {
        prop_oneof![
            (0.2f64..5.0).prop_map(|m| Dispersion::NonRelativistic { mass: m }),
            (0.2f64..5.0, 0.3f64..2.0).prop_map(|(m, a)| Dispersion::Lattice { mass: m, spacing: a }),
            (0.2f64..5.0).prop_map(|m| Dispersion::Relativistic { mass: m }),
            Just(Dispersion::Massless),
        ]
    }

    proptest! {
        #[test]
        fn derivatives_match_finite_differences(d in any_dispersion(), s in -0.95f64..0.95) {
            let p = match d.momentum_domain() {
                MomentumDomain::Periodic { hi, .. } => s * hi,
                MomentumDomain::FullLine => 6.0 * s,
            };
            prop_assume!(!(matches!(d, Dispersion::Massless) && p.abs() < 1e-3));
            let h = 1e-5;
            let pt = d.evaluate(p).unwrap();
            let dv = (d.energy(p + h) - d.energy(p - h)) / (2.0 * h);
            prop_assert!((dv - pt.velocity).abs() <= 1e-6 * pt.velocity.abs().max(1.0));
            let dc = (d.velocity(p + h) - d.velocity(p - h)) / (2.0 * h);
            prop_assert!((dc - pt.curvature).abs() <= 1e-5 * pt.curvature.abs().max(1.0));
        }

        #[test]
        fn relativistic_is_subluminal(m in 0.01f64..10.0, p in -1e6f64..1e6) {
            let d = Dispersion::Relativistic { mass: m };
            let pt = d.evaluate(p).unwrap();
            prop_assert!(pt.energy >= m);
            prop_assert!(pt.velocity.abs() < 1.0 || p.abs() / m > 1e7);
            prop_assert!((pt.energy - p.abs()).abs() <= m * (1.0 + 1e-15));
        }

        #[test]
        fn lattice_curvature_is_minus_a2_energy(m in 0.1f64..5.0, a in 0.1f64..3.0, s in -0.999f64..1.0) {
            let d = Dispersion::Lattice { mass: m, spacing: a };
            let pt = d.evaluate(s * PI / a).unwrap();
            prop_assert!((pt.curvature + a * a * pt.energy).abs() <= 4.0 * f64::EPSILON * pt.curvature.abs().max(1.0 / m));
        }
    }
}
