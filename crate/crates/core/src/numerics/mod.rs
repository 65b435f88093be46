//! Quadrature and Bessel-function evaluators shared by every other module.

mod bessel;
mod quadrature;

pub use bessel::{
    bessel_i_integer, bessel_j0_y0, bessel_j1_y1, bessel_k01, bessel_k01_continued,
    bessel_k01_scaled, K_SERIES_RADIUS, I_SERIES_RADIUS,
};
pub use quadrature::{
    integrate_interval, integrate_line, integrate_mapped_line, integrate_partition,
    integrate_periodic,
};

pub(crate) use bessel::{i_integral, i_series, k01_laplace_scaled, k01_series};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_floor: f64,
    /// Upper bound on the number of subintervals (Gauss-Kronrod) or on the
    /// number of sample points divided by 21 (periodic trapezoid).
    pub max_subdivisions: usize,
    /// Exponential decay rate assumed by [`integrate_line`] callers that have
    /// no better estimate.
    pub truncation_decay_rate: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            relative_tolerance: 1e-10,
            absolute_floor: 1e-14,
            // 2^20 points with the 21-point rule
            max_subdivisions: (1 << 20) / 21,
            truncation_decay_rate: 1.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_relative_tolerance(mut self, rel: f64) -> Self {
        self.relative_tolerance = rel;
        self
    }

    pub fn with_absolute_floor(mut self, floor: f64) -> Self {
        self.absolute_floor = floor;
        self
    }

    /// Same limits, both tolerances divided by `factor`.
    pub fn tightened(self, factor: f64) -> Self {
        QuadratureSpec {
            relative_tolerance: self.relative_tolerance / factor,
            absolute_floor: self.absolute_floor / factor,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance < 1.0) {
            return Err(Error::InvalidInput(format!(
                "relative_tolerance must lie in (0, 1), got {}",
                self.relative_tolerance
            )));
        }
        if !(self.absolute_floor >= 0.0) || !self.absolute_floor.is_finite() {
            return Err(Error::InvalidInput(format!(
                "absolute_floor must be finite and non-negative, got {}",
                self.absolute_floor
            )));
        }
        if self.max_subdivisions < 8 {
            return Err(Error::InvalidInput(format!(
                "max_subdivisions must be at least 8, got {}",
                self.max_subdivisions
            )));
        }
        if !(self.truncation_decay_rate > 0.0) {
            return Err(Error::InvalidInput(
                "truncation_decay_rate must be positive".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn tolerance_for(&self, value: f64) -> f64 {
        self.relative_tolerance * value + self.absolute_floor
    }
}

/// A complex result together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexAmplitude {
    pub value: Complex64,
    pub abs_error: f64,
}

impl ComplexAmplitude {
    pub fn new(value: Complex64, abs_error: f64) -> Self {
        ComplexAmplitude { value, abs_error }
    }

    pub fn exact(value: Complex64) -> Self {
        ComplexAmplitude { value, abs_error: 0.0 }
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn conj(&self) -> Self {
        ComplexAmplitude::new(self.value.conj(), self.abs_error)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexAmplitude::new(self.value * factor, self.abs_error * factor.norm())
    }
}

impl std::ops::Add for ComplexAmplitude {
    type Output = ComplexAmplitude;

    fn add(self, rhs: ComplexAmplitude) -> ComplexAmplitude {
        ComplexAmplitude::new(self.value + rhs.value, self.abs_error + rhs.abs_error)
    }
}
