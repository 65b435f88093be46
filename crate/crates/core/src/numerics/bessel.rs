//! Bessel functions for the orders that appear in the closed forms.
//!
//! * `I_n(z)`, integer `n`, complex `z`: power series for `|z| ≤ 8`, periodic
//!   integral `(1/2π)∫ exp(z cos θ) cos(nθ) dθ` beyond.
//! * `K_0(z)`, `K_1(z)`: logarithmic power series for `|z| ≤ 2`, and for larger
//!   `|z|` the Laplace-type integral
//!   `K_ν(z) = √(π/2z) e^{-z} / Γ(ν+½) ∫₀^∞ e^{-s} s^{ν-½} (1 + s/2z)^{ν-½} ds`,
//!   which stays non-oscillatory on the whole cut plane `|arg z| < π`.
//! * `J_ν`, `Y_ν` for `ν ∈ {0, 1}` and real `x > 0`: series below `x = 2`,
//!   otherwise `H⁽²⁾_ν(x) = (2/π) i^{ν+1} K_ν(ix)`.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use super::quadrature::{integrate_interval, integrate_periodic};
use super::{ComplexAmplitude, QuadratureSpec};
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest `|z|` evaluated by the `I_n` power series.
pub const I_SERIES_RADIUS: f64 = 8.0;
/// Largest `|z|` evaluated by the `K_0`, `K_1` power series.
pub const K_SERIES_RADIUS: f64 = 2.0;

/// Cut-off of the Laplace integral in `r = √s`; `e^{-49}` is far below f64 resolution
/// relative to the O(1) integral.
const LAPLACE_CUTOFF: f64 = 7.0;

const MAX_SERIES_TERMS: usize = 1000;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn inner_spec() -> QuadratureSpec {
    QuadratureSpec::default()
        .with_relative_tolerance(1e-14)
        .with_absolute_floor(1e-18)
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Power series `Σ (z/2)^{2k+n} / (k! (n+k)!)`.
pub(crate) fn i_series(n: u64, z: Complex64) -> ComplexAmplitude {
    if z.norm() == 0.0 {
        let v = if n == 0 { 1.0 } else { 0.0 };
        return ComplexAmplitude::exact(Complex64::new(v, 0.0));
    }
    let half = z * 0.5;
    let lead = if n == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        (half.ln() * n as f64 - ln_factorial(n)).exp()
    };
    let q = half * half;
    let mut term = lead;
    let mut sum = term;
    let mut abs_sum = term.norm();
    for k in 1..MAX_SERIES_TERMS {
        term *= q / ((k as f64) * ((k as u64 + n) as f64));
        sum += term;
        abs_sum += term.norm();
        if term.norm() <= 1e-17 * sum.norm() || term.norm() == 0.0 {
            break;
        }
    }
    ComplexAmplitude::new(sum, 4.0 * f64::EPSILON * abs_sum)
}

/// `I_n(z) = (1/2π) ∫_{-π}^{π} exp(z cos θ) cos(nθ) dθ`, evaluated with the
/// exponential scale `e^{|Re z|}` factored out.
pub(crate) fn i_integral(n: u64, z: Complex64) -> Result<ComplexAmplitude> {
    let scale = z.re.abs();
    let nf = n as f64;
    let integrand = |theta: f64| (z * theta.cos() - scale).exp() * (nf * theta).cos();
    let spec = inner_spec();
    let r = integrate_periodic(integrand, 2.0 * PI, &spec)?;
    let scaled = r.value / (2.0 * PI);
    let log_mag = scale + scaled.norm().ln();
    if log_mag > f64::MAX.ln() || scale > f64::MAX.ln() + 50.0 {
        return Err(Error::Overflow(format!("I_{n}({z}) has magnitude e^{log_mag:.1}")));
    }
    let factor = scale.exp();
    Ok(ComplexAmplitude::new(
        scaled * factor,
        (r.abs_error / (2.0 * PI) + 4.0 * f64::EPSILON) * factor,
    ))
}

/// Modified Bessel function of the first kind `I_n(z)` for integer order.
/// Negative orders use `I_{-n} = I_n`.
pub fn bessel_i_integer(n: i64, z: Complex64) -> Result<ComplexAmplitude> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidInput(format!("I_n argument must be finite, got {z}")));
    }
    let n = n.unsigned_abs();
    if z.norm() <= I_SERIES_RADIUS {
        let r = i_series(n, z);
        if !r.value.re.is_finite() || !r.value.im.is_finite() {
            return Err(Error::Overflow(format!("I_{n}({z})")));
        }
        Ok(r)
    } else {
        i_integral(n, z)
    }
}

/// `(K_0(z), K_1(z))` from the logarithmic series. Accurate for `|z| ≲ 2`;
/// cancellation against `I_0 ln z` grows like `e^{2|z|}` beyond.
pub(crate) fn k01_series(z: Complex64) -> (ComplexAmplitude, ComplexAmplitude) {
    let half = z * 0.5;
    let q = half * half;
    let log_half = half.ln();

    let mut i0 = Complex64::new(1.0, 0.0);
    let mut i1 = half;
    let mut s0 = czero();
    let mut s1 = Complex64::new(2.0 * (1.0 - EULER_GAMMA) - 1.0, 0.0); // ψ(1)+ψ(2)
    let mut t0 = Complex64::new(1.0, 0.0); // q^k / (k!)²
    let mut t1 = Complex64::new(1.0, 0.0); // q^k / (k!(k+1)!)
    let mut harmonic = 0.0;
    let mut abs0 = 1.0;
    let mut abs1 = s1.norm();
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        let psi_sum = 2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA;
        i0 += t0;
        i1 += half * t1;
        s0 += t0 * harmonic;
        s1 += t1 * psi_sum;
        abs0 += (t0 * harmonic).norm();
        abs1 += (t1 * psi_sum).norm();
        if t0.norm() * (1.0 + harmonic) <= 1e-18 * (s0.norm() + i0.norm()) && k > 2 {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let k1 = z.inv() + log_half * i1 - half * 0.5 * s1;
    let lg = log_half.norm() + 1.0;
    let e0 = 8.0 * f64::EPSILON * (lg * i0.norm() + abs0);
    let e1 = 8.0 * f64::EPSILON * (z.inv().norm() + lg * i1.norm() + 0.5 * half.norm() * abs1);
    (ComplexAmplitude::new(k0, e0), ComplexAmplitude::new(k1, e1))
}

/// `(e^z K_0(z), e^z K_1(z))` by the Laplace-type integral, valid for
/// `|arg z| < π`.
pub(crate) fn k01_laplace_scaled(z: Complex64) -> Result<(ComplexAmplitude, ComplexAmplitude)> {
    let inv2z = (z * 2.0).inv();
    let spec = inner_spec();
    let j0 = integrate_interval(
        |r| {
            let r2 = r * r;
            (Complex64::new(1.0, 0.0) + inv2z * r2).sqrt().inv() * (-r2).exp()
        },
        0.0,
        LAPLACE_CUTOFF,
        &spec,
    )?;
    let j1 = integrate_interval(
        |r| {
            let r2 = r * r;
            (Complex64::new(1.0, 0.0) + inv2z * r2).sqrt() * (r2 * (-r2).exp())
        },
        0.0,
        LAPLACE_CUTOFF,
        &spec,
    )?;
    let pref = (Complex64::new(2.0, 0.0) / z).sqrt();
    Ok((j0.scale(pref), j1.scale(pref * 2.0)))
}

fn check_cut_plane(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidInput(format!("K argument must be finite, got {z}")));
    }
    if z.norm() == 0.0 || (z.im == 0.0 && z.re < 0.0) {
        return Err(Error::InvalidInput(format!(
            "K_0, K_1 are singular or cut at z = {z}"
        )));
    }
    Ok(())
}

/// `(e^z K_0(z), e^z K_1(z))` on the cut plane. Use this when `Re z` is large
/// enough for `K` itself to underflow.
pub fn bessel_k01_scaled(z: Complex64) -> Result<(ComplexAmplitude, ComplexAmplitude)> {
    check_cut_plane(z)?;
    if z.norm() <= K_SERIES_RADIUS {
        let (k0, k1) = k01_series(z);
        let e = z.exp();
        Ok((k0.scale(e), k1.scale(e)))
    } else {
        k01_laplace_scaled(z)
    }
}

/// `(K_0(z), K_1(z))` anywhere on the plane cut along the negative real axis,
/// including the imaginary axis.
pub fn bessel_k01_continued(z: Complex64) -> Result<(ComplexAmplitude, ComplexAmplitude)> {
    check_cut_plane(z)?;
    if z.norm() <= K_SERIES_RADIUS {
        return Ok(k01_series(z));
    }
    let (k0, k1) = k01_laplace_scaled(z)?;
    let e = (-z).exp();
    Ok((k0.scale(e), k1.scale(e)))
}

/// `(K_0(z), K_1(z))` for `Re z > 0`.
pub fn bessel_k01(z: Complex64) -> Result<(ComplexAmplitude, ComplexAmplitude)> {
    if !(z.re > 0.0) {
        return Err(Error::InvalidInput(format!("K_0, K_1 need Re z > 0, got {z}")));
    }
    bessel_k01_continued(z)
}

fn check_positive(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("J/Y need finite x > 0, got {x}")));
    }
    Ok(())
}

/// `(J_0(x), Y_0(x))` for real `x > 0`.
pub fn bessel_j0_y0(x: f64) -> Result<(f64, f64)> {
    check_positive(x)?;
    if x < K_SERIES_RADIUS {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut j0 = 1.0;
        let mut s = 0.0;
        let mut harmonic = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= -q / (kf * kf);
            harmonic += 1.0 / kf;
            j0 += term;
            s -= term * harmonic;
            if term.abs() < 1e-18 {
                break;
            }
        }
        let y0 = FRAC_2_PI * (((0.5 * x).ln() + EULER_GAMMA) * j0 + s);
        return Ok((j0, y0));
    }
    let (k0, _) = k01_laplace_scaled(Complex64::new(0.0, x))?;
    // H⁽²⁾_0(x) = (2i/π) K_0(ix)
    let h = Complex64::new(0.0, FRAC_2_PI) * k0.value * Complex64::new(0.0, -x).exp();
    Ok((h.re, -h.im))
}

/// `(J_1(x), Y_1(x))` for real `x > 0`.
pub fn bessel_j1_y1(x: f64) -> Result<(f64, f64)> {
    check_positive(x)?;
    if x < K_SERIES_RADIUS {
        let half = 0.5 * x;
        let q = half * half;
        let mut term = 1.0; // (-q)^k / (k!(k+1)!)
        let mut sum_j = 1.0;
        let mut psi = -2.0 * EULER_GAMMA + 1.0; // ψ(1)+ψ(2)
        let mut sum_y = psi;
        let mut harmonic = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= -q / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
            psi = 2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA;
            sum_j += term;
            sum_y += term * psi;
            if term.abs() < 1e-18 {
                break;
            }
        }
        let j1 = half * sum_j;
        let y1 = -FRAC_2_PI / x + FRAC_2_PI * half.ln() * j1 - half * sum_y / PI;
        return Ok((j1, y1));
    }
    let (_, k1) = k01_laplace_scaled(Complex64::new(0.0, x))?;
    // H⁽²⁾_1(x) = -(2/π) K_1(ix)
    let h = -FRAC_2_PI * k1.value * Complex64::new(0.0, -x).exp();
    Ok((h.re, -h.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    // Integral representation K_ν(z) = ∫₀^∞ exp(-z cosh u) cosh(νu) du,
    // used as an independent oracle. The factor e^{-z} is pulled out so the
    // absolute floor does not swamp small values.
    fn k_cosh_oracle(nu: f64, z: Complex64) -> Complex64 {
        let spec = QuadratureSpec::default().with_relative_tolerance(1e-13).with_absolute_floor(1e-20);
        let upper = (1.0 + 45.0 / z.re).acosh() + 1.0;
        let scaled = integrate_interval(
            |u| (-z * (u.cosh() - 1.0)).exp() * (nu * u).cosh(),
            0.0,
            upper,
            &spec,
        )
        .unwrap()
        .value;
        scaled * (-z).exp()
    }

    #[test]
    fn i_small_argument_values() {
        let one = bessel_i_integer(0, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(one.value, Complex64::new(1.0, 0.0));
        let zero = bessel_i_integer(3, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(zero.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn i_negative_order_mirrors_positive() {
        let z = Complex64::new(1.3, -0.4);
        let a = bessel_i_integer(-4, z).unwrap().value;
        let b = bessel_i_integer(4, z).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn i0_matches_integral_representation() {
        let spec = QuadratureSpec::default().with_relative_tolerance(1e-13);
        let x = 2.0 / 3.0;
        let oracle = integrate_periodic(|p| Complex64::new((x * p.cos()).exp(), 0.0), 2.0 * PI, &spec)
            .unwrap()
            .value
            / (2.0 * PI);
        let v = bessel_i_integer(0, Complex64::new(x, 0.0)).unwrap().value;
        assert!(rel(v, oracle) < 1e-12);
    }

    #[test]
    fn i_regimes_agree_on_overlap() {
        for &r in &[6.0, 6.5, 7.0, 7.5, 8.0] {
            for &phase in &[0.0, 0.7, 1.5707963267948966, 2.4, 3.0] {
                let z = Complex64::from_polar(r, phase);
                for n in [0u64, 1, 2, 5] {
                    let s = i_series(n, z).value;
                    let q = i_integral(n, z).unwrap().value;
                    let scale = s.norm().max(q.norm());
                    assert!((s - q).norm() <= 1e-9 * scale, "n={n} z={z} {s} {q}");
                }
            }
        }
    }

    #[test]
    fn i_overflow_is_signalled() {
        assert!(matches!(
            bessel_i_integer(0, Complex64::new(800.0, 0.0)),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn k_rejects_left_half_plane() {
        assert!(matches!(
            bessel_k01(Complex64::new(0.0, 1.0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            bessel_k01(Complex64::new(-1.0, 0.5)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn k_matches_cosh_representation() {
        for z in [
            Complex64::new(0.05, 0.0),
            Complex64::new(0.3, 0.2),
            Complex64::new(3f64.sqrt(), 0.0),
            Complex64::new(2.0, 1.0),
            Complex64::new(5.0, -3.0),
            Complex64::new(12.0, 4.0),
            Complex64::new(60.0, -10.0),
            Complex64::new(100.0, 0.0),
        ] {
            let (k0, k1) = bessel_k01(z).unwrap();
            let o0 = k_cosh_oracle(0.0, z);
            let o1 = k_cosh_oracle(1.0, z);
            assert!(rel(k0.value, o0) < 1e-9, "K0({z}) {} vs {o0}", k0.value);
            assert!(rel(k1.value, o1) < 1e-9, "K1({z}) {} vs {o1}", k1.value);
        }
    }

    #[test]
    fn k_regimes_agree_on_overlap() {
        for &r in &[1.5, 1.75, 2.0, 2.5, 3.0] {
            for &phase in &[0.0, 0.5, 1.2, 1.5707963267948966, 2.5] {
                let z = Complex64::from_polar(r, phase);
                let (s0, s1) = k01_series(z);
                let (l0, l1) = k01_laplace_scaled(z).unwrap();
                let e = (-z).exp();
                assert!(rel(s0.value, l0.value * e) < 1e-9, "K0 z={z}");
                assert!(rel(s1.value, l1.value * e) < 1e-9, "K1 z={z}");
            }
        }
    }

    #[test]
    fn j_y_known_values() {
        // Tabulated values (A&S Table 9.1)
        let (j0, y0) = bessel_j0_y0(1.0).unwrap();
        assert!((j0 - 0.765_197_686_557_966_6).abs() < 1e-13);
        assert!((y0 - 0.088_256_964_215_676_96).abs() < 1e-13);
        let (j1, y1) = bessel_j1_y1(1.0).unwrap();
        assert!((j1 - 0.440_050_585_744_933_5).abs() < 1e-13);
        assert!((y1 + 0.781_212_821_300_288_7).abs() < 1e-13);
        let (j0, y0) = bessel_j0_y0(10.0).unwrap();
        assert!((j0 + 0.245_935_764_451_348_3).abs() < 1e-12);
        assert!((y0 - 0.055_671_167_283_599_39).abs() < 1e-12);
    }

    #[test]
    fn j_y_regimes_are_continuous_at_switch() {
        let below = K_SERIES_RADIUS * (1.0 - 1e-12);
        let above = K_SERIES_RADIUS * (1.0 + 1e-12);
        let (a0, b0) = bessel_j0_y0(below).unwrap();
        let (c0, d0) = bessel_j0_y0(above).unwrap();
        assert!((a0 - c0).abs() < 1e-11 && (b0 - d0).abs() < 1e-11);
        let (a1, b1) = bessel_j1_y1(below).unwrap();
        let (c1, d1) = bessel_j1_y1(above).unwrap();
        assert!((a1 - c1).abs() < 1e-11 && (b1 - d1).abs() < 1e-11);
    }

    #[test]
    fn j_y_reject_nonpositive() {
        assert!(bessel_j0_y0(0.0).is_err());
        assert!(bessel_j1_y1(-1.0).is_err());
    }
}
