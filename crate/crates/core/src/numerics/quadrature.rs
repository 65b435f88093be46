use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, LN_10};

use num_complex::Complex64;

use super::{ComplexAmplitude, QuadratureSpec};
use crate::error::{Error, Result};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_084,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// ln(10^4): extra decades kept beyond the absolute floor when truncating.
const TRUNCATION_SAFETY: f64 = 4.0 * LN_10;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    abs_mass: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn component_error(resk: f64, resg: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = (resk - resg).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn kronrod21<F>(f: &F, a: f64, b: f64) -> Segment
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [Complex64::new(0.0, 0.0); 21];
    values[0] = f(center);
    for j in 0..10 {
        let dx = half * XGK[j];
        values[1 + 2 * j] = f(center - dx);
        values[2 + 2 * j] = f(center + dx);
    }

    let mut resk = values[0] * WGK[10];
    let mut resg = Complex64::new(0.0, 0.0);
    let (mut abs_re, mut abs_im) = (values[0].re.abs() * WGK[10], values[0].im.abs() * WGK[10]);
    for j in 0..10 {
        let pair = values[1 + 2 * j] + values[2 + 2 * j];
        resk += pair * WGK[j];
        if j % 2 == 1 {
            resg += pair * WG[j / 2];
        }
        abs_re += WGK[j] * (values[1 + 2 * j].re.abs() + values[2 + 2 * j].re.abs());
        abs_im += WGK[j] * (values[1 + 2 * j].im.abs() + values[2 + 2 * j].im.abs());
    }
    let mean = resk * 0.5;
    let mut asc_re = WGK[10] * (values[0].re - mean.re).abs();
    let mut asc_im = WGK[10] * (values[0].im - mean.im).abs();
    for j in 0..10 {
        for v in [values[1 + 2 * j], values[2 + 2 * j]] {
            asc_re += WGK[j] * (v.re - mean.re).abs();
            asc_im += WGK[j] * (v.im - mean.im).abs();
        }
    }

    let h = half.abs();
    let err = component_error(resk.re * h, resg.re * h, abs_re * h, asc_re * h)
        + component_error(resk.im * h, resg.im * h, abs_im * h, asc_im * h);
    let value = resk * half;
    let error = if value.re.is_finite() && value.im.is_finite() {
        err
    } else {
        f64::INFINITY
    };
    Segment {
        a,
        b,
        value,
        error,
        abs_mass: (abs_re + abs_im) * h,
    }
}

/// Adaptive 21-point Gauss-Kronrod integration over the partition given by
/// `points` (sorted, at least two entries). Each listed point becomes a
/// subinterval boundary, which is how callers place kinks on edges.
pub fn integrate_partition<F>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<ComplexAmplitude>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(
            "integration partition needs at least two finite points".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidInput("integration partition must be sorted".into()));
        }
        if w[1] > w[0] {
            heap.push(kronrod21(&f, w[0], w[1]));
        }
    }
    if heap.is_empty() {
        return Ok(ComplexAmplitude::exact(Complex64::new(0.0, 0.0)));
    }

    loop {
        let (mut total, mut error, mut mass) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for s in heap.iter() {
            total += s.value;
            error += s.error;
            mass += s.abs_mass;
        }
        let roundoff = 50.0 * f64::EPSILON * mass;
        let tolerance = spec.tolerance_for(total.norm()) + roundoff;
        if error <= tolerance {
            return Ok(ComplexAmplitude::new(total, error));
        }
        if !error.is_finite() || heap.len() >= spec.max_subdivisions {
            return Err(Error::NonConvergence { error, tolerance });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonConvergence { error, tolerance });
        }
        heap.push(kronrod21(&f, worst.a, mid));
        heap.push(kronrod21(&f, mid, worst.b));
    }
}

/// Integral of `f` over the finite interval `[a, b]`.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<ComplexAmplitude>
where
    F: Fn(f64) -> Complex64,
{
    if b < a {
        return integrate_interval(f, b, a, spec).map(|r| r.scale(Complex64::new(-1.0, 0.0)));
    }
    integrate_partition(f, &[a, b], spec)
}

/// Integral of `f` over the real line for integrands bounded by
/// `C exp(-decay_rate |p|)`. The window `[-P, P]` is chosen so that the
/// discarded tail lies below the absolute floor with four decades to spare.
pub fn integrate_line<F>(f: F, decay_rate: f64, spec: &QuadratureSpec) -> Result<ComplexAmplitude>
where
    F: Fn(f64) -> Complex64,
{
    if !(decay_rate > 0.0) || !decay_rate.is_finite() {
        return Err(Error::InvalidInput(format!(
            "decay_rate must be positive and finite, got {decay_rate}"
        )));
    }
    let half_width = line_half_width(decay_rate, spec);
    integrate_partition(f, &[-half_width, 0.0, half_width], spec)
}

pub(crate) fn line_half_width(decay_rate: f64, spec: &QuadratureSpec) -> f64 {
    let floor = spec.absolute_floor.max(1e-300);
    ((1.0 / floor).ln() + TRUNCATION_SAFETY) / decay_rate
}

/// Integral over the real line through the map `x = center + scale tan θ`.
/// Suited to integrands with algebraic tails, which become bounded and smooth
/// in `θ`.
pub fn integrate_mapped_line<F>(
    f: F,
    center: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<ComplexAmplitude>
where
    F: Fn(f64) -> Complex64,
{
    if !(scale > 0.0) || !center.is_finite() {
        return Err(Error::InvalidInput("mapped line needs finite center and positive scale".into()));
    }
    let g = |theta: f64| {
        let c = theta.cos();
        let x = center + scale * theta.tan();
        let v = f(x);
        if v.re == 0.0 && v.im == 0.0 {
            return v;
        }
        v * (scale / (c * c))
    };
    integrate_partition(g, &[-FRAC_PI_2, 0.0, FRAC_PI_2], spec)
}

/// Integral of a smooth `period`-periodic integrand over one period, by the
/// trapezoid rule with point doubling. The sample grid is
/// `-period/2 + k h, k = 1..=N`, which stays inside the half-open zone
/// `(-period/2, period/2]`.
pub fn integrate_periodic<F>(f: F, period: f64, spec: &QuadratureSpec) -> Result<ComplexAmplitude>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
    }
    let start = -0.5 * period;
    let max_points = spec.max_subdivisions.saturating_mul(21);

    let mut n = 16usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for k in 1..=n {
        let v = f(start + period * k as f64 / n as f64);
        sum += v;
        mass += v.norm();
    }
    let mut estimate = sum * (period / n as f64);
    let mut previous_diff = f64::INFINITY;
    loop {
        // new points are the midpoints of the current grid
        let h = period / n as f64;
        let mut added = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let v = f(start + (k as f64 + 0.5) * h);
            added += v;
            mass += v.norm();
        }
        sum += added;
        n *= 2;
        let refined = sum * (period / n as f64);
        let diff = (refined - estimate).norm();
        let roundoff = 50.0 * f64::EPSILON * mass * period / n as f64;
        let tolerance = spec.tolerance_for(refined.norm()) + roundoff;
        if n >= 64 && diff <= tolerance && previous_diff <= tolerance.max(1e3 * diff) {
            return Ok(ComplexAmplitude::new(refined, diff));
        }
        if !diff.is_finite() || 2 * n > max_points {
            return Err(Error::NonConvergence { error: diff, tolerance });
        }
        previous_diff = diff;
        estimate = refined;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gaussian_on_the_line() {
        let spec = QuadratureSpec::default();
        let r = integrate_line(|p| c((-p * p).exp()), 1.0, &spec).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-12);
        assert!(r.abs_error <= 1e-10);
    }

    #[test]
    fn two_sided_exponential() {
        let spec = QuadratureSpec::default();
        let r = integrate_line(|p| c((-2.0 * p.abs()).exp()), 2.0, &spec).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn odd_integrand_vanishes() {
        let spec = QuadratureSpec::default();
        let r = integrate_line(|p| c((-2.0 * (p * p + 1.0).sqrt()).exp() * p), 2.0, &spec).unwrap();
        assert!(r.value.norm() < 1e-14, "{r:?}");
    }

    #[test]
    fn line_rejects_bad_decay() {
        let spec = QuadratureSpec::default();
        assert!(matches!(
            integrate_line(|p| c(p), 0.0, &spec),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            integrate_line(|p| c(p), -1.0, &spec),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn window_covers_floor() {
        let spec = QuadratureSpec::default();
        let p = line_half_width(2.0, &spec);
        assert!(p >= ((1.0 / spec.absolute_floor).ln() + TRUNCATION_SAFETY) / 2.0 - 1e-12);
    }

    #[test]
    fn periodic_basics() {
        let spec = QuadratureSpec::default();
        let one = integrate_periodic(|_| c(1.0), 2.0 * PI, &spec).unwrap();
        assert!((one.value.re - 2.0 * PI).abs() < 1e-13);
        let cos = integrate_periodic(|p| c(p.cos()), 2.0 * PI, &spec).unwrap();
        assert!(cos.value.norm() < 1e-13);
        assert!(matches!(
            integrate_periodic(|_| c(1.0), 0.0, &spec),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn periodic_aliasing_is_not_mistaken_for_convergence() {
        let spec = QuadratureSpec::default();
        let r = integrate_periodic(|p| c((16.0 * p).cos()), 2.0 * PI, &spec).unwrap();
        assert!(r.value.norm() < 1e-12, "{r:?}");
    }

    #[test]
    fn mapped_line_handles_algebraic_tails() {
        let spec = QuadratureSpec::default();
        // ∫ dx / (1 + x²)² = π/2
        let r = integrate_mapped_line(|x| c(1.0 / (1.0 + x * x).powi(2)), 0.0, 1.0, &spec).unwrap();
        assert!((r.value.re - PI / 2.0).abs() < 1e-12);
        // ∫ x² / (1 + x²)² = π/2, tail ~ 1/x²
        let r = integrate_mapped_line(|x| c(x * x / (1.0 + x * x).powi(2)), 0.5, 2.0, &spec).unwrap();
        assert!((r.value.re - PI / 2.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn exhausted_budget_reports_nonconvergence() {
        let spec = QuadratureSpec {
            max_subdivisions: 8,
            ..QuadratureSpec::default()
        };
        let r = integrate_interval(|x| c((200.0 * x).sin() * (x * 30.0).cos()), 0.0, 50.0, &spec);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let spec = QuadratureSpec::default();
        let r = integrate_interval(|x| c(x), 1.0, 0.0, &spec).unwrap();
        assert!((r.value.re + 0.5).abs() < 1e-15);
    }
}
