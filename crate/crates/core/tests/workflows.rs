use proptest::prelude::*;
use wavekit::boost::lorentz_boost_wavefunction;
use wavekit::moments::{moments_closed_form, moments_quadrature, uncertainty_bound};
use wavekit::packet::solve_parameters;
use wavekit::propagation::{density_grid, evolve_closed, evolve_quadrature};
use wavekit::{Dispersion, EvolutionMethod, MomentTargets, PacketParams, QuadratureSpec, Quantity, Width};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn solved_packet_hits_targets() {
    let d = Dispersion::relativistic(1.0).unwrap();
    let targets = MomentTargets { mean_velocity: 0.4, mean_position: 2.0, width: Width::DeltaX(0.8) };
    let p = solve_parameters(d, targets, &spec()).unwrap();
    let m = moments_quadrature(&p, &spec()).unwrap();
    assert!((m.mean_v() - 0.4).abs() < 1e-6);
    assert!((m.mean_x() - 2.0).abs() < 1e-9);
    assert!((m.delta_x() - 0.8).abs() < 1e-6);
}

#[test]
fn closed_evolution_at_t0_is_the_fourier_transform() {
    let p = PacketParams::make_minimal(Dispersion::non_relativistic(3.0).unwrap(), 1.0, 0.5, -0.5).unwrap();
    for x in [-2.0, 0.0, 0.5, 3.0] {
        let c = evolve_closed(&p, x, 0.0).unwrap();
        let q = evolve_quadrature(&p, x, 0.0, &spec()).unwrap().value;
        assert!((c - q).norm() < 1e-9);
    }
}

#[test]
fn grid_rows_are_independent_of_row_order() {
    let p = PacketParams::make_minimal(Dispersion::massless(), 1.0, 0.3, 0.0).unwrap();
    let xs: Vec<f64> = (-10..=10).map(f64::from).collect();
    let a = density_grid(&p, &xs, &[0.0, 1.0, 2.0], EvolutionMethod::Closed, &spec()).unwrap();
    let b = density_grid(&p, &xs, &[1.0], EvolutionMethod::Closed, &spec()).unwrap();
    assert_eq!(a.density[1], b.density[0]);
}

#[test]
fn boosted_packet_respects_the_bound() {
    let p = PacketParams::make_minimal(Dispersion::relativistic(2.0).unwrap(), 0.7, 0.2, 0.0).unwrap();
    let w = lorentz_boost_wavefunction(p, -0.8).unwrap();
    let m = moments_quadrature(&w, &spec()).unwrap();
    assert!(m.delta_x() * m.delta_v() >= uncertainty_bound(&w, &spec()).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn minimal_packets_saturate(alpha in 0.3f64..3.0, frac in -0.8f64..0.8, shift in -2.0f64..2.0, kind in 0usize..3) {
        let d = [
            Dispersion::non_relativistic(1.5).unwrap(),
            Dispersion::relativistic(0.7).unwrap(),
            Dispersion::massless(),
        ][kind];
        let p = PacketParams::make_minimal(d, alpha, frac * alpha, shift).unwrap();
        let m = moments_quadrature(&p, &spec()).unwrap();
        let bound = uncertainty_bound(&p, &spec()).unwrap();
        prop_assert!((m.delta_x() * m.delta_v() - bound).abs() < 1e-7);
        prop_assert!((m.mean_x() + shift).abs() < 1e-8);
    }

    #[test]
    fn closed_velocity_moments_match(alpha in 0.3f64..3.0, frac in -0.8f64..0.8) {
        let p = PacketParams::make_minimal(Dispersion::relativistic(1.0).unwrap(), alpha, frac * alpha, 0.0).unwrap();
        let c = moments_closed_form(&p, &spec()).unwrap();
        let q = moments_quadrature(&p, &spec()).unwrap();
        for quantity in [Quantity::MeanV, Quantity::MeanV2, Quantity::MeanX2] {
            let (a, b) = (c.require(quantity).unwrap(), q.require(quantity).unwrap());
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()) + 1e-12);
        }
    }
}
