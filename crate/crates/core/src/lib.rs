//! Minimal position-velocity uncertainty wave packets.
//!
//! A packet `Φ(p) = A exp(-α E(p) + β p)` saturates `Δx Δv ≥ ½|⟨∂²E/∂p²⟩|` for any
//! dispersion relation `E(p)`. This crate builds such packets for the
//! non-relativistic, lattice, relativistic and massless dispersions, evaluates
//! their moments in closed form and by quadrature, evolves them in time through
//! the analytically continued Green's function, boosts them, and follows them
//! through an expanding (FRW) background.
//!
//! Units: `ħ = c = 1`. Momentum-space inner products use `(1/2π)∫dp`.

pub mod boost;
pub mod checks;
pub mod cosmology;
pub mod dispersion;
pub mod figures;
pub mod error;
pub mod moments;
pub mod numerics;
pub mod packet;
pub mod propagation;

pub use num_complex::Complex64;

pub use boost::{BoostParams, BoostedExpectations, BoostedWave};
pub use cosmology::{ComovingTrace, ScaleFactorModel};
pub use dispersion::{Dispersion, DispersionKind, DispersionPoint, MomentumDomain};
pub use error::{Error, Result};
pub use moments::{MomentSet, Provenance, Quantity};
pub use numerics::{ComplexAmplitude, QuadratureSpec};
pub use packet::{MomentTargets, MomentumWave, PacketParams, Support, Width};
pub use propagation::{DensityGrid, EvolutionMethod};
