//! Numerical laboratory for spectral gaps of finite tuples in SU(2).
//!
//! The averaging operator `φ₁ + φ₁⁻¹ + … + φₙ + φₙ⁻¹` acting on `L²₀(SU(2))`
//! splits into finite blocks, one per irreducible level `k = 1, 2, …`. This
//! crate builds those blocks, estimates the top nontrivial eigenvalue `λ₁`
//! by sweeping levels, computes the min-max gap functional with certified
//! bounds, and drives Monte Carlo experiments over Haar-random tuples and
//! their orbits under Nielsen moves.

pub mod charvar;
pub mod eigen;
pub mod error;
pub mod group;
pub mod irreps;
pub mod lab;
pub mod nielsen;
pub mod real;
pub mod registry;
pub mod seed;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use group::{ConjClass, GroupElement, Tuple, Word};
pub use irreps::{IrrepLevel, RepMatrix};
pub use nielsen::{MoveSequence, NielsenMove};
pub use spectral::{AveragingOperator, LevelGap, SpectralReport};



/// Version string stamped into run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
