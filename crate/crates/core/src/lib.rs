//! Second-quantization toolkit on small lattices.
//!
//! * [`fock`]: occupation-number Fock space with bosonic and fermionic
//!   ladder operators.
//! * [`wick`]: symbolic normal ordering of ladder-operator strings.
//! * [`field`]: 1-D lattice, position/momentum duality, field-operator state
//!   preparation, coherent states and the relativistic field commutator.
//! * [`dynamics`]: one-particle observables and exact free evolution.
//! * [`quantum_info`]: bipartite states, entanglement, pointer-basis
//!   decoherence and seeded outcome sampling.
//!
//! Numeric types are generic over [`scalar::Real`]; the `*64` aliases below
//! fix the scalar to `f64`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod field;
pub mod fock;
pub mod quantum_info;
pub mod report;
pub mod scalar;
pub mod wick;

pub use error::{Error, Result};
pub use fock::{LadderKind, LadderOp, ModeSpace, NumberOperator, OccupationState, PairState, Statistics};

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type C64 = num_complex::Complex<f64>;
pub type FockVector64 = fock::FockVector<f64>;
pub type LatticeSpec64 = field::LatticeSpec<f64>;
pub type WaveAmplitude64 = field::WaveAmplitude<f64>;
pub type MomentumAmplitude64 = field::MomentumAmplitude<f64>;
pub type ObservableSet64 = dynamics::ObservableSet<f64>;
pub type TrajectoryRecord64 = dynamics::TrajectoryRecord<f64>;
pub type BipartiteState64 = quantum_info::BipartiteState<f64>;
pub type DensityMatrix64 = quantum_info::DensityMatrix<f64>;
