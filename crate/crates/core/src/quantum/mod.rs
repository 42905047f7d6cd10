//! Dense complex linear algebra for small quantum systems.

pub mod density;
pub mod evolve;
pub mod state;

pub use density::{bell, concurrence, fidelity, partial_trace, DensityMatrix};
pub use evolve::{evolve, evolve_rk4, evolve_series, evolve_with, expm, propagator, EvolutionMethod};
pub use state::{tensor_product, tensor_product_with_limit, ComplexAmp, Operator, StateVector, TensorProduct};
