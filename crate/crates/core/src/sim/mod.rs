//! Exact statevector and density-matrix simulation.

pub mod density;
pub mod gates;
pub mod state;

pub use density::{fidelity, trace_distance, DensityMatrix};
pub use state::{Axis, QubitIndex, StateVector, MAX_QUBITS};
