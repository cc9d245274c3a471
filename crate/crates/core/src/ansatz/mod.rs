//! Circuit IR and encoder builders.

pub mod builders;
pub mod circuit;
pub mod gate;

pub use builders::{arch_b_pairs, build_arch_a, build_arch_b, build_qcnn, conv_block, pool_block, ConvType, PoolKind};
pub use circuit::CircuitSpec;
pub use gate::{Binding, GateKind, GateOp, ShiftRule};
