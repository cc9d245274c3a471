//! Losses, gradients and the SGD loop.

pub mod gradient;
pub mod loss;
pub mod observable;
pub mod reconstruct;
pub mod train;

pub use gradient::{expectation_gradient, GradientMethod};
pub use loss::{bce_loss, mse_loss, LossKind, BCE_EPS};
pub use reconstruct::{
    decoder_for, reconstruction_loss, reconstruction_overlap, reconstruction_overlap_ancilla,
};
pub use train::{
    batch_value_and_grad, init_params, train, train_objective, trash_probs, Architecture, Mode,
    ReconstructionObjective, SampleObjective, SampleSource, TrainConfig, TrainReport, TrashObjective,
};
