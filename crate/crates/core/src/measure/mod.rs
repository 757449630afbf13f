//! Measurement models on system ⊗ apparatus, Kraus operators and POVMs.

pub mod expansion;
pub mod model;
pub mod perturbed;
pub mod pointer;
pub mod povm;

pub use expansion::second_order_povm;
pub use model::{
    contemporaneous_model, projector_branch, sequential_model, single_ideal_unitary, JointScheme, MeasurementModel,
};
pub use perturbed::{ideal_single_measurement, perturbed_single_measurement};
pub use pointer::{pointer_sigma, PointerSpace};
pub use povm::{illegal_bound, illegal_element, illegal_outcomes, index_bits, is_legal_combination, Povm, PovmDocument};
