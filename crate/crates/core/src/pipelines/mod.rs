//! The two learned transceiver structures and their classical baselines,
//! evaluated under single-user, best-user allocation and multiuser
//! interference scenarios.

mod evaluate;
mod scenario;
mod slot;
mod train;

pub use evaluate::{evaluate_ser, Detector, SerCurve, SerPoint};
pub use scenario::{DetectorKind, ScenarioSpec, TrainConfig, UserMode};
pub use slot::{compose_slot, simulate_slot, SlotGeometry, SlotOutcome};
pub use train::{
    learned_constellation, normalize_backward, train_end_to_end, train_receiver_dnn, EndToEndModel,
    ReceiverModel,
};
