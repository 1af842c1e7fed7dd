//! Core algorithms for simulating few-shot class-incremental classification
//! with nearest-class-mean prototypes and inference-time prototype updates.
//!
//! The crate is `no_std` (alloc only); all IO, file formats, and the CLI
//! live in the companion `fscil-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod config;
pub mod dataset;
pub mod error;
pub mod exp2;
pub mod feature;
pub mod prototype;
pub mod protocol;
pub mod stats;
pub mod synth;

pub use config::{ClassId, ProtocolConfig, StrategyConfig, StrategyVariant};
pub use dataset::{LabeledSample, SessionDataset, ValidationReport};
pub use error::{Error, Result};
pub use exp2::{
    explore, exploit_update, beta_schedule, plan_updates, run_session_inference,
    ClassUpdate, ExplorationResult, InferenceOptions, UpdatePlan,
};
pub use feature::FeatureVector;
pub use prototype::{compute_prototype, cosine_similarity, PrototypeBank, PrototypeEntry};
pub use protocol::{
    incremental_accuracy, overall_accuracy, run_protocol, ProtocolOutcome, ProtocolReport,
    RunOptions, SessionReport,
};
pub use stats::{overlap_bound, std_normal_cdf};
pub use synth::{
    generate_dataset, measure_separation, monte_carlo_overlap, MeanPlacement, OverlapEstimate,
    OverlapQuery, Separation, SynthOutput, SynthSpec,
};
