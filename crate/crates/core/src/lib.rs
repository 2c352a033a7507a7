//! Deterministic radio ray tracing between a transmitter (BS) and
//! receivers (UE): candidate enumeration over a visibility graph, path
//! solving by the image method or by residual minimization, validation,
//! and GO/UTD field evaluation.

pub mod em;
pub mod image_method;
pub mod mpt;
pub mod output;
pub mod pipeline;
pub mod scenarios;
pub mod scene;
pub mod validation;
pub mod visibility;
