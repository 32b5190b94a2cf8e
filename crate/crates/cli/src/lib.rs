//! Problem-file front end for the `hidvar` engine.

pub mod commands;
pub mod corpus;
pub mod error;
pub mod grid;
pub mod problem;
pub mod report;
