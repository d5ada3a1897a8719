//! Exact state-transition networks of the Logistic map in n-bit fixed-point
//! arithmetic, with functional-graph analysis, in-degree statistics,
//! exhaustive claim checking and DOT/GraphML/CSV/JSON exports.

pub mod claims;
pub mod degree;
pub mod error;
pub mod export;
pub mod fixed_point;
pub mod network;
pub mod report;

pub use error::{Error, Result};
pub use fixed_point::{
    exact_value, logistic_step, quantize, ControlParameter, ExactRatio, LogisticMap, Precision,
    QuantizationMode,
};
pub use network::{
    build_network, find_cycles, in_degrees, summarize, tail_length, weak_components, Analysis,
    ComponentInfo, NetworkSummary, StateNetwork,
};
