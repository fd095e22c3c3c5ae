//! Radius-t proof-labeling schemes: a simulator for t-round local verification,
//! provers and verifiers for several schemes, and the generic scaling
//! constructions that trade verification radius for certificate size.

pub mod bits;
pub mod error;
pub mod graph;

pub use bits::BitString;
pub use error::{PlsError, Result};
pub use graph::LabeledGraph;
pub mod view;
pub mod engine;
pub mod toy;
pub mod tree_scaler;
pub mod uniform;
pub mod marks;
pub mod distance;
pub mod spanning;
pub mod catalog;

pub use engine::{CertificateMap, Scheme, SizeReport, Verdict};
pub use view::{extract_view, View};
