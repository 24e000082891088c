//! Self-adaptive robust fission clustering.
//!
//! [`sarfc`] estimates the number of clusters with no tuning parameters. It
//! keeps the densest points (heat-diffusion kernel density and a two-piece
//! fit of the sorted density curve), splits them by robust fission at the
//! widest distance cracks, and finally hands every remaining point to its
//! nearest clustered neighbor.
//!
//! ```
//! use sarfc::data::{generate_synthetic, GeneratorKind, GeneratorParams};
//!
//! let params = GeneratorParams { n: Some(200), k: Some(2), seed: 7, ..Default::default() };
//! let ds = generate_synthetic(GeneratorKind::Blobs, &params).unwrap();
//! let report = sarfc::sarfc(&ds).unwrap();
//! assert_eq!(report.k(), 2);
//! ```

pub mod data;
pub mod dataset;
pub mod density;
pub mod distance;
pub mod error;
pub mod fission;
pub mod format;
pub mod metrics;
pub mod noise;
pub mod pipeline;

pub use dataset::{ClusterAssignment, Dataset};
pub use distance::{pairwise_distances, DistanceMode, DistanceView};
pub use error::{Error, Result, Warning};
pub use fission::{rfc, RfcOutcome};
pub use metrics::MetricsReport;
pub use pipeline::{sarfc, sarfc_with, PipelineReport, SarfcOptions};
