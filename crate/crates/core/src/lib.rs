//! Non-isotropic persistent homology.
//!
//! Persistence of a point cloud is computed under a family of metrics that stretch space along a
//! probe direction. Death times of the stretched and original filtrations are matched by optimal
//! transport on the line, and the peak of the resulting multiplicative shifts is compared against
//! a closed-form model to recover the orientation, orientational variance and anisotropy of the
//! shapes in the data.

pub mod density;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod io;
pub mod network;
pub mod persistence;
pub mod pipeline;
pub mod plot;
pub mod synth;
pub mod transport;

pub use error::{NiphError, Result};
pub use fit::{FitConfig, FitResult, HomologyDim, PeakObservation};
pub use geometry::{DissimilarityMatrix, OutlierSpec, PointCloud, ProbeSpec};
pub use persistence::{PersistenceDiagram, PersistencePair, RipsConfig, WeightedDeaths, Weighting};
pub use pipeline::{run_niph, NiphConfig, NiphReport, ProbePlan};
