//! Clustering-based UAV position estimation over multi-LiDAR point clouds.
//!
//! The pipeline removes static environment zones from LiDAR 360 frames,
//! groups what is left with DBSCAN and takes the mean of the largest
//! cluster as the drone position. Livox Avia frames back it up, and a
//! fixed training-set average covers timestamps with no usable data.
//!
//! ```
//! use cldet::estimation::estimate_pose;
//! use cldet::model::{PipelineConfig, Sequence, Timestamp, DEFAULT_FALLBACK};
//!
//! let empty = Sequence::new("s", vec![], vec![], None).unwrap();
//! let est = estimate_pose(&empty, Timestamp(0), &PipelineConfig::default());
//! assert_eq!(est.position(), DEFAULT_FALLBACK);
//! ```

pub mod classification;
pub mod cli;
pub mod clustering;
pub mod dataio;
pub mod error;
pub mod estimation;
pub mod evaluation;
pub mod model;
pub mod synthgen;

pub use error::{Error, Result};
pub use model::{Point3, PoseEstimate, Sequence, Timestamp};
