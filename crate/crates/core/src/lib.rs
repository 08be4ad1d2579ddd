//! Topology-consistent vectorization of multi-class raster label masks
//! into planar polygonal partitions, plus the full evaluation metric
//! suite and a synthetic data generator.
//!
//! The pipeline: build an overdense planar straight-line graph (PSLG)
//! along label transitions, simplify it (vertex-guided or
//! Douglas-Peucker), trace faces, and label them from the mask. The
//! result is a labeled planar partition with shared edges and zero
//! gaps/overlaps by construction.

pub mod error;
pub mod geom;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod pslg;
pub mod raster;
pub mod simplify;
pub mod svg;
pub mod synth;
pub mod validate;

/// Concrete scalar used throughout the pipeline.
pub type Point64 = geom::Point<f64>;
pub type Point32 = geom::Point<f32>;
pub type Polyline64 = geom::Polyline<f64>;

pub use partition::{LabeledPolygon, Partition, Ring};
pub use raster::{Heatmap, LabelMask};
