//! Ground material classification from phone-drop accelerometer traces.
//!
//! A dropped phone records a distinctive acceleration signature: gravity
//! while held, near zero during free fall, a sharp burst at impact whose
//! shape depends on the surface, and gravity again at rest. This crate
//! turns that signature into a material label in three stages:
//!
//! 1. [`segmentation`] finds the free-fall region, the touchdown sample,
//!    and the rest sample in a magnitude series, and cuts out the impact
//!    segment between touchdown and rest.
//! 2. [`features`] summarizes the segment as 25 time-domain statistics
//!    (amplitude moments, shape ratios, peak counts and widths, timing).
//! 3. [`mlp`] classifies the feature vector with a small fully connected
//!    network trained from scratch with mini-batch gradient descent.
//!
//! [`simulator`] generates labeled synthetic drops over a grid of heights,
//! poses, and materials; [`dataset`] assigns stratified train/val/test
//! splits; [`io`] defines the on-disk formats. Everything is deterministic
//! given the seeds, down to byte-identical output files.
//!
//! The `dropsense` binary wires these stages into a batch CLI.

pub mod dataset;
pub mod error;
pub mod features;
pub mod io;
pub mod mlp;
pub mod segmentation;
pub mod signal;
pub mod simulator;

pub use dataset::{stratified_split, DatasetManifest, ManifestRecord, Split, SplitCounts};
pub use error::{Error, Result};
pub use features::{
    detect_peaks, extract_features, features_from_segment, FeatureVector, PeakSet, FEATURE_COUNT,
    FEATURE_NAMES,
};
pub use mlp::{
    evaluate, forward, init_model, predict, train, Activation, ConfusionMatrix, LabeledSet,
    MlpModel, Prediction, TrainConfig, TrainReport, CLASS_COUNT,
};
pub use segmentation::{cut, cut_magnitude, DropSegment, SegmentationConfig};
pub use signal::{magnitude, AccelTrace, MagnitudeSeries, STANDARD_GRAVITY};
pub use simulator::{
    generate_grid, simulate, DropScenario, GroundTruth, MaterialParams, Pose, SimulatedDrop,
    GRID_HEIGHTS_M, MATERIAL_NAMES,
};
