//! Dataset manifest model and stratified train/val/test splitting.
//!
//! Splits are stratified per class label so every material keeps the same
//! proportions in each partition. Two modes exist: the default 7:1:2 ratio
//! (per class: a fifth to test, a tenth to val, the remainder to train) and
//! explicit totals, which are apportioned across classes by the largest
//! remainder method so the per-class counts add up exactly.

use std::collections::HashSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{GroundTruth, Pose, MATERIAL_NAMES};

/// Fewest records per class for a split to be meaningful: below this the
/// 7:1:2 ratio would leave a partition empty.
pub const MIN_RECORDS_PER_CLASS: usize = 10;

/// Partition assignment of one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// Explicit partition totals, summing to the dataset size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl SplitCounts {
    pub fn total(self) -> usize {
        self.train + self.val + self.test
    }
}

/// One trace in a dataset manifest. `file` is relative to the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub trace_id: String,
    pub file: PathBuf,
    pub label: usize,
    pub material: String,
    pub height_m: f64,
    pub pose: Pose,
    pub seed: u64,
    pub truth: GroundTruth,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

/// A collection of simulated traces plus their metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub records: Vec<ManifestRecord>,
}

/// Manifest schema version written by this crate.
pub const MANIFEST_FORMAT_VERSION: u32 = 1;

impl DatasetManifest {
    pub fn new(records: Vec<ManifestRecord>) -> Self {
        DatasetManifest {
            format_version: MANIFEST_FORMAT_VERSION,
            records,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::with_capacity(self.records.len());
        for record in &self.records {
            if record.label >= MATERIAL_NAMES.len() {
                return Err(Error::InvalidDataset(format!(
                    "record {} has label {} out of range 0..{}",
                    record.trace_id,
                    record.label,
                    MATERIAL_NAMES.len()
                )));
            }
            if !ids.insert(record.trace_id.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate trace id {}",
                    record.trace_id
                )));
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.label).collect()
    }

    /// Assigns every record a split, stratified by label.
    pub fn assign_splits(&mut self, counts: Option<SplitCounts>, seed: u64) -> Result<()> {
        let splits = stratified_split(&self.labels(), counts, seed)?;
        for (record, split) in self.records.iter_mut().zip(splits) {
            record.split = Some(split);
        }
        Ok(())
    }
}

/// Number of records per class label.
pub fn class_counts(labels: &[usize]) -> Result<[usize; 5]> {
    let mut counts = [0usize; 5];
    for &label in labels {
        if label >= counts.len() {
            return Err(Error::InvalidDataset(format!(
                "label {label} out of range 0..{}",
                counts.len()
            )));
        }
        counts[label] += 1;
    }
    Ok(counts)
}

/// Apportions `total` across classes proportionally to their sizes, using
/// largest remainders (ties broken toward the lower label). Exact integer
/// arithmetic, so the result always sums to `total`.
fn apportion(total: usize, sizes: &[usize; 5]) -> [usize; 5] {
    let population: u128 = sizes.iter().map(|&n| n as u128).sum();
    let mut shares = [0usize; 5];
    let mut remainders: Vec<(u128, usize)> = Vec::with_capacity(5);
    let mut assigned = 0usize;
    for (label, &size) in sizes.iter().enumerate() {
        let numerator = total as u128 * size as u128;
        shares[label] = (numerator / population) as usize;
        assigned += shares[label];
        remainders.push((numerator % population, label));
    }
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, label) in remainders.iter().take(total - assigned) {
        shares[label] += 1;
    }
    shares
}

/// Computes per-class (train, val, test) sizes for the requested mode.
fn per_class_quotas(
    sizes: &[usize; 5],
    counts: Option<SplitCounts>,
) -> Result<[(usize, usize, usize); 5]> {
    let mut quotas = [(0usize, 0usize, 0usize); 5];
    match counts {
        None => {
            // 7:1:2 by construction: a fifth to test, a tenth to val,
            // everything else (including rounding leftovers) to train.
            for (label, &n) in sizes.iter().enumerate() {
                let test = n / 5;
                let val = n / 10;
                quotas[label] = (n - test - val, val, test);
            }
        }
        Some(counts) => {
            let total: usize = sizes.iter().sum();
            if counts.total() != total {
                return Err(Error::InvalidDataset(format!(
                    "split counts sum to {}, dataset has {total} records",
                    counts.total()
                )));
            }
            let train = apportion(counts.train, sizes);
            let val = apportion(counts.val, sizes);
            for (label, &n) in sizes.iter().enumerate() {
                let reserved = train[label] + val[label];
                if reserved > n {
                    return Err(Error::InvalidDataset(format!(
                        "class {label} has {n} records but the requested counts \
                         need {reserved} for train and val alone",
                    )));
                }
                quotas[label] = (train[label], val[label], n - reserved);
            }
        }
    }
    Ok(quotas)
}

/// Assigns a split to every label, stratified per class.
///
/// Every class must appear at least [`MIN_RECORDS_PER_CLASS`] times. Within
/// a class, membership is decided by a seeded shuffle; the same seed always
/// yields the same assignment.
pub fn stratified_split(
    labels: &[usize],
    counts: Option<SplitCounts>,
    seed: u64,
) -> Result<Vec<Split>> {
    let sizes = class_counts(labels)?;
    for (label, &n) in sizes.iter().enumerate() {
        if n < MIN_RECORDS_PER_CLASS {
            return Err(Error::InvalidDataset(format!(
                "class {label} has {n} records; at least {MIN_RECORDS_PER_CLASS} \
                 per class are required to split"
            )));
        }
    }
    let quotas = per_class_quotas(&sizes, counts)?;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut assignment = vec![Split::Train; labels.len()];
    for (class, &(train, val, _test)) in quotas.iter().enumerate() {
        let mut indices: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        indices.shuffle(&mut rng);
        for (rank, index) in indices.into_iter().enumerate() {
            assignment[index] = if rank < train {
                Split::Train
            } else if rank < train + val {
                Split::Val
            } else {
                Split::Test
            };
        }
    }
    Ok(assignment)
}
