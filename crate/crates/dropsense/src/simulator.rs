//! Synthetic drop-trace generator with ground-truth phase boundaries.
//!
//! Each simulated recording follows the phases of a real phone drop: a held
//! phase near gravity, free fall near zero, an impact burst whose amplitude
//! scales with impact speed and surface hardness, optional bounces separated
//! by short weightless gaps, and a rest phase near gravity. The five
//! material presets are engineering fixtures tuned for a monotone hardness
//! ordering, not physical claims about real surfaces.
//!
//! Determinism: a scenario's seed fully determines its trace. Grid
//! generation derives one seed per (condition, repetition) with a mixing
//! function, so the collection does not depend on generation order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{AccelTrace, STANDARD_GRAVITY};

/// Material names indexed by class label.
pub const MATERIAL_NAMES: [&str; 5] = ["quilt", "carpet", "asphalt", "granite", "marble"];

/// Drop heights of the standard test grid, meters.
pub const GRID_HEIGHTS_M: [f64; 4] = [0.4, 0.8, 1.2, 1.6];

/// A rebound slower than this does not produce another visible burst.
pub const MIN_BOUNCE_SPEED_MPS: f64 = 0.15;

/// Magnitude noise around gravity while the phone is held, m/s^2.
const HOLD_JITTER_SIGMA: f64 = 0.25;

/// Residual magnitude noise during free fall, m/s^2.
const FREE_FALL_NOISE_SIGMA: f64 = 0.08;

/// Magnitude noise around gravity once the phone has settled, m/s^2. Kept
/// well inside the default rest band so rest detection is reliable.
const REST_JITTER_SIGMA: f64 = 0.1;

/// Per-sample drift of the synthesized orientation vector.
const DIRECTION_WANDER_SIGMA: f64 = 0.02;

/// How the phone is oriented when it lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pose {
    Screen,
    Back,
    LongSide,
    ShortSide,
    Corner,
}

impl Pose {
    pub const ALL: [Pose; 5] = [
        Pose::Screen,
        Pose::Back,
        Pose::LongSide,
        Pose::ShortSide,
        Pose::Corner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pose::Screen => "screen",
            Pose::Back => "back",
            Pose::LongSide => "long-side",
            Pose::ShortSide => "short-side",
            Pose::Corner => "corner",
        }
    }

    pub fn index(self) -> usize {
        Pose::ALL.iter().position(|p| *p == self).unwrap()
    }

    /// Scales the impact amplitude. Smaller contact area (edges, corners)
    /// concentrates the impulse. The base factor stays above 1.25 so even
    /// the softest preset spikes are well clear of the touchdown threshold.
    fn amplitude_factor(self) -> f64 {
        match self {
            Pose::Screen => 1.25,
            Pose::Back => 1.35,
            Pose::LongSide => 1.45,
            Pose::ShortSide => 1.55,
            Pose::Corner => 1.65,
        }
    }

    /// Extra allowed bounces: corner and edge landings rattle longer.
    fn bounce_bonus(self) -> usize {
        match self {
            Pose::Screen | Pose::Back => 0,
            Pose::LongSide | Pose::ShortSide => 1,
            Pose::Corner => 2,
        }
    }
}

impl std::str::FromStr for Pose {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pose::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown pose `{s}`")))
    }
}

/// Surface response parameters of one ground material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub name: String,
    /// Class label, 0..5.
    pub label: usize,
    /// Rebound-to-impact speed ratio, in [0, 1).
    pub restitution: f64,
    /// Peak acceleration per unit impact speed, (m/s^2) / (m/s).
    pub impact_peak_scale: f64,
    /// Duration of one contact burst, seconds.
    pub contact_duration_s: f64,
    /// Bounces beyond which the burst train is truncated.
    pub max_bounces: usize,
    /// Gaussian magnitude noise during the impact region, m/s^2.
    pub noise_sigma: f64,
}

impl MaterialParams {
    /// The five standard presets, ordered by label (soft to hard).
    pub fn presets() -> Vec<MaterialParams> {
        let table: [(usize, f64, f64, f64, usize, f64); 5] = [
            (0, 0.05, 8.0, 0.060, 1, 0.3),
            (1, 0.15, 20.0, 0.035, 1, 0.3),
            (2, 0.35, 45.0, 0.012, 2, 0.4),
            (3, 0.50, 65.0, 0.006, 2, 0.4),
            (4, 0.55, 75.0, 0.005, 3, 0.4),
        ];
        table
            .into_iter()
            .map(
                |(label, restitution, scale, contact, bounces, noise)| MaterialParams {
                    name: MATERIAL_NAMES[label].to_string(),
                    label,
                    restitution,
                    impact_peak_scale: scale,
                    contact_duration_s: contact,
                    max_bounces: bounces,
                    noise_sigma: noise,
                },
            )
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::InvalidConfig("material name is empty".into()));
        }
        if self.label >= MATERIAL_NAMES.len() {
            return Err(Error::InvalidConfig(format!(
                "material label {} out of range 0..{}",
                self.label,
                MATERIAL_NAMES.len()
            )));
        }
        if !(self.restitution.is_finite() && (0.0..1.0).contains(&self.restitution)) {
            return Err(Error::InvalidConfig(format!(
                "restitution must be in [0, 1), got {}",
                self.restitution
            )));
        }
        for (what, value) in [
            ("impact_peak_scale", self.impact_peak_scale),
            ("contact_duration_s", self.contact_duration_s),
            ("noise_sigma", self.noise_sigma),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{what} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Validates a full material set: exactly one entry per class label.
pub fn validate_material_set(materials: &[MaterialParams]) -> Result<()> {
    if materials.len() != MATERIAL_NAMES.len() {
        return Err(Error::InvalidConfig(format!(
            "expected {} materials, got {}",
            MATERIAL_NAMES.len(),
            materials.len()
        )));
    }
    let mut seen = [false; 5];
    for m in materials {
        m.validate()?;
        if seen[m.label] {
            return Err(Error::InvalidConfig(format!(
                "duplicate material label {}",
                m.label
            )));
        }
        seen[m.label] = true;
    }
    Ok(())
}

/// One drop to simulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropScenario {
    pub height_m: f64,
    pub pose: Pose,
    pub material: MaterialParams,
    pub seed: u64,
    pub sample_rate_hz: f64,
    /// Held phase before release, seconds (at least 0.5).
    pub pre_hold_s: f64,
    /// Settled phase after the impact, seconds (at least 0.5).
    pub post_rest_s: f64,
}

impl DropScenario {
    /// A scenario with standard padding at 100 Hz.
    pub fn new(height_m: f64, pose: Pose, material: MaterialParams, seed: u64) -> Self {
        DropScenario {
            height_m,
            pose,
            material,
            seed,
            sample_rate_hz: 100.0,
            pre_hold_s: 1.0,
            post_rest_s: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.height_m.is_finite() && self.height_m > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "height must be positive, got {} m",
                self.height_m
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "sample rate must be positive, got {} Hz",
                self.sample_rate_hz
            )));
        }
        // Segmentation needs a stable region on both sides of the fall.
        for (what, value) in [
            ("pre_hold_s", self.pre_hold_s),
            ("post_rest_s", self.post_rest_s),
        ] {
            if !(value.is_finite() && value >= 0.5) {
                return Err(Error::InvalidScenario(format!(
                    "{what} must be at least 0.5 s, got {value}"
                )));
            }
        }
        self.material.validate()
    }
}

/// True phase boundaries of a simulated trace, for fidelity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// First free-fall sample.
    pub weightless_start: usize,
    /// First contact sample.
    pub impact: usize,
    /// First settled sample after the burst train.
    pub rest: usize,
    /// Speed at first contact, m/s.
    pub impact_speed_mps: f64,
    /// Number of rebounds that produced a visible burst.
    pub bounce_count: usize,
}

/// One grid-generated drop: identifier, inputs, trace, and ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDrop {
    pub trace_id: String,
    pub scenario: DropScenario,
    pub trace: AccelTrace,
    pub truth: GroundTruth,
}

/// Normalized burst shape over `n` samples: a two-sample rise to the peak
/// followed by an exponential tail down to 0.15. The sub-peak leading sample
/// matters: it is the one that trips the touchdown threshold, which keeps
/// the apex an interior sample of the cut segment.
fn contact_profile(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        2 => vec![0.8, 1.0],
        _ => {
            let mut profile = vec![0.8, 1.0];
            let ratio = 0.15f64.powf(1.0 / (n - 2) as f64);
            let mut level = 1.0;
            for _ in 2..n {
                level *= ratio;
                profile.push(level);
            }
            profile
        }
    }
}

/// Generates the trace and ground truth for one scenario.
pub fn simulate(scenario: &DropScenario) -> Result<(AccelTrace, GroundTruth)> {
    scenario.validate()?;
    let fs = scenario.sample_rate_hz;
    let g = STANDARD_GRAVITY;
    let material = &scenario.material;
    let mut rng = ChaCha20Rng::seed_from_u64(scenario.seed);
    let unit_normal: Normal<f64> = Normal::new(0.0, 1.0).expect("valid");

    // Slowly wandering unit vector that distributes the magnitude over the
    // three axes; the magnitude itself is what carries the signal.
    let mut direction = loop {
        let d = [
            unit_normal.sample(&mut rng),
            unit_normal.sample(&mut rng),
            unit_normal.sample(&mut rng),
        ];
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if norm > 1e-6 {
            break [d[0] / norm, d[1] / norm, d[2] / norm];
        }
    };

    let hold_n = ((scenario.pre_hold_s * fs).round() as usize).max(1);
    let fall_n = (((2.0 * scenario.height_m / g).sqrt() * fs).round() as usize).max(1);
    let contact_n = ((material.contact_duration_s * fs).round() as usize).max(1);
    let rest_n = ((scenario.post_rest_s * fs).round() as usize).max(1);
    let impact_speed = (2.0 * g * scenario.height_m).sqrt();

    let mut samples: Vec<[f64; 3]> = Vec::with_capacity(hold_n + fall_n + rest_n + 32);
    fn push_sample(
        samples: &mut Vec<[f64; 3]>,
        direction: &mut [f64; 3],
        rng: &mut ChaCha20Rng,
        unit_normal: Normal<f64>,
        magnitude: f64,
    ) {
        let d = [
            direction[0] + DIRECTION_WANDER_SIGMA * unit_normal.sample(rng),
            direction[1] + DIRECTION_WANDER_SIGMA * unit_normal.sample(rng),
            direction[2] + DIRECTION_WANDER_SIGMA * unit_normal.sample(rng),
        ];
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if norm > 1e-6 {
            *direction = [d[0] / norm, d[1] / norm, d[2] / norm];
        }
        let m = magnitude.max(0.0);
        samples.push([direction[0] * m, direction[1] * m, direction[2] * m]);
    }

    for _ in 0..hold_n {
        let m = g + HOLD_JITTER_SIGMA * unit_normal.sample(&mut rng);
        push_sample(&mut samples, &mut direction, &mut rng, unit_normal, m);
    }
    let weightless_start = hold_n;
    for _ in 0..fall_n {
        let m = (FREE_FALL_NOISE_SIGMA * unit_normal.sample(&mut rng)).abs();
        push_sample(&mut samples, &mut direction, &mut rng, unit_normal, m);
    }
    let impact = hold_n + fall_n;

    let profile = contact_profile(contact_n);
    let bounce_cap = material.max_bounces + scenario.pose.bounce_bonus();
    let mut speed = impact_speed;
    let mut bounce_count = 0usize;
    loop {
        let amplitude = material.impact_peak_scale * speed * scenario.pose.amplitude_factor();
        for &f in &profile {
            let m = amplitude * f + material.noise_sigma * unit_normal.sample(&mut rng);
            push_sample(&mut samples, &mut direction, &mut rng, unit_normal, m);
        }
        let rebound = material.restitution * speed;
        if bounce_count >= bounce_cap || rebound < MIN_BOUNCE_SPEED_MPS {
            break;
        }
        // Ballistic gap between bursts: weightless again for 2v/g seconds.
        let gap_n = ((2.0 * rebound / g * fs).round() as usize).max(1);
        for _ in 0..gap_n {
            let m = (material.noise_sigma * unit_normal.sample(&mut rng)).abs();
            push_sample(&mut samples, &mut direction, &mut rng, unit_normal, m);
        }
        bounce_count += 1;
        speed = rebound;
    }
    let rest = samples.len();

    for _ in 0..rest_n {
        let m = g + REST_JITTER_SIGMA * unit_normal.sample(&mut rng);
        push_sample(&mut samples, &mut direction, &mut rng, unit_normal, m);
    }

    let trace = AccelTrace::new(fs, samples)?;
    Ok((
        trace,
        GroundTruth {
            weightless_start,
            impact,
            rest,
            impact_speed_mps: impact_speed,
            bounce_count,
        },
    ))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a per-trace seed from the base seed, grid condition, and
/// repetition. Independent of iteration order.
fn derive_seed(base_seed: u64, condition: u64, rep: u64) -> u64 {
    let mut h = splitmix64(base_seed);
    h = splitmix64(h ^ condition);
    splitmix64(h ^ rep)
}

/// Canonical identifier of a grid cell repetition. Zero-padded so that
/// lexicographic order equals (label, height, pose, rep) order.
pub fn trace_id(label: usize, height_m: f64, pose: Pose, rep: usize) -> String {
    format!(
        "m{label}_h{:03}_p{}_r{rep:03}",
        (height_m * 100.0).round() as u32,
        pose.index()
    )
}

/// Generates the full test grid: every material, height, and pose, `reps`
/// times each. With the 5 standard materials that is 100 conditions.
pub fn generate_grid(
    materials: &[MaterialParams],
    reps: usize,
    base_seed: u64,
) -> Result<Vec<SimulatedDrop>> {
    validate_material_set(materials)?;
    if reps == 0 {
        return Err(Error::InvalidArgument(
            "at least one repetition per condition is required".into(),
        ));
    }
    let mut by_label: Vec<&MaterialParams> = materials.iter().collect();
    by_label.sort_by_key(|m| m.label);

    let conditions_per_material = GRID_HEIGHTS_M.len() * Pose::ALL.len();
    let mut drops = Vec::with_capacity(materials.len() * conditions_per_material * reps);
    for material in by_label {
        for (h_idx, &height) in GRID_HEIGHTS_M.iter().enumerate() {
            for pose in Pose::ALL {
                let condition = (material.label * conditions_per_material
                    + h_idx * Pose::ALL.len()
                    + pose.index()) as u64;
                for rep in 0..reps {
                    let seed = derive_seed(base_seed, condition, rep as u64);
                    let scenario = DropScenario::new(height, pose, material.clone(), seed);
                    let (trace, truth) = simulate(&scenario)?;
                    drops.push(SimulatedDrop {
                        trace_id: trace_id(material.label, height, pose, rep),
                        scenario,
                        trace,
                        truth,
                    });
                }
            }
        }
    }
    Ok(drops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::{cut, SegmentationConfig};
    use crate::signal::magnitude;

    fn preset(label: usize) -> MaterialParams {
        MaterialParams::presets().into_iter().nth(label).unwrap()
    }

    #[test]
    fn presets_cover_all_labels_in_order() {
        let presets = MaterialParams::presets();
        validate_material_set(&presets).unwrap();
        for (i, m) in presets.iter().enumerate() {
            assert_eq!(m.label, i);
            assert_eq!(m.name, MATERIAL_NAMES[i]);
        }
        // Hardness ordering: peak scale rises, contact duration falls.
        for pair in presets.windows(2) {
            assert!(pair[1].impact_peak_scale > pair[0].impact_peak_scale);
            assert!(pair[1].contact_duration_s < pair[0].contact_duration_s);
        }
    }

    #[test]
    fn simulate_is_deterministic_in_seed() {
        let scenario = DropScenario::new(0.8, Pose::Back, preset(3), 77);
        let (trace_a, truth_a) = simulate(&scenario).unwrap();
        let (trace_b, truth_b) = simulate(&scenario).unwrap();
        assert_eq!(trace_a, trace_b);
        assert_eq!(truth_a, truth_b);
        let different = DropScenario {
            seed: 78,
            ..scenario
        };
        let (trace_c, _) = simulate(&different).unwrap();
        assert_ne!(trace_a, trace_c);
    }

    #[test]
    fn weightless_duration_matches_kinematics() {
        // sqrt(2 * 0.8 / g) is about 0.404 s; the sampled duration must be
        // within 10%.
        let scenario = DropScenario::new(0.8, Pose::Screen, preset(2), 5);
        let (_, truth) = simulate(&scenario).unwrap();
        let duration = (truth.impact - truth.weightless_start) as f64 / 100.0;
        let expected = (2.0 * 0.8 / STANDARD_GRAVITY).sqrt();
        assert!(
            (duration - expected).abs() / expected < 0.10,
            "duration {duration} vs {expected}"
        );
    }

    #[test]
    fn zero_restitution_gives_single_burst() {
        let material = MaterialParams {
            restitution: 0.0,
            ..preset(4)
        };
        let scenario = DropScenario::new(1.6, Pose::Corner, material.clone(), 9);
        let (_, truth) = simulate(&scenario).unwrap();
        assert_eq!(truth.bounce_count, 0);
        // Exactly one burst: rest begins right after the single contact.
        let contact_n = ((material.contact_duration_s * 100.0).round() as usize).max(1);
        assert_eq!(truth.rest, truth.impact + contact_n);
    }

    #[test]
    fn harder_material_spikes_higher() {
        let quilt = DropScenario::new(0.8, Pose::Screen, preset(0), 31);
        let marble = DropScenario::new(0.8, Pose::Screen, preset(4), 31);
        let (t_quilt, _) = simulate(&quilt).unwrap();
        let (t_marble, _) = simulate(&marble).unwrap();
        let max_of = |t: &AccelTrace| {
            magnitude(t)
                .values()
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        };
        assert!(max_of(&t_marble) > max_of(&t_quilt));
    }

    #[test]
    fn ground_truth_indices_are_ordered_and_speed_is_kinematic() {
        for label in 0..5 {
            for (i, &height) in GRID_HEIGHTS_M.iter().enumerate() {
                let scenario =
                    DropScenario::new(height, Pose::ALL[i % 5], preset(label), 1000 + label as u64);
                let (trace, truth) = simulate(&scenario).unwrap();
                assert!(truth.weightless_start < truth.impact);
                assert!(truth.impact < truth.rest);
                assert!(truth.rest < trace.len());
                let expected = (2.0 * STANDARD_GRAVITY * height).sqrt();
                assert!((truth.impact_speed_mps - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weightless_phase_is_quiet() {
        // Mean magnitude during free fall stays far below 0.25 * gravity on
        // every grid condition.
        let drops = generate_grid(&MaterialParams::presets(), 1, 123).unwrap();
        for drop in &drops {
            let mag = magnitude(&drop.trace);
            let window = &mag.values()[drop.truth.weightless_start..drop.truth.impact];
            let mean = window.iter().sum::<f64>() / window.len() as f64;
            assert!(
                mean < 0.25 * STANDARD_GRAVITY,
                "{}: weightless mean {mean}",
                drop.trace_id
            );
        }
    }

    #[test]
    fn segmentation_recovers_ground_truth_on_the_grid() {
        let cfg = SegmentationConfig::default();
        let drops = generate_grid(&MaterialParams::presets(), 1, 2024).unwrap();
        let mut hits = 0usize;
        for drop in &drops {
            let segment = cut(&drop.trace, &cfg).expect("segmentable");
            let dt_c = segment.touchdown.abs_diff(drop.truth.impact);
            let dt_w = segment.rest.abs_diff(drop.truth.rest);
            if dt_c <= 3 && dt_w <= 3 {
                hits += 1;
            }
        }
        assert!(
            hits * 100 >= drops.len() * 95,
            "only {hits}/{} within 3 samples",
            drops.len()
        );
    }

    #[test]
    fn grid_shape_and_ids() {
        let drops = generate_grid(&MaterialParams::presets(), 1, 7).unwrap();
        assert_eq!(drops.len(), 100);
        let mut per_material = [0usize; 5];
        for d in &drops {
            per_material[d.scenario.material.label] += 1;
        }
        assert_eq!(per_material, [20; 5]);
        // Unique ids, already in canonical lexicographic order.
        let ids: Vec<&str> = drops.iter().map(|d| d.trace_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(ids, sorted);
        assert_eq!(drops[0].trace_id, "m0_h040_p0_r000");
        assert_eq!(drops.last().unwrap().trace_id, "m4_h160_p4_r000");
    }

    #[test]
    fn grid_is_deterministic_and_reps_get_distinct_seeds() {
        let a = generate_grid(&MaterialParams::presets(), 2, 99).unwrap();
        let b = generate_grid(&MaterialParams::presets(), 2, 99).unwrap();
        assert_eq!(a.len(), 200);
        assert_eq!(a, b);
        assert_ne!(a[0].scenario.seed, a[1].scenario.seed);
        let c = generate_grid(&MaterialParams::presets(), 2, 100).unwrap();
        assert_ne!(a[0].scenario.seed, c[0].scenario.seed);
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let base = DropScenario::new(0.8, Pose::Screen, preset(0), 1);
        for mutate in [
            |s: &mut DropScenario| s.height_m = 0.0,
            |s: &mut DropScenario| s.height_m = -1.0,
            |s: &mut DropScenario| s.sample_rate_hz = 0.0,
            |s: &mut DropScenario| s.pre_hold_s = 0.2,
            |s: &mut DropScenario| s.post_rest_s = 0.4,
        ] {
            let mut s = base.clone();
            mutate(&mut s);
            assert!(matches!(simulate(&s), Err(Error::InvalidScenario(_))));
        }
    }

    #[test]
    fn material_set_validation_catches_duplicates_and_gaps() {
        let mut materials = MaterialParams::presets();
        materials[1].label = 0;
        assert!(matches!(
            validate_material_set(&materials),
            Err(Error::InvalidConfig(_))
        ));
        let four = &MaterialParams::presets()[..4];
        assert!(matches!(
            validate_material_set(four),
            Err(Error::InvalidConfig(_))
        ));
        let mut bad = MaterialParams::presets();
        bad[2].restitution = 1.0;
        assert!(matches!(
            validate_material_set(&bad),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn contact_profile_shapes() {
        assert_eq!(contact_profile(1), vec![1.0]);
        assert_eq!(contact_profile(2), vec![0.8, 1.0]);
        let p6 = contact_profile(6);
        assert_eq!(p6.len(), 6);
        assert_eq!(p6[1], 1.0);
        assert!((p6[5] - 0.15).abs() < 1e-12);
        // Strictly decreasing after the apex.
        for pair in p6[1..].windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn pose_parsing_round_trips() {
        for pose in Pose::ALL {
            assert_eq!(pose.name().parse::<Pose>().unwrap(), pose);
        }
        assert!("face-down".parse::<Pose>().is_err());
    }
}
