//! Simulated lecture experiments.
//!
//! Each person owns one device. Per lecture a person attends with
//! `attendance_prob`, and an attending person's device is detected with
//! `probe_prob`. Optional background noise MACs are drawn from a fixed pool
//! disjoint from the owned devices.
//!
//! Randomness comes from ChaCha8 seeded with `seed`, split into independent
//! streams: stream 0 draws the ground truth, stream 1 the noise pool, and
//! lecture `i` uses stream `i + 2`. Adding lectures never changes earlier
//! ones.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::frame::MacAddress;

const TRUTH_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;
const FIRST_LECTURE_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("{name} must be a probability in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("noise per lecture ({per_lecture}) exceeds noise pool size ({pool})")]
    NoiseExceedsPool { per_lecture: usize, pool: usize },
    #[error("experiment needs at least one person")]
    NoPeople,
    #[error("roster has {got} names but the config expects {expected}")]
    RosterSize { expected: usize, got: usize },
    #[error("duplicate name {0:?} in roster")]
    DuplicateNames(String),
    #[error("MAC {0} assigned to more than one person")]
    DuplicateMac(MacAddress),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub num_people: usize,
    pub num_lectures: usize,
    pub attendance_prob: f64,
    pub probe_prob: f64,
    #[serde(default)]
    pub noise_macs_per_lecture: usize,
    #[serde(default)]
    pub noise_pool_size: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(num_people: usize, num_lectures: usize, attendance_prob: f64, probe_prob: f64, seed: u64) -> Self {
        ExperimentConfig {
            num_people,
            num_lectures,
            attendance_prob,
            probe_prob,
            noise_macs_per_lecture: 0,
            noise_pool_size: 0,
            seed,
        }
    }

    pub fn with_noise(mut self, per_lecture: usize, pool: usize) -> Self {
        self.noise_macs_per_lecture = per_lecture;
        self.noise_pool_size = pool;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, value) in [("attendance_prob", self.attendance_prob), ("probe_prob", self.probe_prob)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SimError::InvalidProbability { name, value });
            }
        }
        if self.noise_macs_per_lecture > self.noise_pool_size {
            return Err(SimError::NoiseExceedsPool { per_lecture: self.noise_macs_per_lecture, pool: self.noise_pool_size });
        }
        if self.num_people == 0 {
            return Err(SimError::NoPeople);
        }
        Ok(())
    }

    fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// The generator used for lecture `index`.
    pub fn lecture_rng(&self, index: usize) -> ChaCha8Rng {
        self.stream(FIRST_LECTURE_STREAM + index as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub name: String,
    pub mac: MacAddress,
}

/// Hidden person-to-device mapping, in roster order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Assignment>", into = "Vec<Assignment>")]
pub struct GroundTruth {
    entries: Vec<Assignment>,
    by_name: HashMap<String, usize>,
}

impl GroundTruth {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, MacAddress)>) -> Result<Self, SimError> {
        let entries: Vec<Assignment> = pairs.into_iter().map(|(name, mac)| Assignment { name, mac }).collect();
        let mut by_name = HashMap::new();
        let mut macs = HashSet::new();
        for (i, a) in entries.iter().enumerate() {
            if by_name.insert(a.name.clone(), i).is_some() {
                return Err(SimError::DuplicateNames(a.name.clone()));
            }
            if !macs.insert(a.mac) {
                return Err(SimError::DuplicateMac(a.mac));
            }
        }
        Ok(GroundTruth { entries, by_name })
    }

    pub fn mac_of(&self, name: &str) -> Option<MacAddress> {
        self.by_name.get(name).map(|&i| self.entries[i].mac)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|a| a.name.as_str())
    }

    pub fn entries(&self) -> &[Assignment] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl TryFrom<Vec<Assignment>> for GroundTruth {
    type Error = SimError;

    fn try_from(entries: Vec<Assignment>) -> Result<Self, Self::Error> {
        GroundTruth::from_pairs(entries.into_iter().map(|a| (a.name, a.mac)))
    }
}

impl From<GroundTruth> for Vec<Assignment> {
    fn from(truth: GroundTruth) -> Self {
        truth.entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LectureObservation {
    pub index: usize,
    pub attendees: Vec<String>,
    pub detected_macs: Vec<MacAddress>,
}

/// Config, ground truth, noise pool and every observation of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: ExperimentConfig,
    pub ground_truth: GroundTruth,
    pub noise_pool: Vec<MacAddress>,
    pub observations: Vec<LectureObservation>,
}

impl Transcript {
    pub fn roster(&self) -> Vec<String> {
        self.ground_truth.names().map(str::to_string).collect()
    }
}

/// `Person 0001`, `Person 0002`, ...
pub fn default_roster(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("Person {i:04}")).collect()
}

/// Universally administered, unicast: both low bits of the first octet clear.
fn random_device_mac(rng: &mut impl RngCore) -> MacAddress {
    let mut octets = [0u8; 6];
    rng.fill_bytes(&mut octets);
    octets[0] &= 0xfc;
    MacAddress::new(octets)
}

fn distinct_macs(rng: &mut impl RngCore, n: usize, taken: &mut HashSet<MacAddress>) -> Vec<MacAddress> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mac = random_device_mac(rng);
        if taken.insert(mac) {
            out.push(mac);
        }
    }
    out
}

pub fn generate_ground_truth(config: &ExperimentConfig, roster: &[String]) -> Result<GroundTruth, SimError> {
    if roster.len() != config.num_people {
        return Err(SimError::RosterSize { expected: config.num_people, got: roster.len() });
    }
    let mut seen = HashSet::new();
    if let Some(dup) = roster.iter().find(|n| !seen.insert(n.as_str())) {
        return Err(SimError::DuplicateNames(dup.clone()));
    }
    let mut rng = config.stream(TRUTH_STREAM);
    let macs = distinct_macs(&mut rng, roster.len(), &mut HashSet::new());
    GroundTruth::from_pairs(roster.iter().cloned().zip(macs))
}

/// Pool of background MACs, disjoint from the truth.
pub fn generate_noise_pool(config: &ExperimentConfig, truth: &GroundTruth) -> Vec<MacAddress> {
    let mut rng = config.stream(NOISE_STREAM);
    let mut taken: HashSet<MacAddress> = truth.entries().iter().map(|a| a.mac).collect();
    let pool = distinct_macs(&mut rng, config.noise_pool_size, &mut taken);
    debug_assert!(pool.iter().all(|m| truth.entries().iter().all(|a| a.mac != *m)));
    pool
}

pub fn simulate_lecture(
    config: &ExperimentConfig,
    truth: &GroundTruth,
    noise_pool: &[MacAddress],
    index: usize,
    rng: &mut impl Rng,
) -> LectureObservation {
    let mut attendees = Vec::new();
    let mut detected_macs = Vec::new();
    for a in truth.entries() {
        if rng.random_bool(config.attendance_prob) {
            attendees.push(a.name.clone());
            if rng.random_bool(config.probe_prob) {
                detected_macs.push(a.mac);
            }
        }
    }
    let k = config.noise_macs_per_lecture.min(noise_pool.len());
    for i in rand::seq::index::sample(rng, noise_pool.len(), k) {
        detected_macs.push(noise_pool[i]);
    }
    detected_macs.shuffle(rng);
    LectureObservation { index, attendees, detected_macs }
}

pub fn run_experiment(config: &ExperimentConfig, roster: &[String]) -> Result<Transcript, SimError> {
    config.validate()?;
    let truth = generate_ground_truth(config, roster)?;
    let noise_pool = generate_noise_pool(config, &truth);
    let observations = (0..config.num_lectures)
        .map(|i| simulate_lecture(config, &truth, &noise_pool, i, &mut config.lecture_rng(i)))
        .collect();
    Ok(Transcript { config: config.clone(), ground_truth: truth, noise_pool, observations })
}
