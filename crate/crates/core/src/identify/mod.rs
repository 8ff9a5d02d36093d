//! Occupancy-grid identification of people by co-occurring MACs.
//!
//! Each (person, MAC) cell carries a weight. Per observation a cell moves by
//! one of four deltas depending on whether the person attended and whether
//! the MAC was detected:
//!
//! | | person present | person absent |
//! |---|---|---|
//! | MAC detected | `both_present` (+) | `mac_only` (strongly -) |
//! | MAC not detected | `person_only` (-) | `both_absent` (0) |
//!
//! After each observation every person retains at most `cap` candidates.

mod assign;
mod grid;
mod regression;

use serde::{Deserialize, Serialize};

pub use assign::{assign, score, AssignmentMode, AssignmentProposal, Proposal};
pub use grid::{OccupancyGrid, UpdateRule, DEFAULT_CAP};
pub use regression::{fit_regression, RegressionError, RegressionSample, RegressionSummary, REGRESSORS};

use crate::simlab::Transcript;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentifyError {
    #[error("roster is empty")]
    EmptyRoster,
    #[error("candidate cap must be at least 1")]
    ZeroCap,
    #[error("duplicate name {0:?} in roster")]
    DuplicateName(String),
    #[error("attendee {0:?} is not on the roster")]
    UnknownAttendee(String),
    #[error("proposal roster does not match the ground truth roster")]
    RosterMismatch,
    #[error("update rule {0:?} violates present > 0 = both-absent > person-only > mac-only")]
    InvalidRule(UpdateRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentifyParams {
    pub rule: UpdateRule,
    pub mode: AssignmentMode,
    pub cap: usize,
    pub threshold: Option<f64>,
}

impl Default for IdentifyParams {
    fn default() -> Self {
        IdentifyParams { rule: UpdateRule::default(), mode: AssignmentMode::DuplicatesAllowed, cap: DEFAULT_CAP, threshold: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationRun {
    /// Accuracy after each observation.
    pub accuracy: Vec<f64>,
    pub final_proposal: AssignmentProposal,
    pub grid: OccupancyGrid,
}

/// Observe, assign and score after every lecture of a transcript.
pub fn run_identification(transcript: &Transcript, params: &IdentifyParams) -> Result<IdentificationRun, IdentifyError> {
    params.rule.validate()?;
    let mut grid = OccupancyGrid::new(&transcript.roster(), params.cap)?;
    let mut accuracy = Vec::with_capacity(transcript.observations.len());
    let mut proposal = assign(&grid, params.mode, params.threshold);
    for obs in &transcript.observations {
        grid.observe(obs, &params.rule)?;
        proposal = assign(&grid, params.mode, params.threshold);
        accuracy.push(score(&proposal, &transcript.ground_truth)?);
    }
    Ok(IdentificationRun { accuracy, final_proposal: proposal, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simlab::{default_roster, run_experiment, ExperimentConfig};

    #[test]
    fn zero_lectures_gives_empty_series() {
        let t = run_experiment(&ExperimentConfig::new(5, 0, 0.7, 0.9, 1), &default_roster(5)).unwrap();
        let run = run_identification(&t, &IdentifyParams::default()).unwrap();
        assert!(run.accuracy.is_empty());
    }

    #[test]
    fn single_person_identified_immediately() {
        let t = run_experiment(&ExperimentConfig::new(1, 5, 1.0, 1.0, 3), &default_roster(1)).unwrap();
        let run = run_identification(&t, &IdentifyParams::default()).unwrap();
        assert_eq!(run.accuracy, vec![1.0; 5]);
    }

    #[test]
    fn rejects_invalid_rule() {
        let t = run_experiment(&ExperimentConfig::new(2, 1, 1.0, 1.0, 3), &default_roster(2)).unwrap();
        let params = IdentifyParams { rule: UpdateRule { both_absent: 0.1, ..UpdateRule::default() }, ..Default::default() };
        assert!(matches!(run_identification(&t, &params), Err(IdentifyError::InvalidRule(_))));
    }
}
