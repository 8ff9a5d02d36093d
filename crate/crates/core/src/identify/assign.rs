use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::grid::OccupancyGrid;
use super::IdentifyError;
use crate::frame::MacAddress;
use crate::simlab::GroundTruth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentMode {
    /// Each person independently takes their best candidate.
    DuplicatesAllowed,
    /// Greedy global matching; no MAC goes to two people.
    UniqueAssignments,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub mac: MacAddress,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentProposal {
    pub proposals: Vec<(String, Option<Proposal>)>,
    pub mode: AssignmentMode,
    pub threshold: Option<f64>,
}

impl AssignmentProposal {
    pub fn get(&self, name: &str) -> Option<&Proposal> {
        self.proposals.iter().find(|(n, _)| n == name).and_then(|(_, p)| p.as_ref())
    }

    pub fn assigned(&self) -> impl Iterator<Item = (&str, &Proposal)> {
        self.proposals.iter().filter_map(|(n, p)| p.as_ref().map(|p| (n.as_str(), p)))
    }
}

pub fn assign(grid: &OccupancyGrid, mode: AssignmentMode, threshold: Option<f64>) -> AssignmentProposal {
    let people = grid.people();
    let mut picks: Vec<Option<Proposal>> = vec![None; people.len()];
    match mode {
        AssignmentMode::DuplicatesAllowed => {
            for (i, pick) in picks.iter_mut().enumerate() {
                // candidates are kept in rank order
                *pick = grid.candidates(i).first().map(|&(mac, weight)| Proposal { mac, weight });
            }
        }
        AssignmentMode::UniqueAssignments => {
            let mut triples: Vec<(usize, MacAddress, f64)> = (0..people.len())
                .flat_map(|i| grid.candidates(i).iter().map(move |&(m, w)| (i, m, w)))
                .collect();
            triples.sort_unstable_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
            let mut used: HashSet<MacAddress> = HashSet::new();
            let mut remaining = people.len();
            for (i, mac, weight) in triples {
                if remaining == 0 {
                    break;
                }
                if picks[i].is_some() || used.contains(&mac) {
                    continue;
                }
                used.insert(mac);
                picks[i] = Some(Proposal { mac, weight });
                remaining -= 1;
            }
        }
    }
    if let Some(t) = threshold {
        for pick in picks.iter_mut() {
            if pick.is_some_and(|p| p.weight < t) {
                *pick = None;
            }
        }
    }
    AssignmentProposal { proposals: people.iter().cloned().zip(picks).collect(), mode, threshold }
}

/// Fraction of people whose proposed MAC is their true MAC.
pub fn score(proposal: &AssignmentProposal, truth: &GroundTruth) -> Result<f64, IdentifyError> {
    let names: HashSet<&str> = proposal.proposals.iter().map(|(n, _)| n.as_str()).collect();
    if names.len() != truth.len() || proposal.proposals.len() != truth.len() || truth.names().any(|n| !names.contains(n)) {
        return Err(IdentifyError::RosterMismatch);
    }
    let correct = proposal
        .proposals
        .iter()
        .filter(|(name, p)| p.is_some_and(|p| truth.mac_of(name) == Some(p.mac)))
        .count();
    Ok(correct as f64 / truth.len() as f64)
}
