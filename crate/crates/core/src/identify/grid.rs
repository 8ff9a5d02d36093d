use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::IdentifyError;
use crate::frame::MacAddress;
use crate::simlab::LectureObservation;

pub const DEFAULT_CAP: usize = 32;

/// Weight changes for one (person, MAC) cell per observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateRule {
    pub both_present: f64,
    pub person_only: f64,
    pub mac_only: f64,
    pub both_absent: f64,
}

impl Default for UpdateRule {
    fn default() -> Self {
        UpdateRule { both_present: 1.0, person_only: -0.5, mac_only: -1.0, both_absent: 0.0 }
    }
}

impl UpdateRule {
    /// Requires `both_present > 0`, `both_absent == 0` and
    /// `mac_only < person_only < 0`.
    pub fn validate(&self) -> Result<(), IdentifyError> {
        let ok = self.both_present > 0.0
            && self.both_absent == 0.0
            && self.mac_only < self.person_only
            && self.person_only < 0.0;
        if ok {
            Ok(())
        } else {
            Err(IdentifyError::InvalidRule(*self))
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        UpdateRule {
            both_present: self.both_present * k,
            person_only: self.person_only * k,
            mac_only: self.mac_only * k,
            both_absent: self.both_absent * k,
        }
    }
}

/// Candidate ordering: heavier first, then smaller MAC.
pub(crate) fn rank(a: (&MacAddress, f64), b: (&MacAddress, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

/// Per-person candidate MAC weights.
///
/// MACs are discovered from observations; a MAC only becomes a candidate for
/// a person once the two have co-occurred. Each person keeps at most `cap`
/// candidates, stored in [`rank`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    people: Vec<String>,
    index: HashMap<String, usize>,
    candidates: Vec<Vec<(MacAddress, f64)>>,
    cap: usize,
    observations_seen: usize,
}

impl OccupancyGrid {
    pub fn new(roster: &[String], cap: usize) -> Result<Self, IdentifyError> {
        if roster.is_empty() {
            return Err(IdentifyError::EmptyRoster);
        }
        if cap == 0 {
            return Err(IdentifyError::ZeroCap);
        }
        let mut index = HashMap::with_capacity(roster.len());
        for (i, name) in roster.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(IdentifyError::DuplicateName(name.clone()));
            }
        }
        Ok(OccupancyGrid {
            people: roster.to_vec(),
            index,
            candidates: vec![Vec::new(); roster.len()],
            cap,
            observations_seen: 0,
        })
    }

    pub fn people(&self) -> &[String] {
        &self.people
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn observations_seen(&self) -> usize {
        self.observations_seen
    }

    /// Heaviest first; equal weights by ascending MAC.
    pub fn candidates(&self, person: usize) -> &[(MacAddress, f64)] {
        &self.candidates[person]
    }

    pub fn weight(&self, name: &str, mac: &MacAddress) -> Option<f64> {
        let &i = self.index.get(name)?;
        self.candidates[i].iter().find(|(m, _)| m == mac).map(|&(_, w)| w)
    }

    pub fn person_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Cost is O(d log d + people * cap) for d detected MACs.
    ///
    /// A person's existing candidates split into detected and undetected
    /// runs, each shifted by a single delta, so both stay in rank order and
    /// merge in linear time. MACs new to an attendee all enter at
    /// `both_present` and so rank among themselves by MAC; they are drawn
    /// from the sorted detection list only while slots remain. The result
    /// equals inserting every new MAC and then pruning to `cap`.
    pub fn observe(&mut self, obs: &LectureObservation, rule: &UpdateRule) -> Result<(), IdentifyError> {
        let mut attended = vec![false; self.people.len()];
        for name in &obs.attendees {
            let &i = self.index.get(name).ok_or_else(|| IdentifyError::UnknownAttendee(name.clone()))?;
            attended[i] = true;
        }
        let mut detected: Vec<MacAddress> = obs.detected_macs.clone();
        detected.sort_unstable();
        detected.dedup();

        let cap = self.cap;
        let mut hits: Vec<(MacAddress, f64)> = Vec::with_capacity(cap);
        let mut misses: Vec<(MacAddress, f64)> = Vec::with_capacity(cap);
        let mut hit_macs: Vec<MacAddress> = Vec::with_capacity(cap);
        let mut shifted: Vec<(MacAddress, f64)> = Vec::with_capacity(cap);
        let mut next: Vec<(MacAddress, f64)> = Vec::with_capacity(cap);
        for (person, cands) in self.candidates.iter_mut().enumerate() {
            let present = attended[person];
            let (on_hit, on_miss) =
                if present { (rule.both_present, rule.person_only) } else { (rule.mac_only, rule.both_absent) };
            hits.clear();
            misses.clear();
            for &(mac, w) in cands.iter() {
                if detected.binary_search(&mac).is_ok() {
                    hits.push((mac, w + on_hit));
                } else {
                    misses.push((mac, w + on_miss));
                }
            }
            next.clear();
            if present {
                hit_macs.clear();
                hit_macs.extend(hits.iter().map(|&(m, _)| m));
                hit_macs.sort_unstable();
                shifted.clear();
                merge_ranked(&mut shifted, cap, hits.iter().copied(), misses.iter().copied());
                let mut known = hit_macs.iter().copied().peekable();
                let fresh = detected
                    .iter()
                    .copied()
                    .filter(move |m| {
                        while known.next_if(|k| k < m).is_some() {}
                        known.next_if_eq(m).is_none()
                    })
                    .map(|m| (m, rule.both_present));
                merge_ranked(&mut next, cap, shifted.iter().copied(), fresh);
            } else {
                merge_ranked(&mut next, cap, hits.iter().copied(), misses.iter().copied());
            }
            std::mem::swap(cands, &mut next);
        }
        self.observations_seen += 1;
        Ok(())
    }
}

/// Merge two rank-ordered runs into `out`, stopping at `cap` entries.
fn merge_ranked(
    out: &mut Vec<(MacAddress, f64)>,
    cap: usize,
    a: impl Iterator<Item = (MacAddress, f64)>,
    b: impl Iterator<Item = (MacAddress, f64)>,
) {
    let mut a = a.peekable();
    let mut b = b.peekable();
    while out.len() < cap {
        let take_a = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => rank((&x.0, x.1), (&y.0, y.1)) != Ordering::Greater,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let item = if take_a { a.next() } else { b.next() };
        out.extend(item);
    }
}
