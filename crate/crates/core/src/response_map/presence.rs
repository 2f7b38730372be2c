use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Default window length for presence inference.
pub const DEFAULT_WINDOW: usize = 5;
/// Default positive fraction for presence inference.
pub const DEFAULT_BETA: f64 = 0.6;

/// Sliding window of binary presence observations, most recent last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresenceHistory {
    window: VecDeque<bool>,
    capacity: usize,
}

impl PresenceHistory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "presence window must hold at least one entry");
        Self {
            window: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    /// Builds a history from the given entries; the oldest are dropped when
    /// more than `capacity` are supplied.
    pub fn from_slice(capacity: usize, entries: &[bool]) -> Self {
        let mut h = Self::new(capacity);
        for &e in entries {
            h.push(e);
        }
        h
    }

    pub fn push(&mut self, observed: bool) {
        if self.window.len() == self.capacity {
            self.window.pop_front();
        }
        self.window.push_back(observed);
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn last(&self) -> Option<bool> {
        self.window.back().copied()
    }

    pub fn positives(&self) -> usize {
        self.window.iter().filter(|&&b| b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.window.iter().copied()
    }
}

/// Presence rule over a window of past observations.
///
/// Present when the most recent observation is positive, or when positives
/// make up at least `beta` of the window length `l`. A short history is
/// padded with leading negatives, so the denominator is always `l`.
pub fn infer_state(history: &PresenceHistory, l: usize, beta: f64) -> Result<bool> {
    if history.is_empty() {
        return Err(Error::domain("presence history is empty"));
    }
    if l == 0 || history.len() > l {
        return Err(Error::domain(format!(
            "history of length {} does not fit window {l}",
            history.len()
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain(format!("beta must lie in (0,1], got {beta}")));
    }
    let last = history.last() == Some(true);
    Ok(last || history.positives() as f64 / l as f64 >= beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn infer(bits: &[u8]) -> bool {
        let entries: Vec<bool> = bits.iter().map(|&b| b == 1).collect();
        infer_state(&PresenceHistory::from_slice(5, &entries), 5, 0.6).unwrap()
    }

    #[test]
    fn rule_examples() {
        assert!(infer(&[1, 1, 1, 0, 0]));
        assert!(!infer(&[1, 0, 0, 0, 0]));
        assert!(!infer(&[0, 0, 0, 0, 0]));
        assert!(infer(&[0, 0, 0, 0, 1]));
    }

    #[test]
    fn short_history_counts_missing_as_negative() {
        // last entry positive
        assert!(infer(&[1, 1]));
        assert!(!infer(&[1, 1, 0]));
        assert!(infer(&[1, 1, 1, 0]));
    }

    #[test]
    fn empty_history_is_an_error() {
        assert!(infer_state(&PresenceHistory::new(5), 5, 0.6).is_err());
    }

    #[test]
    fn window_drops_oldest() {
        let h = PresenceHistory::from_slice(3, &[true, false, false, true]);
        assert_eq!(h.iter().collect::<Vec<_>>(), vec![false, false, true]);
    }

    #[test]
    fn monotone_in_every_bit() {
        for mask in 0u32..32 {
            let bits: Vec<bool> = (0..5).map(|i| mask >> i & 1 == 1).collect();
            let base = infer_state(&PresenceHistory::from_slice(5, &bits), 5, 0.6).unwrap();
            for i in 0..5 {
                let mut flipped = bits.clone();
                flipped[i] = true;
                let up = infer_state(&PresenceHistory::from_slice(5, &flipped), 5, 0.6).unwrap();
                assert!(!base || up, "mask {mask:05b} bit {i}");
            }
        }
    }
}
