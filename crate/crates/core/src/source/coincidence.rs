use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::SourceError;
use crate::rules::Bit;

/// One detector event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeTag {
    /// Detector channel, 1..=4. Channels 1 and 2 see photon 1, 3 and 4 see
    /// photon 2.
    pub channel: u8,
    /// Arrival time in nanoseconds.
    pub timestamp: u64,
}

impl TimeTag {
    pub fn new(channel: u8, timestamp: u64) -> Self {
        TimeTag { channel, timestamp }
    }

    /// Arrival time after delay correction.
    pub fn corrected(&self, config: &CoincidenceConfig) -> i64 {
        self.timestamp as i64 + config.delays[(self.channel - 1) as usize]
    }

    fn sort_key(&self, config: &CoincidenceConfig) -> (i64, u8, u64) {
        (self.corrected(config), self.channel, self.timestamp)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceConfig {
    /// Maximum separation of two tags forming a coincidence, in nanoseconds.
    pub window: i64,
    /// Per-channel offsets added to the raw timestamps.
    pub delays: [i64; 4],
}

impl Default for CoincidenceConfig {
    fn default() -> Self {
        CoincidenceConfig {
            window: 2,
            delays: [0; 4],
        }
    }
}

impl CoincidenceConfig {
    pub fn validate(&self) -> Result<(), SourceError> {
        if self.window <= 0 {
            return Err(SourceError::InvalidParams("coincidence window must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceCounts {
    pub n_hv: u64,
    pub n_vh: u64,
    pub n_hh: u64,
    pub n_vv: u64,
}

impl CoincidenceCounts {
    pub fn total(&self) -> u64 {
        self.n_hv + self.n_vh + self.n_hh + self.n_vv
    }

    pub fn record(&mut self, kind: PairKind) {
        match kind {
            PairKind::Hv => self.n_hv += 1,
            PairKind::Vh => self.n_vh += 1,
            PairKind::Hh => self.n_hh += 1,
            PairKind::Vv => self.n_vv += 1,
        }
    }
}

/// Which polarisation component a coincidence belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    /// Channels 2 and 4, read as `0`.
    Hv,
    /// Channels 1 and 3, read as `1`.
    Vh,
    /// Channels 1 and 4, discarded.
    Hh,
    /// Channels 2 and 3, discarded.
    Vv,
}

impl PairKind {
    pub fn from_channels(a: u8, b: u8) -> PairKind {
        let (first, second) = if a < b { (a, b) } else { (b, a) };
        match (first, second) {
            (2, 4) => PairKind::Hv,
            (1, 3) => PairKind::Vh,
            (1, 4) => PairKind::Hh,
            (2, 3) => PairKind::Vv,
            _ => unreachable!("channels {a} and {b} are not complementary"),
        }
    }

    pub fn bit(self) -> Option<Bit> {
        match self {
            PairKind::Hv => Some(Bit::Zero),
            PairKind::Vh => Some(Bit::One),
            PairKind::Hh | PairKind::Vv => None,
        }
    }
}

/// Streaming coincidence finder. Tags must arrive sorted by corrected time;
/// each arriving tag is paired with the earliest unmatched tag of the other
/// photon within the window, and every tag is used at most once.
#[derive(Clone, Debug)]
pub struct CoincidenceMatcher {
    window: i64,
    pending: [VecDeque<(i64, u8)>; 2],
}

impl CoincidenceMatcher {
    pub fn new(window: i64) -> Self {
        CoincidenceMatcher {
            window,
            pending: [VecDeque::new(), VecDeque::new()],
        }
    }

    pub fn push(&mut self, time: i64, channel: u8) -> Option<PairKind> {
        let side = if channel <= 2 { 0 } else { 1 };
        let window = self.window;
        for queue in &mut self.pending {
            while queue.front().is_some_and(|&(t, _)| time - t > window) {
                queue.pop_front();
            }
        }
        if let Some((_, other)) = self.pending[1 - side].pop_front() {
            Some(PairKind::from_channels(channel, other))
        } else {
            self.pending[side].push_back((time, channel));
            None
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Extraction {
    pub bits: Vec<Bit>,
    pub counts: CoincidenceCounts,
    /// Every coincidence in the order it was found.
    pub events: Vec<PairKind>,
}

/// Sorts tags into the order [`extract_bits`] expects.
pub fn sort_tags(tags: &mut [TimeTag], config: &CoincidenceConfig) {
    tags.sort_unstable_by_key(|t| t.sort_key(config));
}

/// Reduces a sorted tag stream to collapse bits and coincidence tallies.
pub fn extract_bits(tags: &[TimeTag], config: &CoincidenceConfig) -> Result<Extraction, SourceError> {
    config.validate()?;
    let mut out = Extraction::default();
    let mut matcher = CoincidenceMatcher::new(config.window);
    let mut prev = None;
    for (index, tag) in tags.iter().enumerate() {
        if !(1..=4).contains(&tag.channel) {
            return Err(SourceError::InvalidChannel(tag.channel));
        }
        let key = tag.sort_key(config);
        if prev.is_some_and(|p| p > key) {
            return Err(SourceError::Unsorted { index });
        }
        prev = Some(key);
        if let Some(kind) = matcher.push(key.0, tag.channel) {
            out.counts.record(kind);
            out.events.push(kind);
            if let Some(bit) = kind.bit() {
                out.bits.push(bit);
            }
        }
    }
    Ok(out)
}

/// `(N_HV + N_VH - N_HH - N_VV) / (N_HV + N_VH + N_HH + N_VV)`.
pub fn visibility(counts: &CoincidenceCounts) -> Result<f64, SourceError> {
    let total = counts.total();
    if total == 0 {
        return Err(SourceError::ZeroTotal);
    }
    let good = (counts.n_hv + counts.n_vh) as f64;
    let bad = (counts.n_hh + counts.n_vv) as f64;
    Ok((good - bad) / total as f64)
}
