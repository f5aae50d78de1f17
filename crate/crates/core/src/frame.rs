//! Frames of discernment and the set algebra over their subsets.
//!
//! A [`Frame`] is an ordered list of at most 64 mutually exclusive elements.
//! Subsets are [`HypothesisSet`] bitmasks indexed by frame position, so the
//! algebra works for any frame; only [`make_standard_frame`] knows about
//! scores.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Highest goal count per side inside the standard frame.
pub const MAX_GOALS: u8 = 5;

/// Number of scores in the standard frame.
pub const STANDARD_FRAME_SIZE: usize = ((MAX_GOALS as usize) + 1) * ((MAX_GOALS as usize) + 1);

/// Largest frame a [`HypothesisSet`] can address.
pub const MAX_FRAME_SIZE: usize = 64;

/// A 90-minute score inside the standard frame (`0..=5` goals per side).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Score {
    home: u8,
    away: u8,
}

impl Score {
    pub fn new(home: u8, away: u8) -> Result<Self> {
        if home > MAX_GOALS || away > MAX_GOALS {
            return Err(Error::ScoreParse {
                token: format!("{home}:{away}"),
                reason: format!("goal count exceeds {MAX_GOALS}"),
            });
        }
        Ok(Self { home, away })
    }

    pub fn home(self) -> u8 {
        self.home
    }

    pub fn away(self) -> u8 {
        self.away
    }

    /// Position in the standard frame (home-major, away fastest).
    pub fn index(self) -> usize {
        self.home as usize * (MAX_GOALS as usize + 1) + self.away as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        if index >= STANDARD_FRAME_SIZE {
            return None;
        }
        let side = MAX_GOALS as usize + 1;
        Some(Self {
            home: (index / side) as u8,
            away: (index % side) as u8,
        })
    }

    /// All 36 scores in canonical order.
    pub fn all() -> impl Iterator<Item = Score> {
        (0..STANDARD_FRAME_SIZE).filter_map(Score::from_index)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.home, self.away)
    }
}

impl FromStr for Score {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_score(s)
    }
}

/// Parses canonical `h:a` text. Surrounding whitespace is tolerated.
pub fn parse_score(text: &str) -> Result<Score> {
    let err = |reason: &str| Error::ScoreParse {
        token: text.to_string(),
        reason: reason.to_string(),
    };
    let (h, a) = text
        .trim()
        .split_once(':')
        .ok_or_else(|| err("expected `home:away`"))?;
    let goals = |part: &str| -> Result<u8> {
        if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("goal counts must be non-negative integers"));
        }
        let n: u32 = part.parse().map_err(|_| err("goal count too large"))?;
        if n > MAX_GOALS as u32 {
            return Err(err(&format!("goal count exceeds {MAX_GOALS}")));
        }
        Ok(n as u8)
    };
    Ok(Score {
        home: goals(h)?,
        away: goals(a)?,
    })
}

/// A subset of a frame, one bit per frame position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HypothesisSet(u64);

impl HypothesisSet {
    pub const EMPTY: HypothesisSet = HypothesisSet(0);

    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(index: usize) -> Self {
        assert!(index < MAX_FRAME_SIZE, "frame index {index} out of range");
        Self(1 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(Self::EMPTY, |acc, i| acc.union(Self::singleton(i)))
    }

    /// Set of standard-frame scores.
    pub fn from_scores<I: IntoIterator<Item = Score>>(scores: I) -> Self {
        Self::from_indices(scores.into_iter().map(Score::index))
    }

    pub fn intersect(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn contains(self, index: usize) -> bool {
        index < MAX_FRAME_SIZE && self.0 & (1 << index) != 0
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Member positions in ascending frame order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

/// Exact set intersection.
pub fn intersect(a: HypothesisSet, b: HypothesisSet) -> HypothesisSet {
    a.intersect(b)
}

/// An ordered, duplicate-free list of exhaustive basic hypotheses.
#[derive(Debug, Clone)]
pub struct Frame {
    labels: Vec<String>,
    positions: HashMap<String, usize>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for Frame {}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_FRAME_SIZE {
            return Err(Error::FrameSize {
                got: labels.len(),
                max: MAX_FRAME_SIZE,
            });
        }
        let mut positions = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if positions.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateElement(label.clone()));
            }
        }
        Ok(Self { labels, positions })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.positions.get(label).copied()
    }

    /// The whole frame, Θ.
    pub fn full(&self) -> HypothesisSet {
        if self.len() == MAX_FRAME_SIZE {
            HypothesisSet(u64::MAX)
        } else {
            HypothesisSet((1u64 << self.len()) - 1)
        }
    }

    pub fn is_full(&self, set: HypothesisSet) -> bool {
        set == self.full()
    }

    pub fn contains_set(&self, set: HypothesisSet) -> bool {
        set.is_subset_of(self.full())
    }

    pub fn complement(&self, set: HypothesisSet) -> HypothesisSet {
        HypothesisSet(!set.0 & self.full().0)
    }

    pub fn set_of<'a, I>(&self, labels: I) -> Result<HypothesisSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        labels.into_iter().try_fold(HypothesisSet::EMPTY, |acc, l| {
            let i = self
                .position(l)
                .ok_or_else(|| Error::UnknownElement(l.to_string()))?;
            Ok(acc.union(HypothesisSet::singleton(i)))
        })
    }

    /// Member labels in frame order.
    pub fn labels_of(&self, set: HypothesisSet) -> Vec<&str> {
        set.indices().filter_map(|i| self.label(i)).collect()
    }

    pub fn format_set(&self, set: HypothesisSet) -> String {
        if self.is_full(set) {
            return "Θ".to_string();
        }
        format!("{{{}}}", self.labels_of(set).join(", "))
    }
}

/// The 36-score frame `0:0 ..= 5:5`, shared by every caller.
pub fn make_standard_frame() -> Arc<Frame> {
    static FRAME: OnceLock<Arc<Frame>> = OnceLock::new();
    FRAME
        .get_or_init(|| {
            let frame = Frame::new(Score::all().map(|s| s.to_string()))
                .expect("standard frame is well formed");
            Arc::new(frame)
        })
        .clone()
}
