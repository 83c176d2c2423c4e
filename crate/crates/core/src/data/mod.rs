//! Trajectory segments, datasets and their sources.
//!
//! A [`Segment`] is one supervised example: `tau + 1` history points ending at
//! the current position, followed by `horizon` future points, all at a fixed
//! `dt`. The default protocol is 16 history points and 25 future points at
//! 0.2 s (3 s observed, 5 s predicted, 8 s window).

mod jsonl;
mod ngsim;
mod synth;

pub use jsonl::{read_jsonl, read_jsonl_from, write_jsonl, write_jsonl_to};
pub use ngsim::{
    downsample, extract_segments, parse_ngsim_csv, parse_ngsim_reader, Track, FEET_TO_METERS,
    NGSIM_DT,
};
pub use synth::{gen_synthetic, Scenario};

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::Vec2;

/// Timing protocol shared by every segment of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub dt: f64,
    /// Number of history intervals; histories hold `tau + 1` points.
    pub tau: usize,
    /// Number of predicted future steps.
    pub horizon: usize,
}

impl Protocol {
    pub const DEFAULT: Protocol = Protocol {
        dt: 0.2,
        tau: 15,
        horizon: 25,
    };

    pub fn history_len(&self) -> usize {
        self.tau + 1
    }

    pub fn window_len(&self) -> usize {
        self.tau + 1 + self.horizon
    }

    /// Future step indices that fall on whole seconds (1 s, 2 s, ...).
    pub fn second_steps(&self) -> Vec<usize> {
        let per_second = (1.0 / self.dt).round() as usize;
        if per_second == 0 || ((per_second as f64) * self.dt - 1.0).abs() > 1e-9 {
            return Vec::new();
        }
        (1..)
            .map(|s| s * per_second)
            .take_while(|&k| k <= self.horizon)
            .collect()
    }

    pub fn matches(&self, other: &Protocol) -> bool {
        self.tau == other.tau
            && self.horizon == other.horizon
            && (self.dt - other.dt).abs() <= 1e-9 * self.dt.abs().max(1.0)
    }
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub agent_id: u64,
    pub history: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub segment_id: String,
    pub agent_id: u64,
    pub dt: f64,
    pub history: Vec<Vec2>,
    pub future: Vec<Vec2>,
    #[serde(default)]
    pub neighbors: Vec<Neighbor>,
}

impl Segment {
    pub fn protocol(&self) -> Protocol {
        Protocol {
            dt: self.dt,
            tau: self.history.len().saturating_sub(1),
            horizon: self.future.len(),
        }
    }

    pub fn last_observed(&self) -> Option<Vec2> {
        self.history.last().copied()
    }

    /// History followed by future.
    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.history.iter().chain(self.future.iter()).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub segments: Vec<Segment>,
    pub source: String,
}

impl Dataset {
    pub fn new(segments: Vec<Segment>, source: impl Into<String>) -> Self {
        Dataset {
            segments,
            source: source.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// The common protocol, `None` for an empty dataset, or an error when
    /// segments disagree.
    pub fn protocol(&self) -> Result<Option<Protocol>> {
        let mut it = self.segments.iter();
        let Some(first) = it.next() else {
            return Ok(None);
        };
        let p = first.protocol();
        for s in it {
            if !p.matches(&s.protocol()) {
                return Err(Error::Protocol(format!(
                    "segment {} has {:?}, expected {:?}",
                    s.segment_id,
                    s.protocol(),
                    p
                )));
            }
        }
        Ok(Some(p))
    }

    pub fn vehicle_ids(&self) -> BTreeSet<u64> {
        self.segments.iter().map(|s| s.agent_id).collect()
    }
}

/// Named random sub-streams derived from a single user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum RngStream {
    Datagen = 1,
    Split = 2,
}

pub fn seeded_rng(seed: u64, stream: RngStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Splits by vehicle id so that no vehicle appears in two splits.
///
/// Vehicle counts are `round(r·n)` for train and validation; test takes the
/// remainder.
pub fn split_dataset(
    ds: &Dataset,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<(Dataset, Dataset, Dataset)> {
    let (r_train, r_val, r_test) = ratios;
    if [r_train, r_val, r_test].iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::Config(format!("split ratios must be non-negative: {ratios:?}")));
    }
    if (r_train + r_val + r_test - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios must sum to 1: {ratios:?}")));
    }

    let mut vehicles: Vec<u64> = ds.vehicle_ids().into_iter().collect();
    vehicles.shuffle(&mut seeded_rng(seed, RngStream::Split));

    let n = vehicles.len();
    let n_train = ((r_train * n as f64).round() as usize).min(n);
    let n_val = ((r_val * n as f64).round() as usize).min(n - n_train);

    let mut assignment = BTreeMap::new();
    for (i, v) in vehicles.iter().enumerate() {
        let split = if i < n_train {
            0
        } else if i < n_train + n_val {
            1
        } else {
            2
        };
        assignment.insert(*v, split);
    }

    let mut parts: [Vec<Segment>; 3] = Default::default();
    for s in &ds.segments {
        parts[assignment[&s.agent_id]].push(s.clone());
    }
    let [train, val, test] = parts;
    Ok((
        Dataset::new(train, format!("{}#train", ds.source)),
        Dataset::new(val, format!("{}#val", ds.source)),
        Dataset::new(test, format!("{}#test", ds.source)),
    ))
}
