//! Challenge metrics: pose MSE, classification accuracy and throughput.
//!
//! Pose MSE is the mean over samples of the squared Euclidean distance
//! between predicted and true positions (summed over the three axes, not
//! averaged). Divide by 3 for the per-axis convention.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use crate::dataio::{FrameIndex, PredictionRecord};
use crate::error::{Error, Result};
use crate::estimation::estimate_with_indices;
use crate::model::{DroneClass, PipelineConfig, Point3, Sequence, TruthSample};

/// Leaderboard figures of the reference method on the withheld test set.
/// Kept for comparison only.
pub mod reference {
    pub const POSE_MSE: f64 = 120.215107;
    pub const ACCURACY: f64 = 0.3220;
    pub const PREDICTIONS_PER_SECOND: f64 = 14.9;
}

pub fn pose_mse(pairs: &[(Point3, Point3)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("pose MSE of no pairs"));
    }
    let total: f64 = pairs.iter().map(|(p, g)| p.dist_sq(g)).sum();
    Ok(total / pairs.len() as f64)
}

pub fn accuracy(pairs: &[(DroneClass, DroneClass)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("accuracy of no pairs"));
    }
    let hits = pairs.iter().filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pairs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceScore {
    pub mse: f64,
    pub accuracy: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub pose_mse: f64,
    pub accuracy: f64,
    pub n_samples: usize,
    /// Filled in when a throughput measurement accompanies the scores.
    pub predictions_per_second: Option<f64>,
    pub per_sequence: BTreeMap<String, SequenceScore>,
}

impl EvalReport {
    /// Sample-weighted mean of the per-sequence MSE values.
    pub fn weighted_sequence_mse(&self) -> f64 {
        let n: usize = self.per_sequence.values().map(|s| s.n).sum();
        self.per_sequence
            .values()
            .map(|s| s.mse * s.n as f64)
            .sum::<f64>()
            / n as f64
    }

    pub fn weighted_sequence_accuracy(&self) -> f64 {
        let n: usize = self.per_sequence.values().map(|s| s.n).sum();
        self.per_sequence
            .values()
            .map(|s| s.accuracy * s.n as f64)
            .sum::<f64>()
            / n as f64
    }

    /// `sequence,mse,accuracy,n` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sequence,mse,accuracy,n\n");
        for (id, s) in &self.per_sequence {
            out.push_str(&format!("{id},{},{},{}\n", s.mse, s.accuracy, s.n));
        }
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Pose MSE: {:.6}  Accuracy: {:.4}  (n={})",
            self.pose_mse, self.accuracy, self.n_samples
        )?;
        if let Some(r) = self.predictions_per_second {
            write!(f, "  {r:.1} predictions/second")?;
        }
        writeln!(f)?;
        for (id, s) in &self.per_sequence {
            writeln!(
                f,
                "  {id}: mse {:.6}  accuracy {:.4}  n {}",
                s.mse, s.accuracy, s.n
            )?;
        }
        Ok(())
    }
}

/// Scores predictions against per-sequence truth. Every prediction must have
/// a truth sample with the same (sequence, stamp) and vice versa.
pub fn evaluate(
    predictions: &[PredictionRecord],
    truth: &BTreeMap<String, Vec<TruthSample>>,
) -> Result<EvalReport> {
    let mut lookup: HashMap<(&str, i64), &TruthSample> = HashMap::new();
    for (id, samples) in truth {
        for s in samples {
            if lookup.insert((id.as_str(), s.stamp.0), s).is_some() {
                return Err(Error::KeyMismatch(format!(
                    "truth for {id} repeats stamp {}",
                    s.stamp
                )));
            }
        }
    }
    if predictions.len() != lookup.len() {
        return Err(Error::KeyMismatch(format!(
            "{} predictions for {} truth samples",
            predictions.len(),
            lookup.len()
        )));
    }

    type Pairs = (Vec<(Point3, Point3)>, Vec<(DroneClass, DroneClass)>);
    let mut by_seq: BTreeMap<&str, Pairs> = BTreeMap::new();
    let mut all_pos = Vec::with_capacity(predictions.len());
    let mut all_cls = Vec::with_capacity(predictions.len());
    for p in predictions {
        let t = lookup
            .remove(&(p.sequence_id.as_str(), p.stamp.0))
            .ok_or_else(|| {
                Error::KeyMismatch(format!(
                    "prediction ({}, {}) has no truth sample",
                    p.sequence_id, p.stamp
                ))
            })?;
        let entry = by_seq.entry(p.sequence_id.as_str()).or_default();
        entry.0.push((p.position, t.position));
        entry.1.push((p.class, t.class));
        all_pos.push((p.position, t.position));
        all_cls.push((p.class, t.class));
    }

    let mut per_sequence = BTreeMap::new();
    for (id, (pos, cls)) in by_seq {
        per_sequence.insert(
            id.to_owned(),
            SequenceScore {
                mse: pose_mse(&pos)?,
                accuracy: accuracy(&cls)?,
                n: pos.len(),
            },
        );
    }
    Ok(EvalReport {
        pose_mse: pose_mse(&all_pos)?,
        accuracy: accuracy(&all_cls)?,
        n_samples: all_pos.len(),
        predictions_per_second: None,
        per_sequence,
    })
}

/// Monotonic time source, abstracted so rates can be checked with a fake
/// clock.
pub trait Clock {
    fn now(&self) -> Duration;
}

#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }
}

pub const DEFAULT_REPETITIONS: usize = 3;

pub fn rate(predictions: usize, elapsed: Duration) -> f64 {
    // A zero reading would only come from a coarse or fake clock.
    let secs = elapsed.as_secs_f64().max(1e-9);
    predictions as f64 / secs
}

#[derive(Debug, Clone, PartialEq)]
pub struct Throughput {
    pub predictions_per_repetition: usize,
    pub rates: Vec<f64>,
}

impl Throughput {
    pub fn mean(&self) -> f64 {
        self.rates.iter().sum::<f64>() / self.rates.len() as f64
    }

    /// Largest relative deviation of a single repetition from the mean.
    pub fn spread(&self) -> f64 {
        let m = self.mean();
        self.rates
            .iter()
            .map(|r| ((r - m) / m).abs())
            .fold(0.0, f64::max)
    }
}

/// Predictions per second of the estimation loop alone, single-threaded.
/// Query stamps and frame indices are prepared before the clock starts.
pub fn measure_throughput(
    seqs: &[Sequence],
    cfg: &PipelineConfig,
    clock: &dyn Clock,
    repetitions: usize,
) -> Result<Throughput> {
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    let prepared: Vec<_> = seqs
        .iter()
        .map(|s| {
            (
                FrameIndex::from_sorted(s.frames_360()),
                FrameIndex::from_sorted(s.frames_avia()),
                s.query_stamps(),
            )
        })
        .collect();
    let total: usize = prepared.iter().map(|(_, _, q)| q.len()).sum();
    if total == 0 {
        return Err(Error::EmptyInput("no query timestamps to benchmark"));
    }

    let mut rates = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = clock.now();
        let mut sink = 0.0;
        for (i360, iavia, stamps) in &prepared {
            for &t in stamps {
                let e = estimate_with_indices(i360, iavia, t, cfg);
                sink += e.position().x;
            }
        }
        std::hint::black_box(sink);
        rates.push(rate(total, clock.now().saturating_sub(start)));
    }
    Ok(Throughput {
        predictions_per_repetition: total,
        rates,
    })
}
