//! Per-timestamp drone position estimation.
//!
//! The LiDAR 360 path subtracts environment zones, clusters the remaining
//! points with DBSCAN and averages the largest cluster. The Avia path drops
//! exact `(0, 0, 0)` returns and averages the rest. When neither sensor has
//! usable points near the query stamp the configured fallback position is
//! returned.

use std::time::{Duration, Instant};

use crate::clustering::{dbscan, DbscanParams};
use crate::dataio::FrameIndex;
use crate::error::{Error, Result};
use crate::model::{
    centroid, mean_of, PipelineConfig, Point3, PoseEstimate, SensorFrame, SensorKind, Sequence,
    Timestamp, ZoneSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    pub points_total: usize,
    pub points_after_filter: usize,
    pub clusters_found: usize,
    pub largest_cluster_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationOutcome {
    pub estimate: PoseEstimate,
    pub diagnostics: Diagnostics,
}

/// Points outside every zone, in input order.
pub fn remove_environment(points: &[Point3], zones: &ZoneSet) -> Vec<Point3> {
    if zones.is_empty() {
        return points.to_vec();
    }
    points
        .iter()
        .filter(|p| !zones.contains(p))
        .copied()
        .collect()
}

pub fn estimate_from_lidar360(
    frame: &SensorFrame,
    cfg: &PipelineConfig,
) -> Option<EstimationOutcome> {
    debug_assert_eq!(frame.sensor, SensorKind::Lidar360);
    let kept = remove_environment(&frame.points, &cfg.zone_set);
    if kept.is_empty() {
        return None;
    }
    let params = DbscanParams {
        eps: cfg.dbscan_eps,
        min_pts: cfg.dbscan_min_pts,
    };
    let labels = dbscan(&kept, &params);
    // With min_pts > 1 every surviving point may be noise.
    let (cluster, size) = labels.largest_cluster()?;
    let position = mean_of(labels.members(cluster).map(|i| &kept[i]));
    Some(EstimationOutcome {
        estimate: PoseEstimate::measured(frame.stamp, position, SensorKind::Lidar360, size),
        diagnostics: Diagnostics {
            points_total: frame.points.len(),
            points_after_filter: kept.len(),
            clusters_found: labels.n_clusters(),
            largest_cluster_size: size,
        },
    })
}

pub fn estimate_from_avia(frame: &SensorFrame) -> Option<EstimationOutcome> {
    debug_assert_eq!(frame.sensor, SensorKind::LivoxAvia);
    let kept: Vec<Point3> = frame
        .points
        .iter()
        .filter(|p| !p.is_origin())
        .copied()
        .collect();
    let position = centroid(&kept).ok()?;
    Some(EstimationOutcome {
        estimate: PoseEstimate::measured(frame.stamp, position, SensorKind::LivoxAvia, kept.len()),
        diagnostics: Diagnostics {
            points_total: frame.points.len(),
            points_after_filter: kept.len(),
            clusters_found: 1,
            largest_cluster_size: kept.len(),
        },
    })
}

/// Mean of ground-truth positions, used to derive a fallback position from
/// training data.
pub fn historical_average(truths: &[Point3]) -> Result<Point3> {
    if truths.is_empty() {
        return Err(Error::EmptyInput("historical average of no positions"));
    }
    centroid(truths)
}

/// Position at `t`, preferring LiDAR 360, then Avia, then the fallback.
///
/// A frame that is found but leaves no usable points is treated as
/// unavailable. The returned estimate carries the query stamp.
pub fn estimate_pose(seq: &Sequence, t: Timestamp, cfg: &PipelineConfig) -> PoseEstimate {
    let idx_360 = FrameIndex::from_sorted(seq.frames_360());
    let idx_avia = FrameIndex::from_sorted(seq.frames_avia());
    estimate_with_indices(&idx_360, &idx_avia, t, cfg)
}

pub(crate) fn estimate_with_indices(
    idx_360: &FrameIndex<'_>,
    idx_avia: &FrameIndex<'_>,
    t: Timestamp,
    cfg: &PipelineConfig,
) -> PoseEstimate {
    if let Some(out) = idx_360
        .nearest(t, cfg.time_tolerance)
        .and_then(|f| estimate_from_lidar360(f, cfg))
    {
        let e = out.estimate;
        return PoseEstimate::measured(t, e.position(), SensorKind::Lidar360, e.support());
    }
    if let Some(out) = idx_avia
        .nearest(t, cfg.time_tolerance)
        .and_then(estimate_from_avia)
    {
        let e = out.estimate;
        return PoseEstimate::measured(t, e.position(), SensorKind::LivoxAvia, e.support());
    }
    PoseEstimate::fallback(t, cfg.fallback_position)
}

/// Estimates at every query stamp of the sequence, in stamp order.
pub fn estimate_sequence(seq: &Sequence, cfg: &PipelineConfig) -> Vec<PoseEstimate> {
    let idx_360 = FrameIndex::from_sorted(seq.frames_360());
    let idx_avia = FrameIndex::from_sorted(seq.frames_avia());
    seq.query_stamps()
        .into_iter()
        .map(|t| estimate_with_indices(&idx_360, &idx_avia, t, cfg))
        .collect()
}

/// Wall time spent in each pipeline stage over a batch of estimates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub lookup: Duration,
    pub zone_filter: Duration,
    pub clustering: Duration,
    pub averaging: Duration,
    pub estimates: usize,
}

impl StageTimes {
    pub fn total(&self) -> Duration {
        self.lookup + self.zone_filter + self.clustering + self.averaging
    }
}

/// Same decisions as [`estimate_sequence`], instrumented per stage. Returns
/// the estimates so callers can check they agree with the plain path.
pub fn profile_sequence(
    seq: &Sequence,
    cfg: &PipelineConfig,
    times: &mut StageTimes,
) -> Vec<PoseEstimate> {
    let idx_360 = FrameIndex::from_sorted(seq.frames_360());
    let idx_avia = FrameIndex::from_sorted(seq.frames_avia());
    let params = DbscanParams {
        eps: cfg.dbscan_eps,
        min_pts: cfg.dbscan_min_pts,
    };
    let mut out = Vec::new();
    for t in seq.query_stamps() {
        let clock = Instant::now();
        let f360 = idx_360.nearest(t, cfg.time_tolerance);
        let favia = idx_avia.nearest(t, cfg.time_tolerance);
        times.lookup += clock.elapsed();

        let mut estimate = None;
        if let Some(frame) = f360 {
            let clock = Instant::now();
            let kept = remove_environment(&frame.points, &cfg.zone_set);
            times.zone_filter += clock.elapsed();
            if !kept.is_empty() {
                let clock = Instant::now();
                let labels = dbscan(&kept, &params);
                times.clustering += clock.elapsed();
                let clock = Instant::now();
                if let Some((c, size)) = labels.largest_cluster() {
                    let pos = mean_of(labels.members(c).map(|i| &kept[i]));
                    estimate = Some(PoseEstimate::measured(t, pos, SensorKind::Lidar360, size));
                }
                times.averaging += clock.elapsed();
            }
        }
        if estimate.is_none() {
            if let Some(frame) = favia {
                let clock = Instant::now();
                estimate = estimate_from_avia(frame).map(|o| {
                    PoseEstimate::measured(
                        t,
                        o.estimate.position(),
                        SensorKind::LivoxAvia,
                        o.estimate.support(),
                    )
                });
                times.averaging += clock.elapsed();
            }
        }
        out.push(estimate.unwrap_or_else(|| PoseEstimate::fallback(t, cfg.fallback_position)));
        times.estimates += 1;
    }
    out
}
