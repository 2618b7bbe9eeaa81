//! DBSCAN, K-Means (Lloyd with k-means++ or random seeding) and elbow-curve
//! model selection.

mod dbscan;
mod elbow;
mod kmeans;

pub use dbscan::{dbscan, DbscanParams};
pub use elbow::{elbow_curve, knee_point, ElbowCurve};
pub use kmeans::{
    distinct_count, kmeans, kmeans_from, kmeanspp_init, random_init, KMeansConfig, KMeansInit,
    KMeansResult,
};

use std::collections::HashMap;

/// Per-point cluster ids, parallel to the input points. `None` marks noise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabels {
    labels: Vec<Option<usize>>,
    n_clusters: usize,
}

impl ClusterLabels {
    pub(crate) fn new(labels: Vec<Option<usize>>, n_clusters: usize) -> Self {
        debug_assert!(labels.iter().flatten().all(|&c| c < n_clusters));
        Self { labels, n_clusters }
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for c in self.labels.iter().flatten() {
            sizes[*c] += 1;
        }
        sizes
    }

    /// `(cluster id, size)` of the most populous cluster; ties go to the
    /// smallest id.
    pub fn largest_cluster(&self) -> Option<(usize, usize)> {
        self.cluster_sizes()
            .into_iter()
            .enumerate()
            .fold(None, |best, (id, size)| match best {
                Some((_, s)) if s >= size => best,
                _ => Some((id, size)),
            })
    }

    /// Indices of the points in `cluster`, ascending.
    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, l)| **l == Some(cluster))
            .map(|(i, _)| i)
    }

    /// Same partition up to a renaming of cluster ids (noise must match
    /// exactly).
    pub fn equivalent(&self, other: &ClusterLabels) -> bool {
        if self.labels.len() != other.labels.len() || self.n_clusters != other.n_clusters {
            return false;
        }
        let mut fwd = HashMap::new();
        let mut back = HashMap::new();
        for (a, b) in self.labels.iter().zip(&other.labels) {
            match (a, b) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    if *fwd.entry(*a).or_insert(*b) != *b || *back.entry(*b).or_insert(*a) != *a {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }
}

/// Majority-label purity of a clustering against known labels: the fraction
/// of clustered points whose truth label is the most common label in their
/// cluster. Noise points are ignored; returns `None` when nothing is
/// clustered.
pub fn purity<L: Eq + std::hash::Hash>(clusters: &ClusterLabels, truth: &[L]) -> Option<f64> {
    assert_eq!(clusters.len(), truth.len(), "label arrays must be parallel");
    let mut counts: Vec<HashMap<&L, usize>> = vec![HashMap::new(); clusters.n_clusters()];
    let mut clustered = 0usize;
    for (c, t) in clusters.labels().iter().zip(truth) {
        if let Some(c) = c {
            *counts[*c].entry(t).or_default() += 1;
            clustered += 1;
        }
    }
    if clustered == 0 {
        return None;
    }
    let majority: usize = counts
        .iter()
        .map(|m| m.values().copied().max().unwrap_or(0))
        .sum();
    Some(majority as f64 / clustered as f64)
}
