use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Point3;

use super::ClusterLabels;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMeansInit {
    KMeansPlusPlus,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub init: KMeansInit,
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this (meters).
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            init: KMeansInit::KMeansPlusPlus,
            max_iter: 100,
            tol: 1e-6,
            seed: 0,
            restarts: 10,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_init(mut self, init: KMeansInit) -> Self {
        self.init = init;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.max_iter == 0 || self.restarts == 0 {
            return Err(Error::Config("max_iter and restarts must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Config("tol must be non-negative".into()));
        }
        Ok(())
    }

    /// Independent generator for one restart; depends only on
    /// `(seed, restart)` so restarts can run in any order.
    fn rng_for_restart(&self, restart: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(restart as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Vec<Point3>,
    pub assignment: ClusterLabels,
    pub sse: f64,
    /// Lloyd iterations of the returned run.
    pub iterations: usize,
    /// Objective after the initial assignment and after every subsequent
    /// update and assignment half-step of the returned run.
    pub sse_history: Vec<f64>,
}

fn bits_key(p: &Point3) -> [u64; 3] {
    // +0.0 folds -0.0 into 0.0
    [(p.x + 0.0).to_bits(), (p.y + 0.0).to_bits(), (p.z + 0.0).to_bits()]
}

fn distinct_points(points: &[Point3]) -> Vec<Point3> {
    let mut seen = std::collections::HashSet::new();
    points.iter().copied().filter(|p| seen.insert(bits_key(p))).collect()
}

pub fn distinct_count(points: &[Point3]) -> usize {
    distinct_points(points).len()
}

fn check_k(points: &[Point3], k: usize) -> Result<()> {
    let distinct = distinct_count(points);
    if k > distinct {
        return Err(Error::InsufficientPoints {
            requested: k,
            distinct,
        });
    }
    Ok(())
}

/// k-means++ seeding: the first center is uniform over the points, each
/// further center is drawn with probability proportional to its squared
/// distance to the nearest center chosen so far. Centers are distinct input
/// points.
pub fn kmeanspp_init(points: &[Point3], k: usize, seed: u64) -> Result<Vec<Point3>> {
    check_k(points, k)?;
    Ok(kmeanspp_with(points, k, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// `k` distinct input points chosen uniformly without replacement.
pub fn random_init(points: &[Point3], k: usize, seed: u64) -> Result<Vec<Point3>> {
    check_k(points, k)?;
    Ok(random_with(points, k, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn kmeanspp_with<R: Rng>(points: &[Point3], k: usize, rng: &mut R) -> Vec<Point3> {
    let mut centers = Vec::with_capacity(k);
    if k == 0 {
        return centers;
    }
    let first = points[rng.gen_range(0..points.len())];
    centers.push(first);
    let mut d2: Vec<f64> = points.iter().map(|p| p.dist_sq(&first)).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in d2.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            pick = Some(i);
            if acc > target {
                break;
            }
        }
        let c = points[pick.expect("k does not exceed the distinct point count")];
        centers.push(c);
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(p.dist_sq(&c));
        }
    }
    centers
}

fn random_with<R: Rng>(points: &[Point3], k: usize, rng: &mut R) -> Vec<Point3> {
    let distinct = distinct_points(points);
    rand::seq::index::sample(rng, distinct.len(), k)
        .into_iter()
        .map(|i| distinct[i])
        .collect()
}

/// Nearest centroid per point; ties go to the lowest centroid index.
fn assign(points: &[Point3], centroids: &[Point3], out: &mut [usize]) {
    for (slot, p) in out.iter_mut().zip(points) {
        let mut best = 0;
        let mut best_d = p.dist_sq(&centroids[0]);
        for (j, c) in centroids.iter().enumerate().skip(1) {
            let d = p.dist_sq(c);
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        *slot = best;
    }
}

fn objective(points: &[Point3], centroids: &[Point3], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &a)| p.dist_sq(&centroids[a]))
        .sum()
}

/// Mean of each cluster, summed in input order. A cluster left empty is
/// reseeded with the point currently farthest from its own centroid (taken
/// from a cluster that keeps at least one member); `assignment` is updated
/// to match.
fn update(points: &[Point3], centroids: &[Point3], assignment: &mut [usize]) -> Vec<Point3> {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for &a in assignment.iter() {
        counts[a] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut far: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            let a = assignment[i];
            if counts[a] < 2 {
                continue;
            }
            let d = p.dist_sq(&centroids[a]);
            if far.is_none_or(|(_, fd)| d > fd) {
                far = Some((i, d));
            }
        }
        let (i, _) = far.expect("k does not exceed the point count");
        counts[assignment[i]] -= 1;
        assignment[i] = empty;
        counts[empty] = 1;
    }

    let mut sums = vec![Point3::ORIGIN; k];
    for (p, &a) in points.iter().zip(assignment.iter()) {
        sums[a] = sums[a] + *p;
    }
    sums.into_iter()
        .zip(&counts)
        .map(|(s, &n)| s / n as f64)
        .collect()
}

/// Lloyd iteration from explicit initial centroids.
///
/// Runs until the largest centroid shift is at most `tol`, the assignment
/// stops changing, or `max_iter` updates have been made. The objective never
/// increases along the run: an update that would raise it (possible only
/// through rounding once converged) is discarded and the run stops.
pub fn kmeans_from(
    points: &[Point3],
    init: Vec<Point3>,
    max_iter: usize,
    tol: f64,
) -> Result<KMeansResult> {
    if points.is_empty() {
        return Err(Error::EmptyInput("k-means on an empty point list"));
    }
    if init.is_empty() || init.len() > points.len() {
        return Err(Error::InsufficientPoints {
            requested: init.len(),
            distinct: distinct_count(points),
        });
    }
    let k = init.len();
    let mut centroids = init;
    let mut assignment = vec![0usize; points.len()];
    assign(points, &centroids, &mut assignment);
    let mut sse = objective(points, &centroids, &assignment);
    let mut history = vec![sse];
    let mut iterations = 0;
    let mut scratch = vec![0usize; points.len()];

    while iterations < max_iter {
        let mut moved = assignment.clone();
        let next = update(points, &centroids, &mut moved);
        let next_sse = objective(points, &next, &moved);
        if next_sse > sse {
            break;
        }
        iterations += 1;
        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max);
        centroids = next;
        assignment = moved;
        sse = next_sse;
        history.push(sse);

        assign(points, &centroids, &mut scratch);
        let changed = scratch != assignment;
        if changed {
            std::mem::swap(&mut assignment, &mut scratch);
            sse = objective(points, &centroids, &assignment);
            history.push(sse);
        }
        if !changed || shift <= tol {
            break;
        }
    }

    Ok(KMeansResult {
        centroids,
        assignment: ClusterLabels::new(assignment.into_iter().map(Some).collect(), k),
        sse,
        iterations,
        sse_history: history,
    })
}

/// Best of `cfg.restarts` seeded Lloyd runs (smallest objective, earliest
/// restart on ties).
pub fn kmeans(points: &[Point3], cfg: &KMeansConfig) -> Result<KMeansResult> {
    cfg.validate()?;
    if points.is_empty() {
        return Err(Error::EmptyInput("k-means on an empty point list"));
    }
    check_k(points, cfg.k)?;
    let mut best: Option<KMeansResult> = None;
    for restart in 0..cfg.restarts {
        let mut rng = cfg.rng_for_restart(restart);
        let init = match cfg.init {
            KMeansInit::KMeansPlusPlus => kmeanspp_with(points, cfg.k, &mut rng),
            KMeansInit::Random => random_with(points, cfg.k, &mut rng),
        };
        let run = kmeans_from(points, init, cfg.max_iter, cfg.tol)?;
        if best.as_ref().is_none_or(|b| run.sse < b.sse) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}
