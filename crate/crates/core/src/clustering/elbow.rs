use crate::error::{Error, Result};
use crate::model::Point3;

use super::kmeans::{kmeans, kmeans_from, KMeansConfig, KMeansResult};

/// `(k, sse)` pairs over a contiguous, increasing range of k.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowCurve {
    pub entries: Vec<(usize, f64)>,
}

impl ElbowCurve {
    pub fn sse_at(&self, k: usize) -> Option<f64> {
        self.entries.iter().find(|(kk, _)| *kk == k).map(|(_, s)| *s)
    }

    pub fn is_non_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sse\n");
        for (k, sse) in &self.entries {
            out.push_str(&format!("{k},{sse}\n"));
        }
        out
    }
}

/// Point with the largest distance to its assigned centroid (lowest index
/// on ties).
fn farthest_point(points: &[Point3], fit: &KMeansResult) -> Point3 {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, (p, a)) in points.iter().zip(fit.assignment.labels()).enumerate() {
        let d = p.dist_sq(&fit.centroids[a.expect("k-means labels every point")]);
        if d > best.1 {
            best = (i, d);
        }
    }
    points[best.0]
}

/// K-Means objective for every k in `k_min..=k_max`.
///
/// Each k gets `cfg.restarts` fresh seeded runs plus one run started from the
/// best (k-1) centroids and the point farthest from its centroid. The
/// second start can only lower the objective relative to the (k-1) solution,
/// so the curve is non-increasing.
pub fn elbow_curve(
    points: &[Point3],
    k_min: usize,
    k_max: usize,
    cfg: &KMeansConfig,
) -> Result<ElbowCurve> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::Config(format!("invalid k range [{k_min}, {k_max}]")));
    }
    let mut entries = Vec::with_capacity(k_max - k_min + 1);
    let mut prev: Option<KMeansResult> = None;
    for k in k_min..=k_max {
        let mut cfg_k = cfg.clone();
        cfg_k.k = k;
        let mut best = kmeans(points, &cfg_k)?;
        if let Some(prev) = &prev {
            let mut init = prev.centroids.clone();
            init.push(farthest_point(points, prev));
            let refined = kmeans_from(points, init, cfg.max_iter, cfg.tol)?;
            if refined.sse < best.sse {
                best = refined;
            }
        }
        entries.push((k, best.sse));
        prev = Some(best);
    }
    Ok(ElbowCurve { entries })
}

/// The k whose point lies farthest from the chord joining the first and last
/// curve points, after min-max scaling both axes to [0, 1]. Only interior
/// points are candidates; ties go to the smaller k.
pub fn knee_point(curve: &ElbowCurve) -> Result<usize> {
    let e = &curve.entries;
    if e.len() < 3 {
        return Err(Error::TooFewEntries(e.len()));
    }
    let (k_lo, k_hi) = e
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (k, _)| {
            (lo.min(*k as f64), hi.max(*k as f64))
        });
    let (s_lo, s_hi) = e
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, s)| {
            (lo.min(*s), hi.max(*s))
        });
    let scale = |v: f64, lo: f64, hi: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
    let norm: Vec<(f64, f64)> = e
        .iter()
        .map(|(k, s)| (scale(*k as f64, k_lo, k_hi), scale(*s, s_lo, s_hi)))
        .collect();

    let (x0, y0) = norm[0];
    let (x1, y1) = norm[norm.len() - 1];
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = dx.hypot(dy);
    let distance = |(x, y): (f64, f64)| {
        if len > 0.0 {
            (dy * (x - x0) - dx * (y - y0)).abs() / len
        } else {
            (x - x0).hypot(y - y0)
        }
    };

    // Rounding in the scaling can separate nominally equal distances.
    const TIE: f64 = 1e-12;
    let mut best = (e[1].0, distance(norm[1]));
    for (i, &pt) in norm.iter().enumerate().take(norm.len() - 1).skip(2) {
        let d = distance(pt);
        if d > best.1 + TIE {
            best = (e[i].0, d);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(v: &[(usize, f64)]) -> ElbowCurve {
        ElbowCurve { entries: v.to_vec() }
    }

    #[test]
    fn knee_of_sharp_drop() {
        // Scaled points: (0,1), (1/3, 1.5/91.5), (2/3, 0.5/91.5), (1,0).
        // Chord x + y = 1; distance |x + y - 1| / sqrt(2):
        //   k=2: |1/3 + 0.016393 - 1| = 0.650273
        //   k=3: |2/3 + 0.005464 - 1| = 0.327869
        let c = curve(&[(1, 100.0), (2, 10.0), (3, 9.0), (4, 8.5)]);
        assert_eq!(knee_point(&c).unwrap(), 2);
    }

    #[test]
    fn linear_decline_picks_smallest_interior() {
        let c = curve(&[(2, 40.0), (3, 30.0), (4, 20.0), (5, 10.0), (6, 0.0)]);
        assert_eq!(knee_point(&c).unwrap(), 3);
        let flat = curve(&[(1, 5.0), (2, 5.0), (3, 5.0)]);
        assert_eq!(knee_point(&flat).unwrap(), 2);
    }

    #[test]
    fn too_few_entries() {
        let c = curve(&[(1, 10.0), (2, 5.0)]);
        assert!(matches!(knee_point(&c), Err(Error::TooFewEntries(2))));
    }

    #[test]
    fn single_entry_curve_is_total_deviation() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(4.0, 0.0, 0.0),
        ];
        let c = elbow_curve(&pts, 1, 1, &KMeansConfig::new(1)).unwrap();
        assert_eq!(c.entries, [(1, 8.0)]);
    }

    #[test]
    fn range_beyond_distinct_points() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
        ];
        assert!(matches!(
            elbow_curve(&pts, 1, 5, &KMeansConfig::new(1)),
            Err(Error::InsufficientPoints { .. })
        ));
        assert!(elbow_curve(&pts, 3, 2, &KMeansConfig::new(1)).is_err());
    }

    #[test]
    fn csv_layout() {
        let c = curve(&[(1, 10.0), (2, 2.5)]);
        assert_eq!(c.to_csv(), "k,sse\n1,10\n2,2.5\n");
    }
}
