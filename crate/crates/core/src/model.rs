//! Shared domain vocabulary: points, frames, sequences, zones and estimates.
//!
//! All coordinates are meters in a single pre-registered frame shared by
//! both LiDARs and the ground truth. Timestamps are integer nanoseconds.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use crate::error::{Error, Result};

/// Training-set mean drone position used when no sensor data is usable.
pub const DEFAULT_FALLBACK: Point3 = Point3::new(0.734, -9.739, 33.353);

pub const DEFAULT_DBSCAN_EPS: f64 = 2.0;
pub const DEFAULT_DBSCAN_MIN_PTS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Builds a point, rejecting NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64, z: f64) -> Option<Self> {
        let p = Self::new(x, y, z);
        p.is_finite().then_some(p)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn dist_sq(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    pub fn dist(&self, other: &Point3) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Exact comparison against `(0, 0, 0)`; `-0.0` counts as zero.
    pub fn is_origin(&self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, rhs: f64) -> Point3 {
        Point3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, rhs: f64) -> Point3 {
        Point3::new(self.x / rhs, self.y / rhs, self.z / rhs)
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Arithmetic mean, summed left to right in input order.
pub fn centroid(points: &[Point3]) -> Result<Point3> {
    if points.is_empty() {
        return Err(Error::EmptyInput("centroid of an empty point list"));
    }
    Ok(mean_of(points.iter()))
}

/// Mean of a non-empty iterator. Summation order is iteration order, which
/// every caller relies on for bit-identical results.
pub(crate) fn mean_of<'a>(points: impl Iterator<Item = &'a Point3>) -> Point3 {
    let mut sum = Point3::ORIGIN;
    let mut n = 0usize;
    for p in points {
        sum = sum + *p;
        n += 1;
    }
    debug_assert!(n > 0);
    sum / n as f64
}

/// Integer nanoseconds since an arbitrary epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const fn from_nanos(nanos: i64) -> Self {
        Self(nanos)
    }

    pub const fn nanos(self) -> i64 {
        self.0
    }

    pub fn abs_diff(self, other: Timestamp) -> u64 {
        self.0.abs_diff(other.0)
    }

    pub fn seconds_since(self, earlier: Timestamp) -> f64 {
        (self.0 - earlier.0) as f64 * 1e-9
    }
}

impl Sub for Timestamp {
    type Output = i64;
    fn sub(self, rhs: Timestamp) -> i64 {
        self.0 - rhs.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SensorKind {
    Lidar360,
    LivoxAvia,
}

impl SensorKind {
    /// Tag used in manifests.
    pub fn tag(self) -> &'static str {
        match self {
            SensorKind::Lidar360 => "lidar360",
            SensorKind::LivoxAvia => "avia",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "lidar360" => Some(SensorKind::Lidar360),
            "avia" => Some(SensorKind::LivoxAvia),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorFrame {
    pub sensor: SensorKind,
    pub stamp: Timestamp,
    pub points: Vec<Point3>,
}

impl SensorFrame {
    pub fn new(sensor: SensorKind, stamp: Timestamp, points: Vec<Point3>) -> Self {
        Self {
            sensor,
            stamp,
            points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DroneClass(u8);

impl DroneClass {
    pub const COUNT: u8 = 4;

    pub fn new(label: u8) -> Option<Self> {
        (label < Self::COUNT).then_some(Self(label))
    }

    pub fn label(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = DroneClass> {
        (0..Self::COUNT).map(DroneClass)
    }
}

impl fmt::Display for DroneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthSample {
    pub stamp: Timestamp,
    pub position: Point3,
    pub class: DroneClass,
}

/// One recorded flight: time-sorted frames per sensor plus optional truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    id: String,
    frames_360: Vec<SensorFrame>,
    frames_avia: Vec<SensorFrame>,
    truth: Option<Vec<TruthSample>>,
}

impl Sequence {
    /// Sorts both frame lists by stamp and rejects duplicate stamps or
    /// frames filed under the wrong sensor.
    pub fn new(
        id: impl Into<String>,
        mut frames_360: Vec<SensorFrame>,
        mut frames_avia: Vec<SensorFrame>,
        truth: Option<Vec<TruthSample>>,
    ) -> Result<Self> {
        for (frames, kind) in [
            (&mut frames_360, SensorKind::Lidar360),
            (&mut frames_avia, SensorKind::LivoxAvia),
        ] {
            if let Some(f) = frames.iter().find(|f| f.sensor != kind) {
                return Err(Error::Config(format!(
                    "{} frame at {} filed under {}",
                    f.sensor.tag(),
                    f.stamp,
                    kind.tag()
                )));
            }
            frames.sort_by_key(|f| f.stamp);
            if let Some(w) = frames.windows(2).find(|w| w[0].stamp == w[1].stamp) {
                return Err(Error::Config(format!(
                    "duplicate {} stamp {}",
                    kind.tag(),
                    w[0].stamp
                )));
            }
        }
        let truth = truth.map(|mut t| {
            t.sort_by_key(|s| s.stamp);
            t
        });
        Ok(Self {
            id: id.into(),
            frames_360,
            frames_avia,
            truth,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn frames_360(&self) -> &[SensorFrame] {
        &self.frames_360
    }

    pub fn frames_avia(&self) -> &[SensorFrame] {
        &self.frames_avia
    }

    pub fn truth(&self) -> Option<&[TruthSample]> {
        self.truth.as_deref()
    }

    /// Stamps to estimate at: the truth stamps when truth is attached,
    /// otherwise the sorted union of all frame stamps.
    pub fn query_stamps(&self) -> Vec<Timestamp> {
        if let Some(truth) = &self.truth {
            let mut stamps: Vec<_> = truth.iter().map(|t| t.stamp).collect();
            stamps.dedup();
            return stamps;
        }
        let mut stamps: Vec<_> = self
            .frames_360
            .iter()
            .chain(&self.frames_avia)
            .map(|f| f.stamp)
            .collect();
        stamps.sort_unstable();
        stamps.dedup();
        stamps
    }
}

/// Closed axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    min: Point3,
    max: Point3,
}

impl Aabb {
    pub fn new(min: Point3, max: Point3) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::Config("box corners must be finite".into()));
        }
        if min.x > max.x || min.y > max.y || min.z > max.z {
            return Err(Error::Config(format!("box min {min} exceeds max {max}")));
        }
        Ok(Self { min, max })
    }

    /// Cube `[-half, half]^3` around `center`.
    pub fn cube(center: Point3, half: f64) -> Result<Self> {
        let h = Point3::new(half, half, half);
        Self::new(center - h, center + h)
    }

    pub fn min(&self) -> Point3 {
        self.min
    }

    pub fn max(&self) -> Point3 {
        self.max
    }

    pub fn contains(&self, p: &Point3) -> bool {
        contains(self, p)
    }

    pub fn translated(&self, v: Point3) -> Self {
        Self {
            min: self.min + v,
            max: self.max + v,
        }
    }

    /// Euclidean distance from `p` to the box (0 inside).
    pub fn distance_to(&self, p: &Point3) -> f64 {
        let clamp = |v: f64, lo: f64, hi: f64| v.max(lo).min(hi);
        let q = Point3::new(
            clamp(p.x, self.min.x, self.max.x),
            clamp(p.y, self.min.y, self.max.y),
            clamp(p.z, self.min.z, self.max.z),
        );
        q.dist(p)
    }

    pub fn volume(&self) -> f64 {
        let d = self.max - self.min;
        d.x * d.y * d.z
    }
}

/// Boundary points are inside.
pub fn contains(aabb: &Aabb, p: &Point3) -> bool {
    aabb.min.x <= p.x
        && p.x <= aabb.max.x
        && aabb.min.y <= p.y
        && p.y <= aabb.max.y
        && aabb.min.z <= p.z
        && p.z <= aabb.max.z
}

/// Environment regions subtracted before clustering.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZoneSet {
    pub boxes: Vec<Aabb>,
}

impl ZoneSet {
    pub fn new(boxes: Vec<Aabb>) -> Self {
        Self { boxes }
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, p: &Point3) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateSource {
    Lidar360,
    LivoxAvia,
    Fallback,
}

impl EstimateSource {
    pub fn tag(self) -> &'static str {
        match self {
            EstimateSource::Lidar360 => "lidar360",
            EstimateSource::LivoxAvia => "avia",
            EstimateSource::Fallback => "fallback",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "lidar360" => Some(EstimateSource::Lidar360),
            "avia" => Some(EstimateSource::LivoxAvia),
            "fallback" => Some(EstimateSource::Fallback),
            _ => None,
        }
    }
}

impl From<SensorKind> for EstimateSource {
    fn from(kind: SensorKind) -> Self {
        match kind {
            SensorKind::Lidar360 => EstimateSource::Lidar360,
            SensorKind::LivoxAvia => EstimateSource::LivoxAvia,
        }
    }
}

/// Position estimate with provenance. `support` is the number of points
/// averaged; it is zero exactly when the source is the fallback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseEstimate {
    stamp: Timestamp,
    position: Point3,
    source: EstimateSource,
    support: usize,
}

impl PoseEstimate {
    pub fn measured(stamp: Timestamp, position: Point3, sensor: SensorKind, support: usize) -> Self {
        assert!(support >= 1, "a measured estimate averages at least one point");
        Self {
            stamp,
            position,
            source: sensor.into(),
            support,
        }
    }

    pub fn fallback(stamp: Timestamp, position: Point3) -> Self {
        Self {
            stamp,
            position,
            source: EstimateSource::Fallback,
            support: 0,
        }
    }

    pub fn stamp(&self) -> Timestamp {
        self.stamp
    }

    pub fn position(&self) -> Point3 {
        self.position
    }

    pub fn source(&self) -> EstimateSource {
        self.source
    }

    pub fn support(&self) -> usize {
        self.support
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub dbscan_eps: f64,
    pub dbscan_min_pts: usize,
    pub zone_set: ZoneSet,
    /// Maximum |frame stamp - query stamp| in nanoseconds; `None` is unbounded.
    pub time_tolerance: Option<u64>,
    pub fallback_position: Point3,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            dbscan_eps: DEFAULT_DBSCAN_EPS,
            dbscan_min_pts: DEFAULT_DBSCAN_MIN_PTS,
            zone_set: ZoneSet::default(),
            time_tolerance: None,
            fallback_position: DEFAULT_FALLBACK,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dbscan_eps > 0.0 && self.dbscan_eps.is_finite()) {
            return Err(Error::Config(format!(
                "dbscan eps must be positive and finite, got {}",
                self.dbscan_eps
            )));
        }
        if self.dbscan_min_pts < 1 {
            return Err(Error::Config("dbscan min_pts must be at least 1".into()));
        }
        if !self.fallback_position.is_finite() {
            return Err(Error::Config("fallback position must be finite".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube5() -> Aabb {
        Aabb::new(Point3::new(-5.0, -5.0, -5.0), Point3::new(5.0, 5.0, 5.0)).unwrap()
    }

    #[test]
    fn centroid_examples() {
        let p = Point3::new(1.0, 2.0, 3.0);
        assert_eq!(centroid(&[p]).unwrap(), p);
        assert_eq!(
            centroid(&[p, Point3::new(3.0, 2.0, 1.0)]).unwrap(),
            Point3::new(2.0, 2.0, 2.0)
        );
        assert!(matches!(centroid(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn closed_box_containment() {
        let b = cube5();
        assert!(contains(&b, &Point3::new(0.0, 0.0, 0.0)));
        assert!(contains(&b, &Point3::new(5.0, 5.0, 5.0)));
        assert!(!contains(&b, &Point3::new(6.0, 0.0, 0.0)));
    }

    #[test]
    fn inverted_box_rejected() {
        assert!(Aabb::new(Point3::new(1.0, 0.0, 0.0), Point3::ORIGIN).is_err());
        assert!(Aabb::new(Point3::new(f64::NAN, 0.0, 0.0), Point3::ORIGIN).is_err());
    }

    #[test]
    fn distance_to_box() {
        let b = cube5();
        assert_eq!(b.distance_to(&Point3::ORIGIN), 0.0);
        assert_eq!(b.distance_to(&Point3::new(8.0, 0.0, 0.0)), 3.0);
        assert_eq!(b.distance_to(&Point3::new(8.0, 9.0, 5.0)), 5.0);
    }

    #[test]
    fn drone_class_range() {
        assert!(DroneClass::new(3).is_some());
        assert!(DroneClass::new(4).is_none());
        assert_eq!(DroneClass::all().count(), 4);
    }

    #[test]
    fn sequence_sorts_and_rejects_duplicates() {
        let f = |t| SensorFrame::new(SensorKind::Lidar360, Timestamp(t), vec![]);
        let seq = Sequence::new("s", vec![f(200), f(100)], vec![], None).unwrap();
        let stamps: Vec<_> = seq.frames_360().iter().map(|f| f.stamp.0).collect();
        assert_eq!(stamps, [100, 200]);
        assert!(Sequence::new("s", vec![f(1), f(1)], vec![], None).is_err());
        assert!(Sequence::new("s", vec![], vec![f(1)], None).is_err());
    }

    #[test]
    fn default_config_values() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.dbscan_eps, 2.0);
        assert_eq!(cfg.dbscan_min_pts, 1);
        assert_eq!(cfg.fallback_position, Point3::new(0.734, -9.739, 33.353));
        assert!(cfg.time_tolerance.is_none());
        cfg.validate().unwrap();
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn point() -> impl Strategy<Value = Point3> {
            (-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
        }

        proptest! {
            #[test]
            fn centroid_translation_equivariant(
                pts in prop::collection::vec(point(), 1..40),
                v in point(),
            ) {
                let c = centroid(&pts).unwrap();
                let moved: Vec<_> = pts.iter().map(|p| *p + v).collect();
                let cm = centroid(&moved).unwrap();
                let expect = c + v;
                let scale = 1.0 + expect.norm_sq().sqrt() + v.norm_sq().sqrt();
                // Summation error grows with the number of terms.
                prop_assert!(cm.dist(&expect) <= 1e-12 * scale * pts.len() as f64);
            }

            #[test]
            fn centroid_permutation_invariant(
                pts in prop::collection::vec(point(), 1..40).prop_shuffle(),
            ) {
                let mut sorted = pts.clone();
                sorted.sort_by(|a, b| a.x.total_cmp(&b.x));
                let a = centroid(&pts).unwrap();
                let b = centroid(&sorted).unwrap();
                prop_assert!(a.dist(&b) <= 1e-12 * (1.0 + a.norm_sq().sqrt()) * pts.len() as f64);
            }

            #[test]
            fn containment_monotone_under_enlargement(
                c in point(), half in 0.0..50.0f64, grow in 0.0..50.0f64, p in point(),
            ) {
                let small = Aabb::cube(c, half).unwrap();
                let big = Aabb::cube(c, half + grow).unwrap();
                if small.contains(&p) {
                    prop_assert!(big.contains(&p));
                }
            }
        }
    }
}
