//! Per-sequence drone class from trajectory statistics.
//!
//! A nearest-centroid classifier over eight standardized features: mean
//! position (3), bounding-box extent of the estimates (3), mean speed and
//! duration. Standardization uses the training set's per-feature mean and
//! population standard deviation; constant features carry no weight.
//!
//! Model file layout (one record per line, `#` comments allowed):
//!
//! ```text
//! prior,<label>
//! mean,<8 values>
//! std,<8 values>
//! class,<label>,<8 standardized centroid values>
//! ```
//!
//! Feature order everywhere: `mean_x, mean_y, mean_z, extent_x, extent_y,
//! extent_z, mean_speed, duration`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model::{DroneClass, EstimateSource, Point3, PoseEstimate};

pub const FEATURE_COUNT: usize = 8;

type FeatureVec = [f64; FEATURE_COUNT];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryFeatures {
    pub mean_position: Point3,
    pub bbox_extent: Point3,
    /// Meters per second.
    pub mean_speed: f64,
    /// Seconds.
    pub duration: f64,
}

impl TrajectoryFeatures {
    pub fn to_array(&self) -> FeatureVec {
        let (m, e) = (self.mean_position, self.bbox_extent);
        [m.x, m.y, m.z, e.x, e.y, e.z, self.mean_speed, self.duration]
    }

    pub fn from_array(v: FeatureVec) -> Self {
        Self {
            mean_position: Point3::new(v[0], v[1], v[2]),
            bbox_extent: Point3::new(v[3], v[4], v[5]),
            mean_speed: v[6],
            duration: v[7],
        }
    }
}

pub fn extract_features(estimates: &[PoseEstimate]) -> Result<TrajectoryFeatures> {
    let first = estimates
        .first()
        .ok_or(Error::EmptyInput("trajectory features of no estimates"))?;
    if estimates.windows(2).any(|w| w[0].stamp() >= w[1].stamp()) {
        return Err(Error::Config(
            "trajectory estimates must have strictly increasing stamps".into(),
        ));
    }
    let positions: Vec<Point3> = estimates.iter().map(|e| e.position()).collect();
    let mean_position = crate::model::centroid(&positions)?;

    let mut lo = positions[0];
    let mut hi = positions[0];
    for p in &positions[1..] {
        lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }

    let speeds: Vec<f64> = estimates
        .windows(2)
        .map(|w| {
            let dt = w[1].stamp().seconds_since(w[0].stamp());
            w[1].position().dist(&w[0].position()) / dt
        })
        .collect();
    let mean_speed = if speeds.is_empty() {
        0.0
    } else {
        speeds.iter().sum::<f64>() / speeds.len() as f64
    };
    let last = estimates[estimates.len() - 1];

    Ok(TrajectoryFeatures {
        mean_position,
        bbox_extent: hi - lo,
        mean_speed,
        duration: last.stamp().seconds_since(first.stamp()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    centroids: BTreeMap<DroneClass, FeatureVec>,
    prior_class: DroneClass,
    mean: FeatureVec,
    /// Zero marks a feature that carries no weight.
    std: FeatureVec,
}

impl ClassifierModel {
    /// Model that always answers `class`.
    pub fn prior_only(class: DroneClass) -> Self {
        Self {
            centroids: BTreeMap::from([(class, [0.0; FEATURE_COUNT])]),
            prior_class: class,
            mean: [0.0; FEATURE_COUNT],
            std: [0.0; FEATURE_COUNT],
        }
    }

    pub fn prior_class(&self) -> DroneClass {
        self.prior_class
    }

    pub fn classes(&self) -> impl Iterator<Item = DroneClass> + '_ {
        self.centroids.keys().copied()
    }

    fn standardize(&self, raw: &FeatureVec) -> FeatureVec {
        let mut z = [0.0; FEATURE_COUNT];
        for i in 0..FEATURE_COUNT {
            if self.std[i] > 0.0 {
                z[i] = (raw[i] - self.mean[i]) / self.std[i];
            }
        }
        z
    }

    /// Class centroid mapped back to raw feature units. Constant features
    /// come back as their training mean.
    pub fn centroid_features(&self, class: DroneClass) -> Option<TrajectoryFeatures> {
        let z = self.centroids.get(&class)?;
        let mut raw = [0.0; FEATURE_COUNT];
        for i in 0..FEATURE_COUNT {
            raw[i] = self.mean[i] + z[i] * self.std[i];
        }
        Some(TrajectoryFeatures::from_array(raw))
    }

    pub fn write<W: Write>(&self, mut sink: W) -> Result<()> {
        let join = |v: &FeatureVec| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(sink, "# nearest-centroid drone class model")?;
        writeln!(sink, "prior,{}", self.prior_class)?;
        writeln!(sink, "mean,{}", join(&self.mean))?;
        writeln!(sink, "std,{}", join(&self.std))?;
        for (class, c) in &self.centroids {
            writeln!(sink, "class,{},{}", class, join(c))?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut prior = None;
        let mut mean = None;
        let mut std = None;
        let mut centroids = BTreeMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = text.split(',').map(str::trim).collect();
            let class_of = |f: &str| {
                f.parse::<u8>()
                    .ok()
                    .and_then(DroneClass::new)
                    .ok_or_else(|| Error::parse(line_no, format!("bad class `{f}`")))
            };
            let vec_of = |f: &[&str]| -> Result<FeatureVec> {
                if f.len() != FEATURE_COUNT {
                    return Err(Error::parse(
                        line_no,
                        format!("expected {FEATURE_COUNT} values, found {}", f.len()),
                    ));
                }
                let mut v = [0.0; FEATURE_COUNT];
                for (slot, s) in v.iter_mut().zip(f) {
                    *slot = s
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::parse(line_no, format!("bad value `{s}`")))?;
                }
                Ok(v)
            };
            match fields[0] {
                "prior" if fields.len() == 2 => prior = Some(class_of(fields[1])?),
                "mean" => mean = Some(vec_of(&fields[1..])?),
                "std" => std = Some(vec_of(&fields[1..])?),
                "class" if fields.len() >= 2 => {
                    centroids.insert(class_of(fields[1])?, vec_of(&fields[2..])?);
                }
                _ => return Err(Error::parse(line_no, format!("unrecognized record `{text}`"))),
            }
        }
        let missing = |what: &str| Error::parse(0, format!("model is missing its {what} record"));
        let model = Self {
            prior_class: prior.ok_or_else(|| missing("prior"))?,
            mean: mean.ok_or_else(|| missing("mean"))?,
            std: std.ok_or_else(|| missing("std"))?,
            centroids,
        };
        if !model.centroids.contains_key(&model.prior_class) {
            return Err(Error::parse(0, "prior class has no centroid"));
        }
        if model.std.iter().any(|s| *s < 0.0) {
            return Err(Error::parse(0, "negative standard deviation"));
        }
        Ok(model)
    }
}

pub fn train(labeled: &[(TrajectoryFeatures, DroneClass)]) -> Result<ClassifierModel> {
    if labeled.is_empty() {
        return Err(Error::EmptyInput("classifier training set"));
    }
    let n = labeled.len() as f64;
    let raw: Vec<FeatureVec> = labeled.iter().map(|(f, _)| f.to_array()).collect();

    let mut mean = [0.0; FEATURE_COUNT];
    for v in &raw {
        for i in 0..FEATURE_COUNT {
            mean[i] += v[i];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut std = [0.0; FEATURE_COUNT];
    for v in &raw {
        for i in 0..FEATURE_COUNT {
            std[i] += (v[i] - mean[i]).powi(2);
        }
    }
    for i in 0..FEATURE_COUNT {
        let s = (std[i] / n).sqrt();
        // Rounding leaves a tiny spread on constant features.
        std[i] = if s > 1e-12 * (1.0 + mean[i].abs()) { s } else { 0.0 };
    }

    let mut model = ClassifierModel {
        centroids: BTreeMap::new(),
        prior_class: labeled[0].1,
        mean,
        std,
    };
    let mut sums: BTreeMap<DroneClass, (FeatureVec, usize)> = BTreeMap::new();
    for (v, (_, class)) in raw.iter().zip(labeled) {
        let z = model.standardize(v);
        let entry = sums.entry(*class).or_insert(([0.0; FEATURE_COUNT], 0));
        for (acc, zi) in entry.0.iter_mut().zip(z) {
            *acc += zi;
        }
        entry.1 += 1;
    }
    // BTreeMap order makes the strict comparison keep the smallest label.
    let mut prior = (labeled[0].1, 0usize);
    for (class, (sum, count)) in sums {
        if count > prior.1 {
            prior = (class, count);
        }
        model
            .centroids
            .insert(class, sum.map(|s| s / count as f64));
    }
    model.prior_class = prior.0;
    Ok(model)
}

/// Nearest class centroid in standardized space; ties go to the smallest
/// label.
pub fn classify(model: &ClassifierModel, features: &TrajectoryFeatures) -> DroneClass {
    if model.centroids.len() == 1 {
        return model.prior_class;
    }
    let z = model.standardize(&features.to_array());
    let mut best: Option<(DroneClass, f64)> = None;
    for (class, c) in &model.centroids {
        let d: f64 = z.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum();
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((*class, d));
        }
    }
    best.map_or(model.prior_class, |(c, _)| c)
}

/// Class for a whole sequence. Only sensor-backed estimates count as
/// observations; with fewer than two of them the prior class is returned.
pub fn classify_trajectory(model: &ClassifierModel, estimates: &[PoseEstimate]) -> DroneClass {
    let observed: Vec<PoseEstimate> = estimates
        .iter()
        .filter(|e| e.source() != EstimateSource::Fallback)
        .copied()
        .collect();
    if observed.len() < 2 {
        return model.prior_class;
    }
    match extract_features(&observed) {
        Ok(f) => classify(model, &f),
        Err(_) => model.prior_class,
    }
}
