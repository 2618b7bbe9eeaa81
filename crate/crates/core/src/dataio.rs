//! Plain-text file formats and nearest-timestamp frame lookup.
//!
//! | file        | layout                                                     |
//! |-------------|------------------------------------------------------------|
//! | cloud       | one `x,y,z` row per point                                  |
//! | manifest    | `lidar360|avia,stamp_nanos,relative_cloud_path` rows, plus an optional `truth,relative_truth_path` row |
//! | truth       | header `stamp_nanos,x,y,z,class`, then rows                |
//! | predictions | header `sequence,stamp_nanos,x,y,z,class,source`, rows sorted by (sequence, stamp) |
//! | zones       | one `xmin,ymin,zmin,xmax,ymax,zmax` row per box            |
//!
//! Every reader skips blank lines and lines starting with `#`. Floats are
//! written with Rust's shortest round-trip formatting, so a write/parse
//! cycle reproduces the input bit for bit.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{
    Aabb, DroneClass, EstimateSource, Point3, SensorFrame, SensorKind, Sequence, Timestamp,
    TruthSample, ZoneSet,
};

pub const TRUTH_HEADER: &str = "stamp_nanos,x,y,z,class";
pub const PREDICTION_HEADER: &str = "sequence,stamp_nanos,x,y,z,class,source";

/// Yields `(1-based line number, trimmed content)` for every data line.
fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(l) => {
                let t = l.trim();
                if t.is_empty() || t.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, t.to_owned())))
                }
            }
        })
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::parse(line, format!("`{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite value `{field}`")));
    }
    Ok(v)
}

fn parse_point(fields: &[&str], line: usize) -> Result<Point3> {
    Ok(Point3::new(
        parse_f64(fields[0], line)?,
        parse_f64(fields[1], line)?,
        parse_f64(fields[2], line)?,
    ))
}

fn parse_stamp(field: &str, line: usize) -> Result<Timestamp> {
    field
        .parse::<i64>()
        .map(Timestamp)
        .map_err(|_| Error::parse(line, format!("`{field}` is not an integer nanosecond stamp")))
}

fn parse_class(field: &str, line: usize) -> Result<DroneClass> {
    field
        .parse::<u8>()
        .ok()
        .and_then(DroneClass::new)
        .ok_or_else(|| Error::parse(line, format!("class `{field}` is not in 0..=3")))
}

fn expect_fields(line_text: &str, n: usize, line: usize) -> Result<Vec<&str>> {
    let fields = split_fields(line_text);
    if fields.len() != n {
        return Err(Error::parse(
            line,
            format!("expected {n} fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

pub fn parse_cloud<R: BufRead>(reader: R) -> Result<Vec<Point3>> {
    data_lines(reader)
        .map(|item| {
            let (line, text) = item?;
            let fields = expect_fields(&text, 3, line)?;
            parse_point(&fields, line)
        })
        .collect()
}

pub fn parse_cloud_str(text: &str) -> Result<Vec<Point3>> {
    parse_cloud(text.as_bytes())
}

pub fn write_cloud<W: Write>(points: &[Point3], mut sink: W) -> Result<()> {
    for p in points {
        writeln!(sink, "{},{},{}", p.x, p.y, p.z)?;
    }
    Ok(())
}

pub fn read_cloud_file(path: &Path) -> Result<Vec<Point3>> {
    let file = fs::File::open(path)
        .map_err(|e| Error::manifest(path, format!("cannot open cloud file: {e}")))?;
    parse_cloud(BufReader::new(file))
}

pub fn read_truth<R: BufRead>(reader: R) -> Result<Vec<TruthSample>> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        if text.starts_with("stamp_nanos") {
            continue;
        }
        let fields = expect_fields(&text, 5, line)?;
        out.push(TruthSample {
            stamp: parse_stamp(fields[0], line)?,
            position: parse_point(&fields[1..4], line)?,
            class: parse_class(fields[4], line)?,
        });
    }
    out.sort_by_key(|t| t.stamp);
    Ok(out)
}

pub fn write_truth<W: Write>(truth: &[TruthSample], mut sink: W) -> Result<()> {
    writeln!(sink, "{TRUTH_HEADER}")?;
    for t in truth {
        let p = t.position;
        writeln!(sink, "{},{},{},{},{}", t.stamp, p.x, p.y, p.z, t.class)?;
    }
    Ok(())
}

pub fn read_truth_file(path: &Path) -> Result<Vec<TruthSample>> {
    let file = fs::File::open(path)
        .map_err(|e| Error::manifest(path, format!("cannot open truth file: {e}")))?;
    read_truth(BufReader::new(file))
}

pub fn parse_zones<R: BufRead>(reader: R) -> Result<ZoneSet> {
    let mut boxes = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let fields = expect_fields(&text, 6, line)?;
        let min = parse_point(&fields[0..3], line)?;
        let max = parse_point(&fields[3..6], line)?;
        boxes.push(Aabb::new(min, max).map_err(|e| Error::parse(line, e.to_string()))?);
    }
    Ok(ZoneSet::new(boxes))
}

pub fn write_zones<W: Write>(zones: &ZoneSet, mut sink: W) -> Result<()> {
    writeln!(sink, "# xmin,ymin,zmin,xmax,ymax,zmax")?;
    for b in &zones.boxes {
        let (lo, hi) = (b.min(), b.max());
        writeln!(sink, "{},{},{},{},{},{}", lo.x, lo.y, lo.z, hi.x, hi.y, hi.z)?;
    }
    Ok(())
}

pub fn read_zones_file(path: &Path) -> Result<ZoneSet> {
    let file = fs::File::open(path)
        .map_err(|e| Error::manifest(path, format!("cannot open zone file: {e}")))?;
    parse_zones(BufReader::new(file))
}

/// Sequence id derived from a manifest path: its file stem.
pub fn sequence_id_for(manifest_path: &Path) -> String {
    manifest_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sequence".to_owned())
}

/// Loads a manifest and every cloud and truth file it references. Paths are
/// resolved relative to the manifest's directory.
pub fn load_sequence(manifest_path: &Path) -> Result<Sequence> {
    let text = fs::read_to_string(manifest_path)
        .map_err(|e| Error::manifest(manifest_path, format!("cannot read manifest: {e}")))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new(""));
    let merr = |line: usize, msg: String| Error::manifest(manifest_path, format!("line {line}: {msg}"));

    let mut frames_360 = Vec::new();
    let mut frames_avia = Vec::new();
    let mut truth = None;
    let mut seen: HashSet<(&'static str, i64)> = HashSet::new();

    for item in data_lines(text.as_bytes()) {
        let (line, text) = item?;
        let fields = split_fields(&text);
        match fields.as_slice() {
            ["truth", rel] => {
                if truth.is_some() {
                    return Err(merr(line, "more than one truth entry".into()));
                }
                let path = base.join(rel);
                truth = Some(read_truth_file(&path).map_err(|e| match e {
                    Error::Parse { line: l, message } => merr(
                        line,
                        format!("{}: line {l}: {message}", path.display()),
                    ),
                    other => other,
                })?);
            }
            [tag, stamp, rel] => {
                let sensor = SensorKind::from_tag(tag)
                    .ok_or_else(|| merr(line, format!("unknown sensor `{tag}`")))?;
                let stamp = parse_stamp(stamp, line).map_err(|e| merr(line, e.to_string()))?;
                if !seen.insert((sensor.tag(), stamp.0)) {
                    return Err(merr(
                        line,
                        format!("duplicate {} stamp {stamp}", sensor.tag()),
                    ));
                }
                let path = base.join(rel);
                let points = read_cloud_file(&path).map_err(|e| match e {
                    Error::Parse { line: l, message } => merr(
                        line,
                        format!("{}: line {l}: {message}", path.display()),
                    ),
                    other => other,
                })?;
                let frame = SensorFrame::new(sensor, stamp, points);
                match sensor {
                    SensorKind::Lidar360 => frames_360.push(frame),
                    SensorKind::LivoxAvia => frames_avia.push(frame),
                }
            }
            _ => return Err(merr(line, format!("unrecognized entry `{text}`"))),
        }
    }

    Sequence::new(sequence_id_for(manifest_path), frames_360, frames_avia, truth)
        .map_err(|e| Error::manifest(manifest_path, e.to_string()))
}

/// Writes `<dir>/<id>.manifest`, one cloud file per frame under `<dir>/<id>/`
/// and, when present, `<dir>/<id>/truth.csv`. Returns the manifest path.
pub fn save_sequence(seq: &Sequence, dir: &Path) -> Result<PathBuf> {
    let frame_dir = dir.join(seq.id());
    fs::create_dir_all(&frame_dir)?;
    let mut manifest = String::new();
    manifest.push_str("# sensor,stamp_nanos,relative_cloud_path\n");
    for frame in seq.frames_360().iter().chain(seq.frames_avia()) {
        let name = format!("{}_{}.csv", frame.sensor.tag(), frame.stamp);
        let mut buf = Vec::new();
        write_cloud(&frame.points, &mut buf)?;
        fs::write(frame_dir.join(&name), buf)?;
        manifest.push_str(&format!(
            "{},{},{}/{}\n",
            frame.sensor.tag(),
            frame.stamp,
            seq.id(),
            name
        ));
    }
    if let Some(truth) = seq.truth() {
        let mut buf = Vec::new();
        write_truth(truth, &mut buf)?;
        fs::write(frame_dir.join("truth.csv"), buf)?;
        manifest.push_str(&format!("truth,{}/truth.csv\n", seq.id()));
    }
    let path = dir.join(format!("{}.manifest", seq.id()));
    fs::write(&path, manifest)?;
    Ok(path)
}

/// Read-only view over a strictly time-sorted frame list.
#[derive(Debug, Clone, Copy)]
pub struct FrameIndex<'a> {
    frames: &'a [SensorFrame],
}

impl<'a> FrameIndex<'a> {
    pub fn new(frames: &'a [SensorFrame]) -> Result<Self> {
        if let Some(w) = frames.windows(2).find(|w| w[0].stamp >= w[1].stamp) {
            return Err(Error::Config(format!(
                "frame stamps not strictly increasing at {}",
                w[1].stamp
            )));
        }
        Ok(Self { frames })
    }

    /// The sequence constructor already enforces ordering.
    pub(crate) fn from_sorted(frames: &'a [SensorFrame]) -> Self {
        Self { frames }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn stamps(&self) -> impl Iterator<Item = Timestamp> + 'a {
        self.frames.iter().map(|f| f.stamp)
    }

    /// Frame minimizing `|stamp - t|`, ties going to the earlier frame.
    /// `tolerance` is in nanoseconds; `None` means unbounded.
    pub fn nearest(&self, t: Timestamp, tolerance: Option<u64>) -> Option<&'a SensorFrame> {
        let upper = self.frames.partition_point(|f| f.stamp < t);
        let after = self.frames.get(upper);
        let before = upper.checked_sub(1).map(|i| &self.frames[i]);
        let best = match (before, after) {
            (None, None) => return None,
            (Some(b), None) => b,
            (None, Some(a)) => a,
            (Some(b), Some(a)) => {
                if b.stamp.abs_diff(t) <= a.stamp.abs_diff(t) {
                    b
                } else {
                    a
                }
            }
        };
        match tolerance {
            Some(tol) if best.stamp.abs_diff(t) > tol => None,
            _ => Some(best),
        }
    }
}

pub fn nearest_frame<'a>(
    index: &FrameIndex<'a>,
    t: Timestamp,
    tolerance: Option<u64>,
) -> Option<&'a SensorFrame> {
    index.nearest(t, tolerance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub sequence_id: String,
    pub stamp: Timestamp,
    pub position: Point3,
    pub class: DroneClass,
    pub source: EstimateSource,
}

/// Emits the prediction CSV sorted by (sequence, stamp). Records must be
/// unique per key.
pub fn write_predictions<W: Write>(records: &[PredictionRecord], mut sink: W) -> Result<()> {
    let mut order: Vec<&PredictionRecord> = records.iter().collect();
    order.sort_by(|a, b| {
        a.sequence_id
            .cmp(&b.sequence_id)
            .then(a.stamp.cmp(&b.stamp))
    });
    if let Some(w) = order
        .windows(2)
        .find(|w| w[0].sequence_id == w[1].sequence_id && w[0].stamp == w[1].stamp)
    {
        return Err(Error::DuplicateKey {
            sequence: w[0].sequence_id.clone(),
            stamp: w[0].stamp.0,
        });
    }
    writeln!(sink, "{PREDICTION_HEADER}")?;
    for r in order {
        let p = r.position;
        writeln!(
            sink,
            "{},{},{},{},{},{},{}",
            r.sequence_id,
            r.stamp,
            p.x,
            p.y,
            p.z,
            r.class,
            r.source.tag()
        )?;
    }
    sink.flush()?;
    Ok(())
}

pub fn read_predictions<R: BufRead>(reader: R) -> Result<Vec<PredictionRecord>> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for item in data_lines(reader) {
        let (line, text) = item?;
        if !header_seen {
            if text != PREDICTION_HEADER {
                return Err(Error::parse(
                    line,
                    format!("expected header `{PREDICTION_HEADER}`"),
                ));
            }
            header_seen = true;
            continue;
        }
        let fields = expect_fields(&text, 7, line)?;
        out.push(PredictionRecord {
            sequence_id: fields[0].to_owned(),
            stamp: parse_stamp(fields[1], line)?,
            position: parse_point(&fields[2..5], line)?,
            class: parse_class(fields[5], line)?,
            source: EstimateSource::from_tag(fields[6])
                .ok_or_else(|| Error::parse(line, format!("unknown source `{}`", fields[6])))?,
        });
    }
    Ok(out)
}
