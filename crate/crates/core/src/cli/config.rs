//! Settings merged from flags, an optional `key=value` config file and
//! built-in defaults, in that order of precedence.
//!
//! Recognized file keys: `eps`, `min_pts`, `zones`, `fallback`,
//! `tolerance_ns`, `seed`, `model`, `out`. Relative paths in the file are
//! resolved against the file's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dataio::read_zones_file;
use crate::error::{Error, Result};
use crate::model::{PipelineConfig, Point3};

const KNOWN_KEYS: &[&str] = &[
    "eps",
    "min_pts",
    "zones",
    "fallback",
    "tolerance_ns",
    "seed",
    "model",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tolerance {
    Unbounded,
    Nanos(u64),
}

impl Tolerance {
    pub fn as_option(self) -> Option<u64> {
        match self {
            Tolerance::Unbounded => None,
            Tolerance::Nanos(n) => Some(n),
        }
    }
}

impl FromStr for Tolerance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "inf" | "unbounded" => Ok(Tolerance::Unbounded),
            n => n
                .parse::<u64>()
                .map(Tolerance::Nanos)
                .map_err(|_| format!("`{s}` is neither a nanosecond count nor `inf`")),
        }
    }
}

pub fn parse_point(s: &str) -> Result<Point3, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("`{s}` is not X,Y,Z"))?;
    match v.as_slice() {
        [x, y, z] => Point3::try_new(*x, *y, *z).ok_or_else(|| format!("`{s}` is not finite")),
        _ => Err(format!("`{s}` is not X,Y,Z")),
    }
}

/// Flag values as given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct PipelineOverrides {
    pub config: Option<PathBuf>,
    pub zones: Option<PathBuf>,
    pub eps: Option<f64>,
    pub min_pts: Option<usize>,
    pub fallback: Option<Point3>,
    pub tolerance: Option<Tolerance>,
    pub seed: Option<u64>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub pipeline: PipelineConfig,
    pub zones_path: Option<PathBuf>,
    pub seed: u64,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Raw `key=value` pairs of a config file.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| {
            Error::Config(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        let k = k.trim();
        if !KNOWN_KEYS.contains(&k) {
            return Err(Error::Config(format!(
                "{}:{}: unknown key `{k}`",
                path.display(),
                i + 1
            )));
        }
        map.insert(k.to_owned(), v.trim().to_owned());
    }
    Ok(map)
}

fn file_value<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| Error::Config(format!("config key `{key}`: {e}")))
        })
        .transpose()
}

impl CliConfig {
    pub fn resolve(flags: &PipelineOverrides) -> Result<Self> {
        let (file, base) = match &flags.config {
            Some(p) => (
                read_config_file(p)?,
                p.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (BTreeMap::new(), PathBuf::new()),
        };
        let file_path = |key: &str| file.get(key).map(|v| base.join(v));

        let defaults = PipelineConfig::default();
        let zones_path = flags.zones.clone().or_else(|| file_path("zones"));
        let zone_set = match &zones_path {
            Some(p) => read_zones_file(p)?,
            None => defaults.zone_set.clone(),
        };
        let fallback = match flags.fallback {
            Some(p) => p,
            None => match file.get("fallback") {
                Some(v) => parse_point(v).map_err(|e| Error::Config(format!("config key `fallback`: {e}")))?,
                None => defaults.fallback_position,
            },
        };
        let tolerance = match flags.tolerance {
            Some(t) => t.as_option(),
            None => match file_value::<Tolerance>(&file, "tolerance_ns")? {
                Some(t) => t.as_option(),
                None => defaults.time_tolerance,
            },
        };

        let pipeline = PipelineConfig {
            dbscan_eps: match flags.eps {
                Some(v) => v,
                None => file_value(&file, "eps")?.unwrap_or(defaults.dbscan_eps),
            },
            dbscan_min_pts: match flags.min_pts {
                Some(v) => v,
                None => file_value(&file, "min_pts")?.unwrap_or(defaults.dbscan_min_pts),
            },
            zone_set,
            time_tolerance: tolerance,
            fallback_position: fallback,
        };
        pipeline.validate()?;

        Ok(Self {
            pipeline,
            zones_path,
            seed: match flags.seed {
                Some(s) => s,
                None => file_value(&file, "seed")?.unwrap_or(0),
            },
            model: flags.model.clone().or_else(|| file_path("model")),
            out: flags.out.clone().or_else(|| file_path("out")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DEFAULT_FALLBACK;

    #[test]
    fn defaults_without_flags_or_file() {
        let c = CliConfig::resolve(&PipelineOverrides::default()).unwrap();
        assert_eq!(c.pipeline, PipelineConfig::default());
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("z.zones"), "0,0,0,1,1,1\n").unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(
            &cfg,
            "# run\neps = 3.5\nmin_pts=2\nzones=z.zones\nseed=9\ntolerance_ns=inf\nfallback=1,2,3\n",
        )
        .unwrap();

        let file_only = CliConfig::resolve(&PipelineOverrides {
            config: Some(cfg.clone()),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(file_only.pipeline.dbscan_eps, 3.5);
        assert_eq!(file_only.pipeline.dbscan_min_pts, 2);
        assert_eq!(file_only.pipeline.zone_set.boxes.len(), 1);
        assert_eq!(file_only.pipeline.fallback_position, Point3::new(1.0, 2.0, 3.0));
        assert_eq!(file_only.seed, 9);

        let flagged = CliConfig::resolve(&PipelineOverrides {
            config: Some(cfg),
            eps: Some(1.0),
            seed: Some(4),
            fallback: Some(DEFAULT_FALLBACK),
            tolerance: Some(Tolerance::Nanos(5)),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(flagged.pipeline.dbscan_eps, 1.0);
        assert_eq!(flagged.pipeline.dbscan_min_pts, 2);
        assert_eq!(flagged.seed, 4);
        assert_eq!(flagged.pipeline.fallback_position, DEFAULT_FALLBACK);
        assert_eq!(flagged.pipeline.time_tolerance, Some(5));
    }

    #[test]
    fn bad_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.cfg");
        fs::write(&cfg, "colour=blue\n").unwrap();
        let flags = PipelineOverrides {
            config: Some(cfg.clone()),
            ..Default::default()
        };
        assert!(CliConfig::resolve(&flags).is_err());
        fs::write(&cfg, "eps=-1\n").unwrap();
        assert!(CliConfig::resolve(&flags).is_err());
    }

    #[test]
    fn tolerance_and_point_parsing() {
        assert_eq!("inf".parse::<Tolerance>().unwrap(), Tolerance::Unbounded);
        assert_eq!("250".parse::<Tolerance>().unwrap(), Tolerance::Nanos(250));
        assert!("-3".parse::<Tolerance>().is_err());
        assert_eq!(parse_point("0.734,-9.739,33.353").unwrap(), DEFAULT_FALLBACK);
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("1,nan,2").is_err());
    }
}
