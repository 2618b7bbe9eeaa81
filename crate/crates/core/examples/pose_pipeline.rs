// The per-timestamp estimation chain: LiDAR 360 clustering, the Avia mean,
// and the fixed fallback position.

use cldet::estimation::estimate_pose;
use cldet::model::{PipelineConfig, SensorFrame, SensorKind, ZoneSet, DEFAULT_FALLBACK};
use cldet::synthgen::{generate_scene, SceneSpec};
use cldet::{Point3, Sequence, Timestamp};

pub fn run_example() -> cldet::Result<()> {
    let scene = generate_scene(&SceneSpec::default())?;
    let cfg = PipelineConfig {
        zone_set: scene.zones.clone(),
        ..PipelineConfig::default()
    };
    let t = scene.sequence.query_stamps()[3];
    let est = estimate_pose(&scene.sequence, t, &cfg);
    println!("{} -> {} via {}", t.nanos(), est.position(), est.source().tag());

    // Without zones the ground slab is the biggest cluster.
    let unfiltered = estimate_pose(&scene.sequence, t, &PipelineConfig::default());
    println!("no zones -> {} via {}", unfiltered.position(), unfiltered.source().tag());

    // Avia only: rows at the origin are dropped before averaging.
    let avia = SensorFrame::new(
        SensorKind::LivoxAvia,
        Timestamp(0),
        vec![Point3::ORIGIN, Point3::new(1.0, 2.0, 3.0), Point3::new(3.0, 2.0, 1.0)],
    );
    let seq = Sequence::new("avia-only", vec![], vec![avia], None)?;
    let est = estimate_pose(&seq, Timestamp(0), &PipelineConfig::default());
    println!("avia only -> {} via {}", est.position(), est.source().tag());
    assert_eq!(est.position(), Point3::new(2.0, 2.0, 2.0));

    // No frames at all.
    let empty = Sequence::new("empty", vec![], vec![], None)?;
    let cfg = PipelineConfig {
        zone_set: ZoneSet::default(),
        ..PipelineConfig::default()
    };
    let est = estimate_pose(&empty, Timestamp(5), &cfg);
    println!("no frames -> {} via {}", est.position(), est.source().tag());
    assert_eq!(est.position(), DEFAULT_FALLBACK);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cldet::Result<()> {
    run_example()
}
