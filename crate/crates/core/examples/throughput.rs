// Predictions per second of the estimation loop on a synthetic sequence.
// Run with `--release` for representative numbers.

use cldet::evaluation::{measure_throughput, MonotonicClock};
use cldet::model::PipelineConfig;
use cldet::synthgen::{generate_scene, SceneSpec};

pub fn run_example() -> cldet::Result<()> {
    let frames = std::env::var("CLDET_FRAMES").ok().and_then(|v| v.parse().ok()).unwrap_or(40);
    let points = std::env::var("CLDET_POINTS").ok().and_then(|v| v.parse().ok()).unwrap_or(2_000);
    let scene = generate_scene(&SceneSpec::benchmark(frames, points, 1)?)?;
    let cfg = PipelineConfig {
        zone_set: scene.zones,
        ..PipelineConfig::default()
    };
    let tp = measure_throughput(&[scene.sequence], &cfg, &MonotonicClock::new(), 3)?;
    println!(
        "{frames} frames x {points} points: {:.1} predictions/s (spread {:.1})",
        tp.mean(),
        tp.spread()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> cldet::Result<()> {
    run_example()
}
