// Generates a seeded scene and saves it as a manifest with cloud files.

use cldet::dataio::{load_sequence, save_sequence};
use cldet::synthgen::{generate_scene, DronePath, SceneSpec};
use cldet::Point3;

pub fn run_example() -> cldet::Result<()> {
    let spec = SceneSpec {
        id: "orbit".into(),
        n_frames: 8,
        drone_path: DronePath::Circular {
            center: Point3::new(0.0, -10.0, 33.0),
            radius: 4.0,
            rate: 0.5,
        },
        ..SceneSpec::default()
    };
    let scene = generate_scene(&spec)?;
    println!(
        "{} frames per sensor, {} points in the first 360 frame, clearance {:.2} m",
        scene.sequence.frames_360().len(),
        scene.sequence.frames_360()[0].points.len(),
        spec.clutter_clearance().unwrap_or(f64::INFINITY)
    );

    let dir = tempfile::tempdir()?;
    let manifest = save_sequence(&scene.sequence, dir.path())?;
    println!("saved {}", manifest.display());
    let reloaded = load_sequence(&manifest)?;
    assert_eq!(reloaded, scene.sequence);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cldet::Result<()> {
    run_example()
}
