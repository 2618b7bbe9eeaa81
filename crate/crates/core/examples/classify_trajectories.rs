// Trains the nearest-centroid class model on synthetic flights and labels a
// held-out one.

use cldet::classification::{classify_trajectory, extract_features, train, ClassifierModel};
use cldet::estimation::estimate_sequence;
use cldet::model::{DroneClass, PipelineConfig};
use cldet::synthgen::{generate_scene, DronePath, SceneSpec};
use cldet::Point3;

fn flight(seed: u64, class: u8) -> cldet::Result<Vec<cldet::PoseEstimate>> {
    let path = match class {
        0 => DronePath::Hover(Point3::new(0.0, -10.0, 33.0)),
        _ => DronePath::Linear {
            from: Point3::new(-8.0, -10.0, 25.0),
            to: Point3::new(8.0, -2.0, 40.0),
        },
    };
    let spec = SceneSpec {
        id: format!("f{seed}"),
        seed,
        drone_path: path,
        class_label: DroneClass::new(class).expect("valid class"),
        ..SceneSpec::default()
    };
    let scene = generate_scene(&spec)?;
    let cfg = PipelineConfig {
        zone_set: scene.zones,
        ..PipelineConfig::default()
    };
    Ok(estimate_sequence(&scene.sequence, &cfg))
}

pub fn run_example() -> cldet::Result<()> {
    let mut labeled = Vec::new();
    for seed in 0..4 {
        for class in [0u8, 1] {
            let feats = extract_features(&flight(seed, class)?)?;
            labeled.push((feats, DroneClass::new(class).unwrap()));
        }
    }
    let model = train(&labeled)?;
    let mut file = Vec::new();
    model.write(&mut file)?;
    print!("{}", String::from_utf8_lossy(&file));
    let model = ClassifierModel::read(file.as_slice())?;

    let held_out = flight(99, 1)?;
    let class = classify_trajectory(&model, &held_out);
    println!("held-out flight classified as {}", class.label());
    assert_eq!(class.label(), 1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cldet::Result<()> {
    run_example()
}
