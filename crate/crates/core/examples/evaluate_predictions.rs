// Scoring predictions against ground truth.

use std::collections::BTreeMap;

use cldet::dataio::PredictionRecord;
use cldet::evaluation::{accuracy, evaluate, pose_mse};
use cldet::model::{DroneClass, EstimateSource, TruthSample};
use cldet::{Point3, Timestamp};

pub fn run_example() -> cldet::Result<()> {
    let mse = pose_mse(&[(Point3::ORIGIN, Point3::new(1.0, 2.0, 2.0))])?;
    println!("single-pair mse: {mse}");
    assert_eq!(mse, 9.0);

    let c = |l| DroneClass::new(l).unwrap();
    let acc = accuracy(&[(c(0), c(0)), (c(1), c(1)), (c(2), c(3))])?;
    println!("accuracy: {acc:.6}");

    let truth: Vec<TruthSample> = (0..3)
        .map(|i| TruthSample {
            stamp: Timestamp(i * 100),
            position: Point3::new(i as f64, 0.0, 30.0),
            class: c(2),
        })
        .collect();
    let preds: Vec<PredictionRecord> = truth
        .iter()
        .map(|t| PredictionRecord {
            sequence_id: "s".into(),
            stamp: t.stamp,
            position: t.position + Point3::new(0.0, 0.5, 0.0),
            class: c(2),
            source: EstimateSource::Lidar360,
        })
        .collect();
    let report = evaluate(&preds, &BTreeMap::from([("s".to_string(), truth)]))?;
    print!("{report}");
    print!("{}", report.to_csv());
    assert!((report.pose_mse - 0.25).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cldet::Result<()> {
    run_example()
}
