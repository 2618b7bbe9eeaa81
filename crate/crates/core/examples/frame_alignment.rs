// Cloud files and nearest-frame lookup with an optional time tolerance.

use cldet::dataio::{parse_cloud_str, write_cloud, FrameIndex};
use cldet::model::{SensorFrame, SensorKind};
use cldet::Timestamp;

pub fn run_example() -> cldet::Result<()> {
    let cloud = parse_cloud_str("# x,y,z\n1.5,-2,30\n0.1,0.2,0.3\n")?;
    let mut text = Vec::new();
    write_cloud(&cloud, &mut text)?;
    print!("{}", String::from_utf8_lossy(&text));
    assert_eq!(parse_cloud_str(std::str::from_utf8(&text).unwrap())?, cloud);

    let frames: Vec<SensorFrame> = [0i64, 100, 200, 300]
        .iter()
        .map(|&t| SensorFrame::new(SensorKind::Lidar360, Timestamp(t), cloud.clone()))
        .collect();
    let index = FrameIndex::new(&frames)?;
    for (query, tol) in [(140, None), (150, None), (260, Some(30)), (260, Some(50))] {
        let hit = index.nearest(Timestamp(query), tol).map(|f| f.stamp.nanos());
        println!("query {query} tolerance {tol:?} -> {hit:?}");
    }
    assert_eq!(index.nearest(Timestamp(150), None).unwrap().stamp, Timestamp(100));
    assert!(index.nearest(Timestamp(260), Some(30)).is_none());
    Ok(())
}

#[allow(dead_code)]
fn main() -> cldet::Result<()> {
    run_example()
}
