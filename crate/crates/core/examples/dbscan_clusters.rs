// Density clustering of a small cloud: two blobs and a stray point.

use cldet::clustering::{dbscan, DbscanParams};
use cldet::Point3;

pub fn run_example() -> cldet::Result<()> {
    let mut cloud = Vec::new();
    for i in 0..6 {
        let d = i as f64 * 0.3;
        cloud.push(Point3::new(d, 0.0, 0.0));
        cloud.push(Point3::new(20.0 + d, 5.0, 1.0));
    }
    cloud.push(Point3::new(-40.0, 40.0, 10.0));

    let params = DbscanParams::new(1.0, 2)?;
    let labels = dbscan(&cloud, &params);
    println!("clusters: {}", labels.n_clusters());
    println!("sizes:    {:?}", labels.cluster_sizes());
    println!("noise:    {}", labels.noise_count());
    if let Some((id, size)) = labels.largest_cluster() {
        println!("largest:  cluster {id} with {size} points");
    }
    assert_eq!(labels.n_clusters(), 2);
    assert_eq!(labels.noise_count(), 1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cldet::Result<()> {
    run_example()
}
