// K-Means over three separated blobs, then the elbow curve and its knee.

use cldet::clustering::{elbow_curve, kmeans, knee_point, KMeansConfig};
use cldet::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> cldet::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let centers = [
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(50.0, 0.0, 0.0),
        Point3::new(0.0, 50.0, 0.0),
    ];
    let mut cloud = Vec::new();
    for c in centers {
        for _ in 0..10 {
            let jitter = Point3::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            );
            cloud.push(c + jitter);
        }
    }

    let cfg = KMeansConfig::new(3).with_seed(5).with_restarts(10);
    let fit = kmeans(&cloud, &cfg)?;
    println!("k=3 sse {:.4} after {} iterations", fit.sse, fit.iterations);
    for c in &fit.centroids {
        println!("  centroid {c}");
    }

    let curve = elbow_curve(&cloud, 1, 8, &cfg)?;
    print!("{}", curve.to_csv());
    let knee = knee_point(&curve)?;
    println!("knee: k={knee}");
    assert!(curve.is_non_increasing());
    assert_eq!(knee, 3);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cldet::Result<()> {
    run_example()
}
