//! Seeded synthetic scenes: a drone point cluster following a known path,
//! static clutter boxes and Avia frames padded with `(0, 0, 0)` returns.
//!
//! The zone set returned with a scene is exactly the clutter boxes, so a
//! correct pipeline sees only drone points after environment subtraction.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    Aabb, DroneClass, Point3, SensorFrame, SensorKind, Sequence, Timestamp, TruthSample, ZoneSet,
};

#[derive(Debug, Clone, PartialEq)]
pub enum DronePath {
    Hover(Point3),
    /// Straight line from `from` (first frame) to `to` (last frame).
    Linear { from: Point3, to: Point3 },
    /// Horizontal circle; `rate` in radians per second.
    Circular {
        center: Point3,
        radius: f64,
        rate: f64,
    },
}

impl DronePath {
    /// Position at frame `i` of `n`, with `t` seconds since the first frame.
    pub fn position(&self, i: usize, n: usize, t: f64) -> Point3 {
        match self {
            DronePath::Hover(p) => *p,
            DronePath::Linear { from, to } => {
                if n <= 1 {
                    *from
                } else {
                    let a = i as f64 / (n - 1) as f64;
                    *from + (*to - *from) * a
                }
            }
            DronePath::Circular {
                center,
                radius,
                rate,
            } => {
                let phase = rate * t;
                *center + Point3::new(radius * phase.cos(), radius * phase.sin(), 0.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClutterBox {
    pub region: Aabb,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub id: String,
    pub seed: u64,
    pub n_frames: usize,
    /// Nanoseconds between frames.
    pub frame_period: i64,
    pub drone_path: DronePath,
    pub drone_points_per_frame: usize,
    pub drone_radius: f64,
    pub clutter: Vec<ClutterBox>,
    /// Fraction of each Avia frame's rows that are `(0, 0, 0)`.
    pub avia_zero_noise_fraction: f64,
    pub class_label: DroneClass,
}

impl Default for SceneSpec {
    fn default() -> Self {
        let ground = Aabb::new(Point3::new(-30.0, -40.0, -2.0), Point3::new(30.0, 10.0, 0.5))
            .expect("valid box");
        let building =
            Aabb::new(Point3::new(15.0, -25.0, 0.5), Point3::new(25.0, -15.0, 12.0)).expect("valid box");
        Self {
            id: "scene".into(),
            seed: 7,
            n_frames: 20,
            frame_period: 100_000_000,
            drone_path: DronePath::Hover(Point3::new(0.0, -10.0, 33.0)),
            drone_points_per_frame: 12,
            drone_radius: 0.5,
            clutter: vec![
                ClutterBox {
                    region: ground,
                    points: 400,
                },
                ClutterBox {
                    region: building,
                    points: 150,
                },
            ],
            avia_zero_noise_fraction: 0.25,
            class_label: DroneClass::new(0).expect("valid class"),
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Spec(m.to_owned()));
        if self.n_frames == 0 {
            return fail("n_frames must be at least 1");
        }
        if self.frame_period <= 0 {
            return fail("frame_period must be positive");
        }
        if self.drone_points_per_frame == 0 {
            return fail("drone_points_per_frame must be at least 1");
        }
        if !(self.drone_radius > 0.0 && self.drone_radius.is_finite()) {
            return fail("drone_radius must be positive and finite");
        }
        if !(0.0..=1.0).contains(&self.avia_zero_noise_fraction) {
            return fail("avia_zero_noise_fraction must lie in [0, 1]");
        }
        let finite = match &self.drone_path {
            DronePath::Hover(p) => p.is_finite(),
            DronePath::Linear { from, to } => from.is_finite() && to.is_finite(),
            DronePath::Circular {
                center,
                radius,
                rate,
            } => center.is_finite() && radius.is_finite() && *radius >= 0.0 && rate.is_finite(),
        };
        if !finite {
            return fail("drone path must be finite");
        }
        Ok(())
    }

    pub fn stamp(&self, i: usize) -> Timestamp {
        Timestamp(i as i64 * self.frame_period)
    }

    pub fn path_positions(&self) -> Vec<Point3> {
        (0..self.n_frames)
            .map(|i| {
                let t = self.stamp(i).seconds_since(Timestamp(0));
                self.drone_path.position(i, self.n_frames, t)
            })
            .collect()
    }

    /// Smallest distance between any clutter box and any path position.
    /// `None` without clutter.
    pub fn clutter_clearance(&self) -> Option<f64> {
        let path = self.path_positions();
        self.clutter
            .iter()
            .flat_map(|c| path.iter().map(move |p| c.region.distance_to(p)))
            .reduce(f64::min)
    }

    /// Number of `(0, 0, 0)` rows added to each Avia frame.
    pub fn avia_zero_rows(&self) -> usize {
        let f = self.avia_zero_noise_fraction;
        let n = self.drone_points_per_frame as f64;
        if f >= 1.0 {
            self.drone_points_per_frame
        } else {
            (f * n / (1.0 - f)).round() as usize
        }
    }

    /// Throughput scene: `points_per_frame` LiDAR 360 points per frame, of
    /// which 40 (or half, for tiny frames) belong to a drone circling above
    /// a ground slab and two buildings.
    pub fn benchmark(n_frames: usize, points_per_frame: usize, seed: u64) -> Result<Self> {
        if points_per_frame < 2 {
            return Err(Error::Spec("benchmark frames need at least 2 points".into()));
        }
        let drone = 40.min(points_per_frame / 2);
        let clutter = points_per_frame - drone;
        let ground = clutter * 3 / 5;
        let tower = (clutter - ground) / 2;
        let boxes = [
            (Point3::new(-60.0, -60.0, -2.0), Point3::new(60.0, 60.0, 0.5), ground),
            (Point3::new(20.0, -30.0, 0.5), Point3::new(30.0, -20.0, 15.0), tower),
            (Point3::new(-35.0, 10.0, 0.5), Point3::new(-25.0, 20.0, 18.0), clutter - ground - tower),
        ];
        let clutter = boxes
            .into_iter()
            .map(|(lo, hi, n)| Aabb::new(lo, hi).map(|region| ClutterBox { region, points: n }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            id: "bench".into(),
            seed,
            n_frames,
            frame_period: 100_000_000,
            drone_path: DronePath::Circular {
                center: Point3::new(0.734, -9.739, 33.353),
                radius: 6.0,
                rate: 0.4,
            },
            drone_points_per_frame: drone,
            drone_radius: 0.5,
            clutter,
            avia_zero_noise_fraction: 0.5,
            class_label: DroneClass::new(0).expect("valid class"),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub sequence: Sequence,
    pub zones: ZoneSet,
}

/// Uniform sample in a ball, by rejection from the bounding cube.
fn sample_ball<R: Rng>(rng: &mut R, center: Point3, radius: f64) -> Point3 {
    loop {
        let v = Point3::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        );
        if v.norm_sq() <= 1.0 {
            return center + v * radius;
        }
    }
}

fn sample_box<R: Rng>(rng: &mut R, b: &Aabb) -> Point3 {
    let (lo, hi) = (b.min(), b.max());
    Point3::new(
        rng.gen_range(lo.x..=hi.x),
        rng.gen_range(lo.y..=hi.y),
        rng.gen_range(lo.z..=hi.z),
    )
}

pub fn generate_scene(spec: &SceneSpec) -> Result<Scene> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let zero_rows = spec.avia_zero_rows();
    let all_zero = spec.avia_zero_noise_fraction >= 1.0;
    let clutter_total: usize = spec.clutter.iter().map(|c| c.points).sum();

    let mut frames_360 = Vec::with_capacity(spec.n_frames);
    let mut frames_avia = Vec::with_capacity(spec.n_frames);
    let mut truth = Vec::with_capacity(spec.n_frames);

    for (i, pos) in spec.path_positions().into_iter().enumerate() {
        let stamp = spec.stamp(i);
        let drone: Vec<Point3> = (0..spec.drone_points_per_frame)
            .map(|_| sample_ball(&mut rng, pos, spec.drone_radius))
            .collect();

        let mut cloud = Vec::with_capacity(clutter_total + drone.len());
        for c in &spec.clutter {
            cloud.extend((0..c.points).map(|_| sample_box(&mut rng, &c.region)));
        }
        cloud.extend_from_slice(&drone);
        frames_360.push(SensorFrame::new(SensorKind::Lidar360, stamp, cloud));

        let mut avia = vec![Point3::ORIGIN; zero_rows];
        if !all_zero {
            avia.extend_from_slice(&drone);
        }
        frames_avia.push(SensorFrame::new(SensorKind::LivoxAvia, stamp, avia));

        truth.push(TruthSample {
            stamp,
            position: pos,
            class: spec.class_label,
        });
    }

    Ok(Scene {
        sequence: Sequence::new(spec.id.clone(), frames_360, frames_avia, Some(truth))?,
        zones: ZoneSet::new(spec.clutter.iter().map(|c| c.region).collect()),
    })
}
