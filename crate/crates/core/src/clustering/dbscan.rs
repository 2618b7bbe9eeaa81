use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::Point3;

use super::ClusterLabels;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbscanParams {
    pub eps: f64,
    pub min_pts: usize,
}

impl DbscanParams {
    pub fn new(eps: f64, min_pts: usize) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive and finite, got {eps}")));
        }
        if min_pts == 0 {
            return Err(Error::Config("min_pts must be at least 1".into()));
        }
        Ok(Self { eps, min_pts })
    }
}

impl Default for DbscanParams {
    fn default() -> Self {
        Self {
            eps: crate::model::DEFAULT_DBSCAN_EPS,
            min_pts: crate::model::DEFAULT_DBSCAN_MIN_PTS,
        }
    }
}

type CellKey = (i64, i64, i64);

/// Uniform grid with cell edge slightly above `eps`: every point within
/// distance `eps` of a query lies in the 3x3x3 block of cells around the
/// query's cell, even after rounding in the cell-key computation.
struct Grid<'a> {
    points: &'a [Point3],
    eps_sq: f64,
    inv_cell: f64,
    cells: HashMap<CellKey, Vec<usize>>,
}

impl<'a> Grid<'a> {
    fn new(points: &'a [Point3], eps: f64) -> Self {
        let inv_cell = 1.0 / (eps * (1.0 + 1e-6));
        let mut cells: HashMap<CellKey, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, inv_cell)).or_default().push(i);
        }
        Self {
            points,
            eps_sq: eps * eps,
            inv_cell,
            cells,
        }
    }

    fn key(p: &Point3, inv_cell: f64) -> CellKey {
        (
            (p.x * inv_cell).floor() as i64,
            (p.y * inv_cell).floor() as i64,
            (p.z * inv_cell).floor() as i64,
        )
    }

    /// Indices within closed distance eps of point `i`, itself included.
    fn neighbors(&self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        let p = &self.points[i];
        let (cx, cy, cz) = Self::key(p, self.inv_cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) {
                        out.extend(
                            bucket
                                .iter()
                                .copied()
                                .filter(|&j| p.dist_sq(&self.points[j]) <= self.eps_sq),
                        );
                    }
                }
            }
        }
    }
}

/// Density clustering with a closed eps-ball; the neighbor count includes
/// the point itself.
///
/// Clusters are numbered in order of their lowest-index core point. A border
/// point reachable from several clusters belongs to the lowest-numbered one.
/// With `min_pts == 1` every point is core, so the result is exactly the
/// connected components of the eps-neighborhood graph and no point is noise.
pub fn dbscan(points: &[Point3], params: &DbscanParams) -> ClusterLabels {
    let n = points.len();
    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut n_clusters = 0;
    if n == 0 {
        return ClusterLabels::new(labels, 0);
    }

    let grid = Grid::new(points, params.eps);
    // Noise decisions are final for a point only once it is known non-core.
    let mut checked = vec![false; n];
    let mut neigh = Vec::new();
    let mut stack = Vec::new();

    for i in 0..n {
        if labels[i].is_some() || checked[i] {
            continue;
        }
        grid.neighbors(i, &mut neigh);
        checked[i] = true;
        if neigh.len() < params.min_pts {
            continue;
        }
        let cluster = n_clusters;
        n_clusters += 1;
        labels[i] = Some(cluster);
        stack.extend(neigh.iter().copied().filter(|&j| labels[j].is_none()));

        while let Some(j) = stack.pop() {
            if labels[j].is_some() {
                continue;
            }
            labels[j] = Some(cluster);
            grid.neighbors(j, &mut neigh);
            checked[j] = true;
            if neigh.len() >= params.min_pts {
                stack.extend(neigh.iter().copied().filter(|&m| labels[m].is_none()));
            }
        }
    }

    ClusterLabels::new(labels, n_clusters)
}
