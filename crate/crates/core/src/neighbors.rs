//! Periodic bucket grid for fixed-radius neighbor queries on the torus.

use crate::geometry::torus_dist2;
use crate::sampling::PointCloud;

const MAX_CELLS: usize = 1 << 22;

/// Uniform grid of `m^d` cells of side `1/m` over the unit torus.
pub(crate) struct PeriodicGrid<'a> {
    cloud: &'a PointCloud,
    per_axis: usize,
    cell_side: f64,
    cell_start: Vec<u32>,
    cell_points: Vec<u32>,
}

impl<'a> PeriodicGrid<'a> {
    /// Grid whose cells have side at least `min_side`.
    pub(crate) fn new(cloud: &'a PointCloud, min_side: f64) -> Self {
        let d = cloud.dim();
        let mut per_axis = if min_side > 0.0 {
            ((1.0 / min_side).floor() as usize).max(1)
        } else {
            1
        };
        // cap memory; coarser cells only cost extra distance checks
        let budget = MAX_CELLS.min(4 * cloud.len().max(1));
        while per_axis > 1 && (per_axis as f64).powi(d as i32) > budget as f64 {
            per_axis -= 1;
        }
        let ncells = per_axis.pow(d as u32);
        let mut counts = vec![0u32; ncells + 1];
        let cell_of: Vec<usize> = cloud.iter().map(|p| Self::cell_index(p, per_axis)).collect();
        for &c in &cell_of {
            counts[c + 1] += 1;
        }
        for i in 0..ncells {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut cell_points = vec![0u32; cloud.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            cell_points[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Self {
            cloud,
            per_axis,
            cell_side: 1.0 / per_axis as f64,
            cell_start: counts,
            cell_points,
        }
    }

    fn axis_cell(x: f64, per_axis: usize) -> usize {
        ((x * per_axis as f64) as usize).min(per_axis - 1)
    }

    fn cell_index(p: &[f64], per_axis: usize) -> usize {
        p.iter()
            .rev()
            .fold(0, |acc, &x| acc * per_axis + Self::axis_cell(x, per_axis))
    }

    /// Calls `visit(index, squared_distance)` for every point within `radius`
    /// of `center` (toroidal metric, closed ball). Visit order is unspecified.
    pub(crate) fn for_each_within<F: FnMut(usize, f64)>(&self, center: &[f64], radius: f64, mut visit: F) {
        let d = self.cloud.dim();
        let m = self.per_axis;
        let reach = (radius / self.cell_side).ceil() as usize;
        let r2 = radius * radius;
        let axes: Vec<Vec<usize>> = center
            .iter()
            .map(|&x| {
                if 2 * reach + 1 >= m {
                    (0..m).collect()
                } else {
                    let c = Self::axis_cell(x, m);
                    (0..=2 * reach).map(|o| (c + m + o - reach) % m).collect()
                }
            })
            .collect();
        let mut odometer = vec![0usize; d];
        loop {
            let mut cell = 0;
            for axis in (0..d).rev() {
                cell = cell * m + axes[axis][odometer[axis]];
            }
            let (lo, hi) = (self.cell_start[cell] as usize, self.cell_start[cell + 1] as usize);
            for &j in &self.cell_points[lo..hi] {
                let j = j as usize;
                let d2 = torus_dist2(center, self.cloud.point(j));
                if d2 <= r2 {
                    visit(j, d2);
                }
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    return;
                }
                odometer[axis] += 1;
                if odometer[axis] < axes[axis].len() {
                    break;
                }
                odometer[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Smallest squared distance from `center` to a cloud point within
    /// `radius`, or `None` when that ball is empty.
    pub(crate) fn nearest_within(&self, center: &[f64], radius: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        self.for_each_within(center, radius, |_, d2| {
            if best.is_none_or(|b| d2 < b) {
                best = Some(d2);
            }
        });
        best
    }
}

/// Symmetric adjacency lists of the proximity graph `{(i,j) : ρ(x_i,x_j) ≤ threshold}`.
pub(crate) struct ProximityGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl ProximityGraph {
    pub(crate) fn build(cloud: &PointCloud, threshold: f64) -> Self {
        let grid = PeriodicGrid::new(cloud, threshold);
        let mut offsets = Vec::with_capacity(cloud.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        let mut scratch = Vec::new();
        for i in 0..cloud.len() {
            scratch.clear();
            grid.for_each_within(cloud.point(i), threshold, |j, _| {
                if j != i {
                    scratch.push(j as u32);
                }
            });
            scratch.sort_unstable();
            neighbors.extend_from_slice(&scratch);
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    /// Neighbors of `i`, ascending.
    pub(crate) fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub(crate) fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    /// All pairs `(i, j)` with `i < j`, lexicographic.
    pub(crate) fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| {
                self.neighbors(i)
                    .iter()
                    .filter(move |&&j| j as usize > i)
                    .map(move |&j| (i, j as usize))
            })
            .collect()
    }
}
