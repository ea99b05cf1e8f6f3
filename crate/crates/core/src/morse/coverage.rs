//! Coverage test `T^d ⊆ U(P, r)`.
//!
//! A cubic net with spacing `h ≤ 2s/√d`, `s = r/4`, puts every point of the
//! torus within `s` of a net point `g`. Since `ρ_P` is 1-Lipschitz, net points
//! with `ρ_P(g) ≤ r − s` certify their cell. The maximum of `ρ_P` is an
//! index-`d` critical point `c` with value `R`; if `R > r` it lies within `s`
//! of a suspect net point (`ρ_P(g) > r − s`), its generators lie within
//! `R + s ≤ r + 2s` of `g`, and so does every point that could violate the
//! empty-ball condition. Searching those local sets is therefore exhaustive.
//! Conversely any circumcenter whose open ball of radius `R > r` is empty
//! has `ρ_P ≥ R`, so a hit is an exact witness even when the generators are
//! cocircular with further points.

use super::SPHERE_REL_TOL;
use crate::affine::circumsphere;
use crate::error::{Error, Result};
use crate::geometry::{lift_into, GeometryContext};
use crate::neighbors::PeriodicGrid;
use crate::sampling::PointCloud;

/// Whether the union of closed `r`-balls around the cloud covers the torus.
///
/// Returns `Err(Error::Escalation)` if an uncovered witness has a critical
/// value above `r_max`.
pub fn is_covered(cloud: &PointCloud, r: f64, ctx: &GeometryContext) -> Result<bool> {
    ctx.check_dim(cloud.dim())?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if r >= ctx.r_max {
        return Err(Error::Domain(format!(
            "radius {r} exceeds r_max = r_conv/3 = {}",
            ctx.r_max
        )));
    }
    if cloud.is_empty() {
        return Ok(false);
    }
    let d = ctx.dim;
    let s = r / 4.0;
    let reach = r + 2.0 * s;
    let per_axis = ((d as f64).sqrt() / (2.0 * s)).ceil() as usize;
    let h = 1.0 / per_axis as f64;
    let grid = PeriodicGrid::new(cloud, reach);

    let mut g = vec![0.0; d];
    let mut odometer = vec![0usize; d];
    let mut suspects = Vec::new();
    loop {
        for a in 0..d {
            g[a] = (odometer[a] as f64 + 0.5) * h;
        }
        match grid.nearest_within(&g, r) {
            None => return Ok(false),
            Some(d2) if d2.sqrt() > r - s => suspects.push(g.clone()),
            _ => {}
        }
        let mut axis = 0;
        loop {
            if axis == d {
                break;
            }
            odometer[axis] += 1;
            if odometer[axis] < per_axis {
                break;
            }
            odometer[axis] = 0;
            axis += 1;
        }
        if axis == d {
            break;
        }
    }

    for g in &suspects {
        if let Some(value) = local_maximum_above(cloud, &grid, g, r, reach)? {
            if value > ctx.r_max {
                return Err(Error::Escalation {
                    value,
                    r_max: ctx.r_max,
                });
            }
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches the points within `reach` of `g` for `d+1` of them whose
/// circumball has radius in `(r, reach]`, stays inside `B_reach(g)` and has
/// an empty interior. Returns that radius.
fn local_maximum_above(
    cloud: &PointCloud,
    grid: &PeriodicGrid<'_>,
    g: &[f64],
    r: f64,
    reach: f64,
) -> Result<Option<f64>> {
    let d = cloud.dim();
    let mut local: Vec<f64> = Vec::new();
    let mut ids: Vec<usize> = Vec::new();
    grid.for_each_within(g, reach, |j, _| ids.push(j));
    if ids.len() < d + 1 {
        return Ok(None);
    }
    ids.sort_unstable();
    local.resize(ids.len() * d, 0.0);
    for (slot, &j) in ids.iter().enumerate() {
        lift_into(g, cloud.point(j), &mut local[slot * d..(slot + 1) * d]);
    }
    let pts: Vec<&[f64]> = local.chunks_exact(d).collect();
    let m = pts.len();
    let pair_max2 = (2.0 * reach) * (2.0 * reach);
    let close = |a: usize, b: usize| -> bool {
        pts[a].iter().zip(pts[b]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() <= pair_max2
    };

    let mut chosen: Vec<usize> = Vec::with_capacity(d + 1);
    let mut found = None;
    search(m, d + 1, &mut chosen, &close, &mut |subset| {
        let gens: Vec<&[f64]> = subset.iter().map(|&i| pts[i]).collect();
        let sphere = circumsphere(&gens);
        if sphere.degenerate || sphere.radius2 <= r * r {
            return false;
        }
        let radius = sphere.radius2.sqrt();
        let offset = sphere.center.iter().map(|c| c * c).sum::<f64>().sqrt();
        if offset + radius > reach {
            return false;
        }
        // an empty open ball of radius R > r around c means ρ(c) ≥ R
        let inner = sphere.radius2 * (1.0 - SPHERE_REL_TOL);
        let empty = (0..m).filter(|i| !subset.contains(i)).all(|i| {
            pts[i]
                .iter()
                .zip(&sphere.center)
                .map(|(x, c)| (x - c) * (x - c))
                .sum::<f64>()
                >= inner
        });
        if empty {
            found = Some(radius);
        }
        empty
    });
    Ok(found)
}

/// Depth-first enumeration of `size`-subsets whose members are pairwise `close`.
/// Stops as soon as `visit` returns true.
fn search<C, V>(m: usize, size: usize, chosen: &mut Vec<usize>, close: &C, visit: &mut V) -> bool
where
    C: Fn(usize, usize) -> bool,
    V: FnMut(&[usize]) -> bool,
{
    if chosen.len() == size {
        return visit(chosen);
    }
    let start = chosen.last().map_or(0, |&l| l + 1);
    for i in start..m {
        if m - i < size - chosen.len() {
            break;
        }
        if chosen.iter().all(|&c| close(c, i)) {
            chosen.push(i);
            if search(m, size, chosen, close, visit) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}
