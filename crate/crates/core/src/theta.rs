//! Θ-cycles: index-`k` critical points certified to create a new `k`-cycle
//! that still exists at radius `r`, and the lower bound `β_k^ε(r)` they give.

use crate::error::{Error, Result};
use crate::geometry::{lift_into, GeometryContext};
use crate::morse::{enumerate_critical_points, CriticalCandidate, CriticalCensus};
use crate::neighbors::PeriodicGrid;
use crate::sampling::PointCloud;

/// Default lower bound on `φ(Y)`.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Window parameters for counting Θ-cycles at radius `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaParams {
    pub epsilon: f64,
    pub lambda: f64,
    pub r: f64,
    /// `Λ^{-2}`.
    pub delta: f64,
    /// `r (1 - δ)`.
    pub r_prime: f64,
    /// `r (1 + √(2δ))`.
    pub r_dprime: f64,
}

impl ThetaParams {
    pub fn new(r: f64, lambda: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("Λ must exceed 1, got {lambda}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        let delta = lambda.powi(-2);
        Ok(Self {
            epsilon,
            lambda,
            r,
            delta,
            r_prime: r * (1.0 - delta),
            r_dprime: r * (1.0 + (2.0 * delta).sqrt()),
        })
    }
}

/// A critical point in the window `(r', r]` with its certificates.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaCycle {
    pub candidate: CriticalCandidate,
    pub phi: f64,
    /// Every point of an `(φR/2)`-net of `A_φ(Y)` lies within `R(1 − φ/2)` of the cloud.
    /// Evaluated only when `φ ≥ ε` and isolation holds, since the net grows like `φ^{-d}`.
    pub annulus_certified: Option<bool>,
    /// `B_{r″}(C(Y)) ∩ P = Y`.
    pub isolation_certified: bool,
    /// All conditions hold, including `φ ≥ ε`.
    pub counted: bool,
}

/// Θ-cycle counts `β_k^ε(r)` for `k = 1..d−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaCount {
    pub params: ThetaParams,
    /// Entry `k − 1` holds the count for index `k`.
    pub counts: Vec<usize>,
    /// Every index-`1..d−1` critical point with value in `(r′, r]`.
    pub window: Vec<ThetaCycle>,
}

impl ThetaCount {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// `φ(Y)`: distance from `C(Y)` to `∂Δ(Y)` divided by `2R(Y)`.
pub fn phi(candidate: &CriticalCandidate) -> Result<f64> {
    if !candidate.is_critical {
        return Err(Error::Input("φ is defined only for critical candidates".into()));
    }
    let k = candidate.index_k;
    if k == 0 || candidate.local_generators.len() != k + 1 {
        return Err(Error::Input(format!(
            "index {k} candidate must carry {} generators",
            k + 1
        )));
    }
    if k == 1 {
        return Ok(1.0);
    }
    let gens = &candidate.local_generators;
    let origin = vec![0.0; gens[0].len()];
    let mut best = f64::INFINITY;
    for skip in 0..=k {
        let facet: Vec<&[f64]> = gens
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, g)| g.as_slice())
            .collect();
        best = best.min(distance_to_affine_hull(&origin, &facet));
    }
    Ok(best / (2.0 * candidate.circumradius))
}

/// Euclidean distance from `p` to the affine hull of `points`, via modified Gram–Schmidt.
fn distance_to_affine_hull(p: &[f64], points: &[&[f64]]) -> f64 {
    let base = points[0];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for q in &points[1..] {
        let mut v: Vec<f64> = q.iter().zip(base).map(|(a, b)| a - b).collect();
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for e in &basis {
            let dot: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(e).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 * scale {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut w: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
    for e in &basis {
        let dot: f64 = w.iter().zip(e).map(|(a, b)| a * b).sum();
        w.iter_mut().zip(e).for_each(|(a, b)| *a -= dot * b);
    }
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Calls `visit` on each point of a unit-scale net of `{φ ≤ |x| ≤ 1}` in `R^d`
/// with covering radius at most `φ/2`. Stops when `visit` returns false and
/// reports whether the walk completed.
fn walk_annulus_net<F: FnMut(&[f64]) -> bool>(d: usize, phi: f64, mut visit: F) -> bool {
    let h = phi / (2.0 * (d as f64).sqrt());
    let slack = h * (d as f64).sqrt() / 2.0;
    let (lo, hi) = (phi - slack, 1.0 + slack);
    let m = (hi / h).ceil() as i64;
    let mut idx = vec![-m; d];
    let mut g = vec![0.0; d];
    loop {
        for a in 0..d {
            g[a] = idx[a] as f64 * h;
        }
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm >= lo && norm <= hi {
            let target = norm.clamp(phi, 1.0);
            if target != norm {
                g.iter_mut().for_each(|x| *x *= target / norm);
            }
            if !visit(&g) {
                return false;
            }
        }
        let mut axis = 0;
        loop {
            if axis == d {
                return true;
            }
            idx[axis] += 1;
            if idx[axis] <= m {
                break;
            }
            idx[axis] = -m;
            axis += 1;
        }
    }
}

/// Conservative certificate for `A_φ(Y) ⊂ U(P, R(Y))`.
pub fn annulus_covered(candidate: &CriticalCandidate, cloud: &PointCloud, ctx: &GeometryContext) -> Result<bool> {
    ctx.check_dim(cloud.dim())?;
    let phi = phi(candidate)?;
    let radius = candidate.circumradius;
    if 2.0 * radius >= ctx.r_conv {
        return Err(Error::Domain(format!(
            "circumradius {radius} too large for a single chart"
        )));
    }
    let grid = PeriodicGrid::new(cloud, radius);
    Ok(annulus_covered_with(candidate, phi, cloud, &grid))
}

fn annulus_covered_with(candidate: &CriticalCandidate, phi: f64, cloud: &PointCloud, grid: &PeriodicGrid<'_>) -> bool {
    let d = cloud.dim();
    let radius = candidate.circumradius;
    let center = candidate.center.coords();
    let mut local = Vec::new();
    let mut buf = vec![0.0; d];
    grid.for_each_within(center, 2.0 * radius, |j, _| {
        lift_into(center, cloud.point(j), &mut buf);
        local.extend_from_slice(&buf);
    });
    let reach = radius * (1.0 - phi / 2.0);
    let reach2 = reach * reach;
    let pts: Vec<&[f64]> = local.chunks_exact(d).collect();
    let mut last_hit = 0usize;
    walk_annulus_net(d, phi, |g| {
        let hit = |p: &[f64]| -> bool { p.iter().zip(g).map(|(x, u)| (x - u * radius).powi(2)).sum::<f64>() <= reach2 };
        // neighboring net points are usually covered by the same cloud point
        if !pts.is_empty() && hit(pts[last_hit]) {
            return true;
        }
        match pts.iter().position(|p| hit(p)) {
            Some(i) => {
                last_hit = i;
                true
            }
            None => false,
        }
    })
}

/// `β_k^ε(r)` for `k = 1..d−1`, using the process intensity of `cloud` for `Λ`.
pub fn count_theta_cycles(cloud: &PointCloud, r: f64, epsilon: f64, ctx: &GeometryContext) -> Result<ThetaCount> {
    ctx.check_dim(cloud.dim())?;
    let lambda = ctx.lambda(cloud.intensity_n, r);
    let params = ThetaParams::new(r, lambda, epsilon)?;
    let census = enumerate_critical_points(cloud, r, ctx)?;
    count_theta_cycles_in(cloud, &census, &params)
}

/// As [`count_theta_cycles`], reusing a census computed at radius `params.r`.
pub fn count_theta_cycles_in(cloud: &PointCloud, census: &CriticalCensus, params: &ThetaParams) -> Result<ThetaCount> {
    let d = census.dim;
    if (census.radius - params.r).abs() > 0.0 {
        return Err(Error::Input(format!(
            "census radius {} differs from the Θ radius {}",
            census.radius, params.r
        )));
    }
    let mut counts = vec![0usize; d.saturating_sub(1)];
    let mut window = Vec::new();
    if cloud.is_empty() || d < 2 {
        return Ok(ThetaCount {
            params: *params,
            counts,
            window,
        });
    }
    let grid = PeriodicGrid::new(cloud, params.r_dprime);
    let r_dprime2 = params.r_dprime * params.r_dprime;
    for k in 1..d {
        for cand in census.critical(k) {
            let value = cand.circumradius;
            if !(value > params.r_prime && value <= params.r) {
                continue;
            }
            let phi = phi(cand)?;
            let mut inside = 0usize;
            let mut foreign = false;
            grid.for_each_within(cand.center.coords(), params.r_dprime, |j, d2| {
                if d2 <= r_dprime2 {
                    inside += 1;
                    if cand.subset_indices.binary_search(&(j as u32)).is_err() {
                        foreign = true;
                    }
                }
            });
            let isolation_certified = !foreign && inside == k + 1;
            let annulus_certified =
                (isolation_certified && phi >= params.epsilon).then(|| annulus_covered_with(cand, phi, cloud, &grid));
            let counted = annulus_certified == Some(true);
            if counted {
                counts[k - 1] += 1;
            }
            window.push(ThetaCycle {
                candidate: cand.clone(),
                phi,
                annulus_certified,
                isolation_certified,
                counted,
            });
        }
    }
    Ok(ThetaCount {
        params: *params,
        counts,
        window,
    })
}
