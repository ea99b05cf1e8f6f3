//! Critical points of the distance function `ρ_P(x) = min_{p ∈ P} ρ(x, p)`.
//!
//! Index-0 critical points are the points of `P`. For `1 ≤ k ≤ d` a set `Y`
//! of `k+1` points generates an index-`k` critical point iff the center
//! `C(Y)` of its circumsphere lies in the open simplex spanned by `Y` and no
//! point of `P` lies in the open ball `B(Y)`. The critical value is the
//! circumradius `R(Y)`.
//!
//! A critical `Y` with `R(Y) ≤ r` has its smallest enclosing ball equal to
//! its circumball, so it is a simplex of `C(P, r)`; enumeration therefore
//! walks the Čech simplices of dimension `1..=d`.

mod coverage;

use rayon::prelude::*;

pub use coverage::is_covered;

use crate::affine::{circumsphere as affine_circumsphere, SINGULAR_CUTOFF};
use crate::cech::AnchorChart;
use crate::error::{Error, Result};
use crate::geometry::{unlift, GeometryContext, TorusPoint};
use crate::neighbors::ProximityGraph;
use crate::sampling::PointCloud;

/// Barycentric coordinates must exceed this for `C(Y)` to count as interior.
pub const BARYCENTRIC_TOL: f64 = 1e-10;

/// Relative band around `R(Y)^2` inside which a point counts as lying on the sphere.
pub(crate) const SPHERE_REL_TOL: f64 = 1e-12;

/// Circumsphere of `k+1` lifted points, centred in their affine hull.
#[derive(Clone, Debug, PartialEq)]
pub struct Circumsphere {
    pub center: Vec<f64>,
    pub radius: f64,
    pub barycentric: Vec<f64>,
}

/// A candidate set `Y` with its circumsphere data.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalCandidate {
    /// Sorted indices of the `k+1` generating points.
    pub subset_indices: Vec<u32>,
    /// `C(Y)` on the torus.
    pub center: TorusPoint,
    /// `R(Y)`, the critical value.
    pub circumradius: f64,
    pub index_k: usize,
    pub barycentric: Vec<f64>,
    pub is_critical: bool,
    /// Generators lifted to the chart centred at `C(Y)` (`k+1` rows of `d`).
    pub local_generators: Vec<Vec<f64>>,
}

/// Critical points with value at most `radius`, grouped by index.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalCensus {
    pub dim: usize,
    pub radius: f64,
    /// `C_0(r) ..= C_d(r)`.
    pub counts: Vec<usize>,
    /// Critical points of index `k` at position `k - 1`, for `k = 1..=d`.
    pub by_index: Vec<Vec<CriticalCandidate>>,
    /// `Σ (−1)^k C_k(r)`.
    pub chi_morse: i64,
    /// Candidates skipped because a point sat on `∂B(Y)` or a barycentric
    /// coordinate was within tolerance of zero.
    pub ties: usize,
    /// Candidates skipped as affinely degenerate.
    pub degenerate: usize,
}

impl CriticalCensus {
    pub fn critical(&self, k: usize) -> &[CriticalCandidate] {
        if k == 0 || k > self.dim {
            &[]
        } else {
            &self.by_index[k - 1]
        }
    }
}

/// Circumsphere of `2 ≤ k+1 ≤ d+1` lifted points.
pub fn circumsphere(lifted_points: &[Vec<f64>]) -> Result<Circumsphere> {
    if lifted_points.len() < 2 {
        return Err(Error::Input("a circumsphere needs at least two points".into()));
    }
    let d = lifted_points[0].len();
    if let Some(p) = lifted_points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.len(),
        });
    }
    if lifted_points.len() > d + 1 {
        return Err(Error::Input(format!(
            "{} points exceed the {} that can be affinely independent in R^{d}",
            lifted_points.len(),
            d + 1
        )));
    }
    let refs: Vec<&[f64]> = lifted_points.iter().map(Vec::as_slice).collect();
    let s = affine_circumsphere(&refs);
    if s.degenerate {
        return Err(Error::Degenerate { sigma: s.conditioning });
    }
    Ok(Circumsphere {
        center: s.center.into_vec(),
        radius: s.radius2.sqrt(),
        barycentric: s.barycentric.into_vec(),
    })
}

/// Outcome of testing one candidate set in a chart.
pub(crate) enum Verdict {
    Critical {
        center: Vec<f64>,
        radius2: f64,
        barycentric: Vec<f64>,
    },
    NotCritical,
    Tie,
    Degenerate,
}

/// Criticality of `generators` against `others`: circumcenter inside the simplex, open circumball empty (all in one chart).
/// `others` must contain every point of `P \ Y` within `R(Y)` of `C(Y)`.
pub(crate) fn classify<'a, I>(generators: &[&[f64]], others: I, max_radius2: f64) -> Verdict
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let s = affine_circumsphere(generators);
    if s.degenerate || s.conditioning <= SINGULAR_CUTOFF {
        return Verdict::Degenerate;
    }
    if s.radius2 > max_radius2 {
        return Verdict::NotCritical;
    }
    let min_bary = s.barycentric.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_bary <= -BARYCENTRIC_TOL {
        return Verdict::NotCritical;
    }
    let band = SPHERE_REL_TOL * s.radius2;
    let mut tie = min_bary <= BARYCENTRIC_TOL;
    for p in others {
        let d2: f64 = p.iter().zip(&s.center).map(|(a, c)| (a - c) * (a - c)).sum();
        if d2 < s.radius2 - band {
            return Verdict::NotCritical;
        }
        if d2 <= s.radius2 + band {
            tie = true;
        }
    }
    if tie {
        return Verdict::Tie;
    }
    Verdict::Critical {
        center: s.center.into_vec(),
        radius2: s.radius2,
        barycentric: s.barycentric.into_vec(),
    }
}

fn check_radius(r: f64, ctx: &GeometryContext) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if r >= ctx.r_max {
        return Err(Error::Domain(format!(
            "radius {r} exceeds r_max = r_conv/3 = {}",
            ctx.r_max
        )));
    }
    Ok(())
}

#[derive(Default)]
struct AnchorCensus {
    by_index: Vec<Vec<CriticalCandidate>>,
    ties: usize,
    degenerate: usize,
}

/// All critical points of index `1..=d` with value at most `r`, plus `C_0 = |P|`.
pub fn enumerate_critical_points(cloud: &PointCloud, r: f64, ctx: &GeometryContext) -> Result<CriticalCensus> {
    ctx.check_dim(cloud.dim())?;
    check_radius(r, ctx)?;
    let d = ctx.dim;
    let graph = ProximityGraph::build(cloud, 2.0 * r);
    let r2 = r * r;
    let per_anchor = |v: usize| -> AnchorCensus {
        let chart = AnchorChart::new(cloud, &graph, v, 2.0 * r, true);
        let mut out = AnchorCensus {
            by_index: vec![Vec::new(); d],
            ..Default::default()
        };
        let lower: Vec<&[f64]> = chart.lower.chunks_exact(d).collect();
        chart.for_each_simplex(r, d, |slots, _| {
            if slots.len() < 2 {
                return;
            }
            let gens: Vec<&[f64]> = slots.iter().map(|&s| chart.point(s)).collect();
            let others = (1..chart.ids.len())
                .filter(|s| !slots.contains(s))
                .map(|s| chart.point(s))
                .chain(lower.iter().copied());
            match classify(&gens, others, r2) {
                Verdict::Critical {
                    center,
                    radius2,
                    barycentric,
                } => {
                    let local_generators = gens
                        .iter()
                        .map(|g| g.iter().zip(&center).map(|(x, c)| x - c).collect())
                        .collect();
                    let torus_center = TorusPoint::new(unlift(cloud.point(v), &center)).expect("finite center");
                    out.by_index[slots.len() - 2].push(CriticalCandidate {
                        subset_indices: slots.iter().map(|&s| chart.ids[s]).collect(),
                        center: torus_center,
                        circumradius: radius2.sqrt(),
                        index_k: slots.len() - 1,
                        barycentric,
                        is_critical: true,
                        local_generators,
                    });
                }
                Verdict::Tie => out.ties += 1,
                Verdict::Degenerate => out.degenerate += 1,
                Verdict::NotCritical => {}
            }
        });
        out
    };
    let anchors: Vec<AnchorCensus> = if cloud.len() >= 2048 {
        (0..cloud.len()).into_par_iter().map(per_anchor).collect()
    } else {
        (0..cloud.len()).map(per_anchor).collect()
    };
    let mut by_index: Vec<Vec<CriticalCandidate>> = vec![Vec::new(); d];
    let mut ties = 0;
    let mut degenerate = 0;
    for mut a in anchors {
        for (k, list) in a.by_index.iter_mut().enumerate() {
            by_index[k].append(list);
        }
        ties += a.ties;
        degenerate += a.degenerate;
    }
    let mut counts = vec![cloud.len()];
    counts.extend(by_index.iter().map(Vec::len));
    let chi_morse = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    Ok(CriticalCensus {
        dim: d,
        radius: r,
        counts,
        by_index,
        chi_morse,
        ties,
        degenerate,
    })
}

/// `P(Pois(Λ) ≥ k) = 1 − e^{−Λ} Σ_{j<k} Λ^j / j!`, evaluated without cancellation.
pub fn poisson_upper_tail(k: usize, lambda: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if lambda <= 0.0 {
        return 0.0;
    }
    if lambda < k as f64 + 1.0 {
        // direct tail sum: terms decrease geometrically once j > Λ
        let mut term = (-lambda).exp();
        for j in 1..=k {
            term *= lambda / j as f64;
        }
        let mut sum = 0.0;
        let mut j = k;
        while term > 1e-18 * sum || sum == 0.0 {
            sum += term;
            j += 1;
            term *= lambda / j as f64;
            if term == 0.0 {
                break;
            }
        }
        sum
    } else {
        let mut term = (-lambda).exp();
        let mut head = term;
        for j in 1..k {
            term *= lambda / j as f64;
            head += term;
        }
        1.0 - head
    }
}

/// `E[C_k(r)] = D_k n (1 − e^{−Λ} Σ_{j<k} Λ^j/j!)`, `Λ = ω_d n r^d`.
pub fn expected_ck(n: f64, r: f64, k: usize, dk: f64, ctx: &GeometryContext) -> Result<f64> {
    if k < 1 || k > ctx.dim {
        return Err(Error::Domain(format!("index {k} must lie in 1..={}", ctx.dim)));
    }
    if dk.is_nan() || dk <= 0.0 {
        return Err(Error::Domain(format!("D_k must be positive, got {dk}")));
    }
    if !(n > 0.0 && r >= 0.0) {
        return Err(Error::Domain(format!("need n > 0 and r >= 0, got n={n}, r={r}")));
    }
    let lambda = ctx.lambda(n, r);
    Ok(dk * n * poisson_upper_tail(k, lambda))
}

/// `E[χ(r)] = n e^{−Λ} (1 + Σ_{j=1}^{d−1} A_j Λ^j)`.
pub fn expected_euler(n: f64, r: f64, a: &[f64], ctx: &GeometryContext) -> Result<f64> {
    if a.len() + 1 != ctx.dim {
        return Err(Error::Input(format!(
            "expected {} coefficients A_1..A_(d-1), got {}",
            ctx.dim - 1,
            a.len()
        )));
    }
    let lambda = ctx.lambda(n, r);
    let poly: f64 = 1.0
        + a.iter()
            .enumerate()
            .map(|(j, aj)| aj * lambda.powi(j as i32 + 1))
            .sum::<f64>();
    Ok(n * (-lambda).exp() * poly)
}

/// Coefficients `A_1..A_{d−1}` implied by `D_1..D_d`:
/// `A_j = (1/j!) Σ_{k>j} (−1)^{k+1} D_k`; `A_0 = Σ_k (−1)^{k+1} D_k` must be 1.
pub fn euler_coefficients(dk: &[f64]) -> (f64, Vec<f64>) {
    let d = dk.len();
    let coef = |j: usize| -> f64 {
        let s: f64 = (j + 1..=d)
            .map(|k| if k % 2 == 1 { dk[k - 1] } else { -dk[k - 1] })
            .sum();
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        s / fact
    };
    (coef(0), (1..d).map(coef).collect())
}
