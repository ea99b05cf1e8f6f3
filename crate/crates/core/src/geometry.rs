//! Geometry of the flat cubical torus `T^d = R^d / Z^d`.
//!
//! Points are stored by their canonical representative in `[0,1)^d`. Every
//! ball of radius below the convexity radius `1/2` embeds isometrically in
//! `R^d`; [`lift_cluster`] produces that embedding for a small cluster so the
//! rest of the crate can do plain Euclidean geometry.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Convexity radius of the unit flat torus.
pub const R_CONV: f64 = 0.5;

/// Largest radius for which critical points of the distance function are
/// generated uniquely and locally: `r_conv / 3`.
pub const R_MAX: f64 = R_CONV / 3.0;

/// A point of `T^d`, stored by its canonical coordinates in `[0,1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Builds a point, reducing every coordinate modulo 1.
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let mut coords = coords.into();
        if coords.is_empty() {
            return Err(Error::Input("a torus point needs at least one coordinate".into()));
        }
        for c in coords.iter_mut() {
            if !c.is_finite() {
                return Err(Error::Input(format!("non-finite coordinate {c}")));
            }
            *c = wrap_unit(*c);
        }
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Reduces `x` to its representative in `[0,1)`.
pub(crate) fn wrap_unit(x: f64) -> f64 {
    let y = x - x.floor();
    // x.floor() can round so that y == 1.0 for tiny negative x
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Signed minimal-image difference `b - a` along one axis, in `[-1/2, 1/2)`.
#[inline]
pub(crate) fn min_image(delta: f64) -> f64 {
    delta - (delta + 0.5).floor()
}

/// Squared toroidal distance between two coordinate slices of equal length.
#[inline]
pub(crate) fn torus_dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (y - x).abs();
            let d = if d > 0.5 { 1.0 - d } else { d };
            d * d
        })
        .sum()
}

/// Writes the lift of `p` into the chart centred at `center` (center maps to the origin).
#[inline]
pub(crate) fn lift_into(center: &[f64], p: &[f64], out: &mut [f64]) {
    for ((o, c), x) in out.iter_mut().zip(center).zip(p) {
        *o = min_image(x - c);
    }
}

/// Maps a point of the chart centred at `center` back onto the torus.
pub(crate) fn unlift(center: &[f64], local: &[f64]) -> Vec<f64> {
    center.iter().zip(local).map(|(c, x)| wrap_unit(c + x)).collect()
}

/// Per-dimension constants shared by a scene.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryContext {
    pub dim: usize,
    pub r_conv: f64,
    pub r_max: f64,
    /// Volume of the unit `d`-ball.
    pub omega_d: f64,
}

impl GeometryContext {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        Ok(Self {
            dim,
            r_conv: R_CONV,
            r_max: R_MAX,
            omega_d: unit_ball_volume(dim),
        })
    }

    /// `omega_d r^d` with no range restriction (plain Euclidean volume).
    pub fn euclidean_ball_volume(&self, r: f64) -> f64 {
        self.omega_d * r.powi(self.dim as i32)
    }

    /// Expected number of points of an intensity-`n` process in an `r`-ball.
    pub fn lambda(&self, n: f64, r: f64) -> f64 {
        n * self.euclidean_ball_volume(r)
    }

    /// Inverse of [`GeometryContext::lambda`]: `r = (Λ / (ω_d n))^{1/d}`.
    pub fn radius_for_lambda(&self, n: f64, lambda: f64) -> f64 {
        (lambda / (self.omega_d * n)).powf(1.0 / self.dim as f64)
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

/// `π^{d/2} / Γ(d/2 + 1)` via the two-step recurrence `ω_d = 2π ω_{d-2} / d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    let (mut omega, mut k) = if dim.is_multiple_of(2) { (1.0, 2) } else { (2.0, 3) };
    while k <= dim {
        omega *= 2.0 * PI / k as f64;
        k += 2;
    }
    omega
}

/// Toroidal distance `min_Δ ‖a − b + Δ‖`.
pub fn toroidal_distance(a: &TorusPoint, b: &TorusPoint) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(torus_dist2(a.coords(), b.coords()).sqrt())
}

/// Isometric lift of a cluster of points lying in a ball around `center`.
///
/// The center maps to the origin and every point to its unique
/// representative of norm below `r_conv`.
pub fn lift_cluster(points: &[TorusPoint], center: &TorusPoint, radius: f64) -> Result<Vec<Vec<f64>>> {
    if !(0.0..R_CONV).contains(&radius) {
        return Err(Error::Domain(format!(
            "lift radius {radius} must lie in [0, r_conv = {R_CONV})"
        )));
    }
    let d = center.dim();
    points
        .iter()
        .map(|p| {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
            let dist = torus_dist2(center.coords(), p.coords()).sqrt();
            if dist > radius {
                return Err(Error::Precondition(format!(
                    "point {p} lies at distance {dist} > {radius} from {center}"
                )));
            }
            let mut out = vec![0.0; d];
            lift_into(center.coords(), p.coords(), &mut out);
            Ok(out)
        })
        .collect()
}

/// Volume `ω_d r^d` of an `r`-ball on the torus, `0 ≤ r < r_conv`.
pub fn ball_volume(r: f64, ctx: &GeometryContext) -> Result<f64> {
    if !(r >= 0.0 && r < ctx.r_conv) {
        return Err(Error::Domain(format!(
            "ball radius {r} must lie in [0, r_conv = {})",
            ctx.r_conv
        )));
    }
    Ok(ctx.euclidean_ball_volume(r))
}

/// Absolute tolerance of the quadrature behind [`intersection_volume_unit`].
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Volume of the intersection of two unit `d`-balls whose centers are
/// `delta` apart: `2 ω_{d-1} ∫_0^{acos(δ/2)} sin^d θ dθ`.
pub fn intersection_volume_unit(delta: f64, ctx: &GeometryContext) -> Result<f64> {
    if !(0.0..=2.0).contains(&delta) {
        return Err(Error::Domain(format!("center distance {delta} must lie in [0, 2]")));
    }
    let d = ctx.dim as i32;
    let upper = (delta / 2.0).acos();
    let integral = adaptive_simpson(|t: f64| t.sin().powi(d), 0.0, upper, QUADRATURE_TOL);
    Ok(2.0 * unit_ball_volume(ctx.dim - 1) * integral)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
