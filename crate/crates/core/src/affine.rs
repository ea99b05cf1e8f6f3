//! Circumspheres of small point sets inside their affine hull.

use smallvec::{smallvec, SmallVec};

/// Inline storage for one coordinate vector or one set of affine weights.
pub(crate) type Coords = SmallVec<[f64; 8]>;
type Square = SmallVec<[f64; 64]>;

/// Relative singular-value cutoff below which a point set counts as affinely degenerate.
pub(crate) const SINGULAR_CUTOFF: f64 = 1e-10;

/// Sphere through `k+1` points, centred in their affine hull.
#[derive(Clone, Debug)]
pub(crate) struct Sphere {
    pub center: Coords,
    pub radius2: f64,
    /// Affine coordinates of the center with respect to the input points.
    pub barycentric: Coords,
    /// Smallest singular value of the edge matrix relative to the largest.
    pub conditioning: f64,
    /// Whether the pseudo-inverse fallback was needed.
    pub degenerate: bool,
}

/// Circumsphere of `points` (all of the same dimension) in their affine hull.
///
/// Solves `G λ = b` with `G_ij = v_i·v_j`, `b_i = |v_i|²/2`, `v_i = p_i − p_0`;
/// the center is `p_0 + Σ λ_i v_i`. Near-singular Gram matrices fall back to a
/// pseudo-inverse that drops singular values below [`SINGULAR_CUTOFF`].
pub(crate) fn circumsphere(points: &[&[f64]]) -> Sphere {
    let p0 = points[0];
    let dim = p0.len();
    let k = points.len() - 1;
    if k == 0 {
        return Sphere {
            center: Coords::from_slice(p0),
            radius2: 0.0,
            barycentric: smallvec![1.0],
            conditioning: 1.0,
            degenerate: false,
        };
    }
    let mut v: Square = smallvec![0.0; k * dim];
    for i in 0..k {
        for a in 0..dim {
            v[i * dim + a] = points[i + 1][a] - p0[a];
        }
    }
    let mut gram: Square = smallvec![0.0; k * k];
    let mut rhs: Coords = smallvec![0.0; k];
    for i in 0..k {
        for j in 0..=i {
            let dot: f64 = (0..dim).map(|a| v[i * dim + a] * v[j * dim + a]).sum();
            gram[i * k + j] = dot;
            gram[j * k + i] = dot;
        }
        rhs[i] = 0.5 * gram[i * k + i];
    }

    let (lambda, conditioning, degenerate) = match cholesky_solve(&gram, &rhs, k) {
        Some((sol, cond)) if cond > SINGULAR_CUTOFF * 10.0 => (sol, cond, false),
        _ => {
            let (sol, cond) = pseudo_solve(&gram, &rhs, k);
            (sol, cond, cond <= SINGULAR_CUTOFF)
        }
    };

    let mut center = Coords::from_slice(p0);
    for i in 0..k {
        for a in 0..dim {
            center[a] += lambda[i] * v[i * dim + a];
        }
    }
    let radius2 = points
        .iter()
        .map(|p| p.iter().zip(&center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>())
        .fold(0.0, f64::max);
    let mut barycentric = Coords::with_capacity(k + 1);
    barycentric.push(1.0 - lambda.iter().sum::<f64>());
    barycentric.extend_from_slice(&lambda);
    Sphere {
        center,
        radius2,
        barycentric,
        conditioning,
        degenerate,
    }
}

/// Cholesky solve; returns the solution and an estimate of `σ_min/σ_max` of the edge matrix.
fn cholesky_solve(gram: &[f64], rhs: &[f64], k: usize) -> Option<(Coords, f64)> {
    let mut l: Square = smallvec![0.0; k * k];
    let max_diag = (0..k).map(|i| gram[i * k + i]).fold(0.0, f64::max);
    if max_diag <= 0.0 {
        return None;
    }
    let mut min_pivot = f64::INFINITY;
    for i in 0..k {
        for j in 0..=i {
            let mut s = gram[i * k + j];
            for p in 0..j {
                s -= l[i * k + p] * l[j * k + p];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                min_pivot = min_pivot.min(s);
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    let mut y: Coords = smallvec![0.0; k];
    for i in 0..k {
        let mut s = rhs[i];
        for p in 0..i {
            s -= l[i * k + p] * y[p];
        }
        y[i] = s / l[i * k + i];
    }
    let mut x: Coords = smallvec![0.0; k];
    for i in (0..k).rev() {
        let mut s = y[i];
        for p in i + 1..k {
            s -= l[p * k + i] * x[p];
        }
        x[i] = s / l[i * k + i];
    }
    Some((x, (min_pivot / max_diag).sqrt()))
}

/// Least-squares solve through a Jacobi eigendecomposition of the Gram matrix.
fn pseudo_solve(gram: &[f64], rhs: &[f64], k: usize) -> (Coords, f64) {
    let (eig, vecs) = jacobi_eigen(gram, k);
    let max_eig = eig.iter().cloned().fold(0.0, f64::max);
    if max_eig <= 0.0 {
        return (smallvec![0.0; k], 0.0);
    }
    let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let cutoff = max_eig * SINGULAR_CUTOFF * SINGULAR_CUTOFF;
    let mut x: Coords = smallvec![0.0; k];
    for (e, &val) in eig.iter().enumerate() {
        if val <= cutoff {
            continue;
        }
        let proj: f64 = (0..k).map(|i| vecs[i * k + e] * rhs[i]).sum::<f64>() / val;
        for i in 0..k {
            x[i] += proj * vecs[i * k + e];
        }
    }
    (x, (min_eig / max_eig).sqrt())
}

/// Cyclic Jacobi eigendecomposition of a symmetric `k×k` matrix.
/// Returns eigenvalues and column eigenvectors (row-major).
fn jacobi_eigen(m: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = m.to_vec();
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }
    for _sweep in 0..64 {
        let off: f64 = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * k + j] * a[i * k + j])
            .sum();
        let scale: f64 = (0..k).map(|i| a[i * k + i] * a[i * k + i]).sum();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let arp = a[r * k + p];
                    let arq = a[r * k + q];
                    a[r * k + p] = c * arp - s * arq;
                    a[r * k + q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p * k + r];
                    let aqr = a[q * k + r];
                    a[p * k + r] = c * apr - s * aqr;
                    a[q * k + r] = s * apr + c * aqr;
                }
                for r in 0..k {
                    let vrp = v[r * k + p];
                    let vrq = v[r * k + q];
                    v[r * k + p] = c * vrp - s * vrq;
                    v[r * k + q] = s * vrp + c * vrq;
                }
            }
        }
    }
    ((0..k).map(|i| a[i * k + i]).collect(), v)
}
