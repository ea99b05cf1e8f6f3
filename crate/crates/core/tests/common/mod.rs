//! Brute-force references shared by the integration tests.
//!
//! Nothing here calls into the crate's algorithms; only plain data types are
//! borrowed so results can be compared.

#![allow(dead_code)]

use cechlab::PointCloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform cloud of exactly `m` points.
pub fn uniform_cloud(d: usize, m: usize, rng: &mut ChaCha8Rng) -> PointCloud {
    let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
    PointCloud::from_rows(d, &rows).unwrap()
}

/// Toroidal distance by explicit minimisation over the `3^d` shifts in `{-1,0,1}^d`.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    let d = a.len();
    let mut best = f64::INFINITY;
    for code in 0..3usize.pow(d as u32) {
        let mut rest = code;
        let mut s = 0.0;
        for i in 0..d {
            let shift = (rest % 3) as f64 - 1.0;
            rest /= 3;
            let t = a[i] - b[i] + shift;
            s += t * t;
        }
        best = best.min(s);
    }
    best.sqrt()
}

/// Representative of `p` nearest to `origin` among the `3^d` translates.
pub fn lift(origin: &[f64], p: &[f64]) -> Vec<f64> {
    origin
        .iter()
        .zip(p)
        .map(|(&o, &x)| {
            [-1.0, 0.0, 1.0]
                .iter()
                .map(|s| x + s - o)
                .min_by(|u, v| u.abs().total_cmp(&v.abs()))
                .unwrap()
        })
        .collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot = a[col].clone();
            for (x, p) in a[row].iter_mut().zip(&pivot).skip(col) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Circumcenter in the affine hull: `c = p_0 + Σ λ_i (p_i − p_0)` with `c` equidistant from all points.
pub fn circumcenter(points: &[Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let p0 = &points[0];
    let k = points.len() - 1;
    if k == 0 {
        return Some((p0.clone(), 0.0));
    }
    let v: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let gram: Vec<Vec<f64>> = v.iter().map(|a| v.iter().map(|b| dot(a, b)).collect()).collect();
    let rhs: Vec<f64> = v.iter().map(|a| 0.5 * dot(a, a)).collect();
    let lam = solve(gram, rhs)?;
    let mut c = p0.clone();
    for (l, vi) in lam.iter().zip(&v) {
        for (ci, x) in c.iter_mut().zip(vi) {
            *ci += l * x;
        }
    }
    let r2 = points
        .iter()
        .map(|p| p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .fold(0.0, f64::max);
    Some((c, r2.sqrt()))
}

/// Smallest enclosing ball by exhaustion: the smallest circumball of any
/// subset of at most `d+1` points that contains every point.
pub fn brute_miniball(points: &[Vec<f64>]) -> f64 {
    let m = points.len();
    let d = points[0].len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size > d + 1 {
            continue;
        }
        let subset: Vec<Vec<f64>> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| points[i].clone())
            .collect();
        let Some((c, r)) = circumcenter(&subset) else { continue };
        if r >= best {
            continue;
        }
        let fits = points.iter().all(|p| {
            let d2: f64 = p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() <= r * (1.0 + 1e-12) + 1e-15
        });
        if fits {
            best = r;
        }
    }
    best
}

/// Every simplex of the Čech complex up to dimension `max_sdim`, with its
/// miniball radius, from an exhaustive scan over vertex subsets.
pub fn exhaustive_cech(cloud: &PointCloud, r: f64, max_sdim: usize) -> Vec<Vec<(Vec<u32>, f64)>> {
    let mut layers: Vec<Vec<(Vec<u32>, f64)>> = vec![Vec::new(); max_sdim + 1];
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        cloud: &PointCloud,
        r: f64,
        max_sdim: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        layers: &mut Vec<Vec<(Vec<u32>, f64)>>,
    ) {
        for v in start..cloud.len() {
            if chosen
                .iter()
                .any(|&u| torus_distance(cloud.point(u), cloud.point(v)) > 2.0 * r)
            {
                continue;
            }
            chosen.push(v);
            let origin = cloud.point(chosen[0]);
            let pts: Vec<Vec<f64>> = chosen.iter().map(|&u| lift(origin, cloud.point(u))).collect();
            let radius = brute_miniball(&pts);
            if radius <= r {
                layers[chosen.len() - 1].push((chosen.iter().map(|&u| u as u32).collect(), radius));
                if chosen.len() <= max_sdim {
                    rec(cloud, r, max_sdim, v + 1, chosen, layers);
                }
            }
            chosen.pop();
        }
    }
    rec(cloud, r, max_sdim, 0, &mut chosen, &mut layers);
    for l in layers.iter_mut() {
        l.sort_by(|a, b| a.0.cmp(&b.0));
    }
    layers
}

/// Rank over GF(2) of a dense matrix given as rows of bits.
pub fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[c] {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= *y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers `β_0..β_top-1` of a simplex list via dense boundary ranks.
pub fn dense_betti(layers: &[Vec<Vec<u32>>], top: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (1..layers.len())
        .map(|k| {
            let rows: Vec<Vec<bool>> = layers[k - 1]
                .iter()
                .map(|face| layers[k].iter().map(|s| face.iter().all(|v| s.contains(v))).collect())
                .collect();
            gf2_rank(rows)
        })
        .collect();
    let rank = |k: usize| if k == 0 || k > ranks.len() { 0 } else { ranks[k - 1] };
    (0..top).map(|k| layers[k].len() - rank(k) - rank(k + 1)).collect()
}

/// Number of index-1 critical points with value at most `r` on the circle:
/// one per gap between consecutive points no longer than `2r`.
pub fn circle_index_one(points: &[f64], r: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    let mut gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(1.0 - xs[xs.len() - 1] + xs[0]);
    gaps.iter().filter(|&&g| g / 2.0 <= r).count()
}

/// Area of the lens formed by two unit disks whose centers are `delta` apart.
pub fn lens_area(delta: f64) -> f64 {
    2.0 * (delta / 2.0).acos() - (delta / 2.0) * (4.0 - delta * delta).sqrt()
}

/// Monte Carlo volume of two unit `d`-balls at center distance `delta`, with its standard error.
pub fn monte_carlo_lens(d: usize, delta: f64, samples: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    // sample the bounding box of the first ball
    let box_vol = 2f64.powi(d as i32);
    let mut hits = 0usize;
    for _ in 0..samples {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let in_a = x.iter().map(|v| v * v).sum::<f64>() <= 1.0;
        let in_b = (x[0] - delta).powi(2) + x[1..].iter().map(|v| v * v).sum::<f64>() <= 1.0;
        if in_a && in_b {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (box_vol * p, box_vol * (p * (1.0 - p) / samples as f64).sqrt())
}
