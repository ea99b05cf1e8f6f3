//! Seeded homogeneous Poisson processes on `T^d`.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{torus_dist2, wrap_unit, GeometryContext, TorusPoint};
use crate::textio::sig17;

/// Identifies one independent random stream derived from a master seed.
///
/// The stream's generator is keyed by [`RngStream::seed`], so stream `k`
/// can be produced without touching streams `0..k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// 64-bit key of this stream; `sample --seed <key>` reproduces it.
    pub fn seed(&self) -> u64 {
        splitmix64(splitmix64(self.master_seed) ^ self.stream_index.wrapping_mul(0xD1B5_4A32_D192_ED03))
    }

    pub fn generator(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A finite sample of points on `T^d`, stored as a flat coordinate array.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    /// Intensity `n` of the generating process (the point count for loaded clouds).
    pub intensity_n: f64,
    pub seed: u64,
}

impl PointCloud {
    /// Builds a cloud from explicit points; `intensity_n` defaults to the count.
    pub fn from_points(dim: usize, points: &[TorusPoint]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Ok(Self {
            dim,
            coords,
            intensity_n: points.len() as f64,
            seed: 0,
        })
    }

    /// Convenience constructor from raw coordinate rows (reduced mod 1).
    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let pts = rows
            .iter()
            .map(|r| TorusPoint::new(r.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(dim, &pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn torus_point(&self, i: usize) -> TorusPoint {
        TorusPoint::new(self.point(i).to_vec()).expect("stored coordinates are canonical")
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Writes the cloud as CSV: header `x0,...,x{d-1}`, one row per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        writeln!(out, "{}", header.join(","))?;
        for p in self.iter() {
            let row: Vec<String> = p.iter().map(|&c| sig17(c)).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        for (i, c) in cols.iter().enumerate() {
            if c.trim() != format!("x{i}") {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected column x{i}, found {c:?}"),
                });
            }
        }
        let dim = cols.len();
        let mut coords = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != dim {
                return Err(Error::Parse {
                    line: lineno + 2,
                    msg: format!("expected {dim} fields, found {}", fields.len()),
                });
            }
            for f in fields {
                let v: f64 = f.trim().parse().map_err(|e| Error::Parse {
                    line: lineno + 2,
                    msg: format!("{f:?}: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: lineno + 2,
                        msg: "non-finite coordinate".into(),
                    });
                }
                coords.push(wrap_unit(v));
            }
        }
        let n = coords.len() / dim;
        Ok(Self {
            dim,
            coords,
            intensity_n: n as f64,
            seed: 0,
        })
    }
}

/// Samples a Poisson(`n`) number of i.i.d. uniform points on `[0,1)^d`.
pub fn sample_poisson(n: f64, ctx: &GeometryContext, rng: RngStream) -> Result<PointCloud> {
    sample_poisson_seeded(n, ctx, rng.seed())
}

/// As [`sample_poisson`], keyed directly by a 64-bit stream seed.
pub fn sample_poisson_seeded(n: f64, ctx: &GeometryContext, seed: u64) -> Result<PointCloud> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Domain(format!("intensity must be positive and finite, got {n}")));
    }
    let mut gen = ChaCha8Rng::seed_from_u64(seed);
    let count = poisson_variate(n, &mut gen) as usize;
    let coords: Vec<f64> = (0..count * ctx.dim).map(|_| gen.gen::<f64>()).collect();
    Ok(PointCloud {
        dim: ctx.dim,
        coords,
        intensity_n: n,
        seed,
    })
}

/// Number of cloud points at toroidal distance at most `r` from `center`.
pub fn count_in_ball(cloud: &PointCloud, center: &TorusPoint, r: f64, ctx: &GeometryContext) -> Result<usize> {
    ctx.check_dim(center.dim())?;
    ctx.check_dim(cloud.dim())?;
    if !(r >= 0.0 && r < ctx.r_conv) {
        return Err(Error::Domain(format!("radius {r} must lie in [0, r_conv)")));
    }
    let r2 = r * r;
    Ok(cloud.iter().filter(|p| torus_dist2(center.coords(), p) <= r2).count())
}

/// Poisson variate: inversion below mean 30, PTRS transformed rejection above.
pub(crate) fn poisson_variate<R: Rng>(lambda: f64, rng: &mut R) -> u64 {
    if lambda < 30.0 {
        let mut p = (-lambda).exp();
        let mut cdf = p;
        let u: f64 = rng.gen();
        let mut k = 0u64;
        while u > cdf {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            if p == 0.0 {
                break;
            }
        }
        return k;
    }
    // Hörmann (1993), "The transformed rejection method for generating Poisson random variables".
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.gen::<f64>() - 0.5;
        let v: f64 = rng.gen();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -lambda + k * loglam - ln_factorial(k as u64);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// `ln(k!)`: exact summation for small `k`, Stirling series otherwise.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    if k < 20 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let x = k as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}
