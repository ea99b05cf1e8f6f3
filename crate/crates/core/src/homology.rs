//! Betti numbers over GF(2) by sparse column reduction.
//!
//! Ranks of the boundary maps are computed on the coboundary side in
//! increasing dimension with the clearing optimization: a simplex that is
//! the pivot of a reduced coboundary column one dimension down has a column
//! that would reduce to zero, so it is skipped. Rows and columns follow the
//! filtration order (radius, then vertex tuple), which keeps columns sparse.

use crate::cech::{CechComplex, LayerIndex, SimplexLayer};
use crate::error::{Error, Result};

/// A sparse GF(2) matrix stored by columns of ascending row indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<u32>>,
}

impl BoundaryMatrix {
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.columns[col].binary_search(&(row as u32)).is_ok()
    }

    /// GF(2) product `self · rhs`.
    pub fn compose(&self, rhs: &BoundaryMatrix) -> Result<BoundaryMatrix> {
        if self.cols() != rhs.rows {
            return Err(Error::Input(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows,
                self.cols(),
                rhs.rows,
                rhs.cols()
            )));
        }
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let (mut acc, mut scratch) = (Vec::new(), Vec::new());
                for &k in col {
                    sym_diff_into(&acc, &self.columns[k as usize], &mut scratch);
                    std::mem::swap(&mut acc, &mut scratch);
                }
                acc
            })
            .collect();
        Ok(BoundaryMatrix {
            rows: self.rows,
            columns,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let (rank, _) = reduce(self.rows, &Columns::from_lists(&self.columns), |_| false);
        rank
    }
}

/// Sparse columns with ascending row indices, stored contiguously.
struct Columns {
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

impl Columns {
    fn from_lists(lists: &[Vec<u32>]) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut entries = Vec::new();
        for l in lists {
            entries.extend_from_slice(l);
            offsets.push(entries.len());
        }
        Self { offsets, entries }
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    fn col(&self, j: usize) -> &[u32] {
        &self.entries[self.offsets[j]..self.offsets[j + 1]]
    }
}

/// Writes the symmetric difference of two ascending index lists (GF(2) column sum) into `out`.
fn sym_diff_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Left-to-right column reduction with pivot = largest row index.
/// Columns for which `skip(col)` holds are treated as zero.
/// Returns the rank and, per row, whether it became a pivot.
fn reduce<F: Fn(usize) -> bool>(rows: usize, columns: &Columns, skip: F) -> (usize, Vec<bool>) {
    const NONE: u32 = u32::MAX;
    let mut pivot_col: Vec<u32> = vec![NONE; rows];
    // reduced form of a pivot column, empty when it was already reduced
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); columns.len()];
    let mut work = Vec::new();
    let mut scratch = Vec::new();
    let mut rank = 0;
    for j in 0..columns.len() {
        if skip(j) {
            continue;
        }
        let original = columns.col(j);
        let mut touched = false;
        loop {
            let current: &[u32] = if touched { &work } else { original };
            let Some(&low) = current.last() else { break };
            let other = pivot_col[low as usize];
            if other == NONE {
                break;
            }
            let other = other as usize;
            let other_col: &[u32] = if reduced[other].is_empty() {
                columns.col(other)
            } else {
                &reduced[other]
            };
            sym_diff_into(current, other_col, &mut scratch);
            std::mem::swap(&mut work, &mut scratch);
            touched = true;
        }
        let current: &[u32] = if touched { &work } else { original };
        if let Some(&low) = current.last() {
            pivot_col[low as usize] = j as u32;
            rank += 1;
            if touched {
                reduced[j] = std::mem::take(&mut work);
            }
        }
    }
    (rank, pivot_col.into_iter().map(|c| c != NONE).collect())
}

/// Matrix of `∂_k : C_k → C_{k-1}` in layer (lexicographic) order.
pub fn boundary_matrix(cplx: &CechComplex, k: usize) -> Result<BoundaryMatrix> {
    if k < 1 || k > cplx.max_sdim() {
        return Err(Error::Input(format!(
            "boundary index {k} must lie in 1..={}",
            cplx.max_sdim()
        )));
    }
    let faces = cplx.layer(k - 1).expect("k - 1 <= max_sdim");
    let layer = cplx.layer(k).expect("k <= max_sdim");
    let columns = facet_indices(layer, faces, |i| i)?;
    Ok(BoundaryMatrix {
        rows: faces.len(),
        columns,
    })
}

/// Facet positions of every simplex of `layer` within `faces`, mapped
/// through `relabel`, each column sorted ascending.
fn facet_indices<F: Fn(usize) -> usize>(
    layer: &SimplexLayer,
    faces: &SimplexLayer,
    relabel: F,
) -> Result<Vec<Vec<u32>>> {
    let index = LayerIndex::new(faces);
    let mut facet = Vec::with_capacity(layer.sdim());
    (0..layer.len())
        .map(|i| {
            let verts = layer.vertices(i);
            let mut col = Vec::with_capacity(verts.len());
            for skip in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, v)| *v));
                let pos = index
                    .find(&facet)
                    .ok_or_else(|| Error::Input(format!("facet {facet:?} of {verts:?} missing")))?;
                col.push(relabel(pos) as u32);
            }
            col.sort_unstable();
            Ok(col)
        })
        .collect()
}

/// Permutation sorting a layer by (radius, vertex tuple); returns rank-of-index.
fn filtration_order(layer: &SimplexLayer) -> Vec<usize> {
    let mut order: Vec<usize> = (0..layer.len()).collect();
    // ties keep lexicographic (layer) order
    order.sort_unstable_by(|&a, &b| layer.radius(a).total_cmp(&layer.radius(b)).then(a.cmp(&b)));
    order
}

/// Betti numbers and Euler characteristic of a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiVector {
    /// `β_0 ..= β_d`.
    pub betti: Vec<usize>,
    /// `Σ (−1)^k β_k` over `k = 0..=d`.
    pub chi_from_betti: i64,
    /// Simplex counts per dimension `0..=max_sdim`.
    pub simplex_counts: Vec<usize>,
    /// Cycles in the top stored dimension that a truncated complex cannot
    /// fill; zero for complexes stored in full.
    pub top_cycles: usize,
}

impl BettiVector {
    /// `Σ (−1)^k · #k-simplices` over the stored dimensions.
    pub fn chi_from_counts(&self) -> i64 {
        alternating_sum(&self.simplex_counts)
    }
}

fn alternating_sum(xs: &[usize]) -> i64 {
    xs.iter()
        .enumerate()
        .map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) })
        .sum()
}

/// Ranks of `∂_1 ..= ∂_top` (index `k - 1` holds `rank ∂_k`).
fn boundary_ranks(cplx: &CechComplex) -> Result<Vec<usize>> {
    let top = cplx.max_sdim();
    let layers = cplx.layers();
    let orders: Vec<Vec<usize>> = layers.iter().map(filtration_order).collect();
    let mut ranks = Vec::with_capacity(top);
    // rows of the previous coboundary reduction that became pivots,
    // indexed by reversed filtration position of dimension k
    let mut cleared: Vec<bool> = vec![false; layers[0].len()];
    let mut facet = Vec::new();
    for k in 0..top {
        let lower = &layers[k];
        let upper = &layers[k + 1];
        let n_lower = lower.len();
        // coboundary δ_k as the anti-transpose of ∂_{k+1}: columns are
        // k-simplices and rows (k+1)-simplices, both in reversed filtration order
        let mut low_rev = vec![0u32; n_lower];
        for (p, &i) in orders[k].iter().enumerate() {
            low_rev[i] = (n_lower - 1 - p) as u32;
        }
        let index = LayerIndex::new(lower);
        // facets of each upper simplex, visited in increasing row order
        let mut facets = Vec::with_capacity(upper.len() * (k + 2));
        let mut counts = vec![0usize; n_lower + 1];
        for &i in orders[k + 1].iter().rev() {
            let verts = upper.vertices(i);
            for skip in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, v)| *v));
                let pos = index
                    .find(&facet)
                    .ok_or_else(|| Error::Input(format!("facet {facet:?} of {verts:?} missing")))?;
                let c = low_rev[pos];
                facets.push(c);
                counts[c as usize + 1] += 1;
            }
        }
        for c in 0..n_lower {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut entries = vec![0u32; facets.len()];
        for (e, &c) in facets.iter().enumerate() {
            let row = (e / (k + 2)) as u32;
            entries[fill[c as usize]] = row;
            fill[c as usize] += 1;
        }
        drop(facets);
        let columns = Columns {
            offsets: counts,
            entries,
        };
        let (rank, pivots) = reduce(upper.len(), &columns, |c| cleared[c]);
        ranks.push(rank);
        cleared = pivots;
    }
    Ok(ranks)
}

/// Betti numbers `β_0..β_d` over GF(2).
pub fn betti_numbers(cplx: &CechComplex) -> Result<BettiVector> {
    let d = cplx.dim;
    if cplx.max_sdim() < d + 1 {
        return Err(Error::Input(format!(
            "Betti numbers up to β_{d} need simplices up to dimension {}; complex stops at {}",
            d + 1,
            cplx.max_sdim()
        )));
    }
    let counts = cplx.counts();
    let ranks = boundary_ranks(cplx)?;
    let rank = |k: usize| -> usize {
        if k == 0 || k > ranks.len() {
            0
        } else {
            ranks[k - 1]
        }
    };
    let all: Vec<usize> = (0..counts.len()).map(|k| counts[k] - rank(k) - rank(k + 1)).collect();
    let betti = all[..=d].to_vec();
    let top_cycles = all[d + 1..].iter().sum();
    let chi_from_betti = alternating_sum(&betti);
    Ok(BettiVector {
        betti,
        chi_from_betti,
        simplex_counts: counts,
        top_cycles,
    })
}

/// Euler characteristic `Σ (−1)^k β_k`.
pub fn euler_characteristic(cplx: &CechComplex) -> Result<i64> {
    Ok(betti_numbers(cplx)?.chi_from_betti)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{build_complex, Simplex};
    use crate::geometry::GeometryContext;
    use crate::sampling::{sample_poisson, RngStream};

    fn complex(dim: usize, simplices: &[&[u32]]) -> CechComplex {
        let s: Vec<Simplex> = simplices
            .iter()
            .map(|v| Simplex {
                vertices: v.to_vec(),
                filtration_radius: 0.0,
            })
            .collect();
        CechComplex::from_simplices(dim, 0.0, &s).unwrap()
    }

    #[test]
    fn single_edge_boundary() {
        let c = complex(1, &[&[0], &[1], &[0, 1]]);
        let b = boundary_matrix(&c, 1).unwrap();
        assert_eq!(b.rows, 2);
        assert_eq!(b.columns, vec![vec![0, 1]]);
        assert!(boundary_matrix(&c, 0).is_err());
        assert!(boundary_matrix(&c, 3).is_err());
    }

    #[test]
    fn hollow_triangle() {
        let c = complex(2, &[&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]]);
        assert_eq!(boundary_matrix(&c, 1).unwrap().rank(), 2);
        let b = betti_numbers(&c).unwrap();
        assert_eq!(b.betti, vec![1, 1, 0]);
        assert_eq!(euler_characteristic(&c).unwrap(), 0);
    }

    #[test]
    fn single_vertex() {
        let c = complex(3, &[&[0]]);
        let b = betti_numbers(&c).unwrap();
        assert_eq!(b.betti, vec![1, 0, 0, 0]);
        assert_eq!(b.chi_from_betti, 1);
    }

    #[test]
    fn tetrahedron_boundary_is_a_sphere() {
        let mut s: Vec<Vec<u32>> = Vec::new();
        for a in 0..4u32 {
            s.push(vec![a]);
            for b in a + 1..4 {
                s.push(vec![a, b]);
                for c in b + 1..4 {
                    s.push(vec![a, b, c]);
                }
            }
        }
        let refs: Vec<&[u32]> = s.iter().map(|v| v.as_slice()).collect();
        let c = complex(3, &refs);
        let b = betti_numbers(&c).unwrap();
        assert_eq!(b.betti, vec![1, 0, 1, 0]);
        assert_eq!(b.chi_from_betti, 2);
        assert_eq!(b.chi_from_counts(), 2);
    }

    #[test]
    fn boundary_squares_to_zero_on_random_complexes() {
        for d in 1..=3 {
            let ctx = GeometryContext::new(d).unwrap();
            let n = 120.0;
            let r = ctx.radius_for_lambda(n, 4.0).min(0.16);
            let cloud = sample_poisson(n, &ctx, RngStream::new(13, d as u64)).unwrap();
            let c = build_complex(&cloud, r, d + 1, &ctx).unwrap();
            for k in 2..=d + 1 {
                let outer = boundary_matrix(&c, k - 1).unwrap();
                let inner = boundary_matrix(&c, k).unwrap();
                assert!(outer.compose(&inner).unwrap().is_zero(), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn insufficient_truncation_is_rejected() {
        let ctx = GeometryContext::new(2).unwrap();
        let cloud = sample_poisson(50.0, &ctx, RngStream::new(1, 1)).unwrap();
        let c = build_complex(&cloud, 0.05, 2, &ctx).unwrap();
        assert!(matches!(betti_numbers(&c), Err(Error::Input(_))));
    }

    #[test]
    fn alternating_sum_identity() {
        for seed in 0..10 {
            let ctx = GeometryContext::new(2).unwrap();
            let n = 200.0;
            let cloud = sample_poisson(n, &ctx, RngStream::new(17, seed)).unwrap();
            let r = ctx.radius_for_lambda(n, 2.0 + seed as f64);
            let c = build_complex(&cloud, r, 3, &ctx).unwrap();
            let b = betti_numbers(&c).unwrap();
            let top_sign = if c.max_sdim().is_multiple_of(2) { 1 } else { -1 };
            assert_eq!(b.chi_from_counts(), b.chi_from_betti + top_sign * b.top_cycles as i64);
            assert_eq!(b.betti[0], union_find_components(&c));
        }
    }

    fn union_find_components(c: &CechComplex) -> usize {
        let n = c.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (v, _) in c.layer(1).unwrap().iter() {
            let (a, b) = (find(&mut parent, v[0] as usize), find(&mut parent, v[1] as usize));
            parent[a] = b;
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }
}
