//! Čech complexes `C(P, r)` on the flat torus.
//!
//! A simplex belongs to the complex iff the `r`-balls around its vertices
//! share a point, i.e. iff the smallest enclosing ball of its vertices has
//! radius at most `r`. Below `r_max` every candidate simplex has diameter
//! under `r_conv`, so the enclosing ball is computed in one Euclidean chart
//! centred at the lowest vertex.

use std::cmp::Ordering;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::affine::{circumsphere, Coords};
use crate::error::{Error, Result};
use crate::geometry::{lift_into, GeometryContext};
use crate::neighbors::ProximityGraph;
use crate::sampling::PointCloud;
use crate::textio::sig17;

/// A simplex with its filtration value (smallest enclosing ball radius).
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<u32>,
    pub filtration_radius: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// All simplices of one dimension, sorted lexicographically by vertex tuple.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimplexLayer {
    sdim: usize,
    vertices: Vec<u32>,
    radii: Vec<f64>,
}

impl SimplexLayer {
    fn new(sdim: usize) -> Self {
        Self {
            sdim,
            vertices: Vec::new(),
            radii: Vec::new(),
        }
    }

    pub fn sdim(&self) -> usize {
        self.sdim
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    #[inline]
    pub fn vertices(&self, i: usize) -> &[u32] {
        let w = self.sdim + 1;
        &self.vertices[i * w..(i + 1) * w]
    }

    #[inline]
    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn get(&self, i: usize) -> Simplex {
        Simplex {
            vertices: self.vertices(i).to_vec(),
            filtration_radius: self.radii[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.vertices
            .chunks_exact(self.sdim + 1)
            .zip(self.radii.iter().copied())
    }

    /// Position of `vertices` in this layer.
    pub fn find(&self, vertices: &[u32]) -> Option<usize> {
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.vertices(mid).cmp(vertices) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    fn push(&mut self, vertices: &[u32], radius: f64) {
        debug_assert_eq!(vertices.len(), self.sdim + 1);
        self.vertices.extend_from_slice(vertices);
        self.radii.push(radius);
    }

    fn append(&mut self, other: &mut SimplexLayer) {
        self.vertices.append(&mut other.vertices);
        self.radii.append(&mut other.radii);
    }
}

/// Open-addressing hash table from vertex tuple to position in a layer.
pub(crate) struct LayerIndex<'a> {
    layer: &'a SimplexLayer,
    slots: Vec<u32>,
    shift: u32,
}

const EMPTY_SLOT: u32 = u32::MAX;

impl<'a> LayerIndex<'a> {
    pub(crate) fn new(layer: &'a SimplexLayer) -> Self {
        let bits = (2 * layer.len()).max(2).next_power_of_two().trailing_zeros();
        let mut index = Self {
            layer,
            slots: vec![EMPTY_SLOT; 1 << bits],
            shift: 64 - bits,
        };
        let mask = index.slots.len() - 1;
        for i in 0..layer.len() {
            let mut slot = index.home(layer.vertices(i));
            while index.slots[slot] != EMPTY_SLOT {
                slot = (slot + 1) & mask;
            }
            index.slots[slot] = i as u32;
        }
        index
    }

    #[inline]
    fn home(&self, vertices: &[u32]) -> usize {
        let mut h: u64 = 0;
        for &v in vertices {
            h = (h.rotate_left(21) ^ v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
        (h >> self.shift) as usize
    }

    /// Position of `vertices` (sorted) in the layer.
    #[inline]
    pub(crate) fn find(&self, vertices: &[u32]) -> Option<usize> {
        let mask = self.slots.len() - 1;
        let mut slot = self.home(vertices);
        loop {
            let i = self.slots[slot];
            if i == EMPTY_SLOT {
                return None;
            }
            if self.layer.vertices(i as usize) == vertices {
                return Some(i as usize);
            }
            slot = (slot + 1) & mask;
        }
    }
}

/// The complex `C(P, r)`, truncated at simplex dimension `max_sdim`.
#[derive(Clone, Debug, PartialEq)]
pub struct CechComplex {
    /// Ambient torus dimension `d`.
    pub dim: usize,
    pub radius: f64,
    layers: Vec<SimplexLayer>,
}

impl CechComplex {
    /// Builds a complex from an explicit, face-closed list of simplices.
    ///
    /// The list is taken to be the whole complex, so it is stored with empty
    /// layers up to dimension `dim + 1` and Betti numbers are available.
    pub fn from_simplices(dim: usize, radius: f64, simplices: &[Simplex]) -> Result<Self> {
        let top = simplices.iter().map(Simplex::dim).max().unwrap_or(0);
        Self::assemble(dim, radius, top.max(dim + 1), simplices)
    }

    fn assemble(dim: usize, radius: f64, max_sdim: usize, simplices: &[Simplex]) -> Result<Self> {
        let mut sorted: Vec<&Simplex> = simplices.iter().collect();
        for s in &sorted {
            if s.vertices.is_empty() || s.vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Input(format!(
                    "vertices {:?} are not strictly increasing",
                    s.vertices
                )));
            }
            if s.dim() > max_sdim {
                return Err(Error::Input(format!(
                    "simplex {:?} exceeds max_sdim {max_sdim}",
                    s.vertices
                )));
            }
        }
        sorted.sort_by(|a, b| {
            a.vertices
                .len()
                .cmp(&b.vertices.len())
                .then_with(|| a.vertices.cmp(&b.vertices))
        });
        sorted.dedup_by(|a, b| a.vertices == b.vertices);
        let mut layers: Vec<SimplexLayer> = (0..=max_sdim).map(SimplexLayer::new).collect();
        for s in sorted {
            layers[s.dim()].push(&s.vertices, s.filtration_radius);
        }
        let cplx = Self { dim, radius, layers };
        if let Some(missing) = cplx.first_missing_facet() {
            return Err(Error::Input(format!(
                "complex is not closed under faces: {missing:?} missing"
            )));
        }
        Ok(cplx)
    }

    /// Highest stored simplex dimension.
    pub fn max_sdim(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layer(&self, sdim: usize) -> Option<&SimplexLayer> {
        self.layers.get(sdim)
    }

    pub fn layers(&self) -> &[SimplexLayer] {
        &self.layers
    }

    /// Number of simplices per dimension `0..=max_sdim`.
    pub fn counts(&self) -> Vec<usize> {
        self.layers.iter().map(SimplexLayer::len).collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.layers[0].len()
    }

    fn first_missing_facet(&self) -> Option<Vec<u32>> {
        let mut facet = Vec::new();
        for k in 1..self.layers.len() {
            for (verts, _) in self.layers[k].iter() {
                for skip in 0..verts.len() {
                    facet.clear();
                    facet.extend(verts.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v));
                    if self.layers[k - 1].find(&facet).is_none() {
                        return Some(facet.clone());
                    }
                }
            }
        }
        None
    }

    /// Writes one line per simplex, `dim;v0,v1,...;radius`, after `#` header lines.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# ambient_dim={}", self.dim)?;
        writeln!(out, "# radius={}", sig17(self.radius))?;
        writeln!(out, "# max_sdim={}", self.max_sdim())?;
        for layer in &self.layers {
            for (verts, r) in layer.iter() {
                let vs: Vec<String> = verts.iter().map(u32::to_string).collect();
                writeln!(out, "{};{};{}", layer.sdim, vs.join(","), sig17(r))?;
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut dim = None;
        let mut radius = None;
        let mut max_sdim = None;
        let mut simplices = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((key, value)) = rest.trim().split_once('=') {
                    let value = value.trim();
                    match key.trim() {
                        "ambient_dim" => dim = Some(value.parse::<usize>().map_err(|e| perr(e.to_string()))?),
                        "radius" => radius = Some(value.parse::<f64>().map_err(|e| perr(e.to_string()))?),
                        "max_sdim" => max_sdim = Some(value.parse::<usize>().map_err(|e| perr(e.to_string()))?),
                        _ => {}
                    }
                }
                continue;
            }
            let parts: Vec<&str> = line.split(';').collect();
            if parts.len() != 3 {
                return Err(perr(format!("expected `dim;vertices;radius`, got {line:?}")));
            }
            let sdim: usize = parts[0].parse().map_err(|e| perr(format!("{e}")))?;
            let vertices = parts[1]
                .split(',')
                .map(|v| v.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| perr(format!("{e}")))?;
            if vertices.len() != sdim + 1 {
                return Err(perr(format!("{sdim}-simplex needs {} vertices", sdim + 1)));
            }
            let filtration_radius: f64 = parts[2].parse().map_err(|e| perr(format!("{e}")))?;
            simplices.push(Simplex {
                vertices,
                filtration_radius,
            });
        }
        let dim = dim.ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing `# ambient_dim=` header".into(),
        })?;
        let radius = radius.unwrap_or(f64::NAN);
        let top = simplices.iter().map(Simplex::dim).max().unwrap_or(0);
        let cplx = Self::assemble(dim, radius, max_sdim.unwrap_or(top.max(dim + 1)), &simplices)?;
        Ok(cplx)
    }
}

/// A ball in a Euclidean chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

const CONTAIN_REL_TOL: f64 = 1e-12;

/// Smallest enclosing ball of a few Euclidean points (Welzl with move-to-front).
pub fn miniball_radius(points: &[Vec<f64>]) -> Result<Ball> {
    if points.is_empty() {
        return Err(Error::Input("miniball of an empty point set".into()));
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.len(),
        });
    }
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    let (center, r2) = miniball(&refs);
    Ok(Ball {
        center: center.into_vec(),
        radius: r2.sqrt(),
    })
}

/// Squared-radius miniball on slices; the hot path of complex construction.
pub(crate) fn miniball(points: &[&[f64]]) -> (Coords, f64) {
    let dim = points[0].len();
    let mut order: SmallVec<[usize; 16]> = (0..points.len()).collect();
    shuffle_fixed(&mut order);
    let mut support: SmallVec<[usize; 8]> = SmallVec::new();
    let end = order.len();
    let (c, r2) = mtf(points, &mut order, end, &mut support, dim);
    (c.unwrap_or_else(|| Coords::from_slice(points[0])), r2)
}

fn shuffle_fixed(order: &mut [usize]) {
    // xorshift with a fixed seed: deterministic output for a given input
    let mut s: u64 = 0x2545_F491_4F6C_DD1D;
    for i in (1..order.len()).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let j = (s % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
}

fn ball_of_support(points: &[&[f64]], support: &[usize]) -> (Option<Coords>, f64) {
    if support.is_empty() {
        return (None, -1.0);
    }
    let pts: SmallVec<[&[f64]; 8]> = support.iter().map(|&i| points[i]).collect();
    let s = circumsphere(&pts);
    (Some(s.center), s.radius2)
}

fn contains(center: &Option<Coords>, r2: f64, p: &[f64]) -> bool {
    match center {
        None => false,
        Some(c) => {
            let d2: f64 = c.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            d2 <= r2 + CONTAIN_REL_TOL * r2.max(1e-300)
        }
    }
}

fn mtf(
    points: &[&[f64]],
    order: &mut SmallVec<[usize; 16]>,
    end: usize,
    support: &mut SmallVec<[usize; 8]>,
    dim: usize,
) -> (Option<Coords>, f64) {
    let (mut center, mut r2) = ball_of_support(points, support);
    if support.len() == dim + 1 {
        return (center, r2);
    }
    for i in 0..end {
        let idx = order[i];
        if !contains(&center, r2, points[idx]) {
            support.push(idx);
            let (c, r) = mtf(points, order, i, support, dim);
            support.pop();
            center = c;
            r2 = r;
            order.remove(i);
            order.insert(0, idx);
        }
    }
    (center, r2)
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

/// Index pairs `(i, j)`, `i < j`, at toroidal distance at most `2r`.
pub fn neighbor_pairs(cloud: &PointCloud, r: f64, ctx: &GeometryContext) -> Result<Vec<(usize, usize)>> {
    ctx.check_dim(cloud.dim())?;
    check_radius(r, ctx)?;
    Ok(ProximityGraph::build(cloud, 2.0 * r).pairs())
}

/// Points of one anchor's chart: the anchor at the origin followed by its
/// higher-indexed `2r`-neighbors, with pairwise adjacency.
pub(crate) struct AnchorChart {
    /// Global indices; position 0 is the anchor itself.
    pub ids: Vec<u32>,
    /// Lifted coordinates, `dim` per point.
    pub coords: Vec<f64>,
    pub adjacent: Vec<bool>,
    /// Lifted coordinates of the lower-indexed `2r`-neighbors (only when requested).
    pub lower: Vec<f64>,
    pub dim: usize,
}

impl AnchorChart {
    pub(crate) fn new(
        cloud: &PointCloud,
        graph: &ProximityGraph,
        anchor: usize,
        threshold: f64,
        with_lower: bool,
    ) -> Self {
        let dim = cloud.dim();
        let center = cloud.point(anchor);
        let mut ids = vec![anchor as u32];
        ids.extend(graph.neighbors(anchor).iter().copied().filter(|&j| j as usize > anchor));
        let m = ids.len();
        let mut coords = vec![0.0; m * dim];
        for (slot, &j) in ids.iter().enumerate().skip(1) {
            lift_into(
                center,
                cloud.point(j as usize),
                &mut coords[slot * dim..(slot + 1) * dim],
            );
        }
        let t2 = threshold * threshold;
        let mut adjacent = vec![false; m * m];
        for a in 0..m {
            for b in a + 1..m {
                let d2: f64 = (0..dim)
                    .map(|x| coords[a * dim + x] - coords[b * dim + x])
                    .map(|v| v * v)
                    .sum();
                let adj = d2 <= t2;
                adjacent[a * m + b] = adj;
                adjacent[b * m + a] = adj;
            }
        }
        let mut lower = Vec::new();
        if with_lower {
            let mut buf = vec![0.0; dim];
            for &j in graph.neighbors(anchor).iter().take_while(|&&j| (j as usize) < anchor) {
                lift_into(center, cloud.point(j as usize), &mut buf);
                lower.extend_from_slice(&buf);
            }
        }
        Self {
            ids,
            coords,
            adjacent,
            lower,
            dim,
        }
    }

    #[inline]
    pub(crate) fn point(&self, slot: usize) -> &[f64] {
        &self.coords[slot * self.dim..(slot + 1) * self.dim]
    }

    /// Depth-first enumeration of every simplex with first vertex `anchor`
    /// whose enclosing-ball radius is at most `r`, up to `max_sdim`.
    /// Visits in lexicographic order; `visit(slots, radius)` receives chart slots.
    pub(crate) fn for_each_simplex<F: FnMut(&[usize], f64)>(&self, r: f64, max_sdim: usize, mut visit: F) {
        visit(&[0], 0.0);
        if max_sdim == 0 {
            return;
        }
        let cands: Vec<usize> = (1..self.ids.len()).collect();
        let mut slots = vec![0usize];
        self.extend(&mut slots, &cands, 0.0, r * r, max_sdim, &mut visit);
    }

    fn extend<F: FnMut(&[usize], f64)>(
        &self,
        slots: &mut Vec<usize>,
        cands: &[usize],
        parent_r: f64,
        r2: f64,
        max_sdim: usize,
        visit: &mut F,
    ) {
        let m = self.ids.len();
        for (ci, &c) in cands.iter().enumerate() {
            slots.push(c);
            let ball_r2 = if slots.len() == 2 {
                let (a, b) = (self.point(slots[0]), self.point(c));
                0.25 * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
            } else {
                let pts: SmallVec<[&[f64]; 8]> = slots.iter().map(|&s| self.point(s)).collect();
                miniball(&pts).1
            };
            if ball_r2 <= r2 {
                let radius = ball_r2.max(0.0).sqrt().max(parent_r);
                visit(slots, radius);
                if slots.len() <= max_sdim {
                    let next: Vec<usize> = cands[ci + 1..]
                        .iter()
                        .copied()
                        .filter(|&o| self.adjacent[c * m + o])
                        .collect();
                    if !next.is_empty() {
                        self.extend(slots, &next, radius, r2, max_sdim, visit);
                    }
                }
            }
            slots.pop();
        }
    }
}

/// Builds `C(P, r)` up to simplex dimension `max_sdim`.
pub fn build_complex(cloud: &PointCloud, r: f64, max_sdim: usize, ctx: &GeometryContext) -> Result<CechComplex> {
    ctx.check_dim(cloud.dim())?;
    check_radius(r, ctx)?;
    if max_sdim < 1 || max_sdim > ctx.dim + 1 {
        return Err(Error::Input(format!(
            "max_sdim {max_sdim} must lie in 1..={}",
            ctx.dim + 1
        )));
    }
    let graph = ProximityGraph::build(cloud, 2.0 * r);
    // Helly: in a convex chart, d+2 or more balls meet iff every d+1 of them do,
    // so simplices above dimension d are determined by the d-skeleton
    let dfs_top = max_sdim.min(ctx.dim);
    let build_anchor = |v: usize| -> Vec<SimplexLayer> {
        let chart = AnchorChart::new(cloud, &graph, v, 2.0 * r, false);
        let mut layers: Vec<SimplexLayer> = (0..=dfs_top).map(SimplexLayer::new).collect();
        let mut buf = Vec::with_capacity(dfs_top + 1);
        chart.for_each_simplex(r, dfs_top, |slots, radius| {
            buf.clear();
            buf.extend(slots.iter().map(|&s| chart.ids[s]));
            layers[slots.len() - 1].push(&buf, radius);
        });
        layers
    };
    let per_anchor: Vec<Vec<SimplexLayer>> = if cloud.len() >= 2048 {
        (0..cloud.len()).into_par_iter().map(build_anchor).collect()
    } else {
        (0..cloud.len()).map(build_anchor).collect()
    };
    let mut layers: Vec<SimplexLayer> = (0..=dfs_top).map(SimplexLayer::new).collect();
    for mut anchor_layers in per_anchor {
        for (k, l) in anchor_layers.iter_mut().enumerate() {
            layers[k].append(l);
        }
    }
    let mut cplx = CechComplex {
        dim: ctx.dim,
        radius: r,
        layers,
    };
    close_and_monotonize(&mut cplx);
    for _ in dfs_top + 1..=max_sdim {
        let next = extend_by_facets(cplx.layers.last().expect("vertex layer"), &graph);
        cplx.layers.push(next);
    }
    Ok(cplx)
}

/// Every simplex one dimension up whose facets all lie in `layer`, with
/// filtration radius the largest facet radius. Output is lexicographic.
fn extend_by_facets(layer: &SimplexLayer, graph: &ProximityGraph) -> SimplexLayer {
    let index = LayerIndex::new(layer);
    let mut out = SimplexLayer::new(layer.sdim + 1);
    let mut facet: Vec<u32> = Vec::with_capacity(layer.sdim + 1);
    let mut cand: Vec<u32> = Vec::new();
    for i in 0..layer.len() {
        let verts = layer.vertices(i);
        let last = *verts.last().expect("nonempty simplex");
        let tail = graph.neighbors(last as usize);
        cand.clear();
        cand.extend_from_slice(&tail[tail.partition_point(|&u| u <= last)..]);
        for &v in &verts[..verts.len() - 1] {
            let nb = graph.neighbors(v as usize);
            cand.retain(|c| nb.binary_search(c).is_ok());
            if cand.is_empty() {
                break;
            }
        }
        'cands: for &c in &cand {
            let mut radius = layer.radius(i);
            for skip in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, v)| *v));
                facet.push(c);
                match index.find(&facet) {
                    Some(f) => radius = radius.max(layer.radius(f)),
                    None => continue 'cands,
                }
            }
            facet.clear();
            facet.extend_from_slice(verts);
            facet.push(c);
            out.push(&facet, radius);
        }
    }
    out
}

/// Drops any simplex with a missing facet (possible only through rounding
/// across charts at the threshold) and raises each filtration value to the
/// maximum over its facets.
fn close_and_monotonize(cplx: &mut CechComplex) {
    let mut facet = Vec::new();
    for k in 1..cplx.layers.len() {
        let (lower, upper) = cplx.layers.split_at_mut(k);
        let faces = LayerIndex::new(&lower[k - 1]);
        let layer = &mut upper[0];
        let mut keep = SimplexLayer::new(k);
        for i in 0..layer.len() {
            let verts = layer.vertices(i);
            let mut radius = layer.radius(i);
            let mut closed = true;
            for skip in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, v)| *v));
                match faces.find(&facet) {
                    Some(f) => radius = radius.max(lower[k - 1].radius(f)),
                    None => {
                        closed = false;
                        break;
                    }
                }
            }
            if closed {
                keep.push(verts, radius);
            }
        }
        *layer = keep;
    }
}
