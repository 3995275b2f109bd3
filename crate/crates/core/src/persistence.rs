//! Vietoris-Rips persistence in dimensions 0 and 1.
//!
//! Dimension 0 is read off a minimum spanning tree. Dimension 1 is computed by reducing the
//! coboundary matrix of the 2-skeleton (restricted to diameter `<= r_max`) over Z/2, processing
//! edges in reverse filtration order. Spanning-tree edges are cleared up front since they never
//! create a 1-cycle. Reduced columns are not stored: each pivot remembers only the set of edges
//! whose coboundaries sum to it, and coboundaries are recomputed when needed.
//!
//! Simplices are ordered by diameter, then dimension, then lexicographic vertex order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NiphError, Result};
use crate::geometry::{euclidean, DissimilarityMatrix, PointCloud};

/// Default budget on the number of edges entering a 1-dimensional computation.
pub const DEFAULT_MAX_EDGES: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub len: f64,
}

fn edge_order(a: &Edge, b: &Edge) -> Ordering {
    a.len
        .total_cmp(&b.len)
        .then(a.i.cmp(&b.i))
        .then(a.j.cmp(&b.j))
}

/// A finite metric space presented by index.
pub trait MetricSpace: Sync {
    fn size(&self) -> usize;

    fn distance(&self, i: usize, j: usize) -> f64;

    /// All pairs `i < j` with `distance(i, j) <= r`, failing once more than `limit` are found.
    fn edges_within(&self, r: f64, limit: usize) -> Result<Vec<Edge>> {
        let n = self.size();
        let rows: Vec<Vec<Edge>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i + 1..n)
                    .filter_map(|j| {
                        let len = self.distance(i, j);
                        (len <= r).then_some(Edge { i, j, len })
                    })
                    .collect()
            })
            .collect();
        let total: usize = rows.iter().map(Vec::len).sum();
        if total > limit {
            return Err(NiphError::Budget {
                budget: "max_edges",
                limit,
                required: total,
            });
        }
        Ok(rows.into_iter().flatten().collect())
    }

    /// Edges of a minimum spanning tree of the complete graph.
    fn spanning_tree(&self) -> Vec<Edge> {
        let n = self.size();
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                edges.push(Edge {
                    i,
                    j,
                    len: self.distance(i, j),
                });
            }
        }
        edges.sort_by(edge_order);
        let mut uf = UnionFind::new(n);
        let mut tree = Vec::with_capacity(n.saturating_sub(1));
        for e in edges {
            if uf.union(e.i, e.j) {
                tree.push(e);
                if tree.len() + 1 == n {
                    break;
                }
            }
        }
        tree
    }
}

impl MetricSpace for DissimilarityMatrix {
    fn size(&self) -> usize {
        self.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

impl MetricSpace for PointCloud {
    fn size(&self) -> usize {
        self.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    fn edges_within(&self, r: f64, limit: usize) -> Result<Vec<Edge>> {
        neighbour_edges(self, r, limit)
    }

    /// Dense Prim: O(n^2) time, O(n) memory, no distance matrix.
    fn spanning_tree(&self) -> Vec<Edge> {
        let n = self.len();
        if n < 2 {
            return Vec::new();
        }
        let mut in_tree = vec![false; n];
        let mut best = vec![f64::INFINITY; n];
        let mut parent = vec![0usize; n];
        let mut tree = Vec::with_capacity(n - 1);
        let mut current = 0;
        in_tree[0] = true;
        for _ in 1..n {
            let p = self.point(current);
            let mut next = usize::MAX;
            let mut next_d = f64::INFINITY;
            for v in 0..n {
                if in_tree[v] {
                    continue;
                }
                let d = euclidean(p, self.point(v));
                if d < best[v] {
                    best[v] = d;
                    parent[v] = current;
                }
                if best[v] < next_d || next == usize::MAX {
                    next_d = best[v];
                    next = v;
                }
            }
            in_tree[next] = true;
            let (i, j) = if parent[next] < next {
                (parent[next], next)
            } else {
                (next, parent[next])
            };
            tree.push(Edge { i, j, len: next_d });
            current = next;
        }
        tree
    }
}

/// Cell-list range search on coordinates.
fn neighbour_edges(cloud: &PointCloud, r: f64, limit: usize) -> Result<Vec<Edge>> {
    let n = cloud.len();
    let dim = cloud.dim();
    if n < 2 || !(r >= 0.0) {
        return Ok(Vec::new());
    }
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in cloud.points() {
        for k in 0..dim {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let extent = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| b - a)
        .fold(0.0f64, f64::max);
    // brute force when the range covers most of the cloud or cells would be degenerate
    if !r.is_finite() || r <= 0.0 || r * 4.0 >= extent || dim > 3 {
        return brute_edges(cloud, r, limit);
    }
    let cell = |p: &[f64]| -> Vec<i64> {
        p.iter()
            .zip(&lo)
            .map(|(x, l)| ((x - l) / r).floor() as i64)
            .collect()
    };
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in cloud.points().enumerate() {
        cells.entry(cell(p)).or_default().push(i);
    }
    let offsets = neighbour_offsets(dim);
    let rows: Vec<Vec<Edge>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = cloud.point(i);
            let home = cell(p);
            let mut row = Vec::new();
            let mut key = vec![0i64; dim];
            for off in &offsets {
                for k in 0..dim {
                    key[k] = home[k] + off[k];
                }
                if let Some(members) = cells.get(&key) {
                    for &j in members {
                        if j > i {
                            let len = euclidean(p, cloud.point(j));
                            if len <= r {
                                row.push(Edge { i, j, len });
                            }
                        }
                    }
                }
            }
            row
        })
        .collect();
    let total: usize = rows.iter().map(Vec::len).sum();
    if total > limit {
        return Err(NiphError::Budget {
            budget: "max_edges",
            limit,
            required: total,
        });
    }
    Ok(rows.into_iter().flatten().collect())
}

fn brute_edges(cloud: &PointCloud, r: f64, limit: usize) -> Result<Vec<Edge>> {
    let n = cloud.len();
    let pairs = n * (n - 1) / 2;
    if r.is_infinite() && pairs > limit {
        return Err(NiphError::Budget {
            budget: "max_edges",
            limit,
            required: pairs,
        });
    }
    let rows: Vec<Vec<Edge>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = cloud.point(i);
            (i + 1..n)
                .filter_map(|j| {
                    let len = euclidean(p, cloud.point(j));
                    (len <= r).then_some(Edge { i, j, len })
                })
                .collect()
        })
        .collect();
    let total: usize = rows.iter().map(Vec::len).sum();
    if total > limit {
        return Err(NiphError::Budget {
            budget: "max_edges",
            limit,
            required: total,
        });
    }
    Ok(rows.into_iter().flatten().collect())
}

fn neighbour_offsets(dim: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|o: Vec<i64>| {
                (-1..=1).map(move |d| {
                    let mut v = o.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// One (birth, death) record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub birth: f64,
    #[serde(with = "inf_float")]
    pub death: f64,
    pub dim: usize,
    /// Longest edge of the simplex whose entry kills the class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death_edge: Option<[usize; 2]>,
    /// Class still alive at the radius cap; its true death lies beyond it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

impl PersistencePair {
    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub dim: usize,
    pub pairs: Vec<PersistencePair>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PersistenceDiagram {
    pub fn finite(&self) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(|p| p.is_finite())
    }

    pub fn truncated_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.truncated).count()
    }
}

/// Serializes infinite values as the string `"inf"`.
pub mod inf_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") => {
                Ok(f64::INFINITY)
            }
            Raw::Str(s) => Err(de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// 0-dimensional persistence: one finite pair per spanning-tree edge plus one infinite pair.
pub fn vr_persistence_0<M: MetricSpace + ?Sized>(space: &M) -> Result<PersistenceDiagram> {
    let n = space.size();
    if n < 2 {
        return Err(NiphError::Degenerate(format!(
            "persistence needs at least 2 points, got {n}"
        )));
    }
    let mut tree = space.spanning_tree();
    tree.sort_by(edge_order);
    let mut pairs: Vec<PersistencePair> = tree
        .iter()
        .map(|e| PersistencePair {
            birth: 0.0,
            death: e.len,
            dim: 0,
            death_edge: Some([e.i, e.j]),
            truncated: false,
        })
        .collect();
    pairs.push(PersistencePair {
        birth: 0.0,
        death: f64::INFINITY,
        dim: 0,
        death_edge: None,
        truncated: false,
    });
    Ok(PersistenceDiagram {
        dim: 0,
        pairs,
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipsConfig {
    pub r_max: f64,
    pub max_edges: usize,
}

impl RipsConfig {
    pub fn new(r_max: f64) -> Self {
        Self {
            r_max,
            max_edges: DEFAULT_MAX_EDGES,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Triangle {
    diam: f64,
    verts: [u32; 3],
    max_edge: u32,
}

impl PartialEq for Triangle {
    fn eq(&self, other: &Self) -> bool {
        self.verts == other.verts
    }
}

impl Eq for Triangle {}

impl PartialOrd for Triangle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Triangle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.diam
            .total_cmp(&other.diam)
            .then(self.verts.cmp(&other.verts))
    }
}

struct Complex {
    edges: Vec<Edge>,
    /// Per vertex: (neighbour, edge rank), sorted by neighbour.
    adjacency: Vec<Vec<(u32, u32)>>,
}

impl Complex {
    fn coboundary(&self, rank: usize, out: &mut Vec<Triangle>) {
        out.clear();
        let e = self.edges[rank];
        let (a, b) = (&self.adjacency[e.i], &self.adjacency[e.j]);
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                Ordering::Less => x += 1,
                Ordering::Greater => y += 1,
                Ordering::Equal => {
                    let k = a[x].0;
                    let (r1, r2) = (a[x].1, b[y].1);
                    let max_edge = (rank as u32).max(r1).max(r2);
                    let mut verts = [e.i as u32, e.j as u32, k];
                    verts.sort_unstable();
                    out.push(Triangle {
                        diam: self.edges[max_edge as usize].len,
                        verts,
                        max_edge,
                    });
                    x += 1;
                    y += 1;
                }
            }
        }
        out.sort_unstable();
    }
}

fn symmetric_difference(a: &[Triangle], b: &[Triangle], out: &mut Vec<Triangle>) {
    out.clear();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
}

/// 1-dimensional persistence of the Rips filtration truncated at `cfg.r_max`.
///
/// Classes alive at `r_max` are reported with infinite death and `truncated = true`.
/// Zero-persistence pairs are omitted.
pub fn vr_persistence_1<M: MetricSpace + ?Sized>(
    space: &M,
    cfg: &RipsConfig,
) -> Result<PersistenceDiagram> {
    let n = space.size();
    if n < 2 {
        return Err(NiphError::Degenerate(format!(
            "persistence needs at least 2 points, got {n}"
        )));
    }
    if !(cfg.r_max > 0.0) {
        return Err(NiphError::InvalidInput(format!(
            "r_max must be > 0, got {}",
            cfg.r_max
        )));
    }
    if n > u32::MAX as usize {
        return Err(NiphError::Budget {
            budget: "max_points",
            limit: u32::MAX as usize,
            required: n,
        });
    }
    let mut edges = space.edges_within(cfg.r_max, cfg.max_edges)?;
    let mut diagram = PersistenceDiagram {
        dim: 1,
        pairs: Vec::new(),
        warnings: Vec::new(),
    };
    if edges.is_empty() {
        diagram
            .warnings
            .push(format!("no edges within r_max = {}", cfg.r_max));
        return Ok(diagram);
    }
    if edges.len() > u32::MAX as usize {
        return Err(NiphError::Budget {
            budget: "max_edges",
            limit: u32::MAX as usize,
            required: edges.len(),
        });
    }
    edges.par_sort_unstable_by(edge_order);

    let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (rank, e) in edges.iter().enumerate() {
        adjacency[e.i].push((e.j as u32, rank as u32));
        adjacency[e.j].push((e.i as u32, rank as u32));
    }
    adjacency
        .par_iter_mut()
        .for_each(|row| row.sort_unstable_by_key(|&(v, _)| v));

    let mut uf = UnionFind::new(n);
    let cleared: Vec<bool> = edges.iter().map(|e| uf.union(e.i, e.j)).collect();

    let complex = Complex { edges, adjacency };
    // pivot triangle -> edges whose coboundaries sum to the reduced column owning it
    let mut owners: HashMap<[u32; 3], Vec<u32>> = HashMap::new();
    let mut column = Vec::new();
    let mut scratch = Vec::new();
    let mut added = Vec::new();
    let mut merged = Vec::new();

    for rank in (0..complex.edges.len()).rev() {
        if cleared[rank] {
            continue;
        }
        complex.coboundary(rank, &mut column);
        let mut chain: Vec<u32> = vec![rank as u32];
        while let Some(pivot) = column.first() {
            let Some(owner) = owners.get(&pivot.verts) else {
                break;
            };
            // column += sum of coboundaries of the owner's chain
            added.clear();
            for &f in owner {
                complex.coboundary(f as usize, &mut scratch);
                symmetric_difference(&added, &scratch, &mut merged);
                std::mem::swap(&mut added, &mut merged);
            }
            symmetric_difference(&column, &added, &mut merged);
            std::mem::swap(&mut column, &mut merged);
            chain = xor_sorted(&chain, owner);
        }
        let birth = complex.edges[rank].len;
        match column.first() {
            None => diagram.pairs.push(PersistencePair {
                birth,
                death: f64::INFINITY,
                dim: 1,
                death_edge: None,
                truncated: true,
            }),
            Some(pivot) => {
                if pivot.diam > birth {
                    let e = complex.edges[pivot.max_edge as usize];
                    diagram.pairs.push(PersistencePair {
                        birth,
                        death: pivot.diam,
                        dim: 1,
                        death_edge: Some([e.i, e.j]),
                        truncated: false,
                    });
                }
                chain.sort_unstable();
                owners.insert(pivot.verts, chain);
            }
        }
    }
    diagram.pairs.sort_by(|a, b| {
        a.birth
            .total_cmp(&b.birth)
            .then(a.death.total_cmp(&b.death))
    });
    let truncated = diagram.truncated_count();
    if truncated > 0 {
        diagram.warnings.push(format!(
            "{truncated} classes still alive at r_max = {}",
            cfg.r_max
        ));
    }
    Ok(diagram)
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut a = a.to_vec();
    a.sort_unstable();
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
    out
}

/// Weighting of death times.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    #[default]
    Unit,
    /// `death - birth`
    PersistenceDiff,
    /// `death / birth`; undefined for 0-dimensional classes.
    PersistenceRatio,
}

impl std::str::FromStr for Weighting {
    type Err = NiphError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unit" | "none" => Ok(Self::Unit),
            "diff" | "persistence-diff" | "difference" => Ok(Self::PersistenceDiff),
            "ratio" | "persistence-ratio" | "quotient" => Ok(Self::PersistenceRatio),
            other => Err(NiphError::InvalidWeighting(format!(
                "unknown weighting `{other}` (expected unit, persistence-diff or persistence-ratio)"
            ))),
        }
    }
}

impl Weighting {
    fn weight(self, pair: &PersistencePair) -> Result<f64> {
        match self {
            Weighting::Unit => Ok(1.0),
            Weighting::PersistenceDiff => Ok(pair.death - pair.birth),
            Weighting::PersistenceRatio => {
                if pair.birth > 0.0 {
                    Ok(pair.death / pair.birth)
                } else {
                    Err(NiphError::InvalidWeighting(format!(
                        "ratio weighting needs positive births, found birth {} in dimension {}",
                        pair.birth, pair.dim
                    )))
                }
            }
        }
    }
}

/// Finite death times with nonnegative weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDeaths {
    pub deaths: Vec<f64>,
    pub weights: Vec<f64>,
    /// Index of each entry in the source diagram's `pairs`.
    pub pair_refs: Vec<usize>,
}

impl WeightedDeaths {
    pub fn new(deaths: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let pair_refs = (0..deaths.len()).collect();
        let d = Self {
            deaths,
            weights,
            pair_refs,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.deaths.len() != self.weights.len() || self.deaths.len() != self.pair_refs.len() {
            return Err(NiphError::InvalidInput(
                "deaths, weights and pair references differ in length".into(),
            ));
        }
        if self.deaths.is_empty() {
            return Err(NiphError::EmptyDistribution("no finite deaths".into()));
        }
        if let Some(d) = self.deaths.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(NiphError::InvalidInput(format!(
                "death times must be finite and > 0, found {d}"
            )));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(NiphError::InvalidInput(
                "weights must be finite and >= 0".into(),
            ));
        }
        if self.total_weight() <= 0.0 {
            return Err(NiphError::EmptyDistribution("total weight is zero".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.deaths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deaths.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn death_distribution(
    diagram: &PersistenceDiagram,
    weighting: Weighting,
) -> Result<WeightedDeaths> {
    let mut deaths = Vec::new();
    let mut weights = Vec::new();
    let mut pair_refs = Vec::new();
    for (k, pair) in diagram.pairs.iter().enumerate() {
        if !pair.is_finite() {
            continue;
        }
        weights.push(weighting.weight(pair)?);
        deaths.push(pair.death);
        pair_refs.push(k);
    }
    if deaths.is_empty() {
        return Err(NiphError::EmptyDistribution(format!(
            "the {}-dimensional diagram has no finite pairs",
            diagram.dim
        )));
    }
    let out = WeightedDeaths {
        deaths,
        weights,
        pair_refs,
    };
    out.validate()?;
    Ok(out)
}

/// Weighted angles in `[0, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularSample {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AngularSample {
    /// Weighted mean resultant length of the doubled angles.
    pub fn resultant_length(&self) -> f64 {
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for (a, w) in self.angles.iter().zip(&self.weights) {
            sx += w * (2.0 * a).cos();
            sy += w * (2.0 * a).sin();
            sw += w;
        }
        if sw > 0.0 {
            (sx * sx + sy * sy).sqrt() / sw
        } else {
            0.0
        }
    }

    /// Axial circular variance `1 - R` in `[0, 1]`.
    pub fn circular_variance(&self) -> f64 {
        1.0 - self.resultant_length()
    }

    /// Axial mean direction in `[0, pi)`.
    pub fn dominant_angle(&self) -> f64 {
        crate::synth::axial_mean(&self.angles, Some(&self.weights))
    }

    pub fn histogram(&self, bins: usize) -> Vec<f64> {
        let mut h = vec![0.0; bins.max(1)];
        let width = PI / h.len() as f64;
        for (a, w) in self.angles.iter().zip(&self.weights) {
            let k = ((a / width) as usize).min(h.len() - 1);
            h[k] += w;
        }
        h
    }
}

/// Orientation of each finite pair's death edge, measured in `cloud`.
pub fn death_edge_orientations(
    diagram: &PersistenceDiagram,
    cloud: &PointCloud,
    weighting: Weighting,
) -> Result<AngularSample> {
    if cloud.dim() != 2 {
        return Err(NiphError::DimensionMismatch {
            expected: 2,
            found: cloud.dim(),
        });
    }
    let mut angles = Vec::new();
    let mut weights = Vec::new();
    for pair in diagram.finite() {
        let [i, j] = pair.death_edge.ok_or_else(|| {
            NiphError::InvalidInput(format!(
                "pair ({}, {}) carries no death edge",
                pair.birth, pair.death
            ))
        })?;
        if i >= cloud.len() || j >= cloud.len() {
            return Err(NiphError::InvalidInput(format!(
                "death edge ({i}, {j}) out of range for {} points",
                cloud.len()
            )));
        }
        let (p, q) = (cloud.point(i), cloud.point(j));
        angles.push((q[1] - p[1]).atan2(q[0] - p[0]).rem_euclid(PI) % PI);
        weights.push(weighting.weight(pair)?);
    }
    Ok(AngularSample { angles, weights })
}
