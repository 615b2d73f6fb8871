//! Finite weighted-graph metric geometry.
//!
//! [`MetricGraph`] is the ambient model and every domain space. It is
//! immutable after construction; all operations are pure and safe to run in
//! parallel. Distance rows are cached behind a lock that callers never see.
//!
//! Graphs whose edge lengths are all integer multiples of a common unit get
//! an integer distance kernel (BFS / small-weight Dijkstra on `u32` numerators);
//! everything else falls back to a generic Dijkstra over the scalar type.

mod geometry;
mod quasi;
mod search;

pub use geometry::DeltaReport;
pub use quasi::{fit_unparametrized_qg, morse_constant_estimate, retract_ray_to_quasiconvex, QgFit};

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::GraphError;
use crate::scalar::Scalar;

pub type Vertex = u32;

/// Distance kernel selection, fixed at construction.
#[derive(Clone)]
pub(crate) enum Kernel {
    /// Every edge length equals `num/den` for a per-edge integer `num`;
    /// distances are computed as `u32` numerators over the shared `den`.
    Scaled { den: i64 },
    Generic,
}

impl<S: Scalar> std::fmt::Debug for MetricGraph<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricGraph")
            .field("vertices", &self.adj.len())
            .field("edges", &self.edges.len())
            .field("basepoint", &self.basepoint)
            .field("real", &self.real_count)
            .finish()
    }
}

pub struct MetricGraph<S: Scalar> {
    adj: Vec<Vec<(Vertex, S)>>,
    scaled_adj: Vec<Vec<(Vertex, u32)>>,
    edges: Vec<(Vertex, Vertex, S)>,
    basepoint: Vertex,
    labels: Option<Vec<String>>,
    label_index: Option<HashMap<String, Vertex>>,
    kernel: Kernel,
    /// Number of ordinary vertices. Auxiliary vertices (cone hubs) live in
    /// the tail `real_count..n` and are hidden from vertex-quantifying ops.
    real_count: usize,
    row_cache: RwLock<HashMap<Vertex, Arc<DistRow<S>>>>,
}

/// One single-source distance vector.
pub enum DistRow<S: Scalar> {
    Scaled { num: Vec<u32>, den: i64 },
    Generic(Vec<S>),
}

impl<S: Scalar> DistRow<S> {
    pub fn get(&self, v: Vertex) -> S {
        match self {
            DistRow::Scaled { num, den } => S::from_ratio(num[v as usize] as i64, *den),
            DistRow::Generic(d) => d[v as usize].clone(),
        }
    }

    /// Raw numerators when the scaled kernel is active.
    pub fn scaled(&self) -> Option<(&[u32], i64)> {
        match self {
            DistRow::Scaled { num, den } => Some((num, *den)),
            DistRow::Generic(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Geodesic<S> {
    pub vertices: Vec<Vertex>,
    pub length: S,
}

impl<S: Scalar> MetricGraph<S> {
    pub fn new(
        n: usize,
        edge_list: &[(Vertex, Vertex, S)],
        basepoint: Vertex,
        labels: Option<Vec<String>>,
    ) -> Result<Self, GraphError> {
        Self::with_real_count(n, edge_list, basepoint, labels, n)
    }

    /// Constructor used by cone-off builders: vertices `real_count..n` are
    /// auxiliary and excluded from vertex-quantifying operations.
    pub fn with_real_count(
        n: usize,
        edge_list: &[(Vertex, Vertex, S)],
        basepoint: Vertex,
        labels: Option<Vec<String>>,
        real_count: usize,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if basepoint as usize >= n {
            return Err(GraphError::BadBasepoint(basepoint));
        }
        if let Some(l) = &labels {
            if l.len() != real_count {
                return Err(GraphError::BadLabels(l.len(), real_count));
            }
        }

        // Canonicalize: unordered pairs, duplicates collapsed to the shortest.
        let mut canon: HashMap<(Vertex, Vertex), S> = HashMap::new();
        for &(u, v, ref w) in edge_list {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::EdgeOutOfRange(u, v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !w.is_positive() {
                return Err(GraphError::NonPositiveLength(u, v));
            }
            let key = (u.min(v), u.max(v));
            canon
                .entry(key)
                .and_modify(|old| {
                    if w.total_cmp(old) == std::cmp::Ordering::Less {
                        *old = w.clone();
                    }
                })
                .or_insert_with(|| w.clone());
        }
        let mut edges: Vec<(Vertex, Vertex, S)> =
            canon.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        edges.sort_by_key(|&(u, v, _)| (u, v));

        let mut adj: Vec<Vec<(Vertex, S)>> = vec![Vec::new(); n];
        for (u, v, w) in &edges {
            adj[*u as usize].push((*v, w.clone()));
            adj[*v as usize].push((*u, w.clone()));
        }
        for row in &mut adj {
            row.sort_by_key(|&(v, _)| v);
        }

        let kernel = pick_kernel(&edges);
        let scaled_adj = match &kernel {
            Kernel::Scaled { den } => adj
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(v, w)| {
                            let (num, d) = w.to_ratio().expect("scaled kernel edge");
                            (*v, (num * (den / d)) as u32)
                        })
                        .collect()
                })
                .collect(),
            Kernel::Generic => Vec::new(),
        };

        let label_index = labels.as_ref().map(|l| {
            l.iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i as Vertex))
                .collect()
        });

        let g = MetricGraph {
            adj,
            scaled_adj,
            edges,
            basepoint,
            labels,
            label_index,
            kernel,
            real_count,
            row_cache: RwLock::new(HashMap::new()),
        };

        // Connectivity is an invariant; reject rather than expose partial
        // distances ("unreachable" surfaces here, not per query).
        let row = g.compute_row(basepoint);
        if let Some(v) = (0..n as Vertex).find(|&v| !g.reached(&row, v)) {
            return Err(GraphError::Unreachable(v));
        }
        g.row_cache
            .write()
            .unwrap()
            .insert(basepoint, Arc::new(row));
        Ok(g)
    }

    fn reached(&self, row: &DistRow<S>, v: Vertex) -> bool {
        match row {
            DistRow::Scaled { num, .. } => num[v as usize] != u32::MAX,
            DistRow::Generic(d) => !d[v as usize].is_negative(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Ordinary (non-auxiliary) vertex count.
    pub fn real_count(&self) -> usize {
        self.real_count
    }

    pub fn real_vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.real_count as Vertex
    }

    pub fn is_real(&self, v: Vertex) -> bool {
        (v as usize) < self.real_count
    }

    pub fn basepoint(&self) -> Vertex {
        self.basepoint
    }

    pub fn edges(&self) -> &[(Vertex, Vertex, S)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, S)] {
        &self.adj[v as usize]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: Vertex) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(v as usize)).map(|s| s.as_str())
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<Vertex> {
        self.label_index.as_ref().and_then(|m| m.get(label).copied())
    }

    pub fn unit_scaled(&self) -> bool {
        matches!(self.kernel, Kernel::Scaled { .. })
    }

    pub(crate) fn scaled_den(&self) -> Option<i64> {
        match &self.kernel {
            Kernel::Scaled { den } => Some(*den),
            Kernel::Generic => None,
        }
    }

    fn compute_row(&self, src: Vertex) -> DistRow<S> {
        match &self.kernel {
            Kernel::Scaled { den } => {
                let num = search::scaled_sssp(&self.scaled_adj, &[(src, 0)]).0;
                DistRow::Scaled { num, den: *den }
            }
            Kernel::Generic => DistRow::Generic(search::generic_sssp(&self.adj, src)),
        }
    }

    /// Cached single-source distances.
    pub fn distance_row(&self, src: Vertex) -> Arc<DistRow<S>> {
        if let Some(r) = self.row_cache.read().unwrap().get(&src) {
            return r.clone();
        }
        let row = Arc::new(self.compute_row(src));
        let mut cache = self.row_cache.write().unwrap();
        cache.entry(src).or_insert_with(|| row.clone());
        cache.get(&src).unwrap().clone()
    }

    pub fn distance(&self, x: Vertex, y: Vertex) -> S {
        if x == y {
            return S::zero();
        }
        self.distance_row(x).get(y)
    }

    /// Distance to a vertex set (multi-source).
    pub fn distance_to_set(&self, x: Vertex, set: &[Vertex]) -> S {
        assert!(!set.is_empty(), "distance to empty set");
        let row = self.set_row(set);
        row.get(x)
    }

    /// Multi-source distance row d(., set).
    pub fn set_row(&self, set: &[Vertex]) -> DistRow<S> {
        match &self.kernel {
            Kernel::Scaled { den } => {
                let sources: Vec<(Vertex, u32)> = set.iter().map(|&v| (v, 0)).collect();
                let num = search::scaled_sssp(&self.scaled_adj, &sources).0;
                DistRow::Scaled { num, den: *den }
            }
            Kernel::Generic => DistRow::Generic(search::generic_multi_sssp(&self.adj, set)),
        }
    }

    /// Multi-source distances plus the index of the nearest source
    /// (ties broken toward the earliest source in `set`).
    pub fn voronoi(&self, set: &[Vertex]) -> (DistRow<S>, Vec<u32>) {
        match &self.kernel {
            Kernel::Scaled { den } => {
                let sources: Vec<(Vertex, u32)> = set.iter().map(|&v| (v, 0)).collect();
                let (num, owner) = search::scaled_sssp(&self.scaled_adj, &sources);
                (DistRow::Scaled { num, den: *den }, owner)
            }
            Kernel::Generic => {
                let (d, owner) = search::generic_voronoi(&self.adj, set);
                (DistRow::Generic(d), owner)
            }
        }
    }

    /// Closed C-neighborhood of a vertex set, restricted to real vertices.
    pub fn neighborhood_of_set(&self, set: &[Vertex], c: &S) -> Vec<Vertex> {
        let row = self.set_row(set);
        self.real_vertices()
            .filter(|&v| row.get(v).total_cmp(c) != std::cmp::Ordering::Greater)
            .collect()
    }

    /// The deterministic geodesic: lexicographically smallest vertex-id
    /// sequence among shortest paths. Auxiliary vertices are elided from the
    /// returned sequence, so on cone-off graphs consecutive entries are
    /// adjacent in the logical (coned) graph.
    pub fn geodesic(&self, x: Vertex, y: Vertex) -> Geodesic<S> {
        if x == y {
            return Geodesic { vertices: vec![x], length: S::zero() };
        }
        let to_y = self.distance_row(y);
        let mut seq = vec![x];
        let mut cur = x;
        let total = to_y.get(x);
        // Greedy: among neighbors that stay on a shortest path, take the
        // smallest id. For graphs with auxiliary hub vertices, a hub hop is a
        // half-step of a logical cone edge; the candidate set is then every
        // real vertex reachable through one hub, and the smallest such id
        // competes with plain neighbors.
        loop {
            let remaining = to_y.get(cur);
            let mut best: Option<Vertex> = None;
            for (v, w) in self.neighbors(cur) {
                let v = *v;
                if self.is_real(v) {
                    if to_y.get(v) + w.clone() == remaining {
                        best = Some(match best {
                            Some(b) => b.min(v),
                            None => v,
                        });
                    }
                } else {
                    // hub hop: cur -> v -> z counts as one logical step
                    let hw = w.clone();
                    for (z, w2) in self.neighbors(v) {
                        let z = *z;
                        if z != cur
                            && self.is_real(z)
                            && to_y.get(z) + w2.clone() + hw.clone() == remaining
                        {
                            best = Some(match best {
                                Some(b) => b.min(z),
                                None => z,
                            });
                        }
                    }
                }
            }
            let next = best.expect("geodesic step: graph is connected");
            seq.push(next);
            if next == y {
                break;
            }
            cur = next;
        }
        Geodesic { vertices: seq, length: total }
    }

    pub fn gromov_product(&self, x: Vertex, y: Vertex, z: Vertex) -> S {
        let s = self.distance(x, z) + self.distance(y, z) - self.distance(x, y);
        s.half()
    }

    /// Gromov product taken at the graph basepoint.
    pub fn gromov_product_base(&self, x: Vertex, y: Vertex) -> S {
        self.gromov_product(x, y, self.basepoint)
    }

    /// Exact diameter over real vertices. Quadratic in the worst case; rows
    /// are computed per source and not retained.
    pub fn diameter(&self) -> S {
        let mut best = S::zero();
        for v in self.real_vertices() {
            let row = self.compute_row(v);
            for u in self.real_vertices() {
                let d = row.get(u);
                best = S::max_of(best, d);
            }
        }
        best
    }

    /// Lower bound on the diameter from a double sweep; exact on trees and
    /// good enough for unbounded-flag thresholds on large models.
    pub fn diameter_estimate(&self) -> S {
        let row = self.distance_row(self.basepoint);
        let far = self
            .real_vertices()
            .max_by(|&a, &b| row.get(a).total_cmp(&row.get(b)))
            .unwrap_or(self.basepoint);
        let row2 = self.distance_row(far);
        self.real_vertices()
            .map(|v| row2.get(v))
            .fold(S::zero(), S::max_of)
    }
}

fn pick_kernel<S: Scalar>(edges: &[(Vertex, Vertex, S)]) -> Kernel {
    const DEN_CAP: i64 = 1 << 12;
    let mut den: i64 = 1;
    for (_, _, w) in edges {
        match w.to_ratio() {
            Some((_, d)) => {
                den = num_integer::lcm(den, d);
                if den > DEN_CAP {
                    return Kernel::Generic;
                }
            }
            None => return Kernel::Generic,
        }
    }
    // Numerators must fit u32 with headroom for path sums.
    for (_, _, w) in edges {
        let (n, d) = w.to_ratio().unwrap();
        let scaled = n * (den / d);
        if scaled <= 0 || scaled > (1 << 20) {
            return Kernel::Generic;
        }
    }
    Kernel::Scaled { den }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn path_graph(n: usize) -> MetricGraph<Rat> {
        let edges: Vec<_> = (0..n - 1)
            .map(|i| (i as Vertex, i as Vertex + 1, Rat::from_int(1)))
            .collect();
        MetricGraph::new(n, &edges, 0, None).unwrap()
    }

    #[test]
    fn rejects_disconnected() {
        let edges = vec![(0, 1, Rat::from_int(1))];
        let err = MetricGraph::new(3, &edges, 0, None).unwrap_err();
        assert!(matches!(err, GraphError::Unreachable(2)));
    }

    #[test]
    fn rejects_self_loop_and_nonpositive() {
        assert!(matches!(
            MetricGraph::new(2, &[(0, 0, Rat::from_int(1))], 0, None),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(matches!(
            MetricGraph::new(2, &[(0, 1, Rat::from_int(0))], 0, None),
            Err(GraphError::NonPositiveLength(0, 1))
        ));
    }

    #[test]
    fn path_distances() {
        let g = path_graph(6);
        assert_eq!(g.distance(0, 5), Rat::from_int(5));
        assert_eq!(g.distance(3, 3), Rat::from_int(0));
        assert!(g.unit_scaled());
    }

    #[test]
    fn parallel_edges_collapse_to_min() {
        let edges = vec![
            (0, 1, Rat::from_int(3)),
            (1, 0, Rat::from_int(1)),
        ];
        let g = MetricGraph::new(2, &edges, 0, None).unwrap();
        assert_eq!(g.distance(0, 1), Rat::from_int(1));
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn rational_lengths_take_scaled_kernel() {
        let edges = vec![
            (0, 1, Rat::from_ratio(1, 2)),
            (1, 2, Rat::from_ratio(3, 2)),
        ];
        let g = MetricGraph::new(3, &edges, 0, None).unwrap();
        assert!(g.unit_scaled());
        assert_eq!(g.distance(0, 2), Rat::from_int(2));
    }

    #[test]
    fn generic_kernel_f64() {
        let edges = vec![(0u32, 1u32, 0.3f64), (1, 2, 0.4)];
        let g = MetricGraph::new(3, &edges, 0, None).unwrap();
        assert!(!g.unit_scaled());
        assert!((g.distance(0, 2) - 0.7).abs() < 1e-12);
        let geo = g.geodesic(0, 2);
        assert_eq!(geo.vertices, vec![0, 1, 2]);
    }

    #[test]
    fn geodesic_is_deterministic_and_tight() {
        // 4-cycle: two shortest paths 0-1-2 and 0-3-2; lex picks 0-1-2.
        let one = Rat::from_int(1);
        let edges = vec![(0, 1, one), (1, 2, one), (2, 3, one), (3, 0, one)];
        let g = MetricGraph::new(4, &edges, 0, None).unwrap();
        let geo = g.geodesic(0, 2);
        assert_eq!(geo.vertices, vec![0, 1, 2]);
        assert_eq!(geo.length, Rat::from_int(2));
        assert_eq!(g.geodesic(2, 0).vertices, vec![2, 1, 0]);
    }

    #[test]
    fn gromov_product_formula() {
        let g = path_graph(9);
        // On a path, <x,y>_z = distance from z to the segment [x,y].
        assert_eq!(g.gromov_product(0, 4, 8), Rat::from_int(4));
        assert_eq!(g.gromov_product(2, 2, 7), Rat::from_int(5));
    }

    #[test]
    fn voronoi_tie_breaks_to_earliest_source() {
        let g = path_graph(5);
        let (row, owner) = g.voronoi(&[0, 4]);
        assert_eq!(row.get(2), Rat::from_int(2));
        assert_eq!(owner[2], 0); // equidistant; first source wins
    }
}
