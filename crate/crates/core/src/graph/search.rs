//! Shortest-path kernels.
//!
//! `scaled_sssp` runs on integer numerators: plain BFS when all weights are
//! equal, a binary-heap Dijkstra otherwise. `generic_*` run Dijkstra over the
//! scalar type. Both support multiple sources with per-source offsets and
//! report the owning source with ties going to the earliest source index.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::collections::VecDeque;

use crate::scalar::Scalar;

use super::Vertex;

/// Multi-source shortest paths on integer weights.
/// Returns (distance, owner-source-index) with `u32::MAX` for unreachable.
pub(crate) fn scaled_sssp(
    adj: &[Vec<(Vertex, u32)>],
    sources: &[(Vertex, u32)],
) -> (Vec<u32>, Vec<u32>) {
    let n = adj.len();
    let uniform = uniform_weight(adj);
    match uniform {
        Some(w) if sources.iter().all(|&(_, off)| off == 0) => {
            // BFS on hop counts, scaled once at the end.
            let mut dist = vec![u32::MAX; n];
            let mut owner = vec![u32::MAX; n];
            let mut q = VecDeque::new();
            for (i, &(s, _)) in sources.iter().enumerate() {
                if dist[s as usize] == u32::MAX {
                    dist[s as usize] = 0;
                    owner[s as usize] = i as u32;
                    q.push_back(s);
                }
            }
            while let Some(u) = q.pop_front() {
                let du = dist[u as usize];
                for &(v, _) in &adj[u as usize] {
                    if dist[v as usize] == u32::MAX {
                        dist[v as usize] = du + 1;
                        owner[v as usize] = owner[u as usize];
                        q.push_back(v);
                    }
                }
            }
            for d in &mut dist {
                if *d != u32::MAX {
                    *d *= w;
                }
            }
            (dist, owner)
        }
        _ => {
            let mut dist = vec![u32::MAX; n];
            let mut owner = vec![u32::MAX; n];
            let mut heap: BinaryHeap<Reverse<(u32, u32, Vertex)>> = BinaryHeap::new();
            for (i, &(s, off)) in sources.iter().enumerate() {
                if off < dist[s as usize] {
                    dist[s as usize] = off;
                    owner[s as usize] = i as u32;
                    heap.push(Reverse((off, i as u32, s)));
                }
            }
            while let Some(Reverse((d, o, u))) = heap.pop() {
                if d > dist[u as usize] || (d == dist[u as usize] && o > owner[u as usize]) {
                    continue;
                }
                for &(v, w) in &adj[u as usize] {
                    let nd = d + w;
                    let better = nd < dist[v as usize]
                        || (nd == dist[v as usize] && o < owner[v as usize]);
                    if better {
                        dist[v as usize] = nd;
                        owner[v as usize] = o;
                        heap.push(Reverse((nd, o, v)));
                    }
                }
            }
            (dist, owner)
        }
    }
}

fn uniform_weight(adj: &[Vec<(Vertex, u32)>]) -> Option<u32> {
    let mut w = None;
    for row in adj {
        for &(_, x) in row {
            match w {
                None => w = Some(x),
                Some(y) if y != x => return None,
                _ => {}
            }
        }
    }
    w
}

struct HeapEntry<S>(S, u32, Vertex);

impl<S: Scalar> PartialEq for HeapEntry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl<S: Scalar> Eq for HeapEntry<S> {}
impl<S: Scalar> PartialOrd for HeapEntry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for HeapEntry<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed for a min-heap via BinaryHeap.
        other
            .0
            .total_cmp(&self.0)
            .then(other.1.cmp(&self.1))
            .then(other.2.cmp(&self.2))
    }
}

pub(crate) fn generic_sssp<S: Scalar>(adj: &[Vec<(Vertex, S)>], src: Vertex) -> Vec<S> {
    generic_voronoi(adj, &[src]).0
}

pub(crate) fn generic_multi_sssp<S: Scalar>(adj: &[Vec<(Vertex, S)>], srcs: &[Vertex]) -> Vec<S> {
    generic_voronoi(adj, srcs).0
}

/// Generic Dijkstra; unreachable vertices get distance -1.
pub(crate) fn generic_voronoi<S: Scalar>(
    adj: &[Vec<(Vertex, S)>],
    srcs: &[Vertex],
) -> (Vec<S>, Vec<u32>) {
    let n = adj.len();
    let minus_one = S::from_int(-1);
    let mut dist = vec![minus_one; n];
    let mut owner = vec![u32::MAX; n];
    let mut heap: BinaryHeap<HeapEntry<S>> = BinaryHeap::new();
    for (i, &s) in srcs.iter().enumerate() {
        if dist[s as usize].is_negative() {
            dist[s as usize] = S::zero();
            owner[s as usize] = i as u32;
            heap.push(HeapEntry(S::zero(), i as u32, s));
        }
    }
    while let Some(HeapEntry(d, o, u)) = heap.pop() {
        let cur = &dist[u as usize];
        if cur.is_negative() {
            continue;
        }
        match d.total_cmp(cur) {
            std::cmp::Ordering::Greater => continue,
            std::cmp::Ordering::Equal if o > owner[u as usize] => continue,
            _ => {}
        }
        for (v, w) in &adj[u as usize] {
            let nd = d.clone() + w.clone();
            let dv = &dist[*v as usize];
            let better = dv.is_negative()
                || nd.total_cmp(dv) == std::cmp::Ordering::Less
                || (nd.total_cmp(dv) == std::cmp::Ordering::Equal && o < owner[*v as usize]);
            if better {
                dist[*v as usize] = nd.clone();
                owner[*v as usize] = o;
                heap.push(HeapEntry(nd, o, *v));
            }
        }
    }
    (dist, owner)
}
