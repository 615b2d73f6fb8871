//! Hierarchical quasiconvexity and the gate map.

use std::cmp::Ordering;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DistRow, Vertex};
use crate::scalar::Scalar;

use super::HhsStructure;

#[derive(Clone, Debug)]
pub struct HqcReport<S> {
    /// Worst per-domain quasiconvexity constant of the projections.
    pub k0_measured: S,
    pub part1_pass: bool,
    pub part1_witness: Option<(usize, Vertex)>,
    /// Realization envelope samples (max domain gap, ambient distance).
    pub envelope: Vec<(S, S)>,
}

impl<S: Scalar> HqcReport<S> {
    /// Envelope value k(r): the worst ambient distance among samples whose
    /// domain gap is at most r.
    pub fn envelope_at(&self, r: &S) -> S {
        self.envelope
            .iter()
            .filter(|(gap, _)| gap.total_cmp(r) != Ordering::Greater)
            .map(|(_, d)| d.clone())
            .fold(S::zero(), S::max_of)
    }
}

/// Checks hierarchical quasiconvexity of an ambient subset: part one is the
/// per-domain quasiconvexity of the projections at `k0`, part two records
/// the realization envelope on sampled ambient points.
pub fn is_hierarchically_quasiconvex<S: Scalar>(
    h: &HhsStructure<S>,
    ys: &[Vertex],
    k0: &S,
    budget: u64,
    seed: u64,
) -> HqcReport<S> {
    assert!(!ys.is_empty(), "HQC of the empty set");
    let mut k0_measured = S::zero();
    let mut part1_pass = true;
    let mut part1_witness = None;
    for w in 0..h.domain_count() {
        let img = h.project_set(w, ys);
        let mu = h.graph(w).measure_quasiconvexity(&img, budget, seed ^ w as u64);
        if mu.total_cmp(k0) == Ordering::Greater && part1_pass {
            part1_pass = false;
            let (_, witness) = h.graph(w).is_quasiconvex(&img, k0);
            part1_witness = Some((w, witness.unwrap_or(img[0])));
        }
        k0_measured = S::max_of(k0_measured, mu);
    }

    let n = h.ambient.real_count();
    let xs: Vec<Vertex> = if (n as u64) <= budget {
        (0..n as Vertex).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1);
        (0..budget).map(|_| rng.gen_range(0..n as u32)).collect()
    };
    let ambient_row = h.ambient.set_row(ys);
    let domain_rows: Vec<(usize, Vec<Vertex>)> = (0..h.domain_count())
        .map(|w| (w, h.project_set(w, ys)))
        .collect();
    let mut envelope = Vec::with_capacity(xs.len());
    for &x in &xs {
        let gap = domain_rows
            .iter()
            .map(|(w, img)| h.dist_to_set(*w, h.pi(*w, x), img))
            .fold(S::zero(), S::max_of);
        envelope.push((gap, ambient_row.get(x)));
    }
    envelope.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    HqcReport { k0_measured, part1_pass, part1_witness, envelope }
}

/// Gate of an ambient point into an (hierarchically quasiconvex) subset:
/// the member minimizing the summed deviation from the per-domain
/// closest-point projections, ties to the lowest vertex id.
pub fn gate<S: Scalar>(h: &HhsStructure<S>, ys: &[Vertex], x: Vertex) -> Vertex {
    assert!(!ys.is_empty(), "gate into the empty set");
    // Per-domain distance rows to the projection targets.
    let rows: Vec<(usize, Arc<DistRow<S>>)> = (0..h.domain_count())
        .map(|w| {
            let img = h.project_set(w, ys);
            let target = h.graph(w).closest_point_projection(&img, h.pi(w, x));
            (w, Arc::new(h.graph(w).set_row(&target)))
        })
        .collect();
    let mut best: Option<(S, Vertex)> = None;
    for &y in ys {
        let mut score = S::zero();
        for (w, row) in &rows {
            score = score + row.get(h.pi(*w, y));
        }
        best = Some(match best {
            None => (score, y),
            Some((bs, bv)) => match score.total_cmp(&bs) {
                Ordering::Less => (score, y),
                Ordering::Equal if y < bv => (score, y),
                _ => (bs, bv),
            },
        });
    }
    best.unwrap().1
}

/// Worst per-domain gap between the gate image and the closest-point
/// projection of the input, over the given sample points.
pub fn gate_projection_gap<S: Scalar>(
    h: &HhsStructure<S>,
    ys: &[Vertex],
    xs: &[Vertex],
) -> S {
    let mut worst = S::zero();
    for &x in xs {
        let g = gate(h, ys, x);
        for w in 0..h.domain_count() {
            let img = h.project_set(w, ys);
            let target = h.graph(w).closest_point_projection(&img, h.pi(w, x));
            let d = h.dist_to_set(w, h.pi(w, g), &target);
            worst = S::max_of(worst, d);
        }
    }
    worst
}
