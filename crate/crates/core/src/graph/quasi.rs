//! Quasigeodesic fitting and sampling.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::GraphError;
use crate::scalar::Scalar;

use super::{MetricGraph, Vertex};

/// Operational fit of a vertex sequence against the reference geodesic
/// between its endpoints.
///
/// * `offset`: max distance from a sample to the reference geodesic.
/// * `backtrack`: max drop of the nearest-point parameter below its running
///   maximum along the sample order.
/// * `gap`: max distance between consecutive samples.
#[derive(Clone, Debug, PartialEq)]
pub struct QgFit<S> {
    pub offset: S,
    pub backtrack: S,
    pub gap: S,
}

impl<S: Scalar> QgFit<S> {
    pub fn zero() -> Self {
        QgFit { offset: S::zero(), backtrack: S::zero(), gap: S::zero() }
    }

    pub fn worst(&self) -> S {
        S::max_of(self.offset.clone(), S::max_of(self.backtrack.clone(), self.gap.clone()))
    }

    pub fn max_with(&self, other: &Self) -> Self {
        QgFit {
            offset: S::max_of(self.offset.clone(), other.offset.clone()),
            backtrack: S::max_of(self.backtrack.clone(), other.backtrack.clone()),
            gap: S::max_of(self.gap.clone(), other.gap.clone()),
        }
    }
}

/// Fits `samples` against the deterministic geodesic from the first to the
/// last sample. Nearest-point parameters take the smallest parameter on ties.
pub fn fit_unparametrized_qg<S: Scalar>(
    g: &MetricGraph<S>,
    samples: &[Vertex],
) -> Result<QgFit<S>, GraphError> {
    if samples.len() < 2 {
        if samples.len() == 1 {
            return Ok(QgFit::zero());
        }
        return Err(GraphError::TooFewSamples(2));
    }
    let reference = g.geodesic(samples[0], *samples.last().unwrap());
    // Parameter of each reference vertex = arc length from the start.
    let params: Vec<S> = {
        let row = g.distance_row(samples[0]);
        reference.vertices.iter().map(|&v| row.get(v)).collect()
    };
    // One labeled multi-source sweep gives, per vertex, the distance to the
    // reference and the earliest nearest reference index.
    let (row, owner) = g.voronoi(&reference.vertices);

    let mut offset = S::zero();
    let mut backtrack = S::zero();
    let mut gap = S::zero();
    let mut running_max = params[owner[samples[0] as usize] as usize].clone();
    for (i, &s) in samples.iter().enumerate() {
        offset = S::max_of(offset, row.get(s));
        let p = params[owner[s as usize] as usize].clone();
        if p.total_cmp(&running_max) == Ordering::Less {
            backtrack = S::max_of(backtrack, running_max.clone() - p);
        } else {
            running_max = p;
        }
        if i + 1 < samples.len() {
            gap = S::max_of(gap, g.distance(s, samples[i + 1]));
        }
    }
    Ok(QgFit { offset, backtrack, gap })
}

/// Morse-constant estimate: worst two-sided neighborhood constant between
/// sampled (lambda, c)-quasigeodesic paths and the deterministic geodesic
/// with the same endpoints. Paths are sampled as random-tie-break shortest
/// paths with out-and-back detours of depth at most floor(c/2); this
/// under-approximates the space of all (lambda, c)-quasigeodesics.
pub fn morse_constant_estimate<S: Scalar>(
    g: &MetricGraph<S>,
    lambda: &S,
    c: &S,
    budget: u64,
    seed: u64,
) -> S {
    assert!(
        lambda.total_cmp(&S::one()) != Ordering::Less,
        "lambda must be at least 1"
    );
    let depth = c
        .to_ratio()
        .map(|(n, d)| (n / (2 * d)).max(0) as usize)
        .unwrap_or(0);
    let n = g.real_count() as u64;

    let samples: Vec<(u64, Vertex, Vertex)> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..budget)
            .map(|_| {
                (
                    rng.gen::<u64>(),
                    rng.gen_range(0..n) as Vertex,
                    rng.gen_range(0..n) as Vertex,
                )
            })
            .filter(|&(_, x, y)| x != y)
            .collect()
    };

    samples
        .par_iter()
        .map(|&(path_seed, x, y)| {
            let mut rng = ChaCha8Rng::seed_from_u64(path_seed);
            let path = random_quasigeodesic(g, x, y, depth, &mut rng);
            let geo = g.geodesic(x, y);
            let to_geo = g.set_row(&geo.vertices);
            let to_path = g.set_row(&path);
            let a = path
                .iter()
                .map(|&p| to_geo.get(p))
                .fold(S::zero(), S::max_of);
            let b = geo
                .vertices
                .iter()
                .map(|&p| to_path.get(p))
                .fold(S::zero(), S::max_of);
            S::max_of(a, b)
        })
        .reduce(S::zero, S::max_of)
}

/// Random shortest path from x to y (uniform tie-breaks over distance-
/// decreasing real neighbors) with random out-and-back excursions.
fn random_quasigeodesic<S: Scalar>(
    g: &MetricGraph<S>,
    x: Vertex,
    y: Vertex,
    detour_depth: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vertex> {
    let to_y = g.distance_row(y);
    let mut path = vec![x];
    let mut cur = x;
    while cur != y {
        let rem = to_y.get(cur);
        let options: Vec<Vertex> = g
            .neighbors(cur)
            .iter()
            .filter(|(v, w)| g.is_real(*v) && to_y.get(*v) + w.clone() == rem)
            .map(|(v, _)| *v)
            .collect();
        let next = if options.is_empty() {
            // hub-only step (cone graphs): fall back to the deterministic move
            let geo = g.geodesic(cur, y);
            geo.vertices[1]
        } else {
            options[rng.gen_range(0..options.len())]
        };
        if detour_depth > 0 && rng.gen_bool(0.25) {
            let mut excursion = Vec::new();
            let mut at = cur;
            for _ in 0..rng.gen_range(1..=detour_depth) {
                let nbrs: Vec<Vertex> = g
                    .neighbors(at)
                    .iter()
                    .filter(|(v, _)| g.is_real(*v))
                    .map(|(v, _)| *v)
                    .collect();
                if nbrs.is_empty() {
                    break;
                }
                at = nbrs[rng.gen_range(0..nbrs.len())];
                excursion.push(at);
            }
            let back: Vec<Vertex> = excursion.iter().rev().skip(1).copied().collect();
            path.extend(&excursion);
            path.extend(back);
            path.push(cur);
        }
        path.push(next);
        cur = next;
    }
    path
}

/// Retracts a ray onto a quasiconvex set: the initial segment up to the
/// first index whose tail stays in the closed `a`-neighborhood of `ys` is
/// kept, and every later vertex is replaced by its nearest `ys`-point
/// (smallest id on ties). Returns the new sequence and its measured additive
/// quasigeodesic constant.
pub fn retract_ray_to_quasiconvex<S: Scalar>(
    g: &MetricGraph<S>,
    ys: &[Vertex],
    ray: &[Vertex],
    a: &S,
) -> Result<(Vec<Vertex>, S), GraphError> {
    assert!(!ys.is_empty() && !ray.is_empty());
    let row = g.set_row(ys);
    let inside: Vec<bool> = ray
        .iter()
        .map(|&v| row.get(v).total_cmp(a) != Ordering::Greater)
        .collect();
    // smallest t0 with inside[t] for all t >= t0
    let mut t0 = ray.len();
    for t in (0..ray.len()).rev() {
        if inside[t] {
            t0 = t;
        } else {
            break;
        }
    }
    if t0 == ray.len() {
        return Err(GraphError::RayNotAsymptotic(a.render()));
    }

    let nearest_in_y = |v: Vertex| -> Vertex {
        let rv = g.distance_row(v);
        let dmin = ys
            .iter()
            .map(|&y| rv.get(y))
            .min_by(|p, q| p.total_cmp(q))
            .unwrap();
        ys.iter().copied().filter(|&y| rv.get(y) == dmin).min().unwrap()
    };

    let mut out = Vec::with_capacity(ray.len());
    out.extend_from_slice(&ray[..=t0]);
    for &v in &ray[t0 + 1..] {
        out.push(nearest_in_y(v));
    }

    // Achieved additive constant of the retraction as a (1, c)-quasigeodesic:
    // worst |d(out_i, out_j) - |i - j|| over index pairs, in edge-length units
    // of the original ray parametrization (unit steps).
    let mut c = S::zero();
    for i in 0..out.len() {
        let ri = g.distance_row(out[i]);
        for j in i + 1..out.len() {
            let d = ri.get(out[j]);
            let steps = S::from_int((j - i) as i64);
            c = S::max_of(c, (d - steps).abs());
        }
    }
    Ok((out, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn one() -> Rat {
        Rat::from_int(1)
    }

    fn path_graph(n: usize) -> MetricGraph<Rat> {
        let edges: Vec<_> = (0..n - 1)
            .map(|i| (i as Vertex, i as Vertex + 1, one()))
            .collect();
        MetricGraph::new(n, &edges, 0, None).unwrap()
    }

    fn two_rays() -> MetricGraph<Rat> {
        // center 0, ray A = 1..6, ray B = 7..12, plus a rung 3-9 making B
        // parallel to A for a while
        let mut edges = Vec::new();
        let mut prev = 0;
        for v in 1..=6 {
            edges.push((prev, v as Vertex, one()));
            prev = v as Vertex;
        }
        prev = 0;
        for v in 7..=12 {
            edges.push((prev, v as Vertex, one()));
            prev = v as Vertex;
        }
        MetricGraph::new(13, &edges, 0, None).unwrap()
    }

    #[test]
    fn fit_on_geodesic_is_zero() {
        let g = path_graph(10);
        let geo = g.geodesic(1, 8);
        let fit = fit_unparametrized_qg(&g, &geo.vertices).unwrap();
        assert_eq!(fit.offset, Rat::from_int(0));
        assert_eq!(fit.backtrack, Rat::from_int(0));
        assert_eq!(fit.gap, Rat::from_int(1));
    }

    #[test]
    fn fit_constant_sequence_all_zero() {
        let g = path_graph(5);
        let fit = fit_unparametrized_qg(&g, &[3, 3, 3]).unwrap();
        assert_eq!(fit, QgFit::zero());
    }

    #[test]
    fn out_and_back_backtrack_is_k() {
        // Walk 0..6 but insert a backtrack of depth 3 at vertex 4.
        let g = path_graph(8);
        let samples = vec![0, 1, 2, 3, 4, 3, 2, 1, 2, 3, 4, 5, 6, 7];
        let fit = fit_unparametrized_qg(&g, &samples).unwrap();
        assert_eq!(fit.backtrack, Rat::from_int(3));
        assert_eq!(fit.offset, Rat::from_int(0));
    }

    #[test]
    fn morse_zero_for_geodesics_on_trees() {
        let g = two_rays();
        let sigma = morse_constant_estimate(&g, &one(), &Rat::from_int(0), 64, 3);
        assert_eq!(sigma, Rat::from_int(0));
    }

    #[test]
    fn morse_bounded_by_detour_depth_on_trees() {
        let g = two_rays();
        let sigma = morse_constant_estimate(&g, &one(), &Rat::from_int(2), 64, 3);
        assert!(sigma <= Rat::from_int(2));
    }

    #[test]
    fn retract_identity_when_inside() {
        let g = two_rays();
        let ys: Vec<Vertex> = vec![0, 1, 2, 3, 4, 5, 6];
        let ray = vec![0, 1, 2, 3];
        let (out, c) = retract_ray_to_quasiconvex(&g, &ys, &ray, &one()).unwrap();
        assert_eq!(out, ray);
        assert_eq!(c, Rat::from_int(0));
    }

    #[test]
    fn retract_snaps_tail() {
        let g = two_rays();
        let ys: Vec<Vertex> = vec![0, 1, 2, 3, 4, 5, 6]; // ray A
        // Ray that wanders into B then comes back near A's start: tail at 0,1,2
        let ray = vec![7, 0, 1, 2, 3];
        let (out, c) = retract_ray_to_quasiconvex(&g, &ys, &ray, &Rat::from_int(0)).unwrap();
        assert_eq!(out, vec![7, 0, 1, 2, 3]);
        assert!(c <= Rat::from_int(1));
        // Diverging ray errors out.
        let bad = vec![7, 8, 9, 10];
        assert!(retract_ray_to_quasiconvex(&g, &ys, &bad, &Rat::from_int(1)).is_err());
    }
}
