//! Hierarchy paths: fitting a path against every domain, and searching for
//! paths with bounded projection backtrack.

use std::cmp::Ordering;

use crate::graph::{fit_unparametrized_qg, QgFit, Vertex};
use crate::scalar::Scalar;

use super::HhsStructure;

#[derive(Clone, Debug)]
pub struct HierarchyFit<S> {
    /// Per-domain fit of the projected path.
    pub per_domain: Vec<(usize, QgFit<S>)>,
    /// Fit of the path itself against the ambient geodesic.
    pub ambient: QgFit<S>,
    /// Multiplicative stretch of the path as an ambient quasigeodesic.
    pub stretch: S,
    /// The single headline constant: worst of everything above.
    pub lambda: S,
}

pub fn hierarchy_path_fit<S: Scalar>(h: &HhsStructure<S>, path: &[Vertex]) -> HierarchyFit<S> {
    assert!(!path.is_empty());
    let mut per_domain = Vec::with_capacity(h.domain_count());
    let mut lambda = S::zero();
    for w in 0..h.domain_count() {
        let projected: Vec<Vertex> = path.iter().map(|&x| h.pi(w, x)).collect();
        let fit = fit_unparametrized_qg(h.graph(w), &projected).expect("nonempty path");
        lambda = S::max_of(lambda, fit.worst());
        per_domain.push((w, fit));
    }
    let ambient = fit_unparametrized_qg(&h.ambient, path).expect("nonempty path");
    lambda = S::max_of(lambda, ambient.worst());

    // multiplicative stretch: arc length against distance, per index pair
    let mut arc = vec![S::zero()];
    for i in 1..path.len() {
        let step = h.ambient.distance(path[i - 1], path[i]);
        arc.push(arc[i - 1].clone() + step);
    }
    let mut stretch = S::one();
    for i in 0..path.len() {
        let row = h.ambient.distance_row(path[i]);
        for j in i + 1..path.len() {
            let d = row.get(path[j]);
            let a = arc[j].clone() - arc[i].clone();
            // lambda' >= arc/(d+1) makes arc <= lambda' d + lambda'
            let needed = a / (d + S::one());
            stretch = S::max_of(stretch, needed);
        }
    }
    lambda = S::max_of(lambda, stretch.clone());
    HierarchyFit { per_domain, ambient, stretch, lambda }
}

#[derive(Clone, Debug)]
pub struct PathSearch<S> {
    pub path: Vec<Vertex>,
    pub fit: HierarchyFit<S>,
    /// Whether the fit met the requested lambda.
    pub ok: bool,
    pub explored: u64,
}

/// Searches shortest paths from x to y whose per-domain projection
/// backtrack stays within `lambda`, depth-first over the shortest-path dag
/// with ascending-id tie order. Returns the first verified path, or the
/// best-fit path explored within the node budget (failure is a value).
pub fn find_hierarchy_path<S: Scalar>(
    h: &HhsStructure<S>,
    x: Vertex,
    y: Vertex,
    lambda: &S,
    node_budget: u64,
) -> PathSearch<S> {
    if x == y {
        let path = vec![x];
        let fit = hierarchy_path_fit(h, &path);
        return PathSearch { path, fit, ok: true, explored: 0 };
    }
    let to_y = h.ambient.distance_row(y);
    let n_dom = h.domain_count();

    struct Frame<S> {
        vertex: Vertex,
        options: Vec<Vertex>,
        next: usize,
        running_max: Vec<S>,
    }

    // params measured as distance from the start's projection
    let param = |w: usize, v: Vertex| h.d_dom(w, x, v);

    let root_max: Vec<S> = (0..n_dom).map(|w| param(w, x)).collect();
    let dag_options = |v: Vertex| -> Vec<Vertex> {
        let rem = to_y.get(v);
        let mut opts: Vec<Vertex> = Vec::new();
        for (u, wlen) in h.ambient.neighbors(v) {
            if h.ambient.is_real(*u) && to_y.get(*u) + wlen.clone() == rem {
                opts.push(*u);
            } else if !h.ambient.is_real(*u) {
                for (z, w2) in h.ambient.neighbors(*u) {
                    if *z != v
                        && h.ambient.is_real(*z)
                        && to_y.get(*z) + w2.clone() + wlen.clone() == rem
                    {
                        opts.push(*z);
                    }
                }
            }
        }
        opts.sort_unstable();
        opts.dedup();
        opts
    };

    let mut stack = vec![Frame {
        vertex: x,
        options: dag_options(x),
        next: 0,
        running_max: root_max,
    }];
    let mut explored: u64 = 0;
    let mut best: Option<(S, Vec<Vertex>, HierarchyFit<S>)> = None;

    while let Some(frame) = stack.last_mut() {
        if frame.next >= frame.options.len() {
            stack.pop();
            continue;
        }
        let v = frame.options[frame.next];
        frame.next += 1;
        explored += 1;
        if explored > node_budget {
            break;
        }
        // prune on projection backtrack
        let mut new_max = frame.running_max.clone();
        let mut pruned = false;
        for (w, rm) in new_max.iter_mut().enumerate() {
            let p = param(w, v);
            if p.total_cmp(rm) == Ordering::Greater {
                *rm = p;
            } else {
                let drop = rm.clone() - p;
                if drop.total_cmp(lambda) == Ordering::Greater {
                    pruned = true;
                    break;
                }
            }
        }
        if pruned {
            continue;
        }
        if v == y {
            let mut path: Vec<Vertex> = stack.iter().map(|f| f.vertex).collect();
            path.push(y);
            let fit = hierarchy_path_fit(h, &path);
            let ok = fit.lambda.total_cmp(lambda) != Ordering::Greater;
            if ok {
                return PathSearch { path, fit, ok, explored };
            }
            let better = match &best {
                None => true,
                Some((l, _, _)) => fit.lambda.total_cmp(l) == Ordering::Less,
            };
            if better {
                best = Some((fit.lambda.clone(), path, fit));
            }
            continue;
        }
        stack.push(Frame {
            vertex: v,
            options: dag_options(v),
            next: 0,
            running_max: new_max,
        });
    }

    match best {
        Some((_, path, fit)) => PathSearch { path, fit, ok: false, explored },
        None => {
            // fall back to the deterministic geodesic
            let path = h.ambient.geodesic(x, y).vertices;
            let fit = hierarchy_path_fit(h, &path);
            let ok = fit.lambda.total_cmp(lambda) != Ordering::Greater;
            PathSearch { path, fit, ok, explored }
        }
    }
}
