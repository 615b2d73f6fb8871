//! Bundled verification instances per family: radius ladders, named
//! subsets for the quasiconvexity and gate checks, boundary proxies, and
//! convergence sequences. The verify pipeline and the acceptance suite
//! share these.

use crate::boundary::{BoundaryProxy, SupportAtom};
use crate::graph::Vertex;
use crate::hhs::{product_region, HhsStructure};
use crate::maximize::verify::NamedSubset;
use crate::scalar::{Rat, Scalar};

use super::{Family, Model};

/// Documented acceptance ladder per family. The spec's top radius of 12 is
/// kept where the vertex budget allows (the grid); exponential families use
/// the doubling ladder inside their documented bounds.
pub fn default_ladder(family: Family) -> Vec<u32> {
    match family {
        Family::GridZn => vec![6, 12],
        Family::FreeFk => vec![4, 8],
        Family::TreeXTree => vec![4, 8],
        Family::ProductFkxZ => vec![4, 8],
        Family::ElectrifiedFk => vec![4, 8],
    }
}

pub fn hyperbolicity_ladder(family: Family) -> Vec<u32> {
    match family {
        Family::GridZn => vec![4, 6, 8, 10, 12],
        _ => default_ladder(family),
    }
}

/// Vertices whose grid coordinates agree (the diagonal), by label scan.
fn grid_diagonal<S: Scalar>(m: &Model<S>) -> Vec<Vertex> {
    m.graph
        .labels()
        .unwrap()
        .iter()
        .enumerate()
        .filter(|(_, l)| {
            let p: Vec<&str> = l.split(',').collect();
            p.len() == 2 && p[0] == p[1]
        })
        .map(|(i, _)| i as Vertex)
        .collect()
}

/// Two deep tips far from each other; never hierarchically quasiconvex at
/// scale since connecting geodesics pass the center.
fn two_tips<S: Scalar>(m: &Model<S>) -> Vec<Vertex> {
    let g = &m.graph;
    let row = g.distance_row(g.basepoint());
    let far = g
        .real_vertices()
        .max_by(|&a, &b| row.get(a).total_cmp(&row.get(b)).then(b.cmp(&a)))
        .unwrap();
    let frow = g.distance_row(far);
    let opposite = g
        .real_vertices()
        .max_by(|&a, &b| frow.get(a).total_cmp(&frow.get(b)).then(b.cmp(&a)))
        .unwrap();
    vec![far.min(opposite), far.max(opposite)]
}

/// Named subsets for the quasiconvexity-transfer and gate checks.
pub fn hqc_subsets<S: Scalar>(m: &Model<S>) -> Vec<NamedSubset> {
    let h = m.structure.as_ref();
    let mut out = vec![NamedSubset {
        name: "basepoint".into(),
        vertices: vec![h.ambient.basepoint()],
        expect_hqc: true,
    }];
    out.push(NamedSubset {
        name: "factor-slice".into(),
        vertices: factor_slice(h),
        expect_hqc: true,
    });
    out.push(NamedSubset {
        name: "two-tips".into(),
        vertices: two_tips(m),
        expect_hqc: false,
    });
    if m.spec.family == Family::GridZn {
        out.push(NamedSubset {
            name: "diagonal".into(),
            vertices: grid_diagonal(m),
            expect_hqc: false,
        });
    }
    out
}

/// The factor slice used as the standing quasiconvex witness: F_W of the
/// first non-maximal domain.
pub fn factor_slice<S: Scalar>(h: &HhsStructure<S>) -> Vec<Vertex> {
    let w = (0..h.domain_count())
        .find(|&w| w != h.maximal)
        .unwrap_or(h.maximal);
    if w == h.maximal {
        // single-domain structures: a deep geodesic segment
        let row = h.ambient.distance_row(h.ambient.basepoint());
        let far = h
            .ambient
            .real_vertices()
            .max_by(|&a, &b| row.get(a).total_cmp(&row.get(b)).then(b.cmp(&a)))
            .unwrap();
        h.ambient.geodesic(h.ambient.basepoint(), far).vertices
    } else {
        product_region(h, w).expect("factor region").f_w
    }
}

/// Gate targets: the quasiconvex witnesses only.
pub fn gate_subsets<S: Scalar>(m: &Model<S>) -> Vec<NamedSubset> {
    hqc_subsets(m).into_iter().filter(|s| s.expect_hqc).collect()
}

pub struct BundledProxy {
    pub name: String,
    pub proxy: BoundaryProxy,
    /// true when a support domain is bounded and the proxy is only usable
    /// in lenient mode
    pub lenient: bool,
}

fn half() -> Rat {
    Rat::from_ratio(1, 2)
}

fn one() -> Rat {
    Rat::from_int(1)
}

/// Horizon vertex of a non-maximal line-like domain: the far end of its
/// space from the projected basepoint.
fn domain_horizon<S: Scalar>(h: &HhsStructure<S>, w: usize) -> Vertex {
    let g = h.graph(w);
    let base = h.pi(w, h.ambient.basepoint());
    let row = g.distance_row(base);
    g.real_vertices()
        .max_by(|&a, &b| row.get(a).total_cmp(&row.get(b)).then(b.cmp(&a)))
        .unwrap()
}

/// Bundled boundary proxies per family.
pub fn bundled_proxies<S: Scalar>(m: &Model<S>) -> Vec<BundledProxy> {
    let h = m.structure.as_ref();
    let mut out = Vec::new();
    let non_maximal: Vec<usize> =
        (0..h.domain_count()).filter(|&w| w != h.maximal).collect();
    for &w in &non_maximal {
        out.push(BundledProxy {
            name: format!("p[{}]", h.domains[w].name),
            proxy: BoundaryProxy::singleton(w, domain_horizon(h, w)),
            lenient: !h.domains[w].unbounded,
        });
    }
    // orthogonal pairs get the equal-weight joint proxy
    for (i, &a) in non_maximal.iter().enumerate() {
        for &b in &non_maximal[i + 1..] {
            if h.rel.orthogonal(a, b) {
                out.push(BundledProxy {
                    name: format!("p[{}+{}]", h.domains[a].name, h.domains[b].name),
                    proxy: BoundaryProxy::new(vec![
                        SupportAtom { domain: a, horizon: domain_horizon(h, a), coeff: half() },
                        SupportAtom { domain: b, horizon: domain_horizon(h, b), coeff: half() },
                    ]),
                    lenient: false,
                });
            }
        }
    }
    // a proxy on the top space; lenient when the top is bounded
    out.push(BundledProxy {
        name: "q[top]".into(),
        proxy: BoundaryProxy::new(vec![SupportAtom {
            domain: h.maximal,
            horizon: domain_horizon(h, h.maximal),
            coeff: one(),
        }]),
        lenient: !h.domains[h.maximal].unbounded,
    });
    out
}

/// Convergence sequences per proxy: orbits marching toward the horizon.
pub fn bundled_sequence<S: Scalar>(m: &Model<S>, proxy_name: &str) -> Vec<Vertex> {
    let family = m.spec.family;
    let words: Vec<String> = match (family, proxy_name) {
        (Family::GridZn, "p[V1]") => power_words(m, "1,0"),
        (Family::GridZn, "p[V2]") => power_words(m, "0,1"),
        (Family::GridZn, _) => power_words(m, "1,1"),
        (Family::FreeFk, _) => power_words(m, "a"),
        (Family::ElectrifiedFk, "p[Q2]") => power_words(m, "b"),
        (Family::ElectrifiedFk, "q[top]") => power_words(m, "ab"),
        (Family::ElectrifiedFk, _) => power_words(m, "a"),
        (Family::TreeXTree, _) => power_words(m, "xy|xy"),
        (Family::ProductFkxZ, _) => power_words(m, "a|1"),
    };
    words
        .iter()
        .filter_map(|w| m.vertex_of(w))
        .collect()
}

fn power_words<S: Scalar>(m: &Model<S>, g: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = m.graph.label(m.graph.basepoint()).unwrap().to_string();
    loop {
        cur = m.mul(&cur, g);
        if m.vertex_of(&cur).is_none() {
            break;
        }
        out.push(cur.clone());
        if out.len() > 64 {
            break;
        }
    }
    out
}
