//! The eleven structure axioms, verified over the finite model with
//! witnesses. Checks are exhaustive when the relevant tuple count fits the
//! budget and seeded-sampled otherwise; the report records which.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Vertex;
use crate::report::{CheckReport, Verdict};
use crate::scalar::Scalar;

use super::HhsStructure;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomId {
    Projections = 1,
    Nesting = 2,
    Orthogonality = 3,
    Transversality = 4,
    FiniteComplexity = 5,
    Containers = 6,
    Uniqueness = 7,
    BoundedGeodesicImage = 8,
    LargeLinks = 9,
    Consistency = 10,
    PartialRealization = 11,
}

impl AxiomId {
    pub fn all() -> [AxiomId; 11] {
        use AxiomId::*;
        [
            Projections,
            Nesting,
            Orthogonality,
            Transversality,
            FiniteComplexity,
            Containers,
            Uniqueness,
            BoundedGeodesicImage,
            LargeLinks,
            Consistency,
            PartialRealization,
        ]
    }

    pub fn from_number(n: u32) -> Option<AxiomId> {
        AxiomId::all().into_iter().find(|a| *a as u32 == n)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AxiomId::Projections => "axiom-01-projections",
            AxiomId::Nesting => "axiom-02-nesting",
            AxiomId::Orthogonality => "axiom-03-orthogonality",
            AxiomId::Transversality => "axiom-04-transversality",
            AxiomId::FiniteComplexity => "axiom-05-finite-complexity",
            AxiomId::Containers => "axiom-06-containers",
            AxiomId::Uniqueness => "axiom-07-uniqueness",
            AxiomId::BoundedGeodesicImage => "axiom-08-bounded-geodesic-image",
            AxiomId::LargeLinks => "axiom-09-large-links",
            AxiomId::Consistency => "axiom-10-consistency",
            AxiomId::PartialRealization => "axiom-11-partial-realization",
        }
    }
}

pub struct CheckConfig {
    pub budget: u64,
    pub seed: u64,
    pub model: String,
    /// Axiom 11 is only checked on realization targets drawn from the inner
    /// ball (ambient eccentricity minus 2E); noted in the report.
    pub skip_containers: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            budget: 100_000,
            seed: 0,
            model: String::new(),
            skip_containers: false,
        }
    }
}

pub fn check_axiom<S: Scalar>(
    h: &HhsStructure<S>,
    which: AxiomId,
    cfg: &CheckConfig,
) -> CheckReport {
    let mut rep = CheckReport::new(which.name(), cfg.model.clone());
    rep.set_param("E", h.e);
    rep.set_param("budget", cfg.budget);
    rep.set_param("seed", cfg.seed);
    match which {
        AxiomId::Projections => projections(h, &mut rep),
        AxiomId::Nesting => nesting(h, &mut rep),
        AxiomId::Orthogonality => orthogonality(h, &mut rep),
        AxiomId::Transversality => transversality(h, &mut rep),
        AxiomId::FiniteComplexity => finite_complexity(h, &mut rep),
        AxiomId::Containers => {
            if cfg.skip_containers {
                rep.verdict =
                    Verdict::Skipped("containers deferred to dummy domains".into());
            } else {
                containers(h, &mut rep);
            }
        }
        AxiomId::Uniqueness => uniqueness(h, cfg, &mut rep),
        AxiomId::BoundedGeodesicImage => bgi(h, cfg, &mut rep),
        AxiomId::LargeLinks => large_links(h, cfg, &mut rep),
        AxiomId::Consistency => consistency(h, cfg, &mut rep),
        AxiomId::PartialRealization => partial_realization(h, cfg, &mut rep),
    }
    rep
}

/// Runs all eleven checks plus a hyperbolicity probe of each domain space.
pub fn check_all<S: Scalar>(h: &HhsStructure<S>, cfg: &CheckConfig) -> Vec<CheckReport> {
    let mut out: Vec<CheckReport> =
        AxiomId::all().iter().map(|&a| check_axiom(h, a, cfg)).collect();
    out.push(domain_hyperbolicity(h, cfg));
    out
}

/// Not one of the eleven: probes that each domain space is E-hyperbolic.
pub fn domain_hyperbolicity<S: Scalar>(h: &HhsStructure<S>, cfg: &CheckConfig) -> CheckReport {
    let mut rep = CheckReport::new("domain-hyperbolicity", cfg.model.clone());
    rep.set_param("E", h.e);
    let e = h.e_scalar();
    for w in 0..h.domain_count() {
        let d = h.graph(w).estimate_delta(cfg.budget.min(20_000), cfg.seed);
        rep.record("delta", &h.domains[w].name, d.delta.render());
        if d.delta.total_cmp(&e) == Ordering::Greater {
            rep.fail_with(vec![
                ("domain".into(), h.domains[w].name.clone()),
                ("delta".into(), d.delta.render()),
            ]);
        }
    }
    rep
}

fn projections<S: Scalar>(h: &HhsStructure<S>, rep: &mut CheckReport) {
    let e = h.e_scalar();
    for w in 0..h.domain_count() {
        // (E,E)-coarse Lipschitz along every ambient edge
        for &(u, v, ref len) in h.ambient.edges() {
            if !h.ambient.is_real(u) || !h.ambient.is_real(v) {
                continue;
            }
            let d = h.d_dom(w, u, v);
            let bound = e.clone() * len.clone() + e.clone();
            if d.total_cmp(&bound) == Ordering::Greater {
                rep.fail_with(vec![
                    ("domain".into(), h.domains[w].name.clone()),
                    ("edge".into(), format!("({u},{v})")),
                    ("d_W".into(), d.render()),
                    ("bound".into(), bound.render()),
                ]);
                return;
            }
        }
        // coarsely onto
        let image = h.project_set(w, &h.ambient.real_vertices().collect::<Vec<_>>());
        let row = h.graph(w).set_row(&image);
        for z in h.graph(w).real_vertices() {
            if row.get(z).total_cmp(&e) == Ordering::Greater {
                rep.fail_with(vec![
                    ("domain".into(), h.domains[w].name.clone()),
                    ("vertex".into(), z.to_string()),
                    ("dist-to-image".into(), row.get(z).render()),
                ]);
                return;
            }
        }
    }
}

fn nesting<S: Scalar>(h: &HhsStructure<S>, rep: &mut CheckReport) {
    let e = h.e_scalar();
    // single maximal above everything is structural; re-assert here
    for v in 0..h.domain_count() {
        if !h.rel.nested_in(v, h.maximal) {
            rep.fail_with(vec![("not-below-maximal".into(), v.to_string())]);
            return;
        }
    }
    for v in 0..h.domain_count() {
        for w in 0..h.domain_count() {
            if !h.rel.properly_nested(v, w) {
                continue;
            }
            let up = match h.rho_up(v, w) {
                Some(u) if !u.is_empty() => u,
                _ => {
                    rep.fail_with(vec![("missing-rho".into(), format!("({v},{w})"))]);
                    return;
                }
            };
            let diam = h.set_diam(w, up);
            if diam.total_cmp(&e) == Ordering::Greater {
                rep.fail_with(vec![
                    ("pair".into(), format!("({v},{w})")),
                    ("rho-diam".into(), diam.render()),
                ]);
                return;
            }
            // downward map defined off the E-neighborhood of the shadow
            let row = h.graph(w).set_row(up);
            for z in h.graph(w).real_vertices() {
                if row.get(z).total_cmp(&e) == Ordering::Greater
                    && h.rho_down(v, w, z).is_none()
                {
                    rep.fail_with(vec![
                        ("pair".into(), format!("({v},{w})")),
                        ("undefined-at".into(), z.to_string()),
                    ]);
                    return;
                }
            }
        }
    }
    rep.record("chain", "longest", h.rel.longest_chain());
}

fn orthogonality<S: Scalar>(h: &HhsStructure<S>, rep: &mut CheckReport) {
    let n = h.domain_count();
    for v in 0..n {
        for w in 0..n {
            for u in 0..n {
                if v != w
                    && w != u
                    && v != u
                    && h.rel.properly_nested(v, w)
                    && h.rel.orthogonal(w, u)
                    && !h.rel.orthogonal(v, u)
                {
                    rep.fail_with(vec![
                        ("nested".into(), format!("{v} in {w}")),
                        ("orth".into(), format!("{w} perp {u}")),
                        ("violates".into(), format!("{v} not perp {u}")),
                    ]);
                    return;
                }
            }
        }
    }
}

fn transversality<S: Scalar>(h: &HhsStructure<S>, rep: &mut CheckReport) {
    let e = h.e_scalar();
    for v in 0..h.domain_count() {
        for w in 0..h.domain_count() {
            if v < w && h.rel.transverse(v, w) {
                for (a, b) in [(v, w), (w, v)] {
                    match h.rho_up(a, b) {
                        Some(set) if !set.is_empty() => {
                            let diam = h.set_diam(b, set);
                            if diam.total_cmp(&e) == Ordering::Greater {
                                rep.fail_with(vec![
                                    ("pair".into(), format!("({a},{b})")),
                                    ("rho-diam".into(), diam.render()),
                                ]);
                                return;
                            }
                        }
                        _ => {
                            rep.fail_with(vec![(
                                "missing-rho".into(),
                                format!("({a},{b})"),
                            )]);
                            return;
                        }
                    }
                }
            }
        }
    }
}

fn finite_complexity<S: Scalar>(h: &HhsStructure<S>, rep: &mut CheckReport) {
    let chain = h.rel.longest_chain();
    rep.record("chain", "longest", chain);
    if chain as u32 > h.e {
        rep.fail_with(vec![
            ("chain-length".into(), chain.to_string()),
            ("E".into(), h.e.to_string()),
        ]);
    }
}

fn containers<S: Scalar>(h: &HhsStructure<S>, rep: &mut CheckReport) {
    let n = h.domain_count();
    for w in 0..n {
        let below_w = h.rel.below(w);
        for &u in &below_w {
            let candidates: Vec<usize> = below_w
                .iter()
                .copied()
                .filter(|&v| h.rel.orthogonal(v, u))
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let container = below_w
                .iter()
                .copied()
                .filter(|&q| q != w)
                .find(|&q| candidates.iter().all(|&v| h.rel.nested_in(v, q)));
            match container {
                Some(q) => rep.record("container", format!("({u} in {w})"), q),
                None => {
                    rep.fail_with(vec![
                        ("w".into(), w.to_string()),
                        ("u".into(), u.to_string()),
                        ("needs".into(), format!("{candidates:?}")),
                    ]);
                    return;
                }
            }
        }
    }
}

fn sample_vertex_pairs(
    n: usize,
    budget: u64,
    seed: u64,
) -> (Vec<(Vertex, Vertex)>, bool) {
    let total = (n as u64) * (n as u64).saturating_sub(1) / 2;
    if total <= budget {
        let mut v = Vec::with_capacity(total as usize);
        for a in 0..n as Vertex {
            for b in a + 1..n as Vertex {
                v.push((a, b));
            }
        }
        (v, true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..budget)
            .map(|_| {
                (
                    rng.gen_range(0..n as u32),
                    rng.gen_range(0..n as u32),
                )
            })
            .filter(|(a, b)| a != b)
            .collect();
        (v, false)
    }
}

fn uniqueness<S: Scalar>(h: &HhsStructure<S>, cfg: &CheckConfig, rep: &mut CheckReport) {
    let e = h.e_scalar();
    let (pairs, exhaustive) = sample_vertex_pairs(h.ambient.real_count(), cfg.budget, cfg.seed);
    rep.set_param("exhaustive", exhaustive);
    // Gather (max_W d_W, d_X) per pair; fit theta as a monotone step table.
    let mut data: Vec<(S, S)> = Vec::with_capacity(pairs.len());
    for &(x, y) in &pairs {
        let dmax = (0..h.domain_count())
            .map(|w| h.d_dom(w, x, y))
            .fold(S::zero(), S::max_of);
        let dx = h.ambient.distance(x, y);
        if dmax.is_zero() && dx.total_cmp(&e) == Ordering::Greater {
            rep.fail_with(vec![
                ("pair".into(), format!("({x},{y})")),
                ("d_X".into(), dx.render()),
                ("max-d_W".into(), "0".into()),
            ]);
        }
        data.push((dmax, dx));
    }
    // theta(r) = 1 + max{d_X over pairs with max-d_W < r} for integer r.
    let rmax = data
        .iter()
        .map(|(m, _)| m.clone())
        .fold(S::zero(), S::max_of);
    let rmax_int = rmax.to_ratio().map(|(n, d)| n / d + 1).unwrap_or(8).min(64);
    for r in 1..=rmax_int {
        let rs = S::from_int(r);
        let theta = data
            .iter()
            .filter(|(m, _)| m.total_cmp(&rs) == Ordering::Less)
            .map(|(_, d)| d.clone())
            .fold(S::zero(), S::max_of)
            + S::one();
        rep.record("theta", r, theta.render());
    }
}

fn bgi<S: Scalar>(h: &HhsStructure<S>, cfg: &CheckConfig, rep: &mut CheckReport) {
    let e = h.e_scalar();
    for v in 0..h.domain_count() {
        for w in 0..h.domain_count() {
            if !h.rel.properly_nested(v, w) {
                continue;
            }
            let up = h.rho_up(v, w).expect("validated").clone();
            let g = h.graph(w);
            let row = g.set_row(&up);
            let (pairs, exhaustive) =
                sample_vertex_pairs(g.real_count(), cfg.budget / 4, cfg.seed ^ 0x8b);
            rep.set_param("exhaustive", exhaustive);
            for (a, b) in pairs {
                let geo = g.geodesic(a, b);
                let avoids = geo
                    .vertices
                    .iter()
                    .all(|&z| row.get(z).total_cmp(&e) == Ordering::Greater);
                if !avoids {
                    continue;
                }
                let mut image: Vec<Vertex> = Vec::new();
                for &z in &geo.vertices {
                    if let Some(set) = h.rho_down(v, w, z) {
                        image.extend(set.iter().copied());
                    }
                }
                image.sort_unstable();
                image.dedup();
                if image.is_empty() {
                    continue;
                }
                let diam = h.set_diam(v, &image);
                if diam.total_cmp(&e) == Ordering::Greater {
                    rep.fail_with(vec![
                        ("pair".into(), format!("({v},{w})")),
                        ("geodesic".into(), format!("({a},{b})")),
                        ("image-diam".into(), diam.render()),
                    ]);
                    return;
                }
            }
        }
    }
}

fn large_links<S: Scalar>(h: &HhsStructure<S>, cfg: &CheckConfig, rep: &mut CheckReport) {
    let e = h.e_scalar();
    let (pairs, exhaustive) =
        sample_vertex_pairs(h.ambient.real_count(), cfg.budget, cfg.seed ^ 0x91);
    rep.set_param("exhaustive", exhaustive);
    for w in 0..h.domain_count() {
        let strictly_below: Vec<usize> = h
            .rel
            .below(w)
            .into_iter()
            .filter(|&u| u != w)
            .collect();
        if strictly_below.is_empty() {
            continue;
        }
        for &(x, y) in &pairs {
            let m = strictly_below
                .iter()
                .filter(|&&u| h.d_dom(u, x, y).total_cmp(&e) == Ordering::Greater)
                .count();
            let bound = e.clone() * h.d_dom(w, x, y) + e.clone();
            if S::from_int(m as i64).total_cmp(&bound) == Ordering::Greater {
                rep.fail_with(vec![
                    ("w".into(), w.to_string()),
                    ("pair".into(), format!("({x},{y})")),
                    ("links".into(), m.to_string()),
                    ("bound".into(), bound.render()),
                ]);
                return;
            }
        }
    }
}

fn consistency<S: Scalar>(h: &HhsStructure<S>, cfg: &CheckConfig, rep: &mut CheckReport) {
    let e = h.e_scalar();
    let n = h.ambient.real_count();
    let xs: Vec<Vertex> = if (n as u64) <= cfg.budget {
        (0..n as Vertex).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa7);
        (0..cfg.budget).map(|_| rng.gen_range(0..n as u32)).collect()
    };
    for v in 0..h.domain_count() {
        for w in 0..h.domain_count() {
            if v == w {
                continue;
            }
            if h.rel.transverse(v, w) && v < w {
                let rv = h.rho_up(w, v).expect("validated");
                let rw = h.rho_up(v, w).expect("validated");
                for &x in &xs {
                    let a = h.dist_to_set(w, h.pi(w, x), rw);
                    let b = h.dist_to_set(v, h.pi(v, x), rv);
                    if a.total_cmp(&e) == Ordering::Greater
                        && b.total_cmp(&e) == Ordering::Greater
                    {
                        rep.fail_with(vec![
                            ("pair".into(), format!("({v},{w}) transverse")),
                            ("x".into(), x.to_string()),
                            ("d_W".into(), a.render()),
                            ("d_V".into(), b.render()),
                        ]);
                        return;
                    }
                }
            }
            if h.rel.properly_nested(v, w) {
                let rw = h.rho_up(v, w).expect("validated");
                for &x in &xs {
                    let a = h.dist_to_set(w, h.pi(w, x), rw);
                    if a.total_cmp(&e) != Ordering::Greater {
                        continue;
                    }
                    match h.rho_down(v, w, h.pi(w, x)) {
                        Some(img) => {
                            let mut set = img.clone();
                            set.push(h.pi(v, x));
                            set.sort_unstable();
                            set.dedup();
                            let d = h.set_diam(v, &set);
                            if d.total_cmp(&e) == Ordering::Greater {
                                rep.fail_with(vec![
                                    ("pair".into(), format!("({v},{w}) nested")),
                                    ("x".into(), x.to_string()),
                                    ("diam".into(), d.render()),
                                ]);
                                return;
                            }
                        }
                        None => {
                            rep.fail_with(vec![
                                ("pair".into(), format!("({v},{w}) nested")),
                                ("x".into(), x.to_string()),
                                ("rho-undefined-off-shadow".into(), "true".into()),
                            ]);
                            return;
                        }
                    }
                }
            }
        }
    }
    // third clause: rho coherence for nested chains
    for u in 0..h.domain_count() {
        for v in 0..h.domain_count() {
            if !h.rel.nested_in(u, v) {
                continue;
            }
            for w in 0..h.domain_count() {
                if w == u || w == v {
                    continue;
                }
                let applies = h.rel.properly_nested(v, w)
                    || (h.rel.transverse(v, w) && !h.rel.orthogonal(w, u));
                if !applies {
                    continue;
                }
                let (ru, rv) = match (h.rho_up(u, w), h.rho_up(v, w)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => continue,
                };
                let d = ru
                    .iter()
                    .map(|&z| h.dist_to_set(w, z, rv))
                    .fold(S::zero(), S::max_of);
                if d.total_cmp(&e) == Ordering::Greater {
                    rep.fail_with(vec![
                        ("chain".into(), format!("{u} in {v}, target {w}")),
                        ("rho-gap".into(), d.render()),
                    ]);
                    return;
                }
            }
        }
    }
}

fn partial_realization<S: Scalar>(
    h: &HhsStructure<S>,
    cfg: &CheckConfig,
    rep: &mut CheckReport,
) {
    let e = h.e_scalar();
    let n = h.ambient.real_count();
    // realization targets drawn from the inner ball only
    let base_row = h.ambient.distance_row(h.ambient.basepoint());
    let ecc = (0..n as Vertex)
        .map(|v| base_row.get(v))
        .fold(S::zero(), S::max_of);
    let inner = ecc - S::from_int(2 * h.e as i64);
    let inner_vertices: Vec<Vertex> = (0..n as Vertex)
        .filter(|&v| base_row.get(v).total_cmp(&inner) != Ordering::Greater)
        .collect();
    rep.set_param("inner-radius", inner.render());
    if inner_vertices.is_empty() {
        rep.verdict = Verdict::Skipped("inner ball empty at this radius".into());
        return;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xb3);
    let tuples = cfg.budget.min(200);
    let two_e = S::from_int(2 * h.e as i64);
    for i in 0..tuples {
        let y = inner_vertices[rng.gen_range(0..inner_vertices.len())];
        // grow a pairwise-orthogonal clique, cycling the start domain
        let mut clique: Vec<usize> = Vec::new();
        let start = (i as usize) % h.domain_count();
        clique.push(start);
        for v in 0..h.domain_count() {
            if clique.iter().all(|&c| h.rel.orthogonal(v, c)) && rng.gen_bool(0.8) {
                clique.push(v);
            }
        }
        // target points: uniform over the 2E-ball around each projection of y
        let targets: Vec<(usize, Vertex)> = clique
            .iter()
            .map(|&v| {
                let row = h.graph(v).distance_row(h.pi(v, y));
                let ball: Vec<Vertex> = h
                    .graph(v)
                    .real_vertices()
                    .filter(|&z| row.get(z).total_cmp(&two_e) != Ordering::Greater)
                    .collect();
                (v, ball[rng.gen_range(0..ball.len())])
            })
            .collect();
        // search for a realization point
        let found = (0..n as Vertex).find(|&x| {
            targets.iter().all(|&(v, p)| {
                h.graph(v)
                    .distance(h.pi(v, x), p)
                    .total_cmp(&e)
                    != Ordering::Greater
            }) && clique.iter().all(|&v| {
                (0..h.domain_count()).all(|w| {
                    if h.rel.properly_nested(v, w) || h.rel.transverse(v, w) {
                        let up = h.rho_up(v, w).expect("validated");
                        h.dist_to_set(w, h.pi(w, x), up).total_cmp(&e) != Ordering::Greater
                    } else {
                        true
                    }
                })
            })
        });
        if found.is_none() {
            rep.fail_with(vec![
                ("clique".into(), format!("{clique:?}")),
                (
                    "targets".into(),
                    format!(
                        "{:?}",
                        targets.iter().map(|(v, p)| (*v, *p)).collect::<Vec<_>>()
                    ),
                ),
            ]);
            return;
        }
    }
    rep.flag("realization-targets-from-inner-ball");
}
