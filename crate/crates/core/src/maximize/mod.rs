//! The maximization procedure: essential-domain filter, selection of the
//! retained set T, the cone-off of the factor slices, and assembly of the
//! maximized structure together with the auxiliary hyperbolic view of the
//! coned space.

pub mod verify;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::StructureError;
use crate::graph::{MetricGraph, Vertex};
use crate::hhs::axioms::{check_axiom, AxiomId, CheckConfig};
use crate::hhs::{product_region, Domain, HhsStructure, ProjectionTable, RelationTable};
use crate::report::CheckReport;
use crate::scalar::Scalar;

/// Deviation flag carried by every maximization-related report: the cone-off
/// adds edges across every parallel copy of each factor slice, not just one
/// chosen copy.
pub const CONE_SCOPE_FLAG: &str = "cone-scope:all-parallel-copies";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ConeTag {
    /// explicit cone edge, labeled by retained domain and slice component
    Edge { w: usize, slice: u32, u: Vertex, v: Vertex },
    /// hub vertex standing for all cone edges through one slice center
    Hub { w: usize, center: Vertex, hub: Vertex },
}

pub struct ConeOff<S: Scalar> {
    pub graph: Arc<MetricGraph<S>>,
    pub tags: Vec<ConeTag>,
    pub hubbed: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MaximizeTrace {
    pub removed_nonessential: Vec<(String, String)>,
    pub t_members: Vec<String>,
    pub dropped_from_t: Vec<String>,
    /// agreement of the two T characterizations (slice diameters vs
    /// unbounded orthogonal partners), per domain
    pub t_cross_check: BTreeMap<String, bool>,
    pub warnings: Vec<String>,
    pub flags: Vec<String>,
}

pub struct MaximizationResult<S: Scalar> {
    /// input structure after the essential-domain filter
    pub original: Arc<HhsStructure<S>>,
    /// indices (into `original`) of the retained set T, maximal first
    pub t_set: Vec<usize>,
    pub coned: ConeOff<S>,
    /// the maximized structure: domain 0 is the coned top space
    pub t_structure: Arc<HhsStructure<S>>,
    /// original index of each `t_structure` domain
    pub t_order: Vec<usize>,
    /// hyperbolic view of the coned space over the leftover domains
    pub view: Arc<HhsStructure<S>>,
    /// original index of each `view` domain
    pub view_order: Vec<usize>,
    pub trace: MaximizeTrace,
    pub assembly_reports: Vec<CheckReport>,
}

impl<S: Scalar> MaximizationResult<S> {
    /// T-structure index of an original domain, if retained.
    pub fn t_index(&self, original_idx: usize) -> Option<usize> {
        self.t_order.iter().position(|&o| o == original_idx)
    }

    pub fn view_index(&self, original_idx: usize) -> Option<usize> {
        self.view_order.iter().position(|&o| o == original_idx)
    }
}

/// Step 1: keep the domains that have an unbounded domain nested in them
/// (including themselves). Idempotent. If nothing survives, the maximal
/// domain is kept with a warning.
pub fn essential_filter<S: Scalar>(
    h: &HhsStructure<S>,
) -> Result<(HhsStructure<S>, MaximizeTrace), StructureError> {
    let mut trace = MaximizeTrace::default();
    let keep: Vec<usize> = (0..h.domain_count())
        .filter(|&u| {
            (0..h.domain_count())
                .any(|v| h.rel.nested_in(v, u) && h.domains[v].unbounded)
        })
        .collect();
    let keep = if keep.is_empty() {
        trace
            .warnings
            .push("all domains bounded; keeping only the maximal domain".into());
        vec![h.maximal]
    } else {
        keep
    };
    for u in 0..h.domain_count() {
        if !keep.contains(&u) {
            trace.removed_nonessential.push((
                h.domains[u].name.clone(),
                "no unbounded nested domain".into(),
            ));
        }
    }
    let restricted = h.restrict(&keep)?;
    restricted.validate()?;
    Ok((restricted, trace))
}

/// Step 2 selection: the maximal domain plus every domain whose factor
/// slices F_W and E_W are both unbounded. The two characterizations of
/// this condition — slice diameters against the threshold, and existence
/// of an unbounded orthogonal partner — are both computed; membership is
/// decided by the partner form, which stays meaningful when the slice
/// tolerance is comparable to the model radius, and any disagreement is
/// recorded as a sign that kappa_p or the threshold is mistuned.
pub fn build_t<S: Scalar>(
    h: &HhsStructure<S>,
    trace: &mut MaximizeTrace,
) -> Result<Vec<usize>, StructureError> {
    let mut t = vec![h.maximal];
    for w in 0..h.domain_count() {
        if w == h.maximal {
            continue;
        }
        let region = product_region(h, w)?;
        let by_slices = set_diameter_at_least(h, &region.f_w, &h.d_inf)
            && set_diameter_at_least(h, &region.e_w, &h.d_inf);
        let by_partners = h
            .rel
            .orth_set(w)
            .iter()
            .any(|&v| h.domains[v].unbounded);
        trace
            .t_cross_check
            .insert(h.domains[w].name.clone(), by_slices == by_partners);
        if by_slices != by_partners {
            trace.warnings.push(format!(
                "domain {}: slice and partner characterizations disagree; check kappa_p/d_inf",
                h.domains[w].name
            ));
        }
        if by_partners {
            t.push(w);
        } else {
            trace.dropped_from_t.push(h.domains[w].name.clone());
        }
    }
    trace.t_members = t.iter().map(|&w| h.domains[w].name.clone()).collect();
    Ok(t)
}

fn set_diameter_at_least<S: Scalar>(h: &HhsStructure<S>, set: &[Vertex], bound: &S) -> bool {
    if set.is_empty() {
        return false;
    }
    // double sweep within the subset; exact on the bundled families
    let row = h.ambient.distance_row(set[0]);
    let far = set
        .iter()
        .copied()
        .max_by(|&a, &b| row.get(a).total_cmp(&row.get(b)))
        .unwrap();
    let row2 = h.ambient.distance_row(far);
    let diam = set
        .iter()
        .map(|&v| row2.get(v))
        .fold(S::zero(), S::max_of);
    diam.total_cmp(bound) != std::cmp::Ordering::Less
}

const EXPLICIT_CONE_VERTEX_CAP: usize = 10_000;
const EXPLICIT_CONE_EDGE_CAP: usize = 5_000_000;

/// Step 2 space: the ambient graph with an edge of length one between every
/// pair of points in a common factor slice of a retained non-maximal
/// domain, across all parallel copies of the slice.
///
/// Small models get the edges explicitly. Large models get an equivalent
/// auxiliary-vertex form: a hub per slice center, attached at length 1/2 to
/// every member within half the slice tolerance, which reproduces the coned
/// metric exactly when the orthogonal coordinate space is a tree and the
/// tolerance is an even integer.
pub fn cone_off<S: Scalar>(
    h: &HhsStructure<S>,
    t_set: &[usize],
) -> Result<ConeOff<S>, StructureError> {
    let n = h.ambient.real_count();
    let base_edges: Vec<(Vertex, Vertex, S)> = h.ambient.edges().to_vec();
    let coned_members: Vec<usize> =
        t_set.iter().copied().filter(|&w| w != h.maximal).collect();

    if coned_members.is_empty() {
        let graph = Arc::new(
            MetricGraph::with_real_count(
                n,
                &base_edges,
                h.ambient.basepoint(),
                h.ambient.labels().map(|l| l.to_vec()),
                n,
            )
            .map_err(StructureError::AmbientGraph)?,
        );
        return Ok(ConeOff { graph, tags: Vec::new(), hubbed: false });
    }

    if n <= EXPLICIT_CONE_VERTEX_CAP {
        explicit_cone(h, &coned_members, base_edges)
    } else {
        hub_cone(h, &coned_members, base_edges)
    }
}

fn explicit_cone<S: Scalar>(
    h: &HhsStructure<S>,
    members: &[usize],
    mut edges: Vec<(Vertex, Vertex, S)>,
) -> Result<ConeOff<S>, StructureError> {
    let n = h.ambient.real_count();
    let mut tags = Vec::new();
    for &w in members {
        let in_region: Vec<Vertex> = h
            .ambient
            .real_vertices()
            .filter(|&x| h.in_product_region(w, x))
            .collect();
        let mut cone: Vec<(Vertex, Vertex)> = Vec::new();
        for (i, &x) in in_region.iter().enumerate() {
            for &y in &in_region[i + 1..] {
                if h.f_slice(w, x, y) {
                    cone.push((x, y));
                    if edges.len() + cone.len() > EXPLICIT_CONE_EDGE_CAP {
                        return Err(StructureError::ConeOff(
                            "explicit cone edge cap exceeded".into(),
                        ));
                    }
                }
            }
        }
        // slice ids: connected components of the cone relation for this W
        let mut comp: Vec<u32> = (0..n as u32).collect();
        fn find(comp: &mut [u32], mut x: u32) -> u32 {
            while comp[x as usize] != x {
                comp[x as usize] = comp[comp[x as usize] as usize];
                x = comp[x as usize];
            }
            x
        }
        for &(x, y) in &cone {
            let (a, b) = (find(&mut comp, x), find(&mut comp, y));
            if a != b {
                comp[a.max(b) as usize] = a.min(b);
            }
        }
        for (x, y) in cone {
            let slice = find(&mut comp, x);
            tags.push(ConeTag::Edge { w, slice, u: x, v: y });
            edges.push((x, y, S::one()));
        }
    }
    let graph = Arc::new(
        MetricGraph::with_real_count(
            n,
            &edges,
            h.ambient.basepoint(),
            h.ambient.labels().map(|l| l.to_vec()),
            n,
        )
        .map_err(StructureError::AmbientGraph)?,
    );
    Ok(ConeOff { graph, tags, hubbed: false })
}

fn hub_cone<S: Scalar>(
    h: &HhsStructure<S>,
    members: &[usize],
    base_edges: Vec<(Vertex, Vertex, S)>,
) -> Result<ConeOff<S>, StructureError> {
    let n = h.ambient.real_count();
    let half = h.kappa_p.half();
    match h.kappa_p.to_ratio() {
        Some((num, den)) if num % (2 * den) == 0 => {}
        _ => {
            return Err(StructureError::ConeOff(
                "hub cone requires an even integer slice tolerance".into(),
            ))
        }
    }
    let mut edges = base_edges;
    let mut tags = Vec::new();
    let mut next = n as Vertex;
    let labels = h.ambient.labels().map(|l| l.to_vec());
    for &w in members {
        let orth = h.rel.orth_set(w);
        if orth.len() != 1 {
            return Err(StructureError::ConeOff(format!(
                "hub cone supports exactly one orthogonal coordinate domain, found {}",
                orth.len()
            )));
        }
        let v = orth[0];
        let vg = h.graph(v);
        if !vg.unit_scaled() {
            return Err(StructureError::ConeOff(
                "hub cone requires integer-scaled coordinate spaces".into(),
            ));
        }
        // hub per coordinate-space vertex; members attach within half tolerance
        let mut hub_of: Vec<Option<Vertex>> = vec![None; vg.real_count()];
        for x in h.ambient.real_vertices() {
            if !h.in_product_region(w, x) {
                continue;
            }
            let row = vg.distance_row(h.pi(v, x));
            for m in vg.real_vertices() {
                if row.get(m).total_cmp(&half) != std::cmp::Ordering::Greater {
                    let hub = *hub_of[m as usize].get_or_insert_with(|| {
                        let id = next;
                        next += 1;
                        tags.push(ConeTag::Hub { w, center: m, hub: id });
                        id
                    });
                    // two half-length hops compose to one cone edge
                    edges.push((x, hub, S::from_ratio(1, 2)));
                }
            }
        }
    }
    let graph = Arc::new(
        MetricGraph::with_real_count(
            next as usize,
            &edges,
            h.ambient.basepoint(),
            labels,
            n,
        )
        .map_err(StructureError::AmbientGraph)?,
    );
    Ok(ConeOff { graph, tags, hubbed: true })
}

/// Full pipeline: filter, select T, cone, and assemble both structures.
pub fn maximize<S: Scalar>(
    h: &HhsStructure<S>,
    cfg: &CheckConfig,
) -> Result<MaximizationResult<S>, StructureError> {
    let (ess, mut trace) = essential_filter(h)?;
    let t_set = build_t(&ess, &mut trace)?;
    let coned = cone_off(&ess, &t_set)?;
    trace.flags.push(CONE_SCOPE_FLAG.into());
    assemble_maximized(Arc::new(ess), t_set, coned, trace, cfg)
}

/// Builds the maximized structure over T (top space = the coned graph, the
/// inclusion as its projection, slice images as relative projections) plus
/// the auxiliary hyperbolic view over the leftover domains, and runs the
/// axiom checks on both. The containers axiom is skipped with a notice:
/// its repair (inert dummy domains with point spaces) contributes nothing
/// at this scale.
pub fn assemble_maximized<S: Scalar>(
    original: Arc<HhsStructure<S>>,
    t_set: Vec<usize>,
    coned: ConeOff<S>,
    mut trace: MaximizeTrace,
    cfg: &CheckConfig,
) -> Result<MaximizationResult<S>, StructureError> {
    let h = original.as_ref();
    let e_prime = 2 * h.e;
    let e_prime_scalar = S::from_int(e_prime as i64);
    let n = h.ambient.real_count();

    // ---- structure over T: domain 0 is the coned top space
    let mut t_order = vec![h.maximal];
    t_order.extend(t_set.iter().copied().filter(|&w| w != h.maximal));
    let top_unbounded = {
        let est = coned.graph.diameter_estimate();
        est.total_cmp(&h.d_inf) != std::cmp::Ordering::Less
    };
    let mut t_domains = vec![Domain {
        name: format!("{}*", h.domains[h.maximal].name),
        graph: coned.graph.clone(),
        unbounded: top_unbounded,
    }];
    for &w in &t_order[1..] {
        t_domains.push(h.domains[w].clone());
    }
    let mut t_pairs = Vec::new();
    for (i, &wi) in t_order.iter().enumerate() {
        for (j, &wj) in t_order.iter().enumerate().skip(i + 1) {
            let kind = if i == 0 {
                crate::hhs::RelKind::SecondInFirst // wj nested in the top
            } else {
                h.rel.kind(wi, wj).expect("distinct")
            };
            t_pairs.push((i, j, kind));
        }
    }
    let t_rel = RelationTable::from_pairs(t_order.len(), &t_pairs)?;
    let mut t_proj = ProjectionTable {
        pi: vec![(0..n as Vertex).collect()],
        ..Default::default()
    };
    for &w in &t_order[1..] {
        t_proj.pi.push(h.proj.pi[w].clone());
    }
    // relative projections: slice images into the top, inclusions downward,
    // inherited tables among the retained non-maximal domains
    for (i, &w) in t_order.iter().enumerate().skip(1) {
        let region = product_region(h, w)?;
        let slice_image = region.f_w.clone();
        let row = coned.graph.set_row(&slice_image);
        let down: Vec<Option<Vec<Vertex>>> = (0..n as Vertex)
            .map(|z| {
                if row.get(z).total_cmp(&e_prime_scalar) == std::cmp::Ordering::Greater {
                    Some(vec![h.pi(w, z)])
                } else {
                    None
                }
            })
            .collect();
        t_proj.rho_up.insert((i, 0), slice_image);
        t_proj.rho_down.insert((i, 0), down);
        for (j, &wj) in t_order.iter().enumerate().skip(1) {
            if i == j {
                continue;
            }
            if let Some(set) = h.rho_up(w, wj) {
                t_proj.rho_up.insert((i, j), set.clone());
            }
            if let Some(table) = h.proj.rho_down.get(&(w, wj)) {
                t_proj.rho_down.insert((i, j), table.clone());
            }
        }
    }
    let t_structure = HhsStructure {
        ambient: h.ambient.clone(),
        domains: t_domains,
        maximal: 0,
        rel: t_rel,
        proj: t_proj,
        e: e_prime,
        d_inf: h.d_inf.clone(),
        kappa_p: S::from_int(2 * e_prime as i64),
    };
    t_structure.validate()?;

    // ---- hyperbolic view of the coned space over (S - T) plus the maximal
    let mut view_order = vec![h.maximal];
    view_order.extend((0..h.domain_count()).filter(|w| !t_set.contains(w)));
    let mut view_pairs = Vec::new();
    for (i, &wi) in view_order.iter().enumerate() {
        for (j, &wj) in view_order.iter().enumerate().skip(i + 1) {
            view_pairs.push((i, j, h.rel.kind(wi, wj).expect("distinct")));
        }
    }
    let view_rel = RelationTable::from_pairs(view_order.len(), &view_pairs)?;
    let mut view_proj = ProjectionTable::default();
    for &w in &view_order {
        view_proj.pi.push(h.proj.pi[w].clone());
    }
    for (i, &wi) in view_order.iter().enumerate() {
        for (j, &wj) in view_order.iter().enumerate() {
            if i == j {
                continue;
            }
            if let Some(set) = h.rho_up(wi, wj) {
                view_proj.rho_up.insert((i, j), set.clone());
            }
            if let Some(table) = h.proj.rho_down.get(&(wi, wj)) {
                view_proj.rho_down.insert((i, j), table.clone());
            }
        }
    }
    let view_domains: Vec<Domain<S>> =
        view_order.iter().map(|&w| h.domains[w].clone()).collect();
    let view = HhsStructure {
        ambient: coned.graph.clone(),
        domains: view_domains,
        maximal: 0,
        rel: view_rel,
        proj: view_proj,
        e: e_prime,
        d_inf: h.d_inf.clone(),
        kappa_p: S::from_int(2 * e_prime as i64),
    };
    view.validate()?;

    // ---- axiom checks on both assembled structures
    let mut assembly_reports = Vec::new();
    let mut sub_cfg = CheckConfig {
        budget: cfg.budget,
        seed: cfg.seed,
        model: format!("{} [T-structure]", cfg.model),
        skip_containers: true,
    };
    for axiom in AxiomId::all() {
        let mut rep = check_axiom(&t_structure, axiom, &sub_cfg);
        rep.flag(CONE_SCOPE_FLAG);
        if !rep.verdict.passed() {
            trace
                .warnings
                .push(format!("T-structure fails {}", axiom.name()));
        }
        assembly_reports.push(rep);
    }
    sub_cfg.model = format!("{} [coned view]", cfg.model);
    for axiom in AxiomId::all() {
        let mut rep = check_axiom(&view, axiom, &sub_cfg);
        rep.flag(CONE_SCOPE_FLAG);
        if !rep.verdict.passed() {
            trace.warnings.push(format!("view fails {}", axiom.name()));
        }
        assembly_reports.push(rep);
    }

    Ok(MaximizationResult {
        original,
        t_set,
        coned,
        t_structure: Arc::new(t_structure),
        t_order,
        view: Arc::new(view),
        view_order,
        trace,
        assembly_reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, Family, Model, ModelSpec};
    use crate::scalar::Rat;

    fn max_of(family: Family, r: u32) -> MaximizationResult<Rat> {
        let m: Model<Rat> = build_model(&ModelSpec::new(family, r)).unwrap();
        let cfg = CheckConfig {
            budget: 20_000,
            seed: 5,
            model: m.name(),
            ..Default::default()
        };
        maximize(&m.structure, &cfg).unwrap()
    }

    #[test]
    fn essential_filter_is_identity_on_grid_and_idempotent() {
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::GridZn, 4)).unwrap();
        let (once, trace) = essential_filter(&m.structure).unwrap();
        assert_eq!(once.domain_count(), 3);
        assert!(trace.removed_nonessential.is_empty());
        let (twice, _) = essential_filter(&once).unwrap();
        assert_eq!(twice.domain_count(), once.domain_count());
    }

    #[test]
    fn bounded_extra_domain_is_removed() {
        // grid plus a bounded domain nested only in the top
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::GridZn, 4)).unwrap();
        let mut h = (*m.structure).clone();
        let point = Arc::new(MetricGraph::<Rat>::new(1, &[], 0, None).unwrap());
        h.domains.push(Domain { name: "B".into(), graph: point, unbounded: false });
        let old = h.rel.clone();
        let n = h.domain_count();
        let mut pairs = Vec::new();
        for i in 0..n - 1 {
            for j in i + 1..n - 1 {
                pairs.push((i, j, old.kind(i, j).unwrap()));
            }
            if i == 0 {
                pairs.push((n - 1, 0, crate::hhs::RelKind::FirstInSecond));
            } else {
                pairs.push((i, n - 1, crate::hhs::RelKind::Transverse));
            }
        }
        h.rel = RelationTable::from_pairs(n, &pairs).unwrap();
        h.proj.pi.push(vec![0; h.ambient.real_count()]);
        h.proj.rho_up.insert((n - 1, 0), vec![0]);
        h.proj.rho_down.insert((n - 1, 0), vec![None]);
        for i in 1..n - 1 {
            h.proj.rho_up.insert((i, n - 1), vec![0]);
            h.proj.rho_up.insert((n - 1, i), vec![0]);
        }
        let (filtered, trace) = essential_filter(&h).unwrap();
        assert_eq!(filtered.domain_count(), 3);
        assert_eq!(trace.removed_nonessential.len(), 1);
        assert_eq!(trace.removed_nonessential[0].0, "B");
    }

    #[test]
    fn grid_t_is_full_and_coned_space_is_small() {
        let mr = max_of(Family::GridZn, 6);
        assert_eq!(mr.trace.t_members, vec!["S", "V1", "V2"]);
        assert!(mr.trace.t_cross_check.values().all(|&ok| ok));
        // diameter of the coned space is at most 2 (row edge then column edge)
        assert!(mr.coned.graph.diameter() <= Rat::from_int(2));
        assert!(!mr.coned.hubbed);
        // cone edges never expand the metric
        let g = &mr.coned.graph;
        for x in [0u32, 3, 10] {
            for y in [1u32, 7, 20] {
                assert!(g.distance(x, y) <= mr.original.ambient.distance(x, y));
            }
        }
    }

    #[test]
    fn electrified_t_is_top_only_and_coned_space_is_ambient() {
        let mr = max_of(Family::ElectrifiedFk, 4);
        assert_eq!(mr.trace.t_members, vec!["S"]);
        assert_eq!(mr.trace.dropped_from_t, vec!["Q1", "Q2"]);
        // nothing coned: the new top space is the tree itself
        assert_eq!(
            mr.coned.graph.edges().len(),
            mr.original.ambient.edges().len()
        );
        // the view keeps the electrified top and both axes
        assert_eq!(mr.view.domain_count(), 3);
    }

    #[test]
    fn assembled_structures_pass_their_checks() {
        for family in [Family::GridZn, Family::TreeXTree, Family::ElectrifiedFk] {
            let mr = max_of(family, 4);
            for rep in &mr.assembly_reports {
                assert!(
                    rep.verdict.passed(),
                    "{family:?}: {} failed: {:?}",
                    rep.check,
                    rep.witness
                );
            }
        }
    }

    #[test]
    fn tree_x_tree_hub_cone_matches_explicit() {
        // build the same model twice, forcing the hub path on one copy by
        // lowering the cap through a direct call
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::TreeXTree, 3)).unwrap();
        let (ess, mut trace) = essential_filter(&m.structure).unwrap();
        let t = build_t(&ess, &mut trace).unwrap();
        let explicit = explicit_cone(
            &ess,
            &t.iter().copied().filter(|&w| w != ess.maximal).collect::<Vec<_>>(),
            ess.ambient.edges().to_vec(),
        )
        .unwrap();
        let hub = hub_cone(
            &ess,
            &t.iter().copied().filter(|&w| w != ess.maximal).collect::<Vec<_>>(),
            ess.ambient.edges().to_vec(),
        )
        .unwrap();
        let n = ess.ambient.real_count();
        for x in (0..n as Vertex).step_by(7) {
            for y in (0..n as Vertex).step_by(5) {
                assert_eq!(
                    explicit.graph.distance(x, y),
                    hub.graph.distance(x, y),
                    "coned distance mismatch at ({x},{y})"
                );
            }
        }
    }
}
