//! Deterministic generators for the bundled model families and their
//! hand-built hierarchical structures.
//!
//! Every model is a Cayley ball with word labels, numbered in BFS order
//! from the identity with a fixed generator order, so the radius-r ball is
//! a vertex-id prefix of the radius-r' ball for r < r'. Structures are
//! hand-built per family; the hierarchy constants below are the validated
//! ones for these builders.

pub mod bundles;
pub mod mutate;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::StructureError;
use crate::graph::{MetricGraph, Vertex};
use crate::hhs::{Domain, HhsStructure, ProjectionTable, RelKind, RelationTable};
use crate::scalar::Scalar;

pub const VERTEX_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    GridZn,
    FreeFk,
    TreeXTree,
    ProductFkxZ,
    ElectrifiedFk,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "grid-Z2" | "grid-Zn" | "grid" => Some(Family::GridZn),
            "free-F2" | "free-Fk" | "free" => Some(Family::FreeFk),
            "tree-x-tree" | "txt" => Some(Family::TreeXTree),
            "product-FkxZ" | "f2xz" => Some(Family::ProductFkxZ),
            "electrified-F2" | "electrified-Fk" | "electrified" => Some(Family::ElectrifiedFk),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::GridZn => "grid-Z2",
            Family::FreeFk => "free-F2",
            Family::TreeXTree => "tree-x-tree",
            Family::ProductFkxZ => "product-FkxZ",
            Family::ElectrifiedFk => "electrified-F2",
        }
    }

    pub fn all() -> [Family; 5] {
        [
            Family::GridZn,
            Family::FreeFk,
            Family::TreeXTree,
            Family::ProductFkxZ,
            Family::ElectrifiedFk,
        ]
    }

    /// Validated hierarchy constant for the canonical builder.
    pub fn documented_e(&self) -> u32 {
        match self {
            Family::GridZn => 3,
            Family::FreeFk => 1,
            Family::TreeXTree => 2,
            Family::ProductFkxZ => 2,
            Family::ElectrifiedFk => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub radius: u32,
    /// grid dimension (grid-Zn); the canonical bundled structure is n = 2
    pub n: u32,
    /// free rank (free-Fk, product, electrified)
    pub k: u32,
    /// tree valence (tree-x-tree)
    pub valence: u32,
    /// electrification data: one cyclic subgroup generator word per domain
    pub subgroups: Vec<String>,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(family: Family, radius: u32) -> Self {
        ModelSpec {
            family,
            radius,
            n: 2,
            k: 2,
            valence: 3,
            subgroups: vec!["a".into(), "b".into()],
            seed: 0,
        }
    }

    pub fn name(&self) -> String {
        format!("{} r={}", self.family.name(), self.radius)
    }
}

pub struct Model<S: Scalar> {
    pub spec: ModelSpec,
    pub graph: Arc<MetricGraph<S>>,
    pub structure: Arc<HhsStructure<S>>,
}

impl<S: Scalar> Model<S> {
    pub fn name(&self) -> String {
        self.spec.name()
    }

    pub fn domain_by_name(&self, name: &str) -> Option<usize> {
        self.structure.domains.iter().position(|d| d.name == name)
    }

    /// Group multiplication on vertex labels.
    pub fn mul(&self, a: &str, b: &str) -> String {
        multiply(self.spec.family, a, b)
    }

    pub fn invert(&self, a: &str) -> String {
        invert(self.spec.family, a)
    }

    pub fn vertex_of(&self, label: &str) -> Option<Vertex> {
        self.graph.vertex_by_label(label)
    }
}

pub fn build_model<S: Scalar>(spec: &ModelSpec) -> Result<Model<S>, StructureError> {
    if spec.radius < 2 {
        return Err(StructureError::Format("radius must be at least 2".into()));
    }
    let model = match spec.family {
        Family::GridZn => grid_model(spec)?,
        Family::FreeFk => free_model(spec)?,
        Family::TreeXTree => product_model(spec, FactorKind::T3, FactorKind::T3)?,
        Family::ProductFkxZ => product_model(spec, FactorKind::Free, FactorKind::Z)?,
        Family::ElectrifiedFk => electrified_model(spec)?,
    };
    model.structure.validate()?;
    Ok(model)
}

pub fn build_radius_ladder<S: Scalar>(
    spec: &ModelSpec,
    radii: &[u32],
) -> Result<Vec<Model<S>>, StructureError> {
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut s = spec.clone();
        s.radius = r;
        out.push(build_model(&s)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// word arithmetic

fn reduce_free(word: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in word.chars() {
        if c == 'e' {
            continue;
        }
        match out.last() {
            Some(&p) if p != c && p.eq_ignore_ascii_case(&c) => {
                out.pop();
            }
            _ => out.push(c),
        }
    }
    if out.is_empty() {
        "e".into()
    } else {
        out.into_iter().collect()
    }
}

fn reduce_involutive(word: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in word.chars() {
        if c == 'e' {
            continue;
        }
        match out.last() {
            Some(&p) if p == c => {
                out.pop();
            }
            _ => out.push(c),
        }
    }
    if out.is_empty() {
        "e".into()
    } else {
        out.into_iter().collect()
    }
}

fn grid_parse(label: &str) -> Vec<i64> {
    label.split(',').map(|p| p.trim().parse().unwrap_or(0)).collect()
}

fn grid_render(coords: &[i64]) -> String {
    coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn multiply(family: Family, a: &str, b: &str) -> String {
    match family {
        Family::GridZn => {
            let (x, y) = (grid_parse(a), grid_parse(b));
            let sum: Vec<i64> = x.iter().zip(y.iter()).map(|(p, q)| p + q).collect();
            grid_render(&sum)
        }
        Family::FreeFk | Family::ElectrifiedFk => reduce_free(&format!("{a}{b}")),
        Family::TreeXTree => {
            let (a1, a2) = a.split_once('|').unwrap_or((a, "e"));
            let (b1, b2) = b.split_once('|').unwrap_or((b, "e"));
            format!(
                "{}|{}",
                reduce_involutive(&format!("{a1}{b1}")),
                reduce_involutive(&format!("{a2}{b2}"))
            )
        }
        Family::ProductFkxZ => {
            let (a1, a2) = a.split_once('|').unwrap_or((a, "0"));
            let (b1, b2) = b.split_once('|').unwrap_or((b, "0"));
            let k: i64 = a2.parse::<i64>().unwrap_or(0) + b2.parse::<i64>().unwrap_or(0);
            format!("{}|{}", reduce_free(&format!("{a1}{b1}")), k)
        }
    }
}

pub fn invert(family: Family, a: &str) -> String {
    match family {
        Family::GridZn => {
            let x = grid_parse(a);
            grid_render(&x.iter().map(|c| -c).collect::<Vec<_>>())
        }
        Family::FreeFk | Family::ElectrifiedFk => reduce_free(
            &a.chars()
                .rev()
                .map(|c| {
                    if c.is_ascii_lowercase() {
                        c.to_ascii_uppercase()
                    } else if c.is_ascii_uppercase() {
                        c.to_ascii_lowercase()
                    } else {
                        c
                    }
                })
                .collect::<String>(),
        ),
        Family::TreeXTree => {
            let (a1, a2) = a.split_once('|').unwrap_or((a, "e"));
            format!(
                "{}|{}",
                reduce_involutive(&a1.chars().rev().collect::<String>()),
                reduce_involutive(&a2.chars().rev().collect::<String>())
            )
        }
        Family::ProductFkxZ => {
            let (a1, a2) = a.split_once('|').unwrap_or((a, "0"));
            format!(
                "{}|{}",
                invert(Family::FreeFk, a1),
                -a2.parse::<i64>().unwrap_or(0)
            )
        }
    }
}

fn generators(family: Family, spec: &ModelSpec) -> Vec<String> {
    match family {
        Family::GridZn => {
            let n = spec.n as usize;
            let mut gens = Vec::new();
            for i in 0..n {
                for sign in [1i64, -1] {
                    let mut v = vec![0i64; n];
                    v[i] = sign;
                    gens.push(grid_render(&v));
                }
            }
            gens
        }
        Family::FreeFk | Family::ElectrifiedFk => {
            let letters = ["a", "b", "c", "d"];
            let mut gens = Vec::new();
            for i in 0..spec.k as usize {
                gens.push(letters[i].to_string());
                gens.push(letters[i].to_uppercase());
            }
            gens
        }
        Family::TreeXTree => {
            let letters = ["x", "y", "z", "w"];
            let side: Vec<&str> = letters[..spec.valence as usize].to_vec();
            let mut gens = Vec::new();
            for l in &side {
                gens.push(format!("{l}|e"));
            }
            for l in &side {
                gens.push(format!("e|{l}"));
            }
            gens
        }
        Family::ProductFkxZ => {
            let mut gens = Vec::new();
            let letters = ["a", "b", "c", "d"];
            for i in 0..spec.k as usize {
                gens.push(format!("{}|0", letters[i]));
                gens.push(format!("{}|0", letters[i].to_uppercase()));
            }
            gens.push("e|1".to_string());
            gens.push("e|-1".to_string());
            gens
        }
    }
}

fn identity(family: Family) -> String {
    match family {
        Family::GridZn => "0,0".into(),
        Family::FreeFk | Family::ElectrifiedFk => "e".into(),
        Family::TreeXTree => "e|e".into(),
        Family::ProductFkxZ => "e|0".into(),
    }
}

fn identity_n(family: Family, n: usize) -> String {
    if family == Family::GridZn {
        grid_render(&vec![0i64; n])
    } else {
        identity(family)
    }
}

/// BFS Cayley ball: labels in discovery order, unit edges between ball
/// members. The fixed generator order makes smaller balls prefixes of
/// larger ones.
fn cayley_ball(
    family: Family,
    spec: &ModelSpec,
    radius: u32,
) -> Result<(Vec<String>, Vec<(Vertex, Vertex)>, HashMap<String, Vertex>), StructureError> {
    let gens = generators(family, spec);
    let id = identity_n(family, spec.n as usize);
    let mut labels = vec![id.clone()];
    let mut index: HashMap<String, Vertex> = HashMap::from([(id, 0)]);
    let mut depth = vec![0u32];
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut head = 0usize;
    while head < labels.len() {
        let g = labels[head].clone();
        let dg = depth[head];
        for s in &gens {
            let h = multiply(family, &g, s);
            if h == g {
                continue;
            }
            match index.get(&h) {
                Some(&j) => {
                    if (head as Vertex) < j {
                        edges.push((head as Vertex, j));
                    }
                }
                None => {
                    if dg + 1 <= radius {
                        if labels.len() >= VERTEX_BUDGET {
                            return Err(StructureError::Format(format!(
                                "vertex budget exceeded for {} at radius {radius}",
                                family.name()
                            )));
                        }
                        let j = labels.len() as Vertex;
                        index.insert(h.clone(), j);
                        labels.push(h);
                        depth.push(dg + 1);
                        edges.push((head as Vertex, j));
                    }
                }
            }
        }
        head += 1;
    }
    edges.sort_unstable();
    edges.dedup();
    Ok((labels, edges, index))
}

fn unit_edges<S: Scalar>(edges: &[(Vertex, Vertex)]) -> Vec<(Vertex, Vertex, S)> {
    edges.iter().map(|&(u, v)| (u, v, S::one())).collect()
}

fn point_graph<S: Scalar>() -> Arc<MetricGraph<S>> {
    Arc::new(MetricGraph::new(1, &[], 0, None).expect("point graph"))
}

fn d_inf_default<S: Scalar>(radius: u32) -> S {
    S::max_of(S::from_ratio(radius as i64, 2), S::from_int(2))
}

// ---------------------------------------------------------------------------
// family builders

fn grid_model<S: Scalar>(spec: &ModelSpec) -> Result<Model<S>, StructureError> {
    let n = spec.n as usize;
    let r = spec.radius;
    let (labels, edges, _) = cayley_ball(Family::GridZn, spec, r)?;
    let ambient = Arc::new(
        MetricGraph::new(labels.len(), &unit_edges(&edges), 0, Some(labels.clone()))
            .map_err(StructureError::AmbientGraph)?,
    );

    // axis domain graphs: path of 2r+1 vertices, id = coordinate + r
    let axis_edges: Vec<(Vertex, Vertex, S)> =
        (0..2 * r).map(|i| (i, i + 1, S::one())).collect();
    let axis = |name: &str| -> Result<Domain<S>, StructureError> {
        let g = Arc::new(
            MetricGraph::new((2 * r + 1) as usize, &axis_edges, r, None)
                .map_err(|e| StructureError::DomainGraph(0, e))?,
        );
        Ok(Domain { name: name.into(), graph: g, unbounded: true })
    };

    let mut domains = vec![Domain {
        name: "S".into(),
        graph: point_graph(),
        unbounded: false,
    }];
    for i in 0..n {
        domains.push(axis(&format!("V{}", i + 1))?);
    }

    let mut pairs = Vec::new();
    for i in 1..=n {
        pairs.push((i, 0, RelKind::FirstInSecond));
        for j in i + 1..=n {
            pairs.push((i, j, RelKind::Orthogonal));
        }
    }
    let rel = RelationTable::from_pairs(n + 1, &pairs)?;

    let mut proj = ProjectionTable::default();
    proj.pi.push(vec![0; ambient.real_count()]);
    for i in 0..n {
        let table: Vec<Vertex> = labels
            .iter()
            .map(|l| (grid_parse(l)[i] + r as i64) as Vertex)
            .collect();
        proj.pi.push(table);
    }
    for i in 1..=n {
        proj.rho_up.insert((i, 0), vec![0]);
        proj.rho_down.insert((i, 0), vec![None]);
    }

    let structure = HhsStructure {
        ambient: ambient.clone(),
        domains,
        maximal: 0,
        rel,
        proj,
        e: Family::GridZn.documented_e(),
        d_inf: d_inf_default(r),
        kappa_p: S::from_int(2 * Family::GridZn.documented_e() as i64),
    };
    Ok(Model { spec: spec.clone(), graph: ambient, structure: Arc::new(structure) })
}

fn free_model<S: Scalar>(spec: &ModelSpec) -> Result<Model<S>, StructureError> {
    let (labels, edges, _) = cayley_ball(Family::FreeFk, spec, spec.radius)?;
    let ambient = Arc::new(
        MetricGraph::new(labels.len(), &unit_edges(&edges), 0, Some(labels))
            .map_err(StructureError::AmbientGraph)?,
    );
    let domains = vec![Domain {
        name: "S".into(),
        graph: ambient.clone(),
        unbounded: true,
    }];
    let rel = RelationTable::from_pairs(1, &[])?;
    let proj = ProjectionTable {
        pi: vec![(0..ambient.real_count() as Vertex).collect()],
        ..Default::default()
    };
    let structure = HhsStructure {
        ambient: ambient.clone(),
        domains,
        maximal: 0,
        rel,
        proj,
        e: Family::FreeFk.documented_e(),
        d_inf: d_inf_default(spec.radius),
        kappa_p: S::from_int(2 * Family::FreeFk.documented_e() as i64),
    };
    Ok(Model { spec: spec.clone(), graph: ambient, structure: Arc::new(structure) })
}

enum FactorKind {
    Free,
    T3,
    Z,
}

impl FactorKind {
    /// Builds the factor ball as its own graph; returns (graph, label index).
    fn build<S: Scalar>(
        &self,
        spec: &ModelSpec,
        radius: u32,
    ) -> Result<(Arc<MetricGraph<S>>, HashMap<String, Vertex>), StructureError> {
        match self {
            FactorKind::Free => {
                let (labels, edges, index) = cayley_ball(Family::FreeFk, spec, radius)?;
                let g = MetricGraph::new(labels.len(), &unit_edges(&edges), 0, Some(labels))
                    .map_err(|e| StructureError::DomainGraph(0, e))?;
                Ok((Arc::new(g), index))
            }
            FactorKind::T3 => {
                let letters = ["x", "y", "z", "w"];
                let side: Vec<String> = letters[..spec.valence as usize]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                let mut labels = vec!["e".to_string()];
                let mut index = HashMap::from([("e".to_string(), 0u32)]);
                let mut depth = vec![0u32];
                let mut edges = Vec::new();
                let mut head = 0;
                while head < labels.len() {
                    let g = labels[head].clone();
                    for s in &side {
                        let h = reduce_involutive(&format!("{g}{s}"));
                        match index.get(&h) {
                            Some(&j) => {
                                if (head as Vertex) < j {
                                    edges.push((head as Vertex, j));
                                }
                            }
                            None => {
                                if depth[head] + 1 <= radius {
                                    let j = labels.len() as Vertex;
                                    index.insert(h.clone(), j);
                                    labels.push(h);
                                    depth.push(depth[head] + 1);
                                    edges.push((head as Vertex, j));
                                }
                            }
                        }
                    }
                    head += 1;
                }
                let g = MetricGraph::new(labels.len(), &unit_edges(&edges), 0, Some(labels))
                    .map_err(|e| StructureError::DomainGraph(0, e))?;
                Ok((Arc::new(g), index))
            }
            FactorKind::Z => {
                // ids 0, +1 -> 1, -1 -> 2, +2 -> 3, -2 -> 4, ...
                let m = radius as i64;
                let id_of = |k: i64| -> Vertex {
                    if k == 0 {
                        0
                    } else if k > 0 {
                        (2 * k - 1) as Vertex
                    } else {
                        (2 * -k) as Vertex
                    }
                };
                let mut labels = vec![String::new(); (2 * m + 1) as usize];
                let mut index = HashMap::new();
                for k in -m..=m {
                    let v = id_of(k);
                    labels[v as usize] = k.to_string();
                    index.insert(k.to_string(), v);
                }
                let mut edges = Vec::new();
                for k in -m..m {
                    edges.push((id_of(k), id_of(k + 1), S::one()));
                }
                let g = MetricGraph::new(labels.len(), &edges, 0, Some(labels))
                    .map_err(|e| StructureError::DomainGraph(0, e))?;
                Ok((Arc::new(g), index))
            }
        }
    }
}

fn product_model<S: Scalar>(
    spec: &ModelSpec,
    left: FactorKind,
    right: FactorKind,
) -> Result<Model<S>, StructureError> {
    let r = spec.radius;
    let (labels, edges, _) = cayley_ball(spec.family, spec, r)?;
    let ambient = Arc::new(
        MetricGraph::new(labels.len(), &unit_edges(&edges), 0, Some(labels.clone()))
            .map_err(StructureError::AmbientGraph)?,
    );

    let (gl, il) = left.build::<S>(spec, r)?;
    let (gr, ir) = right.build::<S>(spec, r)?;

    let mut pi_l = Vec::with_capacity(labels.len());
    let mut pi_r = Vec::with_capacity(labels.len());
    for l in &labels {
        let (a, b) = l.split_once('|').expect("product label");
        pi_l.push(*il.get(a).expect("left factor label"));
        pi_r.push(*ir.get(b).expect("right factor label"));
    }

    let domains = vec![
        Domain { name: "S".into(), graph: point_graph(), unbounded: false },
        Domain { name: "L".into(), graph: gl, unbounded: true },
        Domain { name: "R".into(), graph: gr, unbounded: true },
    ];
    let rel = RelationTable::from_pairs(
        3,
        &[
            (1, 0, RelKind::FirstInSecond),
            (2, 0, RelKind::FirstInSecond),
            (1, 2, RelKind::Orthogonal),
        ],
    )?;
    let mut proj = ProjectionTable {
        pi: vec![vec![0; ambient.real_count()], pi_l, pi_r],
        ..Default::default()
    };
    proj.rho_up.insert((1, 0), vec![0]);
    proj.rho_up.insert((2, 0), vec![0]);
    proj.rho_down.insert((1, 0), vec![None]);
    proj.rho_down.insert((2, 0), vec![None]);

    let e = spec.family.documented_e();
    let structure = HhsStructure {
        ambient: ambient.clone(),
        domains,
        maximal: 0,
        rel,
        proj,
        e,
        d_inf: d_inf_default(r),
        kappa_p: S::from_int(2 * e as i64),
    };
    Ok(Model { spec: spec.clone(), graph: ambient, structure: Arc::new(structure) })
}

fn electrified_model<S: Scalar>(spec: &ModelSpec) -> Result<Model<S>, StructureError> {
    let r = spec.radius;
    let (labels, edges, index) = cayley_ball(Family::FreeFk, spec, r)?;
    let nv = labels.len();
    let ambient = Arc::new(
        MetricGraph::new(nv, &unit_edges(&edges), 0, Some(labels.clone()))
            .map_err(StructureError::AmbientGraph)?,
    );

    // electrified top space: star-cone every subgroup-coset ball intersection
    let mut cone_edges: Vec<(Vertex, Vertex, S)> = unit_edges(&edges);
    fn find(comp: &mut [usize], mut x: usize) -> usize {
        while comp[x] != x {
            comp[x] = comp[comp[x]];
            x = comp[x];
        }
        x
    }
    for w in &spec.subgroups {
        let mut comp: Vec<usize> = (0..nv).collect();
        for (v, l) in labels.iter().enumerate() {
            let next = multiply(Family::FreeFk, l, w);
            if let Some(&u) = index.get(&next) {
                let (a, b) = (find(&mut comp, v), find(&mut comp, u as usize));
                if a != b {
                    comp[a.max(b)] = a.min(b);
                }
            }
        }
        let mut members: HashMap<usize, Vec<Vertex>> = HashMap::new();
        for v in 0..nv {
            let root = find(&mut comp, v);
            members.entry(root).or_default().push(v as Vertex);
        }
        let mut roots: Vec<usize> = members.keys().copied().collect();
        roots.sort_unstable();
        for root in roots {
            let cos = &members[&root];
            let hub = cos[0];
            for &g in &cos[1..] {
                cone_edges.push((hub, g, S::one()));
            }
        }
    }
    let top = Arc::new(
        MetricGraph::new(nv, &cone_edges, 0, Some(labels.clone()))
            .map_err(|e| StructureError::DomainGraph(0, e))?,
    );

    let e = Family::ElectrifiedFk.documented_e();
    let e_scalar = S::from_int(e as i64);
    let mut domains =
        vec![Domain { name: "S".into(), graph: top.clone(), unbounded: true }];
    let mut proj = ProjectionTable {
        pi: vec![(0..nv as Vertex).collect()],
        ..Default::default()
    };
    let mut pairs: Vec<(usize, usize, RelKind)> = Vec::new();

    // subgroup axis domains
    let mut axis_sets: Vec<Vec<Vertex>> = Vec::new();
    let mut axis_pis: Vec<Vec<Vertex>> = Vec::new();
    for (qi, w) in spec.subgroups.iter().enumerate() {
        let wlen = reduce_free(w).len().max(1) as u32;
        let m = (r / wlen) as i64;
        let id_of = |k: i64| -> Vertex {
            if k == 0 {
                0
            } else if k > 0 {
                (2 * k - 1) as Vertex
            } else {
                (2 * -k) as Vertex
            }
        };
        let mut axis_ambient = vec![0 as Vertex; (2 * m + 1) as usize];
        let winv = invert(Family::FreeFk, w);
        let mut fwd = identity(Family::FreeFk);
        let mut bwd = identity(Family::FreeFk);
        for k in 1..=m {
            fwd = multiply(Family::FreeFk, &fwd, w);
            bwd = multiply(Family::FreeFk, &bwd, &winv);
            axis_ambient[id_of(k) as usize] = *index.get(&fwd).ok_or_else(|| {
                StructureError::Format(format!("axis power {fwd} escapes ball"))
            })?;
            axis_ambient[id_of(-k) as usize] = *index.get(&bwd).ok_or_else(|| {
                StructureError::Format(format!("axis power {bwd} escapes ball"))
            })?;
        }
        let mut aedges = Vec::new();
        for k in -m..m {
            aedges.push((id_of(k), id_of(k + 1), S::one()));
        }
        let axis_graph = Arc::new(
            MetricGraph::new((2 * m + 1) as usize, &aedges, 0, None)
                .map_err(|er| StructureError::DomainGraph(qi + 1, er))?,
        );
        // tree projection: nearest axis point, via one labeled sweep
        let (_, owner) = ambient.voronoi(&axis_ambient);
        let pi_q: Vec<Vertex> = (0..nv).map(|v| owner[v]).collect();

        domains.push(Domain {
            name: format!("Q{}", qi + 1),
            graph: axis_graph,
            unbounded: true,
        });
        proj.pi.push(pi_q.clone());
        axis_sets.push(axis_ambient);
        axis_pis.push(pi_q);
        pairs.push((qi + 1, 0, RelKind::FirstInSecond));
    }
    for i in 0..spec.subgroups.len() {
        for j in i + 1..spec.subgroups.len() {
            pairs.push((i + 1, j + 1, RelKind::Transverse));
        }
    }
    let rel = RelationTable::from_pairs(domains.len(), &pairs)?;

    // relative projections
    for (qi, axis) in axis_sets.iter().enumerate() {
        proj.rho_up.insert((qi + 1, 0), axis.clone());
        // downward map: defined off the E-neighborhood of the axis (top metric)
        let row = top.set_row(axis);
        let table: Vec<Option<Vec<Vertex>>> = (0..nv as Vertex)
            .map(|z| {
                if row.get(z).total_cmp(&e_scalar) == std::cmp::Ordering::Greater {
                    Some(vec![axis_pis[qi][z as usize]])
                } else {
                    None
                }
            })
            .collect();
        proj.rho_down.insert((qi + 1, 0), table);
        for qj in 0..axis_sets.len() {
            if qi != qj {
                let mut shadow: Vec<Vertex> =
                    axis_sets[qj].iter().map(|&v| axis_pis[qi][v as usize]).collect();
                shadow.sort_unstable();
                shadow.dedup();
                proj.rho_up.insert((qj + 1, qi + 1), shadow);
            }
        }
    }

    let structure = HhsStructure {
        ambient: ambient.clone(),
        domains,
        maximal: 0,
        rel,
        proj,
        e,
        d_inf: d_inf_default(r),
        kappa_p: S::from_int(2 * e as i64),
    };
    Ok(Model { spec: spec.clone(), graph: ambient, structure: Arc::new(structure) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    #[test]
    fn grid_vertex_count_matches_l1_ball() {
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::GridZn, 6)).unwrap();
        assert_eq!(m.graph.real_count(), 85); // 2r^2 + 2r + 1
        assert_eq!(m.graph.label(0), Some("0,0"));
    }

    #[test]
    fn free_vertex_count_matches_tree_formula() {
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::FreeFk, 6)).unwrap();
        // 1 + 2(3^r - 1)
        assert_eq!(m.graph.real_count(), 1457);
        // spec example: d("ab", "ba") = 4 in the tree
        let ab = m.vertex_of("ab").unwrap();
        let ba = m.vertex_of("ba").unwrap();
        assert_eq!(m.graph.distance(ab, ba), Rat::from_int(4));
    }

    #[test]
    fn grid_distance_is_l1() {
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::GridZn, 5)).unwrap();
        let x = m.vertex_of("3,0").unwrap();
        let y = m.vertex_of("0,4").unwrap();
        assert_eq!(m.graph.distance(x, y), Rat::from_int(7));
    }

    #[test]
    fn prefix_property_across_radii() {
        for family in Family::all() {
            let spec = ModelSpec::new(family, 4);
            let ladder: Vec<Model<Rat>> = build_radius_ladder(&spec, &[3, 4]).unwrap();
            let small = ladder[0].graph.labels().unwrap();
            let large = ladder[1].graph.labels().unwrap();
            assert!(small.len() < large.len(), "{family:?}");
            assert_eq!(&large[..small.len()], small, "{family:?}");
        }
    }

    #[test]
    fn word_arithmetic() {
        assert_eq!(multiply(Family::FreeFk, "ab", "BA"), "e");
        assert_eq!(multiply(Family::FreeFk, "aaa", "Ab"), "aab");
        assert_eq!(invert(Family::FreeFk, "ab"), "BA");
        assert_eq!(multiply(Family::TreeXTree, "xy|e", "y|x"), "x|x");
        assert_eq!(multiply(Family::ProductFkxZ, "a|2", "A|-1"), "e|1");
        assert_eq!(multiply(Family::GridZn, "3,-1", "-1,2"), "2,1");
    }

    #[test]
    fn electrified_top_space_has_short_cosets() {
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::ElectrifiedFk, 5)).unwrap();
        let top = &m.structure.domains[0].graph;
        let a5 = m.vertex_of("aaaaa").unwrap();
        let a5inv = m.vertex_of("AAAAA").unwrap();
        // whole <a>-coset has diameter <= 2 after the star cone
        assert!(top.distance(a5, a5inv) <= Rat::from_int(2));
        // but alternating words stay far: the space is unbounded at scale
        let w = m.vertex_of("ababa").unwrap();
        assert!(top.distance(0, w) >= Rat::from_int(3));
    }

    #[test]
    fn structures_validate() {
        for family in Family::all() {
            let m: Model<Rat> = build_model(&ModelSpec::new(family, 4)).unwrap();
            m.structure.validate().unwrap_or_else(|e| panic!("{family:?}: {e}"));
        }
    }

    #[test]
    fn gromov_product_in_tree_is_prefix_depth() {
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::FreeFk, 4)).unwrap();
        let x = m.vertex_of("aaa").unwrap();
        let y = m.vertex_of("aab").unwrap();
        assert_eq!(m.graph.gromov_product(x, y, 0), Rat::from_int(2));
    }
}
