//! Interchange formats.
//!
//! Graphs and structures are structured text (JSON) with fixed field names:
//! graphs carry `vertices`, `edges` (triples id, id, length), `basepoint`,
//! and optional `labels`; structures carry `domains`, `relations`,
//! `projections`, `rhos`, and `constants`. Writers emit canonical order so
//! a load/save round trip is byte-stable; loaders name the violated
//! invariant on rejection.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::StructureError;
use crate::graph::{MetricGraph, Vertex};
use crate::hhs::{Domain, HhsStructure, ProjectionTable, RelKind, RelationTable};
use crate::maximize::{ConeTag, MaximizationResult, MaximizeTrace};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub basepoint: Vertex,
    /// (u, v, rendered length)
    pub edges: Vec<(Vertex, Vertex, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// present on cone-off graphs: ordinary vertex count plus provenance
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuxSection {
    pub real_vertices: usize,
    pub tags: Vec<ConeTag>,
}

pub fn graph_to_file<S: Scalar>(g: &MetricGraph<S>, tags: Option<&[ConeTag]>) -> GraphFile {
    GraphFile {
        vertices: g.vertex_count(),
        basepoint: g.basepoint(),
        edges: g
            .edges()
            .iter()
            .map(|(u, v, w)| (*u, *v, w.render()))
            .collect(),
        labels: g.labels().map(|l| l.to_vec()),
        aux: if g.real_count() != g.vertex_count() || tags.is_some() {
            Some(AuxSection {
                real_vertices: g.real_count(),
                tags: tags.map(|t| t.to_vec()).unwrap_or_default(),
            })
        } else {
            None
        },
    }
}

pub fn graph_from_file<S: Scalar>(f: &GraphFile) -> Result<MetricGraph<S>, StructureError> {
    let mut edges = Vec::with_capacity(f.edges.len());
    for (u, v, w) in &f.edges {
        let w = S::parse(w).ok_or_else(|| {
            StructureError::Format(format!("edge ({u},{v}): unreadable length {w:?}"))
        })?;
        edges.push((*u, *v, w));
    }
    let real = f.aux.as_ref().map(|a| a.real_vertices).unwrap_or(f.vertices);
    MetricGraph::with_real_count(f.vertices, &edges, f.basepoint, f.labels.clone(), real)
        .map_err(StructureError::AmbientGraph)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainFile {
    pub id: usize,
    pub name: String,
    pub maximal: bool,
    pub unbounded: bool,
    pub graph: GraphFile,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RhoFile {
    /// (v, w, shadow of v in w's space)
    pub up: Vec<(usize, usize, Vec<Vertex>)>,
    /// (v, w, per-vertex optional images in v's space)
    pub down: Vec<(usize, usize, Vec<Option<Vec<Vertex>>>)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureFile {
    pub constants: BTreeMap<String, String>,
    pub ambient: GraphFile,
    pub domains: Vec<DomainFile>,
    /// (i, j, kind) for i < j
    pub relations: Vec<(usize, usize, String)>,
    pub projections: Vec<Vec<Vertex>>,
    pub rhos: RhoFile,
}

fn kind_name(k: RelKind) -> &'static str {
    match k {
        RelKind::FirstInSecond => "nested-in",
        RelKind::SecondInFirst => "contains",
        RelKind::Orthogonal => "orthogonal",
        RelKind::Transverse => "transverse",
    }
}

fn kind_parse(s: &str) -> Option<RelKind> {
    match s {
        "nested-in" => Some(RelKind::FirstInSecond),
        "contains" => Some(RelKind::SecondInFirst),
        "orthogonal" => Some(RelKind::Orthogonal),
        "transverse" => Some(RelKind::Transverse),
        _ => None,
    }
}

pub fn structure_to_file<S: Scalar>(h: &HhsStructure<S>) -> StructureFile {
    let mut constants = BTreeMap::new();
    constants.insert("e".into(), h.e.to_string());
    constants.insert("d_inf".into(), h.d_inf.render());
    constants.insert("kappa_p".into(), h.kappa_p.render());
    let mut relations = Vec::new();
    for i in 0..h.domain_count() {
        for j in i + 1..h.domain_count() {
            let k = h.rel.kind(i, j).expect("distinct");
            relations.push((i, j, kind_name(k).to_string()));
        }
    }
    StructureFile {
        constants,
        ambient: graph_to_file(&h.ambient, None),
        domains: (0..h.domain_count())
            .map(|i| DomainFile {
                id: i,
                name: h.domains[i].name.clone(),
                maximal: i == h.maximal,
                unbounded: h.domains[i].unbounded,
                graph: graph_to_file(&h.domains[i].graph, None),
            })
            .collect(),
        relations,
        projections: h.proj.pi.clone(),
        rhos: RhoFile {
            up: h
                .proj
                .rho_up
                .iter()
                .map(|(&(v, w), set)| (v, w, set.clone()))
                .collect(),
            down: h
                .proj
                .rho_down
                .iter()
                .map(|(&(v, w), t)| (v, w, t.clone()))
                .collect(),
        },
    }
}

pub fn structure_from_file<S: Scalar>(
    f: &StructureFile,
) -> Result<HhsStructure<S>, StructureError> {
    let get = |key: &str| -> Result<&String, StructureError> {
        f.constants
            .get(key)
            .ok_or_else(|| StructureError::Format(format!("constants: missing {key}")))
    };
    let e: u32 = get("e")?
        .parse()
        .map_err(|_| StructureError::Format("constants: e must be an integer".into()))?;
    let d_inf = S::parse(get("d_inf")?)
        .ok_or_else(|| StructureError::Format("constants: unreadable d_inf".into()))?;
    let kappa_p = S::parse(get("kappa_p")?)
        .ok_or_else(|| StructureError::Format("constants: unreadable kappa_p".into()))?;

    let ambient = Arc::new(graph_from_file::<S>(&f.ambient)?);
    let mut maximal = None;
    let mut domains = Vec::new();
    for (i, d) in f.domains.iter().enumerate() {
        if d.id != i {
            return Err(StructureError::Format(format!(
                "domains: id {} out of order (expected {i})",
                d.id
            )));
        }
        if d.maximal {
            match maximal {
                None => maximal = Some(i),
                Some(j) => return Err(StructureError::TwoMaximal(j, i)),
            }
        }
        domains.push(Domain {
            name: d.name.clone(),
            graph: Arc::new(
                graph_from_file::<S>(&d.graph)
                    .map_err(|e| StructureError::Format(format!("domain {i}: {e}")))?,
            ),
            unbounded: d.unbounded,
        });
    }
    let maximal = maximal.ok_or(StructureError::NoMaximal)?;
    let mut pairs = Vec::new();
    for (i, j, k) in &f.relations {
        let kind = kind_parse(k).ok_or_else(|| {
            StructureError::Format(format!("relations: unknown kind {k:?}"))
        })?;
        pairs.push((*i, *j, kind));
    }
    let rel = RelationTable::from_pairs(domains.len(), &pairs)?;
    let mut proj = ProjectionTable {
        pi: f.projections.clone(),
        ..Default::default()
    };
    for (v, w, set) in &f.rhos.up {
        proj.rho_up.insert((*v, *w), set.clone());
    }
    for (v, w, t) in &f.rhos.down {
        proj.rho_down.insert((*v, *w), t.clone());
    }
    let h = HhsStructure {
        ambient,
        domains,
        maximal,
        rel,
        proj,
        e,
        d_inf,
        kappa_p,
    };
    h.validate()?;
    Ok(h)
}

#[derive(Serialize, Deserialize)]
pub struct MaximizeFiles {
    pub structure_t: StructureFile,
    pub coned: GraphFile,
    pub trace: MaximizeTrace,
}

pub fn maximize_to_files<S: Scalar>(mr: &MaximizationResult<S>) -> MaximizeFiles {
    MaximizeFiles {
        structure_t: structure_to_file(mr.t_structure.as_ref()),
        coned: graph_to_file(&mr.coned.graph, Some(&mr.coned.tags)),
        trace: mr.trace.clone(),
    }
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization");
    s.push('\n');
    s
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, StructureError> {
    serde_json::from_str(s).map_err(|e| StructureError::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, Family, Model, ModelSpec};
    use crate::scalar::Rat;

    #[test]
    fn graph_round_trip_is_byte_stable() {
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::GridZn, 4)).unwrap();
        let f1 = graph_to_file(&m.graph, None);
        let s1 = render_json(&f1);
        let g2 = graph_from_file::<Rat>(&parse_json(&s1).unwrap()).unwrap();
        let s2 = render_json(&graph_to_file(&g2, None));
        assert_eq!(s1, s2);
        assert_eq!(g2.distance(0, 5), m.graph.distance(0, 5));
    }

    #[test]
    fn structure_round_trip_is_byte_stable() {
        for family in [Family::GridZn, Family::ElectrifiedFk] {
            let m: Model<Rat> = build_model(&ModelSpec::new(family, 4)).unwrap();
            let s1 = render_json(&structure_to_file(m.structure.as_ref()));
            let h2 = structure_from_file::<Rat>(&parse_json(&s1).unwrap()).unwrap();
            let s2 = render_json(&structure_to_file(&h2));
            assert_eq!(s1, s2, "{family:?}");
        }
    }

    #[test]
    fn loader_names_the_violated_invariant() {
        let m: Model<Rat> = build_model(&ModelSpec::new(Family::GridZn, 4)).unwrap();
        let mut f = structure_to_file(m.structure.as_ref());
        // corrupt: drop a required relative projection
        f.rhos.up.clear();
        let err = structure_from_file::<Rat>(&f).unwrap_err();
        assert!(err.to_string().contains("missing relative projection"), "{err}");
        // corrupt: break the projection table shape
        let mut f = structure_to_file(m.structure.as_ref());
        f.projections[1].pop();
        let err = structure_from_file::<Rat>(&f).unwrap_err();
        assert!(err.to_string().contains("length"), "{err}");
        // corrupt: flip orthogonality into nesting without the required rho
        let mut f = structure_to_file(m.structure.as_ref());
        for rel in f.relations.iter_mut() {
            if rel.0 == 1 && rel.1 == 2 {
                rel.2 = "nested-in".into();
            }
        }
        let err = structure_from_file::<Rat>(&f).unwrap_err();
        assert!(err.to_string().contains("missing relative projection"), "{err}");
        // corrupt: detach a domain from the maximal one
        let mut f = structure_to_file(m.structure.as_ref());
        for rel in f.relations.iter_mut() {
            if rel.0 == 0 && rel.1 == 1 {
                rel.2 = "orthogonal".into();
            }
        }
        let err = structure_from_file::<Rat>(&f).unwrap_err();
        assert!(err.to_string().contains("not above"), "{err}");
    }

    #[test]
    fn graph_with_rational_lengths_round_trips() {
        let edges = vec![
            (0u32, 1u32, Rat::from_ratio(1, 2)),
            (1, 2, Rat::from_ratio(3, 2)),
        ];
        let g = MetricGraph::new(3, &edges, 0, None).unwrap();
        let f = graph_to_file(&g, None);
        assert_eq!(f.edges[0].2, "1/2");
        let g2 = graph_from_file::<Rat>(&f).unwrap();
        assert_eq!(g2.distance(0, 2), Rat::from_int(2));
    }
}
