//! Hierarchical structures on a finite ambient graph: domains, the relation
//! table, projection tables, and validation. Axiom verification lives in
//! [`axioms`], product regions in [`regions`], gates and hierarchical
//! quasiconvexity in [`hqc`], hierarchy paths in [`paths`].

pub mod axioms;
pub mod hqc;
pub mod paths;
pub mod regions;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::StructureError;
use crate::graph::{MetricGraph, Vertex};
use crate::scalar::Scalar;

pub use axioms::AxiomId;
pub use hqc::{gate, is_hierarchically_quasiconvex, HqcReport};
pub use paths::{find_hierarchy_path, hierarchy_path_fit, HierarchyFit, PathSearch};
pub use regions::{check_properties_of_f, product_region, ProductRegion};

/// Relation between an unordered pair of distinct domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelKind {
    /// first properly nested in second
    FirstInSecond,
    /// second properly nested in first
    SecondInFirst,
    Orthogonal,
    Transverse,
}

#[derive(Clone, Debug)]
pub struct RelationTable {
    n: usize,
    /// upper-triangle storage, pair (i,j) with i<j at tri_index(i,j)
    kinds: Vec<RelKind>,
}

impl RelationTable {
    pub fn new(n: usize, kinds: Vec<RelKind>) -> Result<Self, StructureError> {
        if kinds.len() != n * n.saturating_sub(1) / 2 {
            return Err(StructureError::RelationShape);
        }
        Ok(RelationTable { n, kinds })
    }

    pub fn from_pairs(
        n: usize,
        pairs: &[(usize, usize, RelKind)],
    ) -> Result<Self, StructureError> {
        let mut kinds = vec![None; n * n.saturating_sub(1) / 2];
        for &(i, j, k) in pairs {
            if i == j || i >= n || j >= n {
                return Err(StructureError::RelationShape);
            }
            let (a, b) = (i.min(j), i.max(j));
            let k = if i < j {
                k
            } else {
                match k {
                    RelKind::FirstInSecond => RelKind::SecondInFirst,
                    RelKind::SecondInFirst => RelKind::FirstInSecond,
                    other => other,
                }
            };
            let idx = tri_index(a, b, n);
            if kinds[idx].is_some() {
                return Err(StructureError::RelationShape);
            }
            kinds[idx] = Some(k);
        }
        let kinds: Option<Vec<RelKind>> = kinds.into_iter().collect();
        match kinds {
            Some(kinds) => Ok(RelationTable { n, kinds }),
            None => Err(StructureError::RelationShape),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn kind(&self, i: usize, j: usize) -> Option<RelKind> {
        if i == j {
            return None;
        }
        let (a, b) = (i.min(j), i.max(j));
        let k = self.kinds[tri_index(a, b, self.n)];
        Some(if i < j {
            k
        } else {
            match k {
                RelKind::FirstInSecond => RelKind::SecondInFirst,
                RelKind::SecondInFirst => RelKind::FirstInSecond,
                other => other,
            }
        })
    }

    pub fn set_kind(&mut self, i: usize, j: usize, k: RelKind) {
        assert_ne!(i, j);
        let (a, b) = (i.min(j), i.max(j));
        let k = if i < j {
            k
        } else {
            match k {
                RelKind::FirstInSecond => RelKind::SecondInFirst,
                RelKind::SecondInFirst => RelKind::FirstInSecond,
                other => other,
            }
        };
        let idx = tri_index(a, b, self.n);
        self.kinds[idx] = k;
    }

    /// v properly nested in w
    pub fn properly_nested(&self, v: usize, w: usize) -> bool {
        self.kind(v, w) == Some(RelKind::FirstInSecond)
    }

    /// v nested in w (reflexive)
    pub fn nested_in(&self, v: usize, w: usize) -> bool {
        v == w || self.properly_nested(v, w)
    }

    pub fn orthogonal(&self, v: usize, w: usize) -> bool {
        self.kind(v, w) == Some(RelKind::Orthogonal)
    }

    pub fn transverse(&self, v: usize, w: usize) -> bool {
        self.kind(v, w) == Some(RelKind::Transverse)
    }

    /// Everything nested in w, including w.
    pub fn below(&self, w: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| self.nested_in(v, w)).collect()
    }

    pub fn orth_set(&self, w: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| self.orthogonal(v, w)).collect()
    }

    /// Domains orthogonal to every member of `set`.
    pub fn orth_complement(&self, set: &[usize]) -> Vec<usize> {
        (0..self.n)
            .filter(|&t| set.iter().all(|&w| self.orthogonal(t, w)))
            .collect()
    }

    /// Longest chain of pairwise nesting-comparable domains.
    pub fn longest_chain(&self) -> usize {
        let mut memo = vec![0usize; self.n];
        fn depth(t: &RelationTable, v: usize, memo: &mut Vec<usize>) -> usize {
            if memo[v] != 0 {
                return memo[v];
            }
            let mut best = 1;
            for u in 0..t.n {
                if t.properly_nested(u, v) {
                    best = best.max(1 + depth(t, u, memo));
                }
            }
            memo[v] = best;
            best
        }
        (0..self.n)
            .map(|v| depth(self, v, &mut memo))
            .max()
            .unwrap_or(0)
    }

    /// Structural sanity: transitivity of nesting and the orthogonality
    /// closure. Also re-run by the axiom checks with witnesses.
    pub fn validate(&self) -> Result<(), StructureError> {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.properly_nested(i, j) && self.properly_nested(j, i) {
                    return Err(StructureError::NotAntisymmetric(i, j));
                }
                for k in 0..self.n {
                    if i != j
                        && j != k
                        && i != k
                        && self.properly_nested(i, j)
                        && self.properly_nested(j, k)
                        && !self.properly_nested(i, k)
                    {
                        return Err(StructureError::NotTransitive(i, j, k));
                    }
                    if i != j
                        && j != k
                        && i != k
                        && self.properly_nested(i, j)
                        && self.orthogonal(j, k)
                        && !self.orthogonal(i, k)
                    {
                        return Err(StructureError::OrthogonalityClosure(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }
}

fn tri_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

#[derive(Clone)]
pub struct Domain<S: Scalar> {
    pub name: String,
    pub graph: Arc<MetricGraph<S>>,
    pub unbounded: bool,
}

/// Projection data: total projections per domain, relative projections
/// (`rho_up[(v,w)]` is the shadow of v in the space of w, defined for v
/// properly nested in w or v transverse to w), and the downward maps
/// (`rho_down[(v,w)]` maps vertices of w's space into v's space, defined for
/// v properly nested in w, partial off the shadow's E-neighborhood).
#[derive(Clone, Default)]
pub struct ProjectionTable {
    pub pi: Vec<Vec<Vertex>>,
    pub rho_up: BTreeMap<(usize, usize), Vec<Vertex>>,
    pub rho_down: BTreeMap<(usize, usize), Vec<Option<Vec<Vertex>>>>,
}

impl<S: Scalar> std::fmt::Debug for HhsStructure<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HhsStructure")
            .field("domains", &self.domains.len())
            .field("ambient", &self.ambient.real_count())
            .field("e", &self.e)
            .finish()
    }
}

#[derive(Clone)]
pub struct HhsStructure<S: Scalar> {
    pub ambient: Arc<MetricGraph<S>>,
    pub domains: Vec<Domain<S>>,
    pub maximal: usize,
    pub rel: RelationTable,
    pub proj: ProjectionTable,
    /// hierarchy constant
    pub e: u32,
    /// unbounded threshold: a domain counts as unbounded iff its space has
    /// diameter at least this
    pub d_inf: S,
    pub kappa_p: S,
}

impl<S: Scalar> HhsStructure<S> {
    pub fn domain_count(&self) -> usize {
        self.domains.len()
    }

    pub fn e_scalar(&self) -> S {
        S::from_int(self.e as i64)
    }

    pub fn graph(&self, w: usize) -> &MetricGraph<S> {
        &self.domains[w].graph
    }

    /// Projection of an ambient vertex into domain w's space.
    pub fn pi(&self, w: usize, x: Vertex) -> Vertex {
        self.proj.pi[w][x as usize]
    }

    /// Distance in domain w's space between the projections of two ambient
    /// vertices.
    pub fn d_dom(&self, w: usize, x: Vertex, y: Vertex) -> S {
        self.graph(w).distance(self.pi(w, x), self.pi(w, y))
    }

    /// Projection of an ambient vertex set, sorted and deduplicated.
    pub fn project_set(&self, w: usize, ys: &[Vertex]) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = ys.iter().map(|&y| self.pi(w, y)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn rho_up(&self, v: usize, w: usize) -> Option<&Vec<Vertex>> {
        self.proj.rho_up.get(&(v, w))
    }

    pub fn rho_down(&self, v: usize, w: usize, z: Vertex) -> Option<&Vec<Vertex>> {
        self.proj
            .rho_down
            .get(&(v, w))
            .and_then(|t| t.get(z as usize))
            .and_then(|o| o.as_ref())
    }

    /// Diameter of a vertex set inside domain w's space.
    pub fn set_diam(&self, w: usize, set: &[Vertex]) -> S {
        let g = self.graph(w);
        let mut best = S::zero();
        for (i, &a) in set.iter().enumerate() {
            let row = g.distance_row(a);
            for &b in &set[i + 1..] {
                best = S::max_of(best, row.get(b));
            }
        }
        best
    }

    /// Distance from a vertex of w's space to a set in the same space.
    pub fn dist_to_set(&self, w: usize, z: Vertex, set: &[Vertex]) -> S {
        let g = self.graph(w);
        set.iter()
            .map(|&s| g.distance(z, s))
            .min_by(|a, b| a.total_cmp(b))
            .expect("distance to empty set")
    }

    /// Measured unbounded flag: diameter at least `d_inf`. Uses the double
    /// sweep (exact on trees and paths) and escalates to the exact diameter
    /// only for small graphs.
    pub fn measure_unbounded(&self, w: usize) -> bool {
        let g = self.graph(w);
        let est = g.diameter_estimate();
        if est.total_cmp(&self.d_inf) != std::cmp::Ordering::Less {
            return true;
        }
        if g.real_count() <= 4096 {
            g.diameter().total_cmp(&self.d_inf) != std::cmp::Ordering::Less
        } else {
            false
        }
    }

    /// Structural validation: shapes, ranges, the relation-table invariants,
    /// the single maximal domain, and presence of the required relative
    /// projections. Named-invariant errors; used by the loader.
    pub fn validate(&self) -> Result<(), StructureError> {
        let n = self.domain_count();
        if self.rel.len() != n {
            return Err(StructureError::RelationShape);
        }
        self.rel.validate()?;
        if self.maximal >= n {
            return Err(StructureError::NoMaximal);
        }
        for v in 0..n {
            if !self.rel.nested_in(v, self.maximal) {
                return Err(StructureError::MaximalNotAbove(self.maximal, v));
            }
        }
        let ax = self.ambient.real_count();
        if self.proj.pi.len() != n {
            return Err(StructureError::MissingProjection(self.proj.pi.len()));
        }
        for (w, table) in self.proj.pi.iter().enumerate() {
            if table.len() != ax {
                return Err(StructureError::ProjectionShape(w, table.len(), ax));
            }
            let cw = self.graph(w).real_count() as Vertex;
            for (x, &img) in table.iter().enumerate() {
                if img >= cw {
                    return Err(StructureError::ProjectionRange(w, x, img));
                }
            }
        }
        for v in 0..n {
            for w in 0..n {
                if v == w {
                    continue;
                }
                let needs_up =
                    self.rel.properly_nested(v, w) || self.rel.transverse(v, w);
                if needs_up {
                    match self.rho_up(v, w) {
                        None => return Err(StructureError::MissingRho(v, w)),
                        Some(set) if set.is_empty() => {
                            return Err(StructureError::EmptyRho(v, w))
                        }
                        Some(set) => {
                            let cw = self.graph(w).real_count() as Vertex;
                            if let Some(&bad) = set.iter().find(|&&z| z >= cw) {
                                return Err(StructureError::RhoRange(v, w, bad));
                            }
                        }
                    }
                }
                if self.rel.properly_nested(v, w) {
                    match self.proj.rho_down.get(&(v, w)) {
                        None => return Err(StructureError::MissingRho(v, w)),
                        Some(t) if t.len() != self.graph(w).real_count() => {
                            return Err(StructureError::RhoDownShape(v, w, t.len()))
                        }
                        Some(t) => {
                            let cv = self.graph(v).real_count() as Vertex;
                            for entry in t.iter().flatten() {
                                if let Some(&bad) = entry.iter().find(|&&z| z >= cv) {
                                    return Err(StructureError::RhoRange(v, w, bad));
                                }
                            }
                        }
                    }
                }
            }
        }
        for w in 0..n {
            if self.domains[w].unbounded != self.measure_unbounded(w) {
                return Err(StructureError::UnboundedFlag(w));
            }
        }
        Ok(())
    }

    /// Restriction to a subset of domains, re-indexing tables. Relations and
    /// projections are inherited.
    pub fn restrict(&self, keep: &[usize]) -> Result<HhsStructure<S>, StructureError> {
        let idx: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let n = keep.len();
        let mut pairs = Vec::new();
        for (a_new, &a_old) in keep.iter().enumerate() {
            for (b_new, &b_old) in keep.iter().enumerate().skip(a_new + 1) {
                let k = self.rel.kind(a_old, b_old).expect("distinct");
                pairs.push((a_new, b_new, k));
            }
        }
        let rel = RelationTable::from_pairs(n, &pairs)?;
        let mut proj = ProjectionTable {
            pi: keep.iter().map(|&w| self.proj.pi[w].clone()).collect(),
            ..Default::default()
        };
        for (&(v, w), set) in &self.proj.rho_up {
            if let (Some(&nv), Some(&nw)) = (idx.get(&v), idx.get(&w)) {
                proj.rho_up.insert((nv, nw), set.clone());
            }
        }
        for (&(v, w), t) in &self.proj.rho_down {
            if let (Some(&nv), Some(&nw)) = (idx.get(&v), idx.get(&w)) {
                proj.rho_down.insert((nv, nw), t.clone());
            }
        }
        let maximal = *idx
            .get(&self.maximal)
            .ok_or(StructureError::NoMaximal)?;
        Ok(HhsStructure {
            ambient: self.ambient.clone(),
            domains: keep.iter().map(|&w| self.domains[w].clone()).collect(),
            maximal,
            rel,
            proj,
            e: self.e,
            d_inf: self.d_inf.clone(),
            kappa_p: self.kappa_p.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    #[test]
    fn relation_table_round_trip_and_views() {
        let pairs = vec![
            (1, 0, RelKind::FirstInSecond), // 1 nested in 0
            (2, 0, RelKind::FirstInSecond),
            (1, 2, RelKind::Orthogonal),
        ];
        let t = RelationTable::from_pairs(3, &pairs).unwrap();
        assert!(t.properly_nested(1, 0));
        assert!(t.properly_nested(2, 0));
        assert!(!t.properly_nested(0, 1));
        assert!(t.orthogonal(2, 1));
        assert_eq!(t.below(0), vec![0, 1, 2]);
        assert_eq!(t.orth_set(1), vec![2]);
        assert_eq!(t.longest_chain(), 2);
        t.validate().unwrap();
    }

    #[test]
    fn transitivity_violation_is_named() {
        // 2 in 1, 1 in 0, but 2 transverse to 0
        let pairs = vec![
            (2, 1, RelKind::FirstInSecond),
            (1, 0, RelKind::FirstInSecond),
            (2, 0, RelKind::Transverse),
        ];
        let t = RelationTable::from_pairs(3, &pairs).unwrap();
        assert!(matches!(
            t.validate(),
            Err(StructureError::NotTransitive(2, 1, 0))
        ));
    }

    #[test]
    fn closure_violation_is_named() {
        // 3 in 1, 1 orth 2, 3 transverse 2 violates the closure
        let pairs = vec![
            (1, 0, RelKind::FirstInSecond),
            (2, 0, RelKind::FirstInSecond),
            (3, 0, RelKind::FirstInSecond),
            (3, 1, RelKind::FirstInSecond),
            (1, 2, RelKind::Orthogonal),
            (3, 2, RelKind::Transverse),
        ];
        let t = RelationTable::from_pairs(4, &pairs).unwrap();
        assert!(matches!(
            t.validate(),
            Err(StructureError::OrthogonalityClosure(3, 1, 2))
        ));
        let _ = Rat::from_int(0);
    }
}
