//! Scripted corruptions, one per axiom check. Each case carries a base
//! structure that passes its target check and a mutated copy that fails it
//! with a witness; the acceptance suite runs all eleven.

use std::sync::Arc;

use crate::graph::MetricGraph;
use crate::hhs::{AxiomId, Domain, HhsStructure, ProjectionTable, RelKind, RelationTable};
use crate::scalar::Scalar;

use super::{build_model, Family, Model, ModelSpec};

pub struct MutationCase<S: Scalar> {
    pub axiom: AxiomId,
    pub base: HhsStructure<S>,
    pub mutated: HhsStructure<S>,
    pub description: &'static str,
}

pub fn scripted_mutation<S: Scalar>(axiom: AxiomId) -> MutationCase<S> {
    match axiom {
        AxiomId::Projections => projections_case(),
        AxiomId::Nesting => nesting_case(),
        AxiomId::Orthogonality => orthogonality_case(),
        AxiomId::Transversality => transversality_case(),
        AxiomId::FiniteComplexity => complexity_case(),
        AxiomId::Containers => containers_case(),
        AxiomId::Uniqueness => uniqueness_case(),
        AxiomId::BoundedGeodesicImage => bgi_case(),
        AxiomId::LargeLinks => large_links_case(),
        AxiomId::Consistency => consistency_case(),
        AxiomId::PartialRealization => realization_case(),
    }
}

pub fn all_cases<S: Scalar>() -> Vec<MutationCase<S>> {
    AxiomId::all().into_iter().map(scripted_mutation).collect()
}

fn grid<S: Scalar>(r: u32) -> Model<S> {
    build_model(&ModelSpec::new(Family::GridZn, r)).expect("grid model")
}

fn electrified<S: Scalar>(r: u32) -> Model<S> {
    build_model(&ModelSpec::new(Family::ElectrifiedFk, r)).expect("electrified model")
}

fn projections_case<S: Scalar>() -> MutationCase<S> {
    let m = grid::<S>(6);
    let base = (*m.structure).clone();
    let mut mutated = base.clone();
    // teleport the projection of the +x tip to the far end of the axis
    let tip = m.vertex_of("6,0").unwrap();
    mutated.proj.pi[1][tip as usize] = 0;
    MutationCase {
        axiom: AxiomId::Projections,
        base,
        mutated,
        description: "grid r=6: projection of (6,0) to V1 teleported across the axis",
    }
}

fn nesting_case<S: Scalar>() -> MutationCase<S> {
    let m = electrified::<S>(4);
    let base = (*m.structure).clone();
    let mut mutated = base.clone();
    // shadow of Q1 in the top space replaced by two points that stay far
    // apart even after electrification
    let p = m.vertex_of("abab").unwrap();
    let q = m.vertex_of("BABA").unwrap();
    mutated.proj.rho_up.insert((1, 0), vec![p, q]);
    MutationCase {
        axiom: AxiomId::Nesting,
        base,
        mutated,
        description: "electrified r=4: rho(Q1 -> S) spread beyond diameter E",
    }
}

/// Point-domain fixture over a path ambient; relations supplied per case.
fn relation_fixture<S: Scalar>(
    names: &[&str],
    pairs: &[(usize, usize, RelKind)],
) -> HhsStructure<S> {
    let n = names.len();
    let edges: Vec<(u32, u32, S)> = (0..4).map(|i| (i, i + 1, S::one())).collect();
    let ambient = Arc::new(MetricGraph::new(5, &edges, 0, None).expect("ambient"));
    let point = Arc::new(MetricGraph::<S>::new(1, &[], 0, None).expect("point"));
    let domains: Vec<Domain<S>> = names
        .iter()
        .map(|&name| Domain { name: name.into(), graph: point.clone(), unbounded: false })
        .collect();
    let rel = RelationTable::from_pairs(n, pairs).expect("fixture relations");
    let mut proj = ProjectionTable {
        pi: vec![vec![0; 5]; n],
        ..Default::default()
    };
    for v in 0..n {
        for w in 0..n {
            if rel.properly_nested(v, w) {
                proj.rho_up.insert((v, w), vec![0]);
                proj.rho_down.insert((v, w), vec![None]);
            } else if v < w && rel.transverse(v, w) {
                proj.rho_up.insert((v, w), vec![0]);
                proj.rho_up.insert((w, v), vec![0]);
            }
        }
    }
    HhsStructure {
        ambient,
        domains,
        maximal: 0,
        rel,
        proj,
        e: 3,
        d_inf: S::from_int(2),
        kappa_p: S::from_int(6),
    }
}

fn orthogonality_case<S: Scalar>() -> MutationCase<S> {
    // S=0, L=1, R=2, LL=3 with LL in L, L perp R, LL perp R
    let pairs = vec![
        (1, 0, RelKind::FirstInSecond),
        (2, 0, RelKind::FirstInSecond),
        (3, 0, RelKind::FirstInSecond),
        (3, 1, RelKind::FirstInSecond),
        (1, 2, RelKind::Orthogonal),
        (3, 2, RelKind::Orthogonal),
    ];
    let base = relation_fixture::<S>(&["S", "L", "R", "LL"], &pairs);
    let mut mutated = base.clone();
    mutated.rel.set_kind(3, 2, RelKind::Transverse);
    mutated.proj.rho_up.insert((3, 2), vec![0]);
    mutated.proj.rho_up.insert((2, 3), vec![0]);
    MutationCase {
        axiom: AxiomId::Orthogonality,
        base,
        mutated,
        description: "fixture: LL in L perp R, but LL flipped transverse to R",
    }
}

fn transversality_case<S: Scalar>() -> MutationCase<S> {
    let m = electrified::<S>(4);
    let base = (*m.structure).clone();
    let mut mutated = base.clone();
    // Q2's shadow on the Q1 axis spread across the whole axis
    let axis_len = base.domains[1].graph.real_count() as u32;
    mutated.proj.rho_up.insert((2, 1), vec![axis_len - 2, axis_len - 1]);
    MutationCase {
        axiom: AxiomId::Transversality,
        base,
        mutated,
        description: "electrified r=4: rho(Q2 -> Q1) spread across the axis",
    }
}

fn complexity_case<S: Scalar>() -> MutationCase<S> {
    // chain A in B in S passes at E=3; inserting C makes a 4-chain
    let base = relation_fixture::<S>(
        &["S", "B", "A"],
        &[
            (1, 0, RelKind::FirstInSecond),
            (2, 0, RelKind::FirstInSecond),
            (2, 1, RelKind::FirstInSecond),
        ],
    );
    let mutated = relation_fixture::<S>(
        &["S", "C", "B", "A"],
        &[
            (1, 0, RelKind::FirstInSecond),
            (2, 0, RelKind::FirstInSecond),
            (3, 0, RelKind::FirstInSecond),
            (2, 1, RelKind::FirstInSecond),
            (3, 1, RelKind::FirstInSecond),
            (3, 2, RelKind::FirstInSecond),
        ],
    );
    MutationCase {
        axiom: AxiomId::FiniteComplexity,
        base,
        mutated,
        description: "fixture: nesting chain lengthened past E",
    }
}

fn containers_case<S: Scalar>() -> MutationCase<S> {
    // S=0, U=1, B=2, B'=3, C=4: B,B' transverse, both orth U, both in C,
    // C orth U. C is the proper container of U in S; deleting C breaks it.
    let pairs = vec![
        (1, 0, RelKind::FirstInSecond),
        (2, 0, RelKind::FirstInSecond),
        (3, 0, RelKind::FirstInSecond),
        (4, 0, RelKind::FirstInSecond),
        (2, 1, RelKind::Orthogonal),
        (3, 1, RelKind::Orthogonal),
        (4, 1, RelKind::Orthogonal),
        (2, 3, RelKind::Transverse),
        (2, 4, RelKind::FirstInSecond),
        (3, 4, RelKind::FirstInSecond),
    ];
    let base = relation_fixture::<S>(&["S", "U", "B", "Bp", "C"], &pairs);
    let mutated = base.restrict(&[0, 1, 2, 3]).expect("restriction");
    MutationCase {
        axiom: AxiomId::Containers,
        base,
        mutated,
        description: "fixture: container domain deleted",
    }
}

fn uniqueness_case<S: Scalar>() -> MutationCase<S> {
    let m = grid::<S>(6);
    let base = (*m.structure).clone();
    let mut mutated = base.clone();
    let center = 6; // axis id of coordinate 0
    mutated.proj.pi[1] = vec![center; base.ambient.real_count()];
    mutated.proj.pi[2] = vec![center; base.ambient.real_count()];
    MutationCase {
        axiom: AxiomId::Uniqueness,
        base,
        mutated,
        description: "grid r=6: both axis projections collapsed to constants",
    }
}

fn bgi_case<S: Scalar>() -> MutationCase<S> {
    let m = electrified::<S>(6);
    let base = (*m.structure).clone();
    let mut mutated = base.clone();
    // off-axis downward map flips between the two axis ends by vertex parity
    let axis_len = base.domains[1].graph.real_count() as u32;
    let table = mutated.proj.rho_down.get_mut(&(1, 0)).expect("down map");
    for (z, entry) in table.iter_mut().enumerate() {
        if entry.is_some() {
            let end = if z % 2 == 0 { axis_len - 2 } else { axis_len - 1 };
            *entry = Some(vec![end]);
        }
    }
    MutationCase {
        axiom: AxiomId::BoundedGeodesicImage,
        base,
        mutated,
        description: "electrified r=6: downward map flips between axis ends",
    }
}

fn large_links_case<S: Scalar>() -> MutationCase<S> {
    // The check is constant-sensitive: lowering the declared E below the
    // orthogonal width makes the link count at the bounded top exceed the
    // bound. This is a constants corruption rather than a table corruption.
    let m = grid::<S>(6);
    let base = (*m.structure).clone();
    let mut mutated = base.clone();
    mutated.e = 1;
    MutationCase {
        axiom: AxiomId::LargeLinks,
        base,
        mutated,
        description: "grid r=6: declared E lowered below the orthogonal width",
    }
}

fn consistency_case<S: Scalar>() -> MutationCase<S> {
    let m = electrified::<S>(6);
    let base = (*m.structure).clone();
    let mut mutated = base.clone();
    // Q2's shadow on the Q1 axis moved to a far axis end (diameter stays 0,
    // so the transversality check still passes)
    let axis_len = base.domains[1].graph.real_count() as u32;
    mutated.proj.rho_up.insert((2, 1), vec![axis_len - 1]);
    MutationCase {
        axiom: AxiomId::Consistency,
        base,
        mutated,
        description: "electrified r=6: rho(Q2 -> Q1) moved to a far point",
    }
}

fn realization_case<S: Scalar>() -> MutationCase<S> {
    let m = electrified::<S>(6);
    let base = (*m.structure).clone();
    let mut mutated = base.clone();
    // pin Q1 to incompatible places: its shadow in the top space moves to an
    // off-axis alternating word while its shadow on the Q2 axis moves to the
    // far end, so no point satisfies both pins within E
    let off_axis = m.vertex_of("abab").unwrap();
    let q2_len = base.domains[2].graph.real_count() as u32;
    mutated.proj.rho_up.insert((1, 0), vec![off_axis]);
    mutated.proj.rho_up.insert((1, 2), vec![q2_len - 1]);
    MutationCase {
        axiom: AxiomId::PartialRealization,
        base,
        mutated,
        description: "electrified r=6: Q1 pinned to incompatible shadows",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hhs::axioms::{check_axiom, CheckConfig};
    use crate::report::Verdict;
    use crate::scalar::Rat;

    #[test]
    fn every_scripted_mutation_flips_its_check() {
        for case in all_cases::<Rat>() {
            let cfg = CheckConfig { budget: 60_000, seed: 11, ..Default::default() };
            let before = check_axiom(&case.base, case.axiom, &cfg);
            assert!(
                before.verdict.passed(),
                "{:?} base fails: {:?}",
                case.axiom,
                before.witness
            );
            let after = check_axiom(&case.mutated, case.axiom, &cfg);
            assert_eq!(
                after.verdict,
                Verdict::Fail,
                "{:?} mutation not caught ({})",
                case.axiom,
                case.description
            );
            assert!(after.witness.is_some(), "{:?} missing witness", case.axiom);
        }
    }
}
