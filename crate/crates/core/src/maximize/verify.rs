//! Transfer verifiers: each runs over a radius ladder of maximized models
//! and passes when the measured constant at the top radius exceeds the one
//! at the bottom radius by at most the configured slack.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Vertex;
use crate::hhs::{find_hierarchy_path, gate, hierarchy_path_fit, is_hierarchically_quasiconvex};
use crate::report::CheckReport;
use crate::scalar::Scalar;

use super::{MaximizationResult, CONE_SCOPE_FLAG};

pub struct LadderEntry<S: Scalar> {
    pub radius: u32,
    pub mr: MaximizationResult<S>,
}

pub struct VerifyConfig<S> {
    pub count: u64,
    pub budget: u64,
    pub seed: u64,
    pub slack: S,
    pub model: String,
}

fn ladder_pass<S: Scalar>(
    rep: &mut CheckReport,
    name: &str,
    values: &[(u32, S)],
    slack: &S,
) {
    for (r, v) in values {
        rep.record(name, r, v.render());
    }
    if values.len() >= 2 {
        let lo = &values[0].1;
        let hi = &values[values.len() - 1].1;
        if hi.clone().total_cmp(&(lo.clone() + slack.clone())) == Ordering::Greater {
            rep.fail_with(vec![
                ("constant".into(), name.into()),
                ("low".into(), lo.render()),
                ("high".into(), hi.render()),
                ("slack".into(), slack.render()),
            ]);
        }
    }
}

fn sample_pairs(n: usize, count: u64, seed: u64) -> Vec<(Vertex, Vertex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count * 2)
        .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
        .filter(|(a, b)| a != b)
        .take(count as usize)
        .collect()
}

/// Hierarchy paths found in one structure stay hierarchy paths in the other,
/// with constants bounded across the ladder, in both directions.
pub fn verify_hierarchy_path_transfer<S: Scalar>(
    ladder: &[LadderEntry<S>],
    cfg: &VerifyConfig<S>,
) -> CheckReport {
    let mut rep = CheckReport::new("hierarchy-path-transfer", cfg.model.clone());
    rep.set_param("count", cfg.count);
    rep.set_param("seed", cfg.seed);
    rep.flag(CONE_SCOPE_FLAG);
    let mut st = Vec::new();
    let mut ts = Vec::new();
    for entry in ladder {
        let h = entry.mr.original.as_ref();
        let t = entry.mr.t_structure.as_ref();
        let lambda_search = S::from_int(2 * h.e.max(1) as i64);
        let lambda_search_t = S::from_int(2 * t.e.max(1) as i64);
        let pairs = sample_pairs(h.ambient.real_count(), cfg.count, cfg.seed ^ entry.radius as u64);
        let mut worst_st = S::zero();
        let mut worst_ts = S::zero();
        let mut used = 0u64;
        for &(x, y) in &pairs {
            // S-side hierarchy path measured in T
            let ps = find_hierarchy_path(h, x, y, &lambda_search, 20_000);
            if ps.ok {
                let fit = hierarchy_path_fit(t, &ps.path);
                worst_st = S::max_of(worst_st, fit.lambda);
                used += 1;
            }
            // T-side hierarchy path measured in S
            let pt = find_hierarchy_path(t, x, y, &lambda_search_t, 20_000);
            if pt.ok {
                let fit = hierarchy_path_fit(h, &pt.path);
                worst_ts = S::max_of(worst_ts, fit.lambda);
            }
        }
        rep.record("paths-used", entry.radius, used);
        st.push((entry.radius, worst_st));
        ts.push((entry.radius, worst_ts));
    }
    ladder_pass(&mut rep, "lambda-into-t", &st, &cfg.slack);
    ladder_pass(&mut rep, "lambda-into-s", &ts, &cfg.slack);
    rep
}

pub struct NamedSubset {
    pub name: String,
    pub vertices: Vec<Vertex>,
    pub expect_hqc: bool,
}

/// Hierarchical quasiconvexity transfers: witnesses stay HQC in the
/// maximized structure with bounded constants; non-witnesses fail in both.
pub fn verify_hqc_transfer<S: Scalar>(
    ladder: &[LadderEntry<S>],
    subsets_per: &[Vec<NamedSubset>],
    k0: &S,
    cfg: &VerifyConfig<S>,
) -> CheckReport {
    let mut rep = CheckReport::new("hqc-transfer", cfg.model.clone());
    rep.set_param("k0", k0.render());
    rep.set_param("seed", cfg.seed);
    rep.flag(CONE_SCOPE_FLAG);

    // collect names from the first entry
    let names: Vec<(String, bool)> = subsets_per
        .first()
        .map(|v| v.iter().map(|s| (s.name.clone(), s.expect_hqc)).collect())
        .unwrap_or_default();

    // envelope probe: small enough that the envelope saturates inside the
    // smallest ball of the ladder, else shrinking balls masquerade as growth
    let r_min = ladder.iter().map(|e| e.radius).min().unwrap_or(4);

    for (name, expect) in &names {
        let mut k0_s = Vec::new();
        let mut k0_t = Vec::new();
        let mut env_s = Vec::new();
        let mut env_t = Vec::new();
        let mut part1 = Vec::new();
        for (entry, subs) in ladder.iter().zip(subsets_per) {
            let sub = subs.iter().find(|s| &s.name == name).expect("subset per radius");
            let probe = S::from_int((2 * entry.mr.original.e as i64).min(r_min as i64 / 2));
            let rs = is_hierarchically_quasiconvex(
                entry.mr.original.as_ref(),
                &sub.vertices,
                k0,
                cfg.budget,
                cfg.seed,
            );
            let rt = is_hierarchically_quasiconvex(
                entry.mr.t_structure.as_ref(),
                &sub.vertices,
                k0,
                cfg.budget,
                cfg.seed,
            );
            k0_s.push((entry.radius, rs.k0_measured.clone()));
            k0_t.push((entry.radius, rt.k0_measured.clone()));
            env_s.push((entry.radius, rs.envelope_at(&probe)));
            env_t.push((entry.radius, rt.envelope_at(&probe)));
            part1.push((rs.part1_pass, rt.part1_pass));
        }
        let grew = |vals: &[(u32, S)]| -> bool {
            vals.len() >= 2
                && vals[vals.len() - 1]
                    .1
                    .clone()
                    .total_cmp(&(vals[0].1.clone() + cfg.slack.clone()))
                    == Ordering::Greater
        };
        if *expect {
            ladder_pass(&mut rep, &format!("{name}|k0-s"), &k0_s, &cfg.slack);
            ladder_pass(&mut rep, &format!("{name}|k0-t"), &k0_t, &cfg.slack);
            ladder_pass(&mut rep, &format!("{name}|envelope-s"), &env_s, &cfg.slack);
            ladder_pass(&mut rep, &format!("{name}|envelope-t"), &env_t, &cfg.slack);
            if let Some((i, _)) = part1.iter().enumerate().find(|(_, p)| !p.0 || !p.1) {
                rep.fail_with(vec![
                    ("subset".into(), name.clone()),
                    ("part1-failed-at".into(), ladder[i].radius.to_string()),
                ]);
            }
        } else {
            // non-witness must fail in both structures
            for (vals, rep_name) in [(&env_s, "s"), (&env_t, "t")] {
                for (r, v) in vals.iter() {
                    rep.record(&format!("{name}|envelope-{rep_name}"), r, v.render());
                }
            }
            let fails_s = grew(&env_s) || part1.iter().any(|p| !p.0);
            let fails_t = grew(&env_t) || part1.iter().any(|p| !p.1);
            if !(fails_s && fails_t) {
                rep.fail_with(vec![
                    ("subset".into(), name.clone()),
                    ("expected-non-hqc-in-both".into(), format!("s={fails_s} t={fails_t}")),
                ]);
            }
        }
    }
    rep
}

/// The gate in the original structure agrees with closest-point projection
/// in the coned space, and with the gate in the maximized structure.
pub fn verify_gate_vs_cpp<S: Scalar>(
    ladder: &[LadderEntry<S>],
    ys_per: &[Vec<NamedSubset>],
    cfg: &VerifyConfig<S>,
) -> CheckReport {
    let mut rep = CheckReport::new("gate-vs-cpp", cfg.model.clone());
    rep.set_param("count", cfg.count);
    rep.set_param("seed", cfg.seed);
    rep.flag(CONE_SCOPE_FLAG);
    let names: Vec<String> = ys_per
        .first()
        .map(|v| v.iter().map(|s| s.name.clone()).collect())
        .unwrap_or_default();
    for name in &names {
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for (entry, subs) in ladder.iter().zip(ys_per) {
            let sub = subs.iter().find(|s| &s.name == name).expect("subset per radius");
            let h = entry.mr.original.as_ref();
            let t = entry.mr.t_structure.as_ref();
            let coned = entry.mr.coned.graph.as_ref();
            let n = h.ambient.real_count();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (entry.radius as u64) << 3);
            let mut worst1 = S::zero();
            let mut worst2 = S::zero();
            for _ in 0..cfg.count {
                let x = rng.gen_range(0..n as u32);
                let gs = gate(h, &sub.vertices, x);
                let gt = gate(t, &sub.vertices, x);
                let cpp = coned.closest_point_projection(&sub.vertices, x);
                let grow = coned.distance_row(gs);
                let d1 = cpp
                    .iter()
                    .map(|&a| grow.get(a))
                    .fold(S::zero(), S::max_of);
                worst1 = S::max_of(worst1, d1);
                worst2 = S::max_of(worst2, h.ambient.distance(gs, gt));
            }
            c1.push((entry.radius, worst1));
            c2.push((entry.radius, worst2));
        }
        ladder_pass(&mut rep, &format!("{name}|c1"), &c1, &cfg.slack);
        ladder_pass(&mut rep, &format!("{name}|c2"), &c2, &cfg.slack);
    }
    rep
}

/// Slice images of leftover domains stay quasiconvex in the coned space.
pub fn verify_y_quasiconvex<S: Scalar>(
    ladder: &[LadderEntry<S>],
    cfg: &VerifyConfig<S>,
) -> CheckReport {
    let mut rep = CheckReport::new("y-quasiconvex", cfg.model.clone());
    rep.set_param("seed", cfg.seed);
    rep.flag(CONE_SCOPE_FLAG);
    let mut any = false;
    let mut values = Vec::new();
    for entry in ladder {
        let h = entry.mr.original.as_ref();
        let mut worst = S::zero();
        for &w in entry.mr.view_order.iter().skip(1) {
            any = true;
            let region = crate::hhs::product_region(h, w).expect("region");
            let mu = entry.mr.coned.graph.measure_quasiconvexity(
                &region.f_w,
                cfg.budget,
                cfg.seed ^ w as u64,
            );
            worst = S::max_of(worst, mu);
        }
        values.push((entry.radius, worst));
    }
    if !any {
        rep.verdict = crate::report::Verdict::Skipped(
            "no retained domains outside T at this structure".into(),
        );
        return rep;
    }
    ladder_pass(&mut rep, "k0", &values, &cfg.slack);
    rep
}

/// Hyperbolicity of the coned top space stays bounded across the ladder.
pub fn verify_coned_hyperbolicity<S: Scalar>(
    ladder: &[LadderEntry<S>],
    cfg: &VerifyConfig<S>,
) -> CheckReport {
    let mut rep = CheckReport::new("coned-hyperbolicity", cfg.model.clone());
    rep.set_param("budget", cfg.budget);
    rep.set_param("seed", cfg.seed);
    rep.flag(CONE_SCOPE_FLAG);
    let mut deltas = Vec::new();
    for entry in ladder {
        let d = entry.mr.coned.graph.estimate_delta(cfg.budget, cfg.seed);
        rep.record("diam", entry.radius, entry.mr.coned.graph.diameter_estimate().render());
        deltas.push((entry.radius, d.delta));
    }
    ladder_pass(&mut rep, "delta", &deltas, &cfg.slack);
    rep
}
