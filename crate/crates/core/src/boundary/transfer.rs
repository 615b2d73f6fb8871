//! Finite-scale transfer experiments: interior convergence through the
//! maximization, perturbation stability, the quotient utility bound, and
//! the boundary-projection transfer instances.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Vertex;
use crate::maximize::{MaximizationResult, CONE_SCOPE_FLAG};
use crate::report::{CheckReport, Verdict};
use crate::scalar::{Rat, Scalar};

use super::{
    basic_set_membership, boundary_projection, is_remote, phi, BasicSetParams, BoundaryCtx,
    BoundaryProxy, Candidate, Part, TransferConstants,
};

pub struct ExperimentConfig {
    pub seed: u64,
    /// depth of the (r+s, 1/s) classification ladder
    pub s_max: i64,
    /// perturbation radius for the stability check
    pub perturb: u32,
    pub model: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { seed: 0, s_max: 4, perturb: 2, model: String::new() }
    }
}

/// Classifies a sequence against the interior part of a basic set in the
/// original structure, transfers the tail through phi, and checks the tail
/// lands in the corresponding interior part of the maximized structure.
/// Also checks perturbation stability and the quotient bound on the
/// recorded coordinate sequences.
pub fn convergence_transfer_experiment<S: Scalar>(
    mr: &MaximizationResult<S>,
    tc: &TransferConstants<S>,
    p: &BoundaryProxy,
    sequence: &[Vertex],
    r: &S,
    epsilon: Rat,
    cfg: &ExperimentConfig,
) -> CheckReport {
    let mut rep = CheckReport::new("interior-convergence-transfer", cfg.model.clone());
    rep.set_param("r", r.render());
    rep.set_param("epsilon", format!("{epsilon}"));
    rep.set_param("seed", cfg.seed);
    rep.set_param("tail-index", sequence.len() / 2);
    rep.flag(CONE_SCOPE_FLAG);

    let h = mr.original.as_ref();
    let t = mr.t_structure.as_ref();
    let ctx = BoundaryCtx::for_structure(h);
    let ctx_t = BoundaryCtx::for_structure(t);

    // ladder classification in the original structure
    for s in 1..=cfg.s_max {
        let params = BasicSetParams {
            r: r.clone() + S::from_int(s),
            epsilon: Rat::from_ratio(1, s),
        };
        let members = sequence
            .iter()
            .filter(|&&x| {
                basic_set_membership(h, &ctx, p, &params, &Candidate::Vertex(x)).part
                    == Part::Interior
            })
            .count();
        rep.record("interior-members", format!("s={s}"), members);
    }

    let tail_from = sequence.len() / 2;
    let params_s = BasicSetParams { r: r.clone(), epsilon };
    let tail: Vec<Vertex> = sequence[tail_from..]
        .iter()
        .copied()
        .filter(|&x| {
            basic_set_membership(h, &ctx, p, &params_s, &Candidate::Vertex(x)).part
                == Part::Interior
        })
        .collect();
    rep.record("tail", "members", tail.len());
    if tail.is_empty() {
        rep.verdict = Verdict::Skipped("tail never enters the interior part".into());
        return rep;
    }

    // the same tail must be interior in the maximized structure at R_r
    let p_bar = match phi(mr, p) {
        Ok(p) => p,
        Err(e) => {
            rep.fail_with(vec![("phi".into(), e.to_string())]);
            return rep;
        }
    };
    let r_r = tc.r_r(r);
    rep.record("transfer", "r_r", r_r.render());
    let params_t = BasicSetParams { r: r_r, epsilon };
    for &x in &tail {
        let got = basic_set_membership(t, &ctx_t, &p_bar, &params_t, &Candidate::Vertex(x));
        if got.part != Part::Interior {
            rep.fail_with(vec![
                ("vertex".into(), x.to_string()),
                ("conditions".into(), format!("{:?}", got.conditions)),
            ]);
            return rep;
        }
    }

    // perturbation stability: shift every tail element by at most `perturb`
    // steps; coordinates move by at most E*R + E and the tail stays
    // interior at the halved ladder depth
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5e);
    let e = h.e_scalar();
    let shift_bound = e.clone() * S::from_int(cfg.perturb as i64) + e;
    let perturbed: Vec<(Vertex, Vertex)> = tail
        .iter()
        .map(|&x| {
            let mut y = x;
            for _ in 0..cfg.perturb {
                let nbrs: Vec<Vertex> = h
                    .ambient
                    .neighbors(y)
                    .iter()
                    .filter(|(v, _)| h.ambient.is_real(*v))
                    .map(|(v, _)| *v)
                    .collect();
                if nbrs.is_empty() {
                    break;
                }
                y = nbrs[rng.gen_range(0..nbrs.len())];
            }
            (x, y)
        })
        .collect();
    let x0 = h.ambient.basepoint();
    for &(x, y) in &perturbed {
        for w in 0..h.domain_count() {
            let dx = h.d_dom(w, x0, x);
            let dy = h.d_dom(w, x0, y);
            let shift = (dx - dy).abs();
            if shift.total_cmp(&shift_bound) == Ordering::Greater {
                rep.fail_with(vec![
                    ("perturbation-shift".into(), shift.render()),
                    ("bound".into(), shift_bound.render()),
                ]);
                return rep;
            }
        }
    }
    let s_half = (cfg.s_max / 2).max(1);
    let relaxed = BasicSetParams {
        r: r.clone(),
        epsilon: Rat::from_ratio(1, s_half).max(epsilon),
    };
    let kept = perturbed
        .iter()
        .filter(|&&(_, y)| {
            basic_set_membership(h, &ctx, p, &relaxed, &Candidate::Vertex(y)).part
                == Part::Interior
        })
        .count();
    rep.record("perturbed", "interior", kept);
    if kept < perturbed.len() {
        rep.fail_with(vec![(
            "perturbation".into(),
            format!("{kept}/{} stayed interior", perturbed.len()),
        )]);
    }

    // quotient bound on the recorded coordinate sequences: coordinates of
    // the perturbed points differ from the originals by at most the shift
    // bound, so at the horizon the coordinate ratios deviate by less than
    // the epsilon in use
    if p.support.len() >= 2 {
        let (w, v) = (p.support[0].domain, p.support[1].domain);
        let (x, y) = *perturbed.last().unwrap();
        let (a, b) = (h.d_dom(w, x0, x), h.d_dom(v, x0, x));
        let (c, d) = (h.d_dom(w, x0, y), h.d_dom(v, x0, y));
        if !b.is_zero() && !d.is_zero() {
            let dev = (c / d - a.clone() / b.clone()).abs();
            rep.record("quotient", "deviation", dev.render());
            let eps_s: S = S::from_ratio(*relaxed.epsilon.numer(), *relaxed.epsilon.denom());
            // meaningful only past the stabilization scale
            let floor = S::from_int(2 * tc.e_big as i64);
            if a.total_cmp(&floor) == Ordering::Greater
                && b.total_cmp(&floor) == Ordering::Greater
                && dev.total_cmp(&eps_s) == Ordering::Greater
            {
                rep.fail_with(vec![("quotient-deviation".into(), dev.render())]);
            }
        }
    }
    rep
}

/// The boundary-projection transfer instances: the joint-diameter bound
/// when both sides are remote, and the neighborhood implications otherwise.
/// Inapplicable support patterns are skipped with the reason.
pub fn verify_boundary_projection_transfer<S: Scalar>(
    mr: &MaximizationResult<S>,
    tc: &TransferConstants<S>,
    p: &BoundaryProxy,
    q: &BoundaryProxy,
    w: usize,
    model: &str,
) -> CheckReport {
    let mut rep = CheckReport::new("boundary-projection-transfer", model.to_string());
    rep.flag(CONE_SCOPE_FLAG);
    let h = mr.original.as_ref();
    let t = mr.t_structure.as_ref();
    let ctx = BoundaryCtx::for_structure(h);
    let ctx_t = BoundaryCtx::for_structure(t);

    if !is_remote(h, p, q) {
        rep.verdict = Verdict::Skipped("q is not remote to p".into());
        return rep;
    }
    if q.support.len() != 1 {
        rep.verdict = Verdict::Skipped("q must have singleton support".into());
        return rep;
    }
    let q_dom = q.support[0].domain;
    if matches!(mr.t_index(q_dom), Some(ti) if ti != 0) {
        rep.verdict =
            Verdict::Skipped("q is supported on a retained non-maximal domain".into());
        return rep;
    }
    let (p_bar, q_bar) = match (phi(mr, p), phi(mr, q)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            rep.verdict = Verdict::Skipped("phi undefined on this support".into());
            return rep;
        }
    };

    let p_in_t = p
        .support
        .iter()
        .all(|a| matches!(mr.t_index(a.domain), Some(ti) if ti != 0));
    let remote_bar = is_remote(t, &p_bar, &q_bar);

    if p_in_t && remote_bar {
        // joint-diameter instance: W in supp(p) or in its orthogonal
        // complement meeting q
        let applicable = p.domains().contains(&w)
            || (h.rel.orth_complement(&p.domains()).contains(&w)
                && !h.rel.orthogonal(w, q_dom));
        if !applicable {
            rep.verdict = Verdict::Skipped("domain outside the statement's range".into());
            return rep;
        }
        let side_s = match boundary_projection(h, &ctx, q, w) {
            Ok(s) => s,
            Err(e) => {
                rep.verdict = Verdict::Skipped(format!("projection undefined: {e}"));
                return rep;
            }
        };
        let wt = mr.t_index(w).expect("W retained");
        let side_t = match boundary_projection(t, &ctx_t, &q_bar, wt) {
            Ok(s) => s,
            Err(e) => {
                rep.verdict = Verdict::Skipped(format!("maximized projection undefined: {e}"));
                return rep;
            }
        };
        let mut joint = side_s.clone();
        joint.extend(side_t.iter().copied());
        joint.sort_unstable();
        joint.dedup();
        let diam = h.set_diam(w, &joint);
        let bound = tc.c.clone() - S::from_int(2 * tc.e_big as i64);
        rep.record("joint", "diameter", diam.render());
        rep.record("joint", "bound", bound.render());
        rep.record("joint", "s-size", side_s.len());
        rep.record("joint", "t-size", side_t.len());
        if diam.total_cmp(&bound) == Ordering::Greater {
            rep.fail_with(vec![
                ("diameter".into(), diam.render()),
                ("bound".into(), bound.render()),
            ]);
        }
        return rep;
    }

    // implication instances over an r-grid: a projection landing inside
    // M(r) upstairs must land inside M(R_r) downstairs
    if p.support.len() != 1 {
        rep.verdict = Verdict::Skipped("implication patterns need singleton supp(p)".into());
        return rep;
    }
    let p_dom = p.support[0].domain;
    if w != p_dom {
        rep.verdict = Verdict::Skipped("implication patterns project to supp(p)".into());
        return rep;
    }
    let side_s = match boundary_projection(h, &ctx, q, p_dom) {
        Ok(s) if !s.is_empty() => s,
        Ok(_) => {
            rep.verdict = Verdict::Skipped("empty projection at this scale".into());
            return rep;
        }
        Err(e) => {
            rep.verdict = Verdict::Skipped(format!("projection undefined: {e}"));
            return rep;
        }
    };
    let g = h.graph(p_dom);
    let base = h.pi(p_dom, h.ambient.basepoint());
    let horizon = p.support[0].horizon;
    let r_grid: Vec<S> = (0..8).map(|k| tc.r0.clone() + S::from_int(k)).collect();
    let mut checked = 0u32;
    for r in &r_grid {
        let inside = side_s.iter().all(|&z| {
            g.gromov_product(horizon, z, base).total_cmp(r) == Ordering::Greater
        });
        if !inside {
            continue;
        }
        checked += 1;
        let r_r = tc.r_r(r);
        // downstairs: either the projection of q_bar or q_bar itself
        let th = &p_bar.support[0];
        let tg = t.graph(th.domain);
        let tbase = t.pi(th.domain, t.ambient.basepoint());
        let ok = if remote_bar {
            match boundary_projection(t, &ctx_t, &q_bar, th.domain) {
                Ok(set) => set.iter().all(|&z| {
                    tg.gromov_product(th.horizon, z, tbase).total_cmp(&r_r)
                        == Ordering::Greater
                }),
                Err(_) => true,
            }
        } else {
            tg.gromov_product(th.horizon, q_bar.support[0].horizon, tbase)
                .total_cmp(&r_r)
                == Ordering::Greater
        };
        if !ok {
            rep.fail_with(vec![
                ("r".into(), r.render()),
                ("r_r".into(), r_r.render()),
            ]);
            return rep;
        }
    }
    rep.record("implication", "instances", checked);
    if checked == 0 {
        rep.verdict = Verdict::Skipped("hypothesis never held on the r-grid".into());
    }
    rep
}
