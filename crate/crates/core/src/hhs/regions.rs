//! Standard product regions: P_W via projection pinning, the factor slices
//! F_W and E_W through the basepoint's gate, and the verification of their
//! projection behavior.

use std::cmp::Ordering;

use crate::error::StructureError;
use crate::graph::Vertex;
use crate::report::CheckReport;
use crate::scalar::Scalar;

use super::{hqc, HhsStructure};

#[derive(Clone, Debug)]
pub struct ProductRegion<S> {
    pub w: usize,
    pub p_w: Vec<Vertex>,
    pub f_w: Vec<Vertex>,
    pub e_w: Vec<Vertex>,
    pub gate_point: Vertex,
    pub kappa_p: S,
}

impl<S: Scalar> HhsStructure<S> {
    /// Membership in P_W: projections pinned to W's shadow in every domain
    /// transverse to W or properly containing W.
    pub fn in_product_region(&self, w: usize, x: Vertex) -> bool {
        for v in 0..self.domain_count() {
            let pins = self.rel.transverse(v, w) || self.rel.properly_nested(w, v);
            if !pins {
                continue;
            }
            let shadow = self.rho_up(w, v).expect("validated rho for pinning");
            let d = self.dist_to_set(v, self.pi(v, x), shadow);
            if d.total_cmp(&self.kappa_p) == Ordering::Greater {
                return false;
            }
        }
        true
    }

    /// Same F-coordinate test: both in P_W and close projections in every
    /// domain orthogonal to W.
    pub fn f_slice(&self, w: usize, x: Vertex, y: Vertex) -> bool {
        for v in self.rel.orth_set(w) {
            if self
                .d_dom(v, x, y)
                .total_cmp(&self.kappa_p)
                == Ordering::Greater
            {
                return false;
            }
        }
        true
    }

    /// Same E-coordinate test: close projections in every domain nested in W.
    pub fn e_slice(&self, w: usize, x: Vertex, y: Vertex) -> bool {
        for v in self.rel.below(w) {
            if self
                .d_dom(v, x, y)
                .total_cmp(&self.kappa_p)
                == Ordering::Greater
            {
                return false;
            }
        }
        true
    }
}

pub fn product_region<S: Scalar>(
    h: &HhsStructure<S>,
    w: usize,
) -> Result<ProductRegion<S>, StructureError> {
    let p_w: Vec<Vertex> = h
        .ambient
        .real_vertices()
        .filter(|&x| h.in_product_region(w, x))
        .collect();
    if p_w.is_empty() {
        return Err(StructureError::RealizationFailed(w));
    }
    let gate_point = hqc::gate(h, &p_w, h.ambient.basepoint());
    let f_w: Vec<Vertex> = p_w
        .iter()
        .copied()
        .filter(|&y| h.f_slice(w, gate_point, y))
        .collect();
    let e_w: Vec<Vertex> = p_w
        .iter()
        .copied()
        .filter(|&y| h.e_slice(w, gate_point, y))
        .collect();
    Ok(ProductRegion {
        w,
        p_w,
        f_w,
        e_w,
        gate_point,
        kappa_p: h.kappa_p.clone(),
    })
}

/// Verifies the three projection regimes of F_W and E_W and reports the
/// achieved coarseness constants. `kappa_cap` defaults to 4E.
pub fn check_properties_of_f<S: Scalar>(
    h: &HhsStructure<S>,
    w: usize,
    kappa_cap: Option<S>,
    model: &str,
) -> CheckReport {
    let cap = kappa_cap.unwrap_or_else(|| S::from_int(4 * h.e as i64));
    let mut rep = CheckReport::new("properties-of-f", model.to_string());
    rep.set_param("W", h.domains[w].name.clone());
    rep.set_param("kappa-cap", cap.render());
    rep.set_param("kappa-p", h.kappa_p.render());

    let region = match product_region(h, w) {
        Ok(r) => r,
        Err(e) => {
            rep.fail_with(vec![("region".into(), e.to_string())]);
            return rep;
        }
    };

    let mut worst = S::zero();
    let mut check = |rep: &mut CheckReport, name: String, value: S| {
        if value.total_cmp(&cap) == Ordering::Greater {
            rep.fail_with(vec![(name.clone(), value.render())]);
        }
        rep.record("kappa", &name, value.render());
        worst = S::max_of(worst.clone(), value);
    };

    for v in 0..h.domain_count() {
        let name_f = format!("F|{}", h.domains[v].name);
        let name_e = format!("E|{}", h.domains[v].name);
        let img_f = h.project_set(v, &region.f_w);
        let img_e = h.project_set(v, &region.e_w);
        if h.rel.nested_in(v, w) {
            // F projects onto, E projects small
            let onto = onto_constant(h, v, &img_f);
            check(&mut rep, name_f, onto);
            let diam = h.set_diam(v, &img_e);
            check(&mut rep, name_e, diam);
        } else if h.rel.orthogonal(v, w) {
            let diam = h.set_diam(v, &img_f);
            check(&mut rep, name_f, diam);
            let onto = onto_constant(h, v, &img_e);
            check(&mut rep, name_e, onto);
        } else if h.rel.properly_nested(w, v) || h.rel.transverse(v, w) {
            let shadow = h.rho_up(w, v).expect("validated");
            let hf = hausdorff(h, v, &img_f, shadow);
            check(&mut rep, name_f, hf);
        }
    }
    rep.record("kappa", "worst", worst.render());
    rep
}

fn onto_constant<S: Scalar>(h: &HhsStructure<S>, v: usize, image: &[Vertex]) -> S {
    if image.is_empty() {
        return S::from_int(i64::MAX / 2);
    }
    let row = h.graph(v).set_row(image);
    h.graph(v)
        .real_vertices()
        .map(|z| row.get(z))
        .fold(S::zero(), S::max_of)
}

fn hausdorff<S: Scalar>(h: &HhsStructure<S>, v: usize, a: &[Vertex], b: &[Vertex]) -> S {
    if a.is_empty() || b.is_empty() {
        return S::from_int(i64::MAX / 2);
    }
    let row_b = h.graph(v).set_row(b);
    let row_a = h.graph(v).set_row(a);
    let x = a.iter().map(|&z| row_b.get(z)).fold(S::zero(), S::max_of);
    let y = b.iter().map(|&z| row_a.get(z)).fold(S::zero(), S::max_of);
    S::max_of(x, y)
}
