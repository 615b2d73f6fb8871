//! End-to-end pipelines behind the `verify` and `boundary` commands:
//! build the radius ladder, maximize each model, and run the named
//! verifier over it. The acceptance suite drives the same functions.

use crate::error::StructureError;
use crate::hhs::axioms::CheckConfig;
use crate::maximize::verify::{
    verify_coned_hyperbolicity, verify_gate_vs_cpp, verify_hierarchy_path_transfer,
    verify_hqc_transfer, verify_y_quasiconvex, LadderEntry, VerifyConfig,
};
use crate::maximize::{maximize, MaximizationResult};
use crate::models::bundles;
use crate::models::{build_model, Family, Model, ModelSpec};
use crate::report::CheckReport;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    HierarchyPathTransfer,
    HqcTransfer,
    GateVsCpp,
    YQuasiconvex,
    ConedHyperbolicity,
}

impl Lemma {
    pub fn parse(s: &str) -> Option<Lemma> {
        match s {
            "hierarchy-path-transfer" => Some(Lemma::HierarchyPathTransfer),
            "hqc-transfer" => Some(Lemma::HqcTransfer),
            "gate-vs-cpp" => Some(Lemma::GateVsCpp),
            "y-quasiconvex" => Some(Lemma::YQuasiconvex),
            "coned-hyperbolicity" => Some(Lemma::ConedHyperbolicity),
            _ => None,
        }
    }

    pub fn all_names() -> [&'static str; 5] {
        [
            "hierarchy-path-transfer",
            "hqc-transfer",
            "gate-vs-cpp",
            "y-quasiconvex",
            "coned-hyperbolicity",
        ]
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub count: u64,
    pub budget: u64,
    pub seed: u64,
    pub slack_units: i64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { count: 50, budget: 20_000, seed: 0, slack_units: 1 }
    }
}

pub struct MaximizedLadder<S: Scalar> {
    pub family: Family,
    pub models: Vec<Model<S>>,
    pub entries: Vec<LadderEntry<S>>,
}

pub fn build_maximized_ladder<S: Scalar>(
    family: Family,
    radii: &[u32],
    cfg: &PipelineConfig,
) -> Result<MaximizedLadder<S>, StructureError> {
    let mut models = Vec::new();
    let mut entries = Vec::new();
    for &r in radii {
        let spec = ModelSpec::new(family, r);
        let model = build_model::<S>(&spec)?;
        let check_cfg = CheckConfig {
            budget: cfg.budget,
            seed: cfg.seed,
            model: model.name(),
            skip_containers: false,
        };
        let mr = maximize(&model.structure, &check_cfg)?;
        entries.push(LadderEntry { radius: r, mr });
        models.push(model);
    }
    Ok(MaximizedLadder { family, models, entries })
}

pub fn run_lemma<S: Scalar>(
    family: Family,
    radii: &[u32],
    lemma: Lemma,
    cfg: &PipelineConfig,
) -> Result<CheckReport, StructureError> {
    let ladder = build_maximized_ladder::<S>(family, radii, cfg)?;
    Ok(run_lemma_on(&ladder, lemma, cfg))
}

pub fn run_lemma_on<S: Scalar>(
    ladder: &MaximizedLadder<S>,
    lemma: Lemma,
    cfg: &PipelineConfig,
) -> CheckReport {
    let radii: Vec<String> = ladder
        .entries
        .iter()
        .map(|e| e.radius.to_string())
        .collect();
    let vcfg = VerifyConfig {
        count: cfg.count,
        budget: cfg.budget,
        seed: cfg.seed,
        slack: S::from_int(cfg.slack_units),
        model: format!("{} ladder=[{}]", ladder.family.name(), radii.join(",")),
    };
    match lemma {
        Lemma::HierarchyPathTransfer => {
            verify_hierarchy_path_transfer(&ladder.entries, &vcfg)
        }
        Lemma::HqcTransfer => {
            let subsets: Vec<_> =
                ladder.models.iter().map(bundles::hqc_subsets).collect();
            let k0 = S::from_int(2 * ladder.entries[0].mr.original.e as i64);
            verify_hqc_transfer(&ladder.entries, &subsets, &k0, &vcfg)
        }
        Lemma::GateVsCpp => {
            let subsets: Vec<_> =
                ladder.models.iter().map(bundles::gate_subsets).collect();
            verify_gate_vs_cpp(&ladder.entries, &subsets, &vcfg)
        }
        Lemma::YQuasiconvex => verify_y_quasiconvex(&ladder.entries, &vcfg),
        Lemma::ConedHyperbolicity => verify_coned_hyperbolicity(&ladder.entries, &vcfg),
    }
}

/// One maximized model, for the boundary and classify commands.
pub fn build_maximized<S: Scalar>(
    family: Family,
    radius: u32,
    cfg: &PipelineConfig,
) -> Result<(Model<S>, MaximizationResult<S>), StructureError> {
    let spec = ModelSpec::new(family, radius);
    let model = build_model::<S>(&spec)?;
    let check_cfg = CheckConfig {
        budget: cfg.budget,
        seed: cfg.seed,
        model: model.name(),
        skip_containers: false,
    };
    let mr = maximize(&model.structure, &check_cfg)?;
    Ok((model, mr))
}
