use hhs::pipeline::{run_lemma, Lemma, PipelineConfig};
use hhs::models::Family;
use hhs::scalar::Rat;

fn main() {
    let cfg = PipelineConfig { count: 20, budget: 10_000, seed: 1, slack_units: 1 };
    for family in [Family::GridZn, Family::ElectrifiedFk] {
        for lemma in [Lemma::HierarchyPathTransfer, Lemma::HqcTransfer, Lemma::GateVsCpp, Lemma::YQuasiconvex, Lemma::ConedHyperbolicity] {
            let t0 = std::time::Instant::now();
            let radii = if family == Family::GridZn { vec![4, 8] } else { vec![3, 5] };
            let rep = run_lemma::<Rat>(family, &radii, lemma, &cfg).unwrap();
            println!("{:<16} {:<28} {:?}  constants={:?}  ({:?})", family.name(), rep.check, rep.verdict, rep.constants, t0.elapsed());
            if let Some(w) = rep.witness { println!("   witness: {:?}", w); }
        }
    }
}
