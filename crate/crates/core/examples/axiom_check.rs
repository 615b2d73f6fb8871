use hhs::hhs::axioms::{check_all, CheckConfig};
use hhs::models::{build_model, Family, ModelSpec};
use hhs::scalar::Rat;

fn main() {
    for family in Family::all() {
        let spec = ModelSpec::new(family, 6);
        let m: hhs::models::Model<Rat> = build_model(&spec).unwrap();
        let cfg = CheckConfig { budget: 60_000, seed: 7, model: m.name(), ..Default::default() };
        let t0 = std::time::Instant::now();
        for rep in check_all(&m.structure, &cfg) {
            let status = if rep.verdict.passed() { "PASS".to_string() } else { format!("FAIL {:?}", rep.witness) };
            println!("{:<24} {:<36} {}", rep.model, rep.check, status);
        }
        println!("  ({:?})", t0.elapsed());
    }
}
