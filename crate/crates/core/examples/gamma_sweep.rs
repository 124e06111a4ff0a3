//! Mean fidelity versus the long-short ratio on a single unit cell.

use dipolar_qlm::qlm::LinkSpin;
use dipolar_qlm::scenario::{sweep_gamma, Model, ScenarioConfig, SweepConfig};

fn main() -> dipolar_qlm::Result<()> {
    let base = ScenarioConfig::new("sweep", Model::Both, LinkSpin::One, 1, 0.25, 1.0);
    let sweep = SweepConfig { base, gammas: vec![1.0, 1.5, 2.0, 2.5, 3.0, 4.0], masses: vec![0.25, 2.0] };
    let table = sweep_gamma(&sweep, 1)?;
    for r in &table.rows {
        println!("γ = {:.1}, m = {:.2}: mean fidelity {:.4}, string broken {}", r.gamma, r.m, r.mean_fidelity, r.string_broken);
    }
    for &m in &sweep.masses {
        println!("best γ for m = {m}: {:?}", table.best_gamma(m));
    }
    table.write_csv(std::io::stdout())
}
