//! Spin-1 string breaking on two unit cells, molecules against the link model.

use dipolar_qlm::qlm::LinkSpin;
use dipolar_qlm::scenario::{run_scenario, Model, ScenarioConfig};

fn main() -> dipolar_qlm::Result<()> {
    for m in [0.25, 2.0] {
        let mut config = ScenarioConfig::new("breaking", Model::Both, LinkSpin::One, 2, m, 1.0);
        config.points = 11;
        let out = run_scenario(&config)?;
        let (qlm, dmh) = (out.qlm.unwrap(), out.dmh.unwrap());
        println!("m = {m}: molecular basis {} states", out.summary.dmh_dim.unwrap());
        for k in 0..qlm.times.len() {
            println!(
                "  t = {:5.1}  flux sum QLM {:+.3} DMH {:+.3}  fidelity {:.3}  G {:.1e}",
                qlm.times[k],
                qlm.flux_sum[k],
                dmh.flux_sum[k],
                dmh.fidelity.as_ref().unwrap()[k],
                dmh.gauss_g[k]
            );
        }
    }
    Ok(())
}
