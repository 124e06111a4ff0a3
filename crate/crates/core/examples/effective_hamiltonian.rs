//! Compare the second-order effective Hamiltonian of the molecules with the
//! target link model.

use dipolar_qlm::qlm::LinkSpin;
use dipolar_qlm::scenario::{effective_residuals, Model, ScenarioConfig, ScenarioSystem};

fn main() -> dipolar_qlm::Result<()> {
    for (spin, m, g2, range) in [(LinkSpin::Half, 0.1, 0.0, Some(1.01)), (LinkSpin::Half, 0.1, 0.0, None), (LinkSpin::One, 0.25, 1.0, None)] {
        let mut config = ScenarioConfig::new("heff", Model::Dmh, spin, 2, m, g2);
        config.max_range = range;
        let r = effective_residuals(&ScenarioSystem::build(&config)?)?;
        println!(
            "S = {}, range {range:?}: max residual {:.2e}, off-diagonal {:.2e}, Gauss-breaking {:.2e}",
            spin.value(),
            r.max_residual,
            r.max_offdiagonal,
            r.max_gauss_breaking
        );
        for e in r.entries.iter().take(3) {
            println!("  {} {} {:+.2e}", e.row, e.col, e.value);
        }
    }
    Ok(())
}
