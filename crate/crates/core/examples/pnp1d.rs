//! Backward-Euler time steps of a 1D Poisson-Nernst-Planck cell relaxing
//! from a perturbed start.

use dmjac::newton::{newton_solve, NewtonConfig};
use dmjac::problems::{Pnp1d, PnpConfig};

fn main() -> dmjac::Result<()> {
    let mut step = Pnp1d::perturbed(PnpConfig::default(), 0.2)?;
    let n = step.config().n;
    for k in 1..=10 {
        let (u, report) = newton_solve(&step, &step.initial_iterate(), &NewtonConfig::default())?;
        let (cp, cm) = u.split_at(n);
        let phi = step.potential(cp, cm)?;
        println!(
            "step {k:>2}: {} iterations, mid-cell c+ = {:.6}, c- = {:.6}, phi = {:.6}",
            report.iterations,
            cp[n / 2],
            cm[n / 2],
            phi[n / 2]
        );
        step = step.advanced(&u)?;
    }
    Ok(())
}
