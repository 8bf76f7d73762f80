//! Metal sphere in an applied field: continuation in E on a 20×20 grid and
//! the surface profiles at the end.

use dmjac::newton::{continuation_solve_with, Continuable, ContinuationSchedule, NewtonConfig};
use dmjac::problems::{Colloid, ColloidConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = Colloid::new(ColloidConfig {
        n_r: 20,
        n_t: 20,
        e_applied: 1.0,
        ..Default::default()
    })?;
    let schedule = ContinuationSchedule::new("E", 1.0, 1.0, 6.0);
    let (u, _) = continuation_solve_with(
        &family,
        &schedule,
        &family.initial_iterate(),
        &NewtonConfig::default(),
        |e, _, r| println!("E = {e}: {} iterations, |F| = {:.2e}", r.iterations, r.final_residual()),
    )?;
    let s = family.with_parameter(6.0).state(&u)?;
    let theta = &family.grid().polar.theta;
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "theta", "c_s", "psi_s", "zeta", "q");
    for k in 0..theta.len() {
        println!(
            "{:>8.4} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            theta[k], s.c_s[k], s.psi_s[k], s.zeta[k], s.q[k]
        );
    }
    Ok(())
}
