//! Thin-film field with continuation in the current density j.
//!
//! `cargo run --example thinfilm -- 1.5`

use dmjac::newton::{continuation_solve_with, Continuable, ContinuationSchedule, NewtonConfig};
use dmjac::problems::{ThinFilm, ThinFilmConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let target: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1.5);
    let family = ThinFilm::new(ThinFilmConfig {
        n: 100,
        j: 0.5,
        ..Default::default()
    })?;
    let schedule = ContinuationSchedule::new("j", 0.5, 0.1, target);
    let (e, _) = continuation_solve_with(
        &family,
        &schedule,
        &family.initial_iterate(),
        &NewtonConfig::default(),
        |j, _, r| println!("j = {j:.2}: {} iterations, |F| = {:.2e}", r.iterations, r.final_residual()),
    )?;
    let s = family.with_parameter(target).state(&e)?;
    println!("c0 = {:.6}", s.c0);
    println!("{:>10} {:>14} {:>12}", "x", "E", "c");
    for i in (0..s.x.len()).step_by(10) {
        println!("{:>10.5} {:>14.6} {:>12.6}", s.x[i], s.e[i], s.c[i]);
    }
    Ok(())
}
