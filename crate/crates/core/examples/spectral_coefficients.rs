//! Chebyshev coefficient decay of the thin-film solution, plain grid against
//! the stretched one.

use dmjac::newton::{continuation_solve, ContinuationSchedule, NewtonConfig};
use dmjac::problems::{ThinFilm, ThinFilmConfig};

fn decay(beta: Option<f64>, j: f64) -> Result<Vec<f64>, Box<dyn std::error::Error>> {
    let p = ThinFilm::new(ThinFilmConfig {
        n: 250,
        j: 0.5,
        beta,
        ..Default::default()
    })?;
    let sched = ContinuationSchedule::new("j", 0.5, 0.1, j);
    let (e, _) = continuation_solve(&p, &sched, &p.initial_iterate(), &NewtonConfig::default())?;
    Ok(p.coefficients(&e)?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (j, beta) in [(0.5, 0.9), (1.0, 0.9), (1.5, 0.75)] {
        let plain = decay(None, j)?;
        let mapped = decay(Some(beta), j)?;
        let first = |a: &[f64]| a.iter().position(|v| *v < 1e-10);
        println!("j = {j}: |a_n| < 1e-10 from n = {:?} (plain), {:?} (beta = {beta})", first(&plain), first(&mapped));
        for n in (0..plain.len()).step_by(25) {
            println!("  n {n:>3}: {:>10.3e} {:>10.3e}", plain[n], mapped[n]);
        }
    }
    Ok(())
}
