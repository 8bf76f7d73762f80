//! The same thin-film solve on a grid stretched toward the electrodes,
//! compared with the plain Chebyshev grid at equal size.

use dmjac::newton::{continuation_solve, Continuable, ContinuationSchedule, NewtonConfig};
use dmjac::problems::{ThinFilm, ThinFilmConfig};

fn solve(beta: Option<f64>) -> dmjac::Result<(f64, f64)> {
    let family = ThinFilm::new(ThinFilmConfig {
        n: 60,
        j: 0.5,
        beta,
        ..Default::default()
    })?;
    let sched = ContinuationSchedule::new("j", 0.5, 0.1, 1.5);
    let (e, _) = continuation_solve(&family, &sched, &family.initial_iterate(), &NewtonConfig::default())
        .map_err(|e| dmjac::Error::InvalidArgument(e.to_string()))?;
    let s = family.with_parameter(1.5).state(&e)?;
    let min = s.e.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((s.c0, min))
}

fn main() -> dmjac::Result<()> {
    for beta in [None, Some(0.5), Some(0.75), Some(0.9)] {
        let (c0, min) = solve(beta)?;
        println!("beta {:>5}: c0 = {c0:.10}, min E = {min:.6}", beta.map_or("-".into(), |b| b.to_string()));
    }
    Ok(())
}
