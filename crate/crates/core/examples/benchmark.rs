//! Direct matrix Jacobians against forward differences over a size sweep.
//!
//! `cargo run --release --example benchmark`

use dmjac::cli::{loglog_slope, time_jacobians};
use dmjac::problems::{ThinFilm, ThinFilmConfig};

fn main() -> dmjac::Result<()> {
    let sizes = [50, 100, 200, 400];
    let mut direct = Vec::new();
    let mut fd = Vec::new();
    println!("{:>6} {:>12} {:>12} {:>8}", "n", "direct [s]", "fd [s]", "ratio");
    for &n in &sizes {
        let p = ThinFilm::new(ThinFilmConfig {
            n,
            ..Default::default()
        })?;
        let (d, f) = time_jacobians(&p, &p.initial_iterate(), 5)?;
        let (d, f) = (d.as_secs_f64(), f.as_secs_f64());
        println!("{n:>6} {d:>12.3e} {f:>12.3e} {:>8.1}", f / d);
        direct.push(d);
        fd.push(f);
    }
    let x: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    if let (Some(a), Some(b)) = (loglog_slope(&x, &direct), loglog_slope(&x, &fd)) {
        println!("log-log slopes: direct {a:.2}, finite differences {b:.2}");
    }
    Ok(())
}
