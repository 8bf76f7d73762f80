//! Analytical against central-difference Jacobians for every registered
//! problem, reported block by block.

use dmjac::fdjac::{compare_blocks, fd_jacobian, FdConfig};
use dmjac::newton::ProblemDef;
use dmjac::problems::{
    AnyProblem, Colloid, ColloidConfig, Pnp1d, PnpConfig, ThinFilm, ThinFilmConfig,
};

fn main() -> dmjac::Result<()> {
    let problems = [
        AnyProblem::ThinFilm(ThinFilm::new(ThinFilmConfig {
            n: 50,
            j: 1.2,
            ..Default::default()
        })?),
        AnyProblem::ThinFilm(ThinFilm::new(ThinFilmConfig {
            n: 50,
            j: 1.2,
            beta: Some(0.75),
            ..Default::default()
        })?),
        AnyProblem::Colloid(Colloid::new(ColloidConfig {
            n_r: 10,
            n_t: 8,
            e_applied: 3.0,
            ..Default::default()
        })?),
        AnyProblem::Pnp1d(Pnp1d::perturbed(PnpConfig::default(), 0.2)?),
    ];
    for p in &problems {
        println!("{} (dim {})", p.name(), p.dim());
        for (k, u) in p.test_states().iter().enumerate() {
            let analytic = p.jacobian(u)?;
            let numeric = fd_jacobian(&|v: &[f64]| p.residual(v), u, &FdConfig::central())?;
            let blocks = compare_blocks(&analytic, &numeric, &p.row_blocks(), &p.col_blocks())?;
            let worst = blocks
                .iter()
                .max_by(|a, b| a.comparison.max_rel_error.total_cmp(&b.comparison.max_rel_error))
                .expect("at least one block");
            println!(
                "  state {k}: worst block d{}/d{} error {:.2e}",
                worst.row_block, worst.col_block, worst.comparison.max_rel_error
            );
        }
    }
    Ok(())
}
