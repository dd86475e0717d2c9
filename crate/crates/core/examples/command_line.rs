//! The `frakpascal` subcommands called as library functions.
//!
//!     cargo run --example command_line
//!
//! The same runs from a shell:
//!
//!     frakpascal matrix --which phat --tau 0.5 --n 4
//!     echo "1 0 0 0" | frakpascal transform --tau 1 --n 4
//!     frakpascal verify parallelogram --p 1 --format json

use frakpascal::cli::{self, Format, MatrixKind, RunConfig, Suite};

fn main() -> Result<(), cli::CliError> {
    let config = RunConfig::new("0.5", 4)?;
    print!("{}", cli::cmd_matrix(&config, MatrixKind::Phat)?);

    let mut exact = RunConfig::new("1/3", 4)?;
    exact.precision = cli::Precision::ExactWherePossible;
    exact.format = Format::Json;
    print!("{}", cli::cmd_matrix(&exact, MatrixKind::PhatInv)?);

    let config = RunConfig::new("0.5", 32)?;
    let outcome = cli::cmd_verify(&config, Suite::Identity, true)?;
    print!("{}", outcome.text);
    println!("passed: {}", outcome.passed);
    Ok(())
}
