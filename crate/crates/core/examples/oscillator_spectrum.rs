//! Discrete oscillator spectrum: eigenvalues N + 1/2 with Kronecker-delta
//! eigenvectors inside the truncation, in fundamental and explicit units.

use phasecell::lattice::TruncatedBasis;
use phasecell::oscillator::{solve_discrete_spectrum, write_spectrum_csv, PhysicalConstants, SpectrumRow};

fn main() -> phasecell::Result<()> {
    let basis = TruncatedBasis::new(64)?;
    let states = solve_discrete_spectrum(basis, &PhysicalConstants::fundamental())?;
    let worst = states
        .iter()
        .filter(|s| s.is_interior())
        .map(|s| (s.eigenvalue() - (s.n() as f64 + 0.5)).abs())
        .fold(0.0, f64::max);
    println!("n_max = 64: max |E_N - (N + 1/2)| over interior levels = {worst:.2e}");
    let top = states.last().expect("nonempty");
    println!("top level N = {} sits at {} (truncation artefact)", top.n(), top.eigenvalue());

    let constants = PhysicalConstants::explicit(2.0, 1.0, 1.0, 3.0)?;
    let rows: Vec<SpectrumRow> = solve_discrete_spectrum(TruncatedBasis::new(8)?, &constants)?
        .into_iter()
        .filter(|s| s.is_interior())
        .map(|s| SpectrumRow {
            representation: "discrete",
            n: s.n(),
            energy: s.energy(),
        })
        .collect();
    println!("hbar = 2, nu = 3:");
    write_spectrum_csv(std::io::stdout(), &rows)?;
    Ok(())
}
