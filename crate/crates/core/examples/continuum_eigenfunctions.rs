//! Continuum eigenfunctions in the position and y representations: Rayleigh
//! energies, orthonormality by quadrature, the wave-equation residual in y,
//! and a tabulated eigenfunction.

use phasecell::oscillator::{
    continuum_eigenstate_q, continuum_eigenstate_y, linspace, overlap_q, write_eigenfunction_csv,
    PhysicalConstants,
};
use phasecell::quadrature::AdaptiveConfig;

fn main() -> phasecell::Result<()> {
    let f = PhysicalConstants::fundamental();
    let quad = AdaptiveConfig::default();
    println!(" N   E(position)        E(y)");
    for n in 0..=6 {
        let q = continuum_eigenstate_q(n, &f)?.rayleigh_energy(quad)?;
        let y = continuum_eigenstate_y(n, &f)?.rayleigh_energy(quad)?;
        println!("{n:2}   {q:.14}   {y:.14}");
    }

    let a = continuum_eigenstate_q(3, &f)?;
    let b = continuum_eigenstate_q(5, &f)?;
    println!("<psi_3, psi_3> = {:.12}", overlap_q(&a, &a, quad)?);
    println!("<psi_3, psi_5> = {:.2e}", overlap_q(&a, &b, quad)?);

    let state = continuum_eigenstate_y(7, &f)?;
    let residual = linspace(0.1, 8.0, 200)
        .into_iter()
        .map(|y| state.y_ode_residual(y, 1e-3).map(f64::abs))
        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))?;
    println!("y wave equation, N = 7: max residual on [0.1, 8] = {residual:.2e}");

    let wide = PhysicalConstants::explicit(1.0, 1.0, 2.0, 1.0)?;
    let states = [continuum_eigenstate_q(2, &wide)?];
    let mut csv = Vec::new();
    write_eigenfunction_csv(&mut csv, &states, &linspace(-5.0, 5.0, 11))?;
    print!("psi_2 at l = 2:\n{}", String::from_utf8_lossy(&csv));
    Ok(())
}
