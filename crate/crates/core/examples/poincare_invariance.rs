//! Poincaré generators on a four-axis lattice: Casimir commutators, and a
//! finite translation that is orthogonal and commutes with the
//! Klein-Gordon operator away from the truncation edge.

use num_complex::Complex64;
use phasecell::klein_gordon::assemble_kg_operator_4d;
use phasecell::lattice::{LatticeShape, TruncatedBasis, WaveFunction};
use phasecell::poincare::{
    build_finite_transform, build_generators, check_casimir_commutation, check_kg_invariance_4d, PoincareParams,
};

fn main() -> phasecell::Result<()> {
    let n_max = 5;
    let shape = LatticeShape::uniform(TruncatedBasis::new(n_max)?, 4)?;
    let gens = build_generators(&shape)?;
    for report in check_casimir_commutation(&gens)? {
        println!("{report}");
    }

    let params = PoincareParams::translation([0.05, -0.02, 0.03, 0.04])?;
    let u = build_finite_transform(&gens, &params)?;
    println!("U^T U - I = {:.2e}", u.orthogonality_defect());
    let back = build_finite_transform(&gens, &params.negated())?;
    println!("U(c) U(-c) - I = {:.2e}", u.compose(&back)?.identity_defect());

    let op = assemble_kg_operator_4d(&shape, 1.0)?;
    let centre = n_max as f64 / 2.0;
    let phi = WaveFunction::from_fn(shape.clone(), |n| {
        Complex64::new((-0.5 * n.iter().map(|&k| (k as f64 - centre).powi(2)).sum::<f64>()).exp(), 0.0)
    });
    println!("{}", check_kg_invariance_4d(&op, &gens, &params, &phi)?);
    Ok(())
}
