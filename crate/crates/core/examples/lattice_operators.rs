//! The four difference operators on a small truncated lattice, their
//! commutator, and a tensor-product lift onto a three-axis lattice.

use phasecell::lattice::{
    build_delta, build_delta_circ, build_delta_prime, build_delta_sharp, commutator, lift_to_axis,
    LatticeOperator, LatticeShape, TruncatedBasis, WaveFunction,
};

fn main() -> phasecell::Result<()> {
    let basis = TruncatedBasis::new(6)?;
    let shape = LatticeShape::single(basis);
    let delta2 = WaveFunction::delta(shape.clone(), &[2])?;

    for (name, op) in [
        ("forward", build_delta(basis)),
        ("backward", build_delta_prime(basis)),
        ("circ", build_delta_circ(basis)),
        ("sharp", build_delta_sharp(basis)),
    ] {
        let image: Vec<String> = op.apply(&delta2)?.amplitudes().iter().map(|z| format!("{:+.4}", z.re)).collect();
        println!("{name:>8} applied to delta_2: [{}]", image.join(", "));
    }

    let c = commutator(&build_delta_sharp(basis), &build_delta_circ(basis))?;
    let defect = c.try_sub(&LatticeOperator::identity(shape))?;
    println!(
        "[sharp, circ] - I: interior {:.2e}, full {:.2e} (the top row carries the truncation)",
        defect.interior_max_abs(basis.interior_margin()),
        defect.max_abs()
    );

    let lifted = lift_to_axis(&build_delta_sharp(basis), 1, 3)?;
    println!("sharp lifted onto axis 1 of a 7^3 lattice: dim {}, {} nonzeros", lifted.dim(), lifted.nnz());

    let mut text = Vec::new();
    build_delta_sharp(TruncatedBasis::new(2)?).write_text(&mut text)?;
    print!("text form of sharp at n_max = 2:\n{}", String::from_utf8_lossy(&text));
    Ok(())
}
