//! First-order boost and rotation invariance of the (3+1) equation: for an
//! exact normal-mode solution the residual of φ + εGφ grows like ε², and a
//! small spatial rotation keeps the residual at its original level.

use phasecell::klein_gordon::eigenmode_history;
use phasecell::lattice::{LatticeShape, TruncatedBasis};
use phasecell::poincare::{
    check_boost_invariance_3plus1, check_rotation_invariance_3plus1, BoostCheckConfig, PoincareParams,
    PositionConvention, CASIMIR_MARGIN,
};

fn main() -> phasecell::Result<()> {
    let shape = LatticeShape::uniform(TruncatedBasis::new(6)?, 3)?;
    let history = eigenmode_history(&shape, 1.0, [3, 1, 0], -1.0, 0.01, 201)?;
    let boost = PoincareParams::zero().with_omega(0, 3, 1.0)?;

    for convention in [PositionConvention::MetricWeighted, PositionConvention::Unweighted] {
        let config = BoostCheckConfig {
            convention,
            ..BoostCheckConfig::default()
        };
        let report = check_boost_invariance_3plus1(&history, &boost, &config)?;
        println!(
            "{convention:?}: growth {:?}, slope {:.4}, pass {}",
            report.growth.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>(),
            report.slope.unwrap_or(f64::NAN),
            report.pass
        );
    }

    let rotation = PoincareParams::zero().with_omega(0, 1, 0.05)?.with_omega(1, 2, -0.03)?;
    let short = eigenmode_history(&shape, 1.0, [2, 1, 0], 0.0, 0.01, 21)?;
    println!("{}", check_rotation_invariance_3plus1(&short, &rotation, CASIMIR_MARGIN)?);
    Ok(())
}
