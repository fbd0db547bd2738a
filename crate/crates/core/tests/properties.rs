use num_complex::Complex64;
use phasecell::klein_gordon::{KGState, Leapfrog};
use phasecell::lattice::{
    build_delta, build_delta_circ, build_delta_prime, build_delta_sharp, commutator, lift_to_axis,
    LatticeOperator, LatticeShape, TruncatedBasis, WaveFunction,
};
use proptest::prelude::*;

fn field(shape: &LatticeShape, values: &[f64]) -> WaveFunction {
    WaveFunction::from_real(shape.clone(), &values[..shape.dim()]).unwrap()
}

fn operators(basis: TruncatedBasis) -> [LatticeOperator; 4] {
    [
        build_delta(basis),
        build_delta_prime(basis),
        build_delta_circ(basis),
        build_delta_sharp(basis),
    ]
}

proptest! {
    #[test]
    fn difference_operators_are_linear(
        n_max in 2usize..24,
        xs in prop::collection::vec(-10.0f64..10.0, 25),
        ys in prop::collection::vec(-10.0f64..10.0, 25),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let basis = TruncatedBasis::new(n_max).unwrap();
        let shape = LatticeShape::single(basis);
        let (x, y) = (field(&shape, &xs), field(&shape, &ys));
        let (ca, cb) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
        for op in operators(basis) {
            let lhs = op.apply(&x.combine(ca, &y, cb).unwrap()).unwrap();
            let rhs = op.apply(&x).unwrap().combine(ca, &op.apply(&y).unwrap(), cb).unwrap();
            prop_assert!((&lhs - &rhs).max_abs() < 1e-11);
        }
    }

    #[test]
    fn weighted_differences_have_fixed_parity(n_max in 2usize..40) {
        let basis = TruncatedBasis::new(n_max).unwrap();
        prop_assert!(build_delta_circ(basis).is_real_symmetric(0.0));
        prop_assert!(build_delta_sharp(basis).is_real_antisymmetric(0.0));
        // forward and backward differences are negative transposes
        let d = build_delta(basis);
        let dp = build_delta_prime(basis);
        let interior = d.transpose().scale_real(-1.0).try_sub(&dp).unwrap().interior_max_abs(1);
        prop_assert_eq!(interior, 0.0);
    }

    #[test]
    fn commutator_is_identity_inside(n_max in 3usize..40) {
        let basis = TruncatedBasis::new(n_max).unwrap();
        let c = commutator(&build_delta_sharp(basis), &build_delta_circ(basis)).unwrap();
        let defect = c.try_sub(&LatticeOperator::identity(LatticeShape::single(basis))).unwrap();
        prop_assert!(defect.interior_max_abs(2) <= 8.0 * f64::EPSILON * n_max as f64);
    }

    #[test]
    fn lifts_on_distinct_axes_commute(n_max in 2usize..6, i in 0usize..3, j in 0usize..3, pick in 0usize..4) {
        prop_assume!(i != j);
        let basis = TruncatedBasis::new(n_max).unwrap();
        let ops = operators(basis);
        let a = lift_to_axis(&ops[pick], i, 3).unwrap();
        let b = lift_to_axis(&ops[(pick + 1) % 4], j, 3).unwrap();
        prop_assert_eq!(commutator(&a, &b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn leapfrog_is_linear_and_reversible(
        xs in prop::collection::vec(-1.0f64..1.0, 64),
        vs in prop::collection::vec(-1.0f64..1.0, 64),
        steps in 1usize..60,
        mass in 0.0f64..2.0,
    ) {
        let shape = LatticeShape::uniform(TruncatedBasis::new(3).unwrap(), 3).unwrap();
        let leapfrog = Leapfrog::new(&shape, mass).unwrap();
        let dt = 0.5 * leapfrog.stability_limit();
        let state = KGState::new(field(&shape, &xs), field(&shape, &vs), 0.0, mass).unwrap();
        let forward = leapfrog.evolve(&state, dt, steps).unwrap();
        let back = leapfrog.evolve(&forward, -dt, steps).unwrap();
        prop_assert!((back.phi() - state.phi()).max_abs() < 1e-10);
        prop_assert!((back.phi_dot() - state.phi_dot()).max_abs() < 1e-10);

        let two = Complex64::new(2.0, 0.0);
        let doubled = KGState::new(state.phi().scaled(two), state.phi_dot().scaled(two), 0.0, mass).unwrap();
        let evolved = leapfrog.evolve(&doubled, dt, steps).unwrap();
        prop_assert!((evolved.phi() - &forward.phi().scaled(two)).max_abs() < 1e-10);
    }

    #[test]
    fn leapfrog_conserves_modified_energy(
        xs in prop::collection::vec(-1.0f64..1.0, 64),
        steps in 1usize..200,
    ) {
        let shape = LatticeShape::uniform(TruncatedBasis::new(3).unwrap(), 3).unwrap();
        let leapfrog = Leapfrog::new(&shape, 1.0).unwrap();
        let dt = 0.3 * leapfrog.stability_limit();
        let state = KGState::at_rest(field(&shape, &xs), 1.0).unwrap();
        let end = leapfrog.evolve(&state, dt, steps).unwrap();
        let e0 = state.modified_energy(leapfrog.generator(), dt).unwrap();
        let e1 = end.modified_energy(leapfrog.generator(), dt).unwrap();
        prop_assert!((e1 - e0).abs() <= 1e-12 * e0.abs());
    }
}
