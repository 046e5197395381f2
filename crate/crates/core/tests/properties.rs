use dembed::grid::{constant_lift, sigma, DiscreteFunction, Support, TimeGrid};
use dembed::lifts::{iota1, iota2, iota3, pi_project};
use dembed::operators::{delta, j_delta, nabla, OperatorKind};
use dembed::variational::{action_delta, action_marsden_west, Lagrangian};
use proptest::prelude::*;

fn grid_and_values(block: usize) -> impl Strategy<Value = (TimeGrid, Vec<f64>)> {
    (1usize..=20, -2.0f64..2.0, 0.05f64..1.0).prop_flat_map(move |(blocks, a, h)| {
        let n = blocks * block;
        (Just(TimeGrid::with_step(a, h, n).unwrap()), prop::collection::vec(-10.0f64..10.0, n + 1))
    })
}

proptest! {
    #[test]
    fn every_operator_matches_its_pipeline((g, v) in grid_and_values(6), which in 0usize..8) {
        let kind = OperatorKind::ALL[which];
        let full = DiscreteFunction::scalar(g, Support::Full, v).unwrap();
        let f = match kind.input_support() {
            Support::Full => full,
            s => full.restrict(s).unwrap(),
        };
        let closed = kind.apply(&f).unwrap();
        let piped = kind.apply_pipeline(&f).unwrap();
        prop_assert!(closed.close_to(&piped, 1e-12), "{kind:?}");
    }

    #[test]
    fn lifts_interpolate((g, v) in grid_and_values(6)) {
        let f = DiscreteFunction::scalar(g, Support::Full, v).unwrap();
        for p in [iota1(&f).unwrap(), iota2(&f).unwrap(), iota3(&f).unwrap()] {
            prop_assert!(pi_project(&p).close_to(&f, 1e-12));
        }
    }

    #[test]
    fn summing_differences_telescopes((g, v) in grid_and_values(1)) {
        let f = DiscreteFunction::scalar(g, Support::Full, v).unwrap();
        let back = j_delta(&delta(&f).unwrap()).unwrap();
        let n = g.steps();
        prop_assert!((back.scalar_at(n) - (f.scalar_at(n) - f.scalar_at(0))).abs() <= 1e-12 * (1.0 + f.sup_norm()));
        prop_assert_eq!(nabla(&f).unwrap(), sigma(&delta(&f).unwrap()).unwrap());
    }

    #[test]
    fn delta_annihilates_constants(c in -1e3f64..1e3, n in 1usize..50) {
        let g = TimeGrid::new(0.0, 1.0, n).unwrap();
        prop_assert_eq!(delta(&constant_lift(&[c], &g)).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn two_action_formulas_agree((g, v) in grid_and_values(1), k in 0.1f64..3.0) {
        let lag = Lagrangian::new(1, move |t, x, v| 0.5 * v[0] * v[0] - 0.5 * k * x[0] * x[0] + t * x[0]);
        let x = DiscreteFunction::scalar(g, Support::Full, v).unwrap();
        let a = action_delta(&lag, &x).unwrap();
        let b = action_marsden_west(&lag, &x).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
    }
}
