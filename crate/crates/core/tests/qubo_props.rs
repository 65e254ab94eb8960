mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use qroute::network::CostMode;
use qroute::qubo::{
    assemble, auto_penalty, build_constraint_terms, build_cost_terms, compile, cost_upper_bound, spins_of,
    BinaryAssignment, VarMap,
};
use qroute::routes::{generate_routes, CandidateRoute, RoutePlan};
use qroute::samplers::solve_exhaustive;

use common::*;

/// Random plans over up to 6 segments: `n` vehicles, `k` options, each
/// route a nonempty segment subset with an integer weight.
fn plan_strategy() -> impl Strategy<Value = RoutePlan> {
    (1usize..4, 1usize..4, 1usize..7).prop_flat_map(|(n, k, segs)| {
        let route = (prop::collection::btree_set(0..segs, 1..=segs), 1u8..9);
        prop::collection::vec(route, n * k).prop_map(move |raw| {
            let routes = raw
                .into_iter()
                .enumerate()
                .map(|(idx, (set, w))| CandidateRoute {
                    vehicle: idx / k,
                    option: idx % k,
                    segments: set.into_iter().collect(),
                    weight: f64::from(w),
                })
                .collect();
            RoutePlan::from_routes(n, k, segs, routes).unwrap()
        })
    })
}

fn mode_strategy() -> impl Strategy<Value = CostMode> {
    prop_oneof![Just(CostMode::Weighted), Just(CostMode::Density)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cost_terms_match_direct_sum(plan in plan_strategy(), mode in mode_strategy()) {
        let cost = build_cost_terms(&plan, mode);
        for x in all_assignments(plan.n_vehicles() * plan.k()) {
            let got = cost.energy(&x).unwrap();
            prop_assert!(close(got, direct_cost(&plan, &x, mode), 1e-9));
        }
    }

    #[test]
    fn feasible_energy_ignores_penalty(plan in plan_strategy(), mode in mode_strategy(), k_pen in 0.5f64..50.0) {
        let a = compile(&plan, mode, Some(k_pen)).unwrap();
        let b = compile(&plan, mode, Some(2.0 * k_pen)).unwrap();
        for x in all_assignments(a.n_vars()) {
            let (ea, eb) = (a.energy(&x).unwrap(), b.energy(&x).unwrap());
            let pen = direct_penalty(plan.n_vehicles(), plan.k(), &x);
            if pen == 0 {
                prop_assert!(close(ea, eb, 1e-9));
                prop_assert!(close(ea, direct_cost(&plan, &x, mode), 1e-9));
            } else {
                // Penalty is a nonnegative integer, so infeasible states pay at least K.
                prop_assert!(pen >= 1);
                prop_assert!(close(eb - ea, k_pen * pen as f64, 1e-9));
            }
        }
    }

    #[test]
    fn unit_weights_make_modes_agree(plan in plan_strategy()) {
        let unit = plan.with_uniform_weight(1.0);
        let w = build_cost_terms(&unit, CostMode::Weighted);
        let d = build_cost_terms(&plan, CostMode::Density);
        prop_assert_eq!(w.coefficients, d.coefficients);
    }

    #[test]
    fn compiled_matrix_is_upper_triangular(plan in plan_strategy(), mode in mode_strategy()) {
        let p = compile(&plan, mode, None).unwrap();
        for (&(a, b), &q) in p.coefficients() {
            prop_assert!(a <= b && b < p.n_vars());
            prop_assert!(q != 0.0);
        }
    }

    #[test]
    fn sparse_energy_matches_dense(plan in plan_strategy(), mode in mode_strategy(), word in any::<u64>()) {
        let p = compile(&plan, mode, None).unwrap();
        let x = BinaryAssignment::from_word(word & ((1 << p.n_vars()) - 1), p.n_vars());
        prop_assert!(close(p.energy(&x).unwrap(), dense_energy(&p, &x), 1e-9));
    }

    #[test]
    fn ising_energy_matches(plan in plan_strategy(), mode in mode_strategy(), word in any::<u64>()) {
        let p = compile(&plan, mode, None).unwrap();
        let ising = p.to_ising();
        let x = BinaryAssignment::from_word(word & ((1 << p.n_vars()) - 1), p.n_vars());
        prop_assert!(close(p.energy(&x).unwrap(), ising.energy(&spins_of(&x)), 1e-9));
    }

    #[test]
    fn auto_penalty_ground_state_is_feasible(plan in plan_strategy(), mode in mode_strategy()) {
        let k = auto_penalty(&plan, mode);
        prop_assert!(k >= 1.0);
        prop_assert!(k <= 1.0 + cost_upper_bound(&plan, mode));
        let p = compile(&plan, mode, None).unwrap();
        prop_assert_eq!(p.penalty(), k);
        let set = solve_exhaustive(&p).unwrap();
        let best = set.lowest().unwrap();
        prop_assert!(is_one_hot(plan.n_vehicles(), plan.k(), &best.bits));
        prop_assert!(close(best.energy, feasible_minimum(&p, plan.n_vehicles(), plan.k()), 1e-9));
        // Every minimum, not just the reported first one, is feasible.
        for r in set.records.iter().filter(|r| close(r.energy, best.energy, 1e-9)) {
            prop_assert!(is_one_hot(plan.n_vehicles(), plan.k(), &r.bits));
        }
    }
}

#[test]
fn constraint_partial_is_exact_for_small_fleets() {
    for n in 1..=4 {
        let terms = build_constraint_terms(n, 3);
        for x in all_assignments(3 * n) {
            assert_eq!(terms.energy(&x).unwrap(), direct_penalty(n, 3, &x) as f64);
        }
    }
}

#[test]
fn assemble_is_linear_in_penalty() {
    let plan = generate_routes(&bundled("fig1")).unwrap();
    let cost = build_cost_terms(&plan, CostMode::Weighted);
    let cons = build_constraint_terms(4, 3);
    let p = assemble(&cost, &cons, 7.5).unwrap();
    assert_eq!(p.offset(), 7.5 * 4.0);
    for x in all_assignments(12).step_by(37) {
        let expected = cost.energy(&x).unwrap() + 7.5 * cons.energy(&x).unwrap();
        assert_relative_eq!(p.energy(&x).unwrap(), expected, max_relative = 1e-12);
    }
}

#[test]
fn bundled_dimensions() {
    for (name, n) in [("fig1_n3", 9), ("fig1", 12), ("fig1_n5", 15)] {
        let s = bundled(name);
        let p = compile(&generate_routes(&s).unwrap(), s.cost_mode, None).unwrap();
        assert_eq!(p.n_vars(), n);
        assert_eq!(p.var_map(), VarMap::new(n / 3, 3));
    }
}
