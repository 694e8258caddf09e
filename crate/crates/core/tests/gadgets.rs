use popaug::augment::{exact_augmentation, verify_plan, SearchLimits};
use popaug::oracle::{self, OracleLimits};
use popaug::reductions::{
    assignment_to_plan, follows_master_list, gen_augmentation, gen_inapprox, gen_perfect_aug, gen_popular_instance,
    solve_1in3, GadgetPlan, SatInstance,
};

fn unsatisfiable() -> SatInstance {
    SatInstance::new(4, vec![[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).unwrap()
}

fn exact_cost(sat_gadget: &popaug::reductions::Gadget, perfect: bool, max_states: usize) -> u64 {
    exact_augmentation(&sat_gadget.instance, perfect, &SearchLimits { max_states })
        .unwrap()
        .expect("a plan exists")
        .total_cost
}

#[test]
fn popular_instance_gadget_single_clause_costs_14() {
    let sat = SatInstance::new(3, vec![[1, 2, 3]]).unwrap();
    let g = gen_popular_instance(&sat);
    assert!(follows_master_list(&g.instance, &g.master_list));
    let (_, cost) = oracle::brute_min_cost_popular_instance(&g.instance, &OracleLimits::gadget())
        .unwrap()
        .unwrap();
    assert_eq!(cost, 14);
    let a = solve_1in3(&sat).unwrap().unwrap();
    let GadgetPlan::Copies { copies, cost } = assignment_to_plan(&sat, &g, &a).unwrap() else {
        panic!("popular-instance gadget yields a copy vector");
    };
    assert_eq!(cost, 14);
    assert!(oracle::admits_complete_popular(&g.instance, &copies, &OracleLimits::gadget()).unwrap());
}

#[test]
fn augmentation_gadget_cost_tracks_satisfiability() {
    let sat = SatInstance::new(5, vec![[1, 2, 3], [1, 4, 5]]).unwrap();
    let g = gen_augmentation(&sat);
    assert_eq!(exact_cost(&g, false, 1_000_000), 2);
    let a = solve_1in3(&sat).unwrap().unwrap();
    let GadgetPlan::Augment(plan) = assignment_to_plan(&sat, &g, &a).unwrap() else {
        panic!("augmentation gadget yields a plan");
    };
    assert_eq!(plan.total_cost, 2);
    assert!(verify_plan(&g.instance, &plan, false));

    let unsat = unsatisfiable();
    assert!(solve_1in3(&unsat).unwrap().is_none());
    assert!(exact_cost(&gen_augmentation(&unsat), false, 1_000_000) > 4);
}

#[test]
fn perfect_gadget_costs_four_per_clause_when_satisfiable() {
    let one = SatInstance::new(3, vec![[1, 2, 3]]).unwrap();
    assert_eq!(exact_cost(&gen_perfect_aug(&one, 1).unwrap(), true, 1_000_000), 4);
    for clauses in [vec![[1, 2, 3], [1, 4, 5]], vec![[1, 2, 3], [4, 5, 6]]] {
        let sat = SatInstance::new(6, clauses).unwrap();
        let g = gen_perfect_aug(&sat, 2).unwrap();
        assert_eq!(exact_cost(&g, true, 1_000_000), 8);
        let a = solve_1in3(&sat).unwrap().unwrap();
        let GadgetPlan::Augment(plan) = assignment_to_plan(&sat, &g, &a).unwrap() else {
            panic!("perfect gadget yields a plan");
        };
        assert!(verify_plan(&g.instance, &plan, true));
    }
}

#[test]
fn perfect_gadget_unsatisfiable_costs_more() {
    let g = gen_perfect_aug(&unsatisfiable(), 4).unwrap();
    assert!(exact_cost(&g, true, 20_000_000) > 16);
}

#[test]
fn inapprox_gadget_separates_satisfiable_from_unsatisfiable() {
    let one = SatInstance::new(3, vec![[1, 2, 3]]).unwrap();
    assert_eq!(gen_inapprox(&one, 2, 4).unwrap().instance.num_people(), 3 + 3 * 2 + 3);

    let sat = SatInstance::new(5, vec![[1, 2, 3], [1, 4, 5]]).unwrap();
    assert_eq!(exact_cost(&gen_inapprox(&sat, 9, 8).unwrap(), false, 1_000_000), 2);

    let g = gen_inapprox(&unsatisfiable(), 6, 5).unwrap();
    assert!(exact_cost(&g, false, 1_000_000) > 5);
}
