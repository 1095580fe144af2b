use fairdiv::classify::{classify, ClassTag};
use fairdiv::fairness::{is_ef1, is_ef1_chores_form, is_ef1_goods_form};
use fairdiv::fisher::solve_ef1_po;
use fairdiv::gen::{generate, GenSpec};
use fairdiv::io::{allocation_to_json, instance_to_json, parse_allocation, parse_instance};
use fairdiv::mms::{greedy_partition, mms_value_factored};
use fairdiv::oracle::{enumerate_allocations, exact_mms, EnumerationBudget};
use fairdiv::{lift_allocation, order_instance, Allocation, BigInt, Instance, Kind};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Goods), Just(Kind::Chores)]
}

/// A divisibility chain `a, a*s1, a*s1*s2` and a row drawing from it.
fn factored_row() -> impl Strategy<Value = Vec<i64>> {
    (1i64..=3, prop::collection::vec(2i64..=4, 0..3), 0usize..=9).prop_flat_map(|(a, steps, m)| {
        let mut chain = vec![a];
        for s in steps {
            chain.push(chain[chain.len() - 1] * s);
        }
        prop::collection::vec(prop::sample::select(chain), m)
    })
}

proptest! {
    #[test]
    fn greedy_is_exact_on_factored_rows(row in factored_row(), n in 1usize..=4, neg in any::<bool>()) {
        let row: Vec<i64> = if neg { row.iter().map(|v| -v).collect() } else { row };
        let (exact, _) = exact_mms(&row, n, EnumerationBudget::default()).unwrap();
        prop_assert_eq!(mms_value_factored(&row, n).unwrap(), exact);
        let run = greedy_partition(&row, n).unwrap();
        prop_assert_eq!(run.placements.len(), row.len());
    }

    #[test]
    fn market_output_is_ef1(n in 2usize..=4, m in 0usize..=9, p in 2i64..=5, seed in any::<u64>()) {
        let spec = GenSpec::new(ClassTag::Bivalued, Kind::Chores, n, m, seed).with_p(p);
        let inst: Instance<i64> = generate(&spec).unwrap();
        let out = solve_ef1_po(&inst).unwrap();
        prop_assert!(is_ef1(&inst, &out.allocation).unwrap().holds);
        prop_assert!(out.phase3_runs <= n);
    }

    #[test]
    fn generated_instances_keep_their_class(
        class in prop::sample::select(ClassTag::ALL.to_vec()),
        kind in kind(),
        n in 1usize..=4,
        m in 0usize..=9,
        seed in any::<u64>(),
    ) {
        let spec = GenSpec::new(class, kind, n, m, seed);
        let a: Instance<i64> = generate(&spec).unwrap();
        let b: Instance<i64> = generate(&spec).unwrap();
        prop_assert!(classify(&a).contains(class));
        prop_assert_eq!(instance_to_json(&a).to_string(), instance_to_json(&b).to_string());
    }

    #[test]
    fn documents_round_trip(class in prop::sample::select(ClassTag::ALL.to_vec()), kind in kind(), seed in any::<u64>()) {
        let inst: Instance<i64> = generate(&GenSpec::new(class, kind, 3, 4, seed)).unwrap();
        let back: Instance<i64> = parse_instance(&instance_to_json(&inst).to_string()).unwrap();
        prop_assert_eq!(&back, &inst);
        let owners: Vec<usize> = (0..4).map(|r| (seed as usize + r) % 3).collect();
        let alloc = Allocation::from_owners(3, &owners).unwrap();
        let text = allocation_to_json(&inst, &alloc).to_string();
        prop_assert_eq!(parse_allocation(&text, &inst).unwrap(), alloc);
    }

    #[test]
    fn lifting_never_hurts(kind in kind(), seed in any::<u64>()) {
        let inst: Instance<i64> = generate(&GenSpec::new(ClassTag::GeneralAdditive, kind, 2, 5, seed)).unwrap();
        let view = order_instance(&inst);
        for ordered in enumerate_allocations(2, 5, EnumerationBudget::default()).unwrap().take(8) {
            let lifted = lift_allocation(&view, &ordered).unwrap();
            for i in 0..2 {
                // lifting never hurts the agent relative to its ordered bundle
                let before = view.ordered().bundle_value(i, ordered.bundle(i));
                prop_assert!(inst.bundle_value(i, lifted.bundle(i)) >= before);
            }
        }
    }
}

#[test]
fn ef1_forms_agree_with_unified_check() {
    let budget = EnumerationBudget::default();
    for seed in 0..30 {
        for kind in [Kind::Goods, Kind::Chores] {
            let inst: Instance<i64> = generate(&GenSpec::new(ClassTag::GeneralAdditive, kind, 2, 4, seed)).unwrap();
            for alloc in enumerate_allocations(2, 4, budget).unwrap() {
                let unified = is_ef1(&inst, &alloc).unwrap().holds;
                let form = match kind {
                    Kind::Goods => is_ef1_goods_form(&inst, &alloc),
                    Kind::Chores => is_ef1_chores_form(&inst, &alloc),
                }
                .unwrap()
                .holds;
                assert_eq!(unified, form, "seed {seed} {kind:?} {:?}", alloc.bundles());
            }
        }
    }
}

#[test]
fn big_integers_run_the_market() {
    let big = |s: &str| s.parse::<BigInt>().unwrap();
    let rows = vec![
        vec![big("-10000000000000000000000"), big("-30000000000000000000000")],
        vec![big("-30000000000000000000000"), big("-10000000000000000000000")],
    ];
    let inst = Instance::new(Kind::Chores, rows).unwrap();
    let out = solve_ef1_po(&inst).unwrap();
    assert_eq!(out.allocation.bundles(), [vec![0], vec![1]]);
}
