use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use groupfair::fairness::Criterion;
use groupfair::format::{parse_instance, serialize_instance};
use groupfair::model::ratio;
use groupfair::oracles::{exists_h, max_h};
use groupfair::protocols::{self, Trace};
use groupfair::random;
use groupfair::{Agent, Instance, Valuation};

fn small_binary(seed: u64, k: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=7);
    random::binary_instance(&mut rng, k, m, 5).unwrap()
}

/// Every agent keeps only its `c` lowest-index desired goods.
fn truncated(inst: &Instance, c: usize) -> Instance {
    let groups = inst
        .groups()
        .iter()
        .map(|agents| {
            agents
                .iter()
                .map(|a| {
                    let desired = a.valuation.desired().unwrap();
                    Agent::new(a.id.clone(), Valuation::binary(desired.iter().take(c)))
                })
                .collect()
        })
        .collect();
    Instance::new(inst.goods().to_vec(), groups).unwrap()
}

fn pick_order(trace: &Trace) -> Vec<usize> {
    match trace {
        Trace::Picks { turns, .. } => turns.iter().map(|t| t.pick).collect(),
        other => panic!("unexpected trace {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_dominates_voting(seed in any::<u64>(), c in 1usize..=3) {
        let inst = small_binary(seed, 2);
        let criterion = Criterion::OneOfBest(c);
        let run = protocols::rwav2(&inst, std::slice::from_ref(&criterion), 0).unwrap();
        let best = max_h(&inst, std::slice::from_ref(&criterion)).unwrap();
        prop_assert!(best.best_h >= run.report.h());
        let report = groupfair::fairness::democratic_report(&inst, &best.witness, &criterion).unwrap();
        prop_assert_eq!(report.h(), best.best_h.clone());
    }

    #[test]
    fn exists_agrees_with_max(seed in any::<u64>()) {
        let inst = small_binary(seed, 2);
        let criteria = [Criterion::PositiveMms];
        let best = max_h(&inst, &criteria).unwrap().best_h;
        let at = exists_h(&inst, &criteria, &best).unwrap();
        prop_assert!(at.exists && at.witness.is_some());
        let above = exists_h(&inst, &criteria, &(best + ratio(1, 1000))).unwrap();
        prop_assert!(!above.exists);
    }

    #[test]
    fn two_group_rwavk_matches_rwav2(seed in any::<u64>(), c in 1usize..=4) {
        let inst = truncated(&small_binary(seed, 2), c);
        let two = protocols::rwav2(&inst, &[Criterion::OneOfBest(c)], 0).unwrap();
        let many = protocols::rwavk(&inst, c).unwrap();
        prop_assert_eq!(pick_order(&two.trace), pick_order(&many.trace));
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = match rng.gen_range(0..3) {
            0 => random::binary_instance(&mut rng, 3, 6, 4).unwrap(),
            1 => random::additive_instance(&mut rng, 2, 5, 4, 9).unwrap(),
            _ => random::tabular_instance(&mut rng, 2, 3, 2).unwrap(),
        };
        let back = parse_instance(&serialize_instance(&inst)).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn protocols_allocate_every_good(seed in any::<u64>(), k in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(0..=8);
        let inst = random::additive_instance(&mut rng, k, m, 4, 5).unwrap();
        for run in [protocols::linek(&inst).unwrap(), protocols::best_k_protocol(&inst).unwrap()] {
            prop_assert_eq!(run.allocation.m(), m);
            prop_assert!(run.shortfalls(1e-9).is_empty());
        }
    }
}

#[test]
fn oracle_ignores_worker_count() {
    let inst = small_binary(11, 3);
    let criteria = [Criterion::PositiveMms];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| max_h(&inst, &criteria).unwrap())
    };
    let one = run(1);
    for threads in [2, 4, 7] {
        assert_eq!(run(threads), one);
    }
}
