//! Seeded random instances and allocations for property runs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::model::{int, Agent, Allocation, Bundle, Instance, Rational, Valuation};

/// `a`..`z` for up to 26 goods, `g1`, `g2`, ... beyond.
pub fn good_labels(m: usize) -> Vec<String> {
    if m <= 26 {
        (0..m).map(|i| char::from(b'a' + i as u8).to_string()).collect()
    } else {
        (1..=m).map(|i| format!("g{i}")).collect()
    }
}

fn build(m: usize, groups: Vec<Vec<Valuation>>) -> Result<Instance> {
    let groups = groups
        .into_iter()
        .enumerate()
        .map(|(g, members)| {
            members
                .into_iter()
                .enumerate()
                .map(|(j, v)| Agent::new(format!("{}.{}", g + 1, j + 1), v))
                .collect()
        })
        .collect();
    Instance::new(good_labels(m), groups)
}

fn sizes<R: Rng>(rng: &mut R, k: usize, n_max: usize) -> Vec<usize> {
    (0..k).map(|_| rng.gen_range(1..=n_max)).collect()
}

pub fn random_bundle<R: Rng>(rng: &mut R, m: usize) -> Bundle {
    Bundle::from_bits(rng.gen::<u64>() & Bundle::full(m).bits())
}

/// Binary agents, each good desired with probability one half.
pub fn binary_instance<R: Rng>(rng: &mut R, k: usize, m: usize, n_max: usize) -> Result<Instance> {
    let groups = sizes(rng, k, n_max)
        .into_iter()
        .map(|n| {
            (0..n)
                .map(|_| Valuation::Binary {
                    desired: random_bundle(rng, m),
                })
                .collect()
        })
        .collect();
    build(m, groups)
}

/// Binary agents wanting exactly `r` goods each.
pub fn uniform_binary_instance<R: Rng>(rng: &mut R, k: usize, m: usize, n_max: usize, r: usize) -> Result<Instance> {
    let goods: Vec<usize> = (0..m).collect();
    let groups = sizes(rng, k, n_max)
        .into_iter()
        .map(|n| {
            (0..n)
                .map(|_| Valuation::binary(goods.choose_multiple(rng, r).copied()))
                .collect()
        })
        .collect();
    build(m, groups)
}

/// Two groups holding the same multiset of binary agents in different orders.
pub fn identical_binary_instance<R: Rng>(rng: &mut R, m: usize, n_max: usize) -> Result<Instance> {
    let n = rng.gen_range(1..=n_max);
    let first: Vec<Valuation> = (0..n)
        .map(|_| Valuation::Binary {
            desired: random_bundle(rng, m),
        })
        .collect();
    let mut second = first.clone();
    second.shuffle(rng);
    build(m, vec![first, second])
}

/// Additive agents with integer values in `0..=max_value`.
pub fn additive_instance<R: Rng>(rng: &mut R, k: usize, m: usize, n_max: usize, max_value: i64) -> Result<Instance> {
    let groups = sizes(rng, k, n_max)
        .into_iter()
        .map(|n| {
            (0..n)
                .map(|_| Valuation::additive((0..m).map(|_| rng.gen_range(0..=max_value))))
                .collect()
        })
        .collect();
    build(m, groups)
}

/// A monotone set function: each bundle is worth its best one-smaller
/// sub-bundle plus a random increment.
pub fn monotone_valuation<R: Rng>(rng: &mut R, m: usize) -> Valuation {
    let mut table: Vec<Rational> = vec![int(0); 1 << m];
    for bits in 1..(1usize << m) {
        let best = (0..m)
            .filter(|g| bits & (1 << g) != 0)
            .map(|g| &table[bits & !(1 << g)])
            .max()
            .cloned()
            .unwrap_or_else(|| int(0));
        table[bits] = best + int(rng.gen_range(0..=3));
    }
    Valuation::Tabular { table }
}

pub fn tabular_instance<R: Rng>(rng: &mut R, k: usize, m: usize, n_max: usize) -> Result<Instance> {
    let groups = sizes(rng, k, n_max)
        .into_iter()
        .map(|n| (0..n).map(|_| monotone_valuation(rng, m)).collect())
        .collect();
    build(m, groups)
}

pub fn random_allocation<R: Rng>(rng: &mut R, k: usize, m: usize) -> Result<Allocation> {
    Allocation::new((0..m).map(|_| rng.gen_range(0..k)).collect(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn same_seed_same_instance() {
        let a = binary_instance(&mut ChaCha8Rng::seed_from_u64(7), 2, 8, 5).unwrap();
        let b = binary_instance(&mut ChaCha8Rng::seed_from_u64(7), 2, 8, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tabular_tables_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let Valuation::Tabular { table } = monotone_valuation(&mut rng, 4) else {
            unreachable!()
        };
        for s in 0..16usize {
            for g in 0..4 {
                assert!(table[s] <= table[s | (1 << g)]);
            }
        }
        assert!(tabular_instance(&mut rng, 3, 4, 3).is_ok());
    }

    #[test]
    fn identical_groups_share_agents() {
        let inst = identical_binary_instance(&mut ChaCha8Rng::seed_from_u64(3), 6, 6).unwrap();
        let mut a: Vec<u64> = inst
            .group(0)
            .iter()
            .map(|x| x.valuation.desired().unwrap().bits())
            .collect();
        let mut b: Vec<u64> = inst
            .group(1)
            .iter()
            .map(|x| x.valuation.desired().unwrap().bits())
            .collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }
}
