use num_bigint::BigInt;

use super::wav::{binary_desired, finish, require_two_groups};
use super::{Bound, MoveRecord, RunResult, Trace};
use crate::error::{Error, Result};
use crate::fairness::Criterion;
use crate::model::{Bundle, Instance, Rational};

/// Local search for two identical groups of binary agents, aiming at
/// 1-of-best-2 for two thirds of each group.
///
/// Every agent is cut down to its two lowest-index desired goods (agents
/// wanting fewer are ignored). Starting with everything in group 2, goods are
/// scanned in index order and the first improving move is applied, until none
/// applies.
pub fn identical_local_search(instance: &Instance) -> Result<RunResult> {
    require_two_groups(instance)?;
    let mut wants: Vec<Vec<Bundle>> = Vec::with_capacity(2);
    for g in 0..2 {
        let mut group = Vec::new();
        for j in 0..instance.group(g).len() {
            group.push(binary_desired(instance, g, j)?);
        }
        wants.push(group);
    }
    let mut sorted = wants.clone();
    for group in &mut sorted {
        group.sort_unstable_by_key(|b| b.bits());
    }
    if sorted[0] != sorted[1] {
        return Err(Error::Precondition("the two groups are not identical".into()));
    }
    let reduced: Vec<Vec<Bundle>> = wants
        .iter()
        .map(|group| {
            group
                .iter()
                .filter(|d| d.len() >= 2)
                .map(|d| d.iter().take(2).collect())
                .collect()
        })
        .collect();

    let all = instance.all_goods();
    let initial = vec![Bundle::EMPTY, all];
    let mut own = initial.clone();
    let mut moves = Vec::new();
    // Each move makes at least one more agent happy, and group 2 starts happy.
    let limit = reduced[0].len();
    // Agents of `group` wanting `good` whose utility is `y`.
    let count = |own: &[Bundle], group: usize, good: usize, y: usize| {
        reduced[group]
            .iter()
            .filter(|d| d.contains(good) && d.intersection(own[group]).len() == y)
            .count()
    };
    loop {
        let step = all.iter().find_map(|g| {
            let (from, to) = if own[0].contains(g) { (0, 1) } else { (1, 0) };
            // Leaving agents with one good vs. arriving agents with none.
            (count(&own, to, g, 0) > count(&own, from, g, 1)).then_some(MoveRecord { good: g, from, to })
        });
        let Some(mv) = step else { break };
        own[mv.from].remove(mv.good);
        own[mv.to].insert(mv.good);
        moves.push(mv);
        if moves.len() > limit {
            return Err(Error::Precondition("local search did not converge".into()));
        }
    }

    let picks: Vec<(usize, usize)> = all.iter().map(|g| (g, usize::from(own[1].contains(g)))).collect();
    let guarantee = vec![Bound::Exact(Rational::new(BigInt::from(2), BigInt::from(3))); 2];
    let trace = Trace::LocalSearch { initial, moves };
    finish(
        "identical",
        instance,
        vec![Criterion::OneOfBest(2); 2],
        &picks,
        guarantee,
        trace,
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Agent, Valuation};

    fn group(sets: &[&[usize]]) -> Vec<Agent> {
        sets.iter()
            .enumerate()
            .map(|(j, s)| Agent::new(format!("{j}"), Valuation::binary(s.iter().copied())))
            .collect()
    }

    #[test]
    fn example_ends_with_v_on_the_left() {
        let sets: Vec<&[usize]> = [[0, 1]; 3]
            .iter()
            .map(|s| &s[..])
            .chain([[0, 2]; 3].iter().map(|s| &s[..]))
            .chain([[0, 3]; 2].iter().map(|s| &s[..]))
            .chain([[0, 4]; 2].iter().map(|s| &s[..]))
            .collect();
        let inst = Instance::from_labels("vwxyz", vec![group(&sets), group(&sets)]).unwrap();
        let run = identical_local_search(&inst).unwrap();
        assert_eq!(run.allocation.assignment(), &[0, 1, 1, 1, 1]);
        assert_eq!(run.report.happy, vec![10, 10]);
    }

    #[test]
    fn rejects_different_groups() {
        let inst = Instance::from_labels("ab", vec![group(&[&[0, 1]]), group(&[&[0]])]).unwrap();
        assert!(identical_local_search(&inst).is_err());
    }
}
