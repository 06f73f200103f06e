use num_bigint::BigInt;

use super::wav::{binary_desired, enhanced_engine, finish, k_group_engine};
use super::{Bound, Ledger, RunResult, Trace};
use crate::error::{Error, Result};
use crate::fairness::Criterion;
use crate::model::{Bundle, Instance, Rational};

fn merge(into: &mut Option<Ledger>, next: Ledger) {
    match into {
        None => *into = Some(next),
        Some(l) => {
            l.initial_group_balances.extend(next.initial_group_balances);
            l.final_group_balances.extend(next.final_group_balances);
            l.satisfied.extend(next.satisfied);
            l.violations.extend(next.violations);
        }
    }
}

/// 1-of-best-`k` for any number of groups with additive (or binary) agents.
///
/// Agents are binarized to their `k` best goods. While three or more groups
/// remain, a group in which at least a third of the members want some single
/// good gets it and leaves; otherwise the remaining groups vote. Two remaining
/// groups run the enhanced two-group protocol.
pub fn best_k_protocol(instance: &Instance) -> Result<RunResult> {
    let k = instance.k();
    if k < 2 {
        return Err(Error::TooFewGroups(k));
    }
    let binary = instance.binarize(k);
    let mut active: Vec<usize> = (0..k).collect();
    let mut goods = instance.all_goods();
    let mut picks = Vec::new();
    let mut steps = Vec::new();
    let mut ledger = None;

    while !goods.is_empty() {
        if active.len() == 2 {
            let (p, trace, l) = enhanced_engine(&binary, [active[0], active[1]], goods, 2)?;
            picks.extend(p);
            steps.push(trace);
            if let Some(l) = l {
                merge(&mut ledger, l);
            }
            break;
        }
        let shortcut = find_shortcut(&binary, &active, goods)?;
        if let Some((group, good)) = shortcut {
            picks.push((good, group));
            steps.push(Trace::Shortcut {
                group,
                good,
                rest_to: None,
            });
            active.retain(|&g| g != group);
            goods.remove(good);
            continue;
        }
        let run = k_group_engine(&binary, &active, goods, active.len())?;
        picks.extend(run.picks);
        steps.push(Trace::Picks {
            play_order: active.clone(),
            turns: run.turns,
        });
        merge(&mut ledger, run.ledger);
        break;
    }

    let bound = if k == 2 {
        Rational::new(BigInt::from(3), BigInt::from(5))
    } else {
        Rational::new(BigInt::from(1), BigInt::from(3))
    };
    let guarantee = vec![Bound::Exact(bound); k];
    let criteria = vec![Criterion::OneOfBest(k); k];
    finish(
        "best-k",
        instance,
        criteria,
        &picks,
        guarantee,
        Trace::Sequence(steps),
        ledger,
    )
}

fn find_shortcut(binary: &Instance, active: &[usize], goods: Bundle) -> Result<Option<(usize, usize)>> {
    for &group in active {
        let n = binary.group(group).len();
        let mut wants = Vec::with_capacity(n);
        for j in 0..n {
            wants.push(binary_desired(binary, group, j)?);
        }
        for good in goods.iter() {
            let count = wants.iter().filter(|d| d.contains(good)).count();
            if 3 * count >= n {
                return Ok(Some((group, good)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Agent, Valuation};

    fn additive(values: &[i64]) -> Agent {
        Agent::new("a", Valuation::additive(values.iter().copied()))
    }

    #[test]
    fn popular_good_goes_out_first() {
        let groups = vec![
            vec![additive(&[5, 4, 0, 0, 0, 0])],
            vec![additive(&[0, 0, 5, 4, 0, 0])],
            vec![additive(&[0, 0, 0, 0, 5, 4])],
        ];
        let inst = Instance::from_labels("abcdef", groups).unwrap();
        let run = best_k_protocol(&inst).unwrap();
        assert_eq!(run.report.happy, vec![1, 1, 1]);
        assert!(run.shortfalls(1e-9).is_empty());
        let Trace::Sequence(steps) = &run.trace else { panic!() };
        assert!(matches!(steps[0], Trace::Shortcut { group: 0, good: 0, .. }));
    }

    #[test]
    fn two_groups_meet_three_fifths() {
        let groups = vec![
            vec![additive(&[3, 2, 1]), additive(&[1, 2, 3])],
            vec![additive(&[3, 1, 2]), additive(&[2, 3, 1])],
        ];
        let inst = Instance::from_labels("abc", groups).unwrap();
        let run = best_k_protocol(&inst).unwrap();
        assert!(run.shortfalls(1e-9).is_empty());
    }
}
