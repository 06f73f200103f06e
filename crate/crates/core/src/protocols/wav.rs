//! Round-robin and coin-toss weighted approval voting.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AgentState, Amount, Bound, Ledger, MemberRow, Picks, RunResult, Trace, TurnRecord};
use crate::budgets::{self, Dyadic, KGroupBudget};
use crate::error::{Error, Result};
use crate::fairness::{s_threshold, Criterion, Judge};
use crate::model::{Allocation, Bundle, Instance, Rational};

const K_TOLERANCE: f64 = 1e-9;
const TIE_EPSILON: f64 = 1e-12;

pub(super) fn binary_desired(instance: &Instance, group: usize, agent: usize) -> Result<Bundle> {
    let a = &instance.group(group)[agent];
    a.valuation.desired().ok_or_else(|| {
        Error::Precondition(format!(
            "agent {} of group {} is not binary (use binarization first)",
            a.id,
            instance.group_label(group)
        ))
    })
}

pub(super) fn require_two_groups(instance: &Instance) -> Result<()> {
    if instance.k() == 2 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "protocol needs exactly 2 groups, got {}",
            instance.k()
        )))
    }
}

pub(super) fn per_group(instance: &Instance, criteria: &[Criterion]) -> Result<Vec<Criterion>> {
    match criteria.len() {
        1 => Ok(vec![criteria[0].clone(); instance.k()]),
        n if n == instance.k() => Ok(criteria.to_vec()),
        n => Err(Error::Malformed(format!(
            "expected 1 or {} criteria, got {n}",
            instance.k()
        ))),
    }
}

pub(super) fn allocation_from_picks(instance: &Instance, picks: &[(usize, usize)]) -> Result<Allocation> {
    let mut assignment = vec![usize::MAX; instance.m()];
    for &(good, group) in picks {
        assignment[good] = group;
    }
    if assignment.contains(&usize::MAX) {
        return Err(Error::BadAllocation("protocol left goods unassigned".into()));
    }
    Allocation::new(assignment, instance.k())
}

pub(super) fn finish(
    protocol: &'static str,
    instance: &Instance,
    criteria: Vec<Criterion>,
    picks: &[(usize, usize)],
    guarantee: Vec<Bound>,
    trace: Trace,
    ledger: Option<Ledger>,
) -> Result<RunResult> {
    let allocation = allocation_from_picks(instance, picks)?;
    let report = Judge::new(instance, &criteria)?.report(instance, &allocation);
    Ok(RunResult {
        protocol,
        allocation,
        criteria,
        report,
        guarantee,
        trace,
        ledger,
    })
}

#[derive(Clone, Debug)]
struct Member {
    agent: usize,
    desired: Bundle,
    r: i64,
    s: i64,
}

#[derive(Clone, Copy, Debug)]
enum Schedule {
    Alternate,
    Coin(u64),
}

pub(super) struct Run<T> {
    pub(super) picks: Picks,
    pub(super) turns: Vec<TurnRecord>,
    pub(super) ledger: Ledger,
    /// Indexed by play position.
    pub(super) guarantee: Vec<T>,
}

/// Two groups voting with exact dyadic weights; `play[0]` moves first.
fn two_group_engine(
    instance: &Instance,
    play: [usize; 2],
    goods: Bundle,
    criteria: &[Criterion],
    schedule: Schedule,
) -> Result<Run<Dyadic>> {
    let table = budgets::default_table();
    let coin = matches!(schedule, Schedule::Coin(_));
    let budget = |r, s| {
        if coin {
            table.coin_budget(r, s)
        } else {
            table.budget(r, s)
        }
    };
    let weight = |r, s| {
        if coin {
            table.coin_weight(r, s)
        } else {
            table.weight(r, s)
        }
    };

    let mut sides: Vec<Vec<Member>> = Vec::with_capacity(2);
    for &g in &play {
        let mut members = Vec::new();
        for j in 0..instance.group(g).len() {
            let desired = binary_desired(instance, g, j)?.intersection(goods);
            let r = desired.len();
            let s = s_threshold(&criteria[g], r, 2)?;
            members.push(Member {
                agent: j,
                desired,
                r: r as i64,
                s,
            });
        }
        sides.push(members);
    }

    let mut agent_bal: Vec<Vec<Dyadic>> = Vec::new();
    let mut group_bal: Vec<Dyadic> = Vec::new();
    for members in &sides {
        let paid = members.iter().map(|m| budget(m.r, m.s)).collect::<Result<Vec<_>>>()?;
        group_bal.push(paid.iter().cloned().sum());
        agent_bal.push(paid.into_iter().map(|b| -b).collect());
    }
    let initial = group_bal.clone();

    let min_over = |members: &[Member], shift: i64| -> Result<Dyadic> {
        let mut best = Dyadic::one();
        for m in members {
            best = best.min(budget(m.r - shift, m.s)?);
        }
        Ok(best)
    };
    let guarantee = vec![min_over(&sides[0], 0)?, min_over(&sides[1], if coin { 0 } else { 1 })?];

    let mut rng = match schedule {
        Schedule::Coin(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Schedule::Alternate => None,
    };
    let mut remaining = goods;
    let mut picks = Vec::new();
    let mut turns = Vec::new();
    let mut violations = Vec::new();
    let mut history = vec![group_bal.clone()];
    let mut actors = Vec::new();

    for t in 0..goods.len() {
        let pos = match rng.as_mut() {
            Some(rng) => rng.gen_range(0..2),
            None => t % 2,
        };
        let weights = sides[pos]
            .iter()
            .map(|m| weight(m.r, m.s))
            .collect::<Result<Vec<_>>>()?;
        let mut good_weights = Vec::new();
        let mut best: Option<(usize, Dyadic)> = None;
        for g in remaining.iter() {
            let total: Dyadic = sides[pos]
                .iter()
                .zip(&weights)
                .filter(|(m, _)| m.desired.contains(g))
                .map(|(_, w)| w.clone())
                .sum();
            if best.as_ref().is_none_or(|(_, b)| total > *b) {
                best = Some((g, total.clone()));
            }
            good_weights.push((g, Amount::Exact(total)));
        }
        let pick = best.expect("a good remains").0;
        let members = sides[pos]
            .iter()
            .zip(weights)
            .map(|(m, w)| MemberRow {
                agent: m.agent,
                desired: m.desired,
                r: m.r,
                s: m.s,
                weight: Amount::Exact(w),
            })
            .collect();

        for (p, side) in sides.iter_mut().enumerate() {
            for (j, m) in side.iter_mut().enumerate() {
                if !m.desired.contains(pick) {
                    continue;
                }
                if p == pos {
                    let pay = if coin {
                        weight(m.r, m.s)?
                    } else {
                        weight(m.r, m.s)?.max(weight(m.r - 1, m.s - 1)?)
                    };
                    agent_bal[p][j] -= &pay;
                    group_bal[p] += &pay;
                    m.s -= 1;
                } else {
                    let refund = weight(m.r, m.s)?;
                    agent_bal[p][j] += &refund;
                    group_bal[p] -= &refund;
                }
                m.r -= 1;
            }
        }
        for (p, side) in sides.iter().enumerate() {
            for (j, m) in side.iter().enumerate() {
                let expected = -budget(m.r, m.s)?;
                if agent_bal[p][j] != expected {
                    violations.push(format!(
                        "turn {}: agent {} of group {} has balance {} instead of {}",
                        t + 1,
                        instance.group(play[p])[m.agent].id,
                        instance.group_label(play[p]),
                        agent_bal[p][j],
                        expected
                    ));
                }
            }
        }

        remaining.remove(pick);
        picks.push((pick, play[pos]));
        actors.push(pos);
        history.push(group_bal.clone());
        turns.push(TurnRecord {
            turn: t + 1,
            group: play[pos],
            remaining: remaining.with(pick),
            members,
            good_weights,
            pick,
            group_balances: (0..2).map(|p| (play[p], Amount::Exact(group_bal[p].clone()))).collect(),
            agents: (0..2)
                .map(|p| {
                    let states = sides[p]
                        .iter()
                        .zip(&agent_bal[p])
                        .map(|(m, b)| AgentState {
                            r: m.r,
                            s: m.s,
                            balance: Amount::Exact(b.clone()),
                        })
                        .collect();
                    (play[p], states)
                })
                .collect(),
        });
    }

    if !coin {
        let last = actors.len();
        for (t, &pos) in actors.iter().enumerate() {
            let end = (t + 2).min(last);
            if history[end][pos] < history[t][pos] {
                violations.push(format!(
                    "group {} balance fell from {} to {} over turns {}..{}",
                    instance.group_label(play[pos]),
                    history[t][pos],
                    history[end][pos],
                    t + 1,
                    end
                ));
            }
        }
    }

    let satisfied: Vec<usize> = sides
        .iter()
        .map(|side| side.iter().filter(|m| m.s <= 0).count())
        .collect();
    for p in 0..2 {
        if group_bal[p] != Dyadic::from_int(satisfied[p] as i64) {
            violations.push(format!(
                "group {} ends with balance {} but {} satisfied members",
                instance.group_label(play[p]),
                group_bal[p],
                satisfied[p]
            ));
        }
    }

    let ledger = Ledger {
        initial_group_balances: (0..2).map(|p| (play[p], Amount::Exact(initial[p].clone()))).collect(),
        final_group_balances: (0..2).map(|p| (play[p], Amount::Exact(group_bal[p].clone()))).collect(),
        satisfied: (0..2).map(|p| (play[p], satisfied[p])).collect(),
        violations,
    };
    Ok(Run {
        picks,
        turns,
        ledger,
        guarantee,
    })
}

fn two_group_run(
    protocol: &'static str,
    instance: &Instance,
    criteria: &[Criterion],
    first_group: usize,
    schedule: Schedule,
) -> Result<RunResult> {
    require_two_groups(instance)?;
    if first_group > 1 {
        return Err(Error::Precondition(format!(
            "first group must be 0 or 1, got {first_group}"
        )));
    }
    let criteria = per_group(instance, criteria)?;
    for c in &criteria {
        c.validate()?;
    }
    let play = [first_group, 1 - first_group];
    let run = two_group_engine(instance, play, instance.all_goods(), &criteria, schedule)?;
    let mut guarantee = vec![Bound::Exact(Rational::from_integer(0.into())); 2];
    for (p, g) in run.guarantee.iter().enumerate() {
        guarantee[play[p]] = Bound::Exact(g.to_rational());
    }
    let trace = Trace::Picks {
        play_order: play.to_vec(),
        turns: run.turns,
    };
    finish(
        protocol,
        instance,
        criteria,
        &run.picks,
        guarantee,
        trace,
        Some(run.ledger),
    )
}

/// Two-group round-robin weighted approval voting on binary agents.
/// `criteria` holds one criterion for both groups or one per group;
/// `first_group` is 0-based.
pub fn rwav2(instance: &Instance, criteria: &[Criterion], first_group: usize) -> Result<RunResult> {
    two_group_run("rwav2", instance, criteria, first_group, Schedule::Alternate)
}

/// Like [`rwav2`], but a seeded fair coin picks the group for every turn.
/// The guarantee holds in expectation.
pub fn cwav2(instance: &Instance, criteria: &[Criterion], seed: u64) -> Result<RunResult> {
    two_group_run("cwav2", instance, criteria, 0, Schedule::Coin(seed))
}

/// Shortcut of the enhanced protocol over `goods`, else plain voting with
/// `play[0]` first.
pub(super) fn enhanced_engine(
    instance: &Instance,
    play: [usize; 2],
    goods: Bundle,
    c: usize,
) -> Result<(Picks, Trace, Option<Ledger>)> {
    let pow = BigInt::from(1) << c;
    let mut by_index = play;
    by_index.sort_unstable();
    for &group in &by_index {
        let mut counted = Vec::new();
        for j in 0..instance.group(group).len() {
            let desired = binary_desired(instance, group, j)?.intersection(goods);
            if desired.len() >= c {
                counted.push(desired);
            }
        }
        if counted.is_empty() {
            continue;
        }
        let needed = (&pow - 1) * counted.len();
        for good in goods.iter() {
            let count = counted.iter().filter(|d| d.contains(good)).count();
            if (&pow + 1) * count >= needed {
                let other = if group == play[0] { play[1] } else { play[0] };
                let mut picks = vec![(good, group)];
                picks.extend(goods.without(good).iter().map(|g| (g, other)));
                let trace = Trace::Shortcut {
                    group,
                    good,
                    rest_to: Some(other),
                };
                return Ok((picks, trace, None));
            }
        }
    }
    let criteria = vec![Criterion::OneOfBest(c); instance.k()];
    let run = two_group_engine(instance, play, goods, &criteria, Schedule::Alternate)?;
    let trace = Trace::Picks {
        play_order: play.to_vec(),
        turns: run.turns,
    };
    Ok((run.picks, trace, Some(run.ledger)))
}

/// Gives a good outright to a group in which enough agents want it, and
/// otherwise runs [`rwav2`] for 1-of-best-`c` with group 0 first. Agents with
/// fewer than `c` desired goods are ignored when counting.
pub fn rwav2_enhanced(instance: &Instance, c: usize) -> Result<RunResult> {
    require_two_groups(instance)?;
    if c == 0 {
        return Err(Error::Precondition("c must be positive".into()));
    }
    let (picks, trace, ledger) = enhanced_engine(instance, [0, 1], instance.all_goods(), c)?;
    let pow = BigInt::from(1) << c;
    let bound = Rational::new(&pow - 1, &pow + 1);
    let guarantee = vec![Bound::Exact(bound); 2];
    let criteria = vec![Criterion::OneOfBest(c); 2];
    finish("rwav2-enhanced", instance, criteria, &picks, guarantee, trace, ledger)
}

/// Weighted approval voting among `play` in cyclic order over `goods`.
/// Each agent keeps its `c` lowest-index desired goods and needs one of them.
pub(super) fn k_group_engine(instance: &Instance, play: &[usize], goods: Bundle, c: usize) -> Result<Run<f64>> {
    let kk = play.len();
    let kb = KGroupBudget::new(kk as u32)?;
    let mut sides: Vec<Vec<Member>> = Vec::with_capacity(kk);
    for &g in play {
        let mut members = Vec::new();
        for j in 0..instance.group(g).len() {
            let all = binary_desired(instance, g, j)?.intersection(goods);
            let desired: Bundle = all.iter().take(c).collect();
            members.push(Member {
                agent: j,
                desired,
                r: desired.len() as i64,
                s: i64::from(all.len() >= c),
            });
        }
        sides.push(members);
    }

    let mut agent_bal: Vec<Vec<f64>> = Vec::new();
    let mut group_bal: Vec<f64> = Vec::new();
    for members in &sides {
        let paid = members
            .iter()
            .map(|m| kb.budget(m.r, m.s))
            .collect::<Result<Vec<_>>>()?;
        group_bal.push(paid.iter().sum());
        agent_bal.push(paid.into_iter().map(|b| -b).collect());
    }
    let initial = group_bal.clone();
    let guarantee = (0..kk)
        .map(|p| kb.budget(c as i64 - p as i64, 1))
        .collect::<Result<Vec<_>>>()?;

    let mut remaining = goods;
    let mut picks = Vec::new();
    let mut turns = Vec::new();
    let mut violations = Vec::new();
    let mut history = vec![group_bal.clone()];

    for t in 0..goods.len() {
        let pos = t % kk;
        let weights = sides[pos]
            .iter()
            .map(|m| kb.weight(m.r, m.s))
            .collect::<Result<Vec<_>>>()?;
        let mut good_weights = Vec::new();
        let mut best: Option<(usize, f64)> = None;
        for g in remaining.iter() {
            let total: f64 = sides[pos]
                .iter()
                .zip(&weights)
                .filter(|(m, _)| m.desired.contains(g))
                .map(|(_, w)| w)
                .sum();
            if best.is_none_or(|(_, b)| total > b + TIE_EPSILON) {
                best = Some((g, total));
            }
            good_weights.push((g, Amount::Real(total)));
        }
        let pick = best.expect("a good remains").0;
        let members = sides[pos]
            .iter()
            .zip(weights)
            .map(|(m, w)| MemberRow {
                agent: m.agent,
                desired: m.desired,
                r: m.r,
                s: m.s,
                weight: Amount::Real(w),
            })
            .collect();

        for (p, side) in sides.iter_mut().enumerate() {
            for (j, m) in side.iter_mut().enumerate() {
                if !m.desired.contains(pick) {
                    continue;
                }
                if p == pos {
                    let pay = 1.0 - kb.budget(m.r, m.s)?;
                    agent_bal[p][j] -= pay;
                    group_bal[p] += pay;
                    m.s = 0;
                } else {
                    let refund = kb.weight(m.r, m.s)?;
                    agent_bal[p][j] += refund;
                    group_bal[p] -= refund;
                }
                m.r -= 1;
            }
        }
        for (p, side) in sides.iter().enumerate() {
            for (j, m) in side.iter().enumerate() {
                let expected = -kb.budget(m.r, m.s)?;
                if (agent_bal[p][j] - expected).abs() > K_TOLERANCE {
                    violations.push(format!(
                        "turn {}: agent {} of group {} has balance {} instead of {}",
                        t + 1,
                        instance.group(play[p])[m.agent].id,
                        instance.group_label(play[p]),
                        agent_bal[p][j],
                        expected
                    ));
                }
            }
        }

        remaining.remove(pick);
        picks.push((pick, play[pos]));
        history.push(group_bal.clone());
        turns.push(TurnRecord {
            turn: t + 1,
            group: play[pos],
            remaining: remaining.with(pick),
            members,
            good_weights,
            pick,
            group_balances: (0..kk).map(|p| (play[p], Amount::Real(group_bal[p]))).collect(),
            agents: (0..kk)
                .map(|p| {
                    let states = sides[p]
                        .iter()
                        .zip(&agent_bal[p])
                        .map(|(m, &b)| AgentState {
                            r: m.r,
                            s: m.s,
                            balance: Amount::Real(b),
                        })
                        .collect();
                    (play[p], states)
                })
                .collect(),
        });
    }

    let last = turns.len();
    for t in 0..last {
        let pos = t % kk;
        let end = (t + kk).min(last);
        if history[end][pos] < history[t][pos] - K_TOLERANCE {
            violations.push(format!(
                "group {} balance fell from {} to {} over turns {}..{}",
                instance.group_label(play[pos]),
                history[t][pos],
                history[end][pos],
                t + 1,
                end
            ));
        }
    }
    let satisfied: Vec<usize> = sides
        .iter()
        .map(|side| side.iter().filter(|m| m.s <= 0).count())
        .collect();
    for p in 0..kk {
        if (group_bal[p] - satisfied[p] as f64).abs() > K_TOLERANCE {
            violations.push(format!(
                "group {} ends with balance {} but {} satisfied members",
                instance.group_label(play[p]),
                group_bal[p],
                satisfied[p]
            ));
        }
    }

    let ledger = Ledger {
        initial_group_balances: (0..kk).map(|p| (play[p], Amount::Real(initial[p]))).collect(),
        final_group_balances: (0..kk).map(|p| (play[p], Amount::Real(group_bal[p]))).collect(),
        satisfied: (0..kk).map(|p| (play[p], satisfied[p])).collect(),
        violations,
    };
    Ok(Run {
        picks,
        turns,
        ledger,
        guarantee,
    })
}

/// Round-robin weighted approval voting for any number of groups, in index
/// order, for 1-of-best-`c` fairness.
pub fn rwavk(instance: &Instance, c: usize) -> Result<RunResult> {
    if c == 0 {
        return Err(Error::Precondition("c must be positive".into()));
    }
    let play: Vec<usize> = (0..instance.k()).collect();
    let run = k_group_engine(instance, &play, instance.all_goods(), c)?;
    let guarantee = run.guarantee.iter().map(|&g| Bound::Real(g)).collect();
    let trace = Trace::Picks {
        play_order: play,
        turns: run.turns,
    };
    let criteria = vec![Criterion::OneOfBest(c); instance.k()];
    finish(
        "rwavk",
        instance,
        criteria,
        &run.picks,
        guarantee,
        trace,
        Some(run.ledger),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ratio, Agent, Valuation};

    fn binary_instance(labels: &str, groups: &[&[&str]]) -> Instance {
        let goods: Vec<char> = labels.chars().collect();
        let groups = groups
            .iter()
            .map(|members| {
                members
                    .iter()
                    .enumerate()
                    .map(|(j, want)| {
                        let desired = want.chars().map(|ch| goods.iter().position(|&g| g == ch).unwrap());
                        Agent::new(format!("a{j}"), Valuation::binary(desired))
                    })
                    .collect()
            })
            .collect();
        Instance::from_labels(labels, groups).unwrap()
    }

    #[test]
    fn single_good_goes_to_first_group() {
        let inst = binary_instance("g", &[&["g"], &["g"]]);
        let run = rwav2(&inst, &[Criterion::OneOfBest(1)], 0).unwrap();
        assert_eq!(run.allocation.assignment(), &[0]);
        assert_eq!(run.report.happy, vec![1, 0]);
        assert!(run.ledger.unwrap().violations.is_empty());
    }

    #[test]
    fn plain_run_on_enhancement_example() {
        let g1: &[&str] = &["vw", "vx", "vy", "vz", "wx", "wy", "wz", "xy", "xz", "yz"];
        let g2: &[&str] = &["vw", "vw", "vw", "vx", "vx", "vx", "vy", "vy", "vz", "vz"];
        let inst = binary_instance("vwxyz", &[g1, g2]);
        let plain = rwav2(&inst, &[Criterion::OneOfBest(2)], 0).unwrap();
        assert_eq!(plain.report.happy[1], 5);
        let picks: Vec<usize> = match &plain.trace {
            Trace::Picks { turns, .. } => turns.iter().map(|t| t.pick).collect(),
            _ => unreachable!(),
        };
        assert_eq!(picks, vec![0, 1, 2, 3, 4]);
        let enhanced = rwav2_enhanced(&inst, 2).unwrap();
        assert_eq!(enhanced.allocation.assignment(), &[1, 0, 0, 0, 0]);
        assert_eq!(enhanced.report.happy, vec![10, 10]);
        assert_eq!(enhanced.guarantee[0], Bound::Exact(ratio(3, 5)));
    }

    #[test]
    fn rwavk_with_two_groups_matches_rwav2() {
        let inst = binary_instance("abcdef", &[&["abc", "cde", "af", "bdf"], &["bc", "ef", "ace"]]);
        let a = rwav2(&inst, &[Criterion::OneOfBest(2)], 0).unwrap();
        let b = rwavk(&inst, 2).unwrap();
        assert_eq!(a.allocation, b.allocation);
        assert!(b.ledger.unwrap().violations.is_empty());
    }

    #[test]
    fn coin_runs_replay() {
        let inst = binary_instance("abcdef", &[&["abc", "cde"], &["bcd", "def", "abf"]]);
        let c = [Criterion::OneOutOf(2)];
        let a = cwav2(&inst, &c, 7).unwrap();
        assert_eq!(a, cwav2(&inst, &c, 7).unwrap());
        assert!(a.ledger.unwrap().violations.is_empty());
    }

    #[test]
    fn rejects_non_binary_and_wrong_k() {
        let groups = vec![
            vec![Agent::new("a", Valuation::additive([1, 2]))],
            vec![Agent::new("b", Valuation::binary([0]))],
        ];
        let inst = Instance::from_labels("xy", groups).unwrap();
        assert!(matches!(
            rwav2(&inst, &[Criterion::OneOfBest(1)], 0),
            Err(Error::Precondition(_))
        ));
        let three = binary_instance("ab", &[&["a"], &["b"], &["ab"]]);
        assert!(rwav2(&three, &[Criterion::OneOfBest(1)], 0).is_err());
        assert!(rwav2(&three.clone(), &[Criterion::EnvyFree(1)], 0).is_err());
    }
}
