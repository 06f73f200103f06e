//! Line protocols: goods are laid out in a line and a block grows from the
//! left until enough members of some group accept it.

use num_bigint::BigInt;

use super::wav::finish;
use super::{Bound, LineStep, Picks, RunResult, Trace};
use crate::error::{Error, Result};
use crate::fairness::{is_efc, propc_holds, Criterion};
use crate::model::{Bundle, Instance, Rational, Valuation};

/// Grows blocks along the instance's good order. A group claims the current
/// block once `den * yes >= members`; the last group left takes the rest.
fn line_engine<F>(instance: &Instance, den: usize, accepts: F) -> Result<(Picks, Vec<LineStep>)>
where
    F: Fn(&Valuation, Bundle, Bundle) -> bool,
{
    let order = instance.order();
    let mut active: Vec<usize> = (0..instance.k()).collect();
    let mut start = 0;
    let mut picks = Vec::new();
    let mut steps = Vec::new();
    while active.len() > 1 {
        let rest = &order[start..];
        let remaining: Bundle = rest.iter().copied().collect();
        let mut claimed = false;
        for len in 0..=rest.len() {
            let left: Bundle = rest[..len].iter().copied().collect();
            let mut answers = Vec::new();
            let mut claimer = None;
            for &g in &active {
                let members = instance.group(g);
                let yes = members
                    .iter()
                    .filter(|a| accepts(&a.valuation, left, remaining))
                    .count();
                answers.push((g, yes, members.len()));
                if den * yes >= members.len() {
                    claimer = Some(g);
                    break;
                }
            }
            let mut step = LineStep {
                left: rest[..len].to_vec(),
                right: rest[len..].to_vec(),
                answers,
                claimed_by: claimer,
                remainder_to: None,
            };
            if let Some(g) = claimer {
                picks.extend(rest[..len].iter().map(|&good| (good, g)));
                active.retain(|&a| a != g);
                start += len;
                if let [last] = active[..] {
                    picks.extend(rest[len..].iter().map(|&good| (good, last)));
                    step.remainder_to = Some(last);
                }
                steps.push(step);
                claimed = true;
                break;
            }
            steps.push(step);
        }
        if !claimed {
            return Err(Error::Precondition("no group accepted the whole remaining line".into()));
        }
    }
    Ok((picks, steps))
}

/// Two-group line protocol for EF1. Each agent is asked whether the left
/// block is EF1 for it against the complement; works for any monotone
/// valuation.
pub fn line2(instance: &Instance) -> Result<RunResult> {
    super::wav::require_two_groups(instance)?;
    let (picks, steps) = line_engine(instance, 2, |v, left, remaining| {
        is_efc(v, &[left, remaining.difference(left)], 0, 1)
    })?;
    let trace = Trace::Line {
        label: "EF1".into(),
        steps,
    };
    let guarantee = vec![Bound::Exact(Rational::new(1.into(), 2.into())); 2];
    finish(
        "line2",
        instance,
        vec![Criterion::EnvyFree(1); 2],
        &picks,
        guarantee,
        trace,
        None,
    )
}

/// Line protocol for PROP(k-1) among `k` groups. A block is judged against
/// all goods of the instance, so groups leaving early do not change the
/// question asked of the remaining ones.
pub fn linek(instance: &Instance) -> Result<RunResult> {
    let k = instance.k();
    let all = instance.all_goods();
    let (picks, steps) = line_engine(instance, k, |v, left, _| propc_holds(v, left, all, k, k - 1))?;
    let trace = Trace::Line {
        label: format!("PROP-{}", k - 1),
        steps,
    };
    let guarantee = vec![Bound::Exact(Rational::new(BigInt::from(1), BigInt::from(k))); k];
    let criteria = vec![Criterion::Proportional(k - 1); k];
    finish("linek", instance, criteria, &picks, guarantee, trace, None)
}
