//! Plain-text rendering of instances and protocol runs.

use std::fmt::Write;

use super::{LineStep, MemberRow, RunResult, Trace, TurnRecord};
use crate::fairness::Criterion;
use crate::model::{Bundle, Instance, Valuation};

fn quoted(instance: &Instance, goods: impl IntoIterator<Item = usize>) -> String {
    let items: Vec<String> = goods.into_iter().map(|g| format!("'{}'", instance.label(g))).collect();
    items.join(", ")
}

fn list(instance: &Instance, goods: impl IntoIterator<Item = usize>) -> String {
    format!("[{}]", quoted(instance, goods))
}

fn set(instance: &Instance, bundle: Bundle) -> String {
    format!("{{{}}}", quoted(instance, bundle.iter()))
}

fn group_name(instance: &Instance, group: usize) -> String {
    format!("Group {}", instance.group_label(group))
}

fn counted(n: usize, one: &str, many: &str) -> String {
    if n == 1 {
        format!("1 {one}")
    } else {
        format!("{n} {many}")
    }
}

fn describe(instance: &Instance, v: &Valuation) -> (String, String) {
    match v {
        Valuation::Binary { desired } => ("binary agent  who want".into(), list(instance, desired.iter())),
        Valuation::Additive { values } => {
            let parts: Vec<String> = values
                .iter()
                .enumerate()
                .map(|(g, x)| format!("{}={x}", instance.label(g)))
                .collect();
            ("agent  with additive valuations:".into(), parts.join(" "))
        }
        Valuation::Tabular { .. } => ("agent  with a general monotone valuation".into(), String::new()),
    }
}

/// Who each group is and what it seeks; consecutive identical agents are
/// merged into one line.
pub fn instance_header(instance: &Instance, criteria: &[Criterion]) -> String {
    let mut out = String::new();
    for g in 0..instance.k() {
        let criterion = criteria.get(g).or(criteria.first());
        match criterion {
            Some(c) => writeln!(out, "{} seeks {} and has:", group_name(instance, g), c.long_name()),
            None => writeln!(out, "{} has:", group_name(instance, g)),
        }
        .unwrap();
        let agents = instance.group(g);
        let mut j = 0;
        while j < agents.len() {
            let mut n = 1;
            while j + n < agents.len() && agents[j + n].valuation == agents[j].valuation {
                n += 1;
            }
            let (kind, detail) = describe(instance, &agents[j].valuation);
            let kind = if n == 1 {
                kind
            } else {
                kind.replacen("agent ", "agents", 1)
            };
            let line = format!(" * {n} {kind} {detail}");
            writeln!(out, "{}", line.trim_end()).unwrap();
            j += n;
        }
    }
    out
}

fn member_rows(instance: &Instance, rows: &[MemberRow], out: &mut String) {
    writeln!(
        out,
        "{:<12}{:<12}{:<3}{:<3}{:<9}",
        "", "Desired set", "r", "s", "weight"
    )
    .unwrap();
    let mut i = 0;
    while i < rows.len() {
        let same =
            |a: &MemberRow, b: &MemberRow| a.desired == b.desired && a.r == b.r && a.s == b.s && a.weight == b.weight;
        let mut n = 1;
        while i + n < rows.len() && same(&rows[i], &rows[i + n]) {
            n += 1;
        }
        let row = &rows[i];
        writeln!(
            out,
            "{:<12}{:<12}{:<3}{:<3}{:<9}",
            counted(n, "member", "members"),
            instance.format_bundle(row.desired),
            row.r,
            row.s,
            row.weight.to_string()
        )
        .unwrap();
        i += n;
    }
}

fn render_turn(instance: &Instance, turn: &TurnRecord, out: &mut String) {
    writeln!(
        out,
        "Turn #{}: {}'s turn to pick a good from {}:",
        turn.turn,
        group_name(instance, turn.group),
        list(instance, turn.remaining.iter())
    )
    .unwrap();
    writeln!(out, "Calculating member weights:").unwrap();
    member_rows(instance, &turn.members, out);
    writeln!(out, "Calculating remaining good weights:").unwrap();
    writeln!(out, "{:<6}{:<9}", "", "Weight").unwrap();
    for (g, w) in &turn.good_weights {
        writeln!(out, "{:<6}{:<9}", instance.label(*g), w.to_string()).unwrap();
    }
    writeln!(
        out,
        "{} picks {}",
        group_name(instance, turn.group),
        instance.label(turn.pick)
    )
    .unwrap();
    writeln!(out).unwrap();
}

fn render_step(instance: &Instance, label: &str, step: &LineStep, out: &mut String) {
    writeln!(
        out,
        "Current partition:  {} | {}:",
        list(instance, step.left.iter().copied()),
        list(instance, step.right.iter().copied())
    )
    .unwrap();
    for &(g, yes, n) in &step.answers {
        writeln!(
            out,
            "   {}: {yes}/{n} members think the left bundle is {label}",
            group_name(instance, g)
        )
        .unwrap();
    }
    if let Some(g) = step.claimed_by {
        writeln!(out, "   {} gets the left bundle", group_name(instance, g)).unwrap();
    }
    if let Some(g) = step.remainder_to {
        writeln!(out, "   {} gets the remaining bundle", group_name(instance, g)).unwrap();
    }
    writeln!(out).unwrap();
}

fn render_trace(instance: &Instance, trace: &Trace, out: &mut String) {
    match trace {
        Trace::Picks { play_order, turns } => {
            writeln!(
                out,
                "RWAV protocol - {} plays first",
                group_name(instance, play_order[0])
            )
            .unwrap();
            writeln!(out).unwrap();
            for turn in turns {
                render_turn(instance, turn, out);
            }
        }
        Trace::Line { label, steps } => {
            for step in steps {
                render_step(instance, label, step, out);
            }
        }
        Trace::LocalSearch { initial, moves } => {
            let parts: Vec<String> = initial
                .iter()
                .enumerate()
                .map(|(g, b)| format!("{} {}", group_name(instance, g), set(instance, *b)))
                .collect();
            writeln!(out, "Initial partition: {}", parts.join(", ")).unwrap();
            for mv in moves {
                writeln!(
                    out,
                    "Move {} from {} to {}",
                    instance.label(mv.good),
                    group_name(instance, mv.from),
                    group_name(instance, mv.to)
                )
                .unwrap();
            }
            writeln!(out).unwrap();
        }
        Trace::Shortcut { group, good, rest_to } => {
            writeln!(
                out,
                "{} gets {} outright",
                group_name(instance, *group),
                instance.label(*good)
            )
            .unwrap();
            if let Some(other) = rest_to {
                writeln!(out, "{} gets the remaining goods", group_name(instance, *other)).unwrap();
            }
            writeln!(out).unwrap();
        }
        Trace::Sequence(steps) => {
            for step in steps {
                render_trace(instance, step, out);
            }
        }
    }
}

/// The run's trace followed by the final allocation. Groups are listed in
/// play order for a single voting run and in index order otherwise.
pub fn render_run(instance: &Instance, run: &RunResult) -> String {
    let mut out = String::new();
    render_trace(instance, &run.trace, &mut out);
    writeln!(out, "Final allocation:").unwrap();
    let order: Vec<usize> = match &run.trace {
        Trace::Picks { play_order, .. } => play_order.clone(),
        _ => (0..instance.k()).collect(),
    };
    for g in order {
        writeln!(
            out,
            " *  {}: allocated bundle = {}, happy members = {}/{}",
            group_name(instance, g),
            set(instance, run.allocation.bundle(g)),
            run.report.happy[g],
            run.report.sizes[g]
        )
        .unwrap();
    }
    out
}

/// Instance header, separator and run, as printed by the command line tool.
pub fn render_result(instance: &Instance, run: &RunResult) -> String {
    format!(
        "{}\n-------\n\n{}",
        instance_header(instance, &run.criteria),
        render_run(instance, run)
    )
}
