//! The JSON document formats for instances and allocations.
//!
//! ```json
//! { "goods": ["v", "w", "x"],
//!   "groups": [[{"type": "binary", "desired": ["v", "x"], "count": 2}],
//!              [{"type": "additive", "values": [1, "1/2", "0.25"]}]],
//!   "order": ["x", "w", "v"] }
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fairness::{Criterion, FairnessReport};
use crate::model::{Agent, Allocation, Bundle, Instance, Rational, Valuation};
use crate::oracles::{ExistsResult, OracleResult};
use crate::protocols::{Amount, Bound, RunResult, Trace};

/// Parses `"3"`, `"-1.25"` or `"2/3"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Malformed(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac.is_empty()) || !digits_ok(int_part) || !digits_ok(frac) {
        return Err(bad());
    }
    let numer: BigInt = format!("{int_part}{frac}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

/// Integers stay integers; everything else becomes `"p/q"`.
fn rational_to_json(value: &Rational) -> Value {
    if value.denom().is_one() {
        if let Ok(n) = i64::try_from(value.numer()) {
            return json!(n);
        }
    }
    json!(value.to_string())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            Number::Int(n) => Ok(Rational::from_integer(BigInt::from(*n))),
            Number::Float(x) => parse_rational(&x.to_string()),
            Number::Text(t) => parse_rational(t),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Kind {
    Binary { desired: Vec<String> },
    Additive { values: Vec<Number> },
    Tabular { values: BTreeMap<String, Number> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct AgentDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(flatten)]
    kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    goods: Vec<String>,
    groups: Vec<Vec<AgentDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group_labels: Option<Vec<String>>,
}

fn good_indices(goods: &[String], labels: &[String]) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|l| {
            goods
                .iter()
                .position(|g| g == l)
                .ok_or_else(|| Error::UnknownGood(l.clone()))
        })
        .collect()
}

/// A tabular key is a comma-separated list of labels, or a run of
/// single-character labels.
fn parse_bundle_key(goods: &[String], key: &str) -> Result<Bundle> {
    let key = key.trim();
    if key.is_empty() || key == "{}" {
        return Ok(Bundle::EMPTY);
    }
    if let Some(i) = goods.iter().position(|g| g == key) {
        return Ok(Bundle::singleton(i));
    }
    let parts: Vec<String> = if key.contains(',') {
        key.split(',').map(|p| p.trim().to_string()).collect()
    } else if goods.iter().all(|g| g.chars().count() == 1) {
        key.chars().map(String::from).collect()
    } else {
        return Err(Error::UnknownGood(key.to_string()));
    };
    Ok(good_indices(goods, &parts)?.into_iter().collect())
}

fn valuation_from(kind: &Kind, goods: &[String], agent: &str) -> Result<Valuation> {
    let m = goods.len();
    Ok(match kind {
        Kind::Binary { desired } => Valuation::Binary {
            desired: good_indices(goods, desired)?.into_iter().collect(),
        },
        Kind::Additive { values } => Valuation::Additive {
            values: values.iter().map(Number::to_rational).collect::<Result<_>>()?,
        },
        Kind::Tabular { values } => {
            if m > crate::model::MAX_TABULAR_GOODS {
                return Err(Error::TooManyGoods {
                    what: "tabular valuation",
                    m,
                    max: crate::model::MAX_TABULAR_GOODS,
                });
            }
            let mut table: Vec<Option<Rational>> = vec![None; 1 << m];
            for (key, value) in values {
                let b = parse_bundle_key(goods, key)?;
                table[b.bits() as usize] = Some(value.to_rational()?);
            }
            let found = table.iter().filter(|v| v.is_some()).count();
            let table = table
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::DimensionMismatch {
                    agent: agent.to_string(),
                    expected: 1 << m,
                    found,
                })?;
            Valuation::Tabular { table }
        }
    })
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let mut groups = Vec::with_capacity(doc.groups.len());
    for (i, entries) in doc.groups.iter().enumerate() {
        let mut agents = Vec::new();
        for entry in entries {
            let count = entry.count.unwrap_or(1);
            for _ in 0..count {
                let id = match (&entry.id, count) {
                    (Some(id), 1) => id.clone(),
                    (Some(id), _) => format!("{id}.{}", agents.len() + 1),
                    (None, _) => format!("{}.{}", i + 1, agents.len() + 1),
                };
                let valuation = valuation_from(&entry.kind, &doc.goods, &id)?;
                agents.push(Agent::new(id, valuation));
            }
        }
        groups.push(agents);
    }
    let mut instance = Instance::new(doc.goods.clone(), groups)?;
    if let Some(order) = &doc.order {
        let labels: Vec<&str> = order.iter().map(String::as_str).collect();
        instance = instance.with_order_labels(&labels)?;
    }
    if let Some(labels) = doc.group_labels {
        instance = instance.with_group_labels(labels)?;
    }
    Ok(instance)
}

fn labels_of(instance: &Instance, bundle: Bundle) -> Vec<String> {
    bundle.iter().map(|g| instance.label(g).to_string()).collect()
}

fn bundle_key(instance: &Instance, bundle: Bundle) -> String {
    labels_of(instance, bundle).join(",")
}

/// Instance document with one entry per agent and explicit ids.
pub fn instance_to_json(instance: &Instance) -> Value {
    let groups: Vec<Vec<Value>> = instance
        .groups()
        .iter()
        .map(|agents| {
            agents
                .iter()
                .map(|a| {
                    let mut entry = match &a.valuation {
                        Valuation::Binary { desired } => json!({
                            "type": "binary",
                            "desired": labels_of(instance, *desired),
                        }),
                        Valuation::Additive { values } => json!({
                            "type": "additive",
                            "values": values.iter().map(rational_to_json).collect::<Vec<_>>(),
                        }),
                        Valuation::Tabular { table } => {
                            let values: serde_json::Map<String, Value> = table
                                .iter()
                                .enumerate()
                                .map(|(bits, v)| {
                                    let b = Bundle::from_bits(bits as u64);
                                    (bundle_key(instance, b), rational_to_json(v))
                                })
                                .collect();
                            json!({"type": "tabular", "values": values})
                        }
                    };
                    entry["id"] = json!(a.id);
                    entry
                })
                .collect()
        })
        .collect();
    let mut doc = json!({"goods": instance.goods(), "groups": groups});
    if !instance.has_default_order() {
        let order: Vec<&str> = instance.order().iter().map(|&g| instance.label(g)).collect();
        doc["order"] = json!(order);
    }
    if !instance.has_default_group_labels() {
        doc["group_labels"] = json!(instance.group_labels());
    }
    doc
}

pub fn serialize_instance(instance: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_json(instance)).expect("json values serialize")
}

#[derive(Deserialize)]
struct AllocationDoc {
    bundles: Vec<Vec<String>>,
}

/// Reads the `"bundles"` field of an allocation document.
pub fn parse_allocation(text: &str, instance: &Instance) -> Result<Allocation> {
    let doc: AllocationDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    if doc.bundles.len() != instance.k() {
        return Err(Error::BadAllocation(format!(
            "{} bundles for {} groups",
            doc.bundles.len(),
            instance.k()
        )));
    }
    let bundles = doc
        .bundles
        .iter()
        .map(|labels| Ok(good_indices(instance.goods(), labels)?.into_iter().collect()))
        .collect::<Result<Vec<Bundle>>>()?;
    Allocation::from_bundles(&bundles, instance.m())
}

/// Allocation document: bundles by label, and happy counts plus per-agent
/// verdicts when a report is given.
pub fn allocation_to_json(instance: &Instance, alloc: &Allocation, report: Option<&FairnessReport>) -> Value {
    let bundles: Vec<Vec<String>> = alloc.bundles().into_iter().map(|b| labels_of(instance, b)).collect();
    let mut doc = json!({ "bundles": bundles });
    if let Some(report) = report {
        let happy: Vec<[usize; 2]> = report.happy.iter().zip(&report.sizes).map(|(&a, &n)| [a, n]).collect();
        doc["happy"] = json!(happy);
        doc["h"] = json!(report.h().to_string());
        doc["verdicts"] = json!(report.verdicts);
    }
    doc
}

fn amount_to_json(amount: &Amount) -> Value {
    match amount {
        Amount::Exact(d) => json!(d.to_decimal()),
        Amount::Real(x) => json!(x),
    }
}

fn bound_to_json(bound: &Bound) -> Value {
    match bound {
        Bound::Exact(q) => json!(q.to_string()),
        Bound::Real(x) => json!(x),
    }
}

fn trace_to_json(instance: &Instance, trace: &Trace) -> Value {
    let label = |g: usize| instance.label(g).to_string();
    match trace {
        Trace::Picks { play_order, turns } => {
            let turns: Vec<Value> = turns
                .iter()
                .map(|t| {
                    let weights: serde_json::Map<String, Value> = t
                        .good_weights
                        .iter()
                        .map(|(g, w)| (label(*g), amount_to_json(w)))
                        .collect();
                    json!({
                        "turn": t.turn,
                        "group": t.group,
                        "remaining": labels_of(instance, t.remaining),
                        "weights": weights,
                        "pick": label(t.pick),
                    })
                })
                .collect();
            json!({"kind": "picks", "play_order": play_order, "turns": turns})
        }
        Trace::Line { label: name, steps } => {
            let steps: Vec<Value> = steps
                .iter()
                .map(|s| {
                    let answers: Vec<Value> = s
                        .answers
                        .iter()
                        .map(|&(group, yes, of)| json!({"group": group, "yes": yes, "of": of}))
                        .collect();
                    json!({
                        "left": s.left.iter().map(|&g| label(g)).collect::<Vec<_>>(),
                        "right": s.right.iter().map(|&g| label(g)).collect::<Vec<_>>(),
                        "answers": answers,
                        "claimed_by": s.claimed_by,
                        "remainder_to": s.remainder_to,
                    })
                })
                .collect();
            json!({"kind": "line", "criterion": name, "steps": steps})
        }
        Trace::LocalSearch { initial, moves } => {
            let initial: Vec<Vec<String>> = initial.iter().map(|b| labels_of(instance, *b)).collect();
            let moves: Vec<Value> = moves
                .iter()
                .map(|m| json!({"good": label(m.good), "from": m.from, "to": m.to}))
                .collect();
            json!({"kind": "local-search", "initial": initial, "moves": moves})
        }
        Trace::Shortcut { group, good, rest_to } => {
            json!({"kind": "shortcut", "group": group, "good": label(*good), "rest_to": rest_to})
        }
        Trace::Sequence(parts) => {
            let parts: Vec<Value> = parts.iter().map(|t| trace_to_json(instance, t)).collect();
            json!({"kind": "sequence", "parts": parts})
        }
    }
}

/// Run document: protocol, criteria, allocation with its report, the
/// promised per-group fractions and, optionally, the trace.
pub fn run_to_json(instance: &Instance, run: &RunResult, with_trace: bool) -> Value {
    let mut doc = allocation_to_json(instance, &run.allocation, Some(&run.report));
    doc["protocol"] = json!(run.protocol);
    doc["criteria"] = json!(run.criteria.iter().map(ToString::to_string).collect::<Vec<_>>());
    doc["guarantee"] = json!(run.guarantee.iter().map(bound_to_json).collect::<Vec<_>>());
    if let Some(ledger) = &run.ledger {
        let balances: Vec<Value> = ledger
            .final_group_balances
            .iter()
            .map(|(g, b)| json!({"group": g, "balance": amount_to_json(b)}))
            .collect();
        doc["ledger"] = json!({"final_group_balances": balances, "violations": ledger.violations});
    }
    if with_trace {
        doc["trace"] = trace_to_json(instance, &run.trace);
    }
    doc
}

/// Oracle document: the best fraction, the witness allocation and the
/// number of allocations scored.
pub fn oracle_to_json(instance: &Instance, criteria: &[Criterion], result: &OracleResult) -> Value {
    let report = crate::fairness::democratic_report_per_group(instance, &result.witness, criteria).ok();
    json!({
        "criteria": criteria.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "best_h": result.best_h.to_string(),
        "witness": allocation_to_json(instance, &result.witness, report.as_ref()),
        "allocations_examined": result.allocations_examined.to_string(),
    })
}

pub fn exists_to_json(instance: &Instance, criteria: &[Criterion], h: &Rational, result: &ExistsResult) -> Value {
    json!({
        "criteria": criteria.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "h": h.to_string(),
        "exists": result.exists,
        "witness": result.witness.as_ref().map(|w| allocation_to_json(instance, w, None)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, ratio};

    const B1: &str = r#"{
        "goods": ["v", "w", "x", "y", "z"],
        "groups": [
            [{"type": "binary", "desired": ["v", "x"], "count": 2},
             {"type": "binary", "desired": ["v", "x", "y"]},
             {"type": "binary", "desired": ["w", "x", "y", "z"], "count": 5},
             {"type": "binary", "desired": ["w", "z"], "count": 3}],
            [{"type": "binary", "desired": ["w", "x", "y", "z"], "count": 2},
             {"type": "binary", "desired": ["v", "z"], "count": 3}]
        ]
    }"#;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("2/6").unwrap(), ratio(1, 3));
        for bad in ["", "1/0", "x", "1.2.3", "-"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parses_sample_instance() {
        let inst = parse_instance(B1).unwrap();
        assert_eq!((inst.m(), inst.k()), (5, 2));
        assert_eq!(inst.group_sizes(), vec![11, 5]);
        assert_eq!(inst.group(0)[2].valuation, Valuation::binary([0, 2, 3]));
    }

    #[test]
    fn round_trip() {
        let text = r#"{
            "goods": ["a", "b"],
            "groups": [
                [{"type": "additive", "values": [1, "1/2"], "id": "ann"}],
                [{"type": "tabular", "values": {"": 0, "a": 1, "b": "0.5", "ab": 1}}]
            ],
            "order": ["b", "a"],
            "group_labels": ["left", "right"]
        }"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.group(0)[0].id, "ann");
        let again = parse_instance(&serialize_instance(&inst)).unwrap();
        assert_eq!(inst, again);
        let b1 = parse_instance(B1).unwrap();
        assert_eq!(parse_instance(&serialize_instance(&b1)).unwrap(), b1);
    }

    #[test]
    fn validation_errors() {
        let one_group = r#"{"goods": ["g"], "groups": [[{"type": "binary", "desired": ["g"]}]]}"#;
        assert_eq!(parse_instance(one_group), Err(Error::TooFewGroups(1)));
        let non_monotone = r#"{"goods": ["a", "b"], "groups": [
            [{"type": "tabular", "values": {"": 0, "a": 2, "b": 0, "a,b": 1}}],
            [{"type": "binary", "desired": []}]]}"#;
        assert!(matches!(parse_instance(non_monotone), Err(Error::NonMonotone { .. })));
        let short = r#"{"goods": ["a", "b"], "groups": [
            [{"type": "additive", "values": [1]}], [{"type": "binary", "desired": []}]]}"#;
        assert!(matches!(parse_instance(short), Err(Error::DimensionMismatch { .. })));
        let unknown = r#"{"goods": ["a"], "groups": [
            [{"type": "binary", "desired": ["q"]}], [{"type": "binary", "desired": []}]]}"#;
        assert_eq!(parse_instance(unknown), Err(Error::UnknownGood("q".into())));
        assert!(matches!(parse_instance("{"), Err(Error::Malformed(_))));
    }

    #[test]
    fn allocation_documents() {
        let inst = parse_instance(B1).unwrap();
        let alloc = parse_allocation(r#"{"bundles": [["w", "x", "y"], ["v", "z"]]}"#, &inst).unwrap();
        assert_eq!(alloc.assignment(), &[1, 0, 0, 0, 1]);
        let doc = allocation_to_json(&inst, &alloc, None);
        assert_eq!(doc["bundles"], json!([["w", "x", "y"], ["v", "z"]]));
        assert!(parse_allocation(r#"{"bundles": [["w"], ["v"]]}"#, &inst).is_err());
    }
}
