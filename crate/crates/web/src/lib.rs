//! Browser bindings: run a protocol, judge an allocation, print a budget table.

use wasm_bindgen::prelude::*;

use groupfair::budgets::{self, BudgetTable};
use groupfair::fairness::{democratic_report_per_group, parse_criteria};
use groupfair::format::{allocation_to_json, parse_allocation, parse_instance};
use groupfair::protocols::{self, render};

fn text<E: ToString>(e: E) -> String {
    e.to_string()
}

/// Trace text of `protocol` on an instance document. `criteria` is only read
/// by the two-group voting protocols; `first_group` is 1-based.
pub fn run_trace(instance: &str, protocol: &str, criteria: &str, first_group: usize) -> Result<String, String> {
    let instance = parse_instance(instance).map_err(text)?;
    let criteria = || parse_criteria(criteria).map_err(text);
    let run = match protocol {
        "rwav2" => protocols::rwav2(&instance, &criteria()?, first_group.saturating_sub(1)),
        "cwav2" => protocols::cwav2(&instance, &criteria()?, 0),
        "rwav2-enhanced" => protocols::rwav2_enhanced(&instance, 2),
        "rwavk" => protocols::rwavk(&instance, instance.k()),
        "line2" => protocols::line2(&instance),
        "linek" => protocols::linek(&instance),
        "identical" => protocols::identical_local_search(&instance),
        "best-k" => protocols::best_k_protocol(&instance),
        other => return Err(format!("unknown protocol {other:?}")),
    }
    .map_err(text)?;
    Ok(render::render_result(&instance, &run))
}

/// Allocation document with per-agent verdicts.
pub fn check_json(instance: &str, allocation: &str, criteria: &str) -> Result<String, String> {
    let instance = parse_instance(instance).map_err(text)?;
    let alloc = parse_allocation(allocation, &instance).map_err(text)?;
    let criteria = parse_criteria(criteria).map_err(text)?;
    let report = democratic_report_per_group(&instance, &alloc, &criteria).map_err(text)?;
    let doc = allocation_to_json(&instance, &alloc, Some(&report));
    serde_json::to_string_pretty(&doc).map_err(text)
}

/// `B`, `w` or `C` for `0 <= r <= r_max`, `0 <= s <= s_max` at three decimals,
/// one row per `r`.
pub fn table_text(which: &str, r_max: u32, s_max: u32) -> Result<String, String> {
    let table = BudgetTable::new(i64::from(r_max));
    let mut out = String::new();
    for r in 0..=i64::from(r_max) {
        let row = (0..=i64::from(s_max))
            .map(|s| {
                let value = match which {
                    "B" => table.budget(r, s),
                    "w" => table.weight(r, s),
                    "C" => table.coin_budget(r, s),
                    other => return Err(format!("unknown table {other:?}")),
                }
                .map_err(text)?;
                Ok(budgets::round_rational(&value.to_rational(), 3))
            })
            .collect::<Result<Vec<_>, String>>()?;
        out.push_str(&format!("{r:>3}  {}\n", row.join(" ")));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn run_protocol(instance: &str, protocol: &str, criteria: &str, first_group: usize) -> Result<String, JsValue> {
    run_trace(instance, protocol, criteria, first_group).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn check_allocation(instance: &str, allocation: &str, criteria: &str) -> Result<String, JsValue> {
    check_json(instance, allocation, criteria).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn budget_table(which: &str, r_max: u32, s_max: u32) -> Result<String, JsValue> {
    table_text(which, r_max.min(40), s_max.min(40)).map_err(|e| JsValue::from_str(&e))
}
