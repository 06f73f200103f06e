use groupfair_web::{check_json, run_trace, table_text};

const INSTANCE: &str = include_str!("../../core/tests/data/rwav_sample.json");

#[test]
fn runs_render_the_command_line_trace() {
    let trace = run_trace(INSTANCE, "rwav2", "1-out-of-2-mms,1-of-best-2", 2).unwrap();
    assert!(trace.contains("RWAV protocol - Group 2 plays first"));
    assert!(trace.contains("happy members = 11/11"));
    assert!(trace.contains("happy members = 5/5"));
}

#[test]
fn errors_come_back_as_messages() {
    assert!(run_trace(INSTANCE, "vote", "mms", 1)
        .unwrap_err()
        .contains("unknown protocol"));
    assert!(run_trace(INSTANCE, "rwav2", "best", 1)
        .unwrap_err()
        .contains("unknown criterion"));
    assert!(run_trace("{", "rwav2", "mms", 1).is_err());
}

#[test]
fn checks_report_verdicts() {
    let doc = check_json(
        INSTANCE,
        r#"{"bundles": [["w", "x", "y"], ["v", "z"]]}"#,
        "1-out-of-2-mms,1-of-best-2",
    )
    .unwrap();
    let doc: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(doc["happy"], serde_json::json!([[11, 11], [5, 5]]));
}

#[test]
fn tables_use_three_decimals() {
    let text = table_text("w", 3, 2).unwrap();
    assert_eq!(
        text.lines().nth(3).unwrap().split_whitespace().collect::<Vec<_>>(),
        ["3", "0.000", "0.125", "0.375"]
    );
    assert!(table_text("Q", 1, 1).is_err());
}
