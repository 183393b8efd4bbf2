use serde_json::json;

use ctxobs_core::acceptance;

use crate::commands::CommandOutcome;
use crate::config::RunConfig;
use crate::errors::EXIT_VIOLATIONS;
use crate::report::Report;

pub fn run(run_cfg: &RunConfig) -> CommandOutcome {
    let outcomes = acceptance::run_all(run_cfg.seed);
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let total = outcomes.len();

    let mut lines: Vec<String> = outcomes.iter().map(|o| o.line()).collect();
    lines.push(format!("{passed}/{total} criteria passed"));

    let criteria: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "number": o.number,
                "name": o.name,
                "passed": o.passed,
                "details": o.details,
            })
        })
        .collect();
    let result = json!({
        "passed": passed,
        "total": total,
        "criteria": criteria,
    });
    let exit = if passed == total { 0 } else { EXIT_VIOLATIONS };
    Ok((Report::new("selftest", result, lines), exit))
}
