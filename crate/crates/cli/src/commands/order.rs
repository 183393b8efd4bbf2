use std::path::{Path, PathBuf};

use serde_json::json;

use ctxobs_core::linalg::HermitianOperator;
use ctxobs_core::spectral;

use crate::commands::CommandOutcome;
use crate::config::RunConfig;
use crate::errors::CliError;
use crate::formats;
use crate::report::{matrix_lines, Report};

pub fn compare(a_path: &Path, b_path: &Path, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let a = formats::parse_operator(&formats::load_json(a_path)?, cfg, "")?;
    let b = formats::parse_operator(&formats::load_json(b_path)?, cfg, "")?;
    let a_leq_b = spectral::spectral_leq(&a, &b, cfg)?;
    let b_leq_a = spectral::spectral_leq(&b, &a, cfg)?;
    let relation = match (a_leq_b, b_leq_a) {
        (true, true) => "equal",
        (true, false) => "a < b",
        (false, true) => "b < a",
        (false, false) => "incomparable",
    };
    let lines = vec![
        format!("a <=_s b: {a_leq_b}"),
        format!("b <=_s a: {b_leq_a}"),
        format!("relation: {relation}"),
    ];
    let result = json!({
        "a_leq_b": a_leq_b,
        "b_leq_a": b_leq_a,
        "relation": relation,
    });
    Ok((Report::new("order compare", result, lines), 0))
}

fn load_operators(paths: &[PathBuf], run_cfg: &RunConfig) -> crate::errors::CliResult<Vec<HermitianOperator>> {
    if paths.is_empty() {
        return Err(CliError::input("empty-operator-list", "at least one operator file is required"));
    }
    paths
        .iter()
        .map(|p| formats::parse_operator(&formats::load_json(p)?, &run_cfg.tolerances, ""))
        .collect()
}

pub fn lattice(paths: &[PathBuf], meet: bool, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let ops = load_operators(paths, run_cfg)?;
    let (command, result_op): (&'static str, HermitianOperator) = if meet {
        ("order meet", spectral::spectral_meet(&ops, cfg)?)
    } else {
        ("order join", spectral::spectral_join(&ops, cfg)?)
    };
    // The result bounds every input in the spectral order.
    let bounds: Vec<bool> = ops
        .iter()
        .map(|op| {
            if meet {
                spectral::spectral_leq(&result_op, op, cfg)
            } else {
                spectral::spectral_leq(op, &result_op, cfg)
            }
        })
        .collect::<Result<_, _>>()?;
    let family = spectral::family_from_operator(&result_op, cfg)?;

    let mut lines = vec![
        format!("operators: {}", ops.len()),
        format!("result spectrum: {:?}", family.jumps()),
        "result operator:".to_string(),
    ];
    lines.extend(matrix_lines(result_op.matrix(), "  "));
    lines.push(format!("bounds every input: {}", bounds.iter().all(|b| *b)));

    let result = json!({
        "operator": formats::operator_json(&result_op),
        "spectrum": family.jumps(),
        "bounds_inputs": bounds,
    });
    Ok((Report::new(command, result, lines), 0))
}
