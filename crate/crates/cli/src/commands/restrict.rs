use std::path::Path;

use serde_json::json;

use ctxobs_core::context::AbelianContext;
use ctxobs_core::restrict;

use crate::commands::CommandOutcome;
use crate::config::RunConfig;
use crate::formats;
use crate::report::{matrix_lines, Report};
use crate::AspectModeArg;

/// Loads a context argument: the literal `trivial` or a file path.
pub fn load_context_arg(
    raw: &str,
    dim_hint: usize,
    run: &RunConfig,
) -> crate::errors::CliResult<AbelianContext> {
    if raw == "trivial" {
        return Ok(AbelianContext::trivial(dim_hint));
    }
    let value = formats::load_json(Path::new(raw))?;
    formats::parse_context(&value, Some(dim_hint), &run.tolerances, "")
}

pub fn run(op_path: &Path, context_arg: &str, mode: AspectModeArg, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let op = formats::parse_operator(&formats::load_json(op_path)?, cfg, "")?;
    let ctx = load_context_arg(context_arg, op.dim(), run_cfg)?;

    let (aspect, oracle) = match mode {
        AspectModeArg::Upper => (
            restrict::upper_aspect(&ctx, &op, cfg)?,
            restrict::upper_aspect_definitional(&ctx, &op, cfg)?,
        ),
        AspectModeArg::Lower => (
            restrict::lower_aspect(&ctx, &op, cfg)?,
            restrict::lower_aspect_definitional(&ctx, &op, cfg)?,
        ),
    };
    let coefficients_match = aspect.coefficients == oracle.coefficients;
    let operator_gap = aspect.operator.matrix().max_norm_diff(oracle.operator.matrix());

    let mut lines = vec![
        format!("mode: {}", mode.name()),
        format!("context atoms: {}", ctx.atom_count()),
        format!(
            "coefficients: [{}]",
            aspect
                .coefficients
                .iter()
                .map(|c| format!("{c:.9}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        "restricted operator:".to_string(),
    ];
    lines.extend(matrix_lines(aspect.operator.matrix(), "  "));
    lines.push(format!(
        "oracle cross-check (spectral-family route): coefficients match = {coefficients_match}, operator gap = {operator_gap:.3e}"
    ));

    let result = json!({
        "mode": mode.name(),
        "context": formats::context_json(&ctx),
        "coefficients": aspect.coefficients,
        "operator": formats::operator_json(&aspect.operator),
        "oracle": {
            "coefficients_match": coefficients_match,
            "operator_gap": operator_gap,
        },
    });
    Ok((Report::new("restrict", result, lines), 0))
}
