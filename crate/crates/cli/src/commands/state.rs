use std::path::Path;

use serde_json::{json, Map, Value};

use ctxobs_core::states;

use crate::commands::restrict::load_context_arg;
use crate::commands::CommandOutcome;
use crate::config::RunConfig;
use crate::errors::{CliError, EXIT_VIOLATIONS};
use crate::formats;
use crate::report::{matrix_lines, Report};

pub fn extend(measure_path: &Path, apply_path: Option<&Path>, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let (ctx, mu) = formats::parse_measure(&formats::load_json(measure_path)?, cfg, "")?;
    let functional = states::extend_measure(&ctx, &mu, cfg)?;

    let mut lines = vec![
        format!("context atoms: {}", ctx.atom_count()),
        format!(
            "functional on atoms: [{}]",
            functional
                .atom_values()
                .iter()
                .map(|v| format!("{v:.9}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        "positive, normalized, representation independent by construction".to_string(),
    ];
    let mut result = json!({
        "context": formats::context_json(&ctx),
        "atom_values": functional.atom_values(),
    });
    if let Some(path) = apply_path {
        let op = formats::parse_operator(&formats::load_json(path)?, cfg, "")?;
        let value = functional.eval(&op, cfg)?;
        lines.push(format!("value on the supplied operator: {value:.9}"));
        result["applied_value"] = json!(value);
    }
    Ok((Report::new("state extend", result, lines), 0))
}

pub fn restrict(state_path: &Path, context_arg: &str, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let value = formats::load_json(state_path)?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::input("schema-violation", "state file must be an object"))?;
    let ctx = formats::parse_context(
        obj.get("context")
            .ok_or_else(|| CliError::input("schema-violation", "missing \"context\""))?,
        None,
        cfg,
        "/context",
    )?;
    let weights: Vec<f64> = obj
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::input("schema-violation", "missing \"weights\" array"))?
        .iter()
        .map(|w| w.as_f64().ok_or_else(|| CliError::input("schema-violation", "weight must be a number")))
        .collect::<Result<_, _>>()?;
    let state = states::ContextState::new(ctx.clone(), weights, cfg)
        .map_err(|e| CliError::input("schema-violation", e.to_string()))?;

    let target = load_context_arg(context_arg, ctx.ambient_dim(), run_cfg)?;
    let restricted = states::restrict_state(&state, &target, cfg)?;

    let lines = vec![
        format!("source atoms: {}", ctx.atom_count()),
        format!("target atoms: {}", target.atom_count()),
        format!(
            "restricted weights: [{}]",
            restricted.weights().iter().map(|w| format!("{w:.9}")).collect::<Vec<_>>().join(", ")
        ),
    ];
    let result = json!({
        "target": formats::context_json(&target),
        "weights": restricted.weights(),
    });
    Ok((Report::new("state restrict", result, lines), 0))
}

pub fn validate(section_path: &Path, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let (ids, section) =
        formats::parse_state_section(&formats::load_json(section_path)?, cfg, "")?;
    let validation = states::validate_state_section(&section, cfg)?;

    let mut lines = vec![
        format!("contexts: {}", section.family().len()),
        format!("pairs checked: {}", validation.pairs_checked),
        format!("violations: {}", validation.violations.len()),
    ];
    for v in &validation.violations {
        lines.push(format!(
            "  states at {} and {} disagree on their meet (defect {:.3e})",
            ids[v.context_a], ids[v.context_b], v.defect
        ));
    }
    let violations: Vec<Value> = validation
        .violations
        .iter()
        .map(|v| {
            json!({
                "context_a": ids[v.context_a],
                "context_b": ids[v.context_b],
                "defect": v.defect,
            })
        })
        .collect();
    let result = json!({
        "ok": validation.ok,
        "pairs_checked": validation.pairs_checked,
        "violations": violations,
    });
    let exit = if validation.ok { 0 } else { EXIT_VIOLATIONS };
    Ok((Report::new("state validate", result, lines), exit))
}

pub fn c2_demo(run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let out = states::c2_counterexample(cfg)?;
    let validation = states::validate_state_section(&out.section, cfg)?;

    let lines = vec![
        "three rank-one projections in dimension 2: the first axis, the".to_string(),
        "plane diagonal, and the top eigenprojection of their sum".to_string(),
        format!("sum decomposition: P + Q = a R + b (I - R) with a = {:.9}, b = {:.9}", out.a, out.b),
        "section: weight 0 on each distinguished line, 1 on its complement".to_string(),
        format!(
            "compatibility: {} over {} pairs (pairwise meets are the trivial context)",
            if validation.ok { "ok" } else { "VIOLATED" },
            validation.pairs_checked
        ),
        format!(
            "linearity violation: phi(P) + phi(Q) = 0 but phi(P + Q) = b = {:.9}",
            out.linearity_residual
        ),
        "conclusion: a valid state section that no linear state induces".to_string(),
    ];
    let mut states_json = Map::new();
    for (i, state) in out.section.states().iter().enumerate() {
        states_json.insert(format!("context-{i}"), json!(state.weights()));
    }
    let result = json!({
        "p": formats::projection_json(&out.p),
        "q": formats::projection_json(&out.q),
        "r": formats::projection_json(&out.r),
        "a": out.a,
        "b": out.b,
        "states": Value::Object(states_json),
        "validation": { "ok": validation.ok, "pairs_checked": validation.pairs_checked },
        "linearity_residual": out.linearity_residual,
    });
    // The demo asserts the linearity violation, hence the violations code.
    Ok((Report::new("state c2-demo", result, lines), EXIT_VIOLATIONS))
}

pub fn fit(section_path: &Path, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let (_, section) = formats::parse_state_section(&formats::load_json(section_path)?, cfg, "")?;
    let fit = states::fit_density(&section, cfg)?;

    let mut lines = vec![
        format!("iterations: {}", fit.iterations),
        format!("projected gradient norm: {:.3e}", fit.gradient_norm),
        format!("max constraint residual: {:.9}", fit.residual),
        "fitted density matrix:".to_string(),
    ];
    lines.extend(matrix_lines(fit.rho.matrix(), "  "));
    let result = json!({
        "rho": formats::operator_json(&fit.rho),
        "residual": fit.residual,
        "iterations": fit.iterations,
        "gradient_norm": fit.gradient_norm,
    });
    Ok((Report::new("state fit", result, lines), 0))
}

pub fn quasistate(
    op_path: &Path,
    vector_path: &Path,
    samples: usize,
    run_cfg: &RunConfig,
) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let op = formats::parse_operator(&formats::load_json(op_path)?, cfg, "")?;
    let x = formats::parse_unit_vector(&formats::load_json(vector_path)?, "")?;
    let eval = states::quasistate_eval(&x, &op, samples, run_cfg.seed, cfg)?;

    let lines = vec![
        format!("value at the line of x: {:.9}", eval.value),
        format!("expectation <Ax, x>:    {:.9}", eval.expectation),
        format!(
            "sampled infimum over {} projections above the line: {:.9}",
            eval.samples, eval.sampled_inf
        ),
        "the sampled infimum is reported as evidence, not asserted".to_string(),
    ];
    let result = json!({
        "value": eval.value,
        "expectation": eval.expectation,
        "sampled_inf": eval.sampled_inf,
        "samples": eval.samples,
    });
    Ok((Report::new("state quasistate", result, lines), 0))
}
