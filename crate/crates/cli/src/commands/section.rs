use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use ctxobs_core::context::{self, AbelianContext};
use ctxobs_core::generate;
use ctxobs_core::plattice::{self, Projection};
use ctxobs_core::presheaf::{self, ContextFamily, GlobalSection};

use crate::commands::CommandOutcome;
use crate::config::RunConfig;
use crate::errors::EXIT_VIOLATIONS;
use crate::formats;
use crate::report::Report;
use crate::AspectModeArg;

/// Ids covering a meet-closed family: the listed ids first, synthesized
/// `meet-k` ids for contexts added by the closure.
fn closure_ids(listed: &[String], family_len: usize) -> Vec<String> {
    let mut ids = listed.to_vec();
    for k in 0..family_len - listed.len() {
        ids.push(format!("meet-{k}"));
    }
    ids
}

fn section_json(ids: &[String], section: &GlobalSection) -> Value {
    let mut contexts = Map::new();
    let mut assignment = Map::new();
    for (id, (ctx, value)) in
        ids.iter().zip(section.family().contexts().iter().zip(section.values()))
    {
        contexts.insert(id.clone(), formats::context_json(ctx));
        assignment.insert(id.clone(), formats::operator_json(value));
    }
    json!({
        "ambient_dim": section.family().ambient_dim(),
        "contexts": Value::Object(contexts),
        "assignment": Value::Object(assignment),
    })
}

fn violations_json(ids: &[String], violations: &[presheaf::Violation]) -> Vec<Value> {
    violations
        .iter()
        .map(|v| {
            json!({
                "context_a": ids[v.context_a],
                "context_b": ids[v.context_b],
                "defect": v.defect,
            })
        })
        .collect()
}

pub fn from_op(
    op_path: &Path,
    family_path: &Path,
    mode: AspectModeArg,
    run_cfg: &RunConfig,
) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let op = formats::parse_operator(&formats::load_json(op_path)?, cfg, "")?;
    let parsed = formats::parse_family(&formats::load_json(family_path)?, cfg, "")?;
    let ids = closure_ids(&parsed.ids, parsed.family.len());

    let section = presheaf::section_from_operator(&op, parsed.family, mode.aspect(), cfg)?;
    let validation = presheaf::validate_section(&section, mode.aspect(), cfg)?;

    let lines = vec![
        format!("mode: {}", mode.name()),
        format!(
            "family: {} contexts ({} added by meet closure)",
            section.family().len(),
            parsed.added_by_closure
        ),
        format!(
            "compatibility: {} over {} pairs",
            if validation.ok { "ok" } else { "VIOLATED" },
            validation.pairs_checked
        ),
    ];
    let result = json!({
        "mode": mode.name(),
        "added_by_closure": parsed.added_by_closure,
        "section": section_json(&ids, &section),
        "validation": {
            "ok": validation.ok,
            "pairs_checked": validation.pairs_checked,
            "violations": violations_json(&ids, &validation.violations),
        },
    });
    Ok((Report::new("section from-op", result, lines), 0))
}

pub fn validate(section_path: &Path, mode: AspectModeArg, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let (ids, section) = formats::parse_section(&formats::load_json(section_path)?, cfg, "")?;
    let validation = presheaf::validate_section(&section, mode.aspect(), cfg)?;

    let mut lines = vec![
        format!("mode: {}", mode.name()),
        format!("contexts: {}", section.family().len()),
        format!("pairs checked: {}", validation.pairs_checked),
        format!("violations: {}", validation.violations.len()),
    ];
    for v in &validation.violations {
        lines.push(format!(
            "  contexts {} and {} disagree on their meet (defect {:.3e})",
            ids[v.context_a], ids[v.context_b], v.defect
        ));
    }
    let result = json!({
        "mode": mode.name(),
        "ok": validation.ok,
        "pairs_checked": validation.pairs_checked,
        "violations": violations_json(&ids, &validation.violations),
    });
    let exit = if validation.ok { 0 } else { EXIT_VIOLATIONS };
    Ok((Report::new("section validate", result, lines), exit))
}

pub fn glue(section_path: &Path, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let (_, section) = formats::parse_section(&formats::load_json(section_path)?, cfg, "")?;
    let table = presheaf::glue_section(&section, cfg)?;

    let mut lines = vec![format!("table entries: {}", table.entries().len())];
    for (p, value) in table.entries() {
        lines.push(format!("  rank-{} projection -> {:.9}", p.rank(), value));
    }
    let entries: Vec<Value> = table
        .entries()
        .iter()
        .map(|(p, value)| {
            json!({
                "projection": formats::projection_json(p),
                "rank": p.rank(),
                "value": value,
            })
        })
        .collect();
    let result = json!({ "entries": entries });
    Ok((Report::new("section glue", result, lines), 0))
}

/// The two non-commuting lines used by the demo: the first coordinate axis
/// and the diagonal of the first coordinate plane.
fn demo_lines() -> (Projection, Projection) {
    let d = 1.0 / 2f64.sqrt();
    let p1 = Projection::onto_coordinates(3, &[0]);
    let p2 = Projection::onto_line(vec![
        Complex64::new(d, 0.0),
        Complex64::new(d, 0.0),
        Complex64::new(0.0, 0.0),
    ])
    .expect("unit vector");
    (p1, p2)
}

/// Builds the demo family: the structured contexts of the construction plus
/// seeded random ones up to the requested size.
pub fn demo_family(
    p1: &Projection,
    p2: &Projection,
    total: usize,
    seed: u64,
    cfg: &ctxobs_core::linalg::ToleranceConfig,
) -> ctxobs_core::Result<ContextFamily> {
    let mut rng = generate::rng(seed);
    let mut contexts = vec![
        AbelianContext::trivial(3),
        context::context_from_commuting(3, std::slice::from_ref(p1), cfg)?,
        context::context_from_commuting(3, std::slice::from_ref(p2), cfg)?,
    ];
    let orthogonal_line = plattice::complement(&plattice::join(p1, p2, cfg)?, cfg)?;
    contexts.push(context::context_from_commuting(3, &[orthogonal_line], cfg)?);
    while contexts.len() < total {
        contexts.push(generate::random_maximal_context_containing(p1, &mut rng, cfg));
        contexts.push(generate::random_maximal_context_containing(p2, &mut rng, cfg));
        contexts.push(generate::random_maximal_context(3, &mut rng, cfg));
    }
    ContextFamily::new(3, contexts, cfg)
}

pub fn c3_demo(total_contexts: usize, run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let (p1, p2) = demo_lines();
    let family = demo_family(&p1, &p2, total_contexts, run_cfg.seed, cfg)?;
    let family_size = family.len();
    let witness = presheaf::c3_counterexample(&p1, &p2, family, cfg)?;
    let validation = presheaf::validate_section(&witness.section, AspectModeArg::Upper.aspect(), cfg)?;
    let report = presheaf::refute_inducing_operator(&witness, cfg)?;

    let candidate_1 = presheaf::is_induced_by(
        &witness.section,
        &report.forced_by_p1,
        AspectModeArg::Upper.aspect(),
        cfg,
    )?;
    let candidate_2 = presheaf::is_induced_by(
        &witness.section,
        &report.forced_by_p2,
        AspectModeArg::Upper.aspect(),
        cfg,
    )?;

    let lines = vec![
        format!("family: {family_size} contexts over dimension 3"),
        format!(
            "section rule: a context containing line 1 gets its complement, one containing line 2 gets that complement, every other context gets the identity"
        ),
        format!(
            "compatibility: {} over {} pairs ({} violations)",
            if validation.ok { "ok" } else { "VIOLATED" },
            validation.pairs_checked,
            validation.violations.len()
        ),
        "refutation: every section value is a projection, so an inducing operator".to_string(),
        "would be a rank-2 projection forced to equal both complements at once;".to_string(),
        format!(
            "the two forced candidates differ by operator norm {:.6}",
            report.contradiction_norm
        ),
        format!(
            "candidate (complement of line 1) fails at context index {} (max defect {:.6})",
            report.candidate_i_minus_p1_violation, candidate_1.max_defect
        ),
        format!(
            "candidate (complement of line 2) fails at context index {} (max defect {:.6})",
            report.candidate_i_minus_p2_violation, candidate_2.max_defect
        ),
        "conclusion: the section is compatible everywhere yet induced by no operator".to_string(),
    ];
    let result = json!({
        "family_size": family_size,
        "line_1": formats::projection_json(&witness.p1),
        "line_2": formats::projection_json(&witness.p2),
        "validation": {
            "ok": validation.ok,
            "pairs_checked": validation.pairs_checked,
            "violations": validation.violations.len(),
        },
        "refutation": {
            "all_values_are_projections": report.all_values_are_projections,
            "contradiction_norm": report.contradiction_norm,
            "candidate_complement_1": {
                "operator": formats::operator_json(&report.forced_by_p1),
                "violating_context": report.candidate_i_minus_p1_violation,
                "max_defect": candidate_1.max_defect,
            },
            "candidate_complement_2": {
                "operator": formats::operator_json(&report.forced_by_p2),
                "violating_context": report.candidate_i_minus_p2_violation,
                "max_defect": candidate_2.max_defect,
            },
        },
    });
    // The demo asserts a violation (non-inducibility), so it exits with the
    // violations code by design.
    Ok((Report::new("section c3-demo", result, lines), EXIT_VIOLATIONS))
}
