use std::path::Path;

use serde_json::json;

use ctxobs_core::restrict;
use ctxobs_core::spectral;

use crate::commands::CommandOutcome;
use crate::config::RunConfig;
use crate::formats;
use crate::report::{matrix_lines, Report};

pub fn run(op_path: &Path, points: &[f64], run_cfg: &RunConfig) -> CommandOutcome {
    let cfg = &run_cfg.tolerances;
    let op = formats::parse_operator(&formats::load_json(op_path)?, cfg, "")?;
    let graining = restrict::coarse_grain(&op, points, cfg)?;
    let riemann = restrict::riemann_lower_sum(&op, points, cfg)?;
    let upper_spectrum = spectral::family_from_operator(&graining.upper.operator, cfg)?;
    let deviation = graining.lower.operator.matrix().max_norm_diff(riemann.matrix());

    let mut lines = vec![
        format!("partition points: {points:?}"),
        format!(
            "cell ranks: {:?}",
            graining.context.atoms().iter().map(|a| a.rank()).collect::<Vec<_>>()
        ),
        format!("upper coefficients: {:?}", graining.upper.coefficients),
        format!("upper spectrum: {:?}", upper_spectrum.jumps()),
        "upper operator:".to_string(),
    ];
    lines.extend(matrix_lines(graining.upper.operator.matrix(), "  "));
    lines.push(format!("lower coefficients: {:?}", graining.lower.coefficients));
    lines.push("lower operator:".to_string());
    lines.extend(matrix_lines(graining.lower.operator.matrix(), "  "));
    lines.push("classical lower Riemann-Stieltjes sum on the same partition:".to_string());
    lines.extend(matrix_lines(riemann.matrix(), "  "));
    lines.push(format!("deviation between the two lower values: {deviation:.6}"));
    lines.push(
        "note: the lower aspect gives each cell the smallest spectral value the cell actually \
         contains; the classical lower sum uses the partition points themselves, which only \
         agree when the spectrum is dense at the cell boundaries"
            .to_string(),
    );

    let result = json!({
        "points": points,
        "cell_ranks": graining.context.atoms().iter().map(|a| a.rank()).collect::<Vec<_>>(),
        "upper": {
            "coefficients": graining.upper.coefficients,
            "operator": formats::operator_json(&graining.upper.operator),
            "spectrum": upper_spectrum.jumps(),
        },
        "lower": {
            "coefficients": graining.lower.coefficients,
            "operator": formats::operator_json(&graining.lower.operator),
        },
        "riemann_lower": formats::operator_json(&riemann),
        "lower_vs_riemann_deviation": deviation,
        "note": "the lower aspect assigns each cell the smallest contained spectral value; \
                 the classical lower sum assigns the partition points",
    });
    Ok((Report::new("coarse-grain", result, lines), 0))
}
