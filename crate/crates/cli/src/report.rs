use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig, ToleranceReport};
use crate::errors::{CliError, CliResult};

/// Uniform report envelope: every command emits one of these. Identical
/// inputs and seed produce byte-identical output (ordered keys, no clocks).
pub struct Report {
    pub command: &'static str,
    /// Structured payload for the JSON format.
    pub result: Value,
    /// Human-oriented lines for the text format.
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, result: Value, lines: Vec<String>) -> Self {
        Self { command, result, lines }
    }

    fn render(&self, run: &RunConfig) -> String {
        match run.format {
            OutputFormat::Json => {
                let envelope = json!({
                    "tool": "ctxobs",
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": self.command,
                    "seed": run.seed,
                    "tolerances": serde_json::to_value(ToleranceReport::from(&run.tolerances))
                        .expect("tolerances serialize"),
                    "result": self.result,
                });
                let mut text =
                    serde_json::to_string_pretty(&envelope).expect("report serializes");
                text.push('\n');
                text
            }
            OutputFormat::Text => {
                let mut out = String::new();
                out.push_str(&format!("ctxobs {} (seed {})\n", self.command, run.seed));
                out.push_str(&format!(
                    "tolerances: rank {:.1e}, cluster {:.1e}, hermitian {:.1e}, compare {:.1e}\n",
                    run.tolerances.tol_rank,
                    run.tolerances.tol_eig_cluster,
                    run.tolerances.tol_hermitian,
                    run.tolerances.tol_compare,
                ));
                for line in &self.lines {
                    out.push_str(line);
                    out.push('\n');
                }
                out
            }
        }
    }

    /// Writes the report to the configured sink.
    pub fn emit(&self, run: &RunConfig) -> CliResult<()> {
        let rendered = self.render(run);
        match &run.out {
            Some(path) => std::fs::write(path, rendered).map_err(|e| {
                CliError::input("output-unwritable", format!("{}: {e}", path.display()))
            }),
            None => {
                print!("{rendered}");
                Ok(())
            }
        }
    }
}

/// Compact text rendering of a small complex matrix.
pub fn matrix_lines(m: &ctxobs_core::linalg::ComplexMatrix, indent: &str) -> Vec<String> {
    (0..m.dim())
        .map(|i| {
            let cells: Vec<String> = (0..m.dim())
                .map(|j| {
                    let z = m.get(i, j);
                    if z.im.abs() < 5e-13 {
                        format!("{:>9.6}", z.re)
                    } else {
                        format!("{:>9.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            format!("{indent}[{}]", cells.join(", "))
        })
        .collect()
}
