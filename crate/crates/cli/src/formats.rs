//! JSON input formats and their conversion into domain values.
//!
//! All parse failures carry a JSON-pointer-style path to the offending
//! element. Matrices are row-major nested arrays of `[re, im]` pairs;
//! contexts are given either as explicit projection matrices or as an
//! integer partition of a named orthonormal basis.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use ctxobs_core::context::AbelianContext;
use ctxobs_core::linalg::{ComplexMatrix, HermitianOperator, Subspace, ToleranceConfig};
use ctxobs_core::plattice::Projection;
use ctxobs_core::presheaf::{ContextFamily, GlobalSection};
use ctxobs_core::states::{ContextState, ProjectionMeasure, StateSection};

use crate::errors::{CliError, CliResult};

pub fn load_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::input("file-unreadable", format!("{}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::input(
            "json-malformed",
            format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()),
        )
    })
}

fn bad(path: &str, what: &str) -> CliError {
    CliError::input("schema-violation", format!("at {path}: {what}"))
}

fn as_array<'v>(v: &'v Value, path: &str) -> CliResult<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn as_object<'v>(v: &'v Value, path: &str) -> CliResult<&'v Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(path, "expected an object"))
}

fn as_number(v: &Value, path: &str) -> CliResult<f64> {
    v.as_f64().ok_or_else(|| bad(path, "expected a number"))
}

pub fn parse_complex(v: &Value, path: &str) -> CliResult<Complex64> {
    let pair = as_array(v, path)?;
    if pair.len() != 2 {
        return Err(bad(path, "expected a [re, im] pair"));
    }
    Ok(Complex64::new(
        as_number(&pair[0], &format!("{path}/0"))?,
        as_number(&pair[1], &format!("{path}/1"))?,
    ))
}

pub fn parse_vector(v: &Value, path: &str) -> CliResult<Vec<Complex64>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, entry)| parse_complex(entry, &format!("{path}/{i}")))
        .collect()
}

pub fn parse_matrix(v: &Value, path: &str) -> CliResult<ComplexMatrix> {
    let rows_json = as_array(v, path)?;
    let mut rows = Vec::with_capacity(rows_json.len());
    for (i, row) in rows_json.iter().enumerate() {
        rows.push(parse_vector(row, &format!("{path}/{i}"))?);
    }
    ComplexMatrix::from_rows(rows)
        .map_err(|e| bad(path, &format!("not a square complex matrix: {e}")))
}

/// Parses an operator file: either a bare matrix or `{"matrix": ...}`.
pub fn parse_operator(v: &Value, cfg: &ToleranceConfig, path: &str) -> CliResult<HermitianOperator> {
    let matrix_value = match v {
        Value::Object(map) => map.get("matrix").ok_or_else(|| bad(path, "missing \"matrix\""))?,
        _ => v,
    };
    let m = parse_matrix(matrix_value, path)?;
    HermitianOperator::new(m, cfg).map_err(|e| bad(path, &e.to_string()))
}

/// Parses a context: `"trivial"`, `{"atoms": [...]}`, or
/// `{"basis": [...], "partition": [[...], ...]}`.
pub fn parse_context(
    v: &Value,
    dim_hint: Option<usize>,
    cfg: &ToleranceConfig,
    path: &str,
) -> CliResult<AbelianContext> {
    if let Some(s) = v.as_str() {
        if s == "trivial" {
            let dim = dim_hint
                .ok_or_else(|| bad(path, "\"trivial\" needs an ambient dimension from context"))?;
            return Ok(AbelianContext::trivial(dim));
        }
        return Err(bad(path, "the only string form is \"trivial\""));
    }
    let obj = as_object(v, path)?;
    if let Some(atoms_json) = obj.get("atoms") {
        let atoms_array = as_array(atoms_json, &format!("{path}/atoms"))?;
        let mut atoms = Vec::with_capacity(atoms_array.len());
        for (i, entry) in atoms_array.iter().enumerate() {
            let sub_path = format!("{path}/atoms/{i}");
            let m = parse_matrix(entry, &sub_path)?;
            atoms.push(
                Projection::from_matrix(m, cfg).map_err(|e| bad(&sub_path, &e.to_string()))?,
            );
        }
        let dim = atoms.first().map(|a| a.dim()).unwrap_or(0);
        return AbelianContext::new(dim, atoms, cfg).map_err(|e| bad(path, &e.to_string()));
    }
    if let (Some(basis_json), Some(partition_json)) = (obj.get("basis"), obj.get("partition")) {
        let basis_array = as_array(basis_json, &format!("{path}/basis"))?;
        let mut basis = Vec::with_capacity(basis_array.len());
        for (i, entry) in basis_array.iter().enumerate() {
            basis.push(parse_vector(entry, &format!("{path}/basis/{i}"))?);
        }
        let dim = basis.len();
        let partition_array = as_array(partition_json, &format!("{path}/partition"))?;
        let mut seen = vec![false; dim];
        let mut atoms = Vec::with_capacity(partition_array.len());
        for (i, block_json) in partition_array.iter().enumerate() {
            let block_path = format!("{path}/partition/{i}");
            let block = as_array(block_json, &block_path)?;
            let mut columns = Vec::with_capacity(block.len());
            for (j, idx_json) in block.iter().enumerate() {
                let idx = idx_json
                    .as_u64()
                    .ok_or_else(|| bad(&format!("{block_path}/{j}"), "expected a basis index"))?
                    as usize;
                if idx >= dim {
                    return Err(bad(
                        &format!("{block_path}/{j}"),
                        &format!("index {idx} out of range for a {dim}-vector basis"),
                    ));
                }
                if seen[idx] {
                    return Err(bad(
                        &format!("{block_path}/{j}"),
                        &format!("basis index {idx} used twice"),
                    ));
                }
                seen[idx] = true;
                columns.push(basis[idx].clone());
            }
            let subspace = Subspace::from_orthonormal(dim, columns, cfg)
                .map_err(|e| bad(&block_path, &format!("basis block is not orthonormal: {e}")))?;
            atoms.push(Projection::from_subspace(subspace));
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(bad(
                &format!("{path}/partition"),
                &format!("basis index {missing} not covered by the partition"),
            ));
        }
        return AbelianContext::new(dim, atoms, cfg).map_err(|e| bad(path, &e.to_string()));
    }
    Err(bad(path, "expected \"trivial\", {\"atoms\": ...} or {\"basis\"+\"partition\": ...}"))
}

/// Shared head of family-shaped files: ambient dimension plus an id-sorted
/// list of contexts.
pub fn parse_context_map(
    v: &Value,
    cfg: &ToleranceConfig,
    path: &str,
) -> CliResult<(usize, Vec<(String, AbelianContext)>)> {
    let obj = as_object(v, path)?;
    let dim = obj
        .get("ambient_dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad(path, "missing positive integer \"ambient_dim\""))? as usize;
    if dim == 0 {
        return Err(bad(&format!("{path}/ambient_dim"), "dimension must be positive"));
    }
    let contexts_json = obj
        .get("contexts")
        .ok_or_else(|| bad(path, "missing \"contexts\""))?;
    let contexts_obj = as_object(contexts_json, &format!("{path}/contexts"))?;
    if contexts_obj.is_empty() {
        return Err(bad(&format!("{path}/contexts"), "at least one context is required"));
    }
    // BTreeMap ordering keeps reports deterministic.
    let sorted: BTreeMap<&String, &Value> = contexts_obj.iter().collect();
    let mut out = Vec::with_capacity(sorted.len());
    for (id, spec) in sorted {
        let sub_path = format!("{path}/contexts/{id}");
        let ctx = parse_context(spec, Some(dim), cfg, &sub_path)?;
        if ctx.ambient_dim() != dim {
            return Err(bad(
                &sub_path,
                &format!("context dimension {} != ambient_dim {dim}", ctx.ambient_dim()),
            ));
        }
        out.push((id.clone(), ctx));
    }
    Ok((dim, out))
}

/// A family file: the meet closure is computed; the returned ids cover the
/// listed contexts, in id order, and `added` counts closure contexts.
pub struct ParsedFamily {
    pub family: ContextFamily,
    pub ids: Vec<String>,
    pub added_by_closure: usize,
}

pub fn parse_family(v: &Value, cfg: &ToleranceConfig, path: &str) -> CliResult<ParsedFamily> {
    let (dim, named) = parse_context_map(v, cfg, path)?;
    let listed = named.len();
    for (i, (id_a, ctx_a)) in named.iter().enumerate() {
        for (id_b, ctx_b) in named.iter().skip(i + 1) {
            if ctx_a.approx_eq(ctx_b, cfg) {
                return Err(bad(
                    &format!("{path}/contexts"),
                    &format!("contexts {id_a:?} and {id_b:?} coincide"),
                ));
            }
        }
    }
    let ids: Vec<String> = named.iter().map(|(id, _)| id.clone()).collect();
    let contexts: Vec<AbelianContext> = named.into_iter().map(|(_, c)| c).collect();
    let family = ContextFamily::new(dim, contexts, cfg).map_err(CliError::from)?;
    let added_by_closure = family.len() - listed;
    Ok(ParsedFamily { family, ids, added_by_closure })
}

/// Requires the listed family to already be meet-closed, so that per-id
/// assignments cover the whole family.
fn parse_closed_family(v: &Value, cfg: &ToleranceConfig, path: &str) -> CliResult<ParsedFamily> {
    let parsed = parse_family(v, cfg, path)?;
    if parsed.added_by_closure > 0 {
        return Err(bad(
            &format!("{path}/contexts"),
            &format!(
                "the listed contexts are not meet-closed ({} meet contexts are missing); add them with their own ids",
                parsed.added_by_closure
            ),
        ));
    }
    Ok(parsed)
}

/// Section file: meet-closed contexts plus one operator per context id.
pub fn parse_section(
    v: &Value,
    cfg: &ToleranceConfig,
    path: &str,
) -> CliResult<(Vec<String>, GlobalSection)> {
    let parsed = parse_closed_family(v, cfg, path)?;
    let obj = as_object(v, path)?;
    let assignment = as_object(
        obj.get("assignment").ok_or_else(|| bad(path, "missing \"assignment\""))?,
        &format!("{path}/assignment"),
    )?;
    let mut values = Vec::with_capacity(parsed.ids.len());
    for id in &parsed.ids {
        let sub_path = format!("{path}/assignment/{id}");
        let value_json = assignment
            .get(id)
            .ok_or_else(|| bad(&sub_path, "no operator assigned to this context"))?;
        values.push(parse_operator(value_json, cfg, &sub_path)?);
    }
    for extra in assignment.keys() {
        if !parsed.ids.iter().any(|id| id == extra) {
            return Err(bad(
                &format!("{path}/assignment/{extra}"),
                "assignment key does not match any context id",
            ));
        }
    }
    let section = GlobalSection::new(parsed.family, values, cfg).map_err(CliError::from)?;
    Ok((parsed.ids, section))
}

/// State-section file: meet-closed contexts plus one weight vector per id.
pub fn parse_state_section(
    v: &Value,
    cfg: &ToleranceConfig,
    path: &str,
) -> CliResult<(Vec<String>, StateSection)> {
    let parsed = parse_closed_family(v, cfg, path)?;
    let obj = as_object(v, path)?;
    let states_json = as_object(
        obj.get("states").ok_or_else(|| bad(path, "missing \"states\""))?,
        &format!("{path}/states"),
    )?;
    let mut states = Vec::with_capacity(parsed.ids.len());
    for (id, ctx) in parsed.ids.iter().zip(parsed.family.contexts()) {
        let sub_path = format!("{path}/states/{id}");
        let weights_json =
            states_json.get(id).ok_or_else(|| bad(&sub_path, "no state for this context"))?;
        let weights: Vec<f64> = as_array(weights_json, &sub_path)?
            .iter()
            .enumerate()
            .map(|(i, w)| as_number(w, &format!("{sub_path}/{i}")))
            .collect::<CliResult<_>>()?;
        states.push(
            ContextState::new(ctx.clone(), weights, cfg)
                .map_err(|e| bad(&sub_path, &e.to_string()))?,
        );
    }
    let section = StateSection::new(parsed.family, states, cfg).map_err(CliError::from)?;
    Ok((parsed.ids, section))
}

/// Measure file: a context plus values on atom subsets. Singleton subsets are
/// mandatory; missing non-atom subsets are filled additively, while provided
/// ones are kept verbatim so inconsistencies surface in the additivity check.
pub fn parse_measure(
    v: &Value,
    cfg: &ToleranceConfig,
    path: &str,
) -> CliResult<(AbelianContext, ProjectionMeasure)> {
    let obj = as_object(v, path)?;
    let ctx_json = obj.get("context").ok_or_else(|| bad(path, "missing \"context\""))?;
    let ctx = parse_context(ctx_json, None, cfg, &format!("{path}/context"))?;
    let atoms = ctx.atom_count();
    if atoms > 20 {
        return Err(bad(&format!("{path}/context"), "too many atoms to enumerate"));
    }

    let values_json = as_array(
        obj.get("values").ok_or_else(|| bad(path, "missing \"values\""))?,
        &format!("{path}/values"),
    )?;
    let mut by_mask: BTreeMap<u32, f64> = BTreeMap::new();
    for (i, entry) in values_json.iter().enumerate() {
        let entry_path = format!("{path}/values/{i}");
        let entry_obj = as_object(entry, &entry_path)?;
        let subset = as_array(
            entry_obj.get("atoms").ok_or_else(|| bad(&entry_path, "missing \"atoms\""))?,
            &format!("{entry_path}/atoms"),
        )?;
        let mut mask = 0u32;
        for (j, idx_json) in subset.iter().enumerate() {
            let idx = idx_json
                .as_u64()
                .ok_or_else(|| bad(&format!("{entry_path}/atoms/{j}"), "expected an atom index"))?
                as usize;
            if idx >= atoms {
                return Err(bad(
                    &format!("{entry_path}/atoms/{j}"),
                    &format!("atom index {idx} out of range for {atoms} atoms"),
                ));
            }
            mask |= 1 << idx;
        }
        let value = as_number(
            entry_obj.get("value").ok_or_else(|| bad(&entry_path, "missing \"value\""))?,
            &format!("{entry_path}/value"),
        )?;
        if by_mask.insert(mask, value).is_some() {
            return Err(bad(&entry_path, "duplicate subset"));
        }
    }
    for i in 0..atoms {
        if !by_mask.contains_key(&(1 << i)) {
            return Err(bad(
                &format!("{path}/values"),
                &format!("no value provided for atom {i}"),
            ));
        }
    }

    let lattice = ctxobs_core::context::projections_in(&ctx).map_err(CliError::from)?;
    let entries: Vec<(Projection, f64)> = lattice
        .into_iter()
        .enumerate()
        .map(|(mask, p)| {
            let value = by_mask.get(&(mask as u32)).copied().unwrap_or_else(|| {
                (0..atoms).filter(|i| mask & (1 << i) != 0).map(|i| by_mask[&(1 << i)]).sum()
            });
            (p, value)
        })
        .collect();
    let mu = ProjectionMeasure::from_pairs(entries, cfg).map_err(CliError::from)?;
    Ok((ctx, mu))
}

pub fn parse_unit_vector(v: &Value, path: &str) -> CliResult<Vec<Complex64>> {
    let vector_value = match v {
        Value::Object(map) => map.get("vector").ok_or_else(|| bad(path, "missing \"vector\""))?,
        _ => v,
    };
    parse_vector(vector_value, path)
}

// --- serialization of domain values into report JSON ---

pub fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.dim())
        .map(|i| {
            let row: Vec<Value> =
                (0..m.dim()).map(|j| json!([m.get(i, j).re, m.get(i, j).im])).collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

pub fn operator_json(h: &HermitianOperator) -> Value {
    matrix_json(h.matrix())
}

pub fn projection_json(p: &Projection) -> Value {
    matrix_json(p.matrix().matrix())
}

pub fn context_json(ctx: &AbelianContext) -> Value {
    json!({
        "ambient_dim": ctx.ambient_dim(),
        "atoms": ctx.atoms().iter().map(projection_json).collect::<Vec<_>>(),
    })
}
