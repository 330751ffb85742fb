//! Python bindings: the model combinatorics, hypergeometric series dumps,
//! invariant tables and the named verification checks.
//!
//! Structured results cross the boundary as JSON strings (exact rationals
//! are `num/den` strings, which JSON numbers cannot hold).

use lgcone::cone::{
    mirror_small, selection_sweep, string_dilaton_check, PipelineOrders, TableKey, VerifyContext,
};
use lgcone::ifun::{big_i, small_i, unstable_sum, Chamber, SeriesOrders};
use lgcone::model::{Epsilon, FermatModel};
use lgcone::rat::format_rat;
use lgcone::series::dump_zseries;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn build(weights: Vec<u64>, degree: u64) -> PyResult<FermatModel> {
    FermatModel::build(&weights, degree).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn eps_of(label: &str) -> PyResult<Epsilon> {
    Epsilon::parse(label).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Validated model data: charges, narrow sector, state degrees, walls.
#[pyfunction]
fn model_info(weights: Vec<u64>, degree: u64) -> PyResult<String> {
    let m = build(weights, degree)?;
    let doc = serde_json::json!({
        "weights": m.weights(),
        "degree": m.degree(),
        "charges": m.charges().iter().map(format_rat).collect::<Vec<_>>(),
        "total_charge": format_rat(m.total_charge()),
        "narrow": m.narrow().iter().copied().collect::<Vec<u16>>(),
        "degrees": (0..m.d()).map(|k| format_rat(m.state_degree(k))).collect::<Vec<_>>(),
        "chamber_walls": FermatModel::chamber_walls(6).iter().map(format_rat).collect::<Vec<_>>(),
    });
    Ok(doc.to_string())
}

/// Stable text dump of the hypergeometric series. `eps` caps the sum at
/// that stability chamber; `small` restricts to the degree <= 1 block.
#[pyfunction]
#[pyo3(signature = (weights, degree, order, zneg, small=false, eps=None))]
fn ifunction_dump(
    weights: Vec<u64>,
    degree: u64,
    order: u32,
    zneg: u32,
    small: bool,
    eps: Option<String>,
) -> PyResult<String> {
    let m = build(weights, degree)?;
    let orders = SeriesOrders::new(order, zneg);
    let series = if small {
        small_i(&m, &orders).0
    } else if let Some(label) = eps {
        unstable_sum(&m, &Chamber::of(&eps_of(&label)?), &orders)
    } else {
        big_i(&m, &orders).0
    };
    Ok(dump_zseries(&series, m.d()))
}

/// Invariant table for one stability parameter, as the JSON wire format.
#[pyfunction]
#[pyo3(signature = (weights, degree, eps="infinity".to_string(), order=4, t_order=3, zneg=3))]
fn invariants(
    weights: Vec<u64>,
    degree: u64,
    eps: String,
    order: u32,
    t_order: u32,
    zneg: u32,
) -> PyResult<String> {
    let m = build(weights, degree)?;
    let orders = PipelineOrders::derive(&m, order, t_order, zneg);
    let ctx = VerifyContext::new(m, orders).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let table = ctx
        .table_for(&eps_of(&eps)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(table.to_json().to_string())
}

/// One unweighted three-point value as a rational string.
#[pyfunction]
#[pyo3(signature = (weights, degree, a, b, c, order=6))]
fn three_point(
    weights: Vec<u64>,
    degree: u64,
    a: u16,
    b: u16,
    c: u16,
    order: u32,
) -> PyResult<String> {
    let m = build(weights, degree)?;
    let orders = PipelineOrders::derive(&m, order, 3, 3);
    let ctx = VerifyContext::new(m, orders).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let v = ctx
        .three_point(a, b, c)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(format_rat(&v))
}

/// The mirror map's nonzero coefficients on the degree <= 1 block.
#[pyfunction]
#[pyo3(signature = (weights, degree, order=8, zneg=3))]
fn mirror_map(weights: Vec<u64>, degree: u64, order: u32, zneg: u32) -> PyResult<String> {
    let m = build(weights, degree)?;
    let md = mirror_small(&m, &SeriesOrders::new(order, zneg))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let mut comps = serde_json::Map::new();
    for (&i, s) in &md.eta {
        let terms: Vec<serde_json::Value> = s
            .terms()
            .map(|(idx, c)| {
                serde_json::json!({
                    "u": idx.u.dense(degree as u16),
                    "coeff": format_rat(c),
                })
            })
            .collect();
        comps.insert(format!("{i}"), serde_json::Value::Array(terms));
    }
    Ok(serde_json::Value::Object(comps).to_string())
}

/// Run one named verification check; returns a JSON report with a
/// "passed" flag.
#[pyfunction]
#[pyo3(signature = (weights, degree, check, eps=None, order=5, t_order=2, zneg=3))]
fn verify(
    weights: Vec<u64>,
    degree: u64,
    check: String,
    eps: Option<String>,
    order: u32,
    t_order: u32,
    zneg: u32,
) -> PyResult<String> {
    let m = build(weights, degree)?;
    let orders = PipelineOrders::derive(&m, order, t_order, zneg);
    let ctx = VerifyContext::new(m.clone(), orders)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let eps = eps_of(eps.as_deref().unwrap_or("1/2"))?;
    let err = |e: lgcone::cone::ConeError| PyValueError::new_err(e.to_string());
    let (passed, details) = match check.as_str() {
        "regularity" => {
            let r = ctx.regularity(&eps).map_err(err)?;
            (r.passed(), serde_json::to_value(&r).unwrap())
        }
        "cor4" => {
            let r = ctx.round_trip().map_err(err)?;
            (r.passed(), serde_json::to_value(&r).unwrap())
        }
        "transport" => {
            let r = ctx.transport(&Epsilon::Infinity, &eps).map_err(err)?;
            (r.passed(), serde_json::to_value(&r).unwrap())
        }
        "string" => {
            let table = ctx.table_for(&Epsilon::Infinity).map_err(err)?;
            let r = string_dilaton_check(&table);
            (
                r.mismatches.is_empty() && r.pairs_checked + r.zero_checked > 0,
                serde_json::to_value(&r).unwrap(),
            )
        }
        "routes" => {
            let r = ctx.routes().map_err(err)?;
            (r.passed(), serde_json::to_value(&r).unwrap())
        }
        "sigma" => (ctx.sigma_check().map_err(err)?, serde_json::json!({})),
        "selection" => {
            let table = ctx.table_for(&eps).map_err(err)?;
            let r = selection_sweep(&m, &table, 5, 4, zneg);
            (
                r.failures.is_empty() && r.keys_swept > 0,
                serde_json::to_value(&r).unwrap(),
            )
        }
        other => {
            return Err(PyValueError::new_err(format!("unknown check {other}")));
        }
    };
    Ok(serde_json::json!({ "check": check, "passed": passed, "details": details }).to_string())
}

/// Value of a stored table entry by key, zero when selection rules kill it.
#[pyfunction]
#[pyo3(signature = (weights, degree, heavy, light, eps="infinity".to_string(), order=5, t_order=3, zneg=3))]
#[allow(clippy::too_many_arguments)]
fn table_value(
    weights: Vec<u64>,
    degree: u64,
    heavy: Vec<(u16, u32)>,
    light: Vec<u16>,
    eps: String,
    order: u32,
    t_order: u32,
    zneg: u32,
) -> PyResult<String> {
    let m = build(weights, degree)?;
    let orders = PipelineOrders::derive(&m, order, t_order, zneg);
    let ctx = VerifyContext::new(m, orders).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let table = ctx
        .table_for(&eps_of(&eps)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(format_rat(&table.value(&TableKey::new(heavy, light))))
}

#[pymodule]
fn lgcone_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(model_info, m)?)?;
    m.add_function(wrap_pyfunction!(ifunction_dump, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(three_point, m)?)?;
    m.add_function(wrap_pyfunction!(mirror_map, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(table_value, m)?)?;
    Ok(())
}
