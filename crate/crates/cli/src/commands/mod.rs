mod algebra;
mod bfv;
mod bv;
mod graphs;
mod models;

use bvkit::json::PolyReport;
use bvkit::SuperPoly;
use serde_json::{json, Value};

use crate::report::Report;
use crate::{CliError, Command, Settings};

pub(crate) fn dispatch(cmd: &Command, s: &Settings) -> Result<Report, CliError> {
    match cmd {
        Command::Berezinian { input } => algebra::berezinian(input, s),
        Command::BvIntegrate { input } => algebra::bv_integrate(input, s),
        Command::CheckCme { input } => bv::check_cme(input, s),
        Command::CheckQme { input } => bv::check_qme(input, s),
        Command::BvTheorem { input } => bv::bv_theorem(input, s),
        Command::BfvExtend { input } => bfv::bfv_extend(input, s),
        Command::EnumerateGraphs(g) => graphs::enumerate(g, s),
        Command::Strata { bulk, boundary } => graphs::strata(*bulk, *boundary, s),
        Command::BfModel { input } => models::bf_model(input, s),
        Command::Glue { input } => models::glue(input, s),
        Command::VerifyAll { suite, threads, bless } => crate::suite::verify_all(suite, *threads, *bless, s),
    }
}

pub(crate) fn poly_value(p: &SuperPoly) -> Value {
    json!(PolyReport::new(p))
}

/// Nonzero ħ-orders of a residual family, keyed by order.
pub(crate) fn orders_value<'a>(m: impl IntoIterator<Item = (&'a i32, &'a SuperPoly)>) -> Value {
    let mut out = serde_json::Map::new();
    for (k, v) in m {
        if !v.is_zero() {
            out.insert(k.to_string(), poly_value(v));
        }
    }
    Value::Object(out)
}
