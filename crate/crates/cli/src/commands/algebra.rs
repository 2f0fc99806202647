//! `berezinian` and `bv-integrate`.

use std::collections::BTreeMap;
use std::path::Path;

use bvkit::berezin::{berezin_integrate, bv_measure_integrate, gaussian_expect, GaussianWeight};
use bvkit::json::{ContextJson, PolyJson};
use bvkit::supermatrix::{check_multiplicative, PolyMatrix, SuperMatrix};
use bvkit::{Context, SuperPoly};
use serde::Deserialize;
use serde_json::json;

use super::poly_value;
use crate::report::Report;
use crate::schema::{poly, CovarianceSpec, Inputs};
use crate::{at, CliError, Settings};

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct Blocks {
    #[serde(rename = "A", default)]
    a: Vec<Vec<PolyJson>>,
    #[serde(rename = "B", default)]
    b: Vec<Vec<PolyJson>>,
    #[serde(rename = "C", default)]
    c: Vec<Vec<PolyJson>>,
    #[serde(rename = "D", default)]
    d: Vec<Vec<PolyJson>>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct BerezinianInput {
    context: ContextJson,
    p: usize,
    q: usize,
    #[serde(rename = "A", default)]
    a: Vec<Vec<PolyJson>>,
    #[serde(rename = "B", default)]
    b: Vec<Vec<PolyJson>>,
    #[serde(rename = "C", default)]
    c: Vec<Vec<PolyJson>>,
    #[serde(rename = "D", default)]
    d: Vec<Vec<PolyJson>>,
    /// Second factor for the multiplicativity check.
    #[serde(rename = "Y", default)]
    y: Option<Blocks>,
}

fn block(ctx: &Context, m: &[Vec<PolyJson>], shape: (usize, usize), path: &str) -> Result<PolyMatrix, CliError> {
    if m.is_empty() {
        return Ok(vec![vec![SuperPoly::zero(ctx); shape.1]; shape.0]);
    }
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        let mut r = Vec::new();
        for (j, e) in row.iter().enumerate() {
            r.push(poly(ctx, e, &format!("{path}[{i}][{j}]"))?);
        }
        out.push(r);
    }
    Ok(out)
}

fn supermatrix(ctx: &Context, p: usize, q: usize, b: &Blocks, prefix: &str) -> Result<SuperMatrix, CliError> {
    let a = block(ctx, &b.a, (p, p), &format!("{prefix}A"))?;
    let bb = block(ctx, &b.b, (p, q), &format!("{prefix}B"))?;
    let c = block(ctx, &b.c, (q, p), &format!("{prefix}C"))?;
    let d = block(ctx, &b.d, (q, q), &format!("{prefix}D"))?;
    at(prefix.trim_end_matches('.'), SuperMatrix::new(ctx, p, q, a, bb, c, d))
}

pub fn berezinian(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let mut inputs = Inputs::default();
    let inp: BerezinianInput = inputs.load(path)?;
    let ctx = at("context", inp.context.build(s.window))?;
    let xb = Blocks { a: inp.a, b: inp.b, c: inp.c, d: inp.d };
    let x = supermatrix(&ctx, inp.p, inp.q, &xb, "")?;
    let invertible = x.is_invertible();
    let mut result = serde_json::Map::new();
    result.insert("order".into(), json!([inp.p, inp.q]));
    result.insert("invertible".into(), json!(invertible));
    let mut pass = invertible;
    if invertible {
        let ber = at("", x.berezinian())?;
        result.insert("ber".into(), poly_value(&ber));
    }
    if let Some(yb) = &inp.y {
        let y = supermatrix(&ctx, inp.p, inp.q, yb, "Y.")?;
        if invertible && y.is_invertible() {
            let (ok, residual) = at("Y", check_multiplicative(&x, &y))?;
            pass &= ok;
            result.insert("multiplicative".into(), json!({"pass": ok, "residual": poly_value(&residual)}));
        } else {
            pass = false;
            result.insert("multiplicative".into(), json!({"pass": false, "reason": "a factor is not invertible"}));
        }
    }
    Ok(Report::new("berezinian", s).with_input(inputs.hash()).with_result(pass, json!(result)))
}

/// Preprocessing applied to the integrand, in order.
#[derive(Deserialize, Debug)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum Transform {
    Multiply(PolyJson),
    LeftDerive(String),
    RightDerive(String),
    Substitute(BTreeMap<String, PolyJson>),
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct IntegrateInput {
    context: ContextJson,
    poly: PolyJson,
    #[serde(default)]
    odd_vars: Vec<String>,
    #[serde(default)]
    covariance: Option<CovarianceSpec>,
    #[serde(default)]
    transforms: Vec<Transform>,
}

pub fn bv_integrate(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let mut inputs = Inputs::default();
    let inp: IntegrateInput = inputs.load(path)?;
    let ctx = at("context", inp.context.build(s.window))?;
    let mut f = poly(&ctx, &inp.poly, "poly")?;
    for (i, t) in inp.transforms.iter().enumerate() {
        let p = format!("transforms[{i}]");
        f = match t {
            Transform::Multiply(g) => f.try_mul(&poly(&ctx, g, &p)?).map_err(|e| CliError::Invalid { path: p.clone(), message: e.to_string() })?,
            Transform::LeftDerive(v) => at(&p, f.left_derive_by(v))?,
            Transform::RightDerive(v) => at(&p, f.right_derive_by(v))?,
            Transform::Substitute(map) => {
                let mut b = Vec::new();
                for (name, g) in map {
                    b.push((at(&p, ctx.index_of(name))?, poly(&ctx, g, &format!("{p}.{name}"))?));
                }
                at(&p, f.substitute(&b))?
            }
        };
    }
    let odd = inp.odd_vars.iter().map(|n| at("odd_vars", ctx.index_of(n))).collect::<Result<Vec<_>, _>>()?;
    let weight = match &inp.covariance {
        Some(c) => {
            let names: Vec<&str> = c.vars.iter().map(|v| v.as_str()).collect();
            Some(at("covariance", GaussianWeight::by_names(&ctx, &names, c.matrix("covariance")?))?)
        }
        None => None,
    };
    let (mode, value) = match (&weight, odd.is_empty()) {
        (None, _) => ("berezin", at("odd_vars", berezin_integrate(&f, &odd))?),
        (Some(w), true) => ("gaussian", at("covariance", gaussian_expect(&f, w))?),
        (Some(w), false) => ("bv_measure", at("", bv_measure_integrate(&f, &odd, Some(w)))?),
    };
    let result = json!({"mode": mode, "integrand": poly_value(&f), "value": poly_value(&value)});
    Ok(Report::new("bv-integrate", s).with_input(inputs.hash()).with_result(true, result))
}
