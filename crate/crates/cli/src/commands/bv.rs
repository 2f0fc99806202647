//! `check-cme`, `check-qme` and `bv-theorem`.

use std::path::Path;

use bvkit::berezin::GaussianWeight;
use bvkit::bv::{relaxed_check_forms, BVSpace, GradedPoisson};
use bvkit::cartan::{is_cohomological, FormSpace, VectorField};
use bvkit::gauge::{
    bv_integrate, bv_pushforward, chain_map_residual, check_thm_bv1, check_thm_bv2, restrict, standard_weight,
    FiberSplit, GaugeFermion,
};
use bvkit::json::PolyJson;
use bvkit::polyspace::monomials;
use bvkit::{Scalar, SuperPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use super::{orders_value, poly_value};
use crate::report::Report;
use crate::schema::{poly, CovarianceSpec, Inputs, SpaceSpec};
use crate::{at, CliError, Settings};

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ActionInput {
    bv_space: SpaceSpec,
    action: PolyJson,
}

fn cohomology_value(q: &VectorField) -> Result<(bool, Value), CliError> {
    let c = at("action", is_cohomological(q))?;
    let square = at("action", q.bracket(q))?;
    let witness = c.witness.as_ref().map(|(g, r)| json!({"generator": g, "residual": poly_value(r)}));
    Ok((c.cohomological, json!({"cohomological": c.cohomological, "square_is_zero": square.is_zero(), "witness": witness})))
}

pub fn check_cme(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let mut inputs = Inputs::default();
    let inp: ActionInput = inputs.load(path)?;
    let degree = inp.bv_space.degree_or(1);
    let mut report = Report::new("check-cme", s).with_input(inputs.hash());
    report.set_setting("degree", json!(degree));
    let result = if degree == 1 {
        let space = inp.bv_space.bv(s.window, "bv_space")?;
        let act = poly(space.context(), &inp.action, "action")?;
        let cme = at("action", space.check_cme(&act))?;
        let q = at("action", space.hamiltonian_vf(&act))?;
        let (coh, q_report) = cohomology_value(&q)?;
        let forms = if coh { forms_value(&space, &q, &act)? } else { Value::Null };
        json!({"pass": cme.pass, "residual": poly_value(&cme.residual), "q": q_report, "forms": forms})
    } else {
        let (ctx, pairs) = inp.bv_space.context(degree, s.window, "bv_space")?;
        let bracket = at("bv_space", GradedPoisson::darboux(&ctx, degree, &pairs))?;
        let act = poly(&ctx, &inp.action, "action")?;
        let residual = at("action", bracket.bracket(&act, &act))?;
        let q = at("action", bracket.bracket_field(&act))?;
        let (_, q_report) = cohomology_value(&q)?;
        json!({"pass": residual.is_zero(), "residual": poly_value(&residual), "q": q_report, "forms": Value::Null})
    };
    let pass = result["pass"].as_bool().unwrap_or(false);
    Ok(report.with_result(pass, result))
}

/// dω, ι_Qω, L_Qω and the relaxed checks with Š = S.
fn forms_value(space: &BVSpace, q: &VectorField, act: &SuperPoly) -> Result<Value, CliError> {
    let fs = at("bv_space", FormSpace::new(space.context()))?;
    let omega = at("bv_space", space.symplectic_form(&fs))?;
    let d_omega = at("bv_space", fs.d(&omega))?;
    let iq_omega = at("action", fs.contract(q, &omega))?;
    let lq_omega = at("action", fs.lie_derivative(q, &omega))?;
    let relaxed = at("action", relaxed_check_forms(&fs, &omega, q, act, Some(act)))?;
    Ok(json!({
        "omega_closed": d_omega.is_zero(),
        "iq_omega": poly_value(&iq_omega),
        "lie_q_omega_zero": lq_omega.is_zero(),
        "alpha": poly_value(&relaxed.alpha),
        "curvature_is_minus_lie": relaxed.curvature_is_minus_lie,
        "half_iqiq": poly_value(&relaxed.half_iqiq),
        "candidate": relaxed.candidate.map(|(a, b)| json!([a, b])),
    }))
}

pub fn check_qme(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let mut inputs = Inputs::default();
    let inp: ActionInput = inputs.load(path)?;
    let space = inp.bv_space.bv(s.window, "bv_space")?;
    let act = poly(space.context(), &inp.action, "action")?;
    let qme = at("action", space.check_qme(&act))?;
    let delta = at("action", space.laplacian(&act))?;
    let ss = at("action", space.antibracket(&act, &act))?;
    let result = json!({
        "pass": qme.pass,
        "first_failing_order": qme.first_failing_order,
        "classical": qme.classical,
        "residual": orders_value(qme.residuals.iter()),
        "truncated": qme.truncated,
        "laplacian": poly_value(&delta),
        "antibracket": poly_value(&ss),
    });
    Ok(Report::new("check-qme", s).with_input(inputs.hash()).with_result(qme.pass, result))
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct SplitSpec {
    /// Names of the q's whose pairs are integrated out.
    integrated: Vec<String>,
    fermion: PolyJson,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct TheoremInput {
    bv_space: SpaceSpec,
    /// Δ-exactness check: ∫ Δg = 0.
    #[serde(default)]
    g: Option<PolyJson>,
    /// Gauge independence for Δf = 0.
    #[serde(default)]
    f: Option<PolyJson>,
    #[serde(default)]
    fermions: Option<Vec<PolyJson>>,
    /// Parameters the integral of f must not depend on.
    #[serde(default)]
    gauge_params: Vec<String>,
    #[serde(default)]
    covariance: Option<CovarianceSpec>,
    #[serde(default)]
    split: Option<SplitSpec>,
}

/// Random gauge fermions: integer combinations of gh −1 monomials of degree ≤ 2 in the q's.
fn random_family(space: &BVSpace, n: usize, seed: u64) -> Vec<SuperPoly> {
    let ctx = space.context();
    let monos = monomials(ctx, &space.q_vars(), 2, Some(-1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut p = SuperPoly::zero(ctx);
            for m in &monos {
                let c: i64 = rng.gen_range(-3..=3);
                p = &p + &SuperPoly::term(ctx, m.clone(), Scalar::from_int(c));
            }
            p
        })
        .collect()
}

fn weight_for(space: &BVSpace, cov: &Option<CovarianceSpec>, pairs: &[usize]) -> Result<Option<GaussianWeight>, CliError> {
    if let Some(c) = cov {
        let names: Vec<&str> = c.vars.iter().map(|v| v.as_str()).collect();
        return Ok(Some(at("covariance", GaussianWeight::by_names(space.context(), &names, c.matrix("covariance")?))?));
    }
    let ctx = space.context();
    let even: Vec<&str> = pairs
        .iter()
        .map(|&k| space.pairs()[k].0)
        .filter(|&q| !ctx.is_odd(q))
        .map(|q| ctx.generator(q).name.as_str())
        .collect();
    if even.is_empty() {
        return Ok(None);
    }
    Ok(Some(at("covariance", standard_weight(space, &even))?))
}

pub fn bv_theorem(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let mut inputs = Inputs::default();
    let inp: TheoremInput = inputs.load(path)?;
    let space = inp.bv_space.bv(s.window, "bv_space")?;
    let ctx = space.context().clone();
    let (statement, integrand, key) = match (&inp.g, &inp.f) {
        (Some(g), None) => ("exact", poly(&ctx, g, "g")?, "g"),
        (None, Some(f)) => ("closed", poly(&ctx, f, "f")?, "f"),
        _ => return Err(CliError::Invalid { path: "".into(), message: "give exactly one of `g` and `f`".into() }),
    };
    let (polys, random) = match &inp.fermions {
        Some(fs) => {
            let mut out = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                out.push(poly(&ctx, f, &format!("fermions[{i}]"))?);
            }
            (out, false)
        }
        None => (random_family(&space, s.samples, s.seed), true),
    };
    let mut family = Vec::new();
    for (i, p) in polys.into_iter().enumerate() {
        family.push(at(&format!("fermions[{i}]"), GaugeFermion::new(&space, p))?);
    }
    let all: Vec<usize> = (0..space.pairs().len()).collect();
    let w = weight_for(&space, &inp.covariance, &all)?;
    let params = inp.gauge_params.iter().map(|n| at("gauge_params", ctx.index_of(n))).collect::<Result<Vec<_>, _>>()?;
    let thm = if statement == "exact" {
        at(key, check_thm_bv1(&integrand, &family, &space, w.as_ref()))?
    } else {
        at(key, check_thm_bv2(&integrand, &family, &params, &space, w.as_ref()))?
    };
    let restricted = family
        .iter()
        .map(|psi| at(key, restrict(&integrand, psi, &space)).map(|r| poly_value(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    let plain = family
        .iter()
        .map(|psi| at(key, bv_integrate(&integrand, psi, &space, w.as_ref())).map(|r| poly_value(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut pass = thm.pass;
    let pushforward = match &inp.split {
        Some(sp) => {
            let mut idx = Vec::new();
            for n in &sp.integrated {
                let q = at("split.integrated", ctx.index_of(n))?;
                let k = space.pairs().iter().position(|&(a, _)| a == q).ok_or_else(|| CliError::Invalid {
                    path: "split.integrated".into(),
                    message: format!("`{n}` is not a field"),
                })?;
                idx.push(k);
            }
            let split = at("split", FiberSplit::new(&space, idx.clone()))?;
            let psi = at("split.fermion", GaugeFermion::new(&space, poly(&ctx, &sp.fermion, "split.fermion")?))?;
            let wf = weight_for(&space, &inp.covariance, &idx)?;
            let value = at("split", bv_pushforward(&integrand, &psi, &split, wf.as_ref()))?;
            let residual = at("split", chain_map_residual(&integrand, &psi, &split, wf.as_ref()))?;
            pass &= residual.is_zero();
            json!({"value": poly_value(&value), "chain_map_residual": poly_value(&residual), "pass": residual.is_zero()})
        }
        None => Value::Null,
    };
    let result = json!({
        "statement": statement,
        "hypothesis": thm.hypothesis,
        "family_size": family.len(),
        "random_family": random,
        "fermions": family.iter().map(|f| poly_value(f.poly())).collect::<Vec<_>>(),
        "values": thm.values.iter().map(poly_value).collect::<Vec<_>>(),
        "integrand_values": plain,
        "restricted": restricted,
        "dependent_parameters": thm.dependent_parameters,
        "pushforward": pushforward,
    });
    Ok(Report::new("bv-theorem", s).with_input(inputs.hash()).with_result(pass, result))
}
