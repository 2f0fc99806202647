//! `bfv-extend`.

use std::path::Path;

use bvkit::bfv::{ghost_extend, n_mod_i_dimension, ConstraintSystem};
use bvkit::bv::GradedPoisson;
use bvkit::json::{ContextJson, PolyJson};
use serde::Deserialize;
use serde_json::json;

use super::poly_value;
use crate::report::Report;
use crate::schema::{poly, Inputs, SpaceSpec};
use crate::{at, CliError, Settings, DEFAULT_CUTOFF, DEFAULT_MAX_B_DEGREE};

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct Cutoffs {
    #[serde(default)]
    max_b_degree: Option<usize>,
    #[serde(default)]
    poly_degree: Option<u32>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct BfvInput {
    base: SpaceSpec,
    constraints: Vec<PolyJson>,
    /// f[i][j][k] with {φ_i, φ_j} = Σ_k f[i][j][k] φ_k.
    #[serde(default)]
    structure_functions: Option<Vec<Vec<Vec<PolyJson>>>>,
    #[serde(default)]
    cutoffs: Cutoffs,
}

pub fn bfv_extend(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let mut inputs = Inputs::default();
    let inp: BfvInput = inputs.load(path)?;
    if inp.base.degree_or(0) != 0 || inp.base.fields.iter().any(|f| f.gh != 0) {
        return Err(CliError::Invalid { path: "base".into(), message: "the base must be an even degree-0 Poisson space".into() });
    }
    let max_b = s.max_b_degree.or(inp.cutoffs.max_b_degree).unwrap_or(DEFAULT_MAX_B_DEGREE);
    let cutoff = s.cutoff.or(inp.cutoffs.poly_degree).unwrap_or(DEFAULT_CUTOFF);
    let (ctx, pairs) = inp.base.context(0, s.window, "base")?;
    let base = at("base", GradedPoisson::darboux(&ctx, 0, &pairs))?;
    let mut constraints = Vec::new();
    for (i, c) in inp.constraints.iter().enumerate() {
        constraints.push(poly(&ctx, c, &format!("constraints[{i}]"))?);
    }
    let structure = match &inp.structure_functions {
        Some(f) => {
            let mut out = Vec::new();
            for (i, row) in f.iter().enumerate() {
                let mut r = Vec::new();
                for (j, cell) in row.iter().enumerate() {
                    let mut c = Vec::new();
                    for (k, e) in cell.iter().enumerate() {
                        c.push(poly(&ctx, e, &format!("structure_functions[{i}][{j}][{k}]"))?);
                    }
                    r.push(c);
                }
                out.push(r);
            }
            Some(out)
        }
        None => None,
    };
    let cs = at("constraints", ConstraintSystem::new(base, constraints, structure))?;
    let mut data = at("constraints", ghost_extend(&cs))?;
    let leading_ok = at("constraints", data.master())?.is_zero();
    if !leading_ok {
        data = at("constraints", data.correct_order_by_order(max_b, cutoff))?;
    }
    let master = at("constraints", data.master())?;
    let h0 = at("constraints", data.q_cohomology_degree0(cutoff))?;
    let reduced = n_mod_i_dimension(&cs, cutoff);
    let dctx = data.context();
    let mut fields: Vec<serde_json::Value> =
        inp.base.fields.iter().map(|f| json!({"name": f.name, "gh": 0, "antifield": f.antifield})).collect();
    for &(c, b) in data.ghosts() {
        fields.push(json!({"name": dctx.generator(c).name, "gh": 1, "antifield": dctx.generator(b).name}));
    }
    let result = json!({
        "context": ContextJson::from_context(dctx),
        "action": poly_value(data.action()),
        "master_residual": poly_value(&master),
        "constant_structure": cs.has_constant_structure(),
        "corrected": !leading_ok,
        "certified_b_degree": data.certified_b_degree(),
        "solution_dims": data.solution_dims(),
        "h0_dimension": h0.dimension,
        "h0_representatives": h0.representatives.iter().map(poly_value).collect::<Vec<_>>(),
        "n_mod_i_dimension": reduced,
        "check_cme_input": {
            "bv_space": {"degree": 0, "fields": fields},
            "action": PolyJson::terms_of(data.action()),
        },
    });
    let mut report = Report::new("bfv-extend", s).with_input(inputs.hash());
    report.set_setting("cutoff", json!(cutoff));
    report.set_setting("max_b_degree", json!(max_b));
    Ok(report.with_result(master.is_zero(), result))
}
