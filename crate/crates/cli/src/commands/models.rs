//! `bf-model` and `glue`.

use std::path::Path;

use bvkit::json::RationalJson;
use bvkit::linalg::Q;
use bvkit::models::{
    build_bf_in, chain_contraction, contraction_change, effective_action, glue as glue_states, residual_fields,
    residual_ghosts, states_equivalent, Cell, ChainComplexModel, DiscreteState, Match, MqmeReport,
};
use bvkit::Window;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{orders_value, poly_value};
use crate::report::Report;
use crate::schema::{relative, Inputs};
use crate::{at, CliError, Settings, DEFAULT_CUTOFF};

#[derive(Deserialize, Serialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
enum Polarization {
    /// boundary1 carries fixed A, boundary2 fixed B.
    #[default]
    Standard,
    /// boundary1 carries fixed B, boundary2 fixed A.
    Swapped,
}

/// A cell complex: cell names per degree, sparse coboundary [τ, σ, value]
/// meaning (dA)_τ ∋ value·A_σ, and the two boundary pieces.
#[derive(Deserialize, Serialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
struct ComplexSpec {
    dimension: u32,
    cells: Vec<Vec<String>>,
    #[serde(default)]
    coboundary: Vec<(String, String, RationalJson)>,
    #[serde(default)]
    boundary1: Vec<String>,
    #[serde(default)]
    boundary2: Vec<String>,
    #[serde(default)]
    polarization: Polarization,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ModelOptions {
    /// Positive weights on interior cells for a changed contraction.
    #[serde(default)]
    weights: Option<Vec<RationalJson>>,
    /// Variable whose first term is sign-flipped as a negative control.
    #[serde(default)]
    corrupt: Option<String>,
}

impl ComplexSpec {
    fn model(&self, path: &str) -> Result<ChainComplexModel, CliError> {
        if self.cells.len() > self.dimension as usize + 1 {
            return Err(CliError::Invalid { path: format!("{path}cells"), message: "more degrees than the dimension allows".into() });
        }
        let cells: Vec<Cell> = self
            .cells
            .iter()
            .enumerate()
            .flat_map(|(k, names)| names.iter().map(move |n| Cell::new(n.clone(), k as u32)))
            .collect();
        let mut inc = Vec::new();
        for (i, (t, s, v)) in self.coboundary.iter().enumerate() {
            inc.push((t.clone(), s.clone(), at(&format!("{path}coboundary[{i}][2]"), v.to_rational())?));
        }
        let (a, b) = match self.polarization {
            Polarization::Standard => (&self.boundary1, &self.boundary2),
            Polarization::Swapped => (&self.boundary2, &self.boundary1),
        };
        let a: Vec<&str> = a.iter().map(|s| s.as_str()).collect();
        let b: Vec<&str> = b.iter().map(|s| s.as_str()).collect();
        at(path.trim_end_matches('.'), ChainComplexModel::new(self.dimension, cells, &inc, &a, &b))
    }

    fn from_model(cx: &ChainComplexModel) -> Self {
        let mut cells = vec![Vec::new(); cx.dimension() as usize + 1];
        for c in cx.cells() {
            cells[c.degree as usize].push(c.name.clone());
        }
        let names = |set: &std::collections::BTreeSet<usize>| set.iter().map(|&i| cx.cells()[i].name.clone()).collect();
        ComplexSpec {
            dimension: cx.dimension(),
            cells,
            coboundary: cx
                .incidences()
                .into_iter()
                .map(|(t, s, v)| (t, s, RationalJson::Text(bvkit::json::render_rational(&v))))
                .collect(),
            boundary1: names(cx.boundary_a()),
            boundary2: names(cx.boundary_b()),
            polarization: Polarization::Standard,
        }
    }
}

fn mqme_value(r: &MqmeReport) -> Value {
    json!({
        "pass": r.pass,
        "prefactor": poly_value(&r.prefactor),
        "residual": orders_value(r.residuals.iter()),
        "offending": r.offending,
        "truncated": r.truncated,
    })
}

fn state_of(cx: &ChainComplexModel, window: Window, path: &str) -> Result<DiscreteState, CliError> {
    let bf = at(path, build_bf_in(cx, window))?;
    let c = at(path, chain_contraction(cx))?;
    at(path, effective_action(&bf, &c))
}

fn state_value(st: &DiscreteState) -> Value {
    json!({
        "s_eff": poly_value(st.action()),
        "one_loop": st.one_loop(),
        "residuals": st.residuals().iter().map(|r| json!({"alpha": r.alpha, "beta": r.beta, "degree": r.degree})).collect::<Vec<_>>(),
        "residual_ghosts": residual_ghosts(st).into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "base": st.context().generators().iter().skip(2 * st.residuals().len()).map(|g| json!({"name": g.name, "gh": g.gh})).collect::<Vec<_>>(),
    })
}

pub fn bf_model(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let mut inputs = Inputs::default();
    let raw: Value = inputs.load(path)?;
    let mut spec_part = raw.clone();
    let mut opt_part = json!({});
    if let Value::Object(m) = &mut spec_part {
        for k in ["weights", "corrupt"] {
            if let Some(v) = m.remove(k) {
                opt_part[k] = v;
            }
        }
    }
    let complex: ComplexSpec = crate::schema::parse(&serde_json::to_vec(&spec_part).expect("value"))?;
    let opts: ModelOptions = crate::schema::parse(&serde_json::to_vec(&opt_part).expect("value"))?;
    let cutoff = s.cutoff.unwrap_or(DEFAULT_CUTOFF);
    let cx = complex.model("")?;
    let bf = at("", build_bf_in(&cx, s.window))?;
    let mut pass = true;

    let cme = at("", bf.check_cme())?;
    if cx.is_closed() {
        pass &= cme.pass;
    }
    let dims = residual_fields(&cx);
    pass &= dims.euler_consistent();
    let contraction = at("", chain_contraction(&cx))?;
    let state = at("", effective_action(&bf, &contraction))?;

    let boundary = at("", bf.boundary().bfv())?;
    let boundary_master = at("", boundary.master())?;
    let omega0 = at("", state.omega0())?;
    let omega_sq = at("", omega0.square_witness(cutoff))?;
    pass &= boundary_master.is_zero() && omega_sq.is_none();

    let locality = at("", bf.relaxed_check())?;
    pass &= locality.boundary_supported && locality.half_iqiq_is_pullback;

    let bulk_mqme = at("", bf.check_mqme())?;
    let mqme = at("", state.check_mqme())?;
    pass &= bulk_mqme.pass && mqme.pass;

    let negative = match &opts.corrupt {
        Some(v) => {
            let bad = at("corrupt", state.corrupted(v))?;
            let r = at("corrupt", bad.check_mqme())?;
            pass &= !r.pass;
            json!({"variable": v, "detected": !r.pass, "mqme": mqme_value(&r)})
        }
        None => Value::Null,
    };
    let change = match &opts.weights {
        Some(ws) => {
            let mut w: Vec<Q> = Vec::new();
            for (i, x) in ws.iter().enumerate() {
                w.push(at(&format!("weights[{i}]"), x.to_rational())?);
            }
            let ch = at("weights", contraction_change(&bf, &w))?;
            pass &= ch.verified;
            json!({
                "difference": poly_value(&ch.difference),
                "primitive": ch.primitive.as_ref().map(poly_value),
                "verified": ch.verified,
            })
        }
        None => Value::Null,
    };

    let result = json!({
        "cme": {"closed": cx.is_closed(), "pass": cme.pass, "residual": poly_value(&cme.residual)},
        "residual_dims": dims,
        "s_eff": poly_value(state.action()),
        "state": state_value(&state),
        "mqme": mqme_value(&mqme),
        "bulk_mqme": mqme_value(&bulk_mqme),
        "boundary": {
            "action": poly_value(boundary.action()),
            "master_is_zero": boundary_master.is_zero(),
            "omega0_squared_zero": omega_sq.is_none(),
            "omega0_square_witness": omega_sq.map(|(f, r)| json!({"input": poly_value(&f), "image": poly_value(&r)})),
        },
        "locality": {
            "alpha": poly_value(&locality.alpha),
            "support": locality.support,
            "boundary_supported": locality.boundary_supported,
            "half_iqiq_is_pullback": locality.half_iqiq_is_pullback,
            "euler_is_pullback": locality.euler_is_pullback,
            "q_signs": [locality.q_signs.0, locality.q_signs.1],
        },
        "negative_control": negative,
        "contraction_change": change,
    });
    let mut report = Report::new("bf-model", s).with_input(inputs.hash());
    report.set_setting("cutoff", json!(cutoff));
    Ok(report.with_result(pass, result))
}

/// A state is given by a complex, a nested gluing, or a path to either.
#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum StateRef {
    Path(String),
    Glue(Box<GlueSpec>),
    Complex(ComplexSpec),
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct GlueSpec {
    left: StateRef,
    right: StateRef,
    interface: Vec<Match>,
    /// State the result is compared against.
    #[serde(default)]
    expected: Option<StateRef>,
}

fn resolve(r: &StateRef, base: &Path, inputs: &mut Inputs, s: &Settings, path: &str) -> Result<DiscreteState, CliError> {
    match r {
        StateRef::Complex(c) => state_of(&c.model(&format!("{path}."))?, s.window, path),
        StateRef::Glue(g) => glue_spec(g, base, inputs, s, path).map(|(st, _)| st),
        StateRef::Path(p) => {
            let file = relative(base, p);
            let sub: StateRef = inputs.load(&file)?;
            if let StateRef::Path(_) = sub {
                return Err(CliError::Invalid { path: path.into(), message: "a state file cannot be a bare path".into() });
            }
            resolve(&sub, &file, inputs, s, path)
        }
    }
}

fn glue_spec(g: &GlueSpec, base: &Path, inputs: &mut Inputs, s: &Settings, path: &str) -> Result<(DiscreteState, Value), CliError> {
    let p = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    let left = resolve(&g.left, base, inputs, s, &p("left"))?;
    let right = resolve(&g.right, base, inputs, s, &p("right"))?;
    let glued = at(&p("interface"), glue_states(&left, &right, &g.interface))?;
    let equivalence = match &g.expected {
        Some(e) => {
            let target = resolve(e, base, inputs, s, &p("expected"))?;
            json!(at(&p("expected"), states_equivalent(&glued, &target))?)
        }
        None => Value::Null,
    };
    Ok((glued, equivalence))
}

pub fn glue(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let mut inputs = Inputs::default();
    let spec: GlueSpec = inputs.load(path)?;
    let (glued, equivalence) = glue_spec(&spec, path, &mut inputs, s, "")?;
    let mqme = at("", glued.check_mqme())?;
    let model = at("", glued.as_model())?;
    let pass = mqme.pass && equivalence.get("equivalent").map_or(true, |v| v.as_bool() == Some(true));
    let result = json!({
        "s_eff": poly_value(glued.action()),
        "state": state_value(&glued),
        "mqme": mqme_value(&mqme),
        "equivalence": equivalence,
        "complex": ComplexSpec::from_model(&model),
    });
    Ok(Report::new("glue", s).with_input(inputs.hash()).with_result(pass, result))
}
