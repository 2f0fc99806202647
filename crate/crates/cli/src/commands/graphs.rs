//! `enumerate-graphs` and `strata`.

use std::collections::BTreeSet;

use bvkit::graphs::{
    codim1_strata_boundary, codim1_strata_closed, enumerate_graphs, enumerate_labeled, labeled_count_estimate,
    loop_number, stratum_face_classes, GraphFlags,
};
use serde_json::json;

use crate::report::Report;
use crate::{at, CliError, GraphArgs, Settings};

/// Labeled enumerations above this size are skipped.
const LABELED_LIMIT: u128 = 200_000;

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn enumerate(g: &GraphArgs, s: &Settings) -> Result<Report, CliError> {
    let flags = GraphFlags { oriented: g.oriented, loops: g.loops, multi: g.multi };
    let graphs = at("", enumerate_graphs(g.bulk, g.boundary, g.max_edges, flags))?;
    let listed: Vec<_> = graphs
        .iter()
        .map(|gr| {
            let mut v = json!({
                "edges": gr.edges,
                "loop_number": loop_number(gr),
                "components": gr.components().len(),
                "automorphisms": gr.automorphism_count(),
            });
            if g.faces {
                v["faces"] = json!(stratum_face_classes(gr));
            }
            v
        })
        .collect();
    let estimate = labeled_count_estimate(g.bulk, g.boundary, g.max_edges, flags);
    let mut pass = true;
    let labeled = if estimate <= LABELED_LIMIT {
        let all = at("", enumerate_labeled(g.bulk, g.boundary, g.max_edges, flags))?;
        let classes: BTreeSet<_> = all.iter().map(|x| x.canonical()).collect();
        let canon: BTreeSet<_> = graphs.iter().cloned().collect();
        let group = factorial(g.bulk) * factorial(g.boundary);
        let orbit_sum: u128 = graphs.iter().map(|x| group / x.automorphism_count() as u128).sum();
        let ok = classes == canon && orbit_sum == all.len() as u128;
        pass &= ok;
        json!({"count": all.len(), "classes": classes.len(), "orbit_sum": orbit_sum.to_string(), "pass": ok})
    } else {
        json!(null)
    };
    let result = json!({
        "count": graphs.len(),
        "graphs": listed,
        "labeled_estimate": estimate.to_string(),
        "labeled_check": labeled,
    });
    let mut report = Report::new("enumerate-graphs", s);
    report.set_setting("graphs", json!({
        "bulk": g.bulk, "boundary": g.boundary, "max_edges": g.max_edges,
        "oriented": g.oriented, "loops": g.loops, "multi": g.multi, "faces": g.faces,
    }));
    Ok(report.with_result(pass, result))
}

pub fn strata(bulk: usize, boundary: usize, s: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("strata", s);
    report.set_setting("graphs", json!({"bulk": bulk, "boundary": boundary}));
    let (pass, result) = if boundary == 0 {
        let list = codim1_strata_closed(bulk);
        let expected = (1u128 << bulk).saturating_sub(bulk as u128 + 1);
        let ok = list.len() as u128 == expected;
        (ok, json!({"host": "closed", "count": list.len(), "expected": expected.to_string(), "strata": list}))
    } else {
        let b = codim1_strata_boundary(bulk, boundary);
        let v = json!({
            "host": "boundary",
            "type_one_count": b.type_one.len(),
            "type_two_count": b.type_two.len(),
            "strata": b,
        });
        (true, v)
    };
    Ok(report.with_result(pass, result))
}
