//! JSON views of the report types, with every rational rendered as a "p/q"
//! string and floats at 15 significant digits. Key order is alphabetical
//! (serde_json maps), so identical inputs give byte-identical output.

use serde_json::{json, Value};

use crate::bakry_emery::BakryEmeryResult;
use crate::complex::CellComplex;
use crate::curvature::{CurvatureKind, CurvatureReport};
use crate::flow::{EquivalenceReport, FlowResult};
use crate::graph::Model;
use crate::homology::OneForm;
use crate::rational::{format_rational, Rational};
use crate::rigidity::{
    BoneIdleReport, NegativeSetBound, ObsBoneIdleReport, SharpnessReport, TorusStructure,
};

fn rstr(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn fstr(x: f64) -> Value {
    Value::String(format!("{x:.14e}"))
}

fn edge(model: &Model, u: usize, v: usize) -> (String, String) {
    (model.id(u).to_string(), model.id(v).to_string())
}

pub fn curvature_json(model: &Model, report: &CurvatureReport) -> Value {
    let edges: Vec<Value> = report
        .values
        .iter()
        .map(|(u, v, k)| {
            let (u, v) = edge(model, *u, *v);
            json!({"u": u, "v": v, "kappa": rstr(k)})
        })
        .collect();
    let mut out = json!({
        "edges": edges,
        "summary": {
            "min": rstr(&report.min),
            "max": rstr(&report.max),
            "negative": report.negative,
            "zero": report.zero,
            "positive": report.positive,
        },
    });
    match &report.kind {
        CurvatureKind::Ollivier => out["kind"] = json!("ollivier"),
        CurvatureKind::Idleness(eps) => {
            out["kind"] = json!("idleness");
            out["eps"] = rstr(eps);
        }
    }
    out
}

pub fn bakry_emery_json(model: &Model, results: &[BakryEmeryResult]) -> Value {
    let vertices: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "id": model.id(r.vertex),
                "k": fstr(r.k),
                "residual": fstr(r.residual),
            })
        })
        .collect();
    let min = results.iter().map(|r| r.k).fold(f64::INFINITY, f64::min);
    let max = results
        .iter()
        .map(|r| r.k)
        .fold(f64::NEG_INFINITY, f64::max);
    json!({
        "kind": "bakry-emery",
        "dim": results.first().map(|r| r.dimension.label()).unwrap_or_default(),
        "vertices": vertices,
        "summary": {"min": fstr(min), "max": fstr(max)},
    })
}

pub fn one_form_json(model: &Model, cx: &CellComplex, form: &OneForm) -> Value {
    let entries: Vec<Value> = cx
        .edges
        .iter()
        .zip(&form.values)
        .map(|(&(u, v), val)| {
            let (u, v) = edge(model, u, v);
            json!({"u": u, "v": v, "value": rstr(val)})
        })
        .collect();
    Value::Array(entries)
}

pub fn betti_json(
    model: &Model,
    cx: &CellComplex,
    betti1: usize,
    betti1_markov: Option<usize>,
    basis: Option<&[OneForm]>,
) -> Value {
    let mut out = json!({
        "x0": cx.vertex_count,
        "x1": cx.edge_count(),
        "x2": cx.cell_count(),
        "betti1": betti1,
    });
    if let Some(b) = betti1_markov {
        out["betti1_markov"] = json!(b);
    }
    if let Some(forms) = basis {
        out["basis"] = Value::Array(forms.iter().map(|f| one_form_json(model, cx, f)).collect());
    }
    out
}

/// Debug view of a complex: cells as vertex-id arrays and both coboundary
/// matrices in coordinate-triplet form.
pub fn complex_json(model: &Model, cx: &CellComplex) -> Value {
    let cells: Vec<Value> = cx
        .cells
        .iter()
        .map(|c| {
            Value::Array(
                c.verts
                    .iter()
                    .map(|&v| Value::String(model.id(v).to_string()))
                    .collect(),
            )
        })
        .collect();
    let triplets = |m: &crate::linalg::RationalMatrix| -> Vec<Value> {
        let mut out = Vec::new();
        for i in 0..m.rows {
            for j in 0..m.cols {
                if !num_traits::Zero::is_zero(&m[(i, j)]) {
                    out.push(json!([i, j, rstr(&m[(i, j)])]));
                }
            }
        }
        out
    };
    json!({
        "cells": cells,
        "delta0": triplets(&cx.delta0),
        "delta1": triplets(&cx.delta1),
    })
}

pub fn flow_json(model: &Model, result: &FlowResult, eq: Option<&EquivalenceReport>) -> Value {
    let state = &result.state;
    let lengths: Vec<Value> = state
        .edges
        .iter()
        .map(|&(u, v)| {
            let l = state.lengths.get(u, v);
            let (u, v) = edge(model, u, v);
            json!({"u": u, "v": v, "d": rstr(l)})
        })
        .collect();
    let kappa: Vec<Value> = state
        .edges
        .iter()
        .zip(&state.kappa)
        .map(|(&(u, v), k)| {
            let (u, v) = edge(model, u, v);
            json!({"u": u, "v": v, "kappa": rstr(k)})
        })
        .collect();
    let mut out = json!({
        "converged": result.converged,
        "iterations": result.iterations,
        "spread": rstr(&result.spread),
        "kappa_min": rstr(state.kappa_min()),
        "kappa_max": rstr(state.kappa_max()),
        "lengths": lengths,
        "kappa": kappa,
        "shortcut_events": state.shortcut_events.len(),
        "monitor_violations": result.monitor_violations.clone(),
    });
    if let Some(eq) = eq {
        out["equivalence"] = json!({
            "zero_curvature": eq.zero_curvature,
            "zero_curvature_exact": eq.zero_curvature_exact,
            "x2_empty": eq.x2_empty,
            "betti_sharp": eq.betti_sharp,
            "agree": eq.agree,
        });
    }
    out
}

/// CSV trace: iteration, one length and one kappa column per edge, spread.
pub fn flow_trace_csv(model: &Model, result: &FlowResult) -> String {
    let Some(trace) = &result.trace else {
        return String::new();
    };
    let edges = &result.state.edges;
    let mut head = vec!["iteration".to_string()];
    for &(u, v) in edges {
        head.push(format!("len:{}~{}", model.id(u), model.id(v)));
    }
    for &(u, v) in edges {
        head.push(format!("kappa:{}~{}", model.id(u), model.id(v)));
    }
    head.push("spread".into());
    let mut lines = vec![head.join(",")];
    for (iter, lens, kappas) in trace {
        let mut row = vec![iter.to_string()];
        row.extend(lens.iter().map(format_rational));
        row.extend(kappas.iter().map(format_rational));
        let spread = kappas.iter().max().unwrap().clone() - kappas.iter().min().unwrap();
        row.push(format_rational(&spread));
        lines.push(row.join(","));
    }
    lines.join("\n") + "\n"
}

pub fn sharpness_json(report: &SharpnessReport) -> Value {
    json!({
        "kappa_min": rstr(&report.kappa_min),
        "kappa_max": rstr(&report.kappa_max),
        "betti1": report.betti1,
        "deg_min": report.deg_min,
        "deg_max": report.deg_max,
        "sharp_max": report.sharp_max,
        "sharp_min": report.sharp_min,
    })
}

pub fn bone_idle_json(model: &Model, report: &BoneIdleReport) -> Value {
    let edges: Vec<Value> = report
        .per_edge
        .iter()
        .map(|((u, v), k, k1)| {
            let (u, v) = edge(model, *u, *v);
            json!({"u": u, "v": v, "kappa": rstr(k), "kappa_1": rstr(k1)})
        })
        .collect();
    json!({
        "stochastic": report.stochastic,
        "bone_idle": report.bone_idle,
        "edges": edges,
        "reason": report.reason,
    })
}

pub fn torus_json(model: &Model, t: &TorusStructure) -> Value {
    let generators: Vec<Value> = t
        .generators
        .iter()
        .map(|phi| {
            Value::Array(
                phi.iter()
                    .map(|&y| Value::String(model.id(y).to_string()))
                    .collect(),
            )
        })
        .collect();
    let exponents: Vec<Value> = t
        .exponents
        .iter()
        .enumerate()
        .map(|(x, e)| json!({"id": model.id(x), "exponents": e}))
        .collect();
    json!({
        "torus": true,
        "rank": t.betti1,
        "moduli": t.moduli,
        "relations": t.relations,
        "generators": generators,
        "vertices": exponents,
    })
}

pub fn negative_set_json(r: &NegativeSetBound) -> Value {
    json!({
        "betti1": r.betti1,
        "boundary_edges": r.boundary_edges,
        "holds": r.holds,
    })
}

pub fn obs_json(r: &ObsBoneIdleReport) -> Value {
    json!({
        "sharp_and_bone_idle": r.sharp_and_bone_idle,
        "sharp_and_nonneg_kappa1": r.sharp_and_nonneg_kappa1,
        "torus_constant_measure": r.torus_constant_measure,
        "agree": r.agree,
    })
}
