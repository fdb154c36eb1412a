//! curvlab: curvature, homology, flow and rigidity reports for weighted
//! graphs and Markov chains, over exact rational arithmetic.
//!
//! Exit codes: 0 success / predicate true, 1 input error, 2 precondition
//! violated, 3 non-convergence, 4 predicate false.

use std::collections::BTreeMap;

use curvlab_core::bakry_emery::{bakry_emery, bakry_emery_report, Dimension};
use curvlab_core::complex::{
    build_complex, build_complex_bounded, build_path_complex, two_cell_length_bound,
};
use curvlab_core::curvature::{curvature_report, sweep_threads, CurvatureKind};
use curvlab_core::error::Error;
use curvlab_core::flow::{
    constant_curvature_cycle, run_flow, zero_curvature_equivalence, FlowConfig,
};
use curvlab_core::generators::parse_generator;
use curvlab_core::graph::{parse_graph, serialize_graph, EdgeLengths, Model};
use curvlab_core::homology::{betti1, betti1_markov, harmonic_basis, markov_harmonic_basis};
use curvlab_core::json;
use curvlab_core::metric::{model_metric, Metric};
use curvlab_core::rational::parse_rational;
use curvlab_core::rigidity::{
    bone_idle, negative_set_bound, obs_bone_idle_equivalence, recognize_torus, sharpness,
    verify_torus,
};

const USAGE: &str = "usage: curvlab <gen|curvature|betti|flow|check> ...
  gen <family:params> [--out FILE]
  curvature <ollivier|idle|bakry-emery> (--gen SPEC | --input FILE)
            [--eps P/Q] [--dim N|inf] [--vertex ID] [--tol FLOAT]
  betti     (--gen SPEC | --input FILE) [--path-complex] [--basis]
            [--complex] [--max-cycle-len N]
  flow      (--gen SPEC | --input FILE) [--alpha P/Q] [--tol P/Q]
            [--max-iter N] [--seed N] [--check-equivalence] [--exact]
            [--trace FILE]
  check     <sharp|bone-idle|torus|negative-set|obs-bone-idle>
            (--gen SPEC | --input FILE) [--W id1,id2,...]
common:     [--metric combinatorial|FILE] [--threads N] [--out FILE]
";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(run(&args));
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Internal(_) => 1,
        Error::Precondition(_) => 2,
        Error::NonConvergence(_) => 3,
    }
}

fn run(args: &[String]) -> i32 {
    match dispatch(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("curvlab: {e}");
            exit_code(&e)
        }
    }
}

struct Opts {
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
    switches: Vec<String>,
}

const SWITCHES: &[&str] = &[
    "--path-complex",
    "--basis",
    "--complex",
    "--check-equivalence",
    "--exact",
];

fn parse_opts(args: &[String]) -> Result<Opts, Error> {
    let mut positional = Vec::new();
    let mut flags = BTreeMap::new();
    let mut switches = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if SWITCHES.contains(&a.as_str()) {
            switches.push(a.clone());
        } else if let Some(name) = a.strip_prefix("--") {
            let value = it
                .next()
                .ok_or_else(|| Error::Parse(format!("flag --{name} needs a value")))?;
            flags.insert(name.to_string(), value.clone());
        } else {
            positional.push(a.clone());
        }
    }
    Ok(Opts {
        positional,
        flags,
        switches,
    })
}

impl Opts {
    fn has(&self, switch: &str) -> bool {
        self.switches.iter().any(|s| s == switch)
    }

    fn get(&self, flag: &str) -> Option<&str> {
        self.flags.get(flag).map(|s| s.as_str())
    }

    fn threads(&self) -> Result<usize, Error> {
        let explicit = match self.get("threads") {
            Some(s) => Some(
                s.parse()
                    .map_err(|_| Error::Parse(format!("invalid thread count {s:?}")))?,
            ),
            None => None,
        };
        Ok(sweep_threads(explicit))
    }
}

fn load_model(opts: &Opts) -> Result<(Model, EdgeLengths), Error> {
    let (model, mut lengths) = match (opts.get("gen"), opts.get("input")) {
        (Some(spec), None) => {
            let mut spec = spec.to_string();
            // --seed N turns a bare cycle spec into its seeded-kernel form
            if let Some(seed) = opts.get("seed") {
                if spec.starts_with("cycle:") && spec.matches(':').count() == 1 {
                    spec = format!("{spec}:{seed}");
                }
            }
            let model = parse_generator(&spec)?;
            let lengths = model.combinatorial_lengths();
            (model, lengths)
        }
        (None, Some(path)) => {
            let text = std::fs::read(path)
                .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
            parse_graph(&text)?
        }
        _ => {
            return Err(Error::Parse(
                "exactly one of --gen SPEC or --input FILE is required".into(),
            ))
        }
    };
    match opts.get("metric") {
        None => {}
        Some("combinatorial") => lengths = model.combinatorial_lengths(),
        Some(path) => lengths = read_lengths_file(path, &model)?,
    }
    Ok((model, lengths))
}

fn read_lengths_file(path: &str, model: &Model) -> Result<EdgeLengths, Error> {
    #[derive(serde::Deserialize)]
    struct LengthsFile {
        lengths: Vec<LengthEntry>,
    }
    #[derive(serde::Deserialize)]
    struct LengthEntry {
        u: String,
        v: String,
        d: String,
    }
    let text = std::fs::read(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    let file: LengthsFile = serde_json::from_slice(&text)
        .map_err(|e| Error::Parse(format!("malformed lengths file: {e}")))?;
    let mut len = BTreeMap::new();
    for e in file.lengths {
        let u = model
            .vertex(&e.u)
            .ok_or_else(|| Error::Parse(format!("unknown vertex {:?}", e.u)))?;
        let v = model
            .vertex(&e.v)
            .ok_or_else(|| Error::Parse(format!("unknown vertex {:?}", e.v)))?;
        len.insert((u.min(v), u.max(v)), parse_rational(&e.d)?);
    }
    let lengths = EdgeLengths { len };
    lengths.validate(&model.edges())?;
    Ok(lengths)
}

fn metric_of(model: &Model, lengths: &EdgeLengths) -> Metric {
    model_metric(model, lengths).metric
}

fn emit(opts: &Opts, value: &serde_json::Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match opts.get("out") {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(args: &[String]) -> Result<i32, Error> {
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return Ok(1);
    };
    let rest = &args[1..];
    match command.as_str() {
        "gen" => cmd_gen(rest),
        "curvature" => cmd_curvature(rest),
        "betti" => cmd_betti(rest),
        "flow" => cmd_flow(rest),
        "check" => cmd_check(rest),
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            Ok(0)
        }
        other => Err(Error::Parse(format!("unknown command {other:?}"))),
    }
}

fn cmd_gen(args: &[String]) -> Result<i32, Error> {
    let opts = parse_opts(args)?;
    let spec = opts
        .positional
        .first()
        .ok_or_else(|| Error::Parse("gen needs a family:params spec".into()))?;
    let model = parse_generator(spec)?;
    let text = serialize_graph(&model, None) + "\n";
    match opts.get("out") {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_curvature(args: &[String]) -> Result<i32, Error> {
    let opts = parse_opts(args)?;
    let kind = opts
        .positional
        .first()
        .map(String::as_str)
        .ok_or_else(|| Error::Parse("curvature needs ollivier | idle | bakry-emery".into()))?;
    let (model, lengths) = load_model(&opts)?;
    let threads = opts.threads()?;
    match kind {
        "ollivier" => {
            let metric = metric_of(&model, &lengths);
            let report = curvature_report(&model, &metric, CurvatureKind::Ollivier, threads)?;
            emit(&opts, &json::curvature_json(&model, &report))?;
            Ok(0)
        }
        "idle" => {
            let eps = parse_rational(opts.get("eps").unwrap_or("1"))?;
            let metric = metric_of(&model, &lengths);
            let report = curvature_report(&model, &metric, CurvatureKind::Idleness(eps), threads)?;
            emit(&opts, &json::curvature_json(&model, &report))?;
            Ok(0)
        }
        "bakry-emery" => {
            let dim = match opts.get("dim").unwrap_or("inf") {
                "inf" => Dimension::Infinite,
                s => Dimension::Finite(parse_rational(s)?),
            };
            let tol: f64 = opts
                .get("tol")
                .unwrap_or("1e-9")
                .parse()
                .map_err(|_| Error::Parse("invalid tolerance".into()))?;
            let results = match opts.get("vertex") {
                Some(id) => {
                    let x = model
                        .vertex(id)
                        .ok_or_else(|| Error::Parse(format!("unknown vertex {id:?}")))?;
                    vec![bakry_emery(&model, x, dim, tol)?]
                }
                None => bakry_emery_report(&model, dim, tol, threads)?,
            };
            emit(&opts, &json::bakry_emery_json(&model, &results))?;
            Ok(0)
        }
        other => Err(Error::Parse(format!("unknown curvature kind {other:?}"))),
    }
}

fn cmd_betti(args: &[String]) -> Result<i32, Error> {
    let opts = parse_opts(args)?;
    let (model, lengths) = load_model(&opts)?;
    let metric = metric_of(&model, &lengths);
    let cx = if opts.has("--path-complex") {
        build_path_complex(&model)
    } else if let Some(cap) = opts.get("max-cycle-len") {
        let cap: usize = cap
            .parse()
            .map_err(|_| Error::Parse("invalid --max-cycle-len".into()))?;
        let certified = two_cell_length_bound(&model, &metric);
        if cap < certified {
            eprintln!(
                "curvlab: warning: cycle length cap {cap} is below the computed bound \
                 {certified}; beta_1 is only certified at the computed bound"
            );
        }
        build_complex_bounded(&model, &metric, cap)
    } else {
        build_complex(&model, &metric)
    };
    let b1 = betti1(&cx);
    let markov_b1 = match &model {
        Model::Markov(c) => Some(betti1_markov(&cx, c)),
        Model::Weighted(_) => None,
    };
    let basis = if opts.has("--basis") {
        Some(match &model {
            Model::Weighted(g) => harmonic_basis(&cx, g),
            Model::Markov(c) => markov_harmonic_basis(&cx, c)
                .into_iter()
                .map(|(f, _)| f)
                .collect(),
        })
    } else {
        None
    };
    let mut out = json::betti_json(&model, &cx, b1, markov_b1, basis.as_deref());
    if opts.has("--complex") {
        out["complex"] = json::complex_json(&model, &cx);
    }
    emit(&opts, &out)?;
    Ok(0)
}

fn cmd_flow(args: &[String]) -> Result<i32, Error> {
    let opts = parse_opts(args)?;
    let (model, lengths) = load_model(&opts)?;
    let mut cfg = FlowConfig::long_run();
    if let Some(a) = opts.get("alpha") {
        cfg.alpha = parse_rational(a)?;
    }
    if let Some(t) = opts.get("tol") {
        cfg.tolerance = parse_rational(t)?;
    }
    if let Some(m) = opts.get("max-iter") {
        cfg.max_iterations = m
            .parse()
            .map_err(|_| Error::Parse("invalid --max-iter".into()))?;
    }
    if opts.has("--exact") {
        cfg.round_denominator = None;
    }
    let record_trace = opts.get("trace").is_some();
    let is_markov_cycle = matches!(&model, Model::Markov(_))
        && (0..model.vertex_count()).all(|x| model.neighbors(x).len() == 2);
    let (result, eq) = if is_markov_cycle {
        let Model::Markov(chain) = &model else {
            unreachable!()
        };
        let result = if record_trace {
            // the uniqueness cross-run still happens; the traced run repeats
            // the unit start with recording on
            constant_curvature_cycle(chain, &cfg)?;
            run_flow(&model, &lengths, &cfg, true)?
        } else {
            constant_curvature_cycle(chain, &cfg)?
        };
        let eq = if opts.has("--check-equivalence") {
            Some(zero_curvature_equivalence(chain, &result, &cfg)?)
        } else {
            None
        };
        (result, eq)
    } else {
        if opts.has("--check-equivalence") {
            return Err(Error::Precondition(
                "--check-equivalence needs a Markov chain on a cycle".into(),
            ));
        }
        (run_flow(&model, &lengths, &cfg, record_trace)?, None)
    };
    if let Some(path) = opts.get("trace") {
        std::fs::write(path, json::flow_trace_csv(&model, &result))
            .map_err(|e| Error::Parse(format!("cannot write {path}: {e}")))?;
    }
    emit(&opts, &json::flow_json(&model, &result, eq.as_ref()))?;
    Ok(if result.converged { 0 } else { 3 })
}

fn cmd_check(args: &[String]) -> Result<i32, Error> {
    let opts = parse_opts(args)?;
    let what = opts.positional.first().map(String::as_str).ok_or_else(|| {
        Error::Parse("check needs sharp | bone-idle | torus | negative-set | obs-bone-idle".into())
    })?;
    let (model, lengths) = load_model(&opts)?;
    let metric = metric_of(&model, &lengths);
    let threads = opts.threads()?;
    match what {
        "sharp" => {
            let report = sharpness(&model, &metric, threads)?;
            emit(&opts, &json::sharpness_json(&report))?;
            Ok(if report.sharp_max { 0 } else { 4 })
        }
        "bone-idle" => {
            let Model::Weighted(g) = &model else {
                return Err(Error::Precondition(
                    "bone-idleness is defined for weighted graphs".into(),
                ));
            };
            let report = bone_idle(g, &metric, threads)?;
            emit(&opts, &json::bone_idle_json(&model, &report))?;
            Ok(if report.bone_idle { 0 } else { 4 })
        }
        "torus" => match recognize_torus(&model, &metric, threads) {
            Ok(structure) => {
                let (ok, reasons) = verify_torus(&model, &metric, &structure, threads)?;
                if !ok {
                    return Err(Error::Internal(format!(
                        "recognized structure failed re-verification: {}",
                        reasons.join("; ")
                    )));
                }
                emit(&opts, &json::torus_json(&model, &structure))?;
                Ok(0)
            }
            Err(Error::Precondition(reason)) => {
                emit(
                    &opts,
                    &serde_json::json!({"torus": false, "reason": reason}),
                )?;
                Ok(4)
            }
            Err(other) => Err(other),
        },
        "negative-set" => {
            let w_ids = opts
                .get("W")
                .ok_or_else(|| Error::Parse("negative-set needs --W id1,id2,...".into()))?;
            let mut w_set = Vec::new();
            for id in w_ids.split(',').filter(|s| !s.is_empty()) {
                w_set.push(
                    model
                        .vertex(id)
                        .ok_or_else(|| Error::Parse(format!("unknown vertex {id:?}")))?,
                );
            }
            let report = negative_set_bound(&model, &metric, &w_set, threads)?;
            emit(&opts, &json::negative_set_json(&report))?;
            Ok(if report.holds { 0 } else { 4 })
        }
        "obs-bone-idle" => {
            let Model::Weighted(g) = &model else {
                return Err(Error::Precondition(
                    "the equivalence is stated for weighted graphs".into(),
                ));
            };
            let report = obs_bone_idle_equivalence(g, &metric, threads)?;
            emit(&opts, &json::obs_json(&report))?;
            Ok(if report.agree { 0 } else { 4 })
        }
        other => Err(Error::Parse(format!("unknown check {other:?}"))),
    }
}
