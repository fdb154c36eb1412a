//! Ollivier Ricci flow on edge lengths: multiplicative per-edge updates
//! d <- d (1 - alpha kappa), re-closed to a path metric each step, with
//! optional per-step normalization by the diameter. Arithmetic is exact per
//! step; long runs can round lengths to a fixed denominator grid, and the
//! rounding magnitude is recorded. Includes constant-curvature extraction on
//! cycles and the three-way zero-curvature equivalence report.

use num_traits::{Signed, Zero};

use crate::complex::build_complex;
use crate::curvature::ollivier_primal;
use crate::error::Error;
use crate::graph::{degree_stats, EdgeLengths, MarkovChain, Model};
use crate::homology::betti1;
use crate::metric::{model_metric, Metric};
use crate::rational::{rat, rat_int, round_denominator, round_to_grid, Rational};

#[derive(Debug, Clone)]
pub struct FlowConfig {
    /// step size, strictly between 0 and 1
    pub alpha: Rational,
    /// convergence threshold on max kappa - min kappa
    pub tolerance: Rational,
    pub max_iterations: usize,
    /// divide lengths by the diameter after every step
    pub normalize: bool,
    /// round lengths to multiples of 1/denominator after every step;
    /// needed on long runs to keep the exact arithmetic bounded
    pub round_denominator: Option<u64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            alpha: rat(1, 10),
            tolerance: rat(1, 100_000_000),
            max_iterations: 10_000,
            normalize: true,
            round_denominator: None,
        }
    }
}

impl FlowConfig {
    /// Long-run preset: default parameters plus length rounding at 1e12.
    pub fn long_run() -> Self {
        FlowConfig {
            round_denominator: Some(1_000_000_000_000),
            ..FlowConfig::default()
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.alpha <= Rational::zero() || self.alpha >= rat_int(1) {
            return Err(Error::Precondition("flow step must lie in (0,1)".into()));
        }
        Ok(())
    }
}

/// Evolving lengths with their metric closure and per-edge curvature.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub lengths: EdgeLengths,
    pub metric: Metric,
    /// kappa per edge, parallel to `edges`
    pub kappa: Vec<Rational>,
    pub edges: Vec<(usize, usize)>,
    pub iteration: usize,
    /// (iteration, edge) pairs where the direct length exceeded the closure
    pub shortcut_events: Vec<(usize, (usize, usize))>,
    /// largest |rounded - exact| seen so far, when rounding is on
    pub max_rounding_error: Rational,
}

impl FlowState {
    pub fn spread(&self) -> Rational {
        let max = self.kappa.iter().max().unwrap();
        let min = self.kappa.iter().min().unwrap();
        max - min
    }

    pub fn kappa_min(&self) -> &Rational {
        self.kappa.iter().min().unwrap()
    }

    pub fn kappa_max(&self) -> &Rational {
        self.kappa.iter().max().unwrap()
    }

    fn distance_ratio(&self) -> Rational {
        self.metric.diameter() / self.metric.min_positive()
    }
}

/// One recorded step: iteration number, edge lengths, edge curvatures.
pub type TraceRow = (usize, Vec<Rational>, Vec<Rational>);

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub converged: bool,
    pub iterations: usize,
    pub state: FlowState,
    pub spread: Rational,
    /// diameter / smallest distance, per iteration (including the start)
    pub ratio_trace: Vec<Rational>,
    /// diagnostics only: the cited convergence proof says max kappa is
    /// non-increasing and min kappa non-decreasing; violations are recorded,
    /// not fatal
    pub monitor_violations: Vec<String>,
    /// per-iteration rows when tracing was requested
    pub trace: Option<Vec<TraceRow>>,
}

fn edge_curvatures(
    model: &Model,
    metric: &Metric,
    edges: &[(usize, usize)],
) -> Result<Vec<Rational>, Error> {
    edges
        .iter()
        .map(|&(u, v)| ollivier_primal(model, metric, u, v))
        .collect()
}

/// Initial state: close the lengths, compute curvature.
pub fn initial_state(model: &Model, init: &EdgeLengths) -> Result<FlowState, Error> {
    let edges = model.edges();
    init.validate(&edges)?;
    let pm = model_metric(model, init);
    let kappa = edge_curvatures(model, &pm.metric, &edges)?;
    let shortcut_events = pm.shortcut_edges.into_iter().map(|e| (0, e)).collect();
    Ok(FlowState {
        lengths: init.clone(),
        metric: pm.metric,
        kappa,
        edges,
        iteration: 0,
        shortcut_events,
        max_rounding_error: Rational::zero(),
    })
}

/// One flow step: update lengths, re-close, optionally normalize and round,
/// recompute curvature. Lengths must stay positive; alpha kappa >= 1 aborts.
pub fn flow_step(model: &Model, state: &FlowState, cfg: &FlowConfig) -> Result<FlowState, Error> {
    cfg.validate()?;
    let mut lengths = state.lengths.clone();
    for (e, &(u, v)) in state.edges.iter().enumerate() {
        let factor = rat_int(1) - &cfg.alpha * &state.kappa[e];
        if factor <= Rational::zero() {
            return Err(Error::NonConvergence(format!(
                "length of edge ({},{}) would become non-positive; step size too large",
                model.id(u),
                model.id(v)
            )));
        }
        let l = lengths.len.get_mut(&(u, v)).unwrap();
        *l *= factor;
    }
    let mut pm = model_metric(model, &lengths);
    let iteration = state.iteration + 1;
    let mut shortcut_events = state.shortcut_events.clone();
    shortcut_events.extend(pm.shortcut_edges.iter().map(|&e| (iteration, e)));

    if cfg.normalize {
        let diameter = pm.metric.diameter();
        for l in lengths.len.values_mut() {
            *l /= &diameter;
        }
        pm.metric = pm.metric.scaled(&(rat_int(1) / diameter));
    }
    let mut max_rounding_error = state.max_rounding_error.clone();
    if let Some(den) = cfg.round_denominator {
        for l in lengths.len.values_mut() {
            let rounded = round_to_grid(l, den);
            let err = (&rounded - &*l).abs();
            if err > max_rounding_error {
                max_rounding_error = err;
            }
            *l = rounded;
        }
        pm = model_metric(model, &lengths);
        shortcut_events.extend(pm.shortcut_edges.iter().map(|&e| (iteration, e)));
    }
    let kappa = edge_curvatures(model, &pm.metric, &state.edges)?;
    Ok(FlowState {
        lengths,
        metric: pm.metric,
        kappa,
        edges: state.edges.clone(),
        iteration,
        shortcut_events,
        max_rounding_error,
    })
}

/// Iterates the flow until the curvature spread falls below the tolerance
/// or the iteration budget runs out. Non-convergence is reported in the
/// result, not as an error.
pub fn run_flow(
    model: &Model,
    init: &EdgeLengths,
    cfg: &FlowConfig,
    record_trace: bool,
) -> Result<FlowResult, Error> {
    cfg.validate()?;
    let mut state = initial_state(model, init)?;
    let mut ratio_trace = vec![state.distance_ratio()];
    let mut monitor_violations = Vec::new();
    let mut trace = record_trace.then(Vec::new);
    let snapshot = |t: &mut Option<Vec<TraceRow>>, s: &FlowState| {
        if let Some(rows) = t.as_mut() {
            let lens = s
                .edges
                .iter()
                .map(|&(u, v)| s.lengths.get(u, v).clone())
                .collect();
            rows.push((s.iteration, lens, s.kappa.clone()));
        }
    };
    snapshot(&mut trace, &state);
    let mut converged = state.spread() <= cfg.tolerance;
    while !converged && state.iteration < cfg.max_iterations {
        let prev_max = state.kappa_max().clone();
        let prev_min = state.kappa_min().clone();
        state = flow_step(model, &state, cfg)?;
        ratio_trace.push(state.distance_ratio());
        snapshot(&mut trace, &state);
        if *state.kappa_max() > prev_max {
            monitor_violations.push(format!(
                "iteration {}: max kappa increased",
                state.iteration
            ));
        }
        if *state.kappa_min() < prev_min {
            monitor_violations.push(format!(
                "iteration {}: min kappa decreased",
                state.iteration
            ));
        }
        converged = state.spread() <= cfg.tolerance;
    }
    if cfg.normalize {
        // convergence at iteration 0 skips the per-step normalization;
        // the reported limit is normalized either way (kappa is invariant)
        let diameter = state.metric.diameter();
        if diameter != rat_int(1) {
            for l in state.lengths.len.values_mut() {
                *l /= &diameter;
            }
            state.metric = state.metric.scaled(&(rat_int(1) / diameter));
        }
    }
    let spread = state.spread();
    Ok(FlowResult {
        converged,
        iterations: state.iteration,
        state,
        spread,
        ratio_trace,
        monitor_violations,
        trace,
    })
}

fn require_cycle(model: &Model) -> Result<usize, Error> {
    let (dmin, dmax, _) = degree_stats(model);
    let n = model.vertex_count();
    if dmin != 2 || dmax != 2 {
        return Err(Error::Precondition("flow target must be a cycle".into()));
    }
    if n < 5 {
        return Err(Error::Precondition(format!(
            "constant-curvature extraction needs a cycle of length >= 5, got {n}"
        )));
    }
    Ok(n)
}

/// Random positive initial lengths for the uniqueness cross-run.
fn randomized_lengths(model: &Model, seed: u64) -> EdgeLengths {
    let mut rng = crate::generators::Rng::new(seed);
    let len = model
        .edges()
        .into_iter()
        .map(|e| (e, rat(32 + rng.below(65) as i64, 64)))
        .collect();
    EdgeLengths { len }
}

/// Runs the flow on a cycle from the unit metric, plus a second run from a
/// randomized metric, and checks that the two normalized limits agree
/// entrywise within ten times the tolerance. Returns the unit-start result.
pub fn constant_curvature_cycle(
    chain: &MarkovChain,
    cfg: &FlowConfig,
) -> Result<FlowResult, Error> {
    let model = Model::Markov(chain.clone());
    let n = require_cycle(&model)?;
    let unit = run_flow(&model, &model.combinatorial_lengths(), cfg, false)?;
    if !unit.converged {
        return Err(Error::NonConvergence(format!(
            "flow on C_{n} did not settle within {} iterations",
            cfg.max_iterations
        )));
    }
    let second = run_flow(
        &model,
        &randomized_lengths(&model, 0xC1C1E + n as u64),
        cfg,
        false,
    )?;
    if !second.converged {
        return Err(Error::NonConvergence(
            "flow from the randomized metric did not settle".into(),
        ));
    }
    let allowance = rat_int(10) * &cfg.tolerance;
    for x in 0..n {
        for y in x + 1..n {
            let gap = (unit.state.metric.get(x, y) - second.state.metric.get(x, y)).abs();
            if gap > allowance {
                return Err(Error::NonConvergence(format!(
                    "limit metrics from two initializations differ by {} at pair ({x},{y})",
                    crate::rational::format_rational(&gap)
                )));
            }
        }
    }
    Ok(unit)
}

/// The three predicates of the constant-curvature trichotomy on cycles and
/// their agreement, evaluated on the exact limit metric.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    /// all limit curvatures within tolerance of zero
    pub zero_curvature: bool,
    /// exact verdict after rationalizing the limit at denominator 1e6;
    /// None when rationalization flips a curvature sign (inconclusive)
    pub zero_curvature_exact: Option<bool>,
    pub x2_empty: bool,
    pub betti_sharp: bool,
    pub agree: bool,
}

/// Evaluates kappa = 0 (tolerance plus exact recertification), X2 emptiness
/// and Betti sharpness on a converged cycle flow.
pub fn zero_curvature_equivalence(
    chain: &MarkovChain,
    result: &FlowResult,
    cfg: &FlowConfig,
) -> Result<EquivalenceReport, Error> {
    let model = Model::Markov(chain.clone());
    require_cycle(&model)?;
    if !result.converged {
        return Err(Error::Precondition(
            "equivalence check needs a converged constant-curvature metric".into(),
        ));
    }
    let zero_curvature = result.state.kappa.iter().all(|k| k.abs() <= cfg.tolerance);

    // exact recertification: snap the limit lengths to small rationals and
    // rerun the exact LPs on the snapped metric
    let snapped = EdgeLengths {
        len: result
            .state
            .lengths
            .len
            .iter()
            .map(|(&e, l)| (e, round_denominator(l, 1_000_000)))
            .collect(),
    };
    let pm = model_metric(&model, &snapped);
    let exact_kappa = edge_curvatures(&model, &pm.metric, &result.state.edges)?;
    let exact_zero = exact_kappa.iter().all(|k| k.is_zero());
    let exact_consistent = exact_zero == zero_curvature;
    let zero_curvature_exact = exact_consistent.then_some(exact_zero);

    let cx = build_complex(&model, &result.state.metric);
    let x2_empty = cx.cell_count() == 0;
    let (dmin, _, _) = degree_stats(&model);
    let betti_sharp = betti1(&cx) == 1 && dmin == 2;
    let agree = zero_curvature == x2_empty && x2_empty == betti_sharp;
    Ok(EquivalenceReport {
        zero_curvature,
        zero_curvature_exact,
        x2_empty,
        betti_sharp,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, CycleKernel};

    #[test]
    fn uniform_octagon_is_a_fixed_point() {
        let c8 = generators::gen_cycle(8, None).unwrap();
        let model = Model::Markov(c8);
        let cfg = FlowConfig::default();
        let s0 = initial_state(&model, &model.combinatorial_lengths()).unwrap();
        assert!(s0.kappa.iter().all(|k| k.is_zero()));
        let s1 = flow_step(&model, &s0, &cfg).unwrap();
        let s2 = flow_step(&model, &s1, &cfg).unwrap();
        assert_eq!(s1.lengths, s2.lengths);
        assert_eq!(s1.metric, s2.metric);
    }

    #[test]
    fn pentagon_converges_immediately_with_positive_curvature() {
        let c5 = generators::gen_cycle(5, None).unwrap();
        let model = Model::Markov(c5);
        let r = run_flow(
            &model,
            &model.combinatorial_lengths(),
            &FlowConfig::default(),
            false,
        )
        .unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert!(r.spread.is_zero());
        assert!(r.state.kappa.iter().all(|k| *k > Rational::zero()));
    }

    #[test]
    fn uneven_hexagon_contracts_length_ratio() {
        let c6 = generators::gen_cycle(6, None).unwrap();
        let model = Model::Markov(c6);
        let mut init = model.combinatorial_lengths();
        *init.len.get_mut(&(0, 5)).unwrap() = rat(2, 1);
        let cfg = FlowConfig::default();
        let s0 = initial_state(&model, &init).unwrap();
        let ratio = |s: &FlowState| {
            let lens: Vec<Rational> = s
                .edges
                .iter()
                .map(|&(u, v)| s.lengths.get(u, v).clone())
                .collect();
            lens.iter().max().unwrap() / lens.iter().min().unwrap()
        };
        let s1 = flow_step(&model, &s0, &cfg).unwrap();
        assert!(ratio(&s1) < ratio(&s0));
    }

    #[test]
    fn scale_equivariance_of_normalized_trajectories() {
        let c7 = generators::gen_cycle(7, Some(CycleKernel::Seeded(5))).unwrap();
        let model = Model::Markov(c7);
        let cfg = FlowConfig::default(); // exact, no rounding
        let unit = model.combinatorial_lengths();
        let scaled = EdgeLengths {
            len: unit.len.iter().map(|(&e, l)| (e, l * rat(9, 2))).collect(),
        };
        let mut a = initial_state(&model, &unit).unwrap();
        let mut b = initial_state(&model, &scaled).unwrap();
        for _ in 0..3 {
            a = flow_step(&model, &a, &cfg).unwrap();
            b = flow_step(&model, &b, &cfg).unwrap();
            assert_eq!(a.lengths, b.lengths, "normalized trajectories coincide");
        }
    }

    #[test]
    fn rope_ladder_flow_converges_at_start() {
        let g = generators::gen_rope_ladder(6).unwrap();
        let model = Model::Weighted(g);
        let r = run_flow(
            &model,
            &model.combinatorial_lengths(),
            &FlowConfig::default(),
            false,
        )
        .unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert!(r.state.kappa.iter().all(|k| k.is_zero()));
    }

    #[test]
    fn cycle_preconditions() {
        let c4 = generators::gen_cycle(4, None).unwrap();
        assert!(matches!(
            constant_curvature_cycle(&c4, &FlowConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn uniform_hexagon_equivalence_all_true() {
        let c6 = generators::gen_cycle(6, None).unwrap();
        let cfg = FlowConfig::long_run();
        let r = constant_curvature_cycle(&c6, &cfg).unwrap();
        let eq = zero_curvature_equivalence(&c6, &r, &cfg).unwrap();
        assert!(eq.zero_curvature && eq.x2_empty && eq.betti_sharp && eq.agree);
        assert_eq!(eq.zero_curvature_exact, Some(true));
    }

    #[test]
    fn uniform_pentagon_equivalence_all_false() {
        let c5 = generators::gen_cycle(5, None).unwrap();
        let cfg = FlowConfig::long_run();
        let r = constant_curvature_cycle(&c5, &cfg).unwrap();
        let eq = zero_curvature_equivalence(&c5, &r, &cfg).unwrap();
        assert!(!eq.zero_curvature && !eq.x2_empty && !eq.betti_sharp && eq.agree);
        assert_eq!(eq.zero_curvature_exact, Some(false));
    }

    #[test]
    fn biased_hexagon_two_starts_agree() {
        let c6 = generators::gen_cycle(6, Some(CycleKernel::Forward(vec![rat(2, 3); 6]))).unwrap();
        let r = constant_curvature_cycle(&c6, &FlowConfig::long_run()).unwrap();
        assert!(r.converged);
    }
}
