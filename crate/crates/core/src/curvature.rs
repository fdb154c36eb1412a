//! Ollivier curvature of edges (and arbitrary vertex pairs) through exact
//! linear programs: the transport-plan form, the dual Lipschitz form, and
//! the idleness curvature of the lazy walk. Both forms compute the same
//! number; agreement is asserted in the test suites, not assumed here.

use num_traits::Zero;

use crate::error::Error;
use crate::graph::Model;
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense};
use crate::metric::Metric;
use crate::rational::{rat_int, Rational};

fn closed_ball(model: &Model, x: usize) -> Vec<usize> {
    let mut ball = vec![x];
    ball.extend_from_slice(model.neighbors(x));
    ball.sort_unstable();
    ball
}

/// Transport-plan curvature: the supremum of
/// sum rho(x,y) [1 - d(x,y)/d(x0,y0)] over sub-couplings rho on
/// B1(x0) x B1(y0) whose marginals on the spheres match the one-step rates.
/// rho(x0,y0) carries no constraint and zero objective weight; it is pinned
/// to 0 to keep solutions deterministic.
pub fn ollivier_primal(
    model: &Model,
    metric: &Metric,
    x0: usize,
    y0: usize,
) -> Result<Rational, Error> {
    if x0 == y0 {
        return Err(Error::Precondition(
            "curvature needs two distinct vertices".into(),
        ));
    }
    let bx = closed_ball(model, x0);
    let by = closed_ball(model, y0);
    let d00 = metric.get(x0, y0);

    let mut vars = Vec::new();
    for &x in &bx {
        for &y in &by {
            if (x, y) != (x0, y0) {
                vars.push((x, y));
            }
        }
    }
    let objective: Vec<Rational> = vars
        .iter()
        .map(|&(x, y)| rat_int(1) - metric.get(x, y) / d00)
        .collect();
    let mut prob = LpProblem::new(Sense::Max, objective);
    for &x in model.neighbors(x0) {
        let coeffs = vars
            .iter()
            .map(|&(vx, _)| {
                if vx == x {
                    rat_int(1)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        prob.constrain(coeffs, Relation::Eq, model.rate(x0, x));
    }
    for &y in model.neighbors(y0) {
        let coeffs = vars
            .iter()
            .map(|&(_, vy)| {
                if vy == y {
                    rat_int(1)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        prob.constrain(coeffs, Relation::Eq, model.rate(y0, y));
    }
    let sol = solve_lp(&prob);
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        other => Err(Error::Internal(format!(
            "transport LP for ({}, {}) came back {:?}",
            model.id(x0),
            model.id(y0),
            other
        ))),
    }
}

/// Lipschitz-form curvature: minimize (Lap f(x0) - Lap f(y0)) / d(x0,y0)
/// over f on U = B1(x0) union B1(y0) with |f(u)-f(v)| <= d(u,v) for every
/// pair in U and f(y0) - f(x0) = d(x0,y0). Pairwise constraints against the
/// ambient metric make feasibility equal global 1-Lipschitz extendability.
pub fn ollivier_dual(
    model: &Model,
    metric: &Metric,
    x0: usize,
    y0: usize,
) -> Result<Rational, Error> {
    if x0 == y0 {
        return Err(Error::Precondition(
            "curvature needs two distinct vertices".into(),
        ));
    }
    let mut u: Vec<usize> = closed_ball(model, x0);
    u.extend(closed_ball(model, y0));
    u.sort_unstable();
    u.dedup();
    let slot = |v: usize| u.iter().position(|&z| z == v).unwrap();
    let d00 = metric.get(x0, y0);

    // objective: (Lap f(x0) - Lap f(y0)) / d00, Lap f(x) = sum rate(x,y)(f(y)-f(x))
    let mut objective = vec![Rational::zero(); u.len()];
    let add_laplacian = |center: usize, sign: i64, obj: &mut Vec<Rational>| {
        for &nb in model.neighbors(center) {
            let r = model.rate(center, nb) / d00 * rat_int(sign);
            obj[slot(nb)] += &r;
            obj[slot(center)] -= r;
        }
    };
    add_laplacian(x0, 1, &mut objective);
    add_laplacian(y0, -1, &mut objective);

    let mut prob = LpProblem::new(Sense::Min, objective);
    for j in 0..u.len() {
        prob.free_var(j);
    }
    let unit = |j: usize, s: i64| {
        let mut c = vec![Rational::zero(); u.len()];
        c[j] = rat_int(s);
        c
    };
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let mut c = unit(i, 1);
            c[j] = rat_int(-1);
            prob.constrain(c.clone(), Relation::Le, metric.get(u[i], u[j]).clone());
            for x in c.iter_mut() {
                *x = -x.clone();
            }
            prob.constrain(c, Relation::Le, metric.get(u[i], u[j]).clone());
        }
    }
    // gradient pinned to 1 along the pair, and f(x0) = 0 for determinacy
    let mut grad = unit(slot(y0), 1);
    grad[slot(x0)] = rat_int(-1);
    prob.constrain(grad, Relation::Eq, d00.clone());
    prob.constrain(unit(slot(x0), 1), Relation::Eq, Rational::zero());

    let sol = solve_lp(&prob);
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        other => Err(Error::Internal(format!(
            "Lipschitz LP for ({}, {}) came back {:?}",
            model.id(x0),
            model.id(y0),
            other
        ))),
    }
}

/// Exact Wasserstein distance between two finitely supported probability
/// measures, as a full-mass coupling LP with cost d.
fn wasserstein(
    metric: &Metric,
    mu: &[(usize, Rational)],
    nu: &[(usize, Rational)],
) -> Result<Rational, Error> {
    let mut vars = Vec::new();
    for (i, _) in mu.iter().enumerate() {
        for (j, _) in nu.iter().enumerate() {
            vars.push((i, j));
        }
    }
    let objective: Vec<Rational> = vars
        .iter()
        .map(|&(i, j)| metric.get(mu[i].0, nu[j].0).clone())
        .collect();
    let mut prob = LpProblem::new(Sense::Min, objective);
    for (i, (_, mass)) in mu.iter().enumerate() {
        let coeffs = vars
            .iter()
            .map(|&(vi, _)| {
                if vi == i {
                    rat_int(1)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        prob.constrain(coeffs, Relation::Eq, mass.clone());
    }
    for (j, (_, mass)) in nu.iter().enumerate() {
        let coeffs = vars
            .iter()
            .map(|&(_, vj)| {
                if vj == j {
                    rat_int(1)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        prob.constrain(coeffs, Relation::Eq, mass.clone());
    }
    let sol = solve_lp(&prob);
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        other => Err(Error::Internal(format!("coupling LP came back {other:?}"))),
    }
}

/// The lazy one-step measure m_x^eps: mass 1-eps at x, eps * rate elsewhere.
fn lazy_measure(model: &Model, x: usize, eps: &Rational) -> Vec<(usize, Rational)> {
    let mut m = vec![(x, rat_int(1) - eps)];
    for &y in model.neighbors(x) {
        m.push((y, eps * model.rate(x, y)));
    }
    m
}

/// Idleness curvature kappa_eps(x,y) = 1 - W(m_x^eps, m_y^eps)/d(x,y) of the
/// eps-lazy walk. Requires the one-step measures to be probability measures,
/// i.e. sum_y w(x,y) = mu(x) at every vertex for weighted models.
pub fn kappa_eps(
    model: &Model,
    metric: &Metric,
    x: usize,
    y: usize,
    eps: &Rational,
) -> Result<Rational, Error> {
    if x == y {
        return Err(Error::Precondition(
            "curvature needs two distinct vertices".into(),
        ));
    }
    if *eps < Rational::zero() || *eps > rat_int(1) {
        return Err(Error::Precondition("idleness must lie in [0,1]".into()));
    }
    if !model.is_stochastic() {
        return Err(Error::Precondition(
            "idleness curvature needs sum_y w(x,y) = mu(x) at every vertex".into(),
        ));
    }
    let w = wasserstein(
        metric,
        &lazy_measure(model, x, eps),
        &lazy_measure(model, y, eps),
    )?;
    Ok(rat_int(1) - w / metric.get(x, y))
}

/// Curvature of the non-lazy walk, kappa_1.
pub fn kappa_one(model: &Model, metric: &Metric, x: usize, y: usize) -> Result<Rational, Error> {
    kappa_eps(model, metric, x, y, &rat_int(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurvatureKind {
    Ollivier,
    Idleness(Rational),
}

/// Per-edge curvature values with a sign summary. Reversible inputs carry
/// one entry per undirected edge; Markov inputs carry both directions.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub kind: CurvatureKind,
    pub values: Vec<(usize, usize, Rational)>,
    pub min: Rational,
    pub max: Rational,
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl CurvatureReport {
    fn summarize(kind: CurvatureKind, values: Vec<(usize, usize, Rational)>) -> Self {
        let min = values.iter().map(|(_, _, k)| k).min().cloned().unwrap();
        let max = values.iter().map(|(_, _, k)| k).max().cloned().unwrap();
        let negative = values
            .iter()
            .filter(|(_, _, k)| *k < Rational::zero())
            .count();
        let zero = values.iter().filter(|(_, _, k)| k.is_zero()).count();
        let positive = values.len() - negative - zero;
        CurvatureReport {
            kind,
            values,
            min,
            max,
            negative,
            zero,
            positive,
        }
    }
}

/// Number of worker threads for edge sweeps: explicit argument, else the
/// CURVLAB_THREADS environment variable, else 1.
pub fn sweep_threads(requested: Option<usize>) -> usize {
    requested
        .or_else(|| {
            std::env::var("CURVLAB_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1)
        .max(1)
}

/// Applies `f` to every item, fanning out over immutable input when asked
/// to; results keep the input order.
pub fn sweep<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let f = &f;
        let mut slots: &mut [Option<R>] = &mut out;
        let mut offset = 0;
        let mut handles = Vec::new();
        while offset < items.len() {
            let take = chunk.min(items.len() - offset);
            let (head, tail) = slots.split_at_mut(take);
            slots = tail;
            let part = &items[offset..offset + take];
            handles.push(scope.spawn(move || {
                for (slot, item) in head.iter_mut().zip(part) {
                    *slot = Some(f(item));
                }
            }));
            offset += take;
        }
    });
    out.into_iter().map(|r| r.unwrap()).collect()
}

/// Sweeps the requested curvature over every edge. Markov inputs are
/// computed in both directions; weighted inputs once per undirected edge.
pub fn curvature_report(
    model: &Model,
    metric: &Metric,
    kind: CurvatureKind,
    threads: usize,
) -> Result<CurvatureReport, Error> {
    let mut pairs: Vec<(usize, usize)> = model.edges();
    if !model.is_reversible() {
        let back: Vec<(usize, usize)> = pairs.iter().map(|&(u, v)| (v, u)).collect();
        pairs.extend(back);
    }
    if let CurvatureKind::Idleness(_) = kind {
        if !model.is_stochastic() {
            return Err(Error::Precondition(
                "idleness curvature needs sum_y w(x,y) = mu(x) at every vertex".into(),
            ));
        }
    }
    let results = sweep(&pairs, threads, |&(u, v)| match &kind {
        CurvatureKind::Ollivier => ollivier_primal(model, metric, u, v),
        CurvatureKind::Idleness(eps) => kappa_eps(model, metric, u, v, eps),
    });
    let mut values = Vec::with_capacity(pairs.len());
    for ((u, v), r) in pairs.into_iter().zip(results) {
        values.push((u, v, r?));
    }
    Ok(CurvatureReport::summarize(kind, values))
}
