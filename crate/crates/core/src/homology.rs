//! First Betti numbers and harmonic one-form bases, all over exact
//! rationals. The reversible case intersects ker(delta1) with ker(delta*);
//! the Markov case solves delta1 alpha = 0 with delta^(*) alpha constant.

use num_traits::{Signed, Zero};

use crate::complex::CellComplex;
use crate::error::Error;
use crate::graph::{MarkovChain, WeightedGraph};
use crate::linalg::RationalMatrix;
use crate::rational::{rat_int, Rational};

/// A one-form: one value per oriented edge of the complex; alpha(y,x) is
/// realized as -alpha(x,y) through the stored orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    pub values: Vec<Rational>,
}

impl OneForm {
    pub fn eval(&self, cx: &CellComplex, x: usize, y: usize) -> Rational {
        match cx.edge_sign(x, y) {
            Some((e, sign)) => sign * &self.values[e],
            None => Rational::zero(),
        }
    }

    /// sup-norm over oriented edges: max |alpha(x,y)| / d(x,y).
    pub fn sup_norm(&self, cx: &CellComplex) -> Rational {
        self.values
            .iter()
            .zip(&cx.edge_dist)
            .map(|(v, d)| v.abs() / d)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Exact matrix rank; exposed for callers that assemble their own systems.
pub fn rank_exact(m: &RationalMatrix) -> usize {
    m.rank()
}

/// First Betti number over the rationals:
/// dim(ker delta1 / im delta0) = |X1| - rank(delta1) - (|X0| - 1)
/// for a connected complex.
pub fn betti1(cx: &CellComplex) -> usize {
    cx.edge_count() - cx.delta1.rank() - (cx.vertex_count - 1)
}

/// The adjoint coboundary delta* as a |X0| x |X1| matrix:
/// delta* alpha (x) = sum_y w(x,y)/mu(x) alpha(x,y).
pub fn delta_star(cx: &CellComplex, g: &WeightedGraph) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(cx.vertex_count, cx.edge_count());
    for (e, &(s, t)) in cx.edges.iter().enumerate() {
        m[(s, e)] = g.weight(s, t) / g.mu(s);
        m[(t, e)] = -(g.weight(s, t) / g.mu(t));
    }
    m
}

/// Non-reversible divergence delta^(*) alpha (x) = sum_y p(x,y) alpha(x,y).
fn delta_star_markov(cx: &CellComplex, c: &MarkovChain) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(cx.vertex_count, cx.edge_count());
    for (e, &(s, t)) in cx.edges.iter().enumerate() {
        m[(s, e)] = c.prob(s, t).clone();
        m[(t, e)] = -c.prob(t, s).clone();
    }
    m
}

/// Exact basis of the harmonic forms {delta alpha = 0, delta* alpha = 0},
/// each scaled to sup-norm 1 with its first nonzero entry positive.
pub fn harmonic_basis(cx: &CellComplex, g: &WeightedGraph) -> Vec<OneForm> {
    let stacked = cx.delta1.stack(&delta_star(cx, g));
    stacked
        .kernel_basis()
        .into_iter()
        .map(|values| normalize(OneForm { values }, cx))
        .collect()
}

fn normalize(mut form: OneForm, cx: &CellComplex) -> OneForm {
    let norm = form.sup_norm(cx);
    assert!(!norm.is_zero(), "kernel basis vector cannot be zero");
    let first = form
        .values
        .iter()
        .find(|v| !v.is_zero())
        .expect("nonzero")
        .clone();
    let scale = if first.is_negative() { -norm } else { norm };
    for v in form.values.iter_mut() {
        *v /= &scale;
    }
    form
}

/// First Betti number of a Markov chain's complex: the dimension of
/// {(alpha, c) : delta1 alpha = 0, delta^(*) alpha = c 1}. The scalar c is
/// determined by alpha (alpha = 0 forces c = 0), so the kernel dimension of
/// the stacked system in (alpha, c) is the dimension in alpha alone.
pub fn betti1_markov(cx: &CellComplex, c: &MarkovChain) -> usize {
    markov_kernel(cx, c).len()
}

/// Kernel basis of the stacked Markov system, as (alpha, c) pairs.
pub fn markov_harmonic_basis(cx: &CellComplex, c: &MarkovChain) -> Vec<(OneForm, Rational)> {
    markov_kernel(cx, c)
        .into_iter()
        .map(|mut v| {
            let cval = v.pop().expect("constant column");
            let form = normalize(OneForm { values: v.clone() }, cx);
            // rescale the constant consistently with the normalization
            let ratio = first_ratio(&form.values, &v);
            (form, cval * ratio)
        })
        .collect()
}

fn first_ratio(normalized: &[Rational], raw: &[Rational]) -> Rational {
    for (n, r) in normalized.iter().zip(raw) {
        if !r.is_zero() {
            return n / r;
        }
    }
    rat_int(0)
}

fn markov_kernel(cx: &CellComplex, c: &MarkovChain) -> Vec<Vec<Rational>> {
    let ne = cx.edge_count();
    // [ delta1 | 0 ; delta^(*) | -1 ] acting on (alpha, c)
    let mut top = RationalMatrix::zeros(cx.cell_count(), ne + 1);
    for i in 0..cx.cell_count() {
        for j in 0..ne {
            top[(i, j)] = cx.delta1[(i, j)].clone();
        }
    }
    let dstar = delta_star_markov(cx, c);
    let mut bottom = RationalMatrix::zeros(cx.vertex_count, ne + 1);
    for i in 0..cx.vertex_count {
        for j in 0..ne {
            bottom[(i, j)] = dstar[(i, j)].clone();
        }
        bottom[(i, ne)] = rat_int(-1);
    }
    top.stack(&bottom).kernel_basis()
}

/// Hodge consistency: the harmonic basis dimension must equal the
/// rank-based Betti number exactly. A mismatch is an implementation bug.
pub fn hodge_check(cx: &CellComplex, g: &WeightedGraph) -> Result<bool, Error> {
    let dim = harmonic_basis(cx, g).len();
    let b1 = betti1(cx);
    if dim != b1 {
        return Err(Error::Internal(format!(
            "harmonic dimension {dim} disagrees with Betti number {b1}"
        )));
    }
    Ok(true)
}
