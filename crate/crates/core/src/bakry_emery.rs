//! Bakry-Emery curvature-dimension constants. The quadratic forms of the
//! Gamma calculus are assembled exactly over the two-ball of a vertex, the
//! two-sphere coordinates are eliminated in closed form (their block is
//! diagonal and nonnegative), and only the final symmetric eigenproblem on
//! the sphere coordinates runs in floating point, certified by a residual.

use num_traits::Zero;

use crate::error::Error;
use crate::graph::Model;
use crate::linalg::RationalMatrix;
use crate::rational::{rat_int, to_f64, Rational};

/// Dimension parameter N of the curvature-dimension inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dimension {
    Finite(Rational),
    Infinite,
}

impl Dimension {
    pub fn label(&self) -> String {
        match self {
            Dimension::Finite(n) => crate::rational::format_rational(n),
            Dimension::Infinite => "inf".into(),
        }
    }
}

/// The curvature constant at one vertex: the largest K such that
/// Gamma2(f)(x) >= (1/N)(Lap f(x))^2 + K Gamma(f)(x) for all f, together
/// with the eigenpair residual certifying the float step.
#[derive(Debug, Clone)]
pub struct BakryEmeryResult {
    pub vertex: usize,
    pub dimension: Dimension,
    pub k: f64,
    pub residual: f64,
}

/// Exact symmetric quadratic forms in the coordinates f(v), v in B2(x)\{x}
/// (f(x) pinned to 0; every form is invariant under adding constants).
struct LocalForms {
    /// vertices of S1(x) then S2(x), in index order
    coords: Vec<usize>,
    s1_len: usize,
    /// Gamma2 at x
    gamma2: RationalMatrix,
    /// linear form Lap f(x), supported on S1
    laplacian: Vec<Rational>,
    /// Gamma(f)(x) = sum_y rate(x,y)/2 f(y)^2: the diagonal on S1
    gamma_diag: Vec<Rational>,
}

fn two_ball_coords(model: &Model, x: usize) -> (Vec<usize>, usize) {
    let mut s1: Vec<usize> = model.neighbors(x).to_vec();
    s1.sort_unstable();
    let mut s2 = Vec::new();
    for &y in &s1 {
        for &z in model.neighbors(y) {
            if z != x && !s1.contains(&z) && !s2.contains(&z) {
                s2.push(z);
            }
        }
    }
    s2.sort_unstable();
    let s1_len = s1.len();
    let mut coords = s1;
    coords.extend(s2);
    (coords, s1_len)
}

fn assemble(model: &Model, x: usize) -> LocalForms {
    let (coords, s1_len) = two_ball_coords(model, x);
    let n = coords.len();
    let slot = |v: usize| -> Option<usize> {
        if v == x {
            None // f(x) = 0
        } else {
            Some(coords.iter().position(|&c| c == v).expect("inside B2(x)"))
        }
    };
    let mut gamma2 = RationalMatrix::zeros(n, n);
    let half = |r: Rational| r / rat_int(2);

    // rank-one accumulators over linear forms a(f) = const-free combination
    let add_sym = |m: &mut RationalMatrix, i: Option<usize>, j: Option<usize>, c: Rational| {
        // contribution c * f_i * f_j (symmetrized)
        if let (Some(i), Some(j)) = (i, j) {
            if i == j {
                m[(i, i)] += c;
            } else {
                let hc = half(c);
                m[(i, j)] += &hc;
                m[(j, i)] += hc;
            }
        }
    };

    // (1/2) * Lap Gamma f (x) = (1/2) sum_y rate(x,y) (Gamma f(y) - Gamma f(x))
    // with Gamma f(v) = (1/2) sum_u rate(v,u) (f(u) - f(v))^2.
    for &y in model.neighbors(x) {
        let rxy = model.rate(x, y);
        for &u in model.neighbors(y) {
            // + (1/4) rxy rate(y,u) (f(u) - f(y))^2
            let c = half(half(&rxy * model.rate(y, u)));
            let (su, sy) = (slot(u), slot(y));
            add_sym(&mut gamma2, su, su, c.clone());
            add_sym(&mut gamma2, sy, sy, c.clone());
            add_sym(&mut gamma2, su, sy, -(&c + &c));
        }
    }
    {
        // - (1/2) * (sum_y rate(x,y)) * Gamma f(x), Gamma f(x) = (1/2) sum rate(x,z) f(z)^2
        let total: Rational = model.neighbors(x).iter().map(|&y| model.rate(x, y)).sum();
        for &z in model.neighbors(x) {
            let c = -half(half(&total * model.rate(x, z)));
            add_sym(&mut gamma2, slot(z), slot(z), c);
        }
    }
    // - Gamma(f, Lap f)(x) = - (1/2) sum_y rate(x,y) f(y) (Lap f(y) - Lap f(x))
    for &y in model.neighbors(x) {
        let rxy = model.rate(x, y);
        let sy = slot(y);
        // Lap f(y) = sum_u rate(y,u)(f(u) - f(y))
        for &u in model.neighbors(y) {
            let c = -half(&rxy * model.rate(y, u));
            add_sym(&mut gamma2, sy, slot(u), c.clone());
            add_sym(&mut gamma2, sy, sy, -c);
        }
        // + (1/2) rxy f(y) Lap f(x), Lap f(x) = sum_z rate(x,z) f(z)
        for &z in model.neighbors(x) {
            let c = half(&rxy * model.rate(x, z));
            add_sym(&mut gamma2, sy, slot(z), c);
        }
    }

    let laplacian: Vec<Rational> = (0..n)
        .map(|i| {
            if i < s1_len {
                model.rate(x, coords[i])
            } else {
                Rational::zero()
            }
        })
        .collect();
    let gamma_diag: Vec<Rational> = (0..s1_len)
        .map(|i| half(model.rate(x, coords[i])))
        .collect();

    LocalForms {
        coords,
        s1_len,
        gamma2,
        laplacian,
        gamma_diag,
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvectors as columns), both unordered.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-300_f64.max(1e-15 * frobenius(&a)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eig = (0..n).map(|i| a[i][i]).collect();
    (eig, v)
}

fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// K_{G,x}(N): minimize Gamma2(f)(x) - (1/N)(Lap f(x))^2 over functions with
/// Gamma(f)(x) = 1. The two-sphere block is eliminated exactly by its Schur
/// complement, then the generalized symmetric eigenproblem A' v = lambda B' v
/// on the sphere coordinates is solved in double precision.
pub fn bakry_emery(
    model: &Model,
    x: usize,
    dimension: Dimension,
    tolerance: f64,
) -> Result<BakryEmeryResult, Error> {
    if let Dimension::Finite(n) = &dimension {
        if *n <= Rational::zero() {
            return Err(Error::Precondition(
                "dimension parameter must be positive".into(),
            ));
        }
    }
    let forms = assemble(model, x);
    let n1 = forms.s1_len;
    let n = forms.coords.len();

    // Q = Gamma2 - (1/N) Lap Lap^T, exactly
    let mut q = forms.gamma2.clone();
    if let Dimension::Finite(nn) = &dimension {
        for i in 0..n {
            if forms.laplacian[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if forms.laplacian[j].is_zero() {
                    continue;
                }
                let sub = &forms.laplacian[i] * &forms.laplacian[j] / nn;
                q[(i, j)] -= sub;
            }
        }
    }

    // Exact Schur elimination of the S2 block: it is diagonal (no S2-S2
    // cross terms arise in Gamma2 at x) with positive entries, so each S2
    // coordinate minimizes out independently.
    let mut reduced = RationalMatrix::zeros(n1, n1);
    for i in 0..n1 {
        for j in 0..n1 {
            reduced[(i, j)] = q[(i, j)].clone();
        }
    }
    for z in n1..n {
        let dz = q[(z, z)].clone();
        for i in n1..n {
            debug_assert!(i == z || q[(z, i)].is_zero(), "S2 block must be diagonal");
        }
        if dz.is_zero() {
            // the whole row is zero, nothing to eliminate
            continue;
        }
        debug_assert!(dz > Rational::zero());
        for i in 0..n1 {
            if q[(i, z)].is_zero() {
                continue;
            }
            for j in 0..n1 {
                if q[(j, z)].is_zero() {
                    continue;
                }
                let sub = &q[(i, z)] * &q[(j, z)] / &dz;
                reduced[(i, j)] -= sub;
            }
        }
    }

    // B' = diag(rate(x,y)/2) is positive definite; scale to a standard
    // symmetric problem M = B'^{-1/2} A' B'^{-1/2}.
    let scale: Vec<f64> = forms.gamma_diag.iter().map(|g| to_f64(g).sqrt()).collect();
    if scale.iter().any(|s| !s.is_finite() || *s <= 0.0) {
        return Err(Error::Internal("degenerate Gamma form at vertex".into()));
    }
    let mut m = vec![vec![0.0; n1]; n1];
    for i in 0..n1 {
        for j in 0..n1 {
            m[i][j] = to_f64(&reduced[(i, j)]) / (scale[i] * scale[j]);
        }
    }
    let (eigs, vecs) = jacobi_eigen(m);
    let (which, k) = eigs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, &k)| (i, k))
        .ok_or_else(|| Error::Internal("empty eigenproblem".into()))?;

    // residual of the generalized problem: ||A'v - k B'v||_inf with
    // v = B'^{-1/2} u, normalized to ||v||_inf = 1
    let mut v: Vec<f64> = (0..n1).map(|i| vecs[i][which] / scale[i]).collect();
    let vmax = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    for x in v.iter_mut() {
        *x /= vmax;
    }
    let mut residual = 0.0_f64;
    for i in 0..n1 {
        let mut acc = 0.0;
        for j in 0..n1 {
            acc += to_f64(&reduced[(i, j)]) * v[j];
        }
        acc -= k * to_f64(&forms.gamma_diag[i]) * v[i];
        residual = residual.max(acc.abs());
    }
    if residual > tolerance {
        return Err(Error::NonConvergence(format!(
            "eigen residual {residual:.3e} above tolerance {tolerance:.1e} at vertex {}",
            model.id(x)
        )));
    }
    Ok(BakryEmeryResult {
        vertex: x,
        dimension,
        k,
        residual,
    })
}

/// Per-vertex sweep of the curvature function.
pub fn bakry_emery_report(
    model: &Model,
    dimension: Dimension,
    tolerance: f64,
    threads: usize,
) -> Result<Vec<BakryEmeryResult>, Error> {
    let vertices: Vec<usize> = (0..model.vertex_count()).collect();
    let results = crate::curvature::sweep(&vertices, threads, |&x| {
        bakry_emery(model, x, dimension.clone(), tolerance)
    });
    results.into_iter().collect()
}
