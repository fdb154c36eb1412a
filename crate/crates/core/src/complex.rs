//! The metric-dependent 2-complex: enumerate the cycles that qualify as
//! 2-cells, canonicalize them, and assemble the oriented coboundary
//! matrices. Also the path-homology variant that glues in every 3- and
//! 4-cycle regardless of the metric.

use std::collections::{BTreeSet, HashMap};

use crate::graph::Model;
use crate::linalg::RationalMatrix;
use crate::metric::Metric;
use crate::rational::{rat_int, Rational};

/// A cycle in canonical form: the lexicographically least vertex-index
/// sequence over all rotations and both directions. The stored order is the
/// traversal orientation used in the coboundary matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleCell {
    pub verts: Vec<usize>,
}

impl CycleCell {
    pub fn canonical(seq: &[usize]) -> CycleCell {
        let n = seq.len();
        assert!(n >= 3);
        let mut best: Option<Vec<usize>> = None;
        for dir in [false, true] {
            let oriented: Vec<usize> = if dir {
                let mut v = seq.to_vec();
                v.reverse();
                v
            } else {
                seq.to_vec()
            };
            for shift in 0..n {
                let rotated: Vec<usize> = (0..n).map(|i| oriented[(i + shift) % n]).collect();
                if best.as_ref().is_none_or(|b| rotated < *b) {
                    best = Some(rotated);
                }
            }
        }
        CycleCell {
            verts: best.unwrap(),
        }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The 2-dimensional complex over a model: vertices, oriented edges (source
/// is the smaller load-order index), qualifying cycles, cell weights and the
/// two coboundary matrices. delta1 * delta0 = 0 is asserted at build time.
#[derive(Debug, Clone)]
pub struct CellComplex {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub edge_index: HashMap<(usize, usize), usize>,
    pub cells: Vec<CycleCell>,
    /// metric distance per edge, in edge order
    pub edge_dist: Vec<Rational>,
    /// cell weights are identically 1
    pub delta0: RationalMatrix,
    pub delta1: RationalMatrix,
}

impl CellComplex {
    /// alpha(x,y) sign convention: +1 when (x,y) runs source to target.
    pub fn edge_sign(&self, x: usize, y: usize) -> Option<(usize, Rational)> {
        if x < y {
            self.edge_index.get(&(x, y)).map(|&e| (e, rat_int(1)))
        } else {
            self.edge_index.get(&(y, x)).map(|&e| (e, rat_int(-1)))
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }
}

/// The smallest L such that every qualifying cycle has length at most L:
/// a cycle needs (n-3) * lmin <= d(x0,x3) < 3 * lmax, so n < 3 + 3 lmax/lmin
/// with lmin, lmax the extreme adjacent-pair distances. The strict bound is
/// rounded down (and floored at 4). This bound is derived here, not taken
/// from a reference; correctness of the Betti numbers depends on it.
pub fn two_cell_length_bound(model: &Model, metric: &Metric) -> usize {
    let edges = model.edges();
    let mut lmin: Option<Rational> = None;
    let mut lmax: Option<Rational> = None;
    for &(u, v) in &edges {
        let d = metric.get(u, v);
        if lmin.as_ref().is_none_or(|m| d < m) {
            lmin = Some(d.clone());
        }
        if lmax.as_ref().is_none_or(|m| d > m) {
            lmax = Some(d.clone());
        }
    }
    let (lmin, lmax) = (lmin.expect("edges"), lmax.expect("edges"));
    let bound = rat_int(3) + rat_int(3) * lmax / lmin;
    // strict: n < bound
    let floor = bound.floor().to_integer();
    let mut l: i64 = i64::try_from(&floor).unwrap_or(i64::MAX);
    if bound == Rational::from_integer(floor) {
        l -= 1;
    }
    (l.max(4)) as usize
}

/// All simple cycles of length at most `max_len`, one canonical
/// representative each. Enumeration anchors every cycle at its least vertex
/// and fixes the direction by second vertex < last vertex.
pub fn enumerate_cycles(model: &Model, max_len: usize) -> Vec<CycleCell> {
    let n = model.vertex_count();
    let mut found = BTreeSet::new();
    let mut path: Vec<usize> = Vec::new();
    let mut on_path = vec![false; n];
    for anchor in 0..n {
        path.clear();
        path.push(anchor);
        on_path[anchor] = true;
        dfs_cycles(model, anchor, max_len, &mut path, &mut on_path, &mut found);
        on_path[anchor] = false;
    }
    found.into_iter().collect()
}

fn dfs_cycles(
    model: &Model,
    anchor: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    on_path: &mut Vec<bool>,
    found: &mut BTreeSet<CycleCell>,
) {
    let current = *path.last().unwrap();
    for &next in model.neighbors(current) {
        if next == anchor && path.len() >= 3 {
            // direction convention: count each cycle once
            if path[1] < *path.last().unwrap() {
                found.insert(CycleCell::canonical(path));
            }
            continue;
        }
        if next <= anchor || on_path[next] || path.len() == max_len {
            continue;
        }
        path.push(next);
        on_path[next] = true;
        dfs_cycles(model, anchor, max_len, path, on_path, found);
        on_path[next] = false;
        path.pop();
    }
}

/// Membership test for the metric complex: a cycle is a 2-cell when n = 3,
/// or when some rotation/reflection labeling (x0..x_{n-1}) satisfies both
/// d(x0,x3) < d(x0,x1) + d(x1,x2) + d(x2,x3) and the return path
/// x3 ~ ... ~ x_{n-1} ~ x0 being a geodesic.
fn qualifies(cell: &CycleCell, metric: &Metric) -> bool {
    let n = cell.len();
    if n == 3 {
        return true;
    }
    let seq = &cell.verts;
    for dir in [1i64, -1] {
        for shift in 0..n {
            let at = |i: usize| -> usize {
                let idx = (shift as i64 + dir * i as i64).rem_euclid(n as i64) as usize;
                seq[idx]
            };
            let head: Rational = (0..3).map(|i| metric.get(at(i), at(i + 1)).clone()).sum();
            let chord = metric.get(at(0), at(3));
            if *chord >= head {
                continue;
            }
            let tail: Rational = (3..n)
                .map(|i| metric.get(at(i), at((i + 1) % n)).clone())
                .sum();
            if tail == *chord {
                return true;
            }
        }
    }
    false
}

/// All metric 2-cells: simple cycles up to the computed length bound that
/// pass the membership test.
pub fn enumerate_two_cells(model: &Model, metric: &Metric) -> Vec<CycleCell> {
    let bound = two_cell_length_bound(model, metric);
    enumerate_two_cells_bounded(model, metric, bound)
}

/// Membership-filtered cells with an explicit cycle-length cap. Completeness
/// of the Betti numbers is only certified when the cap is at least the
/// computed bound.
pub fn enumerate_two_cells_bounded(model: &Model, metric: &Metric, bound: usize) -> Vec<CycleCell> {
    enumerate_cycles(model, bound)
        .into_iter()
        .filter(|c| qualifies(c, metric))
        .collect()
}

fn assemble(model: &Model, metric: &Metric, cells: Vec<CycleCell>) -> CellComplex {
    let n = model.vertex_count();
    let edges = model.edges();
    let edge_index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let edge_dist = edges
        .iter()
        .map(|&(u, v)| metric.get(u, v).clone())
        .collect();

    let mut delta0 = RationalMatrix::zeros(edges.len(), n);
    for (e, &(s, t)) in edges.iter().enumerate() {
        delta0[(e, s)] = rat_int(1);
        delta0[(e, t)] = rat_int(-1);
    }
    let mut delta1 = RationalMatrix::zeros(cells.len(), edges.len());
    for (c, cell) in cells.iter().enumerate() {
        let m = cell.len();
        for i in 0..m {
            let (x, y) = (cell.verts[i], cell.verts[(i + 1) % m]);
            let (e, sign) = if x < y {
                (edge_index[&(x, y)], rat_int(1))
            } else {
                (edge_index[&(y, x)], rat_int(-1))
            };
            delta1[(c, e)] += sign;
        }
    }
    let cx = CellComplex {
        vertex_count: n,
        edges,
        edge_index,
        cells,
        edge_dist,
        delta0,
        delta1,
    };
    assert!(
        cx.delta1.mul(&cx.delta0).is_zero(),
        "coboundary composition must vanish"
    );
    cx
}

/// The metric complex M2 over the given path metric.
pub fn build_complex(model: &Model, metric: &Metric) -> CellComplex {
    let cells = enumerate_two_cells(model, metric);
    assemble(model, metric, cells)
}

/// The metric complex with an explicit cycle-length cap; see
/// `enumerate_two_cells_bounded` for the certification caveat.
pub fn build_complex_bounded(model: &Model, metric: &Metric, bound: usize) -> CellComplex {
    let cells = enumerate_two_cells_bounded(model, metric, bound);
    assemble(model, metric, cells)
}

/// The path-homology complex: every combinatorial 3- and 4-cycle is a
/// 2-cell, independent of the metric. Edge distances are combinatorial.
pub fn build_path_complex(model: &Model) -> CellComplex {
    let metric = crate::metric::combinatorial_metric(model);
    let cells = enumerate_cycles(model, 4);
    assemble(model, &metric, cells)
}
