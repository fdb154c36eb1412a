//! Exact all-pairs path metrics. A metric here is always the path closure of
//! positive edge lengths: d(x,y) is the minimum over x-y paths of the summed
//! adjacent-pair lengths, computed by Floyd-Warshall over rationals.

use num_traits::Zero;

use crate::graph::{EdgeLengths, Model};
use crate::rational::Rational;

/// Dense symmetric all-pairs distance matrix with zero diagonal and the
/// path-metric property certified at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metric {
    n: usize,
    d: Vec<Option<Rational>>,
}

/// Closure result: the metric plus the edges whose direct length strictly
/// exceeds their path distance (the direct edge is not a geodesic).
#[derive(Debug, Clone)]
pub struct PathMetric {
    pub metric: Metric,
    pub shortcut_edges: Vec<(usize, usize)>,
}

impl Metric {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        self.d[i * self.n + j].as_ref().expect("finite metric")
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> Rational {
        let mut best = Rational::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if *self.get(i, j) > best {
                    best = self.get(i, j).clone();
                }
            }
        }
        best
    }

    /// Smallest off-diagonal distance.
    pub fn min_positive(&self) -> Rational {
        let mut best: Option<Rational> = None;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.get(i, j);
                if best.as_ref().is_none_or(|b| v < b) {
                    best = Some(v.clone());
                }
            }
        }
        best.expect("metric with at least two points")
    }

    pub fn scaled(&self, factor: &Rational) -> Metric {
        assert!(*factor > Rational::zero());
        Metric {
            n: self.n,
            d: self
                .d
                .iter()
                .map(|x| x.as_ref().map(|v| v * factor))
                .collect(),
        }
    }

    /// Whether d(x,y) = 1 on every support edge.
    pub fn is_combinatorial_on(&self, edges: &[(usize, usize)]) -> bool {
        use crate::rational::rat_int;
        let one = rat_int(1);
        edges.iter().all(|&(u, v)| *self.get(u, v) == one)
    }

    /// Full O(n^3) triangle-inequality assertion; test support.
    pub fn check_triangle_inequality(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let via = self.get(i, k).clone() + self.get(k, j);
                    if *self.get(i, j) > via {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Closes positive edge lengths on a connected support into an exact path
/// metric. Lengths exceeding their path distance are accepted; such edges are
/// listed in the shortcut report and the metric keeps the path value.
pub fn path_metric(support: &[(usize, usize)], n: usize, lengths: &EdgeLengths) -> PathMetric {
    let mut d: Vec<Option<Rational>> = vec![None; n * n];
    for i in 0..n {
        d[i * n + i] = Some(Rational::zero());
    }
    for &(u, v) in support {
        let l = lengths.get(u, v).clone();
        let better = match &d[u * n + v] {
            Some(cur) => l < *cur,
            None => true,
        };
        if better {
            d[u * n + v] = Some(l.clone());
            d[v * n + u] = Some(l);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = d[i * n + k].clone() else {
                continue;
            };
            for j in 0..n {
                let Some(dkj) = &d[k * n + j] else {
                    continue;
                };
                let via = &dik + dkj;
                let better = match &d[i * n + j] {
                    Some(cur) => via < *cur,
                    None => true,
                };
                if better {
                    d[i * n + j] = Some(via);
                }
            }
        }
    }
    let metric = Metric { n, d };
    let shortcut_edges = support
        .iter()
        .copied()
        .filter(|&(u, v)| metric.get(u, v) < lengths.get(u, v))
        .collect();
    PathMetric {
        metric,
        shortcut_edges,
    }
}

/// Path metric from a model and lengths (support taken from the model).
pub fn model_metric(model: &Model, lengths: &EdgeLengths) -> PathMetric {
    path_metric(&model.edges(), model.vertex_count(), lengths)
}

/// Combinatorial distance: unit length on every support edge.
pub fn combinatorial_metric(model: &Model) -> Metric {
    model_metric(model, &model.combinatorial_lengths()).metric
}
