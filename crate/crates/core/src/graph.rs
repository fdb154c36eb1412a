//! Graph and Markov-chain data model: the two input kinds, validation, the
//! JSON interchange format, degrees, transition kernels and exact invariant
//! distributions.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::RationalMatrix;
use crate::rational::{format_rational, parse_rational, rat_int, Rational};

/// A weighted graph (V, w, mu): symmetric positive edge weights on the
/// support, zero diagonal, strictly positive vertex measure. Connected by
/// construction (checked on load).
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    mu: Vec<Rational>,
    w: Vec<Vec<Rational>>,
    adj: Vec<Vec<usize>>,
}

/// An irreducible Markov chain with exactly row-stochastic kernel and
/// symmetric support.
#[derive(Debug, Clone)]
pub struct MarkovChain {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    p: Vec<Vec<Rational>>,
    adj: Vec<Vec<usize>>,
}

/// Either input kind. Curvature and homology treat both uniformly through
/// the transition rate w(x,y)/mu(x) resp. p(x,y).
#[derive(Debug, Clone)]
pub enum Model {
    Weighted(WeightedGraph),
    Markov(MarkovChain),
}

/// Positive edge lengths on the support; input to the path-metric closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLengths {
    pub len: BTreeMap<(usize, usize), Rational>,
}

/// A probability distribution over the vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub pi: Vec<Rational>,
}

/// Transition-rate kernel p(x,y) = w(x,y)/mu(x) of a weighted graph. Row
/// sums are not forced to 1; `stochastic` records whether
/// sum_y w(x,y) = mu(x) holds at every vertex, the precondition for the
/// idleness curvatures.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub p: Vec<Vec<Rational>>,
    pub stochastic: bool,
}

impl WeightedGraph {
    pub fn new(
        ids: Vec<String>,
        mu: Vec<Rational>,
        edges: Vec<(usize, usize, Rational)>,
    ) -> Result<Self, Error> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::Parse("empty vertex set".into()));
        }
        if mu.len() != n {
            return Err(Error::Parse("mu must assign every vertex".into()));
        }
        for (i, m) in mu.iter().enumerate() {
            if *m <= Rational::zero() {
                return Err(Error::Parse(format!("mu({}) must be positive", ids[i])));
            }
        }
        let index = build_index(&ids)?;
        let mut w = vec![vec![Rational::zero(); n]; n];
        for (u, v, weight) in edges {
            if u == v {
                return Err(Error::Parse(format!("self-loop at {}", ids[u])));
            }
            if weight <= Rational::zero() {
                return Err(Error::Parse(format!(
                    "edge ({},{}) needs positive weight",
                    ids[u], ids[v]
                )));
            }
            if !w[u][v].is_zero() {
                if w[u][v] != weight {
                    return Err(Error::Parse(format!(
                        "asymmetric weight on edge ({},{})",
                        ids[u], ids[v]
                    )));
                }
                return Err(Error::Parse(format!(
                    "duplicate edge ({},{})",
                    ids[u], ids[v]
                )));
            }
            w[u][v] = weight.clone();
            w[v][u] = weight;
        }
        let adj = adjacency_from(&w);
        check_connected(&adj)
            .map_err(|Unreachable(i)| Error::Parse(format!("graph is disconnected: {}", ids[i])))?;
        Ok(WeightedGraph {
            ids,
            index,
            mu,
            w,
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn mu(&self, x: usize) -> &Rational {
        &self.mu[x]
    }

    pub fn weight(&self, x: usize, y: usize) -> &Rational {
        &self.w[x][y]
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    /// Edges as (u, v) with u < v in load order, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        edge_list(&self.adj)
    }

    /// Whether sum_y w(x,y) = mu(x) holds at every vertex.
    pub fn is_stochastic(&self) -> bool {
        (0..self.vertex_count()).all(|x| {
            let row: Rational = self.adj[x].iter().map(|&y| self.w[x][y].clone()).sum();
            row == self.mu[x]
        })
    }

    /// Same support and weights, vertex measure replaced by the weighted
    /// degree, so the result is stochastic.
    pub fn stochastic_normalization(&self) -> WeightedGraph {
        let mut g = self.clone();
        for x in 0..g.vertex_count() {
            g.mu[x] = g.adj[x].iter().map(|&y| g.w[x][y].clone()).sum();
        }
        g
    }

    /// Scales w and mu jointly; the Laplacian and all curvatures are
    /// invariant under this.
    pub fn scaled(&self, c: &Rational) -> WeightedGraph {
        assert!(*c > Rational::zero());
        let mut g = self.clone();
        for x in 0..g.vertex_count() {
            g.mu[x] *= c;
            for y in 0..g.vertex_count() {
                let scaled = &g.w[x][y] * c;
                g.w[x][y] = scaled;
            }
        }
        g
    }

    /// Replaces the weight of one edge; used by perturbation tests.
    pub fn with_weight(&self, u: usize, v: usize, weight: Rational) -> Result<Self, Error> {
        let mut edges = Vec::new();
        for (a, b) in self.edges() {
            let w = if (a, b) == (u.min(v), u.max(v)) {
                weight.clone()
            } else {
                self.w[a][b].clone()
            };
            edges.push((a, b, w));
        }
        WeightedGraph::new(self.ids.clone(), self.mu.clone(), edges)
    }
}

impl MarkovChain {
    pub fn new(ids: Vec<String>, p: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::Parse("empty state space".into()));
        }
        let index = build_index(&ids)?;
        if p.len() != n || p.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("kernel must be |V| x |V|".into()));
        }
        for x in 0..n {
            if !p[x][x].is_zero() {
                return Err(Error::Parse(format!("kernel has a loop at {}", ids[x])));
            }
            for y in 0..n {
                if p[x][y] < Rational::zero() {
                    return Err(Error::Parse(format!(
                        "negative transition p({},{})",
                        ids[x], ids[y]
                    )));
                }
                if p[x][y].is_zero() != p[y][x].is_zero() {
                    return Err(Error::Parse(format!(
                        "asymmetric support between {} and {}",
                        ids[x], ids[y]
                    )));
                }
            }
            let row: Rational = p[x].iter().cloned().sum();
            if row != rat_int(1) {
                return Err(Error::Parse(format!(
                    "row of {} sums to {}, not 1",
                    ids[x],
                    format_rational(&row)
                )));
            }
        }
        let adj = adjacency_from(&p);
        check_connected(&adj).map_err(|_| {
            Error::Parse("chain is not irreducible (support is disconnected)".into())
        })?;
        Ok(MarkovChain { ids, index, p, adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn prob(&self, x: usize, y: usize) -> &Rational {
        &self.p[x][y]
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        edge_list(&self.adj)
    }
}

impl Model {
    pub fn vertex_count(&self) -> usize {
        match self {
            Model::Weighted(g) => g.vertex_count(),
            Model::Markov(c) => c.vertex_count(),
        }
    }

    pub fn ids(&self) -> &[String] {
        match self {
            Model::Weighted(g) => g.ids(),
            Model::Markov(c) => c.ids(),
        }
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids()[i]
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        match self {
            Model::Weighted(g) => g.vertex(id),
            Model::Markov(c) => c.vertex(id),
        }
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        match self {
            Model::Weighted(g) => g.neighbors(x),
            Model::Markov(c) => c.neighbors(x),
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            Model::Weighted(g) => g.edges(),
            Model::Markov(c) => c.edges(),
        }
    }

    /// Transition rate: w(x,y)/mu(x) for weighted models, p(x,y) for chains.
    /// This is the coefficient of the Laplacian and of every curvature LP.
    pub fn rate(&self, x: usize, y: usize) -> Rational {
        match self {
            Model::Weighted(g) => &g.w[x][y] / &g.mu[x],
            Model::Markov(c) => c.p[x][y].clone(),
        }
    }

    /// Whether the one-step measures m_x^eps are probability measures, i.e.
    /// rate rows sum to 1.
    pub fn is_stochastic(&self) -> bool {
        match self {
            Model::Weighted(g) => g.is_stochastic(),
            Model::Markov(_) => true,
        }
    }

    pub fn is_reversible(&self) -> bool {
        matches!(self, Model::Weighted(_))
    }

    /// Unit lengths on the support.
    pub fn combinatorial_lengths(&self) -> EdgeLengths {
        let len = self.edges().into_iter().map(|e| (e, rat_int(1))).collect();
        EdgeLengths { len }
    }
}

impl EdgeLengths {
    pub fn get(&self, u: usize, v: usize) -> &Rational {
        let key = if u < v { (u, v) } else { (v, u) };
        &self.len[&key]
    }

    pub fn validate(&self, edges: &[(usize, usize)]) -> Result<(), Error> {
        for &e in edges {
            match self.len.get(&e) {
                Some(l) if *l > Rational::zero() => {}
                Some(_) => {
                    return Err(Error::Parse(format!(
                        "length of edge ({},{}) must be positive",
                        e.0, e.1
                    )))
                }
                None => {
                    return Err(Error::Parse(format!(
                        "missing length for edge ({},{})",
                        e.0, e.1
                    )))
                }
            }
        }
        if self.len.len() != edges.len() {
            return Err(Error::Parse(
                "lengths assigned outside the edge support".into(),
            ));
        }
        Ok(())
    }
}

/// p(x,y) = w(x,y)/mu(x), with the stochastic flag. Row sums equal
/// sum_y w(x,y)/mu(x) and are deliberately not renormalized.
pub fn to_markov(g: &WeightedGraph) -> Kernel {
    let n = g.vertex_count();
    let p = (0..n)
        .map(|x| (0..n).map(|y| &g.w[x][y] / &g.mu[x]).collect())
        .collect();
    Kernel {
        p,
        stochastic: g.is_stochastic(),
    }
}

/// Combinatorial degree statistics from the support.
pub fn degree_stats(model: &Model) -> (usize, usize, Vec<usize>) {
    let degs: Vec<usize> = (0..model.vertex_count())
        .map(|x| model.neighbors(x).len())
        .collect();
    let min = degs.iter().copied().min().unwrap_or(0);
    let max = degs.iter().copied().max().unwrap_or(0);
    (min, max, degs)
}

/// Exact solution of pi P = pi with sum(pi) = 1; entries are strictly
/// positive for irreducible chains.
pub fn invariant_distribution(chain: &MarkovChain) -> Result<Distribution, Error> {
    let n = chain.vertex_count();
    // (P^T - I) pi = 0 plus the normalization row.
    let mut sys = RationalMatrix::zeros(n + 1, n);
    for x in 0..n {
        for y in 0..n {
            sys[(y, x)] = chain.p[x][y].clone();
        }
    }
    for x in 0..n {
        let diag = sys[(x, x)].clone() - rat_int(1);
        sys[(x, x)] = diag;
        sys[(n, x)] = rat_int(1);
    }
    let mut rhs = vec![Rational::zero(); n + 1];
    rhs[n] = rat_int(1);
    let pi = sys
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("invariant distribution system is singular".into()))?;
    if pi.iter().any(|x| *x <= Rational::zero()) {
        return Err(Error::Internal(
            "invariant distribution has a non-positive entry".into(),
        ));
    }
    Ok(Distribution { pi })
}

fn build_index(ids: &[String]) -> Result<HashMap<String, usize>, Error> {
    let mut index = HashMap::new();
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::Parse(format!("duplicate vertex id {id:?}")));
        }
    }
    Ok(index)
}

fn adjacency_from(rows: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

fn edge_list(adj: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (u, nbrs) in adj.iter().enumerate() {
        for &v in nbrs {
            if u < v {
                edges.push((u, v));
            }
        }
    }
    edges.sort_unstable();
    edges
}

struct Unreachable(usize);

fn check_connected(adj: &[Vec<usize>]) -> Result<(), Unreachable> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(i) => Err(Unreachable(i)),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// JSON interchange format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphFile {
    model: String,
    vertices: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<BTreeMap<String, String>>,
    edges: Vec<EdgeFile>,
}

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    u: String,
    v: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_uv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_vu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<String>,
}

/// Parses the JSON interchange format. Omitted "d" fields mean combinatorial
/// length 1 on every edge.
pub fn parse_graph(text: &[u8]) -> Result<(Model, EdgeLengths), Error> {
    let file: GraphFile =
        serde_json::from_slice(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
    let ids = file.vertices.clone();
    let index = build_index(&ids)?;
    let look = |id: &str| -> Result<usize, Error> {
        index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Parse(format!("edge references unknown vertex {id:?}")))
    };
    let mut lengths = BTreeMap::new();
    let mut read_len = |u: usize, v: usize, d: &Option<String>| -> Result<(), Error> {
        let key = if u < v { (u, v) } else { (v, u) };
        let l = match d {
            Some(s) => parse_rational(s)?,
            None => rat_int(1),
        };
        lengths.insert(key, l);
        Ok(())
    };
    let model = match file.model.as_str() {
        "weighted" => {
            let mu_map = file
                .mu
                .ok_or_else(|| Error::Parse("weighted model requires \"mu\"".into()))?;
            let mut mu = Vec::with_capacity(ids.len());
            for id in &ids {
                let s = mu_map
                    .get(id)
                    .ok_or_else(|| Error::Parse(format!("mu missing for vertex {id:?}")))?;
                mu.push(parse_rational(s)?);
            }
            let mut edges = Vec::new();
            for e in &file.edges {
                let (u, v) = (look(&e.u)?, look(&e.v)?);
                let w = e
                    .w
                    .as_ref()
                    .ok_or_else(|| Error::Parse(format!("edge ({},{}) missing \"w\"", e.u, e.v)))?;
                edges.push((u, v, parse_rational(w)?));
                read_len(u, v, &e.d)?;
            }
            Model::Weighted(WeightedGraph::new(ids, mu, edges)?)
        }
        "markov" => {
            let n = ids.len();
            let mut p = vec![vec![Rational::zero(); n]; n];
            for e in &file.edges {
                let (u, v) = (look(&e.u)?, look(&e.v)?);
                let puv = e.p_uv.as_ref().ok_or_else(|| {
                    Error::Parse(format!("edge ({},{}) missing \"p_uv\"", e.u, e.v))
                })?;
                let pvu = e.p_vu.as_ref().ok_or_else(|| {
                    Error::Parse(format!("edge ({},{}) missing \"p_vu\"", e.u, e.v))
                })?;
                if !p[u][v].is_zero() || !p[v][u].is_zero() {
                    return Err(Error::Parse(format!("duplicate edge ({},{})", e.u, e.v)));
                }
                p[u][v] = parse_rational(puv)?;
                p[v][u] = parse_rational(pvu)?;
                read_len(u, v, &e.d)?;
            }
            Model::Markov(MarkovChain::new(ids, p)?)
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown model kind {other:?} (expected \"weighted\" or \"markov\")"
            )))
        }
    };
    let lengths = EdgeLengths { len: lengths };
    lengths.validate(&model.edges())?;
    Ok((model, lengths))
}

/// Serializes a model (with optional explicit lengths) back to the
/// interchange format. Deterministic: vertices in load order, edges sorted.
pub fn serialize_graph(model: &Model, lengths: Option<&EdgeLengths>) -> String {
    let ids = model.ids();
    let unit = rat_int(1);
    let edge_files: Vec<EdgeFile> = model
        .edges()
        .into_iter()
        .map(|(u, v)| {
            let d = lengths.and_then(|l| {
                let val = l.get(u, v);
                (*val != unit).then(|| format_rational(val))
            });
            match model {
                Model::Weighted(g) => EdgeFile {
                    u: ids[u].clone(),
                    v: ids[v].clone(),
                    w: Some(format_rational(g.weight(u, v))),
                    p_uv: None,
                    p_vu: None,
                    d,
                },
                Model::Markov(c) => EdgeFile {
                    u: ids[u].clone(),
                    v: ids[v].clone(),
                    w: None,
                    p_uv: Some(format_rational(c.prob(u, v))),
                    p_vu: Some(format_rational(c.prob(v, u))),
                    d,
                },
            }
        })
        .collect();
    let file = GraphFile {
        model: match model {
            Model::Weighted(_) => "weighted".into(),
            Model::Markov(_) => "markov".into(),
        },
        vertices: ids.to_vec(),
        mu: match model {
            Model::Weighted(g) => Some(
                ids.iter()
                    .enumerate()
                    .map(|(i, id)| (id.clone(), format_rational(g.mu(i))))
                    .collect(),
            ),
            Model::Markov(_) => None,
        },
        edges: edge_files,
    };
    serde_json::to_string_pretty(&file).expect("serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn triangle_json() -> &'static str {
        r#"{"model":"weighted","vertices":["a","b","c"],
            "mu":{"a":"2","b":"2","c":"2"},
            "edges":[{"u":"a","v":"b","w":"1"},{"u":"b","v":"c","w":"1"},{"u":"a","v":"c","w":"1"}]}"#
    }

    #[test]
    fn parses_triangle() {
        let (model, lengths) = parse_graph(triangle_json().as_bytes()).unwrap();
        let Model::Weighted(g) = &model else {
            panic!("expected weighted")
        };
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.mu(0), &rat(2, 1));
        assert_eq!(lengths.get(0, 1), &rat(1, 1));
    }

    #[test]
    fn markov_row_sums_must_be_exactly_one() {
        let ok = r#"{"model":"markov","vertices":["a","b"],
            "edges":[{"u":"a","v":"b","p_uv":"1","p_vu":"1"}]}"#;
        assert!(parse_graph(ok.as_bytes()).is_ok());
        let bad = r#"{"model":"markov","vertices":["a","b"],
            "edges":[{"u":"a","v":"b","p_uv":"99/100","p_vu":"1"}]}"#;
        let err = parse_graph(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("sums to 99/100"));
    }

    #[test]
    fn asymmetric_weight_rejected() {
        let bad = r#"{"model":"weighted","vertices":["a","b"],
            "mu":{"a":"1","b":"1"},
            "edges":[{"u":"a","v":"b","w":"1"},{"u":"b","v":"a","w":"2"}]}"#;
        let err = parse_graph(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("asymmetric weight"));
    }

    #[test]
    fn disconnected_rejected() {
        let bad = r#"{"model":"weighted","vertices":["a","b","c","d"],
            "mu":{"a":"1","b":"1","c":"1","d":"1"},
            "edges":[{"u":"a","v":"b","w":"1"},{"u":"c","v":"d","w":"1"}]}"#;
        assert!(parse_graph(bad.as_bytes()).is_err());
    }

    #[test]
    fn to_markov_examples() {
        // K_2 with w = 1, mu = 1: p = 1 both ways, stochastic.
        let g = WeightedGraph::new(
            vec!["a".into(), "b".into()],
            vec![rat(1, 1), rat(1, 1)],
            vec![(0, 1, rat(1, 1))],
        )
        .unwrap();
        let k = to_markov(&g);
        assert!(k.stochastic);
        assert_eq!(k.p[0][1], rat(1, 1));
        // triangle with w = 1, mu = 3: rows sum to 2/3.
        let t = WeightedGraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![rat(3, 1); 3],
            vec![(0, 1, rat(1, 1)), (1, 2, rat(1, 1)), (0, 2, rat(1, 1))],
        )
        .unwrap();
        let k = to_markov(&t);
        assert!(!k.stochastic);
        assert_eq!(k.p[0][1], rat(1, 3));
        let row: Rational = k.p[0].iter().cloned().sum();
        assert_eq!(row, rat(2, 3));
    }

    #[test]
    fn laplacian_scale_invariance() {
        let (model, _) = parse_graph(triangle_json().as_bytes()).unwrap();
        let Model::Weighted(g) = model else {
            unreachable!()
        };
        let scaled = g.scaled(&rat(7, 3));
        let (a, b) = (to_markov(&g), to_markov(&scaled));
        assert_eq!(a.p, b.p);
        assert_eq!(a.stochastic, b.stochastic);
    }

    #[test]
    fn invariant_distribution_examples() {
        // symmetric walk on C_4: uniform.
        let n = 4;
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut p = vec![vec![rat(0, 1); n]; n];
        for i in 0..n {
            p[i][(i + 1) % n] = rat(1, 2);
            p[i][(i + n - 1) % n] = rat(1, 2);
        }
        let c = MarkovChain::new(ids.clone(), p).unwrap();
        let pi = invariant_distribution(&c).unwrap();
        assert!(pi.pi.iter().all(|x| *x == rat(1, 4)));

        // biased 3-cycle 2/3 forward, 1/3 back: doubly stochastic, uniform.
        let ids3: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let mut p = vec![vec![rat(0, 1); 3]; 3];
        for i in 0..3 {
            p[i][(i + 1) % 3] = rat(2, 3);
            p[i][(i + 2) % 3] = rat(1, 3);
        }
        let c = MarkovChain::new(ids3, p).unwrap();
        let pi = invariant_distribution(&c).unwrap();
        assert!(pi.pi.iter().all(|x| *x == rat(1, 3)));
    }

    #[test]
    fn invariant_distribution_is_exactly_stationary() {
        // an uneven but reversible chain from a weighted star
        let g = WeightedGraph::new(
            vec!["hub".into(), "a".into(), "b".into()],
            vec![rat(2, 1), rat(1, 1), rat(3, 1)],
            vec![(0, 1, rat(1, 2)), (0, 2, rat(3, 2))],
        )
        .unwrap();
        let gs = g.stochastic_normalization();
        let k = to_markov(&gs);
        let chain = MarkovChain::new(gs.ids().to_vec(), k.p.clone()).unwrap();
        let pi = invariant_distribution(&chain).unwrap();
        // residual of pi P - pi is identically zero
        let n = chain.vertex_count();
        for y in 0..n {
            let lhs: Rational = (0..n).map(|x| &pi.pi[x] * chain.prob(x, y)).sum();
            assert_eq!(lhs, pi.pi[y]);
        }
        // detailed balance: pi proportional to mu
        let total: Rational = (0..n).map(|x| gs.mu(x).clone()).sum();
        for x in 0..n {
            assert_eq!(pi.pi[x], gs.mu(x) / &total);
        }
    }

    #[test]
    fn serialize_round_trip() {
        let (model, lengths) = parse_graph(triangle_json().as_bytes()).unwrap();
        let text = serialize_graph(&model, Some(&lengths));
        let (model2, lengths2) = parse_graph(text.as_bytes()).unwrap();
        assert_eq!(lengths, lengths2);
        assert_eq!(serialize_graph(&model2, Some(&lengths2)), text);
    }
}
