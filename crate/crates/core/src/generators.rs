//! Deterministic constructors for the example families (cycles with
//! arbitrary kernels, rope ladders, the two-particle zero-range process,
//! the BI_n family, the chessboard quotient, discrete tori) plus standard
//! test graphs and a seeded random corpus.
//!
//! Every generator is deterministic given its parameters and seed; repeated
//! construction gives byte-identical serialized output.

use crate::error::Error;
use crate::graph::{MarkovChain, Model, WeightedGraph};
use crate::rational::{rat, rat_int, Rational};

/// Deterministic splitmix64 stream; the only randomness source in the crate.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }
}

/// Kernel choice for `gen_cycle`.
#[derive(Debug, Clone)]
pub enum CycleKernel {
    /// p = 1/2 in both directions.
    Uniform,
    /// Forward probabilities p(i, i+1); backward is the complement.
    Forward(Vec<Rational>),
    /// Random rational forward probabilities in [1/8, 7/8].
    Seeded(u64),
}

/// Cycle C_n as a Markov chain with the given kernel, vertices "0".."n-1".
pub fn gen_cycle(n: usize, kernel: Option<CycleKernel>) -> Result<MarkovChain, Error> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "cycle needs at least 3 vertices, got {n}"
        )));
    }
    let forward: Vec<Rational> = match kernel.unwrap_or(CycleKernel::Uniform) {
        CycleKernel::Uniform => vec![rat(1, 2); n],
        CycleKernel::Forward(probs) => {
            if probs.len() != n {
                return Err(Error::Precondition(format!(
                    "need {n} forward probabilities, got {}",
                    probs.len()
                )));
            }
            for p in &probs {
                if *p <= rat_int(0) || *p >= rat_int(1) {
                    return Err(Error::Precondition(
                        "forward probabilities must lie strictly in (0,1)".into(),
                    ));
                }
            }
            probs
        }
        CycleKernel::Seeded(seed) => {
            let mut rng = Rng::new(seed);
            (0..n).map(|_| rat(8 + rng.below(49) as i64, 64)).collect()
        }
    };
    let ids = index_ids(n);
    let mut p = vec![vec![rat_int(0); n]; n];
    for i in 0..n {
        p[i][(i + 1) % n] = forward[i].clone();
        p[i][(i + n - 1) % n] = rat_int(1) - &forward[i];
    }
    MarkovChain::new(ids, p)
}

/// Rope ladder: n four-cycles glued corner to corner in a ring, mu = 1,
/// w in {0,1}. 3n vertices, 4n edges, degrees 2 and 4.
pub fn gen_rope_ladder(n: usize) -> Result<WeightedGraph, Error> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "rope ladder needs at least 3 squares, got {n}"
        )));
    }
    // corner k is shared between square k-1 and square k
    let mut ids = Vec::new();
    for k in 0..n {
        ids.push(format!("c{k}"));
    }
    for k in 0..n {
        ids.push(format!("a{k}"));
        ids.push(format!("b{k}"));
    }
    let corner = |k: usize| k % n;
    let side_a = |k: usize| n + 2 * k;
    let side_b = |k: usize| n + 2 * k + 1;
    let mut edges = Vec::new();
    for k in 0..n {
        edges.push((corner(k), side_a(k), rat_int(1)));
        edges.push((side_a(k), corner(k + 1), rat_int(1)));
        edges.push((corner(k + 1), side_b(k), rat_int(1)));
        edges.push((side_b(k), corner(k), rat_int(1)));
    }
    WeightedGraph::new(ids, vec![rat_int(1); 3 * n], edges)
}

/// Zero-range process with two particles on the cycle C_l: configurations
/// are multisets {i, j} of positions, adjacent when one particle hops to a
/// neighbouring site. mu = 1, w in {0,1}.
pub fn gen_zrp(l: usize) -> Result<WeightedGraph, Error> {
    if l < 6 {
        return Err(Error::Precondition(format!(
            "zero-range process is built for l >= 6, got {l}"
        )));
    }
    let mut configs = Vec::new();
    for i in 0..l {
        for j in i..l {
            configs.push((i, j));
        }
    }
    let pos = |c: &(usize, usize)| configs.iter().position(|x| x == c).unwrap();
    let ids = configs.iter().map(|(i, j)| format!("({i},{j})")).collect();
    let mut edges = Vec::new();
    for (idx, &(i, j)) in configs.iter().enumerate() {
        // move either particle one step; deduplicate as unordered pairs
        let moves = [
            ((i + 1) % l, j),
            ((i + l - 1) % l, j),
            (i, (j + 1) % l),
            (i, (j + l - 1) % l),
        ];
        for (a, b) in moves {
            let target = (a.min(b), a.max(b));
            if target == (i, j) {
                continue;
            }
            let t = pos(&target);
            if idx < t {
                edges.push((idx, t, rat_int(1)));
            }
        }
    }
    edges.sort();
    edges.dedup();
    WeightedGraph::new(ids, vec![rat_int(1); configs.len()], edges)
}

/// BI_n: two n-cycles (x_k) and (y_k) with cross edges x_k ~ y_{k-1} and
/// x_k ~ y_{k+1}. Normalized: w in {0,1}, mu = deg = 4.
pub fn gen_bi(n: usize) -> Result<WeightedGraph, Error> {
    if n < 6 {
        return Err(Error::Precondition(format!(
            "BI_n is bone-idle only from n = 6, got {n}"
        )));
    }
    let mut ids = Vec::new();
    for k in 0..n {
        ids.push(format!("x{k}"));
    }
    for k in 0..n {
        ids.push(format!("y{k}"));
    }
    let x = |k: usize| k % n;
    let y = |k: usize| n + (k % n);
    let mut edges = Vec::new();
    for k in 0..n {
        edges.push((x(k), x(k + 1), rat_int(1)));
        edges.push((y(k), y(k + 1), rat_int(1)));
        edges.push((x(k), y(k + n - 1), rat_int(1)));
        edges.push((x(k), y(k + 1), rat_int(1)));
    }
    let edges = normalize_edge_list(edges);
    WeightedGraph::new(ids, vec![rat_int(4); 2 * n], edges)
}

/// Quotient of the chessboard lattice by the lattice spanned by (4,4) and
/// (4,-4): 32 vertices, 6-regular, normalized weights.
///
/// The adjacency stencil is the drawn pattern: all four axis neighbours,
/// plus the two main-diagonal neighbours (+1,+1), (-1,-1) when the
/// coordinate sum is even, and the two anti-diagonal neighbours (+1,-1),
/// (-1,+1) when it is odd. Diagonals of one slope thus appear on every
/// second diagonal line, which is what makes the quotient 6-regular.
pub fn gen_chessboard() -> WeightedGraph {
    // Representatives of Z^2 / (Z(4,4) + Z(4,-4)): reduce both coordinates
    // mod 8, then fold by the (4,4) shift, keeping the lexicographic minimum.
    let canon = |a: i64, b: i64| -> (i64, i64) {
        let p = (a.rem_euclid(8), b.rem_euclid(8));
        let q = ((a + 4).rem_euclid(8), (b + 4).rem_euclid(8));
        p.min(q)
    };
    let mut reps = Vec::new();
    for a in 0..8i64 {
        for b in 0..8i64 {
            let c = canon(a, b);
            if !reps.contains(&c) {
                reps.push(c);
            }
        }
    }
    reps.sort();
    let pos = |c: (i64, i64)| reps.iter().position(|&x| x == c).unwrap();
    let ids = reps.iter().map(|(a, b)| format!("{a},{b}")).collect();
    let mut edges = Vec::new();
    for (idx, &(a, b)) in reps.iter().enumerate() {
        let mut moves = vec![(1, 0), (-1, 0), (0, 1), (0, -1)];
        if (a + b) % 2 == 0 {
            moves.push((1, 1));
            moves.push((-1, -1));
        } else {
            moves.push((1, -1));
            moves.push((-1, 1));
        }
        for (da, db) in moves {
            let t = pos(canon(a + da, b + db));
            if idx < t {
                edges.push((idx, t, rat_int(1)));
            }
        }
    }
    let edges = normalize_edge_list(edges);
    let n = reps.len();
    WeightedGraph::new(ids, vec![rat_int(6); n], edges).expect("fixed construction")
}

/// Cayley graph of Z_{n_1} x ... x Z_{n_m} with the coordinate generators.
/// Each modulus must be at least 6 so that no generator word of 1-norm at
/// most 5 is a relator. Weight per generator defaults to 1, mu to 1.
pub fn gen_torus(
    moduli: &[usize],
    weights: Option<Vec<Rational>>,
    mu: Option<Rational>,
) -> Result<WeightedGraph, Error> {
    if moduli.is_empty() {
        return Err(Error::Precondition(
            "torus needs at least one modulus".into(),
        ));
    }
    let m = moduli.len();
    for &n in moduli {
        if n < 6 {
            return Err(Error::Precondition(format!(
                "modulus {n} < 6 admits a relator of 1-norm at most 5"
            )));
        }
    }
    let weights = weights.unwrap_or_else(|| vec![rat_int(1); m]);
    if weights.len() != m {
        return Err(Error::Precondition(format!(
            "need one weight per generator ({m}), got {}",
            weights.len()
        )));
    }
    let mu = mu.unwrap_or_else(|| rat_int(1));
    let total: usize = moduli.iter().product();
    let to_tuple = |mut idx: usize| -> Vec<usize> {
        let mut t = vec![0; m];
        for i in (0..m).rev() {
            t[i] = idx % moduli[i];
            idx /= moduli[i];
        }
        t
    };
    let to_index = |t: &[usize]| -> usize {
        t.iter()
            .zip(moduli)
            .fold(0usize, |acc, (&c, &n)| acc * n + c)
    };
    let ids = (0..total)
        .map(|i| {
            to_tuple(i)
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let mut edges = Vec::new();
    for idx in 0..total {
        let t = to_tuple(idx);
        for (i, &n) in moduli.iter().enumerate() {
            let mut fwd = t.clone();
            fwd[i] = (t[i] + 1) % n;
            let j = to_index(&fwd);
            let (a, b) = (idx.min(j), idx.max(j));
            edges.push((a, b, weights[i].clone()));
        }
    }
    let edges = normalize_edge_list(edges);
    WeightedGraph::new(ids, vec![mu; total], edges)
}

/// Standard normalized fixtures: w in {0,1}, mu = deg.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Standard {
    Complete(usize),
    Hypercube(usize),
    Path(usize),
    /// Balanced binary tree with the given number of vertices.
    Tree(usize),
}

pub fn gen_standard(which: Standard) -> Result<WeightedGraph, Error> {
    let edges: Vec<(usize, usize)> = match which {
        Standard::Complete(n) => {
            if n < 2 {
                return Err(Error::Precondition("complete graph needs n >= 2".into()));
            }
            (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect()
        }
        Standard::Hypercube(k) => {
            if k == 0 || k > 16 {
                return Err(Error::Precondition(
                    "hypercube dimension must be 1..=16".into(),
                ));
            }
            let n = 1usize << k;
            (0..n)
                .flat_map(|i| (0..k).map(move |b| (i, i ^ (1 << b))))
                .filter(|&(i, j)| i < j)
                .collect()
        }
        Standard::Path(n) => {
            if n < 2 {
                return Err(Error::Precondition("path needs n >= 2".into()));
            }
            (0..n - 1).map(|i| (i, i + 1)).collect()
        }
        Standard::Tree(n) => {
            if n < 2 {
                return Err(Error::Precondition("tree needs n >= 2".into()));
            }
            (1..n).map(|i| ((i - 1) / 2, i)).collect()
        }
    };
    let n = edges.iter().map(|&(_, b)| b + 1).max().unwrap();
    let mut deg = vec![0usize; n];
    for &(a, b) in &edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    let mu = deg.iter().map(|&d| rat_int(d as i64)).collect();
    let edges = edges.into_iter().map(|(a, b)| (a, b, rat_int(1))).collect();
    WeightedGraph::new(index_ids(n), mu, edges)
}

/// Seeded random connected rational-weighted graph on 4..=10 vertices:
/// a random spanning tree plus extra edges, weights with small denominators,
/// arbitrary positive mu. The corpus for the primal-dual and idleness
/// property suites.
pub fn gen_random_weighted(seed: u64) -> WeightedGraph {
    let mut rng = Rng::new(seed.wrapping_mul(0x5851_F42D_4C95_7F2D).wrapping_add(1));
    let n = 4 + rng.below(7) as usize;
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    let random_weight = |rng: &mut Rng| rat(1 + rng.below(12) as i64, 1 + rng.below(4) as i64);
    for v in 1..n {
        let u = rng.below(v as u64) as usize;
        present[u][v] = true;
        let w = random_weight(&mut rng);
        edges.push((u, v, w));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && rng.below(3) == 0 {
                let w = random_weight(&mut rng);
                edges.push((u, v, w));
            }
        }
    }
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mu = (0..n)
        .map(|_| rat(1 + rng.below(8) as i64, 1 + rng.below(3) as i64))
        .collect();
    WeightedGraph::new(index_ids(n), mu, edges).expect("random graph is connected by construction")
}

/// Parses the CLI generator syntax `family:params`.
///
/// Families: `cycle:n[:seed]`, `rope-ladder:n`, `zrp:l`, `bi:n`,
/// `chessboard`, `torus:n1,n2[,..][:w1,w2[,..][:mu]]`, `complete:n`,
/// `hypercube:k`, `path:n`, `tree:n`, `random:seed`.
pub fn parse_generator(spec: &str) -> Result<Model, Error> {
    let mut parts = spec.split(':');
    let family = parts.next().unwrap_or("");
    let args: Vec<&str> = parts.collect();
    let need_usize = |s: &str| -> Result<usize, Error> {
        s.parse()
            .map_err(|_| Error::Parse(format!("invalid integer {s:?} in generator spec")))
    };
    let arg = |i: usize| -> Result<&str, Error> {
        args.get(i)
            .copied()
            .ok_or_else(|| Error::Parse(format!("generator {family:?} is missing a parameter")))
    };
    match family {
        "cycle" => {
            let n = need_usize(arg(0)?)?;
            let kernel = match args.get(1) {
                Some(seed) => {
                    Some(CycleKernel::Seeded(seed.parse().map_err(|_| {
                        Error::Parse(format!("invalid seed {seed:?}"))
                    })?))
                }
                None => None,
            };
            Ok(Model::Markov(gen_cycle(n, kernel)?))
        }
        "rope-ladder" => Ok(Model::Weighted(gen_rope_ladder(need_usize(arg(0)?)?)?)),
        "zrp" => Ok(Model::Weighted(gen_zrp(need_usize(arg(0)?)?)?)),
        "bi" => Ok(Model::Weighted(gen_bi(need_usize(arg(0)?)?)?)),
        "chessboard" => Ok(Model::Weighted(gen_chessboard())),
        "torus" => {
            let moduli = arg(0)?
                .split(',')
                .map(need_usize)
                .collect::<Result<Vec<_>, _>>()?;
            let weights = match args.get(1) {
                Some(ws) => Some(
                    ws.split(',')
                        .map(crate::rational::parse_rational)
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => None,
            };
            let mu = match args.get(2) {
                Some(m) => Some(crate::rational::parse_rational(m)?),
                None => None,
            };
            Ok(Model::Weighted(gen_torus(&moduli, weights, mu)?))
        }
        "complete" => Ok(Model::Weighted(gen_standard(Standard::Complete(
            need_usize(arg(0)?)?,
        ))?)),
        "hypercube" => Ok(Model::Weighted(gen_standard(Standard::Hypercube(
            need_usize(arg(0)?)?,
        ))?)),
        "path" => Ok(Model::Weighted(gen_standard(Standard::Path(need_usize(
            arg(0)?,
        )?))?)),
        "tree" => Ok(Model::Weighted(gen_standard(Standard::Tree(need_usize(
            arg(0)?,
        )?))?)),
        "random" => Ok(Model::Weighted(gen_random_weighted(
            arg(0)?
                .parse()
                .map_err(|_| Error::Parse("invalid seed in random spec".into()))?,
        ))),
        other => Err(Error::Parse(format!("unknown generator family {other:?}"))),
    }
}

fn index_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn normalize_edge_list(mut edges: Vec<(usize, usize, Rational)>) -> Vec<(usize, usize, Rational)> {
    for e in &mut edges {
        if e.0 > e.1 {
            std::mem::swap(&mut e.0, &mut e.1);
        }
    }
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    edges.dedup_by(|a, b| (a.0, a.1) == (b.0, b.1));
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degree_stats, serialize_graph};

    #[test]
    fn cycle_kernels() {
        let c = gen_cycle(6, None).unwrap();
        assert_eq!(c.vertex_count(), 6);
        assert_eq!(c.edges().len(), 6);
        assert_eq!(c.prob(0, 1), &rat(1, 2));
        assert!(gen_cycle(2, None).is_err());
        // seeded kernels are valid chains and deterministic
        let a = gen_cycle(5, Some(CycleKernel::Seeded(42))).unwrap();
        let b = gen_cycle(5, Some(CycleKernel::Seeded(42))).unwrap();
        for i in 0..5 {
            assert_eq!(a.prob(i, (i + 1) % 5), b.prob(i, (i + 1) % 5));
        }
    }

    #[test]
    fn rope_ladder_counts() {
        let g = gen_rope_ladder(6).unwrap();
        assert_eq!(g.vertex_count(), 18);
        assert_eq!(g.edges().len(), 24);
        let (dmin, dmax, _) = degree_stats(&Model::Weighted(g));
        assert_eq!((dmin, dmax), (2, 4));
        let g3 = gen_rope_ladder(3).unwrap();
        assert_eq!(g3.vertex_count(), 9);
        assert_eq!(g3.edges().len(), 12);
        assert!(gen_rope_ladder(2).is_err());
    }

    #[test]
    fn zrp_counts() {
        let g = gen_zrp(6).unwrap();
        assert_eq!(g.vertex_count(), 21);
        let model = Model::Weighted(g);
        let (dmin, dmax, degs) = degree_stats(&model);
        assert_eq!((dmin, dmax), (2, 4));
        // diagonal configurations have degree 2
        for (i, id) in model.ids().iter().enumerate() {
            let (a, b) = id[1..id.len() - 1].split_once(',').unwrap();
            if a == b {
                assert_eq!(degs[i], 2, "diagonal {id}");
            } else {
                assert_eq!(degs[i], 4, "off-diagonal {id}");
            }
        }
        assert!(gen_zrp(5).is_err());
    }

    #[test]
    fn bi_counts() {
        let g = gen_bi(6).unwrap();
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edges().len(), 24);
        let (dmin, dmax, _) = degree_stats(&Model::Weighted(g.clone()));
        assert_eq!((dmin, dmax), (4, 4));
        assert!(g.is_stochastic());
        assert!(gen_bi(5).is_err());
    }

    #[test]
    fn chessboard_is_six_regular_on_32_vertices() {
        let g = gen_chessboard();
        assert_eq!(g.vertex_count(), 32);
        assert_eq!(g.edges().len(), 96);
        let (dmin, dmax, _) = degree_stats(&Model::Weighted(g.clone()));
        assert_eq!((dmin, dmax), (6, 6));
        assert!(g.is_stochastic());
    }

    #[test]
    fn torus_family() {
        let t = gen_torus(&[6, 6], None, None).unwrap();
        assert_eq!(t.vertex_count(), 36);
        let (dmin, dmax, _) = degree_stats(&Model::Weighted(t));
        assert_eq!((dmin, dmax), (4, 4));
        assert!(gen_torus(&[4, 8], None, None).is_err());
        let c7 = gen_torus(&[7], None, None).unwrap();
        assert_eq!(c7.vertex_count(), 7);
        let (dmin, dmax, _) = degree_stats(&Model::Weighted(c7));
        assert_eq!((dmin, dmax), (2, 2));
    }

    #[test]
    fn standard_fixtures() {
        let k5 = gen_standard(Standard::Complete(5)).unwrap();
        assert_eq!((k5.vertex_count(), k5.edges().len()), (5, 10));
        let q3 = gen_standard(Standard::Hypercube(3)).unwrap();
        assert_eq!((q3.vertex_count(), q3.edges().len()), (8, 12));
        let p4 = gen_standard(Standard::Path(4)).unwrap();
        assert_eq!((p4.vertex_count(), p4.edges().len()), (4, 3));
    }

    #[test]
    fn generators_are_reproducible() {
        let a = serialize_graph(&Model::Weighted(gen_random_weighted(7)), None);
        let b = serialize_graph(&Model::Weighted(gen_random_weighted(7)), None);
        assert_eq!(a, b);
        let c = serialize_graph(&parse_generator("torus:6,6").unwrap(), None);
        let d = serialize_graph(&parse_generator("torus:6,6").unwrap(), None);
        assert_eq!(c, d);
    }

    #[test]
    fn generator_spec_parsing() {
        assert!(parse_generator("rope-ladder:6").is_ok());
        assert!(parse_generator("torus:6,6:1/4,1/4:1").is_ok());
        assert!(parse_generator("nope:1").is_err());
        assert!(parse_generator("cycle:x").is_err());
    }
}
