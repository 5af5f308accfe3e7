use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, RngStream};
use crate::regularizers::{eval_bin, grad_bin};
use crate::solvers::{projected_gd_box, FistaConfig, FnObjective};

/// Weighted undirected edge between 0-based vertices `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from 0-based edges; endpoints are reordered so `i < j`.
    /// Self-loops, duplicates, out-of-range vertices and non-finite weights
    /// are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut out: Vec<Edge> = Vec::new();
        for (a, b, weight) in edges {
            let (i, j) = (a.min(b), a.max(b));
            if i == j {
                return Err(Error::InvalidArgument(format!(
                    "self-loop at vertex {}",
                    i + 1
                )));
            }
            if j >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) exceeds N = {n}",
                    i + 1,
                    j + 1
                )));
            }
            if !weight.is_finite() {
                return Err(Error::NonFinite(format!(
                    "weight of edge ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            out.push(Edge { i, j, weight });
        }
        let mut keys: Vec<(usize, usize)> = out.iter().map(|e| (e.i, e.j)).collect();
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate edge ({}, {})",
                w[0].0 + 1,
                w[0].1 + 1
            )));
        }
        Ok(Self { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// Parses the Gset text format: a header `N E`, then `E` lines `i j w`
/// with 1-based vertices.
pub fn parse_gset(text: &str) -> Result<Graph> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty graph file".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::Parse(format!(
            "header must be `N E`, got `{header}`"
        )));
    }
    let n: usize = parse_field(head[0], "vertex count")?;
    let e: usize = parse_field(head[1], "edge count")?;
    let mut edges = Vec::with_capacity(e);
    for (line_no, line) in lines.enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse(format!(
                "edge line {} must be `i j w`, got `{line}`",
                line_no + 1
            )));
        }
        let i: usize = parse_field(f[0], "vertex")?;
        let j: usize = parse_field(f[1], "vertex")?;
        let w: f64 = parse_field(f[2], "weight")?;
        if i == 0 || j == 0 {
            return Err(Error::Parse(format!("vertices are 1-based, got `{line}`")));
        }
        edges.push((i - 1, j - 1, w));
    }
    if edges.len() != e {
        return Err(Error::Parse(format!(
            "header declares {e} edges, found {}",
            edges.len()
        )));
    }
    Graph::new(n, edges)
}

pub fn read_gset(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_gset(&text)
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("invalid {what} `{s}`")))
}

/// Names accepted by [`demo_graph`].
pub const DEMO_GRAPHS: [&str; 4] = ["weighted4", "unit5", "triangle", "edge"];

/// Built-in small graphs.
///
/// - `weighted4`: `w12=10, w13=20, w14=30, w24=40, w34=50`, maximum cut 120.
/// - `unit5`: 5 vertices, 7 unit edges `12 13 14 23 24 35 45`.
/// - `triangle`: unit triangle, maximum cut 2.
/// - `edge`: a single unit edge.
pub fn demo_graph(name: &str) -> Result<Graph> {
    let one_based = |n: usize, edges: &[(usize, usize, f64)]| {
        Graph::new(n, edges.iter().map(|&(i, j, w)| (i - 1, j - 1, w)))
    };
    match name {
        "weighted4" => one_based(
            4,
            &[
                (1, 2, 10.0),
                (1, 3, 20.0),
                (1, 4, 30.0),
                (2, 4, 40.0),
                (3, 4, 50.0),
            ],
        ),
        "unit5" => one_based(
            5,
            &[
                (1, 2, 1.0),
                (1, 3, 1.0),
                (1, 4, 1.0),
                (2, 3, 1.0),
                (2, 4, 1.0),
                (3, 5, 1.0),
                (4, 5, 1.0),
            ],
        ),
        "triangle" => one_based(3, &[(1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]),
        "edge" => one_based(2, &[(1, 2, 1.0)]),
        _ => Err(Error::InvalidArgument(format!(
            "unknown demo graph `{name}`, expected one of {}",
            DEMO_GRAPHS.join(", ")
        ))),
    }
}

/// `½ Σ w_ij (1 − x_i x_j)` and its gradient `−½ Σ_j w_ij x_j`.
pub fn maxcut_objective(graph: &Graph, x: &DenseVector) -> Result<(f64, DenseVector)> {
    if x.len() != graph.n {
        return Err(Error::Dimension(format!(
            "x has length {} but the graph has {} vertices",
            x.len(),
            graph.n
        )));
    }
    let mut value = 0.0;
    let mut grad = DenseVector::zeros(graph.n);
    for e in &graph.edges {
        value += 0.5 * e.weight * (1.0 - x[e.i] * x[e.j]);
        grad[e.i] -= 0.5 * e.weight * x[e.j];
        grad[e.j] -= 0.5 * e.weight * x[e.i];
    }
    Ok((value, grad))
}

/// Total weight of edges whose endpoints have different signs.
pub fn cut_value(graph: &Graph, signs: &[i8]) -> f64 {
    graph
        .edges
        .iter()
        .filter(|e| signs[e.i] != signs[e.j])
        .map(|e| e.weight)
        .sum::<f64>()
        // an empty float sum is −0
        + 0.0
}

/// Exhaustive maximum cut over the `2^(N−1)` assignments with vertex 1 fixed
/// to `+1`.
pub fn maxcut_bruteforce(graph: &Graph) -> Result<(f64, Vec<i8>)> {
    const MAX_N: usize = 24;
    if graph.n > MAX_N {
        return Err(Error::InvalidArgument(format!(
            "brute force needs N ≤ {MAX_N}, got {}",
            graph.n
        )));
    }
    if graph.n == 0 {
        return Ok((0.0, Vec::new()));
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut signs = vec![1i8; graph.n];
    for mask in 0u32..(1 << (graph.n - 1)) {
        for (v, s) in signs.iter_mut().enumerate().skip(1) {
            *s = if mask >> (v - 1) & 1 == 1 { -1 } else { 1 };
        }
        let cut = cut_value(graph, &signs);
        if cut > best.0 {
            best = (cut, signs.clone());
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    /// Cut of the rounded starting point.
    pub initial_cut: f64,
    pub final_cut: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxCutReport {
    pub best_cut: f64,
    /// `±1` per vertex.
    pub assignment: Vec<i8>,
    pub restarts: Vec<RestartRecord>,
}

/// Minimizes `−ℓ_MC(x) + λ·ℓ_bin(x)` over `[−1, 1]ᴺ` from `restarts`
/// uniform starts and rounds each result by sign (`0 → +1`).
pub fn run_maxcut(
    graph: &Graph,
    lambda: f64,
    restarts: usize,
    rng: &mut RngStream,
    cfg: &FistaConfig,
) -> Result<MaxCutReport> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "λ must be finite and nonnegative, got {lambda}"
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let n = graph.n;
    let obj = FnObjective::new(
        |x: &DenseVector| {
            let (v, _) = maxcut_objective(graph, x).expect("dimension checked");
            -v + lambda * eval_bin(x)
        },
        |x: &DenseVector| {
            let (_, g) = maxcut_objective(graph, x).expect("dimension checked");
            -g + grad_bin(x) * lambda
        },
    );
    let mut records = Vec::with_capacity(restarts);
    let mut best: Option<(f64, Vec<i8>)> = None;
    for _ in 0..restarts {
        let x0 = DenseVector::from_fn(n, |_, _| rng.uniform(-1.0, 1.0));
        let report = projected_gd_box(&obj, -1.0, 1.0, &x0, cfg)?;
        let signs = round_signs(&report.iterate);
        let final_cut = cut_value(graph, &signs);
        records.push(RestartRecord {
            initial_cut: cut_value(graph, &round_signs(&x0)),
            final_cut,
            iterations: report.iterations,
        });
        if best.as_ref().is_none_or(|(c, _)| final_cut > *c) {
            best = Some((final_cut, signs));
        }
    }
    let (best_cut, assignment) = best.expect("at least one restart");
    Ok(MaxCutReport {
        best_cut,
        assignment,
        restarts: records,
    })
}

fn round_signs(x: &DenseVector) -> Vec<i8> {
    x.iter().map(|v| if *v < 0.0 { -1 } else { 1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularizers::gradcheck::{finite_difference, relative_error};

    #[test]
    fn objective_examples() {
        let g = demo_graph("weighted4").unwrap();
        let (v, _) = maxcut_objective(&g, &DenseVector::from_vec(vec![1.0; 4])).unwrap();
        assert_eq!(v, 0.0);
        let (v, _) = maxcut_objective(&g, &DenseVector::from_vec(vec![-1.0; 4])).unwrap();
        assert_eq!(v, 0.0);
        let (v, _) =
            maxcut_objective(&g, &DenseVector::from_vec(vec![1.0, -1.0, -1.0, 1.0])).unwrap();
        assert_eq!(v, 120.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..20 {
            let n = 3 + rng.index(6);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.coin() {
                        edges.push((i, j, rng.uniform(0.1, 5.0)));
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let x = DenseVector::from_fn(n, |_, _| rng.uniform(-1.0, 1.0));
            let fd = finite_difference(|p| maxcut_objective(&g, p).unwrap().0, &x, 1e-6);
            let (_, grad) = maxcut_objective(&g, &x).unwrap();
            if grad.norm() > 0.0 {
                assert!(relative_error(&fd, &grad) < 1e-6);
            }
        }
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(
            maxcut_bruteforce(&demo_graph("weighted4").unwrap())
                .unwrap()
                .0,
            120.0
        );
        assert_eq!(
            maxcut_bruteforce(&demo_graph("triangle").unwrap())
                .unwrap()
                .0,
            2.0
        );
        assert_eq!(
            maxcut_bruteforce(&demo_graph("unit5").unwrap()).unwrap().0,
            6.0
        );
        assert_eq!(
            maxcut_bruteforce(&Graph::new(5, []).unwrap()).unwrap().0,
            0.0
        );
        assert!(maxcut_bruteforce(&Graph::new(25, []).unwrap()).is_err());
    }

    #[test]
    fn single_edge_is_cut() {
        let g = demo_graph("edge").unwrap();
        let r = run_maxcut(
            &g,
            1.0,
            3,
            &mut RngStream::new(0, 0),
            &FistaConfig::default(),
        )
        .unwrap();
        assert_eq!(r.best_cut, 1.0);
        assert_eq!(r.restarts.len(), 3);
    }

    #[test]
    fn gset_parsing() {
        let g = parse_gset("3 2\n1 2 1\n2 3 -1\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(
            g.edges()[1],
            Edge {
                i: 1,
                j: 2,
                weight: -1.0
            }
        );
        assert!(parse_gset("3 2\n1 2 1\n").is_err());
        assert!(parse_gset("3 2\n1 2 1\n2 1 1\n").is_err());
        assert!(parse_gset("3 1\n2 2 1\n").is_err());
        assert!(parse_gset("3 1\n0 2 1\n").is_err());
        assert!(parse_gset("3 1\n1 4 1\n").is_err());
        assert!(parse_gset("").is_err());
    }

    #[test]
    fn unknown_demo() {
        assert!(demo_graph("petersen").is_err());
    }
}
