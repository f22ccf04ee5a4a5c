//! The symmetrized Ising graph: assembly from nodewise fits, connectivity,
//! gamma selection by the connectivity criterion, joint evaluation and exact
//! sampling.

use crate::attr_io::AttributeMatrix;
use crate::elasso::{self, FitConfig, NodewiseFit, RegularizationPath};
use crate::error::{Error, Result};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Undirected Ising model over M named attributes: node thresholds tau_j and
/// a symmetric weight matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingGraph {
    names: Vec<String>,
    thresholds: Vec<f64>,
    /// M x M row-major, symmetric, zero diagonal.
    weights: Vec<f64>,
    gamma: f64,
    /// Per-node penalty of the selected fit.
    lambdas: Vec<f64>,
}

impl IsingGraph {
    pub fn new(
        names: Vec<String>,
        thresholds: Vec<f64>,
        weights: Vec<f64>,
        gamma: f64,
        lambdas: Vec<f64>,
    ) -> Result<Self> {
        let m = names.len();
        if m == 0 {
            return Err(Error::InvalidInput("graph needs at least one node".into()));
        }
        for (idx, name) in names.iter().enumerate() {
            if names[..idx].contains(name) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        if thresholds.len() != m || lambdas.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{} thresholds / {} lambdas for {m} nodes",
                thresholds.len(),
                lambdas.len()
            )));
        }
        if weights.len() != m * m {
            return Err(Error::DimensionMismatch(format!(
                "weight matrix has {} entries, expected {}",
                weights.len(),
                m * m
            )));
        }
        if thresholds.iter().chain(&weights).chain(&lambdas).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite graph parameter".into()));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidInput("non-finite gamma".into()));
        }
        for j in 0..m {
            if weights[j * m + j] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at node {j}")));
            }
            for k in 0..j {
                if weights[j * m + k] != weights[k * m + j] {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric weights at ({j}, {k})"
                    )));
                }
            }
        }
        Ok(Self { names, thresholds, weights, gamma, lambdas })
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn threshold(&self, j: usize) -> f64 {
        self.thresholds[j]
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    #[inline]
    pub fn weight(&self, j: usize, k: usize) -> f64 {
        self.weights[j * self.names.len() + k]
    }

    /// Neighbors of node `j` (nonzero weight), ascending.
    pub fn neighbors(&self, j: usize) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&k| k != j && self.weight(j, k) != 0.0).collect()
    }

    /// Nonzero edges as (j, k, w) with j < k, lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let m = self.n_nodes();
        let mut out = Vec::new();
        for j in 0..m {
            for k in (j + 1)..m {
                let w = self.weight(j, k);
                if w != 0.0 {
                    out.push((j, k, w));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Builds the symmetric graph from one fit per node with the AND rule:
/// `w_jk = (beta_jk + beta_kj) / 2` when both directed coefficients are
/// nonzero, else 0.
pub fn symmetrize(names: &[String], fits: &[NodewiseFit], gamma: f64) -> Result<IsingGraph> {
    let m = names.len();
    if fits.len() != m {
        return Err(Error::DimensionMismatch(format!("{} fits for {m} nodes", fits.len())));
    }
    for (j, fit) in fits.iter().enumerate() {
        if fit.node != j {
            return Err(Error::InvalidInput(format!(
                "fit {j} is for node {}, expected node order",
                fit.node
            )));
        }
        if fit.betas.len() != m - 1 {
            return Err(Error::DimensionMismatch(format!(
                "fit for node {j} has {} coefficients, expected {}",
                fit.betas.len(),
                m - 1
            )));
        }
    }
    let mut weights = vec![0.0; m * m];
    for j in 0..m {
        for k in (j + 1)..m {
            let jk = fits[j].beta_for(k);
            let kj = fits[k].beta_for(j);
            if jk != 0.0 && kj != 0.0 {
                let w = (jk + kj) / 2.0;
                weights[j * m + k] = w;
                weights[k * m + j] = w;
            }
        }
    }
    let thresholds = fits.iter().map(|f| f.threshold).collect();
    let lambdas = fits.iter().map(|f| f.penalty).collect();
    IsingGraph::new(names.to_vec(), thresholds, weights, gamma, lambdas)
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        Self { parent: (0..len).collect(), size: vec![1; len] }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut x = x;
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Component count and isolated-node count over the nonzero edges.
/// The graph is connected iff the component count is 1.
pub fn connected(graph: &IsingGraph) -> (usize, usize) {
    let m = graph.n_nodes();
    let mut uf = UnionFind::new(m);
    let mut degree = vec![0usize; m];
    for (j, k, _) in graph.edges() {
        uf.union(j, k);
        degree[j] += 1;
        degree[k] += 1;
    }
    let mut roots: Vec<usize> = (0..m).map(|x| uf.find(x)).collect();
    roots.sort_unstable();
    roots.dedup();
    let isolated = degree.iter().filter(|&&d| d == 0).count();
    (roots.len(), isolated)
}

/// One row of the gamma sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GammaSweepRow {
    pub gamma: f64,
    pub edge_count: usize,
    pub isolated: usize,
    pub components: usize,
}

/// Sweep of EBIC re-selection over a gamma grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GammaSweepReport {
    pub rows: Vec<GammaSweepRow>,
    /// Largest grid gamma whose graph is connected, if any.
    pub selected: Option<f64>,
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("gamma grid is empty".into()));
    }
    for pair in grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::InvalidConfig("gamma grid must be strictly increasing".into()));
        }
    }
    if grid.iter().any(|g| !g.is_finite() || *g < 0.0) {
        return Err(Error::InvalidConfig("gamma grid values must be finite and >= 0".into()));
    }
    Ok(())
}

/// Re-selects and symmetrizes cached paths at each grid gamma. The paths are
/// fitted once; only EBIC selection varies with gamma.
pub fn sweep_from_paths(
    names: &[String],
    paths: &[RegularizationPath],
    grid: &[f64],
) -> Result<GammaSweepReport> {
    validate_grid(grid)?;
    let eval = |gamma: f64| -> Result<GammaSweepRow> {
        let graph = graph_at_gamma(names, paths, gamma)?;
        let (components, isolated) = connected(&graph);
        Ok(GammaSweepRow { gamma, edge_count: graph.edge_count(), isolated, components })
    };
    #[cfg(feature = "parallel")]
    let rows: Result<Vec<GammaSweepRow>> = {
        let collected: Vec<Result<GammaSweepRow>> =
            grid.par_iter().map(|&gamma| eval(gamma)).collect();
        collected.into_iter().collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<GammaSweepRow>> = grid.iter().map(|&gamma| eval(gamma)).collect();
    let rows = rows?;
    let selected = rows.iter().filter(|r| r.components == 1).map(|r| r.gamma).next_back();
    Ok(GammaSweepReport { rows, selected })
}

/// EBIC selection and symmetrization of cached paths at one gamma.
pub fn graph_at_gamma(
    names: &[String],
    paths: &[RegularizationPath],
    gamma: f64,
) -> Result<IsingGraph> {
    let fits: Vec<NodewiseFit> = paths.iter().map(|p| elasso::select_fit(p, gamma)).collect();
    symmetrize(names, &fits, gamma)
}

/// Fits all nodewise paths, then reports edge count, isolated nodes and
/// component count for each grid gamma, selecting the largest gamma whose
/// graph is connected.
pub fn select_gamma(
    a: &AttributeMatrix,
    grid: &[f64],
    cfg: &FitConfig,
) -> Result<GammaSweepReport> {
    validate_grid(grid)?;
    let paths = elasso::fit_all_paths(a, cfg)?;
    sweep_from_paths(a.names(), &paths, grid)
}

/// Fits the full pipeline at one gamma: nodewise paths, EBIC selection, AND
/// symmetrization. Returns the graph and the per-node selected fits.
pub fn learn_graph(
    a: &AttributeMatrix,
    gamma: f64,
    cfg: &FitConfig,
) -> Result<(IsingGraph, Vec<NodewiseFit>)> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidConfig(format!("gamma must be >= 0, got {gamma}")));
    }
    let paths = elasso::fit_all_paths(a, cfg)?;
    let fits: Vec<NodewiseFit> = paths.iter().map(|p| elasso::select_fit(p, gamma)).collect();
    let graph = symmetrize(a.names(), &fits, gamma)?;
    Ok((graph, fits))
}

/// Unnormalized joint log-probability `sum_j tau_j a_j + sum_{j<k} w_jk a_j a_k`.
pub fn joint_log_unnorm(graph: &IsingGraph, a: &[u8]) -> Result<f64> {
    let m = graph.n_nodes();
    if a.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "state vector has {} entries for {m} nodes",
            a.len()
        )));
    }
    if let Some(bad) = a.iter().find(|&&v| v > 1) {
        return Err(Error::InvalidInput(format!("state value {bad} is not 0 or 1")));
    }
    let mut total = 0.0;
    for j in 0..m {
        if a[j] == 1 {
            total += graph.threshold(j);
            for k in (j + 1)..m {
                if a[k] == 1 {
                    total += graph.weight(j, k);
                }
            }
        }
    }
    Ok(total)
}

/// Largest node count for which exact enumeration is allowed.
pub const MAX_EXACT_NODES: usize = 20;

/// Draws `n` i.i.d. samples from the exact joint by enumerating all 2^M
/// states and inverting the CDF. Deterministic for a fixed seed.
pub fn sample_ising_exact(graph: &IsingGraph, n: usize, seed: u64) -> Result<AttributeMatrix> {
    let m = graph.n_nodes();
    if m > MAX_EXACT_NODES {
        return Err(Error::StateSpaceTooLarge { attrs: m, max: MAX_EXACT_NODES });
    }
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let n_states = 1usize << m;
    let mut state = vec![0u8; m];
    let mut log_probs = Vec::with_capacity(n_states);
    for s in 0..n_states {
        for (j, bit) in state.iter_mut().enumerate() {
            *bit = ((s >> j) & 1) as u8;
        }
        log_probs.push(joint_log_unnorm(graph, &state)?);
    }
    let max_lp = log_probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut cdf = Vec::with_capacity(n_states);
    let mut acc = 0.0;
    for lp in &log_probs {
        acc += (lp - max_lp).exp();
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * m);
    let mut row_ids = Vec::with_capacity(n);
    for i in 0..n {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(n_states - 1);
        for j in 0..m {
            data.push(((idx >> j) & 1) as u8);
        }
        row_ids.push(format!("s{i:06}"));
    }
    AttributeMatrix::new(graph.names().to_vec(), row_ids, data)
}
