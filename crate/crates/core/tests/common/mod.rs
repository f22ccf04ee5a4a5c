//! Shared test oracles. Everything here recomputes from first principles and
//! stays independent of the library's solver internals.

#![allow(dead_code)]

use attrnet::attr_io::AttributeMatrix;
use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random binary matrix without constant columns. Half the columns get a
/// planted dependence on an earlier column so penalized fits have signal.
pub fn random_attr_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> AttributeMatrix {
    let prevalence = Uniform::new(0.2, 0.8);
    let mut columns: Vec<Vec<u8>> = Vec::with_capacity(m);
    for j in 0..m {
        loop {
            let p = prevalence.sample(rng);
            let col: Vec<u8> = if j >= 2 && rng.gen_bool(0.5) {
                let parent = rng.gen_range(0..j);
                let flip = rng.gen_range(0.1..0.4);
                (0..n)
                    .map(|i| {
                        let base = columns[parent][i];
                        if rng.gen_bool(flip) {
                            1 - base
                        } else {
                            base
                        }
                    })
                    .collect()
            } else {
                (0..n).map(|_| u8::from(rng.gen_bool(p))).collect()
            };
            let ones: usize = col.iter().map(|&v| usize::from(v)).sum();
            if ones > 0 && ones < n {
                columns.push(col);
                break;
            }
        }
    }
    let names = (0..m).map(|j| format!("attr{j}")).collect();
    let row_ids = (0..n).map(|i| format!("r{i}")).collect();
    let mut data = Vec::with_capacity(n * m);
    for i in 0..n {
        for col in &columns {
            data.push(col[i]);
        }
    }
    AttributeMatrix::new(names, row_ids, data).unwrap()
}

/// The penalized logistic problem for one node, standardized independently
/// of the library: minimize -l/N + rho * ||coefs||_1 with an unpenalized
/// intercept, over predictors scaled to zero mean and unit variance.
pub struct StdProblem {
    pub n: usize,
    pub y: Vec<f64>,
    /// Standardized predictor columns (length M-1).
    pub cols: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

pub fn standardized_problem(a: &AttributeMatrix, j: usize) -> StdProblem {
    let n = a.n_rows();
    let y: Vec<f64> = a.column(j).map(f64::from).collect();
    let mut cols = Vec::new();
    let mut means = Vec::new();
    let mut stds = Vec::new();
    for k in 0..a.n_attrs() {
        if k == j {
            continue;
        }
        let raw: Vec<f64> = a.column(k).map(f64::from).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let var = raw.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        cols.push(raw.iter().map(|x| (x - mean) / std).collect());
        means.push(mean);
        stds.push(std);
    }
    StdProblem { n, y, cols, means, stds }
}

impl StdProblem {
    /// Maps a raw-scale solution (as returned by the library) into this
    /// problem's standardized coordinates.
    pub fn standardize_solution(&self, tau: f64, betas: &[f64]) -> (f64, Vec<f64>) {
        let mut intercept = tau;
        let mut coefs = vec![0.0; betas.len()];
        for (k, &b) in betas.iter().enumerate() {
            coefs[k] = b * self.stds[k];
            intercept += b * self.means[k];
        }
        (intercept, coefs)
    }

    pub fn eta(&self, intercept: f64, coefs: &[f64]) -> Vec<f64> {
        let mut eta = vec![intercept; self.n];
        for (k, col) in self.cols.iter().enumerate() {
            if coefs[k] != 0.0 {
                for (e, x) in eta.iter_mut().zip(col) {
                    *e += coefs[k] * x;
                }
            }
        }
        eta
    }

    /// Penalized objective -l/N + rho * ||coefs||_1.
    pub fn objective(&self, rho: f64, intercept: f64, coefs: &[f64]) -> f64 {
        let eta = self.eta(intercept, coefs);
        let mut nll = 0.0;
        for (e, y) in eta.iter().zip(&self.y) {
            let log1p_exp = if *e > 0.0 { e + (-e).exp().ln_1p() } else { e.exp().ln_1p() };
            nll -= y * e - log1p_exp;
        }
        nll / self.n as f64 + rho * coefs.iter().map(|c| c.abs()).sum::<f64>()
    }

    /// Gradient of -l/N at (intercept, coefs): (d/d intercept, d/d coefs).
    pub fn gradient(&self, intercept: f64, coefs: &[f64]) -> (f64, Vec<f64>) {
        let eta = self.eta(intercept, coefs);
        let resid: Vec<f64> = eta
            .iter()
            .zip(&self.y)
            .map(|(e, y)| {
                let p = if *e >= 0.0 {
                    1.0 / (1.0 + (-e).exp())
                } else {
                    let ex = e.exp();
                    ex / (1.0 + ex)
                };
                y - p
            })
            .collect();
        let n = self.n as f64;
        let g0 = -resid.iter().sum::<f64>() / n;
        let g: Vec<f64> = self
            .cols
            .iter()
            .map(|col| -col.iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>() / n)
            .collect();
        (g0, g)
    }

    /// Worst violation of the l1 stationarity conditions at a solution.
    pub fn kkt_residual(&self, rho: f64, intercept: f64, coefs: &[f64]) -> f64 {
        let (g0, g) = self.gradient(intercept, coefs);
        let mut worst = g0.abs();
        for (gk, ck) in g.iter().zip(coefs) {
            let v = if *ck == 0.0 {
                (gk.abs() - rho).max(0.0)
            } else {
                (gk + rho * ck.signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Upper bound on the Lipschitz constant of the smooth part via power
    /// iteration on (1/4N) X^T X with X = [1, cols].
    fn lipschitz(&self) -> f64 {
        let d = self.cols.len() + 1;
        let n = self.n as f64;
        let mut v = vec![1.0 / (d as f64).sqrt(); d];
        let mut lambda = 0.0;
        for _ in 0..100 {
            // u = X v
            let mut u = vec![v[0]; self.n];
            for (k, col) in self.cols.iter().enumerate() {
                for (ui, x) in u.iter_mut().zip(col) {
                    *ui += v[k + 1] * x;
                }
            }
            // w = X^T u / (4N)
            let mut w = vec![0.0; d];
            w[0] = u.iter().sum::<f64>() / (4.0 * n);
            for (k, col) in self.cols.iter().enumerate() {
                w[k + 1] = col.iter().zip(&u).map(|(x, ui)| x * ui).sum::<f64>() / (4.0 * n);
            }
            lambda = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if lambda == 0.0 {
                return 0.25;
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / lambda;
            }
        }
        lambda * 1.05
    }

    /// High-precision FISTA with adaptive restart. Returns (intercept,
    /// coefs, kkt_residual_reached) in standardized coordinates.
    pub fn fista(&self, rho: f64, kkt_tol: f64, max_iter: usize) -> (f64, Vec<f64>, f64) {
        let d = self.cols.len();
        let step = 1.0 / self.lipschitz();
        let mut x0 = 0.0;
        let mut x = vec![0.0; d];
        let mut y0 = x0;
        let mut yv = x.clone();
        let mut t = 1.0f64;
        let mut prev_obj = self.objective(rho, x0, &x);
        let mut reached = f64::INFINITY;
        for iter in 0..max_iter {
            let (g0, g) = self.gradient(y0, &yv);
            let new_x0 = y0 - step * g0;
            let mut new_x = vec![0.0; d];
            for k in 0..d {
                let raw = yv[k] - step * g[k];
                let thr = step * rho;
                new_x[k] = if raw > thr {
                    raw - thr
                } else if raw < -thr {
                    raw + thr
                } else {
                    0.0
                };
            }
            let new_t = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let momentum = (t - 1.0) / new_t;
            y0 = new_x0 + momentum * (new_x0 - x0);
            for k in 0..d {
                yv[k] = new_x[k] + momentum * (new_x[k] - x[k]);
            }
            x0 = new_x0;
            x = new_x;
            t = new_t;
            if iter % 40 == 39 {
                let obj = self.objective(rho, x0, &x);
                if obj > prev_obj {
                    // restart momentum
                    t = 1.0;
                    y0 = x0;
                    yv = x.clone();
                }
                prev_obj = obj;
                reached = self.kkt_residual(rho, x0, &x);
                if reached < kkt_tol {
                    break;
                }
            }
        }
        (x0, x, reached)
    }
}

/// Component and isolated-node counts by boolean matrix closure; independent
/// of the union-find in the library.
pub fn reachability_components(m: usize, edges: &[(usize, usize)]) -> (usize, usize) {
    let mut reach = vec![vec![false; m]; m];
    for j in 0..m {
        reach[j][j] = true;
    }
    let mut degree = vec![0usize; m];
    for &(j, k) in edges {
        reach[j][k] = true;
        reach[k][j] = true;
        degree[j] += 1;
        degree[k] += 1;
    }
    loop {
        let mut changed = false;
        for i in 0..m {
            for j in 0..m {
                if reach[i][j] {
                    continue;
                }
                if (0..m).any(|k| reach[i][k] && reach[k][j]) {
                    reach[i][j] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut components = 0;
    let mut seen = vec![false; m];
    for i in 0..m {
        if !seen[i] {
            components += 1;
            for j in 0..m {
                if reach[i][j] {
                    seen[j] = true;
                }
            }
        }
    }
    let isolated = degree.iter().filter(|&&d| d == 0).count();
    (components, isolated)
}

/// Two-sided t-test p-value by composite-Simpson quadrature of the
/// unnormalized density (1 + s^2/nu)^(-(nu+1)/2), with no special functions.
pub fn t_p_value_quadrature(r: f64, n: usize) -> f64 {
    let nu = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t = r.abs() * (nu / (1.0 - r * r)).sqrt();
    let g = |s: f64| (1.0 + s * s / nu).powf(-(nu + 1.0) / 2.0);
    // map [a, inf) onto [0, 1) via s = a + u/(1-u)
    let integral_from = |a: f64| {
        let steps = 200_000;
        let h = 1.0 / steps as f64;
        let f = |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let s = a + u / (1.0 - u);
            g(s) / ((1.0 - u) * (1.0 - u))
        };
        let mut acc = f(0.0) + f(1.0);
        for i in 1..steps {
            let u = i as f64 * h;
            acc += if i % 2 == 1 { 4.0 * f(u) } else { 2.0 * f(u) };
        }
        acc * h / 3.0
    };
    integral_from(t) / integral_from(0.0)
}

/// Exact joint probabilities of an Ising graph by full enumeration.
pub fn enumerate_joint(graph: &attrnet::graph::IsingGraph) -> Vec<f64> {
    let m = graph.n_nodes();
    let n_states = 1usize << m;
    let mut log_p = Vec::with_capacity(n_states);
    for s in 0..n_states {
        let state: Vec<u8> = (0..m).map(|j| ((s >> j) & 1) as u8).collect();
        log_p.push(attrnet::graph::joint_log_unnorm(graph, &state).unwrap());
    }
    let max = log_p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_p.iter().map(|lp| (lp - max).exp()).collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// Builds an Ising graph from an edge list; thresholds default to zero.
pub fn graph_from(
    m: usize,
    thresholds: &[f64],
    edges: &[(usize, usize, f64)],
) -> attrnet::graph::IsingGraph {
    let names: Vec<String> = (0..m).map(|i| format!("n{i}")).collect();
    let mut weights = vec![0.0; m * m];
    for &(j, k, w) in edges {
        weights[j * m + k] = w;
        weights[k * m + j] = w;
    }
    let th = if thresholds.is_empty() { vec![0.0; m] } else { thresholds.to_vec() };
    attrnet::graph::IsingGraph::new(names, th, weights, 0.25, vec![0.1; m]).unwrap()
}
