//! Nodewise l1-penalized logistic regression with EBIC model selection.
//!
//! For attribute j, the conditional model given the remaining attributes is
//!
//! ```text
//! p(a_j = 1 | a_\j) = exp(tau_j + sum_k beta_jk a_k) / (1 + exp(tau_j + sum_k beta_jk a_k))
//! ```
//!
//! and the pseudo-log-likelihood of column j over the whole matrix is
//!
//! ```text
//! l(tau, beta) = sum_i [ tau a_ij + sum_k beta_jk a_ij a_ik - log(1 + exp(tau + sum_k beta_jk a_ik)) ]
//! ```
//!
//! [`fit_l1_logistic`] minimizes `-l/N + rho * sum_k |beta_k|` with an
//! unpenalized intercept. Predictors are standardized to zero mean and unit
//! variance inside each nodewise problem; the penalty applies to the
//! standardized coefficients and results are mapped back to the raw {0,1}
//! scale before being reported. The solver is an IRLS outer loop with cyclic
//! coordinate descent on the weighted least-squares surrogate, warm-started
//! along a log-spaced penalty path. Model selection minimizes
//!
//! ```text
//! EBIC_gamma = -2 l + n_nei log(N) + 2 gamma n_nei log(M - 1)
//! ```
//!
//! over the path, breaking ties toward the larger penalty.

use crate::attr_io::AttributeMatrix;
use crate::error::{Error, NonConvergenceInfo, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Hyperparameters of the nodewise fitting procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// EBIC model-space weight, >= 0.
    pub gamma: f64,
    /// Number of penalties on the path.
    pub n_penalties: usize,
    /// Ratio of the smallest to the largest path penalty.
    pub min_ratio: f64,
    /// Convergence tolerance on the largest coefficient change.
    pub tol: f64,
    /// Outer (IRLS) iteration cap per penalty.
    pub max_iter: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { gamma: 0.25, n_penalties: 100, min_ratio: 1e-4, tol: 1e-7, max_iter: 1000 }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::InvalidConfig(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.n_penalties < 2 {
            return Err(Error::InvalidConfig(format!(
                "path needs at least 2 penalties, got {}",
                self.n_penalties
            )));
        }
        if !(self.min_ratio > 0.0 && self.min_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "min_ratio must lie in (0, 1), got {}",
                self.min_ratio
            )));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// One solution along a node's regularization path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub penalty: f64,
    /// Intercept tau on the raw {0,1} scale.
    pub threshold: f64,
    /// Coefficients over the other attributes, raw scale, length M-1.
    pub betas: Vec<f64>,
    /// Pseudo-log-likelihood of this point's own coefficients.
    pub loglik: f64,
    /// Count of nonzero coefficients.
    pub n_nei: usize,
    /// EBIC at the gamma the path was built with.
    pub ebic: f64,
}

/// Penalized fits of one node across a strictly decreasing penalty path.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationPath {
    pub node: usize,
    pub n_obs: usize,
    pub n_attrs: usize,
    /// Gamma used for the stored per-point EBIC values.
    pub gamma: f64,
    pub points: Vec<PathPoint>,
}

impl RegularizationPath {
    pub fn penalties(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.penalty).collect()
    }
}

/// The EBIC-selected model of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodewiseFit {
    pub node: usize,
    /// Intercept tau_j on the raw {0,1} scale.
    pub threshold: f64,
    /// Coefficients beta_jk over k != j, raw scale, length M-1.
    pub betas: Vec<f64>,
    /// Penalty of the selected path point.
    pub penalty: f64,
    /// EBIC of the selected point at the selection gamma.
    pub ebic: f64,
    pub n_nei: usize,
}

impl NodewiseFit {
    /// Coefficient toward attribute `k` (full-matrix index, k != node).
    pub fn beta_for(&self, k: usize) -> f64 {
        debug_assert_ne!(k, self.node);
        if k < self.node {
            self.betas[k]
        } else {
            self.betas[k - 1]
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log(1 + exp(x)) without overflow.
#[inline]
fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Pseudo-log-likelihood of column `j` under intercept `tau` and raw-scale
/// coefficients `betas` (length M-1, indexed over k != j in column order).
pub fn pseudo_loglik(a: &AttributeMatrix, j: usize, tau: f64, betas: &[f64]) -> Result<f64> {
    let m = a.n_attrs();
    if j >= m {
        return Err(Error::InvalidInput(format!("node {j} out of range for {m} attributes")));
    }
    if betas.len() != m - 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected {} coefficients, got {}",
            m - 1,
            betas.len()
        )));
    }
    if !tau.is_finite() || betas.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidInput("non-finite model parameter".into()));
    }
    let mut total = 0.0;
    for i in 0..a.n_rows() {
        let row = a.row(i);
        let mut eta = tau;
        let mut idx = 0;
        for (k, &v) in row.iter().enumerate() {
            if k == j {
                continue;
            }
            if v == 1 {
                eta += betas[idx];
            }
            idx += 1;
        }
        let y = f64::from(row[j]);
        total += y * eta - log1p_exp(eta);
    }
    Ok(total)
}

/// p(a_j = 1 | a_rest) under the logistic conditional; strictly inside (0,1).
pub fn conditional_prob(tau: f64, betas: &[f64], a_rest: &[u8]) -> Result<f64> {
    if betas.len() != a_rest.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients vs {} attribute values",
            betas.len(),
            a_rest.len()
        )));
    }
    if !tau.is_finite() || betas.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidInput("non-finite model parameter".into()));
    }
    if let Some(bad) = a_rest.iter().find(|&&v| v > 1) {
        return Err(Error::InvalidInput(format!("attribute value {bad} is not 0 or 1")));
    }
    let mut eta = tau;
    for (b, &v) in betas.iter().zip(a_rest) {
        if v == 1 {
            eta += b;
        }
    }
    Ok(sigmoid(eta).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16))
}

/// EBIC for a fitted node: `-2 loglik + n_nei log(N) + 2 gamma n_nei log(M-1)`.
pub fn ebic(loglik: f64, n_nei: usize, n_obs: usize, n_attrs: usize, gamma: f64) -> f64 {
    let k = n_nei as f64;
    -2.0 * loglik + k * (n_obs as f64).ln() + 2.0 * gamma * k * ((n_attrs - 1) as f64).ln()
}

// --- nodewise problem in standardized coordinates ---------------------------

struct NodeProblem {
    n: usize,
    y: Vec<f64>,
    y_mean: f64,
    /// Standardized predictor columns, length M-1.
    cols: Vec<Vec<f64>>,
    means: Vec<f64>,
    stds: Vec<f64>,
}

/// Coefficients in the standardized predictor space.
#[derive(Clone)]
struct Solution {
    intercept: f64,
    coefs: Vec<f64>,
}

fn node_problem(a: &AttributeMatrix, j: usize) -> Result<NodeProblem> {
    let m = a.n_attrs();
    let n = a.n_rows();
    if m < 2 {
        return Err(Error::DimensionMismatch("need at least 2 attributes to fit".into()));
    }
    if j >= m {
        return Err(Error::InvalidInput(format!("node {j} out of range for {m} attributes")));
    }
    for k in 0..m {
        if a.is_constant_column(k) {
            return Err(Error::ConstantColumn { index: k, name: a.names()[k].clone() });
        }
    }
    let y: Vec<f64> = a.column(j).map(f64::from).collect();
    let y_mean = a.ones_in_column(j) as f64 / n as f64;
    let mut cols = Vec::with_capacity(m - 1);
    let mut means = Vec::with_capacity(m - 1);
    let mut stds = Vec::with_capacity(m - 1);
    for k in 0..m {
        if k == j {
            continue;
        }
        let mean = a.ones_in_column(k) as f64 / n as f64;
        let std = (mean * (1.0 - mean)).sqrt();
        let lo = -mean / std;
        let hi = (1.0 - mean) / std;
        cols.push(a.column(k).map(|v| if v == 1 { hi } else { lo }).collect());
        means.push(mean);
        stds.push(std);
    }
    Ok(NodeProblem { n, y, y_mean, cols, means, stds })
}

impl NodeProblem {
    /// Largest absolute gradient coordinate of -l/N at the null model; the
    /// smallest penalty at which every coefficient is zero.
    fn rho_max(&self) -> f64 {
        let n = self.n as f64;
        let mut best = 0.0f64;
        for col in &self.cols {
            let mut g = 0.0;
            for (x, y) in col.iter().zip(&self.y) {
                g += x * (y - self.y_mean);
            }
            best = best.max((g / n).abs());
        }
        best
    }

    fn null_solution(&self) -> Solution {
        Solution { intercept: logit(self.y_mean), coefs: vec![0.0; self.cols.len()] }
    }

    /// Back-transform standardized coefficients to the raw {0,1} scale.
    fn to_raw(&self, s: &Solution) -> (f64, Vec<f64>) {
        let mut tau = s.intercept;
        let mut betas = vec![0.0; s.coefs.len()];
        for (k, &c) in s.coefs.iter().enumerate() {
            if c != 0.0 {
                betas[k] = c / self.stds[k];
                tau -= c * self.means[k] / self.stds[k];
            }
        }
        (tau, betas)
    }

    fn to_standardized(&self, tau: f64, betas: &[f64]) -> Solution {
        let mut intercept = tau;
        let mut coefs = vec![0.0; betas.len()];
        for (k, &b) in betas.iter().enumerate() {
            coefs[k] = b * self.stds[k];
            intercept += b * self.means[k];
        }
        Solution { intercept, coefs }
    }
}

#[inline]
fn soft_threshold(u: f64, t: f64) -> f64 {
    if u > t {
        u - t
    } else if u < -t {
        u + t
    } else {
        0.0
    }
}

const WEIGHT_FLOOR: f64 = 1e-10;
const MAX_CD_CYCLES: usize = 10_000;

enum SolveOutcome {
    Converged(Solution),
    Stalled { best: Solution, residual: f64 },
}

/// IRLS outer loop with cyclic coordinate descent on the weighted
/// least-squares surrogate. Operates entirely in standardized coordinates.
fn irls_cd(
    prob: &NodeProblem,
    rho: f64,
    init: Option<Solution>,
    tol: f64,
    max_iter: usize,
) -> SolveOutcome {
    let n = prob.n;
    let nf = n as f64;
    let d = prob.cols.len();
    let Solution { mut intercept, mut coefs } = init.unwrap_or_else(|| prob.null_solution());

    let mut eta = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for _outer in 0..max_iter {
        // Linear predictor from scratch each outer iteration; avoids drift
        // accumulating across warm-started path points.
        eta.iter_mut().for_each(|e| *e = intercept);
        for (k, col) in prob.cols.iter().enumerate() {
            let c = coefs[k];
            if c != 0.0 {
                for (e, x) in eta.iter_mut().zip(col) {
                    *e += c * x;
                }
            }
        }

        // IRLS weights and working residual r = z - eta = (y - p) / w.
        let mut sum_w = 0.0;
        for i in 0..n {
            let p = sigmoid(eta[i]);
            let wi = (p * (1.0 - p)).max(WEIGHT_FLOOR);
            w[i] = wi;
            sum_w += wi;
            r[i] = (prob.y[i] - p) / wi;
        }
        let int_denom = sum_w / nf;
        let denom: Vec<f64> = prob
            .cols
            .iter()
            .map(|col| col.iter().zip(&w).map(|(x, wi)| wi * x * x).sum::<f64>() / nf)
            .collect();

        let start_intercept = intercept;
        let start_coefs = coefs.clone();
        let inner_tol = tol * 0.1;

        for _cycle in 0..MAX_CD_CYCLES {
            let mut max_delta = 0.0f64;

            let g: f64 = w.iter().zip(&r).map(|(wi, ri)| wi * ri).sum();
            let delta = g / nf / int_denom;
            if delta != 0.0 {
                intercept += delta;
                r.iter_mut().for_each(|ri| *ri -= delta);
                max_delta = max_delta.max(delta.abs());
            }

            for k in 0..d {
                let col = &prob.cols[k];
                let old = coefs[k];
                let mut g = 0.0;
                for i in 0..n {
                    g += w[i] * col[i] * r[i];
                }
                let new = soft_threshold(g / nf + denom[k] * old, rho) / denom[k];
                if new != old {
                    let delta = new - old;
                    for (ri, x) in r.iter_mut().zip(col) {
                        *ri -= delta * x;
                    }
                    coefs[k] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }

            if max_delta < inner_tol {
                break;
            }
        }

        let mut outer_delta = (intercept - start_intercept).abs();
        for (c, s) in coefs.iter().zip(&start_coefs) {
            outer_delta = outer_delta.max((c - s).abs());
        }
        residual = outer_delta;
        if outer_delta < tol {
            return SolveOutcome::Converged(Solution { intercept, coefs });
        }
    }
    SolveOutcome::Stalled { best: Solution { intercept, coefs }, residual }
}

/// Minimizes `-l/N + rho sum_k |beta_k|` for node `j`, returning the
/// intercept and coefficients on the raw {0,1} scale.
///
/// At `rho >= rho_max` the null model is returned exactly: all-zero
/// coefficients and `tau = logit(prevalence)`. The optional warm start is
/// given on the raw scale.
pub fn fit_l1_logistic(
    a: &AttributeMatrix,
    j: usize,
    rho: f64,
    warm: Option<(f64, &[f64])>,
    cfg: &FitConfig,
) -> Result<(f64, Vec<f64>)> {
    cfg.validate()?;
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::InvalidInput(format!("penalty must be positive, got {rho}")));
    }
    let prob = node_problem(a, j)?;
    let init = match warm {
        Some((tau, betas)) => {
            if betas.len() != prob.cols.len() {
                return Err(Error::DimensionMismatch(format!(
                    "warm start has {} coefficients, expected {}",
                    betas.len(),
                    prob.cols.len()
                )));
            }
            if !tau.is_finite() || betas.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidInput("non-finite warm start".into()));
            }
            Some(prob.to_standardized(tau, betas))
        }
        None => None,
    };
    if rho >= prob.rho_max() {
        return Ok(prob.to_raw(&prob.null_solution()));
    }
    match irls_cd(&prob, rho, init, cfg.tol, cfg.max_iter) {
        SolveOutcome::Converged(s) => Ok(prob.to_raw(&s)),
        SolveOutcome::Stalled { best, residual } => {
            let (threshold, betas) = prob.to_raw(&best);
            Err(Error::NonConvergence(Box::new(NonConvergenceInfo {
                node: j,
                penalty: rho,
                penalty_index: None,
                residual,
                threshold,
                betas,
            })))
        }
    }
}

/// Log-spaced penalties from rho_max down to rho_max * min_ratio.
///
/// rho_max is the largest absolute coordinate of the null-model gradient of
/// -l/N over the standardized predictors, i.e. the smallest penalty whose
/// solution has every coefficient at zero.
pub fn make_penalty_path(a: &AttributeMatrix, j: usize, cfg: &FitConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let prob = node_problem(a, j)?;
    Ok(penalty_path_from(prob.rho_max(), cfg))
}

fn penalty_path_from(rho_max: f64, cfg: &FitConfig) -> Vec<f64> {
    // Degenerate all-orthogonal data can give rho_max == 0; keep the path
    // positive, every fit on it is then the null model.
    let rho_max = rho_max.max(1e-12);
    let last = (cfg.n_penalties - 1) as f64;
    (0..cfg.n_penalties)
        .map(|l| rho_max * cfg.min_ratio.powf(l as f64 / last))
        .collect()
}

/// Fits node `j` at every path penalty, warm-starting each fit from the
/// previous penalty's solution.
pub fn fit_node_path(a: &AttributeMatrix, j: usize, cfg: &FitConfig) -> Result<RegularizationPath> {
    cfg.validate()?;
    let prob = node_problem(a, j)?;
    let rho_max = prob.rho_max();
    let path = penalty_path_from(rho_max, cfg);
    let n_obs = a.n_rows();
    let n_attrs = a.n_attrs();

    let mut points = Vec::with_capacity(path.len());
    let mut state: Option<Solution> = None;
    for (idx, &rho) in path.iter().enumerate() {
        let sol = if rho >= rho_max {
            prob.null_solution()
        } else {
            match irls_cd(&prob, rho, state.clone(), cfg.tol, cfg.max_iter) {
                SolveOutcome::Converged(s) => s,
                SolveOutcome::Stalled { best, residual } => {
                    let (threshold, betas) = prob.to_raw(&best);
                    return Err(Error::NonConvergence(Box::new(NonConvergenceInfo {
                        node: j,
                        penalty: rho,
                        penalty_index: Some(idx),
                        residual,
                        threshold,
                        betas,
                    })));
                }
            }
        };
        let (threshold, betas) = prob.to_raw(&sol);
        let loglik = pseudo_loglik(a, j, threshold, &betas)?;
        let n_nei = betas.iter().filter(|b| **b != 0.0).count();
        let point_ebic = ebic(loglik, n_nei, n_obs, n_attrs, cfg.gamma);
        points.push(PathPoint { penalty: rho, threshold, betas, loglik, n_nei, ebic: point_ebic });
        state = Some(sol);
    }
    Ok(RegularizationPath { node: j, n_obs, n_attrs, gamma: cfg.gamma, points })
}

/// Fits the regularization path of every node. With the `parallel` feature
/// the nodes run on the rayon pool; results are identical either way.
pub fn fit_all_paths(a: &AttributeMatrix, cfg: &FitConfig) -> Result<Vec<RegularizationPath>> {
    #[cfg(feature = "parallel")]
    {
        let results: Vec<Result<RegularizationPath>> =
            (0..a.n_attrs()).into_par_iter().map(|j| fit_node_path(a, j, cfg)).collect();
        results.into_iter().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        fit_all_paths_seq(a, cfg)
    }
}

/// Sequential reference for [`fit_all_paths`].
pub fn fit_all_paths_seq(a: &AttributeMatrix, cfg: &FitConfig) -> Result<Vec<RegularizationPath>> {
    (0..a.n_attrs()).map(|j| fit_node_path(a, j, cfg)).collect()
}

/// Picks the path point minimizing EBIC at `gamma`; ties go to the larger
/// penalty (the sparser model).
pub fn select_fit(path: &RegularizationPath, gamma: f64) -> NodewiseFit {
    assert!(!path.points.is_empty(), "regularization path is empty");
    let mut best_idx = 0;
    let mut best_val =
        ebic(path.points[0].loglik, path.points[0].n_nei, path.n_obs, path.n_attrs, gamma);
    for (idx, point) in path.points.iter().enumerate().skip(1) {
        let val = ebic(point.loglik, point.n_nei, path.n_obs, path.n_attrs, gamma);
        if val < best_val {
            best_idx = idx;
            best_val = val;
        }
    }
    let point = &path.points[best_idx];
    NodewiseFit {
        node: path.node,
        threshold: point.threshold,
        betas: point.betas.clone(),
        penalty: point.penalty,
        ebic: best_val,
        n_nei: point.n_nei,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attr_io::parse_celeba_attributes;
    use approx::assert_relative_eq;

    fn toy_matrix() -> AttributeMatrix {
        // Two moderately associated columns plus an independent one.
        let text = b"8\nA B C\n\
            r0 1 1 -1\nr1 1 1 1\nr2 -1 -1 -1\nr3 -1 -1 1\n\
            r4 1 1 -1\nr5 -1 1 1\nr6 -1 -1 -1\nr7 1 -1 1\n";
        parse_celeba_attributes(text).unwrap()
    }

    #[test]
    fn loglik_null_model_is_n_log_two() {
        let a = toy_matrix();
        let l = pseudo_loglik(&a, 0, 0.0, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(l, -(8.0 * std::f64::consts::LN_2), epsilon = 1e-12);
    }

    #[test]
    fn loglik_closed_form_all_ones_column() {
        // Column 0 all ones, tau = ln 3 => l = N (ln 3 - ln 4).
        let a = parse_celeba_attributes(b"4\nA B\nr0 1 -1\nr1 1 1\nr2 1 -1\nr3 1 1\n").unwrap();
        let l = pseudo_loglik(&a, 0, 3.0f64.ln(), &[0.0]).unwrap();
        assert_relative_eq!(l, 4.0 * (3.0f64.ln() - 4.0f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn loglik_rejects_bad_params() {
        let a = toy_matrix();
        assert!(pseudo_loglik(&a, 0, 0.0, &[0.0]).is_err());
        assert!(pseudo_loglik(&a, 0, f64::NAN, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn conditional_prob_examples() {
        assert_relative_eq!(conditional_prob(0.0, &[], &[]).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            conditional_prob(3.0f64.ln(), &[], &[]).unwrap(),
            0.75,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            conditional_prob(0.0, &[2.0, -2.0], &[1, 1]).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let p = conditional_prob(1000.0, &[], &[]).unwrap();
        assert!(p < 1.0 && p > 0.0);
    }

    #[test]
    fn ebic_reduces_to_bic_and_matches_arithmetic() {
        assert_eq!(ebic(-12.5, 0, 100, 10, 3.0), 25.0);
        let bic = ebic(-50.0, 4, 200, 7, 0.0);
        assert_relative_eq!(bic, 100.0 + 4.0 * 200.0f64.ln(), epsilon = 1e-12);
        let e = ebic(-100.0, 3, 30000, 40, 6.4);
        assert_relative_eq!(
            e,
            200.0 + 3.0 * 30000.0f64.ln() + 2.0 * 6.4 * 3.0 * 39.0f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn penalty_path_shape() {
        let a = toy_matrix();
        let cfg = FitConfig { n_penalties: 2, min_ratio: 0.5, ..FitConfig::default() };
        let path = make_penalty_path(&a, 0, &cfg).unwrap();
        assert_eq!(path.len(), 2);
        assert_eq!(path[1], 0.5 * path[0]);

        let cfg = FitConfig { n_penalties: 25, ..FitConfig::default() };
        let path = make_penalty_path(&a, 1, &cfg).unwrap();
        let ratio = path[1] / path[0];
        for pair in path.windows(2) {
            assert!(pair[1] < pair[0]);
            assert_relative_eq!(pair[1] / pair[0], ratio, epsilon = 1e-12);
        }
        assert_relative_eq!(path[24] / path[0], 1e-4, epsilon = 1e-12);
    }

    #[test]
    fn null_model_at_rho_max() {
        let a = toy_matrix();
        let cfg = FitConfig::default();
        let path = make_penalty_path(&a, 0, &cfg).unwrap();
        let (tau, betas) = fit_l1_logistic(&a, 0, path[0], None, &cfg).unwrap();
        assert!(betas.iter().all(|&b| b == 0.0));
        let prevalence = a.ones_in_column(0) as f64 / a.n_rows() as f64;
        assert_eq!(tau, (prevalence / (1.0 - prevalence)).ln());
    }

    #[test]
    fn correlated_pair_gets_positive_coefficient() {
        // A and B agree on 45 of 50 records.
        let mut text = String::from("50\nA B\n");
        for i in 0..50 {
            let a = if i % 2 == 0 { 1 } else { -1 };
            let b = if i % 10 == 9 { -a } else { a };
            text.push_str(&format!("r{i} {a} {b}\n"));
        }
        let a = parse_celeba_attributes(text.as_bytes()).unwrap();
        let cfg = FitConfig::default();
        let (_, betas) = fit_l1_logistic(&a, 0, 0.05, None, &cfg).unwrap();
        assert!(betas[0] > 0.5, "expected strong positive coefficient, got {}", betas[0]);
    }

    #[test]
    fn fit_rejects_constant_columns_and_bad_penalties() {
        let a = parse_celeba_attributes(b"3\nA B\nr0 1 1\nr1 1 -1\nr2 1 1\n").unwrap();
        assert!(matches!(
            fit_l1_logistic(&a, 1, 0.1, None, &FitConfig::default()),
            Err(Error::ConstantColumn { index: 0, .. })
        ));
        let b = toy_matrix();
        assert!(fit_l1_logistic(&b, 0, 0.0, None, &FitConfig::default()).is_err());
        assert!(fit_l1_logistic(&b, 0, -1.0, None, &FitConfig::default()).is_err());
    }

    #[test]
    fn path_starts_null_and_is_internally_consistent() {
        let a = toy_matrix();
        let cfg = FitConfig { n_penalties: 20, gamma: 0.5, ..FitConfig::default() };
        let path = fit_node_path(&a, 2, &cfg).unwrap();
        assert_eq!(path.points[0].n_nei, 0);
        assert!(path.points[0].betas.iter().all(|&b| b == 0.0));
        for point in &path.points {
            let recomputed = pseudo_loglik(&a, 2, point.threshold, &point.betas).unwrap();
            assert_eq!(recomputed, point.loglik);
            let e = ebic(point.loglik, point.n_nei, path.n_obs, path.n_attrs, cfg.gamma);
            assert_eq!(e, point.ebic);
            assert_eq!(point.n_nei, point.betas.iter().filter(|b| **b != 0.0).count());
        }
    }

    #[test]
    fn select_fit_tie_breaks_to_larger_penalty() {
        let point = |penalty: f64, loglik: f64, n_nei: usize| PathPoint {
            penalty,
            threshold: 0.0,
            betas: vec![0.0; 2],
            loglik,
            n_nei,
            ebic: 0.0,
        };
        let path = RegularizationPath {
            node: 0,
            n_obs: 10,
            n_attrs: 3,
            gamma: 0.0,
            points: vec![point(1.0, -5.0, 0), point(0.5, -5.0, 0), point(0.25, -6.0, 0)],
        };
        let fit = select_fit(&path, 0.0);
        assert_eq!(fit.penalty, 1.0);

        let single = RegularizationPath {
            node: 1,
            n_obs: 10,
            n_attrs: 3,
            gamma: 0.0,
            points: vec![point(2.0, -4.0, 0)],
        };
        assert_eq!(select_fit(&single, 3.0).penalty, 2.0);
    }

    #[test]
    fn identical_inputs_give_bit_identical_fits() {
        let a = toy_matrix();
        let cfg = FitConfig { n_penalties: 15, ..FitConfig::default() };
        let p1 = fit_node_path(&a, 0, &cfg).unwrap();
        let p2 = fit_node_path(&a, 0, &cfg).unwrap();
        assert_eq!(p1, p2);
        let all = fit_all_paths(&a, &cfg).unwrap();
        let seq = fit_all_paths_seq(&a, &cfg).unwrap();
        assert_eq!(all, seq);
    }
}
