//! Latent manipulation vectors and their Markov-blanket correction.
//!
//! For attribute i, the manipulation vector is the difference between the
//! mean latent embedding of records with the attribute and the mean of
//! records without it. The corrected vector subtracts the mu-weighted,
//! edge-weighted vectors of the attribute's Markov blanket in the Ising
//! graph:
//!
//! ```text
//! z_i_mb = z_i - mu * sum_{k in N_i} w_ik z_k
//! ```
//!
//! Applying an edit list walks the attributes in ascending index order and,
//! in Markov-blanket mode, each attribute's neighbors in ascending order, so
//! results are bit-reproducible.

use crate::attr_io::{AttributeMatrix, LatentMatrix};
use crate::error::{Error, Result};
use crate::graph::IsingGraph;
use crate::stats;

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Per-attribute latent manipulation vectors (M x D), optionally with their
/// Markov-blanket corrected counterparts.
#[derive(Debug, Clone, PartialEq)]
pub struct ManipulationVectors {
    names: Vec<String>,
    dim: usize,
    vectors: Vec<f64>,
    corrected: Option<Vec<f64>>,
    mu: Option<f64>,
}

impl ManipulationVectors {
    pub fn new(names: Vec<String>, dim: usize, vectors: Vec<f64>) -> Result<Self> {
        if names.is_empty() || dim == 0 {
            return Err(Error::InvalidInput("empty manipulation vector set".into()));
        }
        if vectors.len() != names.len() * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} x {dim} = {} values, got {}",
                names.len(),
                names.len() * dim,
                vectors.len()
            )));
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite manipulation vector entry".into()));
        }
        Ok(Self { names, dim, vectors, corrected: None, mu: None })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_attrs(&self) -> usize {
        self.names.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Uncorrected vector of attribute `i`.
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors_flat(&self) -> &[f64] {
        &self.vectors
    }

    pub fn corrected(&self, i: usize) -> Option<&[f64]> {
        self.corrected.as_ref().map(|c| &c[i * self.dim..(i + 1) * self.dim])
    }

    pub fn corrected_flat(&self) -> Option<&[f64]> {
        self.corrected.as_deref()
    }

    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// As a latent matrix (one row per attribute), for LATM/CSV persistence.
    pub fn to_latent_matrix(&self) -> LatentMatrix {
        LatentMatrix::new(self.n_attrs(), self.dim, self.vectors.clone())
            .expect("vectors are a valid matrix")
    }

    pub fn corrected_to_latent_matrix(&self) -> Option<LatentMatrix> {
        self.corrected.as_ref().map(|c| {
            LatentMatrix::new(self.n_attrs(), self.dim, c.clone())
                .expect("corrected vectors are a valid matrix")
        })
    }
}

fn check_alignment(vector_names: &[String], graph: &IsingGraph) -> Result<()> {
    if vector_names != graph.names() {
        return Err(Error::NameMismatch(format!(
            "vectors have {} attributes, graph has {} and the name lists differ",
            vector_names.len(),
            graph.n_nodes()
        )));
    }
    Ok(())
}

/// Group-mean difference per attribute: mean latent of rows with the
/// attribute minus mean latent of rows without it.
pub fn compute_manip_vectors(
    latents: &LatentMatrix,
    a: &AttributeMatrix,
) -> Result<ManipulationVectors> {
    if latents.n_rows() != a.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} latent rows vs {} attribute rows",
            latents.n_rows(),
            a.n_rows()
        )));
    }
    let d = latents.dim();
    let m = a.n_attrs();
    for j in 0..m {
        if a.is_constant_column(j) {
            return Err(Error::ConstantColumn { index: j, name: a.names()[j].clone() });
        }
    }
    let one_attr = |i: usize| -> Vec<f64> {
        let mut with = vec![0.0; d];
        let mut without = vec![0.0; d];
        let mut n_with = 0usize;
        for (t, v) in a.column(i).enumerate() {
            let row = latents.row(t);
            if v == 1 {
                n_with += 1;
                for (acc, x) in with.iter_mut().zip(row) {
                    *acc += x;
                }
            } else {
                for (acc, x) in without.iter_mut().zip(row) {
                    *acc += x;
                }
            }
        }
        let n_without = a.n_rows() - n_with;
        with.iter()
            .zip(&without)
            .map(|(w, wo)| w / n_with as f64 - wo / n_without as f64)
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = (0..m).into_par_iter().map(one_attr).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..m).map(one_attr).collect();
    let vectors: Vec<f64> = rows.into_iter().flatten().collect();
    ManipulationVectors::new(a.names().to_vec(), d, vectors)
}

/// Sequential reference for [`compute_manip_vectors`]; used by the benches.
pub fn compute_manip_vectors_seq(
    latents: &LatentMatrix,
    a: &AttributeMatrix,
) -> Result<ManipulationVectors> {
    if latents.n_rows() != a.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} latent rows vs {} attribute rows",
            latents.n_rows(),
            a.n_rows()
        )));
    }
    let d = latents.dim();
    let m = a.n_attrs();
    for j in 0..m {
        if a.is_constant_column(j) {
            return Err(Error::ConstantColumn { index: j, name: a.names()[j].clone() });
        }
    }
    let mut vectors = Vec::with_capacity(m * d);
    for i in 0..m {
        let mut with = vec![0.0; d];
        let mut without = vec![0.0; d];
        let mut n_with = 0usize;
        for (t, v) in a.column(i).enumerate() {
            let row = latents.row(t);
            if v == 1 {
                n_with += 1;
                for (acc, x) in with.iter_mut().zip(row) {
                    *acc += x;
                }
            } else {
                for (acc, x) in without.iter_mut().zip(row) {
                    *acc += x;
                }
            }
        }
        let n_without = a.n_rows() - n_with;
        for (w, wo) in with.iter().zip(&without) {
            vectors.push(w / n_with as f64 - wo / n_without as f64);
        }
    }
    ManipulationVectors::new(a.names().to_vec(), d, vectors)
}

/// Subtracts each attribute's mu-weighted, edge-weighted blanket:
/// `corrected_i = z_i - mu * sum_{k in N_i} w_ik z_k`. Neighbors are summed
/// in ascending index order.
pub fn mb_correct(
    vectors: &ManipulationVectors,
    graph: &IsingGraph,
    mu: f64,
) -> Result<ManipulationVectors> {
    check_alignment(vectors.names(), graph)?;
    if !mu.is_finite() {
        return Err(Error::InvalidInput(format!("mu must be finite, got {mu}")));
    }
    let d = vectors.dim();
    let m = vectors.n_attrs();
    let mut corrected = Vec::with_capacity(m * d);
    for i in 0..m {
        let mut row = vectors.vector(i).to_vec();
        for k in graph.neighbors(i) {
            let scale = mu * graph.weight(i, k);
            for (c, z) in row.iter_mut().zip(vectors.vector(k)) {
                *c -= scale * z;
            }
        }
        corrected.extend_from_slice(&row);
    }
    if corrected.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("correction produced a non-finite value".into()));
    }
    Ok(ManipulationVectors {
        names: vectors.names.clone(),
        dim: d,
        vectors: vectors.vectors.clone(),
        corrected: Some(corrected),
        mu: Some(mu),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManipulationMode {
    Naive,
    MarkovBlanket,
}

/// A latent point plus a list of (attribute, alpha) edits to apply to it.
#[derive(Debug, Clone, PartialEq)]
pub struct ManipulationRequest {
    pub latent: Vec<f64>,
    pub edits: Vec<(usize, f64)>,
    pub mode: ManipulationMode,
}

/// Applies the edit list to the latent point.
///
/// Naive mode adds `alpha_i * z_i` per edit; Markov-blanket mode additionally
/// subtracts `alpha_i * mu * w_ik * z_k` for every neighbor k of i. Edits are
/// processed in ascending attribute order regardless of input order.
pub fn apply_manipulation(
    req: &ManipulationRequest,
    vectors: &ManipulationVectors,
    graph: Option<&IsingGraph>,
    mu: f64,
) -> Result<Vec<f64>> {
    if req.latent.len() != vectors.dim() {
        return Err(Error::DimensionMismatch(format!(
            "latent has dimension {}, vectors have {}",
            req.latent.len(),
            vectors.dim()
        )));
    }
    if req.latent.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite latent entry".into()));
    }
    let graph = match req.mode {
        ManipulationMode::Naive => None,
        ManipulationMode::MarkovBlanket => {
            let g = graph.ok_or_else(|| {
                Error::InvalidConfig("markov-blanket mode needs an Ising graph".into())
            })?;
            check_alignment(vectors.names(), g)?;
            if !mu.is_finite() {
                return Err(Error::InvalidInput(format!("mu must be finite, got {mu}")));
            }
            Some(g)
        }
    };
    let mut edits = req.edits.clone();
    edits.sort_by_key(|&(i, _)| i);
    for pair in edits.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::InvalidInput(format!(
                "attribute {} appears twice in the edit list",
                pair[0].0
            )));
        }
    }
    let m = vectors.n_attrs();
    let mut out = req.latent.clone();
    for &(i, alpha) in &edits {
        if i >= m {
            return Err(Error::UnknownAttribute(format!("index {i} of {m}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite edit weight for attribute {i}")));
        }
        for (o, z) in out.iter_mut().zip(vectors.vector(i)) {
            *o += alpha * z;
        }
        if let Some(g) = graph {
            for k in g.neighbors(i) {
                let scale = -alpha * mu * g.weight(i, k);
                for (o, z) in out.iter_mut().zip(vectors.vector(k)) {
                    *o += scale * z;
                }
            }
        }
    }
    Ok(out)
}

/// One nonzero edge with the cosine distance of its endpoint vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCorrelation {
    pub i: usize,
    pub k: usize,
    pub weight: f64,
    pub cosine_distance: f64,
}

/// Edge weights vs. cosine distances, with the Pearson test over all edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub pairs: Vec<EdgeCorrelation>,
    pub pearson_r: f64,
    pub p_value: f64,
}

impl CorrelationReport {
    /// `i,k,weight,cosine_distance` rows plus a trailing summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,k,weight,cosine_distance\n");
        for p in &self.pairs {
            out.push_str(&format!("{},{},{},{}\n", p.i, p.k, p.weight, p.cosine_distance));
        }
        out.push_str(&format!("# pearson_r={} p_value={}\n", self.pearson_r, self.p_value));
        out
    }
}

/// For every nonzero edge (i, k): d_ik = 1 - cos(z_i, z_k), then the Pearson
/// correlation of weights against distances with its two-sided p-value.
pub fn weight_distance_correlation(
    vectors: &ManipulationVectors,
    graph: &IsingGraph,
) -> Result<CorrelationReport> {
    check_alignment(vectors.names(), graph)?;
    let edges = graph.edges();
    if edges.len() < 3 {
        return Err(Error::TooFewEdges { found: edges.len(), required: 3 });
    }
    let norms: Vec<f64> = (0..vectors.n_attrs())
        .map(|i| vectors.vector(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut pairs = Vec::with_capacity(edges.len());
    for (i, k, w) in edges {
        if norms[i] == 0.0 {
            return Err(Error::ZeroNormVector { index: i });
        }
        if norms[k] == 0.0 {
            return Err(Error::ZeroNormVector { index: k });
        }
        let dot: f64 =
            vectors.vector(i).iter().zip(vectors.vector(k)).map(|(a, b)| a * b).sum();
        let cosine_distance = 1.0 - dot / (norms[i] * norms[k]);
        pairs.push(EdgeCorrelation { i, k, weight: w, cosine_distance });
    }
    let ws: Vec<f64> = pairs.iter().map(|p| p.weight).collect();
    let ds: Vec<f64> = pairs.iter().map(|p| p.cosine_distance).collect();
    let pearson_r = stats::pearson(&ws, &ds)?;
    let p_value = stats::pearson_p_value(pearson_r, pairs.len())?;
    Ok(CorrelationReport { pairs, pearson_r, p_value })
}

/// Sidecar manifest persisted next to a manipulation-vector file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorManifest {
    pub names: Vec<String>,
    pub dim: usize,
    /// Correction strength, present when the file holds corrected vectors.
    pub mu: Option<f64>,
    /// SHA-256 hex digest of the source graph document, when one was used.
    pub graph_digest: Option<String>,
}

impl VectorManifest {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("vector manifest: {e}")))
    }
}
