//! Attribute and latent matrix I/O.
//!
//! Two on-disk formats are bit-exact contracts:
//!
//! * the CelebA attribute-list text format: a line with the record count N,
//!   a line with M attribute names, then N rows of `record_id` followed by
//!   M tokens in {-1, 1};
//! * the `LATM` raw-binary latent format: a 16-byte header (magic `LATM`,
//!   u32-le rows, u32-le cols, 4 reserved zero bytes) followed by
//!   rows x cols little-endian f32 values in row-major order.
//!
//! Latent matrices are also readable/writable as plain CSV with `.` decimal
//! separator; an optional header row is detected by a non-numeric first token.

use crate::error::{Error, Result};

/// N x M binary attribute matrix with named columns and per-row record ids.
///
/// Cells are stored as 0/1 bytes in row-major order. Constant columns are
/// accepted here and flagged by [`column_stats`]; fitting rejects them.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeMatrix {
    names: Vec<String>,
    row_ids: Vec<String>,
    data: Vec<u8>,
}

impl AttributeMatrix {
    pub fn new(names: Vec<String>, row_ids: Vec<String>, data: Vec<u8>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidInput("attribute list is empty".into()));
        }
        if row_ids.is_empty() {
            return Err(Error::InvalidInput("record list is empty".into()));
        }
        for (idx, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidInput(format!("attribute {idx} has an empty name")));
            }
            if names[..idx].contains(name) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        if data.len() != names.len() * row_ids.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} x {} = {} cells, got {}",
                row_ids.len(),
                names.len(),
                row_ids.len() * names.len(),
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidInput(format!("cell value {bad} is not 0 or 1")));
        }
        Ok(Self { names, row_ids, data })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_attrs(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.names.len() + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        let m = self.names.len();
        &self.data[row * m..(row + 1) * m]
    }

    /// Iterator over one column, top to bottom.
    pub fn column(&self, col: usize) -> impl Iterator<Item = u8> + '_ {
        let m = self.names.len();
        self.data[col..].iter().step_by(m).copied()
    }

    pub fn ones_in_column(&self, col: usize) -> usize {
        self.column(col).map(usize::from).sum()
    }

    pub fn is_constant_column(&self, col: usize) -> bool {
        let ones = self.ones_in_column(col);
        ones == 0 || ones == self.n_rows()
    }

    /// Indices of columns that are all zeros or all ones.
    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.n_attrs()).filter(|&j| self.is_constant_column(j)).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// N x D real latent matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LatentMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!("latent matrix shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {rows} x {cols} = {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite latent value at flat index {pos}"
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.cols
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// On-disk encoding of a latent matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatentFormat {
    Csv,
    RawBinary,
}

const LATM_MAGIC: &[u8; 4] = b"LATM";

/// Parses the CelebA attribute-list format, mapping -1 to 0 and 1 to 1.
///
/// Row and column order of the file is preserved.
pub fn parse_celeba_attributes(source: &[u8]) -> Result<AttributeMatrix> {
    let text = std::str::from_utf8(source)
        .map_err(|e| Error::Parse { line: 0, message: format!("input is not UTF-8: {e}") })?;
    let mut lines = text.lines().enumerate();

    let (_, count_line) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, message: "empty input".into() })?;
    let declared_n: usize = count_line.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        message: format!("expected record count, got {:?}", count_line.trim()),
    })?;
    if declared_n == 0 {
        return Err(Error::Parse { line: 1, message: "record count must be at least 1".into() });
    }

    let (_, names_line) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 2, message: "missing attribute-name line".into() })?;
    let names: Vec<String> = names_line.split_whitespace().map(str::to_owned).collect();
    if names.len() < 2 {
        return Err(Error::Parse {
            line: 2,
            message: format!("need at least 2 attribute names, got {}", names.len()),
        });
    }
    for (idx, name) in names.iter().enumerate() {
        if names[..idx].contains(name) {
            return Err(Error::DuplicateName(name.clone()));
        }
    }
    let m = names.len();

    let mut row_ids = Vec::with_capacity(declared_n);
    let mut data = Vec::with_capacity(declared_n * m);
    for (line_idx, line) in &mut lines {
        let line_no = line_idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if row_ids.len() == declared_n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than the declared {declared_n} records"),
            });
        }
        let mut tokens = line.split_whitespace();
        let id = tokens.next().expect("non-empty line has a first token");
        let mut cells = 0usize;
        for tok in tokens {
            let value = match tok {
                "1" => 1u8,
                "-1" => 0u8,
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("attribute token {other:?} is not -1 or 1"),
                    })
                }
            };
            data.push(value);
            cells += 1;
        }
        if cells != m {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {m} attribute tokens, got {cells}"),
            });
        }
        row_ids.push(id.to_owned());
    }
    if row_ids.len() != declared_n {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("declared {declared_n} records, found {}", row_ids.len()),
        });
    }
    AttributeMatrix::new(names, row_ids, data)
}

/// Serializes back to the CelebA text format (0 maps to -1).
pub fn write_celeba_attributes(a: &AttributeMatrix) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(&a.n_rows().to_string());
    out.push('\n');
    out.push_str(&a.names().join(" "));
    out.push('\n');
    for i in 0..a.n_rows() {
        out.push_str(&a.row_ids()[i]);
        for &v in a.row(i) {
            out.push(' ');
            out.push_str(if v == 1 { "1" } else { "-1" });
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// Per-attribute prevalence summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub name: String,
    pub ones: usize,
    pub zeros: usize,
    pub prevalence: f64,
    /// All zeros or all ones; such columns cannot be fitted.
    pub constant: bool,
}

pub fn column_stats(a: &AttributeMatrix) -> Vec<ColumnStats> {
    let n = a.n_rows();
    (0..a.n_attrs())
        .map(|j| {
            let ones = a.ones_in_column(j);
            ColumnStats {
                name: a.names()[j].clone(),
                ones,
                zeros: n - ones,
                prevalence: ones as f64 / n as f64,
                constant: ones == 0 || ones == n,
            }
        })
        .collect()
}

pub fn parse_latents(source: &[u8], format: LatentFormat) -> Result<LatentMatrix> {
    match format {
        LatentFormat::Csv => parse_latents_csv(source),
        LatentFormat::RawBinary => parse_latents_binary(source),
    }
}

pub fn write_latents(matrix: &LatentMatrix, format: LatentFormat) -> Vec<u8> {
    match format {
        LatentFormat::Csv => write_latents_csv(matrix),
        LatentFormat::RawBinary => write_latents_binary(matrix),
    }
}

/// True when the buffer starts with the LATM magic.
pub fn looks_like_latm(source: &[u8]) -> bool {
    source.len() >= 4 && &source[..4] == LATM_MAGIC
}

fn parse_latents_csv(source: &[u8]) -> Result<LatentMatrix> {
    let text = std::str::from_utf8(source)
        .map_err(|e| Error::Parse { line: 0, message: format!("input is not UTF-8: {e}") })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut header_allowed = true;
    for (line_idx, line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
        if header_allowed {
            header_allowed = false;
            // Optional header row: first token not numeric.
            if tokens[0].parse::<f64>().is_err() {
                continue;
            }
        }
        let mut row = Vec::with_capacity(tokens.len());
        for tok in tokens {
            let value: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("{tok:?} is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite value {tok:?} at line {line_no}"
                )));
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {} columns, got {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, message: "no data rows".into() });
    }
    let cols = rows[0].len();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    LatentMatrix::new(data.len() / cols, cols, data)
}

fn write_latents_csv(matrix: &LatentMatrix) -> Vec<u8> {
    let mut out = String::new();
    for i in 0..matrix.n_rows() {
        let row = matrix.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out.into_bytes()
}

fn parse_latents_binary(source: &[u8]) -> Result<LatentMatrix> {
    if source.len() < 16 {
        return Err(Error::Format(format!("header needs 16 bytes, got {}", source.len())));
    }
    if &source[..4] != LATM_MAGIC {
        return Err(Error::Format(format!("bad magic {:?}, expected \"LATM\"", &source[..4])));
    }
    let rows = u32::from_le_bytes(source[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(source[8..12].try_into().unwrap()) as usize;
    if source[12..16] != [0, 0, 0, 0] {
        return Err(Error::Format("reserved header bytes must be zero".into()));
    }
    let expected = (rows as u64) * (cols as u64) * 4;
    let payload = &source[16..];
    if (payload.len() as u64) < expected {
        return Err(Error::Format(format!(
            "truncated payload: expected {expected} bytes for {rows}x{cols}, got {}",
            payload.len()
        )));
    }
    if (payload.len() as u64) > expected {
        return Err(Error::Format(format!(
            "trailing bytes: expected {expected} payload bytes for {rows}x{cols}, got {}",
            payload.len()
        )));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for chunk in payload.chunks_exact(4) {
        let value = f32::from_le_bytes(chunk.try_into().unwrap());
        if !value.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite latent value at flat index {}",
                data.len()
            )));
        }
        data.push(f64::from(value));
    }
    LatentMatrix::new(rows, cols, data)
}

fn write_latents_binary(matrix: &LatentMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + matrix.values().len() * 4);
    out.extend_from_slice(LATM_MAGIC);
    out.extend_from_slice(&(matrix.n_rows() as u32).to_le_bytes());
    out.extend_from_slice(&(matrix.dim() as u32).to_le_bytes());
    out.extend_from_slice(&[0, 0, 0, 0]);
    for &v in matrix.values() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}
