//! Documents, rendering and atomic output.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use schurkit::linalg::{CMatrix, C64};
use schurkit::DenseOperator;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Dense complex matrix on the wire: row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl MatrixDocument {
    pub fn from_operator(op: &DenseOperator) -> Self {
        let (rows, cols) = op.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let z = op.matrix[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        MatrixDocument { rows, cols, data, row_labels: op.row_labels.clone(), col_labels: op.col_labels.clone() }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.data.len() != self.rows * self.cols {
            return Err(CliError::Input(format!(
                "{} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        if self.row_labels.len() != self.rows || self.col_labels.len() != self.cols {
            return Err(CliError::Input("label counts do not match the matrix shape".into()));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Result<CMatrix, CliError> {
        self.validate()?;
        Ok(CMatrix::from_fn(self.rows, self.cols, |r, c| {
            let [re, im] = self.data[r * self.cols + c];
            C64::new(re, im)
        }))
    }

    /// Nonzero entries as `row, col, row_label, col_label, re, im`.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["row", "col", "row_label", "col_label", "re", "im"]);
        for (k, &[re, im]) in self.data.iter().enumerate() {
            if re == 0.0 && im == 0.0 {
                continue;
            }
            let (r, c) = (k / self.cols, k % self.cols);
            t.push(vec![
                r.to_string(),
                c.to_string(),
                self.row_labels[r].clone(),
                self.col_labels[c].clone(),
                num(re),
                num(im),
            ]);
        }
        t
    }
}

pub fn read_matrix(path: &Path) -> Result<MatrixDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let doc: MatrixDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    doc.validate()?;
    Ok(doc)
}

/// Reads a `MatrixDocument` holding a single column.
pub fn read_column(path: &Path) -> Result<Vec<C64>, CliError> {
    let doc = read_matrix(path)?;
    if doc.cols != 1 {
        return Err(CliError::Input(format!("{}: expected a column vector, got {} columns", path.display(), doc.cols)));
    }
    Ok(doc.data.iter().map(|&[re, im]| C64::new(re, im)).collect())
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Command result: a JSON document, its tabular view, and whether a
/// checked bound or identity failed.
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub violated: bool,
}

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&report.json).map_err(|e| CliError::Output(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.table.header).map_err(|e| CliError::Output(e.to_string()))?;
            for row in &report.table.rows {
                w.write_record(row).map_err(|e| CliError::Output(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Text => {
            let t = &report.table;
            let mut width: Vec<usize> = t.header.iter().map(|h| h.chars().count()).collect();
            for row in &t.rows {
                for (w, cell) in width.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let mut out = String::new();
            for row in std::iter::once(&t.header).chain(&t.rows) {
                let cells: Vec<String> = row.iter().zip(&width).map(|(c, &w)| format!("{c:<w$}")).collect();
                out.push_str(cells.join("  ").trim_end());
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
    }
}

/// Writes to `path` through a temporary file in the same directory, or to
/// stdout when no path is given.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Output(e.to_string())),
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
            tmp.write_all(bytes).map_err(|e| CliError::Output(e.to_string()))?;
            tmp.persist(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_document_round_trip() {
        let m = CMatrix::from_fn(2, 3, |r, c| C64::new(r as f64, c as f64));
        let doc = MatrixDocument::from_operator(&DenseOperator::unlabeled(m.clone()));
        let back: MatrixDocument = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
        assert_eq!(doc.data[1], [0.0, 1.0]);
    }

    #[test]
    fn malformed_document_is_rejected() {
        let doc = MatrixDocument {
            rows: 2,
            cols: 1,
            data: vec![[1.0, 0.0]],
            row_labels: vec!["0".into(), "1".into()],
            col_labels: vec!["0".into()],
        };
        assert!(doc.to_matrix().is_err());
    }

    #[test]
    fn text_columns_are_aligned() {
        let mut t = Table::new(&["a", "long"]);
        t.push(vec!["xyz".into(), "1".into()]);
        let r = Report { json: Value::Null, table: t, violated: false };
        let s = String::from_utf8(render(&r, Format::Text).unwrap()).unwrap();
        assert_eq!(s, "a    long\nxyz  1\n");
    }
}
