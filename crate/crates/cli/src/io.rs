use std::fs;
use std::path::Path;

use glpos::SquareMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `{"n": 2, "rows": [[1.0, 0.0], [1.0, 1.0]]}`
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &SquareMatrix) -> Self {
        Self {
            n: m.n(),
            rows: m.rows(),
        }
    }

    pub fn to_matrix(&self) -> Result<SquareMatrix, CliError> {
        if self.rows.len() != self.n || self.rows.iter().any(|r| r.len() != self.n) {
            return Err(CliError::Parse(format!(
                "matrix file declares n = {} but rows are not {0} x {0}",
                self.n
            )));
        }
        SquareMatrix::from_rows(&self.rows).map_err(|e| CliError::Parse(e.to_string()))
    }
}

pub fn read_matrix(path: &Path) -> Result<SquareMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let file: MatrixFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    file.to_matrix()
}

pub fn parse_nu(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Parse(format!("bad nu exponent {s:?}")))
        })
        .collect()
}

/// 17 significant digits, round-trip safe.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes CSV records either to a file or to stdout.
pub fn csv_writer(out: Option<&Path>) -> Result<csv::Writer<Box<dyn std::io::Write>>, CliError> {
    let sink: Box<dyn std::io::Write> = match out {
        Some(p) => Box::new(
            fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink))
}
