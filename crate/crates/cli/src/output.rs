//! Artifact writing: atomic file creation and CSV assembly.
//!
//! Every float is printed with Rust's shortest round-trip formatting, so
//! identical runs produce byte-identical files and every value re-parses
//! exactly.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::CliError;

/// Writes `bytes` to `path` via a temp file in the same directory plus an
/// atomic rename; readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::runtime(format!("cannot create output directory {}: {e}", dir.display()))
    })?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::runtime(format!("cannot create temp file: {e}")))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::runtime(format!("cannot persist {}: {e}", path.display())))?;
    Ok(())
}

/// Incremental CSV buffer. Cells are plain (unquoted) numbers and labels,
/// which is all the trace formats need.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[String]) -> Self {
        let mut csv = Csv { buf: String::new(), columns: header.len() };
        csv.push_cells(header.iter().map(|h| h.to_string()));
        csv
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns, "ragged CSV row");
        self.push_cells(cells.into_iter());
    }

    fn push_cells(&mut self, cells: impl Iterator<Item = String>) {
        let mut first = true;
        for cell in cells {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(&cell);
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

/// Shortest round-trip decimal form; infinities print as `inf`/`-inf`.
pub fn cell_f64(x: f64) -> String {
    let mut s = String::new();
    write!(s, "{x}").expect("formatting to a string cannot fail");
    s
}

/// Numbered column labels `prefix_1 .. prefix_n` (1-based).
pub fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}_{i}")).collect()
}
