use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::CliError;
use crate::field_grid::Grid;
use crate::solver::Snapshot;

/// Column order of every snapshot file.
pub const CSV_HEADER: &str = "t,i,j,k,x,y,z,u";

/// One row per cell, `i` fastest.
pub fn snapshot_csv(grid: &Grid, snap: &Snapshot) -> String {
    let mut out = String::with_capacity(64 * grid.num_cells());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (idx, [i, j, k]) in grid.cells() {
        let x = grid.center_of(idx);
        let _ = writeln!(out, "{},{i},{j},{k},{},{},{},{}", snap.t, x.x, x.y, x.z, snap.u.data[idx]);
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub command: String,
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    pub fn new(command: &str, err: &CliError) -> Self {
        Self { command: command.to_string(), kind: err.kind().to_string(), message: err.to_string() }
    }
}
