//! JSON file formats: `.dm.json` density matrices and unitary files.
//!
//! Complex matrices are nested rows of `[re, im]` pairs.

use std::fs;
use std::io::Write;
use std::path::Path;

use absep_core::states::DensityMatrix;
use absep_core::unitaries::GlobalUnitary;
use absep_core::CMatrix;
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// On-disk density matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub matrix: CMatrix,
}

/// On-disk unitary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitaryFile {
    #[serde(default)]
    pub label: Option<String>,
    pub matrix: CMatrix,
}

/// Reads and validates a state. The id is the file's label, or its name
/// without the `.dm.json` suffix.
pub fn read_state(path: &Path) -> Result<(String, DensityMatrix)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: StateFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let state = DensityMatrix::validate(file.matrix, file.dim_a, file.dim_b)
        .with_context(|| format!("validating {}", path.display()))?;
    let id = file.label.unwrap_or_else(|| state_id_from_path(path));
    Ok((id, state))
}

fn state_id_from_path(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix(".dm.json").or_else(|| name.strip_suffix(".json")).unwrap_or(&name).to_string()
}

pub fn state_file(state: &DensityMatrix, label: Option<String>) -> StateFile {
    StateFile { dim_a: state.dim_a(), dim_b: state.dim_b(), label, matrix: state.matrix().clone() }
}

pub fn read_unitary(path: &Path) -> Result<GlobalUnitary> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: UnitaryFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let label = file.label.unwrap_or_else(|| path.display().to_string());
    Ok(GlobalUnitary::new(file.matrix, label)?)
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON with a trailing newline, to `out` or stdout.
pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(&text, out)
}

pub fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
