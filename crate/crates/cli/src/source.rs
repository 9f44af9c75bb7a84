use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use relmon_core::lattice::{build_downsets, builtin, parse_poset, Lattice};

/// Where a lattice comes from.
#[derive(Debug, Clone)]
pub enum LatticeSource {
    Builtin(String),
    Table(PathBuf),
    Poset(PathBuf),
}

impl LatticeSource {
    pub fn from_flags(
        name: Option<&str>,
        table: Option<&Path>,
        poset: Option<&Path>,
    ) -> Option<Self> {
        match (name, table, poset) {
            (Some(name), None, None) => Some(LatticeSource::Builtin(name.to_string())),
            (None, Some(path), None) => Some(LatticeSource::Table(path.to_path_buf())),
            (None, None, Some(path)) => Some(LatticeSource::Poset(path.to_path_buf())),
            _ => None,
        }
    }

    /// Name used in output documents.
    pub fn label(&self) -> String {
        match self {
            LatticeSource::Builtin(name) => name.clone(),
            LatticeSource::Table(path) => format!("file:{}", file_name(path)),
            LatticeSource::Poset(path) => format!("downsets:{}", file_name(path)),
        }
    }

    pub fn load(&self) -> Result<Lattice> {
        match self {
            LatticeSource::Builtin(name) => Ok(builtin(name)?),
            LatticeSource::Table(path) => {
                let text = read(path)?;
                Lattice::parse(&text).with_context(|| format!("lattice file {}", path.display()))
            }
            LatticeSource::Poset(path) => {
                let text = read(path)?;
                let (k, edges) = parse_poset(&text)?;
                build_downsets(k, &edges).with_context(|| format!("poset file {}", path.display()))
            }
        }
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
