//! Staged outputs. Nothing is written until every input has been read and
//! validated; then each output gets a manifest beside it.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gedkit_core::pipeline::RunManifest;
use serde::Serialize;

pub struct Outputs {
    manifest: RunManifest,
    inputs: Vec<PathBuf>,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn new(subcommand: &str, settings: &impl Serialize) -> Self {
        let config = serde_json::to_value(settings).expect("settings serialize");
        Outputs { manifest: RunManifest::new(subcommand, config), inputs: Vec::new(), files: Vec::new() }
    }

    pub fn input(&mut self, path: &Path) -> &mut Self {
        self.inputs.push(path.to_path_buf());
        self
    }

    pub fn file(&mut self, path: &Path, bytes: impl Into<Vec<u8>>) -> &mut Self {
        self.files.push((path.to_path_buf(), bytes.into()));
        self
    }

    pub fn counter(&mut self, name: &str, value: usize) -> &mut Self {
        self.manifest.counter(name, value as u64);
        self
    }

    pub fn warn(&mut self, message: String) -> &mut Self {
        eprintln!("warning: {message}");
        self.manifest.warnings.push(message);
        self
    }

    /// Refuses to overwrite an input, then writes every staged file and its manifest.
    pub fn commit(mut self) -> Result<()> {
        for (out, _) in &self.files {
            if self.inputs.iter().any(|i| same_file(i, out)) {
                bail!("output {} would overwrite an input", out.display());
            }
        }
        for pair in self.files.iter().enumerate().flat_map(|(i, a)| self.files[i + 1..].iter().map(move |b| (a, b))) {
            if same_file(&pair.0 .0, &pair.1 .0) {
                bail!("output {} given twice", pair.0 .0.display());
            }
        }
        for input in &self.inputs {
            self.manifest.input(input)?;
        }
        for (path, bytes) in &self.files {
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
            self.manifest.output(path)?;
        }
        for (path, _) in &self.files {
            self.manifest.write_beside(path)?;
        }
        Ok(())
    }
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}
