//! Output directory handling and versioned JSON documents.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Serialize)]
struct Document<'a, T> {
    schema_version: &'static str,
    kind: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Writes into one directory and remembers every file name it produced.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn record(&mut self, name: &str) {
        if !self.written.iter().any(|n| n == name) {
            self.written.push(name.to_string());
        }
    }

    pub fn files(&self) -> Vec<String> {
        let mut f = self.written.clone();
        f.sort();
        f
    }

    /// `body` must serialize to a JSON object; its fields sit beside
    /// `schema_version` and `kind`.
    pub fn json<T: Serialize>(&mut self, name: &str, kind: &str, body: &T) -> Result<()> {
        let doc = Document { schema_version: SCHEMA_VERSION, kind, body };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.text(name, &text)
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
        self.record(name);
        Ok(())
    }

    /// Opens a buffered file for a streaming writer.
    pub fn writer(&mut self, name: &str) -> Result<BufWriter<fs::File>> {
        let p = self.path(name);
        let f = fs::File::create(&p).with_context(|| format!("writing {}", p.display()))?;
        self.record(name);
        Ok(BufWriter::new(f))
    }
}

/// File-name-safe form of a match id.
pub fn slug(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}
