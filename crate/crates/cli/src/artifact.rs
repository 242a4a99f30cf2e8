//! Output files. Every artifact starts with the same provenance header and
//! contains nothing run-dependent beyond the config and seeds.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{NamedConstant, RunConfig};

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: String,
    pub seed: u64,
    pub precision: u32,
    pub constants: Vec<NamedConstant>,
}

impl Header {
    pub fn new(cfg: &RunConfig, mode: &str) -> Self {
        Header {
            tool: "schmidt",
            version: env!("CARGO_PKG_VERSION"),
            mode: mode.into(),
            seed: cfg.seed,
            precision: cfg.precision,
            constants: cfg.constants.clone(),
        }
    }
}

pub struct Writer {
    dir: PathBuf,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Writer { dir: dir.to_path_buf() })
    }

    /// `{"header": ..., key: body, ...}` as pretty JSON.
    pub fn json(&self, name: &str, header: &Header, body: Vec<(&str, Value)>) -> Result<PathBuf> {
        let mut obj = serde_json::Map::new();
        obj.insert("header".into(), json!(header));
        for (k, v) in body {
            obj.insert(k.into(), v);
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(obj))?;
        text.push('\n');
        self.write(name, &text)
    }

    /// CSV preceded by `# key: value` header lines.
    pub fn csv(&self, name: &str, header: &Header, body: &str) -> Result<PathBuf> {
        let mut text = String::new();
        text.push_str(&format!("# tool: {} {}\n", header.tool, header.version));
        text.push_str(&format!("# mode: {}\n# seed: {}\n# precision: {}\n", header.mode, header.seed, header.precision));
        for c in &header.constants {
            text.push_str(&format!("# constant {} = {} ({} bits): {}\n", c.field, c.name, c.precision, c.value));
        }
        text.push_str(body);
        self.write(name, &text)
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
