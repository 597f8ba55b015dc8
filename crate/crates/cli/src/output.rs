//! Deterministic CSV emission: version/config-hash header, resolved-config
//! echo, shortest round-trip float formatting, LF endings.

use crate::config::RunConfig;
use anyhow::{Context, Result};
use std::fmt::Write as _;
use std::path::Path;

pub struct CsvDoc {
    buf: String,
}

impl CsvDoc {
    pub fn new(cfg: &RunConfig, columns: &str, timestamp: Option<String>) -> Self {
        let mut buf = String::new();
        let version = env!("CARGO_PKG_VERSION");
        let _ = writeln!(buf, "# resonance-box v{version} config-hash={}", cfg.hash());
        if let Some(ts) = timestamp {
            let _ = writeln!(buf, "# generated-at {ts}");
        }
        for line in cfg.to_canonical_string().lines() {
            if !line.is_empty() {
                let _ = writeln!(buf, "# cfg {line}");
            }
        }
        let _ = writeln!(buf, "{columns}");
        CsvDoc { buf }
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.buf, "# {text}");
    }

    pub fn row(&mut self, fields: &[Field]) {
        let cells: Vec<String> = fields.iter().map(Field::render).collect();
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn write_to(&self, dir: &Path, name: &str) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let path = dir.join(name);
        std::fs::write(&path, self.buf.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

pub enum Field {
    F(f64),
    U(usize),
    S(&'static str),
    Opt(Option<f64>),
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::F(x) => format!("{x}"),
            Field::U(u) => format!("{u}"),
            Field::S(s) => s.to_string(),
            Field::Opt(Some(x)) => format!("{x}"),
            Field::Opt(None) => String::new(),
        }
    }
}
