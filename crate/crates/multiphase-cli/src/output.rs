//! CSV/JSON sinks. All numeric cells are written with 17 significant digits
//! so the files round-trip exactly; writes land on stdout when the path
//! is "-".

use anyhow::{Context, Result};
use std::io::Write;

pub struct Sink {
    writer: Box<dyn Write>,
    label: String,
}

impl Sink {
    pub fn create(path: &str) -> Result<Self> {
        let writer: Box<dyn Write> = if path == "-" {
            Box::new(std::io::stdout().lock())
        } else {
            Box::new(
                std::fs::File::create(path)
                    .with_context(|| format!("cannot create output file {path:?}"))?,
            )
        };
        Ok(Self {
            writer,
            label: path.to_string(),
        })
    }

    pub fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.writer, "{text}").with_context(|| format!("writing to {}", self.label))
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer
            .flush()
            .with_context(|| format!("flushing {}", self.label))
    }
}

/// Full round-trip float formatting (17 significant digits).
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}
