//! Plain `key = value` reports.

use std::fmt::Display;
use std::path::Path;

/// Four-decimal rendering used for every printed figure; `+∞` prints as `inf`.
pub fn fixed4(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.4}")
    }
}

/// Shortest round-trip rendering.
pub fn exact(v: f64) -> String {
    if v.is_infinite() {
        fixed4(v)
    } else {
        format!("{v:e}")
    }
}

#[derive(Default)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn put(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.lines.push(format!("{key} = {value}"));
        self
    }

    pub fn render(&self) -> String {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }

    pub fn save(&self, path: &Path) -> jigi::Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}
