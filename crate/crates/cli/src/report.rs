//! Plain-text run reports ending in a fenced `key = value` block.

use std::fmt::Write as _;

/// Six significant digits for prose.
pub fn prose(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let v: f64 = format!("{v:.5e}").parse().expect("formatted float");
    let mag = v.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

/// Seventeen significant digits, enough to round-trip.
pub fn exact(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Default)]
pub struct Report {
    command: String,
    echo: Vec<(String, String)>,
    lines: Vec<String>,
    warnings: Vec<String>,
    machine: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            ..Report::default()
        }
    }

    pub fn echo(&mut self, label: &str, json: String) {
        self.echo.push((label.to_string(), json));
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn warn(&mut self, text: impl Into<String>) {
        let text = text.into();
        if !self.warnings.contains(&text) {
            self.warnings.push(text);
        }
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn key(&mut self, key: impl Into<String>, value: impl ToString) {
        self.machine.push((key.into(), value.to_string()));
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) {
        self.key(key, exact(value));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "minkruled {} {}",
            env!("CARGO_PKG_VERSION"),
            self.command
        );
        for (label, json) in &self.echo {
            let _ = writeln!(out, "\n{label}:\n{json}");
        }
        if !self.lines.is_empty() {
            out.push('\n');
            for l in &self.lines {
                let _ = writeln!(out, "{l}");
            }
        }
        if !self.warnings.is_empty() {
            out.push('\n');
            for w in &self.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
        }
        out.push_str("\n```report\n");
        for (k, v) in &self.machine {
            let _ = writeln!(out, "{k} = {v}");
        }
        for (i, w) in self.warnings.iter().enumerate() {
            let _ = writeln!(out, "warning.{i} = {w}");
        }
        out.push_str("```\n");
        out
    }
}

/// Parses the machine block of a rendered report.
#[cfg(test)]
pub fn machine_block(text: &str) -> Vec<(String, String)> {
    let Some(start) = text.find("```report\n") else {
        return Vec::new();
    };
    text[start + 10..]
        .lines()
        .take_while(|l| *l != "```")
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
