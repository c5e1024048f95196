use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::Resolved;

/// Formats `x` like C's `%.6g`: six significant digits, trailing zeros
/// removed, scientific notation for exponents below −4 or above 5.
pub fn g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV table with a fixed header.
pub struct Csv {
    columns: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            columns: header.len(),
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "CSV row width must match the header");
        debug_assert!(fields.iter().all(|f| !f.contains(',') && !f.contains('\n')));
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// `<out>/<subcommand>/<name>`, holding `resolved-config`, `results.csv` and
/// `trajectories/`.
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(config: &mut Resolved) -> Result<Self> {
        if config.raw("name").is_empty() {
            let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
            config.set("name", stamp);
        }
        let root = Path::new(config.raw("out"))
            .join(&config.subcommand)
            .join(config.raw("name"));
        fs::create_dir_all(root.join("trajectories"))
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        let dir = Self { root };
        dir.write("resolved-config", &config.render())?;
        Ok(dir)
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write(&self, relative: &str, contents: &str) -> Result<()> {
        let path = self.root.join(relative);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn results(&self, table: Csv) -> Result<()> {
        self.write("results.csv", &table.into_string())
    }

    /// Writes `trajectories/<name>.csv` with columns `header` from
    /// `(step, value)` pairs.
    pub fn trajectory(&self, name: &str, header: [&str; 2], points: impl IntoIterator<Item = (u64, f64)>) -> Result<()> {
        let mut csv = Csv::new(&header);
        for (step, value) in points {
            csv.row(&[step.to_string(), g6(value)]);
        }
        self.write(&format!("trajectories/{name}.csv"), &csv.into_string())
    }
}
