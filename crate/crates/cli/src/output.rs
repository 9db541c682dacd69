use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Nine significant digits; scientific below `1e-3` (and from `1e9` up).
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs();
    if !(1e-3..1e9).contains(&mag) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - mag.log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    /// `-` for standard output.
    pub output_path: String,
    pub format: String,
}

impl RunManifest {
    pub fn new(command: &str, params: &impl Serialize, out: Option<&Path>, format: &str) -> Result<Self, CliError> {
        let parameters = match serde_json::to_value(params)? {
            Value::Object(map) => map.into_iter().collect(),
            other => return Err(CliError::Io(format!("parameters must serialise to a map, got {other}"))),
        };
        Ok(Self {
            command: command.to_string(),
            parameters,
            output_path: out.map_or_else(|| "-".to_string(), |p| p.display().to_string()),
            format: format.to_string(),
        })
    }

    /// `<out>.manifest.json` next to a file output, standard error otherwise.
    pub fn write(&self) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)?;
        if self.output_path == "-" {
            eprintln!("{text}");
        } else {
            std::fs::write(manifest_path(Path::new(&self.output_path)), text + "\n")?;
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Command line that reproduces the run, with `out` as the output target.
    pub fn to_args(&self, out: Option<&Path>) -> Vec<String> {
        let mut args = vec!["chatter".to_string(), self.command.clone()];
        for (key, value) in &self.parameters {
            let text = match value {
                Value::Null | Value::Bool(false) => continue,
                Value::Bool(true) => {
                    args.push(format!("--{key}"));
                    continue;
                }
                Value::String(s) => s.clone(),
                Value::Array(items) => {
                    if items.is_empty() {
                        continue;
                    }
                    items.iter().map(scalar).collect::<Vec<_>>().join(",")
                }
                other => scalar(other),
            };
            args.push(format!("--{key}={text}"));
        }
        if let Some(out) = out {
            args.push(format!("--out={}", out.display()));
        }
        args
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
