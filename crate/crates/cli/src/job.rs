use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::commands::Command;

pub const MANIFEST_VERSION: u32 = 1;

/// A job file: one command with its inputs and parameters.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: String,
    /// Input files, keyed by the parameter they fill.
    #[serde(default)]
    pub inputs: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub params: Map<String, Value>,
    /// Job directory, relative to the job file.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl JobSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing job {}", path.display()))
    }

    /// Resolves the command, with input paths taken relative to `base`.
    pub fn resolve(&self, base: &Path) -> Result<Command> {
        let mut fields = self.params.clone();
        for (key, path) in &self.inputs {
            if fields.contains_key(key) {
                bail!("`{key}` given both as an input and as a parameter");
            }
            let path = if path.is_absolute() {
                path.clone()
            } else {
                base.join(path)
            };
            fields.insert(
                key.clone(),
                Value::String(path.to_string_lossy().into_owned()),
            );
        }
        let mut tagged = Map::new();
        tagged.insert(self.command.clone(), Value::Object(fields));
        serde_json::from_value(Value::Object(tagged))
            .with_context(|| format!("parameters of `{}`", self.command))
    }
}

/// Exit status of a finished command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Violation,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Ok
        } else {
            Status::Violation
        }
    }
}

/// Collects the files a command writes into its job directory.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, data).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.bytes(name, text.as_bytes())
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<()> {
        self.bytes(name, text.as_bytes())
    }

    pub fn finish(mut self, command: &Command, seed: Option<u64>, status: Status) -> Result<()> {
        self.files.sort();
        let manifest = Manifest {
            version: MANIFEST_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.name(),
            params: command.params()?,
            seed,
            status,
            exit_code: status.code(),
            outputs: self.files.clone(),
        };
        self.json("manifest.json", &manifest)
    }
}

#[derive(Serialize)]
struct Manifest {
    version: u32,
    tool: &'static str,
    tool_version: &'static str,
    command: &'static str,
    params: Value,
    seed: Option<u64>,
    status: Status,
    exit_code: u8,
    outputs: Vec<String>,
}
