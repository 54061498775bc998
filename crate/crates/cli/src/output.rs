//! Output sink and run manifest. Everything written here is a pure function of
//! the inputs and options: no timestamps, no absolute output paths.

use std::fs;
use std::path::{Path, PathBuf};

use inflap::io::to_json;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::Failure;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Input {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        Ok(Input { name, bytes })
    }

    pub fn text(&self) -> Result<&str, Failure> {
        std::str::from_utf8(&self.bytes).map_err(|_| Failure::invalid(format!("{} is not UTF-8", self.name)))
    }
}

/// Collects named outputs; with `--out` they go to files next to a
/// `manifest.json`, otherwise the primary document (with the manifest
/// embedded) goes to stdout.
pub struct Sink {
    command: &'static str,
    options: Value,
    inputs: Vec<Value>,
    seed: Option<u64>,
    files: Vec<(String, String)>,
    primary: Option<Value>,
}

impl Sink {
    pub fn new(command: &'static str, options: Value) -> Self {
        Sink { command, options, inputs: Vec::new(), seed: None, files: Vec::new(), primary: None }
    }

    pub fn input(&mut self, input: &Input) {
        self.inputs.push(json!({ "name": input.name, "sha256": sha256_hex(&input.bytes) }));
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// The document printed to stdout when there is no output directory.
    pub fn primary<T: Serialize>(&mut self, name: &str, value: &T) {
        let v = serde_json::to_value(value).expect("outputs serialise");
        self.files.push((name.to_string(), to_json(&v)));
        self.primary = Some(v);
    }

    pub fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn manifest(&self, with_outputs: bool) -> Value {
        let mut m = json!({
            "tool": "inflap",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "options": self.options,
            "inputs": self.inputs,
            "seed": self.seed,
        });
        if with_outputs {
            let outputs: Vec<Value> =
                self.files.iter().map(|(n, c)| json!({ "name": n, "sha256": sha256_hex(c.as_bytes()) })).collect();
            m["outputs"] = Value::Array(outputs);
        }
        m
    }

    pub fn finish(self, out: Option<&PathBuf>) -> Result<(), Failure> {
        match out {
            Some(dir) => {
                fs::create_dir_all(dir)
                    .map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
                for (name, contents) in &self.files {
                    let path = dir.join(name);
                    fs::write(&path, contents).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
                }
                let path = dir.join("manifest.json");
                fs::write(&path, to_json(&self.manifest(true)))
                    .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
            }
            None => {
                let mut doc = self.primary.clone().unwrap_or(Value::Null);
                if let Value::Object(map) = &mut doc {
                    map.insert("manifest".into(), self.manifest(false));
                }
                print!("{}", to_json(&doc));
            }
        }
        Ok(())
    }
}
