//! Output directories, CSV/JSON writers and reproducibility stamps.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::Error;

pub const OUT_ENV: &str = "SHOCKLAB_OUT";
pub const DEFAULT_ROOT: &str = "shocklab-out";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output root: `--out` flag, then `SHOCKLAB_OUT`, then the config, then
/// `shocklab-out`.
pub fn output_root(flag: Option<&Path>, config: Option<&ExperimentConfig>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    config.and_then(|c| c.output.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_ROOT))
}

/// Formats a float so that it parses back to the same bits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}

/// A directory receiving the artifacts of one command.
#[derive(Clone, Debug)]
pub struct OutputDir {
    path: PathBuf,
    summary: BTreeMap<String, serde_json::Value>,
}

impl OutputDir {
    pub fn create(path: impl Into<PathBuf>) -> Result<Self, Error> {
        let path = path.into();
        fs::create_dir_all(&path).map_err(|e| Error::io(&path, e))?;
        Ok(Self { path, summary: BTreeMap::new() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    pub fn write_csv<R, S>(&self, name: &str, header: &[&str], rows: R) -> Result<(), Error>
    where
        R: IntoIterator<Item = Vec<S>>,
        S: AsRef<str>,
    {
        let path = self.file(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let wrap = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
        w.write_record(header).map_err(wrap)?;
        for row in rows {
            if row.len() != header.len() {
                return Err(Error::Io(format!("{}: row has {} fields, header {}", path.display(), row.len(), header.len())));
            }
            w.write_record(row.iter().map(|s| s.as_ref())).map_err(wrap)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))
    }

    /// Writes numeric columns of equal length.
    pub fn write_columns(&self, name: &str, columns: &[(&str, &[f64])]) -> Result<(), Error> {
        let n = columns.first().map_or(0, |c| c.1.len());
        if columns.iter().any(|c| c.1.len() != n) {
            return Err(Error::Io(format!("{name}: columns differ in length")));
        }
        let header: Vec<&str> = columns.iter().map(|c| c.0).collect();
        let rows = (0..n).map(|i| columns.iter().map(|c| num(c.1[i])).collect::<Vec<_>>());
        self.write_csv(name, &header, rows)
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), Error> {
        let path = self.file(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }

    /// Adds a scalar to `summary.json`, the file `report` aggregates.
    pub fn record(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.summary.insert(key.into(), value.into());
    }

    /// Writes `config.toml`, `meta.json` and `summary.json`.
    pub fn finish(&self, command: &str, config: Option<&ExperimentConfig>) -> Result<(), Error> {
        if let Some(c) = config {
            let path = self.file("config.toml");
            fs::write(&path, c.to_toml()).map_err(|e| Error::io(&path, e))?;
        }
        let meta = Meta {
            tool: "shocklab",
            version: VERSION,
            command,
            schema: config.map(|c| c.schema),
            model: config.map(|c| c.model.name().to_string()),
            seed: config.map(|c| c.seed),
        };
        self.write_json("meta.json", &meta)?;
        self.write_json("summary.json", &self.summary)
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    schema: Option<u32>,
    model: Option<String>,
    seed: Option<u64>,
}

/// Contents of every `*.csv` under `dir`, keyed by relative path.
pub fn collect_csv(dir: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>, Error> {
    let mut out = BTreeMap::new();
    if !dir.exists() {
        return Ok(out);
    }
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(|e| Error::io(&d, e))? {
            let p = entry.map_err(|e| Error::io(&d, e))?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "csv") {
                let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
                out.insert(p.strip_prefix(dir).expect("under dir").to_path_buf(), bytes);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, -1.5, 1e-300, std::f64::consts::PI, 6.02e23, f64::INFINITY] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn writes_stamped_directory() {
        let tmp = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(tmp.path().join("run")).unwrap();
        out.write_columns("a.csv", &[("x", &[1.0, 2.0]), ("y", &[3.0, 4.0])]).unwrap();
        assert!(out.write_columns("b.csv", &[("x", &[1.0]), ("y", &[])]).is_err());
        out.record("answer", 42.0);
        out.finish("test", Some(&ExperimentConfig::for_model("burgers"))).unwrap();
        let csv = fs::read_to_string(out.file("a.csv")).unwrap();
        assert_eq!(csv, "x,y\n1e0,3e0\n2e0,4e0\n");
        let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.file("meta.json")).unwrap()).unwrap();
        assert_eq!(meta["version"], VERSION);
        assert_eq!(meta["model"], "burgers");
        let cfg = ExperimentConfig::load(&out.file("config.toml")).unwrap();
        assert_eq!(cfg, ExperimentConfig::for_model("burgers"));
        let files = collect_csv(tmp.path()).unwrap();
        assert_eq!(files.keys().count(), 1);
    }
}
