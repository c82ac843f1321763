//! Aggregation of earlier outputs into one summary table.

use std::fs;
use std::path::{Path, PathBuf};

use crate::io::OutputDir;
use crate::Error;

/// One `(directory, key, value)` entry of the summary table.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub dir: String,
    pub command: String,
    pub model: String,
    pub key: String,
    pub value: String,
}

fn read_json(path: &Path) -> Result<serde_json::Value, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn stamped_dirs(root: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        if d.join("meta.json").is_file() && d.join("summary.json").is_file() {
            found.push(d.clone());
        }
        for entry in fs::read_dir(&d).map_err(|e| Error::io(&d, e))? {
            let p = entry.map_err(|e| Error::io(&d, e))?.path();
            if p.is_dir() {
                stack.push(p);
            }
        }
    }
    found.sort();
    Ok(found)
}

fn text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Collects every `summary.json` under `root` (skipping earlier reports).
pub fn collect(root: &Path) -> Result<Vec<Row>, Error> {
    if !root.is_dir() {
        return Err(Error::Usage(format!("{} is not a directory", root.display())));
    }
    let mut rows = Vec::new();
    for d in stamped_dirs(root)? {
        let meta = read_json(&d.join("meta.json"))?;
        let command = text(&meta["command"]);
        if command == "report" {
            continue;
        }
        let model = meta.get("model").filter(|m| !m.is_null()).map(text).unwrap_or_default();
        let rel = d.strip_prefix(root).unwrap_or(&d).display().to_string();
        let summary = read_json(&d.join("summary.json"))?;
        if let Some(map) = summary.as_object() {
            for (k, v) in map {
                rows.push(Row { dir: rel.clone(), command: command.clone(), model: model.clone(), key: k.clone(), value: text(v) });
            }
        }
    }
    Ok(rows)
}

/// Fixed-width rendering of the rows.
pub fn render(rows: &[Row]) -> String {
    let head = ["directory", "command", "model", "key", "value"];
    let cells: Vec<[&str; 5]> =
        rows.iter().map(|r| [r.dir.as_str(), r.command.as_str(), r.model.as_str(), r.key.as_str(), r.value.as_str()]).collect();
    let mut width = head.map(|h| h.chars().count());
    for c in &cells {
        for (w, s) in width.iter_mut().zip(c) {
            *w = (*w).max(s.chars().count());
        }
    }
    let line = |c: [&str; 5]| {
        let parts: Vec<String> = c.iter().zip(&width).map(|(s, w)| format!("{s:<w$}")).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(head);
    out.push_str(&(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n"));
    for c in cells {
        out.push_str(&line(c));
    }
    out
}

/// Writes `<root>/report/summary.csv` and returns the rendered table.
pub fn report(root: &Path) -> Result<(PathBuf, String), Error> {
    let rows = collect(root)?;
    let mut out = OutputDir::create(root.join("report"))?;
    out.write_csv(
        "summary.csv",
        &["directory", "command", "model", "key", "value"],
        rows.iter().map(|r| vec![r.dir.clone(), r.command.clone(), r.model.clone(), r.key.clone(), r.value.clone()]),
    )?;
    out.record("rows", rows.len());
    out.finish("report", None)?;
    Ok((out.path().to_path_buf(), render(&rows)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregates_summaries() {
        let tmp = tempfile::tempdir().unwrap();
        let mut a = OutputDir::create(tmp.path().join("profile")).unwrap();
        a.record("sup_error", 1e-8);
        a.finish("profile", Some(&crate::ExperimentConfig::for_model("burgers"))).unwrap();
        let mut b = OutputDir::create(tmp.path().join("nested/spectrum")).unwrap();
        b.record("p", 1);
        b.finish("spectrum", None).unwrap();
        let (_, table) = report(tmp.path()).unwrap();
        let rows = collect(tmp.path()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].key, "p");
        assert_eq!(rows[1].model, "burgers");
        assert!(table.contains("sup_error") && table.lines().nth(1).unwrap().starts_with("---"));
        // a second report does not include the first
        assert_eq!(collect(tmp.path()).unwrap().len(), 2);
    }
}
