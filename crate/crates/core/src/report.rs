//! Deterministic experiment outputs: CSV tables with a stable column
//! order and shortest-roundtrip float formatting, plus a config hash so a
//! rerun can prove it used the same inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

/// FNV-1a over the canonical key=value listing of the run configuration.
pub fn config_hash(pairs: &[(String, String)]) -> u64 {
    let mut sorted: Vec<&(String, String)> = pairs.iter().collect();
    sorted.sort();
    let mut hash = 0xcbf29ce484222325u64;
    for (k, v) in sorted {
        for byte in k.bytes().chain([b'='].into_iter()).chain(v.bytes()).chain([b'\n']) {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    }
    hash
}

/// A CSV table built row by row; every write produces identical bytes for
/// identical inputs.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable { header: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_row(&mut self, cells: &[CsvCell]) {
        assert_eq!(cells.len(), self.header.len(), "row width mismatch");
        self.rows.push(cells.iter().map(CsvCell::render).collect());
    }

    pub fn to_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, self.to_string())?;
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }
}

/// Cell values render through Rust's shortest-roundtrip float formatting,
/// which is platform independent.
#[derive(Debug, Clone)]
pub enum CsvCell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl CsvCell {
    fn render(&self) -> String {
        match self {
            CsvCell::Int(v) => v.to_string(),
            CsvCell::Float(v) => {
                let mut s = String::new();
                write!(s, "{v}").unwrap();
                s
            }
            CsvCell::Text(v) => {
                if v.contains(',') || v.contains('"') || v.contains('\n') {
                    format!("\"{}\"", v.replace('"', "\"\""))
                } else {
                    v.clone()
                }
            }
            CsvCell::Bool(v) => v.to_string(),
        }
    }
}

/// Run metadata written next to the data tables.
pub fn write_manifest(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut sorted: Vec<&(String, String)> = pairs.iter().collect();
    sorted.sort();
    let mut out = String::new();
    for (k, v) in &sorted {
        out.push_str(k);
        out.push('=');
        out.push_str(v);
        out.push('\n');
    }
    let hash = config_hash(pairs);
    out.push_str(&format!("config_hash={hash:016x}\n"));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_order_independent_and_content_sensitive() {
        let a = vec![("m".into(), "129".into()), ("seed".into(), "7".into())];
        let b = vec![("seed".into(), "7".into()), ("m".into(), "129".into())];
        let c = vec![("seed".into(), "8".into()), ("m".into(), "129".into())];
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&c));
        // frozen value guards against accidental algorithm drift
        assert_eq!(config_hash(&[]), 0xcbf29ce484222325);
    }

    #[test]
    fn csv_rendering_is_exact() {
        let mut t = CsvTable::new(&["k", "value", "note", "ok"]);
        t.push_row(&[
            CsvCell::Int(3),
            CsvCell::Float(0.1),
            CsvCell::Text("a,b".into()),
            CsvCell::Bool(true),
        ]);
        t.push_row(&[
            CsvCell::Int(-1),
            CsvCell::Float(f64::INFINITY),
            CsvCell::Text("plain".into()),
            CsvCell::Bool(false),
        ]);
        assert_eq!(
            t.to_string(),
            "k,value,note,ok\n3,0.1,\"a,b\",true\n-1,inf,plain,false\n"
        );
    }

    #[test]
    fn float_rendering_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 123456.789, -0.0] {
            let cell = CsvCell::Float(v);
            let s = cell.render();
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn manifest_written_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("manifest.txt");
        write_manifest(
            &path,
            &[("zeta".into(), "1".into()), ("alpha".into(), "2".into())],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "alpha=2");
        assert_eq!(lines[1], "zeta=1");
        assert!(lines[2].starts_with("config_hash="));
    }
}
