//! Run configuration: a key=value file merged under command-line flags
//! (flags win), validated into a [`RunConfig`].

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Parsed key=value file. Blank lines and `#` comments are skipped.
pub fn parse_kv_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    parse_kv(&text)
}

pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Param(format!(
                "config line {}: expected key=value, got {line:?}",
                lineno + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Validated knobs shared by the experiment subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub phi: String,
    pub m: usize,
    pub seed: u64,
    pub p: f64,
    pub m_weight: f64,
    pub t_list: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub backend: String,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            phi: "power:p=2".into(),
            m: 129,
            seed: 7,
            p: 1.5,
            m_weight: 12.0, // 36 sqrt(n) collapses the splitting thresholds; a smaller M keeps them visible
            t_list: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            eps_list: vec![0.1, 0.05, 0.025, 0.0125],
            backend: "fd".into(),
            out: None,
        }
    }
}

impl RunConfig {
    /// Fold a parsed key=value map into the config. Unknown keys error so
    /// typos fail loudly.
    pub fn apply(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in map {
            match k.as_str() {
                "phi" => self.phi = v.clone(),
                "m" => self.m = parse_num(k, v)?,
                "seed" => self.seed = parse_num(k, v)?,
                "p" => self.p = parse_num(k, v)?,
                "m_weight" => self.m_weight = parse_num(k, v)?,
                "t_list" => self.t_list = parse_list(k, v)?,
                "eps_list" => self.eps_list = parse_list(k, v)?,
                "backend" => self.backend = v.clone(),
                "out" => self.out = Some(v.clone()),
                _ => return Err(Error::Param(format!("unknown config key {k:?}"))),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 65 || self.m % 2 == 0 {
            return Err(Error::Param(format!(
                "m must be odd and at least 65, got {}",
                self.m
            )));
        }
        if !(self.p > 1.0) {
            return Err(Error::Param(format!("p must exceed 1, got {}", self.p)));
        }
        if !(self.m_weight > 1.0) {
            return Err(Error::Param(format!(
                "m_weight must exceed 1, got {}",
                self.m_weight
            )));
        }
        if self.t_list.is_empty() || self.t_list.iter().any(|&t| t <= 0.0) {
            return Err(Error::Param("t_list must be positive and nonempty".into()));
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|&e| e <= 0.0) {
            return Err(Error::Param("eps_list must be positive and nonempty".into()));
        }
        match self.backend.as_str() {
            "fd" | "green" => Ok(()),
            other => Err(Error::Param(format!("unknown backend {other:?}"))),
        }
    }

    /// Canonical listing for manifests and hashing. The output directory
    /// is excluded: it says where results go, not what they are.
    pub fn as_pairs(&self) -> Vec<(String, String)> {
        let join = |v: &[f64]| {
            v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
        };
        vec![
            ("phi".into(), self.phi.clone()),
            ("m".into(), self.m.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("p".into(), format!("{}", self.p)),
            ("m_weight".into(), format!("{}", self.m_weight)),
            ("t_list".into(), join(&self.t_list)),
            ("eps_list".into(), join(&self.eps_list)),
            ("backend".into(), self.backend.clone()),
        ]
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Param(format!("config key {key}: cannot parse {v:?}")))
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Param(format!("config key {key}: cannot parse {s:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_merge() {
        let map = parse_kv("# comment\n\nphi = exp\nm=257\n t_list = 1, 2.5 ,10 \n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply(&map).unwrap();
        assert_eq!(cfg.phi, "exp");
        assert_eq!(cfg.m, 257);
        assert_eq!(cfg.t_list, vec![1.0, 2.5, 10.0]);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_kv("just words\n").is_err());
        let mut cfg = RunConfig::default();
        assert!(cfg.apply(&parse_kv("mm=3").unwrap()).is_err());
        assert!(cfg.apply(&parse_kv("m=notanumber").unwrap()).is_err());

        let mut cfg = RunConfig::default();
        cfg.m = 64;
        assert!(cfg.validate().is_err());
        cfg.m = 63;
        assert!(cfg.validate().is_err());
        cfg.m = 65;
        cfg.validate().unwrap();
        cfg.backend = "spectral".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn pairs_round_trip_through_hash() {
        let cfg = RunConfig::default();
        let h1 = crate::report::config_hash(&cfg.as_pairs());
        let mut cfg2 = cfg.clone();
        cfg2.seed = 8;
        let h2 = crate::report::config_hash(&cfg2.as_pairs());
        assert_ne!(h1, h2);
    }
}
