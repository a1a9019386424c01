//! Sample paths on the uniform grid over [0, 1].

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance attached to a path: seed, generator name and parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub seed: Option<u64>,
    pub generator: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl PathMeta {
    pub fn new(generator: &str, seed: Option<u64>) -> Self {
        PathMeta {
            seed,
            generator: generator.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Real-valued observations on the uniform grid `t = u / grid_n`, `u = 0..=grid_n`.
///
/// The universal carrier for simulated processes and ingested series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    values: Vec<f64>,
    grid_n: usize,
    pub meta: PathMeta,
}

impl SamplePath {
    /// Wraps `values` as observations at `u / (len - 1)`.
    ///
    /// Fails when fewer than two samples are given or any value is non-finite.
    pub fn new(values: Vec<f64>, meta: PathMeta) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("a sample path needs at least 2 samples"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at index {i}")));
        }
        let grid_n = values.len() - 1;
        Ok(SamplePath {
            values,
            grid_n,
            meta,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid resolution N; the path has N + 1 samples.
    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Observation time of sample `u`.
    pub fn t(&self, u: usize) -> f64 {
        u as f64 / self.grid_n as f64
    }

    /// Writes `t,value` rows at full double precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (u, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.t(u), v)?;
        }
        Ok(())
    }

    /// Reads a `t,value` CSV produced by [`SamplePath::write_csv`].
    ///
    /// The `t` column must be consistent with a uniform grid on [0, 1].
    pub fn read_csv<R: Read>(r: R, meta: PathMeta) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut values = Vec::new();
        let mut ts = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if idx == 0 {
                if line.trim() != "t,value" {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected header `t,value`, got `{line}`"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(2, ',');
            let t_str = parts.next().unwrap_or("");
            let v_str = parts.next().ok_or(Error::Parse {
                line: lineno,
                msg: "missing value column".into(),
            })?;
            let t: f64 = t_str.trim().parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad t `{t_str}`: {e}"),
            })?;
            let v: f64 = v_str.trim().parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad value `{v_str}`: {e}"),
            })?;
            ts.push(t);
            values.push(v);
        }
        let path = SamplePath::new(values, meta)?;
        let n = path.grid_n as f64;
        for (u, &t) in ts.iter().enumerate() {
            if (t - u as f64 / n).abs() > 1e-9 {
                return Err(Error::Parse {
                    line: u + 2,
                    msg: format!("t column is not the uniform grid u/{n}"),
                });
            }
        }
        Ok(path)
    }

    /// JSON envelope with meta and values.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let path: SamplePath = serde_json::from_str(s)?;
        SamplePath::new(path.values, path.meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_nonfinite() {
        assert!(SamplePath::new(vec![1.0], PathMeta::default()).is_err());
        assert!(SamplePath::new(vec![1.0, f64::NAN], PathMeta::default()).is_err());
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let p = SamplePath::new(
            vec![0.0, 0.1234567890123456789, -3.5e-13, 2.0],
            PathMeta::new("test", Some(1)),
        )
        .unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = SamplePath::read_csv(&buf[..], p.meta.clone()).unwrap();
        assert_eq!(p.values(), q.values());
        assert_eq!(p.grid_n(), 3);
    }

    #[test]
    fn json_roundtrip() {
        let p = SamplePath::new(vec![0.0, 1.0, 4.0], PathMeta::new("fbm", Some(9))).unwrap();
        let q = SamplePath::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(p, q);
    }
}
