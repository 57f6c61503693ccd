//! CSV readers and writers for outcomes and panels, and the `key=value`
//! metadata sidecar written next to every output file.

use std::fmt::Display;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::net::DirectedNetwork;
use crate::outcome::panel::{PanelDataset, Wave};
use crate::scalar::Real;

/// `node,value` rows.
pub fn write_continuous<T: Real, W: Write>(w: W, z: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["node", "value"])?;
    for (i, v) in z.iter().enumerate() {
        out.write_record([i.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `node,y` rows.
pub fn write_binary<W: Write>(w: W, y: &[u8]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["node", "y"])?;
    for (i, v) in y.iter().enumerate() {
        out.write_record([i.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads either outcome layout. Rows may come in any order but must cover
/// nodes `0..n` exactly once.
pub fn read_outcomes<T: Real, R: Read>(r: R) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "node" || !matches!(&headers[1], "value" | "y") {
        return Err(Error::Parse(format!(
            "outcome CSV header must be `node,value` or `node,y`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<(usize, T)> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let node: usize = parse_field(&rec[0], line, "node")?;
        let v: f64 = parse_field(&rec[1], line, &headers[1])?;
        rows.push((node, T::lit(v)));
    }
    let n = rows.len();
    let mut z = vec![None; n];
    for (node, v) in rows {
        match z.get_mut(node) {
            Some(slot @ None) => *slot = Some(v),
            Some(Some(_)) => return Err(Error::Parse(format!("node {node} appears twice"))),
            None => return Err(Error::Parse(format!("node {node} out of range for {n} rows"))),
        }
    }
    Ok(z.into_iter().map(|v| v.expect("every slot filled")).collect())
}

/// Converts a 0/1 real outcome vector to bytes.
pub fn as_binary<T: Real>(y: &[T]) -> Result<Vec<u8>> {
    y.iter()
        .map(|&v| {
            if v == T::zero() {
                Ok(0)
            } else if v == T::one() {
                Ok(1)
            } else {
                Err(Error::InvalidParameter(format!("binary outcome {v} is not 0/1")))
            }
        })
        .collect()
}

/// `wave,node,y,x1..xp` rows; waves are numbered from 1.
pub fn write_panel<T: Real, W: Write>(w: W, panel: &PanelDataset<T>) -> Result<()> {
    let p = panel.covariate_count();
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["wave".to_string(), "node".into(), "y".into()];
    header.extend((1..=p).map(|k| format!("x{k}")));
    out.write_record(&header)?;
    for (t, wave) in panel.waves().iter().enumerate() {
        for i in 0..panel.node_count() {
            let mut rec = vec![(t + 1).to_string(), i.to_string(), wave.outcomes[i].to_string()];
            rec.extend((0..p).map(|k| wave.covariates[(i, k)].to_string()));
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a panel CSV. `networks` holds one network per wave, or a single
/// network shared by all waves.
pub fn read_panel<T: Real, R: Read>(r: R, networks: &[DirectedNetwork<T>]) -> Result<PanelDataset<T>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    let fixed = ["wave", "node", "y"];
    if headers.len() < 3 || (0..3).any(|k| &headers[k] != fixed[k]) {
        return Err(Error::Parse("panel CSV header must start with `wave,node,y`".into()));
    }
    for (k, h) in headers.iter().skip(3).enumerate() {
        if h != format!("x{}", k + 1) {
            return Err(Error::Parse(format!("expected covariate column x{}, found `{h}`", k + 1)));
        }
    }
    let p = headers.len() - 3;
    let mut cells: Vec<(usize, usize, u8, Vec<f64>)> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let wave: usize = parse_field(&rec[0], line, "wave")?;
        let node: usize = parse_field(&rec[1], line, "node")?;
        let y: u8 = parse_field(&rec[2], line, "y")?;
        if wave == 0 || y > 1 {
            return Err(Error::Parse(format!("row {}: wave must be ≥ 1 and y in {{0,1}}", line + 2)));
        }
        let xs = (0..p).map(|k| parse_field(&rec[3 + k], line, &headers[3 + k])).collect::<Result<_>>()?;
        cells.push((wave, node, y, xs));
    }
    let waves = cells.iter().map(|c| c.0).max().unwrap_or(0);
    if waves == 0 {
        return Err(Error::Parse("panel CSV has no rows".into()));
    }
    if networks.len() != 1 && networks.len() != waves {
        return Err(Error::Dimension { expected: waves, got: networks.len() });
    }
    let n = networks[0].node_count();
    let mut y = vec![vec![None; n]; waves];
    let mut x = vec![Matrix::zeros(n, p); waves];
    for (wave, node, v, xs) in cells {
        let slot = y[wave - 1]
            .get_mut(node)
            .ok_or_else(|| Error::Parse(format!("node {node} out of range for n = {n}")))?;
        if slot.replace(v).is_some() {
            return Err(Error::Parse(format!("wave {wave} node {node} appears twice")));
        }
        for (k, v) in xs.into_iter().enumerate() {
            x[wave - 1][(node, k)] = T::lit(v);
        }
    }
    let mut out = Vec::with_capacity(waves);
    for (t, (yt, xt)) in y.into_iter().zip(x).enumerate() {
        let outcomes = yt
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("wave {} is missing node {i}", t + 1))))
            .collect::<Result<Vec<u8>>>()?;
        let network = networks[if networks.len() == 1 { 0 } else { t }].clone();
        out.push(Wave { network, outcomes, covariates: xt });
    }
    PanelDataset::new(out)
}

fn parse_field<V: std::str::FromStr>(s: &str, line: usize, column: &str) -> Result<V> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {}: cannot parse {column} `{s}`", line + 2)))
}

/// Ordered `key=value` pairs describing how an output was produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    /// Starts with the tool version.
    pub fn new() -> Self {
        let mut m = Self::default();
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    /// Sets a key, replacing an earlier value.
    pub fn set(&mut self, key: &str, value: impl Display) -> &mut Self {
        let value = value.to_string().replace('\n', " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::default();
        for (line, raw) in text.lines().enumerate() {
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got `{s}`", line + 1)))?;
            m.set(k.trim(), v.trim());
        }
        Ok(m)
    }

    /// Writes the sidecar for `output`.
    pub fn write_sidecar(&self, output: &Path) -> Result<PathBuf> {
        let path = sidecar_path(output);
        fs::write(&path, self.render())?;
        Ok(path)
    }
}

/// `results.csv` → `results.csv.meta`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}
