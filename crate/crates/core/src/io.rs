//! CSV layout for grid fields plus a JSON metadata sidecar.
//!
//! The first CSV row is `dim, lo_0, hi_0, …, lo_{n-1}, hi_{n-1}, m_0, …, m_{n-1}`;
//! every following row holds one node value in row-major order. Values are
//! written with 17 significant digits so a round trip is bit-exact.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ExtensionPolicy, GridSpec, SampledField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtensionMeta {
    ConstantFarField { value: f64 },
    Clamp,
    AnalyticTail,
}

impl From<&ExtensionPolicy> for ExtensionMeta {
    fn from(ext: &ExtensionPolicy) -> Self {
        match ext {
            ExtensionPolicy::ConstantFarField(c) => Self::ConstantFarField { value: *c },
            ExtensionPolicy::ClampToNearestBoundaryValue => Self::Clamp,
            ExtensionPolicy::AnalyticTail(_) => Self::AnalyticTail,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridMeta {
    pub grid: GridSpec,
    pub extension: ExtensionMeta,
    #[serde(default)]
    pub extra: serde_json::Value,
}

pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_grid_csv<W: Write>(mut w: W, field: &SampledField) -> Result<()> {
    let spec = field.spec();
    let mut header = vec![spec.dim().to_string()];
    for a in 0..spec.dim() {
        header.push(fmt_value(spec.lo()[a]));
        header.push(fmt_value(spec.hi()[a]));
    }
    header.extend(spec.counts().iter().map(|m| m.to_string()));
    writeln!(w, "{}", header.join(","))?;
    for v in field.values() {
        writeln!(w, "{}", fmt_value(*v))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse {tok:?} as a number")))
}

pub fn read_grid_csv<R: BufRead>(r: R, ext: ExtensionPolicy) -> Result<SampledField> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty grid file".into()))??;
    let toks: Vec<&str> = header.split(',').collect();
    let dim: usize = toks[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line 1: bad dimension {:?}", toks[0])))?;
    if toks.len() != 1 + 3 * dim {
        return Err(Error::Parse(format!(
            "line 1: expected {} header entries for dim {dim}, got {}",
            1 + 3 * dim,
            toks.len()
        )));
    }
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    for a in 0..dim {
        lo.push(parse_f64(toks[1 + 2 * a], 1)?);
        hi.push(parse_f64(toks[2 + 2 * a], 1)?);
    }
    let counts = toks[1 + 2 * dim..]
        .iter()
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("line 1: bad node count {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = GridSpec::new(lo, hi, counts)?;
    let mut values = Vec::with_capacity(spec.len());
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        values.push(parse_f64(&line, k + 2)?);
    }
    SampledField::new(spec, values, ext)
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes `<path>` (CSV) and `<path>.json` with the grid metadata.
pub fn save_grid(path: &Path, field: &SampledField, extra: serde_json::Value) -> Result<()> {
    let file = fs::File::create(path)?;
    write_grid_csv(BufWriter::new(file), field)?;
    let meta = GridMeta {
        grid: field.spec().clone(),
        extension: field.extension().into(),
        extra,
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Reads a grid saved by [`save_grid`]. Analytic tails cannot be restored
/// from disk, so such files are rejected.
pub fn load_grid(path: &Path) -> Result<SampledField> {
    let meta: GridMeta = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    let ext = match meta.extension {
        ExtensionMeta::ConstantFarField { value } => ExtensionPolicy::ConstantFarField(value),
        ExtensionMeta::Clamp => ExtensionPolicy::ClampToNearestBoundaryValue,
        ExtensionMeta::AnalyticTail => {
            return Err(Error::Parse(
                "analytic tail extension cannot be restored from disk".into(),
            ))
        }
    };
    let field = read_grid_csv(BufReader::new(fs::File::open(path)?), ext)?;
    if field.spec() != &meta.grid {
        return Err(Error::Parse("CSV header disagrees with JSON sidecar".into()));
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_short_header() {
        let err = read_grid_csv("2,0,1,0,1,3\n".as_bytes(), ExtensionPolicy::ConstantFarField(0.0));
        assert!(matches!(err, Err(Error::Parse(_))));
    }

    #[test]
    fn rejects_wrong_value_count() {
        let err = read_grid_csv("1,0,1,3\n1\n2\n".as_bytes(), ExtensionPolicy::ConstantFarField(0.0));
        assert!(matches!(err, Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn file_round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let spec = GridSpec::cube(2, -1.0, 1.0, 3).unwrap();
        let values: Vec<f64> = (0..9).map(|k| (k as f64).sqrt() / 3.0).collect();
        let f = SampledField::new(spec, values, ExtensionPolicy::ConstantFarField(0.125)).unwrap();
        save_grid(&path, &f, serde_json::json!({"t": 0.5})).unwrap();
        let g = load_grid(&path).unwrap();
        assert_eq!(g.values(), f.values());
        assert!(matches!(g.extension(), ExtensionPolicy::ConstantFarField(c) if *c == 0.125));
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 12)) {
            let spec = GridSpec::new(vec![-0.3, 1.0 / 3.0], vec![2.7, 5.0], vec![3, 4]).unwrap();
            let f = SampledField::new(spec, values, ExtensionPolicy::ConstantFarField(0.0)).unwrap();
            let mut buf = Vec::new();
            write_grid_csv(&mut buf, &f).unwrap();
            let g = read_grid_csv(buf.as_slice(), ExtensionPolicy::ConstantFarField(0.0)).unwrap();
            prop_assert_eq!(g.spec(), f.spec());
            for (a, b) in f.values().iter().zip(g.values()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
