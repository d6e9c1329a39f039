//! Text formats: sampled functions and norm configurations.
//!
//! A function file is
//!
//! ```text
//! grid_size 8
//! kind samples
//! 0 1.0000000000000000e0 0.0000000000000000e0
//! ...
//! ```
//!
//! with one row per node (`kind samples`) or per signed frequency
//! `-n/2+1 ..= n/2` in increasing order (`kind spectrum`). Numbers are
//! written with 17 significant digits, so canonical files round-trip
//! byte for byte.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{GaugeNormSpec, YoungFunction};
use crate::spectral::{CircleFunction, Grid, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Samples,
    Spectrum,
}

impl fmt::Display for FileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FileKind::Samples => "samples",
            FileKind::Spectrum => "spectrum",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionFile {
    pub grid_size: usize,
    pub kind: FileKind,
    pub values: Vec<Complex64>,
}

/// `{:.16e}`: 17 significant digits, lowercase exponent.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

impl FunctionFile {
    pub fn from_function(f: &CircleFunction, kind: FileKind) -> Result<Self> {
        let values = match kind {
            FileKind::Samples => f.samples().to_vec(),
            FileKind::Spectrum => {
                let s = f.spectrum()?;
                frequency_rows(f.grid()).map(|k| s.coeff(k)).collect()
            }
        };
        Ok(Self {
            grid_size: f.len(),
            kind,
            values,
        })
    }

    pub fn to_function(&self) -> Result<CircleFunction> {
        let grid = Grid::new(self.grid_size)?;
        match self.kind {
            FileKind::Samples => CircleFunction::from_samples(grid, self.values.clone()),
            FileKind::Spectrum => {
                let mut coeffs = vec![Complex64::new(0.0, 0.0); self.grid_size];
                for (k, v) in frequency_rows(grid).zip(&self.values) {
                    coeffs[grid.frequency_index(k)] = *v;
                }
                Ok(CircleFunction::from_spectrum(&Spectrum::from_fft_order(grid, coeffs)?))
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing `{key}` header")))?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok((no, v.trim().to_string())),
                _ => Err(parse_err(no, format!("expected `{key} <value>`"))),
            }
        };
        let (no, size) = header("grid_size")?;
        let grid_size: usize = size.parse().map_err(|e| parse_err(no, e))?;
        let grid = Grid::new(grid_size).map_err(|e| parse_err(no, e))?;
        let (no, kind) = header("kind")?;
        let kind = match kind.as_str() {
            "samples" => FileKind::Samples,
            "spectrum" => FileKind::Spectrum,
            other => return Err(parse_err(no, format!("unknown kind `{other}`"))),
        };

        let expected: Vec<i64> = match kind {
            FileKind::Samples => (0..grid_size as i64).collect(),
            FileKind::Spectrum => frequency_rows(grid).collect(),
        };
        let mut values = Vec::with_capacity(grid_size);
        for (no, line) in lines {
            if values.len() == grid_size {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(parse_err(no, "more rows than grid_size"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [index, re, im] = fields[..] else {
                return Err(parse_err(no, "expected `index re im`"));
            };
            let index: i64 = index.parse().map_err(|e| parse_err(no, e))?;
            if index != expected[values.len()] {
                return Err(parse_err(
                    no,
                    format!("expected index {}, found {index}", expected[values.len()]),
                ));
            }
            let re: f64 = re.parse().map_err(|e| parse_err(no, e))?;
            let im: f64 = im.parse().map_err(|e| parse_err(no, e))?;
            values.push(Complex64::new(re, im));
        }
        if values.len() != grid_size {
            return Err(Error::Parse(format!(
                "expected {grid_size} rows, found {}",
                values.len()
            )));
        }
        Ok(Self {
            grid_size,
            kind,
            values,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity(48 * self.values.len() + 32);
        writeln!(out, "grid_size {}", self.grid_size).unwrap();
        writeln!(out, "kind {}", self.kind).unwrap();
        let indices: Box<dyn Iterator<Item = i64>> = match self.kind {
            FileKind::Samples => Box::new(0..self.grid_size as i64),
            FileKind::Spectrum => Box::new(frequency_rows(Grid::new(self.grid_size).expect("valid grid"))),
        };
        for (k, v) in indices.zip(&self.values) {
            writeln!(out, "{k} {} {}", format_real(v.re), format_real(v.im)).unwrap();
        }
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

fn frequency_rows(grid: Grid) -> impl Iterator<Item = i64> {
    let half = (grid.size() / 2) as i64;
    (-half + 1)..=half
}

pub fn read_function(path: &Path) -> Result<CircleFunction> {
    FunctionFile::read(path)?.to_function()
}

pub fn write_function(path: &Path, f: &CircleFunction, kind: FileKind) -> Result<()> {
    FunctionFile::from_function(f, kind)?.write(path)
}

/// Structured norm description, as read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormConfig {
    Lp {
        p: f64,
    },
    Linfinity,
    /// Either `terms` (weights `2^-n`, exponents `n`) or explicit lists.
    Mix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        terms: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponents: Option<Vec<f64>>,
    },
    Lorentz {
        p: f64,
        q: f64,
    },
    /// Either `preset = "llogl"` or a `table` of `(x, Φ(x))` knots.
    Orlicz {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preset: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<Vec<[f64; 2]>>,
    },
}

pub const DEFAULT_MIX_TERMS: usize = 8;

impl NormConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("norm config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("norm configs serialize")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Build (and, for Orlicz tables, validate) the norm.
    pub fn build(&self) -> Result<GaugeNormSpec> {
        match self {
            NormConfig::Lp { p } => GaugeNormSpec::lp(*p),
            NormConfig::Linfinity => Ok(GaugeNormSpec::linfinity()),
            NormConfig::Mix {
                terms,
                weights,
                exponents,
            } => match (terms, weights, exponents) {
                (Some(t), None, None) => GaugeNormSpec::dyadic_mix(*t),
                (None, Some(w), Some(e)) => GaugeNormSpec::weighted_lp_mix(w.clone(), e.clone()),
                (None, None, None) => GaugeNormSpec::dyadic_mix(DEFAULT_MIX_TERMS),
                _ => Err(Error::InvalidSpec(
                    "mix takes either `terms` or both `weights` and `exponents`".into(),
                )),
            },
            NormConfig::Lorentz { p, q } => GaugeNormSpec::lorentz(*p, *q),
            NormConfig::Orlicz {
                preset,
                label,
                table,
            } => match (preset.as_deref(), table) {
                (Some("llogl"), None) => GaugeNormSpec::l_log_l(),
                (Some(other), None) => Err(Error::InvalidSpec(format!("unknown Orlicz preset `{other}`"))),
                (None, Some(t)) => {
                    let knots: Vec<(f64, f64)> = t.iter().map(|[x, y]| (*x, *y)).collect();
                    let young = YoungFunction::from_table_unchecked(
                        label.clone().unwrap_or_else(|| "table".into()),
                        &knots,
                    )?;
                    GaugeNormSpec::orlicz(young)
                }
                _ => Err(Error::InvalidSpec(
                    "orlicz takes either `preset` or `table`".into(),
                )),
            },
        }
    }
}

impl FromStr for NormConfig {
    type Err = Error;

    /// Shorthands: `lp:2`, `linf`, `mix`, `mix:8`, `lorentz:2:1`, `orlicz:llogl`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in norm `{s}`")))
        };
        match parts[..] {
            ["lp", p] => Ok(NormConfig::Lp { p: num(p)? }),
            ["linf"] | ["linfinity"] => Ok(NormConfig::Linfinity),
            ["mix"] => Ok(NormConfig::Mix {
                terms: Some(DEFAULT_MIX_TERMS),
                weights: None,
                exponents: None,
            }),
            ["mix", t] => Ok(NormConfig::Mix {
                terms: Some(t.parse().map_err(|_| Error::Parse(format!("bad term count in `{s}`")))?),
                weights: None,
                exponents: None,
            }),
            ["lorentz", p, q] => Ok(NormConfig::Lorentz { p: num(p)?, q: num(q)? }),
            ["orlicz", preset] => Ok(NormConfig::Orlicz {
                preset: Some(preset.to_string()),
                label: None,
                table: None,
            }),
            _ => Err(Error::Parse(format!("unrecognized norm `{s}`"))),
        }
    }
}
