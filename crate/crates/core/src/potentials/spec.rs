//! Potential spec files, schema version 1.
//!
//! ```text
//! version=1                          # optional, must be 1 when present
//! kind=coulomb nu=0.5
//! kind=electromagnetic nu=0.2 a=0.3  # A = a·x/|x|²
//! kind=remark14 c=0 eps=1 m=0
//! kind=spin-coupled c=0.2 b_re=0 b_im=0.3
//! kind=radial-scalar nu=0.5 screening=1   # V = ν e^{−μr}/r
//! kind=tabulated file=v.txt          # two columns r, V(r)
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{MatrixPotential, RadialScalarPotential};
use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::keyvalue::KeyValues;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialSpec {
    Coulomb { nu: f64 },
    Electromagnetic { nu: f64, a: f64 },
    Remark14 { c: f64, eps: f64, m: f64 },
    SpinCoupled { c: f64, b_re: f64, b_im: f64 },
    RadialScalar { nu: f64, screening: f64 },
    Tabulated { file: PathBuf },
}

impl PotentialSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        if let Some((v, line)) = kv.opt_str("version") {
            if v != SCHEMA_VERSION.to_string() {
                return Err(Error::Schema { line, field: "version".into(), message: format!("unsupported version {v}") });
            }
        }
        let (kind, line) =
            kv.opt_str("kind").ok_or_else(|| Error::Schema { line: 0, field: "kind".into(), message: "missing required key".into() })?;
        let spec = match kind.as_str() {
            "coulomb" => PotentialSpec::Coulomb { nu: kv.f64("nu")? },
            "electromagnetic" => PotentialSpec::Electromagnetic { nu: kv.f64_or("nu", 0.0)?, a: kv.f64_or("a", 0.0)? },
            "remark14" => PotentialSpec::Remark14 { c: kv.f64("c")?, eps: kv.f64("eps")?, m: kv.f64_or("m", 0.0)? },
            "spin-coupled" => PotentialSpec::SpinCoupled {
                c: kv.f64_or("c", 0.0)?,
                b_re: kv.f64_or("b_re", 0.0)?,
                b_im: kv.f64_or("b_im", 0.0)?,
            },
            "radial-scalar" => PotentialSpec::RadialScalar { nu: kv.f64("nu")?, screening: kv.f64_or("screening", 0.0)? },
            "tabulated" => PotentialSpec::Tabulated { file: kv.str("file")?.into() },
            other => {
                return Err(Error::Schema { line, field: "kind".into(), message: format!("unknown potential kind `{other}`") })
            }
        };
        kv.finish()?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: &str| {
            Err(Error::Schema { line: 0, field: field.into(), message: message.into() })
        };
        match self {
            PotentialSpec::Remark14 { eps, m, .. } => {
                if *eps <= 0.0 {
                    return bad("eps", "must be positive");
                }
                if *m < 0.0 {
                    return bad("m", "must be non-negative");
                }
            }
            PotentialSpec::RadialScalar { nu, screening } => {
                if *nu < 0.0 {
                    return bad("nu", "radial scalar potentials must be non-negative");
                }
                if *screening < 0.0 {
                    return bad("screening", "must be non-negative");
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Builds the potential; relative table paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<MatrixPotential> {
        match self {
            PotentialSpec::Coulomb { nu } => MatrixPotential::coulomb(*nu),
            PotentialSpec::Electromagnetic { nu, a } => MatrixPotential::electromagnetic_radial(*nu, *a),
            PotentialSpec::Remark14 { c, eps, m } => MatrixPotential::remark14_family(*c, *eps, *m),
            PotentialSpec::SpinCoupled { c, b_re, b_im } => MatrixPotential::spin_coupled(*c, C64::new(*b_re, *b_im)),
            PotentialSpec::RadialScalar { .. } | PotentialSpec::Tabulated { .. } => self.radial_scalar(base)?.to_matrix(),
        }
    }

    /// The scalar profile, for the kinds that have one.
    pub fn radial_scalar(&self, base: &Path) -> Result<RadialScalarPotential> {
        match self {
            PotentialSpec::Coulomb { nu } if *nu >= 0.0 => Ok(RadialScalarPotential::coulomb(*nu)),
            PotentialSpec::RadialScalar { nu, screening } => Ok(RadialScalarPotential::yukawa(*nu, *screening)),
            PotentialSpec::Tabulated { file } => {
                let path = if file.is_absolute() { file.clone() } else { base.join(file) };
                let text = std::fs::read_to_string(&path)?;
                tabulated(&text, &path.display().to_string())
            }
            _ => Err(Error::Unsupported("potential is not a non-negative radial scalar".into())),
        }
    }
}

/// `r V(r)` interpolated linearly in `ln r`, held constant outside the table.
pub(crate) fn tabulated(text: &str, label: &str) -> Result<RadialScalarPotential> {
    let mut t = Vec::new();
    let mut rv = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parse = |s: &str, field: &str| {
            s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| Error::Schema {
                line: n + 1,
                field: field.into(),
                message: format!("`{s}` is not a finite number"),
            })
        };
        if cols.len() != 2 {
            return Err(Error::Schema { line: n + 1, field: "row".into(), message: "expected two columns r, V".into() });
        }
        let (r, v) = (parse(cols[0], "r")?, parse(cols[1], "V")?);
        if r <= 0.0 || v < 0.0 || t.last().is_some_and(|&p: &f64| r.ln() <= p) {
            return Err(Error::Schema {
                line: n + 1,
                field: "row".into(),
                message: "need increasing r > 0 and V >= 0".into(),
            });
        }
        t.push(r.ln());
        rv.push(r * v);
    }
    if t.len() < 2 {
        return Err(Error::Schema { line: 0, field: "table".into(), message: "need at least two rows".into() });
    }
    let profile = Arc::new(move |r: f64| {
        let s = r.ln();
        let k = t.partition_point(|&x| x <= s);
        let c = if k == 0 {
            rv[0]
        } else if k == t.len() {
            rv[t.len() - 1]
        } else {
            let w = (s - t[k - 1]) / (t[k] - t[k - 1]);
            rv[k - 1] * (1.0 - w) + rv[k] * w
        };
        c / r
    });
    Ok(RadialScalarPotential::new(format!("table {label}"), profile))
}
