//! Test-field specs, schema version 1.
//!
//! ```text
//! kind=gaussian-packet center=0,0,0 width=1 k=0,0,0 component=0
//! kind=gaussian-packet seed=7 packets=2            # random packets
//! kind=band-limited-random seed=3 k_max=2 envelope=1.1 zero_mean=1
//! kind=extremizer-family family=psi0 delta=0.2     # eps, m default to the run's
//! kind=radial-channel kappa=-1 power=0 decay=1 lower_re=0 lower_im=1
//! kind=from-file file=f.dhf                        # radial files add kappa=, channel=
//! ```
//!
//! `arity` defaults to what the command needs. Every resolved value is
//! echoed into the report.

use std::path::{Path, PathBuf};

use dirac_hardy_core::discretization::io::read_field;
use dirac_hardy_core::fields::{packet_corpus, sample_packets, BandLimitedSpec, GaussianPacket};
use dirac_hardy_core::keyvalue::KeyValues;
use dirac_hardy_core::operators::{PauliChannel, RadialChannel};
use dirac_hardy_core::verification::{ExtremizerFamily, VerifyInput};
use dirac_hardy_core::{CartesianGrid, Error, Grid, RadialGrid, Result, C64};
use serde::Serialize;

/// Values a spec may inherit from the command line.
#[derive(Debug, Clone, Copy)]
pub struct FieldDefaults {
    pub arity: usize,
    pub seed: u64,
    pub eps: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    GaussianPacket {
        arity: usize,
        center: [f64; 3],
        width: f64,
        k: [f64; 3],
        component: usize,
    },
    RandomPackets {
        arity: usize,
        seed: u64,
        packets: usize,
    },
    BandLimitedRandom {
        arity: usize,
        seed: u64,
        k_max: f64,
        envelope: Option<f64>,
        zero_mean: bool,
    },
    ExtremizerFamily {
        arity: usize,
        family: ExtremizerFamily,
    },
    RadialChannel {
        arity: usize,
        kappa: i32,
        power: f64,
        decay: f64,
        lower_re: f64,
        lower_im: f64,
    },
    FromFile {
        file: PathBuf,
        kappa: Option<i32>,
        channel: Option<String>,
    },
}

fn schema(field: &str, message: impl Into<String>) -> Error {
    Error::Schema { line: 0, field: field.into(), message: message.into() }
}

fn triple(kv: &mut KeyValues, key: &str, default: [f64; 3]) -> Result<[f64; 3]> {
    match kv.opt_list(key)? {
        None => Ok(default),
        Some(v) if v.len() == 3 => Ok([v[0], v[1], v[2]]),
        Some(v) => Err(schema(key, format!("expected 3 numbers, got {}", v.len()))),
    }
}

fn flag(kv: &mut KeyValues, key: &str) -> Result<bool> {
    match kv.opt_str(key) {
        None => Ok(false),
        Some((v, line)) => match v.as_str() {
            "1" | "true" | "yes" => Ok(true),
            "0" | "false" | "no" => Ok(false),
            _ => Err(Error::Schema { line, field: key.into(), message: format!("expected a boolean, got `{v}`") }),
        },
    }
}

fn count(kv: &mut KeyValues, key: &str, default: u64) -> Result<u64> {
    Ok(kv.opt_u64(key)?.unwrap_or(default))
}

fn arity(kv: &mut KeyValues, d: &FieldDefaults) -> Result<usize> {
    let a = count(kv, "arity", d.arity as u64)? as usize;
    if !matches!(a, 2 | 4) {
        return Err(schema("arity", format!("must be 2 or 4, got {a}")));
    }
    Ok(a)
}

fn kappa(kv: &mut KeyValues) -> Result<Option<i32>> {
    match kv.opt_str("kappa") {
        None => Ok(None),
        Some((v, line)) => match v.parse::<i32>() {
            Ok(k) if k != 0 => Ok(Some(k)),
            _ => Err(Error::Schema { line, field: "kappa".into(), message: format!("expected a non-zero integer, got `{v}`") }),
        },
    }
}

/// Parses a field spec; missing values come from `defaults`.
pub fn parse_field_spec(text: &str, defaults: &FieldDefaults) -> Result<FieldSpec> {
    let mut kv = KeyValues::parse(text)?;
    if let Some((v, line)) = kv.opt_str("version") {
        if v != "1" {
            return Err(Error::Schema { line, field: "version".into(), message: format!("unsupported version {v}") });
        }
    }
    let (kind, line) = kv.opt_str("kind").ok_or_else(|| schema("kind", "missing required key"))?;
    let spec = match kind.as_str() {
        "gaussian-packet" if kv.contains("seed") || kv.contains("packets") => FieldSpec::RandomPackets {
            arity: arity(&mut kv, defaults)?,
            seed: count(&mut kv, "seed", defaults.seed)?,
            packets: count(&mut kv, "packets", 1)? as usize,
        },
        "gaussian-packet" => {
            let arity = arity(&mut kv, defaults)?;
            let component = count(&mut kv, "component", 0)? as usize;
            if component >= arity {
                return Err(schema("component", format!("must be below arity {arity}")));
            }
            FieldSpec::GaussianPacket {
                arity,
                center: triple(&mut kv, "center", [0.0; 3])?,
                width: kv.f64_or("width", 1.0)?,
                k: triple(&mut kv, "k", [0.0; 3])?,
                component,
            }
        }
        "band-limited-random" => FieldSpec::BandLimitedRandom {
            arity: arity(&mut kv, defaults)?,
            seed: count(&mut kv, "seed", defaults.seed)?,
            k_max: kv.f64_or("k_max", 2.0)?,
            envelope: kv.opt_f64("envelope")?,
            zero_mean: flag(&mut kv, "zero_mean")?,
        },
        "extremizer-family" => {
            let arity = arity(&mut kv, defaults)?;
            let (name, fline) = kv.opt_str("family").ok_or_else(|| schema("family", "missing required key"))?;
            let eps = kv.f64_or("eps", defaults.eps)?;
            let m = kv.f64_or("m", defaults.mass)?;
            let family = match name.replace('-', "_").as_str() {
                "psi0" => ExtremizerFamily::psi0(eps, m, kv.f64_or("delta", 0.1)?)?,
                "exp_lambda" => match kv.opt_f64("lambda")? {
                    Some(l) => ExtremizerFamily::exp_lambda(eps, m, l)?,
                    None => ExtremizerFamily::exp_lambda_extremal(eps, m)?,
                },
                "phi0_radial" => ExtremizerFamily::phi0_radial(eps, m, kv.f64_or("cutoff", 0.0)?)?,
                other => {
                    return Err(Error::Schema {
                        line: fline,
                        field: "family".into(),
                        message: format!("unknown family `{other}` (psi0, exp_lambda, phi0_radial)"),
                    })
                }
            };
            FieldSpec::ExtremizerFamily { arity, family }
        }
        "radial-channel" => FieldSpec::RadialChannel {
            arity: arity(&mut kv, defaults)?,
            kappa: kappa(&mut kv)?.unwrap_or(-1),
            power: kv.f64_or("power", 0.0)?,
            decay: kv.f64_or("decay", 1.0)?,
            lower_re: kv.f64_or("lower_re", 0.0)?,
            lower_im: kv.f64_or("lower_im", 1.0)?,
        },
        "from-file" => FieldSpec::FromFile {
            file: kv.str("file")?.into(),
            kappa: kappa(&mut kv)?,
            channel: kv.opt_str("channel").map(|(v, _)| v),
        },
        other => {
            return Err(Error::Schema { line, field: "kind".into(), message: format!("unknown field kind `{other}`") })
        }
    };
    kv.finish()?;
    spec.validate()?;
    Ok(spec)
}

impl FieldSpec {
    fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::GaussianPacket { width, .. } if !(*width > 0.0) => Err(schema("width", "must be positive")),
            FieldSpec::RandomPackets { packets: 0, .. } => Err(schema("packets", "must be at least 1")),
            FieldSpec::BandLimitedRandom { k_max, .. } if !(*k_max > 0.0) => Err(schema("k_max", "must be positive")),
            FieldSpec::BandLimitedRandom { envelope: Some(e), .. } if !(*e > 0.0) => {
                Err(schema("envelope", "must be positive"))
            }
            FieldSpec::RadialChannel { decay, .. } if !(*decay > 0.0) => Err(schema("decay", "must be positive")),
            FieldSpec::FromFile { channel: Some(c), .. } if c != "pauli" && c != "dirac" => {
                Err(schema("channel", "must be pauli or dirac"))
            }
            _ => Ok(()),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            FieldSpec::RandomPackets { seed, .. } | FieldSpec::BandLimitedRandom { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// Samples the field. Cartesian kinds use `cart`, channel kinds `radial`;
    /// relative file paths resolve against `base`.
    pub fn build(&self, cart: CartesianGrid, radial: RadialGrid, base: &Path) -> Result<VerifyInput> {
        Ok(match self {
            FieldSpec::GaussianPacket { arity, center, width, k, component } => {
                let mut polarization = vec![C64::new(0.0, 0.0); *arity];
                polarization[*component] = C64::new(1.0, 0.0);
                let p = GaussianPacket { center: *center, width: *width, wavevector: *k, polarization };
                VerifyInput::Cartesian(sample_packets(&[p], cart)?)
            }
            FieldSpec::RandomPackets { arity, seed, packets } => {
                let corpus = packet_corpus(*seed, 1, *arity, *packets);
                VerifyInput::Cartesian(sample_packets(&corpus[0], cart)?)
            }
            FieldSpec::BandLimitedRandom { arity, seed, k_max, envelope, zero_mean } => {
                let spec = BandLimitedSpec { seed: *seed, arity: *arity, k_max: *k_max, envelope: *envelope, zero_mean: *zero_mean };
                VerifyInput::Cartesian(spec.sample(cart)?)
            }
            FieldSpec::ExtremizerFamily { arity: 2, family } => VerifyInput::Pauli(family.pauli(radial)?),
            FieldSpec::ExtremizerFamily { family, .. } => VerifyInput::Dirac(family.dirac(radial)?),
            FieldSpec::RadialChannel { arity, kappa, power, decay, lower_re, lower_im } => {
                let f = |r: f64| C64::new(r.powf(*power) * (-decay * r).exp(), 0.0);
                if *arity == 2 {
                    VerifyInput::Pauli(PauliChannel::from_fn(*kappa, radial, f)?)
                } else {
                    let g = C64::new(*lower_re, *lower_im);
                    VerifyInput::Dirac(RadialChannel::from_fn(*kappa, radial, |r| (f(r), g * f(r)))?)
                }
            }
            FieldSpec::FromFile { file, kappa, channel } => {
                let path = if file.is_absolute() { file.clone() } else { base.join(file) };
                let field = read_field(std::fs::File::open(&path)?)?;
                match *field.grid() {
                    Grid::Cartesian(_) => VerifyInput::Cartesian(field),
                    Grid::Radial(g) => {
                        let kappa = kappa.ok_or_else(|| schema("kappa", "radial files need kappa"))?;
                        match channel.as_deref() {
                            Some("dirac") => {
                                field.require_arity(2)?;
                                VerifyInput::Dirac(RadialChannel::new(
                                    kappa,
                                    g,
                                    field.component(0).to_vec(),
                                    field.component(1).to_vec(),
                                )?)
                            }
                            _ => VerifyInput::Pauli(PauliChannel::new(kappa, g, field.component(0).to_vec())?),
                        }
                    }
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: FieldDefaults = FieldDefaults { arity: 4, seed: 11, eps: 1.0, mass: 0.5 };

    #[test]
    fn defaults_are_resolved() {
        let s = parse_field_spec("kind=band-limited-random", &D).unwrap();
        assert_eq!(
            s,
            FieldSpec::BandLimitedRandom { arity: 4, seed: 11, k_max: 2.0, envelope: None, zero_mean: false }
        );
        let s = parse_field_spec("kind=extremizer-family family=psi0 arity=4", &D).unwrap();
        match s {
            FieldSpec::ExtremizerFamily { family, .. } => {
                assert_eq!((family.eps, family.mass, family.exponent), (1.0, 0.5, 0.1))
            }
            other => panic!("{other:?}"),
        }
        let js = serde_json::to_string(&parse_field_spec("kind=gaussian-packet", &D).unwrap()).unwrap();
        assert!(js.contains("\"kind\":\"gaussian-packet\"") && js.contains("\"width\":1.0"));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let cases = [
            ("kind=gaussian-packet width=abc", "width"),
            ("kind=gaussian-packet colour=red", "colour"),
            ("kind=nope", "kind"),
            ("kind=band-limited-random arity=3", "arity"),
            ("kind=extremizer-family family=x", "family"),
            ("kind=gaussian-packet\ncenter=1,2", "center"),
        ];
        for (text, field) in cases {
            match parse_field_spec(text, &D) {
                Err(Error::Schema { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn builds_each_kind() {
        let cart = CartesianGrid::new(6.0, 8).unwrap();
        let radial = RadialGrid::new(1e-3, 20.0, 256).unwrap();
        for text in [
            "kind=gaussian-packet component=2",
            "kind=gaussian-packet seed=3 packets=2",
            "kind=band-limited-random",
            "kind=extremizer-family family=exp_lambda arity=2",
            "kind=radial-channel kappa=2",
        ] {
            let spec = parse_field_spec(text, &D).unwrap();
            spec.build(cart, radial, Path::new(".")).unwrap();
        }
    }
}
