//! Named grid presets, selectable with `DIRAC_HARDY_GRID_PROFILE`.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use dirac_hardy_core::{CartesianGrid, RadialGrid};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridProfile {
    /// N = 16 box, 1024 radial nodes. For smoke runs.
    Coarse,
    /// N = 32 box, 2048 radial nodes.
    Standard,
    /// N = 64 box, 4096 radial nodes.
    Fine,
}

impl fmt::Display for GridProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridProfile::Coarse => "coarse",
            GridProfile::Standard => "standard",
            GridProfile::Fine => "fine",
        })
    }
}

impl FromStr for GridProfile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <GridProfile as ValueEnum>::from_str(s, true)
    }
}

/// Resolved grids after applying the profile and explicit overrides.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Grids {
    pub profile: GridProfile,
    pub cartesian: CartesianGrid,
    pub radial: RadialGrid,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GridOverrides {
    pub half_width: Option<f64>,
    pub n: Option<usize>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub radial_nodes: Option<usize>,
}

impl GridProfile {
    fn cartesian_n(self) -> usize {
        match self {
            GridProfile::Coarse => 16,
            GridProfile::Standard => 32,
            GridProfile::Fine => 64,
        }
    }

    fn radial_nodes(self) -> usize {
        match self {
            GridProfile::Coarse => 1024,
            GridProfile::Standard => 2048,
            GridProfile::Fine => 4096,
        }
    }

    /// Grids for this profile. A command-specific `base` radial grid
    /// replaces the profile's; explicit overrides win over both.
    pub fn resolve(self, o: &GridOverrides, base: Option<RadialGrid>) -> CliResult<Grids> {
        let nodes = base.map_or(self.radial_nodes(), |b| b.len());
        let base = base.unwrap_or_default();
        let cartesian = CartesianGrid::new(o.half_width.unwrap_or(8.0), o.n.unwrap_or(self.cartesian_n()))
            .map_err(|e| CliError::Config(e.to_string()))?;
        let radial = RadialGrid::new(
            o.r_min.unwrap_or(base.r_min()),
            o.r_max.unwrap_or(base.r_max()),
            o.radial_nodes.unwrap_or(nodes),
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Grids { profile: self, cartesian, radial })
    }
}
