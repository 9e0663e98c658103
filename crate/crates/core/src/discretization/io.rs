//! Binary field container.
//!
//! Layout (all integers and floats little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `DHFIELD\0` |
//! | 4     | format version (`u32`, currently 1) |
//! | 1     | precision: 1 = complex64, 2 = complex128 |
//! | 1     | grid kind: 0 = Cartesian, 1 = radial |
//! | 24    | Cartesian: `f64` half-width, `u64` N, 8 zero bytes; radial: `f64` r_min, `f64` r_max, `u64` M |
//! | 4     | arity (`u32`, 2 or 4) |
//! | 8     | node count (`u64`) |
//! | ...   | payload, component-major: for each component, for each node, real then imaginary part |

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::field::Field;
use super::grid::{CartesianGrid, Grid, RadialGrid};
use crate::algebra::C64;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"DHFIELD\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Complex64,
    Complex128,
}

pub fn write_field<W: Write>(mut w: W, field: &Field, precision: Precision) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u8(match precision {
        Precision::Complex64 => 1,
        Precision::Complex128 => 2,
    })?;
    match field.grid() {
        Grid::Cartesian(g) => {
            w.write_u8(0)?;
            w.write_f64::<LittleEndian>(g.half_width())?;
            w.write_u64::<LittleEndian>(g.n() as u64)?;
            w.write_u64::<LittleEndian>(0)?;
        }
        Grid::Radial(g) => {
            w.write_u8(1)?;
            w.write_f64::<LittleEndian>(g.r_min())?;
            w.write_f64::<LittleEndian>(g.r_max())?;
            w.write_u64::<LittleEndian>(g.len() as u64)?;
        }
    }
    w.write_u32::<LittleEndian>(field.arity() as u32)?;
    w.write_u64::<LittleEndian>(field.len() as u64)?;
    for comp in field.components() {
        for v in comp {
            match precision {
                Precision::Complex64 => {
                    w.write_f32::<LittleEndian>(v.re as f32)?;
                    w.write_f32::<LittleEndian>(v.im as f32)?;
                }
                Precision::Complex128 => {
                    w.write_f64::<LittleEndian>(v.re)?;
                    w.write_f64::<LittleEndian>(v.im)?;
                }
            }
        }
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a field file (bad magic)".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported field format version {version}")));
    }
    let precision = match r.read_u8()? {
        1 => Precision::Complex64,
        2 => Precision::Complex128,
        p => return Err(Error::Format(format!("unknown precision tag {p}"))),
    };
    let grid: Grid = match r.read_u8()? {
        0 => {
            let l = r.read_f64::<LittleEndian>()?;
            let n = r.read_u64::<LittleEndian>()? as usize;
            r.read_u64::<LittleEndian>()?;
            CartesianGrid::new(l, n)?.into()
        }
        1 => {
            let lo = r.read_f64::<LittleEndian>()?;
            let hi = r.read_f64::<LittleEndian>()?;
            let m = r.read_u64::<LittleEndian>()? as usize;
            RadialGrid::new(lo, hi, m)?.into()
        }
        k => return Err(Error::Format(format!("unknown grid kind {k}"))),
    };
    let arity = r.read_u32::<LittleEndian>()? as usize;
    let nodes = r.read_u64::<LittleEndian>()? as usize;
    if nodes != grid.len() {
        return Err(Error::Format(format!("node count {nodes} does not match grid ({})", grid.len())));
    }
    let mut comps = Vec::with_capacity(arity.min(4));
    for _ in 0..arity.min(4) {
        let mut c = Vec::with_capacity(nodes);
        for _ in 0..nodes {
            let v = match precision {
                Precision::Complex64 => {
                    C64::new(r.read_f32::<LittleEndian>()? as f64, r.read_f32::<LittleEndian>()? as f64)
                }
                Precision::Complex128 => C64::new(r.read_f64::<LittleEndian>()?, r.read_f64::<LittleEndian>()?),
            };
            c.push(v);
        }
        comps.push(c);
    }
    if comps.len() != arity {
        return Err(Error::ArityMismatch { expected: 4, found: arity });
    }
    Field::from_components(grid, comps)
}
