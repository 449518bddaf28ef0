//! `VFLD1` binary field files.
//!
//! Layout: one JSON header line terminated by `\n`, then `ncomp·n³`
//! little-endian `f64` samples, component-major, `z` fastest within a
//! component.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymmetricTensorField, VectorField};
use crate::grid::GridSpec;

pub const MAGIC: &str = "VFLD1";
pub const DTYPE: &str = "f64le";
pub const ORDER: &str = "comp,x,y,z(z-fastest)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VfldHeader {
    pub magic: String,
    pub n: usize,
    pub lx: f64,
    pub ncomp: usize,
    pub dtype: String,
    pub order: String,
    pub time: f64,
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Metadata carried alongside the samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldMeta {
    pub time: f64,
    pub nu: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct FieldFile {
    pub header: VfldHeader,
    pub components: Vec<ScalarField>,
}

impl FieldFile {
    fn from_components(components: Vec<ScalarField>, meta: FieldMeta) -> Self {
        let g = *components[0].grid();
        let components: Vec<ScalarField> = components.iter().map(ScalarField::to_physical).collect();
        Self {
            header: VfldHeader {
                magic: MAGIC.into(),
                n: g.n(),
                lx: g.length(),
                ncomp: components.len(),
                dtype: DTYPE.into(),
                order: ORDER.into(),
                time: meta.time,
                nu: meta.nu,
                seed: meta.seed,
            },
            components,
        }
    }

    pub fn from_scalar(f: &ScalarField, meta: FieldMeta) -> Self {
        Self::from_components(vec![f.clone()], meta)
    }

    pub fn from_vector(v: &VectorField, meta: FieldMeta) -> Self {
        Self::from_components(v.components().to_vec(), meta)
    }

    pub fn from_tensor(t: &SymmetricTensorField, meta: FieldMeta) -> Self {
        Self::from_components(t.components().to_vec(), meta)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::with_length(self.header.n, self.header.lx)
    }

    pub fn meta(&self) -> FieldMeta {
        FieldMeta {
            time: self.header.time,
            nu: self.header.nu,
            seed: self.header.seed,
        }
    }

    pub fn into_vector(self) -> Result<VectorField> {
        let ncomp = self.header.ncomp;
        let comps: [ScalarField; 3] = self
            .components
            .try_into()
            .map_err(|_| Error::Format(format!("expected 3 components, file has {ncomp}")))?;
        VectorField::new(comps)
    }

    pub fn into_tensor(self) -> Result<SymmetricTensorField> {
        let ncomp = self.header.ncomp;
        let comps: [ScalarField; 6] = self
            .components
            .try_into()
            .map_err(|_| Error::Format(format!("expected 6 components, file has {ncomp}")))?;
        SymmetricTensorField::new(comps)
    }

    pub fn into_scalar(self) -> Result<ScalarField> {
        let ncomp = self.header.ncomp;
        let mut c = self.components;
        if c.len() != 1 {
            return Err(Error::Format(format!("expected 1 component, file has {ncomp}")));
        }
        Ok(c.remove(0))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for c in &self.components {
            for v in c.physical()? {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        if !line.ends_with('\n') {
            return Err(Error::Format("missing header terminator".into()));
        }
        let header: VfldHeader = serde_json::from_str(line.trim_end())
            .map_err(|e| Error::Format(format!("bad header: {e}")))?;
        if header.magic != MAGIC {
            return Err(Error::Format(format!("bad magic {:?}", header.magic)));
        }
        if header.dtype != DTYPE {
            return Err(Error::Format(format!("unsupported dtype {:?}", header.dtype)));
        }
        if ![1, 3, 6].contains(&header.ncomp) {
            return Err(Error::Format(format!("unsupported ncomp {}", header.ncomp)));
        }
        let grid = GridSpec::with_length(header.n, header.lx)?;
        let mut buf = vec![0u8; grid.len() * 8];
        let mut components = Vec::with_capacity(header.ncomp);
        for _ in 0..header.ncomp {
            r.read_exact(&mut buf)
                .map_err(|e| Error::Format(format!("truncated payload: {e}")))?;
            let vals = buf
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                .collect();
            components.push(ScalarField::from_physical(grid, vals)?);
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        Ok(Self { header, components })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FieldFile {
        let g = GridSpec::new(4).unwrap();
        let v = VectorField::from_fn(g, |x, y, z| [x, y * 2.0, -z]);
        FieldFile::from_vector(
            &v,
            FieldMeta {
                time: 1.5,
                nu: 1e-3,
                seed: Some(7),
            },
        )
    }

    #[test]
    fn header_line_and_size() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        let head = std::str::from_utf8(&buf[..nl]).unwrap();
        assert!(head.starts_with(r#"{"magic":"VFLD1","n":4,"#));
        assert!(head.contains(r#""order":"comp,x,y,z(z-fastest)""#));
        assert_eq!(buf.len() - nl - 1, 3 * 64 * 8);
    }

    #[test]
    fn round_trip() {
        let f = sample();
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        let back = FieldFile::read_from(&buf[..]).unwrap();
        assert_eq!(back.header, f.header);
        assert_eq!(back.components, f.components);
    }

    #[test]
    fn component_major_z_fastest() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        let vals: Vec<f64> = buf[nl + 1..]
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        let dx = std::f64::consts::PI / 2.0;
        // component 0 is x: constant along the fastest (z) index
        assert_eq!(vals[0], vals[1]);
        assert_eq!(vals[16], dx);
        // component 2 is −z, offset by 2·n³
        assert_eq!(vals[128 + 1], -dx);
    }

    fn corrupt(from: &str, to: &str) -> Result<FieldFile> {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        let s = String::from_utf8_lossy(&buf).replacen(from, to, 1);
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        let head = s.lines().next().unwrap().to_string();
        let mut out = head.into_bytes();
        out.push(b'\n');
        out.extend_from_slice(&buf[nl + 1..]);
        FieldFile::read_from(&out[..])
    }

    #[test]
    fn rejects_bad_magic_and_dtype() {
        assert!(matches!(corrupt("VFLD1", "VFLD2"), Err(Error::Format(_))));
        assert!(matches!(corrupt("f64le", "f32le"), Err(Error::Format(_))));
    }

    #[test]
    fn rejects_truncation() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(FieldFile::read_from(&buf[..]).is_err());
    }

    #[test]
    fn wrong_arity_conversion() {
        let f = sample();
        assert!(f.clone().into_tensor().is_err());
        assert!(f.into_vector().is_ok());
    }
}
