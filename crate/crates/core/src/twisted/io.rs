//! On-disk layout: `<stem>.json` holds the ambient form, the comb atoms and
//! one grid descriptor per density; each density's samples go to
//! `<stem>.d<i>.bin` as little-endian (re, im) f64 pairs, row-major.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DensityOnSubspace, DiracComb, TwistedElement};
use crate::error::{Error, Result};
use crate::symplin::{SpaceRecord, Subspace, SubspaceRecord, SymplecticSpace, Vector};
use crate::C64;

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    point: Vec<f64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct DensityRecord {
    support: SubspaceRecord,
    offset: Vec<f64>,
    m: usize,
    half_width: f64,
    count: usize,
    file: String,
}

#[derive(Serialize, Deserialize)]
struct ElementRecord {
    space: SpaceRecord,
    comb: Vec<AtomRecord>,
    densities: Vec<DensityRecord>,
}

fn sibling(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub(crate) fn write_complex(path: &Path, data: &[C64]) -> Result<()> {
    let mut buf = Vec::with_capacity(16 * data.len());
    for z in data {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

pub(crate) fn read_complex(path: &Path, count: usize) -> Result<Vec<C64>> {
    let buf = fs::read(path)?;
    if buf.len() != 16 * count {
        return Err(Error::Format(format!("{}: expected {} bytes, found {}", path.display(), 16 * count, buf.len())));
    }
    Ok(buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[0..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..16].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect())
}

pub fn save_element(mu: &TwistedElement, stem: &Path) -> Result<()> {
    let mut densities = Vec::new();
    for (i, d) in mu.densities.iter().enumerate() {
        let path = sibling(stem, &format!(".d{i}.bin"));
        write_complex(&path, d.samples())?;
        densities.push(DensityRecord {
            support: d.support().record(),
            offset: d.offset().iter().cloned().collect(),
            m: d.m(),
            half_width: d.half_width(),
            count: d.node_count(),
            file: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        });
    }
    let rec = ElementRecord {
        space: mu.space().record(),
        comb: mu
            .comb
            .atoms()
            .iter()
            .map(|a| AtomRecord { point: a.point.iter().cloned().collect(), re: a.coeff.re, im: a.coeff.im })
            .collect(),
        densities,
    };
    fs::write(sibling(stem, ".json"), serde_json::to_string_pretty(&rec)?)?;
    Ok(())
}

pub fn load_element(stem: &Path) -> Result<TwistedElement> {
    let rec: ElementRecord = serde_json::from_str(&fs::read_to_string(sibling(stem, ".json"))?)?;
    let space = Arc::new(SymplecticSpace::from_record(&rec.space)?);
    let comb = DiracComb::from_atoms(
        &space,
        rec.comb.iter().map(|a| (Vector::from_vec(a.point.clone()), C64::new(a.re, a.im))),
    )?;
    let dir = stem.parent().unwrap_or_else(|| Path::new("."));
    let mut out = TwistedElement::from_comb(comb);
    for d in &rec.densities {
        let support = Subspace::from_record(&space, &d.support)?;
        let samples = read_complex(&dir.join(&d.file), d.count)?;
        out.densities.push(DensityOnSubspace::new(support, Vector::from_vec(d.offset.clone()), d.m, d.half_width, samples)?);
    }
    Ok(out)
}
