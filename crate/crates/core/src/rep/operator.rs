use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RepDescriptor;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::twisted::io::{read_complex, write_complex};
use crate::C64;

/// Threshold for the on-demand Hermitian and unitary flags.
pub const FLAG_TOL: f64 = 1e-10;

/// Dense operator together with the representation it acts in.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub rep: RepDescriptor,
    pub matrix: CMat,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct OperatorFlags {
    pub hermitian: bool,
    pub unitary: bool,
    pub hermitian_defect: f64,
    pub unitary_defect: f64,
}

#[derive(Serialize, Deserialize)]
struct DumpHeader {
    rep: RepDescriptor,
    rows: usize,
    cols: usize,
    flags: OperatorFlags,
    file: String,
}

impl OperatorMatrix {
    pub fn new(rep: RepDescriptor, matrix: CMat) -> Self {
        Self { rep, matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Spectral norm of `T - T^*`.
    pub fn hermitian_defect(&self) -> f64 {
        linalg::spectral_norm(&linalg::sub(&self.matrix, &linalg::adjoint(&self.matrix)))
    }

    /// Spectral norm of `T^* T - I`.
    pub fn unitary_defect(&self) -> f64 {
        let p = self.matrix.adjoint() * &self.matrix;
        linalg::spectral_norm(&linalg::sub(&p, &linalg::identity(self.dim())))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() < FLAG_TOL
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_defect() < FLAG_TOL
    }

    pub fn flags(&self) -> OperatorFlags {
        let hd = self.hermitian_defect();
        let ud = self.unitary_defect();
        OperatorFlags { hermitian: hd < FLAG_TOL, unitary: ud < FLAG_TOL, hermitian_defect: hd, unitary_defect: ud }
    }

    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }

    /// Writes `<stem>.bin` (row-major little-endian (re, im) f64 pairs) and
    /// `<stem>.json`.
    pub fn dump(&self, stem: &Path) -> Result<()> {
        let (r, c) = (self.matrix.nrows(), self.matrix.ncols());
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(self.matrix[(i, j)]);
            }
        }
        let bin = sibling(stem, ".bin");
        write_complex(&bin, &data)?;
        let header = DumpHeader {
            rep: self.rep.clone(),
            rows: r,
            cols: c,
            flags: self.flags(),
            file: bin.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        };
        fs::write(sibling(stem, ".json"), serde_json::to_string_pretty(&header)?)?;
        Ok(())
    }

    pub fn load(stem: &Path) -> Result<Self> {
        let header: DumpHeader = serde_json::from_str(&fs::read_to_string(sibling(stem, ".json"))?)?;
        let dir = stem.parent().unwrap_or_else(|| Path::new("."));
        let data = read_complex(&dir.join(&header.file), header.rows * header.cols)?;
        if header.rows == 0 && header.cols != 0 {
            return Err(Error::Format("empty operator".into()));
        }
        let matrix = CMat::from_fn(header.rows, header.cols, |i, j| data[i * header.cols + j]);
        Ok(Self { rep: header.rep, matrix })
    }
}

fn sibling(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

impl std::ops::Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { rep: self.rep.clone(), matrix: &self.matrix * &rhs.matrix }
    }
}

impl OperatorMatrix {
    pub fn adjoint(&self) -> Self {
        Self { rep: self.rep.clone(), matrix: linalg::adjoint(&self.matrix) }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { rep: self.rep.clone(), matrix: linalg::scale(&self.matrix, s) }
    }
}
