use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::symplin::{SymplecticSpace, Vector};
use crate::C64;

/// Clock and shift representation of Z_N^{2d} on C^{N^d}.
///
/// `X|j> = |j+1>`, `Z|j> = w^j |j>` with `w = e^{2 pi i/N}`, so that
/// `XZ = w^{-1} ZX`, and `W(a, b) = e^{-i pi a.b/N} Z^b X^a`. Points are integer
/// vectors (a, b) in a space carrying the form `(2 pi/N) J`, which makes
/// `W(xi) W(eta) = e^{(i/2) sigma(xi, eta)} W(xi + eta)` exact for integer sums.
#[derive(Clone, Debug)]
pub struct FiniteWeylRep {
    n: usize,
    d: usize,
    space: Arc<SymplecticSpace>,
    roots: Vec<C64>,
}

impl FiniteWeylRep {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 2 || d == 0 {
            return Err(Error::Precondition("finite Weyl system needs N >= 2, d >= 1".into()));
        }
        let dim = n.checked_pow(d as u32).ok_or_else(|| Error::Precondition("too large".into()))?;
        if dim > 4096 {
            return Err(Error::Precondition(format!("Hilbert dimension {dim} too large")));
        }
        let std = SymplecticSpace::standard(d);
        let form: DMatrix<f64> = std.form() * (2.0 * PI / n as f64);
        let space = Arc::new(SymplecticSpace::new(form)?);
        let roots = (0..2 * n).map(|r| C64::from_polar(1.0, PI * r as f64 / n as f64)).collect();
        Ok(Self { n, d, space, roots })
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// `e^{i pi r / N}`
    fn root(&self, r: i64) -> C64 {
        self.roots[r.rem_euclid(2 * self.n as i64) as usize]
    }

    pub fn integer_point(&self, xi: &Vector) -> Result<(Vec<i64>, Vec<i64>)> {
        if xi.len() != 2 * self.d {
            return Err(Error::DimensionMismatch { expected: 2 * self.d, found: xi.len() });
        }
        let mut out = Vec::with_capacity(xi.len());
        for &x in xi.iter() {
            let r = x.round();
            if (x - r).abs() > 1e-9 {
                return Err(Error::Precondition(format!("{x} is not an integer lattice coordinate")));
            }
            out.push(r as i64);
        }
        let b = out.split_off(self.d);
        Ok((out, b))
    }

    fn digits(&self, mut j: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for x in out.iter_mut().rev() {
            *x = j % self.n;
            j /= self.n;
        }
        out
    }

    /// Nonzero pattern of W(a, b): column l maps to row `l + a`, with the
    /// given phase.
    fn entries(&self, a: &[i64], b: &[i64]) -> Vec<(usize, usize, C64)> {
        let n = self.n as i64;
        let ab: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (0..self.dim())
            .map(|l| {
                let dl = self.digits(l);
                let mut row = 0usize;
                let mut bj = 0i64;
                for t in 0..self.d {
                    let j = (dl[t] as i64 + a[t]).rem_euclid(n);
                    row = row * self.n + j as usize;
                    bj += b[t] * j;
                }
                (row, l, self.root(2 * bj - ab))
            })
            .collect()
    }

    pub fn weyl_matrix(&self, xi: &Vector) -> Result<CMat> {
        let (a, b) = self.integer_point(xi)?;
        let mut w = linalg::zeros(self.dim(), self.dim());
        for (r, c, z) in self.entries(&a, &b) {
            w[(r, c)] = z;
        }
        Ok(w)
    }

    pub fn apply_weyl(&self, xi: &Vector, v: &mut [C64]) -> Result<()> {
        let (a, b) = self.integer_point(xi)?;
        let mut out = vec![C64::default(); v.len()];
        for (r, c, z) in self.entries(&a, &b) {
            out[r] = z * v[c];
        }
        v.copy_from_slice(&out);
        Ok(())
    }

    pub fn apply_weyl_adjoint(&self, xi: &Vector, v: &mut [C64]) -> Result<()> {
        let (a, b) = self.integer_point(xi)?;
        let mut out = vec![C64::default(); v.len()];
        for (r, c, z) in self.entries(&a, &b) {
            out[c] = z.conj() * v[r];
        }
        v.copy_from_slice(&out);
        Ok(())
    }

    /// Shift X on degree of freedom `t`.
    pub fn shift(&self, t: usize) -> Result<CMat> {
        let mut xi = Vector::zeros(2 * self.d);
        xi[t] = 1.0;
        self.weyl_matrix(&xi)
    }

    /// Clock Z on degree of freedom `t`.
    pub fn clock(&self, t: usize) -> Result<CMat> {
        let mut xi = Vector::zeros(2 * self.d);
        xi[self.d + t] = 1.0;
        self.weyl_matrix(&xi)
    }

    /// All points of Z_N^{2d} with coordinates in 0..N.
    pub fn lattice_points(&self) -> Vec<Vector> {
        let total = self.n.pow(2 * self.d as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = Vector::zeros(2 * self.d);
                for t in (0..2 * self.d).rev() {
                    v[t] = (idx % self.n) as f64;
                    idx /= self.n;
                }
                v
            })
            .collect()
    }

    /// `sigma(xi, eta) mod 2 pi` as an integer multiple of `2 pi / N`.
    pub fn sigma_units(&self, xi: &Vector, eta: &Vector) -> Result<i64> {
        let (a, b) = self.integer_point(xi)?;
        let (c, e) = self.integer_point(eta)?;
        let s: i64 = (0..self.d).map(|t| b[t] * c[t] - a[t] * e[t]).sum();
        Ok(s.rem_euclid(self.n as i64))
    }
}
