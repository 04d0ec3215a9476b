use std::sync::Arc;

use nalgebra::DMatrix;

use super::axis::{circulant_tensor, grid_point, Axis};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::symplin::{classify, lattice_intersect, Subspace, SymplecticSpace, Vector};
use crate::C64;

/// Transversal Lagrangian pair Xi = X + X*, with X* identified with the dual
/// of X through `<x, k> = sigma(k, x)`.
#[derive(Clone, Debug)]
pub struct PhaseSpaceSplit {
    x: Subspace,
    xstar: Subspace,
    decomp: DMatrix<f64>,
    pairing: DMatrix<f64>,
}

impl PhaseSpaceSplit {
    pub fn new(x: Subspace, xstar: Subspace) -> Result<Self> {
        if !classify(&x).lagrangian || !classify(&xstar).lagrangian {
            return Err(Error::Precondition("split components must be Lagrangian".into()));
        }
        if !lattice_intersect(&x, &xstar)?.is_zero() {
            return Err(Error::Precondition("split components must be transversal".into()));
        }
        let space = x.space().clone();
        let d = x.dim();
        let mut full = DMatrix::zeros(space.dim(), 2 * d);
        full.columns_mut(0, d).copy_from(x.basis());
        full.columns_mut(d, d).copy_from(xstar.basis());
        let decomp = full.try_inverse().ok_or_else(|| Error::Numerical("split is singular".into()))?;
        let pairing = x.basis().transpose() * space.form().transpose() * xstar.basis();
        Ok(Self { x, xstar, decomp, pairing })
    }

    /// Position axes span(e_1..e_n), momentum axes span(e_{n+1}..e_{2n}).
    pub fn standard(space: &Arc<SymplecticSpace>) -> Result<Self> {
        let n = space.degrees();
        let x = Subspace::axes(space, &(0..n).collect::<Vec<_>>())?;
        let xs = Subspace::axes(space, &(n..2 * n).collect::<Vec<_>>())?;
        Self::new(x, xs)
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        self.x.space()
    }

    pub fn x(&self) -> &Subspace {
        &self.x
    }

    pub fn xstar(&self) -> &Subspace {
        &self.xstar
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// `P_{ij} = sigma(f_j, e_i)` for the stored bases e of X and f of X*.
    pub fn pairing(&self) -> &DMatrix<f64> {
        &self.pairing
    }

    /// Position coordinates of the X-part and the covector `k` of the X*-part,
    /// so that `<x, k> = xvec . kvec`.
    pub fn coords(&self, xi: &Vector) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let c = &self.decomp * xi;
        let xvec: Vec<f64> = c.rows(0, d).iter().cloned().collect();
        let kvec = &self.pairing * c.rows(d, d);
        (xvec, kvec.iter().cloned().collect())
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn vector(&self, xvec: &[f64], kvec: &[f64]) -> Result<Vector> {
        let d = self.dim();
        if xvec.len() != d || kvec.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: xvec.len().max(kvec.len()) });
        }
        let pinv = self.pairing.clone().try_inverse().ok_or_else(|| Error::Numerical("singular pairing".into()))?;
        let b = pinv * Vector::from_column_slice(kvec);
        Ok(self.x.basis() * Vector::from_column_slice(xvec) + self.xstar.basis() * b)
    }
}

/// Schrodinger representation on a periodic grid over X, with
/// `W(xi) = e^{-i<x,k>/2} e^{i<q,k>} e^{-i<x,p>}`.
#[derive(Clone, Debug)]
pub struct GridRep {
    split: PhaseSpaceSplit,
    axis: Axis,
}

impl GridRep {
    pub fn new(split: PhaseSpaceSplit, m: usize, l: f64) -> Result<Self> {
        if m < 2 || !(l > 0.0) {
            return Err(Error::Precondition("grid needs m >= 2 and L > 0".into()));
        }
        let n = m.checked_pow(split.dim() as u32).ok_or_else(|| Error::Precondition("grid too large".into()))?;
        if n > 1 << 16 {
            return Err(Error::Precondition(format!("grid dimension {n} exceeds the dense budget")));
        }
        Ok(Self { split, axis: Axis::new(m, l) })
    }

    /// Standard split of R^{2d}.
    pub fn standard(d: usize, m: usize, l: f64) -> Result<Self> {
        let space = Arc::new(SymplecticSpace::standard(d));
        Self::new(PhaseSpaceSplit::standard(&space)?, m, l)
    }

    /// Grid with `L = sqrt(pi m / 2)`, so that the position and momentum
    /// boxes coincide.
    pub fn balanced(d: usize, m: usize) -> Result<Self> {
        Self::standard(d, m, (std::f64::consts::PI * m as f64 / 2.0).sqrt())
    }

    pub fn split(&self) -> &PhaseSpaceSplit {
        &self.split
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        self.split.space()
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn d(&self) -> usize {
        self.split.dim()
    }

    pub fn m(&self) -> usize {
        self.axis.m
    }

    pub fn l(&self) -> f64 {
        self.axis.l
    }

    pub fn h(&self) -> f64 {
        self.axis.h
    }

    pub fn dim(&self) -> usize {
        self.m().pow(self.d() as u32)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.d()];
        grid_point(&self.axis, idx, self.d(), &mut p);
        p
    }

    fn phases(&self, kvec: &[f64], shift: f64, sign: f64) -> Vec<C64> {
        let d = self.d();
        let mut p = vec![0.0; d];
        (0..self.dim())
            .map(|j| {
                grid_point(&self.axis, j, d, &mut p);
                let kq: f64 = p.iter().zip(kvec).map(|(a, b)| a * b).sum();
                C64::from_polar(1.0, sign * (kq - shift))
            })
            .collect()
    }

    pub fn apply_weyl(&self, xi: &Vector, v: &mut [C64]) {
        let (x, k) = self.split.coords(xi);
        let d = self.d();
        for a in 0..d {
            self.axis.translate(v, d, a, x[a]);
        }
        let xk: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
        for (z, ph) in v.iter_mut().zip(self.phases(&k, 0.5 * xk, 1.0)) {
            *z *= ph;
        }
    }

    pub fn apply_weyl_adjoint(&self, xi: &Vector, v: &mut [C64]) {
        let (x, k) = self.split.coords(xi);
        let d = self.d();
        let xk: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
        for (z, ph) in v.iter_mut().zip(self.phases(&k, 0.5 * xk, -1.0)) {
            *z *= ph;
        }
        for a in 0..d {
            self.axis.translate(v, d, a, -x[a]);
        }
    }

    pub fn weyl_matrix(&self, xi: &Vector) -> CMat {
        let (x, k) = self.split.coords(xi);
        let xk: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
        let kern: Vec<Vec<C64>> = x.iter().map(|&xa| self.axis.translation_kernel(xa)).collect();
        circulant_tensor(self.m(), &kern, &self.phases(&k, 0.5 * xk, 1.0))
    }

    /// Multiplication by `v(q)`.
    pub fn position_function(&self, v: impl Fn(&[f64]) -> C64) -> CMat {
        let vals: Vec<C64> = (0..self.dim()).map(|j| v(&self.point(j))).collect();
        linalg::diag(&vals)
    }

    /// Fourier multiplier `g(p)` on the momentum lattice.
    pub fn momentum_function(&self, g: impl Fn(&[f64]) -> C64) -> CMat {
        let d = self.d();
        let m = self.m();
        // d-dimensional circulant: inverse FFT of the sampled symbol
        let n = self.dim();
        let mut buf = vec![C64::default(); n];
        let mut kv = vec![0.0; d];
        for (idx, z) in buf.iter_mut().enumerate() {
            let mut r = idx;
            for a in (0..d).rev() {
                kv[a] = self.axis.freqs()[r % m];
                r /= m;
            }
            *z = g(&kv);
        }
        let mut kernel = buf;
        // turn the symbol into the kernel: apply inverse transform along each axis
        for a in 0..d {
            inverse_along(&self.axis, &mut kernel, d, a);
        }
        let mut mat = linalg::zeros(n, n);
        let mut dj = vec![0usize; d];
        let mut dl = vec![0usize; d];
        for l in 0..n {
            super::axis::split(l, m, &mut dl);
            for j in 0..n {
                super::axis::split(j, m, &mut dj);
                let mut r = 0usize;
                for a in 0..d {
                    r = r * m + (dj[a] + m - dl[a]) % m;
                }
                mat[(j, l)] = kernel[r];
            }
        }
        mat
    }

    /// Position operator along axis `a`.
    pub fn q(&self, a: usize) -> CMat {
        self.position_function(|p| C64::new(p[a], 0.0))
    }

    /// Momentum operator `-i d/dq_a`.
    pub fn p(&self, a: usize) -> CMat {
        self.momentum_function(|k| C64::new(k[a], 0.0))
    }

    /// `phi(xi) = <q, k> - <x, p>`.
    pub fn field_matrix(&self, xi: &Vector) -> CMat {
        let (x, k) = self.split.coords(xi);
        let qk = self.position_function(|p| C64::new(p.iter().zip(&k).map(|(a, b)| a * b).sum(), 0.0));
        let xp = self.momentum_function(|kap| C64::new(kap.iter().zip(&x).map(|(a, b)| a * b).sum(), 0.0));
        linalg::sub(&qk, &xp)
    }
}

fn inverse_along(axis: &Axis, data: &mut [C64], dims: usize, a: usize) {
    let m = axis.m;
    let stride = m.pow((dims - 1 - a) as u32);
    let block = stride * m;
    let mut planner = rustfft::FftPlanner::new();
    let ifft = planner.plan_fft_inverse(m);
    let mut line = vec![C64::default(); m];
    let inv = 1.0 / m as f64;
    for outer in (0..data.len()).step_by(block) {
        for inner in 0..stride {
            let base = outer + inner;
            for j in 0..m {
                line[j] = data[base + j * stride];
            }
            ifft.process(&mut line);
            for j in 0..m {
                data[base + j * stride] = line[j] * inv;
            }
        }
    }
}
