use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::symplin::{Subspace, Vector};
use crate::C64;

/// Sampled density `rho` on the affine subspace `offset + E`, relative to the
/// Lebesgue measure of the orthonormal coordinates of E.
///
/// Nodes sit at the cell midpoints `t_j = -L + (j + 1/2) h`, `h = 2L / m`, on
/// every axis; samples are stored row-major with axis 0 slowest.
#[derive(Clone, Debug)]
pub struct DensityOnSubspace {
    support: Subspace,
    offset: Vector,
    m: usize,
    half_width: f64,
    samples: Vec<C64>,
}

impl DensityOnSubspace {
    pub fn new(support: Subspace, offset: Vector, m: usize, half_width: f64, samples: Vec<C64>) -> Result<Self> {
        let k = support.dim();
        if k == 0 {
            return Err(Error::InvalidSubspace("density on {0}; use a comb atom".into()));
        }
        if m == 0 || !(half_width > 0.0) {
            return Err(Error::Precondition("grid needs m > 0 and L > 0".into()));
        }
        if offset.len() != support.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: support.ambient_dim(), found: offset.len() });
        }
        let n = m.checked_pow(k as u32).ok_or_else(|| Error::Precondition("grid too large".into()))?;
        if samples.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: samples.len() });
        }
        Ok(Self { support, offset, m, half_width, samples })
    }

    /// Samples `f` at the nodes; `f` receives the coordinates in E's basis.
    pub fn from_fn(
        support: Subspace,
        offset: Vector,
        m: usize,
        half_width: f64,
        f: impl Fn(&[f64]) -> C64,
    ) -> Result<Self> {
        let k = support.dim();
        let n = m.checked_pow(k as u32).ok_or_else(|| Error::Precondition("grid too large".into()))?;
        let h = 2.0 * half_width / m as f64;
        let mut t = vec![0.0; k];
        let mut samples = Vec::with_capacity(n);
        for idx in 0..n {
            fill_coords(idx, m, half_width, h, &mut t);
            samples.push(f(&t));
        }
        Self::new(support, offset, m, half_width, samples)
    }

    /// Gaussian `mass * N(center, s^2 I)` in E's coordinates.
    pub fn gaussian(support: Subspace, offset: Vector, m: usize, half_width: f64, center: &[f64], s: f64, mass: C64) -> Result<Self> {
        let k = support.dim();
        if center.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: center.len() });
        }
        let norm = (2.0 * PI * s * s).powf(-(k as f64) / 2.0);
        Self::from_fn(support, offset, m, half_width, |t| {
            let r2: f64 = t.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
            mass * norm * (-r2 / (2.0 * s * s)).exp()
        })
    }

    pub fn support(&self) -> &Subspace {
        &self.support
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.m as f64
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn node_count(&self) -> usize {
        self.samples.len()
    }

    /// Quadrature weight of a single node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim() as i32)
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut t = vec![0.0; self.dim()];
        fill_coords(idx, self.m, self.half_width, self.spacing(), &mut t);
        t
    }

    /// Ambient position of node `idx`.
    pub fn point(&self, idx: usize) -> Vector {
        let t = self.coords(idx);
        &self.offset + self.support.basis() * Vector::from_vec(t)
    }

    /// Nodes as (ambient point, quadrature mass).
    pub fn nodes(&self) -> impl Iterator<Item = (Vector, C64)> + '_ {
        let w = self.cell_volume();
        (0..self.node_count()).map(move |i| (self.point(i), self.samples[i] * w))
    }

    pub fn l1(&self) -> f64 {
        self.cell_volume() * self.samples.iter().map(|z| z.norm()).sum::<f64>()
    }

    pub fn total(&self) -> C64 {
        self.samples.iter().sum::<C64>() * self.cell_volume()
    }

    pub fn integrate(&self, f: impl Fn(&Vector) -> C64) -> C64 {
        self.nodes().map(|(p, w)| w * f(&p)).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for z in out.samples.iter_mut() {
            *z *= s;
        }
        out
    }

    /// `rho^*(xi) = conj(rho(-xi))`, supported on `-offset + E`.
    pub fn adjoint(&self) -> Self {
        let k = self.dim();
        let m = self.m;
        let mut samples = vec![C64::default(); self.samples.len()];
        let mut digits = vec![0usize; k];
        for (idx, z) in self.samples.iter().enumerate() {
            split_index(idx, m, &mut digits);
            let mut r = 0usize;
            for &d in digits.iter() {
                r = r * m + (m - 1 - d);
            }
            samples[r] = z.conj();
        }
        Self { support: self.support.clone(), offset: -&self.offset, m, half_width: self.half_width, samples }
    }

    /// Band-limited (periodic Dirichlet kernel) interpolation at coordinates
    /// `t` in E's basis; zero outside the box.
    pub fn eval_coords(&self, t: &[f64]) -> C64 {
        let k = self.dim();
        if t.iter().any(|x| x.abs() > self.half_width) {
            return C64::default();
        }
        let weights: Vec<Vec<f64>> = t.iter().map(|&x| dirichlet_weights(x, self.m, self.half_width)).collect();
        if k == 1 {
            return weights[0].iter().zip(&self.samples).map(|(w, z)| z * *w).sum();
        }
        // contract the last axis first, then fold outward
        let m = self.m;
        let mut cur: Vec<C64> = self.samples.clone();
        for axis in (0..k).rev() {
            let w = &weights[axis];
            let next_len = cur.len() / m;
            let mut next = vec![C64::default(); next_len];
            for (o, chunk) in next.iter_mut().zip(cur.chunks(m)) {
                *o = chunk.iter().zip(w).map(|(z, w)| z * *w).sum();
            }
            cur = next;
        }
        cur[0]
    }

    /// Interpolated value at an ambient point (off-support points give zero).
    pub fn eval(&self, p: &Vector) -> C64 {
        let rel = p - &self.offset;
        if self.support.residual(&rel) > 1e-9 * rel.norm().max(1.0) {
            return C64::default();
        }
        let t = self.support.coords(&rel);
        self.eval_coords(t.as_slice())
    }
}

pub(crate) fn split_index(mut idx: usize, m: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = idx % m;
        idx /= m;
    }
}

pub(crate) fn fill_coords(idx: usize, m: usize, half_width: f64, h: f64, t: &mut [f64]) {
    let mut r = idx;
    for x in t.iter_mut().rev() {
        let j = r % m;
        r /= m;
        *x = -half_width + (j as f64 + 0.5) * h;
    }
}

/// Weights `w_j` with `f(t) = sum_j w_j f(t_j)` exact for trigonometric
/// polynomials of the grid band (Nyquist term split symmetrically).
pub(crate) fn dirichlet_weights(t: f64, m: usize, half_width: f64) -> Vec<f64> {
    let h = 2.0 * half_width / m as f64;
    (0..m)
        .map(|j| {
            let tj = -half_width + (j as f64 + 0.5) * h;
            let theta = PI * (t - tj) / half_width;
            let s = (0.5 * theta).sin();
            if s.abs() < 1e-13 {
                return 1.0;
            }
            if m.is_multiple_of(2) {
                (0.5 * m as f64 * theta).sin() * (0.5 * theta).cos() / s / m as f64
            } else {
                (0.5 * m as f64 * theta).sin() / s / m as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::SymplecticSpace;
    use std::sync::Arc;

    #[test]
    fn interpolation_reproduces_nodes_and_smooth_values() {
        let s = Arc::new(SymplecticSpace::standard(1));
        let e = Subspace::axes(&s, &[0]).unwrap();
        let d = DensityOnSubspace::gaussian(e, Vector::zeros(2), 64, 8.0, &[0.3], 1.0, C64::new(1.0, 0.0)).unwrap();
        let t = d.coords(17);
        assert!((d.eval_coords(&t) - d.samples()[17]).norm() < 1e-13);
        let x = 0.123;
        let want = (-(x - 0.3f64).powi(2) / 2.0).exp() / (2.0 * PI).sqrt();
        assert!((d.eval_coords(&[x]).re - want).abs() < 1e-10);
        assert!((d.total().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_reflects() {
        let s = Arc::new(SymplecticSpace::standard(1));
        let e = Subspace::full(&s);
        let d = DensityOnSubspace::gaussian(e, Vector::zeros(2), 16, 6.0, &[1.0, -0.5], 1.0, C64::new(0.0, 2.0)).unwrap();
        let a = d.adjoint();
        let p = Vector::from_vec(vec![-1.0, 0.5]);
        assert!((a.eval(&p) - d.eval(&(-&p)).conj()).norm() < 1e-12);
    }
}
