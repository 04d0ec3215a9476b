use std::f64::consts::PI;
use std::sync::Arc;

use super::axis::{circulant_tensor, grid_point, Axis};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::symplin::{SymplecticSpace, Vector};
use crate::C64;

const DENSE_MAX: usize = 4096;

/// Regular representation on a periodic grid over the whole phase space,
/// `(W(xi) f)(zeta) = e^{(i/2) sigma(xi, zeta)} f(zeta - xi)`.
///
/// With `L h = 2 pi` (see [`RegularGridRep::periodic`]) the phase is
/// periodic on the torus for translations by grid vectors, so the lattice
/// operators form an exact projective representation.
#[derive(Clone, Debug)]
pub struct RegularGridRep {
    space: Arc<SymplecticSpace>,
    axis: Axis,
}

impl RegularGridRep {
    pub fn new(space: Arc<SymplecticSpace>, m: usize, l: f64) -> Result<Self> {
        if m < 2 || !(l > 0.0) {
            return Err(Error::Precondition("grid needs m >= 2 and L > 0".into()));
        }
        let n = m.checked_pow(space.dim() as u32).ok_or_else(|| Error::Precondition("grid too large".into()))?;
        if n > 1 << 20 {
            return Err(Error::Precondition(format!("regular grid dimension {n} too large")));
        }
        Ok(Self { space, axis: Axis::new(m, l) })
    }

    pub fn standard(n: usize, m: usize, l: f64) -> Result<Self> {
        Self::new(Arc::new(SymplecticSpace::standard(n)), m, l)
    }

    /// Standard space with `L = sqrt(pi m)`, i.e. `L h = 2 pi`.
    pub fn periodic(n: usize, m: usize) -> Result<Self> {
        Self::standard(n, m, (PI * m as f64).sqrt())
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
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

    /// Number of grid axes (= dim Xi).
    pub fn axes(&self) -> usize {
        self.space.dim()
    }

    pub fn dim(&self) -> usize {
        self.m().pow(self.axes() as u32)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.axes()];
        grid_point(&self.axis, idx, self.axes(), &mut p);
        p
    }

    /// `J^T xi`, so that `sigma(xi, zeta) = g . zeta`.
    fn phase_gradient(&self, xi: &Vector) -> Vec<f64> {
        (self.space.form().transpose() * xi).iter().cloned().collect()
    }

    fn axis_phases(&self, g: &[f64], c: C64) -> Vec<Vec<C64>> {
        g.iter()
            .enumerate()
            .map(|(a, &ga)| {
                let pos = self.axis.positions();
                pos.iter()
                    .map(|&z| {
                        let base = C64::from_polar(1.0, 0.5 * ga * z);
                        if a == 0 {
                            base * c
                        } else {
                            base
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn check(&self, xi: &Vector) -> Result<()> {
        if xi.len() != self.axes() {
            return Err(Error::DimensionMismatch { expected: self.axes(), found: xi.len() });
        }
        Ok(())
    }

    pub fn apply_weyl(&self, xi: &Vector, v: &mut [C64]) -> Result<()> {
        self.check(xi)?;
        let dims = self.axes();
        for a in 0..dims {
            self.axis.translate(v, dims, a, xi[a]);
        }
        let g = self.phase_gradient(xi);
        let mut p = vec![0.0; dims];
        for (j, z) in v.iter_mut().enumerate() {
            grid_point(&self.axis, j, dims, &mut p);
            let s: f64 = g.iter().zip(&p).map(|(a, b)| a * b).sum();
            *z *= C64::from_polar(1.0, 0.5 * s);
        }
        Ok(())
    }

    pub fn apply_weyl_adjoint(&self, xi: &Vector, v: &mut [C64]) -> Result<()> {
        self.check(xi)?;
        let dims = self.axes();
        let g = self.phase_gradient(xi);
        let mut p = vec![0.0; dims];
        for (j, z) in v.iter_mut().enumerate() {
            grid_point(&self.axis, j, dims, &mut p);
            let s: f64 = g.iter().zip(&p).map(|(a, b)| a * b).sum();
            *z *= C64::from_polar(1.0, -0.5 * s);
        }
        for a in 0..dims {
            self.axis.translate(v, dims, a, -xi[a]);
        }
        Ok(())
    }

    /// `out += c W(xi) v`.
    pub fn accumulate_weyl(&self, xi: &Vector, c: C64, v: &[C64], out: &mut [C64]) -> Result<()> {
        self.check(xi)?;
        let shifts: Option<Vec<usize>> = (0..self.axes())
            .map(|a| self.axis.commensurate(xi[a]).map(|s| s.rem_euclid(self.m() as i64) as usize))
            .collect();
        match shifts {
            Some(s) => {
                let ph = self.axis_phases(&self.phase_gradient(xi), c);
                self.accumulate_rolled(&s, &ph, v, out);
            }
            None => {
                let mut w = v.to_vec();
                self.apply_weyl(xi, &mut w)?;
                for (o, z) in out.iter_mut().zip(&w) {
                    *o += c * z;
                }
            }
        }
        Ok(())
    }

    /// `out[J] += prod_a ph[a][j_a] * v[J - s]` with cyclic index arithmetic.
    fn accumulate_rolled(&self, s: &[usize], ph: &[Vec<C64>], v: &[C64], out: &mut [C64]) {
        let m = self.m();
        let dims = self.axes();
        let last = dims - 1;
        let outer = m.pow(last as u32);
        let mut digits = vec![0usize; last];
        let sl = s[last];
        let pl = &ph[last];
        for o in 0..outer {
            super::axis::split(o, m, &mut digits);
            let mut coef = C64::new(1.0, 0.0);
            let mut src = 0usize;
            for a in 0..last {
                coef *= ph[a][digits[a]];
                src = src * m + (digits[a] + m - s[a]) % m;
            }
            let dst = &mut out[o * m..(o + 1) * m];
            let srow = &v[src * m..(src + 1) * m];
            // k >= sl reads srow[k - sl]; k < sl wraps to srow[k + m - sl]
            for k in 0..sl {
                dst[k] += coef * pl[k] * srow[k + m - sl];
            }
            for k in sl..m {
                dst[k] += coef * pl[k] * srow[k - sl];
            }
        }
    }

    /// Dense Weyl operator; only for small grids.
    pub fn weyl_matrix(&self, xi: &Vector) -> Result<CMat> {
        let n = self.dim();
        if n > DENSE_MAX {
            return Err(Error::Unsupported(format!("dense regular operator of size {n}")));
        }
        let mut out = linalg::zeros(n, n);
        let mut e = vec![C64::default(); n];
        for l in 0..n {
            e.iter_mut().for_each(|z| *z = C64::default());
            e[l] = C64::new(1.0, 0.0);
            self.apply_weyl(xi, &mut e)?;
            for (j, z) in e.iter().enumerate() {
                out[(j, l)] = *z;
            }
        }
        Ok(out)
    }

    /// `phi(xi) = (1/2) sigma(xi, zeta) - xi . P` with `P = -i grad`.
    pub fn field_matrix(&self, xi: &Vector) -> Result<CMat> {
        self.check(xi)?;
        let n = self.dim();
        if n > DENSE_MAX {
            return Err(Error::Unsupported(format!("dense regular operator of size {n}")));
        }
        let dims = self.axes();
        let m = self.m();
        let g = self.phase_gradient(xi);
        let mut out = linalg::zeros(n, n);
        let mut p = vec![0.0; dims];
        for j in 0..n {
            grid_point(&self.axis, j, dims, &mut p);
            out[(j, j)] = C64::new(0.5 * g.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>(), 0.0);
        }
        let mut delta = vec![C64::default(); m];
        delta[0] = C64::new(1.0, 0.0);
        let ones = vec![C64::new(1.0, 0.0); n];
        for a in 0..dims {
            if xi[a] == 0.0 {
                continue;
            }
            let kern: Vec<Vec<C64>> = (0..dims)
                .map(|b| if b == a { self.axis.kernel(|k| C64::new(k, 0.0)) } else { delta.clone() })
                .collect();
            let pa = circulant_tensor(m, &kern, &ones);
            linalg::add_assign(&mut out, C64::new(-xi[a], 0.0), &pa);
        }
        Ok(out)
    }
}
