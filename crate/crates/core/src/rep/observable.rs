use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::C64;

/// Self-adjoint observable given by its resolvents `R(z) = (H - z)^{-1}` on a
/// stencil of non-real spectral parameters.
#[derive(Clone, Debug)]
pub struct Observable {
    hamiltonian: Option<CMat>,
    zs: Vec<C64>,
    resolvents: Vec<CMat>,
}

pub fn default_stencil() -> Vec<C64> {
    vec![
        C64::new(0.0, 1.0),
        C64::new(0.0, -1.0),
        C64::new(0.0, 2.0),
        C64::new(0.0, -2.0),
        C64::new(1.0, 1.0),
        C64::new(1.0, -1.0),
    ]
}

pub fn resolvent(h: &CMat, z: C64) -> Result<CMat> {
    if z.im == 0.0 {
        return Err(Error::RealSpectralParameter);
    }
    let n = h.nrows();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] -= z;
    }
    Ok(linalg::inverse(&a))
}

/// Resolvents of a Hermitian matrix at every stencil point.
pub fn resolvent_family(h: &CMat, stencil: Option<&[C64]>) -> Result<Observable> {
    let d = linalg::hermitian_defect(h);
    if d > crate::tol::HERMITIAN {
        return Err(Error::NotHermitian(d));
    }
    let zs = stencil.map(|s| s.to_vec()).unwrap_or_else(default_stencil);
    let resolvents = zs.iter().map(|&z| resolvent(h, z)).collect::<Result<Vec<_>>>()?;
    Ok(Observable { hamiltonian: Some(h.clone()), zs, resolvents })
}

impl Observable {
    /// Observable known only through a resolvent family.
    pub fn from_resolvents(zs: Vec<C64>, resolvents: Vec<CMat>) -> Result<Self> {
        if zs.len() != resolvents.len() {
            return Err(Error::DimensionMismatch { expected: zs.len(), found: resolvents.len() });
        }
        if zs.iter().any(|z| z.im == 0.0) {
            return Err(Error::RealSpectralParameter);
        }
        Ok(Self { hamiltonian: None, zs, resolvents })
    }

    pub fn hamiltonian(&self) -> Option<&CMat> {
        self.hamiltonian.as_ref()
    }

    pub fn stencil(&self) -> &[C64] {
        &self.zs
    }

    pub fn resolvents(&self) -> &[CMat] {
        &self.resolvents
    }

    pub fn at(&self, z: C64) -> Result<CMat> {
        if let Some(i) = self.zs.iter().position(|w| *w == z) {
            return Ok(self.resolvents[i].clone());
        }
        match &self.hamiltonian {
            Some(h) => resolvent(h, z),
            None => Err(Error::Precondition("spectral parameter outside the stored stencil".into())),
        }
    }

    /// Largest `||R(z1) - R(z2) - (z1 - z2) R(z1) R(z2)||` over stencil pairs,
    /// relative to `max(1, ||R(z1)||, ||R(z2)||)`.
    pub fn resolvent_identity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.zs.len() {
            for j in 0..i {
                let (a, b) = (&self.resolvents[i], &self.resolvents[j]);
                let prod = a * b;
                let lhs = linalg::sub(a, b);
                let r = linalg::axpy(&lhs, -(self.zs[i] - self.zs[j]), &prod);
                let scale = linalg::max_abs(a).max(linalg::max_abs(b)).max(1.0);
                worst = worst.max(linalg::spectral_norm(&r) / scale);
            }
        }
        worst
    }

    /// Largest `||R(z)^* - R(conj z)||` over conjugate pairs present in the stencil.
    pub fn adjoint_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, z) in self.zs.iter().enumerate() {
            if let Some(j) = self.zs.iter().position(|w| *w == z.conj()) {
                let d = linalg::sub(&linalg::adjoint(&self.resolvents[i]), &self.resolvents[j]);
                worst = worst.max(linalg::spectral_norm(&d));
            }
        }
        worst
    }
}
