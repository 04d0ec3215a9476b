//! Twisted convolution algebra of finite measures on a symplectic space.
//!
//! Elements are finite sums of point masses (a [`DiracComb`]) and sampled
//! densities living on affine translates of linear subspaces. The product is
//! `delta_xi x delta_eta = e^{(i/2) sigma(xi, eta)} delta_{xi + eta}` extended
//! bilinearly; the involution is `delta_xi^* = delta_{-xi}` with conjugated
//! weights.

mod density;
mod fourier;
pub(crate) mod io;
mod product;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplin::{SymplecticSpace, Vector};
use crate::{tol, C64};

pub use density::DensityOnSubspace;
pub use fourier::symplectic_fourier;
pub use io::{load_element, save_element};
pub use product::{comb_times_density, density_times_comb, density_times_density, ConvolveOptions};

#[derive(Clone, Debug)]
pub struct Atom {
    pub point: Vector,
    pub coeff: C64,
}

#[derive(Clone, Debug)]
pub struct DiracComb {
    space: Arc<SymplecticSpace>,
    atoms: Vec<Atom>,
}

fn close(a: &Vector, b: &Vector) -> bool {
    let scale = a.amax().max(b.amax()).max(1.0);
    (a - b).amax() <= tol::MERGE * scale
}

impl DiracComb {
    pub fn empty(space: &Arc<SymplecticSpace>) -> Self {
        Self { space: space.clone(), atoms: vec![] }
    }

    pub fn delta(space: &Arc<SymplecticSpace>, point: Vector, coeff: C64) -> Result<Self> {
        let mut c = Self::empty(space);
        c.push(point, coeff)?;
        Ok(c)
    }

    pub fn from_atoms(space: &Arc<SymplecticSpace>, atoms: impl IntoIterator<Item = (Vector, C64)>) -> Result<Self> {
        let mut c = Self::empty(space);
        for (p, w) in atoms {
            c.push(p, w)?;
        }
        Ok(c)
    }

    /// Adds an atom, merging with an existing one at the same point.
    pub fn push(&mut self, point: Vector, coeff: C64) -> Result<()> {
        if point.len() != self.space.dim() {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), found: point.len() });
        }
        if let Some(a) = self.atoms.iter_mut().find(|a| close(&a.point, &point)) {
            a.coeff += coeff;
        } else {
            self.atoms.push(Atom { point, coeff });
        }
        Ok(())
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Coefficient at `point` (zero if absent).
    pub fn coeff_at(&self, point: &Vector) -> C64 {
        self.atoms.iter().find(|a| close(&a.point, point)).map(|a| a.coeff).unwrap_or_default()
    }

    pub fn l1(&self) -> f64 {
        self.atoms.iter().map(|a| a.coeff.norm()).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            atoms: self.atoms.iter().map(|a| Atom { point: -&a.point, coeff: a.coeff.conj() }).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            atoms: self.atoms.iter().map(|a| Atom { point: a.point.clone(), coeff: a.coeff * s }).collect(),
        }
    }

    pub fn add(&self, other: &DiracComb) -> Result<Self> {
        let mut out = self.clone();
        for a in &other.atoms {
            out.push(a.point.clone(), a.coeff)?;
        }
        Ok(out)
    }

    pub fn product(&self, other: &DiracComb) -> Result<Self> {
        let mut out = Self::empty(&self.space);
        for a in &self.atoms {
            for b in &other.atoms {
                let phase = C64::from_polar(1.0, 0.5 * self.space.sigma(&a.point, &b.point));
                out.push(&a.point + &b.point, a.coeff * b.coeff * phase)?;
            }
        }
        Ok(out)
    }

    /// Largest coefficient difference against another comb, atom by atom.
    pub fn distance(&self, other: &DiracComb) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.atoms {
            worst = worst.max((a.coeff - other.coeff_at(&a.point)).norm());
        }
        for b in &other.atoms {
            worst = worst.max((b.coeff - self.coeff_at(&b.point)).norm());
        }
        worst
    }
}

/// Finite measure: a comb plus densities on affine subspaces.
#[derive(Clone, Debug)]
pub struct TwistedElement {
    space: Arc<SymplecticSpace>,
    pub comb: DiracComb,
    pub densities: Vec<DensityOnSubspace>,
}

impl TwistedElement {
    pub fn zero(space: &Arc<SymplecticSpace>) -> Self {
        Self { space: space.clone(), comb: DiracComb::empty(space), densities: vec![] }
    }

    pub fn from_comb(comb: DiracComb) -> Self {
        Self { space: comb.space().clone(), comb, densities: vec![] }
    }

    pub fn from_density(d: DensityOnSubspace) -> Self {
        let space = d.support().space().clone();
        Self { space: space.clone(), comb: DiracComb::empty(&space), densities: vec![d] }
    }

    pub fn identity(space: &Arc<SymplecticSpace>) -> Self {
        let comb = DiracComb::delta(space, Vector::zeros(space.dim()), C64::new(1.0, 0.0)).expect("dim");
        Self::from_comb(comb)
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn add(&self, other: &TwistedElement) -> Result<Self> {
        let mut out = self.clone();
        out.comb = out.comb.add(&other.comb)?;
        out.densities.extend(other.densities.iter().cloned());
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            comb: self.comb.scale(s),
            densities: self.densities.iter().map(|d| d.scale(s)).collect(),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.comb.l1() + self.densities.iter().map(|d| d.l1()).sum::<f64>()
    }

    /// Integral of a test function against the measure.
    pub fn integrate(&self, f: impl Fn(&Vector) -> C64) -> C64 {
        let mut acc: C64 = self.comb.atoms().iter().map(|a| a.coeff * f(&a.point)).sum();
        for d in &self.densities {
            acc += d.integrate(&f);
        }
        acc
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            comb: self.comb.adjoint(),
            densities: self.densities.iter().map(|d| d.adjoint()).collect(),
        }
    }
}

/// Diagnostics of a twisted product involving densities.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ConvolveReport {
    /// Fraction of the discrete product mass lying off the sum subspace.
    pub leakage: f64,
    /// Mass of the exact discrete product missing from the output grid
    /// (only meaningful for transversal supports, zero otherwise).
    pub truncated_mass: f64,
    /// l1 mass of the output densities.
    pub output_l1: f64,
    /// Product of the input l1 masses.
    pub input_l1_product: f64,
}

impl ConvolveReport {
    fn absorb(&mut self, other: &ConvolveReport) {
        self.leakage = self.leakage.max(other.leakage);
        self.truncated_mass += other.truncated_mass;
        self.output_l1 += other.output_l1;
        self.input_l1_product += other.input_l1_product;
    }
}

pub fn adjoint(mu: &TwistedElement) -> TwistedElement {
    mu.adjoint()
}

pub fn l1_norm(mu: &TwistedElement) -> f64 {
    mu.l1_norm()
}

/// Twisted convolution of two finite measures.
pub fn twisted_convolve(
    mu: &TwistedElement,
    nu: &TwistedElement,
    opts: &ConvolveOptions,
) -> Result<(TwistedElement, ConvolveReport)> {
    if !mu.space.same_as(&nu.space) {
        return Err(Error::AmbientMismatch);
    }
    let mut out = TwistedElement::zero(&mu.space);
    let mut report = ConvolveReport::default();
    out.comb = mu.comb.product(&nu.comb)?;
    for a in mu.comb.atoms() {
        for d in &nu.densities {
            out.densities.push(comb_times_density(&a.point, a.coeff, d)?);
        }
    }
    for d in &mu.densities {
        for b in nu.comb.atoms() {
            out.densities.push(density_times_comb(d, &b.point, b.coeff)?);
        }
    }
    for d in &mu.densities {
        for e in &nu.densities {
            let (p, r) = density_times_density(d, e, opts)?;
            report.absorb(&r);
            out.densities.push(p);
        }
    }
    Ok((out, report))
}
