//! Concrete representations of the Weyl system: Schrodinger on a periodic
//! grid, the finite clock/shift system, and a grid regular representation.

pub mod axis;
mod finite;
mod grid;
mod observable;
mod operator;
mod regular;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use finite::FiniteWeylRep;
pub use grid::{GridRep, PhaseSpaceSplit};
pub use observable::{default_stencil, resolvent, resolvent_family, Observable};
pub use operator::{OperatorFlags, OperatorMatrix, FLAG_TOL};
pub use regular::RegularGridRep;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::symplin::{SymplecticSpace, Vector};
use crate::twisted::{DiracComb, TwistedElement};
use crate::C64;
use axis::{grid_point, Axis};

/// Serializable description of a representation, as used in configs and
/// operator dumps.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RepDescriptor {
    Grid {
        d: usize,
        m: usize,
        #[serde(rename = "L")]
        l: f64,
    },
    Finweyl {
        #[serde(rename = "N")]
        n: usize,
        d: usize,
    },
    Regular {
        n: usize,
        m: usize,
        #[serde(rename = "L")]
        l: f64,
    },
}

#[derive(Clone, Debug)]
pub enum Rep {
    Grid(GridRep),
    Finite(FiniteWeylRep),
    Regular(RegularGridRep),
}

impl From<GridRep> for Rep {
    fn from(g: GridRep) -> Self {
        Rep::Grid(g)
    }
}

impl From<FiniteWeylRep> for Rep {
    fn from(g: FiniteWeylRep) -> Self {
        Rep::Finite(g)
    }
}

impl From<RegularGridRep> for Rep {
    fn from(g: RegularGridRep) -> Self {
        Rep::Regular(g)
    }
}

impl Rep {
    pub fn from_descriptor(d: &RepDescriptor) -> Result<Self> {
        Ok(match *d {
            RepDescriptor::Grid { d, m, l } => Rep::Grid(GridRep::standard(d, m, l)?),
            RepDescriptor::Finweyl { n, d } => Rep::Finite(FiniteWeylRep::new(n, d)?),
            RepDescriptor::Regular { n, m, l } => Rep::Regular(RegularGridRep::standard(n, m, l)?),
        })
    }

    pub fn descriptor(&self) -> RepDescriptor {
        match self {
            Rep::Grid(g) => RepDescriptor::Grid { d: g.d(), m: g.m(), l: g.l() },
            Rep::Finite(f) => RepDescriptor::Finweyl { n: f.modulus(), d: f.d() },
            Rep::Regular(r) => RepDescriptor::Regular { n: r.space().degrees(), m: r.m(), l: r.l() },
        }
    }

    pub fn space(&self) -> &std::sync::Arc<SymplecticSpace> {
        match self {
            Rep::Grid(g) => g.space(),
            Rep::Finite(f) => f.space(),
            Rep::Regular(r) => r.space(),
        }
    }

    /// Hilbert space dimension.
    pub fn dim(&self) -> usize {
        match self {
            Rep::Grid(g) => g.dim(),
            Rep::Finite(f) => f.dim(),
            Rep::Regular(r) => r.dim(),
        }
    }

    pub fn apply_weyl(&self, xi: &Vector, v: &mut [C64]) -> Result<()> {
        check_ambient(self, xi)?;
        match self {
            Rep::Grid(g) => {
                g.apply_weyl(xi, v);
                Ok(())
            }
            Rep::Finite(f) => f.apply_weyl(xi, v),
            Rep::Regular(r) => r.apply_weyl(xi, v),
        }
    }

    pub fn apply_weyl_adjoint(&self, xi: &Vector, v: &mut [C64]) -> Result<()> {
        check_ambient(self, xi)?;
        match self {
            Rep::Grid(g) => {
                g.apply_weyl_adjoint(xi, v);
                Ok(())
            }
            Rep::Finite(f) => f.apply_weyl_adjoint(xi, v),
            Rep::Regular(r) => r.apply_weyl_adjoint(xi, v),
        }
    }

    /// Columns of unit test vectors used as the strong-topology proxy.
    pub fn frame(&self) -> CMat {
        match self {
            Rep::Grid(g) => gaussian_frame(g.axis(), g.d()),
            Rep::Regular(r) => gaussian_frame(r.axis(), r.axes()),
            Rep::Finite(f) => {
                let n = f.dim();
                linalg::identity(n)
            }
        }
    }

    pub fn wrap(&self, matrix: CMat) -> OperatorMatrix {
        OperatorMatrix::new(self.descriptor(), matrix)
    }
}

fn check_ambient(rep: &Rep, xi: &Vector) -> Result<()> {
    let n = rep.space().dim();
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: xi.len() });
    }
    Ok(())
}

/// Eight normalized Gaussians `e^{-|y-c|^2/(2w^2)} e^{i b.y}` on the grid,
/// centred well inside the box.
pub fn gaussian_frame(axis: &Axis, dims: usize) -> CMat {
    const COUNT: usize = 8;
    let n = axis.m.pow(dims as u32);
    let s = (axis.l / 8.0).min(1.0);
    let mut out = linalg::zeros(n, COUNT);
    let mut p = vec![0.0; dims];
    for i in 0..COUNT {
        let fi = i as f64;
        let c: Vec<f64> = (0..dims).map(|a| 1.2 * (2.1 * fi + 1.3 * a as f64 + 0.5).sin() * s).collect();
        let b: Vec<f64> = (0..dims).map(|a| 0.9 * (1.7 * fi + 0.9 * a as f64).cos()).collect();
        let w = (0.55 + 0.06 * fi) * s.max(0.5);
        for j in 0..n {
            grid_point(axis, j, dims, &mut p);
            let r2: f64 = p.iter().zip(&c).map(|(y, c)| (y - c) * (y - c)).sum();
            let ph: f64 = p.iter().zip(&b).map(|(y, b)| y * b).sum();
            out[(j, i)] = C64::from_polar((-r2 / (2.0 * w * w)).exp(), ph);
        }
    }
    linalg::normalize_columns(&mut out);
    out
}

pub fn weyl_op(rep: &Rep, xi: &Vector) -> Result<OperatorMatrix> {
    check_ambient(rep, xi)?;
    let m = match rep {
        Rep::Grid(g) => g.weyl_matrix(xi),
        Rep::Finite(f) => f.weyl_matrix(xi)?,
        Rep::Regular(r) => r.weyl_matrix(xi)?,
    };
    Ok(rep.wrap(m))
}

pub fn field_op(rep: &Rep, xi: &Vector) -> Result<OperatorMatrix> {
    check_ambient(rep, xi)?;
    let m = match rep {
        Rep::Grid(g) => g.field_matrix(xi),
        Rep::Regular(r) => r.field_matrix(xi)?,
        Rep::Finite(_) => return Err(Error::Unsupported("the finite Weyl system has no field operators".into())),
    };
    Ok(rep.wrap(m))
}

/// Point masses of the measure: comb atoms and density quadrature nodes.
pub fn measure_nodes(mu: &TwistedElement) -> Vec<(Vector, C64)> {
    let mut out: Vec<(Vector, C64)> = mu.comb.atoms().iter().map(|a| (a.point.clone(), a.coeff)).collect();
    for d in &mu.densities {
        out.extend(d.nodes().filter(|(_, c)| *c != C64::default()));
    }
    out
}

pub fn rep_of_measure(rep: &Rep, mu: &TwistedElement) -> Result<OperatorMatrix> {
    if !rep.space().same_as(mu.space()) {
        return Err(Error::AmbientMismatch);
    }
    let m = match rep {
        Rep::Grid(g) => grid_measure_matrix(g, &measure_nodes(mu)),
        Rep::Finite(f) => {
            if !mu.densities.is_empty() {
                return Err(Error::Unsupported("densities on the finite Weyl system".into()));
            }
            let mut out = linalg::zeros(f.dim(), f.dim());
            for a in mu.comb.atoms() {
                linalg::add_assign(&mut out, a.coeff, &f.weyl_matrix(&a.point)?);
            }
            out
        }
        Rep::Regular(r) => {
            let n = r.dim();
            if n > 4096 {
                return Err(Error::Unsupported(format!("dense regular operator of size {n}")));
            }
            let mut out = linalg::zeros(n, n);
            let nodes = measure_nodes(mu);
            let mut e = vec![C64::default(); n];
            let mut col = vec![C64::default(); n];
            for l in 0..n {
                e.iter_mut().for_each(|z| *z = C64::default());
                col.iter_mut().for_each(|z| *z = C64::default());
                e[l] = C64::new(1.0, 0.0);
                for (xi, c) in &nodes {
                    r.accumulate_weyl(xi, *c, &e, &mut col)?;
                }
                for (j, z) in col.iter().enumerate() {
                    out[(j, l)] = *z;
                }
            }
            out
        }
    };
    Ok(rep.wrap(m))
}

/// `W(mu) v` without forming a matrix.
pub fn apply_measure(rep: &Rep, mu: &TwistedElement, v: &[C64]) -> Result<Vec<C64>> {
    if !rep.space().same_as(mu.space()) {
        return Err(Error::AmbientMismatch);
    }
    if v.len() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: v.len() });
    }
    let nodes = measure_nodes(mu);
    let mut out = vec![C64::default(); v.len()];
    match rep {
        Rep::Regular(r) => {
            for (xi, c) in &nodes {
                r.accumulate_weyl(xi, *c, v, &mut out)?;
            }
        }
        _ => {
            if let Rep::Finite(_) = rep {
                if !mu.densities.is_empty() {
                    return Err(Error::Unsupported("densities on the finite Weyl system".into()));
                }
            }
            let mut w = vec![C64::default(); v.len()];
            for (xi, c) in &nodes {
                w.copy_from_slice(v);
                rep.apply_weyl(xi, &mut w)?;
                for (o, z) in out.iter_mut().zip(&w) {
                    *o += c * z;
                }
            }
        }
    }
    Ok(out)
}

/// Largest singular value of `W(mu)` in the given representation.
pub fn cstar_norm_estimate(mu: &TwistedElement, rep: &Rep) -> Result<f64> {
    match rep {
        Rep::Regular(r) => {
            let adj = mu.adjoint();
            let n = r.dim();
            let start: Vec<C64> = {
                let f = rep.frame();
                (0..n).map(|j| (0..f.ncols()).map(|c| f[(j, c)]).sum()).collect()
            };
            let apply = |v: &[C64]| apply_measure(rep, mu, v).expect("checked ambient");
            let apply_adj = |v: &[C64]| apply_measure(rep, &adj, v).expect("checked ambient");
            if !rep.space().same_as(mu.space()) {
                return Err(Error::AmbientMismatch);
            }
            Ok(linalg::power_norm(n, Some(start), apply, apply_adj, 1e-10, 500))
        }
        _ => Ok(rep_of_measure(rep, mu)?.norm()),
    }
}

/// Dense `sum_n c_n W(xi_n)` on the Schrodinger grid. Nodes sharing the same
/// position shift share one translation kernel.
fn grid_measure_matrix(g: &GridRep, nodes: &[(Vector, C64)]) -> CMat {
    let d = g.d();
    let m = g.m();
    let n = g.dim();
    let mut groups: HashMap<Vec<i64>, (Vec<f64>, Vec<(Vec<f64>, f64, C64)>)> = HashMap::new();
    let mut order: Vec<Vec<i64>> = Vec::new();
    for (xi, c) in nodes {
        let (x, k) = g.split().coords(xi);
        let key: Vec<i64> = x.iter().map(|v| (v * 1e11).round() as i64).collect();
        let xk: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (x.clone(), Vec::new())
        });
        entry.1.push((k, xk, *c));
    }
    let points: Vec<Vec<f64>> = (0..n).map(|j| g.point(j)).collect();
    let mut out = linalg::zeros(n, n);
    let mut dl = vec![0usize; d];
    for key in &order {
        let (x, members) = &groups[key];
        let diagonal: Vec<C64> = points
            .iter()
            .map(|q| {
                members
                    .iter()
                    .map(|(k, xk, c)| {
                        let qk: f64 = q.iter().zip(k).map(|(a, b)| a * b).sum();
                        c * C64::from_polar(1.0, qk - 0.5 * xk)
                    })
                    .sum()
            })
            .collect();
        let nz: Vec<Vec<(usize, C64)>> = x
            .iter()
            .map(|&xa| {
                g.axis()
                    .translation_kernel(xa)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, z)| *z != C64::default())
                    .collect()
            })
            .collect();
        let mut combo = vec![0usize; d];
        loop {
            let mut val = C64::new(1.0, 0.0);
            for a in 0..d {
                val *= nz[a][combo[a]].1;
            }
            for l in 0..n {
                axis::split(l, m, &mut dl);
                let mut j = 0usize;
                for a in 0..d {
                    j = j * m + (dl[a] + nz[a][combo[a]].0) % m;
                }
                out[(j, l)] += diagonal[j] * val;
            }
            let mut a = d;
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                combo[a] += 1;
                if combo[a] < nz[a].len() {
                    break;
                }
                combo[a] = 0;
                if a == 0 {
                    a = usize::MAX;
                    break;
                }
            }
            if a == usize::MAX || d == 0 {
                break;
            }
        }
    }
    out
}

/// All Weyl coefficients `tr(W(xi)^* T) / N^d`, `xi` in `{0..N-1}^{2d}`.
pub fn weyl_coefficients(f: &FiniteWeylRep, t: &CMat) -> Result<Vec<(Vector, C64)>> {
    let n = f.dim();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: t.nrows() });
    }
    let inv = 1.0 / n as f64;
    f.lattice_points()
        .into_iter()
        .map(|xi| {
            let w = f.weyl_matrix(&xi)?;
            let mut acc = C64::default();
            for c in 0..n {
                for r in 0..n {
                    let z = w[(r, c)];
                    if z != C64::default() {
                        acc += z.conj() * t[(r, c)];
                    }
                }
            }
            Ok((xi, acc * inv))
        })
        .collect()
}

/// Weyl symbol `T^#` as a comb on the discrete phase space; the exact inverse
/// of [`rep_of_measure`] on the finite backend.
pub fn weyl_symbol(rep: &Rep, t: &CMat) -> Result<DiracComb> {
    let f = match rep {
        Rep::Finite(f) => f,
        _ => return Err(Error::Unsupported("Weyl symbols need the finite backend".into())),
    };
    let coeffs = weyl_coefficients(f, t)?;
    DiracComb::from_atoms(f.space(), coeffs.into_iter().filter(|(_, c)| *c != C64::default()))
}
