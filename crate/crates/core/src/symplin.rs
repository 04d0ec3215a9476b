//! Linear symplectic geometry on a finite-dimensional real space.
//!
//! Subspaces carry an orthonormal basis (Euclidean structure of the
//! coordinates) together with a handle to the ambient form. Lattice
//! operations compare subspaces through their orthogonal projectors.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub type Vector = DVector<f64>;

#[derive(Clone, Debug)]
pub struct SymplecticSpace {
    form: DMatrix<f64>,
}

impl SymplecticSpace {
    pub fn new(form: DMatrix<f64>) -> Result<Self> {
        let d = form.nrows();
        if form.ncols() != d {
            return Err(Error::DegenerateForm("form is not square".into()));
        }
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::DegenerateForm(format!("odd or zero dimension {d}")));
        }
        let scale = form.amax().max(f64::MIN_POSITIVE);
        let asym = (&form + form.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::DegenerateForm(format!("not antisymmetric (defect {asym:.3e})")));
        }
        let sv = form.clone().singular_values();
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin <= tol::RANK * sv.max() {
            return Err(Error::DegenerateForm("form is degenerate".into()));
        }
        Ok(Self { form })
    }

    /// Darboux form on R^{2n}, coordinates (x_1..x_n, k_1..k_n),
    /// sigma((x,k),(y,l)) = <k,y> - <x,l>.
    pub fn standard(n: usize) -> Self {
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = -1.0;
            j[(n + i, i)] = 1.0;
        }
        Self { form: j }
    }

    pub fn dim(&self) -> usize {
        self.form.nrows()
    }

    /// Half the dimension (number of degrees of freedom).
    pub fn degrees(&self) -> usize {
        self.dim() / 2
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    pub fn sigma(&self, a: &Vector, b: &Vector) -> f64 {
        a.dot(&(&self.form * b))
    }

    /// `xi^sigma` as a covector: eta -> sigma(xi, eta).
    pub fn dual(&self, xi: &Vector) -> Vector {
        self.form.transpose() * xi
    }

    pub fn same_as(&self, other: &SymplecticSpace) -> bool {
        self.dim() == other.dim() && (&self.form - &other.form).amax() <= 1e-12 * self.form.amax()
    }

    /// True when the form is orthogonal (J^T J = I), i.e. a compatible complex structure.
    pub fn is_orthogonal(&self) -> bool {
        let d = self.dim();
        (self.form.transpose() * &self.form - DMatrix::<f64>::identity(d, d)).amax() < 1e-12
    }

    pub fn record(&self) -> SpaceRecord {
        SpaceRecord { dim: self.dim(), form: row_major(&self.form) }
    }

    pub fn from_record(rec: &SpaceRecord) -> Result<Self> {
        if rec.form.len() != rec.dim * rec.dim {
            return Err(Error::Format("form length does not match dim".into()));
        }
        Self::new(DMatrix::from_row_slice(rec.dim, rec.dim, &rec.form))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpaceRecord {
    pub dim: usize,
    pub form: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubspaceRecord {
    pub ambient_dim: usize,
    pub rank: usize,
    /// Row-major `ambient_dim x rank` matrix whose columns span the subspace.
    pub basis: Vec<f64>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Orthonormal basis of the column span of `a`.
pub(crate) fn orthonormalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    if a.ncols() == 0 {
        return DMatrix::zeros(d, 0);
    }
    let m = faer::Mat::<f64>::from_fn(d, a.ncols(), |i, j| a[(i, j)]);
    let (s, u) = match m.thin_svd() {
        Ok(svd) => {
            let s: Vec<f64> = (0..svd.S().dim()).map(|i| svd.S().column_vector()[i]).collect();
            let u = svd.U();
            (s, DMatrix::from_fn(d, u.ncols(), |i, j| u[(i, j)]))
        }
        Err(_) => {
            let svd = a.clone().svd(true, false);
            (svd.singular_values.as_slice().to_vec(), svd.u.expect("svd u"))
        }
    };
    let smax = s.iter().copied().fold(0.0, f64::max);
    let cut = tol::RANK * smax.max(1.0);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > cut).collect();
    DMatrix::from_fn(d, keep.len(), |i, c| u[(i, keep[c])])
}

/// Orthonormal basis of the Euclidean orthogonal complement of the span of `q`
/// (columns of `q` orthonormal).
pub(crate) fn orthogonal_complement(q: &DMatrix<f64>) -> DMatrix<f64> {
    let d = q.nrows();
    let p = DMatrix::<f64>::identity(d, d) - q * q.transpose();
    let eig = p.symmetric_eigen();
    let keep: Vec<usize> = (0..d).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    let mut out = DMatrix::zeros(d, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &eig.eigenvectors.column(i));
    }
    out
}

#[derive(Clone, Debug)]
pub struct Subspace {
    space: Arc<SymplecticSpace>,
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn span(space: &Arc<SymplecticSpace>, vectors: &[Vector]) -> Result<Self> {
        let d = space.dim();
        for v in vectors {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.len() });
            }
        }
        let mut a = DMatrix::zeros(d, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            a.set_column(j, v);
        }
        Self::from_columns(space, &a)
    }

    pub fn from_columns(space: &Arc<SymplecticSpace>, cols: &DMatrix<f64>) -> Result<Self> {
        if cols.nrows() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: cols.nrows() });
        }
        let k = cols.ncols();
        let gram = cols.transpose() * cols - DMatrix::<f64>::identity(k, k);
        if k > 0 && gram.amax() <= tol::ORTHO {
            return Ok(Self { space: space.clone(), basis: cols.clone() });
        }
        Ok(Self { space: space.clone(), basis: orthonormalize(cols) })
    }

    pub fn zero(space: &Arc<SymplecticSpace>) -> Self {
        Self { space: space.clone(), basis: DMatrix::zeros(space.dim(), 0) }
    }

    pub fn full(space: &Arc<SymplecticSpace>) -> Self {
        let d = space.dim();
        Self { space: space.clone(), basis: DMatrix::identity(d, d) }
    }

    /// Span of the given coordinate axes.
    pub fn axes(space: &Arc<SymplecticSpace>, idx: &[usize]) -> Result<Self> {
        let d = space.dim();
        let vs: Vec<Vector> = idx
            .iter()
            .map(|&i| {
                let mut v = Vector::zeros(d);
                if i < d {
                    v[i] = 1.0;
                }
                v
            })
            .collect();
        if let Some(&bad) = idx.iter().find(|&&i| i >= d) {
            return Err(Error::InvalidSubspace(format!("axis {bad} out of range")));
        }
        Self::span(space, &vs)
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vector(&self, j: usize) -> Vector {
        self.basis.column(j).into_owned()
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &Vector) -> Vector {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Coordinates of `v` (assumed in the subspace) in the stored basis.
    pub fn coords(&self, v: &Vector) -> Vector {
        self.basis.transpose() * v
    }

    /// Euclidean distance from `v` to the subspace.
    pub fn residual(&self, v: &Vector) -> f64 {
        (v - self.project(v)).norm()
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.residual(v) <= tol::DEDUP * v.norm().max(1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn is_subset_of(&self, other: &Subspace) -> bool {
        if self.dim() > other.dim() {
            return false;
        }
        let r = &self.basis - other.projector() * &self.basis;
        r.iter().fold(0.0f64, |m, x| m.max(x.abs())) <= tol::DEDUP
    }

    /// Spectral-norm distance between the orthogonal projectors.
    pub fn distance(&self, other: &Subspace) -> f64 {
        let diff = self.projector() - other.projector();
        if diff.amax() == 0.0 {
            return 0.0;
        }
        diff.symmetric_eigen().eigenvalues.amax()
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.distance(other) <= tol::DEDUP
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    /// Largest deviation of the stored basis from orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.dim();
        (self.basis.transpose() * &self.basis - DMatrix::<f64>::identity(k, k))
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn record(&self) -> SubspaceRecord {
        SubspaceRecord { ambient_dim: self.ambient_dim(), rank: self.dim(), basis: row_major(&self.basis) }
    }

    pub fn from_record(space: &Arc<SymplecticSpace>, rec: &SubspaceRecord) -> Result<Self> {
        if rec.ambient_dim != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: rec.ambient_dim });
        }
        if rec.basis.len() != rec.ambient_dim * rec.rank {
            return Err(Error::Format("basis length does not match ambient_dim * rank".into()));
        }
        let m = DMatrix::from_row_slice(rec.ambient_dim, rec.rank, &rec.basis);
        let s = Self::from_columns(space, &m)?;
        if s.dim() != rec.rank {
            return Err(Error::Format("basis columns are linearly dependent".into()));
        }
        Ok(s)
    }
}

/// E^sigma = { xi : sigma(xi, eta) = 0 for all eta in E }.
pub fn sigma_complement(e: &Subspace) -> Subspace {
    let space = e.space();
    if e.is_zero() {
        return Subspace::full(space);
    }
    let jb = space.form() * e.basis();
    let q = orthonormalize(&jb);
    Subspace { space: space.clone(), basis: orthogonal_complement(&q) }
}

pub fn lattice_sum(e: &Subspace, f: &Subspace) -> Result<Subspace> {
    e.check_ambient(f)?;
    let mut a = DMatrix::zeros(e.ambient_dim(), e.dim() + f.dim());
    a.columns_mut(0, e.dim()).copy_from(e.basis());
    a.columns_mut(e.dim(), f.dim()).copy_from(f.basis());
    Subspace::from_columns(e.space(), &a)
}

pub fn lattice_intersect(e: &Subspace, f: &Subspace) -> Result<Subspace> {
    e.check_ambient(f)?;
    let ec = orthogonal_complement(e.basis());
    let fc = orthogonal_complement(f.basis());
    let mut a = DMatrix::zeros(e.ambient_dim(), ec.ncols() + fc.ncols());
    a.columns_mut(0, ec.ncols()).copy_from(&ec);
    a.columns_mut(ec.ncols(), fc.ncols()).copy_from(&fc);
    let s = orthonormalize(&a);
    Ok(Subspace { space: e.space().clone(), basis: orthogonal_complement(&s) })
}

/// Euclidean orthogonal complement of `f` inside `e`.
pub fn relative_complement(e: &Subspace, f: &Subspace) -> Result<Subspace> {
    let fperp = Subspace { space: f.space().clone(), basis: orthogonal_complement(f.basis()) };
    lattice_intersect(e, &fperp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Lagrangian,
    Symplectic,
    Isotropic,
    Involutive,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub class: Class,
    pub isotropic: bool,
    pub involutive: bool,
    pub symplectic: bool,
    pub lagrangian: bool,
    /// dim(E cap E^sigma)
    pub centralizer_dim: usize,
}

/// Classifies E by its position relative to E^sigma. A subspace that is both
/// isotropic and symplectic (only {0}) is reported as symplectic.
pub fn classify(e: &Subspace) -> Classification {
    let es = sigma_complement(e);
    let isotropic = e.is_subset_of(&es);
    let involutive = es.is_subset_of(e);
    let ec = lattice_intersect(e, &es).expect("same ambient");
    let symplectic = ec.is_zero();
    let lagrangian = isotropic && involutive && !e.is_zero();
    let class = if lagrangian {
        Class::Lagrangian
    } else if symplectic {
        Class::Symplectic
    } else if isotropic {
        Class::Isotropic
    } else if involutive {
        Class::Involutive
    } else {
        Class::Generic
    };
    Classification { class, isotropic, involutive, symplectic, lagrangian, centralizer_dim: ec.dim() }
}

/// Pairs (e_i, f_i) with sigma(e_i, f_j) = delta_ij and all other pairings zero.
#[derive(Clone, Debug)]
pub struct SymplecticBasis {
    pub e: Vec<Vector>,
    pub f: Vec<Vector>,
}

impl SymplecticBasis {
    /// Columns (e_1..e_n, f_1..f_n).
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.e.first().map(|v| v.len()).unwrap_or(0);
        let n = self.e.len();
        let mut m = DMatrix::zeros(d, 2 * n);
        for i in 0..n {
            m.set_column(i, &self.e[i]);
            m.set_column(n + i, &self.f[i]);
        }
        m
    }

    /// Largest deviation of the Gram matrix from the Darboux normal form.
    pub fn defect(&self, space: &SymplecticSpace) -> f64 {
        let n = self.e.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((space.sigma(&self.e[i], &self.f[j]) - want).abs());
                worst = worst.max(space.sigma(&self.e[i], &self.e[j]).abs());
                worst = worst.max(space.sigma(&self.f[i], &self.f[j]).abs());
            }
        }
        worst
    }
}

/// Symplectic Gram-Schmidt on the whole space.
pub fn symplectic_basis(space: &Arc<SymplecticSpace>) -> Result<SymplecticBasis> {
    symplectic_basis_of(&Subspace::full(space))
}

/// Symplectic Gram-Schmidt inside a symplectic subspace.
pub fn symplectic_basis_of(e: &Subspace) -> Result<SymplecticBasis> {
    let space = e.space().clone();
    if !e.dim().is_multiple_of(2) {
        return Err(Error::Precondition("odd-dimensional subspace is not symplectic".into()));
    }
    let mut pool: Vec<Vector> = (0..e.dim()).map(|j| e.basis_vector(j)).collect();
    let scale = space.form().amax();
    let mut out = SymplecticBasis { e: vec![], f: vec![] };
    while !pool.is_empty() {
        let (ia, _) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        let a = pool.swap_remove(ia);
        if a.norm() <= tol::RANK {
            return Err(Error::Precondition("subspace is not symplectic".into()));
        }
        let a = &a / a.norm();
        let (ib, sb) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, space.sigma(&a, v)))
            .fold((usize::MAX, 0.0f64), |best, c| if c.1.abs() > best.1.abs() { c } else { best });
        if ib == usize::MAX || sb.abs() <= tol::RANK * scale {
            return Err(Error::Precondition("subspace is not symplectic".into()));
        }
        let b = pool.swap_remove(ib) / sb;
        for v in pool.iter_mut() {
            let sva = space.sigma(v, &a);
            let svb = space.sigma(v, &b);
            *v = &*v - &a * svb + &b * sva;
        }
        out.e.push(a);
        out.f.push(b);
    }
    Ok(out)
}

/// E = G + Ec, E^sigma = F + Ec with Ec = E cap E^sigma, and K a Lagrangian
/// complement of Ec in (G + F)^sigma, so that Xi = E + F + K.
#[derive(Clone, Debug)]
pub struct CentralizerSplit {
    pub ec: Subspace,
    pub g: Subspace,
    pub f: Subspace,
    pub k: Subspace,
}

pub fn centralizer_split(e: &Subspace) -> Result<CentralizerSplit> {
    let space = e.space().clone();
    let es = sigma_complement(e);
    let ec = lattice_intersect(e, &es)?;
    let g = relative_complement(e, &ec)?;
    let f = relative_complement(&es, &ec)?;
    let h = lattice_sum(&g, &f)?;
    let hs = sigma_complement(&h);
    let c = relative_complement(&hs, &ec)?;
    let n = ec.dim();
    if c.dim() != n {
        return Err(Error::Numerical(format!("complement of Ec has dim {} != {}", c.dim(), n)));
    }
    let k = if n == 0 {
        Subspace::zero(&space)
    } else {
        let mut p = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] = space.sigma(&ec.basis_vector(i), &c.basis_vector(j));
            }
        }
        let pinv = p.try_inverse().ok_or_else(|| Error::Numerical("Ec pairing is singular".into()))?;
        let fcols = c.basis() * pinv;
        let mut s = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = space.sigma(&fcols.column(i).into_owned(), &fcols.column(j).into_owned());
            }
        }
        let kcols = fcols - ec.basis() * s.transpose() * 0.5;
        Subspace::from_columns(&space, &kcols)?
    };
    Ok(CentralizerSplit { ec, g, f, k })
}
