//! Graded structure of the field algebra: component generators, the
//! projections `P_E` as strong limits of `W(r omega)^* T W(r omega)`, Moebius
//! recovery of components, and membership / support diagnostics.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Semilattice;
use crate::linalg::{self, CMat};
use crate::rep::{field_op, weyl_coefficients, weyl_op, FiniteWeylRep, Rep};
use crate::symplin::{sigma_complement, Subspace, SubspaceRecord, Vector};
use crate::{tol, C64};

/// `u(phi(xi))` through the eigendecomposition of the field operator.
pub fn field_function(rep: &Rep, xi: &Vector, u: impl Fn(f64) -> C64) -> Result<CMat> {
    linalg::func_hermitian(&field_op(rep, xi)?.matrix, u)
}

/// Largest column norm of `a * frame`.
pub fn frame_distance(a: &CMat, frame: &CMat) -> f64 {
    linalg::frame_norm(a, frame)
}

/// Resolvent product `prod_j (phi(xi_j) + i lambda_j)^{-1}` for a basis of E.
#[derive(Clone, Debug)]
pub struct ComponentGenerator {
    pub subspace: Subspace,
    pub basis: Vec<Vector>,
    pub shifts: Vec<f64>,
    pub matrix: CMat,
}

pub fn component_generator(rep: &Rep, e: &Subspace, basis: &[Vector], lambdas: &[f64]) -> Result<ComponentGenerator> {
    if basis.len() != lambdas.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: lambdas.len() });
    }
    if lambdas.iter().any(|l| *l == 0.0 || !l.is_finite()) {
        return Err(Error::Precondition("resolvent shifts must be nonzero".into()));
    }
    let span = Subspace::span(e.space(), basis)?;
    if span.dim() != basis.len() || !span.same_as(e) {
        return Err(Error::InvalidSubspace("generator vectors must form a basis of E".into()));
    }
    let n = rep.dim();
    let mut matrix = linalg::identity(n);
    for (xi, &lam) in basis.iter().zip(lambdas) {
        let mut a = field_op(rep, xi)?.matrix;
        for i in 0..n {
            a[(i, i)] += C64::new(0.0, lam);
        }
        matrix = &matrix * linalg::inverse(&a);
    }
    Ok(ComponentGenerator { subspace: e.clone(), basis: basis.to_vec(), shifts: lambdas.to_vec(), matrix })
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

impl ComponentGenerator {
    /// Compares `i^k` times the matrix with the product of the integrals
    /// `eps_j int_{I_j} e^{-s lambda_j} W(s xi_j) ds` (I_j the half-line of
    /// the sign of lambda_j), each evaluated by panelled Gauss-Legendre
    /// quadrature. Returns the spectral norm of the difference.
    pub fn integral_residual(&self, rep: &Rep) -> Result<f64> {
        let n = rep.dim();
        let rule = gauss_legendre(16);
        let mut prod = linalg::identity(n);
        for (xi, &lam) in self.basis.iter().zip(&self.shifts) {
            let phi_max = linalg::spectral_norm(&field_op(rep, xi)?.matrix).max(1.0);
            let sign = lam.signum();
            let extent = 38.0 / lam.abs();
            let width = (1.0 / lam.abs()).min(8.0 / phi_max);
            let panels = (extent / width).ceil() as usize;
            let width = extent / panels as f64;
            let mut acc = linalg::zeros(n, n);
            for p in 0..panels {
                for &(x, w) in &rule {
                    let s = (p as f64 + 0.5 * (x + 1.0)) * width;
                    let weight = sign * 0.5 * width * w * (-s * lam.abs()).exp();
                    let wm = weyl_op(rep, &(xi * (sign * s)))?.matrix;
                    linalg::add_assign(&mut acc, C64::new(weight, 0.0), &wm);
                }
            }
            prod = &prod * acc;
        }
        let ik = C64::new(0.0, 1.0).powu(self.basis.len() as u32);
        Ok(linalg::spectral_norm(&linalg::sub(&linalg::scale(&self.matrix, ik), &prod)))
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum Verdict {
    #[serde(rename = "converged-to-T")]
    ConvergedToT,
    #[serde(rename = "converged-to-0")]
    ConvergedToZero,
    #[serde(rename = "converged-to-other")]
    ConvergedToOther,
    #[serde(rename = "no-convergence")]
    NoConvergence,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub target: SubspaceRecord,
    pub omega: Vec<f64>,
    pub schedule: Vec<f64>,
    /// Schedule points dropped for leaving the box.
    pub truncated: Vec<f64>,
    pub dist_to_t: Vec<f64>,
    pub dist_to_zero: Vec<f64>,
    /// Frame distance to the previous schedule point (0 for the first).
    pub successive: Vec<f64>,
    pub verdict: Verdict,
    pub tol: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub limit: Option<CMat>,
}

/// Largest `|r|` for which translating the frame by `r omega` stays box-safe.
pub fn box_limit(rep: &Rep, omega: &Vector) -> f64 {
    let mut lim = f64::INFINITY;
    match rep {
        Rep::Grid(g) => {
            let (x, k) = g.split().coords(omega);
            let kmax = std::f64::consts::PI / (2.0 * g.h());
            for a in 0..g.d() {
                if x[a] != 0.0 {
                    lim = lim.min(0.5 * g.l() / x[a].abs());
                }
                if k[a] != 0.0 {
                    lim = lim.min(kmax / k[a].abs());
                }
            }
        }
        Rep::Regular(r) => {
            for v in omega.iter() {
                if *v != 0.0 {
                    lim = lim.min(0.5 * r.l() / v.abs());
                }
            }
        }
        Rep::Finite(_) => {}
    }
    lim
}

/// `r in {1, 2, 4, 8, 16, 32} r0`, `r0 = L / (64 |omega|)`.
pub fn default_schedule(rep: &Rep, omega: &Vector) -> Vec<f64> {
    let l = match rep {
        Rep::Grid(g) => g.l(),
        Rep::Regular(r) => r.l(),
        Rep::Finite(f) => 64.0 * f.modulus() as f64 / 32.0,
    };
    let r0 = l / (64.0 * omega.norm());
    [1.0, 2.0, 4.0, 8.0, 16.0, 32.0].iter().map(|s| s * r0).collect()
}

/// `count` equally spaced points in `[lo, hi] * box_limit`.
pub fn tail_schedule(rep: &Rep, omega: &Vector, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let lim = box_limit(rep, omega);
    let lim = if lim.is_finite() { lim } else { 1.0 };
    (0..count)
        .map(|j| lim * (lo + (hi - lo) * j as f64 / (count.max(2) - 1) as f64))
        .collect()
}

fn conjugate_frame(rep: &Rep, t: &dyn Fn(&CMat) -> Result<CMat>, xi: &Vector, frame: &CMat) -> Result<CMat> {
    let n = rep.dim();
    let cols = frame.ncols();
    let mut moved = frame.clone();
    let mut buf = vec![C64::default(); n];
    for c in 0..cols {
        for i in 0..n {
            buf[i] = moved[(i, c)];
        }
        rep.apply_weyl(xi, &mut buf)?;
        for i in 0..n {
            moved[(i, c)] = buf[i];
        }
    }
    let mut img = t(&moved)?;
    for c in 0..cols {
        for i in 0..n {
            buf[i] = img[(i, c)];
        }
        rep.apply_weyl_adjoint(xi, &mut buf)?;
        for i in 0..n {
            img[(i, c)] = buf[i];
        }
    }
    Ok(img)
}

fn max_col_diff(a: &CMat, b: &CMat) -> f64 {
    linalg::max_col_norm(&linalg::sub(a, b))
}

/// Frame images of `W(r omega)^* T W(r omega)` along a box-safe schedule.
#[derive(Clone, Debug)]
pub struct ConjugationTrace {
    pub schedule: Vec<f64>,
    pub truncated: Vec<f64>,
    pub images: Vec<CMat>,
    /// Frame distance to the previous schedule point (0 for the first).
    pub successive: Vec<f64>,
    pub warnings: Vec<String>,
}

impl ConjugationTrace {
    /// Last three successive distances below `tol` (needs four points).
    pub fn converged(&self, tol: f64) -> bool {
        let n = self.images.len();
        n >= 4 && self.successive[n - 3..].iter().all(|d| *d < tol)
    }
}

/// Conjugates `T` by `W(r omega)` on the test frame for every box-safe `r`;
/// the schedule must increase in `|r|`.
pub fn conjugation_trace(rep: &Rep, t: &CMat, omega: &Vector, schedule: &[f64]) -> Result<ConjugationTrace> {
    conjugation_trace_with(rep, &|v: &CMat| Ok(t * v), omega, schedule)
}

/// [`conjugation_trace`] for an operator given by its action on blocks of
/// column vectors.
pub fn conjugation_trace_with(
    rep: &Rep,
    t: &dyn Fn(&CMat) -> Result<CMat>,
    omega: &Vector,
    schedule: &[f64],
) -> Result<ConjugationTrace> {
    if omega.norm() == 0.0 {
        return Err(Error::Precondition("omega must be nonzero".into()));
    }
    if schedule.windows(2).any(|w| w[1].abs() <= w[0].abs()) {
        return Err(Error::Precondition("schedule must increase in |r|".into()));
    }
    let lim = box_limit(rep, omega) * (1.0 + 1e-12);
    let mut warnings = Vec::new();
    let (kept, truncated): (Vec<f64>, Vec<f64>) = schedule.iter().partition(|r| r.abs() <= lim);
    if !truncated.is_empty() {
        warnings.push(format!("{} schedule points leave the box and were dropped", truncated.len()));
    }
    if kept.len() < 4 {
        warnings.push("fewer than four box-safe schedule points".into());
    }
    let frame = rep.frame();
    let mut images: Vec<CMat> = Vec::with_capacity(kept.len());
    let mut successive = Vec::with_capacity(kept.len());
    for &r in &kept {
        let img = conjugate_frame(rep, t, &(omega * r), &frame)?;
        successive.push(images.last().map(|p| max_col_diff(&img, p)).unwrap_or(0.0));
        images.push(img);
    }
    Ok(ConjugationTrace { schedule: kept, truncated, images, successive, warnings })
}

/// `W(r omega)^* T W(r omega)` along the schedule, evaluated on the test frame.
pub fn project_pe(rep: &Rep, t: &CMat, e: &Subspace, omega: &Vector, schedule: &[f64], tol: f64) -> Result<ProjectionReport> {
    if omega.norm() == 0.0 || !sigma_complement(e).contains(omega) {
        return Err(Error::Precondition("omega must be a nonzero vector of the sigma-complement of E".into()));
    }
    let tr = conjugation_trace(rep, t, omega, schedule)?;
    let tf = t * &rep.frame();
    let dist_to_t: Vec<f64> = tr.images.iter().map(|img| max_col_diff(img, &tf)).collect();
    let dist_to_zero: Vec<f64> = tr.images.iter().map(linalg::max_col_norm).collect();
    let verdict = if !tr.converged(tol) {
        Verdict::NoConvergence
    } else if *dist_to_t.last().expect("nonempty") < tol {
        Verdict::ConvergedToT
    } else if *dist_to_zero.last().expect("nonempty") < tol {
        Verdict::ConvergedToZero
    } else {
        Verdict::ConvergedToOther
    };
    let limit = match tr.schedule.last() {
        Some(&r) => {
            let w = weyl_op(rep, &(omega * r))?.matrix;
            Some(w.adjoint() * t * &w)
        }
        None => None,
    };
    Ok(ProjectionReport {
        target: e.record(),
        omega: omega.iter().cloned().collect(),
        schedule: tr.schedule,
        truncated: tr.truncated,
        dist_to_t,
        dist_to_zero,
        successive: tr.successive,
        verdict,
        tol,
        warnings: tr.warnings,
        limit,
    })
}

/// Angle between a vector and a subspace.
fn angle_to(v: &Vector, s: &Subspace) -> f64 {
    let n = v.norm();
    if n == 0.0 {
        return 0.0;
    }
    (s.residual(v) / n).clamp(0.0, 1.0).asin()
}

/// Direction in `target` maximizing the smallest angle to the excluded
/// subspaces among `candidates` seeded samples; candidates closer than
/// 1e-3 rad to some excluded subspace are rejected.
pub fn choose_direction(target: &Subspace, excluded: &[Subspace], seed: u64, candidates: usize) -> Result<Vector> {
    if target.is_zero() {
        return Err(Error::NoDirection("target subspace is {0}".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = target.dim();
    let mut best: Option<(f64, Vector)> = None;
    for _ in 0..candidates.max(1) {
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = target.basis() * Vector::from_vec(c);
        let nv = v.norm();
        if nv < 1e-6 {
            continue;
        }
        let v = v / nv;
        let worst = excluded.iter().map(|s| angle_to(&v, s)).fold(std::f64::consts::FRAC_PI_2, f64::min);
        if worst < tol::DIRECTION_ANGLE {
            continue;
        }
        if best.as_ref().map(|(a, _)| worst > *a).unwrap_or(true) {
            best = Some((worst, v));
        }
    }
    best.map(|(_, v)| v).ok_or_else(|| {
        Error::NoDirection(format!(
            "all {candidates} candidates in a {k}-dimensional target lie within {} rad of an excluded subspace",
            tol::DIRECTION_ANGLE
        ))
    })
}

/// Operators indexed by the elements of a semilattice.
#[derive(Clone, Debug)]
pub struct GradedElement {
    pub semilattice: Semilattice,
    pub components: Vec<CMat>,
}

impl GradedElement {
    pub fn new(semilattice: Semilattice, components: Vec<CMat>) -> Result<Self> {
        if components.len() != semilattice.len() {
            return Err(Error::IncompleteFamily(format!(
                "{} components for {} elements",
                components.len(),
                semilattice.len()
            )));
        }
        let n = components.first().map(|c| c.nrows()).unwrap_or(0);
        if components.iter().any(|c| c.nrows() != n || c.ncols() != n) {
            return Err(Error::Precondition("components must share one representation".into()));
        }
        Ok(Self { semilattice, components })
    }

    pub fn total(&self) -> CMat {
        let n = self.components[0].nrows();
        let mut t = linalg::zeros(n, n);
        for c in &self.components {
            linalg::add_assign(&mut t, C64::new(1.0, 0.0), c);
        }
        t
    }

    /// `sum_{F subset E} T(F)` over the components.
    pub fn cumulative(&self, e: &Subspace) -> CMat {
        let n = self.components[0].nrows();
        let mut t = linalg::zeros(n, n);
        for (f, c) in self.semilattice.elements().iter().zip(&self.components) {
            if f.is_subset_of(e) {
                linalg::add_assign(&mut t, C64::new(1.0, 0.0), c);
            }
        }
        t
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecomposeOptions {
    pub seed: u64,
    pub candidates: usize,
    /// Schedule as fractions of the box limit.
    pub schedule_lo: f64,
    pub schedule_hi: f64,
    pub schedule_points: usize,
    pub tol: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self { seed: 7, candidates: 64, schedule_lo: 0.5, schedule_hi: 0.98, schedule_points: 6, tol: 1e-3 }
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub recovered: GradedElement,
    /// `P_F(T)` for every element F.
    pub projections: Vec<CMat>,
    pub directions: Vec<Option<Vec<f64>>>,
    pub reports: Vec<Option<ProjectionReport>>,
    /// Frame distance between recovered and declared components.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Excluded subspaces `E^sigma` for `E` in S with `E` not contained in `f`.
pub fn excluded_for(s: &Semilattice, f: &Subspace) -> Vec<Subspace> {
    s.elements().iter().filter(|e| !e.is_subset_of(f)).map(sigma_complement).collect()
}

/// `P_F(T)` for one element F of the semilattice (identity when `F^sigma = 0`).
pub fn project_element(
    rep: &Rep,
    t: &CMat,
    s: &Semilattice,
    f: &Subspace,
    opts: &DecomposeOptions,
) -> Result<(CMat, Option<Vec<f64>>, Option<ProjectionReport>)> {
    let fs = sigma_complement(f);
    if fs.is_zero() {
        return Ok((t.clone(), None, None));
    }
    let omega = choose_direction(&fs, &excluded_for(s, f), opts.seed, opts.candidates)?;
    let sched = tail_schedule(rep, &omega, opts.schedule_lo, opts.schedule_hi, opts.schedule_points);
    let rep_ = project_pe(rep, t, f, &omega, &sched, opts.tol)?;
    let lim = rep_.limit.clone().ok_or_else(|| Error::Numerical("empty schedule".into()))?;
    Ok((lim, Some(omega.iter().cloned().collect()), Some(rep_)))
}

/// Recovers the components of `declared.total()` by projecting onto every
/// element and Moebius-inverting the cumulative family.
pub fn graded_decompose(rep: &Rep, declared: &GradedElement, opts: &DecomposeOptions) -> Result<Decomposition> {
    let s = &declared.semilattice;
    let t = declared.total();
    let mut projections = Vec::new();
    let mut directions = Vec::new();
    let mut reports = Vec::new();
    for f in s.elements() {
        let (p, d, r) = project_element(rep, &t, s, f, opts)?;
        projections.push(p);
        directions.push(d);
        reports.push(r);
    }
    let n = t.nrows();
    let comps = s.invert_family(&projections, || linalg::zeros(n, n), |acc, c, v| {
        linalg::add_assign(acc, C64::new(c as f64, 0.0), v)
    })?;
    let frame = rep.frame();
    let residuals: Vec<f64> = comps
        .iter()
        .zip(&declared.components)
        .map(|(a, b)| frame_distance(&linalg::sub(a, b), &frame))
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(Decomposition {
        recovered: GradedElement::new(s.clone(), comps)?,
        projections,
        directions,
        reports,
        residuals,
        max_residual,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismReport {
    pub residuals: Vec<f64>,
    pub max: f64,
    pub omega: Option<Vec<f64>>,
}

/// Frame distance between the dynamically projected product `P_E(TS)` and
/// the product of the algebraic projections `sum_{F subset E} T(F)`.
pub fn morphism_residual(
    rep: &Rep,
    e: &Subspace,
    pairs: &[(GradedElement, GradedElement)],
    opts: &DecomposeOptions,
) -> Result<MorphismReport> {
    let frame = rep.frame();
    let mut residuals = Vec::new();
    let mut omega = None;
    for (a, b) in pairs {
        let ts = a.total() * b.total();
        let (dyn_p, w, _) = project_element(rep, &ts, &a.semilattice, e, opts)?;
        omega = w;
        let alg = a.cumulative(e) * b.cumulative(e);
        residuals.push(frame_distance(&linalg::sub(&dyn_p, &alg), &frame));
    }
    let max = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(MorphismReport { residuals, max, omega })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipReport {
    /// Probe radii, largest first.
    pub scales: Vec<f64>,
    /// (i): max ||[W(xi), T]|| over probes of each radius in Xi.
    pub commutator_small: Vec<f64>,
    /// (ii): max ||[W(xi), T]|| over probes in E^sigma.
    pub commutator_complement: f64,
    /// (iii): max ||(W(xi) - 1) T|| over probes of each radius in E.
    pub regularity: Vec<f64>,
    pub residual_i: f64,
    pub residual_ii: f64,
    pub residual_iii: f64,
    pub decreasing: bool,
    pub tol: f64,
    pub pass: bool,
}

fn unit_probes(s: &Subspace) -> Vec<Vector> {
    let k = s.dim();
    let mut out: Vec<Vector> = (0..k).map(|j| s.basis_vector(j)).collect();
    for a in 0..k {
        for b in (a + 1)..k {
            out.push((s.basis_vector(a) + s.basis_vector(b)) / 2f64.sqrt());
            out.push((s.basis_vector(a) - s.basis_vector(b)) / 2f64.sqrt());
        }
    }
    out
}

/// Residuals of the three membership conditions for `T` and `E`. Norms are
/// full operator norms; `scale` is the largest probe radius and two halvings
/// follow it.
pub fn membership_check(rep: &Rep, t: &CMat, e: &Subspace, scale: f64, tol: f64) -> Result<MembershipReport> {
    let full = Subspace::full(e.space());
    let es = sigma_complement(e);
    let scales = vec![scale, scale / 2.0, scale / 4.0];
    let commut = |xi: &Vector| -> Result<f64> {
        let w = weyl_op(rep, xi)?.matrix;
        Ok(linalg::spectral_norm(&linalg::sub(&(&w * t), &(t * &w))))
    };
    let mut commutator_small = Vec::new();
    let mut regularity = Vec::new();
    for &r in &scales {
        let mut ci = 0.0f64;
        for v in unit_probes(&full) {
            ci = ci.max(commut(&(v * r))?);
        }
        commutator_small.push(ci);
        let mut ciii = 0.0f64;
        for v in unit_probes(e) {
            let w = weyl_op(rep, &(v * r))?.matrix;
            let d = linalg::sub(&(&w * t), t);
            ciii = ciii.max(linalg::spectral_norm(&d));
        }
        regularity.push(ciii);
    }
    let mut commutator_complement = 0.0f64;
    for v in unit_probes(&es) {
        for f in [0.5, 1.0] {
            commutator_complement = commutator_complement.max(commut(&(&v * f))?);
        }
    }
    let residual_i = commutator_small[0];
    let residual_iii = regularity[0];
    let decreasing = commutator_small.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-13)
        && regularity.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-13);
    let pass = residual_i < tol && commutator_complement < tol && residual_iii < tol && decreasing;
    Ok(MembershipReport {
        scales,
        commutator_small,
        commutator_complement,
        regularity,
        residual_i,
        residual_ii: commutator_complement,
        residual_iii,
        decreasing,
        tol,
        pass,
    })
}

/// Elements of the subgroup of `Z_N^{2d}` generated by `gens`.
pub fn subgroup(f: &FiniteWeylRep, gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = f.modulus() as i64;
    let dim = 2 * f.d();
    let zero = vec![0i64; dim];
    let mut seen: HashSet<Vec<i64>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    let mut out = Vec::new();
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q: Vec<i64> = p.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(n)).collect();
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
        out.push(p);
    }
    out.sort();
    out
}

fn to_vector(p: &[i64]) -> Vector {
    Vector::from_iterator(p.len(), p.iter().map(|&v| v as f64))
}

/// `{eta : sigma(xi, eta) = 0 mod 2 pi for all xi in group}`.
pub fn discrete_complement(f: &FiniteWeylRep, group: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for eta in f.lattice_points() {
        let mut ok = true;
        for g in group {
            if f.sigma_units(&to_vector(g), &eta)? != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(eta.iter().map(|v| v.round() as i64).collect());
        }
    }
    Ok(out)
}

/// `|G|^{-1} sum_{eta in G} W(eta)^* T W(eta)`.
pub fn group_average(f: &FiniteWeylRep, t: &CMat, group: &[Vec<i64>]) -> Result<CMat> {
    let n = f.dim();
    let mut acc = linalg::zeros(n, n);
    for g in group {
        let w = f.weyl_matrix(&to_vector(g))?;
        let c = w.adjoint() * t * &w;
        linalg::add_assign(&mut acc, C64::new(1.0 / group.len() as f64, 0.0), &c);
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupportReport {
    pub subgroup_size: usize,
    pub complement_size: usize,
    /// Max `||[W(eta), T]||` over the complement, relative to `max(1, ||T||)`.
    pub commutation_residual: f64,
    pub precondition_holds: bool,
    pub max_off_support: f64,
    pub max_on_support: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks that the Weyl symbol of `T` lives on the subgroup generated by `gens`,
/// after verifying that `T` commutes with the Weyl operators of its complement.
pub fn support_check(f: &FiniteWeylRep, t: &CMat, gens: &[Vec<i64>], tol: f64) -> Result<SupportReport> {
    let group = subgroup(f, gens);
    let comp = discrete_complement(f, &group)?;
    let scale = linalg::spectral_norm(t).max(1.0);
    let mut commutation_residual = 0.0f64;
    for eta in &comp {
        let w = f.weyl_matrix(&to_vector(eta))?;
        let d = linalg::sub(&(&w * t), &(t * &w));
        commutation_residual = commutation_residual.max(linalg::max_abs(&d) / scale);
    }
    let precondition_holds = commutation_residual < 1e-10;
    let members: HashSet<Vec<i64>> = group.iter().cloned().collect();
    let mut max_off_support = 0.0f64;
    let mut max_on_support = 0.0f64;
    for (xi, c) in weyl_coefficients(f, t)? {
        let key: Vec<i64> = xi.iter().map(|v| v.round() as i64).collect();
        if members.contains(&key) {
            max_on_support = max_on_support.max(c.norm());
        } else {
            max_off_support = max_off_support.max(c.norm());
        }
    }
    Ok(SupportReport {
        subgroup_size: group.len(),
        complement_size: comp.len(),
        commutation_residual,
        precondition_holds,
        max_off_support,
        max_on_support,
        tol,
        pass: precondition_holds && max_off_support < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let r = gauss_legendre(16);
        let s: f64 = r.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn subgroup_of_z4() {
        let f = FiniteWeylRep::new(4, 1).unwrap();
        let g = subgroup(&f, &[vec![2, 0]]);
        assert_eq!(g, vec![vec![0, 0], vec![2, 0]]);
        let c = discrete_complement(&f, &g).unwrap();
        assert_eq!(c.len(), 8);
    }
}
