//! Hamiltonians affiliated to the field algebra and their spectra: the
//! operators `Delta_E`, graded N-body Hamiltonians on a Schrodinger grid,
//! the HVZ essential spectrum as a union over co-atoms, translation limits
//! and compactness diagnostics.

use faer::linalg::solvers::Solve;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::{choose_direction, conjugation_trace, conjugation_trace_with, excluded_for, ConjugationTrace};
use crate::lattice::Semilattice;
use crate::linalg::{self, CMat};
use crate::rep::axis::split;
use crate::rep::{field_op, GridRep, OperatorMatrix, Rep, RepDescriptor};
use crate::symplin::{lattice_intersect, relative_complement, sigma_complement, Subspace, SubspaceRecord, Vector};
use crate::C64;

/// Sorted eigenvalues of a Hermitian matrix.
pub fn spectrum(h: &CMat) -> Result<Vec<f64>> {
    let mut ev = linalg::eigvalsh(h)?;
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// `Delta_E = sum_j phi(e_j)^2` for an orthonormal basis `e_j` of E.
pub fn laplacian_delta_e(rep: &Rep, e: &Subspace, basis: &[Vector]) -> Result<OperatorMatrix> {
    if basis.len() != e.dim() {
        return Err(Error::Precondition(format!("basis has {} vectors, E has dimension {}", basis.len(), e.dim())));
    }
    for (i, u) in basis.iter().enumerate() {
        if !e.contains(u) {
            return Err(Error::Precondition(format!("basis vector {i} is not in E")));
        }
        for (j, w) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            if (u.dot(w) - target).abs() > 1e-10 {
                return Err(Error::Precondition("basis is not orthonormal".into()));
            }
        }
    }
    let n = rep.dim();
    let mut out = linalg::zeros(n, n);
    for u in basis {
        let f = field_op(rep, u)?.matrix;
        let f2 = &f * &f;
        linalg::add_assign(&mut out, C64::new(1.0, 0.0), &f2);
    }
    Ok(rep.wrap(out))
}

/// Potential `v_Y` on `X / Y`, evaluated at the orthogonal projection of the
/// position onto `X (-) Y` (given in grid coordinates).
pub struct Potential<'a> {
    pub y: Subspace,
    pub v: Box<dyn Fn(&[f64]) -> f64 + 'a>,
}

impl<'a> Potential<'a> {
    pub fn new(y: Subspace, v: impl Fn(&[f64]) -> f64 + 'a) -> Self {
        Self { y, v: Box::new(v) }
    }
}

/// Interaction part `H(Y)`, a multiplication operator stored by its values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InteractionPart {
    pub y: SubspaceRecord,
    #[serde(skip)]
    pub values: Vec<f64>,
    /// `H(Y) >= -mu H_X - nu`.
    pub mu: f64,
    pub nu: f64,
    /// Frame-proxy commutator with `W(xi)`, `xi` a unit vector of Y.
    pub grading_residual: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NbodyOptions {
    /// Trial shift `nu = form_shift * ||V_-||` before solving for `mu`.
    pub form_shift: f64,
}

impl Default for NbodyOptions {
    fn default() -> Self {
        Self { form_shift: 0.75 }
    }
}

/// `H = h(p) + sum_Y H(Y)` over a meet-closed family of subspaces of X.
#[derive(Clone, Debug)]
pub struct GradedHamiltonian {
    grid: GridRep,
    lattice: Vec<Subspace>,
    kinetic: CMat,
    dispersion: Vec<f64>,
    parts: Vec<InteractionPart>,
}

/// Dispersion sampled on the momentum lattice, in grid index order.
pub fn dispersion_values(g: &GridRep, h: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let d = g.d();
    let m = g.m();
    let mut digits = vec![0usize; d];
    let mut k = vec![0.0; d];
    (0..g.dim())
        .map(|idx| {
            split(idx, m, &mut digits);
            for a in 0..d {
                k[a] = g.axis().freqs()[digits[a]];
            }
            h(&k)
        })
        .collect()
}

pub fn nbody_hamiltonian(
    g: &GridRep,
    lattice: &[Subspace],
    dispersion: impl Fn(&[f64]) -> f64,
    potentials: Vec<Potential<'_>>,
    opts: &NbodyOptions,
) -> Result<GradedHamiltonian> {
    let x = g.split().x().clone();
    let mut elems: Vec<Subspace> = Vec::new();
    for y in lattice {
        if !y.is_subset_of(&x) {
            return Err(Error::Precondition("lattice elements must be subspaces of X".into()));
        }
        if !elems.iter().any(|e| e.same_as(y)) {
            elems.push(y.clone());
        }
    }
    if !elems.iter().any(|e| e.same_as(&x)) {
        return Err(Error::Precondition("the lattice must contain X".into()));
    }
    for a in 0..elems.len() {
        for b in (a + 1)..elems.len() {
            let m = lattice_intersect(&elems[a], &elems[b])?;
            if !elems.iter().any(|e| e.same_as(&m)) {
                return Err(Error::NotClosed(format!("intersection of lattice elements {a} and {b} is missing")));
            }
        }
    }
    let d = g.d();
    let n = g.dim();
    let disp = dispersion_values(g, &dispersion);
    let kinetic = g.momentum_function(|k| C64::new(dispersion(k), 0.0));
    let xb = x.basis();
    let mut parts: Vec<InteractionPart> = elems
        .iter()
        .map(|y| InteractionPart { y: y.record(), values: vec![0.0; n], mu: 0.0, nu: 0.0, grading_residual: 0.0 })
        .collect();
    let rep = Rep::Grid(g.clone());
    let frame = rep.frame();
    for pot in potentials {
        let i = elems
            .iter()
            .position(|e| e.same_as(&pot.y))
            .ok_or_else(|| Error::Precondition("potential attached to a subspace outside the lattice".into()))?;
        if pot.y.same_as(&x) {
            return Err(Error::Precondition("H(X) must vanish; put constants into the dispersion".into()));
        }
        let c = relative_complement(&x, &pot.y)?;
        // projector onto X (-) Y in grid coordinates of X
        let pc = xb.transpose() * c.projector() * xb;
        let mut qv = vec![0.0; d];
        let vals: Vec<f64> = (0..n)
            .map(|j| {
                let q = g.point(j);
                for a in 0..d {
                    qv[a] = (0..d).map(|b| pc[(a, b)] * q[b]).sum();
                }
                (pot.v)(&qv)
            })
            .collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("potential has non-finite values on the grid".into()));
        }
        for (acc, v) in parts[i].values.iter_mut().zip(&vals) {
            *acc += v;
        }
    }
    let mut budget = 0.0;
    for (part, y) in parts.iter_mut().zip(&elems) {
        if part.values.iter().all(|v| *v == 0.0) {
            continue;
        }
        let neg = part.values.iter().fold(0.0f64, |a, v| a.max(-v));
        let shift = opts.form_shift * neg;
        let hmin = disp.iter().cloned().fold(f64::INFINITY, f64::min);
        let mu = form_bound(g, &disp, &part.values, shift)?.max(0.0);
        part.mu = mu;
        part.nu = shift + mu * (1.0 - hmin);
        budget += mu;
        if budget >= 1.0 {
            return Err(Error::Precondition(format!(
                "form-bound budget exceeded (sum mu = {budget:.3}) at Y of dimension {} with basis {:?}",
                y.dim(),
                y.basis().as_slice()
            )));
        }
        part.grading_residual = grading_residual(&rep, y, &part.values, &frame)?;
    }
    Ok(GradedHamiltonian { grid: g.clone(), lattice: elems, kinetic, dispersion: disp, parts })
}

/// Largest `mu` with `-V - nu <= mu (H_X - min h + 1)`, from the generalized
/// eigenproblem in the momentum basis. Couplings below `1e-13 max|V^|`
/// are dropped so that the problem splits into independent blocks.
fn form_bound(g: &GridRep, disp: &[f64], v: &[f64], nu: f64) -> Result<f64> {
    let d = g.d();
    let m = g.m();
    let n = g.dim();
    let hmin = disp.iter().cloned().fold(f64::INFINITY, f64::min);
    let b: Vec<f64> = disp.iter().map(|h| 1.0 / (h - hmin + 1.0).sqrt()).collect();
    // Fourier coefficients of v along every axis
    let mut vh: Vec<C64> = v.iter().map(|x| C64::new(*x, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut line = vec![C64::default(); m];
    for a in 0..d {
        let stride = m.pow((d - 1 - a) as u32);
        for outer in (0..n).step_by(stride * m) {
            for inner in 0..stride {
                let base = outer + inner;
                for j in 0..m {
                    line[j] = vh[base + j * stride];
                }
                fft.process(&mut line);
                for j in 0..m {
                    vh[base + j * stride] = line[j];
                }
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    vh.iter_mut().for_each(|z| *z *= inv_n);
    let fidx = |k: usize| if k <= m / 2 { k as i64 } else { k as i64 - m as i64 };
    let dk = std::f64::consts::PI / g.l();
    let q0 = g.axis().position(0);
    // phase e^{-i n dk q0} for n in (-m, m)
    let phase: Vec<C64> = (0..2 * m).map(|s| C64::from_polar(1.0, -((s as f64) - m as f64) * dk * q0)).collect();
    let entry = |kd: &[usize], ld: &[usize]| -> C64 {
        let mut z = C64::new(1.0, 0.0);
        let mut idx = 0usize;
        for a in 0..d {
            let s = fidx(kd[a]) - fidx(ld[a]);
            z *= phase[(s + m as i64) as usize];
            idx = idx * m + s.rem_euclid(m as i64) as usize;
        }
        z * vh[idx]
    };
    let vmax = vh.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = 1e-13 * vmax;
    // blocks: momenta connected by a significant coupling
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut kd = vec![0usize; d];
    let mut ld = vec![0usize; d];
    let mut sig: Vec<usize> = vec![0; d];
    // couplings depend only on the index difference, so test each difference once
    let mut significant = vec![false; (2 * m).pow(d as u32)];
    for k in 0..n {
        split(k, m, &mut kd);
        for l in 0..n {
            split(l, m, &mut ld);
            let mut key = 0usize;
            for a in 0..d {
                sig[a] = (fidx(kd[a]) - fidx(ld[a]) + m as i64) as usize;
                key = key * 2 * m + sig[a];
            }
            if !significant[key] && entry(&kd, &ld).norm() > cut {
                significant[key] = true;
            }
            if significant[key] {
                let (rk, rl) = (find(&mut parent, k), find(&mut parent, l));
                if rk != rl {
                    parent[rk] = rl;
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for k in 0..n {
        let r = find(&mut parent, k);
        blocks.entry(r).or_default().push(k);
    }
    let mut best = f64::NEG_INFINITY;
    for members in blocks.values() {
        let s = members.len();
        let mut a = linalg::zeros(s, s);
        let mut imag = 0.0f64;
        let mut scale = 0.0f64;
        for (i, &k) in members.iter().enumerate() {
            split(k, m, &mut kd);
            for (j, &l) in members.iter().enumerate() {
                split(l, m, &mut ld);
                let mut z = -entry(&kd, &ld);
                if k == l {
                    z -= nu;
                }
                z *= b[k] * b[l];
                imag = imag.max(z.im.abs());
                scale = scale.max(z.norm());
                a[(i, j)] = z;
            }
        }
        if imag <= 1e-12 * scale.max(1e-300) {
            for i in 0..s {
                for j in 0..s {
                    a[(i, j)].im = 0.0;
                }
            }
        }
        // exact symmetrization against roundoff
        let a = linalg::scale(&(&a + &linalg::adjoint(&a)), C64::new(0.5, 0.0));
        let top = linalg::eigvalsh(&a)?.into_iter().fold(f64::NEG_INFINITY, f64::max);
        best = best.max(top);
    }
    Ok(best)
}

fn grading_residual(rep: &Rep, y: &Subspace, values: &[f64], frame: &CMat) -> Result<f64> {
    if y.is_zero() {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for j in 0..y.dim() {
        let xi = y.basis_vector(j);
        let n = rep.dim();
        let mut diff = linalg::zeros(n, frame.ncols());
        for c in 0..frame.ncols() {
            let col: Vec<C64> = (0..n).map(|i| frame[(i, c)]).collect();
            // W V u - V W u
            let mut a: Vec<C64> = col.iter().zip(values).map(|(z, v)| z * *v).collect();
            rep.apply_weyl(&xi, &mut a)?;
            let mut b = col.clone();
            rep.apply_weyl(&xi, &mut b)?;
            for i in 0..n {
                diff[(i, c)] = a[i] - b[i] * values[i];
            }
        }
        worst = worst.max(linalg::max_col_norm(&diff));
    }
    Ok(worst)
}

impl GradedHamiltonian {
    pub fn grid(&self) -> &GridRep {
        &self.grid
    }

    pub fn lattice(&self) -> &[Subspace] {
        &self.lattice
    }

    pub fn parts(&self) -> &[InteractionPart] {
        &self.parts
    }

    pub fn kinetic(&self) -> &CMat {
        &self.kinetic
    }

    /// Dispersion values on the momentum lattice.
    pub fn dispersion(&self) -> &[f64] {
        &self.dispersion
    }

    pub fn dispersion_range(&self) -> [f64; 2] {
        let lo = self.dispersion.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.dispersion.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        [lo, hi]
    }

    pub fn form_budget(&self) -> f64 {
        self.parts.iter().map(|p| p.mu).sum()
    }

    fn index_of(&self, y: &Subspace) -> Result<usize> {
        self.lattice
            .iter()
            .position(|e| e.same_as(y))
            .ok_or_else(|| Error::Precondition("subspace is not in the lattice".into()))
    }

    /// Diagonal of `sum_{Z >= Y} H(Z)`.
    pub fn potential_above(&self, y: &Subspace) -> Result<Vec<f64>> {
        self.index_of(y)?;
        let mut out = vec![0.0; self.grid.dim()];
        for (z, part) in self.lattice.iter().zip(&self.parts) {
            if y.is_subset_of(z) {
                for (o, v) in out.iter_mut().zip(&part.values) {
                    *o += v;
                }
            }
        }
        Ok(out)
    }

    /// Diagonal of the full interaction `sum_Y H(Y)`.
    pub fn potential(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.dim()];
        for part in &self.parts {
            for (o, v) in out.iter_mut().zip(&part.values) {
                *o += v;
            }
        }
        out
    }

    fn with_diagonal(&self, v: &[f64]) -> CMat {
        let mut h = self.kinetic.clone();
        for (i, x) in v.iter().enumerate() {
            h[(i, i)] += C64::new(*x, 0.0);
        }
        h
    }

    pub fn matrix(&self) -> CMat {
        self.with_diagonal(&self.potential())
    }

    /// `H_Y = H_X + sum_{Z >= Y} H(Z)`.
    pub fn sub_hamiltonian(&self, y: &Subspace) -> Result<CMat> {
        Ok(self.with_diagonal(&self.potential_above(y)?))
    }

    /// `S = { Y^sigma : Y in L }`.
    pub fn semilattice(&self) -> Result<Semilattice> {
        Semilattice::from_elements(self.lattice.iter().map(sigma_complement).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoatomSpectrum {
    /// The co-atom E of S.
    pub subspace: SubspaceRecord,
    /// `Y = E^sigma`.
    pub y: SubspaceRecord,
    pub spectrum: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HvzOptions {
    /// Clustering gap in units of the largest gap of the dispersion values.
    pub cluster_factor: f64,
    /// Eigenvalues closer than this to the threshold are not called discrete.
    pub discrete_tol: f64,
}

impl Default for HvzOptions {
    fn default() -> Self {
        Self { cluster_factor: 3.0, discrete_tol: 1e-9 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub intervals: Vec<[f64; 2]>,
    pub per_coatom: Vec<CoatomSpectrum>,
    pub discrete_below_threshold: Vec<f64>,
    /// Bottom of the computed essential spectrum.
    pub threshold: f64,
    /// False when `max S != Xi`; then the essential spectrum is all of Sp(H).
    pub max_is_xi: bool,
    pub cluster_gap: f64,
    pub dispersion_range: [f64; 2],
    pub options: HvzOptions,
    pub grid: RepDescriptor,
}

/// Largest gap between consecutive distinct sorted values.
pub fn max_spacing(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Maximal runs of sorted values with consecutive gaps `<= gap`, as closed
/// intervals.
pub fn cluster_intervals(values: &[f64], gap: f64) -> Vec<[f64; 2]> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<[f64; 2]> = Vec::new();
    for x in v {
        match out.last_mut() {
            Some(iv) if x - iv[1] <= gap => iv[1] = x,
            _ => out.push([x, x]),
        }
    }
    out
}

/// Union of closed intervals, merged and sorted.
pub fn merge_intervals(mut ivs: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    ivs.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut out: Vec<[f64; 2]> = Vec::new();
    for iv in ivs {
        match out.last_mut() {
            Some(last) if iv[0] <= last[1] => last[1] = last[1].max(iv[1]),
            _ => out.push(iv),
        }
    }
    out
}

/// Essential spectrum as the union of the spectra of `H_Y` over the co-atoms
/// `E = Y^sigma` of S.
pub fn hvz_essential_spectrum(h: &GradedHamiltonian, opts: &HvzOptions) -> Result<SpectrumReport> {
    let s = h.semilattice()?;
    let eigenvalues = if h.potential().iter().all(|v| *v == 0.0) {
        // H = h(p) is diagonalized exactly by the Fourier transform
        let mut d = h.dispersion().to_vec();
        d.sort_by(|a, b| a.total_cmp(b));
        d
    } else {
        spectrum(&h.matrix())?
    };
    let cluster_gap = opts.cluster_factor * max_spacing(h.dispersion());
    let max = s.max_element().ok_or_else(|| Error::Precondition("S has no maximum".into()))?;
    let max_is_xi = s.element(max).is_full();
    let mut per_coatom = Vec::new();
    let intervals = if max_is_xi {
        let coatoms = s.sub_ideals(max).co_atoms;
        if coatoms.is_empty() {
            return Err(Error::Precondition("S has no co-atoms".into()));
        }
        let mut all = Vec::new();
        for c in coatoms {
            let e = s.element(c);
            let y = sigma_complement(e);
            let sp = spectrum(&h.sub_hamiltonian(&y)?)?;
            all.extend(cluster_intervals(&sp, cluster_gap));
            per_coatom.push(CoatomSpectrum { subspace: e.record(), y: y.record(), spectrum: sp });
        }
        merge_intervals(all)
    } else {
        cluster_intervals(&eigenvalues, cluster_gap)
    };
    let threshold = intervals.first().map(|iv| iv[0]).unwrap_or(f64::INFINITY);
    let discrete_below_threshold = eigenvalues.iter().cloned().filter(|e| *e < threshold - opts.discrete_tol).collect();
    Ok(SpectrumReport {
        eigenvalues,
        intervals,
        per_coatom,
        discrete_below_threshold,
        threshold,
        max_is_xi,
        cluster_gap,
        dispersion_range: h.dispersion_range(),
        options: *opts,
        grid: Rep::Grid(h.grid.clone()).descriptor(),
    })
}

impl SpectrumReport {
    /// Two columns `kind,value` (17 significant digits) with kinds `eigenvalue`, `interval_lo`,
    /// `interval_hi`, `discrete` and `coatom<i>`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,value\n");
        for e in &self.eigenvalues {
            s.push_str(&format!("eigenvalue,{e:.16e}\n"));
        }
        for iv in &self.intervals {
            s.push_str(&format!("interval_lo,{:.16e}\ninterval_hi,{:.16e}\n", iv[0], iv[1]));
        }
        for e in &self.discrete_below_threshold {
            s.push_str(&format!("discrete,{e:.16e}\n"));
        }
        for (i, c) in self.per_coatom.iter().enumerate() {
            for e in &c.spectrum {
                s.push_str(&format!("coatom{i},{e:.16e}\n"));
            }
        }
        s
    }

    /// Whether `x` lies in one of the intervals, up to `tol`.
    pub fn in_essential(&self, x: f64, tol: f64) -> bool {
        self.intervals.iter().any(|iv| x >= iv[0] - tol && x <= iv[1] + tol)
    }
}

/// Large-box threshold estimate: the lowest eigenvalue of the larger box
/// with no eigenvalue of the smaller box within `match_tol`. Bound states
/// converge with the box size and are matched; continuum levels move.
pub fn double_box_threshold(small: &[f64], large: &[f64], match_tol: f64) -> Option<f64> {
    let mut l = large.to_vec();
    l.sort_by(|a, b| a.total_cmp(b));
    l.into_iter().find(|e| !small.iter().any(|s| (s - e).abs() <= match_tol))
}

/// Decay of `||W(r omega)^* (H+i)^{-1} W(r omega) - (H_Y+i)^{-1}||` on the
/// frame for one co-atom.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HsrTrace {
    pub y: SubspaceRecord,
    pub omega: Vec<f64>,
    pub schedule: Vec<f64>,
    pub residual: Vec<f64>,
    pub decreasing: bool,
    pub warnings: Vec<String>,
}

/// Dynamic check that the co-atom projections of `(H+i)^{-1}` are the
/// resolvents of the sub-Hamiltonians. `fractions` are schedule points as
/// fractions of the box limit.
pub fn hsr_cross_check(h: &GradedHamiltonian, fractions: &[f64], seed: u64) -> Result<Vec<HsrTrace>> {
    let s = h.semilattice()?;
    let max = s.max_element().ok_or_else(|| Error::Precondition("S has no maximum".into()))?;
    if !s.element(max).is_full() {
        return Ok(Vec::new());
    }
    let rep = Rep::Grid(h.grid.clone());
    let frame = rep.frame();
    let lu = shifted(&h.matrix()).partial_piv_lu();
    let solve = |b: &CMat| -> Result<CMat> { Ok(lu.solve(b)) };
    let mut out = Vec::new();
    for c in s.sub_ideals(max).co_atoms {
        let e = s.element(c);
        let y = sigma_complement(e);
        let omega = choose_direction(&y, &excluded_for(&s, e), seed, 64)?;
        let lim = crate::grading::box_limit(&rep, &omega);
        let sched: Vec<f64> = fractions.iter().map(|f| f * lim).collect();
        let target = shifted(&h.sub_hamiltonian(&y)?).partial_piv_lu().solve(&frame);
        let tr = conjugation_trace_with(&rep, &solve, &omega, &sched)?;
        let residual: Vec<f64> = tr.images.iter().map(|img| linalg::max_col_norm(&linalg::sub(img, &target))).collect();
        let decreasing = residual.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14);
        out.push(HsrTrace {
            y: y.record(),
            omega: omega.iter().cloned().collect(),
            schedule: tr.schedule,
            residual,
            decreasing,
            warnings: tr.warnings,
        });
    }
    Ok(out)
}

fn shifted(h: &CMat) -> CMat {
    let mut a = h.clone();
    for i in 0..a.nrows() {
        a[(i, i)] += C64::new(0.0, 1.0);
    }
    a
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SideLimit {
    pub schedule: Vec<f64>,
    pub successive: Vec<f64>,
    pub converged: bool,
    pub warnings: Vec<String>,
    /// Frame image at the last schedule point.
    #[serde(skip)]
    pub image: Option<CMat>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranslationLimits {
    pub omega: Vec<f64>,
    pub plus: SideLimit,
    pub minus: SideLimit,
    /// Frame distance between the two one-sided limits.
    pub distance: f64,
    pub equal: bool,
    /// Set when either side failed to converge.
    pub flagged: bool,
    pub tol: f64,
}

fn side(tr: ConjugationTrace, tol: f64) -> SideLimit {
    SideLimit {
        converged: tr.converged(tol),
        schedule: tr.schedule,
        successive: tr.successive,
        warnings: tr.warnings,
        image: tr.images.last().cloned(),
    }
}

/// Limits of `W(r omega)^* T W(r omega)` as `r -> +inf` and `r -> -inf`
/// along `schedule` (positive, increasing) and its negative.
pub fn translation_limits(rep: &Rep, t: &CMat, omega: &Vector, schedule: &[f64], tol: f64) -> Result<TranslationLimits> {
    if schedule.iter().any(|r| *r <= 0.0) {
        return Err(Error::Precondition("schedule must be positive".into()));
    }
    let neg: Vec<f64> = schedule.iter().map(|r| -r).collect();
    let plus = side(conjugation_trace(rep, t, omega, schedule)?, tol);
    let minus = side(conjugation_trace(rep, t, omega, &neg)?, tol);
    let distance = match (&plus.image, &minus.image) {
        (Some(a), Some(b)) => linalg::max_col_norm(&linalg::sub(a, b)),
        _ => return Err(Error::Precondition("no box-safe schedule point".into())),
    };
    let flagged = !plus.converged || !minus.converged;
    Ok(TranslationLimits {
        omega: omega.iter().cloned().collect(),
        plus,
        minus,
        distance,
        equal: !flagged && distance < tol,
        flagged,
        tol,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub eps: Vec<f64>,
    /// `sup ||(W(xi) - 1) u||` over probes with `|xi| <= eps` and columns u.
    pub defect: Vec<f64>,
    /// `sup ||chi(|q| > 4/eps) u||`; empty for operators.
    pub tail: Vec<f64>,
    /// Largest observed `tail / defect`, an empirical stand-in for the
    /// dimensional constant.
    pub calibration: Option<f64>,
}

/// Probe vectors of length `eps`, `eps/2`, `eps/4` along the coordinate axes
/// and the diagonals of Xi.
fn probes(dim: usize, eps: f64) -> Vec<Vector> {
    let mut dirs = Vec::new();
    for a in 0..dim {
        let mut v = Vector::zeros(dim);
        v[a] = 1.0;
        dirs.push(v.clone());
        dirs.push(-v);
    }
    for a in 0..dim {
        for b in (a + 1)..dim {
            for s in [1.0, -1.0] {
                let mut v = Vector::zeros(dim);
                v[a] = std::f64::consts::FRAC_1_SQRT_2;
                v[b] = s * std::f64::consts::FRAC_1_SQRT_2;
                dirs.push(v);
            }
        }
    }
    let mut out = Vec::new();
    for f in [1.0, 0.5, 0.25] {
        for d in &dirs {
            out.push(d * (eps * f));
        }
    }
    out
}

/// Compactness diagnostics for the set of columns of `vectors`.
pub fn compactness_defect(g: &GridRep, vectors: &CMat, eps: &[f64]) -> Result<CompactnessReport> {
    let n = g.dim();
    if vectors.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: vectors.nrows() });
    }
    let dim = g.space().dim();
    let mut defect = Vec::new();
    let mut tail = Vec::new();
    for &e in eps {
        let mut worst = 0.0f64;
        for xi in probes(dim, e) {
            for c in 0..vectors.ncols() {
                let col: Vec<C64> = (0..n).map(|i| vectors[(i, c)]).collect();
                let mut w = col.clone();
                g.apply_weyl(&xi, &mut w);
                let d: f64 = w.iter().zip(&col).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                worst = worst.max(d);
            }
        }
        defect.push(worst);
        let r = 4.0 / e;
        let mut t = 0.0f64;
        for c in 0..vectors.ncols() {
            let mass: f64 = (0..n)
                .filter(|&i| g.point(i).iter().map(|x| x * x).sum::<f64>().sqrt() > r)
                .map(|i| vectors[(i, c)].norm_sqr())
                .sum();
            t = t.max(mass.sqrt());
        }
        tail.push(t);
    }
    let calibration = defect
        .iter()
        .zip(&tail)
        .filter(|(d, _)| **d > 0.0)
        .map(|(d, t)| t / d)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    Ok(CompactnessReport { eps: eps.to_vec(), defect, tail, calibration })
}

/// `sup ||(W(xi) - 1) T||` over the probes, in operator norm.
pub fn compactness_defect_operator(g: &GridRep, t: &CMat, eps: &[f64]) -> Result<CompactnessReport> {
    let dim = g.space().dim();
    let mut defect = Vec::new();
    for &e in eps {
        let mut worst = 0.0f64;
        for xi in probes(dim, e) {
            let w = g.weyl_matrix(&xi);
            let d = linalg::sub(&(&w * t), t);
            worst = worst.max(linalg::spectral_norm(&d));
        }
        defect.push(worst);
    }
    Ok(CompactnessReport { eps: eps.to_vec(), defect, tail: Vec::new(), calibration: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_x_spectrum() {
        let mut a = linalg::zeros(2, 2);
        a[(0, 1)] = C64::new(1.0, 0.0);
        a[(1, 0)] = C64::new(1.0, 0.0);
        assert_eq!(spectrum(&a).unwrap().iter().map(|x| x.round()).collect::<Vec<_>>(), vec![-1.0, 1.0]);
    }

    #[test]
    fn clustering_merges_close_values() {
        let iv = cluster_intervals(&[0.0, 0.1, 0.2, 1.0, 1.05], 0.15);
        assert_eq!(iv, vec![[0.0, 0.2], [1.0, 1.05]]);
        assert_eq!(merge_intervals(vec![[1.0, 2.0], [0.0, 1.5], [3.0, 4.0]]), vec![[0.0, 2.0], [3.0, 4.0]]);
    }
}
