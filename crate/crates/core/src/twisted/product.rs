use nalgebra::DMatrix;

use super::density::{fill_coords, split_index, DensityOnSubspace};
use super::ConvolveReport;
use crate::error::{Error, Result};
use crate::symplin::{lattice_intersect, lattice_sum, relative_complement, Subspace, Vector};
use crate::C64;

#[derive(Clone, Debug)]
pub struct ConvolveOptions {
    /// Upper bound on output nodes (grid overflow guard).
    pub max_nodes: usize,
    /// Output spacing; defaults to the smaller input spacing.
    pub spacing: Option<f64>,
    /// Output box half-width; defaults to the sum of the input half-widths.
    pub half_width: Option<f64>,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        Self { max_nodes: 1 << 22, spacing: None, half_width: None }
    }
}

/// `delta_xi x mu = e^{(i/2) xi^sigma} tau_xi mu`: exact on the samples.
pub fn comb_times_density(xi: &Vector, c: C64, d: &DensityOnSubspace) -> Result<DensityOnSubspace> {
    let space = d.support().space().clone();
    let mut out = d.clone();
    let n = d.node_count();
    for i in 0..n {
        let p = d.point(i);
        out.samples_mut()[i] = d.samples()[i] * c * C64::from_polar(1.0, 0.5 * space.sigma(xi, &p));
    }
    DensityOnSubspace::new(d.support().clone(), d.offset() + xi, d.m(), d.half_width(), out.samples().to_vec())
}

/// `mu x delta_eta`: exact on the samples.
pub fn density_times_comb(d: &DensityOnSubspace, eta: &Vector, c: C64) -> Result<DensityOnSubspace> {
    let space = d.support().space().clone();
    let n = d.node_count();
    let samples: Vec<C64> = (0..n)
        .map(|i| d.samples()[i] * c * C64::from_polar(1.0, 0.5 * space.sigma(&d.point(i), eta)))
        .collect();
    DensityOnSubspace::new(d.support().clone(), d.offset() + eta, d.m(), d.half_width(), samples)
}

fn leakage(mu: &DensityOnSubspace, nu: &DensityOnSubspace, sum: &Subspace) -> f64 {
    let res = |d: &DensityOnSubspace| -> Vec<(Vector, f64)> {
        (0..d.node_count())
            .map(|i| {
                let rel = d.point(i) - d.offset();
                (&rel - sum.project(&rel), d.samples()[i].norm() * d.cell_volume())
            })
            .collect()
    };
    let a = res(mu);
    let b = res(nu);
    let scale = mu.half_width().max(nu.half_width()).max(1.0);
    let tube = 1e-9 * scale;
    let ma = a.iter().map(|(r, _)| r.norm()).fold(0.0, f64::max);
    let mb = b.iter().map(|(r, _)| r.norm()).fold(0.0, f64::max);
    if ma + mb <= tube {
        return 0.0;
    }
    let total: f64 = a.iter().map(|x| x.1).sum::<f64>() * b.iter().map(|x| x.1).sum::<f64>();
    let mut out = 0.0;
    for (ra, wa) in &a {
        for (rb, wb) in &b {
            if (ra + rb).norm() > tube {
                out += wa * wb;
            }
        }
    }
    if total > 0.0 {
        out / total
    } else {
        0.0
    }
}

/// Twisted product of two densities, sampled on a grid over `E + F`.
///
/// Equal supports with identical frames and spacing use the exact lattice
/// sum; otherwise the output is evaluated node by node by integrating over
/// the fiber `E cap F` with band-limited interpolation of the inputs.
pub fn density_times_density(
    mu: &DensityOnSubspace,
    nu: &DensityOnSubspace,
    opts: &ConvolveOptions,
) -> Result<(DensityOnSubspace, ConvolveReport)> {
    let e = mu.support();
    let f = nu.support();
    let sum = lattice_sum(e, f)?;
    let mut report = ConvolveReport {
        leakage: leakage(mu, nu, &sum),
        input_l1_product: mu.l1() * nu.l1(),
        ..Default::default()
    };
    let same_frame = e.dim() == f.dim()
        && (e.basis() - f.basis()).amax() < 1e-14
        && (mu.spacing() - nu.spacing()).abs() < 1e-14 * mu.spacing()
        && opts.spacing.is_none()
        && opts.half_width.is_none();
    let out = if same_frame { lattice_product(mu, nu, opts)? } else { fiber_product(mu, nu, &sum, opts, &mut report)? };
    report.output_l1 = out.l1();
    Ok((out, report))
}

fn lattice_product(mu: &DensityOnSubspace, nu: &DensityOnSubspace, opts: &ConvolveOptions) -> Result<DensityOnSubspace> {
    let space = mu.support().space().clone();
    let k = mu.dim();
    let h = mu.spacing();
    let m_out = mu.m() + nu.m() - 1;
    let n_out = m_out.checked_pow(k as u32).filter(|&n| n <= opts.max_nodes).ok_or_else(|| {
        Error::Precondition(format!("density grid overflow: {m_out}^{k} nodes"))
    })?;
    let w = mu.cell_volume();
    let pa: Vec<Vector> = (0..mu.node_count()).map(|i| mu.point(i)).collect();
    let pb: Vec<Vector> = (0..nu.node_count()).map(|i| nu.point(i)).collect();
    // sigma is bilinear: precompute J * eta for the inner loop
    let jb: Vec<Vector> = pb.iter().map(|p| space.form() * p).collect();
    let mut out = vec![C64::default(); n_out];
    let mut da = vec![0usize; k];
    let mut db = vec![0usize; k];
    for (ia, xa) in pa.iter().enumerate() {
        let ra = mu.samples()[ia];
        if ra == C64::default() {
            continue;
        }
        split_index(ia, mu.m(), &mut da);
        for (ib, jy) in jb.iter().enumerate() {
            let rb = nu.samples()[ib];
            if rb == C64::default() {
                continue;
            }
            split_index(ib, nu.m(), &mut db);
            let mut o = 0usize;
            for a in 0..k {
                o = o * m_out + da[a] + db[a];
            }
            let phase = 0.5 * xa.dot(jy);
            out[o] += ra * rb * C64::from_polar(w, phase);
        }
    }
    DensityOnSubspace::new(mu.support().clone(), mu.offset() + nu.offset(), m_out, 0.5 * m_out as f64 * h, out)
}

fn fiber_product(
    mu: &DensityOnSubspace,
    nu: &DensityOnSubspace,
    sum: &Subspace,
    opts: &ConvolveOptions,
    report: &mut ConvolveReport,
) -> Result<DensityOnSubspace> {
    let space = sum.space().clone();
    let e = mu.support();
    let f = nu.support();
    let c = lattice_intersect(e, f)?;
    let ep = relative_complement(e, &c)?;
    let fp = relative_complement(f, &c)?;
    let s = sum.dim();
    let (ke, kf, kc) = (ep.dim(), fp.dim(), c.dim());
    if ke + kf + kc != s {
        return Err(Error::Numerical("fiber decomposition does not match E + F".into()));
    }
    let mut cols = DMatrix::zeros(space.dim(), s);
    cols.columns_mut(0, ke).copy_from(ep.basis());
    cols.columns_mut(ke, kf).copy_from(fp.basis());
    cols.columns_mut(ke + kf, kc).copy_from(c.basis());
    let a = sum.basis().transpose() * &cols;
    let jac = 1.0 / a.determinant().abs();
    let ainv = a.try_inverse().ok_or_else(|| Error::Numerical("singular fiber frame".into()))?;

    let h_out = opts.spacing.unwrap_or(mu.spacing().min(nu.spacing()));
    let l_out = opts.half_width.unwrap_or(mu.half_width() + nu.half_width());
    let m_out = (2.0 * l_out / h_out).ceil().max(1.0) as usize;
    let h_out = 2.0 * l_out / m_out as f64;
    let n_out = m_out.checked_pow(s as u32).filter(|&n| n <= opts.max_nodes).ok_or_else(|| {
        Error::Precondition(format!("density grid overflow: {m_out}^{s} nodes"))
    })?;

    // fiber quadrature over E cap F
    let r = (mu.dim() as f64).sqrt() * mu.half_width();
    let h_t = mu.spacing().min(nu.spacing());
    let n_t = if kc == 0 { 1 } else { (2.0 * r / h_t).ceil() as usize };
    let h_t = if kc == 0 { 1.0 } else { 2.0 * r / n_t as f64 };
    let n_fiber = n_t.pow(kc as u32);
    let w_t = h_t.powi(kc as i32);

    let be_t = e.basis().transpose();
    let bf_t = f.basis().transpose();
    let me_alpha = &be_t * ep.basis();
    let me_t = &be_t * c.basis();
    let mf_beta = &bf_t * fp.basis();
    let mf_t = &bf_t * c.basis();
    let jmat = space.form();

    let mut z = vec![0.0; s];
    let mut tc = vec![0.0; kc];
    let mut out = Vec::with_capacity(n_out);
    for idx in 0..n_out {
        fill_coords(idx, m_out, l_out, h_out, &mut z);
        let coef = &ainv * Vector::from_column_slice(&z);
        let alpha = coef.rows(0, ke).into_owned();
        let beta = coef.rows(ke, kf).into_owned();
        let gamma = coef.rows(ke + kf, kc).into_owned();
        let u0 = &me_alpha * &alpha;
        let v0 = &mf_beta * &beta + &mf_t * &gamma;
        let xi0 = mu.offset() + ep.basis() * &alpha;
        let eta0 = nu.offset() + fp.basis() * &beta + c.basis() * &gamma;
        let mut acc = C64::default();
        for it in 0..n_fiber {
            let (u, v, xi, eta) = if kc == 0 {
                (u0.clone(), v0.clone(), xi0.clone(), eta0.clone())
            } else {
                fill_coords(it, n_t, r, h_t, &mut tc);
                let t = Vector::from_column_slice(&tc);
                let ct = c.basis() * &t;
                (&u0 + &me_t * &t, &v0 - &mf_t * &t, &xi0 + &ct, &eta0 - &ct)
            };
            let ru = mu.eval_coords(u.as_slice());
            if ru == C64::default() {
                continue;
            }
            let rv = nu.eval_coords(v.as_slice());
            if rv == C64::default() {
                continue;
            }
            let phase = 0.5 * xi.dot(&(jmat * &eta));
            acc += ru * rv * C64::from_polar(w_t, phase);
        }
        out.push(acc * jac);
    }
    let offset = mu.offset() + nu.offset();
    let d = DensityOnSubspace::new(sum.clone(), offset, m_out, l_out, out)?;
    if kc == 0 {
        report.truncated_mass = (report.input_l1_product - d.l1()).max(0.0);
    }
    Ok(d)
}
