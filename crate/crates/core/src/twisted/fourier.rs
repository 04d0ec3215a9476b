use std::f64::consts::PI;

use nalgebra::DMatrix;
use rustfft::FftPlanner;

use super::density::{split_index, DensityOnSubspace};
use crate::error::{Error, Result};
use crate::symplin::{Subspace, Vector};
use crate::C64;

/// `(F_sigma mu)(xi) = (2 pi)^{-n} int e^{-i sigma(xi, eta)} mu(d eta)` for a
/// density on the whole space.
///
/// Requires an orthogonal form (so the symplectic and Euclidean volumes agree)
/// and a power-of-two grid. Input nodes and output frequencies are both cell
/// midpoints; the output box has half-width `pi / h` and spacing `pi / L`, so
/// applying the transform twice returns to the input grid.
pub fn symplectic_fourier(d: &DensityOnSubspace) -> Result<DensityOnSubspace> {
    let space = d.support().space().clone();
    if !d.support().is_full() {
        return Err(Error::Precondition("symplectic Fourier transform needs full support".into()));
    }
    if !space.is_orthogonal() {
        return Err(Error::Unsupported("symplectic Fourier transform needs an orthogonal form".into()));
    }
    let m = d.m();
    if !m.is_power_of_two() {
        return Err(Error::Precondition(format!("grid size {m} is not a power of two")));
    }
    let k = d.dim();
    let n = space.degrees();
    let h = d.spacing();
    let l = d.half_width();

    // per-axis midpoint DFT: sum_j e^{-i kappa_n t_j} f_j = c b_n sum_j e^{-2 pi i n j/m} a_j f_j
    let shift = 0.5 - 0.5 * m as f64;
    let tw: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, -2.0 * PI * j as f64 * shift / m as f64)).collect();
    let c0 = C64::from_polar(1.0, -2.0 * PI * shift * shift / m as f64);
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut data = d.samples().to_vec();
    let total = data.len();
    let mut line = vec![C64::default(); m];
    for axis in 0..k {
        let stride = m.pow((k - 1 - axis) as u32);
        for base in 0..total {
            if !(base / stride).is_multiple_of(m) {
                continue;
            }
            for j in 0..m {
                line[j] = data[base + j * stride] * tw[j];
            }
            fft.process(&mut line);
            for j in 0..m {
                data[base + j * stride] = line[j] * tw[j] * c0 * h;
            }
        }
    }

    // frequency kappa corresponds to xi = B_out kappa with B_out = J^{-T} B
    let b = d.support().basis();
    let jinv_t = space.form().clone().try_inverse().ok_or_else(|| Error::Numerical("singular form".into()))?.transpose();
    let b_out = &jinv_t * b;
    let norm = (2.0 * PI).powi(-(n as i32));
    let l_out = PI / h;
    let h_out = PI / l;
    let a = d.offset();

    // re-express on the input frame when B^T B_out is a signed permutation
    let p = b.transpose() * &b_out;
    let perm = signed_permutation(&p);
    let (support, samples) = match perm {
        Some(perm) => {
            let mut out = vec![C64::default(); total];
            let mut digits = vec![0usize; k];
            for (idx, z) in data.iter().enumerate() {
                // xi = B P kappa; coordinate i of P kappa is s_i kappa_{pi(i)}
                split_index(idx, m, &mut digits);
                let mut r = 0usize;
                for i in 0..k {
                    let (src, sign) = perm[i];
                    let dgt = if sign > 0.0 { digits[src] } else { m - 1 - digits[src] };
                    r = r * m + dgt;
                }
                out[r] = *z;
            }
            (d.support().clone(), out)
        }
        None => (Subspace::from_columns(&space, &b_out)?, data),
    };
    let mut res = DensityOnSubspace::new(support, Vector::zeros(space.dim()), m, l_out, samples)?;
    let jmat = space.form().clone();
    for idx in 0..res.node_count() {
        let xi = res.point(idx);
        let phase = -xi.dot(&(&jmat * a));
        res.samples_mut()[idx] *= C64::from_polar(norm, phase);
    }
    debug_assert!((res.spacing() - h_out).abs() < 1e-12 * h_out);
    Ok(res)
}

/// For a signed permutation matrix P returns, per row i, (column, sign).
fn signed_permutation(p: &DMatrix<f64>) -> Option<Vec<(usize, f64)>> {
    let k = p.nrows();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut hit = None;
        for j in 0..k {
            let v = p[(i, j)];
            if (v.abs() - 1.0).abs() < 1e-12 {
                if hit.is_some() {
                    return None;
                }
                hit = Some((j, v.signum()));
            } else if v.abs() > 1e-12 {
                return None;
            }
        }
        out.push(hit?);
    }
    Some(out)
}
