use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

/// One periodic grid axis: midpoint nodes `y_j = -L + (j + 1/2) h` and FFT
/// frequencies in `(-pi/h, pi/h]` (Nyquist taken positive).
#[derive(Clone)]
pub struct Axis {
    pub m: usize,
    pub l: f64,
    pub h: f64,
    freqs: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Axis").field("m", &self.m).field("l", &self.l).finish()
    }
}

impl Axis {
    pub fn new(m: usize, l: f64) -> Self {
        let h = 2.0 * l / m as f64;
        let dk = PI / l;
        let freqs = (0..m)
            .map(|n| if n <= m / 2 { n as f64 * dk } else { (n as f64 - m as f64) * dk })
            .collect();
        let mut planner = FftPlanner::new();
        Self { m, l, h, freqs, fft: planner.plan_fft_forward(m), ifft: planner.plan_fft_inverse(m) }
    }

    pub fn position(&self, j: usize) -> f64 {
        -self.l + (j as f64 + 0.5) * self.h
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.position(j)).collect()
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    /// Integer shift `s` with `x = s h`, if `x` is commensurate with the grid.
    pub fn commensurate(&self, x: f64) -> Option<i64> {
        let s = x / self.h;
        let r = s.round();
        if (s - r).abs() < 1e-9 {
            Some(r as i64)
        } else {
            None
        }
    }

    /// Circulant kernel `c[r]`, `T_{jl} = c[(j - l) mod m]`, of the Fourier
    /// multiplier `g(kappa)`.
    pub fn kernel(&self, g: impl Fn(f64) -> C64) -> Vec<C64> {
        let mut buf: Vec<C64> = self.freqs.iter().map(|&k| g(k)).collect();
        self.ifft.process(&mut buf);
        let inv = 1.0 / self.m as f64;
        buf.iter().map(|z| z * inv).collect()
    }

    /// Kernel of the translation `f -> f(. - x)`.
    pub fn translation_kernel(&self, x: f64) -> Vec<C64> {
        if let Some(s) = self.commensurate(x) {
            let mut c = vec![C64::default(); self.m];
            c[s.rem_euclid(self.m as i64) as usize] = C64::new(1.0, 0.0);
            return c;
        }
        self.kernel(|k| C64::from_polar(1.0, -x * k))
    }

    /// Applies the Fourier multiplier `mult[n]` along `axis` of a row-major
    /// tensor with `dims` axes of length m.
    pub fn apply_multiplier(&self, data: &mut [C64], dims: usize, axis: usize, mult: &[C64]) {
        let m = self.m;
        let stride = m.pow((dims - 1 - axis) as u32);
        let inv = 1.0 / m as f64;
        let mut line = vec![C64::default(); m];
        let block = stride * m;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for j in 0..m {
                    line[j] = data[base + j * stride];
                }
                self.fft.process(&mut line);
                for (z, g) in line.iter_mut().zip(mult) {
                    *z *= g * inv;
                }
                self.ifft.process(&mut line);
                for j in 0..m {
                    data[base + j * stride] = line[j];
                }
            }
        }
    }

    /// Translation by `x` along `axis`: cyclic roll when commensurate,
    /// FFT phase multiplier otherwise (unitary either way).
    pub fn translate(&self, data: &mut [C64], dims: usize, axis: usize, x: f64) {
        if x == 0.0 {
            return;
        }
        let m = self.m;
        if let Some(s) = self.commensurate(x) {
            let s = s.rem_euclid(m as i64) as usize;
            if s == 0 {
                return;
            }
            let stride = m.pow((dims - 1 - axis) as u32);
            let block = stride * m;
            let mut line = vec![C64::default(); m];
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for j in 0..m {
                        line[(j + s) % m] = data[base + j * stride];
                    }
                    for j in 0..m {
                        data[base + j * stride] = line[j];
                    }
                }
            }
            return;
        }
        let mult: Vec<C64> = self.freqs.iter().map(|&k| C64::from_polar(1.0, -x * k)).collect();
        self.apply_multiplier(data, dims, axis, &mult);
    }
}

/// Coordinates of the multi-index `idx` on a `dims`-dimensional grid.
pub fn grid_point(axis: &Axis, idx: usize, dims: usize, out: &mut [f64]) {
    let mut r = idx;
    for a in (0..dims).rev() {
        out[a] = axis.position(r % axis.m);
        r /= axis.m;
    }
}

/// Dense matrix of a tensor product of per-axis circulants times a diagonal
/// phase: `M_{JL} = phase[J] * prod_a kern[a][(j_a - l_a) mod m]`.
pub fn circulant_tensor(m: usize, kern: &[Vec<C64>], phase: &[C64]) -> crate::linalg::CMat {
    let dims = kern.len();
    let n = m.pow(dims as u32);
    let mut mat = crate::linalg::zeros(n, n);
    let mut dj = vec![0usize; dims];
    let mut dl = vec![0usize; dims];
    for l in 0..n {
        split(l, m, &mut dl);
        for j in 0..n {
            split(j, m, &mut dj);
            let mut v = phase[j];
            for a in 0..dims {
                v *= kern[a][(dj[a] + m - dl[a]) % m];
                if v == C64::default() {
                    break;
                }
            }
            mat[(j, l)] = v;
        }
    }
    mat
}

pub(crate) fn split(mut idx: usize, m: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = idx % m;
        idx /= m;
    }
}
