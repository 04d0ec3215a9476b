use symfield::grading::tail_schedule;
use symfield::linalg::{self, CMat};
use symfield::rep::{GridRep, Rep};
use symfield::spectra::*;
use symfield::symplin::{Subspace, Vector};
use symfield::C64;

fn v2(a: f64, b: f64) -> Vector {
    Vector::from_vec(vec![a, b])
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn spectrum_of_diagonal_and_random_hermitian() {
    let d = linalg::diag(&[re(3.0), re(-1.0), re(0.5)]);
    assert_eq!(spectrum(&d).unwrap(), vec![-1.0, 0.5, 3.0]);

    let n = 32;
    let a = CMat::from_fn(n, n, |i, j| C64::new(((i * 13 + j * 7) % 11) as f64 / 11.0 - 0.5, ((i * j) as f64).sin()));
    let h = linalg::scale(&linalg::axpy(&a, re(1.0), &linalg::adjoint(&a)), re(0.5));
    let (vals, vecs) = linalg::eigh(&h).unwrap();
    let hv = &h * &vecs;
    let mut worst = 0.0f64;
    for (c, lam) in vals.iter().enumerate() {
        for r in 0..n {
            worst = worst.max((hv[(r, c)] - vecs[(r, c)] * lam).norm());
        }
    }
    assert!(worst < 1e-10, "{worst}");
    let ev = spectrum(&h).unwrap();
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn laplacian_along_the_position_shift_axis_is_p_squared() {
    let g = GridRep::balanced(1, 64).unwrap();
    let rep = Rep::Grid(g.clone());
    let e = Subspace::axes(g.space(), &[0]).unwrap();
    let delta = laplacian_delta_e(&rep, &e, &[v2(1.0, 0.0)]).unwrap().matrix;
    let p = g.p(0);
    let p2 = &p * &p;
    assert!(linalg::max_abs(&linalg::sub(&delta, &p2)) < 1e-10 * linalg::max_abs(&p2));
}

#[test]
fn oscillator_levels() {
    let g = GridRep::standard(1, 512, 12.0).unwrap();
    let rep = Rep::Grid(g.clone());
    let xi = Subspace::full(g.space());
    let delta = laplacian_delta_e(&rep, &xi, &[v2(1.0, 0.0), v2(0.0, 1.0)]).unwrap().matrix;
    let ev = spectrum(&delta).unwrap();
    for (k, e) in ev.iter().take(6).enumerate() {
        let want = 2.0 * k as f64 + 1.0;
        assert!((e - want).abs() < 0.01 * want, "{k}: {e}");
    }
}

#[test]
fn laplacian_is_basis_independent_and_checks_its_basis() {
    let g = GridRep::balanced(1, 64).unwrap();
    let rep = Rep::Grid(g.clone());
    let xi = Subspace::full(g.space());
    let a: f64 = 1.1;
    let d0 = laplacian_delta_e(&rep, &xi, &[v2(1.0, 0.0), v2(0.0, 1.0)]).unwrap().matrix;
    let d1 = laplacian_delta_e(&rep, &xi, &[v2(a.cos(), a.sin()), v2(-a.sin(), a.cos())]).unwrap().matrix;
    assert!(linalg::spectral_norm(&linalg::sub(&d0, &d1)) < 1e-8);
    let e = Subspace::axes(g.space(), &[0]).unwrap();
    assert!(laplacian_delta_e(&rep, &e, &[v2(0.0, 1.0)]).is_err());
    assert!(laplacian_delta_e(&rep, &e, &[v2(2.0, 0.0)]).is_err());
    assert!(laplacian_delta_e(&rep, &xi, &[v2(1.0, 0.0)]).is_err());
}

#[test]
fn free_hamiltonian_has_the_dispersion_as_spectrum() {
    let g = GridRep::balanced(1, 32).unwrap();
    let x = g.split().x().clone();
    let zero = Subspace::zero(g.space());
    let h = nbody_hamiltonian(&g, &[x, zero], |k| k[0] * k[0], vec![], &NbodyOptions::default()).unwrap();
    let mut want = dispersion_values(&g, |k| k[0] * k[0]);
    want.sort_by(|a, b| a.total_cmp(b));
    let got = spectrum(&h.matrix()).unwrap();
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
    }
    let r = hvz_essential_spectrum(&h, &HvzOptions::default()).unwrap();
    assert!(r.threshold.abs() < 1e-12);
    assert!(r.discrete_below_threshold.is_empty());
}

#[test]
fn one_dimensional_well_has_bound_states_below_the_continuum() {
    let g = GridRep::balanced(1, 64).unwrap();
    let x = g.split().x().clone();
    let zero = Subspace::zero(g.space());
    let h = nbody_hamiltonian(
        &g,
        &[x, zero.clone()],
        |k| k[0] * k[0],
        vec![Potential::new(zero, |q| -5.0 * (-q[0] * q[0]).exp())],
        &NbodyOptions::default(),
    )
    .unwrap();
    assert_eq!(h.parts().len(), 2);
    let r = hvz_essential_spectrum(&h, &HvzOptions::default()).unwrap();
    assert!(r.max_is_xi);
    assert!(r.threshold.abs() < 1e-12);
    assert!(!r.discrete_below_threshold.is_empty());
    assert!(r.discrete_below_threshold.iter().all(|e| *e < 0.0 && *e > -5.0));
    assert!(r.in_essential(1.0, 0.0));
    assert!(!r.in_essential(-1.0, 0.0));
    let csv = r.to_csv();
    assert!(csv.lines().filter(|l| l.starts_with("eigenvalue,")).count() == 64);
}

#[test]
fn lattice_must_live_in_position_space() {
    let g = GridRep::balanced(1, 16).unwrap();
    let k = Subspace::axes(g.space(), &[1]).unwrap();
    assert!(nbody_hamiltonian(&g, &[k], |k| k[0] * k[0], vec![], &NbodyOptions::default()).is_err());
}

#[test]
fn double_box_matching() {
    let small = [-2.0, -0.5, 0.3, 0.9];
    let large = [-2.001, -0.5004, 0.05, 0.2];
    assert_eq!(double_box_threshold(&small, &large, 0.01), Some(0.05));
    assert_eq!(double_box_threshold(&small, &[-2.0], 0.01), None);
}

#[test]
fn translation_limits_of_momentum_functions_and_steps() {
    let g = GridRep::balanced(1, 128).unwrap();
    let rep = Rep::Grid(g.clone());
    let omega = v2(1.0, 0.0);
    let sched = tail_schedule(&rep, &omega, 0.7, 0.98, 6);
    let u = g.momentum_function(|k| re(1.0 / (1.0 + k[0] * k[0])));
    let lim = translation_limits(&rep, &u, &omega, &sched, 1e-3).unwrap();
    assert!(lim.equal && !lim.flagged);
    assert!(lim.distance < 1e-12, "{}", lim.distance);

    let step = g.position_function(|q| re(q[0].tanh()));
    let resolvent = resolvent_at_i(&linalg::axpy(&(&g.p(0) * &g.p(0)), re(1.0), &step));
    let lim = translation_limits(&rep, &resolvent, &omega, &sched, 1e-3).unwrap();
    assert!(!lim.equal);
    assert!(lim.distance > 1e-2, "{}", lim.distance);
    assert!(translation_limits(&rep, &u, &omega, &[-1.0], 1e-3).is_err());
}

/// `(A + i)^{-1}`
fn resolvent_at_i(a: &CMat) -> CMat {
    let mut a = a.clone();
    for i in 0..a.nrows() {
        a[(i, i)] += C64::new(0.0, 1.0);
    }
    linalg::inverse(&a)
}

#[test]
fn compactness_defects() {
    let g = GridRep::balanced(1, 256).unwrap();
    let rep = Rep::Grid(g.clone());
    let eps = [0.2, 0.1, 0.05];
    let frame = compactness_defect(&g, &rep.frame(), &eps).unwrap();
    assert!(frame.defect[2] < 0.5 * frame.defect[0]);
    assert!(frame.calibration.is_some());

    let n = g.dim();
    let freqs = [0.0, 8.0, 14.0, 19.0];
    let mut osc = CMat::zeros(n, freqs.len());
    for (c, k) in freqs.iter().enumerate() {
        for i in 0..n {
            let q = g.point(i)[0];
            osc[(i, c)] = C64::from_polar((-q * q / 2.0).exp(), k * q);
        }
    }
    linalg::normalize_columns(&mut osc);
    let r = compactness_defect(&g, &osc, &[0.1]).unwrap();
    assert!(r.defect[0] > 1.0, "{:?}", r.defect);

    let gq = g.position_function(|q| re((-q[0] * q[0]).exp()));
    let gp = g.momentum_function(|k| re((-k[0] * k[0]).exp()));
    let t = &gq * &gp;
    let op = compactness_defect_operator(&g, &t, &eps).unwrap();
    assert!(op.defect.windows(2).all(|w| w[1] < w[0]));
    assert!(op.defect[2] < 0.1, "{:?}", op.defect);
}
