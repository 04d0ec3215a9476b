use proptest::prelude::*;
use symfield::linalg::{self, CMat};
use symfield::rep::*;
use symfield::symplin::Vector;
use symfield::twisted::{DiracComb, TwistedElement};
use symfield::C64;

fn v(xs: &[f64]) -> Vector {
    Vector::from_vec(xs.to_vec())
}

fn test_vector(n: usize) -> Vec<C64> {
    (0..n).map(|j| C64::new((0.3 * j as f64).sin() + 0.2, (0.11 * j as f64 * j as f64).cos())).collect()
}

fn random_hermitian(n: usize, seed: u64) -> CMat {
    let mut s = seed;
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let a = CMat::from_fn(n, n, |_, _| C64::new(next(), next()));
    let ah = linalg::adjoint(&a);
    linalg::scale(&linalg::axpy(&a, C64::new(1.0, 0.0), &ah), C64::new(0.5, 0.0))
}

fn ccr_residual(rep: &Rep, xi: &Vector, eta: &Vector) -> f64 {
    let a = weyl_op(rep, xi).unwrap().matrix;
    let b = weyl_op(rep, eta).unwrap().matrix;
    let ab = weyl_op(rep, &(xi + eta)).unwrap().matrix;
    let ph = C64::from_polar(1.0, 0.5 * rep.space().sigma(xi, eta));
    linalg::max_abs(&linalg::axpy(&(&a * &b), -ph, &ab))
}

#[test]
fn weyl_of_zero_is_the_identity() {
    let reps: Vec<Rep> = vec![
        GridRep::balanced(1, 32).unwrap().into(),
        GridRep::balanced(2, 8).unwrap().into(),
        FiniteWeylRep::new(3, 2).unwrap().into(),
        RegularGridRep::periodic(1, 8).unwrap().into(),
    ];
    for rep in &reps {
        let n = rep.dim();
        let x = test_vector(n);
        let mut y = x.clone();
        rep.apply_weyl(&Vector::zeros(rep.space().dim()), &mut y).unwrap();
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).norm() < 1e-14));
    }
}

#[test]
fn qubit_shift_and_clock_anticommute() {
    let f = FiniteWeylRep::new(2, 1).unwrap();
    let x = f.shift(0).unwrap();
    let z = f.clock(0).unwrap();
    assert!(linalg::max_abs(&linalg::axpy(&(&x * &z), C64::new(1.0, 0.0), &(&z * &x))) < 1e-15);
}

#[test]
fn grid_ccr_for_lattice_shifts() {
    let g = GridRep::balanced(1, 64).unwrap();
    let (h, dk) = (g.h(), std::f64::consts::PI / g.l());
    let rep: Rep = g.into();
    let xi = v(&[3.0 * h, 2.0 * dk]);
    let eta = v(&[-5.0 * h, -7.0 * dk]);
    assert!(ccr_residual(&rep, &xi, &eta) < 1e-8);
    assert!(weyl_op(&rep, &xi).unwrap().unitary_defect() < 1e-12);
}

#[test]
fn weyl_of_a_delta_is_the_weyl_operator() {
    let rep: Rep = GridRep::balanced(1, 32).unwrap().into();
    let xi = v(&[0.4, -1.3]);
    let delta = DiracComb::delta(rep.space(), xi.clone(), C64::new(1.0, 0.0)).unwrap();
    let a = rep_of_measure(&rep, &TwistedElement::from_comb(delta)).unwrap().matrix;
    let b = weyl_op(&rep, &xi).unwrap().matrix;
    assert!(linalg::max_abs(&linalg::sub(&a, &b)) < 1e-13);
}

#[test]
fn weyl_symbol_inverts_the_representation() {
    let f = FiniteWeylRep::new(4, 1).unwrap();
    let rep: Rep = f.into();
    let t = CMat::from_fn(4, 4, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 * 0.3 - j as f64).sin()));
    let sym = weyl_symbol(&rep, &t).unwrap();
    let back = rep_of_measure(&rep, &TwistedElement::from_comb(sym)).unwrap().matrix;
    assert!(linalg::max_abs(&linalg::sub(&back, &t)) < 1e-12);
    assert!(weyl_symbol(&GridRep::balanced(1, 8).unwrap().into(), &t).is_err());
}

#[test]
fn resolvent_examples() {
    let z = C64::new(0.5, 2.0);
    let r0 = resolvent(&linalg::zeros(3, 3), z).unwrap();
    assert!(linalg::max_abs(&linalg::sub(&r0, &linalg::scale(&linalg::identity(3), -1.0 / z))) < 1e-15);

    let d = [1.0, -2.0, 0.5];
    let h = linalg::diag(&d.map(|x| C64::new(x, 0.0)));
    let r = resolvent(&h, z).unwrap();
    for (i, x) in d.iter().enumerate() {
        assert!((r[(i, i)] - 1.0 / (C64::new(*x, 0.0) - z)).norm() < 1e-15);
    }
    assert!(resolvent(&h, C64::new(1.0, 0.0)).is_err());

    let obs = resolvent_family(&random_hermitian(64, 5), None).unwrap();
    assert!(obs.resolvent_identity_residual() < 1e-10);
    assert!(obs.adjoint_residual() < 1e-10);

    let mut bad = random_hermitian(4, 1);
    bad[(0, 1)] += C64::new(1.0, 0.0);
    assert!(resolvent_family(&bad, None).is_err());
}

#[test]
fn cstar_norms_of_simple_combs() {
    let rep: Rep = GridRep::balanced(1, 64).unwrap().into();
    let xi = v(&[0.0, 0.8]);
    let one = C64::new(1.0, 0.0);
    let d = TwistedElement::from_comb(DiracComb::delta(rep.space(), xi.clone(), one).unwrap());
    assert!((cstar_norm_estimate(&d, &rep).unwrap() - 1.0).abs() < 1e-10);
    let cos = DiracComb::from_atoms(rep.space(), vec![(xi.clone(), one * 0.5), (-&xi, one * 0.5)]).unwrap();
    let n = cstar_norm_estimate(&TwistedElement::from_comb(cos), &rep).unwrap();
    assert!(n <= 1.0 + 1e-12 && n > 1.0 - 1e-3, "{n}");
}

#[test]
fn position_field_is_diagonal() {
    let g = GridRep::balanced(1, 32).unwrap();
    let k = 0.7;
    let rep: Rep = g.clone().into();
    let f = field_op(&rep, &v(&[0.0, k])).unwrap();
    assert!(f.is_hermitian());
    for i in 0..32 {
        for j in 0..32 {
            let want = if i == j { k * g.point(i)[0] } else { 0.0 };
            assert!((f.matrix[(i, j)] - C64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}

fn int_point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-6i32..6).prop_map(f64::from), 2 * d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn finite_ccr_is_exact(n in 2usize..6, xi in int_point(2), eta in int_point(2)) {
        let rep: Rep = FiniteWeylRep::new(n, 2).unwrap().into();
        prop_assert!(ccr_residual(&rep, &v(&xi), &v(&eta)) < 1e-13);
    }

    #[test]
    fn finite_conjugation_multiplies_by_a_character(n in 2usize..6, xi in int_point(1), eta in int_point(1)) {
        let rep: Rep = FiniteWeylRep::new(n, 1).unwrap().into();
        let (xi, eta) = (v(&xi), v(&eta));
        let w = weyl_op(&rep, &xi).unwrap().matrix;
        let we = weyl_op(&rep, &eta).unwrap().matrix;
        let lhs = &(&w * &we) * &linalg::adjoint(&w);
        let ph = C64::from_polar(1.0, rep.space().sigma(&xi, &eta));
        prop_assert!(linalg::max_abs(&linalg::axpy(&lhs, -ph, &we)) < 1e-13);
    }

    #[test]
    fn grid_weyl_operators_are_unitary(x in -3.0f64..3.0, k in -3.0f64..3.0) {
        let rep: Rep = GridRep::balanced(1, 32).unwrap().into();
        prop_assert!(weyl_op(&rep, &v(&[x, k])).unwrap().unitary_defect() < 1e-12);
    }
}
