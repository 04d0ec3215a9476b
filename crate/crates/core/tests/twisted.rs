use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use symfield::symplin::*;
use symfield::twisted::*;
use symfield::C64;

fn v2(a: f64, b: f64) -> Vector {
    Vector::from_vec(vec![a, b])
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn plane() -> Arc<SymplecticSpace> {
    Arc::new(SymplecticSpace::standard(1))
}

#[test]
fn product_of_axis_deltas() {
    let s = plane();
    let a = DiracComb::delta(&s, v2(1.0, 0.0), one()).unwrap();
    let b = DiracComb::delta(&s, v2(0.0, 1.0), one()).unwrap();
    let p = a.product(&b).unwrap();
    assert_eq!(p.len(), 1);
    assert!((p.coeff_at(&v2(1.0, 1.0)) - C64::from_polar(1.0, -0.5)).norm() < 1e-15);
}

#[test]
fn delta_at_zero_is_the_unit() {
    let s = plane();
    let id = TwistedElement::identity(&s);
    let comb = DiracComb::from_atoms(&s, vec![(v2(0.3, -1.0), C64::new(0.5, 2.0)), (v2(2.0, 0.1), C64::new(-1.0, 0.0))]).unwrap();
    let mut mu = TwistedElement::from_comb(comb.clone());
    let d = DensityOnSubspace::gaussian(Subspace::full(&s), v2(0.0, 0.0), 16, 3.0, &[0.1, 0.2], 0.7, one()).unwrap();
    mu.densities.push(d.clone());
    let (left, _) = twisted_convolve(&id, &mu, &ConvolveOptions::default()).unwrap();
    let (right, _) = twisted_convolve(&mu, &id, &ConvolveOptions::default()).unwrap();
    for p in [&left, &right] {
        assert!(p.comb.distance(&comb) < 1e-15);
        assert_eq!(p.densities.len(), 1);
        let diff = p.densities[0].samples().iter().zip(d.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }
}

#[test]
fn adjoint_of_a_delta() {
    let s = plane();
    let xi = v2(0.7, -2.0);
    let c = C64::new(0.3, 0.4);
    let a = DiracComb::delta(&s, xi.clone(), c).unwrap().adjoint();
    assert!((a.coeff_at(&(-&xi)) - c.conj()).norm() < 1e-15);
    assert_eq!(a.len(), 1);
}

#[test]
fn transversal_gaussians_give_the_twisted_product_density() {
    let s = plane();
    let h = 0.1;
    let md = 81usize;
    let hw = md as f64 * h / 2.0;
    let xa = Subspace::axes(&s, &[0]).unwrap();
    let ka = Subspace::axes(&s, &[1]).unwrap();
    let mu = DensityOnSubspace::gaussian(xa, v2(0.0, 0.0), md, hw, &[0.2], 0.6, one()).unwrap();
    let nu = DensityOnSubspace::gaussian(ka, v2(0.0, 0.0), md, hw, &[-0.1], 0.8, C64::new(2.0, 0.0)).unwrap();
    let opts = ConvolveOptions { spacing: Some(h), half_width: Some(hw), ..Default::default() };
    let (p, r) = twisted_convolve(&TwistedElement::from_density(mu.clone()), &TwistedElement::from_density(nu.clone()), &opts).unwrap();
    assert_eq!(p.densities.len(), 1);
    let out = &p.densities[0];
    assert!(out.support().is_full());
    assert!((r.output_l1 - r.input_l1_product).abs() < 1e-6 * r.input_l1_product);
    assert!(r.leakage < 1e-12);
    // pointwise oracle: e^{(i/2) sigma((x,0),(0,k))} mu(x) nu(k) with sigma = -xk
    for &(x, k) in &[(0.0, 0.0), (0.5, -0.3), (-1.2, 0.7), (1.0, 1.0)] {
        let want = C64::from_polar(1.0, -0.5 * x * k) * mu.eval(&v2(x, 0.0)) * nu.eval(&v2(0.0, k));
        let got = out.eval(&v2(x, k));
        assert!((got - want).norm() < 1e-10 * want.norm().max(1e-3), "{x} {k}: {got} vs {want}");
    }
}

#[test]
fn support_of_density_products_lies_in_the_sum() {
    let s4 = Arc::new(SymplecticSpace::standard(2));
    let e = Subspace::axes(&s4, &[0]).unwrap();
    let f = Subspace::span(&s4, &[Vector::from_vec(vec![0.0, 1.0, 1.0, 0.0])]).unwrap();
    let z = Vector::zeros(4);
    let mu = DensityOnSubspace::gaussian(e.clone(), z.clone(), 24, 4.0, &[0.2], 0.7, one()).unwrap();
    let nu = DensityOnSubspace::gaussian(f.clone(), z, 24, 4.0, &[-0.3], 0.9, one()).unwrap();
    let (p, r) = twisted_convolve(&TwistedElement::from_density(mu), &TwistedElement::from_density(nu), &ConvolveOptions::default()).unwrap();
    let sum = lattice_sum(&e, &f).unwrap();
    assert!(p.densities.iter().all(|d| d.support().same_as(&sum)));
    assert!(r.leakage < 1e-8);
}

#[test]
fn fourier_fixes_the_standard_gaussian_and_is_involutive() {
    let s = plane();
    let m = 64usize;
    let l = (PI * m as f64 / 2.0).sqrt();
    let g = DensityOnSubspace::gaussian(Subspace::full(&s), v2(0.0, 0.0), m, l, &[0.0, 0.0], 1.0, one()).unwrap();
    let fg = symplectic_fourier(&g).unwrap();
    let mut worst = 0.0f64;
    for i in 0..fg.node_count() {
        let p = fg.point(i);
        let want = (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp() / (2.0 * PI);
        worst = worst.max((fg.samples()[i] - want).norm());
    }
    assert!(worst < 1e-10, "{worst}");

    let bump = DensityOnSubspace::from_fn(Subspace::full(&s), v2(0.0, 0.0), m, l, |t| {
        C64::new((-(t[0] - 0.5).powi(2) - 2.0 * (t[1] + 0.3).powi(2)).exp(), t[0] * (-t[0] * t[0] - t[1] * t[1]).exp())
    })
    .unwrap();
    let back = symplectic_fourier(&symplectic_fourier(&bump).unwrap()).unwrap();
    let diff = back.samples().iter().zip(bump.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn fourier_of_a_narrow_bump_is_flat() {
    let s = plane();
    let m = 256usize;
    let l = 1.0;
    let g = DensityOnSubspace::gaussian(Subspace::full(&s), v2(0.0, 0.0), m, l, &[0.0, 0.0], 0.03, one()).unwrap();
    let fg = symplectic_fourier(&g).unwrap();
    for i in 0..fg.node_count() {
        let p = fg.point(i);
        if p.norm() < 1.0 {
            assert!((fg.samples()[i] * (2.0 * PI) - 1.0).norm() < 1e-2);
        }
    }
}

#[test]
fn fourier_needs_full_support() {
    let s = plane();
    let d = DensityOnSubspace::gaussian(Subspace::axes(&s, &[0]).unwrap(), v2(0.0, 0.0), 16, 3.0, &[0.0], 1.0, one()).unwrap();
    assert!(symplectic_fourier(&d).is_err());
}

#[test]
fn elements_round_trip_through_files() {
    let s = plane();
    let comb = DiracComb::from_atoms(&s, vec![(v2(0.3, -1.0), C64::new(0.5, 2.0))]).unwrap();
    let mut mu = TwistedElement::from_comb(comb);
    mu.densities
        .push(DensityOnSubspace::gaussian(Subspace::axes(&s, &[1]).unwrap(), v2(0.5, 0.0), 9, 2.0, &[0.1], 0.5, C64::new(0.0, 1.0)).unwrap());
    let stem = std::env::temp_dir().join(format!("symfield-twisted-{}", std::process::id()));
    save_element(&mu, &stem).unwrap();
    let back = load_element(&stem).unwrap();
    assert!(back.comb.distance(&mu.comb) == 0.0);
    assert_eq!(back.densities.len(), 1);
    assert_eq!(back.densities[0].samples(), mu.densities[0].samples());
    assert!(back.densities[0].support().same_as(mu.densities[0].support()));
}

fn comb_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -1.0f64..1.0, -1.0f64..1.0), 1..4)
}

fn comb_of(space: &Arc<SymplecticSpace>, atoms: &[(f64, f64, f64, f64)]) -> DiracComb {
    DiracComb::from_atoms(space, atoms.iter().map(|&(x, k, a, b)| (v2(x, k), C64::new(a, b)))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn comb_products_are_associative(a in comb_strategy(), b in comb_strategy(), c in comb_strategy()) {
        let s = plane();
        let (a, b, c) = (comb_of(&s, &a), comb_of(&s, &b), comb_of(&s, &c));
        let l = a.product(&b).unwrap().product(&c).unwrap();
        let r = a.product(&b.product(&c).unwrap()).unwrap();
        prop_assert!(l.distance(&r) < 1e-12);
    }

    #[test]
    fn adjoint_reverses_products(a in comb_strategy(), b in comb_strategy()) {
        let s = plane();
        let (a, b) = (comb_of(&s, &a), comb_of(&s, &b));
        let lhs = a.product(&b).unwrap().adjoint();
        let rhs = b.adjoint().product(&a.adjoint()).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-12);
        prop_assert!(a.adjoint().adjoint().distance(&a) == 0.0);
    }

    #[test]
    fn l1_norm_is_submultiplicative(a in comb_strategy(), b in comb_strategy()) {
        let s = plane();
        let (a, b) = (comb_of(&s, &a), comb_of(&s, &b));
        prop_assert!(a.product(&b).unwrap().l1() <= a.l1() * b.l1() + 1e-12);
    }

    #[test]
    fn density_adjoint_is_an_involution(cx in -1.0f64..1.0, ck in -1.0f64..1.0, s in 0.3f64..1.5) {
        let sp = plane();
        let d = DensityOnSubspace::gaussian(Subspace::full(&sp), v2(0.0, 0.0), 16, 3.0, &[cx, ck], s, C64::new(0.5, -0.2)).unwrap();
        let mu = TwistedElement::from_density(d);
        let back = mu.adjoint().adjoint();
        let diff = back.densities[0].samples().iter().zip(mu.densities[0].samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-15);
    }
}
