use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use symfield::symplin::*;

fn vec_of(v: &[f64]) -> Vector {
    Vector::from_vec(v.to_vec())
}

fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max().max(1.0);
    sv.iter().filter(|s| **s > 1e-10 * top).count()
}

fn sigma_gram(e: &Subspace) -> DMatrix<f64> {
    let b = e.basis();
    b.transpose() * e.space().form() * b
}

fn span_dim(spaces: &[&Subspace]) -> usize {
    let cols: Vec<Vector> = spaces.iter().flat_map(|s| (0..s.dim()).map(|j| s.basis_vector(j))).collect();
    if cols.is_empty() {
        return 0;
    }
    rank(&DMatrix::from_columns(&cols))
}

fn subspace_from(space: &Arc<SymplecticSpace>, flat: &[f64], k: usize) -> Subspace {
    let n = space.dim();
    let vs: Vec<Vector> = (0..k).map(|j| vec_of(&flat[j * n..(j + 1) * n])).collect();
    Subspace::span(space, &vs).unwrap()
}

#[test]
fn sigma_of_coordinate_axes() {
    let s = SymplecticSpace::standard(1);
    assert_eq!(s.sigma(&vec_of(&[1.0, 0.0]), &vec_of(&[0.0, 1.0])), -1.0);
    let xi = vec_of(&[0.3, -1.7]);
    assert_eq!(s.sigma(&xi, &xi), 0.0);
}

#[test]
fn degenerate_forms_are_rejected() {
    let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    assert!(SymplecticSpace::new(m).is_err());
    let z = DMatrix::zeros(2, 2);
    assert!(SymplecticSpace::new(z).is_err());
}

#[test]
fn complement_examples() {
    let sp = Arc::new(SymplecticSpace::standard(1));
    let line = Subspace::span(&sp, &[vec_of(&[1.0, 0.0])]).unwrap();
    assert!(sigma_complement(&line).same_as(&line));
    assert!(sigma_complement(&Subspace::zero(&sp)).is_full());
    assert!(sigma_complement(&Subspace::full(&sp)).is_zero());
}

#[test]
fn classification_examples() {
    let sp = Arc::new(SymplecticSpace::standard(1));
    let line = Subspace::span(&sp, &[vec_of(&[0.6, 0.8])]).unwrap();
    let c = classify(&line);
    assert!(c.lagrangian && c.isotropic && c.involutive && !c.symplectic);
    let c = classify(&Subspace::full(&sp));
    assert!(c.symplectic && c.involutive && !c.isotropic);
    let s4 = Arc::new(SymplecticSpace::standard(2));
    let e = Subspace::axes(&s4, &[0, 2]).unwrap();
    let c = classify(&e);
    assert_eq!(rank(&sigma_gram(&e)), 2);
    assert!(c.symplectic && !c.isotropic);
}

#[test]
fn standard_symplectic_bases() {
    for n in [1, 2] {
        let sp = Arc::new(SymplecticSpace::standard(n));
        let b = symplectic_basis(&sp).unwrap();
        assert_eq!(b.e.len(), n);
        assert!(b.defect(&sp) < 1e-12);
    }
    let sp = Arc::new(SymplecticSpace::standard(1));
    let b = symplectic_basis(&sp).unwrap();
    let e = &b.e[0];
    let f = &b.f[0];
    assert!((e[0].abs() - 1.0).abs() < 1e-12 && e[1].abs() < 1e-12);
    assert!((f[1].abs() - 1.0).abs() < 1e-12 && f[0].abs() < 1e-12);
}

#[test]
fn lattice_operations_examples() {
    let sp = Arc::new(SymplecticSpace::standard(1));
    let a = Subspace::span(&sp, &[vec_of(&[1.0, 0.0])]).unwrap();
    let b = Subspace::span(&sp, &[vec_of(&[1.0, 1.0])]).unwrap();
    assert!(lattice_sum(&a, &Subspace::zero(&sp)).unwrap().same_as(&a));
    assert!(lattice_intersect(&a, &Subspace::full(&sp)).unwrap().same_as(&a));
    assert!(lattice_sum(&a, &b).unwrap().is_full());
    assert!(lattice_intersect(&a, &b).unwrap().is_zero());
}

#[test]
fn centralizer_split_examples() {
    let s4 = Arc::new(SymplecticSpace::standard(2));
    let e = Subspace::axes(&s4, &[0, 2]).unwrap();
    let c = centralizer_split(&e).unwrap();
    assert!(c.ec.is_zero() && c.k.is_zero());
    assert!(c.g.same_as(&e));
    assert!(c.f.same_as(&sigma_complement(&e)));

    let sp = Arc::new(SymplecticSpace::standard(1));
    let line = Subspace::span(&sp, &[vec_of(&[1.0, 2.0])]).unwrap();
    let c = centralizer_split(&line).unwrap();
    assert!(c.ec.same_as(&line));
    assert!(c.g.is_zero() && c.f.is_zero());
    assert_eq!(c.k.dim(), 1);
}

#[test]
fn dimension_mismatch_is_an_error() {
    let sp = Arc::new(SymplecticSpace::standard(1));
    assert!(Subspace::span(&sp, &[vec_of(&[1.0, 0.0, 0.0])]).is_err());
}

#[test]
fn records_round_trip() {
    let sp = Arc::new(SymplecticSpace::standard(2));
    let e = Subspace::span(&sp, &[vec_of(&[1.0, 2.0, 0.0, -1.0])]).unwrap();
    let rec = e.record();
    let json = serde_json::to_string(&rec).unwrap();
    let back = Subspace::from_record(&sp, &serde_json::from_str(&json).unwrap()).unwrap();
    assert!(back.same_as(&e));
    let srec = sp.record();
    assert!(SymplecticSpace::from_record(&srec).unwrap().same_as(&sp));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_is_antisymmetric_and_bilinear(
        a in prop::collection::vec(-3.0f64..3.0, 4),
        b in prop::collection::vec(-3.0f64..3.0, 4),
        c in prop::collection::vec(-3.0f64..3.0, 4),
        t in -2.0f64..2.0,
    ) {
        let s = SymplecticSpace::standard(2);
        let (a, b, c) = (vec_of(&a), vec_of(&b), vec_of(&c));
        prop_assert!((s.sigma(&a, &b) + s.sigma(&b, &a)).abs() < 1e-12);
        let lhs = s.sigma(&(&a * t + &c), &b);
        let rhs = t * s.sigma(&a, &b) + s.sigma(&c, &b);
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn double_complement_is_identity(flat in prop::collection::vec(-1.0f64..1.0, 8)) {
        let sp = Arc::new(SymplecticSpace::standard(2));
        let e = subspace_from(&sp, &flat, 2);
        let ee = sigma_complement(&sigma_complement(&e));
        prop_assert!(ee.distance(&e) < 1e-10);
        prop_assert_eq!(sigma_complement(&e).dim(), 4 - e.dim());
    }

    #[test]
    fn classification_matches_gram_rank(flat in prop::collection::vec(-1.0f64..1.0, 12), k in 1usize..4) {
        let sp = Arc::new(SymplecticSpace::standard(2));
        let e = subspace_from(&sp, &flat, k);
        let r = rank(&sigma_gram(&e));
        let c = classify(&e);
        prop_assert_eq!(c.isotropic, r == 0);
        prop_assert_eq!(c.symplectic, r == e.dim());
        prop_assert_eq!(c.lagrangian, r == 0 && e.dim() == 2);
        prop_assert_eq!(c.involutive, sigma_complement(&e).is_subset_of(&e));
    }

    #[test]
    fn sum_intersection_dimension_identity(a in prop::collection::vec(-1.0f64..1.0, 12), b in prop::collection::vec(-1.0f64..1.0, 12)) {
        let sp = Arc::new(SymplecticSpace::standard(3));
        let e = subspace_from(&sp, &a, 2);
        let f = subspace_from(&sp, &b, 2);
        let s = lattice_sum(&e, &f).unwrap();
        let i = lattice_intersect(&e, &f).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), e.dim() + f.dim());
        prop_assert!(e.is_subset_of(&s) && f.is_subset_of(&s));
        prop_assert!(i.is_subset_of(&e) && i.is_subset_of(&f));
    }

    #[test]
    fn centralizer_split_invariants(flat in prop::collection::vec(-1.0f64..1.0, 8), isotropic_bias in any::<bool>()) {
        let sp = Arc::new(SymplecticSpace::standard(2));
        let mut flat = flat;
        if isotropic_bias {
            // second vector in the x-plane with the first one: an isotropic plane
            flat[2] = 0.0; flat[3] = 0.0; flat[6] = 0.0; flat[7] = 0.0;
        }
        let e = subspace_from(&sp, &flat, 2);
        let es = sigma_complement(&e);
        let c = centralizer_split(&e).unwrap();
        prop_assert!(c.ec.distance(&lattice_intersect(&e, &es).unwrap()) < 1e-10);
        prop_assert!(c.g.is_subset_of(&e) && c.f.is_subset_of(&es));
        prop_assert_eq!(c.g.dim() + c.ec.dim(), e.dim());
        prop_assert_eq!(span_dim(&[&c.g, &c.ec]), e.dim());
        prop_assert_eq!(span_dim(&[&c.f, &c.ec]), es.dim());
        prop_assert_eq!(span_dim(&[&e, &c.f, &c.k]), 4);
        prop_assert_eq!(e.dim() + c.f.dim() + c.k.dim(), 4);
        if !c.g.is_zero() { prop_assert!(classify(&c.g).symplectic); }
        if !c.f.is_zero() { prop_assert!(classify(&c.f).symplectic); }
        let gf = lattice_sum(&c.g, &c.f).unwrap();
        let gfs = sigma_complement(&gf);
        prop_assert!(c.ec.is_subset_of(&gfs) && c.k.is_subset_of(&gfs));
        prop_assert!(classify(&c.k).isotropic);
    }

    #[test]
    fn symplectic_basis_of_perturbed_form(p in prop::collection::vec(-0.3f64..0.3, 16)) {
        let a = DMatrix::identity(4, 4) + DMatrix::from_row_slice(4, 4, &p);
        let j = SymplecticSpace::standard(2).form().clone();
        let form = a.transpose() * &j * &a;
        let form = (&form - form.transpose()) * 0.5;
        let sp = Arc::new(SymplecticSpace::new(form).unwrap());
        let b = symplectic_basis(&sp).unwrap();
        prop_assert!(b.defect(&sp) < 1e-10);
    }
}
