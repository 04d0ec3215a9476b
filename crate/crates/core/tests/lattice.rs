use std::sync::Arc;

use proptest::prelude::*;
use symfield::lattice::*;
use symfield::symplin::*;

fn line(sp: &Arc<SymplecticSpace>, v: &[f64]) -> Subspace {
    Subspace::span(sp, &[Vector::from_vec(v.to_vec())]).unwrap()
}

/// mu(a, a) = 1, mu(a, b) = -sum_{a <= c < b} mu(a, c), computed from scratch.
fn brute_moebius(s: &Semilattice) -> Vec<Vec<i64>> {
    let n = s.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| s.element(i).dim());
    let mut mu = vec![vec![0i64; n]; n];
    for a in 0..n {
        for &b in &order {
            if !s.leq(a, b) {
                continue;
            }
            if a == b {
                mu[a][b] = 1;
                continue;
            }
            let mut acc = 0;
            for c in 0..n {
                if c != b && s.leq(a, c) && s.leq(c, b) {
                    acc += mu[a][c];
                }
            }
            mu[a][b] = -acc;
        }
    }
    mu
}

fn boolean_square() -> (Semilattice, Subspace, Subspace) {
    let sp = Arc::new(SymplecticSpace::standard(1));
    let l1 = line(&sp, &[1.0, 0.0]);
    let l2 = line(&sp, &[0.0, 1.0]);
    (closure(&[l1.clone(), l2.clone()]).unwrap(), l1, l2)
}

#[test]
fn closure_of_two_lines_is_the_boolean_square() {
    let (s, l1, l2) = boolean_square();
    assert_eq!(s.len(), 4);
    assert!(s.index_of(&l1).is_some() && s.index_of(&l2).is_some());
    assert!(s.elements().iter().any(|e| e.is_zero()));
    assert!(s.element(s.max_element().unwrap()).is_full());
    assert!(s.element(s.min_element().unwrap()).is_zero());
}

#[test]
fn closure_of_a_single_seed() {
    let sp = Arc::new(SymplecticSpace::standard(2));
    let e = Subspace::axes(&sp, &[0, 1]).unwrap();
    let s = closure(std::slice::from_ref(&e)).unwrap();
    assert_eq!(s.len(), 2);
    let z = s.index_of(&Subspace::zero(&sp)).unwrap();
    let ei = s.index_of(&e).unwrap();
    assert_eq!(s.moebius(z, ei), -1);
}

#[test]
fn moebius_of_boolean_square() {
    let (s, _, _) = boolean_square();
    let z = s.min_element().unwrap();
    let top = s.max_element().unwrap();
    assert_eq!(s.moebius(z, top), 1);
    let brute = brute_moebius(&s);
    for a in 0..s.len() {
        for b in 0..s.len() {
            assert_eq!(s.moebius(a, b), brute[a][b]);
        }
    }
}

#[test]
fn ideals_and_co_atoms() {
    let (s, l1, l2) = boolean_square();
    let a = s.index_of(&l1).unwrap();
    let id = s.sub_ideals(a);
    let below: Vec<bool> = id.below.iter().map(|&i| s.element(i).is_zero() || s.element(i).same_as(&l1)).collect();
    assert_eq!(below, vec![true, true]);
    let mut co: Vec<usize> = id.co_atoms.clone();
    co.sort();
    let mut want = vec![a, s.index_of(&l2).unwrap()];
    want.sort();
    assert_eq!(co, want);

    let sp = Arc::new(SymplecticSpace::standard(1));
    let single = join_closure(vec![Subspace::zero(&sp)]).unwrap();
    let id = single.sub_ideals(0);
    assert_eq!(id.below, vec![0]);
    assert!(id.co_atoms.is_empty());
}

#[test]
fn chain_inversion_gives_differences() {
    let sp = Arc::new(SymplecticSpace::standard(1));
    let e = line(&sp, &[1.0, 1.0]);
    let s = closure(std::slice::from_ref(&e)).unwrap();
    let z = s.index_of(&Subspace::zero(&sp)).unwrap();
    let ei = s.index_of(&e).unwrap();
    let mut cumulative = vec![0i64; 2];
    cumulative[z] = 5;
    cumulative[ei] = 12;
    let comps = s.invert_family(&cumulative, || 0i64, |acc, c, v| *acc += c * v).unwrap();
    assert_eq!(comps[z], 5);
    assert_eq!(comps[ei], 7);
}

#[test]
fn incomplete_family_is_an_error() {
    let (s, _, _) = boolean_square();
    assert!(s.invert_family(&[1i64, 2], || 0i64, |acc, c, v| *acc += c * v).is_err());
}

#[test]
fn mixed_ambient_spaces_are_rejected() {
    let a = Arc::new(SymplecticSpace::standard(1));
    let b = Arc::new(SymplecticSpace::standard(2));
    assert!(closure(&[line(&a, &[1.0, 0.0]), Subspace::axes(&b, &[0]).unwrap()]).is_err());
}

#[test]
fn dump_serializes() {
    let (s, _, _) = boolean_square();
    let json = serde_json::to_string(&s.dump()).unwrap();
    assert!(json.contains("moebius"));
}

fn random_lines(flat: &[f64]) -> Vec<Subspace> {
    let sp = Arc::new(SymplecticSpace::standard(2));
    (0..3).map(|j| line(&sp, &flat[4 * j..4 * j + 4])).collect()
}

#[test]
fn three_generic_lines_in_four_dimensions() {
    let flat = [
        0.5184933788914362, -0.5076220444833629, -0.46279296382047164, 0.7800260794358674,
        0.23588949714070184, -0.5841761788058042, 0.5730628148525538, -0.48909660995236826,
        -0.47026599521724055, 0.7503061550501975, 0.13439128631252617, -0.8689411080099411,
    ];
    let lines = random_lines(&flat);
    let s = closure(&lines).unwrap();
    assert_eq!(s.len(), 8);
    let top = s.element(s.len() - 1);
    assert_eq!(top.dim(), 3);
    assert!(lines.iter().all(|l| l.is_subset_of(top)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_closures_are_join_closed_semilattices(flat in prop::collection::vec(-1.0f64..1.0, 12)) {
        let s = closure(&random_lines(&flat)).unwrap();
        prop_assert!(s.len() <= 8);
        for a in 0..s.len() {
            prop_assert_eq!(s.join(a, a), a);
            for b in 0..s.len() {
                let j = s.join(a, b);
                prop_assert_eq!(j, s.join(b, a));
                let sum = lattice_sum(s.element(a), s.element(b)).unwrap();
                prop_assert!(s.element(j).same_as(&sum));
                prop_assert!(s.leq(a, j) && s.leq(b, j));
                for c in 0..s.len() {
                    prop_assert_eq!(s.join(s.join(a, b), c), s.join(a, s.join(b, c)));
                }
            }
        }
    }

    #[test]
    fn moebius_sums_vanish_on_intervals(flat in prop::collection::vec(-1.0f64..1.0, 12)) {
        let s = closure(&random_lines(&flat)).unwrap();
        let brute = brute_moebius(&s);
        for a in 0..s.len() {
            for b in 0..s.len() {
                prop_assert_eq!(s.moebius(a, b), brute[a][b]);
                if a != b && s.leq(a, b) {
                    let total: i64 = (0..s.len()).filter(|&c| s.leq(a, c) && s.leq(c, b)).map(|c| s.moebius(a, c)).sum();
                    prop_assert_eq!(total, 0);
                }
            }
        }
    }

    #[test]
    fn every_non_maximal_element_lies_below_a_co_atom(flat in prop::collection::vec(-1.0f64..1.0, 12)) {
        let s = closure(&random_lines(&flat)).unwrap();
        let top = s.max_element().unwrap();
        let co = s.sub_ideals(top).co_atoms;
        for a in 0..s.len() {
            if a != top {
                prop_assert!(co.iter().any(|&c| s.leq(a, c)));
            }
        }
    }

    #[test]
    fn inversion_round_trip_is_exact(flat in prop::collection::vec(-1.0f64..1.0, 12), vals in prop::collection::vec(-1000i64..1000, 8)) {
        let s = closure(&random_lines(&flat)).unwrap();
        let v = &vals[..s.len()];
        let zeta = s.zeta_family(v, || 0i64, |acc, c, x| *acc += c * x).unwrap();
        let back = s.invert_family(&zeta, || 0i64, |acc, c, x| *acc += c * x).unwrap();
        prop_assert_eq!(&back, &v.to_vec());
        let again = s.zeta_family(&back, || 0i64, |acc, c, x| *acc += c * x).unwrap();
        prop_assert_eq!(again, zeta);
    }
}
