//! Finite join-semilattices of subspaces and their Moebius functions.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplin::{lattice_intersect, lattice_sum, Subspace, SubspaceRecord, SymplecticSpace};

#[derive(Clone, Debug)]
pub struct Semilattice {
    elements: Vec<Subspace>,
    /// leq[a][b] <=> elements[a] is contained in elements[b]
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    moebius: Vec<Vec<i64>>,
}

fn index_of(list: &[Subspace], e: &Subspace) -> Option<usize> {
    list.iter().position(|f| f.same_as(e))
}

fn canonical_cmp(a: &Subspace, b: &Subspace) -> Ordering {
    a.dim().cmp(&b.dim()).then_with(|| {
        let pa = a.projector();
        let pb = b.projector();
        for (x, y) in pa.iter().zip(pb.iter()) {
            if (x - y).abs() > 1e-7 {
                return x.partial_cmp(y).unwrap_or(Ordering::Equal);
            }
        }
        Ordering::Equal
    })
}

/// Closure of `seeds` (together with {0}) under lattice_sum.
pub fn closure(seeds: &[Subspace]) -> Result<Semilattice> {
    let space = seeds
        .first()
        .map(|s| s.space().clone())
        .ok_or_else(|| Error::Precondition("closure needs at least one seed".into()))?;
    let mut all = vec![Subspace::zero(&space)];
    all.extend(seeds.iter().cloned());
    join_closure(all)
}

/// Closure under joins of the given elements, without adding {0}.
pub fn join_closure(seeds: Vec<Subspace>) -> Result<Semilattice> {
    let mut elems: Vec<Subspace> = Vec::new();
    for s in seeds {
        if let Some(first) = elems.first() {
            if !Arc::ptr_eq(first.space(), s.space()) && !first.space().same_as(s.space()) {
                return Err(Error::AmbientMismatch);
            }
        }
        if index_of(&elems, &s).is_none() {
            elems.push(s);
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        let n = elems.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let s = lattice_sum(&elems[i], &elems[j])?;
                if index_of(&elems, &s).is_none() {
                    elems.push(s);
                    changed = true;
                }
            }
        }
    }
    Semilattice::from_elements(elems)
}

impl Semilattice {
    /// Builds the semilattice on exactly these elements; fails if they are
    /// not closed under joins.
    pub fn from_elements(mut elements: Vec<Subspace>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Precondition("empty semilattice".into()));
        }
        let mut uniq: Vec<Subspace> = Vec::new();
        for e in elements.drain(..) {
            if index_of(&uniq, &e).is_none() {
                uniq.push(e);
            }
        }
        uniq.sort_by(canonical_cmp);
        let n = uniq.len();
        let mut leq = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                leq[a][b] = uniq[a].is_subset_of(&uniq[b]);
            }
        }
        let mut join = vec![vec![0usize; n]; n];
        for a in 0..n {
            for b in a..n {
                let s = lattice_sum(&uniq[a], &uniq[b])?;
                let k = index_of(&uniq, &s).ok_or_else(|| {
                    Error::NotClosed(format!("join of elements {a} and {b} is missing"))
                })?;
                join[a][b] = k;
                join[b][a] = k;
            }
        }
        let moebius = moebius_table(&leq);
        Ok(Self { elements: uniq, leq, join, moebius })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Subspace {
        &self.elements[i]
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        self.elements[0].space()
    }

    pub fn index_of(&self, e: &Subspace) -> Option<usize> {
        index_of(&self.elements, e)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    /// Moebius function mu(a, b); zero unless a <= b.
    pub fn moebius(&self, a: usize, b: usize) -> i64 {
        self.moebius[a][b]
    }

    pub fn max_element(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|a| self.leq[a][m]))
    }

    pub fn min_element(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|a| self.leq[m][a]))
    }

    /// True when the intersection of any two elements is again an element.
    pub fn is_meet_closed(&self) -> bool {
        for a in 0..self.len() {
            for b in (a + 1)..self.len() {
                let m = lattice_intersect(&self.elements[a], &self.elements[b]).expect("same ambient");
                if self.index_of(&m).is_none() {
                    return false;
                }
            }
        }
        true
    }

    pub fn sub_ideals(&self, a: usize) -> SubIdeals {
        let n = self.len();
        let below = (0..n).filter(|&b| self.leq[b][a]).collect();
        let not_below = (0..n).filter(|&b| !self.leq[b][a]).collect();
        let max = self.max_element();
        let co_atoms = match max {
            Some(m) => (0..n)
                .filter(|&c| c != m)
                .filter(|&c| !(0..n).any(|d| d != c && d != m && self.leq[c][d]))
                .collect(),
            None => vec![],
        };
        SubIdeals { below, not_below, co_atoms, max }
    }

    /// For every b, the coefficients mu(a, b) over a <= b, so that
    /// f(b) = sum_a mu(a, b) F(a) inverts F(a) = sum_{b <= a} f(b).
    pub fn moebius_invert(&self) -> Vec<Vec<(usize, i64)>> {
        (0..self.len())
            .map(|b| {
                (0..self.len())
                    .filter(|&a| self.leq[a][b] && self.moebius[a][b] != 0)
                    .map(|a| (a, self.moebius[a][b]))
                    .collect()
            })
            .collect()
    }

    /// Applies the inversion to a family `values[a] = F(a)`.
    pub fn invert_family<V, Z, A>(&self, values: &[V], zero: Z, mut axpy: A) -> Result<Vec<V>>
    where
        Z: Fn() -> V,
        A: FnMut(&mut V, i64, &V),
    {
        if values.len() != self.len() {
            return Err(Error::IncompleteFamily(format!(
                "{} values for {} elements",
                values.len(),
                self.len()
            )));
        }
        let coeffs = self.moebius_invert();
        Ok(coeffs
            .iter()
            .map(|row| {
                let mut acc = zero();
                for &(a, c) in row {
                    axpy(&mut acc, c, &values[a]);
                }
                acc
            })
            .collect())
    }

    /// Cumulative sums F(a) = sum_{b <= a} f(b).
    pub fn zeta_family<V, Z, A>(&self, values: &[V], zero: Z, mut axpy: A) -> Result<Vec<V>>
    where
        Z: Fn() -> V,
        A: FnMut(&mut V, i64, &V),
    {
        if values.len() != self.len() {
            return Err(Error::IncompleteFamily(format!(
                "{} values for {} elements",
                values.len(),
                self.len()
            )));
        }
        Ok((0..self.len())
            .map(|a| {
                let mut acc = zero();
                for b in 0..self.len() {
                    if self.leq[b][a] {
                        axpy(&mut acc, 1, &values[b]);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn dump(&self) -> SemilatticeDump {
        let n = self.len();
        let mut moebius = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.leq[a][b] && self.moebius[a][b] != 0 {
                    moebius.push((a, b, self.moebius[a][b]));
                }
            }
        }
        SemilatticeDump {
            elements: self.elements.iter().map(|e| e.record()).collect(),
            order: self.leq.clone(),
            join: self.join.clone(),
            moebius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubIdeals {
    pub below: Vec<usize>,
    pub not_below: Vec<usize>,
    pub co_atoms: Vec<usize>,
    pub max: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemilatticeDump {
    pub elements: Vec<SubspaceRecord>,
    pub order: Vec<Vec<bool>>,
    pub join: Vec<Vec<usize>>,
    /// Sparse triples (a, b, mu(a, b)).
    pub moebius: Vec<(usize, usize, i64)>,
}

/// Moebius function of a finite poset given by its order matrix, with
/// elements listed in a linear extension (a < b implies a before b).
pub fn moebius_table(leq: &[Vec<bool>]) -> Vec<Vec<i64>> {
    let n = leq.len();
    let mut mu = vec![vec![0i64; n]; n];
    for a in 0..n {
        mu[a][a] = 1;
        for b in (a + 1)..n {
            if !leq[a][b] || a == b {
                continue;
            }
            let mut s = 0i64;
            for c in a..b {
                if leq[a][c] && leq[c][b] && c != b {
                    s += mu[a][c];
                }
            }
            mu[a][b] = -s;
        }
    }
    mu
}
