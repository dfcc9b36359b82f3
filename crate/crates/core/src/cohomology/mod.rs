//! Ordinary persistence over F2 and cohomology bases with explicit cocycles.
//!
//! Barcodes come from the standard reduction of the boundary matrix with
//! clearing. Cocycle representatives come from a separate reduction of the
//! coboundary matrix in reverse filtration order: the reduced column of a
//! birth simplex `σ` records a cochain `z` supported on `σ` and later
//! simplices whose coboundary starts at the paired death simplex, so `z`
//! restricts to a cocycle on every sublevel where the bar is alive.

mod barcode;

pub use barcode::{round_significant, Bar, BarJson, Barcode, BarcodeJson};

use crate::complex::{Cochain, FilteredComplex};
use crate::error::Result;
use crate::f2linalg::{self, Echelon, F2Matrix, F2Vector};

const NONE: usize = usize::MAX;

/// `a ^= b` for ascending index lists.
fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Persistence pairs by global simplex index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pairing {
    /// `(birth, death)` simplex pairs; the birth has dimension one less.
    pub pairs: Vec<(usize, usize)>,
    /// Unpaired birth simplices.
    pub essential: Vec<usize>,
}

/// Boundary-matrix reduction with clearing, dimensions `1..=max_dim + 1`
/// processed from the top down. Essential simplices are reported for
/// dimensions `<= max_dim`.
pub fn homology_pairing(k: &FilteredComplex, max_dim: usize) -> Pairing {
    let Some(top) = k.top_dim() else {
        return Pairing::default();
    };
    let n = k.len();
    let mut cleared = vec![false; n];
    let mut owner = vec![NONE; n];
    let mut reduced: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut out = Pairing::default();
    let highest = top.min(max_dim + 1);
    for p in (0..=highest).rev() {
        for &j in k.simplices_of_dim(p) {
            if cleared[j] {
                continue;
            }
            let mut col: Vec<usize> = k.faces_of(j).to_vec();
            col.sort_unstable();
            while let Some(&low) = col.last() {
                let o = owner[low];
                if o == NONE {
                    break;
                }
                col = xor_sorted(&col, &reduced[o]);
            }
            match col.last() {
                Some(&low) => {
                    owner[low] = j;
                    cleared[low] = true;
                    out.pairs.push((low, j));
                    reduced[j] = col;
                }
                None if p <= max_dim => out.essential.push(j),
                None => {}
            }
        }
    }
    out.pairs.sort_unstable();
    out.essential.sort_unstable();
    out
}

/// Barcode in degrees `0..=max_degree`; zero-length pairs are dropped.
pub fn persistent_barcode(k: &FilteredComplex, max_degree: usize) -> Barcode {
    let pairing = homology_pairing(k, max_degree);
    let mut bars = Barcode::new();
    for &(b, d) in &pairing.pairs {
        let degree = k.dim_of(b);
        if degree <= max_degree && k.value(b) < k.value(d) {
            bars.push(Bar::new(degree, k.value(b), k.value(d))).expect("birth < death");
        }
    }
    for &b in &pairing.essential {
        bars.push(Bar::new(k.dim_of(b), k.value(b), f64::INFINITY))
            .expect("finite birth");
    }
    bars
}

/// A bar of persistent cohomology in one degree together with a cocycle
/// representative on the whole complex.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistentCocycle {
    pub degree: usize,
    /// Global index of the birth simplex.
    pub birth: usize,
    /// Global index of the death simplex, if any.
    pub death: Option<usize>,
    /// Values on the `degree`-simplices of the full complex (local order).
    /// Restricted to any sublevel where the bar is alive, this is a cocycle.
    pub cochain: F2Vector,
}

struct CoboundaryReduction {
    owner: Vec<usize>,
    reduced: Vec<Vec<usize>>,
    combos: Vec<Vec<usize>>,
}

impl CoboundaryReduction {
    fn new(n: usize) -> Self {
        CoboundaryReduction {
            owner: vec![NONE; n],
            reduced: vec![Vec::new(); n],
            combos: vec![Vec::new(); n],
        }
    }

    /// Reduces the coboundary column of every `p`-simplex not in `skip`,
    /// latest simplex first, pivoting on the earliest coface. Returns
    /// `(simplex, pivot)` for each processed column.
    fn reduce_dim(&mut self, k: &FilteredComplex, p: usize, skip: &[bool]) -> Vec<(usize, Option<usize>)> {
        let cofaces = k.coface_lists(p);
        let mut out = Vec::new();
        for (local, &g) in k.simplices_of_dim(p).iter().enumerate().rev() {
            if skip[g] {
                continue;
            }
            let mut col: Vec<usize> = cofaces[local].iter().map(|&c| k.global_index(p + 1, c)).collect();
            let mut combo = vec![g];
            while let Some(&low) = col.first() {
                let o = self.owner[low];
                if o == NONE {
                    break;
                }
                col = xor_sorted(&col, &self.reduced[o]);
                combo = xor_sorted(&combo, &self.combos[o]);
            }
            let pivot = col.first().copied();
            if let Some(low) = pivot {
                self.owner[low] = g;
                self.reduced[g] = col;
            }
            self.combos[g] = combo;
            out.push((g, pivot));
        }
        out
    }
}

/// Bars of persistent cohomology in `degree` with cocycle representatives,
/// including zero-length bars. Ordered by birth simplex.
pub fn persistent_cocycles(k: &FilteredComplex, degree: usize) -> Vec<PersistentCocycle> {
    let n = k.len();
    let mut red = CoboundaryReduction::new(n);
    let mut skip = vec![false; n];
    if degree > 0 {
        let none = vec![false; n];
        for (_, pivot) in red.reduce_dim(k, degree - 1, &none) {
            if let Some(d) = pivot {
                skip[d] = true;
            }
        }
    }
    let m = k.count(degree);
    let mut out: Vec<PersistentCocycle> = red
        .reduce_dim(k, degree, &skip)
        .into_iter()
        .map(|(g, pivot)| PersistentCocycle {
            degree,
            birth: g,
            death: pivot,
            cochain: F2Vector::from_indices(m, red.combos[g].iter().map(|&s| k.local_index(s))),
        })
        .collect();
    out.sort_by_key(|c| c.birth);
    out
}

/// A basis of `H^p(K; F2)` by explicit cocycles.
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub degree: usize,
    pub cocycles: Vec<Cochain>,
    /// Columns spanning the coboundaries `B^p`.
    pub coboundary_basis: F2Matrix,
}

impl CohomologyBasis {
    pub fn len(&self) -> usize {
        self.cocycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cocycles.is_empty()
    }
}

/// Columns spanning `B^p(K) = δ(C^{p-1}(K))`, as vectors over the `p`-simplices.
pub fn coboundary_space(k: &FilteredComplex, p: usize) -> F2Matrix {
    if p == 0 {
        F2Matrix::empty(k.count(0))
    } else {
        k.coboundary_matrix(p - 1)
    }
}

/// Static cohomology basis of `K` in degree `p`: cocycles spanning
/// `ker δ_p` modulo `im δ_{p-1}`.
pub fn cohomology_basis(k: &FilteredComplex, p: usize) -> CohomologyBasis {
    let cocycles = f2linalg::kernel(&k.coboundary_matrix(p));
    let boundaries = coboundary_space(k, p);
    let mut e = Echelon::new(k.count(p));
    for c in boundaries.columns() {
        e.insert(c.clone()).expect("lengths agree");
    }
    let chosen = cocycles
        .into_columns()
        .into_iter()
        .filter_map(|z| {
            e.insert(z.clone())
                .expect("lengths agree")
                .then(|| Cochain::from_vector(k, p, z).expect("length is count(p)"))
        })
        .collect();
    CohomologyBasis {
        degree: p,
        cocycles: chosen,
        coboundary_basis: boundaries,
    }
}

/// `dim H^p(K; F2)` by rank-nullity.
pub fn betti_number(k: &FilteredComplex, p: usize) -> usize {
    let cocycle_dim = k.count(p) - f2linalg::rank(&k.coboundary_matrix(p));
    let coboundary_dim = if p == 0 { 0 } else { f2linalg::rank(&k.coboundary_matrix(p - 1)) };
    cocycle_dim - coboundary_dim
}

/// Whether the cocycle `c` represents the zero class.
pub fn is_coboundary(k: &FilteredComplex, c: &Cochain) -> Result<bool> {
    c.check_host(k)?;
    f2linalg::member(&coboundary_space(k, c.degree()), c.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::rp2_complex;
    use crate::metric::{circle_grid, vr_filtration};
    use std::f64::consts::PI;

    fn hollow_triangle() -> FilteredComplex {
        FilteredComplex::from_facets(&[vec![0, 1], vec![1, 2], vec![0, 2]], 0.0).unwrap()
    }

    #[test]
    fn single_point() {
        let k = FilteredComplex::from_facets(&[vec![0]], 0.0).unwrap();
        let b = persistent_barcode(&k, 2);
        assert_eq!(b.bars(), &[Bar::new(0, 0.0, f64::INFINITY)]);
    }

    #[test]
    fn four_point_circle() {
        let x = circle_grid(4, 1.0).unwrap();
        let k = vr_filtration(&x, 3, 4.0);
        let b = persistent_barcode(&k, 2);
        let expected = Barcode::from_bars([
            Bar::new(0, 0.0, f64::INFINITY),
            Bar { mult: 3, ..Bar::new(0, 0.0, PI / 2.0) },
            Bar::new(1, PI / 2.0, PI),
        ])
        .unwrap();
        assert_eq!(b, expected);
    }

    #[test]
    fn static_bases() {
        let hollow = hollow_triangle();
        let h1 = cohomology_basis(&hollow, 1);
        assert_eq!(h1.len(), 1);
        assert!(!is_coboundary(&hollow, &h1.cocycles[0]).unwrap());

        let full = FilteredComplex::from_facets(&[vec![0, 1, 2]], 0.0).unwrap();
        assert!(cohomology_basis(&full, 1).is_empty());

        let rp2 = rp2_complex();
        let sizes: Vec<usize> = (0..3).map(|p| cohomology_basis(&rp2, p).len()).collect();
        assert_eq!(sizes, vec![1, 1, 1]);
        assert_eq!((0..3).map(|p| betti_number(&rp2, p)).collect::<Vec<_>>(), vec![1, 1, 1]);
    }

    #[test]
    fn empty_complex() {
        let k = FilteredComplex::empty();
        assert!(persistent_barcode(&k, 3).is_empty());
        assert!(persistent_cocycles(&k, 1).is_empty());
        assert!(cohomology_basis(&k, 1).is_empty());
    }

    #[test]
    fn cocycle_pairs_match_homology_pairs() {
        let x = circle_grid(9, 1.0).unwrap();
        let k = vr_filtration(&x, 3, 10.0);
        let pairing = homology_pairing(&k, 2);
        for degree in 0..=2 {
            let cocycles = persistent_cocycles(&k, degree);
            let mut from_cohomology: Vec<(usize, Option<usize>)> =
                cocycles.iter().map(|c| (c.birth, c.death)).collect();
            let mut from_homology: Vec<(usize, Option<usize>)> = pairing
                .pairs
                .iter()
                .filter(|(b, _)| k.dim_of(*b) == degree)
                .map(|&(b, d)| (b, Some(d)))
                .chain(pairing.essential.iter().filter(|&&b| k.dim_of(b) == degree).map(|&b| (b, None)))
                .collect();
            from_cohomology.sort();
            from_homology.sort();
            assert_eq!(from_cohomology, from_homology, "degree {degree}");
        }
    }
}
