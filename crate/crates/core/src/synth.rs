//! Seeded random inputs for property tests and verification suites.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::{Bar, Barcode};
use crate::complex::FilteredComplex;
use crate::metric::FiniteMetricSpace;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random filtered complex on at most `max_vertices` vertices with at most
/// `max_simplices` simplices of dimension `<= max_dim`. Values are small
/// integers so that ties occur.
pub fn random_filtration(rng: &mut impl Rng, max_vertices: usize, max_simplices: usize, max_dim: usize) -> FilteredComplex {
    let nv = rng.random_range(1..=max_vertices.max(1));
    let mut chosen: std::collections::BTreeSet<Vec<usize>> = Default::default();
    for _ in 0..4 * max_simplices {
        let size = rng.random_range(1..=(max_dim + 1).min(nv));
        let mut facet: Vec<usize> = rand::seq::index::sample(rng, nv, size).into_vec();
        facet.sort_unstable();
        let mut closure = Vec::new();
        for mask in 1u32..(1 << facet.len()) {
            let face: Vec<usize> = facet.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
            if !chosen.contains(&face) {
                closure.push(face);
            }
        }
        if chosen.len() + closure.len() > max_simplices {
            continue;
        }
        chosen.extend(closure);
    }
    let mut by_dim: Vec<Vec<usize>> = chosen.into_iter().collect();
    by_dim.sort_by_key(|s| s.len());
    let mut values: std::collections::HashMap<Vec<usize>, f64> = Default::default();
    let mut entries = Vec::with_capacity(by_dim.len());
    for s in by_dim {
        let mut v = rng.random_range(0..6) as f64;
        if s.len() > 1 {
            for skip in 0..s.len() {
                let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                v = v.max(values[&face]);
            }
        }
        values.insert(s.clone(), v);
        entries.push((s, v));
    }
    FilteredComplex::build(entries).expect("random filtration is valid by construction")
}

/// `K` with fresh random values in `0..levels`, made monotone along faces.
pub fn random_values(rng: &mut impl Rng, k: &FilteredComplex, levels: u32) -> FilteredComplex {
    let mut values = vec![0.0; k.len()];
    let mut entries = Vec::with_capacity(k.len());
    for g in 0..k.len() {
        let own = rng.random_range(0..levels.max(1)) as f64;
        let v = k.faces_of(g).iter().map(|&f| values[f]).fold(own, f64::max);
        values[g] = v;
        entries.push((k.simplex(g).vertices().to_vec(), v));
    }
    FilteredComplex::build(entries).expect("values are monotone by construction")
}

/// `n` random points of the unit square with the Euclidean metric.
pub fn random_metric(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    FiniteMetricSpace::from_fn(n, |i, j| {
        let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
        dx.hypot(dy)
    })
    .expect("Euclidean distances form a metric")
}

/// Independent uniform distances in `[lo, hi]`; a metric whenever `hi <= 2 lo`.
/// Unlike point samples it has no nearly degenerate triangles, so small
/// perturbations of it usually remain metrics.
pub fn random_bounded_metric(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> FiniteMetricSpace {
    assert!(0.0 < lo && lo <= hi && hi <= 2.0 * lo, "need 0 < lo <= hi <= 2 lo");
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = rng.random_range(lo..=hi);
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    FiniteMetricSpace::new(d).expect("distances within a factor 2 satisfy the triangle inequality")
}

/// A random metric with distances in `{1, 2}`, which is full of ties.
pub fn random_discrete_metric(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    let choices = [1.0, 2.0];
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = *choices.choose(rng).expect("nonempty");
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    FiniteMetricSpace::new(d).expect("{1,2}-valued distances satisfy the triangle inequality")
}

/// Up to `max_bars` bars of one degree with endpoints in `[lo, hi]`, rounded to
/// one decimal so that ties occur; roughly one in six is infinite.
pub fn random_barcode(rng: &mut impl Rng, max_bars: usize, degree: usize, lo: f64, hi: f64) -> Barcode {
    let count = rng.random_range(0..=max_bars);
    let round = |x: f64| (x * 10.0).round() / 10.0;
    let mut out = Barcode::new();
    while out.total() < count {
        let a = round(rng.random_range(lo..=hi));
        let b = round(rng.random_range(lo..=hi));
        let bar = if rng.random_ratio(1, 6) {
            Bar::new(degree, a.min(b), f64::INFINITY)
        } else if a != b {
            Bar::new(degree, a.min(b), a.max(b))
        } else {
            continue;
        };
        out.push(bar).expect("valid bar");
    }
    out
}
