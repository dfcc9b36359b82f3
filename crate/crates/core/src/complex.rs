//! Filtered simplicial complexes, cochains and the plain-text complex format.
//!
//! A [`FilteredComplex`] keeps its simplices in canonical order: ascending
//! filtration value, then dimension, then lexicographic vertex list. Every
//! sublevel complex is therefore a prefix of the whole, and a sublevel is
//! represented as a cheap view sharing storage with its parent.
//!
//! Filtration values follow the closed convention: a simplex belongs to the
//! sublevel at `t` when its value is `<= t`. Vietoris-Rips bars are
//! conceptually left-open and right-closed; stored bars are plain
//! `(birth, death)` pairs.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2linalg::{F2Matrix, F2Vector};

/// A simplex given by its strictly increasing vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts `vertices`; rejects empty and repeated vertex lists.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() || vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSimplex(vertices));
        }
        Ok(Simplex(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces; the `k`-th omits the `k`-th vertex.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |k| {
            let mut v = self.0.clone();
            v.remove(k);
            Simplex(v)
        })
    }
}

fn canonical_cmp(a: (&Simplex, f64), b: (&Simplex, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
        .then(a.0.dim().cmp(&b.0.dim()))
        .then_with(|| a.0.cmp(b.0))
}

static NEXT_LINEAGE: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
struct Store {
    lineage: u64,
    simplices: Vec<Simplex>,
    values: Vec<f64>,
    /// Global indices of codimension-one faces, in vertex-removal order.
    faces: Vec<Vec<usize>>,
    /// Position of each simplex among the simplices of its dimension.
    local: Vec<usize>,
    by_dim: Vec<Vec<usize>>,
    index_of: HashMap<Simplex, usize>,
}

/// A finite simplicial complex with a monotone filtration.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    store: Arc<Store>,
    len: usize,
    dim_counts: Vec<usize>,
}

impl PartialEq for FilteredComplex {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len
            && (0..self.len).all(|g| {
                self.store.simplices[g] == other.store.simplices[g]
                    && self.store.values[g] == other.store.values[g]
            })
    }
}

impl FilteredComplex {
    /// Validates and canonically sorts a list of `(vertices, value)` pairs.
    pub fn build(filtered_simplices: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let mut entries = Vec::with_capacity(filtered_simplices.len());
        let mut seen = HashMap::with_capacity(filtered_simplices.len());
        for (vertices, value) in filtered_simplices {
            let s = Simplex::new(vertices)?;
            if !value.is_finite() {
                return Err(Error::NonFiniteValue {
                    simplex: s.0,
                    value,
                });
            }
            if seen.insert(s.clone(), value).is_some() {
                return Err(Error::DuplicateSimplex(s.0));
            }
            entries.push((s, value));
        }
        for (s, value) in &entries {
            for face in s.faces() {
                match seen.get(&face) {
                    None => {
                        return Err(Error::MissingFace {
                            simplex: s.0.clone(),
                            face: face.0,
                        })
                    }
                    Some(&fv) if fv > *value => {
                        return Err(Error::NonMonotone {
                            simplex: s.0.clone(),
                            value: *value,
                            face: face.0,
                            face_value: fv,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        entries.sort_by(|a, b| canonical_cmp((&a.0, a.1), (&b.0, b.1)));
        Ok(Self::from_canonical(entries))
    }

    /// Assembles a complex from entries already in canonical order and closed
    /// under faces.
    pub(crate) fn from_canonical(entries: Vec<(Simplex, f64)>) -> Self {
        let n = entries.len();
        let mut simplices = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        let mut index_of = HashMap::with_capacity(n);
        let mut by_dim: Vec<Vec<usize>> = Vec::new();
        let mut local = Vec::with_capacity(n);
        for (g, (s, v)) in entries.into_iter().enumerate() {
            let d = s.dim();
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            local.push(by_dim[d].len());
            by_dim[d].push(g);
            index_of.insert(s.clone(), g);
            simplices.push(s);
            values.push(v);
        }
        let faces = simplices
            .iter()
            .map(|s| s.faces().map(|f| index_of[&f]).collect())
            .collect();
        let dim_counts = by_dim.iter().map(Vec::len).collect();
        FilteredComplex {
            store: Arc::new(Store {
                lineage: NEXT_LINEAGE.fetch_add(1, AtomicOrdering::Relaxed),
                simplices,
                values,
                faces,
                local,
                by_dim,
                index_of,
            }),
            len: n,
            dim_counts,
        }
    }

    /// Complex with a single constant value on every simplex of `facets` and
    /// all of their faces.
    pub fn from_facets(facets: &[Vec<usize>], value: f64) -> Result<Self> {
        let mut all = HashSet::new();
        for f in facets {
            let s = Simplex::new(f.clone())?;
            let k = s.0.len();
            for mask in 1u32..(1 << k) {
                let face: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s.0[i]).collect();
                all.insert(face);
            }
        }
        Self::build(all.into_iter().map(|v| (v, value)).collect())
    }

    pub fn empty() -> Self {
        Self::from_canonical(Vec::new())
    }

    /// Identifier shared by a complex and all of its sublevels.
    pub fn lineage(&self) -> u64 {
        self.store.lineage
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn simplex(&self, g: usize) -> &Simplex {
        assert!(g < self.len);
        &self.store.simplices[g]
    }

    pub fn value(&self, g: usize) -> f64 {
        assert!(g < self.len);
        self.store.values[g]
    }

    pub fn dim_of(&self, g: usize) -> usize {
        self.simplex(g).dim()
    }

    /// Global indices of the codimension-one faces of simplex `g`.
    pub fn faces_of(&self, g: usize) -> &[usize] {
        assert!(g < self.len);
        &self.store.faces[g]
    }

    /// Position of simplex `g` among the simplices of its dimension.
    pub fn local_index(&self, g: usize) -> usize {
        assert!(g < self.len);
        self.store.local[g]
    }

    /// Global index of the `local`-th simplex of dimension `p`.
    pub fn global_index(&self, p: usize, local: usize) -> usize {
        assert!(local < self.count(p));
        self.store.by_dim[p][local]
    }

    /// Global indices of the `p`-simplices, in canonical order.
    pub fn simplices_of_dim(&self, p: usize) -> &[usize] {
        match self.store.by_dim.get(p) {
            Some(v) => &v[..self.count(p)],
            None => &[],
        }
    }

    /// Number of `p`-simplices.
    pub fn count(&self, p: usize) -> usize {
        self.dim_counts.get(p).copied().unwrap_or(0)
    }

    pub fn top_dim(&self) -> Option<usize> {
        self.dim_counts.iter().rposition(|&c| c > 0)
    }

    /// Global index of the simplex with these (sorted) vertices.
    pub fn find(&self, vertices: &[usize]) -> Option<usize> {
        // Borrowing lookup would need a Borrow<[usize]> impl; the clone is cheap.
        let g = *self.store.index_of.get(&Simplex(vertices.to_vec()))?;
        (g < self.len).then_some(g)
    }

    /// Local index of the `p`-simplex with these vertices.
    pub fn find_local(&self, vertices: &[usize]) -> Option<usize> {
        self.find(vertices).map(|g| self.store.local[g])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, f64)> + '_ {
        (0..self.len).map(|g| (&self.store.simplices[g], self.store.values[g]))
    }

    /// Distinct filtration values, ascending. These index the sublevels.
    pub fn distinct_values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &v in &self.store.values[..self.len] {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        out
    }

    /// The sublevel complex at the `i`-th distinct filtration value.
    pub fn sublevel(&self, i: usize) -> Result<FilteredComplex> {
        let values = self.distinct_values();
        let t = *values.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: values.len(),
        })?;
        Ok(self.sublevel_at(t))
    }

    /// All simplices with value `<= t`. Below the minimum this is empty.
    pub fn sublevel_at(&self, t: f64) -> FilteredComplex {
        let len = self.store.values[..self.len].partition_point(|&v| v <= t);
        let mut dim_counts: Vec<usize> = (0..self.dim_counts.len()).map(|p| self.prefix_count(p, t)).collect();
        while dim_counts.last() == Some(&0) {
            dim_counts.pop();
        }
        FilteredComplex {
            store: Arc::clone(&self.store),
            len,
            dim_counts,
        }
    }

    /// Number of `p`-simplices with value `<= t`.
    pub fn prefix_count(&self, p: usize, t: f64) -> usize {
        let ids = self.simplices_of_dim(p);
        ids.partition_point(|&g| self.store.values[g] <= t)
    }

    /// For each `p`-simplex, the local indices of its `(p-1)`-faces.
    pub fn face_lists(&self, p: usize) -> Vec<Vec<usize>> {
        self.simplices_of_dim(p)
            .iter()
            .map(|&g| self.store.faces[g].iter().map(|&f| self.store.local[f]).collect())
            .collect()
    }

    /// For each `p`-simplex, the local indices of its `(p+1)`-cofaces, ascending.
    pub fn coface_lists(&self, p: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count(p)];
        for (s, faces) in self.face_lists(p + 1).into_iter().enumerate() {
            for f in faces {
                out[f].push(s);
            }
        }
        out
    }

    /// Matrix of `δ: C^p -> C^{p+1}`: one column per `p`-simplex, one row per
    /// `(p+1)`-simplex.
    pub fn coboundary_matrix(&self, p: usize) -> F2Matrix {
        let rows = self.count(p + 1);
        let columns = self
            .coface_lists(p)
            .into_iter()
            .map(|cof| F2Vector::from_indices(rows, cof))
            .collect();
        F2Matrix::from_columns(rows, columns).expect("coface indices fit")
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dim_counts
            .iter()
            .enumerate()
            .map(|(p, &c)| if p % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Serializes in the `value v0 v1 ... vk` text format, canonical order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, v) in self.iter() {
            let _ = write!(out, "{v}");
            for x in s.vertices() {
                let _ = write!(out, " {x}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `value v0 v1 ... vk` text format (`#` starts a comment).
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            let mut tokens = line.split_whitespace();
            let value: f64 = tokens
                .next()
                .unwrap()
                .parse()
                .map_err(|e| perr(format!("bad value: {e}")))?;
            let vertices = tokens
                .map(|t| t.parse::<usize>().map_err(|e| perr(format!("bad vertex {t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if vertices.is_empty() {
                return Err(perr("simplex has no vertices".into()));
            }
            entries.push((vertices, value));
        }
        Self::build(entries)
    }
}

/// An F2-valued cochain on the `degree`-simplices of a complex, indexed in
/// canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    lineage: u64,
    values: F2Vector,
}

impl Cochain {
    pub fn zero(host: &FilteredComplex, degree: usize) -> Self {
        Cochain {
            degree,
            lineage: host.lineage(),
            values: F2Vector::zeros(host.count(degree)),
        }
    }

    /// Cochain taking value 1 exactly on the listed local indices.
    pub fn from_support(host: &FilteredComplex, degree: usize, support: &[usize]) -> Result<Self> {
        let n = host.count(degree);
        if let Some(&bad) = support.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        Ok(Cochain {
            degree,
            lineage: host.lineage(),
            values: F2Vector::from_indices(n, support.iter().copied()),
        })
    }

    pub fn from_vector(host: &FilteredComplex, degree: usize, values: F2Vector) -> Result<Self> {
        if values.len() != host.count(degree) {
            return Err(Error::DimensionMismatch {
                expected: host.count(degree),
                found: values.len(),
            });
        }
        Ok(Cochain {
            degree,
            lineage: host.lineage(),
            values,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &F2Vector {
        &self.values
    }

    pub fn into_values(self) -> F2Vector {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_zero()
    }

    /// Value on the `local`-th simplex of this degree.
    pub fn at(&self, local: usize) -> bool {
        self.values.get(local)
    }

    /// Whether this cochain lives on exactly `host`.
    pub fn lives_on(&self, host: &FilteredComplex) -> bool {
        self.lineage == host.lineage() && self.values.len() == host.count(self.degree)
    }

    pub fn check_host(&self, host: &FilteredComplex) -> Result<()> {
        if self.lives_on(host) {
            Ok(())
        } else {
            Err(Error::HostMismatch)
        }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "cannot add cochains of degree {} and {}",
                self.degree, other.degree
            )));
        }
        if self.lineage != other.lineage || self.values.len() != other.values.len() {
            return Err(Error::HostMismatch);
        }
        let mut values = self.values.clone();
        values.xor_assign(&other.values);
        Ok(Cochain { values, ..*self })
    }

    /// `δc`, a cochain of degree `degree + 1` on `host`.
    pub fn coboundary(&self, host: &FilteredComplex) -> Result<Cochain> {
        self.check_host(host)?;
        let faces = host.face_lists(self.degree + 1);
        let values = F2Vector::from_bools(
            &faces
                .iter()
                .map(|fs| fs.iter().filter(|&&f| self.values.get(f)).count() % 2 == 1)
                .collect::<Vec<_>>(),
        );
        Ok(Cochain {
            degree: self.degree + 1,
            lineage: self.lineage,
            values,
        })
    }

    pub fn is_cocycle(&self, host: &FilteredComplex) -> Result<bool> {
        Ok(self.coboundary(host)?.is_zero())
    }
}

/// Pulls a cochain back along the inclusion of a sublevel complex.
pub fn restrict_cochain(c: &Cochain, target: &FilteredComplex) -> Result<Cochain> {
    let n = target.count(c.degree);
    if c.lineage != target.lineage() || n > c.values.len() {
        return Err(Error::HostMismatch);
    }
    Ok(Cochain {
        degree: c.degree,
        lineage: c.lineage,
        values: c.values.truncated(n),
    })
}

/// The six-vertex triangulation of the real projective plane, obtained by
/// identifying antipodal faces of the regular icosahedron. All values are 0.
pub fn rp2_complex() -> FilteredComplex {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = Vec::with_capacity(12);
    for &a in &[1.0, -1.0] {
        for &b in &[phi, -phi] {
            verts.push([0.0, a, b]);
            verts.push([a, b, 0.0]);
            verts.push([b, 0.0, a]);
        }
    }
    let dist2 = |p: &[f64; 3], q: &[f64; 3]| (0..3).map(|i| (p[i] - q[i]).powi(2)).sum::<f64>();
    // class[i] = antipodal orbit id, numbered by first appearance
    let mut class = vec![usize::MAX; 12];
    let mut next = 0;
    for i in 0..12 {
        if class[i] != usize::MAX {
            continue;
        }
        let anti = (0..12)
            .find(|&j| (0..3).all(|k| (verts[j][k] + verts[i][k]).abs() < 1e-12))
            .expect("icosahedron is centrally symmetric");
        class[i] = next;
        class[anti] = next;
        next += 1;
    }
    let mut facets = HashSet::new();
    for a in 0..12 {
        for b in a + 1..12 {
            for c in b + 1..12 {
                let edge = |x: usize, y: usize| (dist2(&verts[x], &verts[y]) - 4.0).abs() < 1e-9;
                if edge(a, b) && edge(a, c) && edge(b, c) {
                    let mut f = vec![class[a], class[b], class[c]];
                    f.sort_unstable();
                    facets.insert(f);
                }
            }
        }
    }
    let mut facets: Vec<Vec<usize>> = facets.into_iter().collect();
    facets.sort();
    let k = FilteredComplex::from_facets(&facets, 0.0).expect("hemi-icosahedron is a valid complex");
    debug_assert_eq!((k.count(0), k.count(1), k.count(2)), (6, 15, 10));
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2linalg::rank;

    fn hollow_triangle() -> FilteredComplex {
        FilteredComplex::build(vec![
            (vec![0], 0.0),
            (vec![1], 0.0),
            (vec![2], 0.0),
            (vec![0, 1], 1.0),
            (vec![0, 2], 1.0),
            (vec![1, 2], 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn build_examples() {
        let k = FilteredComplex::build(vec![(vec![0], 0.0), (vec![1], 0.0), (vec![0, 1], 1.0)]).unwrap();
        assert_eq!(k.len(), 3);
        assert_eq!(k.top_dim(), Some(1));

        assert!(matches!(
            FilteredComplex::build(vec![(vec![0, 1], 1.0)]),
            Err(Error::MissingFace { .. })
        ));

        let full = FilteredComplex::from_facets(&[vec![0, 1, 2]], 0.0).unwrap();
        assert_eq!(full.len(), 7);
        assert_eq!(full.euler_characteristic(), 1);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            FilteredComplex::build(vec![(vec![0], 2.0), (vec![1], 0.0), (vec![0, 1], 1.0)]),
            Err(Error::NonMonotone { .. })
        ));
        assert!(matches!(
            FilteredComplex::build(vec![(vec![0], 0.0), (vec![0], 1.0)]),
            Err(Error::DuplicateSimplex(_))
        ));
        assert!(matches!(
            FilteredComplex::build(vec![(vec![3, 3], 0.0)]),
            Err(Error::InvalidSimplex(_))
        ));
        assert!(matches!(
            FilteredComplex::build(vec![(vec![0], f64::NAN)]),
            Err(Error::NonFiniteValue { .. })
        ));
    }

    #[test]
    fn canonical_order_ties() {
        let k = FilteredComplex::build(vec![
            (vec![1, 2], 1.0),
            (vec![2], 0.0),
            (vec![0, 1], 1.0),
            (vec![1], 0.0),
            (vec![0], 0.0),
        ])
        .unwrap();
        let order: Vec<Vec<usize>> = k.iter().map(|(s, _)| s.vertices().to_vec()).collect();
        assert_eq!(order, vec![vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn coboundary_examples() {
        let t = hollow_triangle();
        let d0 = t.coboundary_matrix(0);
        assert_eq!((d0.rows(), d0.cols()), (3, 3));
        assert_eq!(rank(&d0), 2);
        assert_eq!(t.coboundary_matrix(1).rows(), 0);
        assert_eq!(t.coboundary_matrix(5).rows(), 0);

        let full = FilteredComplex::from_facets(&[vec![0, 1, 2]], 0.0).unwrap();
        let d1 = full.coboundary_matrix(1);
        assert_eq!((d1.rows(), d1.cols()), (1, 3));
        assert!((0..3).all(|c| d1.get(0, c)));
    }

    #[test]
    fn sublevel_examples() {
        let t = hollow_triangle();
        let last = t.distinct_values().len() - 1;
        assert_eq!(t.sublevel(last).unwrap(), t);
        let s0 = t.sublevel(0).unwrap();
        assert_eq!((s0.count(0), s0.count(1)), (3, 0));
        assert!(t.sublevel_at(-1.0).is_empty());
        assert!(matches!(t.sublevel(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn restriction_examples() {
        let t = hollow_triangle();
        let c = Cochain::from_support(&t, 1, &[0, 2]).unwrap();
        assert_eq!(restrict_cochain(&c, &t).unwrap(), c);
        let s0 = t.sublevel(0).unwrap();
        let r = restrict_cochain(&c, &s0).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.values().len(), 0);
        let other = hollow_triangle();
        assert!(matches!(restrict_cochain(&c, &other), Err(Error::HostMismatch)));
    }

    #[test]
    fn rp2_is_a_closed_surface() {
        let k = rp2_complex();
        assert_eq!((k.count(0), k.count(1), k.count(2)), (6, 15, 10));
        assert_eq!(k.euler_characteristic(), 1);
        assert!(k.coface_lists(1).iter().all(|c| c.len() == 2));
        // a 6-vertex triangulation needs every pair of vertices to span an edge
        assert_eq!(k.count(1), 6 * 5 / 2);
    }

    #[test]
    fn text_round_trip() {
        let k = rp2_complex();
        let back = FilteredComplex::parse_text(&k.to_text()).unwrap();
        assert_eq!(back, k);
        let parsed = FilteredComplex::parse_text("# comment\n0 5\n0 7 # vertex\n\n1.5 7 5\n").unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed.simplex(2).vertices(), &[5, 7]);
        assert!(matches!(
            FilteredComplex::parse_text("0 1\nx 2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
