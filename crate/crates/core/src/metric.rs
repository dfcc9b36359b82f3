//! Finite metric spaces, the constructions used to build test spaces
//! (gluing wedge, ℓ∞ product, quotient by an isometric action, round-sphere
//! samples) and Vietoris-Rips expansion.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::complex::{FilteredComplex, Simplex};
use crate::error::{Error, Result};

/// Tolerance for symmetry, zero diagonal and the triangle inequality.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Tolerance for points of a CSV cloud to lie on the declared sphere.
pub const SPHERE_TOLERANCE: f64 = 1e-6;

/// A finite metric space stored as a dense symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates an `n x n` matrix given row by row.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            d.extend(row);
        }
        Self::from_flat(n, d)
    }

    /// Validates a row-major `n x n` matrix.
    pub fn from_flat(n: usize, mut d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::InvalidMetric(format!(
                "expected {} entries, found {}",
                n * n,
                d.len()
            )));
        }
        let at = |d: &[f64], i: usize, j: usize| d[i * n + j];
        for i in 0..n {
            if at(&d, i, i).abs() > METRIC_TOLERANCE || !at(&d, i, i).is_finite() {
                return Err(Error::InvalidMetric(format!("d({i},{i}) = {} is not zero", at(&d, i, i))));
            }
            d[i * n + i] = 0.0;
            for j in i + 1..n {
                let (a, b) = (at(&d, i, j), at(&d, j, i));
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) is not finite")));
                }
                if (a - b).abs() > METRIC_TOLERANCE {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) = {a} but d({j},{i}) = {b}")));
                }
                if a <= 0.0 {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) = {a} is not positive")));
                }
                d[j * n + i] = a;
            }
        }
        let space = FiniteMetricSpace { n, d };
        space.check_triangle_inequality()?;
        Ok(space)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d[i * n + j] = f(i, j);
                }
            }
        }
        Self::from_flat(n, d)
    }

    fn check_triangle_inequality(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                let dij = self.dist(i, j);
                for k in 0..n {
                    if k != i && k != j && dij > self.dist(i, k) + self.dist(k, j) + METRIC_TOLERANCE {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: d({i},{j}) = {dij} > d({i},{k}) + d({k},{j}) = {}",
                            self.dist(i, k) + self.dist(k, j)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Every distance multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidMetric(format!("scale factor {factor} must be positive")));
        }
        Ok(FiniteMetricSpace {
            n: self.n,
            d: self.d.iter().map(|x| x * factor).collect(),
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Largest absolute entrywise difference between two spaces of equal size.
    pub fn sup_distance(&self, other: &FiniteMetricSpace) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self
            .d
            .iter()
            .zip(&other.d)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Distance-matrix file: `N` on the first line, then `N` rows.
    pub fn to_dmat(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.dist(i, j))).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn parse_dmat(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .enumerate()
            .flat_map(|(l, line)| line.split_whitespace().map(move |t| (l + 1, t)));
        let (line, first) = tokens.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty distance-matrix file".into(),
        })?;
        let n: usize = first.parse().map_err(|e| Error::Parse {
            line,
            msg: format!("bad point count {first:?}: {e}"),
        })?;
        let mut d = Vec::with_capacity(n * n);
        for (line, t) in tokens {
            d.push(t.parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("bad distance {t:?}: {e}"),
            })?);
        }
        if d.len() != n * n {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {} distances, found {}", n * n, d.len()),
            });
        }
        Self::from_flat(n, d)
    }

    /// Metric on a point cloud.
    pub fn from_points(points: &[Vec<f64>], metric: PointMetric) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != points[0].len()) {
            return Err(Error::DimensionMismatch {
                expected: points[0].len(),
                found: p.len(),
            });
        }
        match metric {
            PointMetric::Euclidean => Self::from_fn(points.len(), |i, j| {
                points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }),
            PointMetric::Sphere { radius } => {
                for (i, p) in points.iter().enumerate() {
                    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if (norm - radius).abs() > SPHERE_TOLERANCE {
                        return Err(Error::InvalidMetric(format!(
                            "point {i} has norm {norm}, not on the sphere of radius {radius}"
                        )));
                    }
                }
                let unit: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|x| x / radius).collect()).collect();
                geodesic_metric(&unit, radius)
            }
        }
    }
}

/// Metric used to turn a point cloud into a distance matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointMetric {
    Euclidean,
    /// Great-circle distance on the sphere of the given radius.
    Sphere { radius: f64 },
}

impl std::str::FromStr for PointMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "euclidean" {
            return Ok(PointMetric::Euclidean);
        }
        if let Some(r) = s.strip_prefix("sphere:") {
            let radius: f64 = r
                .parse()
                .map_err(|_| Error::InvalidMetric(format!("bad sphere radius {r:?}")))?;
            if radius > 0.0 {
                return Ok(PointMetric::Sphere { radius });
            }
        }
        Err(Error::InvalidMetric(format!(
            "unknown point metric {s:?} (expected euclidean or sphere:<radius>)"
        )))
    }
}

/// Parses a CSV point cloud, one point per row. A non-numeric first row is
/// treated as a header.
pub fn parse_points_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match parsed {
            Ok(p) => points.push(p),
            Err(_) if points.is_empty() && lineno == 0 => continue,
            Err(e) => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad coordinate: {e}"),
                })
            }
        }
    }
    Ok(points)
}

/// Great-circle metric of unit vectors, scaled by `radius`.
pub fn geodesic_metric(unit_points: &[Vec<f64>], radius: f64) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_fn(unit_points.len(), |i, j| {
        let (p, q) = (&unit_points[i], &unit_points[j]);
        let diff = p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let sum = p.iter().zip(q).map(|(a, b)| (a + b).powi(2)).sum::<f64>().sqrt();
        radius * 2.0 * diff.atan2(sum)
    })
}

/// Vietoris-Rips filtration: every simplex of dimension `<= max_dim` whose
/// diameter is `<= max_scale`, valued by its diameter (vertices at 0).
///
/// Expansion walks lower neighbourhoods: a simplex grows only by vertices
/// smaller than all of its current vertices that are adjacent to each of them.
pub fn vr_filtration(x: &FiniteMetricSpace, max_dim: usize, max_scale: f64) -> FilteredComplex {
    let n = x.len();
    let lower: Vec<Vec<usize>> = (0..n)
        .map(|u| (0..u).filter(|&v| x.dist(u, v) <= max_scale).collect())
        .collect();

    fn expand(
        x: &FiniteMetricSpace,
        lower: &[Vec<usize>],
        max_dim: usize,
        tau: &mut Vec<usize>,
        value: f64,
        candidates: &[usize],
        out: &mut Vec<(Simplex, f64)>,
    ) {
        let mut sorted = tau.clone();
        sorted.reverse();
        out.push((Simplex::from_sorted(sorted), value));
        if tau.len() > max_dim {
            return;
        }
        for &v in candidates {
            let diam = tau.iter().fold(value, |acc, &w| acc.max(x.dist(v, w)));
            let next: Vec<usize> = intersect_sorted(candidates, &lower[v]);
            tau.push(v);
            expand(x, lower, max_dim, tau, diam, &next, out);
            tau.pop();
        }
    }

    let mut out = Vec::new();
    for u in 0..n {
        let mut tau = vec![u];
        expand(x, &lower, max_dim, &mut tau, 0.0, &lower[u], &mut out);
    }
    out.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.dim().cmp(&b.0.dim()))
            .then_with(|| a.0.cmp(&b.0))
    });
    FilteredComplex::from_canonical(out)
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Wedge sum with the gluing metric: cross distances route through the two
/// base points, which are identified.
///
/// Points of `x` keep their indices; points of `y` other than `y0` follow in
/// order. [`wedge_index_of_y`] gives the new index of a point of `y`.
pub fn gluing_wedge(x: &FiniteMetricSpace, x0: usize, y: &FiniteMetricSpace, y0: usize) -> Result<FiniteMetricSpace> {
    if x0 >= x.len() {
        return Err(Error::IndexOutOfRange { index: x0, len: x.len() });
    }
    if y0 >= y.len() {
        return Err(Error::IndexOutOfRange { index: y0, len: y.len() });
    }
    let nx = x.len();
    let n = nx + y.len() - 1;
    // origin[k] = (true, i) for a point of x, (false, j) for a point of y
    let mut origin: Vec<(bool, usize)> = (0..nx).map(|i| (true, i)).collect();
    origin.extend((0..y.len()).filter(|&j| j != y0).map(|j| (false, j)));
    FiniteMetricSpace::from_fn(n, |a, b| match (origin[a], origin[b]) {
        ((true, i), (true, k)) => x.dist(i, k),
        ((false, j), (false, l)) => y.dist(j, l),
        ((true, i), (false, j)) | ((false, j), (true, i)) => x.dist(i, x0) + y.dist(j, y0),
    })
}

/// Index in `gluing_wedge(x, x0, y, y0)` of point `j` of `y`.
pub fn wedge_index_of_y(x_len: usize, x0: usize, y0: usize, j: usize) -> usize {
    match j.cmp(&y0) {
        std::cmp::Ordering::Equal => x0,
        std::cmp::Ordering::Less => x_len + j,
        std::cmp::Ordering::Greater => x_len + j - 1,
    }
}

/// Product with the ℓ∞ (max) metric. Point `(i, j)` has index `i * |y| + j`.
pub fn linf_product(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> FiniteMetricSpace {
    let ny = y.len();
    FiniteMetricSpace::from_fn(x.len() * ny, |a, b| {
        x.dist(a / ny, b / ny).max(y.dist(a % ny, b % ny))
    })
    .expect("max of two metrics is a metric")
}

/// A finite group acting on point indices, given by generating permutations.
#[derive(Clone, Debug)]
pub struct GroupAction {
    n: usize,
    generators: Vec<Vec<usize>>,
}

impl GroupAction {
    pub fn new(n: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        for (g, perm) in generators.iter().enumerate() {
            let distinct: HashSet<usize> = perm.iter().copied().collect();
            if perm.len() != n || distinct.len() != n || perm.iter().any(|&p| p >= n) {
                return Err(Error::InvalidAction(format!("generator {g} is not a permutation of 0..{n}")));
            }
        }
        Ok(GroupAction { n, generators })
    }

    pub fn trivial(n: usize) -> Self {
        GroupAction {
            n,
            generators: Vec::new(),
        }
    }

    /// The swap `i <-> i + n/2`, matching the layout of antipodally closed samples.
    pub fn antipodal(n: usize) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::InvalidAction(format!("antipodal action needs an even point count, got {n}")));
        }
        let h = n / 2;
        Self::new(n, vec![(0..n).map(|i| (i + h) % n).collect()])
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    /// All group elements (closure of the generators), identity first.
    pub fn elements(&self) -> Vec<Vec<usize>> {
        let id: Vec<usize> = (0..self.n).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &self.generators {
                let h: Vec<usize> = g.iter().map(|&i| s[i]).collect();
                if seen.insert(h.clone()) {
                    out.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        out
    }

    /// Orbits, each sorted, ordered by smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let elements = self.elements();
        let mut assigned = vec![false; self.n];
        let mut out = Vec::new();
        for i in 0..self.n {
            if assigned[i] {
                continue;
            }
            let mut orbit: Vec<usize> = elements.iter().map(|g| g[i]).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &j in &orbit {
                assigned[j] = true;
            }
            out.push(orbit);
        }
        out
    }

    /// Checks that every generator preserves distances within tolerance.
    pub fn check_isometric(&self, x: &FiniteMetricSpace) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        for (k, s) in self.generators.iter().enumerate() {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    if (x.dist(s[i], s[j]) - x.dist(i, j)).abs() > METRIC_TOLERANCE {
                        return Err(Error::NotAnIsometry(k));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Quotient metric `d([x],[x']) = min_g d(x, g x')`, one point per orbit in
/// the order of [`GroupAction::orbits`].
pub fn quotient_metric(x: &FiniteMetricSpace, action: &GroupAction) -> Result<FiniteMetricSpace> {
    action.check_isometric(x)?;
    let orbits = action.orbits();
    let elements = action.elements();
    let reps: Vec<usize> = orbits.iter().map(|o| o[0]).collect();
    FiniteMetricSpace::from_fn(reps.len(), |a, b| {
        elements
            .iter()
            .map(|g| x.dist(reps[a], g[reps[b]]))
            .fold(f64::INFINITY, f64::min)
    })
    .map_err(|e| Error::Invariant(format!("quotient of an isometric action is not a metric: {e}")))
}

/// `count` unit vectors drawn uniformly from `S^dim ⊂ R^{dim+1}` by normalizing
/// Gaussian samples; with `antipodal_closure` the negatives follow, so point
/// `i + count` is the antipode of point `i`.
pub fn sphere_points(dim: usize, count: usize, seed: u64, antipodal_closure: bool) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(if antipodal_closure { 2 * count } else { count });
    while points.len() < count {
        let v: Vec<f64> = (0..=dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            points.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    if antipodal_closure {
        close_antipodally(&mut points);
    }
    points
}

/// Deterministic, nearly uniform points on `S^2`: a Fibonacci spiral. With
/// `antipodal_closure` the spiral covers the upper hemisphere and the
/// negatives follow, as in [`sphere_points`].
pub fn sphere_grid_points(count: usize, antipodal_closure: bool) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut points: Vec<Vec<f64>> = (0..count)
        .map(|k| {
            let t = (k as f64 + 0.5) / count as f64;
            let z = if antipodal_closure { 1.0 - t } else { 1.0 - 2.0 * t };
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect();
    if antipodal_closure {
        close_antipodally(&mut points);
    }
    points
}

fn close_antipodally(points: &mut Vec<Vec<f64>>) {
    let negatives: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|x| -x).collect()).collect();
    points.extend(negatives);
}

/// Random sample of the round sphere `S^dim` of the given radius with its
/// geodesic metric. Deterministic for a fixed seed.
pub fn sphere_sample(
    dim: usize,
    radius: f64,
    count: usize,
    seed: u64,
    antipodal_closure: bool,
) -> Result<FiniteMetricSpace> {
    if dim < 1 || count < 2 || !(radius > 0.0) {
        return Err(Error::InvalidMetric(format!(
            "sphere sample needs dim >= 1, count >= 2 and radius > 0 (got {dim}, {count}, {radius})"
        )));
    }
    geodesic_metric(&sphere_points(dim, count, seed, antipodal_closure), radius)
}

/// `count` equally spaced points on the circle of the given radius.
///
/// Distances come from the index gap, not from coordinates, so equal gaps
/// give bit-identical distances. Point `i + count/2` is antipodal to `i` when
/// `count` is even.
pub fn circle_grid(count: usize, radius: f64) -> Result<FiniteMetricSpace> {
    if count < 2 || !(radius > 0.0) {
        return Err(Error::InvalidMetric(format!(
            "circle grid needs count >= 2 and radius > 0 (got {count}, {radius})"
        )));
    }
    let step = 2.0 * PI / count as f64;
    FiniteMetricSpace::from_fn(count, |i, j| {
        let gap = i.abs_diff(j);
        let gap = gap.min(count - gap);
        radius * gap as f64 * step
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn two_point(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::new(vec![vec![0.0, d], vec![d, 0.0]]).unwrap()
    }

    fn random_planar(n: usize, seed: u64) -> FiniteMetricSpace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
        FiniteMetricSpace::from_points(&pts, PointMetric::Euclidean).unwrap()
    }

    /// Every subset of at most `max_dim + 1` points with diameter within the cap.
    fn vr_brute_force(x: &FiniteMetricSpace, max_dim: usize, max_scale: f64) -> Vec<(Vec<usize>, f64)> {
        let n = x.len();
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let v: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if v.len() > max_dim + 1 {
                continue;
            }
            let mut diam = 0.0f64;
            for a in 0..v.len() {
                for b in a + 1..v.len() {
                    diam = diam.max(x.dist(v[a], v[b]));
                }
            }
            if diam <= max_scale {
                out.push((v, diam));
            }
        }
        out
    }

    #[test]
    fn validation_rejects_non_metrics() {
        assert!(FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::new(vec![vec![1.0]]).is_err());
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(matches!(FiniteMetricSpace::new(bad), Err(Error::InvalidMetric(_))));
        assert!(FiniteMetricSpace::new(vec![]).unwrap().is_empty());
    }

    #[test]
    fn vr_examples() {
        let tri = FiniteMetricSpace::from_fn(3, |_, _| 1.0).unwrap();
        let k = vr_filtration(&tri, 2, 2.0);
        assert_eq!(k.len(), 7);
        let g = k.find(&[0, 1, 2]).unwrap();
        assert_eq!(k.value(g), 1.0);

        let vertices_only = vr_filtration(&tri, 2, 0.5);
        assert_eq!(vertices_only.len(), 3);
        assert_eq!(vertices_only.top_dim(), Some(0));
    }

    #[test]
    fn wedge_examples() {
        let w = gluing_wedge(&two_point(1.0), 0, &two_point(1.0), 0).unwrap();
        assert_eq!(w.len(), 3);
        let mut ds = vec![w.dist(0, 1), w.dist(0, 2), w.dist(1, 2)];
        ds.sort_by(f64::total_cmp);
        assert_eq!(ds, vec![1.0, 1.0, 2.0]);

        let x = random_planar(5, 3);
        let point = FiniteMetricSpace::new(vec![vec![0.0]]).unwrap();
        assert_eq!(gluing_wedge(&x, 2, &point, 0).unwrap(), x);
        assert!(gluing_wedge(&x, 9, &point, 0).is_err());
        assert_eq!(wedge_index_of_y(5, 2, 0, 0), 2);
        assert_eq!(wedge_index_of_y(5, 2, 1, 0), 5);
        assert_eq!(wedge_index_of_y(5, 2, 1, 3), 7);
    }

    #[test]
    fn product_examples() {
        let p = linf_product(&two_point(1.0), &two_point(2.0));
        assert_eq!(p.len(), 4);
        let ds: Vec<f64> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(a, b)| p.dist(a, b))
            .collect();
        assert_eq!(ds, vec![2.0, 1.0, 2.0, 2.0, 1.0, 2.0]);

        let y = random_planar(4, 1);
        let point = FiniteMetricSpace::new(vec![vec![0.0]]).unwrap();
        assert_eq!(linf_product(&point, &y), y);
    }

    #[test]
    fn quotient_examples() {
        let x = random_planar(6, 5);
        assert_eq!(quotient_metric(&x, &GroupAction::trivial(6)).unwrap(), x);

        // 6 points on the circle of radius 2 modulo the antipodal swap are
        // 3 equally spaced points on the circle of radius 1
        let big = circle_grid(6, 2.0).unwrap();
        let q = quotient_metric(&big, &GroupAction::antipodal(6).unwrap()).unwrap();
        assert_eq!(q, circle_grid(3, 1.0).unwrap());
        assert!((q.dist(0, 1) - 2.0 * PI / 3.0).abs() < 1e-12);

        let s2 = sphere_sample(2, 2.0, 20, 11, true).unwrap();
        let rp2 = quotient_metric(&s2, &GroupAction::antipodal(40).unwrap()).unwrap();
        assert_eq!(rp2.len(), 20);
        assert!(rp2.diameter() <= PI + 1e-12);

        let not_iso = GroupAction::new(6, vec![vec![1, 0, 2, 3, 4, 5]]).unwrap();
        assert!(matches!(quotient_metric(&x, &not_iso), Err(Error::NotAnIsometry(0))));
    }

    #[test]
    fn sphere_examples() {
        let s = sphere_sample(2, 1.5, 10, 2, true).unwrap();
        for i in 0..10 {
            assert_eq!(s.dist(i, i + 10), PI * 1.5);
        }
        let c = circle_grid(40, 1.0).unwrap();
        assert!((c.dist(0, 1) - PI / 20.0).abs() < 1e-15);
        assert_eq!(c.dist(3, 4), c.dist(39, 0));
        assert!(sphere_sample(0, 1.0, 5, 0, false).is_err());
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sphere_sample(2, 2.0, 15, 42, true).unwrap();
        let b = sphere_sample(2, 2.0, 15, 42, true).unwrap();
        assert_eq!(a.to_rows(), b.to_rows());
        assert_ne!(a, sphere_sample(2, 2.0, 15, 43, true).unwrap());
    }

    #[test]
    fn grid_points_are_antipodally_closed() {
        let pts = sphere_grid_points(12, true);
        let m = geodesic_metric(&pts, 2.0).unwrap();
        GroupAction::antipodal(24).unwrap().check_isometric(&m).unwrap();
        assert!(pts[..12].iter().all(|p| p[2] > 0.0));
    }

    #[test]
    fn csv_and_dmat_io() {
        let pts = parse_points_csv("x,y\n0,0\n3,4\n").unwrap();
        let m = FiniteMetricSpace::from_points(&pts, PointMetric::Euclidean).unwrap();
        assert_eq!(m.dist(0, 1), 5.0);
        assert_eq!(FiniteMetricSpace::parse_dmat(&m.to_dmat()).unwrap(), m);

        let on_sphere = parse_points_csv("2,0\n0,2\n").unwrap();
        let s = FiniteMetricSpace::from_points(&on_sphere, "sphere:2".parse().unwrap()).unwrap();
        assert!((s.dist(0, 1) - PI).abs() < 1e-12);
        let off = parse_points_csv("2,0\n0,2.1\n").unwrap();
        assert!(FiniteMetricSpace::from_points(&off, PointMetric::Sphere { radius: 2.0 }).is_err());
        assert!("taxicab".parse::<PointMetric>().is_err());
        assert!(FiniteMetricSpace::parse_dmat("2\n0 1\n1").is_err());
    }

    proptest! {
        #[test]
        fn vr_matches_subset_enumeration(n in 1usize..9, seed in any::<u64>(), max_dim in 0usize..4, scale in 0.0f64..1.5) {
            let x = random_planar(n, seed);
            let k = vr_filtration(&x, max_dim, scale);
            let mut brute = vr_brute_force(&x, max_dim, scale);
            prop_assert_eq!(k.len(), brute.len());
            for (v, diam) in brute.drain(..) {
                let g = k.find(&v);
                prop_assert!(g.is_some());
                prop_assert_eq!(k.value(g.unwrap()), diam);
            }
            // passes full validation
            let rebuilt = FilteredComplex::build(k.iter().map(|(s, v)| (s.vertices().to_vec(), v)).collect()).unwrap();
            prop_assert_eq!(rebuilt, k);
        }

        #[test]
        fn vr_is_monotone_in_caps(n in 2usize..9, seed in any::<u64>(), s1 in 0.0f64..1.5, s2 in 0.0f64..1.5) {
            let x = random_planar(n, seed);
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            let small = vr_filtration(&x, 2, lo);
            let big = vr_filtration(&x, 3, hi);
            for (s, v) in small.iter() {
                let g = big.find(s.vertices());
                prop_assert!(g.is_some());
                prop_assert_eq!(big.value(g.unwrap()), v);
            }
        }

        #[test]
        fn constructions_are_metrics(a in 1usize..7, b in 1usize..7, seed in any::<u64>()) {
            let x = random_planar(a, seed);
            let y = random_planar(b, seed.wrapping_add(1));
            // from_fn validates the triangle inequality
            let w = gluing_wedge(&x, a - 1, &y, 0).unwrap();
            prop_assert_eq!(w.len(), a + b - 1);
            let p = linf_product(&x, &y);
            prop_assert_eq!(p.len(), a * b);
        }

        #[test]
        fn free_quotient_divides_point_count(k in 2usize..12, seed in any::<u64>()) {
            let s = sphere_sample(2, 2.0, k, seed, true).unwrap();
            let q = quotient_metric(&s, &GroupAction::antipodal(2 * k).unwrap()).unwrap();
            prop_assert_eq!(q.len(), k);
        }
    }
}
