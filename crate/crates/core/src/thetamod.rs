//! Persistence modules `img θ` and `ker θ` for a cohomology operation
//! `θ: H^ℓ → H^m` applied across a filtration, their rank functions, and
//! barcodes by Möbius inversion.
//!
//! Two routes compute the same rank functions. The direct route
//! ([`theta_rank`], [`kernel_rank`]) recomputes static cohomology bases for
//! each index pair and is the reference. [`theta_module`] builds both tables at
//! once from persistent cocycle representatives: restrictions of the cocycles
//! alive at an index form a basis of `H^ℓ` there, so every structure map is a
//! coordinate projection and only `θ` itself needs linear algebra.
//!
//! Filtration indices are 0-based. Cohomology is contravariant, so the rank at
//! `(i, j)` with `i <= j` is the rank of the map from index `j` to index `i`.

use std::fmt;

use crate::cohomology::{coboundary_space, cohomology_basis, persistent_cocycles, Bar, Barcode};
use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::f2linalg::{self, Echelon, F2Matrix, F2Vector};
use crate::steenrod::{sq_plan, CupPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperationKind {
    Identity,
    Zero,
    Sq(usize),
}

/// A natural operation `H^ℓ → H^m` with `ℓ = source_degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Operation {
    pub kind: OperationKind,
    pub source_degree: usize,
}

impl Operation {
    pub fn identity(source_degree: usize) -> Self {
        Operation {
            kind: OperationKind::Identity,
            source_degree,
        }
    }

    pub fn zero(source_degree: usize) -> Self {
        Operation {
            kind: OperationKind::Zero,
            source_degree,
        }
    }

    pub fn sq(k: usize, source_degree: usize) -> Self {
        Operation {
            kind: OperationKind::Sq(k),
            source_degree,
        }
    }

    /// Parses `id`, `zero` or `sq:<k>`.
    pub fn parse(spec: &str, source_degree: usize) -> Result<Self> {
        let spec = spec.trim();
        let kind = match spec {
            "id" | "identity" => OperationKind::Identity,
            "zero" => OperationKind::Zero,
            _ => {
                let k = spec
                    .strip_prefix("sq:")
                    .or_else(|| spec.strip_prefix("Sq"))
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::InvalidOperation(format!("unknown operation '{spec}' (expected id, zero or sq:<k>)")))?;
                OperationKind::Sq(k)
            }
        };
        Ok(Operation { kind, source_degree })
    }

    pub fn target_degree(&self) -> usize {
        match self.kind {
            OperationKind::Sq(k) => self.source_degree + k,
            _ => self.source_degree,
        }
    }

    /// Short name used in JSON output: `id`, `zero`, `Sq1`, ...
    pub fn label(&self) -> String {
        match self.kind {
            OperationKind::Identity => "id".into(),
            OperationKind::Zero => "zero".into(),
            OperationKind::Sq(k) => format!("Sq{k}"),
        }
    }

    /// Dimensions whose simplices can change `H^ℓ`, `H^m` or the map between
    /// them.
    fn relevant_dims(&self) -> Vec<usize> {
        let l = self.source_degree;
        let m = self.target_degree();
        let mut dims: Vec<usize> = [l.checked_sub(1), Some(l), Some(l + 1), m.checked_sub(1), Some(m), Some(m + 1)]
            .into_iter()
            .flatten()
            .collect();
        dims.sort_unstable();
        dims.dedup();
        dims
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// `θ` at chain level on one host complex.
struct ChainMap {
    op: Operation,
    plan: Option<CupPlan>,
}

impl ChainMap {
    fn new(k: &FilteredComplex, op: Operation) -> Result<Self> {
        let plan = match op.kind {
            OperationKind::Sq(s) => sq_plan(k, s, op.source_degree)?,
            _ => None,
        };
        Ok(ChainMap { op, plan })
    }

    /// Image of a degree-`ℓ` cochain (values on all `ℓ`-simplices of the host)
    /// on the first `limit` target simplices.
    fn apply_prefix(&self, z: &F2Vector, limit: usize) -> F2Vector {
        match (self.op.kind, &self.plan) {
            (OperationKind::Identity, _) => z.truncated(limit),
            (OperationKind::Sq(_), Some(plan)) => plan.apply_prefix(z, z, limit),
            _ => F2Vector::zeros(limit),
        }
    }
}

/// Ranks `r(i, j)` for `0 <= i <= j < N` over an ascending list of values.
#[derive(Clone, Debug, PartialEq)]
pub struct RankFunction {
    values: Vec<f64>,
    ranks: Vec<u32>,
}

impl RankFunction {
    pub fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        RankFunction {
            values,
            ranks: vec![0; n * (n + 1) / 2],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let n = self.values.len();
        assert!(i <= j && j < n, "rank index ({i}, {j}) out of range for {n} values");
        i * n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.ranks[self.slot(i, j)] as usize
    }

    pub fn set(&mut self, i: usize, j: usize, r: usize) {
        let s = self.slot(i, j);
        self.ranks[s] = r as u32;
    }

    /// `r` extended by zero outside `0 <= i <= j < N` (signed indices so that
    /// `i - 1` and `j + 1` can step off the ends).
    fn get_ext(&self, i: isize, j: isize) -> i64 {
        if i < 0 || j >= self.len() as isize || i > j {
            0
        } else {
            self.get(i as usize, j as usize) as i64
        }
    }

    /// The rank with both indices mirrored, `i ↦ N - 1 - i`. Values are kept.
    pub fn mirrored(&self) -> RankFunction {
        let n = self.len();
        let mut out = RankFunction::new(self.values.clone());
        for i in 0..n {
            for j in i..n {
                out.set(i, j, self.get(n - 1 - j, n - 1 - i));
            }
        }
        out
    }

    /// Checks `r(i, j) <= r(i', j')` whenever `[i, j]` contains `[i', j']`.
    pub fn check_monotone(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in i..n {
                let r = self.get(i, j);
                if (j + 1 < n && self.get(i, j + 1) > r) || (i > 0 && self.get(i - 1, j) > r) {
                    return Err(Error::Invariant(format!("rank function not monotone at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }
}

/// Interval multiplicities of a module with rank function `r`, as
/// `(first index, last index, multiplicity)`.
fn mobius(r: &RankFunction) -> Result<Vec<(usize, usize, usize)>> {
    let n = r.len() as isize;
    let mut out = Vec::new();
    for b in 0..n {
        for e in b..n {
            let mu = r.get_ext(b, e) - r.get_ext(b - 1, e) - r.get_ext(b, e + 1) + r.get_ext(b - 1, e + 1);
            if mu < 0 {
                return Err(Error::Invariant(format!(
                    "negative interval multiplicity {mu} at indices [{b}, {e}]"
                )));
            }
            if mu > 0 {
                out.push((b as usize, e as usize, mu as usize));
            }
        }
    }
    Ok(out)
}

/// Barcode of the module with rank function `r`. An interval of indices
/// `[b, e]` becomes the bar `(t_b, t_{e+1})`, infinite when `e` is last.
///
/// With `reversed` the indices are mirrored before inversion and the
/// intervals mirrored back, which is the natural reading for contravariant
/// (cohomology) modules.
pub fn rank_to_barcode(r: &RankFunction, reversed: bool, degree: usize) -> Result<Barcode> {
    let n = r.len();
    let intervals = if reversed {
        mobius(&r.mirrored())?
            .into_iter()
            .map(|(b, e, mu)| (n - 1 - e, n - 1 - b, mu))
            .collect()
    } else {
        mobius(r)?
    };
    let values = r.values();
    let mut bars = Barcode::new();
    for (b, e, mult) in intervals {
        let death = if e + 1 == n { f64::INFINITY } else { values[e + 1] };
        bars.push(Bar {
            degree,
            birth: values[b],
            death,
            mult,
        })?;
    }
    Ok(bars)
}

/// Rank functions of `img θ` (in degree `m`) and `ker θ` (in degree `ℓ`) on
/// the grid of filtration values where they can change.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaModule {
    pub op: Operation,
    pub image: RankFunction,
    pub kernel: RankFunction,
    /// `dim H^ℓ` at each grid index.
    pub source_dims: Vec<usize>,
}

impl ThetaModule {
    pub fn image_barcode(&self) -> Result<Barcode> {
        rank_to_barcode(&self.image, true, self.op.target_degree())
    }

    pub fn kernel_barcode(&self) -> Result<Barcode> {
        rank_to_barcode(&self.kernel, true, self.op.source_degree)
    }
}

/// Filtration values at which simplices of the dimensions relevant to `op`
/// appear. Between consecutive grid values every module involved is constant.
pub fn theta_grid(k: &FilteredComplex, op: Operation) -> Vec<f64> {
    let mut values: Vec<f64> = op
        .relevant_dims()
        .into_iter()
        .flat_map(|p| k.simplices_of_dim(p).iter().map(|&g| k.value(g)))
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

/// Echelon basis of full-length vectors whose truncations to any prefix span
/// the truncated space, since a vector with pivot beyond the prefix vanishes
/// there.
struct PrefixEchelon {
    pivot_of: Vec<usize>,
    vectors: Vec<F2Vector>,
}

impl PrefixEchelon {
    fn new(dim: usize) -> Self {
        PrefixEchelon {
            pivot_of: vec![usize::MAX; dim],
            vectors: Vec::new(),
        }
    }

    fn insert(&mut self, mut v: F2Vector) {
        let mut from = 0;
        while let Some(p) = v.lowest_set_bit_from(from) {
            match self.pivot_of[p] {
                usize::MAX => {
                    self.pivot_of[p] = self.vectors.len();
                    self.vectors.push(v);
                    return;
                }
                k => v.xor_assign(&self.vectors[k]),
            }
            from = p + 1;
        }
    }

    /// The unique representative of `w + span` (truncated to `w.len()`) with
    /// no bit at a pivot. Linear in `w`.
    fn canonical(&self, mut w: F2Vector) -> F2Vector {
        let mut from = 0;
        while let Some(p) = w.lowest_set_bit_from(from) {
            if let Some(v) = self.vectors.get(self.pivot_of[p]) {
                w.xor_prefix_of(v);
            }
            from = p + 1;
        }
        w
    }
}

/// Both rank functions of `op` on `K` from persistent cocycle representatives.
pub fn theta_module(k: &FilteredComplex, op: Operation) -> Result<ThetaModule> {
    let l = op.source_degree;
    let m = op.target_degree();
    let grid = theta_grid(k, op);
    let n = grid.len();
    let index_of = |t: f64| grid.partition_point(|&g| g < t);

    let classes: Vec<_> = persistent_cocycles(k, l)
        .into_iter()
        .filter(|c| c.death.is_none_or(|d| k.value(d) > k.value(c.birth)))
        .collect();
    let births: Vec<usize> = classes.iter().map(|c| index_of(k.value(c.birth))).collect();
    let deaths: Vec<usize> = classes.iter().map(|c| c.death.map_or(n, |d| index_of(k.value(d)))).collect();
    let chain = ChainMap::new(k, op)?;
    let images: Vec<F2Vector> = classes.iter().map(|c| chain.apply_prefix(&c.cochain, k.count(m))).collect();

    let cofaces = if m > 0 { k.coface_lists(m - 1) } else { Vec::new() };
    let mut boundaries = PrefixEchelon::new(k.count(m));
    let mut added = 0;

    let mut image = RankFunction::new(grid.clone());
    let mut kernel = RankFunction::new(grid.clone());
    let mut source_dims = Vec::with_capacity(n);

    for (g, &t) in grid.iter().enumerate() {
        if m > 0 {
            let upto = k.prefix_count(m - 1, t);
            for cof in &cofaces[added..upto] {
                boundaries.insert(F2Vector::from_indices(k.count(m), cof.iter().copied()));
            }
            added = upto;
        }
        let len = k.prefix_count(m, t);
        let alive: Vec<usize> = (0..classes.len()).filter(|&c| births[c] <= g && g < deaths[c]).collect();
        source_dims.push(alive.len());
        let residuals: Vec<F2Vector> = alive
            .iter()
            .map(|&c| boundaries.canonical(images[c].truncated(len)))
            .collect();

        // Image: classes alive on [g, h] restrict to independent classes at g.
        let mut by_death: Vec<usize> = (0..alive.len()).collect();
        by_death.sort_by_key(|&a| std::cmp::Reverse(deaths[alive[a]]));
        let mut span = Echelon::new(len);
        let mut next = 0;
        for h in (g..n).rev() {
            while next < by_death.len() && deaths[alive[by_death[next]]] > h {
                span.insert(residuals[by_death[next]].clone())?;
                next += 1;
            }
            image.set(g, h, span.rank());
        }

        // Kernel at g, then its restriction to every earlier index: a class
        // alive at g restricts to zero at g' unless born by g', and those
        // classes form a prefix in birth order.
        let mut tracked = Echelon::with_tracking(len, alive.len());
        let mut relations = Echelon::new(alive.len());
        for (a, w) in residuals.into_iter().enumerate() {
            if let Some(combo) = tracked.insert_tracked(w, F2Vector::unit(alive.len(), a))? {
                relations.insert(combo)?;
            }
        }
        let mut pivots: Vec<usize> = relations
            .vectors()
            .iter()
            .map(|v| v.lowest_set_bit().expect("echelon vectors are nonzero"))
            .collect();
        pivots.sort_unstable();
        for g0 in 0..=g {
            let born = alive.partition_point(|&c| births[c] <= g0);
            kernel.set(g0, g, pivots.partition_point(|&p| p < born));
        }
    }
    Ok(ThetaModule {
        op,
        image,
        kernel,
        source_dims,
    })
}

/// Barcode of `img θ`, in the target degree.
pub fn image_barcode(k: &FilteredComplex, op: Operation) -> Result<Barcode> {
    theta_module(k, op)?.image_barcode()
}

/// Barcode of `ker θ`, in the source degree.
pub fn kernel_barcode(k: &FilteredComplex, op: Operation) -> Result<Barcode> {
    theta_module(k, op)?.kernel_barcode()
}

fn check_order(i: usize, j: usize) -> Result<()> {
    if i > j {
        return Err(Error::InvalidOperation(format!("index order violated: {i} > {j}")));
    }
    Ok(())
}

fn theta_rank_between(ki: &FilteredComplex, kj: &FilteredComplex, op: Operation) -> Result<usize> {
    let m = op.target_degree();
    let basis = cohomology_basis(kj, op.source_degree);
    let chain = ChainMap::new(kj, op)?;
    let rows = ki.count(m);
    let columns = basis
        .cocycles
        .iter()
        .map(|z| chain.apply_prefix(z.values(), kj.count(m)).truncated(rows))
        .collect();
    f2linalg::quotient_rank(&F2Matrix::from_columns(rows, columns)?, &coboundary_space(ki, m))
}

fn kernel_rank_between(ki: &FilteredComplex, kj: &FilteredComplex, op: Operation) -> Result<usize> {
    let l = op.source_degree;
    let m = op.target_degree();
    let basis = cohomology_basis(kj, l);
    let chain = ChainMap::new(kj, op)?;
    let r = basis.len();
    let images = basis
        .cocycles
        .iter()
        .map(|z| chain.apply_prefix(z.values(), kj.count(m)))
        .collect();
    let stacked = F2Matrix::from_columns(kj.count(m), images)?.hstack(&coboundary_space(kj, m))?;
    let rows = ki.count(l);
    let mut classes = Vec::new();
    for relation in f2linalg::kernel(&stacked).columns() {
        let mut z = F2Vector::zeros(kj.count(l));
        for a in relation.ones().take_while(|&a| a < r) {
            z.xor_assign(basis.cocycles[a].values());
        }
        classes.push(z.truncated(rows));
    }
    f2linalg::quotient_rank(&F2Matrix::from_columns(rows, classes)?, &coboundary_space(ki, l))
}

/// Rank of `H^ℓ(K_j) → H^m(K_i)`, i.e. of the structure map of `img θ`,
/// from static cohomology bases. Indices refer to `K.distinct_values()`.
pub fn theta_rank(k: &FilteredComplex, op: Operation, i: usize, j: usize) -> Result<usize> {
    check_order(i, j)?;
    theta_rank_between(&k.sublevel(i)?, &k.sublevel(j)?, op)
}

/// Rank of the restriction `ker θ_j → ker θ_i ⊆ H^ℓ(K_i)`, from static
/// cohomology bases. Indices refer to `K.distinct_values()`.
pub fn kernel_rank(k: &FilteredComplex, op: Operation, i: usize, j: usize) -> Result<usize> {
    check_order(i, j)?;
    kernel_rank_between(&k.sublevel(i)?, &k.sublevel(j)?, op)
}

/// Both rank functions on the grid of [`theta_module`], by the direct route.
pub fn theta_module_direct(k: &FilteredComplex, op: Operation) -> Result<ThetaModule> {
    let grid = theta_grid(k, op);
    let levels: Vec<FilteredComplex> = grid.iter().map(|&t| k.sublevel_at(t)).collect();
    let mut image = RankFunction::new(grid.clone());
    let mut kernel = RankFunction::new(grid.clone());
    let mut source_dims = Vec::with_capacity(grid.len());
    for (j, kj) in levels.iter().enumerate() {
        source_dims.push(cohomology_basis(kj, op.source_degree).len());
        for (i, ki) in levels[..=j].iter().enumerate() {
            image.set(i, j, theta_rank_between(ki, kj, op)?);
            kernel.set(i, j, kernel_rank_between(ki, kj, op)?);
        }
    }
    Ok(ThetaModule {
        op,
        image,
        kernel,
        source_dims,
    })
}

/// How a critical radius is read off a barcode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusRule {
    /// Smallest death among bars born by `birth_tolerance` and longer than
    /// `min_length`. With a zero tolerance this is the textbook extractor
    /// `min{r | (0, r) in barc}`.
    FirstBorn { birth_tolerance: f64, min_length: f64 },
    /// Death of the longest finite bar. On sparse samples nothing is born at
    /// scale zero, and the first-born rule picks up short noise bars.
    Dominant,
}

fn radius_of<'a>(bars: impl Iterator<Item = &'a Bar>, rule: RadiusRule) -> f64 {
    let finite = bars.filter(|bar| bar.death.is_finite());
    match rule {
        RadiusRule::FirstBorn { birth_tolerance, min_length } => finite
            .filter(|bar| bar.birth <= birth_tolerance && bar.length() > min_length)
            .map(|bar| bar.death)
            .min_by(f64::total_cmp),
        RadiusRule::Dominant => finite
            .max_by(|a, b| a.length().total_cmp(&b.length()).then(b.birth.total_cmp(&a.birth)))
            .map(|bar| bar.death),
    }
    .unwrap_or(0.0)
}

/// Critical radius of the degree-`degree` bars of `b`; 0 when no bar qualifies.
pub fn homological_radius(b: &Barcode, degree: usize, rule: RadiusRule) -> f64 {
    radius_of(b.bars().iter().filter(|bar| bar.degree == degree), rule)
}

/// The same extractor applied to an `img θ` barcode (all of whose bars share
/// the target degree).
pub fn theta_radius(b: &Barcode, rule: RadiusRule) -> f64 {
    radius_of(b.bars().iter(), rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{betti_number, persistent_barcode};
    use crate::complex::rp2_complex;
    use crate::metric::{circle_grid, vr_filtration};
    use crate::synth;
    use std::f64::consts::PI;

    fn interval_rank(values: Vec<f64>, intervals: &[(usize, usize)]) -> RankFunction {
        let n = values.len();
        let mut r = RankFunction::new(values);
        for i in 0..n {
            for j in i..n {
                r.set(i, j, intervals.iter().filter(|&&(b, e)| b <= i && j <= e).count());
            }
        }
        r
    }

    #[test]
    fn parse_and_label() {
        let op = Operation::parse("sq:1", 1).unwrap();
        assert_eq!(op, Operation::sq(1, 1));
        assert_eq!(op.target_degree(), 2);
        assert_eq!(op.label(), "Sq1");
        assert_eq!(Operation::parse("id", 2).unwrap().label(), "id");
        assert_eq!(Operation::parse("zero", 0).unwrap().target_degree(), 0);
        assert!(matches!(Operation::parse("sq:x", 1), Err(Error::InvalidOperation(_))));
        assert_eq!(Operation::sq(2, 1).relevant_dims(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn single_index_rank() {
        let mut r = RankFunction::new(vec![0.5]);
        r.set(0, 0, 3);
        let b = rank_to_barcode(&r, true, 1).unwrap();
        assert_eq!(b.bars(), &[Bar { mult: 3, ..Bar::new(1, 0.5, f64::INFINITY) }]);
    }

    #[test]
    fn interval_module() {
        let r = interval_rank(vec![1.0, 2.0], &[(0, 0)]);
        let b = rank_to_barcode(&r, true, 0).unwrap();
        assert_eq!(b.bars(), &[Bar::new(0, 1.0, 2.0)]);
    }

    #[test]
    fn negative_multiplicity_is_an_error() {
        let mut r = RankFunction::new(vec![0.0, 1.0]);
        r.set(0, 1, 1);
        assert!(r.check_monotone().is_err());
        assert!(matches!(rank_to_barcode(&r, false, 0), Err(Error::Invariant(_))));
    }

    #[test]
    fn rp2_constant_filtration() {
        let k = rp2_complex();
        let op = Operation::sq(1, 1);
        assert_eq!(theta_rank(&k, op, 0, 0).unwrap(), 1);
        assert_eq!(kernel_rank(&k, op, 0, 0).unwrap(), 0);
        assert_eq!(kernel_rank(&k, Operation::zero(1), 0, 0).unwrap(), 1);
        assert_eq!(theta_rank(&k, Operation::zero(1), 0, 0).unwrap(), 0);
        assert_eq!(kernel_rank(&k, Operation::identity(1), 0, 0).unwrap(), 0);
        let img = image_barcode(&k, op).unwrap();
        assert_eq!(img.bars(), &[Bar::new(2, 0.0, f64::INFINITY)]);
        assert!(kernel_barcode(&k, op).unwrap().is_empty());
        assert!(matches!(theta_rank(&k, op, 1, 0), Err(Error::InvalidOperation(_))));
    }

    #[test]
    fn identity_reproduces_circle_barcode() {
        let x = circle_grid(12, 1.0).unwrap();
        let k = vr_filtration(&x, 2, 2.5);
        let img = image_barcode(&k, Operation::identity(1)).unwrap();
        assert_eq!(img, persistent_barcode(&k, 1).in_degree(1));
        assert_eq!(img.total(), 1);
        let bar = img.bars()[0];
        assert!((bar.birth - PI / 6.0).abs() < 1e-12);
        assert!((homological_radius(&img, 1, RadiusRule::FirstBorn { birth_tolerance: PI / 6.0 + 1e-9, min_length: 0.0 }) - bar.death).abs() < 1e-12);
    }

    #[test]
    fn radius_extractors() {
        let first = |birth_tolerance, min_length| RadiusRule::FirstBorn { birth_tolerance, min_length };
        assert_eq!(homological_radius(&Barcode::new(), 1, first(0.1, 0.0)), 0.0);
        assert_eq!(theta_radius(&Barcode::new(), RadiusRule::Dominant), 0.0);
        let b = Barcode::from_bars([
            Bar::new(1, 0.0, 0.05),
            Bar::new(1, 0.01, 2.0),
            Bar::new(1, 0.5, 1.0),
            Bar::new(1, 0.0, f64::INFINITY),
            Bar::new(2, 0.0, 9.0),
        ])
        .unwrap();
        assert_eq!(homological_radius(&b, 1, first(0.1, 0.0)), 0.05);
        assert_eq!(homological_radius(&b, 1, first(0.1, 0.1)), 2.0);
        assert_eq!(homological_radius(&b, 1, first(-1.0, 0.0)), 0.0);
        assert_eq!(homological_radius(&b, 1, RadiusRule::Dominant), 2.0);
        assert_eq!(homological_radius(&b, 2, RadiusRule::Dominant), 9.0);
        assert_eq!(theta_radius(&b, first(0.6, 0.1)), 1.0);
        // Equal lengths: the earlier bar wins.
        let tie = Barcode::from_bars([Bar::new(1, 1.0, 2.0), Bar::new(1, 0.5, 1.5)]).unwrap();
        assert_eq!(theta_radius(&tie, RadiusRule::Dominant), 1.5);
    }

    fn random_complex(seed: u64) -> FilteredComplex {
        let mut r = synth::rng(seed);
        if seed % 3 == 0 {
            synth::random_values(&mut r, &rp2_complex(), 5)
        } else {
            synth::random_filtration(&mut r, 6, 30, 3)
        }
    }

    fn ops() -> Vec<Operation> {
        vec![
            Operation::identity(0),
            Operation::identity(1),
            Operation::zero(1),
            Operation::sq(0, 1),
            Operation::sq(1, 0),
            Operation::sq(1, 1),
            Operation::sq(2, 1),
            Operation::sq(1, 2),
        ]
    }

    #[test]
    fn random_complexes_exercise_sq1() {
        let op = Operation::sq(1, 1);
        let (mut images, mut kernels) = (0, 0);
        for seed in 0..60 {
            let m = theta_module(&random_complex(seed), op).unwrap();
            images += usize::from(!m.image_barcode().unwrap().is_empty());
            kernels += usize::from(!m.kernel_barcode().unwrap().is_empty());
        }
        assert!(images >= 5 && kernels >= 5, "{images} {kernels}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]

            #[test]
            fn mobius_recovers_interval_sums(n in 1usize..6, raw in prop::collection::vec((0usize..6, 0usize..6), 0..5), reversed: bool) {
                let intervals: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a.min(b) % n, a.max(b) % n)).filter(|(a, b)| a <= b).collect();
                let values: Vec<f64> = (0..n).map(|i| i as f64).collect();
                let r = interval_rank(values, &intervals);
                r.check_monotone().unwrap();
                let b = rank_to_barcode(&r, reversed, 0).unwrap();
                let mut expected = Barcode::new();
                for &(s, e) in &intervals {
                    let death = if e + 1 == n { f64::INFINITY } else { (e + 1) as f64 };
                    expected.push(Bar::new(0, s as f64, death)).unwrap();
                }
                prop_assert_eq!(b, expected);
            }

            #[test]
            fn fast_route_matches_direct(seed in 0u64..1000) {
                let k = random_complex(seed);
                for op in ops() {
                    let fast = theta_module(&k, op).unwrap();
                    let direct = theta_module_direct(&k, op).unwrap();
                    prop_assert_eq!(&fast, &direct, "operation {}", op);
                    fast.image.check_monotone().unwrap();
                    fast.kernel.check_monotone().unwrap();
                }
            }

            #[test]
            fn identity_and_rank_nullity(seed in 0u64..1000) {
                let k = random_complex(seed);
                for l in 0..3 {
                    let m = theta_module(&k, Operation::identity(l)).unwrap();
                    prop_assert_eq!(m.image_barcode().unwrap(), persistent_barcode(&k, l).in_degree(l));
                    prop_assert!(m.kernel_barcode().unwrap().is_empty());
                }
                for op in ops() {
                    let m = theta_module(&k, op).unwrap();
                    for (g, &t) in m.image.values().iter().enumerate() {
                        let dim = betti_number(&k.sublevel_at(t), op.source_degree);
                        prop_assert_eq!(m.source_dims[g], dim);
                        prop_assert_eq!(m.image.get(g, g) + m.kernel.get(g, g), dim);
                    }
                }
            }

            #[test]
            fn indices_follow_distinct_values(seed in 0u64..1000) {
                let k = random_complex(seed);
                let op = Operation::sq(1, 1);
                let m = theta_module(&k, op).unwrap();
                let values = k.distinct_values();
                let grid_index = |t: f64| m.image.values().partition_point(|&g| g <= t).checked_sub(1);
                for j in 0..values.len() {
                    for i in 0..=j {
                        let expect = match (grid_index(values[i]), grid_index(values[j])) {
                            (Some(a), Some(b)) => (m.image.get(a, b), m.kernel.get(a, b)),
                            _ => (0, 0),
                        };
                        prop_assert_eq!((theta_rank(&k, op, i, j).unwrap(), kernel_rank(&k, op, i, j).unwrap()), expect);
                    }
                }
            }
        }
    }
}
