//! Bottleneck distance between barcodes, an exhaustive oracle for it, and the
//! Gromov–Hausdorff lower bounds and stability checks built on top.
//!
//! A partial matching between bar multisets `A` and `B` costs the largest of
//! `max(|a - a'|, |b - b'|)` over matched pairs and `(b - a) / 2` over
//! unmatched bars. Infinite bars can only be matched to infinite bars.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{persistent_barcode, round_significant, Barcode};
use crate::error::{Error, Result};
use crate::metric::{vr_filtration, FiniteMetricSpace};
use crate::synth;
use crate::thetamod::{image_barcode, Operation};

/// Largest barcode (per side, after expanding multiplicities) the oracle accepts.
pub const ORACLE_LIMIT: usize = 7;

/// An optimal partial matching, by positions in the expanded bar lists
/// `Barcode::expanded(degree)` of each side.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
}

fn pair_cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    let deaths = match (a.1.is_infinite(), b.1.is_infinite()) {
        (true, true) => 0.0,
        (false, false) => (a.1 - b.1).abs(),
        _ => f64::INFINITY,
    };
    (a.0 - b.0).abs().max(deaths)
}

fn diagonal_cost(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Bottleneck distance between the degree-`degree` parts of `a` and `b`.
pub fn bottleneck(a: &Barcode, b: &Barcode, degree: usize) -> f64 {
    bottleneck_matching(a, b, degree).0
}

/// Bottleneck distance together with a matching that attains it. If the
/// numbers of infinite bars differ the distance is infinite and the matching
/// pairs nothing.
pub fn bottleneck_matching(a: &Barcode, b: &Barcode, degree: usize) -> (f64, Matching) {
    let xs = a.expanded(degree);
    let ys = b.expanded(degree);
    let split = |v: &[(f64, f64)]| -> (Vec<usize>, Vec<usize>) {
        (0..v.len()).partition(|&i| v[i].1.is_finite())
    };
    let (fin_a, mut inf_a) = split(&xs);
    let (fin_b, mut inf_b) = split(&ys);
    if inf_a.len() != inf_b.len() {
        return (
            f64::INFINITY,
            Matching {
                unmatched_a: (0..xs.len()).collect(),
                unmatched_b: (0..ys.len()).collect(),
                ..Matching::default()
            },
        );
    }
    // Infinite bars: matching sorted births is optimal for the max of |a - a'|.
    inf_a.sort_by(|&i, &j| xs[i].0.total_cmp(&xs[j].0));
    inf_b.sort_by(|&i, &j| ys[i].0.total_cmp(&ys[j].0));
    let mut matching = Matching::default();
    let mut cost: f64 = 0.0;
    for (&i, &j) in inf_a.iter().zip(&inf_b) {
        cost = cost.max((xs[i].0 - ys[j].0).abs());
        matching.pairs.push((i, j));
    }

    let pa: Vec<(f64, f64)> = fin_a.iter().map(|&i| xs[i]).collect();
    let pb: Vec<(f64, f64)> = fin_b.iter().map(|&j| ys[j]).collect();
    let (c, sub) = finite_bottleneck(&pa, &pb);
    cost = cost.max(c);
    matching.pairs.extend(sub.pairs.iter().map(|&(i, j)| (fin_a[i], fin_b[j])));
    matching.unmatched_a.extend(sub.unmatched_a.iter().map(|&i| fin_a[i]));
    matching.unmatched_b.extend(sub.unmatched_b.iter().map(|&j| fin_b[j]));
    matching.pairs.sort_unstable();
    (cost, matching)
}

/// Threshold graph on `A ∪ diag(B)` versus `B ∪ diag(A)`: left `i < n` is
/// `A_i`, left `n + j` is the diagonal copy of `B_j`; right `j < m` is `B_j`,
/// right `m + i` the diagonal copy of `A_i`.
fn threshold_graph(a: &[(f64, f64)], b: &[(f64, f64)], c: f64) -> Vec<Vec<usize>> {
    let (n, m) = (a.len(), b.len());
    let mut adj = vec![Vec::new(); n + m];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            if pair_cost(x, y) <= c {
                adj[i].push(j);
            }
        }
        if diagonal_cost(x) <= c {
            adj[i].push(m + i);
        }
    }
    for (j, &y) in b.iter().enumerate() {
        if diagonal_cost(y) <= c {
            adj[n + j].push(j);
        }
        adj[n + j].extend(m..m + n);
    }
    adj
}

/// Maximum bipartite matching by augmenting paths; returns `match_of_right`.
fn max_matching(adj: &[Vec<usize>], right: usize) -> (usize, Vec<usize>) {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if owner[v] == usize::MAX || augment(owner[v], adj, seen, owner) {
                    owner[v] = u;
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![usize::MAX; right];
    let mut size = 0;
    let mut seen = vec![false; right];
    for u in 0..adj.len() {
        seen.iter_mut().for_each(|s| *s = false);
        if augment(u, adj, &mut seen, &mut owner) {
            size += 1;
        }
    }
    (size, owner)
}

fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> (f64, Matching) {
    let (n, m) = (a.len(), b.len());
    if n + m == 0 {
        return (0.0, Matching::default());
    }
    let mut candidates: Vec<f64> = a.iter().chain(b).map(|&x| diagonal_cost(x)).collect();
    for &x in a {
        for &y in b {
            candidates.push(pair_cost(x, y));
        }
    }
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |c: f64| {
        let adj = threshold_graph(a, b, c);
        let (size, owner) = max_matching(&adj, n + m);
        (size == n + m, owner)
    };
    // Everything to the diagonal is always possible at the largest candidate.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    assert!(feasible(candidates[hi]).0, "largest candidate cost must be feasible");
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]).0 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let cost = candidates[lo];
    let (ok, owner) = feasible(cost);
    debug_assert!(ok);
    debug_assert!(lo == 0 || !feasible(candidates[lo - 1]).0);
    let mut matching = Matching::default();
    let mut a_used = vec![false; n];
    for (j, &u) in owner[..m].iter().enumerate() {
        if u < n {
            matching.pairs.push((u, j));
            a_used[u] = true;
        } else {
            matching.unmatched_b.push(j);
        }
    }
    matching.unmatched_a = (0..n).filter(|&i| !a_used[i]).collect();
    (cost, matching)
}

/// Exact bottleneck distance by enumerating every partial matching. Only for
/// at most [`ORACLE_LIMIT`] bars per side.
pub fn bottleneck_oracle(a: &Barcode, b: &Barcode, degree: usize) -> Result<f64> {
    let xs = a.expanded(degree);
    let ys = b.expanded(degree);
    if xs.len() > ORACLE_LIMIT || ys.len() > ORACLE_LIMIT {
        return Err(Error::TooLarge(format!(
            "oracle handles at most {ORACLE_LIMIT} bars per side, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    fn go(i: usize, xs: &[(f64, f64)], ys: &[(f64, f64)], used: &mut [bool], so_far: f64, best: &mut f64) {
        // Strict comparison so that an all-infinite instance still reaches a leaf.
        if so_far > *best {
            return;
        }
        if i == xs.len() {
            let total = ys
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&y, _)| diagonal_cost(y))
                .fold(so_far, f64::max);
            *best = best.min(total);
            return;
        }
        go(i + 1, xs, ys, used, so_far.max(diagonal_cost(xs[i])), best);
        for j in 0..ys.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, xs, ys, used, so_far.max(pair_cost(xs[i], ys[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; ys.len()];
    go(0, &xs, &ys, &mut used, 0.0, &mut best);
    Ok(best)
}

/// Which invariants to compare and the Vietoris–Rips caps.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSpec {
    /// Homology degrees `m` compared through their ordinary barcodes.
    pub degrees: Vec<usize>,
    /// Operations compared through their `img θ` barcodes.
    pub ops: Vec<Operation>,
    pub max_dim: usize,
    pub max_scale: f64,
}

impl InvariantSpec {
    fn check_caps(&self) -> Result<()> {
        let needed = self
            .degrees
            .iter()
            .copied()
            .chain(self.ops.iter().map(|op| op.target_degree()))
            .max()
            .map_or(0, |d| d + 1);
        if self.max_dim < needed {
            return Err(Error::InvalidOperation(format!(
                "degree {} needs simplices up to dimension {needed}, but max_dim is {}",
                needed - 1,
                self.max_dim
            )));
        }
        if !(self.max_scale >= 0.0) {
            return Err(Error::InvalidOperation(format!("max_scale {} must be >= 0", self.max_scale)));
        }
        Ok(())
    }

    /// The barcodes named as in reports: `H<m>` and `img<op>@deg<m>`.
    pub fn barcodes(&self, x: &FiniteMetricSpace) -> Result<Vec<(String, usize, Barcode)>> {
        self.check_caps()?;
        let k = vr_filtration(x, self.max_dim, self.max_scale);
        let top = self.degrees.iter().copied().max().unwrap_or(0);
        let ordinary = persistent_barcode(&k, top);
        let mut out: Vec<(String, usize, Barcode)> = self
            .degrees
            .iter()
            .map(|&m| (format!("H{m}"), m, ordinary.in_degree(m)))
            .collect();
        for &op in &self.ops {
            let m = op.target_degree();
            out.push((format!("img{}@deg{m}", op.label()), m, image_barcode(&k, op)?));
        }
        Ok(out)
    }
}

/// Bottleneck distance of one invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantDistance {
    pub invariant: String,
    pub d_b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GhReport {
    pub per_invariant: Vec<InvariantDistance>,
    /// `max d_B / 2`, a lower bound for `d_GH(X, Y)`.
    pub gh_lower_bound: f64,
    /// The invariant attaining the maximum (the first one on ties).
    pub argmax: Option<String>,
}

impl GhReport {
    pub fn get(&self, invariant: &str) -> Option<f64> {
        self.per_invariant.iter().find(|d| d.invariant == invariant).map(|d| d.d_b)
    }

    pub fn to_json(&self) -> GhReportJson {
        let num = |x: f64| x.is_finite().then(|| round_significant(x));
        GhReportJson {
            per_invariant: self
                .per_invariant
                .iter()
                .map(|d| InvariantJson {
                    invariant: d.invariant.clone(),
                    d_b: num(d.d_b),
                })
                .collect(),
            gh_lower_bound: num(self.gh_lower_bound),
            argmax: self.argmax.clone(),
        }
    }
}

/// Serialized report; infinite values are written as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhReportJson {
    pub per_invariant: Vec<InvariantJson>,
    pub gh_lower_bound: Option<f64>,
    pub argmax: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantJson {
    pub invariant: String,
    #[serde(rename = "d_B")]
    pub d_b: Option<f64>,
}

fn compare(a: &[(String, usize, Barcode)], b: &[(String, usize, Barcode)]) -> Vec<InvariantDistance> {
    a.iter()
        .zip(b)
        .map(|((name, m, x), (_, _, y))| InvariantDistance {
            invariant: name.clone(),
            d_b: bottleneck(x, y, *m),
        })
        .collect()
}

/// Lower bound for `d_GH(X, Y)` from the stability of every requested
/// invariant: each bottleneck distance is at most `2 d_GH`.
pub fn gh_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace, spec: &InvariantSpec) -> Result<GhReport> {
    let per_invariant = compare(&spec.barcodes(x)?, &spec.barcodes(y)?);
    let mut best: Option<&InvariantDistance> = None;
    for d in &per_invariant {
        if best.is_none_or(|b| d.d_b > b.d_b) {
            best = Some(d);
        }
    }
    Ok(GhReport {
        gh_lower_bound: best.map_or(0.0, |b| b.d_b / 2.0),
        argmax: best.map(|b| b.invariant.clone()),
        per_invariant: per_invariant.clone(),
    })
}

/// Adds independent uniform noise from `[-δ, δ]` to every off-diagonal pair,
/// resampling until the result is a metric.
pub fn perturb_metric(x: &FiniteMetricSpace, delta: f64, rng: &mut impl Rng, max_attempts: usize) -> Result<FiniteMetricSpace> {
    if delta == 0.0 {
        return Ok(x.clone());
    }
    let n = x.len();
    for _ in 0..max_attempts {
        let mut rows = x.to_rows();
        for i in 0..n {
            for j in i + 1..n {
                let v = rows[i][j] + rng.random_range(-delta..=delta);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        if let Ok(y) = FiniteMetricSpace::new(rows) {
            return Ok(y);
        }
    }
    Err(Error::PerturbationFailed(max_attempts))
}

/// One perturbation trial of [`stability_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityTrial {
    /// Bottleneck distance per invariant, in the order of `InvariantSpec::barcodes`.
    pub distances: Vec<InvariantDistance>,
    /// Sup-norm distance between the original and perturbed metrics.
    pub sup: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub delta: f64,
    pub trials: Vec<StabilityTrial>,
    /// Largest `d_B / δ` over all trials and invariants (0 when `δ = 0`).
    pub max_ratio: f64,
    pub passed: bool,
}

/// Perturbs `x` by at most `δ` in sup norm `trials` times and checks that every
/// invariant moves by at most `δ` in bottleneck distance.
pub fn stability_check(x: &FiniteMetricSpace, delta: f64, trials: usize, seed: u64, spec: &InvariantSpec) -> Result<StabilityReport> {
    let mut rng = synth::rng(seed);
    let base = spec.barcodes(x)?;
    let mut out = Vec::with_capacity(trials);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let y = perturb_metric(x, delta, &mut rng, 1000)?;
        let distances = compare(&base, &spec.barcodes(&y)?);
        let worst = distances.iter().map(|d| d.d_b).fold(0.0, f64::max);
        if delta > 0.0 {
            max_ratio = max_ratio.max(worst / delta);
        }
        out.push(StabilityTrial {
            sup: x.sup_distance(&y)?,
            passed: worst <= delta,
            distances,
        });
    }
    Ok(StabilityReport {
        delta,
        max_ratio,
        passed: out.iter().all(|t| t.passed),
        trials: out,
    })
}
