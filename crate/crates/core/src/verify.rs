//! Property suites checking the structural theorems on seeded random inputs.
//! Each suite reports pass/fail per property with the first counterexample.

use rand::Rng;
use serde::Serialize;

use crate::cohomology::{betti_number, cohomology_basis, is_coboundary, persistent_barcode, Barcode};
use crate::complex::{rp2_complex, Cochain, FilteredComplex};
use crate::distances::{bottleneck, bottleneck_oracle, stability_check, InvariantSpec};
use crate::error::{Error, Result};
use crate::f2linalg::F2Vector;
use crate::metric::{circle_grid, gluing_wedge, linf_product, vr_filtration, FiniteMetricSpace};
use crate::steenrod::{cup_i, sq};
use crate::synth;
use crate::thetamod::{image_barcode, theta_module, Operation};

pub const SUITES: [&str; 7] = [
    "wedge",
    "product",
    "stability",
    "steenrod-axioms",
    "adem-sq1",
    "bottleneck-oracle",
    "identity-oracle",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    /// Number of instances checked.
    pub checked: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

/// Suite parameters; `trials` overrides each suite's default instance count.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: Option<usize>,
}

/// Accumulates one property: the first failure is kept as counterexample.
struct Check {
    name: String,
    checked: usize,
    counterexample: Option<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check {
            name: name.into(),
            checked: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            passed: self.counterexample.is_none(),
            name: self.name,
            checked: self.checked,
            counterexample: self.counterexample,
        }
    }
}

fn report(suite: &str, seed: u64, checks: Vec<Check>) -> SuiteReport {
    let properties: Vec<PropertyResult> = checks.into_iter().map(Check::finish).collect();
    SuiteReport {
        suite: suite.into(),
        seed,
        passed: properties.iter().all(|p| p.passed),
        properties,
    }
}

pub fn run_suite(name: &str, opts: SuiteOptions) -> Result<SuiteReport> {
    match name {
        "wedge" => wedge_suite(opts.seed, opts.trials.unwrap_or(20)),
        "product" => product_suite(opts.seed, opts.trials.unwrap_or(5)),
        "stability" => stability_suite(opts.seed, opts.trials.unwrap_or(50)),
        "steenrod-axioms" => steenrod_suite(opts.seed, opts.trials.unwrap_or(50)),
        "adem-sq1" => adem_suite(opts.seed, opts.trials.unwrap_or(20)),
        "bottleneck-oracle" => bottleneck_suite(opts.seed, opts.trials.unwrap_or(200)),
        "identity-oracle" => identity_suite(opts.seed, opts.trials.unwrap_or(50)),
        _ => Err(Error::InvalidOperation(format!(
            "unknown suite '{name}' (available: {})",
            SUITES.join(", ")
        ))),
    }
}

fn describe_metric(x: &FiniteMetricSpace) -> String {
    x.to_dmat()
}

/// Random factor for the wedge suite: points in the square or a `{1, 2}`
/// metric, alternating so that both generic values and ties occur.
fn wedge_factor(rng: &mut impl Rng, round: usize) -> FiniteMetricSpace {
    let n = rng.random_range(1..=8);
    if round % 2 == 0 {
        synth::random_metric(rng, n)
    } else {
        synth::random_discrete_metric(rng, n)
    }
}

/// VR barcodes of a wedge in degrees 0..=2 and its `img Sq¹` barcode equal the
/// unions of those of the factors (one essential component less).
pub fn wedge_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut rng = synth::rng(seed);
    let sq1 = Operation::sq(1, 1);
    let mut homology = Check::new("wedge: H0..H2 barcode is the union of the factor barcodes");
    let mut image = Check::new("wedge: imgSq1 barcode is the union of the factor barcodes");
    for round in 0..trials {
        let x = wedge_factor(&mut rng, round);
        let y = wedge_factor(&mut rng, round + 1);
        let x0 = rng.random_range(0..x.len());
        let y0 = rng.random_range(0..y.len());
        let w = gluing_wedge(&x, x0, &y, y0)?;
        let (kx, ky, kw) = (
            vr_filtration(&x, 3, f64::INFINITY),
            vr_filtration(&y, 3, f64::INFINITY),
            vr_filtration(&w, 3, f64::INFINITY),
        );
        let expected = persistent_barcode(&kx, 2).union(&persistent_barcode(&ky, 2).to_reduced());
        let got = persistent_barcode(&kw, 2);
        let dump = |a: &Barcode, b: &Barcode| {
            format!(
                "X (base {x0}):\n{}Y (base {y0}):\n{}expected {a:?}\ngot {b:?}",
                describe_metric(&x),
                describe_metric(&y)
            )
        };
        homology.record(got == expected, || dump(&expected, &got));
        let expected = image_barcode(&kx, sq1)?.union(&image_barcode(&ky, sq1)?);
        let got = image_barcode(&kw, sq1)?;
        image.record(got == expected, || dump(&expected, &got));
    }
    Ok(report("wedge", seed, vec![homology, image]))
}

/// Künneth at every filtration value for the VR complex of an ℓ∞ product.
fn kunneth_holds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> std::result::Result<(), String> {
    let kx = vr_filtration(x, 3, f64::INFINITY);
    let ky = vr_filtration(y, 3, f64::INFINITY);
    let kp = vr_filtration(&linf_product(x, y), 3, f64::INFINITY);
    let mut values = kp.distinct_values();
    values.extend(kx.distinct_values());
    values.extend(ky.distinct_values());
    values.sort_by(f64::total_cmp);
    values.dedup();
    for t in values {
        let (sx, sy, sp) = (kx.sublevel_at(t), ky.sublevel_at(t), kp.sublevel_at(t));
        for m in 0..=2 {
            let lhs = betti_number(&sp, m);
            let rhs: usize = (0..=m).map(|i| betti_number(&sx, i) * betti_number(&sy, m - i)).sum();
            if lhs != rhs {
                return Err(format!("at t = {t}, degree {m}: product {lhs}, Künneth sum {rhs}"));
            }
        }
    }
    Ok(())
}

/// The 4-point circle squared, then random pairs of small spaces.
pub fn product_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut rng = synth::rng(seed);
    let mut circle = Check::new("product: Künneth for the 4-point circle squared");
    let c4 = circle_grid(4, 1.0)?;
    let r = kunneth_holds(&c4, &c4);
    circle.record(r.is_ok(), || r.unwrap_err());
    let mut random = Check::new("product: Künneth for random pairs");
    for _ in 0..trials {
        let nx = rng.random_range(1..=4);
        let ny = rng.random_range(1..=4);
        let x = synth::random_metric(&mut rng, nx);
        let y = synth::random_discrete_metric(&mut rng, ny);
        let r = kunneth_holds(&x, &y);
        random.record(r.is_ok(), || format!("{}\nX:\n{}Y:\n{}", r.unwrap_err(), describe_metric(&x), describe_metric(&y)));
    }
    Ok(report("product", seed, vec![circle, random]))
}

/// Perturbations of sup norm `δ = 0.05` move `H1` and `img Sq¹` by at most `δ`.
pub fn stability_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let x = synth::random_bounded_metric(&mut synth::rng(seed), 12, 1.0, 2.0);
    let spec = InvariantSpec {
        degrees: vec![1],
        ops: vec![Operation::sq(1, 1)],
        max_dim: 3,
        max_scale: f64::INFINITY,
    };
    let r = stability_check(&x, 0.05, trials, seed, &spec)?;
    let mut check = Check::new("stability: d_B(H1) <= δ and d_B(imgSq1) <= δ");
    for t in &r.trials {
        check.record(t.passed, || format!("δ = {}, sup = {}, distances {:?}\n{}", r.delta, t.sup, t.distances, describe_metric(&x)));
    }
    Ok(report("stability", seed, vec![check]))
}

fn random_cochain(rng: &mut impl Rng, k: &FilteredComplex, degree: usize) -> Cochain {
    let bits: Vec<bool> = (0..k.count(degree)).map(|_| rng.random()).collect();
    Cochain::from_vector(k, degree, F2Vector::from_bools(&bits)).expect("length matches")
}

fn sum(k: &FilteredComplex, degree: usize, parts: &[Cochain]) -> Result<Cochain> {
    parts.iter().try_fold(Cochain::zero(k, degree), |acc, c| acc.add(c))
}

/// Random complexes of at most 25 simplices and dimension 3, with every fourth
/// one a randomly filtered subcomplex of the projective plane.
fn random_complex(rng: &mut impl Rng, round: usize) -> FilteredComplex {
    if round % 4 == 3 {
        let rp2 = rp2_complex();
        let keep: Vec<Vec<usize>> = rp2
            .simplices_of_dim(2)
            .iter()
            .filter(|_| rng.random_ratio(4, 5))
            .map(|&g| rp2.simplex(g).vertices().to_vec())
            .collect();
        FilteredComplex::from_facets(&keep, 0.0).expect("faces of the projective plane")
    } else {
        synth::random_filtration(rng, 6, 25, 3)
    }
}

/// The coboundary formula for cup-i products, and the Steenrod axioms on
/// classes.
pub fn steenrod_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut rng = synth::rng(seed);
    let mut formula = Check::new("cup-i coboundary formula for all legal (p, q, i)");
    let mut sq0 = Check::new("Sq^0 is the identity on classes");
    let mut vanish = Check::new("Sq^k vanishes above the degree");
    let mut top = Check::new("Sq^n is the cup square in degree n");
    let mut natural = Check::new("Sq^k is well defined and additive on classes");
    for round in 0..trials {
        let k = random_complex(&mut rng, round);
        let text = k.to_text();
        for p in 0..=3 {
            for q in 0..=3 {
                for i in 0..=p.min(q) {
                    let a = random_cochain(&mut rng, &k, p);
                    let b = random_cochain(&mut rng, &k, q);
                    let n = p + q - i + 1;
                    let lhs = cup_i(&a, &b, i, &k)?.coboundary(&k)?;
                    let mut parts = vec![cup_i(&a.coboundary(&k)?, &b, i, &k)?, cup_i(&a, &b.coboundary(&k)?, i, &k)?];
                    if i > 0 {
                        parts.push(cup_i(&a, &b, i - 1, &k)?);
                        parts.push(cup_i(&b, &a, i - 1, &k)?);
                    }
                    let rhs = sum(&k, n, &parts)?;
                    formula.record(lhs == rhs, || format!("p = {p}, q = {q}, i = {i} on\n{text}"));
                }
            }
        }
        for n in 0..=2 {
            let basis = cohomology_basis(&k, n);
            for (idx, a) in basis.cocycles.iter().enumerate() {
                let b = &basis.cocycles[(idx + 1) % basis.len()];
                let s0 = sq(0, a, &k)?;
                sq0.record(is_coboundary(&k, &s0.add(a)?)?, || format!("degree {n} class {idx} on\n{text}"));
                let high = sq(n + 1, a, &k)?;
                vanish.record(high.is_zero(), || format!("degree {n} class {idx} on\n{text}"));
                top.record(sq(n, a, &k)? == cup_i(a, a, 0, &k)?, || format!("degree {n} class {idx} on\n{text}"));
                let shift = if n > 0 { random_cochain(&mut rng, &k, n - 1).coboundary(&k)? } else { Cochain::zero(&k, 0) };
                for s in 0..=n {
                    let base = sq(s, a, &k)?;
                    let moved = sq(s, &a.add(&shift)?, &k)?;
                    let both = sq(s, &a.add(b)?, &k)?;
                    let ok = is_coboundary(&k, &moved.add(&base)?)?
                        && is_coboundary(&k, &sum(&k, n + s, &[both, base.clone(), sq(s, b, &k)?])?)?;
                    natural.record(ok, || format!("Sq^{s} on degree {n} classes {idx} on\n{text}"));
                }
            }
        }
    }
    let mut rp2 = Check::new("Sq^1 of the generator of H^1(RP^2) is nonzero");
    let k = rp2_complex();
    let sigma = &cohomology_basis(&k, 1).cocycles[0];
    rp2.record(!is_coboundary(&k, &sq(1, sigma, &k)?)?, || "rp2_complex".into());
    Ok(report("steenrod-axioms", seed, vec![formula, sq0, vanish, top, natural, rp2]))
}

/// `Sq¹Sq¹ = 0` on every basis class of random complexes and of `RP²`.
pub fn adem_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut rng = synth::rng(seed);
    let mut check = Check::new("Sq^1 Sq^1 = 0 on cohomology basis classes");
    let mut complexes: Vec<FilteredComplex> = (0..trials).map(|round| random_complex(&mut rng, round)).collect();
    complexes.push(rp2_complex());
    for k in &complexes {
        for n in 0..=k.top_dim().unwrap_or(0) {
            for (idx, c) in cohomology_basis(k, n).cocycles.iter().enumerate() {
                let twice = sq(1, &sq(1, c, k)?, k)?;
                check.record(is_coboundary(k, &twice)?, || format!("degree {n} class {idx} on\n{}", k.to_text()));
            }
        }
    }
    Ok(report("adem-sq1", seed, vec![check]))
}

/// The matching-based bottleneck distance agrees with exhaustive enumeration.
pub fn bottleneck_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut rng = synth::rng(seed);
    let mut check = Check::new("bottleneck equals the enumeration oracle");
    for _ in 0..trials {
        let a = synth::random_barcode(&mut rng, 6, 0, 0.0, 10.0);
        let b = synth::random_barcode(&mut rng, 6, 0, 0.0, 10.0);
        let fast = bottleneck(&a, &b, 0);
        let slow = bottleneck_oracle(&a, &b, 0)?;
        check.record(fast == slow, || format!("A = {a:?}\nB = {b:?}\nmatching {fast}, oracle {slow}"));
    }
    Ok(report("bottleneck-oracle", seed, vec![check]))
}

/// `img id` reproduces ordinary persistence and `img θ ⊕ ker θ` has the
/// dimension of `H^ℓ` pointwise.
pub fn identity_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut rng = synth::rng(seed);
    let mut identity = Check::new("image barcode of id equals the persistent barcode");
    let mut nullity = Check::new("rank(img θ) + rank(ker θ) = dim H^ℓ at every index");
    for round in 0..trials {
        let k = if round % 3 == 2 {
            synth::random_values(&mut rng, &rp2_complex(), 5)
        } else {
            synth::random_filtration(&mut rng, 6, 30, 3)
        };
        for l in 0..=2 {
            let got = image_barcode(&k, Operation::identity(l))?;
            let expected = persistent_barcode(&k, l).in_degree(l);
            identity.record(got == expected, || format!("degree {l}: {got:?} vs {expected:?} on\n{}", k.to_text()));
        }
        for op in [Operation::identity(1), Operation::zero(1), Operation::sq(1, 1), Operation::sq(1, 0)] {
            let m = theta_module(&k, op)?;
            for (g, &t) in m.image.values().iter().enumerate() {
                let dim = betti_number(&k.sublevel_at(t), op.source_degree);
                let sum = m.image.get(g, g) + m.kernel.get(g, g);
                nullity.record(sum == dim, || format!("{op} at t = {t}: {sum} vs {dim} on\n{}", k.to_text()));
            }
        }
    }
    Ok(report("identity-oracle", seed, vec![identity, nullity]))
}
