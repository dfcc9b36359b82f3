//! Chain-level cup-i products and Steenrod squares over F2.
//!
//! For `α ∈ C^p`, `β ∈ C^q` and an `n`-simplex `σ = [v_0, ..., v_n]` with
//! `n = p + q - i`,
//!
//! ```text
//! (α ⌣_i β)(σ) = Σ α(B_0 ∪ B_2 ∪ ...) · β(B_1 ∪ B_3 ∪ ...)
//! ```
//!
//! summed over `0 <= a_0 < a_1 < ... < a_i <= n`, where block `B_j` is
//! `v_{a_{j-1}}, ..., v_{a_j}` with `a_{-1} = 0` and `a_{i+1} = n`. Terms whose
//! faces have the wrong dimension vanish. `⌣_0` is the front-face/back-face
//! cup product, and `Sq^k(c) = c ⌣_{n-k} c` for a cocycle `c` of degree `n`.

use crate::complex::{Cochain, FilteredComplex};
use crate::error::{Error, Result};
use crate::f2linalg::F2Vector;

/// The face lookups needed to evaluate `⌣_i` between degrees `p` and `q` on a
/// fixed complex, computed once and reusable for any pair of cochains.
#[derive(Clone, Debug)]
pub struct CupPlan {
    p: usize,
    q: usize,
    i: usize,
    lineage: u64,
    source_counts: (usize, usize),
    /// For each target simplex, the `(α face, β face)` local indices.
    terms: Vec<Vec<(u32, u32)>>,
}

impl CupPlan {
    pub fn new(k: &FilteredComplex, p: usize, q: usize, i: usize) -> Result<Self> {
        if i > p.min(q) {
            return Err(Error::DegreeMismatch(format!(
                "cup-{i} needs i <= min({p}, {q})"
            )));
        }
        let n = p + q - i;
        let mut terms = Vec::with_capacity(k.count(n));
        let mut cuts = vec![0usize; i + 1];
        for &g in k.simplices_of_dim(n) {
            let v = k.simplex(g).vertices();
            let mut here = Vec::new();
            for_each_cut(&mut cuts, 0, 0, n, &mut |cuts| {
                let (front, back) = split_blocks(v, cuts, n);
                if front.len() == p + 1 && back.len() == q + 1 {
                    let a = k.find_local(&front).expect("faces of a simplex are present");
                    let b = k.find_local(&back).expect("faces of a simplex are present");
                    here.push((a as u32, b as u32));
                }
            });
            terms.push(here);
        }
        Ok(CupPlan {
            p,
            q,
            i,
            lineage: k.lineage(),
            source_counts: (k.count(p), k.count(q)),
            terms,
        })
    }

    pub fn target_degree(&self) -> usize {
        self.p + self.q - self.i
    }

    /// Evaluates on the first `limit` target simplices. Inputs are raw value
    /// vectors over the full `p`- and `q`-simplex lists and need not be cocycles.
    pub fn apply_prefix(&self, alpha: &F2Vector, beta: &F2Vector, limit: usize) -> F2Vector {
        assert_eq!(alpha.len(), self.source_counts.0);
        assert_eq!(beta.len(), self.source_counts.1);
        let limit = limit.min(self.terms.len());
        let mut out = F2Vector::zeros(limit);
        for (s, terms) in self.terms[..limit].iter().enumerate() {
            let mut bit = false;
            for &(a, b) in terms {
                if alpha.get(a as usize) && beta.get(b as usize) {
                    bit = !bit;
                }
            }
            if bit {
                out.set(s, true);
            }
        }
        out
    }

    pub fn apply(&self, alpha: &Cochain, beta: &Cochain, host: &FilteredComplex) -> Result<Cochain> {
        if host.lineage() != self.lineage || host.count(self.target_degree()) != self.terms.len() {
            return Err(Error::HostMismatch);
        }
        alpha.check_host(host)?;
        beta.check_host(host)?;
        if alpha.degree() != self.p || beta.degree() != self.q {
            return Err(Error::DegreeMismatch(format!(
                "plan is for degrees ({}, {}), got ({}, {})",
                self.p,
                self.q,
                alpha.degree(),
                beta.degree()
            )));
        }
        let values = self.apply_prefix(alpha.values(), beta.values(), self.terms.len());
        Cochain::from_vector(host, self.target_degree(), values)
    }
}

/// Calls `f` for every strictly increasing `cuts` in `[lo, n]`.
fn for_each_cut(cuts: &mut Vec<usize>, pos: usize, lo: usize, n: usize, f: &mut impl FnMut(&[usize])) {
    if pos == cuts.len() {
        f(cuts);
        return;
    }
    let remaining = cuts.len() - pos - 1;
    for a in lo..=n.saturating_sub(remaining) {
        if a + remaining > n {
            break;
        }
        cuts[pos] = a;
        for_each_cut(cuts, pos + 1, a + 1, n, f);
    }
}

/// Unions of even- and odd-indexed blocks.
fn split_blocks(v: &[usize], cuts: &[usize], n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut front = Vec::new();
    let mut back = Vec::new();
    let mut start = 0;
    for (j, &end) in cuts.iter().chain(std::iter::once(&n)).enumerate() {
        let block = &v[start..=end];
        let side = if j % 2 == 0 { &mut front } else { &mut back };
        for &x in block {
            if side.last() != Some(&x) {
                side.push(x);
            }
        }
        start = end;
    }
    (front, back)
}

/// `α ⌣_i β` on the simplices of `K` of degree `deg α + deg β - i`.
pub fn cup_i(alpha: &Cochain, beta: &Cochain, i: usize, k: &FilteredComplex) -> Result<Cochain> {
    alpha.check_host(k)?;
    beta.check_host(k)?;
    CupPlan::new(k, alpha.degree(), beta.degree(), i)?.apply(alpha, beta, k)
}

/// A cocycle representing `Sq^k([c])`.
pub fn sq(k: usize, c: &Cochain, complex: &FilteredComplex) -> Result<Cochain> {
    c.check_host(complex)?;
    if !c.is_cocycle(complex)? {
        return Err(Error::NotACocycle(c.degree()));
    }
    let n = c.degree();
    if k > n {
        return Ok(Cochain::zero(complex, n + k));
    }
    cup_i(c, c, n - k, complex)
}

/// Plan for `c ↦ c ⌣_{n-k} c` on degree-`n` cochains, or `None` when
/// `k > n` (the square vanishes).
pub fn sq_plan(complex: &FilteredComplex, k: usize, n: usize) -> Result<Option<CupPlan>> {
    if k > n {
        return Ok(None);
    }
    CupPlan::new(complex, n, n, n - k).map(Some)
}
