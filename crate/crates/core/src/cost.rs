//! Cost terms over an ultrametric and their gradients with respect to `u`.
//!
//! Every gradient treats the tree as fixed: lca identities, pass edges, node
//! sizes, smallest-child sizes and ranks are constants. Chain with
//! [`subdominant_vjp`](crate::subdominant_vjp) to obtain the gradient with
//! respect to the optimization variable.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hierarchy::node_attributes;
use crate::subdominant::SubdominantResult;

/// Value and gradient `∂J/∂u` of a cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CostValue {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl CostValue {
    fn zero(m: usize) -> Self {
        Self { value: 0.0, grad: vec![0.0; m] }
    }
}

/// `(ref, pos, neg)` vertex triple: `ref` and `pos` share a class, `neg` does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet {
    pub reference: usize,
    pub positive: usize,
    pub negative: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TripletSet(Vec<Triplet>);

impl TripletSet {
    /// Rejects triples with `ref == neg`. `pos == ref` is allowed.
    pub fn new(triplets: Vec<Triplet>) -> Result<Self> {
        if let Some(index) = triplets.iter().position(|t| t.reference == t.negative) {
            return Err(Error::DegenerateTriplet { index });
        }
        Ok(Self(triplets))
    }

    pub fn from_tuples(triples: &[(usize, usize, usize)]) -> Result<Self> {
        Self::new(
            triples
                .iter()
                .map(|&(reference, positive, negative)| Triplet { reference, positive, negative })
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[Triplet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostTerm {
    /// Squared distance to the reference weights.
    Closest,
    /// Cluster-size penalty restricted to the `top_k` highest merges
    /// (`None` means every merge).
    ClusterSize { top_k: Option<usize> },
    /// Hinge loss on triplet distances with the given margin.
    Triplet { triplets: TripletSet, margin: f64 },
    /// Soft-cardinal relaxation of Dasgupta's cost. Works best on reference
    /// weights scaled to `[0, 1]`, since the sigmoid temperature is absolute.
    Dasgupta { temperature: f64 },
}

/// Weighted sum of cost terms.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    terms: Vec<(CostTerm, f64)>,
}

impl CostSpec {
    pub fn new(terms: Vec<(CostTerm, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidConfig("cost needs at least one term"));
        }
        for (term, lambda) in &terms {
            if !lambda.is_finite() || *lambda < 0.0 {
                return Err(Error::InvalidConfig("term weights must be finite and non-negative"));
            }
            match term {
                CostTerm::Triplet { margin, .. } if !(margin.is_finite() && *margin > 0.0) => {
                    return Err(Error::InvalidConfig("triplet margin must be positive"));
                }
                CostTerm::Dasgupta { temperature } if !(temperature.is_finite() && *temperature > 0.0) => {
                    return Err(Error::InvalidConfig("sigmoid temperature must be positive"));
                }
                _ => {}
            }
        }
        Ok(Self { terms })
    }

    pub fn closest() -> Self {
        Self { terms: vec![(CostTerm::Closest, 1.0)] }
    }

    pub fn terms(&self) -> &[(CostTerm, f64)] {
        &self.terms
    }
}

pub fn cost_closest(res: &SubdominantResult, w: &[f64]) -> Result<CostValue> {
    let u = res.u.as_slice();
    if w.len() != u.len() {
        return Err(Error::LengthMismatch { expected: u.len(), found: w.len() });
    }
    let mut value = 0.0;
    let grad = u
        .iter()
        .zip(w)
        .map(|(&a, &b)| {
            let d = a - b;
            value += d * d;
            2.0 * d
        })
        .collect();
    Ok(CostValue { value, grad })
}

/// Sum of `u(e) / γ(pass node)` over edges whose pass node ranks within
/// `top_k`, where `γ` is the size of the node's smaller child.
pub fn cost_cluster_size(res: &SubdominantResult, top_k: Option<usize>) -> Result<CostValue> {
    let t = &res.dendrogram;
    let attrs = node_attributes(t);
    let mut out = CostValue::zero(res.edge_count());
    for (e, &node) in res.pass_node.iter().enumerate() {
        let rank = t.rank(node).expect("pass nodes are internal");
        if top_k.is_some_and(|k| rank > k) {
            continue;
        }
        let inv = 1.0 / attrs.min_child_size(node).expect("pass nodes are internal") as f64;
        out.value += res.u[e] * inv;
        out.grad[e] = inv;
    }
    Ok(out)
}

/// Hinge `max(0, α + d(ref, pos) - d(ref, neg))` summed over triplets. The
/// sub-gradient at a zero hinge is 0.
pub fn cost_triplet(res: &SubdominantResult, triplets: &TripletSet, margin: f64) -> Result<CostValue> {
    let mut out = CostValue::zero(res.edge_count());
    for t in triplets.as_slice() {
        let (p, d_pos) = res.pass(t.reference, t.positive)?;
        let (q, d_neg) = res.pass(t.reference, t.negative)?;
        let h = margin + d_pos - d_neg;
        if h > 0.0 {
            out.value += h;
            if let Some(p) = p {
                out.grad[p] += 1.0;
            }
            if let Some(q) = q {
                out.grad[q] -= 1.0;
            }
        }
    }
    Ok(out)
}

#[inline]
fn sigmoid(t: f64, temperature: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-t / temperature))
}

/// Walks the terms of the soft cardinal of internal node `n`:
/// `½ Σ_{x ∈ ε(n)} (ℓ(alt n) + Σ_{y ancestor of x} |sibling| ℓ(alt n - alt y))`.
///
/// Calls `visit(y, coeff)` for each ancestor term with the factor (including
/// the ½) multiplying `ℓ(alt n - alt y)`, and returns the endpoint pair so the
/// caller can add the `ℓ(alt n)` terms.
fn for_each_ancestor_term(
    res: &SubdominantResult,
    edges: &[(usize, usize)],
    n: usize,
    mut visit: impl FnMut(usize, f64),
) {
    let t = &res.dendrogram;
    let e = t.canonical_edge(n).expect("internal node of a single-linkage tree");
    let (a, b) = edges[e];
    for x in [a, b] {
        let mut below = x;
        // both endpoints share the ancestors strictly above n; stop there and
        // count those once with weight 1 instead of twice with weight ½
        while below != n {
            let y = t.parent(below).expect("n is an ancestor of its edge endpoints");
            let sib = t.sibling(below).expect("non-root node has a sibling");
            visit(y, 0.5 * t.size(sib) as f64);
            below = y;
        }
    }
    let mut below = n;
    for y in t.ancestors(n) {
        let sib = t.sibling(below).expect("non-root node has a sibling");
        visit(y, t.size(sib) as f64);
        below = y;
    }
}

/// Soft cardinal of every internal node, in node order (index `k` is node
/// `N + k`), with the sigmoid `ℓ(t) = 1 / (1 + exp(-t / τ))` in place of a
/// hard step. Sizes of the sibling subtrees stay hard.
pub fn soft_cardinal(res: &SubdominantResult, edges: &[(usize, usize)], temperature: f64) -> Vec<f64> {
    let t = &res.dendrogram;
    let leaf_count = t.leaf_count();
    (leaf_count..t.node_count())
        .map(|n| {
            let alt_n = t.altitude(n);
            let mut card = sigmoid(alt_n, temperature);
            for_each_ancestor_term(res, edges, n, |y, coeff| {
                card += coeff * sigmoid(alt_n - t.altitude(y), temperature);
            });
            card
        })
        .collect()
}

/// `Σ_e card(pass node of e) / w(e)` with the soft cardinal. `w` must be
/// strictly positive.
pub fn cost_dasgupta(
    res: &SubdominantResult,
    edges: &[(usize, usize)],
    w: &[f64],
    temperature: f64,
) -> Result<CostValue> {
    let m = res.edge_count();
    if w.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: w.len() });
    }
    if edges.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: edges.len() });
    }
    if let Some(edge) = w.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonpositiveWeight { edge, value: w[edge] });
    }
    let t = &res.dendrogram;
    let leaf_count = t.leaf_count();
    let mut coef = vec![0.0; t.node_count() - leaf_count];
    for (e, &node) in res.pass_node.iter().enumerate() {
        coef[node - leaf_count] += 1.0 / w[e];
    }

    let canonical = t.canonical_edges().expect("single-linkage tree");
    let mut out = CostValue::zero(m);
    for (k, &c) in coef.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let n = leaf_count + k;
        let alt_n = t.altitude(n);
        let e_n = canonical[k];
        let s = sigmoid(alt_n, temperature);
        let mut card = s;
        let mut d_alt_n = s * (1.0 - s) / temperature;
        for_each_ancestor_term(res, edges, n, |y, coeff| {
            let s = sigmoid(alt_n - t.altitude(y), temperature);
            card += coeff * s;
            let ds = coeff * s * (1.0 - s) / temperature;
            d_alt_n += ds;
            out.grad[canonical[y - leaf_count]] -= c * ds;
        });
        out.value += c * card;
        out.grad[e_n] += c * d_alt_n;
    }
    Ok(out)
}

/// Weighted sum of the terms of `spec`; `w` is the reference weighting used
/// by the closest and Dasgupta terms.
pub fn cost_composite(
    spec: &CostSpec,
    res: &SubdominantResult,
    edges: &[(usize, usize)],
    w: &[f64],
) -> Result<CostValue> {
    let mut total = CostValue::zero(res.edge_count());
    for (term, lambda) in spec.terms() {
        if *lambda == 0.0 {
            continue;
        }
        let part = match term {
            CostTerm::Closest => cost_closest(res, w)?,
            CostTerm::ClusterSize { top_k } => cost_cluster_size(res, *top_k)?,
            CostTerm::Triplet { triplets, margin } => cost_triplet(res, triplets, *margin)?,
            CostTerm::Dasgupta { temperature } => cost_dasgupta(res, edges, w, *temperature)?,
        };
        total.value += lambda * part.value;
        for (acc, g) in total.grad.iter_mut().zip(&part.grad) {
            *acc += lambda * g;
        }
    }
    Ok(total)
}
