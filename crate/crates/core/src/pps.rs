//! Pre- and post-selected ensembles: ABL probabilities, weak values and
//! sequences of ideal intermediate measurements.
//!
//! Time evolution between the two boundary states is the identity; a caller
//! with a Hamiltonian evolves the boundary states before building the
//! ensemble.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::hilbert::{dot, Complex, Operator, SpectralObservable, StateVector, Tolerances};
use crate::{Error, Result};

/// Default minimum `|⟨post|pre⟩|` accepted when building an ensemble.
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 1e-8;

/// Weight sums below this are treated as an impossible post-selection.
const ZERO_WEIGHT: f64 = 1e-24;

/// A pre-selected state, a post-selected state and their cached overlap
/// `⟨post|pre⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PpsEnsemble {
    pre: StateVector,
    post: StateVector,
    overlap: Complex,
}

impl PpsEnsemble {
    pub fn new(pre: StateVector, post: StateVector) -> Result<Self> {
        Self::with_threshold(pre, post, DEFAULT_OVERLAP_THRESHOLD)
    }

    /// Rejects nearly orthogonal pairs, for which weak values blow up.
    pub fn with_threshold(pre: StateVector, post: StateVector, threshold: f64) -> Result<Self> {
        let overlap = post.inner(&pre)?;
        if overlap.norm() <= threshold {
            return Err(Error::OverlapTooSmall {
                overlap: overlap.norm(),
                threshold,
            });
        }
        Ok(PpsEnsemble { pre, post, overlap })
    }

    pub fn pre(&self) -> &StateVector {
        &self.pre
    }

    pub fn post(&self) -> &StateVector {
        &self.post
    }

    /// `⟨post|pre⟩`.
    pub fn overlap(&self) -> Complex {
        self.overlap
    }

    pub fn dim(&self) -> usize {
        self.pre.dim()
    }

    /// Transition amplitude `⟨post|A|pre⟩`.
    pub fn amplitude(&self, op: &Operator) -> Result<Complex> {
        op.matrix_element(&self.post, &self.pre)
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

/// One outcome sequence (a single eigenvalue for a plain ABL query) and its
/// probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub values: Vec<f64>,
    pub probability: f64,
}

impl Outcome {
    /// Product of the outcomes in the sequence.
    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    entries: Vec<Outcome>,
}

impl OutcomeDistribution {
    pub fn entries(&self) -> &[Outcome] {
        &self.entries
    }

    /// Probability of an exact outcome sequence; zero when it is not listed.
    pub fn probability(&self, values: &[f64]) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.values == values)
            .map(|e| e.probability)
            .sum()
    }

    /// Total probability that the product of outcomes equals `product`.
    pub fn probability_of_product(&self, product: f64) -> f64 {
        self.entries
            .iter()
            .filter(|e| (e.product() - product).abs() < 1e-12)
            .map(|e| e.probability)
            .sum()
    }

    /// Distribution of the product of outcomes, in order of first appearance.
    pub fn product_distribution(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for e in &self.entries {
            let p = e.product();
            match out.iter_mut().find(|(v, _)| (*v - p).abs() < 1e-12) {
                Some(slot) => slot.1 += e.probability,
                None => out.push((p, e.probability)),
            }
        }
        out
    }

    /// Marginal distribution of the measurement at `position` in the chain.
    pub fn marginal(&self, position: usize) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for e in &self.entries {
            let v = e.values[position];
            match out.iter_mut().find(|(x, _)| *x == v) {
                Some(slot) => slot.1 += e.probability,
                None => out.push((v, e.probability)),
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    fn from_weights(entries: Vec<(Vec<f64>, f64)>, total: f64) -> Self {
        OutcomeDistribution {
            entries: entries
                .into_iter()
                .map(|(values, w)| Outcome {
                    values,
                    probability: w / total,
                })
                .collect(),
        }
    }
}

/// Complex weak value `⟨post|A|pre⟩ / ⟨post|pre⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    pub value: Complex,
}

impl WeakValue {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }
}

impl fmt::Display for WeakValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.value.re, self.value.im)
    }
}

/// ABL probabilities of an ideal intermediate measurement of `obs`:
/// `P(a) ∝ |⟨post|Π_a|pre⟩|²`.
pub fn abl(pps: &PpsEnsemble, obs: &SpectralObservable) -> Result<OutcomeDistribution> {
    pps.check_dim(obs.dim())?;
    let weights: Vec<(Vec<f64>, f64)> = obs
        .spectrum()
        .iter()
        .map(|(value, proj)| {
            let amp = pps.amplitude(proj).expect("dimensions checked");
            (vec![*value], amp.norm_sqr())
        })
        .collect();
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if total <= ZERO_WEIGHT {
        return Err(Error::InconsistentObservable);
    }
    Ok(OutcomeDistribution::from_weights(weights, total))
}

pub fn weak_value(pps: &PpsEnsemble, op: &Operator) -> Result<WeakValue> {
    pps.check_dim(op.dim())?;
    Ok(WeakValue {
        value: pps.amplitude(op)? / pps.overlap,
    })
}

/// The eigenvalue an ideal measurement of `obs` is certain to yield given
/// the ensemble (ABL probability above `1 − tol`), if any. When it exists
/// the weak value of `obs` equals it.
pub fn is_definite(pps: &PpsEnsemble, obs: &SpectralObservable, tol: f64) -> Result<Option<f64>> {
    let dist = abl(pps, obs)?;
    Ok(dist
        .entries
        .iter()
        .find(|e| e.probability > 1.0 - tol)
        .map(|e| e.values[0]))
}

/// Joint distribution of a chain of ideal measurements performed in order,
/// `P(b₁…bₙ) ∝ |⟨post|Π_{bₙ}⋯Π_{b₁}|pre⟩|²`. Outcome tuples are listed in
/// measurement order, enumerated lexicographically over each spectrum.
pub fn sequential_distribution(
    pps: &PpsEnsemble,
    chain: &[&SpectralObservable],
) -> Result<OutcomeDistribution> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    for obs in chain {
        pps.check_dim(obs.dim())?;
    }
    let mut weights = Vec::new();
    let mut prefix = Vec::with_capacity(chain.len());
    walk_chain(
        chain,
        pps.pre.amplitudes(),
        pps.post.amplitudes(),
        &mut prefix,
        &mut weights,
    );
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if total <= ZERO_WEIGHT {
        return Err(Error::InconsistentChain);
    }
    Ok(OutcomeDistribution::from_weights(weights, total))
}

fn walk_chain(
    chain: &[&SpectralObservable],
    state: &[Complex],
    post: &[Complex],
    prefix: &mut Vec<f64>,
    out: &mut Vec<(Vec<f64>, f64)>,
) {
    let Some((first, rest)) = chain.split_first() else {
        out.push((prefix.clone(), dot(post, state).norm_sqr()));
        return;
    };
    for (value, proj) in first.spectrum() {
        let next = proj.apply_raw(state);
        prefix.push(*value);
        walk_chain(rest, &next, post, prefix, out);
        prefix.pop();
    }
}

/// Weak values of two commuting observables, of their product, and the
/// joint distribution of measuring them in sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductRuleAudit {
    pub a: WeakValue,
    pub b: WeakValue,
    pub product: WeakValue,
    /// `(AB)_w ≠ A_w · B_w` beyond `1e−9`.
    pub violation: bool,
    pub joint: OutcomeDistribution,
}

pub fn product_rule_audit(
    pps: &PpsEnsemble,
    a: &SpectralObservable,
    b: &SpectralObservable,
) -> Result<ProductRuleAudit> {
    pps.check_dim(a.dim())?;
    pps.check_dim(b.dim())?;
    let residual = a.op().commutator(b.op()).norm();
    if residual > Tolerances::default().structural {
        return Err(Error::NonCommuting { residual });
    }
    let a_w = weak_value(pps, a.op())?;
    let b_w = weak_value(pps, b.op())?;
    let product = weak_value(pps, &(a.op() * b.op()))?;
    let violation = (product.value - a_w.value * b_w.value).norm() > 1e-9;
    let joint = sequential_distribution(pps, &[a, b])?;
    Ok(ProductRuleAudit {
        a: a_w,
        b: b_w,
        product,
        violation,
        joint,
    })
}

/// `Σⱼ |⟨fⱼ|pre⟩|² Re (A_w)ⱼ` over an orthonormal basis of post-selections
/// `{fⱼ}`; for Hermitian `A` this is the ordinary expectation `⟨pre|A|pre⟩`.
pub fn expectation_decomposition(
    pre: &StateVector,
    obs: &Operator,
    basis: &[StateVector],
) -> Result<f64> {
    obs.check_same_dim(pre.dim())?;
    let dim = pre.dim();
    let mut gram_residual = 0.0f64;
    for (i, u) in basis.iter().enumerate() {
        if u.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.dim(),
            });
        }
        for (j, v) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_residual = gram_residual.max((u.inner(v)? - target).norm());
        }
    }
    if basis.len() != dim || gram_residual > Tolerances::default().structural {
        return Err(Error::IncompleteBasis {
            residual: gram_residual.max((dim as f64 - basis.len() as f64).abs()),
        });
    }
    let image = obs.apply_raw(pre.amplitudes());
    let mut total = 0.0;
    for f in basis {
        let overlap = f.inner(pre)?;
        if overlap == Complex::default() {
            continue;
        }
        let weak = dot(f.amplitudes(), &image) / overlap;
        total += overlap.norm_sqr() * weak.re;
    }
    Ok(total)
}
