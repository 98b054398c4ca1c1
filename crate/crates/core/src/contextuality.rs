//! Noncontextual value assignments over commuting contexts.
//!
//! A [`ContextTable`] lists `±1`-valued observables and groups them into
//! contexts of mutually commuting members whose product is fixed, either as
//! an operator identity (`Π members = ±I`) or, when the table carries a
//! reference state, as an eigenvalue equation on that state. A noncontextual
//! assignment gives each observable one value `±1` such that every context's
//! product rule holds.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::hilbert::{Operator, SpectralObservable, StateVector};
use crate::{Error, Result};

/// Exhaustive search is limited to `2^30` assignments.
pub const MAX_SEARCH_OBSERVABLES: usize = 30;

/// Members of a context must commute to within this Frobenius norm.
pub const COMMUTATOR_TOLERANCE: f64 = 1e-10;

/// Context products must match the required sign to within this norm.
pub const PRODUCT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    pub members: Vec<usize>,
    pub required: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextTable {
    observables: Vec<SpectralObservable>,
    contexts: Vec<Context>,
    state: Option<StateVector>,
}

impl ContextTable {
    /// Structural validation only: unique names, `±1` spectra, equal
    /// dimensions and in-range, duplicate-free context members. The operator
    /// algebra is checked by [`verify_table`].
    pub fn new(observables: Vec<SpectralObservable>, contexts: Vec<Context>) -> Result<Self> {
        let dim = observables
            .first()
            .map(|o| o.dim())
            .ok_or_else(|| Error::InvalidTable("no observables".to_string()))?;
        for (i, obs) in observables.iter().enumerate() {
            if obs.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: obs.dim(),
                });
            }
            if obs.eigenvalues().any(|v| v != 1.0 && v != -1.0) {
                return Err(Error::NotSignValued(obs.name().to_string()));
            }
            if observables[..i].iter().any(|o| o.name() == obs.name()) {
                return Err(Error::InvalidTable(alloc::format!(
                    "observable `{}` defined twice",
                    obs.name()
                )));
            }
        }
        for (ci, ctx) in contexts.iter().enumerate() {
            if ctx.members.is_empty() {
                return Err(Error::InvalidTable(alloc::format!("context {ci} is empty")));
            }
            for (k, &m) in ctx.members.iter().enumerate() {
                if m >= observables.len() {
                    return Err(Error::InvalidTable(alloc::format!(
                        "context {ci} refers to observable index {m}"
                    )));
                }
                if ctx.members[..k].contains(&m) {
                    return Err(Error::InvalidTable(alloc::format!(
                        "context {ci} lists `{}` twice",
                        observables[m].name()
                    )));
                }
            }
        }
        Ok(ContextTable {
            observables,
            contexts,
            state: None,
        })
    }

    /// Builds contexts from observable names.
    pub fn from_names(
        observables: Vec<SpectralObservable>,
        contexts: &[(Sign, &[&str])],
    ) -> Result<Self> {
        let lookup = |name: &str| {
            observables
                .iter()
                .position(|o| o.name() == name)
                .ok_or_else(|| Error::UnknownObservable(name.to_string()))
        };
        let contexts = contexts
            .iter()
            .map(|(required, names)| {
                Ok(Context {
                    members: names.iter().map(|n| lookup(n)).collect::<Result<_>>()?,
                    required: *required,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(observables, contexts)
    }

    /// Makes every context constraint state-dependent: the product of its
    /// members must act on `state` as the required sign.
    pub fn with_state(mut self, state: StateVector) -> Result<Self> {
        let dim = self.observables[0].dim();
        if state.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: state.dim(),
            });
        }
        self.state = Some(state);
        Ok(self)
    }

    pub fn observables(&self) -> &[SpectralObservable] {
        &self.observables
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn state(&self) -> Option<&StateVector> {
        self.state.as_ref()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.observables.iter().position(|o| o.name() == name)
    }

    /// Human-readable context label, e.g. `+1: X1 X2 X1X2`.
    pub fn context_label(&self, index: usize) -> String {
        let ctx = &self.contexts[index];
        let mut label = String::from(if ctx.required.is_minus() { "-1:" } else { "+1:" });
        for &m in &ctx.members {
            label.push(' ');
            label.push_str(self.observables[m].name());
        }
        label
    }

    /// Number of total assignments, `2^n`.
    pub fn assignment_space(&self) -> u64 {
        1u64 << self.observables.len().min(63)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextResidual {
    pub label: String,
    /// Largest pairwise commutator norm among members.
    pub commutator: f64,
    /// Norm of `Π members − required·I`, or of `(Π members − required)|ψ⟩`
    /// for state-dependent tables.
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub contexts: Vec<ContextResidual>,
    pub state_dependent: bool,
}

impl TableReport {
    pub fn max_residual(&self) -> f64 {
        self.contexts
            .iter()
            .map(|c| c.commutator.max(c.product))
            .fold(0.0, f64::max)
    }
}

/// Re-derives both context invariants numerically and reports residuals.
/// Fails on the first context that breaks one.
pub fn verify_table(table: &ContextTable) -> Result<TableReport> {
    let dim = table.observables[0].dim();
    let mut out = Vec::with_capacity(table.contexts.len());
    for (ci, ctx) in table.contexts.iter().enumerate() {
        let label = table.context_label(ci);
        let mut commutator = 0.0f64;
        for (k, &a) in ctx.members.iter().enumerate() {
            for &b in &ctx.members[k + 1..] {
                let (oa, ob) = (&table.observables[a], &table.observables[b]);
                let r = oa.op().commutator(ob.op()).norm();
                if r > COMMUTATOR_TOLERANCE {
                    return Err(Error::ContextNotCommuting {
                        context: ci,
                        label,
                        first: oa.name().to_string(),
                        second: ob.name().to_string(),
                        residual: r,
                    });
                }
                commutator = commutator.max(r);
            }
        }
        let product = ctx
            .members
            .iter()
            .fold(Operator::identity(dim), |acc, &m| &acc * table.observables[m].op());
        let sign = f64::from(ctx.required.value());
        let residual = match &table.state {
            None => (&product - &Operator::identity(dim).scale_real(sign)).norm(),
            Some(state) => {
                let image = product.apply(state)?;
                libm::sqrt(
                    image
                        .iter()
                        .zip(state.amplitudes())
                        .map(|(a, s)| (a - s * sign).norm_sqr())
                        .sum::<f64>(),
                )
            }
        };
        if residual > PRODUCT_TOLERANCE {
            return Err(Error::ContextProduct {
                context: ci,
                label,
                residual,
            });
        }
        out.push(ContextResidual {
            label,
            commutator,
            product: residual,
        });
    }
    Ok(TableReport {
        contexts: out,
        state_dependent: table.state.is_some(),
    })
}

/// A total `±1` assignment, keyed by observable name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: BTreeMap<String, i8>,
}

impl Assignment {
    pub fn get(&self, name: &str) -> Option<i8> {
        self.values.get(name).copied()
    }

    /// Whether every context's product rule holds, checked directly on the
    /// named values.
    pub fn satisfies(&self, table: &ContextTable) -> bool {
        table.contexts.iter().all(|ctx| {
            let product: i8 = ctx
                .members
                .iter()
                .map(|&m| self.get(table.observables[m].name()).unwrap_or(0))
                .product();
            product == ctx.required.value()
        })
    }
}

/// Bit-parallel form of a table for exhaustive scans. Observable `i` maps to
/// bit `n − 1 − i`, and a set bit means `−1`, so scanning codes upward
/// visits value tuples in lexicographic order with `+1` before `−1`.
#[derive(Debug, Clone)]
pub struct AssignmentSearch {
    names: Vec<String>,
    constraints: Vec<(u32, u32)>,
}

impl AssignmentSearch {
    pub fn new(table: &ContextTable) -> Result<Self> {
        let n = table.observables.len();
        if n > MAX_SEARCH_OBSERVABLES {
            return Err(Error::TooManyObservables {
                count: n,
                limit: MAX_SEARCH_OBSERVABLES,
            });
        }
        let constraints = table
            .contexts
            .iter()
            .map(|ctx| {
                let mask = ctx.members.iter().fold(0u32, |m, &i| m | 1 << (n - 1 - i));
                (mask, u32::from(ctx.required.is_minus()))
            })
            .collect();
        Ok(AssignmentSearch {
            names: table.observables.iter().map(|o| o.name().to_string()).collect(),
            constraints,
        })
    }

    pub fn space(&self) -> u64 {
        1u64 << self.names.len()
    }

    pub fn satisfies(&self, code: u32) -> bool {
        self.constraints
            .iter()
            .all(|&(mask, parity)| (code & mask).count_ones() & 1 == parity)
    }

    /// Satisfying codes in `range`, ascending.
    pub fn scan(&self, range: Range<u64>) -> Vec<u32> {
        let end = range.end.min(self.space());
        (range.start..end)
            .map(|c| c as u32)
            .filter(|&c| self.satisfies(c))
            .collect()
    }

    pub fn assignment(&self, code: u32) -> Assignment {
        let n = self.names.len();
        let values = self
            .names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let minus = code >> (n - 1 - i) & 1 == 1;
                (name.clone(), if minus { -1 } else { 1 })
            })
            .collect();
        Assignment { values }
    }
}

/// Every assignment satisfying all context constraints, in lexicographic
/// order of value tuples (table order, `+1` before `−1`).
pub fn search_assignments(table: &ContextTable) -> Result<Vec<Assignment>> {
    let search = AssignmentSearch::new(table)?;
    Ok(search
        .scan(0..search.space())
        .into_iter()
        .map(|c| search.assignment(c))
        .collect())
}

/// Subset of contexts that covers every observable an even number of times
/// while the product of their required signs is `−1`. Multiplying the
/// product rules of these contexts gives `+1 = −1`, so no assignment exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityCertificate {
    pub contexts: Vec<usize>,
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }

    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn xor(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a ^= b);
    }

    fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
}

/// Gaussian elimination over GF(2) on the context/observable incidence
/// matrix. Each context row that reduces to zero yields a left null vector;
/// those vectors span all even covers, and a certificate exists iff one of
/// them has odd sign parity.
pub fn parity_obstruction(table: &ContextTable) -> Option<ParityCertificate> {
    let n_obs = table.observables.len();
    let n_ctx = table.contexts.len();
    // (pivot column, observable bits, combination of contexts, sign parity)
    let mut pivots: Vec<(usize, Bits, Bits, bool)> = Vec::new();
    for (ci, ctx) in table.contexts.iter().enumerate() {
        let mut row = Bits::new(n_obs);
        for &m in &ctx.members {
            row.flip(m);
        }
        let mut combo = Bits::new(n_ctx);
        combo.flip(ci);
        let mut sign = ctx.required.is_minus();
        for (col, prow, pcombo, psign) in &pivots {
            if row.get(*col) {
                row.xor(prow);
                combo.xor(pcombo);
                sign ^= psign;
            }
        }
        match row.lowest() {
            Some(col) => pivots.push((col, row, combo, sign)),
            None if sign => {
                let contexts = (0..n_ctx).filter(|&k| combo.get(k)).collect();
                return Some(ParityCertificate { contexts });
            }
            None => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{pauli_string, Axis};
    use crate::scenarios::{ghz_table, mermin_square_table};

    #[test]
    fn mermin_square_is_consistent_and_unsatisfiable() {
        let table = mermin_square_table();
        let report = verify_table(&table).unwrap();
        assert!(report.max_residual() < 1e-10);
        assert_eq!(table.assignment_space(), 512);
        assert!(search_assignments(&table).unwrap().is_empty());
        let cert = parity_obstruction(&table).unwrap();
        assert_eq!(cert.contexts, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn ghz_table_is_unsatisfiable() {
        let table = ghz_table();
        let report = verify_table(&table).unwrap();
        assert!(report.state_dependent);
        assert!(report.max_residual() < 1e-10);
        assert_eq!(table.assignment_space(), 64);
        assert!(search_assignments(&table).unwrap().is_empty());
        assert_eq!(parity_obstruction(&table).unwrap().contexts, vec![0, 1, 2, 3]);
    }

    #[test]
    fn sigma_z_is_not_identity() {
        let z = pauli_string(&[(0, Axis::Z)], 1).unwrap().renamed("Z");
        let table = ContextTable::from_names(vec![z], &[(Sign::Plus, &["Z"])]).unwrap();
        assert!(matches!(
            verify_table(&table),
            Err(Error::ContextProduct { context: 0, .. })
        ));
        let found = search_assignments(&table).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].get("Z"), Some(1));
        assert!(parity_obstruction(&table).is_none());
    }

    #[test]
    fn non_commuting_context_named_in_error() {
        let x = pauli_string(&[(0, Axis::X)], 1).unwrap().renamed("X");
        let z = pauli_string(&[(0, Axis::Z)], 1).unwrap().renamed("Z");
        let table = ContextTable::from_names(vec![x, z], &[(Sign::Plus, &["X", "Z"])]).unwrap();
        match verify_table(&table) {
            Err(Error::ContextNotCommuting { first, second, .. }) => {
                assert_eq!((first.as_str(), second.as_str()), ("X", "Z"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        let z = pauli_string(&[(0, Axis::Z)], 1).unwrap().renamed("Z");
        assert!(matches!(
            ContextTable::from_names(vec![z.clone()], &[(Sign::Plus, &["W"])]),
            Err(Error::UnknownObservable(_))
        ));
        assert!(matches!(
            ContextTable::from_names(vec![z.clone(), z.clone()], &[]),
            Err(Error::InvalidTable(_))
        ));
        let many: Vec<SpectralObservable> = (0..31)
            .map(|i| z.clone().renamed(alloc::format!("Z{i}")))
            .collect();
        let table = ContextTable::new(many, vec![]).unwrap();
        assert!(matches!(
            search_assignments(&table),
            Err(Error::TooManyObservables { count: 31, .. })
        ));
    }

    #[test]
    fn lexicographic_order() {
        let a = pauli_string(&[(0, Axis::Z)], 2).unwrap().renamed("A");
        let b = pauli_string(&[(1, Axis::Z)], 2).unwrap().renamed("B");
        let table = ContextTable::from_names(vec![a, b], &[(Sign::Minus, &["A", "B"])]).unwrap();
        let found = search_assignments(&table).unwrap();
        let tuples: Vec<(i8, i8)> = found
            .iter()
            .map(|s| (s.get("A").unwrap(), s.get("B").unwrap()))
            .collect();
        assert_eq!(tuples, vec![(1, -1), (-1, 1)]);
    }
}
