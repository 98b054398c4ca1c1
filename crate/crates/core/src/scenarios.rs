//! Named pre/post-selected experiments with their expected results.
//!
//! Each [`Scenario`] bundles an ensemble, the observables it talks about and
//! a list of [`Expectation`]s. [`run_scenario`] recomputes every expected
//! value through the generic `pps` and `contextuality` operations, so the
//! literals here are checked rather than trusted.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::contextuality::{search_assignments, ContextTable, Sign};
use crate::hilbert::{
    pauli_operator, pauli_string, projector_observable, Axis, Complex, Operator,
    SpectralObservable, StateVector,
};
use crate::pps::{abl, is_definite, sequential_distribution, weak_value, PpsEnsemble};
use crate::{Error, Result};

/// Exact checks pass when the computed value is this close to the literal.
pub const PASS_TOLERANCE: f64 = 1e-9;

pub const SCENARIO_NAMES: [&str; 5] = [
    "three_box",
    "mermin_nonet_a",
    "mermin_nonet_b",
    "epr_ancilla",
    "ghz",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonetVariant {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainEvent {
    /// One specific tuple of outcomes, in measurement order.
    Outcomes(Vec<f64>),
    /// Any tuple whose outcome product equals the value.
    Product(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// ABL probability that `observable` yields `eigenvalue`.
    Abl { observable: String, eigenvalue: f64 },
    /// Weak value of `observable`; the error includes any imaginary part.
    Weak { observable: String },
    /// Eigenvalue an ideal measurement is certain to give.
    Definite { observable: String },
    /// Probability of `event` for the chain measured in order.
    Sequential { chain: Vec<String>, event: ChainEvent },
    /// Number of noncontextual assignments of a table.
    Search { table: String },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::Abl { .. } => "abl",
            Check::Weak { .. } => "weak",
            Check::Definite { .. } => "definite",
            Check::Sequential { .. } => "sequential",
            Check::Search { .. } => "search",
        }
    }

    pub fn target(&self) -> String {
        match self {
            Check::Abl {
                observable,
                eigenvalue,
            } => format!("P({observable} = {eigenvalue})"),
            Check::Weak { observable } | Check::Definite { observable } => observable.clone(),
            Check::Sequential { chain, event } => {
                let chain = chain.join(", ");
                match event {
                    ChainEvent::Outcomes(v) => format!("P([{chain}] = {v:?})"),
                    ChainEvent::Product(p) => format!("P(product [{chain}] = {p})"),
                }
            }
            Check::Search { table } => format!("assignments({table})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub check: Check,
    pub expected: f64,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub pps: PpsEnsemble,
    pub observables: Vec<SpectralObservable>,
    pub tables: Vec<(String, ContextTable)>,
    pub expected: Vec<Expectation>,
}

impl Scenario {
    pub fn observable(&self, name: &str) -> Option<&SpectralObservable> {
        self.observables.iter().find(|o| o.name() == name)
    }

    fn require(&self, name: &str) -> Result<&SpectralObservable> {
        self.observable(name)
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    fn evaluate(&self, check: &Check) -> Result<Option<f64>> {
        match check {
            Check::Abl {
                observable,
                eigenvalue,
            } => Ok(Some(abl(&self.pps, self.require(observable)?)?.probability(&[*eigenvalue]))),
            Check::Weak { observable } => {
                let wv = weak_value(&self.pps, self.require(observable)?.op())?;
                Ok(Some(wv.re()))
            }
            Check::Definite { observable } => {
                is_definite(&self.pps, self.require(observable)?, PASS_TOLERANCE)
            }
            Check::Sequential { chain, event } => {
                let chain = chain
                    .iter()
                    .map(|n| self.require(n))
                    .collect::<Result<Vec<_>>>()?;
                let dist = sequential_distribution(&self.pps, &chain)?;
                Ok(Some(match event {
                    ChainEvent::Outcomes(v) => dist.probability(v),
                    ChainEvent::Product(p) => dist.probability_of_product(*p),
                }))
            }
            Check::Search { table } => {
                let (_, table) = self
                    .tables
                    .iter()
                    .find(|(n, _)| n == table)
                    .ok_or_else(|| Error::InvalidTable(format!("unknown table `{table}`")))?;
                Ok(Some(search_assignments(table)?.len() as f64))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub kind: String,
    pub target: String,
    pub expected: f64,
    /// `None` when the check has no value, e.g. an indefinite observable.
    pub computed: Option<f64>,
    pub error: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub entries: Vec<ReportEntry>,
    pub overall: bool,
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioReport> {
    let mut entries = Vec::with_capacity(s.expected.len());
    for exp in &s.expected {
        let computed = s.evaluate(&exp.check).map_err(|e| Error::InScenario {
            scenario: s.name.clone(),
            target: exp.check.target(),
            source: Box::new(e),
        })?;
        let error = match (&exp.check, computed) {
            (Check::Weak { observable }, Some(_)) => {
                let op = s.require(observable)?.op();
                let wv = weak_value(&s.pps, op)?;
                Some((wv.value - Complex::new(exp.expected, 0.0)).norm())
            }
            (_, Some(c)) => Some((c - exp.expected).abs()),
            (_, None) => None,
        };
        entries.push(ReportEntry {
            kind: exp.check.kind().to_string(),
            target: exp.check.target(),
            expected: exp.expected,
            computed,
            error,
            pass: error.is_some_and(|e| e <= PASS_TOLERANCE),
        });
    }
    Ok(ScenarioReport {
        scenario: s.name.clone(),
        overall: entries.iter().all(|e| e.pass),
        entries,
    })
}

pub fn scenario(name: &str) -> Option<Scenario> {
    Some(match name {
        "three_box" => three_box(),
        "mermin_nonet_a" => mermin_nonet(NonetVariant::A),
        "mermin_nonet_b" => mermin_nonet(NonetVariant::B),
        "epr_ancilla" => epr_ancilla(),
        "ghz" => ghz(),
        _ => return None,
    })
}

fn pauli(name: &str, spec: &[(usize, Axis)], n_sites: usize) -> SpectralObservable {
    pauli_string(spec, n_sites)
        .expect("built-in Pauli string")
        .renamed(name)
}

fn projector(name: &str, op: Operator) -> SpectralObservable {
    projector_observable(name, op).expect("built-in projector")
}

fn ensemble(pre: StateVector, post: StateVector) -> PpsEnsemble {
    PpsEnsemble::new(pre, post).expect("built-in ensemble has a large overlap")
}

fn weak(observable: &str, expected: f64) -> Expectation {
    Expectation {
        check: Check::Weak {
            observable: observable.to_string(),
        },
        expected,
    }
}

fn definite(observable: &str, expected: f64) -> Expectation {
    Expectation {
        check: Check::Definite {
            observable: observable.to_string(),
        },
        expected,
    }
}

fn abl_check(observable: &str, eigenvalue: f64, expected: f64) -> Expectation {
    Expectation {
        check: Check::Abl {
            observable: observable.to_string(),
            eigenvalue,
        },
        expected,
    }
}

fn sequential(chain: &[&str], event: ChainEvent, expected: f64) -> Expectation {
    Expectation {
        check: Check::Sequential {
            chain: chain.iter().map(|s| s.to_string()).collect(),
            event,
        },
        expected,
    }
}

/// `(I + a·S)(I + b·T)/4` for commuting `±1` observables `S`, `T`.
fn pair_projector(s: &Operator, t: &Operator, a: f64, b: f64) -> Operator {
    let id = Operator::identity(s.dim());
    let left = &id + &s.scale_real(a);
    let right = &id + &t.scale_real(b);
    (&left * &right).scale_real(0.25)
}

fn sign_label(v: f64) -> char {
    if v > 0.0 {
        '+'
    } else {
        '-'
    }
}

/// Occupation projectors `N_ab` over two commuting `±1` observables, in the
/// order `++, +-, -+, --`.
fn occupations(s: &Operator, t: &Operator) -> Vec<SpectralObservable> {
    let mut out = Vec::with_capacity(4);
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            let name = format!("N{}{}", sign_label(a), sign_label(b));
            out.push(projector(&name, pair_projector(s, t, a, b)));
        }
    }
    out
}

/// A particle in one of three boxes, pre-selected in `(|A⟩+|B⟩+|C⟩)/√3`
/// and post-selected in `(|A⟩+|B⟩−|C⟩)/√3`.
pub fn three_box() -> Scenario {
    let pre = StateVector::from_real(&[1.0, 1.0, 1.0]).expect("nonzero");
    let post = StateVector::from_real(&[1.0, 1.0, -1.0]).expect("nonzero");
    let boxes: Vec<Operator> = (0..3)
        .map(|i| Operator::projector(&StateVector::basis(3, i).expect("in range")))
        .collect();
    let total = &(&boxes[0] + &boxes[1]) + &boxes[2];
    let observables = vec![
        projector("P_A", boxes[0].clone()),
        projector("P_B", boxes[1].clone()),
        projector("P_C", boxes[2].clone()),
        projector("P_A+P_B+P_C", total),
    ];
    let expected = vec![
        abl_check("P_A", 1.0, 1.0),
        abl_check("P_B", 1.0, 1.0),
        abl_check("P_C", 1.0, 0.2),
        definite("P_A", 1.0),
        definite("P_B", 1.0),
        weak("P_A", 1.0),
        weak("P_B", 1.0),
        weak("P_C", -1.0),
        weak("P_A+P_B+P_C", 1.0),
        sequential(&["P_A", "P_B"], ChainEvent::Outcomes(vec![1.0, 1.0]), 0.0),
    ];
    Scenario {
        name: "three_box".to_string(),
        pps: ensemble(pre, post),
        observables,
        tables: Vec::new(),
        expected,
    }
}

/// Two spins with the observables of the 3×3 square. Sites 0 and 1 are
/// particles 1 and 2.
///
/// Variant `A`: pre `σ¹ₓ = σ²ₓ = +1`, post `σ¹ᵧ = σ²ᵧ = +1`.
/// Variant `B`: pre `σ¹ₓ = σ²ᵧ = +1`, post `σ¹ᵧ = σ²ₓ = +1`.
pub fn mermin_nonet(variant: NonetVariant) -> Scenario {
    use Axis::{X, Y, Z};
    let state = |a: Axis, b: Axis| {
        StateVector::product(&[
            StateVector::pauli_eigenstate(a, true),
            StateVector::pauli_eigenstate(b, true),
        ])
        .expect("qubit product")
    };
    let (pre, post) = match variant {
        NonetVariant::A => (state(X, X), state(Y, Y)),
        NonetVariant::B => (state(X, Y), state(Y, X)),
    };
    let s1 = pauli("X1Y2", &[(0, X), (1, Y)], 2);
    let s2 = pauli("X2Y1", &[(1, X), (0, Y)], 2);
    let mut observables = vec![
        pauli("X1", &[(0, X)], 2),
        pauli("X2", &[(1, X)], 2),
        pauli("Y1", &[(0, Y)], 2),
        pauli("Y2", &[(1, Y)], 2),
        pauli("X1X2", &[(0, X), (1, X)], 2),
        pauli("Y1Y2", &[(0, Y), (1, Y)], 2),
        pauli("Z1Z2", &[(0, Z), (1, Z)], 2),
    ];
    let occ = occupations(s1.op(), s2.op());
    observables.push(s1);
    observables.push(s2);
    observables.extend(occ);

    let (name, expected) = match variant {
        NonetVariant::A => {
            let mut expected: Vec<Expectation> =
                ["X1", "X2", "Y1", "Y2", "X1X2", "Y1Y2", "X1Y2", "X2Y1"]
                    .iter()
                    .map(|n| definite(n, 1.0))
                    .collect();
            expected.push(definite("Z1Z2", -1.0));
            expected.push(weak("Z1Z2", -1.0));
            expected.push(weak("X1Y2", 1.0));
            expected.push(weak("X2Y1", 1.0));
            expected.push(sequential(
                &["X1", "Y2", "X2", "Y1"],
                ChainEvent::Product(-1.0),
                1.0,
            ));
            for (n, v) in [("N++", 0.5), ("N+-", 0.5), ("N-+", 0.5), ("N--", -0.5)] {
                expected.push(weak(n, v));
            }
            ("mermin_nonet_a", expected)
        }
        NonetVariant::B => {
            let expected = vec![
                definite("X1", 1.0),
                definite("Y2", 1.0),
                definite("Y1", 1.0),
                definite("X2", 1.0),
                weak("Z1Z2", 1.0),
            ];
            ("mermin_nonet_b", expected)
        }
    };
    Scenario {
        name: name.to_string(),
        pps: ensemble(pre, post),
        observables,
        tables: Vec::new(),
        expected,
    }
}

/// System spin (site 0) entangled with an ancilla (site 1) whose `f⁰` and
/// `f¹` are the ancilla's `σ_z` and `σ_x`. Pre-selected in
/// `(|↑⟩|f⁰=−1⟩ − |↓⟩|f⁰=+1⟩)/√2`, post-selected in `|σ¹ₓ=+1⟩|f⁰=+1⟩`.
pub fn epr_ancilla() -> Scenario {
    use Axis::{X, Z};
    let up_down = StateVector::product(&[StateVector::up(), StateVector::down()]).expect("qubits");
    let down_up = StateVector::product(&[StateVector::down(), StateVector::up()]).expect("qubits");
    let pre = StateVector::superpose(&[
        (Complex::new(1.0, 0.0), &up_down),
        (Complex::new(-1.0, 0.0), &down_up),
    ])
    .expect("orthogonal terms");
    let post = StateVector::product(&[StateVector::up_x(), StateVector::up()]).expect("qubits");

    let sz = pauli("Z1", &[(0, Z)], 2);
    let f1 = pauli("F1", &[(1, X)], 2);
    let mut observables = vec![
        pauli("X1", &[(0, X)], 2),
        pauli("F0", &[(1, Z)], 2),
        pauli("F1Z1", &[(0, Z), (1, X)], 2),
        pauli("X1F0", &[(0, X), (1, Z)], 2),
    ];
    let occ = occupations(sz.op(), f1.op());
    observables.insert(0, f1);
    observables.insert(0, sz);
    observables.extend(occ);

    let expected = vec![
        definite("X1F0", 1.0),
        weak("X1F0", 1.0),
        weak("Z1", -1.0),
        weak("F1", -1.0),
        weak("F1Z1", -1.0),
        weak("N++", -0.5),
        weak("N+-", 0.5),
        weak("N-+", 0.5),
        weak("N--", 0.5),
    ];
    Scenario {
        name: "epr_ancilla".to_string(),
        pps: ensemble(pre, post),
        observables,
        tables: Vec::new(),
        expected,
    }
}

/// `(|↑↑↑⟩ − |↓↓↓⟩)/√2`.
pub fn ghz_state() -> StateVector {
    let up = StateVector::product(&[StateVector::up(), StateVector::up(), StateVector::up()])
        .expect("qubits");
    let down = StateVector::product(&[StateVector::down(), StateVector::down(), StateVector::down()])
        .expect("qubits");
    StateVector::superpose(&[(Complex::new(1.0, 0.0), &up), (Complex::new(-1.0, 0.0), &down)])
        .expect("orthogonal terms")
}

/// Three spins pre-selected in the GHZ state and post-selected with every
/// `σₓ = −1`. Occupations `N_abc` count spins in the `σ_y = a, b, c` boxes.
pub fn ghz() -> Scenario {
    use Axis::Y;
    let post = StateVector::product(&[
        StateVector::down_x(),
        StateVector::down_x(),
        StateVector::down_x(),
    ])
    .expect("qubits");
    let mut observables = vec![
        pauli("Y1Y2", &[(0, Y), (1, Y)], 3),
        pauli("Y2Y3", &[(1, Y), (2, Y)], 3),
        pauli("Y1Y3", &[(0, Y), (2, Y)], 3),
    ];
    let id = Operator::identity(8);
    let mut expected = vec![weak("Y1Y2", -1.0), weak("Y2Y3", -1.0), weak("Y1Y3", -1.0)];
    for code in 0..8u32 {
        let signs: Vec<f64> = (0..3)
            .map(|k| if code >> (2 - k) & 1 == 0 { 1.0 } else { -1.0 })
            .collect();
        let mut op = id.clone();
        for (site, &s) in signs.iter().enumerate() {
            let y = pauli_operator(&[(site, Y)], 3).expect("site in range");
            op = &op * &(&id + &y.scale_real(s)).scale_real(0.5);
        }
        let name: String = core::iter::once('N')
            .chain(signs.iter().map(|&s| sign_label(s)))
            .collect();
        let all_equal = signs.iter().all(|&s| s == signs[0]);
        expected.push(weak(&name, if all_equal { -0.25 } else { 0.25 }));
        observables.push(projector(&name, op));
    }
    expected.push(Expectation {
        check: Check::Search {
            table: "ghz".to_string(),
        },
        expected: 0.0,
    });
    Scenario {
        name: "ghz".to_string(),
        pps: ensemble(ghz_state(), post),
        observables,
        tables: vec![("ghz".to_string(), ghz_table())],
        expected,
    }
}

/// Nine two-spin observables in three rows and three columns. Rows multiply
/// to `+I`, the first two columns to `+I` and the last column to `−I`.
pub fn mermin_square_table() -> ContextTable {
    use Axis::{X, Y, Z};
    let observables = vec![
        pauli("X1", &[(0, X)], 2),
        pauli("X2", &[(1, X)], 2),
        pauli("X1X2", &[(0, X), (1, X)], 2),
        pauli("Y2", &[(1, Y)], 2),
        pauli("Y1", &[(0, Y)], 2),
        pauli("Y1Y2", &[(0, Y), (1, Y)], 2),
        pauli("X1Y2", &[(0, X), (1, Y)], 2),
        pauli("X2Y1", &[(1, X), (0, Y)], 2),
        pauli("Z1Z2", &[(0, Z), (1, Z)], 2),
    ];
    ContextTable::from_names(
        observables,
        &[
            (Sign::Plus, &["X1", "X2", "X1X2"]),
            (Sign::Plus, &["Y2", "Y1", "Y1Y2"]),
            (Sign::Plus, &["X1Y2", "X2Y1", "Z1Z2"]),
            (Sign::Plus, &["X1", "Y2", "X1Y2"]),
            (Sign::Plus, &["X2", "Y1", "X2Y1"]),
            (Sign::Minus, &["X1X2", "Y1Y2", "Z1Z2"]),
        ],
    )
    .expect("built-in table")
}

/// Six single-spin observables whose products `A₁ = σ¹ₓσ²ᵧσ³ᵧ`,
/// `A₂ = σ¹ᵧσ²ₓσ³ᵧ`, `A₃ = σ¹ᵧσ²ᵧσ³ₓ` act as `+1` and `A₄ = σ¹ₓσ²ₓσ³ₓ` as
/// `−1` on the GHZ state.
pub fn ghz_table() -> ContextTable {
    use Axis::{X, Y};
    let observables = vec![
        pauli("X1", &[(0, X)], 3),
        pauli("X2", &[(1, X)], 3),
        pauli("X3", &[(2, X)], 3),
        pauli("Y1", &[(0, Y)], 3),
        pauli("Y2", &[(1, Y)], 3),
        pauli("Y3", &[(2, Y)], 3),
    ];
    ContextTable::from_names(
        observables,
        &[
            (Sign::Plus, &["X1", "Y2", "Y3"]),
            (Sign::Plus, &["Y1", "X2", "Y3"]),
            (Sign::Plus, &["Y1", "Y2", "X3"]),
            (Sign::Minus, &["X1", "X2", "X3"]),
        ],
    )
    .and_then(|t| t.with_state(ghz_state()))
    .expect("built-in table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::inner;

    fn report(s: &Scenario) -> ScenarioReport {
        run_scenario(s).unwrap()
    }

    #[test]
    fn passing_scenarios() {
        for name in ["three_box", "mermin_nonet_b", "epr_ancilla", "ghz"] {
            let r = report(&scenario(name).unwrap());
            let failed: Vec<_> = r.entries.iter().filter(|e| !e.pass).collect();
            assert!(failed.is_empty(), "{name}: {failed:?}");
            assert!(r.overall);
        }
    }

    #[test]
    fn nonet_sequential_product_is_not_certain() {
        let r = report(&mermin_nonet(NonetVariant::A));
        for e in &r.entries {
            if e.kind == "sequential" {
                assert!((e.computed.unwrap() - 0.5).abs() < 1e-12);
                assert!(!e.pass);
            } else {
                assert!(e.pass, "{e:?}");
            }
        }
        assert!(!r.overall);
    }

    #[test]
    fn overlaps_are_large() {
        for name in SCENARIO_NAMES {
            let s = scenario(name).unwrap();
            assert!(s.pps.overlap().norm() > 0.1, "{name}");
        }
        assert!((three_box().pps.overlap().re - 1.0 / 3.0).abs() < 1e-12);
        assert!((ghz().pps.overlap().re - 0.5).abs() < 1e-12);
        assert!((epr_ancilla().pps.overlap().re + 0.5).abs() < 1e-12);
        assert!((mermin_nonet(NonetVariant::A).pps.overlap().norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn definite_observables_have_matching_weak_values() {
        for name in SCENARIO_NAMES {
            let s = scenario(name).unwrap();
            for obs in &s.observables {
                if let Some(v) = is_definite(&s.pps, obs, 1e-9).unwrap_or(None) {
                    let wv = weak_value(&s.pps, obs.op()).unwrap();
                    assert!((wv.value - Complex::new(v, 0.0)).norm() < 1e-9, "{name}/{}", obs.name());
                }
            }
        }
    }

    #[test]
    fn occupations_sum_to_one() {
        for name in ["mermin_nonet_a", "mermin_nonet_b", "epr_ancilla", "ghz"] {
            let s = scenario(name).unwrap();
            let sum: Complex = s
                .observables
                .iter()
                .filter(|o| o.name().starts_with('N'))
                .map(|o| weak_value(&s.pps, o.op()).unwrap().value)
                .sum();
            assert!((sum - Complex::new(1.0, 0.0)).norm() < 1e-12, "{name}: {sum}");
        }
    }

    #[test]
    fn ghz_state_eigenvalues() {
        let psi = ghz_state();
        let post = ghz().pps.post().clone();
        assert!((inner(&post, &psi).unwrap().re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn corrupted_literal_fails_with_magnitude() {
        let mut s = three_box();
        s.expected = vec![weak("P_C", -0.9)];
        let r = report(&s);
        assert!(!r.overall);
        assert!((r.entries[0].error.unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn unknown_observable_names_scenario() {
        let mut s = three_box();
        s.expected = vec![weak("P_D", 1.0)];
        match run_scenario(&s) {
            Err(Error::InScenario { scenario, source, .. }) => {
                assert_eq!(scenario, "three_box");
                assert_eq!(*source, Error::UnknownObservable("P_D".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn indefinite_observable_reports_no_value() {
        let mut s = three_box();
        s.expected = vec![definite("P_C", 0.0)];
        let r = report(&s);
        assert_eq!(r.entries[0].computed, None);
        assert!(!r.entries[0].pass);
    }
}
