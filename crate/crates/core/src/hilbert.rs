//! Dense complex linear algebra for finite Hilbert spaces.
//!
//! Basis convention: the computational basis is ordered lexicographically
//! with site 0 as the most significant tensor factor, `|↑⟩ = (1, 0)` and
//! `|↓⟩ = (0, 1)`. Observables never go through a numerical eigensolver;
//! they are built directly in spectral form (Pauli strings, projectors or a
//! caller-supplied list of eigenvalue/projector pairs) and validated.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Sub};

use crate::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Largest supported Hilbert-space dimension (six qubits).
pub const MAX_DIM: usize = 64;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Numerical tolerances for structural checks (projector and spectrum
/// validation) and for algebraic identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub algebra: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-10,
            algebra: 1e-12,
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok(())
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// A normalized pure state, optionally annotated with its tensor-factor
/// dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex>,
    factors: Option<Vec<usize>>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, rescaling them to unit norm.
    pub fn normalize(amps: Vec<Complex>) -> Result<Self> {
        check_dim(amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = libm::sqrt(amps.iter().map(|a| a.norm_sqr()).sum::<f64>());
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(StateVector {
            amps: amps.into_iter().map(|a| a / norm).collect(),
            factors: None,
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalize(amps.iter().map(|&a| c(a, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` in a space of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![Complex::default(); dim];
        amps[index] = c(1.0, 0.0);
        Ok(StateVector {
            amps,
            factors: None,
        })
    }

    fn qubit(a: Complex, b: Complex) -> Self {
        StateVector {
            amps: vec![a, b],
            factors: Some(vec![2]),
        }
    }

    pub fn up() -> Self {
        Self::qubit(c(1.0, 0.0), c(0.0, 0.0))
    }

    pub fn down() -> Self {
        Self::qubit(c(0.0, 0.0), c(1.0, 0.0))
    }

    pub fn up_x() -> Self {
        Self::qubit(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0))
    }

    pub fn down_x() -> Self {
        Self::qubit(c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0))
    }

    pub fn up_y() -> Self {
        Self::qubit(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2))
    }

    pub fn down_y() -> Self {
        Self::qubit(c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2))
    }

    /// The `+1` or `-1` eigenstate of a single-qubit Pauli operator.
    pub fn pauli_eigenstate(axis: Axis, positive: bool) -> Self {
        match (axis, positive) {
            (Axis::X, true) => Self::up_x(),
            (Axis::X, false) => Self::down_x(),
            (Axis::Y, true) => Self::up_y(),
            (Axis::Y, false) => Self::down_y(),
            (Axis::Z, true) => Self::up(),
            (Axis::Z, false) => Self::down(),
        }
    }

    /// Attaches tensor-factor dimensions; their product must equal `dim`.
    pub fn with_factors(mut self, factors: Vec<usize>) -> Result<Self> {
        let product: usize = factors.iter().product();
        if product != self.dim() || factors.contains(&0) {
            return Err(Error::InvalidFactors {
                product,
                dim: self.dim(),
            });
        }
        self.factors = Some(factors);
        Ok(self)
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        check_dim(self.dim() * other.dim())?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let left = self.factors.clone().unwrap_or_else(|| vec![self.dim()]);
        let right = other.factors.clone().unwrap_or_else(|| vec![other.dim()]);
        let mut factors = left;
        factors.extend(right);
        Ok(StateVector {
            amps,
            factors: Some(factors),
        })
    }

    /// Tensor product of a list of states, site 0 first.
    pub fn product(states: &[StateVector]) -> Result<Self> {
        let (first, rest) = states
            .split_first()
            .ok_or(Error::UnsupportedDimension(0))?;
        rest.iter().try_fold(first.clone(), |acc, s| acc.tensor(s))
    }

    /// Normalized superposition `Σ cᵢ |ψᵢ⟩`. Factor structure is kept when
    /// all terms agree on it.
    pub fn superpose(terms: &[(Complex, &StateVector)]) -> Result<Self> {
        let dim = terms.first().ok_or(Error::ZeroNorm)?.1.dim();
        let mut amps = vec![Complex::default(); dim];
        for (coeff, state) in terms {
            if state.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: state.dim(),
                });
            }
            for (acc, a) in amps.iter_mut().zip(&state.amps) {
                *acc += coeff * a;
            }
        }
        let mut out = Self::normalize(amps)?;
        let factors = &terms[0].1.factors;
        if terms.iter().all(|(_, s)| &s.factors == factors) {
            out.factors = factors.clone();
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn factors(&self) -> Option<&[usize]> {
        self.factors.as_deref()
    }

    /// `⟨self|ket⟩`.
    pub fn inner(&self, ket: &StateVector) -> Result<Complex> {
        inner(self, ket)
    }
}

/// `⟨bra|ket⟩`, conjugate-linear in `bra`.
pub fn inner(bra: &StateVector, ket: &StateVector) -> Result<Complex> {
    if bra.dim() != ket.dim() {
        return Err(Error::DimensionMismatch {
            expected: bra.dim(),
            found: ket.dim(),
        });
    }
    Ok(dot(&bra.amps, &ket.amps))
}

pub(crate) fn dot(bra: &[Complex], ket: &[Complex]) -> Complex {
    bra.iter().zip(ket).map(|(b, k)| b.conj() * k).sum()
}

/// A square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            entries: vec![Complex::default(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = c(1.0, 0.0);
        }
        op
    }

    /// Builds an operator from `dim * dim` row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<Complex>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Operator { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(dim, entries.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        if ket.dim() != bra.dim() {
            return Err(Error::DimensionMismatch {
                expected: ket.dim(),
                found: bra.dim(),
            });
        }
        let dim = ket.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for k in &ket.amps {
            for b in &bra.amps {
                entries.push(k * b.conj());
            }
        }
        Ok(Operator { dim, entries })
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn projector(state: &StateVector) -> Self {
        Self::outer(state, state).expect("same state")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c(factor, 0.0))
    }

    pub fn kron(&self, other: &Operator) -> Self {
        kron(self, other)
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Residual of the projector conditions `Π² = Π` and `Π = Π†`.
    pub fn projector_residual(&self) -> f64 {
        let square = self * self;
        self.max_abs_diff(&square)
            .max(self.max_abs_diff(&self.adjoint()))
    }

    /// `A|ψ⟩` on raw amplitudes.
    pub(crate) fn apply_raw(&self, ket: &[Complex]) -> Vec<Complex> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(ket)
                    .map(|(a, k)| a * k)
                    .sum()
            })
            .collect()
    }

    /// Unnormalized image `A|ψ⟩`.
    pub fn apply(&self, ket: &StateVector) -> Result<Vec<Complex>> {
        self.check_same_dim(ket.dim())?;
        Ok(self.apply_raw(&ket.amps))
    }

    /// `⟨bra|A|ket⟩`.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> Result<Complex> {
        self.check_same_dim(bra.dim())?;
        self.check_same_dim(ket.dim())?;
        Ok(dot(&bra.amps, &self.apply_raw(&ket.amps)))
    }

    /// `⟨ψ|A|ψ⟩`; real for Hermitian `A`.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex> {
        self.matrix_element(state, state)
    }

    pub(crate) fn check_same_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        Ok(())
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex::default() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Tensor product. Entry `(i·d_b + k, j·d_b + l)` is `a(i, j) · b(k, l)`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = Operator::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a.entries[i * da + j];
            if aij == Complex::default() {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.entries[(i * db + k) * n + (j * db + l)] = aij * b.entries[k * db + l];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn symbol(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_symbol(s: char) -> Option<Self> {
        match s.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Single-qubit Pauli matrix.
pub fn pauli(axis: Axis) -> Operator {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let entries = match axis {
        Axis::X => vec![z, one, one, z],
        Axis::Y => vec![z, -i, i, z],
        Axis::Z => vec![one, z, z, -one],
    };
    Operator { dim: 2, entries }
}

/// `⊗ₛ σ_axis(s)` over `n_sites` qubits, identity on unlisted sites.
pub fn pauli_operator(spec: &[(usize, Axis)], n_sites: usize) -> Result<Operator> {
    if n_sites == 0 || n_sites > 6 {
        return Err(Error::UnsupportedDimension(1usize << n_sites.min(63)));
    }
    let mut axes: Vec<Option<Axis>> = vec![None; n_sites];
    for &(site, axis) in spec {
        if site >= n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
        if axes[site].is_some() {
            return Err(Error::DuplicateSite(site));
        }
        axes[site] = Some(axis);
    }
    let factor = |a: Option<Axis>| a.map(pauli).unwrap_or_else(|| Operator::identity(2));
    let mut op = factor(axes[0]);
    for &a in &axes[1..] {
        op = kron(&op, &factor(a));
    }
    Ok(op)
}

/// Canonical text form of a Pauli string, e.g. `x@0 y@1`; `I` when empty.
pub fn pauli_label(spec: &[(usize, Axis)]) -> String {
    if spec.is_empty() {
        return String::from("I");
    }
    let parts: Vec<String> = spec.iter().map(|(s, a)| format!("{a}@{s}")).collect();
    parts.join(" ")
}

/// Pauli string as a `±1`-valued observable with projectors `(I ± P)/2`.
pub fn pauli_string(spec: &[(usize, Axis)], n_sites: usize) -> Result<SpectralObservable> {
    let op = pauli_operator(spec, n_sites)?;
    let name = pauli_label(spec);
    if spec.is_empty() {
        let id = Operator::identity(op.dim);
        return Ok(SpectralObservable {
            name,
            op,
            spectrum: vec![(1.0, id)],
        });
    }
    Ok(SpectralObservable::involution(name, op))
}

/// A Hermitian observable held in spectral form.
///
/// Invariants: every projector is Hermitian and idempotent, the projectors
/// sum to the identity, eigenvalues are pairwise distinct, and
/// `Σ λᵢ Πᵢ = op`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralObservable {
    name: String,
    op: Operator,
    spectrum: Vec<(f64, Operator)>,
}

impl SpectralObservable {
    /// Validates a spectrum and reconstructs the operator from it.
    pub fn from_spectrum(name: impl Into<String>, spectrum: Vec<(f64, Operator)>) -> Result<Self> {
        Self::from_spectrum_with(name, spectrum, &Tolerances::default())
    }

    pub fn from_spectrum_with(
        name: impl Into<String>,
        spectrum: Vec<(f64, Operator)>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason| Error::InvalidSpectrum {
            name: name.clone(),
            reason,
        };
        let dim = spectrum.first().ok_or_else(|| invalid("empty spectrum"))?.1.dim;
        check_dim(dim)?;
        let mut sum = Operator::zeros(dim);
        let mut op = Operator::zeros(dim);
        for (idx, (value, proj)) in spectrum.iter().enumerate() {
            if proj.dim != dim {
                return Err(invalid("projector dimensions differ"));
            }
            if !value.is_finite() {
                return Err(invalid("non-finite eigenvalue"));
            }
            if proj.projector_residual() > tol.structural {
                return Err(invalid("projector is not a Hermitian idempotent"));
            }
            if spectrum[..idx]
                .iter()
                .any(|(other, _)| (other - value).abs() <= tol.structural)
            {
                return Err(invalid("eigenvalues are not distinct"));
            }
            sum = &sum + proj;
            op = &op + &proj.scale_real(*value);
        }
        if sum.max_abs_diff(&Operator::identity(dim)) > tol.structural {
            return Err(invalid("projectors do not sum to the identity"));
        }
        Ok(SpectralObservable { name, op, spectrum })
    }

    /// Like [`from_spectrum`](Self::from_spectrum) but also checks the
    /// reconstruction against a given operator.
    pub fn new(name: impl Into<String>, op: Operator, spectrum: Vec<(f64, Operator)>) -> Result<Self> {
        let tol = Tolerances::default();
        let obs = Self::from_spectrum_with(name, spectrum, &tol)?;
        if obs.op.dim != op.dim || obs.op.max_abs_diff(&op) > tol.structural {
            return Err(Error::InvalidSpectrum {
                name: obs.name,
                reason: "spectrum does not reconstruct the operator",
            });
        }
        Ok(SpectralObservable { op, ..obs })
    }

    /// Observable for an operator with `P² = I`, with projectors `(I ± P)/2`.
    /// The caller is responsible for `P` being a Hermitian involution.
    pub(crate) fn involution(name: String, op: Operator) -> Self {
        let id = Operator::identity(op.dim);
        let plus = (&id + &op).scale_real(0.5);
        let minus = (&id - &op).scale_real(0.5);
        SpectralObservable {
            name,
            op,
            spectrum: vec![(1.0, plus), (-1.0, minus)],
        }
    }

    /// `±1` observable from any Hermitian involution, validated.
    pub fn from_involution(name: impl Into<String>, op: Operator) -> Result<Self> {
        let tol = Tolerances::default();
        let name = name.into();
        let square = &op * &op;
        if !op.is_hermitian(tol.structural)
            || square.max_abs_diff(&Operator::identity(op.dim)) > tol.structural
        {
            return Err(Error::InvalidSpectrum {
                name,
                reason: "operator is not a Hermitian involution",
            });
        }
        let obs = Self::involution(name, op);
        // P = ±I leaves one projector empty.
        let spectrum: Vec<_> = obs
            .spectrum
            .into_iter()
            .filter(|(_, p)| p.norm() > tol.structural)
            .collect();
        Ok(SpectralObservable { spectrum, ..obs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn spectrum(&self) -> &[(f64, Operator)] {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.op.dim
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.spectrum.iter().map(|(v, _)| *v)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Residual `max |Σ λᵢ Πᵢ − op|` of the spectral reconstruction.
    pub fn reconstruction_residual(&self) -> f64 {
        let rebuilt = self
            .spectrum
            .iter()
            .fold(Operator::zeros(self.op.dim), |acc, (v, p)| &acc + &p.scale_real(*v));
        rebuilt.max_abs_diff(&self.op)
    }
}

/// Yes/no observable for a projector: eigenvalue 1 on `proj`, 0 on `I − proj`.
/// The identity and the zero projector give a single-entry spectrum.
pub fn projector_observable(name: impl Into<String>, proj: Operator) -> Result<SpectralObservable> {
    let tol = Tolerances::default();
    let residual = proj.projector_residual();
    if residual > tol.structural {
        return Err(Error::NotProjector { residual });
    }
    let dim = proj.dim;
    let id = Operator::identity(dim);
    let complement = &id - &proj;
    let mut spectrum = Vec::with_capacity(2);
    if proj.norm() > tol.structural {
        spectrum.push((1.0, proj.clone()));
    }
    if complement.norm() > tol.structural {
        spectrum.push((0.0, complement));
    }
    if spectrum.is_empty() {
        return Err(Error::NotProjector { residual });
    }
    let obs = SpectralObservable::from_spectrum(name, spectrum)?;
    Ok(SpectralObservable { op: proj, ..obs })
}
