//! Von Neumann pointer model for a post-selected measurement.
//!
//! The coupling `H = −λ Q A` shifts the pointer momentum by `λa` on the
//! eigenspace of each eigenvalue `a`. After post-selection the pointer
//! momentum wavefunction is
//!
//! ```text
//! φ(P) = Σ_a ⟨post|Π_a|pre⟩ g(P − λa),   g(P) = (πΔ²)^(−1/4) exp(−P²/2Δ²)
//! ```
//!
//! which is evaluated on a uniform grid. Nothing here is perturbative: small
//! `λ` gives a single peak near `λ Re(A_w)`, large `λ` separates the peaks
//! and recovers the ABL branch weights.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::hilbert::{Complex, SpectralObservable};
use crate::pps::PpsEnsemble;
use crate::{Error, Result};

/// Samples per independent RNG stream. Stream `k` produces samples
/// `k·CHUNK_SIZE ..`, so output does not depend on how chunks are scheduled.
pub const CHUNK_SIZE: usize = 1 << 16;

/// Margin, in units of the spread, that must separate the outermost peak
/// from the grid edge.
const EDGE_MARGIN: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerConfig {
    /// The grid spans `[−half_width, half_width]`.
    pub half_width: f64,
    pub points: usize,
    /// Width `Δ` of the initial Gaussian pointer.
    pub spread: f64,
    /// Integrated coupling strength `λ`.
    pub lambda: f64,
}

impl PointerConfig {
    /// Default grid (`L = 10`, 4096 points, `Δ = 1`) at coupling `lambda`.
    pub fn new(lambda: f64) -> Self {
        PointerConfig {
            half_width: 10.0,
            points: 4096,
            spread: 1.0,
            lambda,
        }
    }

    /// Smallest grid of at least the default size whose range covers every
    /// shift `λa` with `|a| ≤ max_abs_eigenvalue` plus a `10Δ` margin.
    pub fn covering(lambda: f64, spread: f64, max_abs_eigenvalue: f64) -> Self {
        let half_width = (10.0 * spread).max((lambda * max_abs_eigenvalue).abs() + 10.0 * spread);
        let min_points = (4.0 * half_width / spread) as usize + 2;
        PointerConfig {
            half_width,
            points: min_points.max(4096),
            spread,
            lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 16 {
            return Err(Error::InvalidPointerConfig("at least 16 grid points are required"));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidPointerConfig("half-width must be positive and finite"));
        }
        if !(self.spread > 0.0 && self.spread.is_finite()) {
            return Err(Error::InvalidPointerConfig("spread must be positive and finite"));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidPointerConfig("coupling must be finite"));
        }
        if self.half_width / self.points as f64 >= self.spread / 4.0 {
            return Err(Error::InvalidPointerConfig("grid too coarse to resolve the pointer"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.points)
            .map(|k| -self.half_width + k as f64 * dx)
            .collect()
    }

    /// Initial pointer momentum wavefunction; `∫|g|² = 1`.
    pub fn gaussian(&self, p: f64) -> f64 {
        let s = self.spread;
        let norm = 1.0 / libm::sqrt(libm::sqrt(core::f64::consts::PI * s * s));
        norm * libm::exp(-(p * p) / (2.0 * s * s))
    }

    fn check_range(&self, max_abs_eigenvalue: f64) -> Result<()> {
        let required = (self.lambda * max_abs_eigenvalue).abs() + EDGE_MARGIN * self.spread;
        if required > self.half_width {
            return Err(Error::GridRange {
                required,
                half_width: self.half_width,
            });
        }
        Ok(())
    }
}

/// Normalized post-selected pointer momentum density on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerDistribution {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    /// `∫|φ|² dP`: probability that the post-selection succeeds.
    pub post_selection_probability: f64,
}

fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, .., last] => dx * (values.iter().sum::<f64>() - 0.5 * (first + last)),
    }
}

impl PointerDistribution {
    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Trapezoidal integral of the density (1 up to rounding).
    pub fn integral(&self) -> f64 {
        trapezoid(&self.density, self.spacing())
    }

    /// Trapezoidal first moment.
    pub fn mean(&self) -> f64 {
        let weighted: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.density)
            .map(|(p, d)| p * d)
            .collect();
        trapezoid(&weighted, self.spacing())
    }

    /// Cumulative trapezoidal integral at each grid point, rescaled to end
    /// exactly at 1.
    pub fn cdf(&self) -> Vec<f64> {
        let dx = self.spacing();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.density.len());
        out.push(0.0);
        for w in self.density.windows(2) {
            acc += 0.5 * dx * (w[0] + w[1]);
            out.push(acc);
        }
        let total = acc;
        out.iter_mut().for_each(|c| *c /= total);
        out
    }

    /// Integral of the piecewise-linear density from the left edge to `x`.
    fn integral_to(&self, x: f64) -> f64 {
        let dx = self.spacing();
        let n = self.grid.len();
        let lo = self.grid[0];
        if x <= lo {
            return 0.0;
        }
        let pos = ((x - lo) / dx).min((n - 1) as f64);
        let k = (pos as usize).min(n - 2);
        let full = trapezoid(&self.density[..=k], dx);
        let t = (x - self.grid[k]).min(dx);
        let (a, b) = (self.density[k], self.density[k + 1]);
        full + t * a + t * t / (2.0 * dx) * (b - a)
    }

    /// Probability mass in `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        self.integral_to(hi) - self.integral_to(lo)
    }

    /// Sample counts binned on the grid: bin `k` is centred on `grid[k]`
    /// with width equal to the spacing; out-of-range samples go to the
    /// edge bins.
    pub fn bin_counts(&self, samples: &[f64]) -> Vec<u64> {
        let dx = self.spacing();
        let n = self.grid.len();
        let mut counts = alloc::vec![0u64; n];
        for &s in samples {
            let idx = libm::floor((s - self.grid[0]) / dx + 0.5);
            let idx = if idx < 0.0 { 0 } else { (idx as usize).min(n - 1) };
            counts[idx] += 1;
        }
        counts
    }
}

/// First moment of a pointer distribution.
pub fn pointer_mean(dist: &PointerDistribution) -> f64 {
    dist.mean()
}

/// Exact post-selected pointer distribution for measuring `obs` with the
/// coupling and grid in `cfg`.
pub fn exact_pointer_distribution(
    pps: &PpsEnsemble,
    obs: &SpectralObservable,
    cfg: &PointerConfig,
) -> Result<PointerDistribution> {
    cfg.validate()?;
    if obs.dim() != pps.dim() {
        return Err(Error::DimensionMismatch {
            expected: pps.dim(),
            found: obs.dim(),
        });
    }
    cfg.check_range(obs.max_abs_eigenvalue())?;
    let branches: Vec<(f64, Complex)> = obs
        .spectrum()
        .iter()
        .map(|(value, proj)| Ok((cfg.lambda * value, pps.amplitude(proj)?)))
        .collect::<Result<_>>()?;
    let grid = cfg.grid();
    let mut density: Vec<f64> = grid
        .iter()
        .map(|&p| {
            branches
                .iter()
                .map(|&(shift, amp)| amp * cfg.gaussian(p - shift))
                .sum::<Complex>()
                .norm_sqr()
        })
        .collect();
    let total = trapezoid(&density, cfg.spacing());
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InconsistentObservable);
    }
    density.iter_mut().for_each(|d| *d /= total);
    Ok(PointerDistribution {
        grid,
        density,
        post_selection_probability: total,
    })
}

/// Inverse-CDF sampler over a tabulated pointer distribution.
#[derive(Debug, Clone)]
pub struct PointerSampler {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl PointerSampler {
    pub fn new(dist: &PointerDistribution) -> Self {
        PointerSampler {
            grid: dist.grid.clone(),
            cdf: dist.cdf(),
        }
    }

    fn invert(&self, u: f64) -> f64 {
        // First index with cdf > u; the sample lies in the cell before it.
        let hi = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let lo = hi - 1;
        let (c0, c1) = (self.cdf[lo], self.cdf[hi]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.grid[lo] + t * (self.grid[hi] - self.grid[lo])
    }

    /// Stream `chunk` of the sample sequence for `seed`: `count` draws from
    /// a ChaCha8 generator seeded with `seed` on stream `chunk`.
    pub fn sample_chunk(&self, seed: u64, chunk: u64, count: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        (0..count)
            .map(|_| {
                let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                self.invert(u)
            })
            .collect()
    }

    /// `n` samples, chunk by chunk. Identical to concatenating
    /// [`sample_chunk`](Self::sample_chunk) over `0..n.div_ceil(CHUNK_SIZE)`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut chunk = 0u64;
        while out.len() < n {
            let count = CHUNK_SIZE.min(n - out.len());
            out.extend(self.sample_chunk(seed, chunk, count));
            chunk += 1;
        }
        out
    }
}

/// `n` seeded draws from the exact pointer distribution.
pub fn sample_pointer(
    pps: &PpsEnsemble,
    obs: &SpectralObservable,
    cfg: &PointerConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::NoSamples);
    }
    let dist = exact_pointer_distribution(pps, obs, cfg)?;
    Ok(PointerSampler::new(&dist).sample(n, seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValueEstimate {
    /// `mean(samples) / λ`.
    pub value: f64,
    /// `Δ / (|λ| √n)`.
    pub standard_error: f64,
    pub samples: usize,
}

/// Weak value read off a finite pointer ensemble.
pub fn weak_value_estimate(samples: &[f64], lambda: f64, spread: f64) -> Result<WeakValueEstimate> {
    if lambda == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    Ok(WeakValueEstimate {
        value: mean / lambda,
        standard_error: spread / (lambda.abs() * libm::sqrt(n as f64)),
        samples: n,
    })
}
