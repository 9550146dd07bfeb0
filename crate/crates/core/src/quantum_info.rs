//! Compound systems: bipartite pure states, reduced density matrices,
//! Schmidt decomposition, pointer-basis decoherence and seeded sampling of
//! measurement outcomes.
//!
//! A [`BipartiteState`] on `H_A ⊗ H_B` is stored as its `d_A × d_B`
//! amplitude matrix `M[a,b]`; flattened vectors and density matrices use the
//! index `a·d_B + b`.
//!
//! The weights `|f(λ)|²` produced here are tested with ordinary frequency
//! statistics, even where the surrounding discussion calls them existential
//! weights rather than probabilities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::{Float, One, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::fock::{FockVector, Statistics};
use crate::scalar::{self, LinalgReal};

/// Name of the outcome generator, recorded in run metadata.
pub const GENERATOR_NAME: &str = "rand_chacha::ChaCha8Rng";

/// Draws per independent generator stream in [`sample_outcomes`].
pub const SAMPLE_CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Trace, Hermiticity and positivity tolerance: `1e-12`, widened to a few
/// ulps for single precision.
fn density_tolerance<T: LinalgReal>() -> T {
    Float::max(scalar::real(1e-12), T::epsilon() * scalar::real(64.0))
}

fn vector_norm<T: LinalgReal>(v: &[Complex<T>]) -> T {
    Float::sqrt(v.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b))
}

fn ensure_unit<T: LinalgReal>(v: &[Complex<T>]) -> Result<()> {
    let norm = vector_norm(v);
    if scalar::abs(norm - T::one()) > scalar::norm_tolerance() {
        return Err(Error::NotNormalized { norm: scalar::to_f64(norm) });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState<T: LinalgReal> {
    amplitudes: DMatrix<Complex<T>>,
}

impl<T: LinalgReal> BipartiteState<T> {
    pub fn new(amplitudes: DMatrix<Complex<T>>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b);
        if scalar::abs(Float::sqrt(norm) - T::one()) > scalar::norm_tolerance() {
            return Err(Error::NotNormalized { norm: scalar::to_f64(Float::sqrt(norm)) });
        }
        Ok(Self { amplitudes })
    }

    /// Normalize an arbitrary nonzero amplitude matrix.
    pub fn normalized(amplitudes: DMatrix<Complex<T>>) -> Result<Self> {
        let norm = Float::sqrt(amplitudes.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b));
        if norm <= scalar::norm_tolerance() {
            return Err(Error::ZeroNorm("bipartite superposition vanishes".into()));
        }
        let inv = Complex::new(Float::recip(norm), T::zero());
        Ok(Self { amplitudes: amplitudes.map(|c| c * inv) })
    }

    pub fn product(phi: &[Complex<T>], psi: &[Complex<T>]) -> Result<Self> {
        ensure_unit(phi)?;
        ensure_unit(psi)?;
        Self::new(outer(phi, psi))
    }

    pub fn amplitudes(&self) -> &DMatrix<Complex<T>> {
        &self.amplitudes
    }

    pub fn dims(&self) -> (usize, usize) {
        self.amplitudes.shape()
    }

    /// Flattened state vector with index `a·d_B + b`.
    pub fn to_vector(&self) -> Vec<Complex<T>> {
        let (da, db) = self.dims();
        (0..da * db).map(|i| self.amplitudes[(i / db, i % db)]).collect()
    }
}

fn outer<T: LinalgReal>(phi: &[Complex<T>], psi: &[Complex<T>]) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(phi.len(), psi.len(), |a, b| phi[a] * psi[b])
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: LinalgReal> {
    rho: DMatrix<Complex<T>>,
}

impl<T: LinalgReal> DensityMatrix<T> {
    /// Validate trace, Hermiticity and positivity.
    pub fn new(rho: DMatrix<Complex<T>>) -> Result<Self> {
        let dm = Self { rho };
        dm.validate()?;
        Ok(dm)
    }

    /// `|v⟩⟨v|` for a unit vector.
    pub fn pure(v: &[Complex<T>]) -> Result<Self> {
        ensure_unit(v)?;
        let col = DVector::from_column_slice(v);
        Ok(Self { rho: &col * col.adjoint() })
    }

    pub fn validate(&self) -> Result<()> {
        let tol = density_tolerance::<T>();
        if !self.rho.is_square() {
            return Err(Error::InvalidParameter("density matrix must be square".into()));
        }
        let trace = self.trace();
        if scalar::abs(trace.re - T::one()) > tol || scalar::abs(trace.im) > tol {
            return Err(Error::InvalidParameter(format!("trace {trace} differs from 1")));
        }
        let herm = (&self.rho - self.rho.adjoint()).iter().map(|c| c.norm()).fold(T::zero(), Float::max);
        if herm > tol {
            return Err(Error::InvalidParameter(format!("not Hermitian (deviation {herm:e})")));
        }
        let min = self.eigenvalues().into_iter().fold(T::infinity(), Float::min);
        if min < -tol {
            return Err(Error::InvalidParameter(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> Complex<T> {
        self.rho.trace()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        (&self.rho * &self.rho).trace().re
    }

    /// Real diagonal in the stored basis.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut values: Vec<T> = self.rho.clone().symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        values
    }

    /// `−tr ρ ln ρ` from the eigenvalues.
    pub fn entropy(&self) -> T {
        shannon(self.eigenvalues().into_iter())
    }

    /// `⟨v, ρ v⟩` for a unit vector `v`.
    pub fn projector_weight(&self, v: &[Complex<T>]) -> T {
        let col = DVector::from_column_slice(v);
        (col.adjoint() * &self.rho * &col)[(0, 0)].re
    }

    pub fn max_off_diagonal(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    worst = Float::max(worst, self.rho[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// Partial trace of a state on `H_A ⊗ H_B` with the given dimensions,
    /// keeping `keep`.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<Self> {
        let (da, db) = dims;
        if da * db != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), got: da * db });
        }
        let rho = match keep {
            Subsystem::A => DMatrix::from_fn(da, da, |a, a2| {
                (0..db).fold(Complex::zero(), |acc, b| acc + self.rho[(a * db + b, a2 * db + b)])
            }),
            Subsystem::B => DMatrix::from_fn(db, db, |b, b2| {
                (0..da).fold(Complex::zero(), |acc, a| acc + self.rho[(a * db + b, a * db + b2)])
            }),
        };
        Ok(Self { rho })
    }
}

/// `−Σ p ln p` over strictly positive weights.
fn shannon<T: LinalgReal>(weights: impl Iterator<Item = T>) -> T {
    weights.filter(|&w| w > T::epsilon()).fold(T::zero(), |acc, w| acc - w * Float::ln(w))
}

/// `ρ(λ) = |f(λ)|²` for normalized expansion coefficients.
pub fn born_distribution<T: LinalgReal>(f: &[Complex<T>]) -> Result<Vec<T>> {
    ensure_unit(f)?;
    Ok(f.iter().map(|c| c.norm_sqr()).collect())
}

/// Normalized `φ₁⊗ψ₁ + φ₂⊗ψ₂`; the `φ`s (and `ψ`s) need not be orthogonal.
pub fn entangled_pair<T: LinalgReal>(
    phi1: &[Complex<T>],
    phi2: &[Complex<T>],
    psi1: &[Complex<T>],
    psi2: &[Complex<T>],
) -> Result<BipartiteState<T>> {
    for v in [phi1, phi2, psi1, psi2] {
        ensure_unit(v)?;
    }
    if phi1.len() != phi2.len() {
        return Err(Error::LengthMismatch { expected: phi1.len(), got: phi2.len() });
    }
    if psi1.len() != psi2.len() {
        return Err(Error::LengthMismatch { expected: psi1.len(), got: psi2.len() });
    }
    BipartiteState::normalized(outer(phi1, psi1) + outer(phi2, psi2))
}

pub fn reduced_density<T: LinalgReal>(s: &BipartiteState<T>, keep: Subsystem) -> DensityMatrix<T> {
    let m = &s.amplitudes;
    let rho = match keep {
        Subsystem::A => m * m.adjoint(),
        Subsystem::B => m.transpose() * m.map(|c| c.conj()),
    };
    DensityMatrix { rho }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schmidt<T: LinalgReal> {
    /// Nonincreasing, nonnegative.
    pub coefficients: Vec<T>,
    /// `−Σ c² ln c²`.
    pub entropy: T,
}

impl<T: LinalgReal> Schmidt<T> {
    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: T) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }
}

/// Singular values of the amplitude matrix.
pub fn schmidt<T: LinalgReal>(s: &BipartiteState<T>) -> Schmidt<T> {
    let mut coefficients: Vec<T> = s.amplitudes.clone().singular_values().iter().copied().collect();
    coefficients.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    let entropy = shannon(coefficients.iter().map(|&c| c * c));
    Schmidt { coefficients, entropy }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Conditional<T: LinalgReal> {
    pub state: Vec<Complex<T>>,
    pub probability: T,
}

/// State of B after finding A in `outcome`, with the probability of that
/// outcome.
pub fn conditional_state<T: LinalgReal>(s: &BipartiteState<T>, outcome: &[Complex<T>]) -> Result<Conditional<T>> {
    let (da, db) = s.dims();
    if outcome.len() != da {
        return Err(Error::LengthMismatch { expected: da, got: outcome.len() });
    }
    ensure_unit(outcome)?;
    let contracted: Vec<Complex<T>> = (0..db)
        .map(|b| (0..da).fold(Complex::zero(), |acc, a| acc + outcome[a].conj() * s.amplitudes[(a, b)]))
        .collect();
    let probability = contracted.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b);
    if probability <= scalar::real(1e-14) {
        return Err(Error::ZeroProbability(scalar::to_f64(probability)));
    }
    let inv = Complex::new(Float::recip(Float::sqrt(probability)), T::zero());
    Ok(Conditional { state: contracted.into_iter().map(|c| c * inv).collect(), probability })
}

/// Observable eigenvalues, the system's expansion coefficients in the
/// eigenbasis, and the apparatus energy scale.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementModel<T: LinalgReal> {
    eigenvalues: Vec<T>,
    amplitudes: Vec<Complex<T>>,
    apparatus_energy: T,
}

impl<T: LinalgReal> MeasurementModel<T> {
    pub fn new(eigenvalues: Vec<T>, amplitudes: Vec<Complex<T>>, apparatus_energy: T) -> Result<Self> {
        if eigenvalues.len() != amplitudes.len() {
            return Err(Error::LengthMismatch { expected: eigenvalues.len(), got: amplitudes.len() });
        }
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameter("measurement needs at least one eigenvalue".into()));
        }
        ensure_unit(&amplitudes)?;
        if !(apparatus_energy > T::zero()) {
            return Err(Error::InvalidParameter(format!("apparatus energy must be positive, got {apparatus_energy}")));
        }
        Ok(Self { eigenvalues, amplitudes, apparatus_energy })
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn apparatus_energy(&self) -> T {
        self.apparatus_energy
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Standard basis vector `e_λ`, used both for the system eigenbasis and
    /// the apparatus pointer states.
    pub fn basis_vector(&self, index: usize) -> Vec<Complex<T>> {
        (0..self.len()).map(|i| if i == index { Complex::one() } else { Complex::zero() }).collect()
    }

    pub fn pointer_basis(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.len()).map(|i| self.basis_vector(i)).collect()
    }

    /// `e_λ ⊗ e_λ` flattened.
    pub fn product_vector(&self, index: usize) -> Vec<Complex<T>> {
        let n = self.len();
        (0..n * n).map(|i| if i == index * n + index { Complex::one() } else { Complex::zero() }).collect()
    }

    pub fn decoherence_time(&self) -> T {
        Float::recip(self.apparatus_energy)
    }
}

/// System ⊗ apparatus state `Σ_λ f(λ) φ_λ ⊗ ϕ_λ` after the measurement
/// interaction.
pub fn premeasure<T: LinalgReal>(model: &MeasurementModel<T>) -> BipartiteState<T> {
    let n = model.len();
    let amplitudes = DMatrix::from_fn(n, n, |a, b| if a == b { model.amplitudes[a] } else { Complex::zero() });
    BipartiteState { amplitudes }
}

/// Dephase `s` in the apparatus pointer basis:
/// `ρ' = Σ_λ (1 ⊗ Π_λ) |s⟩⟨s| (1 ⊗ Π_λ)` with `Π_λ = |ϕ_λ⟩⟨ϕ_λ|`.
///
/// For `s = Σ f(λ) φ_λ⊗ϕ_λ` this is `Σ |f(λ)|² P_λ`, with every coherence
/// between different pointer states removed.
pub fn decohere<T: LinalgReal>(s: &BipartiteState<T>, pointer_basis: &[Vec<Complex<T>>]) -> Result<DensityMatrix<T>> {
    let (da, db) = s.dims();
    if pointer_basis.len() != db {
        return Err(Error::LengthMismatch { expected: db, got: pointer_basis.len() });
    }
    let tol = scalar::real::<T>(1e-10);
    for (i, u) in pointer_basis.iter().enumerate() {
        if u.len() != db {
            return Err(Error::LengthMismatch { expected: db, got: u.len() });
        }
        for (j, v) in pointer_basis.iter().enumerate() {
            let ip = u.iter().zip(v).fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b);
            let expected = if i == j { T::one() } else { T::zero() };
            if (ip - Complex::new(expected, T::zero())).norm() > tol {
                return Err(Error::InvalidParameter("pointer basis is not orthonormal".into()));
            }
        }
    }
    let mut rho = DMatrix::<Complex<T>>::zeros(da * db, da * db);
    for u in pointer_basis {
        let col = DVector::from_column_slice(u);
        let projector = &col * col.adjoint();
        let branch = &s.amplitudes * projector.transpose();
        let flat = DVector::from_fn(da * db, |i, _| branch[(i / db, i % db)]);
        rho += &flat * flat.adjoint();
    }
    Ok(DensityMatrix { rho })
}

/// `ħ/E_A` with `ħ = 1`.
pub fn decoherence_time<T: LinalgReal>(apparatus_energy: T) -> Result<T> {
    if !(apparatus_energy > T::zero()) {
        return Err(Error::InvalidParameter(format!("apparatus energy must be positive, got {apparatus_energy}")));
    }
    Ok(Float::recip(apparatus_energy))
}

/// Draw `n` outcomes from the diagonal of `rho`, returning counts per basis
/// index.
///
/// Draws are split into chunks of [`SAMPLE_CHUNK`]; chunk `i` uses
/// `ChaCha8Rng::seed_from_u64(seed)` with stream `i`. Counts therefore depend
/// only on `(rho, n, seed)`, not on thread scheduling.
pub fn sample_outcomes<T: LinalgReal>(rho: &DensityMatrix<T>, n: u64, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let off = rho.max_off_diagonal();
    if off > density_tolerance() {
        return Err(Error::NotDiagonal(scalar::to_f64(off)));
    }
    let weights: Vec<f64> = rho.diagonal().into_iter().map(|w| scalar::to_f64(w).max(0.0)).collect();
    let dist =
        WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(format!("invalid outcome weights: {e}")))?;
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let partial: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let draws = SAMPLE_CHUNK.min(n - chunk * SAMPLE_CHUNK);
            let mut counts = vec![0u64; weights.len()];
            for _ in 0..draws {
                counts[dist.sample(&mut rng)] += 1;
            }
            counts
        })
        .collect();
    Ok(partial.into_iter().fold(vec![0u64; weights.len()], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub passed: bool,
}

/// Pearson χ² test of `counts` against `probabilities` at the given
/// significance. Outcomes with zero probability must have zero counts.
pub fn chi_square_gof(counts: &[u64], probabilities: &[f64], significance: f64) -> Result<GoodnessOfFit> {
    if counts.len() != probabilities.len() {
        return Err(Error::LengthMismatch { expected: probabilities.len(), got: counts.len() });
    }
    let total: u64 = counts.iter().sum();
    let mut statistic = 0.0;
    let mut categories = 0usize;
    for (&observed, &p) in counts.iter().zip(probabilities) {
        if p <= 0.0 {
            if observed > 0 {
                return Ok(GoodnessOfFit {
                    statistic: f64::INFINITY,
                    degrees_of_freedom: 0,
                    p_value: 0.0,
                    passed: false,
                });
            }
            continue;
        }
        let expected = p * total as f64;
        statistic += (observed as f64 - expected).powi(2) / expected;
        categories += 1;
    }
    if categories <= 1 {
        return Ok(GoodnessOfFit { statistic, degrees_of_freedom: 0, p_value: 1.0, passed: true });
    }
    let dof = categories - 1;
    let chi2 = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let p_value = chi2.sf(statistic);
    Ok(GoodnessOfFit { statistic, degrees_of_freedom: dof, p_value, passed: p_value >= significance })
}

/// View a single-species two-particle Fock vector as a state on
/// `slot 1 ⊗ slot 2`, where `A†_i A†_j ψ₀ ↦ e_i⊗e_j ± e_j⊗e_i`.
///
/// The slots are artificial labels: the result is always (anti)symmetric,
/// so it has Schmidt rank at least 2 unless both particles share one mode.
pub fn slot_state<T: LinalgReal>(v: &FockVector<T>) -> Result<BipartiteState<T>> {
    let space = v.space();
    if space.species_count() != 1 {
        return Err(Error::InvalidModeSpace("slot view needs a single species".into()));
    }
    let m = space.num_modes();
    let sign = Complex::new(
        <T as num_traits::FromPrimitive>::from_i64(space.statistics().exchange_sign()).expect("sign"),
        T::zero(),
    );
    let half = Complex::new(Float::sqrt(scalar::real::<T>(0.5)), T::zero());
    let mut amplitudes = DMatrix::<Complex<T>>::zeros(m, m);
    for (occ, &amp) in v.iter() {
        if occ.total() != 2 {
            return Err(Error::InvalidParameter("slot view needs a pure two-particle state".into()));
        }
        let occupied: Vec<usize> = (0..m).filter(|&i| occ.get(i) > 0).collect();
        match occupied.as_slice() {
            [i] => amplitudes[(*i, *i)] += amp,
            [i, j] => {
                amplitudes[(*i, *j)] += amp * half;
                amplitudes[(*j, *i)] += amp * half * sign;
            }
            _ => unreachable!("two particles occupy one or two modes"),
        }
    }
    debug_assert!(space.statistics() == Statistics::Bose || (0..m).all(|i| amplitudes[(i, i)].is_zero()));
    BipartiteState::normalized(amplitudes)
}
