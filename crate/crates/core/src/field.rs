//! One-dimensional periodic lattice, position/momentum duality and field
//! operators on the occupation-number space.
//!
//! Sites sit at `x_j = (j − M/2)·Δx` and momenta at `p_k = 2πk/(M·Δx)` for
//! `k = −M/2 … M/2−1`; momentum arrays are indexed by `n = k + M/2`. The
//! position/momentum kernel is `⟨φ_p, φ_x⟩ = exp(−i p x)/√M`, which makes the
//! transform unitary. Units are `ħ = c = 1`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fock::{FockVector, LadderOp, ModeSpace, Statistics};
use crate::scalar::{self, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dispersion {
    /// `E = p²/2m`.
    Nonrelativistic,
    /// `ω = √(m² + p²)` evaluated at the lattice momenta.
    Relativistic,
    /// `ω = √(m² + (2/Δx)² sin²(pΔx/2))`, the dispersion of the
    /// nearest-neighbour discretized Klein–Gordon field.
    LatticeRelativistic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec<T: Real> {
    num_sites: usize,
    spacing: T,
    mass: T,
    dispersion: Dispersion,
}

impl<T: Real> LatticeSpec<T> {
    pub fn new(num_sites: usize, spacing: T, mass: T, dispersion: Dispersion) -> Result<Self> {
        if num_sites < 2 || !num_sites.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!("num_sites must be even and at least 2, got {num_sites}")));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::InvalidLattice(format!("spacing must be positive, got {spacing}")));
        }
        if mass < T::zero() || !mass.is_finite() {
            return Err(Error::InvalidLattice(format!("mass must be nonnegative, got {mass}")));
        }
        Ok(Self { num_sites, spacing, mass, dispersion })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn dispersion(&self) -> Dispersion {
        self.dispersion
    }

    /// Total periodic length `M·Δx`.
    pub fn length(&self) -> T {
        scalar::from_usize::<T>(self.num_sites) * self.spacing
    }

    pub fn position(&self, j: usize) -> T {
        (scalar::from_usize::<T>(j) - scalar::from_usize::<T>(self.num_sites / 2)) * self.spacing
    }

    /// Signed momentum quantum number `k` for array index `n`.
    pub fn momentum_number(&self, n: usize) -> i64 {
        n as i64 - (self.num_sites / 2) as i64
    }

    pub fn momentum(&self, n: usize) -> T {
        let k = T::from_i64(self.momentum_number(n)).expect("momentum number fits");
        T::TAU() * k / self.length()
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.num_sites).map(|j| self.position(j)).collect()
    }

    pub fn momenta(&self) -> Vec<T> {
        (0..self.num_sites).map(|n| self.momentum(n)).collect()
    }

    /// Single-particle energy of momentum index `n` under this dispersion.
    pub fn energy(&self, n: usize) -> T {
        let p = self.momentum(n);
        let two = scalar::real::<T>(2.0);
        match self.dispersion {
            Dispersion::Nonrelativistic => p * p / (two * self.mass),
            Dispersion::Relativistic => (self.mass * self.mass + p * p).sqrt(),
            Dispersion::LatticeRelativistic => {
                let s = two / self.spacing * (p * self.spacing / two).sin();
                (self.mass * self.mass + s * s).sqrt()
            }
        }
    }

    /// Distance from `x` to the periodic seam at `±L/2`.
    pub fn seam_distance(&self, x: T) -> T {
        self.length() / scalar::real(2.0) - scalar::abs(x)
    }

    fn check_site(&self, j: usize) -> Result<()> {
        if j < self.num_sites {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: j, len: self.num_sites })
        }
    }
}

/// Complex intensity `f(x)` on the lattice sites.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveAmplitude<T: Real> {
    values: Vec<Complex<T>>,
    lattice: LatticeSpec<T>,
}

/// Momentum image `g(p)` indexed by `n = k + M/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumAmplitude<T: Real> {
    values: Vec<Complex<T>>,
    lattice: LatticeSpec<T>,
}

macro_rules! amplitude_common {
    ($ty:ident) => {
        impl<T: Real> $ty<T> {
            pub fn new(lattice: LatticeSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
                if values.len() != lattice.num_sites {
                    return Err(Error::LengthMismatch { expected: lattice.num_sites, got: values.len() });
                }
                Ok(Self { values, lattice })
            }

            pub fn values(&self) -> &[Complex<T>] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex<T>> {
                self.values
            }

            pub fn lattice(&self) -> &LatticeSpec<T> {
                &self.lattice
            }

            pub fn norm_sqr(&self) -> T {
                self.values.iter().map(|v| v.norm_sqr()).sum()
            }

            pub fn is_normalized(&self) -> bool {
                scalar::abs(self.norm_sqr().sqrt() - T::one()) <= scalar::norm_tolerance()
            }

            pub fn ensure_normalized(&self) -> Result<()> {
                if self.is_normalized() {
                    Ok(())
                } else {
                    Err(Error::NotNormalized { norm: scalar::to_f64(self.norm_sqr().sqrt()) })
                }
            }

            pub fn normalized(&self) -> Result<Self> {
                let norm = self.norm_sqr().sqrt();
                if norm <= scalar::norm_tolerance() {
                    return Err(Error::ZeroNorm("amplitude vanishes everywhere".into()));
                }
                let inv = norm.recip();
                Ok(Self { values: self.values.iter().map(|v| *v * inv).collect(), lattice: self.lattice })
            }

            /// `|value|²` per index.
            pub fn intensity(&self) -> Vec<T> {
                self.values.iter().map(|v| v.norm_sqr()).collect()
            }
        }
    };
}

amplitude_common!(WaveAmplitude);
amplitude_common!(MomentumAmplitude);

/// `⟨φ_p, φ_x⟩ = exp(−i p_n x_j)/√M`.
pub fn overlap<T: Real>(lattice: &LatticeSpec<T>, x_index: usize, p_index: usize) -> Result<Complex<T>> {
    lattice.check_site(x_index)?;
    lattice.check_site(p_index)?;
    let phase = -lattice.momentum(p_index) * lattice.position(x_index);
    let scale = scalar::from_usize::<T>(lattice.num_sites).sqrt().recip();
    Ok(Complex::from_polar(scale, phase))
}

/// Planned FFT pair implementing the unitary position↔momentum map.
///
/// With `x_j = (j − M/2)Δx` and `p_k = 2πk/L`, the kernel factorizes as
/// `exp(−i p_k x_j) = (−1)^k · exp(−2πi k j / M)`, so the centred transform
/// is a standard DFT followed by a sign flip on odd `k`.
#[derive(Clone)]
pub struct Fourier<T: Real> {
    lattice: LatticeSpec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Fourier<T> {
    pub fn new(lattice: LatticeSpec<T>) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(lattice.num_sites);
        let inverse = planner.plan_fft_inverse(lattice.num_sites);
        Self { lattice, forward, inverse }
    }

    fn wrap(&self, n: usize) -> usize {
        let m = self.lattice.num_sites;
        (n + m / 2) % m
    }

    fn odd(&self, n: usize) -> bool {
        self.lattice.momentum_number(n).rem_euclid(2) == 1
    }

    /// Transform raw site values to centred momentum values.
    pub fn forward_values(&self, values: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.lattice.num_sites;
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = scalar::from_usize::<T>(m).sqrt().recip();
        (0..m)
            .map(|n| {
                let v = buf[self.wrap(n)] * scale;
                if self.odd(n) {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }

    pub fn inverse_values(&self, values: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.lattice.num_sites;
        let mut buf = vec![Complex::zero(); m];
        for (n, &g) in values.iter().enumerate() {
            buf[self.wrap(n)] = if self.odd(n) { -g } else { g };
        }
        self.inverse.process(&mut buf);
        let scale = scalar::from_usize::<T>(m).sqrt().recip();
        buf.into_iter().map(|v| v * scale).collect()
    }

    pub fn to_momentum(&self, f: &WaveAmplitude<T>) -> MomentumAmplitude<T> {
        MomentumAmplitude { values: self.forward_values(&f.values), lattice: self.lattice }
    }

    pub fn from_momentum(&self, g: &MomentumAmplitude<T>) -> WaveAmplitude<T> {
        WaveAmplitude { values: self.inverse_values(&g.values), lattice: self.lattice }
    }
}

/// `g(p) = Σ_x f(x) ⟨φ_p, φ_x⟩`.
pub fn to_momentum<T: Real>(f: &WaveAmplitude<T>) -> MomentumAmplitude<T> {
    Fourier::new(f.lattice).to_momentum(f)
}

pub fn from_momentum<T: Real>(g: &MomentumAmplitude<T>) -> WaveAmplitude<T> {
    Fourier::new(g.lattice).from_momentum(g)
}

fn check_site_modes<T: Real>(lattice: &LatticeSpec<T>, space: &ModeSpace) -> Result<()> {
    if space.num_modes() != lattice.num_sites {
        return Err(Error::InvalidModeSpace(format!(
            "one mode per lattice site required: {} modes for {} sites",
            space.num_modes(),
            lattice.num_sites
        )));
    }
    Ok(())
}

/// `ψ = Σ_x f(x) Ψ†(x) ψ₀`.
pub fn prepare_one_particle<T: Real>(f: &WaveAmplitude<T>, space: ModeSpace) -> Result<FockVector<T>> {
    f.ensure_normalized()?;
    check_site_modes(&f.lattice, &space)?;
    FockVector::vacuum(space).transformed_create(&f.values, 0)
}

/// Amplitudes `F_n(x₁…x_n)` for `Σ_n Σ F_n Ψ†(x₁)…Ψ†(x_n) ψ₀`, with site
/// tuples in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralStateSpec<T: Real> {
    max_sector: usize,
    amplitudes: BTreeMap<Vec<usize>, Complex<T>>,
}

impl<T: Real> GeneralStateSpec<T> {
    pub fn new(max_sector: usize) -> Self {
        Self { max_sector, amplitudes: BTreeMap::new() }
    }

    pub fn max_sector(&self) -> usize {
        self.max_sector
    }

    /// Add `amplitude` to `F_n(sites)` with `n = sites.len()`.
    pub fn insert(&mut self, sites: Vec<usize>, amplitude: Complex<T>) -> Result<()> {
        if sites.len() > self.max_sector {
            return Err(Error::SectorTooLarge { n: sites.len(), max: self.max_sector });
        }
        if sites.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NonCanonicalTuple(sites));
        }
        let slot = self.amplitudes.entry(sites).or_insert_with(Complex::zero);
        *slot = *slot + amplitude;
        Ok(())
    }

    pub fn with(mut self, sites: Vec<usize>, amplitude: Complex<T>) -> Result<Self> {
        self.insert(sites, amplitude)?;
        Ok(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Complex<T>)> {
        self.amplitudes.iter()
    }
}

/// Build and normalize the general Fock state described by `spec`.
pub fn prepare_general<T: Real>(spec: &GeneralStateSpec<T>, space: ModeSpace) -> Result<FockVector<T>> {
    let vacuum = FockVector::vacuum(space);
    let mut out = FockVector::null(space);
    for (sites, &amp) in &spec.amplitudes {
        let ops: Vec<LadderOp> = sites.iter().map(|&x| LadderOp::create(x)).collect();
        out = out.add_scaled(amp, &vacuum.apply_product(&ops)?)?;
    }
    out.normalized()
}

/// `⟨v, Ψ†(x)Ψ(x) v⟩ = ‖Ψ(x) v‖²`.
pub fn number_density<T: Real>(v: &FockVector<T>, x: usize) -> Result<T> {
    v.ensure_normalized()?;
    Ok(v.annihilate(x, 0)?.norm_sqr())
}

/// `⟨v, Ψ(x) v⟩`.
pub fn field_expectation<T: Real>(v: &FockVector<T>, x: usize) -> Result<Complex<T>> {
    v.ensure_normalized()?;
    v.inner(&v.annihilate(x, 0)?)
}

/// Minimum Bose truncation accepted for a coherent amplitude `α`:
/// `max(12, ⌈8|α|²⌉)`.
pub fn coherent_nmax_required<T: Real>(alpha: Complex<T>) -> usize {
    let tail = (scalar::real::<T>(8.0) * alpha.norm_sqr()).ceil().to_usize().unwrap_or(usize::MAX);
    tail.max(12)
}

/// Product of single-mode coherent states with amplitudes `α_mode`,
/// truncated at the space's `nmax` and renormalized.
pub fn coherent_state<T: Real>(alphas: &[Complex<T>], space: ModeSpace) -> Result<FockVector<T>> {
    if space.statistics() != Statistics::Bose {
        return Err(Error::UnsupportedStatistics("coherent states need bosonic modes".into()));
    }
    if alphas.len() != space.num_modes() {
        return Err(Error::LengthMismatch { expected: space.num_modes(), got: alphas.len() });
    }
    let nmax = space.nmax() as usize;
    let mut partial: Vec<(Vec<u8>, Complex<T>)> = vec![(vec![0; space.num_slots()], Complex::one())];
    for (mode, &alpha) in alphas.iter().enumerate() {
        if alpha.is_zero() {
            continue;
        }
        let needed = coherent_nmax_required(alpha);
        if nmax < needed {
            return Err(Error::Truncation(format!(
                "|α|² = {} in mode {mode} needs nmax >= {needed}, space has {nmax}",
                alpha.norm_sqr()
            )));
        }
        let mut coeffs = Vec::with_capacity(nmax + 1);
        let mut c = Complex::<T>::one();
        for n in 0..=nmax {
            if n > 0 {
                c = c * alpha / scalar::from_usize::<T>(n).sqrt();
            }
            coeffs.push(c);
        }
        partial = partial
            .into_iter()
            .flat_map(|(occ, amp)| {
                coeffs.iter().enumerate().map(move |(n, &cn)| {
                    let mut next = occ.clone();
                    next[mode] = n as u8;
                    (next, amp * cn)
                })
            })
            .collect();
    }
    FockVector::from_terms(space, partial)?.normalized()
}

/// `‖(A_mode − α) v‖`.
pub fn annihilation_residual<T: Real>(v: &FockVector<T>, mode: usize, alpha: Complex<T>) -> Result<T> {
    let lowered = v.annihilate(mode, 0)?;
    Ok(lowered.add_scaled(-alpha, v)?.norm())
}

/// `‖Ψ(x)Ψ†(x)v ∓ Ψ†(x)Ψ(x)v − v‖`; the bracket is the commutator for
/// bosons and the anticommutator for fermions.
pub fn identity_resolution_residual<T: Real>(v: &FockVector<T>, x: usize) -> Result<T> {
    let sign = T::from_i64(v.space().statistics().exchange_sign()).expect("sign");
    let created_first = v.create(x, 0)?.annihilate(x, 0)?;
    let annihilated_first = v.annihilate(x, 0)?.create(x, 0)?;
    let combined = created_first.add_scaled(Complex::new(-sign, T::zero()), &annihilated_first)?;
    Ok(combined.sub(v)?.norm())
}

/// Value of the free-field commutator mode sum at one separation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorSample<T: Real> {
    pub value: Complex<T>,
    /// The `ω = 0` mode was dropped from the sum (massless infrared cutoff).
    pub excluded_zero_mode: bool,
}

/// Commutator `[Φ(t,x), Φ†(t′,y)]` of the free complex scalar field as a
/// lattice mode sum, with `dt = t − t′` and `dx = x − y`:
///
/// `(1/M) Σ_k (1/2ω_k) (e^{i(p_k dx − ω_k dt)} − e^{−i(p_k dx − ω_k dt)})`,
///
/// where the second (antiparticle) exponential is kept only when
/// `include_antiparticles` is set.
pub fn pauli_jordan<T: Real>(
    lattice: &LatticeSpec<T>,
    dt: T,
    dx: T,
    include_antiparticles: bool,
) -> Result<CommutatorSample<T>> {
    ModeSum::new(lattice)?.evaluate(dt, dx, include_antiparticles)
}

/// Precomputed `(p_k, ω_k)` table for repeated commutator evaluations.
#[derive(Clone, Debug)]
pub struct ModeSum<T: Real> {
    spacing: T,
    num_sites: usize,
    modes: Vec<(T, T)>,
    excluded_zero_mode: bool,
}

impl<T: Real> ModeSum<T> {
    pub fn new(lattice: &LatticeSpec<T>) -> Result<Self> {
        if lattice.dispersion == Dispersion::Nonrelativistic {
            return Err(Error::InvalidLattice("the field commutator needs a relativistic dispersion".into()));
        }
        let mut excluded_zero_mode = false;
        let modes = (0..lattice.num_sites)
            .filter_map(|n| {
                let omega = lattice.energy(n);
                if omega <= T::zero() {
                    excluded_zero_mode = true;
                    None
                } else {
                    Some((lattice.momentum(n), omega))
                }
            })
            .collect();
        Ok(Self { spacing: lattice.spacing, num_sites: lattice.num_sites, modes, excluded_zero_mode })
    }

    pub fn excluded_zero_mode(&self) -> bool {
        self.excluded_zero_mode
    }

    pub fn evaluate(&self, dt: T, dx: T, include_antiparticles: bool) -> Result<CommutatorSample<T>> {
        let steps = dx / self.spacing;
        if scalar::abs(steps - steps.round()) > scalar::real::<T>(1e-9) * (T::one() + scalar::abs(steps)) {
            return Err(Error::InvalidParameter(format!(
                "separation {dx} is not a multiple of the lattice spacing {}",
                self.spacing
            )));
        }
        let two = scalar::real::<T>(2.0);
        let mut acc = Complex::<T>::zero();
        for &(p, omega) in &self.modes {
            let theta = p * dx - omega * dt;
            let particle = Complex::from_polar(T::one(), theta);
            let term = if include_antiparticles { particle - particle.conj() } else { particle };
            acc = acc + term / (two * omega);
        }
        Ok(CommutatorSample {
            value: acc / scalar::from_usize::<T>(self.num_sites),
            excluded_zero_mode: self.excluded_zero_mode,
        })
    }
}

/// One point of a commutator sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint<T: Real> {
    pub dt: T,
    pub dx: T,
    pub with_antiparticles: Complex<T>,
    pub without_antiparticles: Complex<T>,
}

/// Spacelike sample grid: `dt ∈ {0, Δx, 2Δx, …}`, `dx ∈ {Δx, 2Δx, …}`,
/// both at most `extent`, with `dx > dt`.
pub fn spacelike_grid<T: Real>(lattice: &LatticeSpec<T>, extent: T) -> Vec<(T, T)> {
    let steps = (extent / lattice.spacing).floor().to_usize().unwrap_or(0);
    let mut out = Vec::new();
    for i in 0..=steps {
        for j in (i + 1)..=steps {
            out.push((scalar::from_usize::<T>(i) * lattice.spacing, scalar::from_usize::<T>(j) * lattice.spacing));
        }
    }
    out
}

/// Evaluate both commutators over the given `(dt, dx)` points in parallel;
/// output order matches input order.
pub fn commutator_sweep<T: Real>(lattice: &LatticeSpec<T>, points: &[(T, T)]) -> Result<Vec<SweepPoint<T>>> {
    let sum = ModeSum::new(lattice)?;
    points
        .par_iter()
        .map(|&(dt, dx)| {
            Ok(SweepPoint {
                dt,
                dx,
                with_antiparticles: sum.evaluate(dt, dx, true)?.value,
                without_antiparticles: sum.evaluate(dt, dx, false)?.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn lattice(m: usize) -> LatticeSpec<f64> {
        LatticeSpec::new(m, 1.0, 1.0, Dispersion::Nonrelativistic).unwrap()
    }

    #[test]
    fn lattice_validation() {
        assert!(LatticeSpec::new(3, 1.0, 1.0, Dispersion::Nonrelativistic).is_err());
        assert!(LatticeSpec::new(4, 0.0, 1.0, Dispersion::Nonrelativistic).is_err());
        assert!(LatticeSpec::new(4, 1.0, -1.0, Dispersion::Relativistic).is_err());
        let l = lattice(4);
        assert_eq!(l.positions(), vec![-2.0, -1.0, 0.0, 1.0]);
        assert_eq!(l.momentum_number(0), -2);
        assert!((l.momentum(3) - std::f64::consts::PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_at_origin_is_flat() {
        let l = lattice(4);
        for n in 0..4 {
            let o = overlap(&l, 2, n).unwrap();
            assert!((o - C::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(overlap(&l, 4, 0).is_err());
    }

    #[test]
    fn overlap_is_unimodular_up_to_scale() {
        let l = lattice(8);
        for j in 0..8 {
            for n in 0..8 {
                assert!((overlap(&l, j, n).unwrap().norm() - 8f64.sqrt().recip()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn delta_is_momentum_flat_and_plane_wave_is_sharp() {
        let l = lattice(16);
        let mut values = vec![C::zero(); 16];
        values[5] = C::one();
        let g = to_momentum(&WaveAmplitude::new(l, values).unwrap());
        for v in g.values() {
            assert!((v.norm() - 0.25).abs() < 1e-14);
        }
        let n0 = 11;
        let plane: Vec<C> = (0..16).map(|j| overlap(&l, j, n0).unwrap().conj()).collect();
        let g = to_momentum(&WaveAmplitude::new(l, plane).unwrap());
        for (n, v) in g.values().iter().enumerate() {
            let expected = if n == n0 { 1.0 } else { 0.0 };
            assert!((v - C::new(expected, 0.0)).norm() < 1e-13, "n = {n}: {v}");
        }
    }

    #[test]
    fn prepare_one_particle_requires_normalization() {
        let l = lattice(4);
        let space = ModeSpace::bose(4, 2).unwrap();
        let f = WaveAmplitude::new(l, vec![C::one(); 4]).unwrap();
        assert!(matches!(prepare_one_particle(&f, space), Err(Error::NotNormalized { .. })));
        let wrong_space = ModeSpace::bose(3, 2).unwrap();
        let f = f.normalized().unwrap();
        assert!(prepare_one_particle(&f, wrong_space).is_err());
    }

    #[test]
    fn general_spec_rejects_bad_tuples() {
        let mut spec = GeneralStateSpec::<f64>::new(2);
        assert_eq!(spec.insert(vec![2, 1], C::one()), Err(Error::NonCanonicalTuple(vec![2, 1])));
        assert_eq!(spec.insert(vec![0, 1, 2], C::one()), Err(Error::SectorTooLarge { n: 3, max: 2 }));
        assert!(spec.insert(vec![1, 1], C::one()).is_ok());
    }

    #[test]
    fn coherent_state_rejects_fermions_and_small_truncation() {
        let fermi = ModeSpace::fermi(1).unwrap();
        assert!(matches!(coherent_state(&[C::new(0.5, 0.0)], fermi), Err(Error::UnsupportedStatistics(_))));
        let small = ModeSpace::bose(1, 8).unwrap();
        assert!(matches!(coherent_state(&[C::new(0.5, 0.0)], small), Err(Error::Truncation(_))));
        let big_alpha = ModeSpace::bose(1, 12).unwrap();
        assert!(coherent_state(&[C::new(1.5, 0.0)], big_alpha).is_err());
        assert_eq!(coherent_nmax_required(C::new(1.5, 0.0)), 18);
    }

    #[test]
    fn zero_coherent_amplitude_is_vacuum() {
        let space = ModeSpace::bose(3, 12).unwrap();
        let v = coherent_state(&[C::zero(); 3], space).unwrap();
        assert_eq!(v, FockVector::vacuum(space));
    }

    #[test]
    fn commutator_needs_relativistic_dispersion() {
        assert!(pauli_jordan(&lattice(8), 0.0, 1.0, true).is_err());
        let rel = LatticeSpec::new(8, 0.5, 1.0, Dispersion::Relativistic).unwrap();
        assert!(pauli_jordan(&rel, 0.0, 0.3, true).is_err());
        assert!(pauli_jordan(&rel, 0.0, 1.0, true).is_ok());
    }

    #[test]
    fn massless_zero_mode_is_excluded() {
        let l = LatticeSpec::new(16, 0.5, 0.0, Dispersion::Relativistic).unwrap();
        let s = pauli_jordan(&l, 0.0, 1.0, true).unwrap();
        assert!(s.excluded_zero_mode);
        assert!(s.value.norm() < 1e-15);
        let massive = LatticeSpec::new(16, 0.5, 1.0, Dispersion::Relativistic).unwrap();
        assert!(!pauli_jordan(&massive, 0.0, 1.0, true).unwrap().excluded_zero_mode);
    }

    #[test]
    fn spacelike_grid_is_strictly_outside_light_cone() {
        let l = LatticeSpec::new(16, 0.5, 1.0, Dispersion::Relativistic).unwrap();
        let grid = spacelike_grid(&l, 2.0);
        assert_eq!(grid.len(), 10);
        assert!(grid.iter().all(|&(dt, dx)| dx > dt));
    }
}
