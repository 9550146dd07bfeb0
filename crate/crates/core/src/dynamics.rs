//! Free one-particle dynamics on the lattice: position, momentum, energy and
//! the symmetrized correlation `C = (XP + PX)/2`.
//!
//! Under `H = P²/2m` the Heisenberg equations give `d⟨X²⟩/dt = (2/m)⟨C⟩` and
//! `d⟨C⟩/dt = 2⟨H⟩`. Packets with negative correlation therefore narrow
//! until `⟨C⟩` crosses zero and then spread; since `⟨H⟩` is conserved,
//! `⟨C⟩` grows linearly. The canonical commutator fails globally on a
//! periodic lattice, so these identities are checked as expectation values
//! on packets kept well away from the seam.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{overlap, Dispersion, Fourier, LatticeSpec, WaveAmplitude};
use crate::scalar::{self, LinalgReal, Real};

/// Distance, in units of the instantaneous width, that a packet must keep
/// from the periodic seam.
pub const SEAM_MARGIN: f64 = 8.0;

fn check_nonrelativistic<T: Real>(lattice: &LatticeSpec<T>) -> Result<()> {
    if lattice.dispersion() != Dispersion::Nonrelativistic {
        return Err(Error::InvalidLattice("free evolution uses the nonrelativistic dispersion".into()));
    }
    if !(lattice.mass() > T::zero()) {
        return Err(Error::InvalidLattice(format!("mass must be positive, got {}", lattice.mass())));
    }
    Ok(())
}

/// Dense matrices of `X`, `P`, `H = P²/2m` and `C = (XP + PX)/2`.
#[derive(Clone, Debug)]
pub struct ObservableSet<T: LinalgReal> {
    pub x: DMatrix<Complex<T>>,
    pub p: DMatrix<Complex<T>>,
    pub h: DMatrix<Complex<T>>,
    pub c: DMatrix<Complex<T>>,
}

impl<T: LinalgReal> ObservableSet<T> {
    /// `⟨f, O f⟩` for one of the stored matrices.
    pub fn expectation(op: &DMatrix<Complex<T>>, f: &WaveAmplitude<T>) -> Complex<T> {
        let v = nalgebra::DVector::from_column_slice(f.values());
        (v.adjoint() * op * &v)[(0, 0)]
    }
}

pub fn build_observables<T: LinalgReal>(lattice: &LatticeSpec<T>) -> Result<ObservableSet<T>> {
    check_nonrelativistic(lattice)?;
    let m = lattice.num_sites();
    let mut kernel = DMatrix::<Complex<T>>::zeros(m, m);
    for n in 0..m {
        for j in 0..m {
            kernel[(n, j)] = overlap(lattice, j, n)?;
        }
    }
    let spectral = |weights: &dyn Fn(usize) -> T| {
        let diag =
            DMatrix::from_fn(m, m, |r, c| if r == c { Complex::new(weights(r), T::zero()) } else { Complex::zero() });
        kernel.adjoint() * diag * &kernel
    };
    let x = DMatrix::from_fn(
        m,
        m,
        |r, c| {
            if r == c {
                Complex::new(lattice.position(r), T::zero())
            } else {
                Complex::zero()
            }
        },
    );
    let p = spectral(&|n| lattice.momentum(n));
    let two = scalar::real::<T>(2.0);
    let h = spectral(&|n| {
        let pn = lattice.momentum(n);
        pn * pn / (two * lattice.mass())
    });
    let half = Complex::new(scalar::real::<T>(0.5), T::zero());
    let c = (&x * &p + &p * &x) * half;
    Ok(ObservableSet { x, p, h, c })
}

/// `f(x) ∝ exp(−(1 + i·chirp)(x − x0)²/(4σ0²) + i p0 x)`, normalized.
///
/// For positive `chirp` the packet starts with `⟨C⟩ ≈ −chirp/2` and narrows
/// before spreading.
pub fn gaussian_packet<T: Real>(
    lattice: &LatticeSpec<T>,
    x0: T,
    p0: T,
    sigma0: T,
    chirp: T,
) -> Result<WaveAmplitude<T>> {
    let two = scalar::real::<T>(2.0);
    if !(sigma0 >= two * lattice.spacing()) {
        return Err(Error::InvalidPacket(format!(
            "sigma0 = {sigma0} is narrower than two lattice spacings ({})",
            two * lattice.spacing()
        )));
    }
    let margin = scalar::real::<T>(SEAM_MARGIN) * sigma0;
    if lattice.seam_distance(x0) < margin {
        return Err(Error::InvalidPacket(format!("centre {x0} is within {margin} of the periodic seam")));
    }
    let four_var = scalar::real::<T>(4.0) * sigma0 * sigma0;
    let values = lattice
        .positions()
        .into_iter()
        .map(|x| {
            let d = x - x0;
            let exponent = Complex::new(-d * d / four_var, -chirp * d * d / four_var + p0 * x);
            exponent.exp()
        })
        .collect();
    WaveAmplitude::new(*lattice, values)?.normalized()
}

/// Exact free propagator: phases `exp(−i p² t/2m)` in momentum space.
#[derive(Clone)]
pub struct Evolver<T: Real> {
    fourier: Fourier<T>,
    energies: Vec<T>,
    momenta: Vec<T>,
    lattice: LatticeSpec<T>,
}

impl<T: Real> Evolver<T> {
    pub fn new(lattice: &LatticeSpec<T>) -> Result<Self> {
        check_nonrelativistic(lattice)?;
        Ok(Self {
            fourier: Fourier::new(*lattice),
            energies: (0..lattice.num_sites()).map(|n| lattice.energy(n)).collect(),
            momenta: lattice.momenta(),
            lattice: *lattice,
        })
    }

    pub fn evolve(&self, f: &WaveAmplitude<T>, t: T) -> WaveAmplitude<T> {
        let g = self.fourier.forward_values(f.values());
        let phased: Vec<Complex<T>> =
            g.iter().zip(&self.energies).map(|(&gn, &e)| gn * Complex::from_polar(T::one(), -e * t)).collect();
        WaveAmplitude::new(self.lattice, self.fourier.inverse_values(&phased))
            .expect("length preserved by the transform")
    }

    /// Expectation values of a single state at time `t`.
    pub fn record(&self, f: &WaveAmplitude<T>, t: T) -> TrajectoryRecord<T> {
        let positions = self.lattice.positions();
        let density = f.intensity();
        let mean_x: T = density.iter().zip(&positions).map(|(&w, &x)| w * x).sum();
        let mean_x2: T = density.iter().zip(&positions).map(|(&w, &x)| w * x * x).sum();

        let g = self.fourier.forward_values(f.values());
        let g_density: Vec<T> = g.iter().map(|v| v.norm_sqr()).collect();
        let mean_p: T = g_density.iter().zip(&self.momenta).map(|(&w, &p)| w * p).sum();
        let mean_p2: T = g_density.iter().zip(&self.momenta).map(|(&w, &p)| w * p * p).sum();
        let mean_h: T = g_density.iter().zip(&self.energies).map(|(&w, &e)| w * e).sum();

        // ⟨C⟩ = Re⟨X f, P f⟩ because X and P are Hermitian
        let pg: Vec<Complex<T>> = g.iter().zip(&self.momenta).map(|(&gn, &p)| gn * p).collect();
        let pf = self.fourier.inverse_values(&pg);
        let mean_c: T =
            f.values().iter().zip(&positions).zip(&pf).map(|((&fx, &x), &pfx)| (fx.conj() * x * pfx).re).sum();

        let variance = |second: T, first: T| (second - first * first).max(T::zero()).sqrt();
        TrajectoryRecord {
            t,
            mean_x,
            mean_p,
            mean_x2,
            mean_c,
            mean_h,
            dx: variance(mean_x2, mean_x),
            dp: variance(mean_p2, mean_p),
        }
    }
}

pub fn evolve<T: Real>(f: &WaveAmplitude<T>, t: T) -> Result<WaveAmplitude<T>> {
    Ok(Evolver::new(f.lattice())?.evolve(f, t))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRecord<T: Real> {
    pub t: T,
    pub mean_x: T,
    pub mean_p: T,
    pub mean_x2: T,
    pub mean_c: T,
    pub mean_h: T,
    pub dx: T,
    pub dp: T,
}

/// Exact evolution of `f0` sampled at `times`, checking at every sample
/// that the packet stays [`SEAM_MARGIN`] widths away from the seam.
pub fn trajectory<T: Real>(f0: &WaveAmplitude<T>, times: &[T]) -> Result<Vec<TrajectoryRecord<T>>> {
    let evolver = Evolver::new(f0.lattice())?;
    let lattice = *f0.lattice();
    let margin = scalar::real::<T>(SEAM_MARGIN);
    let results: Vec<Result<TrajectoryRecord<T>>> = times
        .par_iter()
        .map(|&t| {
            let record = evolver.record(&evolver.evolve(f0, t), t);
            let distance = lattice.seam_distance(record.mean_x);
            if distance < margin * record.dx {
                return Err(Error::SeamViolation {
                    t: scalar::to_f64(t),
                    detail: format!("seam distance {distance} < {} × width {}", SEAM_MARGIN, record.dx),
                });
            }
            Ok(record)
        })
        .collect();
    // sequential collection so the earliest failing time is reported
    results.into_iter().collect()
}

/// Largest relative mismatch between finite-difference derivatives and the
/// Heisenberg right-hand sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EhrenfestReport<T: Real> {
    /// `max |Δ⟨X²⟩/Δt − (2/m)⟨C⟩| / max |(2/m)⟨C⟩|`.
    pub width_residual: T,
    /// `max |Δ⟨C⟩/Δt − 2⟨H⟩| / max |2⟨H⟩|`.
    pub correlation_residual: T,
}

fn uniform_step<T: Real>(records: &[TrajectoryRecord<T>]) -> Result<T> {
    if records.len() < 3 {
        return Err(Error::TooFewRecords { needed: 3, got: records.len() });
    }
    let step = records[1].t - records[0].t;
    if !(step > T::zero()) {
        return Err(Error::InvalidParameter("sample times must increase".into()));
    }
    let tol = scalar::real::<T>(1e-6) * step;
    if records.windows(2).any(|w| scalar::abs(w[1].t - w[0].t - step) > tol) {
        return Err(Error::InvalidParameter("sample times must be uniformly spaced".into()));
    }
    Ok(step)
}

/// Central-difference check of `d⟨X²⟩/dt = (2/m)⟨C⟩` and `d⟨C⟩/dt = 2⟨H⟩` at
/// interior samples.
pub fn ehrenfest_residuals<T: Real>(records: &[TrajectoryRecord<T>], mass: T) -> Result<EhrenfestReport<T>> {
    let step = uniform_step(records)?;
    let two = scalar::real::<T>(2.0);
    let (mut width_err, mut width_scale) = (T::zero(), T::zero());
    let (mut corr_err, mut corr_scale) = (T::zero(), T::zero());
    for w in records.windows(3) {
        let d_x2 = (w[2].mean_x2 - w[0].mean_x2) / (two * step);
        let d_c = (w[2].mean_c - w[0].mean_c) / (two * step);
        let width_rhs = two / mass * w[1].mean_c;
        let corr_rhs = two * w[1].mean_h;
        width_err = width_err.max(scalar::abs(d_x2 - width_rhs));
        width_scale = width_scale.max(scalar::abs(width_rhs));
        corr_err = corr_err.max(scalar::abs(d_c - corr_rhs));
        corr_scale = corr_scale.max(scalar::abs(corr_rhs));
    }
    let ratio = |err: T, scale: T| if err.is_zero() { T::zero() } else { err / scale.max(T::min_positive_value()) };
    Ok(EhrenfestReport {
        width_residual: ratio(width_err, width_scale),
        correlation_residual: ratio(corr_err, corr_scale),
    })
}

/// Largest relative deviation from `⟨C⟩(t) − ⟨C⟩(0) = 2⟨H⟩ t`, each sample
/// scaled by `max(|2⟨H⟩t|, |⟨C⟩(0)|)`.
pub fn correlation_law_residual<T: Real>(records: &[TrajectoryRecord<T>]) -> Result<T> {
    let first = records.first().ok_or(Error::TooFewRecords { needed: 1, got: 0 })?;
    let two = scalar::real::<T>(2.0);
    let mut worst = T::zero();
    for r in records {
        let elapsed = r.t - first.t;
        let predicted = two * first.mean_h * elapsed;
        let err = scalar::abs(r.mean_c - first.mean_c - predicted);
        if err.is_zero() {
            continue;
        }
        let scale = scalar::abs(predicted).max(scalar::abs(first.mean_c)).max(T::min_positive_value());
        worst = worst.max(err / scale);
    }
    Ok(worst)
}

/// Largest relative deviation from the integrated width law
/// `⟨X²⟩(t) = ⟨X²⟩(0) + (2/m)(⟨C⟩(0) t + ⟨H⟩ t²)`.
pub fn integrated_width_residual<T: Real>(records: &[TrajectoryRecord<T>], mass: T) -> Result<T> {
    let first = records.first().ok_or(Error::TooFewRecords { needed: 1, got: 0 })?;
    let two = scalar::real::<T>(2.0);
    let mut worst = T::zero();
    for r in records {
        let t = r.t - first.t;
        let predicted = first.mean_x2 + two / mass * (first.mean_c * t + first.mean_h * t * t);
        worst = worst.max(scalar::abs(r.mean_x2 - predicted) / scalar::abs(predicted));
    }
    Ok(worst)
}

/// Whether `⟨C⟩` never decreases by more than `slack` between samples.
pub fn correlation_nondecreasing<T: Real>(records: &[TrajectoryRecord<T>], slack: T) -> bool {
    records.windows(2).all(|w| w[1].mean_c >= w[0].mean_c - slack)
}

/// Smallest `Δx·Δp` along the trajectory.
pub fn min_uncertainty_product<T: Real>(records: &[TrajectoryRecord<T>]) -> T {
    records.iter().map(|r| r.dx * r.dp).fold(T::infinity(), T::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice() -> LatticeSpec<f64> {
        LatticeSpec::new(128, 1.0, 1.0, Dispersion::Nonrelativistic).unwrap()
    }

    #[test]
    fn packet_preconditions() {
        let l = lattice();
        assert!(matches!(gaussian_packet(&l, 0.0, 0.0, 1.5, 0.0), Err(Error::InvalidPacket(_))));
        assert!(matches!(gaussian_packet(&l, 40.0, 0.0, 4.0, 0.0), Err(Error::InvalidPacket(_))));
        assert!(gaussian_packet(&l, 0.0, 0.0, 4.0, 0.0).is_ok());
    }

    #[test]
    fn evolution_requires_massive_nonrelativistic_lattice() {
        let rel = LatticeSpec::new(16, 1.0, 1.0, Dispersion::Relativistic).unwrap();
        assert!(Evolver::new(&rel).is_err());
        let massless = LatticeSpec::new(16, 1.0, 0.0, Dispersion::Nonrelativistic).unwrap();
        assert!(Evolver::new(&massless).is_err());
    }

    #[test]
    fn evolve_at_zero_time_is_identity() {
        let l = lattice();
        let f = gaussian_packet(&l, 3.0, 0.4, 5.0, 0.7).unwrap();
        let g = evolve(&f, 0.0).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn minimum_uncertainty_packet() {
        let l = lattice();
        let f = gaussian_packet(&l, 0.0, 0.0, 5.0, 0.0).unwrap();
        let r = Evolver::new(&l).unwrap().record(&f, 0.0);
        assert!(r.mean_c.abs() < 1e-9);
        assert!((r.dx - 5.0).abs() < 1e-6);
        assert!((r.dx * r.dp - 0.5).abs() < 1e-6);
    }

    #[test]
    fn residual_helpers_need_uniform_samples() {
        let l = lattice();
        let f = gaussian_packet(&l, 0.0, 0.0, 5.0, 1.0).unwrap();
        let records = trajectory(&f, &[0.0, 0.1]).unwrap();
        assert!(matches!(ehrenfest_residuals(&records, 1.0), Err(Error::TooFewRecords { .. })));
        let uneven = trajectory(&f, &[0.0, 0.1, 0.3]).unwrap();
        assert!(ehrenfest_residuals(&uneven, 1.0).is_err());
    }

    #[test]
    fn seam_violation_names_the_time() {
        let l = LatticeSpec::new(64, 1.0, 1.0, Dispersion::Nonrelativistic).unwrap();
        let f = gaussian_packet(&l, 0.0, 0.0, 2.0, 0.0).unwrap();
        let err = trajectory(&f, &[0.0, 1.0, 40.0]).unwrap_err();
        assert!(matches!(err, Error::SeamViolation { t, .. } if t == 40.0));
    }
}
