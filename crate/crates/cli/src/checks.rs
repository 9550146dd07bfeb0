//! Numeric invariant checks shared by `fock-check`, `verify` and the
//! acceptance suite. Each returns the worst residual it saw; callers compare
//! against their own tolerance.

use std::collections::BTreeMap;

use fockfield::dynamics::{
    correlation_law_residual, correlation_nondecreasing, ehrenfest_residuals, gaussian_packet,
    integrated_width_residual, min_uncertainty_product, trajectory,
};
use fockfield::field::{
    field_expectation, number_density, prepare_general, prepare_one_particle, Dispersion, GeneralStateSpec, ModeSum,
    WaveAmplitude,
};
use fockfield::fock::FockVector;
use fockfield::quantum_info::{
    born_distribution, chi_square_gof, decohere, premeasure, reduced_density, sample_outcomes, MeasurementModel,
    Subsystem,
};
use fockfield::wick::{parse, vacuum_expectation};
use fockfield::{FockVector64, LatticeSpec64, ModeSpace, Statistics, TrajectoryRecord64, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Deliberate defects for exercising the failure path of `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Use the bosonic sign in the fermionic anticommutator.
    FermionSign,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fermion-sign" => Ok(Fault::FermionSign),
            other => Err(format!("unknown fault '{other}' (known: fermion-sign)")),
        }
    }
}

/// Residuals of `[A_a, A†_b]∓ = δ_ab`, `[A†_a, A†_b]∓ = 0` and
/// `[A_a, A_b]∓ = 0` on one basis state.
pub fn ladder_residuals(
    space: &ModeSpace,
    occupations: &[u8],
    a: usize,
    b: usize,
    fault: Option<Fault>,
) -> fockfield::Result<[f64; 3]> {
    let mut sign = space.statistics().exchange_sign() as f64;
    if fault == Some(Fault::FermionSign) && space.statistics() == Statistics::Fermi {
        sign = -sign;
    }
    let s = FockVector64::basis(*space, occupations.to_vec())?;
    let bracket = |left: FockVector64, right: FockVector64| left.add_scaled(C64::new(-sign, 0.0), &right);

    let mixed = bracket(s.create(b, 0)?.annihilate(a, 0)?, s.annihilate(a, 0)?.create(b, 0)?)?;
    let expected = if a == b { s.clone() } else { FockVector::null(*space) };
    let raising = bracket(s.create(b, 0)?.create(a, 0)?, s.create(a, 0)?.create(b, 0)?)?;
    let lowering = bracket(s.annihilate(b, 0)?.annihilate(a, 0)?, s.annihilate(a, 0)?.annihilate(b, 0)?)?;
    Ok([mixed.distance(&expected)?, raising.norm(), lowering.norm()])
}

/// Occupations inside the subspace where the truncated ladder algebra is
/// exact: at most `nmax − 1` bosons per mode.
pub fn random_safe_occupation(space: &ModeSpace, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let bound = match space.statistics() {
        Statistics::Bose => space.nmax() - 1,
        Statistics::Fermi => 1,
    };
    (0..space.num_slots()).map(|_| rng.gen_range(0..=bound)).collect()
}

pub fn random_safe_state(space: &ModeSpace, terms: usize, rng: &mut ChaCha8Rng) -> fockfield::Result<FockVector64> {
    let entries: Vec<(Vec<u8>, C64)> = (0..terms)
        .map(|_| {
            let occ = random_safe_occupation(space, rng);
            (occ, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
        .collect();
    FockVector::from_terms(*space, entries)?.normalized()
}

/// `|⟨v, (A†A − AA†) v⟩ − (−1)|`.
pub fn antiparticle_deviation(v: &FockVector64, mode: usize) -> fockfield::Result<f64> {
    let diff = v.annihilate(mode, 0)?.create(mode, 0)?.sub(&v.create(mode, 0)?.annihilate(mode, 0)?)?;
    Ok((v.inner(&diff)? + C64::new(1.0, 0.0)).norm())
}

/// Worst ladder-relation residual over `samples` random basis states and
/// mode pairs.
pub fn max_ladder_residual(
    space: &ModeSpace,
    samples: usize,
    rng: &mut ChaCha8Rng,
    fault: Option<Fault>,
) -> fockfield::Result<[f64; 3]> {
    let mut worst = [0.0f64; 3];
    for _ in 0..samples {
        let occ = random_safe_occupation(space, rng);
        let a = rng.gen_range(0..space.num_modes());
        let b = rng.gen_range(0..space.num_modes());
        let r = ladder_residuals(space, &occ, a, b, fault)?;
        for (w, x) in worst.iter_mut().zip(r) {
            *w = w.max(x);
        }
    }
    Ok(worst)
}

pub fn max_antiparticle_deviation(space: &ModeSpace, samples: usize, rng: &mut ChaCha8Rng) -> fockfield::Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let v = random_safe_state(space, 6, rng)?;
        let mode = rng.gen_range(0..space.num_modes());
        worst = worst.max(antiparticle_deviation(&v, mode)?);
    }
    Ok(worst)
}

pub fn random_amplitude(lattice: LatticeSpec64, rng: &mut ChaCha8Rng) -> fockfield::Result<WaveAmplitude<f64>> {
    let values =
        (0..lattice.num_sites()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    WaveAmplitude::new(lattice, values)?.normalized()
}

/// Worst `|number_density(ψ_f, x) − |f(x)|²|` over random `f` and all sites.
pub fn max_density_residual(sites: usize, samples: usize, rng: &mut ChaCha8Rng) -> fockfield::Result<f64> {
    let lattice = LatticeSpec64::new(sites, 1.0, 1.0, Dispersion::Nonrelativistic)?;
    let space = ModeSpace::bose(sites, 2)?;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f = random_amplitude(lattice, rng)?;
        let psi = prepare_one_particle(&f, space)?;
        for (x, v) in f.values().iter().enumerate() {
            worst = worst.max((number_density(&psi, x)? - v.norm_sqr()).abs());
        }
    }
    Ok(worst)
}

/// Symbolic contraction of `a(x′) a+(x) a(x) a+(x″)` against the fock-core
/// density for `f` supported on three sites. Returns the printed delta
/// polynomial and the worst numeric mismatch.
pub fn contraction_cross_check(sites: usize, samples: usize, rng: &mut ChaCha8Rng) -> fockfield::Result<(String, f64)> {
    let dp = vacuum_expectation(&parse("bose: a(x') a+(x) a(x) a+(x'')")?);
    let lattice = LatticeSpec64::new(sites, 1.0, 1.0, Dispersion::Nonrelativistic)?;
    let space = ModeSpace::bose(sites, 2)?;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut values = vec![C64::new(0.0, 0.0); sites];
        for _ in 0..3 {
            values[rng.gen_range(0..sites)] += C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let f = WaveAmplitude::new(lattice, values)?.normalized()?;
        let psi = prepare_one_particle(&f, space)?;
        for x in 0..sites {
            let mut symbolic = C64::new(0.0, 0.0);
            for x1 in 0..sites {
                for x2 in 0..sites {
                    let assign: BTreeMap<String, usize> =
                        [("x".into(), x), ("x'".into(), x1), ("x''".into(), x2)].into_iter().collect();
                    symbolic += f.values()[x1].conj() * f.values()[x2] * dp.evaluate(&assign)? as f64;
                }
            }
            worst = worst.max((symbolic - number_density(&psi, x)?).norm());
        }
    }
    Ok((dp.to_string(), worst))
}

/// Worst `|⟨v, Ψ(x) v⟩|` over random states of fixed particle number
/// `n ≤ max_n`.
pub fn max_fixed_number_field(sites: usize, max_n: usize, rng: &mut ChaCha8Rng) -> fockfield::Result<f64> {
    let space = ModeSpace::bose(sites, max_n.max(1) as u8)?;
    let mut worst = 0.0f64;
    for n in 0..=max_n {
        let mut spec = GeneralStateSpec::new(max_n);
        for _ in 0..4 {
            let mut tuple: Vec<usize> = (0..n).map(|_| rng.gen_range(0..sites)).collect();
            tuple.sort_unstable();
            spec.insert(tuple, C64::new(rng.gen_range(0.1..1.0), rng.gen_range(-1.0..1.0)))?;
        }
        let v = prepare_general(&spec, space)?;
        for x in 0..sites {
            worst = worst.max(field_expectation(&v, x)?.norm());
        }
    }
    Ok(worst)
}

/// Gaussian packet trajectory centred at the origin.
pub fn packet_trajectory(
    sites: usize,
    mass: f64,
    sigma0: f64,
    chirp: f64,
    times: &[f64],
) -> fockfield::Result<Vec<TrajectoryRecord64>> {
    let lattice = LatticeSpec64::new(sites, 1.0, mass, Dispersion::Nonrelativistic)?;
    let f = gaussian_packet(&lattice, 0.0, 0.0, sigma0, chirp)?;
    trajectory(&f, times)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsSummary {
    pub initial_correlation: f64,
    pub width_residual: f64,
    pub correlation_residual: f64,
    pub correlation_law: f64,
    pub integrated_width: f64,
    pub nondecreasing: bool,
    pub min_uncertainty: f64,
    pub energy_drift: f64,
}

pub fn summarize_dynamics(records: &[TrajectoryRecord64], mass: f64) -> fockfield::Result<DynamicsSummary> {
    let report = ehrenfest_residuals(records, mass)?;
    let h0 = records[0].mean_h;
    Ok(DynamicsSummary {
        initial_correlation: records[0].mean_c,
        width_residual: report.width_residual,
        correlation_residual: report.correlation_residual,
        correlation_law: correlation_law_residual(records)?,
        integrated_width: integrated_width_residual(records, mass)?,
        nondecreasing: correlation_nondecreasing(records, 1e-10),
        min_uncertainty: min_uncertainty_product(records),
        energy_drift: records.iter().map(|r| (r.mean_h - h0).abs() / h0).fold(0.0, f64::max),
    })
}

/// Worst relative deviation of `Δx(t)²` from `σ0²(1 + (t/2mσ0²)²)` for an
/// unchirped packet.
pub fn width_law_residual(records: &[TrajectoryRecord64], mass: f64, sigma0: f64) -> f64 {
    records
        .iter()
        .map(|r| {
            let tau = r.t / (2.0 * mass * sigma0 * sigma0);
            let expected = sigma0 * sigma0 * (1.0 + tau * tau);
            (r.dx * r.dx - expected).abs() / expected
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceSummary {
    pub diagonal_residual: f64,
    pub purity: f64,
    pub purity_residual: f64,
    pub entropy_residual: f64,
}

/// Decohere the premeasurement state of `f` and compare with `|f|²`.
pub fn decoherence_summary(f: &[C64]) -> fockfield::Result<DecoherenceSummary> {
    let n = f.len();
    let eigenvalues = (1..=n).map(|i| i as f64).collect();
    let model = MeasurementModel::new(eigenvalues, f.to_vec(), 1.0)?;
    let weights = born_distribution(f)?;
    let s = premeasure(&model);
    let rho = decohere(&s, &model.pointer_basis())?;
    rho.validate()?;
    let diagonal_residual = weights
        .iter()
        .enumerate()
        .map(|(i, w)| (rho.projector_weight(&model.product_vector(i)) - w).abs())
        .fold(0.0, f64::max);
    let quartic: f64 = weights.iter().map(|w| w * w).sum();
    let shannon: f64 = weights.iter().filter(|&&w| w > 0.0).map(|w| -w * w.ln()).sum();
    let purity = rho.purity();
    Ok(DecoherenceSummary {
        diagonal_residual,
        purity,
        purity_residual: (purity - quartic).abs(),
        entropy_residual: (reduced_density(&s, Subsystem::A).entropy() - shannon).abs(),
    })
}

/// Number of seeds `0..seeds` whose `n` samples fail a χ² test against
/// `|f|²` at `significance`, sampling the decohered apparatus state.
pub fn sampling_failures(f: &[C64], n: u64, seeds: u64, significance: f64) -> fockfield::Result<usize> {
    let k = f.len();
    let model = MeasurementModel::new((1..=k).map(|i| i as f64).collect(), f.to_vec(), 1.0)?;
    let rho = decohere(&premeasure(&model), &model.pointer_basis())?.partial_trace((k, k), Subsystem::B)?;
    let probabilities = born_distribution(f)?;
    let mut failures = 0;
    for seed in 0..seeds {
        let counts = sample_outcomes(&rho, n, seed)?;
        if !chi_square_gof(&counts, &probabilities, significance)?.passed {
            failures += 1;
        }
    }
    Ok(failures)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CausalitySummary {
    pub equal_time_max: f64,
    pub spot_with: f64,
    pub spot_without: f64,
    pub excluded_zero_mode: bool,
}

impl CausalitySummary {
    pub fn spot_ratio(&self) -> f64 {
        self.spot_with / self.spot_without
    }
}

/// Equal-time commutator over every nonzero separation up to half the
/// lattice, and both commutators at the spot point.
pub fn causality_summary(lattice: &LatticeSpec64, spot_dt: f64, spot_dx: f64) -> fockfield::Result<CausalitySummary> {
    let sum = ModeSum::new(lattice)?;
    let equal_time_max = (1..=lattice.num_sites() / 2)
        .map(|j| sum.evaluate(0.0, j as f64 * lattice.spacing(), true).map(|s| s.value.norm()))
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))?;
    Ok(CausalitySummary {
        equal_time_max,
        spot_with: sum.evaluate(spot_dt, spot_dx, true)?.value.norm(),
        spot_without: sum.evaluate(spot_dt, spot_dx, false)?.value.norm(),
        excluded_zero_mode: sum.excluded_zero_mode(),
    })
}
