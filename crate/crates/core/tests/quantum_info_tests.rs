use fockfield::fock::{two_particle_symmetrized, PairState};
use fockfield::quantum_info::{
    born_distribution, chi_square_gof, conditional_state, decohere, entangled_pair, premeasure, reduced_density,
    sample_outcomes, schmidt, slot_state, BipartiteState, DensityMatrix, MeasurementModel, Subsystem,
};
use fockfield::{Error, ModeSpace, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn e(n: usize, i: usize) -> Vec<C64> {
    (0..n).map(|k| if k == i { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()
}

fn unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let raw: Vec<C64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|z| z / norm).collect()
}

fn model(f: Vec<C64>) -> MeasurementModel<f64> {
    let eigenvalues = (0..f.len()).map(|i| i as f64 + 1.0).collect();
    MeasurementModel::new(eigenvalues, f, 1.0).unwrap()
}

/// Entanglement entropy of a 2×2 amplitude matrix from `c² = (1 ± √(1 − 4|det M|²))/2`.
fn two_by_two_entropy(m: &DMatrix<C64>) -> f64 {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let root = (1.0 - 4.0 * det.norm_sqr()).max(0.0).sqrt();
    [(1.0 + root) / 2.0, (1.0 - root) / 2.0].into_iter().filter(|&w| w > 0.0).map(|w| -w * w.ln()).sum()
}

#[test]
fn maximally_entangled_pair() {
    let s = entangled_pair(&e(2, 0), &e(2, 1), &e(2, 0), &e(2, 1)).unwrap();
    let sch = schmidt(&s);
    assert!(sch.coefficients.iter().all(|&x| (x - H).abs() <= 1e-12));
    assert!((sch.entropy - std::f64::consts::LN_2).abs() <= 1e-10);
    let rho = reduced_density(&s, Subsystem::B);
    assert!((rho.matrix() - DMatrix::from_diagonal_element(2, 2, c(0.5, 0.0))).norm() <= 1e-15);
}

#[test]
fn duplicated_pair_is_a_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let phi = unit(3, &mut rng);
    let psi = unit(2, &mut rng);
    let s = entangled_pair(&phi, &phi, &psi, &psi).unwrap();
    let sch = schmidt(&s);
    assert!(sch.entropy.abs() <= 1e-12);
    assert_eq!(sch.rank(1e-9), 1);
    assert!((reduced_density(&s, Subsystem::A).purity() - 1.0).abs() <= 1e-12);
}

#[test]
fn partially_overlapping_pair() {
    let psi2 = vec![c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)];
    let s = entangled_pair(&e(2, 0), &e(2, 1), &e(2, 0), &psi2).unwrap();
    let entropy = schmidt(&s).entropy;
    assert!(entropy > 1e-3 && entropy < std::f64::consts::LN_2 - 1e-3);
    assert!((entropy - two_by_two_entropy(s.amplitudes())).abs() <= 1e-12);
}

#[test]
fn conditional_outcomes() {
    let bell = entangled_pair(&e(2, 0), &e(2, 1), &e(2, 0), &e(2, 1)).unwrap();
    for i in 0..2 {
        let cond = conditional_state(&bell, &e(2, i)).unwrap();
        assert!((cond.probability - 0.5).abs() <= 1e-15);
        // the observed A outcome forces the matching B state
        assert!((cond.state[i].norm() - 1.0).abs() <= 1e-15);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi = unit(3, &mut rng);
    let psi = unit(2, &mut rng);
    let product = BipartiteState::product(&phi, &psi).unwrap();
    let cond = conditional_state(&product, &e(3, 1)).unwrap();
    let overlap: C64 = cond.state.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
    assert!((overlap.norm() - 1.0).abs() <= 1e-12);

    let s = entangled_pair(&unit(3, &mut rng), &unit(3, &mut rng), &unit(2, &mut rng), &unit(2, &mut rng)).unwrap();
    let diag = reduced_density(&s, Subsystem::A).diagonal();
    let mut total = 0.0;
    for (a, expected) in diag.iter().enumerate() {
        let p = conditional_state(&s, &e(3, a)).unwrap().probability;
        assert!((p - expected).abs() <= 1e-12);
        total += p;
    }
    assert!((total - 1.0).abs() <= 1e-12);
    assert!(matches!(conditional_state(&product, &e(2, 0)), Err(Error::LengthMismatch { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_bipartite_invariants(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flat = unit(da * db, &mut rng);
        let s = BipartiteState::new(DMatrix::from_fn(da, db, |a, b| flat[a * db + b])).unwrap();
        let sch = schmidt(&s);
        prop_assert!((sch.coefficients.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(sch.coefficients.windows(2).all(|w| w[0] >= w[1]));
        let ra = reduced_density(&s, Subsystem::A);
        let rb = reduced_density(&s, Subsystem::B);
        prop_assert!(DensityMatrix::new(ra.matrix().clone()).is_ok());
        prop_assert!(DensityMatrix::new(rb.matrix().clone()).is_ok());
        prop_assert!((ra.entropy() - rb.entropy()).abs() <= 1e-10);
        prop_assert!((ra.entropy() - sch.entropy).abs() <= 1e-10);

        let full = DensityMatrix::pure(&s.to_vector()).unwrap();
        let traced = full.partial_trace((da, db), Subsystem::A).unwrap();
        prop_assert!((traced.matrix() - ra.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn measurement_chain_invariants(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = unit(n, &mut rng);
        let weights = born_distribution(&f).unwrap();
        let m = model(f);
        let s = premeasure(&m);
        let pure = DensityMatrix::pure(&s.to_vector()).unwrap();
        let rho = decohere(&s, &m.pointer_basis()).unwrap();

        prop_assert!(rho.validate().is_ok());
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(rho.purity() <= pure.purity() + 1e-12);
        for (i, w) in weights.iter().enumerate() {
            prop_assert!((rho.projector_weight(&m.product_vector(i)) - w).abs() <= 1e-12);
        }
        for (a, b) in rho.diagonal().iter().zip(pure.diagonal()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        // coherences between different pointer states are gone
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    prop_assert!(rho.matrix()[(i * n + i, j * n + j)].norm() == 0.0);
                }
            }
        }
        let quartic: f64 = weights.iter().map(|w| w * w).sum();
        prop_assert!((rho.purity() - quartic).abs() <= 1e-12);
        prop_assert!((reduced_density(&s, Subsystem::A).purity() - quartic).abs() <= 1e-12);

        let shannon: f64 = weights.iter().filter(|&&w| w > 0.0).map(|w| -w * w.ln()).sum();
        prop_assert!((reduced_density(&s, Subsystem::A).entropy() - shannon).abs() <= 1e-10);
        prop_assert!((reduced_density(&s, Subsystem::B).entropy() - shannon).abs() <= 1e-10);
    }
}

#[test]
fn decoherence_examples() {
    let m = model(vec![c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)]);
    let rho = decohere(&premeasure(&m), &m.pointer_basis()).unwrap();
    assert!((rho.projector_weight(&m.product_vector(0)) - 0.25).abs() <= 1e-15);
    assert!((rho.projector_weight(&m.product_vector(1)) - 0.75).abs() <= 1e-15);
    assert!((rho.purity() - 0.625).abs() <= 1e-12);

    let trivial = model(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let s = premeasure(&trivial);
    assert_eq!(schmidt(&s).rank(1e-12), 1);
    let rho = decohere(&s, &trivial.pointer_basis()).unwrap();
    assert!((rho.purity() - 1.0).abs() <= 1e-12);

    let even = model(vec![c(H, 0.0), c(0.0, H)]);
    assert!((schmidt(&premeasure(&even)).entropy - std::f64::consts::LN_2).abs() <= 1e-12);
}

#[test]
fn decoherence_rejects_bad_pointer_basis() {
    let m = model(vec![c(H, 0.0), c(H, 0.0)]);
    let s = premeasure(&m);
    let skewed = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(H, 0.0), c(H, 0.0)]];
    assert!(decohere(&s, &skewed).is_err());
    assert!(decohere(&s, &[e(2, 0)]).is_err());
}

fn apparatus_density(f: Vec<C64>) -> DensityMatrix<f64> {
    let n = f.len();
    let m = model(f);
    decohere(&premeasure(&m), &m.pointer_basis()).unwrap().partial_trace((n, n), Subsystem::B).unwrap()
}

#[test]
fn sampling_frequencies_and_determinism() {
    let rho = apparatus_density(vec![c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)]);
    let counts = sample_outcomes(&rho, 100_000, 7).unwrap();
    assert_eq!(counts.iter().sum::<u64>(), 100_000);
    let frequency = counts[0] as f64 / 1e5;
    assert!((frequency - 0.25).abs() <= 0.01, "{frequency}");

    assert_eq!(sample_outcomes(&rho, 10, 42).unwrap(), sample_outcomes(&rho, 10, 42).unwrap());

    let certain = apparatus_density(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    assert_eq!(sample_outcomes(&certain, 5000, 1).unwrap(), vec![5000, 0]);
}

#[test]
fn sampling_is_independent_of_thread_count() {
    let rho = apparatus_density(vec![c(0.6, 0.0), c(0.0, 0.8)]);
    let n = 300_001;
    let parallel = sample_outcomes(&rho, n, 99).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| sample_outcomes(&rho, n, 99).unwrap());
    assert_eq!(parallel, serial);
    assert_ne!(parallel, sample_outcomes(&rho, n, 100).unwrap());
}

#[test]
fn sampling_passes_goodness_of_fit_across_seeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = unit(4, &mut rng);
    let probabilities = born_distribution(&f).unwrap();
    let rho = apparatus_density(f);
    let failures = (0..20u64)
        .filter(|&seed| {
            let counts = sample_outcomes(&rho, 100_000, seed).unwrap();
            !chi_square_gof(&counts, &probabilities, 1e-3).unwrap().passed
        })
        .count();
    assert!(failures <= 1, "{failures} of 20 seeds rejected");
}

#[test]
fn slots_of_identical_particles_are_never_separable() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for space in [ModeSpace::bose(4, 3).unwrap(), ModeSpace::fermi(4).unwrap()] {
        for _ in 0..20 {
            let (xi, eta) = (unit(4, &mut rng), unit(4, &mut rng));
            let PairState::State(v) = two_particle_symmetrized(&xi, &eta, space).unwrap() else {
                panic!("independent random vectors are not parallel");
            };
            let s = slot_state(&v).unwrap();
            let (rows, cols) = s.dims();
            let swapped = DMatrix::from_fn(rows, cols, |a, b| s.amplitudes()[(b, a)]);
            let sign = space.statistics().exchange_sign() as f64;
            assert!((swapped - s.amplitudes() * c(sign, 0.0)).norm() <= 1e-12);
            assert!(schmidt(&s).rank(1e-9) >= 2);
        }
    }
}

#[test]
fn born_rule_checks_normalization() {
    assert!(matches!(born_distribution(&[c(0.5, 0.0)]), Err(Error::NotNormalized { .. })));
    let p = born_distribution(&[c(H, 0.0), c(0.0, H)]).unwrap();
    assert!(p.iter().all(|&x| (x - 0.5).abs() <= 1e-15));
}

#[test]
fn single_precision_bell_state() {
    let one = num_complex::Complex::<f32>::new(1.0, 0.0);
    let zero = num_complex::Complex::<f32>::new(0.0, 0.0);
    let (e0, e1) = (vec![one, zero], vec![zero, one]);
    let s = entangled_pair(&e0, &e1, &e0, &e1).unwrap();
    assert!((schmidt(&s).entropy - std::f32::consts::LN_2).abs() <= 1e-5);
    assert!((reduced_density(&s, Subsystem::B).purity() - 0.5).abs() <= 1e-6);
}
