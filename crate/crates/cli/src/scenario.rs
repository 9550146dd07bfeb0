//! The six scenarios and `verify`. Each resolves its parameters through
//! [`Settings`], validates them before any heavy work, writes its artifacts
//! and then the `<scenario>.meta` sidecar.

use std::fmt::Write;

use fockfield::dynamics::{
    correlation_law_residual, correlation_nondecreasing, ehrenfest_residuals, evolve, gaussian_packet,
    integrated_width_residual, min_uncertainty_product, trajectory,
};
use fockfield::field::{commutator_sweep, spacelike_grid, Dispersion};
use fockfield::quantum_info::{
    born_distribution, chi_square_gof, conditional_state, decohere, entangled_pair, premeasure, reduced_density,
    sample_outcomes, schmidt, MeasurementModel, Subsystem, GENERATOR_NAME,
};
use fockfield::report::{density_csv, entropy_csv, fmt_real, outcome_csv, sweep_csv, trajectory_csv};
use fockfield::wick::{normal_order, parse, vacuum_expectation};
use fockfield::{LatticeSpec64, ModeSpace, Statistics, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checks::{self, Fault};
use crate::config::{parse_list, parse_times, parse_value, ConfigFile, Settings};
use crate::error::RunError;
use crate::output::{Metadata, OutputDir};
use crate::verify::{self, Tag};
use crate::{CausalityArgs, EntangleArgs, FockCheckArgs, MeasureArgs, Outcome, VerifyArgs, WavepacketArgs, WickArgs};

fn invalid(message: impl Into<String>) -> RunError {
    RunError::Validation(message.into())
}

/// Collects artifacts and writes the sidecar last.
struct Run<'a> {
    out: &'a OutputDir,
    meta: Metadata,
    outcome: Outcome,
}

impl<'a> Run<'a> {
    fn new(settings: &Settings, out: &'a OutputDir) -> Self {
        let mut meta = Metadata::new(settings.scenario());
        for (k, v) in settings.resolved() {
            meta.push(format!("param.{k}"), v);
        }
        Self { out, meta, outcome: Outcome::default() }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.meta.push("seed", seed);
        self.meta.push("generator", GENERATOR_NAME);
        self
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.out.write(name, contents)?;
        self.outcome.artifacts.push(path);
        Ok(())
    }

    fn violate(&mut self, message: String) {
        self.outcome.violation.get_or_insert(message);
    }

    fn finish(mut self, scenario: &str) -> Result<Outcome, RunError> {
        let names: Vec<String> = self
            .outcome
            .artifacts
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        self.meta.push("artifacts", names.join(","));
        if let Some(v) = &self.outcome.violation {
            self.meta.push("violation", v);
        }
        let path = self.out.write(&format!("{scenario}.meta"), &self.meta.render())?;
        self.outcome.artifacts.push(path);
        Ok(self.outcome)
    }
}

fn summary_csv(entries: &[(&str, f64)]) -> String {
    entropy_csv(entries)
}

pub fn fock_check(a: &FockCheckArgs, file: Option<&ConfigFile>, out: &OutputDir) -> Result<Outcome, RunError> {
    let mut s = Settings::new("fock-check", file);
    let statistics = s.raw("statistics", &a.statistics, "bose");
    let modes: usize = s.get("modes", &a.modes, "4")?;
    let samples: usize = s.get("samples", &a.samples, "200")?;
    let seed: u64 = s.get("seed", &a.seed, "42")?;
    let space = match statistics.as_str() {
        "bose" => {
            let nmax: u8 = s.get("nmax", &a.nmax, "6")?;
            if nmax < 2 {
                return Err(invalid("nmax must be at least 2 so the safe subspace is nontrivial"));
            }
            ModeSpace::bose(modes, nmax)?
        }
        "fermi" => {
            if s.optional("nmax", &a.nmax).is_some() {
                return Err(invalid("nmax applies only to bose statistics"));
            }
            ModeSpace::fermi(modes)?
        }
        other => return Err(invalid(format!("statistics must be bose or fermi, got '{other}'"))),
    };
    if samples == 0 {
        return Err(invalid("samples must be positive"));
    }
    s.finish()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("sample,mode_a,mode_b,occupations,commutator,raising,lowering\n");
    let mut worst = 0.0f64;
    for i in 0..samples {
        let occ = checks::random_safe_occupation(&space, &mut rng);
        let ma = rand::Rng::gen_range(&mut rng, 0..space.num_modes());
        let mb = rand::Rng::gen_range(&mut rng, 0..space.num_modes());
        let r = checks::ladder_residuals(&space, &occ, ma, mb, None)?.map(f64::abs);
        worst = r.iter().copied().fold(worst, f64::max);
        let occ_text: Vec<String> = occ.iter().map(u8::to_string).collect();
        let _ = writeln!(
            csv,
            "{i},{ma},{mb},{},{},{},{}",
            occ_text.join(" "),
            fmt_real(r[0]),
            fmt_real(r[1]),
            fmt_real(r[2])
        );
    }
    let mut entries = vec![("max_relation_residual", worst)];
    if space.statistics() == Statistics::Bose {
        entries.push(("max_antiparticle_deviation", checks::max_antiparticle_deviation(&space, samples, &mut rng)?));
    }

    let mut run = Run::new(&s, out).seeded(seed);
    run.write("fock_check.csv", &csv)?;
    run.write("fock_check_summary.csv", &summary_csv(&entries))?;
    for (label, value) in &entries {
        if *value > 1e-12 {
            run.violate(format!("{label} = {value:.3e} exceeds 1e-12"));
        }
    }
    let mut text = String::new();
    for (label, value) in &entries {
        let _ = writeln!(text, "{label} {value:.3e}");
    }
    run.outcome.stdout = text;
    run.finish("fock-check")
}

pub fn wick(a: &WickArgs, file: Option<&ConfigFile>, out: &OutputDir) -> Result<Outcome, RunError> {
    let mut s = Settings::new("wick", file);
    let expr = s.optional("expr", &a.expr);
    let path = s.optional("file", &a.file);
    let vacuum: bool = s.get("vacuum", &a.vacuum, "false")?;
    s.finish()?;
    let expressions: Vec<String> = match (expr, path) {
        (Some(e), None) => vec![e],
        (None, Some(p)) => std::fs::read_to_string(&p)
            .map_err(|source| RunError::Io { path: p.clone().into(), source })?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_owned)
            .collect(),
        (Some(_), Some(_)) => return Err(invalid("give either expr or file, not both")),
        (None, None) => return Err(invalid("wick needs expr or file")),
    };
    let mut text = String::new();
    for e in &expressions {
        let parsed = parse(e).map_err(|err| invalid(format!("'{e}': {err}")))?;
        let rendered = if vacuum { vacuum_expectation(&parsed).to_string() } else { normal_order(&parsed).to_string() };
        text.push_str(&rendered);
        text.push('\n');
    }
    let mut run = Run::new(&s, out);
    run.write("wick.txt", &text)?;
    run.outcome.stdout = text;
    run.finish("wick")
}

pub fn causality(a: &CausalityArgs, file: Option<&ConfigFile>, out: &OutputDir) -> Result<Outcome, RunError> {
    let mut s = Settings::new("causality", file);
    let m: usize = s.get("M", &a.m, "512")?;
    let dx: f64 = s.get("dx", &a.dx, "0.25")?;
    let mass: f64 = s.get("mass", &a.mass, "1")?;
    let dispersion = match s.raw("dispersion", &a.dispersion, "lattice").as_str() {
        "lattice" => Dispersion::LatticeRelativistic,
        "continuum" => Dispersion::Relativistic,
        other => return Err(invalid(format!("dispersion must be lattice or continuum, got '{other}'"))),
    };
    let lattice = LatticeSpec64::new(m, dx, mass, dispersion)?;
    let default_extent = fmt_real(m as f64 * dx / 4.0);
    let points: Vec<(f64, f64)> = match (s.optional("dts", &a.dts), s.optional("separations", &a.separations)) {
        (dts, Some(seps)) => {
            let dts: Vec<f64> = parse_list("dts", dts.as_deref().unwrap_or("0"))?;
            let seps: Vec<f64> = parse_list("separations", &seps)?;
            dts.iter().flat_map(|&t| seps.iter().map(move |&x| (t, x))).collect()
        }
        (Some(_), None) => return Err(invalid("dts needs separations")),
        (None, None) => {
            let extent: f64 = s.get("extent", &a.extent, &default_extent)?;
            if !(extent > 0.0) || extent > lattice.length() / 2.0 {
                return Err(invalid(format!("extent must lie in (0, {}]", lattice.length() / 2.0)));
            }
            spacelike_grid(&lattice, extent)
        }
    };
    if points.is_empty() {
        return Err(invalid("no separations to evaluate"));
    }
    let spot_dt: f64 = s.get("spot_dt", &a.spot_dt, "0.5")?;
    let spot_dx: f64 = s.get("spot_dx", &a.spot_dx, "3.0")?;
    s.finish()?;

    let sweep = commutator_sweep(&lattice, &points)?;
    let summary = checks::causality_summary(&lattice, spot_dt, spot_dx)?;
    let spacelike = sweep.iter().filter(|p| p.dx.abs() > p.dt.abs());
    let (grid_with, grid_without) = spacelike.fold((0.0f64, 0.0f64), |(w, wo), p| {
        (w.max(p.with_antiparticles.norm()), wo.max(p.without_antiparticles.norm()))
    });
    let entries = [
        ("equal_time_max", summary.equal_time_max),
        ("grid_max_with", grid_with),
        ("grid_max_without", grid_without),
        ("spot_with", summary.spot_with),
        ("spot_without", summary.spot_without),
        ("spot_ratio", summary.spot_ratio()),
        ("excluded_zero_mode", if summary.excluded_zero_mode { 1.0 } else { 0.0 }),
    ];

    let mut run = Run::new(&s, out);
    run.meta.push("excluded_zero_mode", summary.excluded_zero_mode);
    run.write("causality_sweep.csv", &sweep_csv(&sweep))?;
    run.write("causality_summary.csv", &summary_csv(&entries))?;
    if summary.equal_time_max > 1e-12 {
        run.violate(format!("equal-time commutator {:.3e} exceeds 1e-12", summary.equal_time_max));
    }
    let mut text = String::new();
    for (label, value) in &entries {
        let _ = writeln!(text, "{label} {value:.3e}");
    }
    run.outcome.stdout = text;
    run.finish("causality")
}

pub fn wavepacket(a: &WavepacketArgs, file: Option<&ConfigFile>, out: &OutputDir) -> Result<Outcome, RunError> {
    let mut s = Settings::new("wavepacket", file);
    let m: usize = s.get("M", &a.m, "256")?;
    let dx: f64 = s.get("dx", &a.dx, "1")?;
    let mass: f64 = s.get("mass", &a.mass, "1")?;
    let sigma0: f64 = s.get("sigma0", &a.sigma0, "8")?;
    let chirp: f64 = s.get("chirp", &a.chirp, "1")?;
    let p0: f64 = s.get("p0", &a.p0, "0")?;
    let x0: f64 = s.get("x0", &a.x0, "0")?;
    let times = parse_times("times", &s.raw("times", &a.times, "0:5:0.01"))?;
    s.finish()?;
    if times.is_empty() {
        return Err(invalid("times is empty"));
    }
    if !chirp.is_finite() || !p0.is_finite() || !x0.is_finite() {
        return Err(invalid("chirp, p0 and x0 must be finite"));
    }

    let lattice = LatticeSpec64::new(m, dx, mass, Dispersion::Nonrelativistic)?;
    let f0 = gaussian_packet(&lattice, x0, p0, sigma0, chirp)?;
    let records = trajectory(&f0, &times)?;
    let last = times[times.len() - 1];
    let f1 = evolve(&f0, last)?;

    let norm_drift = (f1.norm_sqr() - 1.0).abs();
    let min_product = min_uncertainty_product(&records);
    let nondecreasing = correlation_nondecreasing(&records, 1e-10);
    let h0 = records[0].mean_h;
    let mut entries = vec![
        ("initial_correlation", records[0].mean_c),
        ("correlation_law", correlation_law_residual(&records)?),
        ("integrated_width", integrated_width_residual(&records, mass)?),
        ("min_uncertainty", min_product),
        ("energy_drift", records.iter().map(|r| (r.mean_h - h0).abs()).fold(0.0, f64::max)),
        ("norm_drift", norm_drift),
        ("correlation_nondecreasing", if nondecreasing { 1.0 } else { 0.0 }),
    ];
    // finite differences need at least three uniformly spaced samples
    if let Ok(report) = ehrenfest_residuals(&records, mass) {
        entries.push(("width_residual", report.width_residual));
        entries.push(("correlation_residual", report.correlation_residual));
    }

    let mut run = Run::new(&s, out);
    run.write("wavepacket_trajectory.csv", &trajectory_csv(&records))?;
    run.write("wavepacket_density_initial.csv", &density_csv(&f0))?;
    run.write("wavepacket_density_final.csv", &density_csv(&f1))?;
    run.write("wavepacket_summary.csv", &summary_csv(&entries))?;
    if !nondecreasing {
        run.violate("<C> decreased between samples".into());
    }
    if min_product < 0.5 * (1.0 - 1e-9) {
        run.violate(format!("dx*dp = {min_product} below the uncertainty bound"));
    }
    if norm_drift > 1e-10 {
        run.violate(format!("norm drifted by {norm_drift:.3e}"));
    }
    let mut text = String::new();
    for (label, value) in &entries {
        let _ = writeln!(text, "{label} {value:.6e}");
    }
    run.outcome.stdout = text;
    run.finish("wavepacket")
}

/// `(e0, c·e0 + √(1 − c²)·e1)` in dimension `dim`.
fn overlapping_pair(dim: usize, overlap: f64) -> (Vec<C64>, Vec<C64>) {
    let mut first = vec![C64::new(0.0, 0.0); dim];
    first[0] = C64::new(1.0, 0.0);
    let mut second = vec![C64::new(0.0, 0.0); dim];
    second[0] = C64::new(overlap, 0.0);
    second[1] = C64::new((1.0 - overlap * overlap).max(0.0).sqrt(), 0.0);
    (first, second)
}

pub fn entangle(a: &EntangleArgs, file: Option<&ConfigFile>, out: &OutputDir) -> Result<Outcome, RunError> {
    let mut s = Settings::new("entangle", file);
    let dim: usize = s.get("dim", &a.dim, "2")?;
    let phi_overlap: f64 = s.get("phi_overlap", &a.phi_overlap, "0")?;
    let psi_overlap: f64 = s.get("psi_overlap", &a.psi_overlap, "0")?;
    s.finish()?;
    if !(2..=64).contains(&dim) {
        return Err(invalid(format!("dim must lie in 2..=64, got {dim}")));
    }
    for (name, c) in [("phi_overlap", phi_overlap), ("psi_overlap", psi_overlap)] {
        if !(0.0..=1.0).contains(&c) {
            return Err(invalid(format!("{name} must lie in [0, 1], got {c}")));
        }
    }
    let (phi1, phi2) = overlapping_pair(dim, phi_overlap);
    let (psi1, psi2) = overlapping_pair(dim, psi_overlap);
    let state = entangled_pair(&phi1, &phi2, &psi1, &psi2)?;
    let decomposition = schmidt(&state);
    let rho_a = reduced_density(&state, Subsystem::A);
    let rho_b = reduced_density(&state, Subsystem::B);
    let (s_a, s_b) = (rho_a.entropy(), rho_b.entropy());
    // correlation: having found A in φ₁, the chance that B is in ψ₁
    let conditional = conditional_state(&state, &phi1)?;
    let follow: f64 = conditional.state.iter().zip(&psi1).map(|(b, p)| p.conj() * b).sum::<C64>().norm_sqr();

    let mut entries = vec![
        ("entropy_a", s_a),
        ("entropy_b", s_b),
        ("ln2", std::f64::consts::LN_2),
        ("purity_a", rho_a.purity()),
        ("schmidt_rank", decomposition.rank(1e-12) as f64),
        ("outcome_probability", conditional.probability),
        ("conditional_correlation", follow),
    ];
    let labels = ["schmidt_0", "schmidt_1"];
    for (label, c) in labels.iter().zip(&decomposition.coefficients) {
        entries.push((label, *c));
    }

    let mut run = Run::new(&s, out);
    run.write("entangle.csv", &summary_csv(&entries))?;
    if (s_a - s_b).abs() > 1e-10 {
        run.violate(format!("subsystem entropies differ: {s_a} vs {s_b}"));
    }
    let mut text = String::new();
    for (label, value) in &entries {
        let _ = writeln!(text, "{label} {value:.12}");
    }
    run.outcome.stdout = text;
    run.finish("entangle")
}

pub fn measure(a: &MeasureArgs, file: Option<&ConfigFile>, out: &OutputDir) -> Result<Outcome, RunError> {
    let mut s = Settings::new("measure", file);
    let raw: Vec<C64> = parse_list("amplitudes", &s.raw("amplitudes", &a.amplitudes, "0.5,0.8660254037844386"))?;
    if raw.is_empty() {
        return Err(invalid("amplitudes is empty"));
    }
    let default_eigen: Vec<String> = (1..=raw.len()).map(|i| i.to_string()).collect();
    let eigenvalues: Vec<f64> =
        parse_list("eigenvalues", &s.raw("eigenvalues", &a.eigenvalues, &default_eigen.join(",")))?;
    let energy: f64 = s.get("energy", &a.energy, "1")?;
    let samples: u64 = s.get("samples", &a.samples, "100000")?;
    let seed: u64 = s.get("seed", &a.seed, "42")?;
    let significance: f64 = s.get("significance", &a.significance, "0.001")?;
    s.finish()?;
    if !(significance > 0.0 && significance < 1.0) {
        return Err(invalid(format!("significance must lie in (0, 1), got {significance}")));
    }
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(invalid("amplitudes must have a finite, nonzero norm"));
    }
    let f: Vec<C64> = raw.iter().map(|c| c / norm).collect();
    let model = MeasurementModel::new(eigenvalues.clone(), f.clone(), energy)?;
    let k = model.len();

    let weights = born_distribution(&f)?;
    let entangled = premeasure(&model);
    let rho = decohere(&entangled, &model.pointer_basis())?;
    let diagonal =
        (0..k).map(|i| (rho.projector_weight(&model.product_vector(i)) - weights[i]).abs()).fold(0.0, f64::max);
    let apparatus = rho.partial_trace((k, k), Subsystem::B)?;
    let counts = sample_outcomes(&apparatus, samples, seed)?;
    let fit = chi_square_gof(&counts, &weights, significance)?;

    let entries = [
        ("decoherence_time", model.decoherence_time()),
        ("purity_premeasured", reduced_density(&entangled, Subsystem::B).purity()),
        ("purity_decohered", rho.purity()),
        ("sum_f4", weights.iter().map(|w| w * w).sum()),
        ("entropy_apparatus", apparatus.entropy()),
        ("diagonal_residual", diagonal),
        ("chi_square", fit.statistic),
        ("degrees_of_freedom", fit.degrees_of_freedom as f64),
        ("p_value", fit.p_value),
        ("fit_passed", if fit.passed { 1.0 } else { 0.0 }),
    ];

    let mut run = Run::new(&s, out).seeded(seed);
    run.write("measure_outcomes.csv", &outcome_csv(&eigenvalues, &counts))?;
    run.write("measure_summary.csv", &summary_csv(&entries))?;
    if diagonal > 1e-12 {
        run.violate(format!("decohered weights differ from |f|^2 by {diagonal:.3e}"));
    }
    let mut text = String::new();
    for (label, value) in &entries {
        let _ = writeln!(text, "{label} {value:.6e}");
    }
    run.outcome.stdout = text;
    run.finish("measure")
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, RunError> {
    let only = a.only.as_deref().map(|s| parse_value::<Tag>("only", s)).transpose()?;
    let fault = a.inject_fault.as_deref().map(|s| parse_value::<Fault>("inject-fault", s)).transpose()?;
    let outcomes = verify::run_checks(only, fault);
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.tag.as_str()).collect();
    Ok(Outcome {
        stdout: verify::render_table(&outcomes),
        artifacts: Vec::new(),
        violation: (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", "))),
    })
}
