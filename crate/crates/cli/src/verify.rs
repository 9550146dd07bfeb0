//! Reduced-scale invariant suite behind `fockfield verify`.
//!
//! Each check is keyed by the equation it exercises; all sizes stay within
//! `M ≤ 64` and `nmax ≤ 6`, and every random draw comes from a fixed seed,
//! so the printed table is identical from run to run.

use std::fmt::Write;
use std::str::FromStr;

use fockfield::field::Dispersion;
use fockfield::{LatticeSpec64, ModeSpace, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checks::{self, Fault};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tag {
    Eq3,
    Eq8,
    Eq12,
    Eq13,
    Eq14,
    Comment6,
}

impl Tag {
    pub const ALL: [Tag; 6] = [Tag::Eq3, Tag::Eq8, Tag::Eq12, Tag::Eq13, Tag::Eq14, Tag::Comment6];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Eq3 => "eq3",
            Tag::Eq8 => "eq8",
            Tag::Eq12 => "eq12",
            Tag::Eq13 => "eq13",
            Tag::Eq14 => "eq14",
            Tag::Comment6 => "comment6",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Tag::Eq3 => "ladder (anti)commutation relations; bosonic <A+A - AA+> = -1",
            Tag::Eq8 => "one-particle density |f(x)|^2; symbolic contraction; zero field at fixed N",
            Tag::Eq12 => "d<X^2>/dt = (2/m)<C>; integrated width law; uncertainty bound",
            Tag::Eq13 => "d<C>/dt = 2<H>; <C> nondecreasing; <H> conserved",
            Tag::Eq14 => "pointer-basis decoherence weights, purity and sampled frequencies",
            Tag::Comment6 => "field commutator: zero at equal times, suppressed by antiparticles",
        }
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| {
            let known: Vec<&str> = Tag::ALL.iter().map(|t| t.as_str()).collect();
            format!("unknown check '{s}' (known: {})", known.join(", "))
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub tag: Tag,
    pub passed: bool,
    pub detail: String,
}

type CheckResult = fockfield::Result<(bool, String)>;

fn eq3(fault: Option<Fault>) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bose = ModeSpace::bose(4, 6)?;
    let fermi = ModeSpace::fermi(8)?;
    let b = checks::max_ladder_residual(&bose, 200, &mut rng, fault)?;
    let f = checks::max_ladder_residual(&fermi, 200, &mut rng, fault)?;
    let anti = checks::max_antiparticle_deviation(&bose, 50, &mut rng)?;
    let worst = b.into_iter().chain(f).fold(0.0f64, f64::max);
    Ok((worst <= 1e-12 && anti <= 1e-12, format!("relations {worst:.2e}, antiparticle {anti:.2e}")))
}

fn eq8() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let density = checks::max_density_residual(16, 20, &mut rng)?;
    let (printed, contraction) = checks::contraction_cross_check(6, 10, &mut rng)?;
    let field = checks::max_fixed_number_field(4, 3, &mut rng)?;
    let symbolic_ok = printed == "d(x,x') d(x,x'')";
    Ok((
        density <= 1e-12 && contraction <= 1e-10 && field <= 1e-14 && symbolic_ok,
        format!("density {density:.2e}, contraction [{printed}] {contraction:.2e}, field {field:.2e}"),
    ))
}

const PACKET_SITES: usize = 64;
const PACKET_SIGMA: f64 = 3.0;

/// Shrink-then-spread window: the unit-chirp packet returns to its initial
/// width at `t = 2mσ0²`.
fn packet_summary() -> fockfield::Result<checks::DynamicsSummary> {
    let horizon = 2.0 * PACKET_SIGMA * PACKET_SIGMA;
    let times: Vec<f64> = (0..=72).map(|i| horizon * i as f64 / 72.0).collect();
    let records = checks::packet_trajectory(PACKET_SITES, 1.0, PACKET_SIGMA, 1.0, &times)?;
    checks::summarize_dynamics(&records, 1.0)
}

fn eq12() -> CheckResult {
    let s = packet_summary()?;
    let bound = 0.5 * (1.0 - 1e-9);
    Ok((
        s.width_residual <= 1e-5 && s.integrated_width <= 1e-6 && s.min_uncertainty >= bound,
        format!(
            "finite difference {:.2e}, integrated {:.2e}, min dx*dp {:.6}",
            s.width_residual, s.integrated_width, s.min_uncertainty
        ),
    ))
}

fn eq13() -> CheckResult {
    let s = packet_summary()?;
    Ok((
        s.correlation_residual <= 1e-5
            && s.correlation_law <= 1e-6
            && s.nondecreasing
            && s.energy_drift <= 1e-10
            && (s.initial_correlation + 0.5).abs() <= 1e-4,
        format!(
            "finite difference {:.2e}, linear law {:.2e}, <C>(0) {:.6}, nondecreasing {}",
            s.correlation_residual, s.correlation_law, s.initial_correlation, s.nondecreasing
        ),
    ))
}

fn eq14() -> CheckResult {
    let f = [C64::new(0.2f64.sqrt(), 0.0), C64::new(0.0, 0.3f64.sqrt()), C64::new(-(0.5f64.sqrt()), 0.0)];
    let s = checks::decoherence_summary(&f)?;
    let failures = checks::sampling_failures(&f, 100_000, 3, 1e-3)?;
    Ok((
        s.diagonal_residual <= 1e-12 && s.purity_residual <= 1e-12 && s.entropy_residual <= 1e-10 && failures <= 1,
        format!(
            "diagonal {:.2e}, purity {:.2e}, entropy {:.2e}, chi-square rejections {failures}/3",
            s.diagonal_residual, s.purity_residual, s.entropy_residual
        ),
    ))
}

fn comment6() -> CheckResult {
    let lattice = LatticeSpec64::new(64, 0.25, 1.0, Dispersion::LatticeRelativistic)?;
    let s = checks::causality_summary(&lattice, 0.5, 3.0)?;
    Ok((
        s.equal_time_max <= 1e-12 && s.spot_ratio() <= 1e-3,
        format!("equal time {:.2e}, spot ratio {:.2e}", s.equal_time_max, s.spot_ratio()),
    ))
}

pub fn run_check(tag: Tag, fault: Option<Fault>) -> CheckOutcome {
    let result = match tag {
        Tag::Eq3 => eq3(fault),
        Tag::Eq8 => eq8(),
        Tag::Eq12 => eq12(),
        Tag::Eq13 => eq13(),
        Tag::Eq14 => eq14(),
        Tag::Comment6 => comment6(),
    };
    match result {
        Ok((passed, detail)) => CheckOutcome { tag, passed, detail },
        Err(e) => CheckOutcome { tag, passed: false, detail: format!("error: {e}") },
    }
}

pub fn run_checks(only: Option<Tag>, fault: Option<Fault>) -> Vec<CheckOutcome> {
    Tag::ALL.into_iter().filter(|t| only.is_none_or(|o| o == *t)).map(|t| run_check(t, fault)).collect()
}

pub fn render_table(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<9} {:<6} detail", "check", "result");
    for o in outcomes {
        let _ = writeln!(out, "{:<9} {:<6} {}", o.tag.as_str(), if o.passed { "PASS" } else { "FAIL" }, o.detail);
        let _ = writeln!(out, "{:<9} {:<6} ({})", "", "", o.tag.description());
    }
    out
}
