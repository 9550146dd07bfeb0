//! CSV rendering. Every table starts with a header row naming its columns;
//! reals use 17 significant digits, complex values are split into `re_*` and
//! `im_*` columns.

use std::fmt::Write;

use crate::dynamics::TrajectoryRecord;
use crate::field::{LatticeSpec, SweepPoint, WaveAmplitude};
use crate::scalar::Real;

pub const TRAJECTORY_HEADER: &str = "t,mean_x,mean_p,mean_x2,mean_c,mean_h,dx,dp";
pub const DENSITY_HEADER: &str = "site,x,re_f,im_f,density";
pub const SWEEP_HEADER: &str = "dt,dx,re_with,im_with,re_without,im_without";
pub const OUTCOME_HEADER: &str = "lambda,count,frequency";
pub const ENTROPY_HEADER: &str = "label,value";

/// Fixed 17-significant-digit scientific notation.
pub fn fmt_real<T: Real>(value: T) -> String {
    format!("{value:.16e}")
}

fn row<T: Real>(out: &mut String, values: &[T]) {
    let cells: Vec<String> = values.iter().map(|&v| fmt_real(v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub fn trajectory_csv<T: Real>(records: &[TrajectoryRecord<T>]) -> String {
    let mut out = format!("{TRAJECTORY_HEADER}\n");
    for r in records {
        row(&mut out, &[r.t, r.mean_x, r.mean_p, r.mean_x2, r.mean_c, r.mean_h, r.dx, r.dp]);
    }
    out
}

pub fn density_csv<T: Real>(f: &WaveAmplitude<T>) -> String {
    let lattice: &LatticeSpec<T> = f.lattice();
    let mut out = format!("{DENSITY_HEADER}\n");
    for (j, value) in f.values().iter().enumerate() {
        let _ = write!(out, "{j},");
        row(&mut out, &[lattice.position(j), value.re, value.im, value.norm_sqr()]);
    }
    out
}

pub fn sweep_csv<T: Real>(points: &[SweepPoint<T>]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for p in points {
        row(
            &mut out,
            &[
                p.dt,
                p.dx,
                p.with_antiparticles.re,
                p.with_antiparticles.im,
                p.without_antiparticles.re,
                p.without_antiparticles.im,
            ],
        );
    }
    out
}

/// Outcome counts; `lambda` is the eigenvalue attached to each index.
pub fn outcome_csv<T: Real>(eigenvalues: &[T], counts: &[u64]) -> String {
    let total: u64 = counts.iter().sum();
    let mut out = format!("{OUTCOME_HEADER}\n");
    for (&lambda, &count) in eigenvalues.iter().zip(counts) {
        let frequency = if total == 0 { 0.0 } else { count as f64 / total as f64 };
        let _ = writeln!(out, "{},{count},{}", fmt_real(lambda), fmt_real(frequency));
    }
    out
}

/// `label,value` rows; labels must not contain commas.
pub fn entropy_csv<T: Real>(entries: &[(&str, T)]) -> String {
    let mut out = format!("{ENTROPY_HEADER}\n");
    for (label, value) in entries {
        debug_assert!(!label.contains(','));
        let _ = writeln!(out, "{label},{}", fmt_real(*value));
    }
    out
}
