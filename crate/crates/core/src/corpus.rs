//! Generators for the named example sets, each with the descriptor that
//! makes the exact checkers applicable.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CosetCount, Descriptor, PlanarSet};

/// A named corpus set plus its sampling window.
#[derive(Clone, Debug, PartialEq)]
pub enum CorpusSet {
    /// The integer lattice on the line, `lo..=hi`.
    Integers { lo: i64, hi: i64 },
    /// The square integer lattice, `(a, b)` with both in `lo..=hi`.
    Gauss { lo: i64, hi: i64 },
    /// Integer translates of the dyadic vertical ladder: `x + i 2^n`,
    /// `x` integer in `x_lo..=x_hi`, `n = 0..=n_max`.
    E1 { x_lo: i64, x_hi: i64, n_max: u32 },
    /// `r^n` for `n = 0..=n_max`, `r > 1`: bounded below.
    Geometric { r: f64, n_max: u32 },
    /// `+-s^n` for `n = 0..=n_max`, `s > 1`: unbounded both ways.
    PmGeometric { s: f64, n_max: u32 },
    /// `reps + k` for `k` in `lo..=hi`.
    AdditivePeriodic { reps: Vec<Complex64>, lo: i64, hi: i64 },
    /// `factor^k * reps` for `k` in `lo..=hi`.
    MultiplicativePeriodic { factor: f64, reps: Vec<Complex64>, lo: i32, hi: i32 },
}

pub fn generate(set: &CorpusSet) -> Result<PlanarSet> {
    match set {
        CorpusSet::Integers { lo, hi } => {
            check_window(*lo, *hi)?;
            let points = (*lo..=*hi).map(|n| Complex64::new(n as f64, 0.0)).collect();
            PlanarSet::new(
                points,
                Some(Descriptor::AdditivePeriodic {
                    reps: vec![Complex64::new(0.0, 0.0)],
                    count: CosetCount::Finite(1),
                }),
            )
        }
        CorpusSet::Gauss { lo, hi } => {
            check_window(*lo, *hi)?;
            let mut points = Vec::new();
            for a in *lo..=*hi {
                for b in *lo..=*hi {
                    points.push(Complex64::new(a as f64, b as f64));
                }
            }
            let reps = (*lo..=*hi).map(|b| Complex64::new(0.0, b as f64)).collect();
            PlanarSet::new(
                points,
                Some(Descriptor::AdditivePeriodic { reps, count: CosetCount::Infinite }),
            )
        }
        CorpusSet::E1 { x_lo, x_hi, n_max } => {
            check_window(*x_lo, *x_hi)?;
            let mut points = Vec::new();
            for x in *x_lo..=*x_hi {
                for n in 0..=*n_max {
                    points.push(Complex64::new(x as f64, 2f64.powi(n as i32)));
                }
            }
            let reps = (0..=*n_max).map(|n| Complex64::new(0.0, 2f64.powi(n as i32))).collect();
            PlanarSet::new(
                points,
                Some(Descriptor::AdditivePeriodic { reps, count: CosetCount::Infinite }),
            )
        }
        CorpusSet::Geometric { r, n_max } => {
            if !(*r > 1.0) {
                return Err(Error::BadParam(format!("geometric ratio {r} must exceed 1")));
            }
            let points = (0..=*n_max).map(|n| Complex64::new(r.powi(n as i32), 0.0)).collect();
            PlanarSet::new(
                points,
                Some(Descriptor::CorpusFormula { name: "geometric".into(), params: vec![*r] }),
            )
        }
        CorpusSet::PmGeometric { s, n_max } => {
            if !(*s > 1.0) {
                return Err(Error::BadParam(format!("geometric ratio {s} must exceed 1")));
            }
            let mut points = Vec::new();
            for n in 0..=*n_max {
                let v = s.powi(n as i32);
                points.push(Complex64::new(v, 0.0));
                points.push(Complex64::new(-v, 0.0));
            }
            PlanarSet::new(
                points,
                Some(Descriptor::CorpusFormula { name: "pm_geometric".into(), params: vec![*s] }),
            )
        }
        CorpusSet::AdditivePeriodic { reps, lo, hi } => {
            check_window(*lo, *hi)?;
            let mut points = Vec::new();
            for rep in reps {
                for k in *lo..=*hi {
                    points.push(rep + Complex64::new(k as f64, 0.0));
                }
            }
            PlanarSet::new(
                points,
                Some(Descriptor::AdditivePeriodic {
                    reps: reps.clone(),
                    count: CosetCount::Finite(reps.len()),
                }),
            )
        }
        CorpusSet::MultiplicativePeriodic { factor, reps, lo, hi } => {
            if !(*factor > 1.0) {
                return Err(Error::BadParam(format!("factor {factor} must exceed 1")));
            }
            if lo > hi {
                return Err(Error::BadParam("empty exponent window".into()));
            }
            let mut points = Vec::new();
            for rep in reps {
                for k in *lo..=*hi {
                    points.push(rep * factor.powi(k));
                }
            }
            PlanarSet::new(
                points,
                Some(Descriptor::MultiplicativePeriodic {
                    factor: *factor,
                    reps: reps.clone(),
                    count: CosetCount::Finite(reps.len()),
                }),
            )
        }
    }
}

fn check_window(lo: i64, hi: i64) -> Result<()> {
    if lo > hi {
        return Err(Error::BadParam(format!("empty window [{lo}, {hi}]")));
    }
    Ok(())
}
