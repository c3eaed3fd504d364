//! Ratio criteria and scalar bounds deciding quasiconformal equivalence to
//! the integer lattice, plus the image-spacing validator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{Auto, Exec};
use crate::model::{
    Descriptor, Evidence, EquivalenceVerdict, PlanarSet, RealSequenceWindow, VerdictKind,
};

/// Criterion tags carried by verdicts.
pub const THM_ADDITIVE_PERIODIC: &str = "periodic-additive-finiteness";
pub const THM_MULTIPLICATIVE_PERIODIC: &str = "periodic-multiplicative-finiteness";
pub const THM_UNBOUNDED_NECESSITY: &str = "real-unbounded-necessity";
pub const THM_RATIO_CONDITION: &str = "ratio-condition";

/// Pair `(n, k)` attaining the extremal ratio, with the raw ratio
/// `(a_{n+k} - a_n) / (a_n - a_{n-k})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioWitness {
    pub n: i64,
    pub k: i64,
    pub ratio: f64,
}

/// Exhaustive ratio scan over every in-window index pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    /// Minimal constant `M >= 1` certified on the window: the maximum of
    /// `max(r, 1/r)` over all tested pairs.
    pub m_hat: f64,
    pub witness: RatioWitness,
    pub pairs_tested: usize,
}

/// Scan candidate carried through the reduction: `(max(r,1/r), pos, k, r)`.
type ScanBest = (f64, usize, usize, f64);

fn better(a: &ScanBest, b: &ScanBest) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2))
}

fn scan_position(vals: &[f64], p: usize) -> Option<ScanBest> {
    let last = vals.len() - 1;
    let kmax = p.min(last - p);
    if kmax == 0 {
        return None;
    }
    let mut best: Option<ScanBest> = None;
    for k in 1..=kmax {
        let r = (vals[p + k] - vals[p]) / (vals[p] - vals[p - k]);
        let m = r.max(1.0 / r);
        let cand = (m, p, k, r);
        match best {
            Some(cur) if !better(&cand, &cur) => {}
            _ => best = Some(cand),
        }
    }
    best
}

fn pairs_in_window(len: usize) -> usize {
    (0..len).map(|p| p.min(len - 1 - p)).sum()
}

pub(crate) fn ratio_scan<E: Exec>(ex: &E, vals: &[f64]) -> ScanBest {
    ex.best_indexed(vals.len(), |p| scan_position(vals, p), better)
        .expect("window length >= 3 guarantees at least one pair")
}

/// Brute force over all in-window `(n, k)`; ties resolved toward the
/// lexicographically smallest `(n, k)`.
pub fn ratio_report(seq: &RealSequenceWindow) -> RatioReport {
    let (m_hat, pos, k, ratio) = ratio_scan(&Auto, seq.values());
    RatioReport {
        m_hat,
        witness: RatioWitness { n: seq.base_index() + pos as i64, k: k as i64, ratio },
        pairs_tested: pairs_in_window(seq.len()),
    }
}

/// Result of checking the window against a supplied constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioCheck {
    pub pass: bool,
    pub m_supplied: f64,
    pub m_hat: f64,
    pub witness: RatioWitness,
    pub pairs_tested: usize,
}

/// Pass iff every in-window ratio lies in `[1/M, M]`, i.e. `m_hat <= M`.
pub fn check_ratio(seq: &RealSequenceWindow, m: f64) -> Result<RatioCheck> {
    if !(m >= 1.0) {
        return Err(Error::BadConstant { name: "M", value: m, min: 1.0 });
    }
    let report = ratio_report(seq);
    Ok(RatioCheck {
        pass: report.m_hat <= m,
        m_supplied: m,
        m_hat: report.m_hat,
        witness: report.witness,
        pairs_tested: report.pairs_tested,
    })
}

/// Quasisymmetry constant of the piecewise-linear interpolant of a sequence
/// satisfying the ratio condition with constant `M`.
pub fn qs_constant_c(m: f64) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::BadConstant { name: "M", value: m, min: 1.0 });
    }
    Ok(m.powi(4) + m.powi(3) + m.powi(2) + m)
}

/// Image-spacing ratio constant derived from a turning constant `A`.
pub fn l_constant(a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(Error::BadConstant { name: "A", value: a, min: 1.0 });
    }
    Ok(8.0 * a * a)
}

/// Log of the ratio bound certified by a `K`-quasiconformal map whose image
/// spacing obeys the `L` ratio band: `pi^2 K / log(1 + 1/(L+1))`.
pub fn ratio_bound_log_from_k_l(k: f64, l: f64) -> Result<f64> {
    if !(k >= 1.0) {
        return Err(Error::BadConstant { name: "K", value: k, min: 1.0 });
    }
    if !(l >= 1.0) {
        return Err(Error::BadConstant { name: "L", value: l, min: 1.0 });
    }
    Ok(std::f64::consts::PI.powi(2) * k / (1.0 + 1.0 / (l + 1.0)).ln())
}

/// Exponential-domain ratio bound; overflows to infinity for moderate
/// arguments, so prefer [`ratio_bound_log_from_k_l`] for comparisons.
pub fn ratio_bound_from_k_l(k: f64, l: f64) -> Result<f64> {
    Ok(ratio_bound_log_from_k_l(k, l)?.exp())
}

pub fn ratio_bound_log_from_k_a(k: f64, a: f64) -> Result<f64> {
    ratio_bound_log_from_k_l(k, l_constant(a)?)
}

/// Ratio bound with `L = 8 A^2` substituted.
pub fn ratio_bound_from_k_a(k: f64, a: f64) -> Result<f64> {
    Ok(ratio_bound_log_from_k_a(k, a)?.exp())
}

/// Least maximal dilatation not contradicted by an observed consecutive
/// image gap `ell > 1`: inverts `ell = exp(K pi^2 / log 2)` for `K`.
pub fn k_lower_bound_from_gap(ell: f64) -> Result<f64> {
    if !(ell > 1.0) {
        return Err(Error::BadGap(ell));
    }
    Ok(ell.ln() * std::f64::consts::LN_2 / std::f64::consts::PI.powi(2))
}

/// Which spacing inequality a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingRule {
    /// `|f(a_n) - f(a_{n+1})| <= 2A`
    ConsecutiveGap,
    /// `(k-1)/(2A) <= |f(a_n) - f(a_{n+k})|`, `k >= 2`
    KGapLower,
    /// `|f(a_n) - f(a_{n+k})| <= 2Ak`, `k >= 2`
    KGapUpper,
    /// `1/(8A^2) <= |f(a_{n+k}) - f(a_n)| / |f(a_n) - f(a_{n-k})|`
    RatioLower,
    /// `|f(a_{n+k}) - f(a_n)| / |f(a_n) - f(a_{n-k})| <= 8A^2`
    RatioUpper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingViolation {
    pub n: i64,
    pub k: i64,
    pub quantity: f64,
    pub bound: f64,
    pub rule: SpacingRule,
}

/// Validation of image values against the consecutive-gap, k-gap and ratio
/// inequality families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingReport {
    pub a_used: f64,
    pub violations: Vec<SpacingViolation>,
    /// Observed maximum of `max(ratio, 1/ratio)` over in-window pairs.
    pub l_hat: f64,
}

/// Checks the three inequality families over all in-window pairs of `images`
/// (one value per window index).
pub fn validate_image_spacing(
    window: &RealSequenceWindow,
    images: &[f64],
    a: f64,
) -> Result<SpacingReport> {
    if images.len() != window.len() {
        return Err(Error::LengthMismatch { expected: window.len(), got: images.len() });
    }
    if !(a >= 1.0) {
        return Err(Error::BadConstant { name: "A", value: a, min: 1.0 });
    }
    let base = window.base_index();
    let len = images.len();
    let mut violations = Vec::new();

    for p in 0..len - 1 {
        let gap = (images[p + 1] - images[p]).abs();
        if gap > 2.0 * a {
            violations.push(SpacingViolation {
                n: base + p as i64,
                k: 1,
                quantity: gap,
                bound: 2.0 * a,
                rule: SpacingRule::ConsecutiveGap,
            });
        }
    }

    for p in 0..len {
        for k in 2..len - p {
            let d = (images[p + k] - images[p]).abs();
            let lower = (k as f64 - 1.0) / (2.0 * a);
            let upper = 2.0 * a * k as f64;
            if d < lower {
                violations.push(SpacingViolation {
                    n: base + p as i64,
                    k: k as i64,
                    quantity: d,
                    bound: lower,
                    rule: SpacingRule::KGapLower,
                });
            }
            if d > upper {
                violations.push(SpacingViolation {
                    n: base + p as i64,
                    k: k as i64,
                    quantity: d,
                    bound: upper,
                    rule: SpacingRule::KGapUpper,
                });
            }
        }
    }

    let l_band = 8.0 * a * a;
    let mut l_hat = 1.0f64;
    for p in 0..len {
        let kmax = p.min(len - 1 - p);
        for k in 1..=kmax {
            let num = (images[p + k] - images[p]).abs();
            let den = (images[p] - images[p - k]).abs();
            if den == 0.0 {
                violations.push(SpacingViolation {
                    n: base + p as i64,
                    k: k as i64,
                    quantity: f64::INFINITY,
                    bound: l_band,
                    rule: SpacingRule::RatioUpper,
                });
                continue;
            }
            let ratio = num / den;
            l_hat = l_hat.max(ratio.max(1.0 / ratio));
            if ratio > l_band {
                violations.push(SpacingViolation {
                    n: base + p as i64,
                    k: k as i64,
                    quantity: ratio,
                    bound: l_band,
                    rule: SpacingRule::RatioUpper,
                });
            } else if ratio < 1.0 / l_band {
                violations.push(SpacingViolation {
                    n: base + p as i64,
                    k: k as i64,
                    quantity: ratio,
                    bound: 1.0 / l_band,
                    rule: SpacingRule::RatioLower,
                });
            }
        }
    }

    Ok(SpacingReport { a_used: a, violations, l_hat })
}

/// Knobs for the heuristic divergence trigger of [`decide_equiv_to_z`].
#[derive(Clone, Copy, Debug)]
pub struct DecideOptions {
    /// Minimal growth of `m_hat` per window doubling that counts as
    /// divergence.
    pub growth_factor: f64,
    /// Number of trailing doublings that must all exceed the growth factor.
    pub doublings: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self { growth_factor: 2.0, doublings: 3 }
    }
}

/// Checks an additive-periodic descriptor: equivalent to the integer lattice
/// iff the coset family is finite.
pub fn periodic_additive_check(descriptor: &Descriptor) -> Result<EquivalenceVerdict> {
    match descriptor {
        Descriptor::AdditivePeriodic { count, .. } => {
            let kind = if count.is_finite() { VerdictKind::ExactYes } else { VerdictKind::ExactNo };
            Ok(EquivalenceVerdict {
                kind,
                theorem: THM_ADDITIVE_PERIODIC.into(),
                evidence: Evidence { coset_count: Some(*count), ..Default::default() },
            })
        }
        _ => Err(Error::WrongDescriptor { expected: "additive-periodic" }),
    }
}

/// Checks a multiplicative-periodic descriptor against the doubling-orbit
/// reference set in the punctured plane: equivalent iff the coset family is
/// finite.
pub fn periodic_multiplicative_check(descriptor: &Descriptor) -> Result<EquivalenceVerdict> {
    match descriptor {
        Descriptor::MultiplicativePeriodic { reps, count, .. } => {
            if reps.iter().any(|r| *r == num_complex::Complex64::new(0.0, 0.0)) {
                return Err(Error::ZeroInSet);
            }
            let kind = if count.is_finite() { VerdictKind::ExactYes } else { VerdictKind::ExactNo };
            Ok(EquivalenceVerdict {
                kind,
                theorem: THM_MULTIPLICATIVE_PERIODIC.into(),
                evidence: Evidence {
                    coset_count: Some(*count),
                    note: Some("reference set is the doubling orbit in the punctured plane".into()),
                    ..Default::default()
                },
            })
        }
        _ => Err(Error::WrongDescriptor { expected: "multiplicative-periodic" }),
    }
}

/// Decides equivalence of `set` to the integer lattice.
///
/// Exact verdicts come from periodic descriptors and corpus tags to which a
/// criterion applies; real explicit samples get the window heuristic; other
/// samples are inconclusive.
pub fn decide_equiv_to_z(set: &PlanarSet) -> EquivalenceVerdict {
    decide_equiv_to_z_with(set, &DecideOptions::default())
}

pub fn decide_equiv_to_z_with(set: &PlanarSet, opts: &DecideOptions) -> EquivalenceVerdict {
    match set.descriptor() {
        Descriptor::AdditivePeriodic { .. } => {
            periodic_additive_check(set.descriptor()).expect("descriptor matched")
        }
        Descriptor::MultiplicativePeriodic { .. } => EquivalenceVerdict {
            kind: VerdictKind::Inconclusive,
            theorem: THM_MULTIPLICATIVE_PERIODIC.into(),
            evidence: Evidence {
                note: Some(
                    "multiplicative orbits accumulate at 0 and are compared against the \
                     doubling-orbit reference set; run the multiplicative periodic check"
                        .into(),
                ),
                ..Default::default()
            },
        },
        Descriptor::CorpusFormula { name, .. } if name == "geometric" => EquivalenceVerdict {
            kind: VerdictKind::ExactNo,
            theorem: THM_UNBOUNDED_NECESSITY.into(),
            evidence: Evidence {
                note: Some("set is bounded on one side of the real line".into()),
                ..Default::default()
            },
        },
        _ => decide_from_sample(set, opts),
    }
}

fn decide_from_sample(set: &PlanarSet, opts: &DecideOptions) -> EquivalenceVerdict {
    let Some(xs) = set.real_points_sorted() else {
        return EquivalenceVerdict {
            kind: VerdictKind::Inconclusive,
            theorem: THM_RATIO_CONDITION.into(),
            evidence: Evidence {
                note: Some(
                    "no exact criterion applies to a bare non-real sample; porosity is a \
                     quasiconformal invariant and can screen candidates (porosity_estimate)"
                        .into(),
                ),
                ..Default::default()
            },
        };
    };
    let Ok(window) = RealSequenceWindow::new(xs, 0) else {
        return EquivalenceVerdict {
            kind: VerdictKind::Inconclusive,
            theorem: THM_RATIO_CONDITION.into(),
            evidence: Evidence {
                note: Some("fewer than three real points; window too small".into()),
                ..Default::default()
            },
        };
    };

    let report = ratio_report(&window);
    // m_hat over nested centered sub-windows of doubling size.
    let mut sub_m_hats = Vec::new();
    let mut size = 4usize;
    while size <= window.len() {
        let sub = window.centered_subwindow(size).expect("size bounded by window length");
        sub_m_hats.push(ratio_report(&sub).m_hat);
        size *= 2;
    }
    let diverging = sub_m_hats.len() > opts.doublings
        && sub_m_hats
            .windows(2)
            .rev()
            .take(opts.doublings)
            .all(|w| w[1] >= opts.growth_factor * w[0]);

    EquivalenceVerdict {
        kind: if diverging {
            VerdictKind::Inconsistent
        } else {
            VerdictKind::ConsistentWithEquivalence
        },
        theorem: THM_RATIO_CONDITION.into(),
        evidence: Evidence {
            m_hat: Some(report.m_hat),
            witness: Some((report.witness.n, report.witness.k, report.witness.ratio)),
            window: Some((window.base_index(), window.last_index())),
            subwindow_m_hats: Some(sub_m_hats),
            note: Some(
                "window-level heuristic: divergence of m_hat across nested sub-windows \
                 refutes, boundedness is only consistent with equivalence"
                    .into(),
            ),
            ..Default::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CosetCount;
    use num_complex::Complex64;

    fn window(values: Vec<f64>, base: i64) -> RealSequenceWindow {
        RealSequenceWindow::new(values, base).unwrap()
    }

    fn two_slope(base: i64, last: i64) -> RealSequenceWindow {
        let values: Vec<f64> =
            (base..=last).map(|n| if n <= 0 { n as f64 } else { 2.0 * n as f64 }).collect();
        window(values, base)
    }

    /// Independent brute-force oracle for the scan.
    fn oracle_m_hat(vals: &[f64]) -> (f64, usize, usize) {
        let mut best = (0.0f64, 0usize, 0usize);
        for p in 0..vals.len() {
            for k in 1..vals.len() {
                if k > p || p + k >= vals.len() {
                    continue;
                }
                let r = (vals[p + k] - vals[p]) / (vals[p] - vals[p - k]);
                let m = r.max(1.0 / r);
                if m > best.0 {
                    best = (m, p, k);
                }
            }
        }
        best
    }

    #[test]
    fn integer_window_has_unit_ratio() {
        let w = window((-8..=8).map(|n| n as f64).collect(), -8);
        let rep = ratio_report(&w);
        assert_eq!(rep.m_hat, 1.0);
        assert_eq!(rep.pairs_tested, pairs_in_window(17));
    }

    #[test]
    fn two_slope_ratio_is_two() {
        let rep = ratio_report(&two_slope(-8, 8));
        assert_eq!(rep.m_hat, 2.0);
        assert_eq!((rep.witness.n, rep.witness.k), (0, 1));
        assert_eq!(rep.witness.ratio, 2.0);
        let vals: Vec<f64> =
            (-8..=8).map(|n| if n <= 0 { n as f64 } else { 2.0 * n as f64 }).collect();
        assert_eq!(oracle_m_hat(&vals).0, 2.0);
    }

    #[test]
    fn merged_geometric_window_matches_oracle() {
        let mut vals: Vec<f64> = (0..9)
            .map(|n| 2f64.powi(n))
            .chain((0..9).map(|n| -(2f64.powi(n))))
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let rep = ratio_report(&window(vals.clone(), 0));
        let (m, p, k) = oracle_m_hat(&vals);
        assert_eq!(rep.m_hat, m);
        // Frozen: the extremal mixed pair for exponents 0..=8.
        assert_eq!(rep.m_hat, 248.0 / 10.0);
        assert_eq!((rep.witness.n, rep.witness.k), (p as i64, k as i64));
        assert_eq!((rep.witness.n, rep.witness.k), (5, 5));
    }

    #[test]
    fn check_ratio_examples() {
        let z = window((-4..=4).map(|n| n as f64).collect(), -4);
        assert!(check_ratio(&z, 1.0).unwrap().pass);

        let res = check_ratio(&two_slope(-8, 8), 1.5).unwrap();
        assert!(!res.pass);
        assert_eq!((res.witness.n, res.witness.k, res.witness.ratio), (0, 1, 2.0));

        assert!(matches!(check_ratio(&z, 0.5), Err(Error::BadConstant { .. })));
    }

    #[test]
    fn qs_constant_values() {
        assert_eq!(qs_constant_c(1.0).unwrap(), 4.0);
        assert_eq!(qs_constant_c(2.0).unwrap(), 30.0);
        assert!(matches!(qs_constant_c(0.9), Err(Error::BadConstant { .. })));
    }

    #[test]
    fn ratio_bound_direct_l_variant() {
        // L = 1: exp(pi^2 / log 1.5) ~ 3.72e10.
        let b = ratio_bound_from_k_l(1.0, 1.0).unwrap();
        assert!((b / 3.7269439323e10 - 1.0).abs() < 1e-9);
        // A = 1 forces L = 8.
        let via_a = ratio_bound_from_k_a(1.0, 1.0).unwrap();
        let expect = (std::f64::consts::PI.powi(2) / (1.0f64 + 1.0 / 9.0).ln()).exp();
        assert_eq!(via_a, expect);
        assert!(matches!(ratio_bound_from_k_a(0.5, 1.0), Err(Error::BadConstant { .. })));
    }

    #[test]
    fn gap_inversion_examples() {
        let pi2 = std::f64::consts::PI.powi(2);
        let ell = (pi2 / std::f64::consts::LN_2).exp();
        assert!((k_lower_bound_from_gap(ell).unwrap() - 1.0).abs() < 1e-12);
        let ell2 = (2.0 * pi2 / std::f64::consts::LN_2).exp();
        assert!((k_lower_bound_from_gap(ell2).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(k_lower_bound_from_gap(1.0), Err(Error::BadGap(_))));
    }

    #[test]
    fn spacing_identity_images_pass() {
        let w = window((-8..=8).map(|n| n as f64).collect(), -8);
        let images: Vec<f64> = (-8..=8).map(|n| n as f64).collect();
        let rep = validate_image_spacing(&w, &images, 1.0).unwrap();
        assert!(rep.violations.is_empty());
        assert_eq!(rep.l_hat, 1.0);
    }

    #[test]
    fn spacing_flags_planted_gap() {
        let w = window((0..=6).map(|n| n as f64).collect(), 0);
        // Consecutive gap of 5 between positions 2 and 3.
        let images = vec![0.0, 1.0, 2.0, 7.0, 8.0, 9.0, 10.0];
        let rep = validate_image_spacing(&w, &images, 1.0).unwrap();
        assert!(rep
            .violations
            .iter()
            .any(|v| v.rule == SpacingRule::ConsecutiveGap && v.n == 2 && v.quantity == 5.0));
    }

    #[test]
    fn spacing_compressed_images_fail_k_gap_lower() {
        // Quarter-gap images are exactly representable, so the comparison
        // against (k-1)/2 is exact: |f_n - f_{n+k}| = k/4 < (k-1)/2 iff k > 2.
        let w = window((0..=12).map(|n| n as f64).collect(), 0);
        let images: Vec<f64> = (0..=12).map(|n| n as f64 / 4.0).collect();
        let rep = validate_image_spacing(&w, &images, 1.0).unwrap();
        for v in &rep.violations {
            assert_eq!(v.rule, SpacingRule::KGapLower);
            assert!(v.k >= 3, "unexpected violation at k = {}", v.k);
        }
        assert!(rep.violations.iter().any(|v| v.k == 3));
        let expected: usize = (0..=12usize).map(|p| (12 - p).saturating_sub(2)).sum();
        assert_eq!(rep.violations.len(), expected);
    }

    #[test]
    fn spacing_rejects_length_mismatch() {
        let w = window(vec![0.0, 1.0, 2.0], 0);
        assert!(matches!(
            validate_image_spacing(&w, &[0.0, 1.0], 1.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn periodic_checks() {
        let add_fin = Descriptor::AdditivePeriodic {
            reps: vec![Complex64::new(0.0, 0.0)],
            count: CosetCount::Finite(1),
        };
        let v = periodic_additive_check(&add_fin).unwrap();
        assert_eq!(v.kind, VerdictKind::ExactYes);
        assert_eq!(v.theorem, THM_ADDITIVE_PERIODIC);

        let add_inf = Descriptor::AdditivePeriodic {
            reps: (0..4).map(|n| Complex64::new(0.0, 2f64.powi(n))).collect(),
            count: CosetCount::Infinite,
        };
        assert_eq!(periodic_additive_check(&add_inf).unwrap().kind, VerdictKind::ExactNo);

        let mult = Descriptor::MultiplicativePeriodic {
            factor: 3.0,
            reps: vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0)],
            count: CosetCount::Finite(2),
        };
        assert_eq!(periodic_multiplicative_check(&mult).unwrap().kind, VerdictKind::ExactYes);

        let mult_inf = Descriptor::MultiplicativePeriodic {
            factor: 2.0,
            reps: vec![Complex64::new(2f64.powf(0.5), 0.0), Complex64::new(2f64.powf(0.25), 0.0)],
            count: CosetCount::Infinite,
        };
        assert_eq!(periodic_multiplicative_check(&mult_inf).unwrap().kind, VerdictKind::ExactNo);

        assert!(matches!(
            periodic_additive_check(&Descriptor::Explicit),
            Err(Error::WrongDescriptor { .. })
        ));
        assert!(matches!(
            periodic_multiplicative_check(&Descriptor::Explicit),
            Err(Error::WrongDescriptor { .. })
        ));
    }

    #[test]
    fn decide_dispatches_on_descriptor() {
        let additive = PlanarSet::new(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 1.0)],
            Some(Descriptor::AdditivePeriodic {
                reps: vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 1.0)],
                count: CosetCount::Finite(2),
            }),
        )
        .unwrap();
        let v = decide_equiv_to_z(&additive);
        assert_eq!(v.kind, VerdictKind::ExactYes);
        assert_eq!(v.theorem, THM_ADDITIVE_PERIODIC);

        let geometric = PlanarSet::new(
            (0..8).map(|n| Complex64::new(2f64.powi(n), 0.0)).collect(),
            Some(Descriptor::CorpusFormula { name: "geometric".into(), params: vec![2.0] }),
        )
        .unwrap();
        let v = decide_equiv_to_z(&geometric);
        assert_eq!(v.kind, VerdictKind::ExactNo);
        assert_eq!(v.theorem, THM_UNBOUNDED_NECESSITY);
    }

    #[test]
    fn decide_heuristic_diverges_on_two_sided_geometric() {
        // 64 points of +-2^n: m_hat at least doubles across the last three
        // window doublings.
        let mut vals: Vec<f64> = (0..32)
            .map(|n| 2f64.powi(n))
            .chain((0..32).map(|n| -(2f64.powi(n))))
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let set =
            PlanarSet::new(vals.iter().map(|&x| Complex64::new(x, 0.0)).collect(), None).unwrap();
        let v = decide_equiv_to_z(&set);
        assert_eq!(v.kind, VerdictKind::Inconsistent);
        assert!(v.evidence.window.is_some());

        // 34 points are not enough doublings for the trigger.
        let mut small: Vec<f64> = (0..17)
            .map(|n| 2f64.powi(n))
            .chain((0..17).map(|n| -(2f64.powi(n))))
            .collect();
        small.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let set =
            PlanarSet::new(small.iter().map(|&x| Complex64::new(x, 0.0)).collect(), None).unwrap();
        assert_eq!(decide_equiv_to_z(&set).kind, VerdictKind::ConsistentWithEquivalence);
    }

    #[test]
    fn decide_integer_sample_is_consistent() {
        let set = PlanarSet::new(
            (-16..=16).map(|n| Complex64::new(n as f64, 0.0)).collect(),
            None,
        )
        .unwrap();
        let v = decide_equiv_to_z(&set);
        assert_eq!(v.kind, VerdictKind::ConsistentWithEquivalence);
        assert_eq!(v.evidence.m_hat, Some(1.0));
    }

    #[test]
    fn decide_non_real_sample_is_inconclusive_with_advisory() {
        let set = PlanarSet::new(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(2.0, -1.0)],
            None,
        )
        .unwrap();
        let v = decide_equiv_to_z(&set);
        assert_eq!(v.kind, VerdictKind::Inconclusive);
        assert!(v.evidence.note.as_deref().unwrap().contains("porosity"));
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_scan_matches_sequential_bitwise() {
        use crate::exec::{Par, Seq};
        let mut vals: Vec<f64> = (0..14)
            .map(|n| 2f64.powi(n))
            .chain((0..14).map(|n| -(2f64.powi(n))))
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ratio_scan(&Seq, &vals), ratio_scan(&Par, &vals));
    }
}
