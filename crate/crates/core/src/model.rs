//! Shared value types: sequence windows, planar sets, polylines, verdicts.
//!
//! Everything here is immutable after construction and validated up front;
//! the analysis modules can then assume the invariants without re-checking.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Serde helpers mapping `Complex64` to the `[re, im]` pair used by all
/// on-disk formats.
pub mod c64 {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        (z.re, z.im).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let (re, im) = <(f64, f64)>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Same as [`c64`] for lists of points.
pub mod c64_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &[Complex64],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = v.iter().map(|z| (z.re, z.im)).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(d)?;
        Ok(pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
    }
}

/// A finite window of a strictly increasing real sequence, indexed by
/// contiguous integers `base_index ..= base_index + len - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", into = "RawWindow")]
pub struct RealSequenceWindow {
    base_index: i64,
    values: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawWindow {
    base_index: i64,
    values: Vec<f64>,
}

impl TryFrom<RawWindow> for RealSequenceWindow {
    type Error = Error;
    fn try_from(raw: RawWindow) -> Result<Self> {
        RealSequenceWindow::new(raw.values, raw.base_index)
    }
}

impl From<RealSequenceWindow> for RawWindow {
    fn from(w: RealSequenceWindow) -> Self {
        RawWindow { base_index: w.base_index, values: w.values }
    }
}

impl RealSequenceWindow {
    pub const MIN_LEN: usize = 3;

    /// Validates and builds a window. Monotonicity is checked exactly on the
    /// stored floating values; no epsilon.
    pub fn new(values: Vec<f64>, base_index: i64) -> Result<Self> {
        if values.len() < Self::MIN_LEN {
            return Err(Error::TooShort { len: values.len(), min: Self::MIN_LEN });
        }
        for (i, w) in values.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::NotStrictlyIncreasing(i));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadParam("sequence values must be finite".into()));
        }
        Ok(Self { base_index, values })
    }

    pub fn base_index(&self) -> i64 {
        self.base_index
    }

    pub fn last_index(&self) -> i64 {
        self.base_index + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at absolute index `n`, if inside the window.
    pub fn value_at(&self, n: i64) -> Option<f64> {
        self.position_of(n).map(|p| self.values[p])
    }

    pub fn position_of(&self, n: i64) -> Option<usize> {
        if n < self.base_index || n > self.last_index() {
            None
        } else {
            Some((n - self.base_index) as usize)
        }
    }

    /// Centered sub-window of `size` consecutive values, or `None` when the
    /// window is shorter than that.
    pub fn centered_subwindow(&self, size: usize) -> Option<Self> {
        if size < Self::MIN_LEN || size > self.values.len() {
            return None;
        }
        let start = (self.values.len() - size) / 2;
        Some(Self {
            base_index: self.base_index + start as i64,
            values: self.values[start..start + size].to_vec(),
        })
    }

    /// Window of the affine image `c * a_n + d`, `c > 0`.
    pub fn affine_image(&self, c: f64, d: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::BadParam(format!("affine scale {c} must be positive")));
        }
        Self::new(self.values.iter().map(|v| c * v + d).collect(), self.base_index)
    }
}

/// Coset count of a periodic descriptor: an exact finite count, or a mark
/// that the family is infinite and the rep list is only a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetCount {
    Finite(usize),
    Infinite,
}

impl CosetCount {
    pub fn is_finite(&self) -> bool {
        matches!(self, CosetCount::Finite(_))
    }
}

impl Serialize for CosetCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CosetCount::Finite(n) => s.serialize_u64(*n as u64),
            CosetCount::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for CosetCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(CosetCount::Finite(n as usize)),
            Raw::Tag(s) if s == "infinite" => Ok(CosetCount::Infinite),
            Raw::Tag(s) => Err(serde::de::Error::custom(format!(
                "coset count must be a number or \"infinite\", got {s:?}"
            ))),
        }
    }
}

/// How a planar set was generated, when known. Exact theorems key off this;
/// a bare finite sample gets `Explicit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Descriptor {
    Explicit,
    /// Invariant under `z + 1`: the set is `Z + reps`, reps with `Re in [0,1)`.
    AdditivePeriodic {
        #[serde(with = "c64_vec")]
        reps: Vec<Complex64>,
        count: CosetCount,
    },
    /// Invariant under `z * factor`, `factor > 1`; reps in the fundamental
    /// annulus `1 <= |rep| < factor`.
    MultiplicativePeriodic {
        factor: f64,
        #[serde(with = "c64_vec")]
        reps: Vec<Complex64>,
        count: CosetCount,
    },
    /// Named generator from the corpus, e.g. `geometric` with params `[r]`.
    CorpusFormula { name: String, params: Vec<f64> },
}

/// Finite sample of a closed discrete set `E` in the plane plus its
/// generator descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlanarSet", into = "RawPlanarSet")]
pub struct PlanarSet {
    points: Vec<Complex64>,
    descriptor: Descriptor,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawPlanarSet {
    #[serde(with = "c64_vec")]
    points: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    descriptor: Option<Descriptor>,
}

impl TryFrom<RawPlanarSet> for PlanarSet {
    type Error = Error;
    fn try_from(raw: RawPlanarSet) -> Result<Self> {
        PlanarSet::new(raw.points, raw.descriptor)
    }
}

impl From<PlanarSet> for RawPlanarSet {
    fn from(s: PlanarSet) -> Self {
        RawPlanarSet { points: s.points, descriptor: Some(s.descriptor) }
    }
}

fn key_of(z: &Complex64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

impl PlanarSet {
    /// Validates and builds a set; an absent descriptor is inferred as
    /// `Explicit`.
    pub fn new(points: Vec<Complex64>, descriptor: Option<Descriptor>) -> Result<Self> {
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadParam("points must have finite coordinates".into()));
        }
        // Pairwise-distinct check via sort on the bit patterns.
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by_key(|&i| key_of(&points[i]));
        for pair in order.windows(2) {
            if points[pair[0]] == points[pair[1]] {
                return Err(Error::DuplicatePoint { index: pair[0].max(pair[1]) });
            }
        }
        let descriptor = descriptor.unwrap_or(Descriptor::Explicit);
        Self::validate_descriptor(&descriptor, &points)?;
        Ok(Self { points, descriptor })
    }

    fn validate_descriptor(d: &Descriptor, points: &[Complex64]) -> Result<()> {
        match d {
            Descriptor::Explicit => Ok(()),
            Descriptor::AdditivePeriodic { reps, count } => {
                for rep in reps {
                    if !(0.0..1.0).contains(&rep.re) {
                        return Err(Error::DescriptorViolation(format!(
                            "additive rep {rep} has Re outside [0, 1)"
                        )));
                    }
                }
                check_distinct_reps(reps)?;
                if let CosetCount::Finite(m) = count {
                    if *m != reps.len() {
                        return Err(Error::DescriptorViolation(format!(
                            "finite coset count {m} does not match {} listed reps",
                            reps.len()
                        )));
                    }
                }
                Ok(())
            }
            Descriptor::MultiplicativePeriodic { factor, reps, count } => {
                if !(*factor > 1.0) {
                    return Err(Error::DescriptorViolation(format!(
                        "multiplicative factor {factor} must exceed 1"
                    )));
                }
                for rep in reps {
                    let r = rep.norm();
                    if !(1.0..*factor).contains(&r) {
                        return Err(Error::DescriptorViolation(format!(
                            "multiplicative rep {rep} outside fundamental annulus [1, {factor})"
                        )));
                    }
                }
                check_distinct_reps(reps)?;
                if let CosetCount::Finite(m) = count {
                    if *m != reps.len() {
                        return Err(Error::DescriptorViolation(format!(
                            "finite coset count {m} does not match {} listed reps",
                            reps.len()
                        )));
                    }
                }
                if points.iter().any(|z| *z == Complex64::new(0.0, 0.0)) {
                    return Err(Error::DescriptorViolation(
                        "multiplicative set must not contain 0".into(),
                    ));
                }
                Ok(())
            }
            Descriptor::CorpusFormula { .. } => Ok(()),
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    /// The points as real numbers when the whole sample lies on the real
    /// axis, sorted ascending.
    pub fn real_points_sorted(&self) -> Option<Vec<f64>> {
        if self.points.iter().all(|z| z.im == 0.0) {
            let mut xs: Vec<f64> = self.points.iter().map(|z| z.re).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Some(xs)
        } else {
            None
        }
    }
}

fn check_distinct_reps(reps: &[Complex64]) -> Result<()> {
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by_key(|&i| key_of(&reps[i]));
    for pair in order.windows(2) {
        if reps[pair[0]] == reps[pair[1]] {
            return Err(Error::DescriptorViolation("duplicate coset rep".into()));
        }
    }
    Ok(())
}

/// Ordered samples of a curve; order is the traversal order along the curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolyline", into = "RawPolyline")]
pub struct Polyline {
    vertices: Vec<Complex64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawPolyline {
    #[serde(with = "c64_vec")]
    vertices: Vec<Complex64>,
}

impl TryFrom<RawPolyline> for Polyline {
    type Error = Error;
    fn try_from(raw: RawPolyline) -> Result<Self> {
        Polyline::new(raw.vertices)
    }
}

impl From<Polyline> for RawPolyline {
    fn from(p: Polyline) -> Self {
        RawPolyline { vertices: p.vertices }
    }
}

impl Polyline {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewPoints { got: vertices.len(), min: 3 });
        }
        if vertices.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadParam("vertices must have finite coordinates".into()));
        }
        for (i, w) in vertices.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(Error::DuplicatePoint { index: i + 1 });
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }
}

/// Outcome kind of an equivalence decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    ExactYes,
    ExactNo,
    ConsistentWithEquivalence,
    Inconsistent,
    Inconclusive,
}

/// Numeric evidence attached to a verdict.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_hat: Option<f64>,
    /// `(n, k, ratio)` attaining `m_hat`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<(i64, i64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coset_count: Option<CosetCount>,
    /// Index range of the window the heuristic ran over.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
    /// `m_hat` over nested centered sub-windows of doubling size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subwindow_m_hats: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Decision about quasiconformal equivalence, exact when a descriptor makes a
/// criterion applicable, heuristic otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub kind: VerdictKind,
    /// Tag of the criterion the verdict rests on.
    pub theorem: String,
    pub evidence: Evidence,
}

impl EquivalenceVerdict {
    pub fn is_exact(&self) -> bool {
        matches!(self.kind, VerdictKind::ExactYes | VerdictKind::ExactNo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_integer_window() {
        let w = RealSequenceWindow::new(vec![0.0, 1.0, 2.0, 3.0], 0).unwrap();
        assert_eq!(w.base_index(), 0);
        assert_eq!(w.last_index(), 3);
        assert_eq!(w.value_at(2), Some(2.0));
        assert_eq!(w.value_at(4), None);
    }

    #[test]
    fn rejects_non_increasing() {
        let err = RealSequenceWindow::new(vec![0.0, 1.0, 1.0, 2.0], 0).unwrap_err();
        assert_eq!(err, Error::NotStrictlyIncreasing(1));
    }

    #[test]
    fn rejects_short_window() {
        let err = RealSequenceWindow::new(vec![0.0, 1.0], 0).unwrap_err();
        assert!(matches!(err, Error::TooShort { len: 2, .. }));
    }

    #[test]
    fn merged_geometric_tails_sort_to_ten_points() {
        // {2^n} and {-2^n} for n = 0..=4, merged ascending.
        let mut vals: Vec<f64> = (0..5)
            .map(|n| 2f64.powi(n))
            .chain((0..5).map(|n| -(2f64.powi(n))))
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let w = RealSequenceWindow::new(vals, -5).unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(w.values()[0], -16.0);
        assert_eq!(w.values()[9], 16.0);
    }

    #[test]
    fn planar_set_accepts_valid_additive_descriptor() {
        let pts = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, 1.0),
        ];
        let desc = Descriptor::AdditivePeriodic {
            reps: vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 1.0)],
            count: CosetCount::Finite(2),
        };
        assert!(PlanarSet::new(pts, Some(desc)).is_ok());
    }

    #[test]
    fn planar_set_rejects_rep_outside_fundamental_domain() {
        let desc = Descriptor::AdditivePeriodic {
            reps: vec![Complex64::new(1.5, 0.0)],
            count: CosetCount::Finite(1),
        };
        let err = PlanarSet::new(vec![Complex64::new(0.0, 0.0)], Some(desc)).unwrap_err();
        assert!(matches!(err, Error::DescriptorViolation(_)));
    }

    #[test]
    fn planar_set_rejects_duplicates() {
        let pts = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let err = PlanarSet::new(pts, None).unwrap_err();
        assert!(matches!(err, Error::DuplicatePoint { .. }));
    }

    #[test]
    fn multiplicative_model_of_doubling_orbit() {
        // lambda = 2, reps {1}: the doubling orbit {2^n}.
        let pts: Vec<Complex64> = (-4..=4).map(|n| Complex64::new(2f64.powi(n), 0.0)).collect();
        let desc = Descriptor::MultiplicativePeriodic {
            factor: 2.0,
            reps: vec![Complex64::new(1.0, 0.0)],
            count: CosetCount::Finite(1),
        };
        assert!(PlanarSet::new(pts, Some(desc)).is_ok());
    }

    #[test]
    fn polyline_needs_three_distinct_consecutive() {
        assert!(Polyline::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
        let dup = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        assert!(matches!(Polyline::new(dup), Err(Error::DuplicatePoint { index: 1 })));
    }

    #[test]
    fn coset_count_round_trips() {
        let fin = serde_json::to_string(&CosetCount::Finite(3)).unwrap();
        assert_eq!(fin, "3");
        let inf = serde_json::to_string(&CosetCount::Infinite).unwrap();
        assert_eq!(inf, "\"infinite\"");
        assert_eq!(serde_json::from_str::<CosetCount>("3").unwrap(), CosetCount::Finite(3));
        assert_eq!(
            serde_json::from_str::<CosetCount>("\"infinite\"").unwrap(),
            CosetCount::Infinite
        );
    }

    #[test]
    fn planar_set_serde_uses_pair_form() {
        let set = PlanarSet::new(
            vec![Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)],
            None,
        )
        .unwrap();
        let json = serde_json::to_string(&set).unwrap();
        assert!(json.contains("[0.5,-1.0]"), "{json}");
        let back: PlanarSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn deserialization_enforces_invariants() {
        let bad = r#"{"points": [[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<PlanarSet>(bad).is_err());
        let bad_window = r#"{"base_index": 0, "values": [0.0, 1.0, 0.5]}"#;
        assert!(serde_json::from_str::<RealSequenceWindow>(bad_window).is_err());
    }
}
