//! Porosity and bounded-turning estimators with witnesses.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec::{Auto, Exec};
use crate::model::{c64, CosetCount, Descriptor, PlanarSet, Polyline};

/// Closed disk probed by the porosity estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskProbe {
    #[serde(with = "c64")]
    pub center: Complex64,
    pub radius: f64,
}

/// Per-disk porosity requirement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskPorosity {
    #[serde(with = "c64")]
    pub center: Complex64,
    pub radius: f64,
    /// `radius / max_gap`, clamped below at 1.
    pub required_c: f64,
    /// Largest distance from a candidate point in the disk to the set.
    pub max_gap: f64,
    /// Candidate attaining the gap: center of the largest found empty disk.
    #[serde(with = "c64")]
    pub witness: Complex64,
}

/// Porosity estimate over a family of disks. The estimate is an upper bound
/// on the true required constant, up to the candidate grid resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorosityReport {
    pub per_disk: Vec<DiskPorosity>,
    pub c_hat: f64,
    pub resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_c: Option<f64>,
    /// `Some(true)` iff `c_hat <= target_c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<bool>,
}

/// Uniform spatial hash giving exact nearest-neighbor distances.
struct SpatialHash {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
    points: Vec<Complex64>,
    min_cell: (i64, i64),
    max_cell: (i64, i64),
}

impl SpatialHash {
    fn new(points: Vec<Complex64>) -> Self {
        assert!(!points.is_empty());
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &points {
            xmin = xmin.min(p.re);
            xmax = xmax.max(p.re);
            ymin = ymin.min(p.im);
            ymax = ymax.max(p.im);
        }
        let extent = ((xmax - xmin).max(ymax - ymin)).max(1e-12);
        let cell = (extent / (points.len() as f64).sqrt()).max(extent * 1e-6);
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            let key = ((p.re / cell).floor() as i64, (p.im / cell).floor() as i64);
            buckets.entry(key).or_default().push(i as u32);
        }
        let min_cell = ((xmin / cell).floor() as i64, (ymin / cell).floor() as i64);
        let max_cell = ((xmax / cell).floor() as i64, (ymax / cell).floor() as i64);
        Self { cell, buckets, points, min_cell, max_cell }
    }

    /// Exact distance from `z` to the nearest stored point.
    fn nearest_dist(&self, z: Complex64) -> f64 {
        let ci = (z.re / self.cell).floor() as i64;
        let cj = (z.im / self.cell).floor() as i64;
        // Ring radius that covers every populated cell from (ci, cj).
        let far_i = (ci - self.min_cell.0).max(self.max_cell.0 - ci);
        let far_j = (cj - self.min_cell.1).max(self.max_cell.1 - cj);
        let ring_limit = far_i.max(far_j).max(0);
        let mut best = f64::INFINITY;
        for ring in 0..=ring_limit {
            // Any point in a cell at Chebyshev ring distance r is at least
            // (r - 1) * cell away, so once that exceeds `best` we are done.
            if best.is_finite() && (ring - 1) as f64 * self.cell > best {
                break;
            }
            self.scan_ring(ci, cj, ring, z, &mut best);
        }
        best
    }

    fn scan_cell(&self, key: (i64, i64), z: Complex64, best: &mut f64) {
        if let Some(ids) = self.buckets.get(&key) {
            for &id in ids {
                let d = (self.points[id as usize] - z).norm();
                if d < *best {
                    *best = d;
                }
            }
        }
    }

    fn scan_ring(&self, ci: i64, cj: i64, ring: i64, z: Complex64, best: &mut f64) {
        if ring == 0 {
            self.scan_cell((ci, cj), z, best);
            return;
        }
        for di in -ring..=ring {
            self.scan_cell((ci + di, cj - ring), z, best);
            self.scan_cell((ci + di, cj + ring), z, best);
        }
        for dj in (-ring + 1)..ring {
            self.scan_cell((ci - ring, cj + dj), z, best);
            self.scan_cell((ci + ring, cj + dj), z, best);
        }
    }
}

/// All points of the described set inside the axis-aligned box, or
/// `InsufficientCoverage` when the descriptor cannot guarantee completeness.
///
/// Marked-infinite additive rep samples are treated as complete up to their
/// maximum `|Im|`; beyond that the expansion refuses.
pub fn expand_into_box(
    set: &PlanarSet,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
) -> Result<Vec<Complex64>> {
    let inside =
        |z: &Complex64| z.re >= xmin && z.re <= xmax && z.im >= ymin && z.im <= ymax;
    match set.descriptor() {
        Descriptor::Explicit => Ok(set.points().iter().copied().filter(inside).collect()),
        Descriptor::AdditivePeriodic { reps, count } => {
            if *count == CosetCount::Infinite {
                let h = reps.iter().map(|r| r.im.abs()).fold(0.0, f64::max);
                let needed = ymin.abs().max(ymax.abs());
                if needed > h {
                    return Err(Error::InsufficientCoverage(format!(
                        "rep sample reaches |Im| = {h}, box needs {needed}"
                    )));
                }
            }
            let mut out = Vec::new();
            for rep in reps {
                if rep.im < ymin || rep.im > ymax {
                    continue;
                }
                let klo = (xmin - rep.re).ceil() as i64;
                let khi = (xmax - rep.re).floor() as i64;
                for kk in klo..=khi {
                    out.push(rep + Complex64::new(kk as f64, 0.0));
                }
            }
            Ok(out)
        }
        Descriptor::MultiplicativePeriodic { factor, reps, count } => {
            if *count == CosetCount::Infinite {
                return Err(Error::InsufficientCoverage(
                    "marked-infinite multiplicative rep samples cannot be expanded".into(),
                ));
            }
            let bound = xmin.abs().max(xmax.abs()).hypot(ymin.abs().max(ymax.abs()));
            let floor = 1e-9 * bound.max(1.0);
            let mut out = Vec::new();
            for rep in reps {
                let mut k = ((bound / rep.norm()).ln() / factor.ln()).ceil() as i64 + 1;
                loop {
                    let p = rep * factor.powi(k as i32);
                    if p.norm() < floor {
                        break;
                    }
                    if inside(&p) {
                        out.push(p);
                    }
                    k -= 1;
                }
            }
            Ok(out)
        }
        Descriptor::CorpusFormula { name, params } => match name.as_str() {
            "geometric" if params.len() == 1 && params[0] > 1.0 => {
                let r = params[0];
                let mut out = Vec::new();
                let mut v = 1.0;
                while v <= xmax {
                    if v >= xmin && ymin <= 0.0 && ymax >= 0.0 {
                        out.push(Complex64::new(v, 0.0));
                    }
                    v *= r;
                }
                Ok(out)
            }
            "pm_geometric" if params.len() == 1 && params[0] > 1.0 => {
                let s = params[0];
                let mut out = Vec::new();
                let mut v = 1.0;
                while v <= xmax.abs().max(xmin.abs()) {
                    for w in [v, -v] {
                        if w >= xmin && w <= xmax && ymin <= 0.0 && ymax >= 0.0 {
                            out.push(Complex64::new(w, 0.0));
                        }
                    }
                    v *= s;
                }
                Ok(out)
            }
            _ => Ok(set.points().iter().copied().filter(inside).collect()),
        },
    }
}

/// Max-gap scan over the candidate sub-grid of one closed disk.
#[doc(hidden)]
pub fn disk_scan<E: Exec>(
    ex: &E,
    sample: Vec<Complex64>,
    center: Complex64,
    radius: f64,
    resolution: usize,
) -> (f64, Complex64) {
    let hash = SpatialHash::new(sample);
    let (cx, cy, r) = (center.re, center.im, radius);
    let step = 2.0 * r / (resolution - 1) as f64;
    let n = resolution * resolution;
    let (max_gap, idx) = ex
        .best_indexed(
            n,
            |idx| {
                let i = idx % resolution;
                let j = idx / resolution;
                let z = Complex64::new(cx - r + i as f64 * step, cy - r + j as f64 * step);
                if (z - center).norm() > r {
                    return None;
                }
                Some((hash.nearest_dist(z), idx))
            },
            |a, b| a.0 > b.0 || (a.0 == b.0 && a.1 < b.1),
        )
        .expect("grid covers the disk center");
    let witness = Complex64::new(
        cx - r + (idx % resolution) as f64 * step,
        cy - r + (idx / resolution) as f64 * step,
    );
    (max_gap, witness)
}

/// Largest-empty-disk porosity estimate: for each probe disk, the candidate
/// grid point maximizing the distance to the (descriptor-expanded) set.
pub fn porosity_estimate(
    set: &PlanarSet,
    disks: &[DiskProbe],
    resolution: usize,
    target_c: Option<f64>,
) -> Result<PorosityReport> {
    if resolution < 2 {
        return Err(Error::BadParam("candidate resolution must be at least 2".into()));
    }
    if disks.is_empty() {
        return Err(Error::BadParam("need at least one probe disk".into()));
    }
    for d in disks {
        if !(d.radius > 0.0) {
            return Err(Error::BadParam(format!("disk radius {} must be positive", d.radius)));
        }
    }
    let mut per_disk = Vec::with_capacity(disks.len());
    for d in disks {
        let (cx, cy, r) = (d.center.re, d.center.im, d.radius);
        // Points within the 2r-neighborhood decide every gap that matters.
        let sample = expand_into_box(set, cx - 2.0 * r, cx + 2.0 * r, cy - 2.0 * r, cy + 2.0 * r)?;
        if sample.is_empty() {
            return Err(Error::InsufficientCoverage(format!(
                "no set points within the 2r-neighborhood of disk ({cx}, {cy}; r = {r})"
            )));
        }
        let (max_gap, witness) = disk_scan(&Auto, sample, d.center, r, resolution);
        let required_c = if max_gap > 0.0 { (r / max_gap).max(1.0) } else { f64::INFINITY };
        per_disk.push(DiskPorosity { center: d.center, radius: r, required_c, max_gap, witness });
    }
    let c_hat = per_disk.iter().map(|d| d.required_c).fold(1.0, f64::max);
    let verdict = target_c.map(|t| c_hat <= t);
    Ok(PorosityReport { per_disk, c_hat, resolution, target_c, verdict })
}

/// How the triple scan was carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TriplesMode {
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

/// Bounded-turning scan over ordered vertex triples in both traversal
/// directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurningReport {
    /// Max over ordered triples of `|z1 - z2| / |z1 - z3|`.
    pub a_hat: f64,
    /// Vertex indices `(i, j, k)`, `i < j < k`, attaining `a_hat`.
    pub witness: (usize, usize, usize),
    /// Whether the witness triple is traversed in reverse.
    pub reversed: bool,
    pub triples_tested: usize,
    pub mode: TriplesMode,
}

const EXHAUSTIVE_CAP: usize = 300;
const SAMPLE_COUNT: usize = 2_000_000;
const SAMPLE_SEED: u64 = 0x71c1;

/// Candidate: (ratio, i, j, k, reversed)
pub(crate) type TurnBest = (f64, usize, usize, usize, bool);

fn turn_better(a: &TurnBest, b: &TurnBest) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1, a.2, a.3, a.4) < (b.1, b.2, b.3, b.4))
}

fn turn_eval(v: &[Complex64], i: usize, j: usize, k: usize) -> Option<TurnBest> {
    let d12 = (v[i] - v[j]).norm();
    let d13 = (v[i] - v[k]).norm();
    let d32 = (v[k] - v[j]).norm();
    // The condition applies to distinct points only.
    if d12 == 0.0 || d13 == 0.0 || d32 == 0.0 {
        return None;
    }
    let fwd = (d12 / d13, i, j, k, false);
    let rev = (d32 / d13, i, j, k, true);
    Some(if turn_better(&fwd, &rev) { fwd } else { rev })
}

pub(crate) fn turning_scan_exhaustive<E: Exec>(ex: &E, v: &[Complex64]) -> TurnBest {
    let n = v.len();
    ex.best_indexed(
        n,
        |i| {
            let mut local: Option<TurnBest> = None;
            for j in i + 1..n {
                for k in j + 1..n {
                    if let Some(cand) = turn_eval(v, i, j, k) {
                        match &local {
                            Some(cur) if !turn_better(&cand, cur) => {}
                            _ => local = Some(cand),
                        }
                    }
                }
            }
            local
        },
        turn_better,
    )
    .expect("polyline has at least one valid triple")
}

/// Exhaustive turning-constant scan, falling back to seeded triple sampling
/// above [the cap of] 300 vertices.
pub fn turning_constant(curve: &Polyline) -> TurningReport {
    turning_constant_with(curve, EXHAUSTIVE_CAP, SAMPLE_SEED, SAMPLE_COUNT)
}

pub fn turning_constant_with(
    curve: &Polyline,
    cap: usize,
    seed: u64,
    samples: usize,
) -> TurningReport {
    let v = curve.vertices();
    let n = v.len();
    if n <= cap {
        let best = turning_scan_exhaustive(&Auto, v);
        let triples = n * (n - 1) * (n - 2) / 6;
        TurningReport {
            a_hat: best.0,
            witness: (best.1, best.2, best.3),
            reversed: best.4,
            triples_tested: triples,
            mode: TriplesMode::Exhaustive,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut triples = Vec::with_capacity(samples);
        while triples.len() < samples {
            let mut idx = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
            idx.sort_unstable();
            if idx[0] < idx[1] && idx[1] < idx[2] {
                triples.push((idx[0], idx[1], idx[2]));
            }
        }
        let best = Auto
            .best_indexed(
                triples.len(),
                |t| {
                    let (i, j, k) = triples[t];
                    turn_eval(v, i, j, k)
                },
                turn_better,
            )
            .expect("sampling found at least one valid triple");
        TurningReport {
            a_hat: best.0,
            witness: (best.1, best.2, best.3),
            reversed: best.4,
            triples_tested: triples.len(),
            mode: TriplesMode::Sampled { seed, samples },
        }
    }
}
