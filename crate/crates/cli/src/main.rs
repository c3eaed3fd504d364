//! `qclat` — command-line analysis of quasiconformal equivalence between
//! discrete planar sets and the integer lattice.
//!
//! Every subcommand prints a versioned report envelope as JSON (stdout, or
//! `--out FILE`). Exit codes: 0 success (verdicts live in the JSON), 2 input
//! error, 3 numeric failure.

mod io;
mod svg;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::PathBuf;

use qclat_core::corpus::{self, CorpusSet};
use qclat_core::extension::{dilatation_field, extension_field, pl_map, GridSpec};
use qclat_core::geometry::{porosity_estimate, turning_constant, DiskProbe};
use qclat_core::model::Descriptor;
use qclat_core::modulus::{
    annulus_modulus, grid_condenser_modulus_with, vuorinen_lower, CondenserSpec, ModulusEstimate,
    SolveOptions,
};
use qclat_core::qs::{
    check_ratio, decide_equiv_to_z_with, k_lower_bound_from_gap, l_constant,
    periodic_additive_check, periodic_multiplicative_check, qs_constant_c, ratio_bound_from_k_a,
    ratio_bound_from_k_l, ratio_bound_log_from_k_a, ratio_bound_log_from_k_l, ratio_report,
    validate_image_spacing, DecideOptions,
};

use io::{
    load_condenser, load_planar_set, load_polyline, load_window, parse_complex_list, parse_grid,
    parse_window, sha256_hex, FileFormat, ReportEnvelope,
};

/// Errors carrying their process exit class.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: parse failures, invariant violations, wrong descriptors.
    Input(String),
    /// Numeric failure: solver divergence, degenerate derivatives.
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<qclat_core::Error> for CliError {
    fn from(e: qclat_core::Error) -> Self {
        use qclat_core::Error::*;
        match e {
            SolverDivergence { .. } | DegenerateJacobian { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "qclat", version, about = "Quasiconformal lattice analyzer")]
struct Cli {
    /// Write the report envelope to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Input format override (default: by file extension).
    #[arg(long, global = true, value_enum)]
    format: Option<FileFormat>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exhaustive ratio scan of a real-axis input; optionally check a bound.
    CheckRatio {
        input: PathBuf,
        /// Constant to check the window against.
        #[arg(long = "M")]
        m: Option<f64>,
    },
    /// Decide equivalence to the integer lattice.
    Decide {
        input: PathBuf,
        /// Growth per window doubling that counts as divergence.
        #[arg(long, default_value_t = 2.0)]
        growth_factor: f64,
        /// Trailing doublings that must all grow.
        #[arg(long, default_value_t = 3)]
        doublings: usize,
    },
    /// Exact periodic-set check (additive or multiplicative descriptor).
    Periodic { input: PathBuf },
    /// Sample the plane extension of the boundary map over a grid.
    Extend {
        input: PathBuf,
        /// x0,x1,y0,y1,res
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Render the mapped grid lines.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Beltrami quotient and dilatation of the extension over a grid.
    Dilatation {
        input: PathBuf,
        /// x0,x1,y0,y1,res (strictly inside the upper half-plane)
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Finite-difference step (default 1e-4 of the node spacing).
        #[arg(long)]
        fd_step: Option<f64>,
        /// Render the K field as a heatmap.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Validate image spacing against a turning constant A.
    Spacing {
        input: PathBuf,
        /// Images f(a_n), one per window value, as a CSV/JSON real input.
        images: PathBuf,
        #[arg(long = "A", default_value_t = 1.0)]
        a: f64,
    },
    /// Largest-empty-disk porosity estimate.
    Porosity {
        input: PathBuf,
        /// "cx,cy,r[;cx,cy,r...]" or "auto:N" for N log-spaced radii.
        #[arg(long, allow_hyphen_values = true)]
        disks: String,
        /// Porosity constant to certify against.
        #[arg(long = "c")]
        target_c: Option<f64>,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        /// Render the set with the witness empty disks.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Bounded-turning constant of a polyline (file order = curve order).
    Turning { input: PathBuf },
    /// Extremal distance estimates.
    Modulus {
        #[command(subcommand)]
        which: ModulusCmd,
    },
    /// Scalar constants from the criteria.
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
    /// Generate a named example set.
    Corpus {
        /// integers | gauss | e1 | geometric | pm_geometric |
        /// additive_periodic | multiplicative_periodic
        name: String,
        /// Integer window lo,hi (translation or exponent range).
        #[arg(long, default_value = "-8,8", allow_hyphen_values = true)]
        window: String,
        /// Exponent cap for geometric / pm_geometric / e1.
        #[arg(long, default_value_t = 8)]
        nmax: u32,
        /// Ratio for geometric.
        #[arg(long)]
        r: Option<f64>,
        /// Ratio for pm_geometric.
        #[arg(long)]
        s: Option<f64>,
        /// Factor for multiplicative_periodic.
        #[arg(long)]
        lambda: Option<f64>,
        /// Coset reps "a+bi;c+di" for the periodic generators.
        #[arg(long, allow_hyphen_values = true)]
        reps: Option<String>,
        /// Render a scatter plot of the sample.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ModulusCmd {
    /// Analytic joining-family modulus of a round annulus.
    Annulus { r_in: f64, r_out: f64 },
    /// Grid condenser capacity from a JSON spec
    /// {"rect":[x0,x1,y0,y1],"h":...,"c1":{...},"c2":{...}}.
    Condenser {
        spec: PathBuf,
        /// CG relative residual target.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Iteration cap (default scales with the grid).
        #[arg(long)]
        max_iter: Option<usize>,
        /// Keep the potential and density fields in the payload.
        #[arg(long)]
        full: bool,
        /// Render |grad u| as a heatmap.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Vuorinen lower bound between two point samples (CSV/JSON files).
    Vuorinen { c1: PathBuf, c2: PathBuf },
}

#[derive(Subcommand)]
#[allow(clippy::upper_case_acronyms)]
enum BoundsCmd {
    /// Quasisymmetry constant C(M) = M^4 + M^3 + M^2 + M.
    #[command(name = "C")]
    C { m: f64 },
    /// Spacing-ratio constant L = 8 A^2.
    #[command(name = "L")]
    L { a: f64 },
    /// Ratio bound exp(pi^2 K / log(1 + 1/(L+1))), L = 8 A^2 unless --direct-l.
    RatioBound {
        k: f64,
        a: Option<f64>,
        /// Use this L directly instead of deriving it from A.
        #[arg(long)]
        direct_l: Option<f64>,
    },
    /// Least dilatation K not contradicted by an image gap ell.
    KFromGap { ell: f64 },
}

struct CommandOutput {
    payload: Value,
    digest: String,
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Numeric(format!("serialization: {e}")))
}

fn args_digest(parts: &[String]) -> String {
    sha256_hex(parts.join("\u{1f}").as_bytes())
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<CommandOutput, CliError> {
    match &cli.cmd {
        Cmd::CheckRatio { input, m } => {
            let (window, digest) = load_window(input, cli.format)?;
            let payload = match m {
                Some(m) => to_value(&check_ratio(&window, *m)?)?,
                None => to_value(&ratio_report(&window))?,
            };
            Ok(CommandOutput { payload, digest })
        }
        Cmd::Decide { input, growth_factor, doublings } => {
            let (set, digest) = load_planar_set(input, cli.format)?;
            let verdict = decide_equiv_to_z_with(
                &set,
                &DecideOptions { growth_factor: *growth_factor, doublings: *doublings },
            );
            Ok(CommandOutput { payload: to_value(&verdict)?, digest })
        }
        Cmd::Periodic { input } => {
            let (set, digest) = load_planar_set(input, cli.format)?;
            let verdict = match set.descriptor() {
                Descriptor::AdditivePeriodic { .. } => periodic_additive_check(set.descriptor())?,
                Descriptor::MultiplicativePeriodic { .. } => {
                    periodic_multiplicative_check(set.descriptor())?
                }
                _ => {
                    return Err(CliError::Input(
                        "periodic check needs an additive- or multiplicative-periodic descriptor"
                            .into(),
                    ))
                }
            };
            Ok(CommandOutput { payload: to_value(&verdict)?, digest })
        }
        Cmd::Extend { input, grid, svg } => {
            let (window, digest) = load_window(input, cli.format)?;
            let (x0, x1, y0, y1, res) = parse_grid(grid)?;
            let spec = GridSpec::square(x0, x1, y0, y1, res)?;
            let field = extension_field(&pl_map(&window), &spec);
            if let Some(path) = svg {
                svg::grid_image(path, spec.nx, spec.ny, &field.values)
                    .map_err(|e| CliError::Input(format!("svg: {e}")))?;
            }
            Ok(CommandOutput { payload: to_value(&field)?, digest })
        }
        Cmd::Dilatation { input, grid, fd_step, svg } => {
            let (window, digest) = load_window(input, cli.format)?;
            let (x0, x1, y0, y1, res) = parse_grid(grid)?;
            let spec = GridSpec::square(x0, x1, y0, y1, res)?;
            let field = dilatation_field(&pl_map(&window), &spec, *fd_step)?;
            if let Some(path) = svg {
                svg::heatmap(path, spec.nx, spec.ny, &field.k)
                    .map_err(|e| CliError::Input(format!("svg: {e}")))?;
            }
            Ok(CommandOutput { payload: to_value(&field)?, digest })
        }
        Cmd::Spacing { input, images, a } => {
            let (window, digest_in) = load_window(input, cli.format)?;
            let (image_set, digest_img) = load_planar_set(images, cli.format)?;
            let image_vals = image_set.real_points_sorted().ok_or_else(|| {
                CliError::Input("image values must lie on the real axis".into())
            })?;
            let report = validate_image_spacing(&window, &image_vals, *a)?;
            Ok(CommandOutput {
                payload: to_value(&report)?,
                digest: sha256_hex(format!("{digest_in}:{digest_img}").as_bytes()),
            })
        }
        Cmd::Porosity { input, disks, target_c, resolution, svg } => {
            let (set, digest) = load_planar_set(input, cli.format)?;
            let probes = parse_disks(disks, &set)?;
            let report = porosity_estimate(&set, &probes, *resolution, *target_c)?;
            if let Some(path) = svg {
                let circles: Vec<(Complex64, f64)> = report
                    .per_disk
                    .iter()
                    .flat_map(|d| {
                        [(d.center, d.radius), (d.witness, d.max_gap.min(d.radius))]
                    })
                    .collect();
                svg::scatter(path, set.points(), &circles)
                    .map_err(|e| CliError::Input(format!("svg: {e}")))?;
            }
            Ok(CommandOutput { payload: to_value(&report)?, digest })
        }
        Cmd::Turning { input } => {
            let (poly, digest) = load_polyline(input, cli.format)?;
            Ok(CommandOutput { payload: to_value(&turning_constant(&poly))?, digest })
        }
        Cmd::Modulus { which } => match which {
            ModulusCmd::Annulus { r_in, r_out } => {
                let value = annulus_modulus(*r_in, *r_out)?;
                Ok(CommandOutput {
                    payload: to_value(&ModulusEstimate::analytic(value))?,
                    digest: args_digest(argv),
                })
            }
            ModulusCmd::Condenser { spec, tol, max_iter, full, svg } => {
                let (file, digest) = load_condenser(spec)?;
                let cspec = CondenserSpec::from_shapes(file.rect(), file.h, &file.c1, &file.c2)?;
                let keep = *full || svg.is_some();
                let est = grid_condenser_modulus_with(
                    &cspec,
                    &SolveOptions { tol: *tol, max_iter: *max_iter, keep_fields: keep },
                )?;
                if let Some(path) = svg {
                    let density = est.density.as_ref().expect("kept fields");
                    svg::heatmap(path, cspec.nx(), cspec.ny(), density)
                        .map_err(|e| CliError::Input(format!("svg: {e}")))?;
                }
                let est = if *full {
                    est
                } else {
                    ModulusEstimate { potential: None, density: None, ..est }
                };
                Ok(CommandOutput { payload: to_value(&est)?, digest })
            }
            ModulusCmd::Vuorinen { c1, c2 } => {
                let (s1, d1) = load_planar_set(c1, cli.format)?;
                let (s2, d2) = load_planar_set(c2, cli.format)?;
                let value = vuorinen_lower(s1.points(), s2.points())?;
                Ok(CommandOutput {
                    payload: to_value(&ModulusEstimate::lower_bound(value))?,
                    digest: sha256_hex(format!("{d1}:{d2}").as_bytes()),
                })
            }
        },
        Cmd::Bounds { which } => {
            let payload = match which {
                BoundsCmd::C { m } => json!({ "C": qs_constant_c(*m)? }),
                BoundsCmd::L { a } => json!({ "L": l_constant(*a)? }),
                BoundsCmd::RatioBound { k, a, direct_l } => match (a, direct_l) {
                    (_, Some(l)) => json!({
                        "bound": finite_or_null(ratio_bound_from_k_l(*k, *l)?),
                        "log_bound": ratio_bound_log_from_k_l(*k, *l)?,
                        "L": l,
                    }),
                    (Some(a), None) => json!({
                        "bound": finite_or_null(ratio_bound_from_k_a(*k, *a)?),
                        "log_bound": ratio_bound_log_from_k_a(*k, *a)?,
                        "L": l_constant(*a)?,
                    }),
                    (None, None) => {
                        return Err(CliError::Input(
                            "ratio-bound needs a turning constant A or --direct-l".into(),
                        ))
                    }
                },
                BoundsCmd::KFromGap { ell } => json!({ "K": k_lower_bound_from_gap(*ell)? }),
            };
            Ok(CommandOutput { payload, digest: args_digest(argv) })
        }
        Cmd::Corpus { name, window, nmax, r, s, lambda, reps, svg } => {
            let (lo, hi) = parse_window(window)?;
            let which = match name.replace('-', "_").as_str() {
                "integers" => CorpusSet::Integers { lo, hi },
                "gauss" => CorpusSet::Gauss { lo, hi },
                "e1" => CorpusSet::E1 { x_lo: lo, x_hi: hi, n_max: *nmax },
                "geometric" => CorpusSet::Geometric {
                    r: r.ok_or_else(|| CliError::Input("geometric needs --r".into()))?,
                    n_max: *nmax,
                },
                "pm_geometric" => CorpusSet::PmGeometric {
                    s: s.ok_or_else(|| CliError::Input("pm_geometric needs --s".into()))?,
                    n_max: *nmax,
                },
                "additive_periodic" => CorpusSet::AdditivePeriodic {
                    reps: parse_complex_list(
                        reps.as_deref()
                            .ok_or_else(|| CliError::Input("additive_periodic needs --reps".into()))?,
                    )?,
                    lo,
                    hi,
                },
                "multiplicative_periodic" => CorpusSet::MultiplicativePeriodic {
                    factor: lambda.ok_or_else(|| {
                        CliError::Input("multiplicative_periodic needs --lambda".into())
                    })?,
                    reps: parse_complex_list(reps.as_deref().ok_or_else(|| {
                        CliError::Input("multiplicative_periodic needs --reps".into())
                    })?)?,
                    lo: lo as i32,
                    hi: hi as i32,
                },
                other => return Err(qclat_core::Error::UnknownCorpus(other.into()).into()),
            };
            let set = corpus::generate(&which)?;
            if let Some(path) = svg {
                svg::scatter(path, set.points(), &[])
                    .map_err(|e| CliError::Input(format!("svg: {e}")))?;
            }
            Ok(CommandOutput { payload: to_value(&set)?, digest: args_digest(argv) })
        }
    }
}

/// `--disks` parser: explicit `cx,cy,r;...` or `auto:N` log-spaced radii
/// around the sample's bounding-box center.
fn parse_disks(
    spec: &str,
    set: &qclat_core::model::PlanarSet,
) -> Result<Vec<DiskProbe>, CliError> {
    if let Some(n) = spec.strip_prefix("auto:") {
        let n: usize = n
            .parse()
            .map_err(|e| CliError::Input(format!("auto disk count: {e}")))?;
        if n == 0 {
            return Err(CliError::Input("auto disk count must be positive".into()));
        }
        let pts = set.points();
        let (mut xmin, mut xmax, mut ymin, mut ymax) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in pts {
            xmin = xmin.min(p.re);
            xmax = xmax.max(p.re);
            ymin = ymin.min(p.im);
            ymax = ymax.max(p.im);
        }
        let center = Complex64::new(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
        let diag = (xmax - xmin).hypot(ymax - ymin).max(1.0);
        let (r_lo, r_hi) = (diag / 20.0, diag / 2.0);
        let probes = (0..n)
            .map(|i| {
                let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                DiskProbe { center, radius: r_lo * (r_hi / r_lo).powf(t) }
            })
            .collect();
        return Ok(probes);
    }
    spec.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|part| {
            let nums: Vec<&str> = part.split(',').collect();
            if nums.len() != 3 {
                return Err(CliError::Input(format!("disk '{part}' must be cx,cy,r")));
            }
            let f = |i: usize| -> Result<f64, CliError> {
                nums[i]
                    .trim()
                    .parse()
                    .map_err(|e| CliError::Input(format!("disk '{part}': {e}")))
            };
            Ok(DiskProbe { center: Complex64::new(f(0)?, f(1)?), radius: f(2)? })
        })
        .collect()
}

fn main() {
    if let Ok(threads) = std::env::var("QCLAT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(&cli, &argv) {
        Ok(out) => {
            let envelope =
                ReportEnvelope::new(format!("qclat {}", argv.join(" ")), out.digest, out.payload);
            let rendered = serde_json::to_string_pretty(&envelope)
                .expect("envelope serializes");
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered + "\n") {
                        eprintln!("input error: cannot write {}: {e}", path.display());
                        std::process::exit(2);
                    }
                }
                None => println!("{rendered}"),
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
