//! Input parsing: CSV/JSON point files, condenser specs, report envelopes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use qclat_core::model::{Descriptor, PlanarSet, Polyline, RealSequenceWindow};
use qclat_core::modulus::{MaskShape, Rect};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FileFormat {
    Csv,
    Json,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Versioned wrapper written around every payload.
#[derive(Serialize)]
pub struct ReportEnvelope {
    pub schema: u32,
    pub tool: ToolInfo,
    pub command: String,
    pub input_digest: String,
    pub timestamp: String,
    pub warnings: Vec<String>,
    pub payload: serde_json::Value,
}

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ReportEnvelope {
    pub fn new(command: String, input_digest: String, payload: serde_json::Value) -> Self {
        Self {
            schema: 1,
            tool: ToolInfo { name: "qclat", version: env!("CARGO_PKG_VERSION") },
            command,
            input_digest,
            timestamp: chrono::Utc::now().to_rfc3339(),
            warnings: Vec::new(),
            payload,
        }
    }
}

fn detect_format(path: &Path, flag: Option<FileFormat>) -> Result<FileFormat, CliError> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(FileFormat::Csv),
        Some("json") => Ok(FileFormat::Json),
        other => Err(CliError::Input(format!(
            "cannot infer format from extension {other:?}; pass --format"
        ))),
    }
}

#[derive(Deserialize)]
struct PointsFile {
    points: Vec<(f64, f64)>,
    #[serde(default)]
    descriptor: Option<Descriptor>,
}

/// Raw points in file order plus the optional descriptor and input bytes.
pub struct LoadedPoints {
    pub points: Vec<Complex64>,
    pub descriptor: Option<Descriptor>,
    pub digest: String,
}

pub fn load_points(path: &Path, flag: Option<FileFormat>) -> Result<LoadedPoints, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let digest = sha256_hex(&bytes);
    match detect_format(path, flag)? {
        FileFormat::Csv => {
            let text = String::from_utf8(bytes)
                .map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
            let mut points = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let mut it = line.split(',');
                let parse = |s: Option<&str>| -> Result<f64, CliError> {
                    s.ok_or_else(|| {
                        CliError::Input(format!("{}:{}: expected x,y", path.display(), lineno + 1))
                    })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| {
                        CliError::Input(format!("{}:{}: {e}", path.display(), lineno + 1))
                    })
                };
                let x = parse(it.next())?;
                let y = parse(it.next())?;
                if it.next().is_some() {
                    return Err(CliError::Input(format!(
                        "{}:{}: expected exactly two fields",
                        path.display(),
                        lineno + 1
                    )));
                }
                points.push(Complex64::new(x, y));
            }
            Ok(LoadedPoints { points, descriptor: None, digest })
        }
        FileFormat::Json => {
            let mut value: serde_json::Value = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            // Accept a full report envelope and dig out its payload.
            if value.get("payload").is_some() {
                value = value["payload"].take();
            }
            let file: PointsFile = serde_json::from_value(value)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(LoadedPoints {
                points: file.points.into_iter().map(|(x, y)| Complex64::new(x, y)).collect(),
                descriptor: file.descriptor,
                digest,
            })
        }
    }
}

pub fn load_planar_set(
    path: &Path,
    flag: Option<FileFormat>,
) -> Result<(PlanarSet, String), CliError> {
    let loaded = load_points(path, flag)?;
    let set = PlanarSet::new(loaded.points, loaded.descriptor)?;
    Ok((set, loaded.digest))
}

pub fn load_polyline(
    path: &Path,
    flag: Option<FileFormat>,
) -> Result<(Polyline, String), CliError> {
    let loaded = load_points(path, flag)?;
    let poly = Polyline::new(loaded.points)?;
    Ok((poly, loaded.digest))
}

/// Real-axis input sorted into a sequence window with base index 0.
pub fn load_window(
    path: &Path,
    flag: Option<FileFormat>,
) -> Result<(RealSequenceWindow, String), CliError> {
    let (set, digest) = load_planar_set(path, flag)?;
    let xs = set.real_points_sorted().ok_or_else(|| {
        CliError::Input("input must lie on the real axis (y = 0 for every point)".into())
    })?;
    let window = RealSequenceWindow::new(xs, 0)?;
    Ok((window, digest))
}

#[derive(Deserialize)]
pub struct CondenserFile {
    pub rect: (f64, f64, f64, f64),
    pub h: f64,
    pub c1: MaskShape,
    pub c2: MaskShape,
}

pub fn load_condenser(path: &Path) -> Result<(CondenserFile, String), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let digest = sha256_hex(&bytes);
    let file: CondenserFile = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((file, digest))
}

impl CondenserFile {
    pub fn rect(&self) -> Rect {
        Rect { x0: self.rect.0, x1: self.rect.1, y0: self.rect.2, y1: self.rect.3 }
    }
}

/// Parses `a+bi` complex literals: `1`, `-2.5`, `i`, `-i`, `2i`, `1+2i`,
/// `1.5-0.25i`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err(CliError::Input("empty complex literal".into()));
    }
    let bad = || CliError::Input(format!("cannot parse complex number '{s}'"));
    if let Some(body) = t.strip_suffix('i') {
        // Split body at the sign of the imaginary part (not at position 0,
        // not right after an exponent 'e').
        let chars: Vec<char> = body.chars().collect();
        let mut split = None;
        for p in (1..chars.len()).rev() {
            if (chars[p] == '+' || chars[p] == '-')
                && chars[p - 1] != 'e'
                && chars[p - 1] != 'E'
            {
                split = Some(p);
                break;
            }
        }
        match split {
            Some(p) => {
                let re: f64 = body[..p].parse().map_err(|_| bad())?;
                let im_str = &body[p..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_complex)
        .collect()
}

/// `lo,hi` integer window.
pub fn parse_window(s: &str) -> Result<(i64, i64), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Input(format!("window '{s}' must be lo,hi")));
    }
    let lo = parts[0].trim().parse().map_err(|e| CliError::Input(format!("window: {e}")))?;
    let hi = parts[1].trim().parse().map_err(|e| CliError::Input(format!("window: {e}")))?;
    Ok((lo, hi))
}

/// `x0,x1,y0,y1,res` grid description.
pub fn parse_grid(s: &str) -> Result<(f64, f64, f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 5 {
        return Err(CliError::Input(format!("grid '{s}' must be x0,x1,y0,y1,res")));
    }
    let f = |i: usize| -> Result<f64, CliError> {
        parts[i].trim().parse().map_err(|e| CliError::Input(format!("grid: {e}")))
    };
    let res: usize =
        parts[4].trim().parse().map_err(|e| CliError::Input(format!("grid: {e}")))?;
    Ok((f(0)?, f(1)?, f(2)?, f(3)?, res))
}
