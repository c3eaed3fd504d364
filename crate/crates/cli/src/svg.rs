//! Minimal SVG 1.1 emitters: point scatters, field heatmaps, mapped grids.

use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

const SIZE: f64 = 800.0;
const PAD: f64 = 40.0;

struct Frame {
    xmin: f64,
    ymin: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Complex64>) -> Frame {
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            xmin = xmin.min(p.re);
            xmax = xmax.max(p.re);
            ymin = ymin.min(p.im);
            ymax = ymax.max(p.im);
        }
        if !xmin.is_finite() {
            (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
        }
        let w = (xmax - xmin).max(1e-12);
        let h = (ymax - ymin).max(1e-12);
        let scale = (SIZE - 2.0 * PAD) / w.max(h);
        Frame { xmin, ymin, scale }
    }

    fn x(&self, v: f64) -> f64 {
        PAD + (v - self.xmin) * self.scale
    }

    /// SVG y grows downward.
    fn y(&self, v: f64) -> f64 {
        SIZE - PAD - (v - self.ymin) * self.scale
    }
}

fn header(buf: &mut String) {
    let _ = writeln!(
        buf,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(buf, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
}

fn write_svg(path: &Path, buf: String) -> std::io::Result<()> {
    std::fs::write(path, buf)
}

/// Scatter of set points, with optional emphasized circles
/// `(center, radius)` drawn as outlines.
pub fn scatter(
    path: &Path,
    points: &[Complex64],
    circles: &[(Complex64, f64)],
) -> std::io::Result<()> {
    let frame = Frame::fit(
        points
            .iter()
            .copied()
            .chain(circles.iter().flat_map(|&(c, r)| {
                [c + Complex64::new(r, r), c - Complex64::new(r, r)]
            })),
    );
    let mut buf = String::new();
    header(&mut buf);
    for &(c, r) in circles {
        let _ = writeln!(
            buf,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"#d95f02\" stroke-width=\"1.5\"/>",
            frame.x(c.re),
            frame.y(c.im),
            r * frame.scale
        );
    }
    for p in points {
        let _ = writeln!(
            buf,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"#1b2a49\"/>",
            frame.x(p.re),
            frame.y(p.im)
        );
    }
    buf.push_str("</svg>\n");
    write_svg(path, buf)
}

/// Five-stop blue-to-red ramp over [0, 1].
fn ramp(t: f64) -> (u8, u8, u8) {
    let stops = [
        (0.0, (24u8, 32u8, 94u8)),
        (0.25, (56, 116, 180)),
        (0.5, (222, 235, 247)),
        (0.75, (244, 165, 130)),
        (1.0, (178, 24, 43)),
    ];
    let t = t.clamp(0.0, 1.0);
    for w in stops.windows(2) {
        let (t0, c0) = w[0];
        let (t1, c1) = w[1];
        if t <= t1 {
            let u = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * u).round() as u8;
            return (mix(c0.0, c1.0), mix(c0.1, c1.1), mix(c0.2, c1.2));
        }
    }
    stops[4].1
}

/// Heatmap of a row-major scalar field (`nx` columns).
pub fn heatmap(path: &Path, nx: usize, ny: usize, values: &[f64]) -> std::io::Result<()> {
    assert_eq!(values.len(), nx * ny);
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-300);
    let cell = (SIZE - 2.0 * PAD) / nx.max(ny) as f64;
    let mut buf = String::new();
    header(&mut buf);
    for j in 0..ny {
        for i in 0..nx {
            let v = values[j * nx + i];
            let t = if v.is_finite() { (v - lo) / span } else { 1.0 };
            let (r, g, b) = ramp(t);
            // Row 0 is the bottom of the field.
            let _ = writeln!(
                buf,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({r},{g},{b})\"/>",
                PAD + i as f64 * cell,
                SIZE - PAD - (j + 1) as f64 * cell,
                cell + 0.5,
                cell + 0.5
            );
        }
    }
    buf.push_str("</svg>\n");
    write_svg(path, buf)
}

/// Image of the coordinate grid under a map: draws the mapped horizontal and
/// vertical grid lines through the row-major node values.
pub fn grid_image(path: &Path, nx: usize, ny: usize, mapped: &[Complex64]) -> std::io::Result<()> {
    assert_eq!(mapped.len(), nx * ny);
    let frame = Frame::fit(mapped.iter().copied());
    let mut buf = String::new();
    header(&mut buf);
    let mut polyline = |idx: &mut dyn Iterator<Item = usize>| {
        let pts: Vec<String> = idx
            .map(|i| format!("{:.2},{:.2}", frame.x(mapped[i].re), frame.y(mapped[i].im)))
            .collect();
        let _ = writeln!(
            buf,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#2166ac\" stroke-width=\"0.8\"/>",
            pts.join(" ")
        );
    };
    for j in 0..ny {
        polyline(&mut (0..nx).map(|i| j * nx + i));
    }
    for i in 0..nx {
        polyline(&mut (0..ny).map(|j| j * nx + i));
    }
    buf.push_str("</svg>\n");
    write_svg(path, buf)
}
