//! Regenerates the bundled corpus masks and `corpus.json`.
//!
//! ```text
//! cargo run -p shapejulia-cli --example make_corpus
//! ```

use std::fs;

use num_complex::Complex64;
use shapejulia::geometry::{PlaneWindow, ShapeMask};
use shapejulia_cli::{corpus_dir, CorpusEntry};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Distance from `z` to the segment `[a, b]`.
fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Ellipse with center at polar `(radius, angle)`, semi-axis `along` in the
/// radial direction and `across` transversally.
fn radial_ellipse(z: Complex64, radius: f64, angle: f64, along: f64, across: f64) -> bool {
    let dir = Complex64::from_polar(1.0, angle);
    let local = (z - dir * radius) * dir.conj();
    (local.re / along).powi(2) + (local.im / across).powi(2) <= 1.0
}

fn rabbit(z: Complex64) -> bool {
    let deg = std::f64::consts::PI / 180.0;
    z.norm() <= 1.0
        || radial_ellipse(z, 1.07, 72.0 * deg, 0.17, 0.07)
        || radial_ellipse(z, 1.07, 97.0 * deg, 0.17, 0.07)
        || (z - Complex64::from_polar(1.04, 200.0 * deg)).norm() <= 0.1
        || (z - Complex64::from_polar(1.02, -40.0 * deg)).norm() <= 0.09
        || (z - Complex64::from_polar(1.02, -70.0 * deg)).norm() <= 0.09
}

fn klmy(z: Complex64) -> bool {
    const STROKES: [((f64, f64), (f64, f64)); 12] = [
        ((-1.75, -0.6), (-1.75, 0.6)),
        ((-1.75, 0.0), (-1.15, 0.6)),
        ((-1.75, 0.0), (-1.15, -0.6)),
        ((-0.85, -0.6), (-0.85, 0.6)),
        ((-0.85, -0.6), (-0.35, -0.6)),
        ((-0.1, -0.6), (-0.1, 0.6)),
        ((-0.1, 0.6), (0.25, 0.0)),
        ((0.25, 0.0), (0.6, 0.6)),
        ((0.6, 0.6), (0.6, -0.6)),
        ((1.2, 0.0), (0.9, 0.6)),
        ((1.2, 0.0), (1.5, 0.6)),
        ((1.2, 0.0), (1.2, -0.6)),
    ];
    STROKES
        .iter()
        .any(|&((ax, ay), (bx, by))| segment_distance(z, c(ax, ay), c(bx, by)) <= 0.08)
}

struct Shape {
    entry: CorpusEntry,
    resolution: usize,
    inside: Box<dyn Fn(Complex64) -> bool>,
}

fn entry(name: &str, side: f64, n: usize, s: &str, connected: bool, capacity: Option<f64>) -> CorpusEntry {
    CorpusEntry {
        name: name.to_string(),
        mask: format!("{name}.png"),
        window: PlaneWindow {
            center: c(0.0, 0.0),
            side,
        },
        n,
        s: s.to_string(),
        boundary_spacing: None,
        connected,
        capacity,
    }
}

fn main() {
    let segment_px = 6.0 / 1024.0;
    let shapes = vec![
        Shape {
            entry: entry("disk", 4.0, 400, "auto", true, Some(1.0)),
            resolution: 1024,
            inside: Box::new(|z| (z - c(0.05, -0.03)).norm() <= 1.0),
        },
        Shape {
            entry: entry("square", 4.0, 400, "0.004", true, None),
            resolution: 1024,
            inside: Box::new(|z| z.re.abs() <= 0.9 && z.im.abs() <= 0.9),
        },
        Shape {
            entry: entry("rabbit", 4.0, 700, "auto", true, None),
            resolution: 1024,
            inside: Box::new(rabbit),
        },
        Shape {
            entry: entry("two_disks", 4.0, 400, "0.02", false, None),
            resolution: 1024,
            inside: Box::new(|z| (z - c(-0.9, 0.0)).norm() <= 0.5 || (z - c(0.9, 0.0)).norm() <= 0.5),
        },
        Shape {
            entry: CorpusEntry {
                boundary_spacing: Some(0.001),
                ..entry("klmy", 4.0, 2000, "0.01", false, None)
            },
            resolution: 4096,
            inside: Box::new(klmy),
        },
        Shape {
            entry: entry("disk_r2", 6.0, 400, "auto", true, Some(2.0)),
            resolution: 1024,
            inside: Box::new(|z| z.norm() <= 2.0),
        },
        Shape {
            entry: entry("segment", 6.0, 400, "auto", true, Some(1.0)),
            resolution: 1024,
            inside: Box::new(move |z| z.re.abs() <= 2.0 && z.im.abs() < segment_px),
        },
    ];

    let dir = corpus_dir();
    fs::create_dir_all(&dir).expect("corpus directory");
    let mut entries = Vec::new();
    for shape in shapes {
        let grid = shape.entry.window.grid_for(shape.resolution, shape.resolution);
        let mask = ShapeMask::from_predicate(grid, |z| (shape.inside)(z)).expect("valid corpus shape");
        fs::write(dir.join(&shape.entry.mask), mask.to_png().expect("png")).expect("write mask");
        println!("{}: {} pixels", shape.entry.name, mask.count());
        entries.push(shape.entry);
    }
    let mut text = serde_json::to_string_pretty(&entries).expect("json");
    text.push('\n');
    fs::write(dir.join("corpus.json"), text).expect("write corpus.json");
}
