//! Boundaries of accessible and source regions as line segments and
//! elliptical arcs, with SVG and CSV renderings.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use serde::Serialize;

use super::planar::spectrum_volumes;
use super::qubit::{sio_accessible_volume, sio_source_volume, PURE_TOL};
use super::{MonotoneKind, OperationClass};
use crate::error::{Error, Result};
use crate::state::{QubitBloch, SortedSpectrum};

const ARC_SAMPLES: usize = 96;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Piece {
    Line { from: [f64; 2], to: [f64; 2] },
    /// `(cx + a cos t, cy + b sin t)` for `t` from `start` to `end`.
    Arc { center: [f64; 2], radii: [f64; 2], start: f64, end: f64 },
}

impl Piece {
    fn point(center: [f64; 2], radii: [f64; 2], t: f64) -> [f64; 2] {
        [center[0] + radii[0] * t.cos(), center[1] + radii[1] * t.sin()]
    }

    pub fn start_point(&self) -> [f64; 2] {
        match *self {
            Piece::Line { from, .. } => from,
            Piece::Arc { center, radii, start, .. } => Self::point(center, radii, start),
        }
    }

    pub fn end_point(&self) -> [f64; 2] {
        match *self {
            Piece::Line { to, .. } => to,
            Piece::Arc { center, radii, end, .. } => Self::point(center, radii, end),
        }
    }

    /// `1/2 ∮ (x dy - y dx)` along the piece.
    fn green(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => 0.5 * (from[0] * to[1] - to[0] * from[1]),
            Piece::Arc { center: [cx, cy], radii: [a, b], start, end } => {
                0.5 * (a * b * (end - start) + cx * b * (end.sin() - start.sin()) + cy * a * (start.cos() - end.cos()))
            }
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to[0] - from[0]).hypot(to[1] - from[1]),
            Piece::Arc { .. } => self.samples(ARC_SAMPLES).windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum(),
        }
    }

    /// `n + 1` points along the piece, endpoints included.
    pub fn samples(&self, n: usize) -> Vec<[f64; 2]> {
        match *self {
            Piece::Line { from, to } => (0..=n).map(|k| {
                let s = k as f64 / n as f64;
                [from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])]
            }).collect(),
            Piece::Arc { center, radii, start, end } => (0..=n).map(|k| Self::point(center, radii, start + (end - start) * k as f64 / n as f64)).collect(),
        }
    }

    fn mirrored_x(&self) -> Piece {
        let m = |p: [f64; 2]| [-p[0], p[1]];
        match *self {
            Piece::Line { from, to } => Piece::Line { from: m(to), to: m(from) },
            Piece::Arc { center, radii, start, end } => Piece::Arc { center: m(center), radii, start: PI - end, end: PI - start },
        }
    }
}

/// Closed counterclockwise boundary (or an open path for 1-D regions).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Loop {
    pub pieces: Vec<Piece>,
}

impl Loop {
    fn polygon(vertices: &[[f64; 2]]) -> Loop {
        let n = vertices.len();
        Loop { pieces: (0..n).map(|k| Piece::Line { from: vertices[k], to: vertices[(k + 1) % n] }).collect() }
    }

    pub fn area(&self) -> f64 {
        self.pieces.iter().map(Piece::green).sum()
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    fn mirrored_x(&self) -> Loop {
        Loop { pieces: self.pieces.iter().rev().map(Piece::mirrored_x).collect() }
    }

    fn points(&self) -> Vec<[f64; 2]> {
        let mut pts = Vec::new();
        for p in &self.pieces {
            let n = if matches!(p, Piece::Line { .. }) { 1 } else { ARC_SAMPLES };
            let s = p.samples(n);
            let skip = usize::from(!pts.is_empty());
            pts.extend_from_slice(&s[skip..]);
        }
        pts
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryInput {
    Spectrum(SortedSpectrum),
    Qubit(QubitBloch),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionGeometry {
    pub kind: MonotoneKind,
    pub operation_class: OperationClass,
    /// 2 for areas, 1 for segments on the sorted qubit line.
    pub dimension: usize,
    pub loops: Vec<Loop>,
    /// Outline of the ambient set (probability triangle or Bloch disc).
    pub frame: Loop,
    pub axes: [&'static str; 2],
    /// Closed-form volume the emitted region should reproduce.
    pub closed_form: f64,
}

impl RegionGeometry {
    /// Area from Green's theorem (or total length for 1-D regions).
    pub fn measure(&self) -> f64 {
        if self.dimension == 1 {
            self.loops.iter().map(Loop::length).sum()
        } else {
            self.loops.iter().map(Loop::area).sum()
        }
    }

    /// Boundary samples as `loop,x,y` rows.
    pub fn to_csv(&self) -> String {
        let mut out = format!("loop,{},{}\n", self.axes[0], self.axes[1]);
        for (k, l) in self.loops.iter().enumerate() {
            for [x, y] in l.points() {
                let _ = writeln!(out, "{k},{x:.9},{y:.9}");
            }
        }
        out
    }

    /// Filled region over the frame outline.
    pub fn to_svg(&self) -> String {
        let pts: Vec<[f64; 2]> = self.frame.points();
        let (xmin, xmax) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[0]), b.max(p[0])));
        let (ymin, ymax) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[1]), b.max(p[1])));
        let (size, margin) = (400.0, 20.0);
        let scale = size / (xmax - xmin).max(ymax - ymin);
        let w = (xmax - xmin) * scale + 2.0 * margin;
        let h = (ymax - ymin) * scale + 2.0 * margin;
        let path = |l: &Loop, close: bool| {
            let mut d = String::new();
            for (k, [x, y]) in l.points().into_iter().enumerate() {
                let _ = write!(d, "{}{:.3},{:.3} ", if k == 0 { "M" } else { "L" }, (x - xmin) * scale + margin, (ymax - y) * scale + margin);
            }
            if close {
                d.push('Z');
            }
            d.trim_end().to_string()
        };
        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#);
        let _ = writeln!(
            svg,
            r#"<metadata>{{"kind":"{:?}","class":"{}","measure":{:.12},"closed_form":{:.12}}}</metadata>"#,
            self.kind, self.operation_class, self.measure(), self.closed_form
        );
        let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="black" stroke-width="1"/>"#, path(&self.frame, true));
        let (fill, stroke) = match self.kind {
            MonotoneKind::Accessible => ("#d62728", "#8b0000"),
            MonotoneKind::Source => ("#1f77b4", "#0b3c5d"),
        };
        for l in &self.loops {
            if self.dimension == 1 {
                let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="{fill}" stroke-width="4"/>"#, path(l, false));
            } else {
                let _ = writeln!(svg, r#"<path d="{}" fill="{fill}" fill-opacity="0.6" stroke="{stroke}" stroke-width="1"/>"#, path(l, true));
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn triangle_frame() -> Loop {
    Loop::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
}

fn disc_frame() -> Loop {
    Loop { pieces: vec![Piece::Arc { center: [0.0, 0.0], radii: [1.0, 1.0], start: 0.0, end: 2.0 * PI }] }
}

/// Region of states accessible from (or sources of) the input.
///
/// - Spectra of length 2 or 3 under SIO, IC, LSICC or LICC: segments on the
///   sorted qubit line, or polygons in the `(p_0, p_1)` triangle.
/// - Qubits under SIO or IC: accessible region (strip cut by an ellipse) and
///   source region of mixed states (two lunes).
/// - Qubits under PIO: the accessible hexagon.
pub fn region_geometry(input: &GeometryInput, class: OperationClass, kind: MonotoneKind) -> Result<RegionGeometry> {
    match input {
        GeometryInput::Spectrum(lambda) => spectrum_region(lambda, class, kind),
        GeometryInput::Qubit(r) => qubit_region(r, class, kind),
    }
}

fn spectrum_region(lambda: &SortedSpectrum, class: OperationClass, kind: MonotoneKind) -> Result<RegionGeometry> {
    if class == OperationClass::PIO {
        return Err(Error::Unsupported("no planar PIO picture for pure states".into()));
    }
    let vols = spectrum_volumes(lambda)?;
    let v = lambda.padded(3);
    let (a, b) = (v[0], v[1]);
    let (dimension, loops, closed_form) = match (vols.dim, kind) {
        (3, MonotoneKind::Accessible) => (2, vec![Loop::polygon(&[[a + b, 0.0], [1.0, 0.0], [a, 1.0 - a], [a, b]])], vols.v_a),
        (3, MonotoneKind::Source) => (2, vec![Loop::polygon(&[[0.0, 0.0], [a, 0.0], [a, b], [0.0, a + b]])], vols.v_s),
        (_, MonotoneKind::Accessible) => (1, vec![Loop { pieces: vec![Piece::Line { from: [a, 1.0 - a], to: [1.0, 0.0] }] }], vols.v_a),
        (_, MonotoneKind::Source) => (1, vec![Loop { pieces: vec![Piece::Line { from: [0.5, 0.5], to: [a, 1.0 - a] }] }], vols.v_s),
    };
    debug_assert!(dimension == 2 || (closed_form - SQRT_2 * (if kind == MonotoneKind::Accessible { 1.0 - a } else { a - 0.5 })).abs() < 1e-12);
    Ok(RegionGeometry { kind, operation_class: class, dimension, loops, frame: triangle_frame(), axes: ["p0", "p1"], closed_form })
}

fn qubit_region(r: &QubitBloch, class: OperationClass, kind: MonotoneKind) -> Result<RegionGeometry> {
    let rt = r.transverse();
    let z = r.z.abs();
    let (loops, closed_form) = match (class, kind) {
        (OperationClass::SIO | OperationClass::IC, MonotoneKind::Accessible) => {
            let loops = if rt == 0.0 {
                Vec::new()
            } else {
                let kappa = (rt / (1.0 - z * z).sqrt()).min(1.0);
                let t0 = z.min(1.0).asin();
                let e = |start: f64, end: f64| Piece::Arc { center: [0.0, 0.0], radii: [kappa, 1.0], start, end };
                vec![Loop {
                    pieces: vec![
                        Piece::Line { from: [rt, -z], to: [rt, z] },
                        e(t0, PI - t0),
                        Piece::Line { from: [-rt, z], to: [-rt, -z] },
                        e(PI + t0, 2.0 * PI - t0),
                    ],
                }]
            };
            (loops, sio_accessible_volume(r))
        }
        (OperationClass::SIO | OperationClass::IC, MonotoneKind::Source) => {
            if r.is_pure(PURE_TOL) {
                return Err(Error::Unsupported("the source region of a pure qubit state has no area in the disc".into()));
            }
            let w = (1.0 - rt * rt).max(0.0).sqrt();
            let th = w.atan2(rt);
            let kappa = if rt == 0.0 { 0.0 } else { (rt / (1.0 - z * z).sqrt()).min(1.0) };
            let t0 = z.min(1.0).asin();
            let right = Loop {
                pieces: vec![
                    Piece::Arc { center: [0.0, 0.0], radii: [1.0, 1.0], start: -th, end: th },
                    Piece::Line { from: [rt, w], to: [rt, z] },
                    Piece::Arc { center: [0.0, 0.0], radii: [kappa, 1.0], start: t0, end: -t0 },
                    Piece::Line { from: [rt, -z], to: [rt, -w] },
                ],
            };
            let left = right.mirrored_x();
            (vec![right, left], sio_source_volume(r))
        }
        (OperationClass::PIO, MonotoneKind::Accessible) => {
            let loops = if rt == 0.0 {
                Vec::new()
            } else {
                vec![Loop::polygon(&[[0.0, -1.0], [rt, -z], [rt, z], [0.0, 1.0], [-rt, z], [-rt, -z]])]
            };
            (loops, 2.0 * rt * (1.0 + z))
        }
        (OperationClass::PIO, MonotoneKind::Source) => {
            return Err(Error::Unsupported("no closed boundary for the PIO source region".into()));
        }
        (c, _) => return Err(Error::Unsupported(format!("{c} regions are not defined for a single qubit"))),
    };
    Ok(RegionGeometry { kind, operation_class: class, dimension: 2, loops, frame: disc_frame(), axes: ["x", "z"], closed_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(x: f64, z: f64) -> GeometryInput {
        GeometryInput::Qubit(QubitBloch::new(x, 0.0, z).unwrap())
    }

    fn closed(l: &Loop) -> bool {
        let n = l.pieces.len();
        (0..n).all(|k| {
            let (a, b) = (l.pieces[k].end_point(), l.pieces[(k + 1) % n].start_point());
            (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12
        })
    }

    #[test]
    fn full_disc_for_maximally_coherent_qubit() {
        let g = region_geometry(&q(1.0, 0.0), OperationClass::SIO, MonotoneKind::Accessible).unwrap();
        assert_abs_diff_eq!(g.measure(), PI, epsilon = 1e-12);
        assert!(closed(&g.loops[0]));
    }

    #[test]
    fn qutrit_source_polygon() {
        let s = SortedSpectrum::new(vec![0.5, 0.3, 0.2]).unwrap();
        let g = region_geometry(&GeometryInput::Spectrum(s.clone()), OperationClass::IC, MonotoneKind::Source).unwrap();
        assert_abs_diff_eq!(g.measure(), 0.275, epsilon = 1e-12);
        let g = region_geometry(&GeometryInput::Spectrum(s), OperationClass::IC, MonotoneKind::Accessible).unwrap();
        assert_abs_diff_eq!(g.measure(), 0.08, epsilon = 1e-12);
    }

    #[test]
    fn qubit_segments() {
        let s = SortedSpectrum::new(vec![0.6, 0.4]).unwrap();
        let a = region_geometry(&GeometryInput::Spectrum(s.clone()), OperationClass::IC, MonotoneKind::Accessible).unwrap();
        assert_abs_diff_eq!(a.measure(), SQRT_2 * 0.4, epsilon = 1e-12);
        let b = region_geometry(&GeometryInput::Spectrum(s), OperationClass::IC, MonotoneKind::Source).unwrap();
        assert_abs_diff_eq!(b.measure(), SQRT_2 * 0.1, epsilon = 1e-12);
    }

    #[test]
    fn pio_hexagon_vertices() {
        let g = region_geometry(&q(0.5, 0.75), OperationClass::PIO, MonotoneKind::Accessible).unwrap();
        assert_eq!(g.loops[0].pieces.len(), 6);
        assert_abs_diff_eq!(g.measure(), 1.75, epsilon = 1e-12);
        assert_eq!(g.loops[0].pieces[1].start_point(), [0.5, -0.75]);
    }

    #[test]
    fn areas_match_closed_forms() {
        for (x, z) in [(0.5, 2f64.sqrt() / 2.0), (0.3, -0.4), (0.05, 0.9), (0.9, 0.1), (0.0, 0.5), (0.6, 0.8)] {
            for (class, kind) in [
                (OperationClass::SIO, MonotoneKind::Accessible),
                (OperationClass::IC, MonotoneKind::Source),
                (OperationClass::PIO, MonotoneKind::Accessible),
            ] {
                match region_geometry(&q(x, z), class, kind) {
                    Ok(g) => {
                        assert!((g.measure() - g.closed_form).abs() < 1e-6, "{x} {z} {class} {kind:?}: {} vs {}", g.measure(), g.closed_form);
                        assert!(g.loops.iter().all(closed));
                    }
                    Err(e) => assert!(x * x + z * z > 1.0 - 1e-9, "{e}"),
                }
            }
        }
    }

    #[test]
    fn renderings_are_deterministic() {
        let g = region_geometry(&q(0.5, 0.5), OperationClass::SIO, MonotoneKind::Source).unwrap();
        assert_eq!(g.to_svg(), g.to_svg());
        assert!(g.to_svg().starts_with("<svg"));
        let csv = g.to_csv();
        assert!(csv.starts_with("loop,x,z\n"));
        assert!(csv.lines().count() > 100);
    }

    #[test]
    fn unsupported_settings() {
        assert!(region_geometry(&q(0.5, 0.5), OperationClass::PIO, MonotoneKind::Source).is_err());
        assert!(region_geometry(&q(0.5, 0.5), OperationClass::LICC, MonotoneKind::Source).is_err());
        let s = SortedSpectrum::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!(region_geometry(&GeometryInput::Spectrum(s), OperationClass::IC, MonotoneKind::Source).is_err());
    }
}
