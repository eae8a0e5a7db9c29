//! Plain SVG rendering of an empirical profile against its limiting curve.

use std::fmt::Write as _;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 320.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 16.0;
const BOTTOM: f64 = 44.0;

/// A series of `(beta, distance)` points.
pub type Series = [(f64, f64)];

/// Maps `beta` onto `[LEFT, WIDTH - RIGHT]` and distance in `[0, 1]` onto
/// the plot height, larger distances higher up.
#[derive(Debug, Clone, Copy)]
struct Frame {
    beta_max: f64,
}

impl Frame {
    fn x(&self, beta: f64) -> f64 {
        LEFT + (WIDTH - LEFT - RIGHT) * beta / self.beta_max
    }

    fn y(&self, d: f64) -> f64 {
        TOP + (HEIGHT - TOP - BOTTOM) * (1.0 - d.clamp(0.0, 1.0))
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the empirical points as markers joined by a polyline and the
/// theory curve as a dashed polyline. Output depends only on the inputs.
pub fn emit_svg(profile: &Series, theory: &Series) -> String {
    let beta_max = profile
        .iter()
        .chain(theory)
        .map(|p| p.0)
        .fold(0.0, f64::max);
    let frame = Frame {
        beta_max: if beta_max > 0.0 { beta_max } else { 1.0 },
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let (x0, y0) = (frame.x(0.0), frame.y(0.0));
    let (x1, y1) = (frame.x(frame.beta_max), frame.y(1.0));
    let _ = writeln!(
        out,
        "<g id=\"axes\" stroke=\"black\" fill=\"none\"><line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/><line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/></g>",
        fmt(x0), fmt(y0), fmt(x1), fmt(y0), fmt(x0), fmt(y0), fmt(x0), fmt(y1)
    );
    for d in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{d:.1}</text>",
            fmt(x0 - 6.0),
            fmt(frame.y(d) + 4.0)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
        fmt(x1),
        fmt(y0 + 16.0),
        fmt(frame.beta_max)
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">β</text>",
        fmt((x0 + x1) / 2.0),
        fmt(HEIGHT - 8.0)
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">TV distance</text>",
        fmt((y0 + y1) / 2.0),
        fmt((y0 + y1) / 2.0)
    );
    let points = |s: &Series| {
        s.iter()
            .map(|&(b, d)| format!("{},{}", fmt(frame.x(b)), fmt(frame.y(d))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    if !theory.is_empty() {
        let _ = writeln!(
            out,
            "<polyline id=\"theory\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\" points=\"{}\"/>",
            points(theory)
        );
    }
    if !profile.is_empty() {
        let _ = writeln!(
            out,
            "<polyline id=\"empirical\" fill=\"none\" stroke=\"steelblue\" points=\"{}\"/>",
            points(profile)
        );
        for &(b, d) in profile {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"steelblue\"/>",
                fmt(frame.x(b)),
                fmt(frame.y(d))
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Samples `f` on `count + 1` evenly spaced points of `(0, beta_max]`,
/// skipping points where it is undefined.
pub fn theory_curve(beta_max: f64, count: usize, f: impl Fn(f64) -> Option<f64>) -> Vec<(f64, f64)> {
    (1..=count)
        .filter_map(|k| {
            let b = beta_max * k as f64 / count as f64;
            f(b).map(|v| (b, v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polyline(svg: &str, id: &str) -> Vec<(f64, f64)> {
        let line = svg
            .lines()
            .find(|l| l.contains(&format!("id=\"{id}\"")))
            .unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        pts.split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn empty_profile_draws_only_axes() {
        let svg = emit_svg(&[], &[]);
        assert!(svg.contains("id=\"axes\""));
        assert!(svg.contains(">β<"));
        assert!(svg.contains(">TV distance<"));
        assert!(!svg.contains("polyline"));
        assert!(!svg.contains("circle"));
    }

    #[test]
    fn decreasing_profile_renders_descending_polyline() {
        let profile: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64 * 0.5, 1.0 / k as f64)).collect();
        let pts = polyline(&emit_svg(&profile, &[]), "empirical");
        assert_eq!(pts.len(), 6);
        for w in pts.windows(2) {
            assert!(w[1].0 > w[0].0);
            // svg y grows downwards
            assert!(w[1].1 > w[0].1);
        }
    }

    #[test]
    fn theory_curve_skips_undefined_points() {
        let c = theory_curve(2.0, 4, |b| (b != 1.0).then_some(b));
        assert_eq!(c, vec![(0.5, 0.5), (1.5, 1.5), (2.0, 2.0)]);
    }
}
