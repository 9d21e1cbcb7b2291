//! Static trajectory plot. North is up, east to the right, one user unit per
//! metre.

use std::fmt::Write as _;
use std::path::Path;

use zest_core::simulator::{ScenarioConfig, SimLog};
use zest_core::Vec2;

use crate::CliError;

const MARGIN: f64 = 10.0;

struct Frame {
    min_e: f64,
    max_e: f64,
    min_n: f64,
    max_n: f64,
}

impl Frame {
    fn around<'a>(points: impl Iterator<Item = &'a Vec2>) -> Self {
        let mut f = Frame {
            min_e: f64::INFINITY,
            max_e: f64::NEG_INFINITY,
            min_n: f64::INFINITY,
            max_n: f64::NEG_INFINITY,
        };
        for p in points {
            f.min_n = f.min_n.min(p.x);
            f.max_n = f.max_n.max(p.x);
            f.min_e = f.min_e.min(p.y);
            f.max_e = f.max_e.max(p.y);
        }
        f.min_e -= MARGIN;
        f.max_e += MARGIN;
        f.min_n -= MARGIN;
        f.max_n += MARGIN;
        f
    }

    fn width(&self) -> f64 {
        self.max_e - self.min_e
    }

    fn height(&self) -> f64 {
        self.max_n - self.min_n
    }
}

/// Grid spacing giving roughly 5 to 10 lines across `extent`.
fn tick_step(extent: f64) -> f64 {
    let raw = extent / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn polyline(out: &mut String, pts: &[Vec2], attrs: &str) {
    out.push_str("<polyline points=\"");
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.3},{:.3}", p.y, -p.x);
    }
    let _ = writeln!(out, "\" fill=\"none\" {attrs}/>");
}

pub fn render_trajectory_svg_string(
    log: &SimLog,
    config: &ScenarioConfig,
) -> Result<String, CliError> {
    if log.records.is_empty() {
        return Err(CliError::Invalid(zest_core::Error::EmptyLog));
    }
    let path = config.build_path()?;
    let white: Vec<Vec2> = log.records.iter().map(|r| r.white.position()).collect();
    let red: Vec<Vec2> = log
        .records
        .iter()
        .filter_map(|r| r.red.map(|s| s.position()))
        .collect();
    let mut reference = path.samples().to_vec();
    if path.is_closed() {
        reference.push(reference[0]);
    }

    let f = Frame::around(white.iter().chain(&red).chain(&reference));
    let font = (f.width().max(f.height()) / 60.0).max(1.0);
    let line = font / 4.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.3} {:.3} {:.3} {:.3}\" width=\"{:.0}\" height=\"{:.0}\">",
        f.min_e,
        -f.max_n,
        f.width(),
        f.height(),
        800.0 * f.width() / f.width().max(f.height()),
        800.0 * f.height() / f.width().max(f.height())
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&config.name));
    let _ = writeln!(
        s,
        "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"white\"/>",
        f.min_e,
        -f.max_n,
        f.width(),
        f.height()
    );

    // metre grid with labels: east along the bottom, north along the left
    let step = tick_step(f.width().max(f.height()));
    let _ = writeln!(
        s,
        "<g stroke=\"#dddddd\" stroke-width=\"{:.3}\" font-size=\"{font:.3}\" fill=\"#666666\">",
        line / 2.0
    );
    for k in (f.min_e / step).ceil() as i64..=(f.max_e / step).floor() as i64 {
        let e = k as f64 * step + 0.0;
        let _ = writeln!(
            s,
            "<line x1=\"{e:.3}\" y1=\"{:.3}\" x2=\"{e:.3}\" y2=\"{:.3}\"/><text x=\"{e:.3}\" y=\"{:.3}\" stroke=\"none\">{}</text>",
            -f.max_n,
            -f.min_n,
            -f.min_n - font * 0.3,
            e
        );
    }
    for k in (f.min_n / step).ceil() as i64..=(f.max_n / step).floor() as i64 {
        let n = k as f64 * step + 0.0;
        let _ = writeln!(
            s,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\"/><text x=\"{:.3}\" y=\"{:.3}\" stroke=\"none\">{}</text>",
            f.min_e,
            -n,
            f.max_e,
            -n,
            f.min_e + font * 0.3,
            -n - font * 0.3,
            n
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.3}\" y=\"{:.3}\" stroke=\"none\">east [m] / north [m]</text>",
        f.min_e + font * 0.3,
        -f.max_n + font * 1.2
    );
    s.push_str("</g>\n");

    polyline(
        &mut s,
        &reference,
        &format!(
            "class=\"reference\" stroke=\"#444444\" stroke-width=\"{line:.3}\" stroke-dasharray=\"{:.3} {:.3}\"",
            4.0 * line,
            3.0 * line
        ),
    );
    polyline(
        &mut s,
        &white,
        &format!(
            "class=\"white\" stroke=\"blue\" stroke-width=\"{:.3}\"",
            1.5 * line
        ),
    );
    if !red.is_empty() {
        polyline(
            &mut s,
            &red,
            &format!(
                "class=\"red\" stroke=\"red\" stroke-width=\"{:.3}\"",
                1.5 * line
            ),
        );
    }

    let cpa = log
        .records
        .iter()
        .filter_map(|r| {
            r.separation
                .zip(r.red)
                .map(|(d, red)| (d, r.white.position(), red.position()))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((d, w, r)) = cpa {
        let _ = writeln!(
            s,
            "<g class=\"cpa\"><line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\" stroke-width=\"{line:.3}\" stroke-dasharray=\"{line:.3} {line:.3}\"/>",
            w.y, -w.x, r.y, -r.x
        );
        for (p, colour) in [(w, "blue"), (r, "red")] {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"{line:.3}\"/>",
                p.y,
                -p.x,
                font * 0.6
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"{font:.3}\">CPA {d:.2} m</text></g>",
            w.y + font,
            -w.x
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_trajectory_svg(
    log: &SimLog,
    config: &ScenarioConfig,
    path: &Path,
) -> Result<(), CliError> {
    let text = render_trajectory_svg_string(log, config)?;
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(tick_step(80.0), 10.0);
        assert_eq!(tick_step(200.0), 50.0);
        assert_eq!(tick_step(7.0), 1.0);
    }
}
