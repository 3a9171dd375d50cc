//! Text formats: distribution CSV, extrema CSV, trajectory CSV and SVG.

use std::fmt::Write as _;
use std::path::Path;

use slitsim_core::{ExtremaReport, Geometry, Histogram, Outcome, ParticleState};

use crate::error::{CliError, Result};

pub const DISTRIBUTION_HEADER: &str = "bin_center,count,frequency";

/// Formats `x` with 17 significant digits, fixed notation for moderate
/// magnitudes and exponent notation otherwise. Parsing the result gives
/// back `x` exactly.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exp) {
        format!("{x:.prec$}", prec = (16 - exp) as usize)
    } else {
        sci
    }
}

pub fn distribution_csv(h: &Histogram, freqs: &[f64]) -> String {
    let mut s = String::with_capacity(64 * (h.counts.len() + 1));
    s.push_str(DISTRIBUTION_HEADER);
    s.push('\n');
    for (k, (&c, &f)) in h.counts.iter().zip(freqs).enumerate() {
        let _ = writeln!(s, "{},{},{}", g17(h.spec.bin_center(k)), c, g17(f));
    }
    s
}

/// A distribution read back from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub centers: Vec<f64>,
    pub counts: Vec<u64>,
    pub freqs: Vec<f64>,
}

impl Distribution {
    /// Detected-hit total: recovered from any row with a nonzero count
    /// (hits outside the binned range are only visible this way), else the
    /// binned sum.
    pub fn n_detected(&self) -> u64 {
        self.counts
            .iter()
            .zip(&self.freqs)
            .find(|(&c, &f)| c > 0 && f > 0.0)
            .map(|(&c, &f)| (c as f64 / f).round() as u64)
            .unwrap_or_else(|| self.counts.iter().sum())
    }
}

pub fn parse_distribution(text: &str, path: &Path) -> Result<Distribution> {
    let err = |msg: String| CliError::Input {
        path: path.to_path_buf(),
        msg,
    };
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some(DISTRIBUTION_HEADER) => {}
        Some(other) => {
            return Err(err(format!(
                "expected header {DISTRIBUTION_HEADER:?}, got {other:?}"
            )))
        }
        None => return Err(err("empty file".into())),
    }
    let mut d = Distribution {
        centers: Vec::new(),
        counts: Vec::new(),
        freqs: Vec::new(),
    };
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(err(format!(
                "line {row}: expected 3 fields, got {}",
                fields.len()
            )));
        }
        let center: f64 = fields[0]
            .parse()
            .map_err(|_| err(format!("line {row}: bad bin_center {:?}", fields[0])))?;
        let count: u64 = fields[1]
            .parse()
            .map_err(|_| err(format!("line {row}: bad count {:?}", fields[1])))?;
        let freq: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("line {row}: bad frequency {:?}", fields[2])))?;
        if !center.is_finite() || !(0.0..=1.0).contains(&freq) {
            return Err(err(format!("line {row}: value out of range")));
        }
        if d.centers.last().is_some_and(|&prev| center <= prev) {
            return Err(err(format!("line {row}: bin centres must increase")));
        }
        d.centers.push(center);
        d.counts.push(count);
        d.freqs.push(freq);
    }
    if d.centers.is_empty() {
        return Err(err("no data rows".into()));
    }
    Ok(d)
}

pub fn extrema_csv(report: &ExtremaReport) -> String {
    let mut s = String::from("kind,bin_center,height,prominence,first_bin,last_bin\n");
    let mut rows: Vec<(&str, &slitsim_core::Extremum)> = report
        .maxima
        .iter()
        .map(|e| ("max", e))
        .chain(report.minima.iter().map(|e| ("min", e)))
        .collect();
    rows.sort_by_key(|(_, e)| e.first_bin);
    for (kind, e) in rows {
        let _ = writeln!(
            s,
            "{kind},{},{},{},{},{}",
            g17(e.bin_center),
            g17(e.height),
            g17(e.prominence),
            e.first_bin,
            e.last_bin
        );
    }
    s
}

pub fn extrema_table(report: &ExtremaReport) -> String {
    let mut s = format!(
        "{} maxima, {} minima (window {})\n{:<5} {:>10} {:>12} {:>12}\n",
        report.maxima.len(),
        report.minima.len(),
        report.smoothing_window,
        "kind",
        "y",
        "height",
        "prominence"
    );
    let mut rows: Vec<(&str, &slitsim_core::Extremum)> = report
        .maxima
        .iter()
        .map(|e| ("max", e))
        .chain(report.minima.iter().map(|e| ("min", e)))
        .collect();
    rows.sort_by_key(|(_, e)| e.first_bin);
    for (kind, e) in rows {
        let _ = writeln!(
            s,
            "{kind:<5} {:>10.3} {:>12.6} {:>12.6}",
            e.bin_center, e.height, e.prominence
        );
    }
    s
}

/// One recorded trajectory for plotting.
pub struct Traced {
    pub outcome: Outcome,
    pub path: Vec<ParticleState>,
}

pub fn trajectories_csv(traces: &[Traced]) -> String {
    let mut s = String::from("traj_id,t,x,y\n");
    for (id, tr) in traces.iter().enumerate() {
        for p in &tr.path {
            let _ = writeln!(s, "{id},{},{},{}", g17(p.t), g17(p.pos.x), g17(p.pos.y));
        }
    }
    s
}

const PX_PER_UNIT: f64 = 16.0;

/// World-coordinate window shown by [`trajectories_svg`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl View {
    /// From the escape line to just past the detector, and the histogram's
    /// `y` range widened by a fifth.
    pub fn for_setup(g: &Geometry, y_extent: f64) -> Self {
        let span = g.screen_gap - g.x_escape();
        View {
            x_min: g.x_escape(),
            x_max: g.screen_gap + 0.05 * span,
            y_min: -1.2 * y_extent,
            y_max: 1.2 * y_extent,
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.x_min) * PX_PER_UNIT,
            (self.y_max - y) * PX_PER_UNIT,
        )
    }
}

pub fn trajectories_svg(traces: &[Traced], g: &Geometry, view: &View, caption: &str) -> String {
    let w = (view.x_max - view.x_min) * PX_PER_UNIT;
    let h = (view.y_max - view.y_min) * PX_PER_UNIT;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(
        s,
        "<desc>{caption}; x range [{}, {}], y range [{}, {}], {} px per unit, y up</desc>",
        view.x_min, view.x_max, view.y_min, view.y_max, PX_PER_UNIT
    );
    s.push_str(concat!(
        "<style>\n",
        "polyline { fill: none; stroke-width: 0.8; stroke-opacity: 0.7; }\n",
        ".detected { stroke: #1f5fbf; }\n",
        ".blocked { stroke: #b03030; }\n",
        ".escaped { stroke: #808080; }\n",
        ".step_limit { stroke: #d08000; }\n",
        ".screen { stroke: #000; stroke-width: 3; }\n",
        "</style>\n",
    ));
    let _ = writeln!(
        s,
        r#"<clipPath id="view"><rect width="{w:.0}" height="{h:.0}"/></clipPath>"#
    );
    let _ = writeln!(s, r##"<rect width="{w:.0}" height="{h:.0}" fill="#fff"/>"##);

    let r = g.slit_half_height;
    let line = |s: &mut String, (x1, y1): (f64, f64), (x2, y2): (f64, f64)| {
        let _ = writeln!(
            s,
            r#"<line class="screen" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#
        );
    };
    line(&mut s, view.px(0.0, r), view.px(0.0, view.y_max));
    line(&mut s, view.px(0.0, -r), view.px(0.0, view.y_min));
    line(
        &mut s,
        view.px(g.screen_gap, view.y_min),
        view.px(g.screen_gap, view.y_max),
    );
    let (ex, ey) = view.px(-g.emitter_distance, 0.0);
    let _ = writeln!(
        s,
        r##"<circle cx="{ex:.2}" cy="{ey:.2}" r="3" fill="#000"/>"##
    );

    s.push_str("<g clip-path=\"url(#view)\">\n");
    for (id, tr) in traces.iter().enumerate() {
        let _ = write!(
            s,
            r#"<polyline id="t{id}" class="{}" points=""#,
            tr.outcome.label()
        );
        for (i, p) in tr.path.iter().enumerate() {
            let (x, y) = view.px(p.pos.x, p.pos.y);
            let sep = if i == 0 { "" } else { " " };
            let _ = write!(s, "{sep}{x:.2},{y:.2}");
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</g>\n</svg>\n");
    s
}
