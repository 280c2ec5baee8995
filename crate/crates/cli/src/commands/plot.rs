use std::fmt::{self, Write as _};
use std::fs;

use crate::args::PlotArgs;
use crate::commands::HistoryLine;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    History,
    Prediction,
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlotKind::History => "loss per epoch",
            PlotKind::Prediction => "probability per horizon",
        })
    }
}

struct Series {
    name: &'static str,
    points: Vec<(f64, f64)>,
}

struct Table {
    kind: PlotKind,
    x_label: &'static str,
    series: Vec<Series>,
}

fn parse_history(text: &str) -> Result<Table> {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for (i, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let h: HistoryLine = serde_json::from_str(line)
            .map_err(|e| CliError::Invalid(format!("history line {}: {e}", i + 1)))?;
        train.push((h.epoch as f64, h.train_loss));
        val.push((h.epoch as f64, h.val_loss));
    }
    Ok(Table {
        kind: PlotKind::History,
        x_label: "epoch",
        series: vec![
            Series {
                name: "train_loss",
                points: train,
            },
            Series {
                name: "val_loss",
                points: val,
            },
        ],
    })
}

fn parse_prediction(text: &str) -> Result<Table> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == "horizon_frames,probability" => {}
        Some((_, header)) => {
            return Err(CliError::Invalid(format!(
                "expected header `horizon_frames,probability`, found `{}`",
                header.trim()
            )))
        }
        None => return Err(CliError::Invalid("empty prediction CSV".into())),
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        let bad = || CliError::Invalid(format!("malformed CSV row {}: `{}`", i + 1, line.trim()));
        let (h, p) = line.trim().split_once(',').ok_or_else(bad)?;
        let h: f64 = h.trim().parse().map_err(|_| bad())?;
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        if !h.is_finite() || !p.is_finite() {
            return Err(bad());
        }
        points.push((h, p));
    }
    if points.is_empty() {
        return Err(CliError::Invalid("prediction CSV has no data rows".into()));
    }
    Ok(Table {
        kind: PlotKind::Prediction,
        x_label: "horizon_frames",
        series: vec![Series {
            name: "probability",
            points,
        }],
    })
}

fn parse(text: &str) -> Result<Table> {
    match text.trim_start().chars().next() {
        None => Err(CliError::Invalid("input is empty".into())),
        Some('{') => parse_history(text),
        Some(_) => parse_prediction(text),
    }
}

/// Whitespace-separated columns with a `#` header, one row per x value.
fn gnuplot_data(table: &Table) -> String {
    let mut s = format!("# {}", table.x_label);
    for series in &table.series {
        write!(s, " {}", series.name).unwrap();
    }
    s.push('\n');
    for (row, &(x, _)) in table.series[0].points.iter().enumerate() {
        write!(s, "{x}").unwrap();
        for series in &table.series {
            write!(s, " {}", series.points[row].1).unwrap();
        }
        s.push('\n');
    }
    s
}

const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

/// Static line chart of the parsed series.
fn svg_chart(table: &Table) -> String {
    let (w, h, margin) = (640.0, 400.0, 50.0);
    let all = table.series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if table.kind == PlotKind::Prediction {
        (y0, y1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let py = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <rect x=\"{margin}\" y=\"{margin}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w - 2.0 * margin,
        h - 2.0 * margin
    );
    writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        w / 2.0,
        h - 15.0,
        table.x_label
    )
    .unwrap();
    for (v, y) in [(y0, h - margin), (y1, margin)] {
        writeln!(
            s,
            "<text x=\"{}\" y=\"{y:.2}\" text-anchor=\"end\" font-size=\"10\">{v:.3}</text>",
            margin - 4.0
        )
        .unwrap();
    }
    for (v, x) in [(x0, margin), (x1, w - margin)] {
        writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{v}</text>",
            h - margin + 14.0
        )
        .unwrap();
    }
    for (k, series) in table.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
            pts.join(" ")
        )
        .unwrap();
        writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>",
            margin + 8.0,
            margin + 16.0 * (k + 1) as f64,
            series.name
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Parses a history log or prediction CSV and renders it as SVG.
pub fn render_svg(text: &str) -> Result<String> {
    Ok(svg_chart(&parse(text)?))
}

pub fn cmd_plot(args: &PlotArgs) -> Result<PlotKind> {
    let text = fs::read_to_string(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let table = parse(&text)?;
    fs::write(&args.out, gnuplot_data(&table)).map_err(|e| CliError::io(&args.out, e))?;
    if let Some(svg) = &args.svg {
        fs::write(svg, svg_chart(&table)).map_err(|e| CliError::io(svg, e))?;
    }
    Ok(table.kind)
}
