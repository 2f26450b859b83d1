//! Line charts of a [`SweepTable`] as standalone SVG.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::sweep::{Source, SweepRow, SweepTable};
use crate::analytic::MeanAge;
use crate::error::{Error, Result};

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 45.0;
const TITLE_H: f64 = 36.0;
const LEGEND_H: f64 = 24.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Panel {
    title: String,
    values: fn(&SweepRow, usize) -> Option<Point>,
    index: usize,
}

enum Point {
    Value(f64),
    Unbounded,
}

fn avg_aoi(row: &SweepRow, _: usize) -> Option<Point> {
    match row.avg_aoi? {
        MeanAge::Finite(v) => Some(Point::Value(v)),
        MeanAge::Unbounded => Some(Point::Unbounded),
    }
}

fn plp(row: &SweepRow, _: usize) -> Option<Point> {
    Some(Point::Value(row.plp))
}

fn violation(row: &SweepRow, i: usize) -> Option<Point> {
    row.violations.get(i).copied().flatten().map(Point::Value)
}

struct Series<'a> {
    gamma_db: f64,
    source: Source,
    color: &'static str,
    rows: Vec<(f64, &'a SweepRow)>,
}

fn series(table: &SweepTable) -> Vec<Series<'_>> {
    let mut map: BTreeMap<(u64, Source), usize> = BTreeMap::new();
    let mut gammas: Vec<u64> = Vec::new();
    let mut out: Vec<Series> = Vec::new();
    for row in &table.rows {
        let bits = row.gamma_db.to_bits();
        let g = gammas.iter().position(|b| *b == bits).unwrap_or_else(|| {
            gammas.push(bits);
            gammas.len() - 1
        });
        let key = (bits, row.source);
        let i = *map.entry(key).or_insert_with(|| {
            out.push(Series {
                gamma_db: row.gamma_db,
                source: row.source,
                color: PALETTE[g % PALETTE.len()],
                rows: Vec::new(),
            });
            out.len() - 1
        });
        let x = row.sweep_value.unwrap_or(out[i].rows.len() as f64);
        out[i].rows.push((x, row));
    }
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders one panel per metric (mean AoI, PLP, each violation constraint)
/// with one line per `(γ, source)` pair. Unbounded mean-AoI points are left
/// out of the line and listed under the panel.
pub fn render_svg(table: &SweepTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut panels = vec![
        Panel {
            title: "average AoI (slots)".into(),
            values: avg_aoi,
            index: 0,
        },
        Panel {
            title: "PLP (deadline losses per slot)".into(),
            values: plp,
            index: 0,
        },
    ];
    for (i, c) in table.constraints.iter().enumerate() {
        panels.push(Panel {
            title: format!("P(AoI > {c})"),
            values: violation,
            index: i,
        });
    }
    let all = series(table);
    let param = table.rows[0].sweep_param.clone();
    let width = PANEL_W * panels.len() as f64;
    let height = TITLE_H + PANEL_H + LEGEND_H * all.len().div_ceil(3) as f64 + 10.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let alpha = table
        .alpha
        .map_or_else(|| "unknown".to_string(), |a| a.to_string());
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{} (alpha = {})</text>"#,
        width / 2.0,
        escape(&table.label),
        alpha
    );

    for (pi, panel) in panels.iter().enumerate() {
        let ox = PANEL_W * pi as f64;
        let oy = TITLE_H;
        let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
        let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
        let x0 = ox + MARGIN_L;
        let y0 = oy + MARGIN_T;

        let (xmin, xmax) = range(all.iter().flat_map(|se| se.rows.iter().map(|(x, _)| *x)));
        let (ymin, ymax) = range(all.iter().flat_map(|se| {
            se.rows
                .iter()
                .filter_map(|(_, r)| match (panel.values)(r, panel.index) {
                    Some(Point::Value(v)) if v.is_finite() => Some(v),
                    _ => None,
                })
        }));
        let px = |x: f64| x0 + (x - xmin) / (xmax - xmin) * plot_w;
        let py = |y: f64| y0 + plot_h - (y - ymin) / (ymax - ymin) * plot_h;

        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x0 + plot_w / 2.0,
            y0 - 10.0,
            escape(&panel.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.1}" y="{y0:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#444"/>"##
        );
        for k in 0..=4 {
            let f = f64::from(k) / 4.0;
            let xv = xmin + f * (xmax - xmin);
            let yv = ymin + f * (ymax - ymin);
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{:.3}</text>"#,
                px(xv),
                y0 + plot_h + 14.0,
                xv
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{:.4}</text>"#,
                x0 - 4.0,
                py(yv) + 3.0,
                yv
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x0 + plot_w / 2.0,
            y0 + plot_h + 32.0,
            escape(&param)
        );

        let mut gaps = Vec::new();
        for se in &all {
            let color = se.color;
            let dash = match se.source {
                Source::Analytic => "",
                Source::Simulated => r#" stroke-dasharray="5,3""#,
            };
            let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for (x, row) in &se.rows {
                match (panel.values)(row, panel.index) {
                    Some(Point::Value(v)) if v.is_finite() => {
                        runs.last_mut().unwrap().push((px(*x), py(v)))
                    }
                    Some(Point::Unbounded) => {
                        gaps.push(format!("γ={} dB x={}", se.gamma_db, x));
                        runs.push(Vec::new());
                    }
                    _ => runs.push(Vec::new()),
                }
            }
            for run in runs.iter().filter(|r| !r.is_empty()) {
                let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                    pts.join(" ")
                );
                if se.source == Source::Simulated {
                    for (x, y) in run {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#
                        );
                    }
                }
            }
        }
        if !gaps.is_empty() {
            let _ = writeln!(
                s,
                r##"<text x="{:.1}" y="{:.1}" font-size="9" fill="#a00">unbounded (omitted): {}</text>"##,
                x0,
                y0 + plot_h + 44.0,
                escape(&gaps.join("; "))
            );
        }
    }

    let legend_y = TITLE_H + PANEL_H;
    for (si, se) in all.iter().enumerate() {
        let color = se.color;
        let lx = 20.0 + 200.0 * (si % 3) as f64;
        let ly = legend_y + LEGEND_H * (si / 3) as f64 + 12.0;
        let dash = match se.source {
            Source::Analytic => "",
            Source::Simulated => r#" stroke-dasharray="5,3""#,
        };
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">γ = {} dB, {}</text>"#,
            lx + 30.0,
            ly + 4.0,
            se.gamma_db,
            se.source.name()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_chart(table: &SweepTable, path: &Path) -> Result<()> {
    let text = render_svg(table)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
