//! Writers for the three output formats. Every document carries the run
//! configuration in its header.

use resolab::report::{canonical, format_float};
use resolab::spectrum::{ZeroKind, ZeroSet};
use serde_json::{Map, Value};
use std::fmt::Write as _;

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// `config` as a JSON object gains the document under the other keys.
pub fn json_document(config: &Map<String, Value>, mut body: Map<String, Value>) -> String {
    body.insert("config".into(), Value::Object(config.clone()));
    canonical(&Value::Object(body))
}

fn config_lines(config: &Map<String, Value>, prefix: &str) -> String {
    let mut keys: Vec<&String> = config.keys().collect();
    keys.sort();
    let mut out = String::new();
    for key in keys {
        let value = canonical(&config[key]);
        let value = value.trim_end().replace('\n', " ");
        let value = value.split_whitespace().collect::<Vec<_>>().join(" ");
        writeln!(out, "{prefix}{key} = {value}").expect("write to string");
    }
    out
}

pub fn csv_document(config: &Map<String, Value>, table: &Table) -> String {
    let mut out = config_lines(config, "# ");
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|c| c.map(format_float).unwrap_or_default()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Zeros in the complex `k`-plane: eigenvalues filled, resonances open,
/// the origin as a filled square.
pub fn svg_scatter(config: &Map<String, Value>, zs: &ZeroSet) -> String {
    let [re0, re1, im0, im1] = zs.region.as_array();
    let sx = |x: f64| MARGIN + (x - re0) / (re1 - re0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - im0) / (im1 - im0) * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )
    .unwrap();
    out.push_str("<!--\n");
    out.push_str(&config_lines(config, "").replace("--", "- -"));
    out.push_str("-->\n");
    writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>").unwrap();
    writeln!(
        out,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    if re0 <= 0.0 && re1 >= 0.0 {
        let x = sx(0.0);
        writeln!(out, "<line x1=\"{x:.3}\" y1=\"{MARGIN}\" x2=\"{x:.3}\" y2=\"{}\" stroke=\"gray\"/>", HEIGHT - MARGIN).unwrap();
    }
    if im0 <= 0.0 && im1 >= 0.0 {
        let y = sy(0.0);
        writeln!(out, "<line x1=\"{MARGIN}\" y1=\"{y:.3}\" x2=\"{}\" y2=\"{y:.3}\" stroke=\"gray\"/>", WIDTH - MARGIN).unwrap();
    }
    for (x, label) in [(re0, re0), (re1, re1)] {
        writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            sx(x),
            HEIGHT - MARGIN + 18.0,
            label
        )
        .unwrap();
    }
    for (y, label) in [(im0, im0), (im1, im1)] {
        writeln!(
            out,
            "<text x=\"{}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            MARGIN - 6.0,
            sy(y) + 4.0,
            label
        )
        .unwrap();
    }
    writeln!(out, "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">Re k</text>", WIDTH / 2.0, HEIGHT - 15.0)
        .unwrap();
    writeln!(
        out,
        "<text x=\"18\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">Im k</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();
    for p in &zs.points {
        let (x, y) = (sx(p.k.re), sy(p.k.im));
        let r = 3.0 + p.multiplicity as f64;
        let mark = match p.kind {
            ZeroKind::Eigenvalue => {
                format!("<circle class=\"eigenvalue\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r}\" fill=\"black\"/>")
            }
            ZeroKind::Resonance => format!(
                "<circle class=\"resonance\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r}\" fill=\"none\" stroke=\"black\"/>"
            ),
            ZeroKind::Origin => format!(
                "<rect class=\"origin\" x=\"{:.3}\" y=\"{:.3}\" width=\"{}\" height=\"{}\" fill=\"black\"/>",
                x - r,
                y - r,
                2.0 * r,
                2.0 * r
            ),
        };
        out.push_str(&mark);
        out.push('\n');
    }
    out.push_str("</svg>\n");
    out
}
