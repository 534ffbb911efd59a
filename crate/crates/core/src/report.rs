//! CSV and SVG rendering of analysis results.
//!
//! All numeric CSV cells use fixed 6-decimal formatting and the SVG is
//! assembled from deterministic primitives, so outputs are byte-stable and
//! feed diff-based golden tests.

use std::fmt::Write as _;

use crate::profile::{ConsistencyReport, CrossGroupRow, SimilarityMatrix};

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

/// CSV field quoting for labels (labels may contain commas or quotes).
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Similarity matrix as CSV with a label header row and label row prefixes.
pub fn matrix_csv(matrix: &SimilarityMatrix) -> String {
    let mut out = String::from("label");
    for label in matrix.labels() {
        out.push(',');
        out.push_str(&csv_field(label));
    }
    out.push('\n');
    for (i, label) in matrix.labels().iter().enumerate() {
        out.push_str(&csv_field(label));
        for j in 0..matrix.len() {
            out.push(',');
            out.push_str(&fmt6(matrix.get(i, j)));
        }
        out.push('\n');
    }
    out
}

/// Matrix as a JSON object `{"labels": [...], "values": [[...], ...]}`.
pub fn matrix_json(matrix: &SimilarityMatrix) -> String {
    let rows: Vec<Vec<f64>> = (0..matrix.len())
        .map(|i| (0..matrix.len()).map(|j| matrix.get(i, j)).collect())
        .collect();
    let value = serde_json::json!({
        "labels": matrix.labels(),
        "values": rows,
    });
    serde_json::to_string_pretty(&value).expect("matrix serializes infallibly")
}

/// Per-player consistency table (`player,min,max,avg`).
pub fn consistency_csv(reports: &[ConsistencyReport]) -> String {
    let mut out = String::from("player,min,max,avg\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_field(&r.player_id),
            fmt6(r.min),
            fmt6(r.max),
            fmt6(r.avg)
        );
    }
    out
}

/// Cross-group table (similarity with AI, avg/median similarity with humans).
pub fn cross_group_csv(rows: &[CrossGroupRow]) -> String {
    let mut out = String::from(
        "player,similarity_with_ai,avg_similarity_with_humans,median_similarity_with_humans\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_field(&r.label),
            fmt6(r.similarity_with_ai),
            fmt6(r.avg_similarity_with_humans),
            fmt6(r.median_similarity_with_humans)
        );
    }
    out
}

const CELL: f64 = 56.0;
const MARGIN_LEFT: f64 = 140.0;
const MARGIN_TOP: f64 = 120.0;
const PAD: f64 = 16.0;

/// Shade from white (0.0) to a deep blue (1.0).
fn cell_color(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * v).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 21.0), lerp(255.0, 67.0), lerp(255.0, 125.0))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Similarity matrix as a self-contained SVG heatmap: labeled grid, cells
/// shaded by value, numeric annotations.
pub fn heatmap_svg(matrix: &SimilarityMatrix) -> String {
    let n = matrix.len();
    let width = MARGIN_LEFT + CELL * n as f64 + PAD;
    let height = MARGIN_TOP + CELL * n as f64 + PAD;
    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    svg.push('\n');
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#
    );
    for (j, label) in matrix.labels().iter().enumerate() {
        let x = MARGIN_LEFT + CELL * (j as f64 + 0.5);
        let y = MARGIN_TOP - 8.0;
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="12" text-anchor="start" transform="rotate(-45 {x:.1} {y:.1})">{}</text>"#,
            xml_escape(label)
        );
    }
    for (i, label) in matrix.labels().iter().enumerate() {
        let x = MARGIN_LEFT - 8.0;
        let y = MARGIN_TOP + CELL * (i as f64 + 0.5) + 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="12" text-anchor="end">{}</text>"#,
            xml_escape(label)
        );
    }
    for i in 0..n {
        for j in 0..n {
            let v = matrix.get(i, j);
            let x = MARGIN_LEFT + CELL * j as f64;
            let y = MARGIN_TOP + CELL * i as f64;
            let _ = writeln!(
                svg,
                r##"<rect x="{x:.1}" y="{y:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="{}" stroke="#cccccc" stroke-width="1"/>"##,
                cell_color(v)
            );
            let text_color = if v > 0.55 { "#ffffff" } else { "#000000" };
            let tx = x + CELL / 2.0;
            let ty = y + CELL / 2.0 + 4.0;
            let _ = writeln!(
                svg,
                r#"<text x="{tx:.1}" y="{ty:.1}" font-family="monospace" font-size="12" text-anchor="middle" fill="{text_color}">{v:.2}</text>"#
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
