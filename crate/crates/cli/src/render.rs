//! Deterministic SVG rendering of construction stages.
//!
//! 1-D systems draw one horizontal bar row per stage, stage k as its N^k
//! filled cells; 2-D systems draw the outlines of the final stage's cells.
//! Fixed inputs produce byte-identical documents.

use std::fmt::Write as _;

use hausdim::ifs::Ifs;

use crate::CliError;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;
const BAR_HEIGHT: f64 = 24.0;
const ROW_GAP: f64 = 12.0;

const MAX_DEPTH_1D: usize = 12;
const MAX_DEPTH_2D: usize = 6;

pub fn render_stages(ifs: &Ifs, depth: usize) -> Result<String, CliError> {
    match ifs.dim() {
        1 => render_bars(ifs, depth),
        2 => render_outlines(ifs, depth),
        other => Err(CliError::Usage(format!("cannot render dimension {other}"))),
    }
}

fn render_bars(ifs: &Ifs, depth: usize) -> Result<String, CliError> {
    if depth > MAX_DEPTH_1D {
        return Err(CliError::Usage(format!(
            "render depth {depth} exceeds the 1-D cap of {MAX_DEPTH_1D}"
        )));
    }
    let height = 2.0 * MARGIN + (depth + 1) as f64 * BAR_HEIGHT + depth as f64 * ROW_GAP;
    let seed = ifs.seed_box();
    let (lo, hi) = (seed.lo()[0], seed.hi()[0]);
    let inner = CANVAS - 2.0 * MARGIN;
    let scale = inner / (hi - lo);

    let mut svg = svg_open(CANVAS, height);
    for stage in 0..=depth {
        let y = MARGIN + stage as f64 * (BAR_HEIGHT + ROW_GAP);
        for cell in ifs.refine(stage)?.cells() {
            let x = MARGIN + (cell.bounds.lo()[0] - lo) * scale;
            let w = (cell.bounds.hi()[0] - cell.bounds.lo()[0]) * scale;
            let _ = writeln!(
                svg,
                r#"  <rect x="{x:.4}" y="{y:.4}" width="{w:.4}" height="{BAR_HEIGHT:.4}" fill="black"/>"#,
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn render_outlines(ifs: &Ifs, depth: usize) -> Result<String, CliError> {
    if depth > MAX_DEPTH_2D {
        return Err(CliError::Usage(format!(
            "render depth {depth} exceeds the 2-D cap of {MAX_DEPTH_2D}"
        )));
    }
    let seed = ifs.seed_box();
    let (x_lo, y_lo) = (seed.lo()[0], seed.lo()[1]);
    let (x_hi, y_hi) = (seed.hi()[0], seed.hi()[1]);
    let inner = CANVAS - 2.0 * MARGIN;
    let scale_x = inner / (x_hi - x_lo);
    let scale_y = inner / (y_hi - y_lo);

    let mut svg = svg_open(CANVAS, CANVAS);
    for cell in ifs.refine(depth)?.cells() {
        let b = &cell.bounds;
        let x = MARGIN + (b.lo()[0] - x_lo) * scale_x;
        // SVG y grows downward.
        let y = MARGIN + (y_hi - b.hi()[1]) * scale_y;
        let w = (b.hi()[0] - b.lo()[0]) * scale_x;
        let h = (b.hi()[1] - b.lo()[1]) * scale_y;
        let _ = writeln!(
            svg,
            r#"  <rect x="{x:.4}" y="{y:.4}" width="{w:.4}" height="{h:.4}" fill="none" stroke="black" stroke-width="1"/>"#,
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn svg_open(width: f64, height: f64) -> String {
    format!(
        concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" ",
            "viewBox=\"0 0 {w:.0} {h:.0}\">\n"
        ),
        w = width,
        h = height,
    )
}
