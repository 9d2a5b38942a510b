//! Hand-rolled SVG rendering of staircase diagrams.

use evlab_core::lyapunov::{f1, g_rect};
use evlab_core::Configuration;

const CELL: f64 = 22.0;
const MARGIN: f64 = 40.0;

/// Renders the right-down staircase of a configuration, optionally with the
/// largest inscribed rectangle. The ground state yields an annotated empty
/// diagram.
pub fn staircase_svg(s: &Configuration, highlight_rect: bool) -> String {
    if s.is_ground() {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"360\" height=\"120\" \
             viewBox=\"0 0 360 120\">\n\
             <rect width=\"360\" height=\"120\" fill=\"white\"/>\n\
             <text x=\"20\" y=\"55\" font-family=\"monospace\" font-size=\"16\">ground state</text>\n\
             <text x=\"20\" y=\"80\" font-family=\"monospace\" font-size=\"12\">empty hybrid zone: ...111000... (area 0)</text>\n\
             </svg>\n"
            .to_string();
    }

    let path = s.staircase_path();
    let points = path.points();
    let (r, t) = s.prefix_sums();
    let width_cells = *r.last().unwrap();
    let height_cells = t[0];
    let to_px = |x: u64, y: u64| {
        (
            MARGIN + x as f64 * CELL,
            MARGIN + (height_cells - y) as f64 * CELL,
        )
    };
    let width = MARGIN * 2.0 + width_cells as f64 * CELL;
    let height = MARGIN * 2.0 + height_cells as f64 * CELL + 30.0;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    ));

    // Light lattice grid.
    for gx in 0..=width_cells {
        let (x, y0) = to_px(gx, height_cells);
        let (_, y1) = to_px(gx, 0);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{y0:.1}\" x2=\"{x:.1}\" y2=\"{y1:.1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
    }
    for gy in 0..=height_cells {
        let (x0, y) = to_px(0, gy);
        let (x1, _) = to_px(width_cells, gy);
        svg.push_str(&format!(
            "<line x1=\"{x0:.1}\" y1=\"{y:.1}\" x2=\"{x1:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
    }

    // Filled staircase region: down the y-axis, along the path, back along
    // the x-axis.
    let mut region = String::new();
    let (ox, oy) = to_px(0, 0);
    region.push_str(&format!("M {ox:.1} {oy:.1} "));
    for &(x, y) in points {
        let (px, py) = to_px(x, y);
        region.push_str(&format!("L {px:.1} {py:.1} "));
    }
    region.push('Z');
    svg.push_str(&format!(
        "<path d=\"{region}\" fill=\"#cfe3ff\" stroke=\"none\"/>\n"
    ));

    if highlight_rect {
        let w = g_rect(s);
        let (rx, ry) = to_px(0, w.y);
        svg.push_str(&format!(
            "<rect x=\"{rx:.1}\" y=\"{ry:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"#ffd9a0\" fill-opacity=\"0.7\" stroke=\"#c77d00\" stroke-width=\"2\"/>\n",
            w.x as f64 * CELL,
            w.y as f64 * CELL
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\">largest rectangle {} x {} = {}</text>\n",
            rx + 4.0,
            ry + 16.0,
            w.x,
            w.y,
            w.g
        ));
    }

    // The staircase itself.
    let mut line = String::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        let (px, py) = to_px(x, y);
        line.push_str(if i == 0 { "M " } else { "L " });
        line.push_str(&format!("{px:.1} {py:.1} "));
    }
    svg.push_str(&format!(
        "<path d=\"{line}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"3\"/>\n"
    ));

    svg.push_str(&format!(
        "<text x=\"{MARGIN:.0}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"14\">blocks ({}), area = {}</text>\n",
        height - 12.0,
        s.blocks_csv(),
        f1(s)
    ));
    svg.push_str("</svg>\n");
    svg
}
