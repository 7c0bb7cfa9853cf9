//! SVG picture of a plane curve, the base point and the tangent lines through it.

use std::fmt::Write as _;

use isoline::lines::TangencyRecord;
use isoline::{BasePoint, Error, ImmersedHypersurface};

use crate::CliError;

const CURVE_SAMPLES: usize = 720;

fn num(x: f64) -> String {
    // Avoid "-0.000000" so output does not depend on the sign of zero.
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

/// Renders the scene; the y axis points up.
pub fn render_svg(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    records: &[TangencyRecord],
) -> Result<String, CliError> {
    if surface.space.n() != 1 {
        return Err(Error::Unsupported(format!(
            "plotting needs a plane curve; {} lives in R^{}",
            surface.name,
            surface.space.dim()
        ))
        .into());
    }
    let chart = &surface.charts[0];
    let (lo, hi) = (chart.domain.lo[0], chart.domain.hi[0]);
    let curve: Vec<[f64; 2]> = (0..=CURVE_SAMPLES)
        .map(|i| {
            let u = lo + (hi - lo) * i as f64 / CURVE_SAMPLES as f64;
            let q = chart.map.point(&[u]);
            [q[0], q[1]]
        })
        .collect();
    let pc = [p.coords()[0], p.coords()[1]];
    let segments: Vec<([f64; 2], [f64; 2], &TangencyRecord)> = records
        .iter()
        .map(|r| {
            let (qx, qy) = (r.q[0], r.q[1]);
            let (dx, dy) = (qx - pc[0], qy - pc[1]);
            ([pc[0] - 0.2 * dx, pc[1] - 0.2 * dy], [qx + 0.3 * dx, qy + 0.3 * dy], r)
        })
        .collect();

    let mut xs: Vec<f64> = curve.iter().map(|q| q[0]).collect();
    let mut ys: Vec<f64> = curve.iter().map(|q| q[1]).collect();
    xs.push(pc[0]);
    ys.push(pc[1]);
    for (a, b, _) in &segments {
        xs.extend([a[0], b[0]]);
        ys.extend([a[1], b[1]]);
    }
    let (x0, x1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (y0, y1) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let size = (x1 - x0).max(y1 - y0).max(1e-9);
    let margin = 0.1 * size;
    let stroke = 0.004 * size;
    // Flip y so the picture has the usual orientation.
    let view = [x0 - margin, -y1 - margin, x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin];
    let px = 800.0;
    let py = px * view[3] / view[2];

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(px),
        num(py),
        num(view[0]),
        num(view[1]),
        num(view[2]),
        num(view[3])
    );
    let _ = writeln!(svg, "<title>{}</title>", surface.name);
    let points = curve
        .iter()
        .map(|q| format!("{},{}", num(q[0]), num(-q[1])))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(
        svg,
        r#"<polyline class="curve" fill="none" stroke="black" stroke-width="{}" points="{points}"/>"#,
        num(stroke)
    );

    // Arrowhead along the oriented tangent at the start of the parametrization.
    let jet = chart.map.jet(&[lo + 0.05 * (hi - lo)]);
    let t = jet.first.column(0).normalize();
    let (tx, ty) = (t[0], t[1]);
    let (ax, ay) = (jet.point[0], jet.point[1]);
    let len = 0.04 * size;
    let tip = [ax + tx * len, ay + ty * len];
    let left = [ax - ty * 0.5 * len, ay + tx * 0.5 * len];
    let right = [ax + ty * 0.5 * len, ay - tx * 0.5 * len];
    let _ = writeln!(
        svg,
        r#"<polygon class="orientation" fill="black" points="{},{} {},{} {},{}"/>"#,
        num(tip[0]),
        num(-tip[1]),
        num(left[0]),
        num(-left[1]),
        num(right[0]),
        num(-right[1])
    );

    for (a, b, r) in &segments {
        let colour = if r.epsilon > 0 { "#1f5fbf" } else { "#c0392b" };
        let sign = if r.epsilon > 0 { "+1" } else { "-1" };
        let _ = writeln!(
            svg,
            r#"<line class="tangent" data-sign="{sign}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{colour}" stroke-width="{}"/>"#,
            num(a[0]),
            num(-a[1]),
            num(b[0]),
            num(-b[1]),
            num(stroke)
        );
        let _ = writeln!(
            svg,
            r#"<circle class="tangency" cx="{}" cy="{}" r="{}" fill="{colour}"/>"#,
            num(r.q[0]),
            num(-r.q[1]),
            num(2.0 * stroke)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="{}" fill="{colour}">{sign}</text>"#,
            num(r.q[0] + 3.0 * stroke),
            num(-r.q[1] - 3.0 * stroke),
            num(0.04 * size)
        );
    }
    let _ = writeln!(
        svg,
        r#"<circle class="base-point" cx="{}" cy="{}" r="{}" fill="black"/>"#,
        num(pc[0]),
        num(-pc[1]),
        num(2.5 * stroke)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
