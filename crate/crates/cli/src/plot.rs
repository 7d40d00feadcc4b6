//! SVG emission: convergence curves and route maps.

use std::fmt::Write as _;

use mvrp_core::instance::Instance;
use mvrp_core::trace::Trace;

use crate::report::SolveReport;
use crate::CliError;

const CONV_W: f64 = 800.0;
const CONV_H: f64 = 600.0;
const CONV_MARGIN: f64 = 60.0;

const MAP_SIZE: f64 = 800.0;
const MAP_MARGIN: f64 = 10.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Best length per generation as a monotone non-increasing polyline.
pub fn convergence_svg(trace: &Trace, title: &str) -> Result<String, CliError> {
    if trace.is_empty() {
        return Err(CliError::Runtime(anyhow::anyhow!("trace has no records")));
    }
    let records = trace.records();
    let gmax = records.last().expect("non-empty").generation.max(1) as f64;
    let bests = trace.best_lengths();
    let vmax = bests.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let vmin = bests.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let span = if vmax > vmin { vmax - vmin } else { 1.0 };

    let x = |g: usize| CONV_MARGIN + g as f64 / gmax * (CONV_W - 2.0 * CONV_MARGIN);
    let y = |v: f64| CONV_MARGIN + (vmax - v) / span * (CONV_H - 2.0 * CONV_MARGIN);

    let mut points = String::new();
    for r in records {
        let _ = write!(points, "{:.2},{:.2} ", x(r.generation), y(r.best_length));
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CONV_W}" height="{CONV_H}" viewBox="0 0 {CONV_W} {CONV_H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{CONV_W}" height="{CONV_H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.0}" y="30" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        CONV_W / 2.0
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{b}" stroke="black"/><line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
        m = CONV_MARGIN,
        b = CONV_H - CONV_MARGIN,
        r = CONV_W - CONV_MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.0}" y="{:.0}" font-family="sans-serif" font-size="12" text-anchor="middle">generation</text>"#,
        CONV_W / 2.0,
        CONV_H - CONV_MARGIN / 3.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="12" y="{:.0}" font-family="sans-serif" font-size="12">{vmax:.3}</text>"#,
        CONV_MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="12" y="{:.0}" font-family="sans-serif" font-size="12">{vmin:.3}</text>"#,
        CONV_H - CONV_MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
        points.trim_end(),
        PALETTE[0]
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// City dots, a depot marker, and one closed loop per vehicle. The y axis
/// is flipped so the plot uses mathematical orientation.
pub fn route_map_svg(inst: &Instance, report: &SolveReport) -> Result<String, CliError> {
    let xs: Vec<f64> = inst.cities().iter().map(|c| c.x).collect();
    let ys: Vec<f64> = inst.cities().iter().map(|c| c.y).collect();
    let min_x = xs.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let max_x = xs.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let min_y = ys.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let max_y = ys.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let scale = (MAP_SIZE - 2.0 * MAP_MARGIN) / span;
    let px = |x: f64| MAP_MARGIN + (x - min_x) * scale;
    let py = |y: f64| MAP_SIZE - MAP_MARGIN - (y - min_y) * scale;

    let coords = |id: u32| -> Result<(f64, f64), CliError> {
        let c = inst
            .city(id)
            .ok_or_else(|| CliError::Runtime(anyhow::anyhow!("report references unknown city {id}")))?;
        Ok((px(c.x), py(c.y)))
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{MAP_SIZE}" height="{MAP_SIZE}" viewBox="0 0 {MAP_SIZE} {MAP_SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{MAP_SIZE}" height="{MAP_SIZE}" fill="white"/>"#);

    let depot = coords(inst.depot_id())?;
    for (v, vehicle) in report.vehicles.iter().enumerate() {
        let mut points = format!("{:.2},{:.2} ", depot.0, depot.1);
        for &id in &vehicle.tour {
            let (x, y) = coords(id)?;
            let _ = write!(points, "{x:.2},{y:.2} ");
        }
        let _ = write!(points, "{:.2},{:.2}", depot.0, depot.1);
        let _ = writeln!(
            svg,
            r#"<polyline class="route" points="{points}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            PALETTE[v % PALETTE.len()]
        );
    }
    for c in inst.cities() {
        if c.id != inst.depot_id() {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#,
                px(c.x),
                py(c.y)
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<circle class="depot" cx="{:.2}" cy="{:.2}" r="6" fill="red" stroke="black"/>"#,
        depot.0, depot.1
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{RunInfo, VehicleReport, SCHEMA_VERSION};
    use mvrp_core::instance::City;
    use mvrp_core::trace::Trace;

    #[test]
    fn convergence_polyline_points_are_non_increasing_in_value() {
        let mut t = Trace::default();
        for (g, v) in [150.0, 140.0, 140.0, 132.0].iter().enumerate() {
            t.push(g, *v, *v + 5.0);
        }
        let svg = convergence_svg(&t, "vehicle 1").unwrap();
        let points = svg
            .split("polyline points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        let ys: Vec<f64> = points
            .split_whitespace()
            .map(|p| p.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(ys.len(), 4);
        // svg y grows downward, so non-increasing lengths are non-decreasing y
        assert!(ys.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn route_map_has_one_loop_per_vehicle_through_the_depot() {
        let inst = Instance::new(
            vec![
                City { id: 1, x: 0.0, y: 0.0 },
                City { id: 2, x: 1.0, y: 0.0 },
                City { id: 3, x: 1.0, y: 1.0 },
                City { id: 4, x: 0.0, y: 1.0 },
            ],
            1,
        )
        .unwrap();
        let report = SolveReport {
            schema_version: SCHEMA_VERSION,
            instance_digest: "sha256:0".into(),
            k: 2,
            algorithm: "ga".into(),
            params: serde_json::json!({}),
            master_seed: 0,
            vehicles: vec![
                VehicleReport { vehicle: 1, cluster: vec![2], tour: vec![2], distance: 2.0, trace: "t1".into() },
                VehicleReport {
                    vehicle: 2,
                    cluster: vec![3, 4],
                    tour: vec![3, 4],
                    distance: 3.4,
                    trace: "t2".into(),
                },
            ],
            total_distance: 5.4,
            run_info: RunInfo { timestamp: "0".into(), clustering_ms: 0.0, solve_ms: 0.0 },
        };
        let svg = route_map_svg(&inst, &report).unwrap();
        let loops: Vec<&str> = svg.lines().filter(|l| l.contains("class=\"route\"")).collect();
        assert_eq!(loops.len(), 2);
        let depot_line = svg.lines().find(|l| l.contains("class=\"depot\"")).unwrap();
        let depot_x = depot_line.split("cx=\"").nth(1).unwrap().split('"').next().unwrap();
        let depot_y = depot_line.split("cy=\"").nth(1).unwrap().split('"').next().unwrap();
        let anchor = format!("{depot_x},{depot_y}");
        for l in loops {
            let pts = l.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
            assert!(pts.starts_with(&anchor));
            assert!(pts.ends_with(&anchor));
        }
    }

    #[test]
    fn empty_trace_is_rejected() {
        assert!(convergence_svg(&Trace::default(), "x").is_err());
    }
}
