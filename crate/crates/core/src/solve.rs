//! Seeded Newton iteration for square (2n−1)-dimensional systems on the atlas,
//! with deduplication of reconverged roots.

use crate::ambient::{Matrix, Vector};
use crate::contact::{local_geometry, LocalGeometry};
use crate::error::Result;
use crate::surface::{ImmersedHypersurface, SourcePoint};

#[derive(Debug, Clone, Copy)]
pub struct NewtonSettings {
    pub seeds_per_axis: usize,
    pub max_iters: usize,
    /// Acceptance threshold on |F|.
    pub tol: f64,
}

/// One evaluation of a square system: residual and Jacobian w.r.t. raw chart
/// coordinates. |F| must not depend on any frame choice made inside.
pub struct Evaluation {
    pub residual: Vector,
    pub jacobian: Matrix,
}

/// A converged root before deduplication.
#[derive(Debug, Clone)]
pub struct Root {
    pub source: SourcePoint,
    pub residual: f64,
    pub geometry: LocalGeometry,
}

/// Largest Newton step as a fraction of the chart width along each axis.
const MAX_STEP_FRACTION: f64 = 0.25;

/// Evaluates F on the seed grid of every chart and runs Newton from each node
/// where |F| is a discrete local minimum over its 3^m − 1 neighbours, and from
/// the best corner of every grid cell over which each component of F changes
/// sign. The second rule keeps nearby root pairs apart.
///
/// When `focus` lies within one seed spacing of Σ, systems built from the
/// direction to it turn quickly near its foot points, so nested local grids
/// around them are searched the same way.
///
/// Converged roots come back in seed order (chart-major, lexicographic, then
/// focus grids).
pub fn seeded_roots<F>(
    surface: &ImmersedHypersurface,
    settings: &NewtonSettings,
    focus: Option<&Vector>,
    system: F,
) -> Result<Vec<Root>>
where
    F: Fn(&LocalGeometry) -> Evaluation,
{
    let k = settings.seeds_per_axis;
    let mut grids: Vec<(usize, Vec<Option<Vec<f64>>>, usize, Vec<bool>)> = surface
        .charts
        .iter()
        .map(|c| {
            let nodes = c.domain.grid(k).into_iter().map(Some).collect();
            (c.id, nodes, k, c.domain.periodic.clone())
        })
        .collect();
    let mut settings = *settings;
    if let Some(p) = focus {
        let feet = surface.foot_points(p)?;
        grids.extend(focus_grids(surface, k, &feet));
        settings.tol = focus_tolerance(surface, settings.tol, &feet);
    }
    let settings = &settings;
    let mut roots = Vec::new();
    for (chart, nodes, per_axis, periodic) in grids {
        for start in grid_starts(surface, chart, &nodes, per_axis, &periodic, &system) {
            if let Some(root) = newton(surface, chart, start, settings, &system) {
                roots.push(root);
            }
        }
    }
    Ok(roots)
}

/// Seeds of one row-major grid; `None` nodes lie outside the chart.
fn grid_starts<F>(
    surface: &ImmersedHypersurface,
    chart: usize,
    nodes: &[Option<Vec<f64>>],
    k: usize,
    periodic: &[bool],
    system: &F,
) -> Vec<Vec<f64>>
where
    F: Fn(&LocalGeometry) -> Evaluation,
{
    let residuals: Vec<Option<Vector>> = nodes
        .iter()
        .map(|u| {
            u.as_ref()
                .and_then(|u| evaluate(surface, chart, u, system))
                .map(|(_, e)| e.residual)
        })
        .collect();
    let merits: Vec<f64> = residuals
        .iter()
        .map(|r| r.as_ref().map_or(f64::INFINITY, |r| r.norm()))
        .collect();
    let mut starts = local_minima(&merits, k, periodic);
    starts.extend(bracketing_cells(&residuals, &merits, k, periodic));
    starts.sort_unstable();
    starts.dedup();
    starts.into_iter().filter_map(|i| nodes[i].clone()).collect()
}

/// Points per axis of a focus grid.
const FOCUS_NODES: usize = 9;

/// Nested FOCUS_NODES^m grids around every foot point of `p` within twice the
/// distance d to Σ, with ambient half-widths d, 2d, 4d, … up to the global
/// seed spacing. Empty when p is farther than that spacing.
fn focus_grids(
    surface: &ImmersedHypersurface,
    k: usize,
    feet: &[(f64, SourcePoint)],
) -> Vec<(usize, Vec<Option<Vec<f64>>>, usize, Vec<bool>)> {
    let spacing = std::f64::consts::PI * surface.diameter / k as f64;
    let Some(&(d_min, _)) = feet.first() else {
        return Vec::new();
    };
    if !(d_min < spacing) || d_min <= 0.0 {
        return Vec::new();
    }
    let m = surface.dim();
    let half = (FOCUS_NODES / 2) as f64;
    let mut out = Vec::new();
    for (_, foot) in feet.iter().filter(|(d, _)| *d <= 2.0 * d_min) {
        let chart = &surface.charts[foot.chart];
        let jet = chart.map.jet(&foot.u);
        let speeds: Vec<f64> = (0..m).map(|i| jet.first.column(i).norm()).collect();
        if speeds.iter().any(|&c| !(c > 0.0)) {
            continue;
        }
        let mut radius = d_min;
        loop {
            let axes: Vec<Vec<f64>> = (0..m)
                .map(|i| {
                    (0..FOCUS_NODES)
                        .map(|t| foot.u[i] + (t as f64 - half) / half * radius / speeds[i])
                        .collect()
                })
                .collect();
            let nodes = (0..FOCUS_NODES.pow(m as u32))
                .map(|mut flat| {
                    let mut u = vec![0.0; m];
                    for a in (0..m).rev() {
                        u[a] = axes[a][flat % FOCUS_NODES];
                        flat /= FOCUS_NODES;
                    }
                    chart.domain.wrap(&mut u).then_some(u)
                })
                .collect();
            out.push((foot.chart, nodes, FOCUS_NODES, vec![false; m]));
            if radius >= spacing {
                break;
            }
            radius *= 2.0;
        }
    }
    out
}

/// Directions to a point at distance d from Σ carry rounding error of order
/// diameter/d ulps, so residual tolerances scale by max(1, diameter/d).
fn focus_tolerance(surface: &ImmersedHypersurface, tol: f64, feet: &[(f64, SourcePoint)]) -> f64 {
    match feet.first() {
        Some(&(d, _)) if d > 0.0 => tol * (surface.diameter / d).max(1.0),
        _ => tol,
    }
}

/// Residual tolerance for systems built from the direction to `p`.
pub fn residual_tolerance(surface: &ImmersedHypersurface, tol: f64, p: &Vector) -> Result<f64> {
    Ok(focus_tolerance(surface, tol, &surface.foot_points(p)?))
}

/// Indices of a row-major k^m grid whose value is finite and no larger than
/// any neighbour's.
fn local_minima(values: &[f64], k: usize, periodic: &[bool]) -> Vec<usize> {
    let m = periodic.len();
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(m as u32))
        .map(|mut c| {
            (0..m)
                .map(|_| {
                    let d = (c % 3) as i64 - 1;
                    c /= 3;
                    d
                })
                .collect()
        })
        .filter(|o: &Vec<i64>| o.iter().any(|&d| d != 0))
        .collect();
    let k_i = k as i64;
    let mut out = Vec::new();
    'node: for (idx, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            continue;
        }
        let mut multi = vec![0i64; m];
        let mut rest = idx;
        for a in (0..m).rev() {
            multi[a] = (rest % k) as i64;
            rest /= k;
        }
        for off in &offsets {
            let mut neighbour = 0usize;
            let mut valid = true;
            for a in 0..m {
                let mut j = multi[a] + off[a];
                if periodic[a] {
                    j = j.rem_euclid(k_i);
                } else if j < 0 || j >= k_i {
                    valid = false;
                    break;
                }
                neighbour = neighbour * k + j as usize;
            }
            if valid && neighbour != idx && values[neighbour] < value {
                continue 'node;
            }
        }
        out.push(idx);
    }
    out
}

/// For every grid cell whose corners are all finite and over which each
/// residual component takes both signs, the corner with smallest |F|.
fn bracketing_cells(
    residuals: &[Option<Vector>],
    merits: &[f64],
    k: usize,
    periodic: &[bool],
) -> Vec<usize> {
    let m = periodic.len();
    let cells_per_axis: Vec<usize> = periodic.iter().map(|&p| if p { k } else { k - 1 }).collect();
    let total: usize = cells_per_axis.iter().product();
    let mut out = Vec::new();
    let mut corners = Vec::with_capacity(1 << m);
    'cell: for cell in 0..total {
        let mut lower = vec![0usize; m];
        let mut rest = cell;
        for a in (0..m).rev() {
            lower[a] = rest % cells_per_axis[a];
            rest /= cells_per_axis[a];
        }
        corners.clear();
        for bits in 0..1usize << m {
            let mut flat = 0usize;
            for a in 0..m {
                let j = (lower[a] + (bits >> a & 1)) % k;
                flat = flat * k + j;
            }
            if residuals[flat].is_none() {
                continue 'cell;
            }
            corners.push(flat);
        }
        let dim = residuals[corners[0]].as_ref().map_or(0, |r| r.len());
        for c in 0..dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &f in &corners {
                let x = residuals[f].as_ref().map_or(0.0, |r| r[c]);
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if lo > 0.0 || hi < 0.0 {
                continue 'cell;
            }
        }
        if let Some(&best) = corners.iter().min_by(|&&a, &&b| merits[a].total_cmp(&merits[b])) {
            out.push(best);
        }
    }
    out
}

fn evaluate<F>(
    surface: &ImmersedHypersurface,
    chart: usize,
    u: &[f64],
    system: &F,
) -> Option<(LocalGeometry, Evaluation)>
where
    F: Fn(&LocalGeometry) -> Evaluation,
{
    let g = local_geometry(surface, &SourcePoint::new(chart, u.to_vec())).ok()?;
    let e = system(&g);
    if e.residual.iter().all(|x| x.is_finite()) {
        Some((g, e))
    } else {
        None
    }
}

fn newton<F>(
    surface: &ImmersedHypersurface,
    chart: usize,
    seed: Vec<f64>,
    settings: &NewtonSettings,
    system: &F,
) -> Option<Root>
where
    F: Fn(&LocalGeometry) -> Evaluation,
{
    let domain = &surface.charts[chart].domain;
    let mut u = seed;
    let (mut geom, mut eval) = evaluate(surface, chart, &u, system)?;
    let mut merit = eval.residual.norm();
    for _ in 0..settings.max_iters {
        if merit < 1e-15 {
            break;
        }
        let mut step = eval.jacobian.clone().lu().solve(&(-&eval.residual))?;
        let mut ratio: f64 = 0.0;
        for (i, s) in step.iter().enumerate() {
            ratio = ratio.max(s.abs() / (MAX_STEP_FRACTION * domain.width(i)));
        }
        if ratio > 1.0 {
            step /= ratio;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let mut trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
            if domain.wrap(&mut trial) {
                if let Some((g, e)) = evaluate(surface, chart, &trial, system) {
                    let m = e.residual.norm();
                    if m < merit * (1.0 - 1e-4 * t) || m < 1e-15 {
                        accepted = Some((trial, g, e, m));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        // Stalled: converged to rounding level, a non-root local minimum of
        // |F|, or a root beyond a bounded edge of this chart. The tolerance
        // check below tells them apart.
        let Some((trial, g, e, m)) = accepted else {
            break;
        };
        let moved = step.amax() * t;
        u = trial;
        geom = g;
        eval = e;
        merit = m;
        if moved < 1e-15 * (1.0 + u.iter().fold(0.0f64, |a, b| a.max(b.abs()))) {
            break;
        }
    }
    (merit < settings.tol).then(|| Root {
        source: SourcePoint::new(chart, u),
        residual: merit,
        geometry: geom,
    })
}

/// Merges roots that coincide either in chart coordinates (same chart, within
/// `radius`) or as points of S seen from different charts (ambient point within
/// `radius · diameter` and matching normals). The survivor of each group is the
/// one with smallest residual, ties going to the earlier root.
pub fn dedupe(surface: &ImmersedHypersurface, roots: Vec<Root>, radius: f64) -> Vec<Root> {
    let mut kept: Vec<Root> = Vec::new();
    let ambient_radius = radius * surface.diameter;
    'outer: for root in roots {
        for existing in kept.iter_mut() {
            let same = if existing.source.chart == root.source.chart {
                let domain = &surface.charts[root.source.chart].domain;
                domain.distance(&existing.source.u, &root.source.u) < radius
            } else {
                (&existing.geometry.q - &root.geometry.q).norm() < ambient_radius
                    && existing.geometry.normal.dot(&root.geometry.normal) > 1.0 - 1e-8
            };
            if same {
                if root.residual < existing.residual {
                    *existing = root;
                }
                continue 'outer;
            }
        }
        kept.push(root);
    }
    kept
}

/// Total order on source points: chart id, then lexicographic coordinates.
pub fn source_order(a: &SourcePoint, b: &SourcePoint) -> std::cmp::Ordering {
    a.chart.cmp(&b.chart).then_with(|| {
        for (x, y) in a.u.iter().zip(&b.u) {
            let o = x.total_cmp(y);
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Chart derivatives and normal derivative in raw chart coordinates.
pub fn raw_derivatives(g: &LocalGeometry) -> (Matrix, Matrix) {
    let mut d = g.first.clone();
    let mut dn = g.normal_derivative.clone();
    if g.orientation < 0.0 {
        d.column_mut(0).neg_mut();
        dn.column_mut(0).neg_mut();
    }
    (d, dn)
}
