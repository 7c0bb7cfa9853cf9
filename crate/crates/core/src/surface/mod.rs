//! The source manifold S and the immersion ι: S ↬ ℝ²ⁿ as a finite atlas of
//! charts with 2-jets, partition-of-unity weights and quadrature grids.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::ambient::{cofactor_normal, AmbientSpace, Matrix, Vector};
use crate::error::{Error, Result};

pub mod charts;
pub mod jetfile;
pub mod quadrature;
mod scenarios;

pub use charts::ChartMap;
pub use scenarios::{make_scenario, Scenario, ScenarioParams, SCENARIO_NAMES};

/// Point, first derivatives (2n × m) and second derivatives (m² vectors,
/// index `j * m + k`) of a chart at one parameter value.
#[derive(Debug, Clone)]
pub struct Jet {
    pub point: Vector,
    pub first: Matrix,
    pub second: Vec<Vector>,
}

impl Jet {
    pub fn second(&self, j: usize, k: usize) -> &Vector {
        &self.second[j * self.first.ncols() + k]
    }
}

/// Axis-aligned parameter box with per-axis periodicity.
#[derive(Debug, Clone)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, periodic: Vec<bool>) -> Self {
        debug_assert!(lo.len() == hi.len() && hi.len() == periodic.len());
        Self { lo, hi, periodic }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn center(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| 0.5 * (self.lo[i] + self.hi[i]))
            .collect()
    }

    /// Wraps periodic axes in place; returns false if a bounded axis is out of range.
    pub fn wrap(&self, u: &mut [f64]) -> bool {
        let mut inside = true;
        for (i, x) in u.iter_mut().enumerate() {
            if self.periodic[i] {
                *x = self.lo[i] + (*x - self.lo[i]).rem_euclid(self.width(i));
            } else {
                let slack = 1e-12 * self.width(i);
                if *x < self.lo[i] - slack || *x > self.hi[i] + slack {
                    inside = false;
                }
            }
        }
        inside
    }

    /// Max-norm distance in chart units, periodic-aware.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| {
                let mut d = (a[i] - b[i]).abs();
                if self.periodic[i] {
                    d = d.rem_euclid(self.width(i));
                    d = d.min(self.width(i) - d);
                }
                d
            })
            .fold(0.0, f64::max)
    }

    /// Cell-centred grid with `k` points per axis, lexicographic order.
    pub fn grid(&self, k: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dim())
            .map(|i| {
                let h = self.width(i) / k as f64;
                (0..k).map(|j| self.lo[i] + (j as f64 + 0.5) * h).collect()
            })
            .collect();
        tensor(&axes.iter().map(|a| a.iter().map(|&x| (x, 1.0)).collect()).collect::<Vec<_>>())
            .into_iter()
            .map(|(u, _)| u)
            .collect()
    }

    /// Tensor quadrature rule: trapezoid on periodic axes, Gauss–Legendre otherwise.
    pub fn quadrature(&self, k: usize) -> Vec<(Vec<f64>, f64)> {
        let axes: Vec<Vec<(f64, f64)>> = (0..self.dim())
            .map(|i| {
                if self.periodic[i] {
                    quadrature::periodic_trapezoid(k, self.lo[i], self.hi[i])
                } else {
                    quadrature::gauss_legendre(k, self.lo[i], self.hi[i])
                }
            })
            .collect();
        tensor(&axes)
    }
}

fn tensor(axes: &[Vec<(f64, f64)>]) -> Vec<(Vec<f64>, f64)> {
    let mut out: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for (u, w) in &out {
            for &(x, wx) in axis {
                let mut v = u.clone();
                v.push(x);
                next.push((v, w * wx));
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub id: usize,
    pub domain: Domain,
    /// +1 or −1 relative to the orientation of S.
    pub orientation: f64,
    pub map: Arc<dyn ChartMap>,
}

/// A point of S: chart id plus chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SourcePoint {
    pub chart: usize,
    pub u: Vec<f64>,
}

impl SourcePoint {
    pub fn new(chart: usize, u: Vec<f64>) -> Self {
        Self { chart, u }
    }
}

/// One node of the atlas quadrature: `weight` already includes the
/// partition-of-unity factor.
#[derive(Debug, Clone)]
pub struct QuadratureNode {
    pub chart: usize,
    pub u: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct ImmersedHypersurface {
    pub space: AmbientSpace,
    pub name: String,
    pub charts: Vec<Chart>,
    /// False for immersions with self-intersections (plane curves only).
    pub embedded: bool,
    /// Bounding-box diagonal of sampled points.
    pub diameter: f64,
    /// Default quadrature nodes per axis.
    pub grid: usize,
}

impl ImmersedHypersurface {
    /// Assembles a surface, fixing each chart's orientation flag so that the
    /// induced normal agrees with `outward(q)` at the chart centre.
    pub fn assemble(
        space: AmbientSpace,
        name: &str,
        charts: Vec<(Domain, Arc<dyn ChartMap>)>,
        embedded: bool,
        outward: impl Fn(&Vector, &[f64], usize) -> Vector,
    ) -> Result<Self> {
        let mut built = Vec::with_capacity(charts.len());
        for (id, (domain, map)) in charts.into_iter().enumerate() {
            let center = domain.center();
            let jet = map.jet(&center);
            let normal = cofactor_normal(&jet.first);
            let reference = outward(&jet.point, &center, id);
            let orientation = if normal.dot(&reference) >= 0.0 { 1.0 } else { -1.0 };
            built.push(Chart {
                id,
                domain,
                orientation,
                map,
            });
        }
        let grid = if space.n() == 1 { 256 } else { 32 };
        let mut surface = Self {
            space,
            name: name.to_string(),
            charts: built,
            embedded,
            diameter: 0.0,
            grid,
        };
        surface.diameter = surface.sampled_diameter();
        Ok(surface)
    }

    pub fn dim(&self) -> usize {
        self.space.hyper_dim()
    }

    pub fn chart(&self, id: usize) -> Result<&Chart> {
        self.charts.get(id).ok_or(Error::UnknownChart(id))
    }

    /// Wraps `u` into the chart domain, rejecting bounded-axis overflow.
    pub fn normalize(&self, chart: usize, u: &[f64]) -> Result<Vec<f64>> {
        let c = self.chart(chart)?;
        if u.len() != c.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: c.domain.dim(),
                got: u.len(),
            });
        }
        let mut v = u.to_vec();
        if !c.domain.wrap(&mut v) {
            let coord = (0..v.len())
                .find(|&i| !c.domain.periodic[i] && (v[i] < c.domain.lo[i] || v[i] > c.domain.hi[i]))
                .unwrap_or(0);
            return Err(Error::OutsideDomain {
                chart,
                coord,
                value: v[coord],
                lo: c.domain.lo[coord],
                hi: c.domain.hi[coord],
            });
        }
        Ok(v)
    }

    /// The 2-jet at `u`, with ∂_k∂_j ι copied from ∂_j∂_k ι (j < k) so the
    /// second derivatives are symmetric bit for bit.
    pub fn eval_jet(&self, chart: usize, u: &[f64]) -> Result<Jet> {
        let v = self.normalize(chart, u)?;
        let mut jet = self.charts[chart].map.jet(&v);
        let m = jet.first.ncols();
        for j in 0..m {
            for k in j + 1..m {
                jet.second[k * m + j] = jet.second[j * m + k].clone();
            }
        }
        Ok(jet)
    }

    pub fn point(&self, chart: usize, u: &[f64]) -> Result<Vector> {
        let v = self.normalize(chart, u)?;
        Ok(self.charts[chart].map.point(&v))
    }

    pub fn partition_weight(&self, chart: usize, u: &[f64]) -> Result<f64> {
        let v = self.normalize(chart, u)?;
        Ok(self.charts[chart].map.weight(&v))
    }

    /// Quadrature nodes of every chart with `k` nodes per axis, chart-major and
    /// lexicographic; zero-weight nodes are dropped.
    pub fn quadrature(&self, k: usize) -> Vec<QuadratureNode> {
        let mut out = Vec::new();
        for chart in &self.charts {
            for (u, w) in chart.domain.quadrature(k) {
                let pou = chart.map.weight(&u);
                if pou > 0.0 {
                    out.push(QuadratureNode {
                        chart: chart.id,
                        u,
                        weight: w * pou,
                    });
                }
            }
        }
        out
    }

    /// Cell-centred sample points of every chart.
    pub fn samples(&self, k: usize) -> Vec<SourcePoint> {
        self.charts
            .iter()
            .flat_map(|c| c.domain.grid(k).into_iter().map(move |u| SourcePoint::new(c.id, u)))
            .collect()
    }

    fn sample_resolution(&self) -> usize {
        if self.dim() == 1 {
            256
        } else {
            16
        }
    }

    fn sampled_diameter(&self) -> f64 {
        let d = self.space.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for s in self.samples(self.sample_resolution()) {
            let q = self.charts[s.chart].map.point(&s.u);
            for i in 0..d {
                lo[i] = lo[i].min(q[i]);
                hi[i] = hi[i].max(q[i]);
            }
        }
        lo.iter()
            .zip(&hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from `p` to Σ: coarse sampling followed by Gauss–Newton
    /// foot-point refinement from the closest samples.
    pub fn distance_to(&self, p: &Vector) -> Result<f64> {
        Ok(self
            .foot_points(p)?
            .iter()
            .map(|(d, _)| *d)
            .fold(f64::INFINITY, f64::min))
    }

    /// Locally closest points of Σ to `p` with their distances, closest first:
    /// Gauss–Newton from the eight closest samples, merged per chart within
    /// 1e-9 of each other.
    pub fn foot_points(&self, p: &Vector) -> Result<Vec<(f64, SourcePoint)>> {
        self.space.check(p)?;
        let mut scored: Vec<(f64, SourcePoint)> = self
            .samples(self.sample_resolution())
            .into_iter()
            .map(|s| {
                let q = self.charts[s.chart].map.point(&s.u);
                ((q - p).norm(), s)
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut feet: Vec<(f64, SourcePoint)> = Vec::new();
        for (d0, s) in scored.iter().take(8) {
            let (d, u) = self.refine_foot(s.chart, s.u.clone(), p);
            let (d, u) = if d <= *d0 { (d, u) } else { (*d0, s.u.clone()) };
            let domain = &self.charts[s.chart].domain;
            let duplicate = feet
                .iter()
                .any(|(_, f)| f.chart == s.chart && domain.distance(&f.u, &u) < 1e-9);
            if !duplicate {
                feet.push((d, SourcePoint::new(s.chart, u)));
            }
        }
        feet.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(feet)
    }

    fn refine_foot(&self, chart: usize, mut u: Vec<f64>, p: &Vector) -> (f64, Vec<f64>) {
        let chart = &self.charts[chart];
        let mut best = ((chart.map.point(&u) - p).norm(), u.clone());
        for _ in 0..40 {
            let jet = chart.map.jet(&u);
            let r = &jet.point - p;
            if r.norm() < best.0 {
                best = (r.norm(), u.clone());
            }
            let g = jet.first.transpose() * &jet.first;
            let rhs = jet.first.transpose() * &r;
            let Some(step) = g.lu().solve(&rhs) else { break };
            for (x, dx) in u.iter_mut().zip(step.iter()) {
                *x -= dx;
            }
            if !chart.domain.wrap(&mut u) {
                break;
            }
            if step.amax() < 1e-15 {
                let d = (chart.map.point(&u) - p).norm();
                if d < best.0 {
                    best = (d, u);
                }
                break;
            }
        }
        best
    }

    pub fn offsurface_tolerance(&self) -> f64 {
        1e-6 * self.diameter
    }

    /// Max deviation of Σ weights from 1 over sample points of every chart.
    /// Single-chart atlases must carry weight 1 everywhere.
    pub fn partition_residual(&self, k: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for s in self.samples(k) {
            let chart = &self.charts[s.chart];
            if chart.map.weight(&s.u) == 0.0 && self.charts.len() > 1 {
                continue;
            }
            let q = chart.map.point(&s.u);
            let mut total = 0.0;
            for other in &self.charts {
                if other.id == s.chart {
                    total += chart.map.weight(&s.u);
                    continue;
                }
                if let Some(mut v) = other.map.locate(&q) {
                    if other.domain.wrap(&mut v) {
                        total += other.map.weight(&v);
                    }
                }
            }
            worst = worst.max((total - 1.0).abs());
        }
        worst
    }

    /// Smallest ⟨N_a, N_b⟩ over sampled points shared by two charts; positive
    /// means the chart orientations are compatible.
    pub fn orientation_agreement(&self, k: usize) -> f64 {
        let mut worst: f64 = 1.0;
        for s in self.samples(k) {
            let chart = &self.charts[s.chart];
            let jet = chart.map.jet(&s.u);
            let na = oriented_normal(&jet.first, chart.orientation);
            for other in &self.charts {
                if other.id == s.chart {
                    continue;
                }
                if let Some(mut v) = other.map.locate(&jet.point) {
                    if other.domain.wrap(&mut v) {
                        let nb = oriented_normal(&other.map.jet(&v).first, other.orientation);
                        worst = worst.min(na.dot(&nb));
                    }
                }
            }
        }
        worst
    }

    /// Copy of the surface under x ↦ center + factor·(x − center).
    pub fn scaled_about(&self, center: &Vector, factor: f64) -> Result<Self> {
        self.space.check(center)?;
        if factor <= 0.0 {
            return Err(Error::InvalidParams("scale factor must be positive".into()));
        }
        let charts = self
            .charts
            .iter()
            .map(|c| Chart {
                id: c.id,
                domain: c.domain.clone(),
                orientation: c.orientation,
                map: Arc::new(charts::ScaledChart {
                    inner: c.map.clone(),
                    center: center.clone(),
                    factor,
                }) as Arc<dyn ChartMap>,
            })
            .collect();
        Ok(Self {
            space: self.space,
            name: self.name.clone(),
            charts,
            embedded: self.embedded,
            diameter: self.diameter * factor,
            grid: self.grid,
        })
    }
}

/// Unit normal with det[N | D·diag(orientation, 1, …)] > 0.
pub fn oriented_normal(first: &Matrix, orientation: f64) -> Vector {
    let mut n = cofactor_normal(first) * orientation;
    let norm = n.norm();
    if norm > 0.0 {
        n /= norm;
    }
    n
}

/// A base point p validated to lie off the hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePoint {
    coords: Vector,
}

impl BasePoint {
    pub fn new(surface: &ImmersedHypersurface, coords: Vector) -> Result<Self> {
        let distance = surface.distance_to(&coords)?;
        let tolerance = surface.offsurface_tolerance();
        if distance <= tolerance {
            return Err(Error::OffSurface {
                distance,
                tolerance,
            });
        }
        Ok(Self { coords })
    }

    pub fn from_slice(surface: &ImmersedHypersurface, coords: &[f64]) -> Result<Self> {
        Self::new(surface, Vector::from_column_slice(coords))
    }

    /// Skips the off-surface check; used for points that are already validated.
    pub fn unchecked(coords: Vector) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }
}

/// Volume of the unit sphere S^{2n−1}: 2πⁿ/(n−1)!.
pub fn sphere_volume(n: usize) -> f64 {
    let mut fact = 1.0;
    for k in 1..n {
        fact *= k as f64;
    }
    2.0 * PI.powi(n as i32) / fact
}
