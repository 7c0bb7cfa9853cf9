use std::f64::consts::PI;
use std::sync::Arc;

use crate::ambient::{AmbientSpace, Vector};
use crate::error::{Error, Result};

use super::charts::{
    ChartMap, EllipseChart, FiberPatch, FigureEightChart, StereoChart, TubeChart, TUBE_BAND,
};
use super::{Domain, ImmersedHypersurface};

/// Raw scenario parameters as they appear in a run configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioParams {
    pub radius: Option<f64>,
    pub semi_axes: Option<Vec<f64>>,
    pub center: Option<Vec<f64>>,
    pub major_radius: Option<f64>,
    pub minor_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Circle { radius: f64, center: [f64; 2] },
    Ellipse { semi_axes: [f64; 2], center: [f64; 2] },
    FigureEight { scale: f64, center: [f64; 2] },
    Sphere3 { radius: f64, center: [f64; 4] },
    Ellipsoid3 { semi_axes: [f64; 4], center: [f64; 4] },
    Tube { major: f64, minor: f64, center: [f64; 4] },
}

pub const SCENARIO_NAMES: [&str; 6] = [
    "circle",
    "ellipse",
    "figure_eight",
    "sphere3",
    "ellipsoid3",
    "tube_s1xs2",
];

fn fixed<const K: usize>(v: &Option<Vec<f64>>, what: &str, default: [f64; K]) -> Result<[f64; K]> {
    match v {
        None => Ok(default),
        Some(v) => v.as_slice().try_into().map_err(|_| {
            Error::InvalidParams(format!("{what} needs {K} values, got {}", v.len()))
        }),
    }
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidParams(format!("{what} must be positive, got {x}")))
    }
}

impl Scenario {
    pub fn from_params(name: &str, params: &ScenarioParams) -> Result<Self> {
        let radius = params.radius.unwrap_or(1.0);
        let s = match name {
            "circle" => Scenario::Circle {
                radius: positive(radius, "radius")?,
                center: fixed(&params.center, "center", [0.0; 2])?,
            },
            "ellipse" => {
                let axes = fixed(&params.semi_axes, "semi_axes", [1.5, 1.0])?;
                for a in axes {
                    positive(a, "semi-axis")?;
                }
                Scenario::Ellipse {
                    semi_axes: axes,
                    center: fixed(&params.center, "center", [0.0; 2])?,
                }
            }
            "figure_eight" => Scenario::FigureEight {
                scale: positive(radius, "radius")?,
                center: fixed(&params.center, "center", [0.0; 2])?,
            },
            "sphere3" => Scenario::Sphere3 {
                radius: positive(radius, "radius")?,
                center: fixed(&params.center, "center", [0.0; 4])?,
            },
            "ellipsoid3" => {
                let axes = fixed(&params.semi_axes, "semi_axes", [1.0, 1.2, 0.8, 1.5])?;
                for a in axes {
                    positive(a, "semi-axis")?;
                }
                Scenario::Ellipsoid3 {
                    semi_axes: axes,
                    center: fixed(&params.center, "center", [0.0; 4])?,
                }
            }
            "tube_s1xs2" => {
                let major = positive(params.major_radius.unwrap_or(2.0), "major_radius")?;
                let minor = positive(params.minor_radius.unwrap_or(0.5), "minor_radius")?;
                if minor >= major {
                    return Err(Error::InvalidParams(format!(
                        "tube radius {minor} must be smaller than major radius {major}"
                    )));
                }
                Scenario::Tube {
                    major,
                    minor,
                    center: fixed(&params.center, "center", [0.0; 4])?,
                }
            }
            other => {
                return Err(Error::InvalidParams(format!(
                    "unknown scenario '{other}' (expected one of {})",
                    SCENARIO_NAMES.join(", ")
                )))
            }
        };
        Ok(s)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Circle { .. } => "circle",
            Scenario::Ellipse { .. } => "ellipse",
            Scenario::FigureEight { .. } => "figure_eight",
            Scenario::Sphere3 { .. } => "sphere3",
            Scenario::Ellipsoid3 { .. } => "ellipsoid3",
            Scenario::Tube { .. } => "tube_s1xs2",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Scenario::Circle { .. } | Scenario::Ellipse { .. } | Scenario::FigureEight { .. } => 1,
            _ => 2,
        }
    }

    pub fn build(&self) -> Result<ImmersedHypersurface> {
        let space = AmbientSpace::new(self.n())?;
        let loop_domain = || Domain::new(vec![0.0], vec![2.0 * PI], vec![true]);
        match *self {
            Scenario::Circle { radius, center } => ellipse(space, self.name(), [radius; 2], center),
            Scenario::Ellipse { semi_axes, center } => {
                ellipse(space, self.name(), semi_axes, center)
            }
            Scenario::FigureEight { scale, center } => {
                let chart: Arc<dyn ChartMap> = Arc::new(FigureEightChart { center, scale });
                // Orientation as parametrized; the curve is not convex.
                ImmersedHypersurface::assemble(
                    space,
                    self.name(),
                    vec![(loop_domain(), chart)],
                    false,
                    |_, _, _| Vector::from_vec(vec![1.0, 0.0]),
                )
            }
            Scenario::Sphere3 { radius, center } => {
                ellipsoid(space, self.name(), [radius; 4], center)
            }
            Scenario::Ellipsoid3 { semi_axes, center } => {
                ellipsoid(space, self.name(), semi_axes, center)
            }
            Scenario::Tube {
                major,
                minor,
                center,
            } => tube(space, major, minor, center),
        }
    }
}

/// Builds a named scenario from raw parameters.
pub fn make_scenario(name: &str, params: &ScenarioParams) -> Result<ImmersedHypersurface> {
    Scenario::from_params(name, params)?.build()
}

fn ellipse(
    space: AmbientSpace,
    name: &str,
    semi_axes: [f64; 2],
    center: [f64; 2],
) -> Result<ImmersedHypersurface> {
    let chart: Arc<dyn ChartMap> = Arc::new(EllipseChart { center, semi_axes });
    let domain = Domain::new(vec![0.0], vec![2.0 * PI], vec![true]);
    let c = Vector::from_vec(center.to_vec());
    ImmersedHypersurface::assemble(space, name, vec![(domain, chart)], true, |q, _, _| q - &c)
}

/// Half-width of the stereographic chart boxes.
const STEREO_BOX: f64 = 1.15;

fn ellipsoid(
    space: AmbientSpace,
    name: &str,
    semi_axes: [f64; 4],
    center: [f64; 4],
) -> Result<ImmersedHypersurface> {
    let domain = || Domain::new(vec![-STEREO_BOX; 3], vec![STEREO_BOX; 3], vec![false; 3]);
    let charts: Vec<(Domain, Arc<dyn ChartMap>)> = [-1.0, 1.0]
        .into_iter()
        .map(|pole| {
            let map: Arc<dyn ChartMap> = Arc::new(StereoChart {
                center,
                semi_axes,
                pole,
            });
            (domain(), map)
        })
        .collect();
    let c = Vector::from_vec(center.to_vec());
    ImmersedHypersurface::assemble(space, name, charts, true, |q, _, _| q - &c)
}

fn tube(space: AmbientSpace, major: f64, minor: f64, center: [f64; 4]) -> Result<ImmersedHypersurface> {
    let two_pi = 2.0 * PI;
    let (band_lo, _) = TUBE_BAND;
    let cap = (TUBE_BAND.1 / 2.0).tan() * 1.15;
    let mut charts: Vec<(Domain, Arc<dyn ChartMap>)> = Vec::new();
    let angles = Domain::new(
        vec![0.0, band_lo, 0.0],
        vec![two_pi, PI - band_lo, two_pi],
        vec![true, false, true],
    );
    for (patch, domain) in [
        (FiberPatch::Angles, angles),
        (
            FiberPatch::CapPlus,
            Domain::new(vec![0.0, -cap, -cap], vec![two_pi, cap, cap], vec![true, false, false]),
        ),
        (
            FiberPatch::CapMinus,
            Domain::new(vec![0.0, -cap, -cap], vec![two_pi, cap, cap], vec![true, false, false]),
        ),
    ] {
        let map: Arc<dyn ChartMap> = Arc::new(TubeChart {
            center,
            major,
            minor,
            patch,
        });
        charts.push((domain, map));
    }
    let c = center;
    ImmersedHypersurface::assemble(space, "tube_s1xs2", charts, true, move |q, u, _| {
        // outward = away from the core circle
        let (s, co) = u[0].sin_cos();
        let core = Vector::from_vec(vec![c[0] + major * co, c[1] + major * s, c[2], c[3]]);
        q - core
    })
}
