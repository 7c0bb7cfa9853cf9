//! Run configuration: `key = value` lines, `#` comments, unknown keys rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use isoline::degree::{DegreeConfig, DegreeMethod, MethodSelection};
use isoline::lines::LineSearchConfig;
use isoline::{make_scenario, BasePoint, ImmersedHypersurface, ScenarioParams};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Records,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub params: ScenarioParams,
    pub p: Vec<f64>,
    pub method: MethodSelection,
    pub seeds_per_axis: Option<usize>,
    pub grid: Option<usize>,
    pub tol_newton: Option<f64>,
    pub tol_gp: Option<f64>,
    pub plot: Option<PathBuf>,
    pub format: OutputFormat,
}

const KEYS: [&str; 14] = [
    "scenario",
    "radius",
    "semi_axes",
    "center",
    "major_radius",
    "minor_radius",
    "p",
    "method",
    "seeds_per_axis",
    "grid",
    "tol_newton",
    "tol_gp",
    "plot",
    "format",
];

fn bad(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config(format!("line {line}: {}", msg.into()))
}

fn scalar<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| bad(line, format!("cannot parse {key} = {value:?}")))
}

fn reals(line: usize, key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split_whitespace()
        .map(|t| scalar::<f64>(line, key, t))
        .collect()
}

pub fn parse_method(value: &str) -> Option<MethodSelection> {
    Some(match value {
        "preimage" => MethodSelection::Single(DegreeMethod::Preimage),
        "quadrature" => MethodSelection::Single(DegreeMethod::Quadrature),
        "morse" => MethodSelection::Single(DegreeMethod::Morse),
        "all" => MethodSelection::All,
        _ => return None,
    })
}

pub fn method_name(method: MethodSelection) -> String {
    match method {
        MethodSelection::Single(m) => m.to_string(),
        MethodSelection::All => "all".into(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut scenario = None;
        let mut params = ScenarioParams::default();
        let mut p = None;
        let mut method = MethodSelection::All;
        let mut seeds_per_axis = None;
        let mut grid = None;
        let mut tol_newton = None;
        let mut tol_gp = None;
        let mut plot = None;
        let mut format = OutputFormat::Table;
        let mut seen: Vec<&str> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| bad(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(bad(line, format!("unknown key {key:?}")));
            };
            if seen.contains(&known) {
                return Err(bad(line, format!("duplicate key {key:?}")));
            }
            seen.push(known);
            match known {
                "scenario" => scenario = Some(value.to_string()),
                "radius" => params.radius = Some(scalar(line, key, value)?),
                "semi_axes" => params.semi_axes = Some(reals(line, key, value)?),
                "center" => params.center = Some(reals(line, key, value)?),
                "major_radius" => params.major_radius = Some(scalar(line, key, value)?),
                "minor_radius" => params.minor_radius = Some(scalar(line, key, value)?),
                "p" => p = Some(reals(line, key, value)?),
                "method" => {
                    method = parse_method(value).ok_or_else(|| {
                        bad(line, format!("method must be preimage, quadrature, morse or all, got {value:?}"))
                    })?
                }
                "seeds_per_axis" => seeds_per_axis = Some(scalar(line, key, value)?),
                "grid" => grid = Some(scalar(line, key, value)?),
                "tol_newton" => tol_newton = Some(scalar(line, key, value)?),
                "tol_gp" => tol_gp = Some(scalar(line, key, value)?),
                "plot" => plot = Some(PathBuf::from(value)),
                "format" => {
                    format = match value {
                        "table" => OutputFormat::Table,
                        "records" => OutputFormat::Records,
                        _ => return Err(bad(line, format!("format must be table or records, got {value:?}"))),
                    }
                }
                _ => unreachable!(),
            }
        }

        let config = Self {
            scenario: scenario.ok_or_else(|| CliError::Config("missing key \"scenario\"".into()))?,
            params,
            p: p.ok_or_else(|| CliError::Config("missing key \"p\"".into()))?,
            method,
            seeds_per_axis,
            grid,
            tol_newton,
            tol_gp,
            plot,
            format,
        };
        if config.seeds_per_axis == Some(0) || config.grid == Some(0) {
            return Err(CliError::Config("seeds_per_axis and grid must be positive".into()));
        }
        for (name, tol) in [("tol_newton", config.tol_newton), ("tol_gp", config.tol_gp)] {
            if tol.is_some_and(|t| !(t > 0.0)) {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn surface(&self) -> Result<ImmersedHypersurface, CliError> {
        Ok(make_scenario(&self.scenario, &self.params)?)
    }

    pub fn base_point(&self, surface: &ImmersedHypersurface) -> Result<BasePoint, CliError> {
        Ok(BasePoint::from_slice(surface, &self.p)?)
    }

    pub fn line_config(&self, surface: &ImmersedHypersurface) -> LineSearchConfig {
        let mut c = LineSearchConfig::for_space(surface.space);
        if let Some(k) = self.seeds_per_axis {
            c.seeds_per_axis = k;
        }
        if let Some(t) = self.tol_newton {
            c.tol_newton = t;
        }
        if let Some(t) = self.tol_gp {
            c.tol_gp = t;
        }
        c
    }

    pub fn degree_config(&self, surface: &ImmersedHypersurface) -> DegreeConfig {
        let mut c = DegreeConfig::for_surface(surface);
        if let Some(k) = self.seeds_per_axis {
            c.seeds_per_axis = k;
        }
        if let Some(t) = self.tol_newton {
            c.tol_newton = t;
        }
        if let Some(g) = self.grid {
            c.grid = g;
        }
        c
    }
}
