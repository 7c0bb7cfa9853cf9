//! The commands behind the binary, as library functions returning data.

use std::fmt::Write as _;

use isoline::degree::{
    block_det_check, corollary_integral, ind, ind_p, DegreeEstimate, DegreeMethod,
    MethodSelection,
};
use isoline::lines::{check_general_position, count_n, find_isotropic_lines, locate_tangencies, TangencyRecord};
use isoline::{BasePoint, Error, ImmersedHypersurface};

use crate::config::RunConfig;
use crate::report::VerificationReport;
use crate::CliError;

pub fn run_lines(config: &RunConfig) -> Result<Vec<TangencyRecord>, CliError> {
    let surface = config.surface()?;
    let p = config.base_point(&surface)?;
    Ok(find_isotropic_lines(&surface, &p, &config.line_config(&surface))?)
}

/// Keeps every estimate even when the methods disagree; the report decides.
fn estimates(result: isoline::Result<isoline::degree::DegreeSummary>) -> Result<Vec<DegreeEstimate>, CliError> {
    match result {
        Ok(summary) => Ok(summary.estimates),
        Err(Error::MethodDisagreement(all)) => Ok(all),
        Err(e) => Err(e.into()),
    }
}

pub fn verify_surface(
    config: &RunConfig,
    surface: &ImmersedHypersurface,
    p: &BasePoint,
) -> Result<VerificationReport, CliError> {
    let line_config = config.line_config(surface);
    let records = locate_tangencies(surface, p, &line_config)?;
    let general_position = check_general_position(surface, p, &records, &line_config);
    if !general_position.pass() {
        return Err(Error::GeneralPosition(Box::new(general_position)).into());
    }
    let degree_config = config.degree_config(surface);
    let ind_estimates = estimates(ind(surface, config.method, &degree_config))?;
    let ind_p_estimates = estimates(ind_p(surface, p, config.method, &degree_config))?;
    let corollary = corollary_integral(surface, p, degree_config.grid)?;
    let block_checks = records
        .iter()
        .map(|r| block_det_check(surface, p, r))
        .collect::<isoline::Result<Vec<_>>>()?;
    Ok(VerificationReport {
        scenario: surface.name.clone(),
        n: surface.space.n(),
        p: p.coords().as_slice().to_vec(),
        method: config.method,
        n_lines: count_n(&records),
        records,
        general_position,
        ind: ind_estimates,
        ind_p: ind_p_estimates,
        corollary,
        block_checks,
    })
}

pub fn run_verify(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let surface = config.surface()?;
    let p = config.base_point(&surface)?;
    verify_surface(config, &surface, &p)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepStatus {
    Valid {
        ind_p: i64,
        n_lines: i64,
        min_abs_det: Option<f64>,
    },
    /// p lies on Σ.
    OnSurface,
    /// General position (or a regular value) fails at this p.
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub step: usize,
    pub p: Vec<f64>,
    pub status: SweepStatus,
}

/// Change between two adjacent valid rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Jump {
    pub from_step: usize,
    pub to_step: usize,
    pub delta_n: i64,
    pub delta_ind_p: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub ind: i64,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    fn valid(&self) -> impl Iterator<Item = (usize, i64, i64)> + '_ {
        self.rows.iter().filter_map(|r| match r.status {
            SweepStatus::Valid { ind_p, n_lines, .. } => Some((r.step, ind_p, n_lines)),
            _ => None,
        })
    }

    /// Every change of 𝒩 between adjacent valid rows.
    pub fn jumps(&self) -> Vec<Jump> {
        let valid: Vec<_> = self.valid().collect();
        valid
            .windows(2)
            .filter(|w| w[0].2 != w[1].2 || w[0].1 != w[1].1)
            .map(|w| Jump {
                from_step: w[0].0,
                to_step: w[1].0,
                delta_n: w[1].2 - w[0].2,
                delta_ind_p: w[1].1 - w[0].1,
            })
            .collect()
    }

    /// Rows where the line count differs from 2·ind − 2·ind_p.
    pub fn theorem_failures(&self) -> Vec<usize> {
        self.valid()
            .filter(|&(_, ip, n)| n != 2 * self.ind - 2 * ip)
            .map(|(step, _, _)| step)
            .collect()
    }

    /// Each jump has |Δ𝒩| = 2 with a unit change of ind_p in the opposite direction.
    pub fn jump_law_holds(&self) -> bool {
        self.jumps()
            .iter()
            .all(|j| j.delta_n.abs() == 2 && j.delta_ind_p.abs() == 1 && j.delta_n == -2 * j.delta_ind_p)
    }

    pub fn table(&self) -> String {
        let mut out = format!("# ind = {}\n# step p ind_p N status\n", self.ind);
        for r in &self.rows {
            let p = r.p.iter().map(|x| format!("{x:>9.5}")).collect::<Vec<_>>().join(" ");
            let _ = match &r.status {
                SweepStatus::Valid { ind_p, n_lines, .. } => {
                    writeln!(out, "{:>3} {p} {ind_p:>3} {n_lines:>3} ok", r.step)
                }
                SweepStatus::OnSurface => writeln!(out, "{:>3} {p}   -   - skipped: on surface", r.step),
                SweepStatus::Skipped(why) => writeln!(out, "{:>3} {p}   -   - skipped: {why}", r.step),
            };
        }
        for j in self.jumps() {
            let _ = writeln!(
                out,
                "# jump between steps {} and {}: N {:+}, ind_p {:+}",
                j.from_step, j.to_step, j.delta_n, j.delta_ind_p
            );
        }
        out
    }
}

/// ind_p and 𝒩 at `steps` equally spaced points from `from` to `to`.
pub fn run_sweep(
    config: &RunConfig,
    from: &[f64],
    to: &[f64],
    steps: usize,
) -> Result<SweepResult, CliError> {
    if steps < 2 {
        return Err(CliError::Config("sweep needs at least 2 steps".into()));
    }
    let surface = config.surface()?;
    // Endpoints must be off Σ.
    BasePoint::from_slice(&surface, from)?;
    BasePoint::from_slice(&surface, to)?;
    let line_config = config.line_config(&surface);
    let degree_config = config.degree_config(&surface);
    let ind_value = estimates(ind(&surface, config.method, &degree_config))?[0].value;
    // Quadrature of ξ degrades near Σ, so the sweep counts preimages unless
    // quadrature is requested explicitly.
    let ind_p_method = match config.method {
        MethodSelection::Single(DegreeMethod::Quadrature) => config.method,
        _ => MethodSelection::Single(DegreeMethod::Preimage),
    };
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps {
        let t = step as f64 / (steps - 1) as f64;
        let coords: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + (b - a) * t).collect();
        let status = match BasePoint::from_slice(&surface, &coords) {
            Err(Error::OffSurface { .. }) => SweepStatus::OnSurface,
            Err(e) => return Err(e.into()),
            Ok(p) => {
                let records = locate_tangencies(&surface, &p, &line_config)?;
                let gp = check_general_position(&surface, &p, &records, &line_config);
                if !gp.pass() {
                    SweepStatus::Skipped(format!("general position ({gp})"))
                } else {
                    match ind_p(&surface, &p, ind_p_method, &degree_config) {
                        Ok(d) => SweepStatus::Valid {
                            ind_p: d.value,
                            n_lines: count_n(&records),
                            min_abs_det: gp.min_abs_det,
                        },
                        Err(e) => SweepStatus::Skipped(e.to_string()),
                    }
                }
            }
        };
        rows.push(SweepRow {
            step,
            p: coords,
            status,
        });
    }
    Ok(SweepResult {
        ind: ind_value,
        rows,
    })
}
