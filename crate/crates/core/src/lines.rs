//! Isotropic tangent lines through a base point: enumeration, signs and the
//! general-position checks.
//!
//! A line through p is tangent to Σ along the characteristic direction exactly
//! when ξ(s) = (ι(s) − p)/|ι(s) − p| equals ±J₀N(s). Both branches are zeros of
//! the square system s ↦ Π_ξ(J₀N) written in a unitary frame of T_ξS^{2n−1};
//! the branch is read off from the sign of ⟨J₀N, ξ⟩ at the root.

use std::fmt;

use crate::ambient::{j0, j0_columns, AmbientSpace, Vector};
use crate::contact::LocalGeometry;
use crate::error::{Error, Result};
use crate::solve::{self, Evaluation, NewtonSettings};
use crate::surface::{BasePoint, ImmersedHypersurface, SourcePoint};

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchConfig {
    pub seeds_per_axis: usize,
    pub tol_newton: f64,
    pub max_newton_iters: usize,
    pub dedupe_radius: f64,
    pub tol_gp: f64,
}

impl LineSearchConfig {
    pub fn for_space(space: AmbientSpace) -> Self {
        Self {
            seeds_per_axis: if space.n() == 1 { 48 } else { 24 },
            tol_newton: 1e-12,
            max_newton_iters: 50,
            dedupe_radius: 1e-6,
            tol_gp: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.seeds_per_axis > 0
            && self.max_newton_iters > 0
            && self.tol_newton > 0.0
            && self.dedupe_radius > 0.0
            && self.tol_gp > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("line search settings must all be positive".into()))
        }
    }

    pub(crate) fn newton(&self) -> NewtonSettings {
        NewtonSettings {
            seeds_per_axis: self.seeds_per_axis,
            max_iters: self.max_newton_iters,
            tol: self.tol_newton,
        }
    }
}

/// One isotropic line ℓ through p, tangent to Σ at ι(s).
#[derive(Debug, Clone, PartialEq)]
pub struct TangencyRecord {
    pub source: SourcePoint,
    pub q: Vector,
    /// +1 if ξ = +J₀N, −1 if ξ = −J₀N.
    pub branch: i32,
    /// ε_ℓ = sgn(det_value).
    pub epsilon: i32,
    /// det(A + branch·λ·P).
    pub det_value: f64,
    /// |ξ − branch·J₀N| at convergence.
    pub residual: f64,
    pub xi: Vector,
    pub lambda: f64,
}

/// Residual and Jacobian of s ↦ fᵀ J₀N(s), with f a unitary frame of
/// T_ξS^{2n−1} frozen at the current point.
fn tangency_system(g: &LocalGeometry, p: &Vector) -> Evaluation {
    let (first, normal_derivative) = solve::raw_derivatives(g);
    let offset = &g.q - p;
    let dist = offset.norm();
    let xi = offset / dist;
    let lambda = 1.0 / dist;
    let w = j0(&g.normal);
    let c = w.dot(&xi);
    let space = AmbientSpace::new(xi.len() / 2).expect("even dimension");
    let frame = space
        .complete_unitary_frame(&xi)
        .map(|f| f.sphere_tangent())
        .unwrap_or_else(|_| crate::ambient::Matrix::zeros(xi.len(), first.ncols()));
    // dξ = λ(D − ξξᵀD), d(J₀N) = J₀ dN
    let dxi = (&first - &xi * (xi.transpose() * &first)) * lambda;
    let dw = j0_columns(&normal_derivative);
    Evaluation {
        residual: frame.transpose() * &w,
        jacobian: frame.transpose() * (dw - dxi * c),
    }
}

fn record_from_geometry(g: LocalGeometry, p: &Vector) -> TangencyRecord {
    let offset = &g.q - p;
    let dist = offset.norm();
    let xi = offset / dist;
    let lambda = 1.0 / dist;
    let w = j0(&g.normal);
    let branch = if w.dot(&xi) >= 0.0 { 1 } else { -1 };
    let residual = (&xi - &w * branch as f64).norm();
    let det_value = g.branch_determinant(lambda, branch as f64);
    TangencyRecord {
        source: g.source.clone(),
        q: g.q.clone(),
        branch,
        epsilon: if det_value > 0.0 {
            1
        } else if det_value < 0.0 {
            -1
        } else {
            0
        },
        det_value,
        residual,
        xi,
        lambda,
    }
}

/// All tangencies found by seeded Newton, deduplicated and sorted by
/// (branch, chart, u), without general-position validation.
pub fn locate_tangencies(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    config: &LineSearchConfig,
) -> Result<Vec<TangencyRecord>> {
    config.validate()?;
    let pc = p.coords().clone();
    surface.space.check(&pc)?;
    let roots = solve::seeded_roots(surface, &config.newton(), Some(&pc), |g| {
        tangency_system(g, &pc)
    })?;
    let roots = solve::dedupe(surface, roots, config.dedupe_radius);
    let tol = solve::residual_tolerance(surface, config.tol_newton, &pc)?;
    let mut records: Vec<TangencyRecord> = roots
        .into_iter()
        .map(|r| record_from_geometry(r.geometry, &pc))
        .filter(|r| r.residual < tol)
        .collect();
    records.sort_by(|a, b| {
        a.branch
            .cmp(&b.branch)
            .then_with(|| solve::source_order(&a.source, &b.source))
    });
    Ok(records)
}

/// The set 𝓛(p, Σ) with signs; fails if the pair is not in general position.
pub fn find_isotropic_lines(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    config: &LineSearchConfig,
) -> Result<Vec<TangencyRecord>> {
    let records = locate_tangencies(surface, p, config)?;
    let report = check_general_position(surface, p, &records, config);
    if !report.pass() {
        return Err(Error::GeneralPosition(Box::new(report)));
    }
    Ok(records)
}

/// 𝒩 = Σ ε_ℓ.
pub fn count_n(records: &[TangencyRecord]) -> i64 {
    records.iter().map(|r| r.epsilon as i64).sum()
}

/// A transversal (or not) double point of an immersed curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub params: (f64, f64),
    pub point: Vector,
    /// |sin| of the angle between the two branches.
    pub sin_angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelfIntersectionCheck {
    /// The surface is an embedding.
    Skipped,
    /// Sampled double points; passes when all are transversal.
    Sampled { crossings: Vec<Crossing> },
    /// Immersed but no sampled heuristic exists for this dimension.
    Unsupported,
}

/// Three general-position conditions for (p, Σ).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPositionReport {
    pub condition1: SelfIntersectionCheck,
    /// Pairs of record indices lying on a common line through p.
    pub shared_lines: Vec<(usize, usize)>,
    /// Records whose tangency point is a sampled self-intersection.
    pub tangent_at_crossing: Vec<usize>,
    /// min |det(A ± λP)| over records; None when there are no records.
    pub min_abs_det: Option<f64>,
    pub tol_gp: f64,
}

/// Below this |sin angle| a sampled double point counts as a tangential crossing.
const TRANSVERSAL_SIN: f64 = 1e-6;

impl GeneralPositionReport {
    pub fn condition1_ok(&self) -> bool {
        match &self.condition1 {
            SelfIntersectionCheck::Sampled { crossings } => {
                crossings.iter().all(|c| c.sin_angle > TRANSVERSAL_SIN)
            }
            _ => true,
        }
    }

    pub fn condition2_ok(&self) -> bool {
        self.shared_lines.is_empty() && self.tangent_at_crossing.is_empty()
    }

    pub fn condition3_ok(&self) -> bool {
        self.min_abs_det.map_or(true, |d| d > self.tol_gp)
    }

    pub fn pass(&self) -> bool {
        self.condition1_ok() && self.condition2_ok() && self.condition3_ok()
    }
}

impl fmt::Display for GeneralPositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c1 = match &self.condition1 {
            SelfIntersectionCheck::Skipped => "skipped (embedding)".to_string(),
            SelfIntersectionCheck::Unsupported => "unchecked".to_string(),
            SelfIntersectionCheck::Sampled { crossings } => format!(
                "{} sampled crossing(s), {}",
                crossings.len(),
                if self.condition1_ok() { "transversal" } else { "NOT transversal" }
            ),
        };
        write!(
            f,
            "condition1: {c1}; condition2: {}; condition3: {}",
            if self.condition2_ok() {
                "ok".to_string()
            } else {
                format!(
                    "shared lines {:?}, tangent at crossing {:?}",
                    self.shared_lines, self.tangent_at_crossing
                )
            },
            match self.min_abs_det {
                None => "no records".to_string(),
                Some(d) => format!(
                    "min |det| = {d:e} {} tol {:e}",
                    if self.condition3_ok() { ">" } else { "<=" },
                    self.tol_gp
                ),
            }
        )
    }
}

pub fn check_general_position(
    surface: &ImmersedHypersurface,
    _p: &BasePoint,
    records: &[TangencyRecord],
    config: &LineSearchConfig,
) -> GeneralPositionReport {
    let condition1 = if surface.embedded {
        SelfIntersectionCheck::Skipped
    } else if surface.dim() == 1 {
        SelfIntersectionCheck::Sampled {
            crossings: curve_crossings(surface),
        }
    } else {
        SelfIntersectionCheck::Unsupported
    };

    let mut shared_lines = Vec::new();
    for i in 0..records.len() {
        for j in i + 1..records.len() {
            let (a, b) = (&records[i].xi, &records[j].xi);
            if (a - b).norm() < 1e-8 || (a + b).norm() < 1e-8 {
                shared_lines.push((i, j));
            }
        }
    }

    let mut tangent_at_crossing = Vec::new();
    if let SelfIntersectionCheck::Sampled { crossings } = &condition1 {
        let tol = 1e-6 * surface.diameter;
        for (i, r) in records.iter().enumerate() {
            if crossings.iter().any(|c| (&c.point - &r.q).norm() < tol) {
                tangent_at_crossing.push(i);
            }
        }
    }

    let min_abs_det = records
        .iter()
        .map(|r| r.det_value.abs())
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))));

    GeneralPositionReport {
        condition1,
        shared_lines,
        tangent_at_crossing,
        min_abs_det,
        tol_gp: config.tol_gp,
    }
}

/// Sampled closest-approach search for double points of a closed curve,
/// refined by Newton on ι(a) − ι(b) = 0.
fn curve_crossings(surface: &ImmersedHypersurface) -> Vec<Crossing> {
    let chart = &surface.charts[0];
    let domain = &chart.domain;
    let samples = 512;
    let params: Vec<f64> = domain.grid(samples).into_iter().map(|u| u[0]).collect();
    let points: Vec<Vector> = params.iter().map(|&u| chart.map.point(&[u])).collect();
    let spacing = (0..samples)
        .map(|i| (&points[(i + 1) % samples] - &points[i]).norm())
        .fold(0.0, f64::max);
    let mut found: Vec<Crossing> = Vec::new();
    for i in 0..samples {
        for j in i + 8..samples {
            if samples - (j - i) < 8 {
                continue;
            }
            if (&points[i] - &points[j]).norm() > 2.0 * spacing {
                continue;
            }
            let (mut a, mut b) = (params[i], params[j]);
            let mut converged = false;
            for _ in 0..30 {
                let ja = chart.map.jet(&[a]);
                let jb = chart.map.jet(&[b]);
                let r = &ja.point - &jb.point;
                if r.norm() < 1e-14 * surface.diameter {
                    converged = true;
                    break;
                }
                let jac = crate::ambient::Matrix::from_columns(&[
                    ja.first.column(0).into_owned(),
                    -jb.first.column(0).into_owned(),
                ]);
                let Some(step) = jac.lu().solve(&(-r)) else { break };
                a += step[0];
                b += step[1];
            }
            if !converged {
                continue;
            }
            let mut ua = [a];
            let mut ub = [b];
            domain.wrap(&mut ua);
            domain.wrap(&mut ub);
            if domain.distance(&ua, &ub) < 1e-6 {
                continue;
            }
            let (ua, ub) = if ua[0] <= ub[0] { (ua[0], ub[0]) } else { (ub[0], ua[0]) };
            let near = |x: f64, y: f64| domain.distance(&[x], &[y]) < 1e-6;
            if found.iter().any(|c| {
                (near(c.params.0, ua) && near(c.params.1, ub))
                    || (near(c.params.0, ub) && near(c.params.1, ua))
            }) {
                continue;
            }
            let da = chart.map.jet(&[ua]).first.column(0).into_owned();
            let db = chart.map.jet(&[ub]).first.column(0).into_owned();
            let sin_angle = (da[0] * db[1] - da[1] * db[0]).abs() / (da.norm() * db.norm());
            found.push(Crossing {
                params: (ua, ub),
                point: chart.map.point(&[ua]),
                sin_angle,
            });
        }
    }
    found.sort_by(|x, y| x.params.0.total_cmp(&y.params.0));
    found
}
