//! Degrees of maps S → S^{2n−1}: ind(Σ) = deg G and ind_p(Σ) = deg ξ, computed
//! by signed preimage counting, by quadrature of the pulled-back normalized
//! volume form, and (for G) by Morse counting of a height function. Also hosts
//! the numerical identities behind the line count: the block-determinant
//! check at a tangency and the pulled-back integral of the diagonal class.

use std::fmt;

use nalgebra::SymmetricEigen;

use crate::ambient::{j0, j0_columns, AmbientSpace, Matrix, Vector};
use crate::contact::{adapted_frame_matrices, local_geometry, LocalGeometry};
use crate::error::{Error, Result};
use crate::lines::TangencyRecord;
use crate::solve::{self, Evaluation, NewtonSettings};
use crate::surface::{sphere_volume, BasePoint, ImmersedHypersurface, SourcePoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphereMapKind {
    /// s ↦ N(ι(s)).
    Gauss,
    /// s ↦ (ι(s) − p)/|ι(s) − p|.
    Direction,
    /// s ↦ sign·J₀N(ι(s)).
    RotatedGauss(f64),
}

/// A map S → S^{2n−1} evaluated through the surface's local geometry.
#[derive(Debug, Clone)]
pub struct SphereMap<'a> {
    pub surface: &'a ImmersedHypersurface,
    pub kind: SphereMapKind,
    base: Option<Vector>,
}

impl<'a> SphereMap<'a> {
    pub fn gauss(surface: &'a ImmersedHypersurface) -> Self {
        Self {
            surface,
            kind: SphereMapKind::Gauss,
            base: None,
        }
    }

    pub fn direction(surface: &'a ImmersedHypersurface, p: &BasePoint) -> Self {
        Self {
            surface,
            kind: SphereMapKind::Direction,
            base: Some(p.coords().clone()),
        }
    }

    pub fn rotated_gauss(surface: &'a ImmersedHypersurface, sign: f64) -> Self {
        Self {
            surface,
            kind: SphereMapKind::RotatedGauss(sign),
            base: None,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            SphereMapKind::Gauss => "G".into(),
            SphereMapKind::Direction => "xi".into(),
            SphereMapKind::RotatedGauss(s) if s > 0.0 => "+J0G".into(),
            SphereMapKind::RotatedGauss(_) => "-J0G".into(),
        }
    }

    /// Value and differential in oriented chart coordinates.
    pub fn eval_geometry(&self, g: &LocalGeometry) -> (Vector, Matrix) {
        match self.kind {
            SphereMapKind::Gauss => (g.normal.clone(), g.normal_derivative.clone()),
            SphereMapKind::Direction => {
                let p = self.base.as_ref().expect("direction map carries a base point");
                let offset = &g.q - p;
                let dist = offset.norm();
                let xi = offset / dist;
                let d = (&g.first - &xi * (xi.transpose() * &g.first)) / dist;
                (xi, d)
            }
            SphereMapKind::RotatedGauss(sign) => (
                j0(&g.normal) * sign,
                j0_columns(&g.normal_derivative) * sign,
            ),
        }
    }

    pub fn eval(&self, s: &SourcePoint) -> Result<(Vector, Matrix)> {
        Ok(self.eval_geometry(&local_geometry(self.surface, s)?))
    }

    /// det[y | dy] per unit oriented tangent volume: the pullback density of
    /// the (unnormalized) sphere volume form relative to Σ's volume.
    pub fn local_jacobian(&self, g: &LocalGeometry) -> f64 {
        let (y, dy) = self.eval_geometry(g);
        bordered_det(&y, &(dy * &g.coord_to_basis))
    }
}

fn bordered_det(y: &Vector, cols: &Matrix) -> f64 {
    let d = y.len();
    let mut full = Matrix::zeros(d, d);
    full.set_column(0, y);
    full.columns_mut(1, d - 1).copy_from(cols);
    full.determinant()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMethod {
    Preimage,
    Quadrature,
    Morse,
}

impl fmt::Display for DegreeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegreeMethod::Preimage => "preimage",
            DegreeMethod::Quadrature => "quadrature",
            DegreeMethod::Morse => "morse",
        })
    }
}

/// Which methods to run for ind / ind_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSelection {
    Single(DegreeMethod),
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeEstimate {
    pub value: i64,
    pub method: DegreeMethod,
    /// Pre-rounding value (equal to `value` for counting methods).
    pub raw: f64,
    pub residual: f64,
    /// Regular value used by counting methods.
    pub regular_value: Option<Vector>,
    /// Number of preimages (or critical points) counted.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeConfig {
    pub seeds_per_axis: usize,
    pub max_newton_iters: usize,
    pub tol_newton: f64,
    pub dedupe_radius: f64,
    /// Minimum |local Jacobian| (or |Hessian eigenvalue|) for a regular value.
    pub tol_reg: f64,
    pub max_retries: usize,
    /// Quadrature nodes per axis.
    pub grid: usize,
    /// Initial regular value; `None` uses a fixed generic direction.
    pub direction: Option<Vector>,
}

impl DegreeConfig {
    pub fn for_surface(surface: &ImmersedHypersurface) -> Self {
        Self {
            seeds_per_axis: if surface.dim() == 1 { 48 } else { 24 },
            max_newton_iters: 50,
            tol_newton: 1e-12,
            dedupe_radius: 1e-6,
            tol_reg: 1e-6,
            max_retries: 20,
            grid: surface.grid,
            direction: None,
        }
    }

    fn newton(&self) -> NewtonSettings {
        NewtonSettings {
            seeds_per_axis: self.seeds_per_axis,
            max_iters: self.max_newton_iters,
            tol: self.tol_newton,
        }
    }

    fn initial_direction(&self, space: AmbientSpace) -> Vector {
        match &self.direction {
            Some(v) => v.normalize(),
            None => generic_direction(space),
        }
    }
}

/// Fixed direction avoiding the coordinate symmetries of the shipped scenarios.
pub fn generic_direction(space: AmbientSpace) -> Vector {
    const BASE: [f64; 8] = [0.8, 0.45, -0.3, 0.25, 0.15, -0.1, 0.35, -0.2];
    let d = space.dim();
    Vector::from_fn(d, |i, _| BASE[i % BASE.len()] + 0.01 * (i / BASE.len()) as f64).normalize()
}

fn radical_inverse(mut k: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

const PRIMES: [usize; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// The k-th deterministic perturbation of `v` (Halton offsets, k ≥ 1).
pub fn perturbed_direction(v: &Vector, k: usize) -> Vector {
    let offset = Vector::from_fn(v.len(), |i, _| 2.0 * radical_inverse(k, PRIMES[i % PRIMES.len()]) - 1.0);
    (v + offset * 0.3).normalize()
}

/// Residual fᵀy and Jacobian fᵀdy for the preimage problem y(s) = ±v, with f a
/// fixed unitary frame of T_vS^{2n−1}.
fn preimage_system(map: &SphereMap, frame: &Matrix, g: &LocalGeometry) -> Evaluation {
    let (y, mut dy) = map.eval_geometry(g);
    if g.orientation < 0.0 {
        dy.column_mut(0).neg_mut();
    }
    Evaluation {
        residual: frame.transpose() * &y,
        jacobian: frame.transpose() * dy,
    }
}

/// Points of S where the map hits +v or −v, tagged by the sign of ⟨y, v⟩.
fn antipodal_preimages(
    map: &SphereMap,
    v: &Vector,
    config: &DegreeConfig,
) -> Result<Vec<(LocalGeometry, f64)>> {
    let space = map.surface.space;
    let frame = space.complete_unitary_frame(v)?.sphere_tangent();
    let roots = solve::seeded_roots(map.surface, &config.newton(), map.base.as_ref(), |g| {
        preimage_system(map, &frame, g)
    })?;
    let roots = solve::dedupe(map.surface, roots, config.dedupe_radius);
    let mut out: Vec<(LocalGeometry, f64)> = roots
        .into_iter()
        .map(|r| {
            let (y, _) = map.eval_geometry(&r.geometry);
            let side = if y.dot(v) >= 0.0 { 1.0 } else { -1.0 };
            (r.geometry, side)
        })
        .collect();
    out.sort_by(|a, b| solve::source_order(&a.0.source, &b.0.source));
    Ok(out)
}

/// Signed preimage count of a regular value near `v`.
pub fn degree_by_preimages(
    map: &SphereMap,
    v: &Vector,
    config: &DegreeConfig,
) -> Result<DegreeEstimate> {
    map.surface.space.check(v)?;
    let v0 = v.normalize();
    for attempt in 0..=config.max_retries {
        let candidate = if attempt == 0 {
            v0.clone()
        } else {
            perturbed_direction(&v0, attempt)
        };
        let hits = antipodal_preimages(map, &candidate, config)?;
        let mut total = 0i64;
        let mut count = 0;
        let mut worst = f64::INFINITY;
        for (g, _) in hits.iter().filter(|(_, side)| *side > 0.0) {
            let jac = map.local_jacobian(g);
            worst = worst.min(jac.abs());
            total += if jac > 0.0 { 1 } else { -1 };
            count += 1;
        }
        if worst > config.tol_reg {
            return Ok(DegreeEstimate {
                value: total,
                method: DegreeMethod::Preimage,
                raw: total as f64,
                residual: 0.0,
                regular_value: Some(candidate),
                count,
            });
        }
    }
    Err(Error::RegularValueNotFound {
        attempts: config.max_retries + 1,
    })
}

/// Raw integrals ∫_S map^*μ for several maps sharing one pass over the nodes.
pub fn quadrature_integrals(maps: &[SphereMap], grid: usize) -> Result<Vec<f64>> {
    let Some(first) = maps.first() else {
        return Ok(Vec::new());
    };
    let surface = first.surface;
    let volume = sphere_volume(surface.space.n());
    let mut sums = vec![0.0; maps.len()];
    for node in surface.quadrature(grid) {
        let g = local_geometry(surface, &SourcePoint::new(node.chart, node.u))?;
        // dy in oriented coordinates; det[y | dy] is the pullback density
        // against du₁…du_m of the oriented chart.
        for (sum, map) in sums.iter_mut().zip(maps) {
            let (y, dy) = map.eval_geometry(&g);
            *sum += node.weight * bordered_det(&y, &dy);
        }
    }
    Ok(sums.into_iter().map(|s| s / volume).collect())
}

fn rounded(raw: f64, count: usize) -> Result<DegreeEstimate> {
    let value = raw.round();
    let residual = (raw - value).abs();
    if !(residual < 0.5) {
        return Err(Error::QuadratureResolution { raw, residual });
    }
    Ok(DegreeEstimate {
        value: value as i64,
        method: DegreeMethod::Quadrature,
        raw,
        residual,
        regular_value: None,
        count,
    })
}

/// ∫_S map^*μ with μ the normalized volume form, rounded to an integer.
pub fn degree_by_quadrature(map: &SphereMap, grid: usize) -> Result<DegreeEstimate> {
    let raw = quadrature_integrals(std::slice::from_ref(map), grid)?[0];
    rounded(raw, map.surface.quadrature(grid).len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub source: SourcePoint,
    /// +1 for N = +v, −1 for N = −v.
    pub side: i32,
    pub morse_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseCount {
    /// ind from the Crit⁻ formula.
    pub ind: DegreeEstimate,
    /// ind from the Crit⁺ formula Σ (−1)^{dim S − μ}.
    pub ind_from_plus: i64,
    /// Σ over all critical points of (−1)^μ; zero for odd-dimensional S.
    pub chi_check: i64,
    pub critical_points: Vec<CriticalPoint>,
}

fn parity(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Critical points of h(x) = ⟨x − p₀, v⟩ on Σ (the G-preimages of ±v) and
/// their Morse indices.
pub fn morse_count(
    surface: &ImmersedHypersurface,
    v: &Vector,
    config: &DegreeConfig,
) -> Result<MorseCount> {
    surface.space.check(v)?;
    let gauss = SphereMap::gauss(surface);
    let v0 = v.normalize();
    let m = surface.dim();
    'attempt: for attempt in 0..=config.max_retries {
        let candidate = if attempt == 0 {
            v0.clone()
        } else {
            perturbed_direction(&v0, attempt)
        };
        let hits = antipodal_preimages(&gauss, &candidate, config)?;
        let mut critical_points = Vec::with_capacity(hits.len());
        for (g, side) in &hits {
            let mut hess = Matrix::zeros(m, m);
            for j in 0..m {
                for k in 0..m {
                    hess[(j, k)] = g.second[j * m + k].dot(&candidate);
                }
            }
            let hess = g.coord_to_basis.transpose() * hess * &g.coord_to_basis;
            let eig = SymmetricEigen::new((&hess + hess.transpose()) * 0.5).eigenvalues;
            if eig.iter().any(|e| e.abs() <= config.tol_reg) {
                continue 'attempt;
            }
            critical_points.push(CriticalPoint {
                source: g.source.clone(),
                side: *side as i32,
                morse_index: eig.iter().filter(|e| **e < 0.0).count(),
            });
        }
        let ind: i64 = critical_points
            .iter()
            .filter(|c| c.side < 0)
            .map(|c| parity(c.morse_index))
            .sum();
        let ind_from_plus: i64 = critical_points
            .iter()
            .filter(|c| c.side > 0)
            .map(|c| parity(m - c.morse_index))
            .sum();
        let chi_check = critical_points.iter().map(|c| parity(c.morse_index)).sum();
        return Ok(MorseCount {
            ind: DegreeEstimate {
                value: ind,
                method: DegreeMethod::Morse,
                raw: ind as f64,
                residual: 0.0,
                regular_value: Some(candidate),
                count: critical_points.len(),
            },
            ind_from_plus,
            chi_check,
            critical_points,
        });
    }
    Err(Error::RegularValueNotFound {
        attempts: config.max_retries + 1,
    })
}

/// Degree from one or several methods; `value` is only set when they agree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSummary {
    pub value: i64,
    pub estimates: Vec<DegreeEstimate>,
}

fn summarize(estimates: Vec<DegreeEstimate>) -> Result<DegreeSummary> {
    let value = estimates[0].value;
    if estimates.iter().any(|e| e.value != value) {
        return Err(Error::MethodDisagreement(estimates));
    }
    Ok(DegreeSummary { value, estimates })
}

fn methods(selection: MethodSelection, morse_available: bool) -> Vec<DegreeMethod> {
    match selection {
        MethodSelection::Single(DegreeMethod::Morse) if !morse_available => {
            vec![DegreeMethod::Preimage]
        }
        MethodSelection::Single(m) => vec![m],
        MethodSelection::All if morse_available => vec![
            DegreeMethod::Preimage,
            DegreeMethod::Quadrature,
            DegreeMethod::Morse,
        ],
        MethodSelection::All => vec![DegreeMethod::Preimage, DegreeMethod::Quadrature],
    }
}

/// ind(Σ) = deg G.
pub fn ind(
    surface: &ImmersedHypersurface,
    selection: MethodSelection,
    config: &DegreeConfig,
) -> Result<DegreeSummary> {
    let map = SphereMap::gauss(surface);
    let v = config.initial_direction(surface.space);
    let mut estimates = Vec::new();
    for method in methods(selection, true) {
        estimates.push(match method {
            DegreeMethod::Preimage => degree_by_preimages(&map, &v, config)?,
            DegreeMethod::Quadrature => degree_by_quadrature(&map, config.grid)?,
            DegreeMethod::Morse => morse_count(surface, &v, config)?.ind,
        });
    }
    summarize(estimates)
}

/// ind_p(Σ) = deg ξ. Morse counting has no analogue here, so a Morse request
/// is served by preimage counting.
pub fn ind_p(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    selection: MethodSelection,
    config: &DegreeConfig,
) -> Result<DegreeSummary> {
    let map = SphereMap::direction(surface, p);
    let v = config.initial_direction(surface.space);
    let mut estimates = Vec::new();
    for method in methods(selection, false) {
        estimates.push(match method {
            DegreeMethod::Quadrature => degree_by_quadrature(&map, config.grid)?,
            _ => degree_by_preimages(&map, &v, config)?,
        });
    }
    summarize(estimates)
}

/// C_± = 1 ⊕ ±(rotation blocks): the matrix of ±J₀ between the adapted frames.
pub fn c_matrix(m: usize, sign: f64) -> Matrix {
    let mut c = crate::contact::standard_contact_matrix(m) * sign;
    c[(0, 0)] = 1.0;
    c
}

/// Outcome of the block-determinant identity at one tangency.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDetReport {
    /// det of the 2(2n−1) block matrix [[𝟙, dξ], [𝟙, B]].
    pub block_det: f64,
    /// det(A + branch·λ·P) from the Gram–Schmidt tangent basis.
    pub branch_det: f64,
    pub relative_residual: f64,
    pub sign_agrees: bool,
    /// ‖dξ block − λ·Diag(0, 1, …, 1)‖.
    pub xi_block_deviation: f64,
    /// ‖C_branch(numeric) − C_branch(closed form)‖.
    pub c_deviation: f64,
    /// ‖C₊C₋ − 𝟙‖.
    pub c_product_residual: f64,
    /// max |det C_± − 1|.
    pub c_det_residual: f64,
}

impl BlockDetReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.relative_residual < tol && self.sign_agrees
    }
}

/// Builds the Jacobian of (θ, s) ↦ (θ, θ) + φ_±(s) at a tangency in the
/// adapted frames and compares its determinant with det(A ± λP).
pub fn block_det_check(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    record: &TangencyRecord,
) -> Result<BlockDetReport> {
    let g = local_geometry(surface, &record.source)?;
    let branch = record.branch as f64;
    let m = g.dim();
    let adapted = adapted_frame_matrices(&g, branch)?;
    let space = surface.space;
    let offset = &g.q - p.coords();
    let lambda = 1.0 / offset.norm();
    let xi = offset * lambda;
    // Target frame of T_ξS^{2n−1}: (J₀ξ, e₁, J₀e₁, …).
    let target = space.complete_unitary_frame(&adapted.direction)?.sphere_tangent();
    let basis = &adapted.basis;

    let top_right = target.transpose() * ((basis - &xi * (xi.transpose() * basis)) * lambda);
    // dG(X) = E·A·EᵀX, then ±J₀.
    let dg = &g.tangent_basis * &g.shape * g.tangent_basis.transpose() * basis;
    let bottom_right = target.transpose() * j0_columns(&dg) * branch;
    let c_numeric = target.transpose() * j0_columns(basis) * branch;

    let mut block = Matrix::zeros(2 * m, 2 * m);
    block.view_mut((0, 0), (m, m)).copy_from(&Matrix::identity(m, m));
    block.view_mut((m, 0), (m, m)).copy_from(&Matrix::identity(m, m));
    block.view_mut((0, m), (m, m)).copy_from(&top_right);
    block.view_mut((m, m), (m, m)).copy_from(&bottom_right);
    let block_det = block.determinant();
    let branch_det = g.branch_determinant(lambda, branch);

    let mut diag = Matrix::identity(m, m) * lambda;
    diag[(0, 0)] = 0.0;
    let (cp, cm) = (c_matrix(m, 1.0), c_matrix(m, -1.0));
    Ok(BlockDetReport {
        block_det,
        branch_det,
        relative_residual: (block_det - branch_det).abs() / branch_det.abs().max(1e-300),
        sign_agrees: block_det.signum() as i32 == record.epsilon,
        xi_block_deviation: (top_right - diag).amax(),
        c_deviation: (c_numeric - c_matrix(m, branch)).amax(),
        c_product_residual: (&cp * &cm - Matrix::identity(m, m))
            .amax()
            .max((&cm * &cp - Matrix::identity(m, m)).amax()),
        c_det_residual: (cp.determinant() - 1.0).abs().max((cm.determinant() - 1.0).abs()),
    })
}

/// Pulled-back diagonal-class integral: the literal −∫(φ₊^*δ + φ₋^*δ) next to
/// the value 2·deg G − 2·deg ξ, both from quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryValues {
    pub literal: f64,
    pub theorem: f64,
    pub deg_xi: f64,
    pub deg_gauss: f64,
    pub deg_j0_gauss: f64,
    pub deg_minus_j0_gauss: f64,
}

pub fn corollary_integral(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    grid: usize,
) -> Result<CorollaryValues> {
    let maps = [
        SphereMap::direction(surface, p),
        SphereMap::gauss(surface),
        SphereMap::rotated_gauss(surface, 1.0),
        SphereMap::rotated_gauss(surface, -1.0),
    ];
    let raw = quadrature_integrals(&maps, grid)?;
    let (deg_xi, deg_gauss, deg_j0_gauss, deg_minus_j0_gauss) = (raw[0], raw[1], raw[2], raw[3]);
    Ok(CorollaryValues {
        literal: -(2.0 * deg_xi + deg_j0_gauss + deg_minus_j0_gauss),
        theorem: 2.0 * deg_gauss - 2.0 * deg_xi,
        deg_xi,
        deg_gauss,
        deg_j0_gauss,
        deg_minus_j0_gauss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_scenario, ScenarioParams};

    fn scenario(name: &str) -> ImmersedHypersurface {
        make_scenario(name, &ScenarioParams::default()).unwrap()
    }

    #[test]
    fn circle_gauss_map_has_one_positive_preimage() {
        let s = scenario("circle");
        let cfg = DegreeConfig::for_surface(&s);
        let e = degree_by_preimages(&SphereMap::gauss(&s), &Vector::from_vec(vec![1.0, 0.0]), &cfg)
            .unwrap();
        assert_eq!((e.value, e.count), (1, 1));
    }

    #[test]
    fn circle_quadrature_is_spectrally_accurate() {
        let s = scenario("circle");
        let e = degree_by_quadrature(&SphereMap::gauss(&s), 256).unwrap();
        assert!((e.raw - 1.0).abs() < 1e-10, "{}", e.raw);
    }

    #[test]
    fn circle_winding_number() {
        let s = scenario("circle");
        let outside = BasePoint::from_slice(&s, &[1.7, 0.4]).unwrap();
        let inside = BasePoint::from_slice(&s, &[0.2, -0.3]).unwrap();
        let q_out = degree_by_quadrature(&SphereMap::direction(&s, &outside), 256).unwrap();
        let q_in = degree_by_quadrature(&SphereMap::direction(&s, &inside), 256).unwrap();
        assert_eq!((q_out.value, q_in.value), (0, 1));
    }

    #[test]
    fn radial_map_of_sphere_has_degree_one() {
        let s = scenario("sphere3");
        let center = BasePoint::from_slice(&s, &[0.0; 4]).unwrap();
        let cfg = DegreeConfig::for_surface(&s);
        let v = generic_direction(s.space);
        let e = degree_by_preimages(&SphereMap::direction(&s, &center), &v, &cfg).unwrap();
        assert_eq!((e.value, e.count), (1, 1));
    }

    #[test]
    fn circle_morse_count() {
        let s = scenario("circle");
        let cfg = DegreeConfig::for_surface(&s);
        let m = morse_count(&s, &Vector::from_vec(vec![0.6, 0.8]), &cfg).unwrap();
        assert_eq!(m.critical_points.len(), 2);
        let mut indices: Vec<usize> = m.critical_points.iter().map(|c| c.morse_index).collect();
        indices.sort();
        assert_eq!(indices, vec![0, 1]);
        assert_eq!((m.ind.value, m.ind_from_plus, m.chi_check), (1, 1, 0));
    }

    #[test]
    fn c_matrices_are_mutually_inverse() {
        for m in [1, 3, 5] {
            let (cp, cm) = (c_matrix(m, 1.0), c_matrix(m, -1.0));
            assert!((&cp * &cm - Matrix::identity(m, m)).amax() < 1e-12);
            assert!((cp.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn perturbations_are_deterministic_unit_vectors() {
        let v = generic_direction(AmbientSpace::new(2).unwrap());
        for k in 1..=20 {
            let a = perturbed_direction(&v, k);
            assert_eq!(a, perturbed_direction(&v, k));
            assert!((a.norm() - 1.0).abs() < 1e-14);
            assert!(a.dot(&v) > 0.5);
        }
    }

    #[test]
    fn figure_eight_has_index_zero() {
        let s = scenario("figure_eight");
        let cfg = DegreeConfig::for_surface(&s);
        let r = ind(&s, MethodSelection::All, &cfg).unwrap();
        assert_eq!(r.value, 0);
        assert_eq!(r.estimates.len(), 3);
    }
}
