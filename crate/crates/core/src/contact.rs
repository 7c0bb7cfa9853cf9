//! Pointwise geometry of Σ: cooriented normal N, Gauss map derivative (shape
//! operator A), the almost contact structure (P, ζ = −J₀N, η) and the
//! polynomial K(t) = det(A + tP).
//!
//! Tangent operators are expressed in the orthonormal basis obtained by
//! modified Gram–Schmidt on the oriented chart derivatives, so that
//! det[N | basis] > 0.

use crate::ambient::{j0, j0_columns, AmbientSpace, Matrix, Vector};
use crate::error::{Error, Result};
use crate::surface::{BasePoint, ImmersedHypersurface, Jet, SourcePoint};

/// Above this the computed shape operator is flagged as numerically suspect.
pub const ASYMMETRY_WARNING: f64 = 1e-6;

/// Matrix of an endomorphism of T_sS in a recorded orthonormal basis.
#[derive(Debug, Clone)]
pub struct TangentOperator {
    pub matrix: Matrix,
}

impl TangentOperator {
    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }
}

/// Geometry of Σ at one source point; independent of the base point.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub source: SourcePoint,
    pub orientation: f64,
    pub q: Vector,
    /// Chart derivatives with the first column multiplied by the chart orientation.
    pub first: Matrix,
    /// Oriented second derivatives, index `j * m + k`.
    pub second: Vec<Vector>,
    pub normal: Vector,
    /// Orthonormal, positively oriented tangent basis (2n × m).
    pub tangent_basis: Matrix,
    /// Upper-triangular change of basis: tangent_basis = first · coord_to_basis.
    pub coord_to_basis: Matrix,
    /// ∂N/∂u in oriented chart coordinates (2n × m).
    pub normal_derivative: Matrix,
    /// Shape operator in the tangent basis, symmetrized.
    pub shape: Matrix,
    /// ‖A − Aᵀ‖ before symmetrization, relative to ‖A‖.
    pub asymmetry: f64,
}

/// Local geometry plus the base-point-dependent quantities ξ and λ.
#[derive(Debug, Clone)]
pub struct SurfacePointFrame {
    pub geometry: LocalGeometry,
    pub zeta: Vector,
    pub xi: Vector,
    pub lambda: f64,
}

/// Modified Gram–Schmidt with R factor: `d = q · r`, order preserved.
fn gram_schmidt(d: &Matrix) -> Option<(Matrix, Matrix)> {
    let m = d.ncols();
    let mut q = d.clone();
    let mut r = Matrix::zeros(m, m);
    let scale = (0..m).map(|j| d.column(j).norm()).fold(0.0, f64::max);
    for j in 0..m {
        for i in 0..j {
            let proj = q.column(i).dot(&q.column(j));
            r[(i, j)] += proj;
            let qi = q.column(i).into_owned();
            q.column_mut(j).axpy(-proj, &qi, 1.0);
        }
        // second pass for orthogonality at the 1e-16 level
        for i in 0..j {
            let proj = q.column(i).dot(&q.column(j));
            r[(i, j)] += proj;
            let qi = q.column(i).into_owned();
            q.column_mut(j).axpy(-proj, &qi, 1.0);
        }
        let norm = q.column(j).norm();
        if !(norm > 1e-12 * scale) {
            return None;
        }
        r[(j, j)] = norm;
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Some((q, r))
}

fn orient_jet(jet: Jet, orientation: f64) -> (Vector, Matrix, Vec<Vector>) {
    let Jet {
        point,
        mut first,
        mut second,
    } = jet;
    if orientation < 0.0 {
        let m = first.ncols();
        first.column_mut(0).neg_mut();
        for k in 1..m {
            second[k].neg_mut();
            second[k * m].neg_mut();
        }
    }
    (point, first, second)
}

/// Geometry at `s` from the 2-jet.
pub fn local_geometry(surface: &ImmersedHypersurface, s: &SourcePoint) -> Result<LocalGeometry> {
    let u = surface.normalize(s.chart, &s.u)?;
    let jet = surface.eval_jet(s.chart, &u)?;
    geometry_from_jet(SourcePoint::new(s.chart, u), jet, surface.charts[s.chart].orientation)
}

pub fn geometry_from_jet(source: SourcePoint, jet: Jet, orientation: f64) -> Result<LocalGeometry> {
    let (q, first, second) = orient_jet(jet, orientation);
    let m = first.ncols();
    let (basis, r) = gram_schmidt(&first).ok_or_else(|| Error::ImmersionViolation {
        chart: source.chart,
        u: source.u.clone(),
    })?;
    let coord_to_basis = r
        .solve_upper_triangular(&Matrix::identity(m, m))
        .expect("R has a positive diagonal");

    // Unit normal completing the oriented tangent basis: det[N | E] > 0.
    let mut normal = crate::ambient::cofactor_normal(&basis);
    normal.normalize_mut();

    // Weingarten: ∂_k N = −D g⁻¹ II[:, k] with II_jk = ⟨N, ∂_j∂_k ι⟩.
    let mut second_form = Matrix::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            second_form[(j, k)] = normal.dot(&second[j * m + k]);
        }
    }
    // g⁻¹ = R⁻¹R⁻ᵀ since D = E R with orthonormal E.
    let metric_inv = &coord_to_basis * coord_to_basis.transpose();
    let weingarten = -(metric_inv * &second_form);
    let normal_derivative = &first * &weingarten;

    let raw = basis.transpose() * &normal_derivative * &coord_to_basis;
    let skew = (&raw - raw.transpose()).norm();
    let asymmetry = skew / raw.norm().max(1e-300);
    let shape = (&raw + raw.transpose()) * 0.5;

    Ok(LocalGeometry {
        source,
        orientation,
        q,
        first,
        second,
        normal,
        tangent_basis: basis,
        coord_to_basis,
        normal_derivative,
        shape,
        asymmetry,
    })
}

impl LocalGeometry {
    pub fn dim(&self) -> usize {
        self.first.ncols()
    }

    /// ζ = −J₀N, the characteristic direction.
    pub fn zeta(&self) -> Vector {
        -j0(&self.normal)
    }

    pub fn shape_operator(&self) -> TangentOperator {
        TangentOperator {
            matrix: self.shape.clone(),
        }
    }

    /// P = tangential part of J₀, in the tangent basis: P_ij = ⟨E_i, J₀E_j⟩.
    pub fn contact_tensor(&self) -> TangentOperator {
        let je = j0_columns(&self.tangent_basis);
        TangentOperator {
            matrix: self.tangent_basis.transpose() * je,
        }
    }

    /// Coordinates of ζ in the tangent basis.
    pub fn zeta_coords(&self) -> Vector {
        self.tangent_basis.transpose() * self.zeta()
    }

    /// η as a row: η(X) = ⟨J₀X, N⟩.
    pub fn eta_row(&self) -> Vector {
        j0_columns(&self.tangent_basis).transpose() * &self.normal
    }

    pub fn contact_form(&self, x: &Vector) -> f64 {
        self.eta_row().dot(x)
    }

    /// K(t) = det(A + tP).
    pub fn k_poly(&self, t: f64) -> f64 {
        (&self.shape + self.contact_tensor().matrix * t).determinant()
    }

    /// det(A + branch·λ·P), the quantity whose sign is ε.
    pub fn branch_determinant(&self, lambda: f64, branch: f64) -> f64 {
        self.k_poly(branch * lambda)
    }

    /// Ambient image of the tangent vector with coordinates `x` in the tangent basis.
    pub fn to_ambient(&self, x: &Vector) -> Vector {
        &self.tangent_basis * x
    }
}

pub fn frame_at(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    s: &SourcePoint,
) -> Result<SurfacePointFrame> {
    let geometry = local_geometry(surface, s)?;
    Ok(frame_from_geometry(geometry, p.coords()))
}

pub fn frame_from_geometry(geometry: LocalGeometry, p: &Vector) -> SurfacePointFrame {
    let offset = &geometry.q - p;
    let dist = offset.norm();
    SurfacePointFrame {
        zeta: geometry.zeta(),
        xi: offset / dist,
        lambda: 1.0 / dist,
        geometry,
    }
}

pub fn shape_operator(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    s: &SourcePoint,
) -> Result<TangentOperator> {
    Ok(frame_at(surface, p, s)?.geometry.shape_operator())
}

pub fn contact_tensor(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    s: &SourcePoint,
) -> Result<TangentOperator> {
    Ok(frame_at(surface, p, s)?.geometry.contact_tensor())
}

pub fn contact_form(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    s: &SourcePoint,
    x: &Vector,
) -> Result<f64> {
    let frame = frame_at(surface, p, s)?;
    if x.len() != frame.geometry.dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.geometry.dim(),
            got: x.len(),
        });
    }
    Ok(frame.geometry.contact_form(x))
}

pub fn k_poly(
    surface: &ImmersedHypersurface,
    p: &BasePoint,
    s: &SourcePoint,
    t: f64,
) -> Result<f64> {
    Ok(frame_at(surface, p, s)?.geometry.k_poly(t))
}

/// A and P expressed in the tangent frame (±ξ, e₁, J₀e₁, …) of a tangency.
#[derive(Debug, Clone)]
pub struct AdaptedMatrices {
    pub shape: Matrix,
    pub contact: Matrix,
    /// Ambient columns of the adapted tangent frame.
    pub basis: Matrix,
    /// ξ replaced by branch·J₀N.
    pub direction: Vector,
}

/// Adapted-frame matrices at `s` for the given branch (±1).
///
/// The direction is taken to be branch·J₀N(q), which equals ξ at a tangency
/// of that branch. The first tangent vector branch·direction = J₀N makes the
/// frame positively oriented for both branches.
pub fn adapted_frame_matrices(geometry: &LocalGeometry, branch: f64) -> Result<AdaptedMatrices> {
    let n = (geometry.q.len()) / 2;
    let space = AmbientSpace::new(n)?;
    let direction = j0(&geometry.normal) * branch;
    let frame = space.complete_unitary_frame(&direction)?;
    let m = geometry.dim();
    let mut basis = Matrix::zeros(2 * n, m);
    basis.set_column(0, &(&direction * branch));
    for k in 2..2 * n {
        basis.set_column(k - 1, &frame.column(k));
    }
    // Orthogonal change of basis from the Gram–Schmidt basis.
    let t = geometry.tangent_basis.transpose() * &basis;
    let shape = t.transpose() * &geometry.shape * &t;
    let contact = t.transpose() * geometry.contact_tensor().matrix * &t;
    Ok(AdaptedMatrices {
        shape,
        contact,
        basis,
        direction,
    })
}

/// 0 ⊕ (rotation blocks [[0, −1], [1, 0]]), the normal form of P.
pub fn standard_contact_matrix(m: usize) -> Matrix {
    let mut out = Matrix::zeros(m, m);
    let mut k = 1;
    while k + 1 < m + 1 {
        out[(k + 1, k)] = 1.0;
        out[(k, k + 1)] = -1.0;
        k += 2;
    }
    out
}
