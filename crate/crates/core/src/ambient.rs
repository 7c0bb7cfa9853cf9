//! The oriented Euclidean space ℝ²ⁿ ≅ ℂⁿ with its standard complex structure.
//!
//! Coordinates are interleaved as (x₁, y₁, …, xₙ, yₙ), so `J₀` acts on each
//! pair as the quarter turn (x, y) ↦ (−y, x) and ω₀(u, v) = ⟨J₀u, v⟩.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Pivot threshold used while completing a unitary frame.
const FRAME_PIVOT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmbientSpace {
    n: usize,
}

impl AmbientSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("half-dimension must be positive".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Dimension of the hypersurface (and of the unit sphere of directions).
    pub fn hyper_dim(&self) -> usize {
        2 * self.n - 1
    }

    pub fn check(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn apply_j0(&self, v: &Vector) -> Result<Vector> {
        self.check(v)?;
        Ok(j0(v))
    }

    /// ω₀(u, v) = ⟨J₀u, v⟩.
    pub fn omega(&self, u: &Vector, v: &Vector) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(j0(u).dot(v))
    }

    /// The matrix of `J₀` in the interleaved coordinates.
    pub fn j0_matrix(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for k in 0..self.n {
            m[(2 * k + 1, 2 * k)] = 1.0;
            m[(2 * k, 2 * k + 1)] = -1.0;
        }
        m
    }

    pub fn complete_unitary_frame(&self, xi: &Vector) -> Result<UnitaryFrame> {
        self.check(xi)?;
        let norm = xi.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit { norm });
        }
        Ok(complete_frame(xi))
    }
}

/// Unchecked `J₀` on a slice-backed vector of even length.
pub fn j0(v: &Vector) -> Vector {
    let mut out = Vector::zeros(v.len());
    for k in 0..v.len() / 2 {
        out[2 * k] = -v[2 * k + 1];
        out[2 * k + 1] = v[2 * k];
    }
    out
}

/// `J₀` applied to every column.
pub fn j0_columns(m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        for k in 0..m.nrows() / 2 {
            out[(2 * k, c)] = -m[(2 * k + 1, c)];
            out[(2 * k + 1, c)] = m[(2 * k, c)];
        }
    }
    out
}

/// Generalized cross product of the columns of a 2n × (2n−1) matrix.
///
/// The result `c` satisfies ⟨c, dᵢ⟩ = 0 for every column and
/// det[c | D] = |c|², so it is the positively oriented normal scaled by the
/// (2n−1)-volume of the columns.
pub fn cofactor_normal(d: &Matrix) -> Vector {
    let rows = d.nrows();
    let mut out = Vector::zeros(rows);
    for i in 0..rows {
        let minor = d.clone().remove_row(i);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        out[i] = sign * minor.determinant();
    }
    out
}

/// Orthonormal frame (ξ, J₀ξ, e₁, J₀e₁, …, e_{n−1}, J₀e_{n−1}) of ℝ²ⁿ.
///
/// Any such frame is complex-unitary, so its real determinant is +1.
#[derive(Debug, Clone)]
pub struct UnitaryFrame {
    columns: Matrix,
}

impl UnitaryFrame {
    pub fn matrix(&self) -> &Matrix {
        &self.columns
    }

    pub fn column(&self, i: usize) -> Vector {
        self.columns.column(i).into_owned()
    }

    /// Columns 1.. span the tangent space of the unit sphere at ξ.
    pub fn sphere_tangent(&self) -> Matrix {
        self.columns.columns(1, self.columns.ncols() - 1).into_owned()
    }
}

fn complete_frame(xi: &Vector) -> UnitaryFrame {
    let d = xi.len();
    let mut cols: Vec<Vector> = vec![xi.clone(), j0(xi)];
    // Canonical seeds e_1, …, e_2n in order; the span of the frame built so far
    // is always J₀-invariant, so projecting out of it keeps J₀e orthogonal too.
    let mut seed = 0;
    while cols.len() < d {
        // Trying every canonical vector always succeeds: they span ℝ²ⁿ.
        assert!(seed < d, "unitary frame completion exhausted canonical seeds");
        let mut e = Vector::zeros(d);
        e[seed] = 1.0;
        seed += 1;
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dot(&e);
                e.axpy(-proj, c, 1.0);
            }
        }
        let norm = e.norm();
        if norm < FRAME_PIVOT {
            continue;
        }
        e /= norm;
        let je = j0(&e);
        cols.push(e);
        cols.push(je);
    }
    UnitaryFrame {
        columns: Matrix::from_columns(&cols),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0..10.0f64, dim)
    }

    #[test]
    fn j0_on_plane_is_quarter_turn() {
        let s = AmbientSpace::new(1).unwrap();
        let v = s.apply_j0(&Vector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let s = AmbientSpace::new(2).unwrap();
        assert!(matches!(
            s.apply_j0(&Vector::zeros(3)),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        ));
        assert!(AmbientSpace::new(0).is_err());
    }

    #[test]
    fn j0_matrix_matches_j0() {
        let s = AmbientSpace::new(3).unwrap();
        let v = Vector::from_fn(6, |i, _| (i as f64 + 1.0).sin());
        assert_eq!(s.j0_matrix() * &v, j0(&v));
    }

    #[test]
    fn cofactor_normal_is_positively_oriented() {
        let d = Matrix::from_row_slice(4, 3, &[
            1.0, 0.2, 0.0, //
            0.0, 1.0, 0.3, //
            0.5, 0.0, 1.0, //
            0.1, -0.4, 0.2,
        ]);
        let c = cofactor_normal(&d);
        assert!((d.transpose() * &c).amax() < 1e-14);
        let mut full = Matrix::zeros(4, 4);
        full.set_column(0, &c);
        full.columns_mut(1, 3).copy_from(&d);
        assert!((full.determinant() - c.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn canonical_seed_keeps_standard_basis() {
        let s = AmbientSpace::new(2).unwrap();
        let f = s
            .complete_unitary_frame(&Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0]))
            .unwrap();
        assert_eq!(f.matrix(), &Matrix::identity(4, 4));
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let s = AmbientSpace::new(2).unwrap();
        let r = s.complete_unitary_frame(&Vector::from_vec(vec![1.0, 1.0, 0.0, 0.0]));
        assert!(matches!(r, Err(Error::NotUnit { .. })));
    }

    #[test]
    fn frame_near_third_axis_is_orthonormal() {
        let s = AmbientSpace::new(2).unwrap();
        for k in 0..20 {
            let eps = 1e-3 * k as f64;
            let mut xi = Vector::from_vec(vec![eps, -0.5 * eps, 1.0, 0.25 * eps]);
            xi.normalize_mut();
            let f = s.complete_unitary_frame(&xi).unwrap();
            let gram = f.matrix().transpose() * f.matrix();
            assert!((gram - Matrix::identity(4, 4)).amax() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn j0_squares_to_minus_identity(v in vec_strategy(6)) {
            let v = Vector::from_vec(v);
            let jj = j0(&j0(&v));
            prop_assert!((jj + &v).norm() <= 1e-14 * v.norm().max(1.0));
        }

        #[test]
        fn j0_is_orthogonal(u in vec_strategy(4), v in vec_strategy(4)) {
            let (u, v) = (Vector::from_vec(u), Vector::from_vec(v));
            let lhs = j0(&u).dot(&j0(&v));
            prop_assert!((lhs - u.dot(&v)).abs() <= 1e-12 * (1.0 + u.norm() * v.norm()));
        }

        #[test]
        fn omega_is_antisymmetric(u in vec_strategy(4), v in vec_strategy(4)) {
            let s = AmbientSpace::new(2).unwrap();
            let (u, v) = (Vector::from_vec(u), Vector::from_vec(v));
            let sum = s.omega(&u, &v).unwrap() + s.omega(&v, &u).unwrap();
            prop_assert!(sum.abs() <= 1e-12 * u.norm() * v.norm() + 1e-300);
        }

        #[test]
        fn completed_frames_are_unitary(raw in vec_strategy(6)) {
            let mut xi = Vector::from_vec(raw);
            prop_assume!(xi.norm() > 1e-3);
            xi.normalize_mut();
            let s = AmbientSpace::new(3).unwrap();
            let f = s.complete_unitary_frame(&xi).unwrap();
            let m = f.matrix();
            prop_assert!((m.transpose() * m - Matrix::identity(6, 6)).amax() < 1e-12);
            prop_assert!((m.determinant() - 1.0).abs() < 1e-10);
            prop_assert!((f.column(0) - &xi).norm() == 0.0);
            for k in 0..3 {
                prop_assert!((j0(&f.column(2 * k)) - f.column(2 * k + 1)).norm() < 1e-15);
            }
        }
    }
}
