//! Concrete chart maps with analytic 2-jets, plus the finite-difference and
//! similarity wrappers.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::ambient::{Matrix, Vector};

use super::Jet;

/// A smooth local parametrization u ↦ ι(u) with its partition-of-unity weight.
pub trait ChartMap: Send + Sync {
    fn jet(&self, u: &[f64]) -> Jet;

    fn point(&self, u: &[f64]) -> Vector {
        self.jet(u).point
    }

    /// Partition-of-unity weight of this chart at `u`.
    fn weight(&self, _u: &[f64]) -> f64 {
        1.0
    }

    /// Inverse map for embedded charts, used by atlas consistency checks.
    fn locate(&self, _q: &Vector) -> Option<Vec<f64>> {
        None
    }
}

impl fmt::Debug for dyn ChartMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ChartMap")
    }
}

/// C^∞ step: 0 for x ≤ 0, 1 for x ≥ 1.
pub fn smooth_step(x: f64) -> f64 {
    fn g(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-1.0 / x).exp()
        }
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = g(x);
    a / (a + g(1.0 - x))
}

fn wrap_angle(a: f64) -> f64 {
    a.rem_euclid(2.0 * PI)
}

/// (a cos u, b sin u) + center.
#[derive(Debug, Clone)]
pub struct EllipseChart {
    pub center: [f64; 2],
    pub semi_axes: [f64; 2],
}

impl ChartMap for EllipseChart {
    fn jet(&self, u: &[f64]) -> Jet {
        let (s, c) = u[0].sin_cos();
        let [a, b] = self.semi_axes;
        Jet {
            point: Vector::from_vec(vec![self.center[0] + a * c, self.center[1] + b * s]),
            first: Matrix::from_column_slice(2, 1, &[-a * s, b * c]),
            second: vec![Vector::from_vec(vec![-a * c, -b * s])],
        }
    }

    fn locate(&self, q: &Vector) -> Option<Vec<f64>> {
        let x = (q[0] - self.center[0]) / self.semi_axes[0];
        let y = (q[1] - self.center[1]) / self.semi_axes[1];
        Some(vec![wrap_angle(y.atan2(x))])
    }
}

/// Lemniscate of Gerono scaled by `scale`: (sin u, sin u cos u).
#[derive(Debug, Clone)]
pub struct FigureEightChart {
    pub center: [f64; 2],
    pub scale: f64,
}

impl ChartMap for FigureEightChart {
    fn jet(&self, u: &[f64]) -> Jet {
        let a = self.scale;
        let (s, c) = u[0].sin_cos();
        let (s2, c2) = (2.0 * u[0]).sin_cos();
        Jet {
            point: Vector::from_vec(vec![self.center[0] + a * s, self.center[1] + 0.5 * a * s2]),
            first: Matrix::from_column_slice(2, 1, &[a * c, a * c2]),
            second: vec![Vector::from_vec(vec![-a * s, -2.0 * a * s2])],
        }
    }
}

/// Inverse stereographic projection ℝᵏ → Sᵏ ⊂ ℝᵏ⁺¹ with its 2-jet.
///
/// Output ordering is (2v/t, pole·(2/t − 1)) with t = 1 + |v|², so v = 0 maps
/// to the pole `pole·e_{k+1}`.
fn stereographic_jet(v: &[f64], pole: f64) -> Jet {
    let k = v.len();
    let t = 1.0 + v.iter().map(|x| x * x).sum::<f64>();
    let t2 = t * t;
    let t3 = t2 * t;
    let mut point = Vector::zeros(k + 1);
    let mut first = Matrix::zeros(k + 1, k);
    let mut second = vec![Vector::zeros(k + 1); k * k];
    for i in 0..k {
        point[i] = 2.0 * v[i] / t;
    }
    point[k] = pole * (2.0 / t - 1.0);
    for j in 0..k {
        for i in 0..k {
            let delta = if i == j { 1.0 } else { 0.0 };
            first[(i, j)] = 2.0 * delta / t - 4.0 * v[i] * v[j] / t2;
        }
        first[(k, j)] = -4.0 * pole * v[j] / t2;
    }
    for j in 0..k {
        for l in 0..k {
            let h = &mut second[j * k + l];
            let djl = if j == l { 1.0 } else { 0.0 };
            for i in 0..k {
                let dij = if i == j { 1.0 } else { 0.0 };
                let dil = if i == l { 1.0 } else { 0.0 };
                h[i] = -4.0 * (dij * v[l] + dil * v[j] + v[i] * djl) / t2
                    + 16.0 * v[i] * v[j] * v[l] / t3;
            }
            h[k] = pole * (-4.0 * djl / t2 + 16.0 * v[j] * v[l] / t3);
        }
    }
    Jet {
        point,
        first,
        second,
    }
}

/// Overlap band of the two stereographic charts of S³, in chart units.
const STEREO_BAND: (f64, f64) = (0.9, 1.1);

/// Stereographic chart of the ellipsoid c + diag(axes)·S³.
///
/// `pole = -1` is centred on the south pole (−e₄), `pole = +1` on the north.
#[derive(Debug, Clone)]
pub struct StereoChart {
    pub center: [f64; 4],
    pub semi_axes: [f64; 4],
    pub pole: f64,
}

impl StereoChart {
    /// Weight of the south chart as a function of the south-chart radius.
    fn south_weight(rho: f64) -> f64 {
        let (lo, hi) = STEREO_BAND;
        smooth_step((hi - rho) / (hi - lo))
    }
}

impl ChartMap for StereoChart {
    fn jet(&self, u: &[f64]) -> Jet {
        let mut jet = stereographic_jet(u, self.pole);
        for r in 0..4 {
            let a = self.semi_axes[r];
            jet.point[r] = self.center[r] + a * jet.point[r];
            for j in 0..3 {
                jet.first[(r, j)] *= a;
            }
            for h in jet.second.iter_mut() {
                h[r] *= a;
            }
        }
        jet
    }

    fn weight(&self, u: &[f64]) -> f64 {
        let rho = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if self.pole < 0.0 {
            Self::south_weight(rho)
        } else if rho == 0.0 {
            1.0
        } else {
            1.0 - Self::south_weight(1.0 / rho)
        }
    }

    fn locate(&self, q: &Vector) -> Option<Vec<f64>> {
        let s: Vec<f64> = (0..4)
            .map(|r| (q[r] - self.center[r]) / self.semi_axes[r])
            .collect();
        let denom = 1.0 + self.pole * s[3];
        if denom < 1e-12 {
            return None;
        }
        Some((0..3).map(|i| s[i] / denom).collect())
    }
}

/// Parametrization of the fibre sphere S² of the tube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberPatch {
    /// (φ, ψ) ↦ (cos φ, sin φ cos ψ, sin φ sin ψ), away from φ ∈ {0, π}.
    Angles,
    /// Stereographic cap around ω = (+1, 0, 0).
    CapPlus,
    /// Stereographic cap around ω = (−1, 0, 0).
    CapMinus,
}

/// Polar-angle band (radians) where cap and angle charts overlap.
pub const TUBE_BAND: (f64, f64) = (0.4, 0.6);

/// Fibre point ω and its derivatives in the two fibre coordinates:
/// (ω, ω_a, ω_b, ω_aa, ω_ab, ω_bb).
type FiberJet = [[f64; 3]; 6];

impl FiberPatch {
    fn jet(self, a: f64, b: f64) -> FiberJet {
        match self {
            FiberPatch::Angles => {
                let (sa, ca) = a.sin_cos();
                let (sb, cb) = b.sin_cos();
                [
                    [ca, sa * cb, sa * sb],
                    [-sa, ca * cb, ca * sb],
                    [0.0, -sa * sb, sa * cb],
                    [-ca, -sa * cb, -sa * sb],
                    [0.0, -ca * sb, ca * cb],
                    [0.0, -sa * cb, -sa * sb],
                ]
            }
            FiberPatch::CapPlus | FiberPatch::CapMinus => {
                let pole = if self == FiberPatch::CapPlus { 1.0 } else { -1.0 };
                let j = stereographic_jet(&[a, b], pole);
                // reorder (σ₁, σ₂, σ_pole) -> (ω₀ = σ_pole, ω₁, ω₂)
                let re = |v: &Vector| [v[2], v[0], v[1]];
                let fa = j.first.column(0).into_owned();
                let fb = j.first.column(1).into_owned();
                [
                    re(&j.point),
                    re(&fa),
                    re(&fb),
                    re(&j.second[0]),
                    re(&j.second[1]),
                    re(&j.second[3]),
                ]
            }
        }
    }

    fn weight(self, omega0: f64) -> f64 {
        let (lo, hi) = TUBE_BAND;
        let phi = omega0.clamp(-1.0, 1.0).acos();
        let cap_plus = smooth_step((hi - phi) / (hi - lo));
        let cap_minus = smooth_step((hi - (PI - phi)) / (hi - lo));
        match self {
            FiberPatch::Angles => 1.0 - cap_plus - cap_minus,
            FiberPatch::CapPlus => cap_plus,
            FiberPatch::CapMinus => cap_minus,
        }
    }
}

/// Boundary of the r-tube around the circle of radius R in the (x₁, y₁) plane of ℝ⁴:
/// q = c + (R + r ω₀) e_r(θ) + r ω₁ e₃ + r ω₂ e₄.
#[derive(Debug, Clone)]
pub struct TubeChart {
    pub center: [f64; 4],
    pub major: f64,
    pub minor: f64,
    pub patch: FiberPatch,
}

impl ChartMap for TubeChart {
    fn jet(&self, u: &[f64]) -> Jet {
        let (st, ct) = u[0].sin_cos();
        let w = self.patch.jet(u[1], u[2]);
        let (big, r) = (self.major, self.minor);
        let er = [ct, st];
        let et = [-st, ct];
        let radial = big + r * w[0][0];
        let mut point = Vector::from_vec(self.center.to_vec());
        point[0] += radial * er[0];
        point[1] += radial * er[1];
        point[2] += r * w[0][1];
        point[3] += r * w[0][2];

        // ambient vector of a fibre-derivative slot
        let fiber = |d: &[f64; 3]| {
            Vector::from_vec(vec![r * d[0] * er[0], r * d[0] * er[1], r * d[1], r * d[2]])
        };
        let mut first = Matrix::zeros(4, 3);
        first.set_column(
            0,
            &Vector::from_vec(vec![radial * et[0], radial * et[1], 0.0, 0.0]),
        );
        first.set_column(1, &fiber(&w[1]));
        first.set_column(2, &fiber(&w[2]));

        let tt = Vector::from_vec(vec![-radial * er[0], -radial * er[1], 0.0, 0.0]);
        let ta = Vector::from_vec(vec![r * w[1][0] * et[0], r * w[1][0] * et[1], 0.0, 0.0]);
        let tb = Vector::from_vec(vec![r * w[2][0] * et[0], r * w[2][0] * et[1], 0.0, 0.0]);
        let aa = fiber(&w[3]);
        let ab = fiber(&w[4]);
        let bb = fiber(&w[5]);
        let second = vec![
            tt,
            ta.clone(),
            tb.clone(),
            ta,
            aa,
            ab.clone(),
            tb,
            ab,
            bb,
        ];
        Jet {
            point,
            first,
            second,
        }
    }

    fn weight(&self, u: &[f64]) -> f64 {
        let w = self.patch.jet(u[1], u[2]);
        self.patch.weight(w[0][0])
    }

    fn locate(&self, q: &Vector) -> Option<Vec<f64>> {
        let x = q[0] - self.center[0];
        let y = q[1] - self.center[1];
        let theta = wrap_angle(y.atan2(x));
        let rho = (x * x + y * y).sqrt();
        let omega = [
            (rho - self.major) / self.minor,
            (q[2] - self.center[2]) / self.minor,
            (q[3] - self.center[3]) / self.minor,
        ];
        match self.patch {
            FiberPatch::Angles => {
                let phi = omega[0].clamp(-1.0, 1.0).acos();
                let psi = wrap_angle(omega[2].atan2(omega[1]));
                Some(vec![theta, phi, psi])
            }
            FiberPatch::CapPlus | FiberPatch::CapMinus => {
                let pole = if self.patch == FiberPatch::CapPlus { 1.0 } else { -1.0 };
                let denom = 1.0 + pole * omega[0];
                if denom < 1e-12 {
                    return None;
                }
                Some(vec![theta, omega[1] / denom, omega[2] / denom])
            }
        }
    }
}

/// Image of a chart under the similarity x ↦ center + factor·(x − center).
#[derive(Clone)]
pub struct ScaledChart {
    pub inner: Arc<dyn ChartMap>,
    pub center: Vector,
    pub factor: f64,
}

impl ChartMap for ScaledChart {
    fn jet(&self, u: &[f64]) -> Jet {
        let mut jet = self.inner.jet(u);
        jet.point = &self.center + (&jet.point - &self.center) * self.factor;
        jet.first *= self.factor;
        for h in jet.second.iter_mut() {
            *h *= self.factor;
        }
        jet
    }

    fn weight(&self, u: &[f64]) -> f64 {
        self.inner.weight(u)
    }

    fn locate(&self, q: &Vector) -> Option<Vec<f64>> {
        let back = &self.center + (q - &self.center) / self.factor;
        self.inner.locate(&back)
    }
}

/// Chart for a user-supplied parametrization without analytic derivatives.
///
/// First derivatives use central differences with step `1e-5 · scale`; second
/// derivatives use a larger step `1e-4 · scale` to keep roundoff below truncation.
pub struct FiniteDifferenceChart<F> {
    pub map: F,
    pub scale: f64,
}

impl<F> ChartMap for FiniteDifferenceChart<F>
where
    F: Fn(&[f64]) -> Vector + Send + Sync,
{
    fn point(&self, u: &[f64]) -> Vector {
        (self.map)(u)
    }

    fn jet(&self, u: &[f64]) -> Jet {
        let m = u.len();
        let point = (self.map)(u);
        let dim = point.len();
        let h1 = 1e-5 * self.scale;
        let h2 = 1e-4 * self.scale;
        let shifted = |steps: &[(usize, f64)]| {
            let mut v = u.to_vec();
            for &(i, d) in steps {
                v[i] += d;
            }
            (self.map)(&v)
        };
        let mut first = Matrix::zeros(dim, m);
        for j in 0..m {
            let d = (shifted(&[(j, h1)]) - shifted(&[(j, -h1)])) / (2.0 * h1);
            first.set_column(j, &d);
        }
        let mut second = vec![Vector::zeros(dim); m * m];
        for j in 0..m {
            for k in j..m {
                let h = if j == k {
                    (shifted(&[(j, h2)]) - &point * 2.0 + shifted(&[(j, -h2)])) / (h2 * h2)
                } else {
                    (shifted(&[(j, h2), (k, h2)]) - shifted(&[(j, h2), (k, -h2)])
                        - shifted(&[(j, -h2), (k, h2)])
                        + shifted(&[(j, -h2), (k, -h2)]))
                        / (4.0 * h2 * h2)
                };
                second[k * m + j] = h.clone();
                second[j * m + k] = h;
            }
        }
        Jet {
            point,
            first,
            second,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Central-difference oracle for the first and second derivatives.
    fn check_against_differences(map: &dyn ChartMap, u: &[f64], tol: f64) {
        let jet = map.jet(u);
        let m = u.len();
        let h = 1e-5;
        for j in 0..m {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[j] += h;
            dn[j] -= h;
            let fd = (map.point(&up) - map.point(&dn)) / (2.0 * h);
            let err = (fd - jet.first.column(j)).amax();
            assert!(err < tol, "first derivative {j}: err {err}");
            let fd2 = (map.jet(&up).first - map.jet(&dn).first) / (2.0 * h);
            for k in 0..m {
                let err = (fd2.column(k) - &jet.second[k * m + j]).amax();
                assert!(err < tol, "second derivative ({k},{j}): err {err}");
                assert!((&jet.second[k * m + j] - &jet.second[j * m + k]).amax() < 1e-13);
            }
        }
    }

    #[test]
    fn analytic_jets_match_central_differences() {
        let ellipse = EllipseChart {
            center: [0.3, -0.2],
            semi_axes: [1.5, 0.7],
        };
        let eight = FigureEightChart {
            center: [0.0, 0.0],
            scale: 1.3,
        };
        for u in [0.0, 0.7, 2.9, 5.1] {
            check_against_differences(&ellipse, &[u], 1e-8);
            check_against_differences(&eight, &[u], 1e-8);
        }
        for pole in [-1.0, 1.0] {
            let chart = StereoChart {
                center: [0.1, 0.0, -0.3, 0.2],
                semi_axes: [1.0, 1.2, 0.8, 1.5],
                pole,
            };
            check_against_differences(&chart, &[0.3, -0.7, 0.45], 1e-8);
        }
        for patch in [FiberPatch::Angles, FiberPatch::CapPlus, FiberPatch::CapMinus] {
            let chart = TubeChart {
                center: [0.0; 4],
                major: 2.0,
                minor: 0.5,
                patch,
            };
            let u = if patch == FiberPatch::Angles {
                [0.8, 1.1, 2.3]
            } else {
                [0.8, 0.2, -0.15]
            };
            check_against_differences(&chart, &u, 1e-8);
        }
    }

    #[test]
    fn finite_difference_chart_tracks_analytic_jet() {
        let exact = StereoChart {
            center: [0.0; 4],
            semi_axes: [2.0; 4],
            pole: -1.0,
        };
        let copy = exact.clone();
        let fd = FiniteDifferenceChart {
            map: move |u: &[f64]| copy.point(u),
            scale: 1.0,
        };
        let u = [0.2, 0.4, -0.3];
        let (a, b) = (exact.jet(&u), fd.jet(&u));
        assert!((a.first - b.first).amax() < 1e-8);
        for (x, y) in a.second.iter().zip(&b.second) {
            assert!((x - y).amax() < 1e-5);
        }
    }

    #[test]
    fn locate_inverts_jet() {
        let stereo = StereoChart {
            center: [0.5, 0.0, 0.0, 1.0],
            semi_axes: [1.0, 1.2, 0.8, 1.5],
            pole: 1.0,
        };
        let u = [0.3, -0.6, 0.2];
        let back = stereo.locate(&stereo.point(&u)).unwrap();
        assert!(back.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-12));

        for patch in [FiberPatch::Angles, FiberPatch::CapPlus, FiberPatch::CapMinus] {
            let tube = TubeChart {
                center: [0.0; 4],
                major: 2.0,
                minor: 0.5,
                patch,
            };
            let u = if patch == FiberPatch::Angles {
                [4.0, 1.0, 5.5]
            } else {
                [4.0, 0.1, 0.2]
            };
            let back = tube.locate(&tube.point(&u)).unwrap();
            assert!(back.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn smooth_step_is_a_step() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(2.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert!((smooth_step(0.3) + smooth_step(0.7) - 1.0).abs() < 1e-15);
    }
}
