//! Brute-force line enumeration used as an oracle.
//!
//! Independent of the library's solver: its own node-centred grid, its own
//! normal (orthogonal projector instead of cofactors), Gauss–Newton on the
//! full 2n-vector ξ − b·J₀N with a finite-difference Jacobian, and signs from
//! a finite-difference shape operator.

use isoline::{ImmersedHypersurface, Matrix, Vector};

#[derive(Debug, Clone)]
pub struct OracleLine {
    pub branch: i32,
    pub q: Vector,
    pub epsilon: i32,
}

fn j0(v: &Vector) -> Vector {
    let mut out = v.clone();
    for k in 0..v.len() / 2 {
        out[2 * k] = -v[2 * k + 1];
        out[2 * k + 1] = v[2 * k];
    }
    out
}

/// Unit normal from the orthogonal projector onto (im D)^⊥, oriented so that
/// det[N | D·diag(orientation, 1, …)] > 0.
fn normal(first: &Matrix, orientation: f64) -> Option<Vector> {
    let d = first.nrows();
    let gram_inv = (first.transpose() * first).try_inverse()?;
    let proj = Matrix::identity(d, d) - first * gram_inv * first.transpose();
    let best = (0..d)
        .max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm()))?;
    let mut n = proj.column(best).normalize();
    let mut full = Matrix::zeros(d, d);
    full.set_column(0, &n);
    full.columns_mut(1, d - 1).copy_from(first);
    if full.determinant() * orientation < 0.0 {
        n = -n;
    }
    Some(n)
}

struct Probe<'a> {
    surface: &'a ImmersedHypersurface,
    chart: usize,
}

impl Probe<'_> {
    fn point_normal(&self, u: &[f64]) -> Option<(Vector, Vector)> {
        let jet = self.surface.eval_jet(self.chart, u).ok()?;
        let orientation = self.surface.charts[self.chart].orientation;
        let n = normal(&jet.first, orientation)?;
        Some((jet.point, n))
    }

    fn residual(&self, u: &[f64], p: &Vector, branch: f64) -> Option<Vector> {
        let (q, n) = self.point_normal(u)?;
        let xi = (&q - p).normalize();
        Some(xi - j0(&n) * branch)
    }
}

/// Node-centred grid: periodic axes exclude the right endpoint, bounded axes
/// include both.
fn node(domain: &isoline::surface::Domain, k: usize, idx: &[usize]) -> Vec<f64> {
    idx.iter()
        .enumerate()
        .map(|(a, &i)| {
            let w = domain.hi[a] - domain.lo[a];
            if domain.periodic[a] {
                domain.lo[a] + w * i as f64 / k as f64
            } else {
                domain.lo[a] + w * i as f64 / (k - 1) as f64
            }
        })
        .collect()
}

fn unravel(mut flat: usize, k: usize, m: usize) -> Vec<usize> {
    let mut idx = vec![0; m];
    for a in (0..m).rev() {
        idx[a] = flat % k;
        flat /= k;
    }
    idx
}

fn neighbours(idx: &[usize], k: usize, periodic: &[bool]) -> Vec<usize> {
    let m = idx.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(m as u32) {
        let mut c = code;
        let mut flat = 0usize;
        let mut valid = true;
        let mut moved = false;
        for a in 0..m {
            let off = (c % 3) as i64 - 1;
            c /= 3;
            moved |= off != 0;
            let mut j = idx[a] as i64 + off;
            if periodic[a] {
                j = j.rem_euclid(k as i64);
            } else if j < 0 || j >= k as i64 {
                valid = false;
            }
            flat = flat * k + j.max(0) as usize;
        }
        if valid && moved {
            out.push(flat);
        }
    }
    out
}

/// Gauss–Newton on r(u) = ξ(u) − b·J₀N(u) with central-difference Jacobian.
fn refine(probe: &Probe, p: &Vector, branch: f64, start: Vec<f64>) -> Option<Vec<f64>> {
    let domain = &probe.surface.charts[probe.chart].domain;
    let m = start.len();
    let mut u = start;
    let mut r = probe.residual(&u, p, branch)?;
    for _ in 0..60 {
        if r.norm() < 1e-13 {
            break;
        }
        let h = 1e-7;
        let mut jac = Matrix::zeros(r.len(), m);
        for j in 0..m {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let rp = probe.residual(&up, p, branch)?;
            let rm = probe.residual(&dn, p, branch)?;
            jac.set_column(j, &((rp - rm) / (2.0 * h)));
        }
        let step = (jac.transpose() * &jac).try_inverse()? * (jac.transpose() * -&r);
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let mut trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
            if domain.wrap(&mut trial) {
                if let Some(rt) = probe.residual(&trial, p, branch) {
                    if rt.norm() < r.norm() {
                        u = trial;
                        r = rt;
                        improved = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (r.norm() < 1e-9).then_some(u)
}

/// ε from det(A + bλP), A by central differences of the oracle normal.
fn sign_at(probe: &Probe, p: &Vector, branch: f64, u: &[f64]) -> Option<(Vector, f64)> {
    let jet = probe.surface.eval_jet(probe.chart, u).ok()?;
    let m = u.len();
    let h = 1e-5;
    let mut dn = Matrix::zeros(jet.point.len(), m);
    for j in 0..m {
        let mut up = u.to_vec();
        let mut lo = u.to_vec();
        up[j] += h;
        lo[j] -= h;
        let (_, np) = probe.point_normal(&up)?;
        let (_, nm) = probe.point_normal(&lo)?;
        dn.set_column(j, &((np - nm) / (2.0 * h)));
    }
    let e = jet.first.clone().qr().q();
    let a = e.transpose() * &dn * (e.transpose() * &jet.first).try_inverse()?;
    let mut je = e.clone();
    for c in 0..m {
        je.set_column(c, &j0(&e.column(c).into_owned()));
    }
    let pm = e.transpose() * je;
    let lambda = 1.0 / (&jet.point - p).norm();
    let det = (a + pm * (branch * lambda)).determinant();
    Some((jet.point, det))
}

/// All isotropic tangent lines through `p`, grid of `per_axis` nodes per axis.
pub fn enumerate(surface: &ImmersedHypersurface, p: &Vector, per_axis: usize) -> Vec<OracleLine> {
    let m = surface.dim();
    let k = per_axis;
    let total = k.pow(m as u32);
    let mut found: Vec<OracleLine> = Vec::new();
    let merge_radius = 1e-6 * surface.diameter;
    for chart in &surface.charts {
        let probe = Probe {
            surface,
            chart: chart.id,
        };
        let samples: Vec<Option<(Vector, Vector)>> = (0..total)
            .map(|f| probe.point_normal(&node(&chart.domain, k, &unravel(f, k, m))))
            .collect();
        for branch in [1.0, -1.0] {
            let merit: Vec<f64> = samples
                .iter()
                .map(|s| match s {
                    Some((q, n)) => ((q - p).normalize() - j0(n) * branch).norm(),
                    None => f64::INFINITY,
                })
                .collect();
            for f in 0..total {
                if !merit[f].is_finite() || merit[f] > 1.0 {
                    continue;
                }
                let idx = unravel(f, k, m);
                if neighbours(&idx, k, &chart.domain.periodic)
                    .into_iter()
                    .any(|g| merit[g] < merit[f])
                {
                    continue;
                }
                let Some(u) = refine(&probe, p, branch, node(&chart.domain, k, &idx)) else {
                    continue;
                };
                let Some((q, det)) = sign_at(&probe, p, branch, &u) else {
                    continue;
                };
                let duplicate = found
                    .iter()
                    .any(|l| l.branch == branch as i32 && (&l.q - &q).norm() < merge_radius);
                if !duplicate {
                    found.push(OracleLine {
                        branch: branch as i32,
                        q,
                        epsilon: if det > 0.0 { 1 } else { -1 },
                    });
                }
            }
        }
    }
    found
}
