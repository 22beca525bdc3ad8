//! Metric geometry of projected curves: the quadric image of a smooth
//! (1,1)-curve, its round-sphere normal form, the induced first fundamental
//! form with profile curves for the associated surface of revolution, the
//! torus-shaped branch profiles of the one-parameter family, and the moment
//! map to the barycentric simplex.

use crate::curves::{Curve11, CurveKind};
use crate::linalg::{
    self, adjoint, dot, mat_identity, mat_mul, mat_scale, mat_sub, matvec, norm, outer, scale,
    sub, unitary_completion, Mat3, Vec3,
};
use crate::proj::{Flavor, ProjVec};
use crate::{Error, Result};
use num_complex::Complex64 as C;
use serde::Serialize;

/// The image of a smooth curve under the twistor projection is the zero set
/// of the sesquilinear form z ↦ zΦz*, Φ = (qm)I − mq.
#[derive(Debug, Clone)]
pub struct ImageQuadric {
    phi: Mat3,
    q: ProjVec,
    m: ProjVec,
}

impl ImageQuadric {
    pub fn matrix(&self) -> &Mat3 {
        &self.phi
    }

    pub fn source(&self) -> (&ProjVec, &ProjVec) {
        (&self.q, &self.m)
    }

    /// zΦz̄ᵀ; the image is where this vanishes.
    pub fn eval(&self, z: &Vec3) -> C {
        dot(&linalg::vecmat(z, &self.phi), &linalg::conj(z))
    }
}

/// Quadric equation of the projected curve.
pub fn image_quadric(curve: &Curve11) -> Result<ImageQuadric> {
    if curve.kind() != CurveKind::Smooth {
        return Err(Error::ReducibleCurve);
    }
    let q = curve.q().coords();
    let m = curve.m().coords();
    let qm = dot(q, m);
    let phi = mat_sub(&mat_scale(&mat_identity(), qm), &outer(m, q));
    Ok(ImageQuadric {
        phi,
        q: curve.q().clone(),
        m: curve.m().clone(),
    })
}

/// The round-sphere data of a projected smooth curve: the radius ρ of the
/// affine 2-sphere image, and the unitary motion used to reach the normal
/// position (q, m) → ([1:0:0], [1:2ρ:0]) via q ↦ q·Uᴴ, m ↦ U·m.
#[derive(Debug, Clone)]
pub struct SphereNormalForm {
    pub rho: f64,
    pub motion: Mat3,
}

pub fn sphere_normal_form(curve: &Curve11) -> Result<SphereNormalForm> {
    if curve.kind() != CurveKind::Smooth {
        return Err(Error::ReducibleCurve);
    }
    let q = curve.q().coords();
    let m = curve.m().coords();

    // u1 sends q to e₀ (its first row is q itself)
    let u1 = adjoint(&unitary_completion(&linalg::conj(q)));
    let m1 = matvec(&u1, m);

    // residual 2×2 rotation on the last coordinates brings m to (·, r, 0)
    let r = (m1[1].norm_sqr() + m1[2].norm_sqr()).sqrt();
    let mut w = mat_identity();
    if r > 1e-14 {
        w[1][1] = m1[1].conj() / r;
        w[1][2] = m1[2].conj() / r;
        w[2][1] = -m1[2] / r;
        w[2][2] = m1[1] / r;
    }

    // a diagonal phase makes the first entry of m positive real
    let m0 = m1[0];
    let mut d = mat_identity();
    d[0][0] = m0.conj() / m0.norm();

    Ok(SphereNormalForm {
        rho: r / (2.0 * m0.norm()),
        motion: mat_mul(&d, &mat_mul(&w, &u1)),
    })
}

/// Coefficients (E, F, G) of the induced metric in the (u, v) chart
/// z = [1 : ρ sin v : ρ e^{iu} cos v] of the round image sphere.
pub fn first_fundamental_form(rho: f64, _u: f64, v: f64) -> (f64, f64, f64) {
    let r2 = rho * rho;
    let s2 = v.sin() * v.sin();
    let den = 1.0 + r2;
    let e = r2 * v.cos() * v.cos() * (1.0 + r2 * s2) / (den * den);
    let g = r2 / den;
    (e, 0.0, g)
}

/// Geodesic Fubini–Study distance between two projective vectors of the
/// same flavor, in [0, π/2].
pub fn fubini_study_distance(a: &ProjVec, b: &ProjVec) -> Result<f64> {
    if a.flavor() != b.flavor() {
        return Err(Error::FlavorMismatch {
            expected: a.flavor(),
            got: b.flavor(),
        });
    }
    // sin of the angle via the orthogonal residual: accurate at short range
    let h = linalg::hdot(a.coords(), b.coords());
    let perp = sub(a.coords(), &scale(b.coords(), h));
    Ok(norm(&perp).min(1.0).asin())
}

/// One node of a profile curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileSample {
    pub v: f64,
    pub f: f64,
    pub g: f64,
}

/// Profile (f(v), g(v)) of the surface of revolution isometric to the
/// projected sphere: f = √E is the radius, g the axial coordinate with
/// g' = √(G − f'²), so lengths along the profile realize the induced
/// metric.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileCurve {
    pub rho: f64,
    pub samples: Vec<ProfileSample>,
    /// Quadrature nodes where the radicand G − f'² dipped below zero by
    /// roundoff and was clamped.
    pub clamp_events: Vec<f64>,
}

fn profile_f(rho: f64, v: f64) -> f64 {
    let r2 = rho * rho;
    rho * v.cos() * (1.0 + r2 * v.sin() * v.sin()).sqrt() / (1.0 + r2)
}

fn profile_fprime(rho: f64, v: f64) -> f64 {
    let r2 = rho * rho;
    let (sv, cv) = (v.sin(), v.cos());
    rho * sv * (r2 * cv * cv - r2 * sv * sv - 1.0)
        / ((1.0 + r2) * (1.0 + r2 * sv * sv).sqrt())
}

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
fn adaptive_simpson<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
            + rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, fa, b, fb, fm, whole, tol, 40)
}

/// Tabulate the profile curve on n uniform nodes over [−π/2, π/2].
pub fn profile_curve(rho: f64, n: usize) -> Result<ProfileCurve> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::DegenerateParameter);
    }
    if n < 16 {
        return Err(Error::Malformed("profile needs at least 16 samples".into()));
    }
    let gcap = rho * rho / (1.0 + rho * rho);
    let mut events: Vec<f64> = Vec::new();
    let mut integrand = |t: f64| -> f64 {
        let fp = profile_fprime(rho, t);
        let rad = gcap - fp * fp;
        if rad < 0.0 {
            if events.last() != Some(&t) {
                events.push(t);
            }
            return 0.0;
        }
        rad.sqrt()
    };

    let half = std::f64::consts::FRAC_PI_2;
    let vs: Vec<f64> = (0..n)
        .map(|i| -half + std::f64::consts::PI * i as f64 / (n - 1) as f64)
        .collect();
    let seg_tol = 1e-8 / (n as f64 + 1.0);

    // g(v) = ∫₀ᵛ, accumulated segment by segment from the first node
    let mut gs = vec![0.0f64; n];
    gs[0] = -adaptive_simpson(&mut integrand, vs[0], 0.0, seg_tol);
    for i in 1..n {
        gs[i] = gs[i - 1] + adaptive_simpson(&mut integrand, vs[i - 1], vs[i], seg_tol);
    }
    // shift so that g(0) = 0 exactly at the midpoint of the symmetric grid
    let samples = vs
        .iter()
        .zip(&gs)
        .map(|(&v, &g)| ProfileSample {
            v,
            f: profile_f(rho, v),
            g,
        })
        .collect();
    Ok(ProfileCurve {
        rho,
        samples,
        clamp_events: events,
    })
}

/// Rotation profile of the branch locus for the one-real-parameter family
/// (cross-ratio 2, single real off-diagonal parameter a): for each axial
/// coordinate x the radii s solve s⁴ + (4x²+6ax−2)s² + (1+ax+2x²)² = 0.
#[derive(Debug, Clone, Serialize)]
pub struct TorusProfile {
    pub a: f64,
    pub xs: Vec<f64>,
    /// [1, c₂(x), c₀(x)] per node: the even quartic in s.
    pub coeffs: Vec<[f64; 3]>,
    /// [outer, inner] real nonnegative radii per node, when they exist.
    pub roots: Vec<[Option<f64>; 2]>,
    /// x-values where the profile pinches to s = 0 (roots of 2x²+ax+1).
    pub singular_points: Vec<f64>,
    pub singular_count: usize,
}

pub const TORUS_GRID: usize = 2048;

pub fn torus_profile(a: f64) -> Result<TorusProfile> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::DegenerateParameter);
    }
    // the pinch points sit on the side of sign(−a); keep the default window
    // on that side and a short margin on the other
    let (lo, hi) = if a > 0.0 {
        (-(a.abs() + 3.0), 3.0)
    } else {
        (-3.0, a.abs() + 3.0)
    };
    let n = TORUS_GRID;
    let mut xs = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    let mut roots = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let c2 = 4.0 * x * x + 6.0 * a * x - 2.0;
        let c0 = {
            let b = 1.0 + a * x + 2.0 * x * x;
            b * b
        };
        let band = 1e-12 * (1.0 + c2.abs() + c0);
        let disc = c2 * c2 - 4.0 * c0;
        let mut pair: [Option<f64>; 2] = [None, None];
        if disc >= -band {
            let sd = disc.max(0.0).sqrt();
            let y_outer = 0.5 * (-c2 + sd);
            let y_inner = 0.5 * (-c2 - sd);
            if y_outer >= -band {
                pair[0] = Some(y_outer.max(0.0).sqrt());
            }
            if y_inner >= -band {
                pair[1] = Some(y_inner.max(0.0).sqrt());
            }
        }
        xs.push(x);
        coeffs.push([1.0, c2, c0]);
        roots.push(pair);
    }

    let critical = 8.0f64.sqrt();
    let d8 = a * a - 8.0;
    let singular_points = if (a.abs() - critical).abs() <= 1e-9 {
        vec![-a / 4.0]
    } else if d8 > 0.0 {
        let sq = d8.sqrt();
        let mut two = [(-a - sq) / 4.0, (-a + sq) / 4.0];
        two.sort_by(|p, q| p.partial_cmp(q).unwrap());
        two.to_vec()
    } else {
        Vec::new()
    };
    let singular_count = singular_points.len();
    Ok(TorusProfile {
        a,
        xs,
        coeffs,
        roots,
        singular_points,
        singular_count,
    })
}

/// Barycentric coordinates (|q₀|², |q₁|², |q₂|²)/‖q‖² of a point of P².
pub fn moment_map(q: &ProjVec) -> Result<[f64; 3]> {
    if q.flavor() != Flavor::Point {
        return Err(Error::FlavorMismatch {
            expected: Flavor::Point,
            got: q.flavor(),
        });
    }
    let qc = q.coords();
    let raw = [qc[0].norm_sqr(), qc[1].norm_sqr(), qc[2].norm_sqr()];
    let total: f64 = raw.iter().sum();
    Ok([raw[0] / total, raw[1] / total, raw[2] / total])
}
