//! Fibers of the projection π(p,ℓ) = p*×ℓ over a (1,1)-surface.
//!
//! A generic smooth surface meets each fiber in two flags, so π restricts to
//! a 2:1 cover of P² branched over a quartic locus R(q) = 0.  Special
//! parameter configurations make whole fibers collapse into the surface;
//! this module classifies those configurations, evaluates R together with
//! its toric factorization, and exposes the incidence bounds on how many
//! such fibers a surface of given bidegree can carry.

use crate::flag::FlagPoint;
use crate::linalg::{
    self, adjoint, c, conj as vconj, det, dot, mat_add, mat_conj, mat_mul, mat_shift, matvec,
    norm, scale, transpose, unitary_completion, vecmat, Mat3, Vec3, ONE, ZERO,
};
use crate::proj::{cross as pcross, proj_eq, Flavor, Param, ProjVec, PROJ_TOL};
use crate::surfaces::{ClassTag, Surface11, UnitaryForm};
use crate::{Error, Result};
use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Tolerance band for the parameter conditions deciding fiber counts,
/// weighted by the parameter scale raised to the expression degree.
const COND_TOL: f64 = 1e-9;

/// A restricted quadratic with all coefficients below this (on the
/// Frobenius-normalized representative) vanishes identically: whole fiber.
const WHOLE_TOL: f64 = 1e-10;

/// Acceptance threshold for numerically located zeros of the branch quartic.
const SEARCH_TOL: f64 = 1e-10;

fn flavor_guard(v: &ProjVec, expected: Flavor) -> Result<()> {
    if v.flavor() != expected {
        return Err(Error::FlavorMismatch {
            expected,
            got: v.flavor(),
        });
    }
    Ok(())
}

/// Matrix of the map p ↦ q×p.
fn cross_mat(q: &Vec3) -> Mat3 {
    [
        [ZERO, -q[2], q[1]],
        [q[2], ZERO, -q[0]],
        [-q[1], q[0], ZERO],
    ]
}

/// The quadratic form in p cutting the fiber directions over q out of the
/// surface: membership of the flag (p, q×p) reads p·A·(q×p) = det(p|pA|q).
#[derive(Debug, Clone)]
pub struct ConicMatrix {
    cmat: Mat3,
    q: ProjVec,
}

impl ConicMatrix {
    pub fn matrix(&self) -> &Mat3 {
        &self.cmat
    }

    pub fn base(&self) -> &ProjVec {
        &self.q
    }

    /// p·C·pᵀ (twice the determinant cubic-free quadratic).
    pub fn eval(&self, p: &Vec3) -> C {
        dot(&vecmat(p, &self.cmat), p)
    }
}

/// Symmetrized matrix of the fiber-direction conic over q: A·X_q plus its
/// transpose, X_q the cross-product matrix of q.
pub fn conic_matrix(s: &Surface11, q: &ProjVec) -> Result<ConicMatrix> {
    flavor_guard(q, Flavor::Point)?;
    let m = mat_mul(s.rep(), &cross_mat(q.coords()));
    Ok(ConicMatrix {
        cmat: mat_add(&m, &transpose(&m)),
        q: q.clone(),
    })
}

/// The fiber of π over q: flags (p, q×p) with p Hermitian-orthogonal to q.
#[derive(Debug, Clone)]
pub struct TwistorFiber {
    q: ProjVec,
    w: [Vec3; 2],
}

pub fn twistor_fiber(q: &ProjVec) -> Result<TwistorFiber> {
    flavor_guard(q, Flavor::Point)?;
    let u = unitary_completion(q.coords());
    let col = |j: usize| [u[0][j], u[1][j], u[2][j]];
    Ok(TwistorFiber {
        q: q.clone(),
        w: [col(1), col(2)],
    })
}

impl TwistorFiber {
    pub fn base(&self) -> &ProjVec {
        &self.q
    }

    /// Flag at parameter t along the line of points orthogonal to the base.
    pub fn sample(&self, t: Param) -> Result<FlagPoint> {
        let p = ProjVec::point(t.combine(&self.w[0], &self.w[1]))?;
        let l = pcross(&self.q, &p)?;
        FlagPoint::new(p, l)
    }
}

/// Coefficients (α, β, γ) of the fiber conic restricted to the line p ⊥ q,
/// in the orthonormal parametrization p = s·w₁ + t·w₂, plus that basis.
fn restricted_quadratic(a: &Mat3, q: &Vec3) -> ((C, C, C), [Vec3; 2]) {
    let u = unitary_completion(q);
    let col = |j: usize| [u[0][j], u[1][j], u[2][j]];
    let (w1, w2) = (col(1), col(2));
    let k = |p: &Vec3| dot(&vecmat(p, a), &linalg::cross(q, p));
    let al = k(&w1);
    let ga = k(&w2);
    let be = k(&linalg::add(&w1, &w2)) - al - ga;
    ((al, be, ga), [w1, w2])
}

/// How a fiber of π meets the surface.
#[derive(Debug, Clone)]
pub enum FiberPreimages {
    /// The whole fiber lies inside the surface.
    WholeFiber,
    /// The isolated intersection flags (two generically, one at a branch
    /// point of the cover).
    Points(Vec<FlagPoint>),
}

/// Intersect the surface with the fiber over q: solve the fiber conic on
/// the line p ⊥ q and rebuild each flag as (p, q×p).
pub fn fiber_preimages(s: &Surface11, q: &ProjVec) -> Result<FiberPreimages> {
    flavor_guard(q, Flavor::Point)?;
    let ((al, be, ga), [w1, w2]) = restricted_quadratic(s.rep(), q.coords());
    let mag = al.norm().max(be.norm()).max(ga.norm());
    if mag <= WHOLE_TOL {
        return Ok(FiberPreimages::WholeFiber);
    }

    // roots of α s² + β s t + γ t², solved in whichever affine chart of the
    // (s:t)-line keeps the leading coefficient large
    let mut pts: Vec<Vec3> = Vec::new();
    if al.norm() >= ga.norm() && al.norm() > 1e-14 * mag {
        for x in quad_roots(al, be, ga) {
            pts.push(linalg::add(&scale(&w1, x), &w2));
        }
    } else if ga.norm() > 1e-14 * mag {
        for y in quad_roots(ga, be, al) {
            pts.push(linalg::add(&w1, &scale(&w2, y)));
        }
    } else {
        // β dominates: the two charts' roots are the basis directions
        pts.push(w1);
        pts.push(w2);
    }

    let mut flags: Vec<FlagPoint> = Vec::new();
    for pc in pts {
        let p = ProjVec::point(pc)?;
        if flags
            .iter()
            .any(|f| proj_eq(f.p(), &p, PROJ_TOL).unwrap_or(false))
        {
            continue;
        }
        let l = pcross(q, &p)?;
        flags.push(FlagPoint::new(p, l)?);
    }
    Ok(FiberPreimages::Points(flags))
}

/// Both roots of a x² + b x + c = 0 (|a| largest coefficient), computed in
/// the cancellation-safe product form.
fn quad_roots(a: C, b: C, cc: C) -> [C; 2] {
    let sq = (b * b - 4.0 * a * cc).sqrt();
    let t = if (b + sq).norm() >= (b - sq).norm() {
        -(b + sq) / 2.0
    } else {
        -(b - sq) / 2.0
    };
    if t.norm() < 1e-280 {
        return [ZERO, ZERO];
    }
    [t / a, cc / t]
}

/// Solutions of |z|² + e·z + f = 0 for complex e ≠ 0, f.
///
/// Writing Δ = |e|⁴ − 4·Re(f)·|e|² − 4·Im(f)², the solutions are
/// z = −(½|e|² ± ½√Δ + i·Im f)/e when Δ ≥ 0 and none exist otherwise.
pub fn solve_norm_quadratic(e: C, f: C) -> Result<Vec<C>> {
    let es = e.norm_sqr();
    if e.norm() <= 1e-12 * (1.0 + f.norm().sqrt()) {
        return Err(Error::DegenerateParameter);
    }
    let disc = es * es - 4.0 * f.re * es - 4.0 * f.im * f.im;
    let scale4 = (1.0f64).max(e.norm()).max(f.norm().sqrt()).powi(4);
    if disc.abs() <= 1e-12 * scale4 {
        return Ok(vec![-(c(0.5 * es, f.im)) / e]);
    }
    if disc < 0.0 {
        return Ok(vec![]);
    }
    let half = 0.5 * disc.sqrt();
    Ok(vec![
        -(c(0.5 * es + half, f.im)) / e,
        -(c(0.5 * es - half, f.im)) / e,
    ])
}

/// A circle's worth of whole fibers: the locus q_chart = 0,
/// |q_j/q_i| = modulus carried back to the input frame.
#[derive(Debug, Clone)]
pub struct CircleLocus {
    /// Cross-ratio representative normalized into (1, 2].
    pub lambda: f64,
    /// Index of the vanishing coordinate in the triangular frame.
    pub chart: usize,
    /// Fixed modulus ratio of the two live coordinates.
    pub modulus: f64,
    frame: Mat3,
}

impl CircleLocus {
    /// The fiber base point at angle θ on the circle.
    pub fn sample(&self, theta: f64) -> Result<ProjVec> {
        let (i, j) = match self.chart {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut qt = [ZERO; 3];
        qt[i] = ONE;
        qt[j] = c(self.modulus * theta.cos(), self.modulus * theta.sin());
        ProjVec::point(matvec(&self.frame, &qt))
    }
}

/// The set of fiber base points whose whole fiber lies inside a surface.
#[derive(Debug, Clone)]
pub enum FiberSet {
    Empty,
    One(ProjVec),
    Two(ProjVec, ProjVec),
    Circle(CircleLocus),
}

/// Result of the whole-fiber classification: the set plus flags for
/// near-degenerate parameters and hypothesis failures.
#[derive(Debug, Clone)]
pub struct FiberAnalysis {
    pub set: FiberSet,
    /// True when a discriminant fell inside the tolerance band around zero,
    /// so the one/two-fiber answer sits on the classification boundary.
    pub boundary: bool,
    pub warning: Option<String>,
}

impl FiberAnalysis {
    fn clean(set: FiberSet) -> FiberAnalysis {
        FiberAnalysis {
            set,
            boundary: false,
            warning: None,
        }
    }
}

/// Classify which whole fibers of π the surface contains.
pub fn twistor_fibers_in(s: &Surface11) -> Result<FiberAnalysis> {
    match s.classify().tag {
        ClassTag::A1 { .. } => smooth_fiber_analysis(s),
        ClassTag::A2 | ClassTag::A4 => rank_one_fibers(s),
        ClassTag::A3 | ClassTag::A5 => searched_fibers(s),
    }
}

/// Map a base point written in the triangular frame's conjugate coordinates
/// back to the input frame: q = conj(U·w).
fn to_original(u: &Mat3, w: &Vec3) -> Result<ProjVec> {
    ProjVec::point(vconj(&matvec(u, w)))
}

fn smooth_fiber_analysis(s: &Surface11) -> Result<FiberAnalysis> {
    let uf = s.unitary_canonical_form()?;
    let (lam, a, b, cc) = (uf.lambda, uf.a, uf.b, uf.c);
    let sp = 1.0f64
        .max(lam.norm())
        .max(a.norm())
        .max(b.norm())
        .max(cc.norm());
    let band = COND_TOL * sp;
    let tol3 = COND_TOL * sp.powi(3);
    let tol4 = COND_TOL * sp.powi(4);
    let (za, zb, zc) = (a.norm() <= band, b.norm() <= band, cc.norm() <= band);

    if za && zb && zc {
        if lam.im.abs() <= band {
            return circle_locus(&uf);
        }
        // torus-diagonal surface: the cover has no collapsed fibers at all
        return Ok(FiberAnalysis::clean(FiberSet::Empty));
    }

    // single-fiber configurations: one coefficient relation per pair of
    // nonvanishing off-diagonal parameters, fiber on the matching line
    if !zb && !zc {
        let e1 = b.norm_sqr() * (ONE - lam) - cc.norm_sqr() * lam - a * b.conj() * cc;
        if e1.norm() <= tol3 {
            return Ok(FiberAnalysis::clean(FiberSet::One(to_original(
                &uf.u,
                &[b, cc, ZERO],
            )?)));
        }
    }
    if !za && !zc {
        let e2 = a.norm_sqr() * (ONE - lam) + c(cc.norm_sqr(), 0.0) + a * b.conj() * cc;
        if e2.norm() <= tol3 {
            let w = [ONE, -a.conj(), -a.conj() * (lam - ONE) / cc];
            return Ok(FiberAnalysis::clean(FiberSet::One(to_original(&uf.u, &w)?)));
        }
    }
    if !za && !zb {
        let e3 = a.norm_sqr() * lam + c(b.norm_sqr(), 0.0) - a * b.conj() * cc;
        if e3.norm() <= tol3 {
            let w = [ZERO, a * cc - b, a * lam];
            return Ok(FiberAnalysis::clean(FiberSet::One(to_original(&uf.u, &w)?)));
        }
    }

    // two vanishing parameters: zero, one or two fibers by a discriminant
    if zb && zc {
        let d = a.norm_sqr().powi(2) - 4.0 * a.norm_sqr() * (lam.norm_sqr() - lam.re)
            - 4.0 * lam.im * lam.im;
        return discriminant_fibers(&uf.u, d, tol4, a / lam, (lam - ONE) / lam, 0);
    }
    if za && zc {
        let d = b.norm_sqr().powi(2) - 4.0 * (1.0 - lam.re) * b.norm_sqr() - 4.0 * lam.im * lam.im;
        return discriminant_fibers(&uf.u, d, tol4, b, ONE - lam, 1);
    }
    if za && zb {
        let d = cc.norm_sqr().powi(2) - 4.0 * lam.re * cc.norm_sqr() - 4.0 * lam.im * lam.im;
        return discriminant_fibers(&uf.u, d, tol4, -cc, lam, 2);
    }

    Ok(FiberAnalysis::clean(FiberSet::Empty))
}

/// Resolve a two-vanishing-parameter configuration: the fiber base points
/// are [1:z:0], [1:0:z] or [0:1:z] with z a root of |z|² + e·z + f = 0.
/// `disc` decides the count in the original parameter scale; the roots are
/// recomputed from (e, f), whose own discriminant agrees up to a positive
/// factor.
fn discriminant_fibers(
    u: &Mat3,
    disc: f64,
    tol4: f64,
    e: C,
    f: C,
    chart: usize,
) -> Result<FiberAnalysis> {
    let embed = |z: C| match chart {
        0 => [ONE, z, ZERO],
        1 => [ONE, ZERO, z],
        _ => [ZERO, ONE, z],
    };
    let es = e.norm_sqr();
    if disc > tol4 {
        let dz = (es * es - 4.0 * f.re * es - 4.0 * f.im * f.im).max(0.0);
        let half = 0.5 * dz.sqrt();
        let z1 = -(c(0.5 * es + half, f.im)) / e;
        let z2 = -(c(0.5 * es - half, f.im)) / e;
        return Ok(FiberAnalysis::clean(FiberSet::Two(
            to_original(u, &embed(z1))?,
            to_original(u, &embed(z2))?,
        )));
    }
    if disc.abs() <= tol4 {
        let z = -(c(0.5 * es, f.im)) / e;
        return Ok(FiberAnalysis {
            set: FiberSet::One(to_original(u, &embed(z))?),
            boundary: true,
            warning: None,
        });
    }
    Ok(FiberAnalysis {
        set: FiberSet::Empty,
        boundary: false,
        warning: Some(
            "two off-diagonal parameters vanish with negative discriminant; \
             no contained fibers"
                .into(),
        ),
    })
}

/// Circle of whole fibers of a Hermitian-pencil surface, written in the
/// triangular frame and carried back through the conjugated unitary.
fn circle_locus(uf: &UnitaryForm) -> Result<FiberAnalysis> {
    let lam = uf.lambda.re;
    let (chart, modulus) = if lam > 1.0 {
        (1, (lam - 1.0).sqrt())
    } else if lam > 0.0 {
        (2, ((1.0 - lam) / lam).sqrt())
    } else {
        (0, (-lam).sqrt())
    };
    // report the cross-ratio representative in (1, 2]
    let mut rep = lam;
    for v in crate::surfaces::cross_ratio_orbit(uf.lambda) {
        if v.im.abs() <= 1e-9 && v.re > 1.0 && v.re <= 2.0 + 1e-9 {
            rep = v.re;
            break;
        }
    }
    Ok(FiberAnalysis::clean(FiberSet::Circle(CircleLocus {
        lambda: rep,
        chart,
        modulus,
        frame: mat_conj(&uf.u),
    })))
}

/// Fibers inside a surface whose pencil degenerates to a rank-one matrix
/// v·r plus a scalar: the surface splits as {p·v = 0} ∪ {r·ℓ = 0}, whose
/// fiber bases are conj(v) and r.
fn rank_one_fibers(s: &Surface11) -> Result<FiberAnalysis> {
    // the repeated eigenvalue is reported for the matrix as supplied, so
    // peel the rank-one factor off that same matrix
    let es = s.eigenstructure();
    let d = es
        .groups
        .iter()
        .find(|g| g.algebraic >= 2)
        .map(|g| g.value)
        .unwrap_or(ZERO);
    let m = mat_shift(s.matrix(), d);
    let colnorm = |j: usize| {
        let v: Vec3 = [m[0][j], m[1][j], m[2][j]];
        norm(&v)
    };
    let j = (0..3)
        .max_by(|&x, &y| colnorm(x).partial_cmp(&colnorm(y)).unwrap())
        .unwrap();
    let v: Vec3 = [m[0][j], m[1][j], m[2][j]];
    let r = scale(&vecmat(&vconj(&v), &m), c(1.0 / norm(&v).powi(2), 0.0));
    let q1 = ProjVec::point(r)?;
    let q2 = ProjVec::point(vconj(&v))?;
    if proj_eq(&q1, &q2, 1e-8)? {
        return Ok(FiberAnalysis::clean(FiberSet::One(q1)));
    }
    Ok(FiberAnalysis {
        set: FiberSet::Two(q1, q2),
        boundary: false,
        warning: Some("singular surface: fibers read off the rank-one factor".into()),
    })
}

/// Fibers inside a singular non-diagonalizable surface, located by a
/// deterministic multistart minimization of the restricted-conic
/// coefficients over the three coordinate charts of the base plane.
fn searched_fibers(s: &Surface11) -> Result<FiberAnalysis> {
    let a = s.rep();
    let objective = |chart: usize, x: &[f64; 4]| {
        let mut q = [ZERO; 3];
        q[chart] = ONE;
        let (i, j) = match chart {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        q[i] = c(x[0], x[1]);
        q[j] = c(x[2], x[3]);
        let q = scale(&q, c(1.0 / norm(&q), 0.0));
        let ((al, be, ga), _) = restricted_quadratic(a, &q);
        al.norm_sqr() + be.norm_sqr() + ga.norm_sqr()
    };

    let mut rng = ChaCha12Rng::seed_from_u64(0x66696265727365);
    let mut found: Vec<ProjVec> = Vec::new();
    for chart in 0..3 {
        for _ in 0..64 {
            let g1 = linalg::gaussian_c(&mut rng);
            let g2 = linalg::gaussian_c(&mut rng);
            let x0 = [0.8 * g1.re, 0.8 * g1.im, 0.8 * g2.re, 0.8 * g2.im];
            let (x, fv) = nelder_mead(|x| objective(chart, x), x0, 0.6, 260);
            if fv.sqrt() > 1e-11 {
                continue;
            }
            let mut q = [ZERO; 3];
            q[chart] = ONE;
            let (i, j) = match chart {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            q[i] = c(x[0], x[1]);
            q[j] = c(x[2], x[3]);
            let qv = ProjVec::point(q)?;
            if !matches!(fiber_preimages(s, &qv)?, FiberPreimages::WholeFiber) {
                continue;
            }
            if !found
                .iter()
                .any(|p| proj_eq(p, &qv, 1e-6).unwrap_or(false))
            {
                found.push(qv);
            }
        }
    }

    let warning = Some(
        "singular non-diagonalizable surface: fibers located by seeded numeric search".into(),
    );
    let set = match found.len() {
        0 => FiberSet::Empty,
        1 => FiberSet::One(found.pop().unwrap()),
        _ => FiberSet::Two(found[0].clone(), found[1].clone()),
    };
    Ok(FiberAnalysis {
        set,
        boundary: false,
        warning,
    })
}

/// The branch quartic evaluated at one base point, with the toric-case
/// factorization attached when it applies.
#[derive(Debug, Clone)]
pub struct BranchSample {
    pub q: ProjVec,
    pub r: C,
    /// (−−), (+−), (−+), (++) factors |q₀|α ± i|q₁|β ± |q₂| in the
    /// torus-diagonal non-real case.
    pub factors: Option<[C; 4]>,
}

/// Value of the branch quartic R at q in the triangular-frame coordinates
/// w = Uᴴ·conj(q).
fn branch_value(lam: C, a: C, b: C, cc: C, w: &Vec3) -> C {
    let (q0, q1, q2) = (w[0], w[1], w[2]);
    let (n0, n1, n2) = (q0.norm_sqr(), q1.norm_sqr(), q2.norm_sqr());
    let brace1 = n0 * (lam - ONE)
        + n1 * lam
        + c(n2, 0.0)
        + a * q0.conj() * q1
        + b * q0.conj() * q2
        + cc * q1.conj() * q2;
    let brace2 = n0 * n2 * (lam - ONE)
        + a * cc * q0.conj() * q2 * (n0 + n1 + n2)
        - a * (lam - ONE) * q0.conj() * q1 * n2
        + b * (lam - ONE) * q0.conj() * q2 * (n0 + n1)
        + cc * q1.conj() * q2 * (lam * (n0 + n1) + c(n2, 0.0));
    brace1 * brace1 - 4.0 * brace2
}

/// Square roots α = √(λ−1), β = √λ with signs fixed so Im(α)·Re(β) > 0 and
/// (Re α·Re β + Im α·Im β)/Im α > 0.
fn split_square_roots(lam: C) -> (C, C) {
    let al = (lam - ONE).sqrt();
    let be = lam.sqrt();
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            let (x, y) = (s1 * al, s2 * be);
            if x.im * y.re > 0.0 && (x.re * y.re + x.im * y.im) / x.im > 0.0 {
                return (x, y);
            }
        }
    }
    (al, be)
}

fn toric_factors(lam: C, w: &Vec3) -> [C; 4] {
    let (al, be) = split_square_roots(lam);
    let (m0, m1, m2) = (w[0].norm(), w[1].norm(), w[2].norm());
    let base = m0 * al;
    let mid = c(0.0, 1.0) * (m1 * be);
    [
        base - mid - c(m2, 0.0),
        base + mid - c(m2, 0.0),
        base - mid + c(m2, 0.0),
        base + mid + c(m2, 0.0),
    ]
}

fn is_toric(uf: &UnitaryForm) -> bool {
    let sp = 1.0f64
        .max(uf.lambda.norm())
        .max(uf.a.norm())
        .max(uf.b.norm())
        .max(uf.c.norm());
    let band = COND_TOL * sp;
    uf.a.norm() <= band && uf.b.norm() <= band && uf.c.norm() <= band && uf.lambda.im.abs() > band
}

/// Evaluate the branch quartic of the 2:1 cover at q.
pub fn branch_r(s: &Surface11, q: &ProjVec) -> Result<BranchSample> {
    flavor_guard(q, Flavor::Point)?;
    let uf = s.unitary_canonical_form()?;
    let w = matvec(&adjoint(&uf.u), &vconj(q.coords()));
    let r = branch_value(uf.lambda, uf.a, uf.b, uf.c, &w);
    let factors = if is_toric(&uf) {
        Some(toric_factors(uf.lambda, &w))
    } else {
        None
    };
    Ok(BranchSample {
        q: q.clone(),
        r,
        factors,
    })
}

/// The stacked 4×3 tangency system at q: the three pairwise combinations
/// conj(w_i)·H_j − conj(w_j)·H_i of the doubled-conic rows plus the
/// conjugate base row.  Rank drops to ≤ 2 exactly on the branch locus.
#[derive(Debug, Clone)]
pub struct RankDropSystem {
    pub rows: [[C; 3]; 4],
    pub rank: usize,
    /// Determinants after deleting row 1, 2, 3, 4; the first three equal
    /// −conj(w₂)R, −conj(w₁)R, −conj(w₀)R and the last vanishes.
    pub minors: [C; 4],
}

fn doubled_conic_rows(lam: C, a: C, b: C, cc: C, w: &Vec3) -> Mat3 {
    let (q0, q1, q2) = (w[0], w[1], w[2]);
    let mid = (lam - ONE) * q0 + a * q1 - b * q2;
    [
        [ZERO, q2, -lam * q1 + cc * q2],
        [q2, -2.0 * a * q2, mid],
        [-lam * q1 + cc * q2, mid, 2.0 * (-cc * q0 + b * q1)],
    ]
}

pub fn rank_drop_system(s: &Surface11, q: &ProjVec) -> Result<RankDropSystem> {
    flavor_guard(q, Flavor::Point)?;
    let uf = s.unitary_canonical_form()?;
    let w = matvec(&adjoint(&uf.u), &vconj(q.coords()));
    let h = doubled_conic_rows(uf.lambda, uf.a, uf.b, uf.c, &w);
    let wb = vconj(&w);
    let comb = |i: usize, j: usize| -> [C; 3] {
        [
            wb[i] * h[j][0] - wb[j] * h[i][0],
            wb[i] * h[j][1] - wb[j] * h[i][1],
            wb[i] * h[j][2] - wb[j] * h[i][2],
        ]
    };
    let rows = [comb(0, 1), comb(0, 2), comb(1, 2), wb];

    let mut minors = [ZERO; 4];
    for drop in 0..4 {
        let kept: Vec<usize> = (0..4).filter(|&i| i != drop).collect();
        let m: Mat3 = [rows[kept[0]], rows[kept[1]], rows[kept[2]]];
        minors[drop] = det(&m);
    }

    // numerical rank by column-pivoted orthogonalization (no Gram
    // squaring, so a 1e-9 relative cutoff stays meaningful)
    let mut cols: [[C; 4]; 3] =
        std::array::from_fn(|j| std::array::from_fn(|i| rows[i][j]));
    let cnorm = |v: &[C; 4]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut rank = 0;
    let mut largest = 0.0f64;
    for step in 0..3 {
        let (pi, pn) = (step..3)
            .map(|i| (i, cnorm(&cols[i])))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if step == 0 {
            largest = pn;
        }
        if pn <= 1e-9 * largest.max(f64::MIN_POSITIVE) {
            break;
        }
        rank += 1;
        cols.swap(step, pi);
        let u: [C; 4] = std::array::from_fn(|i| cols[step][i] / pn);
        for j in step + 1..3 {
            let proj: C = (0..4).map(|i| u[i].conj() * cols[j][i]).sum();
            for i in 0..4 {
                cols[j][i] -= proj * u[i];
            }
        }
    }

    Ok(RankDropSystem { rows, rank, minors })
}

/// Determinant of the 3×3 system in ℓ stacking incidence pℓ = 0, membership
/// p·A·ℓ = 0 and the conjugate-surface equation p·Aᴴ·ℓ = 0; its zero set is
/// the point image of the intersection with the conjugate surface.
pub fn conjugate_intersection_det(s: &Surface11, p: &ProjVec) -> Result<C> {
    flavor_guard(p, Flavor::Point)?;
    let a = s.rep();
    let pc = p.coords();
    let rows: Mat3 = [*pc, vecmat(pc, a), vecmat(pc, &adjoint(a))];
    Ok(det(&rows))
}

const BIDEGREE_CAP: i64 = 1_000_000;

fn quadratic_bound(a: i64, b: i64, shift: i64) -> Result<i64> {
    if a.abs() > BIDEGREE_CAP || b.abs() > BIDEGREE_CAP {
        return Err(Error::CountOverflow);
    }
    let v = a
        .checked_mul(a)
        .and_then(|x| a.checked_mul(b).and_then(|y| x.checked_add(y)))
        .and_then(|x| b.checked_mul(b).and_then(|y| x.checked_add(y)))
        .and_then(|x| x.checked_add(shift))
        .ok_or(Error::CountOverflow)?;
    Ok(v)
}

/// Largest possible number of whole fibers inside a smooth surface of
/// bidegree (a, b): a² + ab + b² − 1.
pub fn max_twistor_lines(a: i64, b: i64) -> Result<i64> {
    if a <= 0 || b <= 0 {
        return Err(Error::NonPositiveBidegree);
    }
    quadratic_bound(a, b, -1)
}

/// Largest possible number of integral (1,1)-curves in the intersection of
/// a surface of bidegree (a, b) with its conjugate: a² + ab + b².
pub fn max_11_curves_in_intersection(a: i64, b: i64) -> Result<i64> {
    if a < 0 || b < 0 {
        return Err(Error::NonPositiveBidegree);
    }
    quadratic_bound(a, b, 0)
}

/// Deterministic multistart search for zeros of the branch quartic on the
/// affine chart q₀ = 1, deduplicated projectively.
pub fn branch_zeros(s: &Surface11, starts: usize, seed: u64) -> Result<Vec<ProjVec>> {
    let uf = s.unitary_canonical_form()?;
    let uh = adjoint(&uf.u);
    let sp = 1.0f64
        .max(uf.lambda.norm())
        .max(uf.a.norm())
        .max(uf.b.norm())
        .max(uf.c.norm());
    let accept = SEARCH_TOL * (1.0 + sp).powi(2);

    let value = |x: &[f64; 4]| -> f64 {
        let q: Vec3 = [ONE, c(x[0], x[1]), c(x[2], x[3])];
        let q = scale(&q, c(1.0 / norm(&q), 0.0));
        let w = matvec(&uh, &vconj(&q));
        branch_value(uf.lambda, uf.a, uf.b, uf.c, &w).norm_sqr()
    };

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut zeros: Vec<ProjVec> = Vec::new();
    for _ in 0..starts {
        let x0 = [
            1.5 * linalg::gaussian_c(&mut rng).re,
            1.5 * linalg::gaussian_c(&mut rng).re,
            1.5 * linalg::gaussian_c(&mut rng).re,
            1.5 * linalg::gaussian_c(&mut rng).re,
        ];
        let (x1, fv1) = nelder_mead(value, x0, 0.7, 320);
        // re-descend with a tight simplex to shake off stalled geometry
        let (x2, fv2) = nelder_mead(value, x1, 0.02, 160);
        let (x, fv) = if fv2 < fv1 { (x2, fv2) } else { (x1, fv1) };
        if fv.sqrt() > accept {
            continue;
        }
        let qv = ProjVec::point([ONE, c(x[0], x[1]), c(x[2], x[3])])?;
        if !zeros
            .iter()
            .any(|z| proj_eq(z, &qv, 1e-6).unwrap_or(false))
        {
            zeros.push(qv);
        }
    }
    Ok(zeros)
}

/// Minimal Nelder–Mead simplex descent on ℝ⁴.
fn nelder_mead<F: Fn(&[f64; 4]) -> f64>(
    f: F,
    x0: [f64; 4],
    step: f64,
    iters: usize,
) -> ([f64; 4], f64) {
    const N: usize = 4;
    let mut simplex: Vec<[f64; 4]> = vec![x0];
    for i in 0..N {
        let mut v = x0;
        v[i] += step;
        simplex.push(v);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=N).collect();
        order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
        let (best, worst, second) = (order[0], order[N], order[N - 1]);

        let mut centroid = [0.0; N];
        for &i in order.iter().take(N) {
            for k in 0..N {
                centroid[k] += simplex[i][k] / N as f64;
            }
        }
        let shifted = |t: f64| -> [f64; 4] {
            let mut v = [0.0; N];
            for k in 0..N {
                v[k] = centroid[k] + t * (centroid[k] - simplex[worst][k]);
            }
            v
        };

        let refl = shifted(1.0);
        let fr = f(&refl);
        if fr < vals[best] {
            let exp = shifted(2.0);
            let fe = f(&exp);
            if fe < fr {
                simplex[worst] = exp;
                vals[worst] = fe;
            } else {
                simplex[worst] = refl;
                vals[worst] = fr;
            }
        } else if fr < vals[second] {
            simplex[worst] = refl;
            vals[worst] = fr;
        } else {
            let con = shifted(-0.5);
            let fc = f(&con);
            if fc < vals[worst] {
                simplex[worst] = con;
                vals[worst] = fc;
            } else {
                for &i in order.iter().skip(1) {
                    for k in 0..N {
                        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                    }
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let mut bi = 0;
    for i in 1..=N {
        if vals[i] < vals[bi] {
            bi = i;
        }
    }
    (simplex[bi], vals[bi])
}

impl Serialize for FiberAnalysis {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let extra = usize::from(self.boundary) + usize::from(self.warning.is_some());
        match &self.set {
            FiberSet::Empty => {
                let mut st = ser.serialize_struct("FiberAnalysis", 1 + extra)?;
                st.serialize_field("type", "empty")?;
                finish_analysis(st, self)
            }
            FiberSet::One(q) => {
                let mut st = ser.serialize_struct("FiberAnalysis", 2 + extra)?;
                st.serialize_field("type", "one")?;
                st.serialize_field("point", q)?;
                finish_analysis(st, self)
            }
            FiberSet::Two(q1, q2) => {
                let mut st = ser.serialize_struct("FiberAnalysis", 2 + extra)?;
                st.serialize_field("type", "two")?;
                st.serialize_field("points", &[q1, q2])?;
                finish_analysis(st, self)
            }
            FiberSet::Circle(cl) => {
                let mut st = ser.serialize_struct("FiberAnalysis", 4 + extra)?;
                st.serialize_field("type", "circle")?;
                st.serialize_field("lambda", &cl.lambda)?;
                st.serialize_field("chart", &cl.chart)?;
                st.serialize_field("modulus", &cl.modulus)?;
                finish_analysis(st, self)
            }
        }
    }
}

fn finish_analysis<S: SerializeStruct>(
    mut st: S,
    fa: &FiberAnalysis,
) -> std::result::Result<S::Ok, S::Error> {
    if fa.boundary {
        st.serialize_field("boundary", &true)?;
    }
    if let Some(w) = &fa.warning {
        st.serialize_field("warning", w)?;
    }
    st.end()
}

impl Serialize for BranchSample {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("BranchSample", 3)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("r", &[self.r.re, self.r.im])?;
        match &self.factors {
            Some(fs) => {
                let wire: Vec<[f64; 2]> = fs.iter().map(|z| [z.re, z.im]).collect();
                st.serialize_field("factors", &wire)?;
            }
            None => st.serialize_field("factors", &Option::<Vec<[f64; 2]>>::None)?,
        }
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob, gaussian_mat3, gaussian_vec3, mat_identity, outer};
    use crate::proj::random_from_rng;

    fn surf(m: [[f64; 2]; 9]) -> Surface11 {
        let a: Mat3 = [
            [c(m[0][0], m[0][1]), c(m[1][0], m[1][1]), c(m[2][0], m[2][1])],
            [c(m[3][0], m[3][1]), c(m[4][0], m[4][1]), c(m[5][0], m[5][1])],
            [c(m[6][0], m[6][1]), c(m[7][0], m[7][1]), c(m[8][0], m[8][1])],
        ];
        Surface11::from_matrix(a).unwrap()
    }

    fn diag_surface(l2: C) -> Surface11 {
        Surface11::from_matrix([
            [ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO],
            [ZERO, ZERO, l2],
        ])
        .unwrap()
    }

    fn triangular_surface(lam: C, a: C, b: C, cc: C) -> Surface11 {
        Surface11::from_matrix([[ZERO, a, b], [ZERO, ONE, cc], [ZERO, ZERO, lam]]).unwrap()
    }

    fn pt(x: [f64; 3]) -> ProjVec {
        ProjVec::point([c(x[0], 0.0), c(x[1], 0.0), c(x[2], 0.0)]).unwrap()
    }

    fn whole_fiber_on(s: &Surface11, q: &ProjVec) -> bool {
        let fiber = twistor_fiber(q).unwrap();
        (0..20).all(|k| {
            let t = Param::from(c((k as f64 * 0.37).cos(), (k as f64 * 0.59).sin()) * 1.3);
            let x = fiber.sample(t).unwrap();
            s.contains(&x)
        })
    }

    #[test]
    fn norm_quadratic_fixtures() {
        let sols = solve_norm_quadratic(c(1.5, 0.0), c(0.5, 0.0)).unwrap();
        assert_eq!(sols.len(), 2);
        assert!((sols[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((sols[1] - c(-0.5, 0.0)).norm() < 1e-12);

        let one = solve_norm_quadratic(ONE, c(0.25, 0.0)).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0] - c(-0.5, 0.0)).norm() < 1e-12);

        assert!(solve_norm_quadratic(ONE, ONE).unwrap().is_empty());
        assert!(matches!(
            solve_norm_quadratic(ZERO, ONE),
            Err(Error::DegenerateParameter)
        ));

        // residual of every returned root
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let e = linalg::gaussian_c(&mut rng);
            let f = linalg::gaussian_c(&mut rng);
            if e.norm() < 1e-3 {
                continue;
            }
            for z in solve_norm_quadratic(e, f).unwrap() {
                assert!((c(z.norm_sqr(), 0.0) + e * z + f).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn conic_matrix_displayed_entries() {
        let lam = c(1.7, 0.0);
        let s = diag_surface(lam);
        let f = frob(&[[ZERO, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, lam]]);
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..10 {
            let q = random_from_rng(&mut rng, Flavor::Point);
            let qc = *q.coords();
            let cm = conic_matrix(&s, &q).unwrap();
            // doubled-conic matrix on the diagonal representative
            let disp: Mat3 = [
                [ZERO, qc[2], -lam * qc[1]],
                [qc[2], ZERO, (lam - ONE) * qc[0]],
                [-lam * qc[1], (lam - ONE) * qc[0], ZERO],
            ];
            for i in 0..3 {
                for j in 0..3 {
                    assert!((cm.matrix()[i][j] * f - disp[i][j]).norm() < 1e-9);
                    assert!((cm.matrix()[i][j] - cm.matrix()[j][i]).norm() < 1e-14);
                }
            }
            // the displayed matrix's own determinant: −2λ(λ−1)q₀q₁q₂
            let dd = det(&disp);
            let expect = -2.0 * lam * (lam - ONE) * qc[0] * qc[1] * qc[2];
            assert!((dd - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn conic_matrix_determinant_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..10 {
            let s = Surface11::from_matrix(gaussian_mat3(&mut rng)).unwrap();
            let q = random_from_rng(&mut rng, Flavor::Point);
            let cm = conic_matrix(&s, &q).unwrap();
            for _ in 0..6 {
                let p = gaussian_vec3(&mut rng);
                let rows: Mat3 = [p, vecmat(&p, s.rep()), *q.coords()];
                // pCpᵀ equals twice the stacked determinant
                assert!((cm.eval(&p) - 2.0 * det(&rows)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn preimages_whole_fiber_on_circle() {
        let s = diag_surface(c(2.0, 0.0));
        for k in 0..12 {
            let th = k as f64 * std::f64::consts::PI / 6.0;
            let q = ProjVec::point([ONE, ZERO, c(th.cos(), th.sin())]).unwrap();
            assert!(matches!(
                fiber_preimages(&s, &q).unwrap(),
                FiberPreimages::WholeFiber
            ));
        }
    }

    #[test]
    fn preimages_two_point_fixture() {
        let s = diag_surface(c(2.0, 0.0));
        let q = pt([1.0, 1.0, 1.0]);
        let FiberPreimages::Points(flags) = fiber_preimages(&s, &q).unwrap() else {
            panic!("expected isolated points");
        };
        assert_eq!(flags.len(), 2);
        // chart roots of 2x² + 2x − 1 = 0 with p = (x, 1, −x−1)
        let r = 3.0f64.sqrt();
        let expected: Vec<ProjVec> = [(-1.0 + r) / 2.0, (-1.0 - r) / 2.0]
            .iter()
            .map(|&x| pt([x, 1.0, -x - 1.0]))
            .collect();
        for e in &expected {
            assert!(flags
                .iter()
                .any(|f| proj_eq(f.p(), e, 1e-9).unwrap()));
        }
        for f in &flags {
            assert!(s.contains(f));
            assert!(proj_eq(&f.twistor_projection(), &q, 1e-9).unwrap());
        }
    }

    #[test]
    fn preimages_round_trip_random() {
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        for _ in 0..40 {
            let s = Surface11::from_matrix(gaussian_mat3(&mut rng)).unwrap();
            let q = random_from_rng(&mut rng, Flavor::Point);
            let FiberPreimages::Points(flags) = fiber_preimages(&s, &q).unwrap() else {
                continue;
            };
            assert_eq!(flags.len(), 2);
            for f in &flags {
                assert!(s.contains(f));
                assert!(proj_eq(&f.twistor_projection(), &q, 1e-8).unwrap());
            }
        }
    }

    #[test]
    fn fiber_fixture_two() {
        let s = surf([
            [0.0, 0.0],
            [3.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [2.0, 0.0],
        ]);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Two(q1, q2) = &fa.set else {
            panic!("expected two fibers, got {:?}", fa.set);
        };
        assert!(proj_eq(q1, &pt([1.0, -1.0, 0.0]), 1e-9).unwrap());
        assert!(proj_eq(q2, &pt([2.0, -1.0, 0.0]), 1e-9).unwrap());
        assert!(!fa.boundary);
        assert!(whole_fiber_on(&s, q1));
        assert!(whole_fiber_on(&s, q2));
    }

    #[test]
    fn fiber_fixture_one_boundary() {
        let a = 2.0 * 2.0f64.sqrt();
        let s = triangular_surface(c(2.0, 0.0), c(a, 0.0), ZERO, ZERO);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::One(q) = &fa.set else {
            panic!("expected one fiber, got {:?}", fa.set);
        };
        assert!(proj_eq(q, &pt([2.0f64.sqrt(), -1.0, 0.0]), 1e-9).unwrap());
        assert!(fa.boundary);
        assert!(whole_fiber_on(&s, q));
    }

    #[test]
    fn fiber_fixture_empty() {
        let s = triangular_surface(c(2.0, 0.0), c(2.0, 0.0), ZERO, ZERO);
        let fa = twistor_fibers_in(&s).unwrap();
        assert!(matches!(fa.set, FiberSet::Empty));
        assert!(fa.warning.is_some());
    }

    #[test]
    fn fiber_circle_cases() {
        // λ > 1: vanishing middle coordinate, modulus √(λ−1)
        let s = diag_surface(c(2.0, 0.0));
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Circle(cl) = &fa.set else {
            panic!("expected circle, got {:?}", fa.set);
        };
        assert!((cl.lambda - 2.0).abs() < 1e-12);
        assert_eq!(cl.chart, 1);
        assert!((cl.modulus - 1.0).abs() < 1e-12);
        assert!(s.is_j_invariant());
        for k in 0..20 {
            let q = cl.sample(k as f64 * 0.33).unwrap();
            assert!(matches!(
                fiber_preimages(&s, &q).unwrap(),
                FiberPreimages::WholeFiber
            ));
        }

        // eigenvalue ratio in (0,1): the canonical frame reorders so the
        // cross-ratio exceeds 1 again; the circle must come back through
        // the frame onto {q₂ = 0}
        let s = diag_surface(c(0.5, 0.0));
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Circle(cl) = &fa.set else {
            panic!("expected circle");
        };
        assert!((cl.lambda - 2.0).abs() < 1e-12);
        assert!((cl.modulus - 1.0).abs() < 1e-12);
        for k in 0..10 {
            let q = cl.sample(1.0 + k as f64).unwrap();
            assert!(q.coords()[2].norm() < 1e-12);
            assert!(matches!(
                fiber_preimages(&s, &q).unwrap(),
                FiberPreimages::WholeFiber
            ));
        }

        // negative eigenvalue ratio: the triangular frame reorders, the
        // circle must still map back through it
        let s = diag_surface(c(-1.0, 0.0));
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Circle(cl) = &fa.set else {
            panic!("expected circle");
        };
        assert!((cl.lambda - 2.0).abs() < 1e-9);
        for k in 0..10 {
            let q = cl.sample(0.7 * k as f64).unwrap();
            assert!(matches!(
                fiber_preimages(&s, &q).unwrap(),
                FiberPreimages::WholeFiber
            ));
        }
    }

    #[test]
    fn fiber_toric_empty() {
        let s = diag_surface(c(0.0, 1.0));
        let fa = twistor_fibers_in(&s).unwrap();
        assert!(matches!(fa.set, FiberSet::Empty));
        assert!(fa.warning.is_none());
    }

    #[test]
    fn fiber_synthesized_single_conditions() {
        let lam = c(2.0, 1.0);

        // both b and c nonzero
        let (b, cc) = (c(1.3, -0.4), c(0.7, 1.1));
        let a = (b.norm_sqr() * (ONE - lam) - cc.norm_sqr() * lam) / (b.conj() * cc);
        let s = triangular_surface(lam, a, b, cc);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::One(q) = &fa.set else {
            panic!("expected one fiber (b,c case), got {:?}", fa.set);
        };
        let expect = ProjVec::point(vconj(&[b, cc, ZERO])).unwrap();
        assert!(proj_eq(q, &expect, 1e-8).unwrap());
        assert!(whole_fiber_on(&s, q));

        // both a and c nonzero
        let (a, cc) = (c(0.9, 0.3), c(-1.2, 0.5));
        let b = ((a.norm_sqr() * (lam - ONE) - c(cc.norm_sqr(), 0.0)) / (a * cc)).conj();
        let s = triangular_surface(lam, a, b, cc);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::One(q) = &fa.set else {
            panic!("expected one fiber (a,c case), got {:?}", fa.set);
        };
        let w = [ONE, -a.conj(), -a.conj() * (lam - ONE) / cc];
        let expect = ProjVec::point(vconj(&w)).unwrap();
        assert!(proj_eq(q, &expect, 1e-8).unwrap());
        assert!(whole_fiber_on(&s, q));

        // both a and b nonzero
        let (a, b) = (c(1.1, -0.7), c(0.8, 0.2));
        let cc = (a.norm_sqr() * lam + c(b.norm_sqr(), 0.0)) / (a * b.conj());
        let s = triangular_surface(lam, a, b, cc);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::One(q) = &fa.set else {
            panic!("expected one fiber (a,b case), got {:?}", fa.set);
        };
        let w = [ZERO, a * cc - b, a * lam];
        let expect = ProjVec::point(vconj(&w)).unwrap();
        assert!(proj_eq(q, &expect, 1e-8).unwrap());
        assert!(whole_fiber_on(&s, q));
    }

    #[test]
    fn fiber_synthesized_pair_vanishing() {
        let lam = c(2.0, 1.0);

        // only a: discriminant strictly positive gives two fibers
        let t = 6.0 + 40.0f64.sqrt() + 3.0;
        let a = c(t.sqrt(), 0.0) * c(0.4f64.cos(), 0.4f64.sin());
        let s = triangular_surface(lam, a, ZERO, ZERO);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Two(q1, q2) = &fa.set else {
            panic!("expected two fibers (a case), got {:?}", fa.set);
        };
        assert!(whole_fiber_on(&s, q1));
        assert!(whole_fiber_on(&s, q2));

        // only b
        let b = c(1.7 * 0.9f64.cos(), 1.7 * 0.9f64.sin());
        let s = triangular_surface(lam, ZERO, b, ZERO);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Two(q1, q2) = &fa.set else {
            panic!("expected two fibers (b case), got {:?}", fa.set);
        };
        assert!(whole_fiber_on(&s, q1));
        assert!(whole_fiber_on(&s, q2));

        // only c
        let cc = c(3.1 * 0.6f64.cos(), -3.1 * 0.6f64.sin());
        let s = triangular_surface(lam, ZERO, ZERO, cc);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Two(q1, q2) = &fa.set else {
            panic!("expected two fibers (c case), got {:?}", fa.set);
        };
        assert!(whole_fiber_on(&s, q1));
        assert!(whole_fiber_on(&s, q2));
    }

    #[test]
    fn single_conditions_mutually_exclusive() {
        let mut rng = ChaCha12Rng::seed_from_u64(71);
        for _ in 0..300 {
            let lam = linalg::gaussian_c(&mut rng);
            let a = linalg::gaussian_c(&mut rng);
            let b = linalg::gaussian_c(&mut rng);
            let cc = linalg::gaussian_c(&mut rng);
            if a.norm() < 0.1 || b.norm() < 0.1 || cc.norm() < 0.1 {
                continue;
            }
            let sp = 1.0f64
                .max(lam.norm())
                .max(a.norm())
                .max(b.norm())
                .max(cc.norm());
            let tol3 = COND_TOL * sp.powi(3);
            let e1 = b.norm_sqr() * (ONE - lam) - cc.norm_sqr() * lam - a * b.conj() * cc;
            let e2 = a.norm_sqr() * (ONE - lam) + c(cc.norm_sqr(), 0.0) + a * b.conj() * cc;
            let e3 = a.norm_sqr() * lam + c(b.norm_sqr(), 0.0) - a * b.conj() * cc;
            let hits = [e1, e2, e3].iter().filter(|e| e.norm() <= tol3).count();
            assert!(hits <= 1);
        }
    }

    #[test]
    fn branch_value_hermitian_oracle() {
        // for diag(0,1,2) on unit vectors R = (1+n₁)² − 4n₀n₂, a real
        // quantity vanishing exactly on the circle n₁ = 0, n₀ = n₂
        let s = diag_surface(c(2.0, 0.0));
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..500 {
            let q = random_from_rng(&mut rng, Flavor::Point);
            let qc = q.coords();
            let (n0, n1, n2) = (qc[0].norm_sqr(), qc[1].norm_sqr(), qc[2].norm_sqr());
            let expect = (1.0 + n1) * (1.0 + n1) - 4.0 * n0 * n2;
            let bs = branch_r(&s, &q).unwrap();
            assert!(bs.r.im.abs() < 1e-12);
            assert!((bs.r.re - expect).abs() < 1e-12);
            assert!(bs.r.re > -1e-12);
            assert!(bs.factors.is_none());
        }
        assert!(branch_r(&s, &pt([0.0, 1.0, 1.0])).unwrap().r.norm() > 1e-3);
        assert!(branch_r(&s, &pt([1.0, 1.0, 0.0])).unwrap().r.norm() > 1e-3);
        // [1:0:1] sits on the circle of contained fibers
        assert!(branch_r(&s, &pt([1.0, 0.0, 1.0])).unwrap().r.norm() < 1e-14);
    }

    #[test]
    fn branch_toric_factorization_and_torus_invariance() {
        let s = diag_surface(c(0.0, 1.0));
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..300 {
            let q = random_from_rng(&mut rng, Flavor::Point);
            let bs = branch_r(&s, &q).unwrap();
            let fs = bs.factors.expect("toric case must factor");
            let prod = fs[0] * fs[1] * fs[2] * fs[3];
            assert!((bs.r - prod).norm() < 1e-9 * (1.0 + bs.r.norm()));

            // torus phases on the last two coordinates leave R unchanged
            let qc = *q.coords();
            for k in 0..10 {
                let (t1, t2) = (0.61 * k as f64, 1.13 * k as f64);
                let rot = ProjVec::point([
                    qc[0],
                    qc[1] * c(t1.cos(), t1.sin()),
                    qc[2] * c(t2.cos(), t2.sin()),
                ])
                .unwrap();
                let br = branch_r(&s, &rot).unwrap();
                assert!((br.r - bs.r).norm() < 1e-9 * (1.0 + bs.r.norm()));
            }
        }
    }

    #[test]
    fn branch_zeros_locate_coincident_preimages() {
        let s = diag_surface(c(0.0, 1.0));
        let zeros = branch_zeros(&s, 48, 4242).unwrap();
        assert!(zeros.len() >= 10);
        for q in &zeros {
            let bs = branch_r(&s, q).unwrap();
            assert!(bs.r.norm() < 1e-8);
            let fs = bs.factors.unwrap();
            assert!(fs[0].norm() < 1e-4);
            assert!(fs[1].norm() > 1e-3 && fs[2].norm() > 1e-3 && fs[3].norm() > 1e-3);

            // the double cover degenerates exactly over these points
            let FiberPreimages::Points(flags) = fiber_preimages(&s, q).unwrap() else {
                panic!("zero of the quartic is not a whole fiber");
            };
            if flags.len() == 2 {
                assert!(flags[0].p().dist(flags[1].p()) < 1e-4);
            }

            let rd = rank_drop_system(&s, q).unwrap();
            assert!(rd.rank <= 2);
        }
    }

    #[test]
    fn rank_drop_minor_identities() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        for _ in 0..100 {
            // smooth surface with a controlled triangular frame
            let lam = c(2.0, 0.0) + linalg::gaussian_c(&mut rng);
            if (lam - ONE).norm() < 0.3 || lam.norm() < 0.3 {
                continue;
            }
            let a = linalg::gaussian_c(&mut rng);
            let b = linalg::gaussian_c(&mut rng);
            let cc = linalg::gaussian_c(&mut rng);
            let u = linalg::random_unitary(&mut rng);
            let t: Mat3 = [[ZERO, a, b], [ZERO, ONE, cc], [ZERO, ZERO, lam]];
            let m = mat_mul(&u, &mat_mul(&t, &adjoint(&u)));
            let s = Surface11::from_matrix(m).unwrap();
            let q = random_from_rng(&mut rng, Flavor::Point);

            let rd = rank_drop_system(&s, &q).unwrap();
            let bs = branch_r(&s, &q).unwrap();
            let uf = s.unitary_canonical_form().unwrap();
            let w = matvec(&adjoint(&uf.u), &vconj(q.coords()));
            let scale_r = 1.0 + bs.r.norm();
            assert!((rd.minors[0] + w[2].conj() * bs.r).norm() < 1e-8 * scale_r);
            assert!((rd.minors[1] + w[1].conj() * bs.r).norm() < 1e-8 * scale_r);
            assert!((rd.minors[2] + w[0].conj() * bs.r).norm() < 1e-8 * scale_r);
            assert!(rd.minors[3].norm() < 1e-10 * scale_r);
            assert_eq!(rd.rank, 3);
        }
    }

    #[test]
    fn conjugate_intersection_det_fixture() {
        let s = surf([
            [0.0, 0.0],
            [3.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [2.0, 0.0],
        ]);
        // det is proportional to p₂(p₀−p₁)(2p₀−p₁)
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let mut ratio: Option<C> = None;
        for _ in 0..20 {
            let p = random_from_rng(&mut rng, Flavor::Point);
            let pc = *p.coords();
            let fac = pc[2] * (pc[0] - pc[1]) * (2.0 * pc[0] - pc[1]);
            if fac.norm() < 1e-3 {
                continue;
            }
            let d = conjugate_intersection_det(&s, &p).unwrap();
            let r = d / fac;
            if let Some(r0) = ratio {
                assert!((r - r0).norm() < 1e-9 * r0.norm());
            } else {
                assert!(r.norm() > 1e-6);
                ratio = Some(r);
            }
        }

        // the four displayed intersection points annihilate it
        for p in [
            pt([1.0, 1.0, 0.0]),
            pt([0.0, 0.0, 1.0]),
            pt([1.0, 2.0, 0.0]),
        ] {
            assert!(conjugate_intersection_det(&s, &p).unwrap().norm() < 1e-12);
        }

        // flags on a contained fiber lie in both the surface and its
        // conjugate, so their point components are zeros as well
        for base in [pt([1.0, -1.0, 0.0]), pt([2.0, -1.0, 0.0])] {
            let fiber = twistor_fiber(&base).unwrap();
            for k in 0..20 {
                let x = fiber
                    .sample(Param::from(c((0.3 * k as f64).cos(), (0.5 * k as f64).sin())))
                    .unwrap();
                assert!(s.contains(&x));
                assert!(conjugate_intersection_det(&s, x.p()).unwrap().norm() < 1e-9);
            }
        }
    }

    #[test]
    fn bidegree_bounds() {
        assert_eq!(max_twistor_lines(1, 1).unwrap(), 2);
        assert_eq!(max_twistor_lines(2, 1).unwrap(), 6);
        assert_eq!(max_twistor_lines(1, 2).unwrap(), 6);
        assert_eq!(max_11_curves_in_intersection(1, 1).unwrap(), 3);
        assert_eq!(max_11_curves_in_intersection(0, 0).unwrap(), 0);
        assert!(matches!(
            max_twistor_lines(0, 1),
            Err(Error::NonPositiveBidegree)
        ));
        assert!(matches!(
            max_11_curves_in_intersection(-1, 2),
            Err(Error::NonPositiveBidegree)
        ));
        assert!(matches!(
            max_twistor_lines(2_000_000, 1),
            Err(Error::CountOverflow)
        ));
    }

    #[test]
    fn rank_one_singular_fibers() {
        // Hermitian reducible surface: both fiber bases coincide
        let s = surf([
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
        ]);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::One(q) = &fa.set else {
            panic!("expected one fiber, got {:?}", fa.set);
        };
        assert!(proj_eq(q, &pt([0.0, 0.0, 1.0]), 1e-9).unwrap());
        assert!(fa.warning.is_none());
        assert!(whole_fiber_on(&s, q));

        // non-Hermitian reducible: v·r with r·v ≠ 0 gives two distinct bases
        let v: Vec3 = [ONE, c(0.0, 1.0), ZERO];
        let r: Vec3 = [ONE, ZERO, ONE];
        let m = mat_add(&mat_identity(), &outer(&v, &r));
        let s = Surface11::from_matrix(m).unwrap();
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Two(q1, q2) = &fa.set else {
            panic!("expected two fibers, got {:?}", fa.set);
        };
        assert!(fa.warning.is_some());
        let e1 = ProjVec::point(r).unwrap();
        let e2 = ProjVec::point(vconj(&v)).unwrap();
        assert!(proj_eq(q1, &e1, 1e-8).unwrap() || proj_eq(q2, &e1, 1e-8).unwrap());
        assert!(proj_eq(q1, &e2, 1e-8).unwrap() || proj_eq(q2, &e2, 1e-8).unwrap());
        assert!(whole_fiber_on(&s, q1));
        assert!(whole_fiber_on(&s, q2));

        // nilpotent rank-one: bases are the row and the conjugate column
        let m = outer(&v, &[ZERO, ZERO, ONE]);
        let s = Surface11::from_matrix(m).unwrap();
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Two(q1, q2) = &fa.set else {
            panic!("expected two fibers, got {:?}", fa.set);
        };
        assert!(fa.warning.is_some());
        assert!(whole_fiber_on(&s, q1));
        assert!(whole_fiber_on(&s, q2));
    }

    #[test]
    fn searched_singular_fibers() {
        // one-Jordan-chain nilpotent: single fiber over the middle axis
        let s = surf([
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
        ]);
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::One(q) = &fa.set else {
            panic!("expected one fiber, got {:?}", fa.set);
        };
        assert!(proj_eq(q, &pt([0.0, 1.0, 0.0]), 1e-6).unwrap());
        assert!(fa.warning.is_some());
        assert!(whole_fiber_on(&s, q));

        // double eigenvalue with a single chain: no contained fibers
        let s = surf([
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
        ]);
        let fa = twistor_fibers_in(&s).unwrap();
        assert!(matches!(fa.set, FiberSet::Empty));
        assert!(fa.warning.is_some());
    }

    #[test]
    fn negative_containment_oracle() {
        let s = diag_surface(c(2.0, 0.0));
        let mut rng = ChaCha12Rng::seed_from_u64(57);
        for _ in 0..100 {
            let q = random_from_rng(&mut rng, Flavor::Point);
            // away from the circle locus, some fiber sample must escape
            let qc = q.coords();
            let on_circle = qc[1].norm() < 1e-3
                && (qc[2].norm() / qc[0].norm().max(1e-12) - 1.0).abs() < 1e-3;
            if on_circle {
                continue;
            }
            assert!(!whole_fiber_on(&s, &q));
        }
    }

    #[test]
    fn fiber_projection_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(61);
        for _ in 0..20 {
            let q = random_from_rng(&mut rng, Flavor::Point);
            let fiber = twistor_fiber(&q).unwrap();
            for k in 0..20 {
                let t = if k == 19 {
                    Param::Infinity
                } else {
                    Param::from(linalg::gaussian_c(&mut rng))
                };
                let x = fiber.sample(t).unwrap();
                assert!(proj_eq(&x.twistor_projection(), &q, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn serde_shapes() {
        let s = surf([
            [0.0, 0.0],
            [3.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [2.0, 0.0],
        ]);
        let fa = twistor_fibers_in(&s).unwrap();
        let v = serde_json::to_value(&fa).unwrap();
        assert_eq!(v["type"], "two");
        assert_eq!(v["points"].as_array().unwrap().len(), 2);
        assert!(v.get("warning").is_none());

        let s = diag_surface(c(2.0, 0.0));
        let fa = twistor_fibers_in(&s).unwrap();
        let v = serde_json::to_value(&fa).unwrap();
        assert_eq!(v["type"], "circle");
        assert_eq!(v["lambda"].as_f64().unwrap(), 2.0);

        let bs = branch_r(&s, &pt([1.0, 1.0, 1.0])).unwrap();
        let v = serde_json::to_value(&bs).unwrap();
        assert!(v["r"].as_array().unwrap().len() == 2);
        assert!(v["factors"].is_null());
    }
}
