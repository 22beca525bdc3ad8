//! Surfaces in the flag cut out by a bilinear equation pAℓ = 0 for a 3×3
//! matrix A, defined up to the pencil αA + βI: membership, eigenstructure,
//! the five projective canonical classes, singular loci, unitary normal
//! forms, and base-point / branch-discriminant utilities for the covers
//! defined by a triple of homogeneous forms.

use std::fmt;

use num_complex::Complex64 as C;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curves::Curve11;
use crate::flag::FlagPoint;
use crate::linalg::{
    self, adjoint, c, frob, mat_scale, mat_shift, matvec, norm, trace, vecmat, Mat3, Vec3, ONE,
    ZERO,
};
use crate::proj::{Flavor, ProjVec};
use crate::{Error, Result};

/// Relative Frobenius threshold below which a matrix counts as scalar.
const SCALAR_TOL: f64 = 1e-9;
/// Membership threshold: |pAℓ| < MEMBER_TOL·‖p‖·‖A‖_F·‖ℓ‖.
const MEMBER_TOL: f64 = 1e-9;
/// A triple eigenvalue of the trace-free normalized part forces both
/// depressed-cubic coefficients to vanish.
const TRIPLE_Q_TOL: f64 = 1e-10;
const TRIPLE_P_TOL: f64 = 1e-7;
/// A double (non-triple) eigenvalue forces the depressed cubic to vanish
/// at one of its two critical points.
const DOUBLE_TOL: f64 = 1e-11;
/// Relative singular-value cutoff when counting geometric multiplicity.
const RANK_TOL: f64 = 1e-6;

// ---- the surface type ----

/// A (1,1)-surface S_A = {(p,ℓ) ∈ F : pAℓ = 0}. The matrix is kept as
/// given together with a normalized pencil representative: the first
/// eigenvalue in (Re, Im)-ascending order is shifted to 0 and the result
/// is scaled to Frobenius norm 1. Two surfaces compare equal exactly when
/// their matrices span the same pencil {αA + βI}.
#[derive(Debug, Clone)]
pub struct Surface11 {
    raw: Mat3,
    rep: Mat3,
}

impl Surface11 {
    /// Build a surface from its matrix. Scalar matrices are rejected:
    /// for A = βI the defining equation degenerates to β·pℓ = 0, which
    /// cuts out all of the flag or nothing.
    pub fn from_matrix(a: Mat3) -> Result<Self> {
        let na = frob(&a);
        if !na.is_finite() {
            return Err(Error::Malformed("matrix entries must be finite".into()));
        }
        let traceless = mat_shift(&a, trace(&a) / c(3.0, 0.0));
        if !(frob(&traceless) > SCALAR_TOL * na.max(f64::MIN_POSITIVE)) {
            return Err(Error::ScalarMatrix);
        }
        let first = analyze(&a).raw_values()[0];
        let shifted = mat_shift(&a, first);
        let rep = mat_scale(&shifted, ONE / c(frob(&shifted), 0.0));
        Ok(Surface11 { raw: a, rep })
    }

    /// The matrix exactly as supplied.
    pub fn matrix(&self) -> &Mat3 {
        &self.raw
    }

    /// The normalized pencil representative (first eigenvalue 0,
    /// Frobenius norm 1).
    pub fn rep(&self) -> &Mat3 {
        &self.rep
    }

    /// Membership test |pAℓ| < 1e-9·‖p‖·‖A‖·‖ℓ‖; flag coordinates are
    /// unit vectors, so the bound is relative to the matrix alone. The
    /// test is pencil-invariant on the flag because pℓ = 0 there.
    pub fn contains(&self, x: &FlagPoint) -> bool {
        let pa = vecmat(x.p().coords(), &self.rep);
        linalg::dot(&pa, x.l().coords()).norm() < MEMBER_TOL
    }

    /// Pencil equality: the other matrix is α·(this) + βI with α ≠ 0.
    pub fn same_surface(&self, other: &Surface11) -> bool {
        let (_, _, res) = linalg::pencil_fit(&other.raw, &self.raw);
        res <= 1e-9 * frob(&other.raw)
    }

    /// Eigenvalues with multiplicities, projective left/right eigenvectors,
    /// and deficiency flags, for the matrix as supplied.
    pub fn eigenstructure(&self) -> EigenStructure {
        let an = analyze(&self.raw);
        let groups = match an.kind {
            SpectrumKind::Distinct(nu) => nu
                .iter()
                .map(|&v| self.eigen_group(an.raw(v), 1, 1))
                .collect(),
            SpectrumKind::Double { d, s } => {
                let geo = geometric_mult(&mat_shift(&an.n, d));
                let mut g = vec![
                    self.eigen_group(an.raw(d), 2, geo),
                    self.eigen_group(an.raw(s), 1, 1),
                ];
                g.sort_by(|x, y| (x.value.re, x.value.im).partial_cmp(&(y.value.re, y.value.im)).unwrap());
                g
            }
            SpectrumKind::Triple => {
                let geo = geometric_mult(&an.n);
                vec![self.eigen_group(an.shift, 3, geo)]
            }
        };
        let min_gap = match an.kind {
            SpectrumKind::Distinct(nu) => {
                let w = [nu[0], nu[1], nu[2]].map(|v| an.raw(v));
                (w[0] - w[1])
                    .norm()
                    .min((w[0] - w[2]).norm())
                    .min((w[1] - w[2]).norm())
            }
            SpectrumKind::Double { d, s } => (an.raw(d) - an.raw(s)).norm(),
            SpectrumKind::Triple => 0.0,
        };
        EigenStructure { groups, min_gap }
    }

    fn eigen_group(&self, value: C, algebraic: usize, geometric: usize) -> EigenGroup {
        let m = mat_shift(&self.raw, value);
        let (left, right) = if geometric >= 2 {
            let (l1, l2) = linalg::null2(&linalg::transpose(&m));
            let (r1, r2) = linalg::null2(&m);
            (
                vec![point_of(&l1), point_of(&l2)],
                vec![line_of(&r1), line_of(&r2)],
            )
        } else {
            (
                vec![point_of(&linalg::left_null_vector(&m))],
                vec![line_of(&linalg::null_vector(&m))],
            )
        };
        EigenGroup {
            value,
            algebraic,
            geometric,
            left,
            right,
            deficient: geometric < algebraic,
        }
    }

    /// The projective canonical class: decide the Jordan type of the pencil
    /// and produce an invertible B with B·A·B⁻¹ in the pencil of
    /// [`canonical_matrix`] of the returned tag. For three distinct
    /// eigenvalues the parameter λ is reduced to the representative of its
    /// six-element cross-ratio orbit minimizing (|λ−½|, Re λ, Im λ)
    /// lexicographically.
    pub fn classify(&self) -> CanonicalClass {
        let an = analyze(&self.raw);
        match an.kind {
            SpectrumKind::Distinct(nu) => {
                let x: Vec<Vec3> = nu
                    .iter()
                    .map(|&v| linalg::null_vector(&mat_shift(&an.n, v)))
                    .collect();
                // Reordering the eigenvalues maps the cross ratio
                // (ν₂−ν₀)/(ν₁−ν₀) over the whole orbit; keep the order
                // whose value wins the canonical tie-break.
                const PERMS: [[usize; 3]; 6] =
                    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
                let mut best: Option<([usize; 3], C)> = None;
                for p in PERMS {
                    let lam = (nu[p[2]] - nu[p[0]]) / (nu[p[1]] - nu[p[0]]);
                    let key = ((lam - c(0.5, 0.0)).norm(), lam.re, lam.im);
                    let wins = match &best {
                        None => true,
                        Some((_, cur)) => {
                            key < ((cur - c(0.5, 0.0)).norm(), cur.re, cur.im)
                        }
                    };
                    if wins {
                        best = Some((p, lam));
                    }
                }
                let (p, lambda) = best.unwrap();
                let v = cols(&x[p[0]], &x[p[1]], &x[p[2]]);
                let b = linalg::inverse(&v)
                    .expect("eigenvectors of distinct eigenvalues are independent");
                CanonicalClass {
                    tag: ClassTag::A1 { lambda },
                    transform: b,
                }
            }
            SpectrumKind::Double { d, s } => {
                let md = mat_shift(&an.n, d);
                let u = linalg::null_vector(&mat_shift(&an.n, s));
                if geometric_mult(&md) >= 2 {
                    // diagonalizable double eigenvalue
                    let (x1, x2) = linalg::null2(&md);
                    let v = cols(&x1, &x2, &u);
                    let b = linalg::inverse(&v).expect("eigenbasis is independent");
                    CanonicalClass {
                        tag: ClassTag::A2,
                        transform: b,
                    }
                } else {
                    // one 2-block: M = (N−d)/(s−d) has spectrum {0,0,1};
                    // Jordan chain Mw = v with Mv = 0, plus the 1-eigenvector
                    let m = mat_scale(&md, ONE / (s - d));
                    let v0 = linalg::null_vector(&m);
                    let w = chain_solve(&m, &v0);
                    let v = cols(&v0, &w, &u);
                    let b = linalg::inverse(&v).expect("Jordan chain basis is independent");
                    CanonicalClass {
                        tag: ClassTag::A3,
                        transform: b,
                    }
                }
            }
            SpectrumKind::Triple => {
                if geometric_mult(&an.n) >= 2 {
                    // rank-1 nilpotent: N² = 0
                    let k = dominant_column(&an.n);
                    let w = linalg::basis(k);
                    let v0 = matvec(&an.n, &w);
                    let vhat = linalg::scale(&v0, ONE / c(norm(&v0), 0.0));
                    let (n1, n2) = linalg::null2(&an.n);
                    // v₀ lies in the null space; complete with the null
                    // direction least aligned with it
                    let c1 = linalg::sub(&n1, &linalg::scale(&vhat, linalg::hdot(&n1, &vhat)));
                    let c2 = linalg::sub(&n2, &linalg::scale(&vhat, linalg::hdot(&n2, &vhat)));
                    let u = if norm(&c1) >= norm(&c2) { c1 } else { c2 };
                    let v = cols(&v0, &w, &u);
                    let b = linalg::inverse(&v).expect("nilpotent chain basis is independent");
                    CanonicalClass {
                        tag: ClassTag::A4,
                        transform: b,
                    }
                } else {
                    // rank-2 nilpotent: N³ = 0 ≠ N²; chain (N²w, Nw, w)
                    let n2 = linalg::mat_mul(&an.n, &an.n);
                    let k = dominant_column(&n2);
                    let w = linalg::basis(k);
                    let nw = matvec(&an.n, &w);
                    let n2w = matvec(&n2, &w);
                    let v = cols(&n2w, &nw, &w);
                    let b = linalg::inverse(&v).expect("nilpotent chain basis is independent");
                    CanonicalClass {
                        tag: ClassTag::A5,
                        transform: b,
                    }
                }
            }
        }
    }

    /// Where the surface fails to be smooth: nowhere (three simple
    /// eigenvalues); at one point (a single 2- or 3-block, whose left and
    /// right eigenvectors are incident by the Jordan structure); or along
    /// a (1,1)-curve (a repeated eigenvalue with full eigenspace makes the
    /// surface a reducible pair of pencils meeting along the curve cut by
    /// the complementary eigenvalue's eigenvectors).
    pub fn singular_locus(&self) -> SingularLocus {
        let an = analyze(&self.raw);
        match an.kind {
            SpectrumKind::Distinct(_) => SingularLocus::Smooth,
            SpectrumKind::Double { d, s } => {
                let md = mat_shift(&an.n, d);
                if geometric_mult(&md) >= 2 {
                    // the double eigenspaces are the annihilators of the
                    // simple eigenvalue's left/right eigenvectors
                    let ms = mat_shift(&an.n, s);
                    let q = point_of(&linalg::left_null_vector(&ms));
                    let m = line_of(&linalg::null_vector(&ms));
                    let curve = Curve11::new(q, m).expect("eigenvector flavors are fixed");
                    SingularLocus::Curve {
                        curve,
                        components: 1,
                    }
                } else {
                    SingularLocus::Point(singular_point(&an.n, d))
                }
            }
            SpectrumKind::Triple => {
                if geometric_mult(&an.n) >= 2 {
                    // N = v·r (rank 1): singular along {rℓ = 0} ∪ {pv = 0},
                    // two fibers meeting at (r, v) since r·v = tr N = 0
                    let i = (0..3)
                        .max_by(|&a, &b| norm(&an.n[a]).partial_cmp(&norm(&an.n[b])).unwrap())
                        .unwrap();
                    let r = an.n[i];
                    let v = matvec(&an.n, &linalg::conj(&r));
                    let curve = Curve11::new(point_of(&r), line_of(&v))
                        .expect("eigenvector flavors are fixed");
                    SingularLocus::Curve {
                        curve,
                        components: 2,
                    }
                } else {
                    SingularLocus::Point(singular_point(&an.n, ZERO))
                }
            }
        }
    }

    /// Whether the surface is fixed by the anti-holomorphic involution:
    /// true exactly when the pencil contains a Hermitian matrix, i.e. the
    /// conjugate-transpose of the representative lies in span{A, I}.
    pub fn is_j_invariant(&self) -> bool {
        let (_, _, res) = linalg::pencil_fit(&adjoint(&self.rep), &self.rep);
        res < 1e-9
    }

    /// For a smooth surface, the three left-eigenvector points (sorted by
    /// the (Re, Im) order of their eigenvalues). Dually, the right
    /// eigenvectors are the pairwise cross products of these.
    pub fn blowup_points(&self) -> Result<[ProjVec; 3]> {
        let an = analyze(&self.raw);
        let SpectrumKind::Distinct(nu) = an.kind else {
            return Err(Error::NotSmooth);
        };
        Ok([0, 1, 2].map(|i| point_of(&linalg::left_null_vector(&mat_shift(&an.n, nu[i])))))
    }

    /// Unitary (Schur-type) normal form: a unitary U with UᴴA'U upper
    /// triangular, where A' is the pencil representative whose first two
    /// eigenvalues (in (Re, Im) order) are 0 and 1. Returns the triangle
    /// entries (λ, a, b, c).
    pub fn unitary_canonical_form(&self) -> Result<UnitaryForm> {
        let an = analyze(&self.raw);
        let SpectrumKind::Distinct(nu) = an.kind else {
            return Err(Error::NotSmooth);
        };
        let mut mu = [an.raw(nu[0]), an.raw(nu[1]), an.raw(nu[2])];
        // Noise-stable (Re, Im) ordering. Eigenvalues whose real parts tie
        // exactly (0 and i, say) come back from the solver with ±1e-16
        // jitter; a strict sort would let that jitter pick the canonical
        // order, so λ would flip between orbit elements across unitary
        // conjugates of one surface. Re-comparisons therefore get a band
        // proportional to the spectral spread, ties order by Im.
        let spread = (mu[0] - mu[1])
            .norm()
            .max((mu[0] - mu[2]).norm())
            .max((mu[1] - mu[2]).norm());
        let band = 1e-6 * spread;
        mu.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for _ in 0..2 {
            for i in 0..2 {
                if (mu[i + 1].re - mu[i].re).abs() <= band && mu[i + 1].im < mu[i].im {
                    mu.swap(i, i + 1);
                }
            }
        }
        let denom = mu[1] - mu[0];
        let lambda = (mu[2] - mu[0]) / denom;
        let ap = mat_scale(&mat_shift(&self.raw, mu[0]), ONE / denom);
        let (u, t) = linalg::schur_ordered(&ap, &[ZERO, ONE, lambda]);
        Ok(UnitaryForm {
            lambda,
            a: t[0][1],
            b: t[0][2],
            c: t[1][2],
            u,
        })
    }
}

impl PartialEq for Surface11 {
    fn eq(&self, other: &Self) -> bool {
        self.same_surface(other)
    }
}

/// Unitary equivalence of two smooth surfaces: their triangular forms must
/// share λ and the moduli |a|, |b|, |c|, and satisfy the diagonal-torus
/// phase condition a·b'·c = a'·b·c' (all comparisons 1e-8 relative).
pub fn unitary_equivalent(s1: &Surface11, s2: &Surface11) -> Result<bool> {
    let f = s1.unitary_canonical_form()?;
    let g = s2.unitary_canonical_form()?;
    let lam_scale = 1.0 + f.lambda.norm().max(g.lambda.norm());
    if (f.lambda - g.lambda).norm() > 1e-8 * lam_scale {
        return Ok(false);
    }
    let s = 1.0
        + [f.a, f.b, f.c, g.a, g.b, g.c]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
    for (x, y) in [(f.a, g.a), (f.b, g.b), (f.c, g.c)] {
        if (x.norm() - y.norm()).abs() > 1e-8 * s {
            return Ok(false);
        }
    }
    let lhs = f.a * g.b * f.c;
    let rhs = g.a * f.b * g.c;
    Ok((lhs - rhs).norm() <= 1e-8 * s * s * s)
}

/// The six Möbius images {λ, 1/λ, 1−λ, 1/(1−λ), λ/(λ−1), (λ−1)/λ},
/// deduplicated: coincidences shrink the orbit (e.g. to {2, ½, −1}).
pub fn cross_ratio_orbit(lambda: C) -> Vec<C> {
    let vals = [
        lambda,
        ONE / lambda,
        ONE - lambda,
        ONE / (ONE - lambda),
        lambda / (lambda - ONE),
        (lambda - ONE) / lambda,
    ];
    let scale = 1.0 + vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out: Vec<C> = Vec::new();
    for v in vals {
        if !out.iter().any(|w| (w - v).norm() <= 1e-9 * scale) {
            out.push(v);
        }
    }
    out
}

// ---- result types ----

/// One eigenvalue group: the value, its multiplicities, and projective
/// left (Point) / right (Line) eigenvectors spanning the eigenspaces.
#[derive(Debug, Clone)]
pub struct EigenGroup {
    pub value: C,
    pub algebraic: usize,
    pub geometric: usize,
    pub left: Vec<ProjVec>,
    pub right: Vec<ProjVec>,
    /// true when geometric < algebraic (a genuine Jordan block)
    pub deficient: bool,
}

/// The spectrum of a surface matrix, grouped by distinct eigenvalue and
/// sorted by (Re, Im); `min_gap` is the smallest distance between distinct
/// eigenvalues (0 when there is only one).
#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub groups: Vec<EigenGroup>,
    pub min_gap: f64,
}

/// The five projective classes. A1 carries the cross-ratio parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassTag {
    A1 { lambda: C },
    A2,
    A3,
    A4,
    A5,
}

impl ClassTag {
    pub fn name(&self) -> &'static str {
        match self {
            ClassTag::A1 { .. } => "A1",
            ClassTag::A2 => "A2",
            ClassTag::A3 => "A3",
            ClassTag::A4 => "A4",
            ClassTag::A5 => "A5",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::A1 { lambda } => write!(f, "A1(λ = {} + {}i)", lambda.re, lambda.im),
            other => f.write_str(other.name()),
        }
    }
}

/// A class tag plus an invertible B conjugating the surface matrix into
/// the pencil of the canonical representative.
#[derive(Debug, Clone)]
pub struct CanonicalClass {
    pub tag: ClassTag,
    pub transform: Mat3,
}

/// The representative matrix of each class: diag(0, 1, λ); diag(0, 0, 1);
/// a 2-block beside a distinct eigenvalue; a rank-1 nilpotent; a rank-2
/// nilpotent.
pub fn canonical_matrix(tag: &ClassTag) -> Mat3 {
    let z = ZERO;
    let o = ONE;
    match tag {
        ClassTag::A1 { lambda } => [[z, z, z], [z, o, z], [z, z, *lambda]],
        ClassTag::A2 => [[z, z, z], [z, z, z], [z, z, o]],
        ClassTag::A3 => [[z, o, z], [z, z, z], [z, z, o]],
        ClassTag::A4 => [[z, o, z], [z, z, z], [z, z, z]],
        ClassTag::A5 => [[z, o, z], [z, z, o], [z, z, z]],
    }
}

/// Entries (λ, a, b, c) of the unitary triangular form
/// [[0, a, b], [0, 1, c], [0, 0, λ]] and the unitary U realizing it.
#[derive(Debug, Clone)]
pub struct UnitaryForm {
    pub lambda: C,
    pub a: C,
    pub b: C,
    pub c: C,
    pub u: Mat3,
}

/// The singular set of a (1,1)-surface.
#[derive(Debug, Clone)]
pub enum SingularLocus {
    Smooth,
    Point(FlagPoint),
    Curve { curve: Curve11, components: usize },
}

// ---- spectrum analysis ----

/// Multiplicity structure of the spectrum, computed on the trace-free,
/// Frobenius-normalized part N = (A − (tr A/3)I)/σ. The characteristic
/// polynomial of N is the depressed cubic x³ + p̂x + q̂ with p̂ = c₁(N)
/// (sum of principal 2×2 minors) and q̂ = −det N. Multiple roots are
/// detected from these coefficients — which are polynomial in the entries
/// and so carry no root-extraction noise — rather than by clustering
/// computed roots: a triple root forces p̂ = q̂ = 0, and a double root
/// forces the cubic to vanish at a critical point ±√(−p̂/3).
struct Analysis {
    shift: C,
    sigma: f64,
    n: Mat3,
    kind: SpectrumKind,
}

enum SpectrumKind {
    /// pairwise distinct eigenvalues of N, sorted by (Re, Im)
    Distinct([C; 3]),
    /// double eigenvalue d and simple eigenvalue s = −2d of N
    Double { d: C, s: C },
    /// a single triple eigenvalue (0, since N is trace-free)
    Triple,
}

fn analyze(a: &Mat3) -> Analysis {
    let shift = trace(a) / c(3.0, 0.0);
    let m = mat_shift(a, shift);
    let sigma = frob(&m);
    let n = mat_scale(&m, ONE / c(sigma, 0.0));
    let p_hat = n[0][0] * n[1][1] - n[0][1] * n[1][0] + n[0][0] * n[2][2]
        - n[0][2] * n[2][0]
        + n[1][1] * n[2][2]
        - n[1][2] * n[2][1];
    let q_hat = -linalg::det(&n);
    let kind = if q_hat.norm() < TRIPLE_Q_TOL && p_hat.norm() < TRIPLE_P_TOL {
        SpectrumKind::Triple
    } else {
        let crit = (-p_hat / c(3.0, 0.0)).sqrt();
        let pv = |x: C| x * x * x + p_hat * x + q_hat;
        let (d, val) = if pv(crit).norm() <= pv(-crit).norm() {
            (crit, pv(crit))
        } else {
            (-crit, pv(-crit))
        };
        if val.norm() < DOUBLE_TOL {
            SpectrumKind::Double {
                d,
                s: c(-2.0, 0.0) * d,
            }
        } else {
            let mut roots = linalg::eigenvalues(&n);
            linalg::sort_re_im(&mut roots);
            SpectrumKind::Distinct(roots)
        }
    };
    Analysis {
        shift,
        sigma,
        n,
        kind,
    }
}

impl Analysis {
    /// Map an eigenvalue of N back to the original matrix.
    fn raw(&self, nu: C) -> C {
        self.shift + c(self.sigma, 0.0) * nu
    }

    /// Cleaned eigenvalues of the original matrix, with multiplicity,
    /// sorted by (Re, Im).
    fn raw_values(&self) -> [C; 3] {
        let mut v = match self.kind {
            SpectrumKind::Distinct(r) => [self.raw(r[0]), self.raw(r[1]), self.raw(r[2])],
            SpectrumKind::Double { d, s } => [self.raw(d), self.raw(d), self.raw(s)],
            SpectrumKind::Triple => [self.shift; 3],
        };
        linalg::sort_re_im(&mut v);
        v
    }
}

/// Dimension of the null space of m (for m with a nontrivial null space),
/// counted from the singular-value profile.
fn geometric_mult(m: &Mat3) -> usize {
    let sv = linalg::singular_values(m);
    let small = (1..3).filter(|&i| sv[i] <= RANK_TOL * sv[0]).count();
    small.max(1)
}

/// Solve M·w = v when v spans the null space of the rank-2 matrix M and
/// the system is consistent; the solution carries no component along v.
fn chain_solve(m: &Mat3, v: &Vec3) -> Vec3 {
    let vhat = linalg::scale(v, ONE / c(norm(v), 0.0));
    let mh = adjoint(m);
    let g = linalg::mat_add(
        &linalg::mat_mul(&mh, m),
        &linalg::outer(&vhat, &linalg::conj(&vhat)),
    );
    let rhs = matvec(&mh, v);
    let gi = linalg::inverse(&g).expect("regularized normal matrix is invertible");
    matvec(&gi, &rhs)
}

/// The unique singular point for a deficient eigenvalue: left and right
/// eigenvectors, with the right one projected exactly onto the incidence
/// condition (the Jordan structure makes the correction microscopic).
fn singular_point(n: &Mat3, value: C) -> FlagPoint {
    let m = mat_shift(n, value);
    let p = point_of(&linalg::left_null_vector(&m));
    let lraw = linalg::null_vector(&m);
    let pairing = linalg::dot(p.coords(), &lraw);
    let lfix = linalg::sub(&lraw, &linalg::scale(&linalg::conj(p.coords()), pairing));
    let l = line_of(&lfix);
    FlagPoint::new(p, l).expect("pairing vanishes after exact projection")
}

fn point_of(v: &Vec3) -> ProjVec {
    ProjVec::point(*v).expect("eigenvector is nonzero")
}

fn line_of(v: &Vec3) -> ProjVec {
    ProjVec::line(*v).expect("eigenvector is nonzero")
}

fn cols(c0: &Vec3, c1: &Vec3, c2: &Vec3) -> Mat3 {
    let mut m = [[ZERO; 3]; 3];
    for i in 0..3 {
        m[i][0] = c0[i];
        m[i][1] = c1[i];
        m[i][2] = c2[i];
    }
    m
}

fn dominant_column(m: &Mat3) -> usize {
    let cn = |j: usize| (0..3).map(|i| m[i][j].norm_sqr()).sum::<f64>();
    (0..3).max_by(|&a, &b| cn(a).partial_cmp(&cn(b)).unwrap()).unwrap()
}

// ---- forms in three variables and the (1,d) utilities ----

/// A homogeneous form in three coordinates: a sparse list of monomials
/// coef·x₀^e₀·x₁^e₁·x₂^e₂ of a common total degree.
#[derive(Debug, Clone)]
pub struct Form {
    degree: u32,
    terms: Vec<([u32; 3], C)>,
}

impl Form {
    pub fn new(degree: u32, terms: Vec<([u32; 3], C)>) -> Result<Self> {
        for (e, _) in &terms {
            if e[0] + e[1] + e[2] != degree {
                return Err(Error::Malformed(format!(
                    "monomial exponents {:?} do not sum to degree {}",
                    e, degree
                )));
            }
        }
        Ok(Form { degree, terms })
    }

    /// A single monomial with coefficient 1.
    pub fn monomial(e: [u32; 3]) -> Form {
        Form {
            degree: e[0] + e[1] + e[2],
            terms: vec![(e, ONE)],
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, v: &Vec3) -> C {
        self.terms
            .iter()
            .map(|(e, co)| *co * v[0].powu(e[0]) * v[1].powu(e[1]) * v[2].powu(e[2]))
            .sum()
    }

    fn coeff_scale(&self) -> f64 {
        self.terms.iter().map(|(_, co)| co.norm()).sum()
    }
}

/// Whether ℓ₀ is a base point of the cover defined by three degree-d
/// forms: the 3×2 matrix [Bᵢ(ℓ₀) | ℓ₀ᵢ] must have rank 1, i.e. all three
/// 2×2 minors vanish (relative tolerance 1e-9).
pub fn base_points_1d(b: &[Form; 3], l0: &ProjVec) -> Result<bool> {
    if l0.flavor() != Flavor::Line {
        return Err(Error::FlavorMismatch {
            expected: Flavor::Line,
            got: l0.flavor(),
        });
    }
    let d = b[0].degree();
    if d < 1 || b.iter().any(|f| f.degree() != d) {
        return Err(Error::Malformed(
            "three forms of a common degree ≥ 1 required".into(),
        ));
    }
    let lc = l0.coords();
    let vals = [b[0].eval(lc), b[1].eval(lc), b[2].eval(lc)];
    let scale = vals.iter().map(|z| z.norm()).fold(0.0, f64::max)
        * lc.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let worst = [(0usize, 1usize), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| (vals[i] * lc[j] - vals[j] * lc[i]).norm())
        .fold(0.0, f64::max);
    Ok(worst <= 1e-9 * scale || scale == 0.0)
}

/// Discriminant (Δ/4) at p of the binary quadratic obtained by restricting
/// p₀B₀(ℓ) + p₁B₁(ℓ) + p₂B₂(ℓ) = 0 to the pencil {ℓ : pℓ = 0}, after
/// eliminating the ℓ-coordinate of largest |pᵢ|. The returned value
/// depends on that chart; its zero set — the branch locus of the induced
/// double cover — does not. Errors with [`Error::DegenerateChart`] when
/// the restriction vanishes identically (the whole pencil lies on the
/// surface).
pub fn branch_quartic_12(b: &[Form; 3], p: &ProjVec) -> Result<C> {
    if p.flavor() != Flavor::Point {
        return Err(Error::FlavorMismatch {
            expected: Flavor::Point,
            got: p.flavor(),
        });
    }
    if b.iter().any(|f| f.degree() != 2) {
        return Err(Error::Malformed("three quadratic forms required".into()));
    }
    let pc = p.coords();
    let i = linalg::argmax_abs(pc);
    let (j, k) = match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let q = |lj: C, lk: C| -> C {
        let mut l = [ZERO; 3];
        l[j] = lj;
        l[k] = lk;
        l[i] = -(pc[j] * lj + pc[k] * lk) / pc[i];
        pc[0] * b[0].eval(&l) + pc[1] * b[1].eval(&l) + pc[2] * b[2].eval(&l)
    };
    // a binary quadratic is pinned down by three evaluations
    let alpha = q(ONE, ZERO);
    let gamma = q(ZERO, ONE);
    let beta = q(ONE, ONE) - alpha - gamma;
    let scale: f64 = b.iter().map(|f| f.coeff_scale()).sum();
    if alpha.norm().max(beta.norm()).max(gamma.norm()) < 1e-12 * scale {
        return Err(Error::DegenerateChart);
    }
    let half = beta / c(2.0, 0.0);
    Ok(half * half - alpha * gamma)
}

// ---- serialization ----

fn mat_to_wire(m: &Mat3) -> [[[f64; 2]; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| [m[i][j].re, m[i][j].im]))
}

fn wire_to_mat(w: &[[[f64; 2]; 3]; 3]) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| C::new(w[i][j][0], w[i][j][1])))
}

/// Wire shape {"A": [[[re,im]; 3]; 3]}.
#[derive(Serialize, Deserialize)]
struct SurfaceWire {
    #[serde(rename = "A")]
    a: [[[f64; 2]; 3]; 3],
}

impl Serialize for Surface11 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SurfaceWire {
            a: mat_to_wire(&self.raw),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Surface11 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SurfaceWire::deserialize(d)?;
        Surface11::from_matrix(wire_to_mat(&w.a)).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Wire shape {"tag": "A1".."A5", "lambda"?: [re,im], "transform": matrix}.
#[derive(Serialize, Deserialize)]
struct CanonWire {
    tag: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<[f64; 2]>,
    transform: [[[f64; 2]; 3]; 3],
}

impl Serialize for CanonicalClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let lambda = match &self.tag {
            ClassTag::A1 { lambda } => Some([lambda.re, lambda.im]),
            _ => None,
        };
        CanonWire {
            tag: self.tag.name().to_string(),
            lambda,
            transform: mat_to_wire(&self.transform),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CanonicalClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CanonWire::deserialize(d)?;
        let tag = match (w.tag.as_str(), w.lambda) {
            ("A1", Some([re, im])) => ClassTag::A1 {
                lambda: C::new(re, im),
            },
            ("A1", None) => return Err(D::Error::custom("tag A1 requires a lambda")),
            ("A2", None) => ClassTag::A2,
            ("A3", None) => ClassTag::A3,
            ("A4", None) => ClassTag::A4,
            ("A5", None) => ClassTag::A5,
            (t, Some(_)) => return Err(D::Error::custom(format!("tag {t} carries no lambda"))),
            (t, None) => return Err(D::Error::custom(format!("unknown tag {t}"))),
        };
        Ok(CanonicalClass {
            tag,
            transform: wire_to_mat(&w.transform),
        })
    }
}

/// Wire shape {"lambda": [re,im], "a": .., "b": .., "c": .., "u": matrix}.
#[derive(Serialize, Deserialize)]
struct UnitaryWire {
    lambda: [f64; 2],
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    u: [[[f64; 2]; 3]; 3],
}

impl Serialize for UnitaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        UnitaryWire {
            lambda: [self.lambda.re, self.lambda.im],
            a: [self.a.re, self.a.im],
            b: [self.b.re, self.b.im],
            c: [self.c.re, self.c.im],
            u: mat_to_wire(&self.u),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = UnitaryWire::deserialize(d)?;
        Ok(UnitaryForm {
            lambda: C::new(w.lambda[0], w.lambda[1]),
            a: C::new(w.a[0], w.a[1]),
            b: C::new(w.b[0], w.b[1]),
            c: C::new(w.c[0], w.c[1]),
            u: wire_to_mat(&w.u),
        })
    }
}

/// Wire shape {"variant": "smooth"} | {"variant": "point", "point": ..}
/// | {"variant": "curve", "curve": .., "components": n}.
#[derive(Serialize, Deserialize)]
struct LocusWire {
    variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<FlagPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    curve: Option<Curve11>,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<usize>,
}

impl Serialize for SingularLocus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let w = match self {
            SingularLocus::Smooth => LocusWire {
                variant: "smooth".into(),
                point: None,
                curve: None,
                components: None,
            },
            SingularLocus::Point(p) => LocusWire {
                variant: "point".into(),
                point: Some(p.clone()),
                curve: None,
                components: None,
            },
            SingularLocus::Curve { curve, components } => LocusWire {
                variant: "curve".into(),
                point: None,
                curve: Some(curve.clone()),
                components: Some(*components),
            },
        };
        w.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SingularLocus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = LocusWire::deserialize(d)?;
        match w.variant.as_str() {
            "smooth" => Ok(SingularLocus::Smooth),
            "point" => w
                .point
                .map(SingularLocus::Point)
                .ok_or_else(|| D::Error::custom("variant point requires a point")),
            "curve" => match (w.curve, w.components) {
                (Some(curve), Some(components)) => Ok(SingularLocus::Curve { curve, components }),
                _ => Err(D::Error::custom(
                    "variant curve requires curve and components",
                )),
            },
            v => Err(D::Error::custom(format!("unknown variant {v}"))),
        }
    }
}
