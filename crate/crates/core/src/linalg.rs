//! Dense 3×3 complex linear algebra, hand-rolled.
//!
//! Everything here works on `[C; 3]` / `[[C; 3]; 3]` values. The crate never
//! needs anything bigger than 3×3, and the algorithms below (cubic
//! characteristic polynomial, cross-product null vectors, Jacobi singular
//! values, two-step Schur) are accurate to near machine precision at this
//! size without pivoted factorizations.

use num_complex::Complex64 as C;
use rand::Rng;

pub type Vec3 = [C; 3];
pub type Mat3 = [[C; 3]; 3];

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

// ---- vector ops ----

/// Bilinear dot product Σ uᵢvᵢ (no conjugation).
pub fn dot(u: &Vec3, v: &Vec3) -> C {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Hermitian inner product ⟨u,v⟩ = Σ uᵢ·conj(vᵢ).
pub fn hdot(u: &Vec3, v: &Vec3) -> C {
    u[0] * v[0].conj() + u[1] * v[1].conj() + u[2] * v[2].conj()
}

pub fn norm(u: &Vec3) -> f64 {
    hdot(u, u).re.max(0.0).sqrt()
}

pub fn scale(u: &Vec3, s: C) -> Vec3 {
    [u[0] * s, u[1] * s, u[2] * s]
}

pub fn add(u: &Vec3, v: &Vec3) -> Vec3 {
    [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
}

pub fn sub(u: &Vec3, v: &Vec3) -> Vec3 {
    [u[0] - v[0], u[1] - v[1], u[2] - v[2]]
}

pub fn conj(u: &Vec3) -> Vec3 {
    [u[0].conj(), u[1].conj(), u[2].conj()]
}

/// The SL(3)-equivariant cross product:
/// (u₁v₂−u₂v₁, u₂v₀−u₀v₂, u₀v₁−u₁v₀). Pairs to zero with both inputs.
pub fn cross(u: &Vec3, v: &Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// Index of the component with the largest modulus (lowest index on ties).
pub fn argmax_abs(u: &Vec3) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if u[i].norm() > u[best].norm() + 0.0 {
            best = i;
        }
    }
    best
}

// ---- matrix ops ----

pub fn mat_identity() -> Mat3 {
    [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]]
}

pub fn mat_scale(a: &Mat3, s: C) -> Mat3 {
    let mut r = *a;
    for row in r.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    r
}

pub fn mat_add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = *a;
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] += b[i][j];
        }
    }
    r
}

pub fn mat_sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = *a;
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] -= b[i][j];
        }
    }
    r
}

/// A − sI.
pub fn mat_shift(a: &Mat3, s: C) -> Mat3 {
    let mut r = *a;
    for i in 0..3 {
        r[i][i] -= s;
    }
    r
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for (k, bk) in b.iter().enumerate() {
                r[i][j] += a[i][k] * bk[j];
            }
        }
    }
    r
}

/// Matrix times column vector.
pub fn matvec(a: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&a[0], v), dot(&a[1], v), dot(&a[2], v)]
}

/// Row vector times matrix.
pub fn vecmat(v: &Vec3, a: &Mat3) -> Vec3 {
    [
        v[0] * a[0][0] + v[1] * a[1][0] + v[2] * a[2][0],
        v[0] * a[0][1] + v[1] * a[1][1] + v[2] * a[2][1],
        v[0] * a[0][2] + v[1] * a[1][2] + v[2] * a[2][2],
    ]
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut r = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = a[j][i];
        }
    }
    r
}

/// Conjugate transpose Aᴴ.
pub fn adjoint(a: &Mat3) -> Mat3 {
    let mut r = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = a[j][i].conj();
        }
    }
    r
}

pub fn mat_conj(a: &Mat3) -> Mat3 {
    let mut r = *a;
    for row in r.iter_mut() {
        for x in row.iter_mut() {
            *x = x.conj();
        }
    }
    r
}

pub fn trace(a: &Mat3) -> C {
    a[0][0] + a[1][1] + a[2][2]
}

pub fn det(a: &Mat3) -> C {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Classical adjugate: A·adj(A) = det(A)·I. Exact polynomial formula, no
/// division, so it is well defined for singular matrices too.
pub fn adjugate(a: &Mat3) -> Mat3 {
    let cof = |i: usize, j: usize| -> C {
        let r = [(i + 1) % 3, (i + 2) % 3];
        let s = [(j + 1) % 3, (j + 2) % 3];
        a[r[0]][s[0]] * a[r[1]][s[1]] - a[r[0]][s[1]] * a[r[1]][s[0]]
    };
    // adj = transpose of cofactor matrix; the cyclic index choice above
    // already absorbs the (−1)^{i+j} signs.
    let mut r = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[j][i] = cof(i, j);
        }
    }
    r
}

pub fn inverse(a: &Mat3) -> Option<Mat3> {
    let d = det(a);
    let scale_ref = frob(a);
    if d.norm() <= 1e-12 * scale_ref * scale_ref * scale_ref {
        return None;
    }
    Some(mat_scale(&adjugate(a), ONE / d))
}

pub fn frob(a: &Mat3) -> f64 {
    let mut s = 0.0;
    for row in a {
        for x in row {
            s += x.norm_sqr();
        }
    }
    s.sqrt()
}

pub fn outer(col: &Vec3, row: &Vec3) -> Mat3 {
    let mut r = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = col[i] * row[j];
        }
    }
    r
}

// ---- polynomial spectra ----

/// Roots of the monic cubic x³ + a₂x² + a₁x + a₀ over ℂ.
///
/// Cardano on the depressed form followed by two Newton polish steps per
/// root on the original cubic; accurate for the well-separated and the
/// nearly-multiple cases alike (the polish is a no-op at a true multiple
/// root where the derivative vanishes — guarded below).
pub fn cubic_roots(a2: C, a1: C, a0: C) -> [C; 3] {
    let shift = a2 / 3.0;
    // depressed: t³ + pt + q, x = t − a₂/3
    let p = a1 - a2 * a2 / 3.0;
    let q = a0 - a1 * a2 / 3.0 + a2 * a2 * a2 * (2.0 / 27.0);

    let mut roots = if q.norm() < 1e-300 && p.norm() < 1e-300 {
        [ZERO; 3]
    } else {
        let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        // pick the branch that avoids cancellation in −q/2 ± disc
        let u3 = {
            let m = -q / 2.0 + disc;
            let n = -q / 2.0 - disc;
            if m.norm() >= n.norm() {
                m
            } else {
                n
            }
        };
        if u3.norm() == 0.0 {
            [ZERO; 3]
        } else {
            let u = u3.powf(1.0 / 3.0);
            let w = C::new(-0.5, 0.75f64.sqrt()); // primitive cube root of 1
            let mut out = [ZERO; 3];
            let mut uu = u;
            for slot in out.iter_mut() {
                *slot = uu - p / (3.0 * uu);
                uu *= w;
            }
            out
        }
    };

    let f = |x: C| ((x + a2) * x + a1) * x + a0;
    let fp = |x: C| (3.0 * x + 2.0 * a2) * x + a1;
    for r in roots.iter_mut() {
        let mut x = *r - shift;
        for _ in 0..3 {
            let d = fp(x);
            if d.norm() < 1e-14 {
                break;
            }
            let step = f(x) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            x -= step;
        }
        *r = x;
    }
    roots
}

/// Eigenvalues of A (with multiplicity), in no particular order.
pub fn eigenvalues(a: &Mat3) -> [C; 3] {
    // char(x) = x³ − tr·x² + m·x − det, m = sum of principal 2×2 minors
    let tr = trace(a);
    let m = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2] - a[1][2] * a[2][1];
    cubic_roots(-tr, m, -det(a))
}

/// Sort key used everywhere an eigenvalue order must be deterministic:
/// ascending by (re, im).
pub fn sort_re_im(vals: &mut [C]) {
    vals.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
}

/// A unit vector v with M·v ≈ 0, assuming rank(M) ≤ 2.
///
/// Cross products of row pairs all lie in the (right) null space; the
/// largest one is the numerically safest. Falls back to the smallest
/// right singular vector when M is close to rank 1 (all crosses tiny)
/// so callers always get *a* null direction.
pub fn null_vector(m: &Mat3) -> Vec3 {
    let c01 = cross(&m[0], &m[1]);
    let c02 = cross(&m[0], &m[2]);
    let c12 = cross(&m[1], &m[2]);
    let (mut best, mut bn) = (c01, norm(&c01));
    for cand in [c02, c12] {
        let n = norm(&cand);
        if n > bn {
            best = cand;
            bn = n;
        }
    }
    let rows_scale = frob(m);
    if bn > 1e-13 * rows_scale * rows_scale {
        return scale(&best, ONE / c(bn, 0.0));
    }
    // rank ≤ 1: null space is 2-dimensional; any vector bilinear-orthogonal
    // to the largest row works.
    let r = m[(0..3).max_by(|&i, &j| norm(&m[i]).partial_cmp(&norm(&m[j])).unwrap()).unwrap()];
    if norm(&r) < 1e-300 {
        return [ONE, ZERO, ZERO];
    }
    let mut best = [ZERO; 3];
    let mut bn = -1.0;
    for k in 0..3 {
        let e = basis(k);
        let v = cross(&r, &e);
        if norm(&v) > bn {
            bn = norm(&v);
            best = v;
        }
    }
    scale(&best, ONE / c(norm(&best), 0.0))
}

/// A unit row vector u with u·M ≈ 0 (left null vector).
pub fn left_null_vector(m: &Mat3) -> Vec3 {
    null_vector(&transpose(m))
}

pub fn basis(k: usize) -> Vec3 {
    let mut e = [ZERO; 3];
    e[k] = ONE;
    e
}

/// Singular values of A, descending.
///
/// Eigenvalues of the Hermitian PSD matrix AᴴA via cyclic complex Jacobi
/// sweeps, then square roots. Jacobi is unconditionally stable here and
/// twelve sweeps reach machine precision at this size.
pub fn singular_values(a: &Mat3) -> [f64; 3] {
    let mut h = mat_mul(&adjoint(a), a);
    for _ in 0..12 {
        let mut off = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                off += h[i][j].norm_sqr();
            }
        }
        if off < 1e-34 * (frob(&h) * frob(&h)).max(1e-300) {
            break;
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let hij = h[i][j];
                if hij.norm() == 0.0 {
                    continue;
                }
                // unitary 2×2 diagonalization of [[hii, hij],[hji, hjj]]
                let hii = h[i][i].re;
                let hjj = h[j][j].re;
                let phase = hij / c(hij.norm(), 0.0);
                let tau = (hjj - hii) / (2.0 * hij.norm());
                let t = tau.signum_or_one() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // G acts on columns i,j: col_i ← cs·col_i − sn·conj(phase)·col_j etc.
                let mut g = mat_identity();
                g[i][i] = c(cs, 0.0);
                g[j][j] = c(cs, 0.0);
                g[i][j] = phase * sn;
                g[j][i] = -phase.conj() * sn;
                h = mat_mul(&mat_mul(&adjoint(&g), &h), &g);
            }
        }
    }
    let mut s = [
        h[0][0].re.max(0.0).sqrt(),
        h[1][1].re.max(0.0).sqrt(),
        h[2][2].re.max(0.0).sqrt(),
    ];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}
impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Scale a vector by a unit complex so its largest-modulus entry becomes
/// real positive (same phase convention as projective canonicalization).
pub fn canonical_phase(v: &Vec3) -> Vec3 {
    let k = argmax_abs(v);
    let m = v[k].norm();
    if m <= 0.0 {
        return *v;
    }
    scale(v, v[k].conj() / c(m, 0.0))
}

/// Two orthonormal vectors spanning the null space {x : Mx = 0} of a
/// rank-1 matrix: every row is proportional to the dominant row r, so the
/// null space is the bilinear-orthogonal complement of r.
pub fn null2(m: &Mat3) -> (Vec3, Vec3) {
    let dominant = (0..3)
        .max_by(|&i, &j| norm(&m[i]).partial_cmp(&norm(&m[j])).unwrap())
        .unwrap();
    let r = m[dominant];
    let mut cands: Vec<Vec3> = (0..3).map(|k| cross(&r, &basis(k))).collect();
    cands.sort_by(|a, b| norm(b).partial_cmp(&norm(a)).unwrap());
    let n1 = scale(&cands[0], ONE / c(norm(&cands[0]), 0.0));
    let mut n2 = sub(&cands[1], &scale(&n1, hdot(&cands[1], &n1)));
    n2 = scale(&n2, ONE / c(norm(&n2), 0.0));
    (n1, n2)
}

/// Least-squares fit y ≈ α·x + β·I in the Frobenius inner product.
/// Returns (α, β, ‖y − αx − βI‖_F).
pub fn pencil_fit(y: &Mat3, x: &Mat3) -> (C, C, f64) {
    fn ip(p: &Mat3, q: &Mat3) -> C {
        let mut s = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                s += p[i][j] * q[i][j].conj();
            }
        }
        s
    }
    let idm = mat_identity();
    // normal equations for min ‖y − αx − βI‖²
    let g11 = ip(x, x);
    let g12 = ip(&idm, x);
    let g21 = ip(x, &idm);
    let g22 = c(3.0, 0.0);
    let b1 = ip(y, x);
    let b2 = ip(y, &idm);
    let det = g11 * g22 - g12 * g21;
    if det.norm() < 1e-300 {
        return (ZERO, ZERO, frob(y));
    }
    let alpha = (b1 * g22 - g12 * b2) / det;
    let beta = (g11 * b2 - b1 * g21) / det;
    let fit = mat_add(&mat_scale(x, alpha), &mat_scale(&idm, beta));
    (alpha, beta, frob(&mat_sub(y, &fit)))
}

/// All n roots of c₀zⁿ + c₁zⁿ⁻¹ + … + cₙ (coefficients from highest to
/// lowest degree, c₀ ≠ 0) by Durand–Kerner iteration. Intended for the
/// small, well-scaled polynomials that arise in tests and samplers.
pub fn poly_roots(coeffs: &[C]) -> Vec<C> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return vec![];
    }
    let monic: Vec<C> = coeffs.iter().map(|&a| a / coeffs[0]).collect();
    let eval = |z: C| monic.iter().fold(ZERO, |acc, &a| acc * z + a);
    let seed = c(0.4, 0.9);
    let mut zs: Vec<C> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..300 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut den = ONE;
            for j in 0..n {
                if j != i {
                    den *= zs[i] - zs[j];
                }
            }
            if den.norm() < 1e-300 {
                continue;
            }
            let step = eval(zs[i]) / den;
            zs[i] -= step;
            worst = worst.max(step.norm());
        }
        if worst < 1e-14 {
            break;
        }
    }
    zs
}

/// Unitary matrix whose first column is v/‖v‖ (modified Gram–Schmidt
/// against the two standard basis vectors least aligned with v).
pub fn unitary_completion(v: &Vec3) -> Mat3 {
    let v0 = scale(v, ONE / c(norm(v), 0.0));
    // pick the two basis vectors with the smallest |v₀ᵢ|
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| v0[i].norm().partial_cmp(&v0[j].norm()).unwrap());
    let mut cols = [v0, basis(idx[0]), basis(idx[1])];
    for k in 1..3 {
        for prev in 0..k {
            let proj = hdot(&cols[k], &cols[prev]);
            cols[k] = sub(&cols[k], &scale(&cols[prev], proj));
        }
        let n = norm(&cols[k]);
        cols[k] = scale(&cols[k], ONE / c(n, 0.0));
    }
    let mut u = [[ZERO; 3]; 3];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..3 {
            u[i][j] = col[i];
        }
    }
    u
}

/// Schur triangularization with a *prescribed* eigenvalue order:
/// returns unitary U with Uᴴ·A·U upper triangular and diagonal equal to
/// `order` (each entry must be an eigenvalue of A).
pub fn schur_ordered(a: &Mat3, order: &[C; 3]) -> (Mat3, Mat3) {
    // right eigenvector for order[0]; the phase convention keeps U = I for
    // an already-triangular input with diagonal in the requested order
    let x1 = canonical_phase(&null_vector(&mat_shift(a, order[0])));
    let u1 = unitary_completion(&x1);
    let a1 = mat_mul(&adjoint(&u1), &mat_mul(a, &u1));
    // trailing 2×2 block
    let b = [[a1[1][1], a1[1][2]], [a1[2][1], a1[2][2]]];
    // eigenvector of b for order[1]
    let r0 = [b[0][0] - order[1], b[0][1]];
    let r1 = [b[1][0], b[1][1] - order[1]];
    // null vector of the 2×2: orthogonal (bilinear) to the larger row
    let row = if r0[0].norm_sqr() + r0[1].norm_sqr() >= r1[0].norm_sqr() + r1[1].norm_sqr() {
        r0
    } else {
        r1
    };
    let y = if row[0].norm() + row[1].norm() < 1e-14 {
        [ONE, ZERO]
    } else {
        let v = [-row[1], row[0]];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };
    // same phase convention as for x1
    let y = {
        let k = if y[0].norm() >= y[1].norm() { 0 } else { 1 };
        let ph = y[k].conj() / c(y[k].norm(), 0.0);
        [y[0] * ph, y[1] * ph]
    };
    let mut u2 = mat_identity();
    u2[1][1] = y[0];
    u2[2][1] = y[1];
    u2[1][2] = -y[1].conj();
    u2[2][2] = y[0].conj();
    let mut u = mat_mul(&u1, &u2);
    // pin the remaining diagonal-torus phase freedom column by column
    for j in 0..3 {
        let fixed = canonical_phase(&[u[0][j], u[1][j], u[2][j]]);
        for i in 0..3 {
            u[i][j] = fixed[i];
        }
    }
    let mut t = mat_mul(&adjoint(&u), &mat_mul(a, &u));
    // flush the (numerically tiny) subdiagonal
    t[1][0] = ZERO;
    t[2][0] = ZERO;
    t[2][1] = ZERO;
    (u, t)
}

// ---- randomness ----

/// One standard complex Gaussian (real and imaginary parts independent
/// N(0,1)) via Box–Muller.
pub fn gaussian_c<R: Rng>(rng: &mut R) -> C {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (-2.0 * u1.ln()).sqrt();
    c(r * u2.cos(), r * u2.sin())
}

pub fn gaussian_vec3<R: Rng>(rng: &mut R) -> Vec3 {
    [gaussian_c(rng), gaussian_c(rng), gaussian_c(rng)]
}

pub fn gaussian_mat3<R: Rng>(rng: &mut R) -> Mat3 {
    [gaussian_vec3(rng), gaussian_vec3(rng), gaussian_vec3(rng)]
}

/// Haar-ish random unitary: Gram–Schmidt of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R) -> Mat3 {
    loop {
        let g = gaussian_mat3(rng);
        let mut cols: [Vec3; 3] = [[ZERO; 3]; 3];
        for j in 0..3 {
            for i in 0..3 {
                cols[j][i] = g[i][j];
            }
        }
        let mut ok = true;
        for k in 0..3 {
            for prev in 0..k {
                let pr = hdot(&cols[k], &cols[prev]);
                cols[k] = sub(&cols[k], &scale(&cols[prev], pr));
            }
            let n = norm(&cols[k]);
            if n < 1e-8 {
                ok = false;
                break;
            }
            cols[k] = scale(&cols[k], ONE / c(n, 0.0));
        }
        if !ok {
            continue;
        }
        let mut u = [[ZERO; 3]; 3];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                u[i][j] = col[i];
            }
        }
        return u;
    }
}

/// Random invertible matrix with condition number ≤ `max_cond` (measured,
/// resampled on failure). Used by sampling-based identity checks that
/// would otherwise see spurious residual blowups.
pub fn random_bounded_cond<R: Rng>(rng: &mut R, max_cond: f64) -> Mat3 {
    loop {
        let g = gaussian_mat3(rng);
        let s = singular_values(&g);
        if s[2] > 1e-12 && s[0] / s[2] <= max_cond {
            return g;
        }
    }
}
