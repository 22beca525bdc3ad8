//! Seeded Monte Carlo harness: every mathematical law the library relies on
//! is registered here as a named check, and `run_suite` replays them all
//! deterministically. Failures are data in the report, not process errors.
//!
//! Per-check RNG streams are derived from the master seed by XOR-ing an
//! FNV-1a hash of the check name, so checks can run in any order (or
//! concurrently) without changing results.

use crate::counts::{c1_squared, h0_flag, h0_product, triple_product, Bidegree};
use crate::curves::{intersect, Curve11, CurveKind, Intersection};
use crate::flag::{random_flag_from_rng, FlagPoint};
use crate::linalg::{
    self, adjoint, c, dot, hdot, mat_add, mat_identity, mat_mul, mat_scale, norm,
    random_bounded_cond, random_unitary, scale, vecmat, ZERO,
};
use crate::metric::{
    fubini_study_distance, image_quadric, moment_map, sphere_normal_form,
};
use crate::proj::{cross, pair, proj_eq, random_from_rng, Flavor, Param, ProjVec};
use crate::surfaces::{cross_ratio_orbit, unitary_equivalent, ClassTag, SingularLocus, Surface11};
use crate::twistor::{
    branch_r, branch_zeros, fiber_preimages, twistor_fiber, twistor_fibers_in, FiberPreimages,
    FiberSet,
};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

/// Result of one named check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub law: &'static str,
    pub samples: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub seed: u64,
}

/// Aggregate of the whole suite. `passed` requires zero failures overall.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerificationReport {
    pub master_seed: u64,
    pub requested_samples: usize,
    pub total_failures: usize,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

/// Scenario tally: one `case` call per sampled scenario, carrying the worst
/// residual observed in that scenario and whether it stayed within bounds.
struct Tally {
    samples: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            samples: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    fn case(&mut self, residual: f64, ok: bool) {
        self.samples += 1;
        let r = if residual.is_finite() { residual } else { f64::MAX };
        if r > self.worst {
            self.worst = r;
        }
        if !ok || !residual.is_finite() {
            self.failures += 1;
        }
    }
}

type CheckFn = fn(&mut ChaCha12Rng, usize) -> Tally;

pub struct Check {
    pub name: &'static str,
    pub law: &'static str,
    run: CheckFn,
}

fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Run every registered check with `samples` scenarios each (at least one).
pub fn run_suite(master_seed: u64, samples: usize) -> VerificationReport {
    let samples = samples.max(1);
    let mut checks = Vec::with_capacity(REGISTRY.len());
    let mut total_failures = 0;
    for check in REGISTRY {
        let seed = master_seed ^ fnv1a(check.name);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let tally = (check.run)(&mut rng, samples);
        total_failures += tally.failures;
        checks.push(CheckReport {
            name: check.name,
            law: check.law,
            samples: tally.samples,
            failures: tally.failures,
            worst_residual: tally.worst,
            seed,
        });
    }
    VerificationReport {
        master_seed,
        requested_samples: samples,
        total_failures,
        passed: total_failures == 0,
        checks,
    }
}

// ---- shared sampling helpers ----

fn unit(v: &[C; 3]) -> [C; 3] {
    scale(v, c(1.0 / norm(v), 0.0))
}

/// Angle between two raw vectors regarded projectively (sin of the angle).
fn ray_gap(u: &[C; 3], v: &[C; 3]) -> f64 {
    norm(&linalg::cross(&unit(u), &unit(v)))
}

fn flag_gap(x: &FlagPoint, y: &FlagPoint) -> f64 {
    ray_gap(x.p().coords(), y.p().coords()).max(ray_gap(x.l().coords(), y.l().coords()))
}

fn random_smooth_curve(rng: &mut ChaCha12Rng) -> Curve11 {
    loop {
        let q = random_from_rng(rng, Flavor::Point);
        let m = random_from_rng(rng, Flavor::Line);
        let cur = Curve11::new(q, m).unwrap();
        if cur.kind() == CurveKind::Smooth {
            return cur;
        }
    }
}

/// A smooth surface with well-separated eigenvalues and bounded conditioning.
fn random_a1_surface(rng: &mut ChaCha12Rng) -> Surface11 {
    loop {
        let a = random_bounded_cond(rng, 10.0);
        let s = match Surface11::from_matrix(a) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if s.eigenstructure().min_gap > 1e-3 && matches!(s.classify().tag, ClassTag::A1 { .. }) {
            return s;
        }
    }
}

fn param_grid(k: usize) -> Vec<Param> {
    let mut out: Vec<Param> = (0..k - 1)
        .map(|i| {
            let t = i as f64 * 0.41 - 3.1;
            Param::from(c(t, (1.7 * t).cos()))
        })
        .collect();
    out.push(Param::Infinity);
    out
}

fn triangular(lambda: C, a: C, b: C, cc: C) -> Surface11 {
    Surface11::from_matrix([
        [ZERO, a, b],
        [ZERO, c(1.0, 0.0), cc],
        [ZERO, ZERO, lambda],
    ])
    .unwrap()
}

/// Surface membership residual |p·A·ℓ| on unit representatives.
fn member_residual(s: &Surface11, x: &FlagPoint) -> f64 {
    dot(&vecmat(x.p().coords(), s.rep()), x.l().coords()).norm()
}

// ---- proj ----

fn proj_cross_pairing(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for i in 0..n {
        let flavor = if i % 2 == 0 { Flavor::Point } else { Flavor::Line };
        let u = random_from_rng(rng, flavor);
        let v = random_from_rng(rng, flavor);
        let w = match cross(&u, &v) {
            Ok(w) => w,
            Err(_) => continue,
        };
        let (r1, r2) = if flavor == Flavor::Point {
            (pair(&u, &w).unwrap(), pair(&v, &w).unwrap())
        } else {
            (pair(&w, &u).unwrap(), pair(&w, &v).unwrap())
        };
        let r = r1.norm().max(r2.norm());
        t.case(r, r <= 1e-9);
    }
    t
}

fn proj_projection_reconstruction(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let x = random_flag_from_rng(rng);
        let p = x.p().coords();
        let l = x.l().coords();
        // with p·l = 0, p × (conj(p) × l) collapses to −‖p‖²·l
        let l2 = linalg::cross(p, &linalg::cross(&linalg::conj(p), l));
        let r = ray_gap(&l2, l);
        t.case(r, r <= 1e-9);
    }
    t
}

fn proj_normalize_idempotent(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for i in 0..n {
        let flavor = if i % 2 == 0 { Flavor::Point } else { Flavor::Line };
        let u = random_from_rng(rng, flavor);
        let again = ProjVec::new(*u.coords(), flavor).unwrap();
        // re-normalizing a canonical representative moves nothing past roundoff
        let stable = u
            .coords()
            .iter()
            .zip(again.coords())
            .all(|(a, b)| (a - b).norm() <= 1e-14);

        // equivalence relation on scaled copies vs an independent vector
        let z1 = crate::linalg::gaussian_c(rng);
        let z2 = crate::linalg::gaussian_c(rng);
        let mut ok = stable && z1.norm() > 1e-6 && z2.norm() > 1e-6;
        if ok {
            let s1 = ProjVec::new(scale(u.coords(), z1), flavor).unwrap();
            let s2 = ProjVec::new(scale(u.coords(), z2), flavor).unwrap();
            let v = random_from_rng(rng, flavor);
            ok &= proj_eq(&u, &s1, 1e-9).unwrap()
                && proj_eq(&s1, &s2, 1e-9).unwrap()
                && proj_eq(&u, &s2, 1e-9).unwrap()
                && proj_eq(&s1, &u, 1e-9).unwrap();
            if ray_gap(u.coords(), v.coords()) > 1e-3 {
                ok &= !proj_eq(&u, &v, 1e-9).unwrap() && !proj_eq(&v, &u, 1e-9).unwrap();
            }
        }
        t.case(if ok { 0.0 } else { 1.0 }, ok);
    }
    t
}

// ---- flag ----

fn flag_involution_algebra(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let x = random_flag_from_rng(rng);
        let mut r: f64 = 0.0;
        // involutions
        for (orig, back) in [
            (&x, x.j1().j1()),
            (&x, x.j().j()),
            (&x, x.j2().j2()),
        ] {
            r = r.max(flag_gap(orig, &back));
        }
        // pairwise distinct on a generic flag
        let distinct = flag_gap(&x.j1(), &x.j()) > 1e-6
            && flag_gap(&x.j(), &x.j2()) > 1e-6
            && flag_gap(&x.j1(), &x.j2()) > 1e-6;
        // composition laws: π₁∘j = π₂*, π₂*∘j = π₁
        let jx = x.j();
        r = r.max(ray_gap(jx.pi1().coords(), x.pi2_star().coords()));
        r = r.max(ray_gap(jx.pi2_star().coords(), x.pi1().coords()));
        t.case(r, r <= 1e-9 && distinct);
    }
    t
}

fn flag_unitary_splitting(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let x = random_flag_from_rng(rng);
        let v1 = x.p().coords();
        let v2 = x.twistor_projection();
        let v3 = x.l().star();
        let r = hdot(v1, v2.coords())
            .norm()
            .max(hdot(v1, v3.coords()).norm())
            .max(hdot(v2.coords(), v3.coords()).norm());
        t.case(r, r <= 1e-9);
    }
    t
}

fn flag_kappa_conjugation(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let x = random_flag_from_rng(rng);
        let lhs = x.kappa().twistor_projection();
        let rhs = x.twistor_projection().conjugated();
        let r = ray_gap(lhs.coords(), rhs.coords());
        t.case(r, r <= 1e-9);
    }
    t
}

// ---- curves ----

fn curves_intersect_oracle(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let c1 = random_smooth_curve(rng);
        let c2 = random_smooth_curve(rng);
        // generic configuration only: base points and polars independent
        if ray_gap(c1.q().coords(), c2.q().coords()) < 1e-3
            || ray_gap(c1.m().coords(), c2.m().coords()) < 1e-3
        {
            continue;
        }
        // direct solution of the incidence system: ℓ ⟂ {q, q′}, p ⟂ {m, m′},
        // and the candidate flag lies on F iff the pairing vanishes
        let l0 = linalg::cross(c1.q().coords(), c2.q().coords());
        let p0 = linalg::cross(c1.m().coords(), c2.m().coords());
        let pairing = dot(&unit(&p0), &unit(&l0)).norm();
        let got = intersect(&c1, &c2).unwrap();
        let (r, ok) = match got {
            Intersection::OnePoint(x) => {
                let gap = ray_gap(x.p().coords(), &p0).max(ray_gap(x.l().coords(), &l0));
                (gap.max(pairing), gap <= 1e-8 && pairing <= 1e-6)
            }
            Intersection::Empty => (0.0, pairing > 1e-8),
            Intersection::SharedComponent => (1.0, false),
        };
        t.case(r, ok);
    }
    t
}

fn curves_j_image(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let cur = random_smooth_curve(rng);
        let jc = cur.j_image();
        let mut ok = proj_eq(jc.q(), &cur.m().star(), 1e-9).unwrap()
            && proj_eq(jc.m(), &cur.q().star(), 1e-9).unwrap();
        let mut r: f64 = 0.0;
        for tt in param_grid(12) {
            let y = cur.param(tt).unwrap().j();
            let res = pair(y.p(), jc.m())
                .unwrap()
                .norm()
                .max(pair(jc.q(), y.l()).unwrap().norm());
            r = r.max(res);
            ok &= jc.contains(&y, 1e-8);
        }
        t.case(r, ok && r <= 1e-9);
    }
    t
}

fn curves_fiber_disjointness(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for i in 0..n {
        if i % 2 == 0 {
            let cur = random_smooth_curve(rng);
            if cur.is_twistor_fiber(1e-9) {
                continue;
            }
            let verdict = intersect(&cur, &cur.j_image());
            let ok = matches!(verdict, Ok(Intersection::Empty));
            t.case(if ok { 0.0 } else { 1.0 }, ok);
        } else {
            let q = random_from_rng(rng, Flavor::Point);
            let fiber = Curve11::new(q.clone(), q.star()).unwrap();
            let jf = fiber.j_image();
            let ok = fiber.is_twistor_fiber(1e-9)
                && proj_eq(jf.q(), fiber.q(), 1e-9).unwrap()
                && proj_eq(jf.m(), fiber.m(), 1e-9).unwrap();
            t.case(if ok { 0.0 } else { 1.0 }, ok);
        }
    }
    t
}

// ---- surfaces ----

fn orbit_gap(l1: C, l2: C) -> f64 {
    cross_ratio_orbit(l1)
        .into_iter()
        .map(|o| (o - l2).norm() / (1.0 + l2.norm()))
        .fold(f64::MAX, f64::min)
}

fn class_match(s1: &Surface11, s2: &Surface11, tol: f64) -> (f64, bool) {
    let c1 = s1.classify();
    let c2 = s2.classify();
    match (&c1.tag, &c2.tag) {
        (ClassTag::A1 { lambda: l1 }, ClassTag::A1 { lambda: l2 }) => {
            let g = orbit_gap(*l1, *l2);
            (g, g <= tol)
        }
        (a, b) => (0.0, a.name() == b.name()),
    }
}

fn surfaces_pencil_invariance(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let s = random_a1_surface(rng);
        let alpha = loop {
            let z = crate::linalg::gaussian_c(rng);
            if z.norm() > 0.3 {
                break z;
            }
        };
        let beta = crate::linalg::gaussian_c(rng);
        let moved = mat_add(
            &mat_scale(s.matrix(), alpha),
            &mat_scale(&mat_identity(), beta),
        );
        let s2 = Surface11::from_matrix(moved).unwrap();
        let (r, ok) = class_match(&s, &s2, 1e-6);
        t.case(r, ok);
    }
    t
}

fn surfaces_conjugation_invariance(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let s = random_a1_surface(rng);
        let b = random_bounded_cond(rng, 10.0);
        let binv = linalg::inverse(&b).unwrap();
        let s2 = Surface11::from_matrix(mat_mul(&b, &mat_mul(s.matrix(), &binv))).unwrap();
        let (r, ok) = class_match(&s, &s2, 1e-5);
        t.case(r, ok);
    }
    t
}

fn surfaces_smoothness_spectrum(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for i in 0..n {
        let (a, expect_smooth) = match i % 5 {
            0 => {
                let lambda = loop {
                    let z = crate::linalg::gaussian_c(rng);
                    if z.norm() > 0.3 && (z - c(1.0, 0.0)).norm() > 0.3 {
                        break z;
                    }
                };
                (
                    crate::surfaces::canonical_matrix(&ClassTag::A1 { lambda }),
                    true,
                )
            }
            1 => (crate::surfaces::canonical_matrix(&ClassTag::A2), false),
            2 => (crate::surfaces::canonical_matrix(&ClassTag::A3), false),
            3 => (crate::surfaces::canonical_matrix(&ClassTag::A4), false),
            _ => (crate::surfaces::canonical_matrix(&ClassTag::A5), false),
        };
        let b = random_bounded_cond(rng, 8.0);
        let binv = linalg::inverse(&b).unwrap();
        let s = Surface11::from_matrix(mat_mul(&b, &mat_mul(&a, &binv))).unwrap();
        let smooth = matches!(s.singular_locus(), SingularLocus::Smooth);
        let simple = s.eigenstructure().groups.len() == 3;
        let ok = smooth == expect_smooth && smooth == simple;
        t.case(if ok { 0.0 } else { 1.0 }, ok);
    }
    t
}

fn surfaces_unitary_equivalence(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let s = random_a1_surface(rng);
        let u = random_unitary(rng);
        let moved = mat_mul(&u, &mat_mul(s.matrix(), &adjoint(&u)));
        let s2 = Surface11::from_matrix(moved).unwrap();
        let ok = unitary_equivalent(&s, &s).unwrap_or(false)
            && unitary_equivalent(&s, &s2).unwrap_or(false)
            && unitary_equivalent(&s2, &s).unwrap_or(false);
        t.case(if ok { 0.0 } else { 1.0 }, ok);
    }
    t
}

fn surfaces_jordan_singular_flag(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let a = crate::surfaces::canonical_matrix(&ClassTag::A3);
        let b = random_bounded_cond(rng, 8.0);
        let binv = linalg::inverse(&b).unwrap();
        let s = Surface11::from_matrix(mat_mul(&b, &mat_mul(&a, &binv))).unwrap();
        match s.singular_locus() {
            SingularLocus::Point(x) => {
                let r = dot(x.p().coords(), x.l().coords()).norm();
                t.case(r, r <= 1e-9);
            }
            _ => t.case(1.0, false),
        }
    }
    t
}

// ---- twistor ----

fn twistor_preimage_coincidence(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    let surfaces = (n / 10).max(1);
    for _ in 0..surfaces {
        let s = random_a1_surface(rng);
        let zero_seed = rng.gen::<u64>();
        // random points: generically two distinct preimages and R far from 0
        for _ in 0..10 {
            let q = random_from_rng(rng, Flavor::Point);
            let pre = match fiber_preimages(&s, &q) {
                Ok(FiberPreimages::Points(v)) => v,
                Ok(FiberPreimages::WholeFiber) => continue,
                Err(_) => continue,
            };
            let r = branch_r(&s, &q).unwrap().r.norm();
            let ok = match pre.len() {
                2 => {
                    let gap = flag_gap(&pre[0], &pre[1]);
                    if r > 1e-6 {
                        gap > 1e-6
                    } else {
                        true
                    }
                }
                1 => r <= 1e-6,
                _ => false,
            };
            t.case(if ok { 0.0 } else { r }, ok);
        }
        // at located branch zeros the preimages coincide
        for z in branch_zeros(&s, 12, zero_seed).unwrap() {
            let r = branch_r(&s, &z).unwrap().r.norm();
            let ok = match fiber_preimages(&s, &z) {
                Ok(FiberPreimages::Points(v)) => match v.len() {
                    1 => true,
                    2 => flag_gap(&v[0], &v[1]) <= 1e-4,
                    _ => false,
                },
                _ => false,
            };
            t.case(r, ok && r <= 1e-8);
        }
    }
    t
}

fn twistor_fiberset_oracle(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    let two = triangular(c(2.0, 0.0), c(3.0, 0.0), ZERO, ZERO);
    let one = triangular(c(2.0, 0.0), c(2.0 * 2.0f64.sqrt(), 0.0), ZERO, ZERO);
    let empty = triangular(c(2.0, 0.0), c(2.0, 0.0), ZERO, ZERO);
    for s in [&two, &one, &empty] {
        let fa = twistor_fibers_in(s).unwrap();
        let reported: Vec<ProjVec> = match &fa.set {
            FiberSet::Empty => vec![],
            FiberSet::One(q) => vec![q.clone()],
            FiberSet::Two(q1, q2) => vec![q1.clone(), q2.clone()],
            FiberSet::Circle(_) => vec![],
        };
        // every reported fiber lies on the surface at 20 parameter values
        for q in &reported {
            let fiber = twistor_fiber(q).unwrap();
            let mut r: f64 = 0.0;
            for tt in param_grid(20) {
                r = r.max(member_residual(s, &fiber.sample(tt).unwrap()));
            }
            t.case(r, r <= 1e-8);
        }
        // unreported base points always have some fiber sample off the surface
        for _ in 0..n.min(40) {
            let q = random_from_rng(rng, Flavor::Point);
            if reported
                .iter()
                .any(|rep| proj_eq(rep, &q, 1e-6).unwrap_or(false))
            {
                continue;
            }
            let fiber = twistor_fiber(&q).unwrap();
            let off = param_grid(20)
                .into_iter()
                .map(|tt| member_residual(s, &fiber.sample(tt).unwrap()))
                .fold(0.0f64, f64::max);
            t.case(1.0 / (1.0 + off), off > 1e-6);
        }
    }
    t
}

fn twistor_condition_exclusivity(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    let annulus = |rng: &mut ChaCha12Rng| loop {
        let z = crate::linalg::gaussian_c(rng);
        if z.norm() > 0.3 && z.norm() < 2.5 {
            break z;
        }
    };
    for i in 0..n {
        let lambda = loop {
            let z = annulus(rng);
            if z.im.abs() > 0.2 && (z - c(1.0, 0.0)).norm() > 0.3 {
                break z;
            }
        };
        let mut a = annulus(rng);
        let mut b = annulus(rng);
        let mut cc = annulus(rng);
        // solve the i%3-th coincidence equation for one variable
        match i % 3 {
            0 => a = (c(b.norm_sqr(), 0.0) * (c(1.0, 0.0) - lambda) - c(cc.norm_sqr(), 0.0) * lambda) / (b.conj() * cc),
            1 => b = ((-(c(a.norm_sqr(), 0.0) * (c(1.0, 0.0) - lambda) + c(cc.norm_sqr(), 0.0))) / (a * cc)).conj(),
            _ => cc = (c(a.norm_sqr(), 0.0) * lambda + c(b.norm_sqr(), 0.0)) / (a * b.conj()),
        }
        if a.norm() < 1e-3 || b.norm() < 1e-3 || cc.norm() < 1e-3 {
            continue;
        }
        let abc = a * b.conj() * cc;
        let f1 = c(b.norm_sqr(), 0.0) * (c(1.0, 0.0) - lambda) - c(cc.norm_sqr(), 0.0) * lambda - abc;
        let f2 = c(a.norm_sqr(), 0.0) * (c(1.0, 0.0) - lambda) + c(cc.norm_sqr(), 0.0) + abc;
        let f3 = c(a.norm_sqr(), 0.0) * lambda + c(b.norm_sqr(), 0.0) - abc;
        let sp = 1.0f64
            .max(lambda.norm())
            .max(a.norm())
            .max(b.norm())
            .max(cc.norm());
        let band = 1e-9 * sp.powi(3);
        let holding = [f1, f2, f3].iter().filter(|f| f.norm() <= band).count();
        let own = [f1, f2, f3][i % 3].norm() / sp.powi(3);
        t.case(own, holding == 1 && own <= 1e-9);
    }
    t
}

fn twistor_torus_invariance(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        // a normal surface with nonreal cross-ratio: the toric case
        let d = loop {
            let d0 = crate::linalg::gaussian_c(rng);
            let d1 = crate::linalg::gaussian_c(rng);
            let d2 = crate::linalg::gaussian_c(rng);
            let lam = (d2 - d0) / (d1 - d0);
            if (d1 - d0).norm() > 0.3 && (d2 - d0).norm() > 0.3 && (d2 - d1).norm() > 0.3
                && lam.im.abs() > 0.2
            {
                break [d0, d1, d2];
            }
        };
        let s = Surface11::from_matrix([
            [d[0], ZERO, ZERO],
            [ZERO, d[1], ZERO],
            [ZERO, ZERO, d[2]],
        ])
        .unwrap();
        let q = random_from_rng(rng, Flavor::Point);
        let r0 = branch_r(&s, &q).unwrap().r;
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let th1 = rng.gen::<f64>() * std::f64::consts::TAU;
            let th2 = rng.gen::<f64>() * std::f64::consts::TAU;
            let qc = q.coords();
            let rotated = ProjVec::point([
                qc[0],
                qc[1] * C::from_polar(1.0, th1),
                qc[2] * C::from_polar(1.0, th2),
            ])
            .unwrap();
            let r1 = branch_r(&s, &rotated).unwrap().r;
            worst = worst.max((r1 - r0).norm() / (1.0 + r0.norm()));
        }
        t.case(worst, worst <= 1e-12);
    }
    t
}

fn twistor_circle_moment_point(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        // Hermitian diagonal with well-separated eigenvalues
        let mut d = [0.0f64; 3];
        loop {
            for v in d.iter_mut() {
                *v = rng.gen::<f64>() * 4.0 - 2.0;
            }
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if d[1] - d[0] > 0.2 && d[2] - d[1] > 0.2 {
                break;
            }
        }
        let s = Surface11::from_matrix([
            [c(d[0], 0.0), ZERO, ZERO],
            [ZERO, c(d[1], 0.0), ZERO],
            [ZERO, ZERO, c(d[2], 0.0)],
        ])
        .unwrap();
        let fa = twistor_fibers_in(&s).unwrap();
        let FiberSet::Circle(cl) = &fa.set else {
            t.case(1.0, false);
            continue;
        };
        let mu0 = moment_map(&cl.sample(0.0).unwrap()).unwrap();
        let mut r = mu0.iter().cloned().fold(f64::MAX, f64::min); // boundary gap
        for k in 1..12 {
            let mu = moment_map(&cl.sample(0.55 * k as f64).unwrap()).unwrap();
            for (x, y) in mu.iter().zip(mu0.iter()) {
                r = r.max((x - y).abs());
            }
        }
        t.case(r, r <= 1e-9);
    }
    t
}

// ---- metric ----

fn metric_quadric_containment(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let cur = random_smooth_curve(rng);
        let iq = image_quadric(&cur).unwrap();
        let nf = linalg::frob(iq.matrix());
        let mut r: f64 = 0.0;
        for tt in param_grid(100) {
            let z = cur.param(tt).unwrap().twistor_projection();
            r = r.max(iq.eval(z.coords()).norm() / nf);
        }
        t.case(r, r <= 1e-8);
    }
    t
}

fn metric_normal_form_image(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let cur = random_smooth_curve(rng);
        let rho = sphere_normal_form(&cur).unwrap().rho;
        if rho < 1e-3 {
            continue;
        }
        let normal = Curve11::new(
            ProjVec::point([c(1.0, 0.0), ZERO, ZERO]).unwrap(),
            ProjVec::new([c(1.0, 0.0), c(2.0 * rho, 0.0), ZERO], Flavor::Line).unwrap(),
        )
        .unwrap();
        let mut r: f64 = 0.0;
        let mut ok = true;
        for tt in param_grid(100) {
            let z = normal.param(tt).unwrap().twistor_projection();
            let zc = z.coords();
            if zc[0].norm() < 1e-9 {
                ok = false;
                continue;
            }
            let (z1, z2) = (zc[1] / zc[0], zc[2] / zc[0]);
            let planar = z1.im.abs() / (1.0 + rho * rho);
            let spherical =
                ((z1.re - rho).powi(2) + z2.norm_sqr() - rho * rho).abs() / (1.0 + rho * rho);
            r = r.max(planar).max(spherical);
        }
        t.case(r, ok && r <= 1e-7);
    }
    t
}

fn metric_profile_isometry(_rng: &mut ChaCha12Rng, _n: usize) -> Tally {
    let mut t = Tally::new();
    let sphere_point = |rho: f64, u: f64, v: f64| -> ProjVec {
        ProjVec::point([
            c(1.0, 0.0),
            c(rho * v.sin(), 0.0),
            C::from_polar(rho * v.cos(), u),
        ])
        .unwrap()
    };
    let chords = 4000;
    for rho in [0.5f64, 1.0, 2.0, 8.0] {
        let gcap = rho * rho / (1.0 + rho * rho);

        // meridian length vs the profile-curve length π√G
        let mut fs_len = 0.0;
        for i in 0..chords {
            let v0 = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * i as f64 / chords as f64;
            let v1 = -std::f64::consts::FRAC_PI_2
                + std::f64::consts::PI * (i + 1) as f64 / chords as f64;
            fs_len += fubini_study_distance(&sphere_point(rho, 0.37, v0), &sphere_point(rho, 0.37, v1))
                .unwrap();
        }
        let expect = std::f64::consts::PI * gcap.sqrt();
        let r1 = (fs_len - expect).abs() / (1.0 + expect);
        t.case(r1, r1 <= 1e-4);

        // latitude circle length vs 2π·f(v)
        let v = 0.4;
        let mut lat = 0.0;
        for i in 0..chords {
            let u0 = std::f64::consts::TAU * i as f64 / chords as f64;
            let u1 = std::f64::consts::TAU * (i + 1) as f64 / chords as f64;
            lat += fubini_study_distance(&sphere_point(rho, u0, v), &sphere_point(rho, u1, v))
                .unwrap();
        }
        let radius = rho * v.cos() * (1.0 + rho * rho * v.sin() * v.sin()).sqrt() / (1.0 + rho * rho);
        let expect = std::f64::consts::TAU * radius;
        let r2 = (lat - expect).abs() / (1.0 + expect);
        t.case(r2, r2 <= 1e-4);
    }
    t
}

fn metric_moment_interior_boundary(rng: &mut ChaCha12Rng, _n: usize) -> Tally {
    let mut t = Tally::new();
    // branch locus of the toric surface stays interior to the simplex
    let toric = Surface11::from_matrix([
        [ZERO, ZERO, ZERO],
        [ZERO, c(1.0, 0.0), ZERO],
        [ZERO, ZERO, c(0.0, 1.0)],
    ])
    .unwrap();
    let zeros = branch_zeros(&toric, 24, rng.gen()).unwrap();
    t.case(
        if zeros.len() >= 5 { 0.0 } else { 1.0 },
        zeros.len() >= 5,
    );
    for z in &zeros {
        let mu = moment_map(z).unwrap();
        let margin = mu.iter().cloned().fold(f64::MAX, f64::min);
        t.case(1.0 / (1.0 + margin), margin > 0.02);
    }
    // the Hermitian circle sits on the simplex boundary
    let herm = Surface11::from_matrix([
        [ZERO, ZERO, ZERO],
        [ZERO, c(1.0, 0.0), ZERO],
        [ZERO, ZERO, c(2.0, 0.0)],
    ])
    .unwrap();
    if let FiberSet::Circle(cl) = twistor_fibers_in(&herm).unwrap().set {
        for k in 0..8 {
            let mu = moment_map(&cl.sample(0.8 * k as f64).unwrap()).unwrap();
            let edge = mu.iter().cloned().fold(f64::MAX, f64::min);
            t.case(edge, edge <= 1e-9);
        }
    } else {
        t.case(1.0, false);
    }
    t
}

// ---- counts ----

fn counts_section_identity(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let a = rng.gen_range(1..=60i64);
        let b = rng.gen_range(1..=60i64);
        let lhs = h0_flag(a, b).unwrap();
        let rhs = h0_product(a, b).unwrap() - h0_product(a - 1, b - 1).unwrap();
        t.case((lhs - rhs).unsigned_abs() as f64, lhs == rhs);
    }
    t
}

fn counts_line_bound_trilinear(_rng: &mut ChaCha12Rng, _n: usize) -> Tally {
    let mut t = Tally::new();
    for a in 0..=6i64 {
        for b in 0..=6i64 {
            let lhs = triple_product(Bidegree::new(a, b), Bidegree::new(b, a), Bidegree::new(1, 0))
                .unwrap();
            let rhs = a * a + a * b + b * b;
            t.case((lhs - rhs).unsigned_abs() as f64, lhs == rhs);
        }
    }
    t
}

fn counts_symmetry(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let a = rng.gen_range(-3..=50i64);
        let b = rng.gen_range(-3..=50i64);
        let ok = h0_product(a, b).unwrap() == h0_product(b, a).unwrap()
            && h0_flag(a, b).unwrap() == h0_flag(b, a).unwrap()
            && c1_squared(a, b).unwrap() == c1_squared(b, a).unwrap();
        t.case(if ok { 0.0 } else { 1.0 }, ok);
    }
    t
}

// ---- verify (self-checks) ----

fn verify_determinism(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    // replay a nontrivial check twice from the same derived seed
    let probe = &REGISTRY[0];
    let seed = rng.gen::<u64>();
    let m = n.min(25);
    let run = |seed: u64| {
        let mut r = ChaCha12Rng::seed_from_u64(seed);
        let out = (probe.run)(&mut r, m);
        (out.samples, out.failures, out.worst.to_bits())
    };
    let ok = run(seed) == run(seed);
    t.case(if ok { 0.0 } else { 1.0 }, ok);
    t
}

fn verify_coverage(_rng: &mut ChaCha12Rng, _n: usize) -> Tally {
    let mut t = Tally::new();
    for (module, expected) in [
        ("proj_", 3usize),
        ("flag_", 3),
        ("curves_", 3),
        ("surfaces_", 5),
        ("twistor_", 5),
        ("metric_", 4),
        ("counts_", 3),
        ("verify_", 2),
        ("cli_", 2),
    ] {
        let got = REGISTRY
            .iter()
            .filter(|ch| ch.name.starts_with(module))
            .count();
        t.case(
            (got as f64 - expected as f64).abs(),
            got == expected,
        );
    }
    t
}

// ---- cli contracts (format-level, exercised without a process) ----

fn cli_json_round_trip(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let v = (rng.gen::<f64>() - 0.5) * 10f64.powi(rng.gen_range(-20..20));
        let doc = serde_json::json!({ "x": v, "arr": [v, -v, 0.25] });
        let s1 = serde_json::to_string(&doc).unwrap();
        let back: serde_json::Value = serde_json::from_str(&s1).unwrap();
        let s2 = serde_json::to_string(&back).unwrap();
        let ok = s1 == s2
            && back["x"].as_f64().map(f64::to_bits) == Some(v.to_bits());
        t.case(if ok { 0.0 } else { 1.0 }, ok);
    }
    t
}

fn cli_seed_determinism(rng: &mut ChaCha12Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n.min(20) {
        let seed = rng.gen::<u64>();
        let render = |seed: u64| -> String {
            let mut r = ChaCha12Rng::seed_from_u64(seed);
            let a = random_bounded_cond(&mut r, 10.0);
            let s = Surface11::from_matrix(a).unwrap();
            match s.classify().tag {
                ClassTag::A1 { lambda } => {
                    serde_json::json!({"tag": "A1", "lambda": [lambda.re, lambda.im]}).to_string()
                }
                other => serde_json::json!({ "tag": other.name() }).to_string(),
            }
        };
        let ok = render(seed) == render(seed);
        t.case(if ok { 0.0 } else { 1.0 }, ok);
    }
    t
}

/// Static registry: one named check per documented library law.
pub static REGISTRY: &[Check] = &[
    Check {
        name: "proj_cross_pairing",
        law: "the cross product of independent like-flavor vectors pairs to zero with both factors",
        run: proj_cross_pairing,
    },
    Check {
        name: "proj_projection_reconstruction",
        law: "for incident (p, l), p x conj(conj(p) x l) recovers l projectively",
        run: proj_projection_reconstruction,
    },
    Check {
        name: "proj_normalize_idempotent",
        law: "canonical representatives are stable and projective equality is an equivalence relation",
        run: proj_normalize_idempotent,
    },
    Check {
        name: "flag_involution_algebra",
        law: "j1, j, j2 are distinct involutions and pi1 after j equals pi2*, pi2* after j equals pi1",
        run: flag_involution_algebra,
    },
    Check {
        name: "flag_unitary_splitting",
        law: "p, the projection point, and l* are pairwise Hermitian-orthogonal on any flag",
        run: flag_unitary_splitting,
    },
    Check {
        name: "flag_kappa_conjugation",
        law: "kappa covers coordinate conjugation: projection(kappa x) = conj(projection x)",
        run: flag_kappa_conjugation,
    },
    Check {
        name: "curves_intersect_oracle",
        law: "intersect agrees with the direct solution of the stacked incidence system",
        run: curves_intersect_oracle,
    },
    Check {
        name: "curves_j_image",
        law: "j maps the curve with data (q, m) onto the curve with data (m*, q*)",
        run: curves_j_image,
    },
    Check {
        name: "curves_fiber_disjointness",
        law: "a smooth curve misses its j-image unless it is a twistor fiber, which is j-fixed",
        run: curves_fiber_disjointness,
    },
    Check {
        name: "surfaces_pencil_invariance",
        law: "classification is invariant under A -> alpha A + beta I with alpha nonzero",
        run: surfaces_pencil_invariance,
    },
    Check {
        name: "surfaces_conjugation_invariance",
        law: "classification is invariant under similarity, comparing cross-ratio orbits",
        run: surfaces_conjugation_invariance,
    },
    Check {
        name: "surfaces_smoothness_spectrum",
        law: "the surface is smooth exactly when the matrix has three simple eigenvalues",
        run: surfaces_smoothness_spectrum,
    },
    Check {
        name: "surfaces_unitary_equivalence",
        law: "unitary equivalence is reflexive, symmetric, and invariant under unitary motion",
        run: surfaces_unitary_equivalence,
    },
    Check {
        name: "surfaces_jordan_singular_flag",
        law: "the singular point of a 2-Jordan-block surface is a genuine incident flag",
        run: surfaces_jordan_singular_flag,
    },
    Check {
        name: "twistor_preimage_coincidence",
        law: "fibers meet the surface in two flags that coincide exactly on the branch zero set",
        run: twistor_preimage_coincidence,
    },
    Check {
        name: "twistor_fiberset_oracle",
        law: "reported contained fibers lie on the surface pointwise; unreported base points do not",
        run: twistor_fiberset_oracle,
    },
    Check {
        name: "twistor_condition_exclusivity",
        law: "with all off-diagonal parameters nonzero, at most one coincidence condition holds",
        run: twistor_condition_exclusivity,
    },
    Check {
        name: "twistor_torus_invariance",
        law: "for normal surfaces with nonreal cross-ratio the branch polynomial is torus-invariant",
        run: twistor_torus_invariance,
    },
    Check {
        name: "twistor_circle_moment_point",
        law: "the Hermitian fiber circle maps to a single boundary point of the moment simplex",
        run: twistor_circle_moment_point,
    },
    Check {
        name: "metric_quadric_containment",
        law: "projections of curve points satisfy the image quadric equation",
        run: metric_quadric_containment,
    },
    Check {
        name: "metric_normal_form_image",
        law: "in normal position the image is the affine 2-sphere of radius rho in the real chart",
        run: metric_normal_form_image,
    },
    Check {
        name: "metric_profile_isometry",
        law: "profile-curve lengths match Fubini-Study lengths of meridians and latitudes",
        run: metric_profile_isometry,
    },
    Check {
        name: "metric_moment_interior_boundary",
        law: "toric branch zeros map interior to the simplex; the Hermitian circle maps to its boundary",
        run: metric_moment_interior_boundary,
    },
    Check {
        name: "counts_section_identity",
        law: "flag section counts equal the product count minus the twisted product count",
        run: counts_section_identity,
    },
    Check {
        name: "counts_line_bound_trilinear",
        law: "the trilinear product with the swapped bidegree and a generator equals a^2+ab+b^2",
        run: counts_line_bound_trilinear,
    },
    Check {
        name: "counts_symmetry",
        law: "all counts are invariant under swapping the bidegree components",
        run: counts_symmetry,
    },
    Check {
        name: "verify_determinism",
        law: "identical seeds reproduce identical check outcomes bit for bit",
        run: verify_determinism,
    },
    Check {
        name: "verify_coverage",
        law: "the registry carries the pinned number of checks for every library module",
        run: verify_coverage,
    },
    Check {
        name: "cli_json_round_trip",
        law: "emitted JSON numbers re-parse to bit-identical values and re-serialize identically",
        run: cli_json_round_trip,
    },
    Check {
        name: "cli_seed_determinism",
        law: "a fixed seed fully determines any randomized output",
        run: cli_seed_determinism,
    },
];
