//! The flag manifold: incident (point, line) pairs, the twistor projection,
//! the three involutions j₁, j, j₂ and the conjugation cover κ, the PGL(3)
//! action, and the fibers of the two forgetful projections.

use crate::linalg::{self, Mat3};
use crate::proj::{cross, pair, proj_eq, Flavor, Param, ProjVec, PROJ_TOL, ZERO_TOL};
use crate::{Error, Result};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An incident pair (p, ℓ): the point p lies on the line ℓ, i.e. pℓ = 0.
#[derive(Clone, Copy, Debug)]
pub struct FlagPoint {
    p: ProjVec,
    l: ProjVec,
}

impl FlagPoint {
    /// Validates incidence. Inputs with |pℓ| in (1e-12, 1e-9) are repaired by
    /// projecting ℓ back to incidence (ℓ ← ℓ − (pℓ/‖p‖²)p*, an exact
    /// orthogonal correction); anything worse is rejected.
    pub fn new(p: ProjVec, l: ProjVec) -> Result<Self> {
        let z = pair(&p, &l)?;
        let r = z.norm(); // representatives are unit vectors
        if r <= ZERO_TOL {
            return Ok(FlagPoint { p, l });
        }
        if r < PROJ_TOL {
            let corr = linalg::scale(&linalg::conj(p.coords()), z);
            let fixed = ProjVec::new(linalg::sub(l.coords(), &corr), Flavor::Line)?;
            let recheck = pair(&p, &fixed)?.norm();
            if recheck <= PROJ_TOL {
                return Ok(FlagPoint { p, l: fixed });
            }
        }
        Err(Error::NotIncident)
    }

    pub fn p(&self) -> &ProjVec {
        &self.p
    }

    pub fn l(&self) -> &ProjVec {
        &self.l
    }

    /// First forgetful projection π₁(p,ℓ) = p.
    pub fn pi1(&self) -> ProjVec {
        self.p
    }

    /// Conjugated second projection π₂*(p,ℓ) = ℓ* (a point).
    pub fn pi2_star(&self) -> ProjVec {
        self.l.star()
    }

    /// The middle projection π(p,ℓ) = p* × ℓ: the twistor fibration.
    ///
    /// Never degenerate: p* = ℓ would force pℓ = ‖p‖² ≠ 0.
    pub fn twistor_projection(&self) -> ProjVec {
        cross(&self.p.star(), &self.l).expect("incidence precludes p* ∥ ℓ")
    }

    /// j₁(p,ℓ) = (p, p×ℓ*): fixes p, reflects ℓ in the pencil through p.
    pub fn j1(&self) -> FlagPoint {
        let new_l = cross(&self.p, &self.l.star()).expect("incidence precludes p ∥ ℓ*");
        FlagPoint::new(self.p, new_l).expect("p(p×ℓ*) = 0 identically")
    }

    /// j(p,ℓ) = (ℓ*, p*): the anti-holomorphic flip exchanging the factors.
    pub fn j(&self) -> FlagPoint {
        FlagPoint::new(self.l.star(), self.p.star()).expect("ℓ*p* = conj(pℓ) = 0")
    }

    /// j₂(p,ℓ) = (p*×ℓ, ℓ): fixes ℓ, moves p to the twistor image.
    pub fn j2(&self) -> FlagPoint {
        FlagPoint::new(self.twistor_projection(), self.l).expect("(p*×ℓ)ℓ = 0 identically")
    }

    /// κ(p,ℓ) = (ℓᵛ, pᵛ): transpose without conjugation. Not unitary, but it
    /// covers complex conjugation through the twistor projection.
    pub fn kappa(&self) -> FlagPoint {
        FlagPoint::new(self.l.transposed(), self.p.transposed()).expect("ℓᵛpᵛ = pℓ = 0")
    }
}

/// The PGL(3) action B·(p,ℓ) = (pB⁻¹, Bℓ). Preserves incidence exactly.
pub fn act(b: &Mat3, x: &FlagPoint) -> Result<FlagPoint> {
    let binv = linalg::inverse(b).ok_or(Error::SingularMatrix)?;
    let p = ProjVec::new(linalg::vecmat(x.p.coords(), &binv), Flavor::Point)?;
    let l = ProjVec::new(linalg::matvec(b, x.l.coords()), Flavor::Line)?;
    FlagPoint::new(p, l)
}

/// Result of intersecting two forgetful-projection fibers.
#[derive(Clone, Copy, Debug)]
pub enum FiberMeet {
    Empty,
    Point(FlagPoint),
    Coincide,
}

/// A fiber of π₁ (base point: all flags (q, ·)) or of π₂ (base line: all
/// flags (·, m)), with a rational parametrization of the free leg.
#[derive(Clone, Copy, Debug)]
pub struct PencilFiber {
    base: ProjVec,
    a: ProjVec,
    b: ProjVec,
}

/// π₁⁻¹(q) = {(q, ℓ) : qℓ = 0}: the pencil of lines through q.
pub fn fiber_pi1(q: &ProjVec) -> Result<PencilFiber> {
    if q.flavor() != Flavor::Point {
        return Err(Error::FlavorMismatch {
            expected: Flavor::Point,
            got: q.flavor(),
        });
    }
    let (a, b) = crate::proj::pencil_basis(q)?;
    Ok(PencilFiber { base: *q, a, b })
}

/// π₂⁻¹(m) = {(p, m) : pm = 0}: the points of the line m.
pub fn fiber_pi2(m: &ProjVec) -> Result<PencilFiber> {
    if m.flavor() != Flavor::Line {
        return Err(Error::FlavorMismatch {
            expected: Flavor::Line,
            got: m.flavor(),
        });
    }
    let (a, b) = crate::proj::pencil_basis(m)?;
    Ok(PencilFiber { base: *m, a, b })
}

impl PencilFiber {
    pub fn base(&self) -> &ProjVec {
        &self.base
    }

    /// The flag at parameter t (free leg = basis_a + t·basis_b, t = ∞ ↦
    /// basis_b).
    pub fn sample(&self, t: Param) -> Result<FlagPoint> {
        let free = ProjVec::new(
            t.combine(self.a.coords(), self.b.coords()),
            self.base.flavor().flipped(),
        )?;
        match self.base.flavor() {
            Flavor::Point => FlagPoint::new(self.base, free),
            Flavor::Line => FlagPoint::new(free, self.base),
        }
    }

    /// Set-theoretic intersection with another fiber. Two π₁ fibers (or two
    /// π₂ fibers) are disjoint unless identical; a π₁ fiber meets a π₂ fiber
    /// exactly when the base point lies on the base line, in the single flag
    /// (q, m).
    pub fn meets(&self, other: &PencilFiber) -> Result<FiberMeet> {
        if self.base.flavor() == other.base.flavor() {
            return Ok(if proj_eq(&self.base, &other.base, PROJ_TOL)? {
                FiberMeet::Coincide
            } else {
                FiberMeet::Empty
            });
        }
        let (q, m) = match self.base.flavor() {
            Flavor::Point => (&self.base, &other.base),
            Flavor::Line => (&other.base, &self.base),
        };
        if pair(q, m)?.norm() < PROJ_TOL {
            Ok(FiberMeet::Point(FlagPoint::new(*q, *m)?))
        } else {
            Ok(FiberMeet::Empty)
        }
    }
}

/// Deterministic flag sampler: Fubini–Study-uniform p, then a random line
/// through it (Gaussian coefficient against the pencil basis).
pub fn random_flag_from_rng<R: Rng>(rng: &mut R) -> FlagPoint {
    loop {
        let p = crate::proj::random_from_rng(rng, Flavor::Point);
        let Ok((a, b)) = crate::proj::pencil_basis(&p) else {
            continue;
        };
        let t = linalg::gaussian_c(rng);
        let raw = linalg::add(a.coords(), &linalg::scale(b.coords(), t));
        let Ok(l) = ProjVec::new(raw, Flavor::Line) else {
            continue;
        };
        if let Ok(x) = FlagPoint::new(p, l) {
            return x;
        }
    }
}

pub fn random_flag(seed: u64) -> FlagPoint {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    random_flag_from_rng(&mut rng)
}

// ---- serialization: {"p": ProjVec, "l": ProjVec} ----

#[derive(Serialize, Deserialize)]
struct FlagWire {
    p: ProjVec,
    l: ProjVec,
}

impl Serialize for FlagPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FlagWire { p: self.p, l: self.l }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlagPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = FlagWire::deserialize(d)?;
        FlagPoint::new(w.p, w.l).map_err(|e| D::Error::custom(e.to_string()))
    }
}
