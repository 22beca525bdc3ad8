//! Points and lines of the complex projective plane.
//!
//! A `ProjVec` is a nonzero vector in C³ tagged with a flavor: `Point`s are
//! row vectors spanning a point of P², `Line`s are column vectors cutting out
//! a line. Every value is stored as its *canonical representative*: unit
//! Euclidean norm, with the component of largest modulus real and positive
//! (ties broken by lowest index). That makes projective equality a plain
//! Euclidean comparison and keeps printed output deterministic.

use crate::linalg::{self, Vec3};
use crate::{Error, Result};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Default tolerance for projective predicates (equality, incidence).
pub const PROJ_TOL: f64 = 1e-9;
/// Absolute threshold below which a vector counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Point,
    Line,
}

impl Flavor {
    pub fn flipped(self) -> Flavor {
        match self {
            Flavor::Point => Flavor::Line,
            Flavor::Line => Flavor::Point,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProjVec {
    coords: Vec3,
    flavor: Flavor,
}

impl ProjVec {
    /// Canonicalizes and stores the class of `coords`.
    pub fn new(coords: Vec3, flavor: Flavor) -> Result<Self> {
        let max = coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(max > ZERO_TOL) {
            return Err(Error::ZeroVector);
        }
        let k = linalg::argmax_abs(&coords);
        let phase = coords[k] / C::new(coords[k].norm(), 0.0);
        let n = linalg::norm(&coords);
        let coords = linalg::scale(&coords, phase.conj() / C::new(n, 0.0));
        Ok(ProjVec { coords, flavor })
    }

    pub fn point(coords: Vec3) -> Result<Self> {
        Self::new(coords, Flavor::Point)
    }

    pub fn line(coords: Vec3) -> Result<Self> {
        Self::new(coords, Flavor::Line)
    }

    pub fn coords(&self) -> &Vec3 {
        &self.coords
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Anti-linear star: conjugate the coordinates and flip the flavor.
    /// An involution; a point maps to its Hermitian-polar line.
    pub fn star(&self) -> ProjVec {
        ProjVec {
            coords: linalg::conj(&self.coords),
            flavor: self.flavor.flipped(),
        }
    }

    /// Complex conjugation σ: conjugate coordinates, *same* flavor.
    pub fn conjugated(&self) -> ProjVec {
        ProjVec {
            coords: linalg::conj(&self.coords),
            flavor: self.flavor,
        }
    }

    /// Same coordinates reinterpreted with the opposite flavor
    /// (transpose without conjugation).
    pub fn transposed(&self) -> ProjVec {
        ProjVec {
            coords: self.coords,
            flavor: self.flavor.flipped(),
        }
    }

    /// Euclidean distance between canonical representatives. Only
    /// meaningful for like flavors.
    pub fn dist(&self, other: &ProjVec) -> f64 {
        linalg::norm(&linalg::sub(&self.coords, &other.coords))
    }
}

/// Projective equality: canonical representatives within `tol` in Euclidean
/// norm. This is the documented rule; `PROJ_TOL` is the default.
pub fn proj_eq(u: &ProjVec, v: &ProjVec, tol: f64) -> Result<bool> {
    if u.flavor != v.flavor {
        return Err(Error::FlavorMismatch {
            expected: u.flavor,
            got: v.flavor,
        });
    }
    Ok(u.dist(v) < tol)
}

/// Cross product of two like-flavored classes: the line through two points,
/// or the intersection point of two lines. Output has the opposite flavor
/// and pairs to zero with both inputs.
pub fn cross(u: &ProjVec, v: &ProjVec) -> Result<ProjVec> {
    if u.flavor != v.flavor {
        return Err(Error::FlavorMismatch {
            expected: u.flavor,
            got: v.flavor,
        });
    }
    let w = linalg::cross(&u.coords, &v.coords);
    // inputs are unit vectors, so ‖w‖ ≈ the projective separation
    if linalg::norm(&w) < PROJ_TOL {
        return Err(Error::DegenerateCross);
    }
    ProjVec::new(w, u.flavor.flipped())
}

/// The bilinear pairing p₀ℓ₀+p₁ℓ₁+p₂ℓ₂ on the stored (unit) representatives.
/// Only its vanishing is projectively meaningful; `|pair| < PROJ_TOL` is the
/// incidence test.
pub fn pair(p: &ProjVec, l: &ProjVec) -> Result<C> {
    if p.flavor != Flavor::Point {
        return Err(Error::FlavorMismatch {
            expected: Flavor::Point,
            got: p.flavor,
        });
    }
    if l.flavor != Flavor::Line {
        return Err(Error::FlavorMismatch {
            expected: Flavor::Line,
            got: l.flavor,
        });
    }
    Ok(linalg::dot(&p.coords, &l.coords))
}

/// Deterministic Fubini–Study-uniform sample: six independent standard
/// Gaussians (real and imaginary parts of the three coordinates), then
/// canonicalize. The same seed yields the same coordinates for either
/// flavor.
pub fn random_projvec(seed: u64, flavor: Flavor) -> ProjVec {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    random_from_rng(&mut rng, flavor)
}

/// As `random_projvec`, drawing from a live RNG.
pub fn random_from_rng<R: Rng>(rng: &mut R, flavor: Flavor) -> ProjVec {
    loop {
        if let Ok(v) = ProjVec::new(linalg::gaussian_vec3(rng), flavor) {
            return v;
        }
    }
}

/// A point of the projective parameter line P¹, with the point at infinity
/// represented explicitly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    Finite(C),
    Infinity,
}

impl From<f64> for Param {
    fn from(t: f64) -> Self {
        Param::Finite(C::new(t, 0.0))
    }
}

impl From<C> for Param {
    fn from(t: C) -> Self {
        Param::Finite(t)
    }
}

impl Param {
    /// a + t·b, with t = ∞ ↦ b.
    pub fn combine(&self, a: &Vec3, b: &Vec3) -> Vec3 {
        match self {
            Param::Finite(t) => linalg::add(a, &linalg::scale(b, *t)),
            Param::Infinity => *b,
        }
    }
}

/// The two best-conditioned pencil generators `v × e_i`, `v × e_j`, where
/// e_i, e_j are the standard basis vectors giving the largest cross-product
/// norms (largest first, ties by lower index). For a point this spans the
/// pencil of lines through it; for a line, the points on it.
pub fn pencil_basis(v: &ProjVec) -> Result<(ProjVec, ProjVec)> {
    let mut cands: Vec<(f64, usize, Vec3)> = (0..3)
        .map(|k| {
            let w = linalg::cross(&v.coords, &linalg::basis(k));
            (linalg::norm(&w), k, w)
        })
        .collect();
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    if cands[1].0 < PROJ_TOL {
        return Err(Error::DegenerateParameter);
    }
    let fl = v.flavor.flipped();
    Ok((ProjVec::new(cands[0].2, fl)?, ProjVec::new(cands[1].2, fl)?))
}

// ---- serialization: {"flavor":"point"|"line","coords":[[re,im],[re,im],[re,im]]} ----

#[derive(Serialize, Deserialize)]
struct ProjVecWire {
    flavor: Flavor,
    coords: [[f64; 2]; 3],
}

impl Serialize for ProjVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coords = [
            [self.coords[0].re, self.coords[0].im],
            [self.coords[1].re, self.coords[1].im],
            [self.coords[2].re, self.coords[2].im],
        ];
        ProjVecWire {
            flavor: self.flavor,
            coords,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = ProjVecWire::deserialize(d)?;
        let coords = [
            C::new(w.coords[0][0], w.coords[0][1]),
            C::new(w.coords[1][0], w.coords[1][1]),
            C::new(w.coords[2][0], w.coords[2][1]),
        ];
        ProjVec::new(coords, w.flavor).map_err(|e| D::Error::custom(e.to_string()))
    }
}

fn fmt_c(z: &C, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if z.im == 0.0 {
        write!(f, "{:.6}", z.re)
    } else {
        write!(f, "{:.6}{:+.6}i", z.re, z.im)
    }
}

impl fmt::Display for ProjVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, z) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " : ")?;
            }
            fmt_c(z, f)?;
        }
        write!(f, "]")?;
        if self.flavor == Flavor::Line {
            write!(f, "^v")?;
        }
        Ok(())
    }
}
