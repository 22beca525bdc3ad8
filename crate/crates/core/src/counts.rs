//! Closed-form integer invariants: section counts, the triple intersection
//! product of the generating divisor classes, c₁², and blow-up counts.
//!
//! Everything is exact 64-bit arithmetic with overflow checks; inputs are
//! capped at |·| ≤ 10⁶.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A divisor bidegree (a, b).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bidegree {
    pub a: i64,
    pub b: i64,
}

impl Bidegree {
    pub fn new(a: i64, b: i64) -> Self {
        Bidegree { a, b }
    }
}

const CAP: i64 = 1_000_000;

fn capped(vals: &[i64]) -> Result<()> {
    if vals.iter().any(|v| v.abs() > CAP) {
        return Err(Error::CountOverflow);
    }
    Ok(())
}

fn mul(x: i64, y: i64) -> Result<i64> {
    x.checked_mul(y).ok_or(Error::CountOverflow)
}

fn add(x: i64, y: i64) -> Result<i64> {
    x.checked_add(y).ok_or(Error::CountOverflow)
}

fn sub(x: i64, y: i64) -> Result<i64> {
    x.checked_sub(y).ok_or(Error::CountOverflow)
}

/// Binomial C(n, 2) = n(n−1)/2, zero for n < 2.
fn choose2(n: i64) -> Result<i64> {
    if n < 2 {
        return Ok(0);
    }
    Ok(mul(n, n - 1)? / 2)
}

/// Sections of the (a,b) line bundle on the ambient product:
/// C(a+2,2)·C(b+2,2), zero when either degree is negative.
pub fn h0_product(a: i64, b: i64) -> Result<i64> {
    capped(&[a, b])?;
    if a < 0 || b < 0 {
        return Ok(0);
    }
    mul(choose2(a + 2)?, choose2(b + 2)?)
}

/// Sections of the restriction to the flag manifold:
/// C(a+2,2)C(b+2,2) − C(a+1,2)C(b+1,2) for a,b ≥ 0, else 0.
pub fn h0_flag(a: i64, b: i64) -> Result<i64> {
    capped(&[a, b])?;
    if a < 0 || b < 0 {
        return Ok(0);
    }
    sub(
        mul(choose2(a + 2)?, choose2(b + 2)?)?,
        mul(choose2(a + 1)?, choose2(b + 1)?)?,
    )
}

/// Trilinear extension of the triple product on the divisor generators:
/// the product of a triple of generators is 0 when all three coincide and 1
/// otherwise, so for general bidegrees
/// (a₁+b₁)(a₂+b₂)(a₃+b₃) − a₁a₂a₃ − b₁b₂b₃.
pub fn triple_product(x: Bidegree, y: Bidegree, z: Bidegree) -> Result<i64> {
    capped(&[x.a, x.b, y.a, y.b, z.a, z.b])?;
    let all = mul(mul(add(x.a, x.b)?, add(y.a, y.b)?)?, add(z.a, z.b)?)?;
    let aaa = mul(mul(x.a, y.a)?, z.a)?;
    let bbb = mul(mul(x.b, y.b)?, z.b)?;
    sub(sub(all, aaa)?, bbb)
}

/// Self-intersection of the first Chern class of a smooth (a,b)-surface:
/// 3a²b + 3ab² − 4a² − 4b² − 16ab + 12a + 12b.
pub fn c1_squared(a: i64, b: i64) -> Result<i64> {
    capped(&[a, b])?;
    let a2 = mul(a, a)?;
    let b2 = mul(b, b)?;
    let mut acc = mul(3, mul(a2, b)?)?;
    acc = add(acc, mul(3, mul(a, b2)?)?)?;
    acc = sub(acc, mul(4, a2)?)?;
    acc = sub(acc, mul(4, b2)?)?;
    acc = sub(acc, mul(16, mul(a, b)?)?)?;
    acc = add(acc, mul(12, a)?)?;
    add(acc, mul(12, b)?)
}

/// Number of blow-up points presenting a smooth (1,d) surface as a blown-up
/// plane: k = d² + d + 1 (from 9 − k = −d² − d + 8).
pub fn blowup_count_1d(d: i64) -> Result<i64> {
    capped(&[d])?;
    if d < 1 {
        return Err(Error::NonPositiveBidegree);
    }
    add(add(mul(d, d)?, d)?, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h0_product_fixtures() {
        assert_eq!(h0_product(0, 0).unwrap(), 1);
        assert_eq!(h0_product(1, 1).unwrap(), 9);
        assert_eq!(h0_product(-1, 5).unwrap(), 0);
    }

    #[test]
    fn h0_flag_fixtures() {
        assert_eq!(h0_flag(1, 1).unwrap(), 8);
        assert_eq!(h0_flag(0, 0).unwrap(), 1);
        assert_eq!(h0_flag(1, 2).unwrap(), 15);
    }

    #[test]
    fn h0_difference_identity() {
        for a in 1..=12 {
            for b in 1..=12 {
                assert_eq!(
                    h0_flag(a, b).unwrap(),
                    h0_product(a, b).unwrap() - h0_product(a - 1, b - 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn triple_product_generators() {
        let e1 = Bidegree::new(1, 0);
        let e2 = Bidegree::new(0, 1);
        assert_eq!(triple_product(e1, e1, e1).unwrap(), 0);
        assert_eq!(triple_product(e2, e2, e2).unwrap(), 0);
        assert_eq!(triple_product(e1, e2, e1).unwrap(), 1);
        assert_eq!(triple_product(e1, e1, e2).unwrap(), 1);
        assert_eq!(triple_product(e2, e1, e1).unwrap(), 1);
    }

    #[test]
    fn triple_product_trilinear_extension() {
        // expanding ((1,1),(1,1),(1,0)) over the generators gives
        // 0 + 1 + 1 + 1 = 3, matching a²+ab+b² at a=b=1
        let d11 = Bidegree::new(1, 1);
        let e1 = Bidegree::new(1, 0);
        assert_eq!(triple_product(d11, d11, e1).unwrap(), 3);
    }

    #[test]
    fn curve_count_bound_identity() {
        for a in 0..=6 {
            for b in 0..=6 {
                let got =
                    triple_product(Bidegree::new(a, b), Bidegree::new(b, a), Bidegree::new(1, 0))
                        .unwrap();
                assert_eq!(got, a * a + a * b + b * b, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn swap_symmetry() {
        for a in -3..=6 {
            for b in -3..=6 {
                assert_eq!(h0_product(a, b).unwrap(), h0_product(b, a).unwrap());
                assert_eq!(h0_flag(a, b).unwrap(), h0_flag(b, a).unwrap());
                assert_eq!(c1_squared(a, b).unwrap(), c1_squared(b, a).unwrap());
                let x = Bidegree::new(a, b);
                let xs = Bidegree::new(b, a);
                let y = Bidegree::new(2, 5);
                let ys = Bidegree::new(5, 2);
                let z = Bidegree::new(1, 0);
                let zs = Bidegree::new(0, 1);
                assert_eq!(
                    triple_product(x, y, z).unwrap(),
                    triple_product(xs, ys, zs).unwrap()
                );
            }
        }
    }

    #[test]
    fn c1_squared_fixtures() {
        assert_eq!(c1_squared(1, 1).unwrap(), 6);
        assert_eq!(c1_squared(1, 2).unwrap(), 2);
        assert_eq!(c1_squared(0, 1).unwrap(), 8);
    }

    #[test]
    fn blowup_fixtures() {
        assert_eq!(blowup_count_1d(1).unwrap(), 3);
        assert_eq!(blowup_count_1d(2).unwrap(), 7);
        assert_eq!(blowup_count_1d(3).unwrap(), 13);
        assert_eq!(blowup_count_1d(0).unwrap_err(), Error::NonPositiveBidegree);
    }

    #[test]
    fn blowup_consistent_with_c1() {
        // 9 − k = c₁² for the (1,d) family
        for d in 1..=20 {
            assert_eq!(9 - blowup_count_1d(d).unwrap(), c1_squared(1, d).unwrap());
        }
    }

    #[test]
    fn cap_enforced() {
        assert_eq!(h0_product(2_000_000, 1).unwrap_err(), Error::CountOverflow);
        assert_eq!(c1_squared(-2_000_000, 1).unwrap_err(), Error::CountOverflow);
    }
}
