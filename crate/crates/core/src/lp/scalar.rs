use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Ordered-field arithmetic needed by the simplex tableau.
///
/// `f64` compares against a small absolute epsilon; the exact types compare
/// exactly, which makes the solver an exact-pivot simplex for them.
pub trait LpScalar: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Sign of the value, treating values within the type's pivot epsilon as zero.
    fn sign(&self) -> Ordering;
    /// Whether the value is larger than `tol` (exact types ignore `tol`).
    fn exceeds(&self, tol: f64) -> bool;
    fn to_f64(&self) -> f64;

    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }
    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn lt(&self, o: &Self) -> bool {
        self.sub(o).is_negative()
    }
}

/// Pivot epsilon for the floating simplex.
pub const F64_PIVOT_EPS: f64 = 1e-11;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sign(&self) -> Ordering {
        if *self > F64_PIVOT_EPS {
            Ordering::Greater
        } else if *self < -F64_PIVOT_EPS {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn exceeds(&self, tol: f64) -> bool {
        *self > tol
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sign(&self) -> Ordering {
        if Signed::is_positive(self) {
            Ordering::Greater
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn exceeds(&self, _tol: f64) -> bool {
        Signed::is_positive(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Shorthand for the exact rational `num / den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// An element `a + b·√3` of the quadratic field `Q(√3)`, with exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd3 {
    pub a: BigRational,
    pub b: BigRational,
}

impl Surd3 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Surd3 { a, b }
    }

    pub fn rational(r: BigRational) -> Self {
        Surd3 {
            a: r,
            b: Zero::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(rational(num, den))
    }

    /// `(num/den)·√3`.
    pub fn sqrt3_times(num: i64, den: i64) -> Self {
        Surd3 {
            a: Zero::zero(),
            b: rational(num, den),
        }
    }

    fn exact_sign(&self) -> Ordering {
        let sa = LpScalar::sign(&self.a);
        let sb = LpScalar::sign(&self.b);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // opposite signs: compare a^2 against 3 b^2
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * BigRational::from_integer(BigInt::from(3));
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }
}

impl LpScalar for Surd3 {
    fn zero() -> Self {
        Surd3::rational(Zero::zero())
    }
    fn one() -> Self {
        Surd3::rational(One::one())
    }
    fn add(&self, o: &Self) -> Self {
        Surd3::new(&self.a + &o.a, &self.b + &o.b)
    }
    fn sub(&self, o: &Self) -> Self {
        Surd3::new(&self.a - &o.a, &self.b - &o.b)
    }
    fn mul(&self, o: &Self) -> Self {
        let three = BigRational::from_integer(BigInt::from(3));
        Surd3::new(
            &self.a * &o.a + &self.b * &o.b * three,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
    fn div(&self, o: &Self) -> Self {
        // (a + b√3)^{-1} = (a - b√3) / (a^2 - 3 b^2)
        let three = BigRational::from_integer(BigInt::from(3));
        let norm = &o.a * &o.a - &o.b * &o.b * three;
        let inv = Surd3::new(&o.a / &norm, -(&o.b / &norm));
        self.mul(&inv)
    }
    fn neg(&self) -> Self {
        Surd3::new(-&self.a, -&self.b)
    }
    fn sign(&self) -> Ordering {
        self.exact_sign()
    }
    fn exceeds(&self, _tol: f64) -> bool {
        self.exact_sign() == Ordering::Greater
    }
    fn to_f64(&self) -> f64 {
        LpScalar::to_f64(&self.a) + LpScalar::to_f64(&self.b) * 3f64.sqrt()
    }
}
