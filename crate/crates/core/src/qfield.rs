//! Exact arithmetic in a real quadratic field Q(√D).
//!
//! An element is stored as `(p + q√D)/s` with arbitrary-precision integers.
//! The radicand `D` is kept exactly as supplied and is not reduced to its
//! squarefree part, so λ = (r+√D)/2 for D = r²−4σ is always written over the
//! same radicand as the points built from it.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json_int;

/// Default search bound for the brute-force Pell solver.
pub const PELL_DEFAULT_BOUND: u64 = 1_000_000;

/// Largest exponent tried when looking for the first power of the
/// fundamental unit that lies in the order Z+λZ.
pub const ORDER_INDEX_BOUND: u32 = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QfError {
    #[error("radicand D={0} must be a positive non-square integer")]
    BadRadicand(BigInt),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live over different radicands ({0} and {1})")]
    MismatchedRadicand(BigInt, BigInt),
    #[error("search bound {bound} exceeded while {what}")]
    BoundExceeded { what: &'static str, bound: u64 },
    #[error("(r={r}, sigma={sigma}) is not hyperbolic")]
    NotHyperbolic { r: BigInt, sigma: i8 },
}

/// Element `(p + q√D)/s` of Q(√D) in canonical form: `s > 0` and
/// `gcd(p, q, s) = 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "QuadExtRepr", into = "QuadExtRepr")]
pub struct QuadExt {
    p: BigInt,
    q: BigInt,
    s: BigInt,
    d: BigInt,
}

#[derive(Serialize, Deserialize)]
struct QuadExtRepr {
    #[serde(with = "json_int")]
    p: BigInt,
    #[serde(with = "json_int")]
    q: BigInt,
    #[serde(with = "json_int")]
    s: BigInt,
    #[serde(rename = "D", with = "json_int")]
    d: BigInt,
    #[serde(default)]
    approx: String,
}

impl From<QuadExt> for QuadExtRepr {
    fn from(x: QuadExt) -> Self {
        let approx = x.approx(15);
        QuadExtRepr {
            p: x.p,
            q: x.q,
            s: x.s,
            d: x.d,
            approx,
        }
    }
}

impl TryFrom<QuadExtRepr> for QuadExt {
    type Error = QfError;
    fn try_from(r: QuadExtRepr) -> Result<Self, QfError> {
        QuadExt::new(r.p, r.q, r.s, r.d)
    }
}

/// Checks that `d` is a positive non-square integer.
pub fn check_radicand(d: &BigInt) -> Result<(), QfError> {
    if !d.is_positive() {
        return Err(QfError::BadRadicand(d.clone()));
    }
    let t = d.sqrt();
    if &(&t * &t) == d {
        return Err(QfError::BadRadicand(d.clone()));
    }
    Ok(())
}

/// Sign of `p + q√d` for non-square `d`, decided with integer arithmetic.
fn sign_of(p: &BigInt, q: &BigInt, d: &BigInt) -> Ordering {
    let zero = BigInt::zero();
    if q.is_zero() {
        return p.cmp(&zero);
    }
    if p.is_zero() {
        return q.cmp(&zero);
    }
    match (p.is_positive(), q.is_positive()) {
        (true, true) => Ordering::Greater,
        (false, false) => Ordering::Less,
        (true, false) => {
            // p - |q|√d
            if p * p > q * q * d {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
        (false, true) => {
            if q * q * d > p * p {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
    }
}

impl QuadExt {
    /// Builds the canonical representative of `(p + q√d)/s`.
    pub fn new(p: BigInt, q: BigInt, s: BigInt, d: BigInt) -> Result<Self, QfError> {
        check_radicand(&d)?;
        if s.is_zero() {
            return Err(QfError::ZeroDenominator);
        }
        Ok(Self::raw(p, q, s, d))
    }

    /// Integer-argument convenience wrapper around [`QuadExt::new`].
    pub fn from_i64(p: i64, q: i64, s: i64, d: i64) -> Result<Self, QfError> {
        Self::new(p.into(), q.into(), s.into(), d.into())
    }

    // Canonicalizes without re-validating the radicand.
    fn raw(mut p: BigInt, mut q: BigInt, mut s: BigInt, d: BigInt) -> Self {
        if s.is_negative() {
            p = -p;
            q = -q;
            s = -s;
        }
        let g = p.gcd(&q).gcd(&s);
        if !g.is_one() && !g.is_zero() {
            p /= &g;
            q /= &g;
            s /= &g;
        }
        if p.is_zero() && q.is_zero() {
            s = BigInt::one();
        }
        QuadExt { p, q, s, d }
    }

    pub fn zero(d: &BigInt) -> Self {
        Self::raw(BigInt::zero(), BigInt::zero(), BigInt::one(), d.clone())
    }

    pub fn one(d: &BigInt) -> Self {
        Self::integer(BigInt::one(), d)
    }

    pub fn integer(n: BigInt, d: &BigInt) -> Self {
        Self::raw(n, BigInt::zero(), BigInt::one(), d.clone())
    }

    pub fn rational(x: &BigRational, d: &BigInt) -> Self {
        Self::raw(
            x.numer().clone(),
            BigInt::zero(),
            x.denom().clone(),
            d.clone(),
        )
    }

    /// The element √D itself.
    pub fn sqrt_d(d: &BigInt) -> Self {
        Self::raw(BigInt::zero(), BigInt::one(), BigInt::one(), d.clone())
    }

    /// An element over the same radicand as `self`.
    pub fn sibling(&self, p: BigInt, q: BigInt, s: BigInt) -> Self {
        assert!(!s.is_zero(), "zero denominator");
        Self::raw(p, q, s, self.d.clone())
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn s(&self) -> &BigInt {
        &self.s
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.q.is_zero() && self.s.is_one()
    }

    /// The rational value, if the irrational part vanishes.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.p.clone(), self.s.clone()))
    }

    fn same_field(&self, other: &Self) -> Result<(), QfError> {
        if self.d != other.d {
            return Err(QfError::MismatchedRadicand(self.d.clone(), other.d.clone()));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, QfError> {
        self.same_field(o)?;
        Ok(Self::raw(
            &self.p * &o.s + &o.p * &self.s,
            &self.q * &o.s + &o.q * &self.s,
            &self.s * &o.s,
            self.d.clone(),
        ))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, QfError> {
        self.checked_add(&o.neg_ref())
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, QfError> {
        self.same_field(o)?;
        Ok(Self::raw(
            &self.p * &o.p + &self.q * &o.q * &self.d,
            &self.p * &o.q + &self.q * &o.p,
            &self.s * &o.s,
            self.d.clone(),
        ))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, QfError> {
        self.same_field(o)?;
        let inv = o.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Self, QfError> {
        if self.is_zero() {
            return Err(QfError::DivisionByZero);
        }
        // s/(p + q√D) = s(p - q√D)/(p² - q²D)
        let n = &self.p * &self.p - &self.q * &self.q * &self.d;
        Ok(Self::raw(
            &self.s * &self.p,
            -(&self.s * &self.q),
            n,
            self.d.clone(),
        ))
    }

    fn neg_ref(&self) -> Self {
        QuadExt {
            p: -&self.p,
            q: -&self.q,
            s: self.s.clone(),
            d: self.d.clone(),
        }
    }

    /// Galois conjugate: √D ↦ −√D.
    pub fn conj(&self) -> Self {
        QuadExt {
            p: self.p.clone(),
            q: -&self.q,
            s: self.s.clone(),
            d: self.d.clone(),
        }
    }

    /// Field norm x·x̄.
    pub fn norm(&self) -> BigRational {
        BigRational::new(
            &self.p * &self.p - &self.q * &self.q * &self.d,
            &self.s * &self.s,
        )
    }

    /// Field trace x + x̄.
    pub fn trace(&self) -> BigRational {
        BigRational::new(&self.p * 2, self.s.clone())
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Self::raw(&self.p * n, &self.q * n, self.s.clone(), self.d.clone())
    }

    pub fn add_int(&self, n: &BigInt) -> Self {
        Self::raw(
            &self.p + n * &self.s,
            self.q.clone(),
            self.s.clone(),
            self.d.clone(),
        )
    }

    pub fn div_int(&self, n: &BigInt) -> Result<Self, QfError> {
        if n.is_zero() {
            return Err(QfError::DivisionByZero);
        }
        Ok(Self::raw(
            self.p.clone(),
            self.q.clone(),
            &self.s * n,
            self.d.clone(),
        ))
    }

    pub fn signum(&self) -> Ordering {
        sign_of(&self.p, &self.q, &self.d)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            self.neg_ref()
        } else {
            self.clone()
        }
    }

    /// Exact comparison of real values.
    pub fn compare(&self, o: &Self) -> Result<Ordering, QfError> {
        self.same_field(o)?;
        // sign of (p1 s2 - p2 s1) + (q1 s2 - q2 s1)√D, denominators positive
        Ok(sign_of(
            &(&self.p * &o.s - &o.p * &self.s),
            &(&self.q * &o.s - &o.q * &self.s),
            &self.d,
        ))
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.q.is_zero() {
            return self.p.div_floor(&self.s);
        }
        // q√D lies strictly between two consecutive integers a and a+1.
        let t = (&self.q * &self.q * &self.d).sqrt();
        let a = if self.q.is_positive() { t } else { -t - 1 };
        (&self.p + a).div_floor(&self.s)
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg_ref().floor())
    }

    /// Fractional part in [0, 1).
    pub fn frac(&self) -> Self {
        self.add_int(&-self.floor())
    }

    /// Nearest integer, ties rounded up.
    pub fn round(&self) -> BigInt {
        Self::raw(
            &self.p * 2 + &self.s,
            &self.q * 2,
            &self.s * 2,
            self.d.clone(),
        )
        .floor()
    }

    /// Distance to the nearest integer, ‖x‖.
    pub fn dist_to_int(&self) -> Self {
        self.add_int(&-self.round()).abs()
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, n: i64) -> Result<Self, QfError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(&self.d);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    pub fn to_f64(&self) -> f64 {
        let s = self.s.to_f64().unwrap_or(f64::INFINITY);
        let d = self.d.to_f64().unwrap_or(f64::INFINITY).sqrt();
        self.p.to_f64().unwrap_or(f64::NAN) / s + self.q.to_f64().unwrap_or(f64::NAN) * d / s
    }

    /// Decimal rendering with `digits` significant digits, computed exactly
    /// and printed like C's `%.{digits}g`.
    pub fn approx(&self, digits: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let a = self.abs();
        let ten = BigInt::from(10);
        let digits = digits.max(1) as i64;
        // Decimal exponent e with 10^e <= a < 10^(e+1).
        let est = a.to_f64().log10();
        let mut e: i64 = if est.is_finite() {
            est.floor() as i64
        } else {
            0
        };
        let pow10 = |k: i64| -> QuadExt {
            if k >= 0 {
                QuadExt::integer(ten.pow(k as u32), &self.d)
            } else {
                QuadExt::raw(
                    BigInt::one(),
                    BigInt::zero(),
                    ten.pow((-k) as u32),
                    self.d.clone(),
                )
            }
        };
        loop {
            if a.compare(&pow10(e)).unwrap() == Ordering::Less {
                e -= 1;
            } else if a.compare(&pow10(e + 1)).unwrap() != Ordering::Less {
                e += 1;
            } else {
                break;
            }
        }
        let mut scaled = (&a * &pow10(digits - 1 - e)).round();
        if scaled == ten.pow(digits as u32) {
            scaled /= &ten;
            e += 1;
        }
        let mut mant = scaled.to_string();
        let body = if e < -5 || e >= digits {
            let (head, tail) = mant.split_at(1);
            let tail = tail.trim_end_matches('0');
            let exp = if e < 0 {
                format!("e-{:02}", -e)
            } else {
                format!("e+{:02}", e)
            };
            if tail.is_empty() {
                format!("{head}{exp}")
            } else {
                format!("{head}.{tail}{exp}")
            }
        } else if e >= 0 {
            let split = (e + 1) as usize;
            let (int, fr) = mant.split_at(split);
            let fr = fr.trim_end_matches('0');
            if fr.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{fr}")
            }
        } else {
            let zeros = "0".repeat((-e - 1) as usize);
            mant = mant.trim_end_matches('0').to_string();
            format!("0.{zeros}{mant}")
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // coefficient of √D without a redundant 1
        let root = |q: &BigInt| {
            if q.is_one() {
                format!("√{}", self.d)
            } else {
                format!("{q}√{}", self.d)
            }
        };
        let num = match (self.p.is_zero(), self.q.is_zero()) {
            (_, true) => self.p.to_string(),
            (true, false) if self.q.is_negative() => format!("-{}", root(&-&self.q)),
            (true, false) => root(&self.q),
            (false, false) => {
                if self.q.is_negative() {
                    format!("{} - {}", self.p, root(&-&self.q))
                } else {
                    format!("{} + {}", self.p, root(&self.q))
                }
            }
        };
        if self.s.is_one() {
            write!(f, "{num}")
        } else if self.p.is_zero() || self.q.is_zero() {
            write!(f, "{num}/{}", self.s)
        } else {
            write!(f, "({num})/{}", self.s)
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $m(self, o: &QuadExt) -> QuadExt {
                self.$checked(o)
                    .expect("quadratic field operands must share D")
            }
        }
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, o: QuadExt) -> QuadExt {
                (&self).$m(&o)
            }
        }
        impl $tr<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, o: &QuadExt) -> QuadExt {
                (&self).$m(o)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        self.neg_ref()
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        self.neg_ref()
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

/// λ = (r + √D)/2 with D = r² − 4σ, the root of λ² = rλ − σ.
pub fn lambda(r: &BigInt, sigma: i8) -> Result<QuadExt, QfError> {
    check_hyperbolic(r, sigma)?;
    let d = radicand(r, sigma);
    Ok(QuadExt::raw(r.clone(), BigInt::one(), BigInt::from(2), d))
}

/// D = r² − 4σ.
pub fn radicand(r: &BigInt, sigma: i8) -> BigInt {
    r * r - BigInt::from(4 * sigma as i64)
}

/// Hyperbolicity of the characteristic polynomial x² − r x + σ.
pub fn check_hyperbolic(r: &BigInt, sigma: i8) -> Result<(), QfError> {
    let ok = match sigma {
        -1 => !r.is_zero(),
        1 => r.abs() >= BigInt::from(3),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(QfError::NotHyperbolic {
            r: r.clone(),
            sigma,
        })
    }
}

/// Coordinates (a, b) with x = a + bλ, if x lies in the module Z+λZ,
/// λ = (r + √D)/2.
pub fn order_coords(x: &QuadExt, r: &BigInt) -> Option<(BigInt, BigInt)> {
    // x = (p + q√D)/s = a + b(r + √D)/2  =>  b = 2q/s,  a = (2p - b r s)/(2s)
    let two_q: BigInt = &x.q * 2;
    if !two_q.is_multiple_of(&x.s) {
        return None;
    }
    let b = two_q / &x.s;
    let num: BigInt = &x.p * 2 - &b * r * &x.s;
    let den = &x.s * 2;
    if !num.is_multiple_of(&den) {
        return None;
    }
    Some((num / den, b))
}

fn is_square_u128(n: u128) -> Option<u128> {
    let t = n.sqrt();
    (t * t == n).then_some(t)
}

/// Minimal solution of x² − D y² = ±4 with y > 0, returned as (x + y√D)/2.
///
/// The search runs over y up to `bound`; among solutions with the minimal y
/// the smaller x (hence the smaller unit) wins.
pub fn pell_fundamental_unit(d: &BigInt, bound: u64) -> Result<QuadExt, QfError> {
    check_radicand(d)?;
    if let Some(dd) = d.to_u64() {
        let dd = dd as u128;
        let mut overflowed = false;
        for y in 1..=bound as u128 {
            let Some(n) = dd.checked_mul(y * y) else {
                overflowed = true;
                break;
            };
            let mut best: Option<u128> = None;
            if n > 4 {
                best = is_square_u128(n - 4);
            }
            if best.is_none() {
                best = n.checked_add(4).and_then(is_square_u128);
            }
            if let Some(x) = best {
                return Ok(QuadExt::raw(
                    BigInt::from(x),
                    BigInt::from(y),
                    BigInt::from(2),
                    d.clone(),
                ));
            }
        }
        if !overflowed {
            return Err(QfError::BoundExceeded {
                what: "solving x²−Dy²=±4",
                bound,
            });
        }
    }
    let mut y = BigInt::one();
    let four = BigInt::from(4);
    while y <= BigInt::from(bound) {
        let n = d * &y * &y;
        for cand in [&n - &four, &n + &four] {
            if cand.is_positive() {
                let t = cand.sqrt();
                if &t * &t == cand {
                    return Ok(QuadExt::raw(t, y, BigInt::from(2), d.clone()));
                }
            }
        }
        y += 1;
    }
    Err(QfError::BoundExceeded {
        what: "solving x²−Dy²=±4",
        bound,
    })
}

/// Units attached to the characteristic polynomial x² − r x + σ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitGroupDesc {
    /// Fundamental unit (> 1) of the maximal order of Q(√D).
    pub fundamental_unit: QuadExt,
    /// Generator (> 1) of the units of Z+λZ modulo ±1.
    pub order_generator: QuadExt,
    /// j with order_generator = fundamental_unit^j.
    pub exponent_index: u32,
}

/// Splits a discriminant as D = f²·d0 with d0 a fundamental discriminant.
pub fn fundamental_discriminant(d: &BigInt) -> (BigInt, BigInt) {
    let mut rest = d.clone();
    let mut f = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            f *= &p;
        }
        p += 1;
    }
    // rest is squarefree now
    let four = BigInt::from(4);
    if rest.mod_floor(&four) == BigInt::one() {
        (rest, f)
    } else {
        // d = f²·rest and rest ≡ 2,3 (mod 4) means 4·rest divides d
        debug_assert!(f.is_even());
        (rest * 4, f / 2)
    }
}

/// Fundamental unit of the maximal order, and the first of its powers
/// lying in Z+λZ.
pub fn unit_group_of_order(r: &BigInt, sigma: i8) -> Result<UnitGroupDesc, QfError> {
    check_hyperbolic(r, sigma)?;
    let r = r.abs();
    let d = radicand(&r, sigma);
    let (d0, f) = fundamental_discriminant(&d);
    // The maximal-order unit divides λ, so its y-coordinate is at most f·√d0-scale;
    // the default bound is far above anything reachable here.
    let e0 = pell_fundamental_unit(&d0, PELL_DEFAULT_BOUND)?;
    // (x + y√d0)/2 with √d0 = √D/f
    let eps = QuadExt::raw(&e0.p * &f, e0.q.clone(), &e0.s * &f, d.clone());
    let mut power = eps.clone();
    for j in 1..=ORDER_INDEX_BOUND {
        if order_coords(&power, &r).is_some() {
            return Ok(UnitGroupDesc {
                fundamental_unit: eps,
                order_generator: power,
                exponent_index: j,
            });
        }
        power = &power * &eps;
    }
    Err(QfError::BoundExceeded {
        what: "locating a unit of Z+λZ",
        bound: ORDER_INDEX_BOUND as u64,
    })
}
