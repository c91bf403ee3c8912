//! 2×2 integer matrices.
//!
//! [`Mat2`] is an arbitrary integer matrix (used for conjugators, kernel
//! matrices and form transforms); [`UniMat`] wraps one whose determinant is
//! ±1 and so acts as an automorphism of the torus.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json_int;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("expected four comma-separated integers \"a,b,c,d\", got {0:?}")]
    Parse(String),
    #[error("determinant {0} is not ±1")]
    NotUnimodular(BigInt),
}

/// Matrix `[[a, b], [c, d]]`, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Mat2::from_i64(1, 0, 0, 1)
    }

    pub fn scalar(k: BigInt) -> Self {
        Mat2::new(k.clone(), BigInt::zero(), BigInt::zero(), k)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(
            self.a.clone(),
            self.c.clone(),
            self.b.clone(),
            self.d.clone(),
        )
    }

    /// Adjugate `[[d, −b], [−c, a]]`, so that `M·adj(M) = det(M)·I`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// Integer inverse, defined when det = ±1.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.is_one() {
            Some(self.adjugate())
        } else if (-&det).is_one() {
            Some(-self.adjugate())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat2::new(
            &self.a + &o.a,
            &self.b + &o.b,
            &self.c + &o.c,
            &self.d + &o.d,
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Mat2::new(&self.a * k, &self.b * k, &self.c * k, &self.d * k)
    }

    /// `M·(x, y)ᵀ`.
    pub fn apply(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (&self.a * x + &self.b * y, &self.c * x + &self.d * y)
    }

    /// `(x, y)·M` for a row vector.
    pub fn apply_row(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (x * &self.a + y * &self.c, x * &self.b + y * &self.d)
    }

    /// Non-negative powers by repeated squaring.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Mat2::identity();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Signed powers; negative exponents need det = ±1.
    pub fn pow_signed(&self, n: i64) -> Option<Self> {
        let e = u32::try_from(n.unsigned_abs()).ok()?;
        if n >= 0 {
            Some(self.pow(e))
        } else {
            Some(self.inverse()?.pow(e))
        }
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|x| x.is_zero())
    }

    /// Largest absolute entry.
    pub fn height(&self) -> BigInt {
        self.entries().iter().map(|x| x.abs()).max().unwrap()
    }
}

impl Mul<&Mat2> for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        &self * &o
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Neg for &Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        -(self.clone())
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for Mat2 {
    type Err = MatError;
    /// Parses row-major `"a,b,c,d"` (brackets and whitespace are ignored).
    fn from_str(s: &str) -> Result<Self, MatError> {
        let cleaned: String = s
            .chars()
            .filter(|c| !matches!(c, '[' | ']' | '(' | ')' | ' ' | '\t'))
            .collect();
        let parts: Vec<&str> = cleaned.split(',').collect();
        if parts.len() != 4 {
            return Err(MatError::Parse(s.to_string()));
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            v.push(BigInt::from_str(p).map_err(|_| MatError::Parse(s.to_string()))?);
        }
        let mut it = v.into_iter();
        Ok(Mat2::new(
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct Row(
    #[serde(with = "json_int")] BigInt,
    #[serde(with = "json_int")] BigInt,
);

impl Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [
            Row(self.a.clone(), self.b.clone()),
            Row(self.c.clone(), self.d.clone()),
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [Row(a, b), Row(c, dd)] = <[Row; 2]>::deserialize(d)?;
        Ok(Mat2::new(a, b, c, dd))
    }
}

/// Integer matrix with determinant ±1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "Mat2", into = "Mat2")]
pub struct UniMat(Mat2);

impl UniMat {
    pub fn new(m: Mat2) -> Result<Self, MatError> {
        let det = m.det();
        if det.abs().is_one() {
            Ok(UniMat(m))
        } else {
            Err(MatError::NotUnimodular(det))
        }
    }

    /// Panics unless the determinant is ±1; meant for literals.
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        UniMat::new(Mat2::from_i64(a, b, c, d)).expect("determinant must be ±1")
    }

    pub fn identity() -> Self {
        UniMat(Mat2::identity())
    }

    pub fn mat(&self) -> &Mat2 {
        &self.0
    }

    pub fn into_mat(self) -> Mat2 {
        self.0
    }

    pub fn a(&self) -> &BigInt {
        &self.0.a
    }
    pub fn b(&self) -> &BigInt {
        &self.0.b
    }
    pub fn c(&self) -> &BigInt {
        &self.0.c
    }
    pub fn d(&self) -> &BigInt {
        &self.0.d
    }

    /// Determinant as ±1.
    pub fn det(&self) -> i8 {
        if self.0.det().is_one() {
            1
        } else {
            -1
        }
    }

    pub fn trace(&self) -> BigInt {
        self.0.trace()
    }

    pub fn inverse(&self) -> Self {
        UniMat(self.0.inverse().expect("unimodular"))
    }

    pub fn transpose(&self) -> Self {
        UniMat(self.0.transpose())
    }

    pub fn pow(&self, n: i64) -> Self {
        UniMat(self.0.pow_signed(n).expect("exponent out of range"))
    }

    pub fn apply(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        self.0.apply(x, y)
    }
}

impl From<UniMat> for Mat2 {
    fn from(u: UniMat) -> Mat2 {
        u.0
    }
}

impl TryFrom<Mat2> for UniMat {
    type Error = MatError;
    fn try_from(m: Mat2) -> Result<Self, MatError> {
        UniMat::new(m)
    }
}

impl Mul<&UniMat> for &UniMat {
    type Output = UniMat;
    fn mul(self, o: &UniMat) -> UniMat {
        UniMat(&self.0 * &o.0)
    }
}

impl Mul for UniMat {
    type Output = UniMat;
    fn mul(self, o: UniMat) -> UniMat {
        &self * &o
    }
}

impl Neg for UniMat {
    type Output = UniMat;
    fn neg(self) -> UniMat {
        UniMat(-self.0)
    }
}

impl Neg for &UniMat {
    type Output = UniMat;
    fn neg(self) -> UniMat {
        UniMat(-&self.0)
    }
}

impl fmt::Display for UniMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for UniMat {
    type Err = MatError;
    fn from_str(s: &str) -> Result<Self, MatError> {
        UniMat::new(s.parse()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let m = Mat2::from_i64(1, 1, 1, 0);
        assert_eq!(m.pow(3), Mat2::from_i64(3, 2, 2, 1));
        assert_eq!(m.det(), BigInt::from(-1));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Mat2::identity());
        assert_eq!(m.pow_signed(-2).unwrap(), inv.pow(2));
        assert!(Mat2::from_i64(2, 0, 0, 1).inverse().is_none());
    }

    #[test]
    fn parsing() {
        let m: UniMat = "80,9,9,1".parse().unwrap();
        assert_eq!(m.det(), -1);
        assert_eq!(m.trace(), BigInt::from(81));
        let m: Mat2 = "[[3, 5], [1, 2]]".parse().unwrap();
        assert_eq!(m, Mat2::from_i64(3, 5, 1, 2));
        assert!("1,2,3".parse::<Mat2>().is_err());
        assert!(matches!(
            "2,0,0,1".parse::<UniMat>(),
            Err(MatError::NotUnimodular(_))
        ));
    }

    #[test]
    fn serde_shape() {
        let m = UniMat::from_i64(3, 5, 1, 2);
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, "[[3,5],[1,2]]");
        let back: UniMat = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<UniMat>("[[2,0],[0,1]]").is_err());
    }
}
