//! Indefinite integral binary quadratic forms.
//!
//! A form `[a, b, c]` is `a·x² + b·xy + c·y²`. Changes of variables act on
//! column vectors: for `T = [[x, y], [z, t]]`,
//!
//! ```text
//! (f∘T)(u, v) = f(x·u + y·v, z·u + t·v)
//! ```
//!
//! so that `(f∘A)∘B = f∘(A·B)`. Reduction follows the usual indefinite
//! convention: `[a, b, c]` is reduced when `|√D − 2|a|| < b < √D`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json_int;
use crate::mat::{Mat2, UniMat};
use crate::qfield::{self, QuadExt};

/// The form `a·x² + b·xy + c·y²`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

#[derive(Serialize, Deserialize)]
struct BinFormRepr {
    #[serde(with = "json_int")]
    a: BigInt,
    #[serde(with = "json_int")]
    b: BigInt,
    #[serde(with = "json_int")]
    c: BigInt,
    #[serde(with = "json_int")]
    disc: BigInt,
}

impl Serialize for BinForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BinFormRepr {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            disc: self.disc(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BinForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BinFormRepr::deserialize(d)?;
        let f = BinForm::new(r.a, r.b, r.c).map_err(serde::de::Error::custom)?;
        if f.disc() != r.disc {
            return Err(serde::de::Error::custom("disc does not match coefficients"));
        }
        Ok(f)
    }
}

impl BinForm {
    /// Builds an indefinite form; the discriminant must be a positive non-square.
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        let f = BinForm { a, b, c };
        let disc = f.disc();
        if qfield::check_radicand(&disc).is_err() {
            return Err(Error::NotIndefinite(disc));
        }
        Ok(f)
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into())
    }

    /// b² − 4ac.
    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - (&self.a * &self.c) * 4
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// `f∘T`.
    pub fn compose(&self, t: &Mat2) -> BinForm {
        let (x, y, z, w) = (&t.a, &t.b, &t.c, &t.d);
        BinForm {
            a: self.eval(x, z),
            b: (&self.a * x * y) * 2 + &self.b * (x * w + y * z) + (&self.c * z * w) * 2,
            c: self.eval(y, w),
        }
    }

    pub fn neg(&self) -> BinForm {
        BinForm {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }

    /// gcd(a, b, c).
    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Reducedness test `|√D − 2|a|| < b < √D`, decided on integers.
    pub fn is_reduced(&self) -> bool {
        let s0 = self.disc().sqrt();
        let two_a = self.a.abs() * 2;
        self.b.is_positive() && self.b <= s0 && &self.b + &two_a > s0 && &two_a - &self.b <= s0
    }
}

impl fmt::Display for BinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

impl FromStr for BinForm {
    type Err = Error;
    /// Parses `"a,b,c"` (brackets and whitespace ignored).
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .chars()
            .filter(|c| !matches!(c, '[' | ']' | '(' | ')' | ' ' | '\t'))
            .collect();
        let parts: Vec<&str> = cleaned.split(',').collect();
        let bad = || Error::Invalid(format!("expected three integers \"a,b,c\", got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut v = Vec::new();
        for p in parts {
            v.push(BigInt::from_str(p).map_err(|_| bad())?);
        }
        let c = v.pop().unwrap();
        let b = v.pop().unwrap();
        let a = v.pop().unwrap();
        BinForm::new(a, b, c)
    }
}

/// Unimodular change of variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FormTransform {
    pub m: Mat2,
}

#[derive(Serialize, Deserialize)]
struct FormTransformRepr {
    m: Mat2,
    det: i8,
}

impl Serialize for FormTransform {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormTransformRepr {
            m: self.m.clone(),
            det: self.det(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormTransform {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FormTransformRepr::deserialize(d)?;
        let t = FormTransform::new(r.m).map_err(serde::de::Error::custom)?;
        if t.det() != r.det {
            return Err(serde::de::Error::custom("det does not match matrix"));
        }
        Ok(t)
    }
}

impl FormTransform {
    pub fn new(m: Mat2) -> Result<Self> {
        Ok(FormTransform {
            m: UniMat::new(m)?.into_mat(),
        })
    }

    pub fn identity() -> Self {
        FormTransform {
            m: Mat2::identity(),
        }
    }

    pub fn det(&self) -> i8 {
        if self.m.det().is_one() {
            1
        } else {
            -1
        }
    }

    /// Composite `self` then `other`: `f∘(self·other)`.
    pub fn then(&self, other: &FormTransform) -> FormTransform {
        FormTransform {
            m: &self.m * &other.m,
        }
    }

    pub fn inverse(&self) -> FormTransform {
        FormTransform {
            m: self.m.inverse().expect("unimodular"),
        }
    }
}

/// Closed cycle of reduced forms; `transforms[i]` carries `forms[i]` to
/// `forms[(i+1) % len]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReductionCycle {
    pub forms: Vec<BinForm>,
    pub transforms: Vec<FormTransform>,
}

impl ReductionCycle {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// Product of all transforms around the cycle, a proper automorph of
    /// `forms[0]`.
    pub fn period_automorph(&self) -> Mat2 {
        self.transforms
            .iter()
            .fold(Mat2::identity(), |acc, t| &acc * &t.m)
    }
}

/// Hyperbolicity data (r, σ) of a unimodular matrix.
pub(crate) fn trace_det(m: &UniMat) -> Result<(BigInt, i8)> {
    let r = m.trace();
    let sigma = m.det();
    qfield::check_hyperbolic(&r, sigma).map_err(|_| Error::NotHyperbolic(m.to_string()))?;
    Ok((r, sigma))
}

/// `f_M = [b, −(a−d), −c]` for `M = [[a, b], [c, d]]`; `f_M(w) = det(w; w·M)`
/// for row vectors `w`.
pub fn associated_form(m: &UniMat) -> Result<BinForm> {
    trace_det(m)?;
    Ok(BinForm {
        a: m.b().clone(),
        b: -(m.a() - m.d()),
        c: -m.c(),
    })
}

/// The matrix of determinant `sigma` and positive trace whose associated
/// form is `f`, if any.
pub fn theta_preimage_with_det(f: &BinForm, sigma: i8) -> Option<UniMat> {
    let r2 = f.disc() + BigInt::from(4 * sigma as i64);
    if !r2.is_positive() {
        return None;
    }
    let r = r2.sqrt();
    if &r * &r != r2 || qfield::check_hyperbolic(&r, sigma).is_err() {
        return None;
    }
    // trace r, a − d = −β, so a = (r − β)/2 and d = (r + β)/2
    let a = (&r - &f.b) / 2;
    let d = (&r + &f.b) / 2;
    let m = Mat2::new(a, f.a.clone(), -&f.c, d);
    UniMat::new(m).ok()
}

/// The two matrices with associated form `f`: the one of positive trace
/// first, then `−det(M)·M⁻¹`.
///
/// Discriminant 5 is both 1²+4 and 3²−4; the determinant −1 pair is
/// returned there, since its square is the other one.
pub fn theta_preimage(f: &BinForm) -> Result<(UniMat, UniMat)> {
    let m = theta_preimage_with_det(f, -1)
        .or_else(|| theta_preimage_with_det(f, 1))
        .ok_or_else(|| Error::NoPreimage(f.disc()))?;
    let sigma = BigInt::from(m.det());
    let other = UniMat::new(m.inverse().into_mat().scale(&-sigma))?;
    Ok((m, other))
}

/// One neighbour step `[a, b, c] ↦ [c, b', a']` with its transform
/// `[[0, −1], [1, s]]`.
fn rho(f: &BinForm, s0: &BigInt, disc: &BigInt) -> (BinForm, FormTransform) {
    let c_abs = f.c.abs();
    let two_c = &c_abs * 2;
    let b_new = if &c_abs > s0 {
        // −|c| < b' ≤ |c|, b' ≡ −b (mod 2|c|)
        let t = (-&f.b).mod_floor(&two_c);
        if t > c_abs {
            t - &two_c
        } else {
            t
        }
    } else {
        // √D − 2|c| < b' < √D
        s0 - (s0 + &f.b).mod_floor(&two_c)
    };
    let s = (&b_new + &f.b) / (&f.c * 2);
    let a_new = (&b_new * &b_new - disc) / (&f.c * 4);
    let g = BinForm {
        a: f.c.clone(),
        b: b_new,
        c: a_new,
    };
    let t = FormTransform {
        m: Mat2::new(BigInt::zero(), -BigInt::one(), BigInt::one(), s),
    };
    debug_assert_eq!(f.compose(&t.m), g);
    (g, t)
}

/// A reduced form equivalent to `f` and the proper transform reaching it.
pub fn reduce(f: &BinForm) -> Result<(BinForm, FormTransform)> {
    let disc = f.disc();
    qfield::check_radicand(&disc).map_err(|_| Error::NotIndefinite(disc.clone()))?;
    let s0 = disc.sqrt();
    let mut g = f.clone();
    let mut acc = FormTransform::identity();
    while !g.is_reduced() {
        let (h, t) = rho(&g, &s0, &disc);
        g = h;
        acc = acc.then(&t);
    }
    Ok((g, acc))
}

/// The full cycle of reduced forms through the reduction of `f`.
pub fn cycle(f: &BinForm) -> Result<ReductionCycle> {
    let (start, _) = reduce(f)?;
    Ok(cycle_of_reduced(&start))
}

fn cycle_of_reduced(start: &BinForm) -> ReductionCycle {
    let disc = start.disc();
    let s0 = disc.sqrt();
    let mut forms = vec![start.clone()];
    let mut transforms = Vec::new();
    let mut g = start.clone();
    loop {
        let (h, t) = rho(&g, &s0, &disc);
        transforms.push(t);
        if &h == start {
            break;
        }
        forms.push(h.clone());
        g = h;
    }
    ReductionCycle { forms, transforms }
}

/// Proper equivalence with witness: `Some(T)` with `det T = 1` and
/// `f2 = f1∘T`.
pub fn properly_equivalent(f1: &BinForm, f2: &BinForm) -> Result<Option<FormTransform>> {
    if f1.disc() != f2.disc() {
        return Ok(None);
    }
    let (g1, u1) = reduce(f1)?;
    let (g2, u2) = reduce(f2)?;
    let cyc = cycle_of_reduced(&g1);
    let mut w = FormTransform::identity();
    for (h, t) in cyc.forms.iter().zip(&cyc.transforms) {
        if h == &g2 {
            let witness = u1.then(&w).then(&u2.inverse());
            debug_assert_eq!(&f1.compose(&witness.m), f2);
            return Ok(Some(witness));
        }
        w = w.then(t);
    }
    Ok(None)
}

fn improper_flip() -> FormTransform {
    FormTransform {
        m: Mat2::from_i64(1, 0, 0, -1),
    }
}

/// Equivalence under all of GL(2,Z): a proper witness when one exists,
/// otherwise one of determinant −1.
pub fn equivalent(f1: &BinForm, f2: &BinForm) -> Result<Option<FormTransform>> {
    if let Some(t) = properly_equivalent(f1, f2)? {
        return Ok(Some(t));
    }
    let j = improper_flip();
    Ok(properly_equivalent(&f1.compose(&j.m), f2)?.map(|t| j.then(&t)))
}

/// min |f(x, y)| over nonzero integer vectors, read off the reduction cycle.
pub fn integral_minimum(f: &BinForm) -> Result<BigInt> {
    let cyc = cycle(f)?;
    Ok(cyc.forms.iter().map(|g| g.a.abs()).min().unwrap())
}

/// Brute-force minimum of |f| over `0 < max(|x|,|y|) ≤ bound`.
pub fn integral_minimum_brute(f: &BinForm, bound: i64) -> BigInt {
    let mut best: Option<BigInt> = None;
    for x in 0..=bound {
        for y in -bound..=bound {
            if x == 0 && y <= 0 {
                continue;
            }
            let v = f.eval(&x.into(), &y.into()).abs();
            if !v.is_zero() && best.as_ref().is_none_or(|b| &v < b) {
                best = Some(v);
            }
        }
    }
    best.expect("bound ≥ 1")
}

/// Generator of the proper automorphs `±h^n` of a primitive form: `Mᵀ` when
/// det M = 1, `(Mᵀ)²` when det M = −1, for `M` its positive-trace preimage.
pub fn automorph_generator(f: &BinForm) -> Result<FormTransform> {
    if !f.is_primitive() {
        return Err(Error::NotPrimitive(f.to_string(), f.content()));
    }
    preimage_automorph(f)
}

fn preimage_automorph(f: &BinForm) -> Result<FormTransform> {
    let (m, _) = theta_preimage(f)?;
    let mt = m.transpose().into_mat();
    let h = if m.det() == 1 { mt } else { &mt * &mt };
    debug_assert_eq!(&f.compose(&h), f);
    Ok(FormTransform { m: h })
}

/// True when `f` is equivalent to a multiple of x²−3xy+y², the case whose
/// automorph group has a square root of the preimage automorph.
pub fn has_half_power_automorph(f: &BinForm) -> Result<bool> {
    let g = f.content();
    let base = BinForm::from_i64(1, -3, 1)?;
    let f0 = BinForm {
        a: &f.a / &g,
        b: &f.b / &g,
        c: &f.c / &g,
    };
    Ok(f0.disc() == base.disc() && equivalent(&f0, &base)?.is_some())
}

/// Fundamental proper automorph of `f` (trace positive), transported from
/// the period of its reduction cycle.
pub fn fundamental_automorph(f: &BinForm) -> Result<FormTransform> {
    let (g, u) = reduce(f)?;
    let cyc = cycle_of_reduced(&g);
    let p = cyc.period_automorph();
    let mut v = &(&u.m * &p) * &u.m.inverse().unwrap();
    if v.trace().is_negative() {
        v = -v;
    }
    debug_assert_eq!(&f.compose(&v), f);
    Ok(FormTransform { m: v })
}

fn better_rep(a: (BigInt, BigInt), b: (BigInt, BigInt)) -> (BigInt, BigInt) {
    match l1(&a).cmp(&l1(&b)) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => a.max(b),
    }
}

fn l1(v: &(BigInt, BigInt)) -> BigInt {
    v.0.abs() + v.1.abs()
}

fn l2sq(v: &(BigInt, BigInt)) -> BigInt {
    &v.0 * &v.0 + &v.1 * &v.1
}

/// Canonical member of the orbit `{±h^n v}`: least |x|+|y|, ties going to
/// the lexicographically larger pair.
///
/// `h` must be hyperbolic. For det h = −1 the orbit is split into the two
/// `h²`-orbits of `v` and `h·v`.
pub fn canonical_orbit_rep(h: &Mat2, v: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    if h.det().is_negative() {
        let h2 = h * h;
        let a = canonical_orbit_rep(&h2, v);
        let b = canonical_orbit_rep(&h2, &h.apply(&v.0, &v.1));
        return better_rep(a, b);
    }
    let hinv = h.inverse().expect("automorph is unimodular");
    let step = |m: &Mat2, w: &(BigInt, BigInt)| m.apply(&w.0, &w.1);
    // The squared Euclidean norm along the orbit is convex in n, so walk
    // downhill to its minimum first.
    let mut cur = v.clone();
    loop {
        let fwd = step(h, &cur);
        let bwd = step(&hinv, &cur);
        let c = l2sq(&cur);
        if l2sq(&fwd) < c {
            cur = fwd;
        } else if l2sq(&bwd) < c {
            cur = bwd;
        } else {
            break;
        }
    }
    // Every |x|+|y| minimiser w has |w|² ≤ (|x|+|y|)² of the current best.
    let mut best = cur.clone();
    let consider = |w: &(BigInt, BigInt), best: &mut (BigInt, BigInt)| {
        for cand in [w.clone(), (-&w.0, -&w.1)] {
            match l1(&cand).cmp(&l1(best)) {
                Ordering::Less => *best = cand,
                Ordering::Equal if cand > *best => *best = cand,
                _ => {}
            }
        }
    };
    consider(&cur, &mut best);
    for m in [h, &hinv] {
        let mut w = step(m, &cur);
        loop {
            let b = l1(&best);
            if l2sq(&w) > &b * &b {
                break;
            }
            consider(&w, &mut best);
            w = step(m, &w);
        }
    }
    best
}

/// Proper automorph group used to split representations into orbits.
fn orbit_group(f: &BinForm) -> Result<(Mat2, Mat2, usize)> {
    // (fundamental automorph V, orbit generator h = ±V^e, e)
    let v = fundamental_automorph(f)?.m;
    let h = match preimage_automorph(f) {
        Ok(t) => t.m,
        Err(_) => return Ok((v.clone(), v, 1)),
    };
    let mut p = v.clone();
    for e in 1..=64usize {
        if p == h || -&p == h {
            return Ok((v, h, e));
        }
        p = &p * &v;
    }
    Err(Error::Internal(format!(
        "automorph {} is not a power of the cycle automorph {}",
        h, v
    )))
}

/// Representations of `m` by `f`, one canonical vector per orbit of the
/// group `±h^n` generated by [`automorph_generator`] (or by the fundamental
/// automorph when `f` has no matrix preimage).
///
/// Restricted to `4m² < disc`, where every primitive representation shows
/// up as a leading coefficient on the reduction cycle.
pub fn represent(f: &BinForm, m: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    let disc = f.disc();
    qfield::check_radicand(&disc).map_err(|_| Error::NotIndefinite(disc.clone()))?;
    if m.is_zero() || m * m * 4 >= disc {
        return Err(Error::UnsupportedRange { m: m.clone(), disc });
    }
    let (g0, u) = reduce(f)?;
    let cyc = cycle_of_reduced(&g0);
    let (v, h, e) = orbit_group(f)?;
    let mut reps: Vec<(BigInt, BigInt)> = Vec::new();
    let mut g = BigInt::one();
    while &g * &g <= m.abs() {
        let gg = &g * &g;
        if (m % &gg).is_zero() {
            let target = m / &gg;
            let mut w = u.m.clone();
            for (form, t) in cyc.forms.iter().zip(&cyc.transforms) {
                if form.a == target {
                    let mut base = (&w.a * &g, &w.c * &g);
                    for _ in 0..e {
                        debug_assert_eq!(&f.eval(&base.0, &base.1), m);
                        reps.push(canonical_orbit_rep(&h, &base));
                        base = v.apply(&base.0, &base.1);
                    }
                }
                w = &w * &t.m;
            }
        }
        g += 1;
    }
    reps.sort_by(|x, y| l1(x).cmp(&l1(y)).then_with(|| y.cmp(x)));
    reps.dedup();
    Ok(reps)
}

/// Brute-force representations with `max(|x|,|y|) ≤ bound`.
pub fn represent_brute(f: &BinForm, m: &BigInt, bound: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            if &f.eval(&x.into(), &y.into()) == m {
                out.push((x, y));
            }
        }
    }
    out
}

/// `q_n` with `f_{Mⁿ} = q_n·f_M`, computed as (λⁿ − λ̄ⁿ)/√D.
pub fn power_form_factor(r: &BigInt, sigma: i8, n: u32) -> Result<BigInt> {
    let lam = qfield::lambda(r, sigma)?;
    let ln = lam.pow(n as i64)?;
    let diff = &ln - &ln.conj();
    let q = diff.checked_div(&QuadExt::sqrt_d(lam.d()))?;
    if !q.is_integer() {
        return Err(Error::Internal(format!(
            "(λⁿ−λ̄ⁿ)/√D = {q} is not an integer"
        )));
    }
    Ok(q.p().clone())
}

/// Memo of reduced forms to cycle indices, used when many equivalence
/// queries share one discriminant.
#[derive(Default)]
pub struct CycleIndex {
    seen: HashMap<BinForm, usize>,
    cycles: Vec<ReductionCycle>,
}

impl CycleIndex {
    /// Index of the proper class of `f`, registering its cycle if new.
    pub fn class_of(&mut self, f: &BinForm) -> Result<usize> {
        let (g, _) = reduce(f)?;
        if let Some(&i) = self.seen.get(&g) {
            return Ok(i);
        }
        let cyc = cycle_of_reduced(&g);
        let idx = self.cycles.len();
        for h in &cyc.forms {
            self.seen.insert(h.clone(), idx);
        }
        self.cycles.push(cyc);
        Ok(idx)
    }

    pub fn cycles(&self) -> &[ReductionCycle] {
        &self.cycles
    }
}
