//! Hyperbolic matrices in GL(2,Z).
//!
//! Conjugacy questions are answered through associated forms: for
//! `M₂ = B·M₁·B⁻¹` one has `f_{M₂} = det(B)·f_{M₁}∘Bᵀ`, so a proper
//! equivalence `f_{M₁}∘U = f_{M₂}` (or an improper one onto `−f_{M₂}`)
//! yields the conjugator `B = Uᵀ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::binforms::{self, associated_form, BinForm};
use crate::error::{Error, Result};
use crate::json_int;
use crate::mat::{Mat2, UniMat};
use crate::qfield::{self, QuadExt};

/// Largest group for which [`KernelGroup::elements`] is materialised.
pub const KERNEL_LIST_LIMIT: u64 = 10_000;

/// Default exponent range for [`kernel_isomorphic_under_t`].
pub const KERNEL_ISO_BOUND: i64 = 12;

/// Largest unit exponent tried by [`is_primitive`].
pub const ROOT_EXPONENT_BOUND: u32 = 200;

/// Trace, determinant and discriminant of a unimodular matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicInfo {
    pub hyperbolic: bool,
    #[serde(with = "json_int")]
    pub r: BigInt,
    pub sigma: i8,
    /// r² − 4σ.
    #[serde(rename = "D", with = "json_int")]
    pub disc: BigInt,
}

pub fn is_hyperbolic(m: &UniMat) -> HyperbolicInfo {
    let r = m.trace();
    let sigma = m.det();
    HyperbolicInfo {
        hyperbolic: qfield::check_hyperbolic(&r, sigma).is_ok(),
        disc: qfield::radicand(&r, sigma),
        r,
        sigma,
    }
}

/// `(−M, true)` for negative trace, `(M, false)` otherwise.
pub fn normalize_trace(m: &UniMat) -> (UniMat, bool) {
    if m.trace().is_negative() {
        (-m, true)
    } else {
        (m.clone(), false)
    }
}

/// `C_{r,σ} = [[r, 1], [−σ, 0]]`.
pub fn companion(r: &BigInt, sigma: i8) -> Result<UniMat> {
    qfield::check_hyperbolic(r, sigma)?;
    Ok(UniMat::new(Mat2::new(
        r.clone(),
        BigInt::one(),
        BigInt::from(-sigma),
        BigInt::zero(),
    ))?)
}

fn require_positive_trace(m: &UniMat) -> Result<(BigInt, i8)> {
    let (r, sigma) = binforms::trace_det(m)?;
    if !r.is_positive() {
        return Err(Error::Invalid(format!(
            "matrix {m} has negative trace; normalize it first"
        )));
    }
    Ok((r, sigma))
}

/// The canonical solution of `f_M(x, y) = ±1`, if any.
pub fn unit_solution(m: &UniMat) -> Result<Option<(BigInt, BigInt)>> {
    let f = associated_form(m)?;
    let mut all = binforms::represent(&f, &BigInt::one())?;
    all.extend(binforms::represent(&f, &-BigInt::one())?);
    Ok(all.into_iter().min_by(|x, y| {
        let lx = x.0.abs() + x.1.abs();
        let ly = y.0.abs() + y.1.abs();
        lx.cmp(&ly).then_with(|| y.cmp(x))
    }))
}

/// `B = [[p, q], [−d·p + c·q, b·p − a·q]]`, satisfying `B·M = C_{r,σ}·B` and
/// `det B = f_M(p, q)`.
pub fn intertwiner(m: &UniMat, p: &BigInt, q: &BigInt) -> Mat2 {
    Mat2::new(
        p.clone(),
        q.clone(),
        -(m.d() * p) + m.c() * q,
        m.b() * p - m.a() * q,
    )
}

/// Unimodular `B` with `B·M·B⁻¹ = C_{r,σ}`, or `None` when `f_M` represents
/// neither 1 nor −1.
pub fn conjugator_to_companion(m: &UniMat) -> Result<Option<UniMat>> {
    let (r, sigma) = require_positive_trace(m)?;
    let Some((p, q)) = unit_solution(m)? else {
        return Ok(None);
    };
    let b = UniMat::new(intertwiner(m, &p, &q))?;
    let c = companion(&r, sigma)?;
    if (b.mat() * m.mat()) != (c.mat() * b.mat()) {
        return Err(Error::Internal(format!(
            "conjugator {b} does not intertwine {m}"
        )));
    }
    Ok(Some(b))
}

/// Unimodular `B` with `B·M₁·B⁻¹ = M₂`, if the two are conjugate in GL(2,Z).
pub fn is_conjugate(m1: &UniMat, m2: &UniMat) -> Result<Option<UniMat>> {
    binforms::trace_det(m1)?;
    binforms::trace_det(m2)?;
    if m1.trace() != m2.trace() || m1.det() != m2.det() {
        return Ok(None);
    }
    let f1 = associated_form(m1)?;
    let f2 = associated_form(m2)?;
    let j = Mat2::from_i64(1, 0, 0, -1);
    let u = match binforms::properly_equivalent(&f1, &f2)? {
        Some(t) => t.m,
        None => match binforms::properly_equivalent(&f1.compose(&j), &f2.neg())? {
            Some(t) => &j * &t.m,
            None => return Ok(None),
        },
    };
    let b = UniMat::new(u.transpose())?;
    if (b.mat() * m1.mat()) != (m2.mat() * b.mat()) {
        return Err(Error::Internal(format!("witness {b} does not conjugate")));
    }
    Ok(Some(b))
}

/// Conjugacy inside SL(2,Z): a witness of determinant +1, if one exists.
pub fn is_properly_conjugate(m1: &UniMat, m2: &UniMat) -> Result<Option<UniMat>> {
    binforms::trace_det(m1)?;
    binforms::trace_det(m2)?;
    if m1.trace() != m2.trace() || m1.det() != m2.det() {
        return Ok(None);
    }
    let f1 = associated_form(m1)?;
    let f2 = associated_form(m2)?;
    let Some(t) = binforms::properly_equivalent(&f1, &f2)? else {
        return Ok(None);
    };
    let b = UniMat::new(t.m.transpose())?;
    if (b.mat() * m1.mat()) != (m2.mat() * b.mat()) {
        return Err(Error::Internal(format!("witness {b} does not conjugate")));
    }
    Ok(Some(b))
}

/// Outcome of [`is_primitive`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Primitivity {
    pub primitive: bool,
    /// `(K, n)` with `Kⁿ = M` and `n ≥ 2` maximal.
    pub root: Option<(UniMat, u32)>,
}

/// Decides whether `M = Kⁿ` for some `K ∈ GL(2,Z)` and `n ≥ 2`.
///
/// With λ = ε₀ᵏ for the fundamental unit ε₀ of the maximal order, every
/// root is `K = α·I + β·M` for μ = ±ε₀^{k/n}, β = (μ−μ̄)/(λ−λ̄), α = μ−βλ.
pub fn is_primitive(m: &UniMat) -> Result<Primitivity> {
    let (r, sigma) = require_positive_trace(m)?;
    let lam = qfield::lambda(&r, sigma)?;
    let eps = qfield::unit_group_of_order(&r, sigma)?.fundamental_unit;
    let mut power = eps.clone();
    let mut k = 1u32;
    while power != lam {
        if k >= ROOT_EXPONENT_BOUND || power.compare(&lam)? == std::cmp::Ordering::Greater {
            return Err(Error::BoundExceeded {
                what: "writing λ as a power of the fundamental unit".into(),
                bound: ROOT_EXPONENT_BOUND as u64,
            });
        }
        power = &power * &eps;
        k += 1;
    }
    let lam_diff = &lam - &lam.conj();
    for n in (2..=k).rev().filter(|n| k.is_multiple_of(*n)) {
        let mu = eps.pow((k / n) as i64)?;
        let mut candidates = vec![mu.clone()];
        if n % 2 == 0 {
            candidates.push(-mu);
        }
        for mu in candidates {
            if let Some(root) = root_candidate(m, &lam, &lam_diff, &mu)? {
                if root.mat().pow(n) == *m.mat() {
                    return Ok(Primitivity {
                        primitive: false,
                        root: Some((root, n)),
                    });
                }
            }
        }
    }
    Ok(Primitivity {
        primitive: true,
        root: None,
    })
}

fn root_candidate(
    m: &UniMat,
    lam: &QuadExt,
    lam_diff: &QuadExt,
    mu: &QuadExt,
) -> Result<Option<UniMat>> {
    let beta = (mu - &mu.conj()).checked_div(lam_diff)?;
    let alpha = mu - &(&beta * lam);
    let (Some(a), Some(b)) = (alpha.to_rational(), beta.to_rational()) else {
        return Ok(None);
    };
    // α and β may be half-integers while α·I + β·M is still integral.
    let mm = m.mat();
    let ent = |diag: bool, x: &BigInt| {
        let v = &b * BigRational::from_integer(x.clone())
            + if diag { a.clone() } else { BigRational::zero() };
        v.is_integer().then(|| v.to_integer())
    };
    let (Some(ka), Some(kb), Some(kc), Some(kd)) = (
        ent(true, &mm.a),
        ent(false, &mm.b),
        ent(false, &mm.c),
        ent(true, &mm.d),
    ) else {
        return Ok(None);
    };
    Ok(UniMat::new(Mat2::new(ka, kb, kc, kd)).ok())
}

/// True iff the orbit `{Mⁿ(x, y)ᵀ}` spans Z², decided as `f_M(y, −x) = ±1`.
pub fn orbit_span_full(m: &UniMat, x: &BigInt, y: &BigInt) -> Result<bool> {
    let f = associated_form(m)?;
    Ok(f.eval(y, &-x).abs().is_one())
}

/// Index in Z² of the lattice spanned by `{Mⁿ(x, y)ᵀ : |n| ≤ span}`, as the
/// gcd of all 2×2 minors (0 when the vectors are collinear).
pub fn orbit_span_index(m: &UniMat, x: &BigInt, y: &BigInt, span: u32) -> BigInt {
    let inv = m.inverse();
    let mut vecs = vec![(x.clone(), y.clone())];
    let (mut fw, mut bw) = (vecs[0].clone(), vecs[0].clone());
    for _ in 0..span {
        fw = m.apply(&fw.0, &fw.1);
        bw = inv.apply(&bw.0, &bw.1);
        vecs.push(fw.clone());
        vecs.push(bw.clone());
    }
    let mut g = BigInt::zero();
    for i in 0..vecs.len() {
        for j in i + 1..vecs.len() {
            let det = &vecs[i].0 * &vecs[j].1 - &vecs[i].1 * &vecs[j].0;
            g = g.gcd(&det);
        }
    }
    g
}

/// Lower bound on the number of M-orbits whose spans cover Z².
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCoverBound {
    #[serde(with = "json_int")]
    pub bound: BigInt,
    /// Sharper bound when every solution of `f_M(y, −x) = ±m` lies in one orbit.
    pub refined: Option<u64>,
    pub note: Option<String>,
}

/// `min |f_M|` orbits are needed to cover Z² by orbit spans.
pub fn min_orbit_cover_bound(m: &UniMat) -> Result<OrbitCoverBound> {
    let f = associated_form(m)?;
    let mn = binforms::integral_minimum(&f)?;
    let mut out = OrbitCoverBound {
        bound: mn.clone(),
        refined: None,
        note: None,
    };
    if mn > BigInt::one() {
        let orbits = spanning_orbits(m, &f, &mn)?;
        if orbits.len() == 1 {
            let (x, y) = &orbits[0];
            // All minimal spans coincide, so any cover needs an orbit of
            // larger index as well.
            let refined = (&mn + 1u32).to_u64();
            out.refined = refined;
            out.note = Some(format!(
                "all solutions of f_M(y,-x)=±{mn} form the single orbit of ({x},{y}); at least {} orbits are needed",
                &mn + 1u32
            ));
        }
    }
    Ok(out)
}

/// Canonical representatives of the M-orbits of vectors `v` with
/// `|f_M(y, −x)| = m`.
pub fn spanning_orbits(m: &UniMat, f: &BinForm, mn: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    let mut reps = binforms::represent(f, mn)?;
    reps.extend(binforms::represent(f, &-mn)?);
    let mut orbits: Vec<(BigInt, BigInt)> = reps
        .into_iter()
        .map(|(p, q)| binforms::canonical_orbit_rep(m.mat(), &(-q, p)))
        .collect();
    orbits.sort();
    orbits.dedup();
    Ok(orbits)
}

/// Point of Q²/Z² with coordinates in [0, 1).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct RatPoint {
    pub x: BigRational,
    pub y: BigRational,
}

fn frac_rat(v: &BigRational) -> BigRational {
    v - v.floor()
}

fn fmt_rat(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

impl RatPoint {
    /// Reduces both coordinates mod 1.
    pub fn new(x: BigRational, y: BigRational) -> Self {
        RatPoint {
            x: frac_rat(&x),
            y: frac_rat(&y),
        }
    }

    pub fn zero() -> Self {
        RatPoint::new(BigRational::zero(), BigRational::zero())
    }

    pub fn from_ints(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        RatPoint::new(
            BigRational::new(xn.into(), xd.into()),
            BigRational::new(yn.into(), yd.into()),
        )
    }

    /// `M·p mod Z²`.
    pub fn apply(&self, m: &Mat2) -> RatPoint {
        let c = |v: &BigInt| BigRational::from_integer(v.clone());
        RatPoint::new(
            c(&m.a) * &self.x + c(&m.b) * &self.y,
            c(&m.c) * &self.x + c(&m.d) * &self.y,
        )
    }

    pub fn add(&self, o: &RatPoint) -> RatPoint {
        RatPoint::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn scale(&self, k: &BigInt) -> RatPoint {
        let k = BigRational::from_integer(k.clone());
        RatPoint::new(&self.x * &k, &self.y * &k)
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", fmt_rat(&self.x), fmt_rat(&self.y))
    }
}

impl FromStr for RatPoint {
    type Err = Error;
    /// Parses `"x,y"` with each coordinate an integer or `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("expected a point \"p/q,r/s\", got {s:?}"));
        let cleaned: String = s
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ' '))
            .collect();
        let (a, b) = cleaned.split_once(',').ok_or_else(bad)?;
        let parse = |t: &str| -> Result<BigRational> {
            match t.split_once('/') {
                Some((n, d)) => {
                    let n = BigInt::from_str(n).map_err(|_| bad())?;
                    let d = BigInt::from_str(d).map_err(|_| bad())?;
                    if d.is_zero() {
                        return Err(bad());
                    }
                    Ok(BigRational::new(n, d))
                }
                None => Ok(BigRational::from_integer(
                    BigInt::from_str(t).map_err(|_| bad())?,
                )),
            }
        };
        Ok(RatPoint::new(parse(a)?, parse(b)?))
    }
}

impl Serialize for RatPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Kernel of the torus endomorphism induced by an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelGroup {
    pub matrix: Mat2,
    #[serde(with = "json_int")]
    pub order: BigInt,
    pub generators: Vec<RatPoint>,
    /// All elements, sorted, when the order is at most [`KERNEL_LIST_LIMIT`].
    pub elements: Option<Vec<RatPoint>>,
}

impl KernelGroup {
    /// Membership test `B·p ∈ Z²`.
    pub fn contains(&self, p: &RatPoint) -> bool {
        let q = p.apply(&self.matrix);
        q.x.is_zero() && q.y.is_zero()
    }
}

/// Smith form of a nonsingular 2×2 matrix: `(d₁, d₂, V)` with `d₁ | d₂` and
/// `U·B·V = diag(d₁, d₂)` for some unimodular `U`.
pub fn smith_2x2(b: &Mat2) -> (BigInt, BigInt, Mat2) {
    let mut a = b.clone();
    let mut v = Mat2::identity();
    // Column operations are mirrored on v; row operations need no record.
    loop {
        // Bring a smallest nonzero entry to (0,0).
        let entries = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let (i, j) = entries
            .iter()
            .copied()
            .filter(|&(i, j)| !entry(&a, i, j).is_zero())
            .min_by_key(|&(i, j)| entry(&a, i, j).abs())
            .expect("nonsingular");
        if i == 1 {
            a = Mat2::new(a.c.clone(), a.d.clone(), a.a.clone(), a.b.clone());
        }
        if j == 1 {
            a = Mat2::new(a.b.clone(), a.a.clone(), a.d.clone(), a.c.clone());
            v = Mat2::new(v.b.clone(), v.a.clone(), v.d.clone(), v.c.clone());
        }
        let p = a.a.clone();
        // Clear (1,0) with a row operation and (0,1) with a column operation.
        let qr = a.c.div_floor(&p);
        a.c -= &qr * &p;
        a.d -= &qr * &a.b;
        let qc = a.b.div_floor(&p);
        a.b -= &qc * &p;
        a.d -= &qc * &a.c;
        v.b -= &qc * &v.a;
        v.d -= &qc * &v.c;
        if a.b.is_zero() && a.c.is_zero() {
            if (&a.d % &p).is_zero() {
                break;
            }
            // Fold d into the first row so the next pass reduces it.
            a.b = a.d.clone();
        }
    }
    let d1 = a.a.abs();
    let d2 = a.d.abs();
    (d1, d2, v)
}

fn entry(m: &Mat2, i: usize, j: usize) -> &BigInt {
    match (i, j) {
        (0, 0) => &m.a,
        (0, 1) => &m.b,
        (1, 0) => &m.c,
        _ => &m.d,
    }
}

/// `B⁻¹Z²/Z²`, the points of the torus killed by `B`.
pub fn kernel_group(b: &Mat2) -> Result<KernelGroup> {
    let det = b.det();
    if det.is_zero() {
        return Err(Error::Singular(b.to_string()));
    }
    let order = det.abs();
    let (d1, d2, v) = smith_2x2(b);
    debug_assert_eq!(&d1 * &d2, order);
    let mut generators = Vec::new();
    for (d, (vx, vy)) in [(&d1, (&v.a, &v.c)), (&d2, (&v.b, &v.d))] {
        if !d.is_one() {
            generators.push(RatPoint::new(
                BigRational::new(vx.clone(), d.clone()),
                BigRational::new(vy.clone(), d.clone()),
            ));
        }
    }
    let elements = if order <= BigInt::from(KERNEL_LIST_LIMIT) {
        let n1 = d1.to_u64().unwrap();
        let n2 = d2.to_u64().unwrap();
        let g1 = RatPoint::new(
            BigRational::new(v.a.clone(), d1.clone()),
            BigRational::new(v.c.clone(), d1.clone()),
        );
        let g2 = RatPoint::new(
            BigRational::new(v.b.clone(), d2.clone()),
            BigRational::new(v.d.clone(), d2.clone()),
        );
        let mut els = Vec::new();
        for i in 0..n1 {
            for j in 0..n2 {
                els.push(g1.scale(&i.into()).add(&g2.scale(&j.into())));
            }
        }
        els.sort();
        els.dedup();
        Some(els)
    } else {
        None
    };
    let kg = KernelGroup {
        matrix: b.clone(),
        order,
        generators,
        elements,
    };
    if let Some(els) = &kg.elements {
        if BigInt::from(els.len()) != kg.order || !els.iter().all(|e| kg.contains(e)) {
            return Err(Error::Internal(format!("kernel of {b} is inconsistent")));
        }
    }
    Ok(kg)
}

/// True iff some `±Mⁿ` with `|n| ≤ bound` carries `k1` onto `k2`.
pub fn kernel_isomorphic_under_t(
    m: &UniMat,
    k1: &KernelGroup,
    k2: &KernelGroup,
    bound: i64,
) -> bool {
    if k1.order != k2.order {
        return false;
    }
    // Mⁿ is injective on the torus, so mapping the generators into k2 suffices.
    (-bound..=bound).any(|n| {
        let mn = m.pow(n).into_mat();
        [mn.clone(), -mn]
            .iter()
            .any(|t| k1.generators.iter().all(|g| k2.contains(&g.apply(t))))
    })
}
