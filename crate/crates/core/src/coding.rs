//! Arithmetic codings of a hyperbolic toral automorphism.
//!
//! A homoclinic point `t` of `M` (an eigenvector `Mt = λt` with coordinates
//! in Q(√D)) gives the coding `φ(ε) = (Σ ε_n λ^{-n})·t mod Z²`, which
//! intertwines the shift with `M`.
//!
//! The geometry rests on one identity: for x ∈ Z[λ] the vector
//! `x·t + x̄·t̄` is an integer vector. Splitting the value of a word into its
//! future part `x₋ = Σ_{n≥1} ε_n λ^{-n}` and its past part `x₊`, one gets
//! `φ(ε) = x₋·t − y·t̄ mod Z²` with `y = x̄₊`. The pair `(x₋, y)` ranges over
//! the hexagon Π, so `[t | −t̄]·Π` is a fundamental domain of the coding and
//! its area is the multiplicity.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::betasym::{self, Compactum, SymWord, Tail};
use crate::binforms::{self, associated_form};
use crate::error::{Error, Result};
use crate::glz::{self, KernelGroup};
use crate::json_int;
use crate::mat::{Mat2, UniMat};
use crate::qfield::{self, QuadExt};

/// Homoclinic point selected by the parameter pair `(p, q)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HomoclinicPoint {
    #[serde(with = "json_int")]
    pub p: BigInt,
    #[serde(with = "json_int")]
    pub q: BigInt,
    #[serde(with = "json_int")]
    pub n: BigInt,
    #[serde(with = "json_int")]
    pub k: BigInt,
    pub xi: QuadExt,
    pub eta: QuadExt,
    /// `(ξ, η) mod Z²`.
    pub toral: (QuadExt, QuadExt),
}

/// Point of the torus with exact coordinates in [0, 1).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: QuadExt,
    pub y: QuadExt,
}

impl TorusPoint {
    pub fn new(x: &QuadExt, y: &QuadExt) -> Self {
        TorusPoint {
            x: x.frac(),
            y: y.frac(),
        }
    }

    pub fn from_rational(p: &glz::RatPoint, d: &BigInt) -> Self {
        TorusPoint::new(&QuadExt::rational(&p.x, d), &QuadExt::rational(&p.y, d))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// The rational point, when both coordinates are rational.
    pub fn to_rational(&self) -> Option<glz::RatPoint> {
        Some(glz::RatPoint::new(
            self.x.to_rational()?,
            self.y.to_rational()?,
        ))
    }

    pub fn add(&self, o: &TorusPoint) -> TorusPoint {
        TorusPoint::new(&(&self.x + &o.x), &(&self.y + &o.y))
    }

    pub fn sub(&self, o: &TorusPoint) -> TorusPoint {
        TorusPoint::new(&(&self.x - &o.x), &(&self.y - &o.y))
    }

    pub fn apply(&self, m: &Mat2) -> TorusPoint {
        let (x, y) = apply_planar(m, &self.x, &self.y);
        TorusPoint::new(&x, &y)
    }

    /// Torus distance `max(‖Δx‖, ‖Δy‖)` to another point.
    pub fn dist(&self, o: &TorusPoint) -> QuadExt {
        let d = self.sub(o);
        let (a, b) = (d.x.dist_to_int(), d.y.dist_to_int());
        if a >= b {
            a
        } else {
            b
        }
    }
}

fn apply_planar(m: &Mat2, x: &QuadExt, y: &QuadExt) -> (QuadExt, QuadExt) {
    (
        &x.mul_int(&m.a) + &y.mul_int(&m.b),
        &x.mul_int(&m.c) + &y.mul_int(&m.d),
    )
}

/// One arithmetic coding: a trace-normalized matrix and a homoclinic point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CodingSpec {
    pub matrix: UniMat,
    pub point: HomoclinicPoint,
    /// K, the number of preimages of almost every point.
    pub multiplicity: BigInt,
}

#[derive(Serialize, Deserialize)]
struct CodingSpecRepr {
    matrix: UniMat,
    #[serde(with = "json_int")]
    p: BigInt,
    #[serde(with = "json_int")]
    q: BigInt,
    #[serde(rename = "K", with = "json_int")]
    k: BigInt,
    xi: QuadExt,
    eta: QuadExt,
}

impl Serialize for CodingSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CodingSpecRepr {
            matrix: self.matrix.clone(),
            p: self.point.p.clone(),
            q: self.point.q.clone(),
            k: self.multiplicity.clone(),
            xi: self.point.xi.clone(),
            eta: self.point.eta.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CodingSpec {
    /// Rebuilt from `matrix`, `p`, `q`; the remaining fields must agree.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CodingSpecRepr::deserialize(d)?;
        let spec = CodingSpec::new(&r.matrix, &r.p, &r.q).map_err(D::Error::custom)?;
        if spec.multiplicity != r.k || spec.point.xi != r.xi || spec.point.eta != r.eta {
            return Err(D::Error::custom(
                "K, xi or eta disagree with (matrix, p, q)",
            ));
        }
        Ok(spec)
    }
}

fn hyperbolic_positive(m: &UniMat) -> Result<(BigInt, i8)> {
    let (r, sigma) = binforms::trace_det(m)?;
    if r.is_negative() {
        return Err(Error::Invalid(format!(
            "{m} has negative trace; normalize it to {} first",
            -m
        )));
    }
    Ok((r, sigma))
}

/// The homoclinic point with `ξ = (−q + nλ)/√D`, `η = (p + kλ)/√D`, where
/// `(n, k)ᵀ = −σ·M·(−q, p)ᵀ`.
pub fn homoclinic_point(m: &UniMat, p: &BigInt, q: &BigInt) -> Result<HomoclinicPoint> {
    let (r, sigma) = hyperbolic_positive(m)?;
    let lam = qfield::lambda(&r, sigma)?;
    let d = lam.d().clone();
    let (n0, k0) = m.apply(&-q, p);
    let (n, k) = if sigma == 1 { (-n0, -k0) } else { (n0, k0) };
    let root = QuadExt::sqrt_d(&d);
    let xi = lam.mul_int(&n).add_int(&-q).checked_div(&root)?;
    let eta = lam.mul_int(&k).add_int(p).checked_div(&root)?;
    debug_assert_eq!(apply_planar(m.mat(), &xi, &eta), (&xi * &lam, &eta * &lam));
    let toral = (xi.frac(), eta.frac());
    Ok(HomoclinicPoint {
        p: p.clone(),
        q: q.clone(),
        n,
        k,
        xi,
        eta,
        toral,
    })
}

/// The parameter pair whose homoclinic point is exactly `(ξ, η)`, if any.
pub fn params_for_point(
    m: &UniMat,
    xi: &QuadExt,
    eta: &QuadExt,
) -> Result<Option<(BigInt, BigInt)>> {
    let (r, sigma) = hyperbolic_positive(m)?;
    let d = qfield::radicand(&r, sigma);
    let root = QuadExt::sqrt_d(&d);
    // t√D = v − σλMv, whose √D-part is −(σ/2)·Mv.
    let mut mv = Vec::new();
    for c in [xi, eta] {
        let w = c * &root;
        let beta = BigRational::new(w.q().clone(), w.s().clone());
        let val = beta * BigRational::from_integer(BigInt::from(-2 * sigma as i64));
        if !val.is_integer() {
            return Ok(None);
        }
        mv.push(val.to_integer());
    }
    let (vx, vy) = m.inverse().apply(&mv[0], &mv[1]);
    let (p, q) = (vy, -vx);
    let pt = homoclinic_point(m, &p, &q)?;
    Ok((pt.xi == *xi && pt.eta == *eta).then_some((p, q)))
}

impl CodingSpec {
    /// The coding attached to `(p, q)`; errors on the zero parameter.
    pub fn new(m: &UniMat, p: &BigInt, q: &BigInt) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::Invalid("the zero parameter gives no coding".into()));
        }
        let point = homoclinic_point(m, p, q)?;
        let multiplicity = associated_form(m)?.eval(p, q).abs();
        Ok(CodingSpec {
            matrix: m.clone(),
            point,
            multiplicity,
        })
    }

    pub fn from_i64(m: &UniMat, p: i64, q: i64) -> Result<Self> {
        CodingSpec::new(m, &p.into(), &q.into())
    }

    pub fn r(&self) -> BigInt {
        self.matrix.trace()
    }

    pub fn sigma(&self) -> i8 {
        self.matrix.det()
    }

    pub fn lambda(&self) -> QuadExt {
        qfield::lambda(&self.r(), self.sigma()).expect("spec matrix is hyperbolic")
    }

    pub fn d(&self) -> BigInt {
        qfield::radicand(&self.r(), self.sigma())
    }

    pub fn compactum(&self) -> Result<Compactum> {
        Compactum::for_params(&self.r(), self.sigma())
    }

    /// Planar homoclinic vector `t = (ξ, η)`.
    pub fn t(&self) -> (QuadExt, QuadExt) {
        (self.point.xi.clone(), self.point.eta.clone())
    }

    /// The coding for the parameter `v ↦ g·v`, `v = (−q, p)`.
    fn moved(&self, g: &Mat2) -> Result<CodingSpec> {
        let (x, y) = g.apply(&-&self.point.q, &self.point.p);
        CodingSpec::new(&self.matrix, &y, &-x)
    }
}

/// `K = |f_M(p, q)|`, cross-checked against `√D·|ξ̄η − ξη̄|`.
pub fn multiplicity(spec: &CodingSpec) -> Result<BigInt> {
    let area = determinant_area(spec);
    let k = area
        .to_rational()
        .filter(|a| a.is_integer())
        .map(|a| a.to_integer())
        .ok_or_else(|| Error::Internal(format!("area {area} is not an integer")))?;
    if k != spec.multiplicity || k.is_zero() {
        return Err(Error::Internal(format!(
            "multiplicity mismatch: |f| = {}, determinant formula {k}",
            spec.multiplicity
        )));
    }
    Ok(k)
}

/// `√D·|ξ̄η − ξη̄|`.
pub fn determinant_area(spec: &CodingSpec) -> QuadExt {
    let (xi, eta) = spec.t();
    let det = &(&xi.conj() * &eta) - &(&xi * &eta.conj());
    (&det * &QuadExt::sqrt_d(&spec.d())).abs()
}

/// Generator of the unit action on parameters: the primitive root of `M`
/// when `M` is a proper power, `M` itself otherwise.
pub fn orbit_generator(m: &UniMat) -> Result<UniMat> {
    Ok(match glz::is_primitive(m)?.root {
        Some((k, _)) => k,
        None => m.clone(),
    })
}

/// Base parameters `(p, q)` with `|f_M(p, q)| = k`, one per orbit of the
/// unit action `v ↦ ±g^j v` on `v = (−q, p)`, each normalized so that
/// `1 ≤ |ξ√D| < μ` and `ξ > 0`, μ the expanding eigenvalue of `g`.
fn base_params(m: &UniMat, k: &BigInt) -> Result<Vec<CodingSpec>> {
    let f = associated_form(m)?;
    let g = orbit_generator(m)?;
    let mut reps = binforms::represent(&f, k)?;
    reps.extend(binforms::represent(&f, &-k)?);
    let mut vs: Vec<(BigInt, BigInt)> = reps
        .into_iter()
        .map(|(p, q)| binforms::canonical_orbit_rep(g.mat(), &(-q, p)))
        .collect();
    vs.sort();
    vs.dedup();
    let mut out = Vec::new();
    for (x, y) in vs {
        let spec = CodingSpec::new(m, &y, &-x)?;
        out.push(normalize_base(&spec, &g)?);
    }
    Ok(out)
}

/// Moves a spec along its unit orbit into the window `1 ≤ |ξ√D| < μ`.
fn normalize_base(spec: &CodingSpec, g: &UniMat) -> Result<CodingSpec> {
    let root = QuadExt::sqrt_d(&spec.d());
    let one = QuadExt::one(&spec.d());
    let mu = spec.moved(g.mat())?.point.xi.checked_div(&spec.point.xi)?;
    let (up, down) = if mu.abs() > one {
        (g.inverse(), g.clone())
    } else {
        (g.clone(), g.inverse())
    };
    let size = |s: &CodingSpec| (&s.point.xi * &root).abs();
    let mut cur = spec.clone();
    // |ξ√D| shrinks by |μ| under `up` and grows under `down`.
    while size(&cur) < one {
        cur = cur.moved(down.mat())?;
    }
    loop {
        let next = cur.moved(up.mat())?;
        if size(&next) < one {
            break;
        }
        cur = next;
    }
    if cur.point.xi.is_negative() {
        cur = cur.moved(&-Mat2::identity())?;
    }
    Ok(cur)
}

/// Bijective codings `±g^j·t₀` for each base BAC parameter `t₀` and each
/// `j` in `k_range`, g the orbit generator. Empty iff `f_M` does not
/// represent ±1.
pub fn enumerate_bac(m: &UniMat, k_range: RangeInclusive<i64>) -> Result<Vec<CodingSpec>> {
    hyperbolic_positive(m)?;
    let g = orbit_generator(m)?;
    let mut out = Vec::new();
    for base in base_params(m, &BigInt::one())? {
        for j in k_range.clone() {
            let gj = g.pow(j).into_mat();
            for sign in [1, -1] {
                let s = base.moved(&gj.scale(&sign.into()))?;
                debug_assert!(s.multiplicity.is_one());
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// A minimal coding with the kernel it collapses.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MacMember {
    pub spec: CodingSpec,
    /// `Ker B` for the intertwiner `B` with first row `(p, q)`, which
    /// carries `M` to its companion matrix.
    pub kernel: KernelGroup,
}

/// The integral minimum m and one minimal coding per base orbit of
/// `f_M = ±m`.
pub fn enumerate_mac(m: &UniMat) -> Result<(BigInt, Vec<MacMember>)> {
    hyperbolic_positive(m)?;
    let f = associated_form(m)?;
    let mn = binforms::integral_minimum(&f)?;
    let mut out = Vec::new();
    for spec in base_params(m, &mn)? {
        let kernel = glz::kernel_group(&glz::intertwiner(m, &spec.point.p, &spec.point.q))?;
        debug_assert_eq!(kernel.order, mn);
        out.push(MacMember { spec, kernel });
    }
    Ok((mn, out))
}

/// `φ(w) = value(w)·t mod Z²`, exact.
pub fn phi_eval(spec: &CodingSpec, w: &SymWord) -> Result<TorusPoint> {
    let c = spec.compactum()?;
    if !betasym::is_admissible(w, &c) {
        return Err(Error::Invalid(format!(
            "word {w} is not admissible for {}",
            c.forbidden
        )));
    }
    let v = betasym::value(w, &c);
    let (xi, eta) = spec.t();
    Ok(TorusPoint::new(&(&v * &xi), &(&v * &eta)))
}

/// Coding of the original automorphism `T` when its trace is negative and
/// σ = −1: `ψ(ε) = (Σ ε_n λ^{n})·t̄ mod Z²` on the reversed Markov compactum,
/// with `spec` built for `−M` and `t̄` the conjugate of its homoclinic
/// vector. `ψ∘shift = M·ψ` for the original `M = −spec.matrix`.
pub fn psi_eval(spec: &CodingSpec, w: &SymWord) -> Result<TorusPoint> {
    if spec.sigma() != -1 {
        return Err(Error::Invalid(
            "the reversed coding of a negated matrix needs determinant −1".into(),
        ));
    }
    let c = Compactum::markov_reversed(spec.compactum()?.r);
    if !betasym::is_admissible(w, &c) {
        return Err(Error::Invalid(format!(
            "word {w} is not admissible for {}",
            c.forbidden
        )));
    }
    let v = betasym::value(w, &c);
    let (xi, eta) = spec.t();
    Ok(TorusPoint::new(&(&v * &xi.conj()), &(&v * &eta.conj())))
}

/// Fundamental domain of a coding as an exact planar polygon.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DomainPolygon {
    pub vertices: Vec<(QuadExt, QuadExt)>,
    pub area: QuadExt,
}

/// Vertices of the hexagon Π in (future, past) coordinates, counterclockwise.
pub fn pi_hexagon(r: &BigInt, sigma: i8) -> Result<Vec<(QuadExt, QuadExt)>> {
    let lam = qfield::lambda(r, sigma)?;
    let d = lam.d().clone();
    let int = |n: i64| QuadExt::integer(n.into(), &d);
    let inv = lam.inv()?;
    let lm1 = lam.add_int(&BigInt::from(-1));
    Ok(if sigma == -1 {
        // [0,1]×[−1,λ−1] ∪ [0,λ⁻¹]×[λ−1,λ]
        vec![
            (int(0), int(-1)),
            (int(1), int(-1)),
            (int(1), lm1.clone()),
            (inv.clone(), lm1),
            (inv, lam.clone()),
            (int(0), lam),
        ]
    } else {
        // [0,1]×[0,λ] minus the corner (1−λ⁻¹,1]×(λ−1,λ]
        let a = &int(1) - &inv;
        vec![
            (int(0), int(0)),
            (int(1), int(0)),
            (int(1), lm1.clone()),
            (a.clone(), lm1),
            (a, lam.clone()),
            (int(0), lam),
        ]
    })
}

/// Half-open membership in Π: lower and left edges in, upper and right out.
fn in_pi(x: &QuadExt, y: &QuadExt, lam: &QuadExt, sigma: i8) -> bool {
    let d = lam.d();
    let zero = QuadExt::zero(d);
    let one = QuadExt::one(d);
    let inv = lam.inv().unwrap();
    let lm1 = lam.add_int(&BigInt::from(-1));
    if *x < zero || *x >= one {
        return false;
    }
    let (y0, notch) = if sigma == -1 {
        (-&one, inv)
    } else {
        (zero, &one - &inv)
    };
    if *y < y0 || *y >= *lam {
        return false;
    }
    *y < lm1 || *x < notch
}

fn shoelace(vs: &[(QuadExt, QuadExt)]) -> QuadExt {
    let d = vs[0].0.d().clone();
    let mut acc = QuadExt::zero(&d);
    for i in 0..vs.len() {
        let (a, b) = (&vs[i], &vs[(i + 1) % vs.len()]);
        acc = &acc + &(&(&a.0 * &b.1) - &(&a.1 * &b.0));
    }
    acc.abs().div_int(&BigInt::from(2)).unwrap()
}

/// `(x, y) ↦ x·t − y·t̄`.
fn embed(spec: &CodingSpec, x: &QuadExt, y: &QuadExt) -> (QuadExt, QuadExt) {
    let (xi, eta) = spec.t();
    (
        &(x * &xi) - &(y * &xi.conj()),
        &(x * &eta) - &(y * &eta.conj()),
    )
}

/// The polygon `[t | −t̄]·Π`; its exact area equals the multiplicity.
pub fn fundamental_domain(spec: &CodingSpec) -> Result<DomainPolygon> {
    let hex = pi_hexagon(&spec.r(), spec.sigma())?;
    let vertices: Vec<_> = hex.iter().map(|(x, y)| embed(spec, x, y)).collect();
    let area = shoelace(&vertices);
    Ok(DomainPolygon { vertices, area })
}

/// Area of Π itself, which is √D.
pub fn pi_area(r: &BigInt, sigma: i8) -> Result<QuadExt> {
    Ok(shoelace(&pi_hexagon(r, sigma)?))
}

/// Lifts `target` into the fundamental domain and returns its (future,
/// past) coordinates in Π.
fn locate(spec: &CodingSpec, target: &TorusPoint) -> Result<(QuadExt, QuadExt)> {
    let (xi, eta) = spec.t();
    let (xc, ec) = (xi.conj(), eta.conj());
    // [ξ −ξ̄; η −η̄]⁻¹
    let det = &(&ec * &xi) - &(&xc * &eta);
    let det = -det;
    let lam = spec.lambda();
    let poly = fundamental_domain(spec)?;
    let fl = |f: fn(f64, f64) -> f64, sel: fn(&(QuadExt, QuadExt)) -> f64| {
        poly.vertices.iter().map(sel).fold(f64::NAN, f)
    };
    let (x0, x1) = (
        fl(f64::min, |v| v.0.to_f64()),
        fl(f64::max, |v| v.0.to_f64()),
    );
    let (y0, y1) = (
        fl(f64::min, |v| v.1.to_f64()),
        fl(f64::max, |v| v.1.to_f64()),
    );
    let (tx, ty) = (target.x.to_f64(), target.y.to_f64());
    let range =
        |lo: f64, hi: f64, t: f64| ((lo - t).floor() as i64 - 1)..=((hi - t).ceil() as i64 + 1);
    for mx in range(x0, x1, tx) {
        for my in range(y0, y1, ty) {
            let zx = target.x.add_int(&mx.into());
            let zy = target.y.add_int(&my.into());
            // z = x·t − y·t̄
            let x = (&(&zx * &-&ec) - &(&zy * &-&xc)).checked_div(&det)?;
            let y = (&(&zy * &xi) - &(&zx * &eta)).checked_div(&det)?;
            if in_pi(&x, &y, &lam, spec.sigma()) {
                return Ok((x, y));
            }
        }
    }
    Err(Error::Internal(format!(
        "no lattice translate of ({}, {}) lies in the fundamental domain",
        target.x, target.y
    )))
}

/// A word of index range `[−window, window]` whose image lies within
/// `λ^{2−window}` of `target` (exactly on `target` when its expansion is
/// finite). Needs a bijective coding.
pub fn decode(spec: &CodingSpec, target: &TorusPoint, window: u32) -> Result<SymWord> {
    if !spec.multiplicity.is_one() {
        return Err(Error::Invalid(format!(
            "decoding needs a bijective coding, this one is {}-to-1",
            spec.multiplicity
        )));
    }
    let d = spec.d();
    if target.x.d() != &d || target.y.d() != &d {
        return Err(Error::Invalid(
            "target lives in a different quadratic field".into(),
        ));
    }
    let lam = spec.lambda();
    let r = spec.r();
    let sigma = spec.sigma();
    let (mut x, mut y) = locate(spec, target)?;
    let inv = lam.inv()?;
    let w = window as usize;
    // future digits ε_1..ε_w by the greedy rule
    let mut future = Vec::with_capacity(w);
    for _ in 0..w {
        let t = &x * &lam;
        let dgt = t.floor();
        x = t.add_int(&-&dgt);
        future.push(dgt);
    }
    // past digits ε_0, ε_{−1}, …
    let mut past = Vec::with_capacity(w + 1);
    for _ in 0..=w {
        let dgt = if sigma == -1 {
            // least digit with y ≤ d + λ⁻¹, then y' = λ(d − y)
            let dgt = (&y - &inv).ceil().max(BigInt::zero());
            y = &(&QuadExt::integer(dgt.clone(), &d) - &y) * &lam;
            dgt
        } else {
            // y = d + y'/λ with y' ∈ [0, λ)
            let dgt = y.floor();
            y = &y.add_int(&-&dgt) * &lam;
            dgt
        };
        past.push(dgt);
    }
    let _ = r;
    let mut core: Vec<u32> = past
        .iter()
        .rev()
        .chain(future.iter())
        .map(digit_u32)
        .collect::<Result<_>>()?;
    let offset = -(w as i64);
    let word = SymWord {
        offset,
        core: std::mem::take(&mut core),
        left_tail: Tail::Zero,
        right_tail: Tail::Zero,
    }
    .tidy();
    let c = spec.compactum()?;
    if !betasym::is_admissible(&word, &c) {
        return Err(Error::Internal(format!(
            "decoded word {word} is not admissible"
        )));
    }
    // certify the error bound
    let got = phi_eval(spec, &word)?;
    let bound = lam.pow(2 - window as i64)?;
    if got.dist(target) > bound {
        return Err(Error::Internal(format!(
            "decoded word {word} misses the target"
        )));
    }
    Ok(word)
}

fn digit_u32(d: &BigInt) -> Result<u32> {
    u32::try_from(d).map_err(|_| Error::Internal(format!("digit {d} out of range")))
}

/// `A = aI + bM` with `t_spec = A·t_bac`, required to be integral.
pub fn comparison_matrix(spec: &CodingSpec, reference: &CodingSpec) -> Result<Mat2> {
    if spec.matrix != reference.matrix {
        return Err(Error::Invalid("codings of different matrices".into()));
    }
    let lam = spec.lambda();
    let mu = spec.point.xi.checked_div(&reference.point.xi)?;
    if &mu * &reference.point.eta != spec.point.eta {
        return Err(Error::Internal(
            "homoclinic vectors are not proportional".into(),
        ));
    }
    let b = (&mu - &mu.conj()).checked_div(&(&lam - &lam.conj()))?;
    let a = &mu - &(&b * &lam);
    let (Some(a), Some(b)) = (a.to_rational(), b.to_rational()) else {
        return Err(Error::Internal(
            "comparison coefficients are irrational".into(),
        ));
    };
    let m = spec.matrix.mat();
    let ent = |diag: bool, x: &BigInt| -> Result<BigInt> {
        let v = &b * BigRational::from_integer(x.clone())
            + if diag { a.clone() } else { BigRational::zero() };
        if v.is_integer() {
            Ok(v.to_integer())
        } else {
            Err(Error::NotPrimitive(
                "homoclinic point is not an integer combination of the reference orbit".into(),
                v.numer().clone(),
            ))
        }
    };
    Ok(Mat2::new(
        ent(true, &m.a)?,
        ent(false, &m.b)?,
        ent(false, &m.c)?,
        ent(true, &m.d)?,
    ))
}

fn kernel_relative(spec: &CodingSpec, reference: &CodingSpec) -> Result<KernelGroup> {
    let a = comparison_matrix(spec, reference)?;
    glz::kernel_group(&a)
}

/// The finite group collapsed by `spec` relative to the bijective coding
/// `bac`: `ker(A)` for `t_spec = A·t_bac`. Its order is the multiplicity.
pub fn kernel_of_coding(spec: &CodingSpec, bac: &CodingSpec) -> Result<KernelGroup> {
    if !bac.multiplicity.is_one() {
        return Err(Error::Invalid("reference coding is not bijective".into()));
    }
    let k = kernel_relative(spec, bac)?;
    if k.order != spec.multiplicity {
        return Err(Error::Internal(format!(
            "kernel order {} differs from the multiplicity {}",
            k.order, spec.multiplicity
        )));
    }
    Ok(k)
}

/// True iff `x·√D ∈ Z + λZ`, i.e. `x` generates a homoclinic orbit.
pub fn pisot_member(x: &QuadExt, r: &BigInt, sigma: i8) -> Result<bool> {
    let lam = qfield::lambda(r, sigma)?;
    if x.d() != lam.d() {
        return Err(Error::Invalid(
            "element lives in a different quadratic field".into(),
        ));
    }
    Ok(qfield::order_coords(&(x * &QuadExt::sqrt_d(lam.d())), r).is_some())
}

/// `‖x·λⁿ‖` for `0 ≤ n ≤ n_max`, each checked against `|x̄|·|λ̄|ⁿ`.
pub fn homoclinic_decay_check(
    x: &QuadExt,
    r: &BigInt,
    sigma: i8,
    n_max: u32,
) -> Result<Vec<QuadExt>> {
    if !pisot_member(x, r, sigma)? {
        return Err(Error::Invalid(format!(
            "{x} is not in the homoclinic group"
        )));
    }
    let lam = qfield::lambda(r, sigma)?;
    let bar = lam.conj().abs();
    let mut out = Vec::new();
    let mut p = x.clone();
    let mut bound = x.conj().abs();
    for _ in 0..=n_max {
        let dist = p.dist_to_int();
        if dist > bound {
            return Err(Error::Internal(format!("‖{p}‖ exceeds the decay bound")));
        }
        out.push(dist);
        p = &p * &lam;
        bound = &bound * &bar;
    }
    Ok(out)
}

/// Compares the two sides of "the image of a homoclinic class is the
/// homoclinic class of the image" on a pair of words: the word difference
/// is homoclinic iff the torus difference lies in the homoclinic group.
pub fn homoclinic_class_image_check(bac: &CodingSpec, w1: &SymWord, w2: &SymWord) -> Result<bool> {
    let c = bac.compactum()?;
    let diff = betasym::word_add(w1, &betasym::word_neg(w2, &c)?, &c)?;
    let lhs = betasym::is_homoclinic_word(&diff, &c);
    let v = &betasym::value(w1, &c) - &betasym::value(w2, &c);
    let image = phi_eval(bac, &diff)?;
    if image != phi_eval(bac, w1)?.sub(&phi_eval(bac, w2)?) {
        return Err(Error::Internal("φ is not additive on this pair".into()));
    }
    let rhs = pisot_member(&(&v * &bac.point.xi), &bac.r(), bac.sigma())?;
    Ok(lhs == rhs)
}
