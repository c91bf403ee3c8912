//! β-expansions in base λ, the Markov and sofic compacta, and their group
//! structure.
//!
//! A word `ε = (ε_n)` has value `Σ ε_n λ^{-n}`; the unit word `u_k` (a single
//! 1 at index `k`) has value `λ^{-k}` and the shift moves every digit one
//! place left, multiplying the value by λ. Words are stored as a finite core
//! flanked by tagged tails. Periodic tails are summed in closed form,
//! reading a left tail as the analytic continuation of its geometric series:
//!
//! ```text
//! markov  right (r,0,r,0,…) from j        λ^{1−j}
//! markov  left  (…,0,r,0,r) ending at j   −λ^{−j−1}
//! sofic   right (r−2,r−2,…) from j        λ^{1−j} − λ^{−j}
//! sofic   left  (…,r−2,r−2) ending at j   −λ^{−j} + λ^{−j−1}
//! ```
//!
//! Group operations work through exact values: every value has exactly one
//! canonical word (finite core for values ≥ 0, a left tail for values < 0).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::{self, QuadExt};

/// Step limit for a single greedy expansion.
pub const GREEDY_STEP_LIMIT: usize = 100_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompactumKind {
    /// Digits 0..r, a digit r is followed by 0.
    Markov,
    /// Digits 0..r−1, no factor (r−1)(r−2)ʲ(r−1).
    Sofic,
    /// Digits 0..r, a digit r is preceded by 0.
    MarkovReversed,
}

/// Symbolic compactum attached to the characteristic polynomial
/// x² − r x + σ (r > 0 after trace normalization).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Compactum {
    pub kind: CompactumKind,
    pub r: u32,
    pub digit_max: u32,
    pub forbidden: String,
}

impl Compactum {
    pub fn markov(r: u32) -> Self {
        Compactum {
            kind: CompactumKind::Markov,
            r,
            digit_max: r,
            forbidden: format!("{r} followed by a nonzero digit"),
        }
    }

    pub fn sofic(r: u32) -> Self {
        let (a, b) = (r.saturating_sub(1), r.saturating_sub(2));
        Compactum {
            kind: CompactumKind::Sofic,
            r,
            digit_max: r - 1,
            forbidden: format!("{a} {b}^j {a} for j >= 0"),
        }
    }

    pub fn markov_reversed(r: u32) -> Self {
        Compactum {
            kind: CompactumKind::MarkovReversed,
            r,
            digit_max: r,
            forbidden: format!("{r} preceded by a nonzero digit"),
        }
    }

    /// Compactum for a hyperbolic (trace, determinant) pair; negative traces
    /// give the reversed Markov compactum (σ = −1) or the sofic one (σ = +1).
    pub fn for_params(r: &BigInt, sigma: i8) -> Result<Self> {
        qfield::check_hyperbolic(r, sigma)?;
        let abs = r
            .abs()
            .to_u32()
            .ok_or_else(|| Error::Invalid(format!("trace {r} too large for digit words")))?;
        Ok(match (sigma, r.is_positive()) {
            (-1, true) => Compactum::markov(abs),
            (-1, false) => Compactum::markov_reversed(abs),
            _ => Compactum::sofic(abs),
        })
    }

    pub fn sigma(&self) -> i8 {
        match self.kind {
            CompactumKind::Sofic => 1,
            _ => -1,
        }
    }

    /// The base λ = (r + √D)/2 > 1.
    pub fn lambda(&self) -> QuadExt {
        qfield::lambda(&BigInt::from(self.r), self.sigma())
            .expect("compactum parameters are hyperbolic")
    }

    fn tail_allowed(&self, t: Tail) -> bool {
        match t {
            Tail::Zero => true,
            Tail::AltR0 => self.kind != CompactumKind::Sofic,
            Tail::ConstR2 => self.kind == CompactumKind::Sofic,
        }
    }
}

/// `prefix` followed by `period` repeated forever (finite when `period` is empty).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct EventuallyPeriodic {
    pub prefix: Vec<u32>,
    pub period: Vec<u32>,
}

impl EventuallyPeriodic {
    /// Digit at 1-based position `i`.
    pub fn digit(&self, i: usize) -> u32 {
        let k = i - 1;
        if k < self.prefix.len() {
            self.prefix[k]
        } else if self.period.is_empty() {
            0
        } else {
            self.period[(k - self.prefix.len()) % self.period.len()]
        }
    }

    /// `Σ dᵢ λ^{-i}` over i ≥ 1, exactly.
    pub fn value(&self, lambda: &QuadExt) -> QuadExt {
        let inv = lambda.inv().expect("λ ≠ 0");
        let d = lambda.d();
        let mut acc = QuadExt::zero(d);
        let mut w = inv.clone();
        for &x in &self.prefix {
            acc = &acc + &w.mul_int(&x.into());
            w = &w * &inv;
        }
        if !self.period.is_empty() {
            let start = w.clone();
            let mut block = QuadExt::zero(d);
            let mut ww = QuadExt::one(d);
            for &x in &self.period {
                block = &block + &ww.mul_int(&x.into());
                ww = &ww * &inv;
            }
            // ww = λ^{-L}
            let denom = &QuadExt::one(d) - &ww;
            acc = &acc + &(&start * &block).checked_div(&denom).expect("λ > 1");
        }
        acc
    }
}

impl fmt::Display for EventuallyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| {
            v.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        if self.period.is_empty() {
            write!(f, "({})", join(&self.prefix))
        } else if self.prefix.is_empty() {
            write!(f, "({})^inf", join(&self.period))
        } else {
            write!(f, "({})({})^inf", join(&self.prefix), join(&self.period))
        }
    }
}

/// Greedy expansion of 1 and the quasi-greedy word derived from it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ParryData {
    pub d1_expansion: EventuallyPeriodic,
    pub quasi_greedy: EventuallyPeriodic,
}

/// Greedy digits of `x ∈ [0, 1)` after the point, `x = Σ dᵢ λ^{-i}`,
/// detecting eventual periodicity exactly.
fn greedy_fraction(x: &QuadExt, lambda: &QuadExt) -> Result<EventuallyPeriodic> {
    let mut seen: HashMap<QuadExt, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut s = x.clone();
    loop {
        if s.is_zero() {
            return Ok(EventuallyPeriodic {
                prefix: digits,
                period: Vec::new(),
            });
        }
        if let Some(&start) = seen.get(&s) {
            let period = digits.split_off(start);
            return Ok(EventuallyPeriodic {
                prefix: digits,
                period,
            });
        }
        if digits.len() >= GREEDY_STEP_LIMIT {
            return Err(Error::BoundExceeded {
                what: "expanding in base λ".into(),
                bound: GREEDY_STEP_LIMIT as u64,
            });
        }
        seen.insert(s.clone(), digits.len());
        let t = &s * lambda;
        let d = t.floor();
        digits.push(d.to_u32().expect("digit fits"));
        s = t.add_int(&-d);
    }
}

/// d(1, λ): the greedy expansion of 1, and the quasi-greedy d*(1).
pub fn parry_expansion(r: u32, sigma: i8) -> Result<ParryData> {
    let lambda = qfield::lambda(&BigInt::from(r), sigma)?;
    // d₁ = ⌊λ⌋, then the greedy digits of {λ}/λ.
    let d1 = lambda.floor();
    let rest = greedy_fraction(&lambda.frac(), &lambda)?;
    let mut prefix = vec![d1.to_u32().expect("digit fits")];
    prefix.extend(rest.prefix);
    let d = EventuallyPeriodic {
        prefix,
        period: rest.period,
    };
    let quasi = if d.period.is_empty() {
        let mut p = d.prefix.clone();
        *p.last_mut().unwrap() -= 1;
        EventuallyPeriodic {
            prefix: Vec::new(),
            period: p,
        }
    } else {
        d.clone()
    };
    let one = QuadExt::one(lambda.d());
    if d.value(&lambda) != one || quasi.value(&lambda) != one {
        return Err(Error::Internal(format!(
            "expansion {d} of 1 does not sum to 1"
        )));
    }
    Ok(ParryData {
        d1_expansion: d,
        quasi_greedy: quasi,
    })
}

/// Blocks of length ≤ `max_len` excluded by the condition "every tail is
/// lexicographically at most d*(1)": `d*₁…d*_{k−1} b` with `b > d*_k`.
/// Digits above `d*₁` are left to the alphabet.
pub fn forbidden_blocks(parry: &ParryData, max_len: usize) -> Vec<Vec<u32>> {
    let q = &parry.quasi_greedy;
    let top = q.digit(1);
    let mut out = Vec::new();
    for k in 2..=max_len {
        let prefix: Vec<u32> = (1..k).map(|i| q.digit(i)).collect();
        for b in q.digit(k) + 1..=top {
            let mut blk = prefix.clone();
            blk.push(b);
            out.push(blk);
        }
    }
    out
}

/// Compiles the Parry condition into a compactum description and checks it
/// against the Markov (σ = −1) or sofic (σ = +1) local rule.
pub fn derive_compactum(r: u32, sigma: i8) -> Result<Compactum> {
    let parry = parry_expansion(r, sigma)?;
    let q = &parry.quasi_greedy;
    let top = q.digit(1);
    let c = if q.prefix.is_empty() && q.period == [top, 0] {
        Compactum::markov(top)
    } else if q.prefix.len() == 1 && q.period.len() == 1 && q.period[0] + 1 == top {
        Compactum::sofic(top + 1)
    } else {
        return Err(Error::Internal(format!("unexpected quasi-greedy word {q}")));
    };
    // The compiled blocks must be exactly the blocks the local rule rejects.
    for blk in forbidden_blocks(&parry, 8) {
        if local_ok(&blk, &c) {
            return Err(Error::Internal(format!(
                "block {blk:?} escapes the local rule"
            )));
        }
    }
    Ok(c)
}

/// Tail tag of a word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// All zeros.
    Zero,
    /// `r, 0, r, 0, …` with the `r` next to the core.
    AltR0,
    /// `r−2` repeated.
    ConstR2,
}

impl Tail {
    fn name(self) -> &'static str {
        match self {
            Tail::Zero => "zero",
            Tail::AltR0 => "alt_r0",
            Tail::ConstR2 => "const_r2",
        }
    }

    /// Digit at distance `k ≥ 0` from the core.
    fn digit(self, k: usize, r: u32) -> u32 {
        match self {
            Tail::Zero => 0,
            Tail::AltR0 => {
                if k.is_multiple_of(2) {
                    r
                } else {
                    0
                }
            }
            Tail::ConstR2 => r - 2,
        }
    }
}

impl FromStr for Tail {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "zero" | "" => Ok(Tail::Zero),
            "alt_r0" => Ok(Tail::AltR0),
            "const_r2" => Ok(Tail::ConstR2),
            other => Err(Error::Invalid(format!("unknown tail {other:?}"))),
        }
    }
}

/// Two-sided digit sequence: `core[i]` sits at index `offset + i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SymWord {
    pub offset: i64,
    pub core: Vec<u32>,
    pub left_tail: Tail,
    pub right_tail: Tail,
}

impl SymWord {
    pub fn zero() -> Self {
        SymWord {
            offset: 0,
            core: Vec::new(),
            left_tail: Tail::Zero,
            right_tail: Tail::Zero,
        }
    }

    /// `u_k`: a single 1 at index `k`.
    pub fn unit(k: i64) -> Self {
        SymWord::finite(k, vec![1])
    }

    /// Finite word with zero tails.
    pub fn finite(offset: i64, core: Vec<u32>) -> Self {
        SymWord {
            offset,
            core,
            left_tail: Tail::Zero,
            right_tail: Tail::Zero,
        }
        .tidy()
    }

    pub fn is_finite(&self) -> bool {
        self.left_tail == Tail::Zero && self.right_tail == Tail::Zero
    }

    pub fn is_zero(&self) -> bool {
        self.is_finite() && self.core.iter().all(|&d| d == 0)
    }

    /// Index one past the last core digit.
    pub fn end(&self) -> i64 {
        self.offset + self.core.len() as i64
    }

    /// Digit at index `n`, tails included.
    pub fn digit(&self, n: i64, r: u32) -> u32 {
        if n < self.offset {
            self.left_tail.digit((self.offset - 1 - n) as usize, r)
        } else if n >= self.end() {
            self.right_tail.digit((n - self.end()) as usize, r)
        } else {
            self.core[(n - self.offset) as usize]
        }
    }

    /// Strips zeros next to zero tails.
    pub fn tidy(mut self) -> Self {
        if self.right_tail == Tail::Zero {
            while self.core.last() == Some(&0) {
                self.core.pop();
            }
        }
        if self.left_tail == Tail::Zero {
            let lead = self.core.iter().take_while(|&&d| d == 0).count();
            self.core.drain(..lead);
            self.offset += lead as i64;
        }
        if self.core.is_empty() && self.is_finite() {
            self.offset = 0;
        }
        self
    }

    /// The shift `(τε)_n = ε_{n+1}`; multiplies the value by λ.
    pub fn shift(&self) -> Self {
        self.shift_by(1)
    }

    pub fn shift_by(&self, k: i64) -> Self {
        let mut w = self.clone();
        if !w.core.is_empty() || !w.is_finite() {
            w.offset -= k;
        }
        w
    }
}

impl fmt::Display for SymWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("zero");
        }
        let core: Vec<String> = self.core.iter().map(|d| d.to_string()).collect();
        write!(
            f,
            "{}|{}|{} @{}",
            self.left_tail.name(),
            core.join(" "),
            self.right_tail.name(),
            self.offset
        )
    }
}

impl FromStr for SymWord {
    type Err = Error;
    /// Parses `"left|d d … d|right @offset"`, e.g. `"zero|1 0 1|zero @-1"`.
    /// The tails and the offset may be omitted (`"1 0 1"` means offset 0),
    /// and `"zero"` alone is the zero word.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("cannot parse word {s:?}"));
        let (body, offset) = match s.rsplit_once('@') {
            Some((b, o)) => (b, o.trim().parse::<i64>().map_err(|_| bad())?),
            None => (s, 0),
        };
        if body.trim() == "zero" {
            return Ok(SymWord::zero());
        }
        let parts: Vec<&str> = body.split('|').collect();
        let (left, core, right) = match parts.as_slice() {
            [c] => ("zero", *c, "zero"),
            [l, c, r] => (*l, *c, *r),
            _ => return Err(bad()),
        };
        let digits = core
            .split(|ch: char| ch.is_whitespace() || ch == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(SymWord {
            offset,
            core: digits,
            left_tail: left.parse()?,
            right_tail: right.parse()?,
        })
    }
}

/// Local rule on a finite block: alphabet plus the forbidden factors.
fn local_ok(block: &[u32], c: &Compactum) -> bool {
    if block.iter().any(|&d| d > c.digit_max) {
        return false;
    }
    let r = c.r;
    match c.kind {
        CompactumKind::Markov => block.windows(2).all(|p| p[0] != r || p[1] == 0),
        CompactumKind::MarkovReversed => block.windows(2).all(|p| p[1] != r || p[0] == 0),
        CompactumKind::Sofic => {
            // armed after r−1 followed only by r−2's
            let mut armed = false;
            for &d in block {
                if d == r - 1 {
                    if armed {
                        return false;
                    }
                    armed = true;
                } else if d != r - 2 {
                    armed = false;
                }
            }
            true
        }
    }
}

/// Digits of `w` over a window wide enough to show every tail pattern.
fn window(w: &SymWord, r: u32, pad: i64) -> Vec<u32> {
    (w.offset - pad..w.end() + pad)
        .map(|n| w.digit(n, r))
        .collect()
}

/// Whether `w` lies in the compactum `c`.
pub fn is_admissible(w: &SymWord, c: &Compactum) -> bool {
    if !c.tail_allowed(w.left_tail) || !c.tail_allowed(w.right_tail) {
        return false;
    }
    // Tails are periodic with period ≤ 2 and locally admissible on their own,
    // so a window of four tail digits on each side decides every factor.
    local_ok(&window(w, c.r, 4), c)
}

/// Admissibility decided directly from the lexicographic condition "every
/// tail (ε_n, ε_{n+1}, …) is at most d*(1)" (for the reversed compactum,
/// on the index-reversed word).
pub fn is_admissible_parry(w: &SymWord, c: &Compactum) -> Result<bool> {
    if !c.tail_allowed(w.left_tail) || !c.tail_allowed(w.right_tail) {
        return Ok(false);
    }
    if c.kind == CompactumKind::MarkovReversed {
        return is_admissible_parry(&reverse_map(w), &Compactum::markov(c.r));
    }
    let parry = parry_expansion(c.r, c.sigma())?;
    let q = &parry.quasi_greedy;
    if (w.offset - 4..w.end() + 4).any(|n| w.digit(n, c.r) > c.digit_max) {
        return Ok(false);
    }
    // Both sides are eventually periodic with period ≤ 2; comparing a
    // generous number of places decides the order.
    let horizon = w.core.len() as i64 + 16;
    for start in w.offset - 6..w.end() + 4 {
        for k in 0..horizon {
            let a = w.digit(start + k, c.r);
            let b = q.digit(k as usize + 1);
            if a < b {
                break;
            }
            if a > b {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// λ^e for the compactum base.
fn lam_pow(lambda: &QuadExt, e: i64) -> QuadExt {
    lambda.pow(e).expect("λ is a unit")
}

/// Exact value `Σ ε_n λ^{-n}` (for the reversed compactum `Σ ε_n λ^{n}`),
/// tails summed in closed form.
pub fn value(w: &SymWord, c: &Compactum) -> QuadExt {
    if c.kind == CompactumKind::MarkovReversed {
        return value(&reverse_map(w), &Compactum::markov(c.r));
    }
    let lambda = c.lambda();
    let inv = lambda.inv().unwrap();
    let mut acc = QuadExt::zero(lambda.d());
    let mut p = lam_pow(&lambda, -w.offset);
    for &d in &w.core {
        if d != 0 {
            acc = &acc + &p.mul_int(&d.into());
        }
        p = &p * &inv;
    }
    let j = w.end();
    acc = &acc
        + &match w.right_tail {
            Tail::Zero => QuadExt::zero(lambda.d()),
            Tail::AltR0 => lam_pow(&lambda, 1 - j),
            Tail::ConstR2 => &lam_pow(&lambda, 1 - j) - &lam_pow(&lambda, -j),
        };
    let j = w.offset - 1;
    acc = &acc
        + &match w.left_tail {
            Tail::Zero => QuadExt::zero(lambda.d()),
            Tail::AltR0 => -lam_pow(&lambda, -j - 1),
            Tail::ConstR2 => &lam_pow(&lambda, -j - 1) - &lam_pow(&lambda, -j),
        };
    acc
}

/// Index `n` with `λ^{-n} ≤ x < λ^{1-n}` for `x > 0`.
fn leading_index(x: &QuadExt, lambda: &QuadExt) -> i64 {
    let est = -(x.to_f64().ln() / lambda.to_f64().ln());
    let mut n = if est.is_finite() {
        est.ceil() as i64
    } else {
        0
    };
    loop {
        if lam_pow(lambda, -n) > *x {
            n += 1;
        } else if lam_pow(lambda, 1 - n) <= *x {
            n -= 1;
        } else {
            return n;
        }
    }
}

/// Greedy word of `x ≥ 0` in the (non-reversed) compactum `c`, starting no
/// earlier than the leading index. Sofic expansions may end in `(r−2)^∞`.
fn greedy_word(x: &QuadExt, c: &Compactum) -> Result<SymWord> {
    if x.is_zero() {
        return Ok(SymWord::zero());
    }
    let lambda = c.lambda();
    let n0 = leading_index(x, &lambda);
    // x·λ^{n0−1} ∈ [λ^{-1}, 1)
    let frac = x * &lam_pow(&lambda, n0 - 1);
    let ep = greedy_fraction(&frac, &lambda)?;
    if ep.period.is_empty() {
        return Ok(SymWord::finite(n0, ep.prefix));
    }
    if c.kind == CompactumKind::Sofic && ep.period.iter().all(|&d| d + 2 == c.r) {
        let w = SymWord {
            offset: n0,
            core: ep.prefix,
            left_tail: Tail::Zero,
            right_tail: Tail::ConstR2,
        };
        return Ok(w.tidy());
    }
    Err(Error::Internal(format!(
        "greedy expansion of {x} ends in the unsupported period {:?}",
        ep.period
    )))
}

/// The canonical word of value `v`: the greedy expansion for `v ≥ 0`, and
/// for `v < 0` the word with a left tail placed as far right as possible
/// followed by a greedy core.
pub fn word_of_value(v: &QuadExt, c: &Compactum) -> Result<SymWord> {
    if c.kind == CompactumKind::MarkovReversed {
        let w = word_of_value(v, &Compactum::markov(c.r))?;
        return Ok(reverse_map(&w));
    }
    if !v.is_negative() {
        return greedy_word(v, c);
    }
    let lambda = c.lambda();
    let mag = v.abs();
    // value of the left tail ending at j, as a positive magnitude
    let tail_mag = |j: i64| -> QuadExt {
        match c.kind {
            CompactumKind::Sofic => &lam_pow(&lambda, -j) - &lam_pow(&lambda, -j - 1),
            _ => lam_pow(&lambda, -j - 1),
        }
    };
    let mut j = leading_index(&mag, &lambda);
    while tail_mag(j) < mag {
        j -= 1;
    }
    while tail_mag(j + 1) >= mag {
        j += 1;
    }
    let rest = &tail_mag(j) - &mag;
    let core = greedy_word(&rest, c)?;
    let start = j + 1;
    let (core_digits, right_tail) = if core.is_zero() {
        (Vec::new(), Tail::Zero)
    } else {
        debug_assert!(core.offset >= start);
        let mut d = vec![0; (core.offset - start) as usize];
        d.extend(core.core);
        (d, core.right_tail)
    };
    let tail = match c.kind {
        CompactumKind::Sofic => Tail::ConstR2,
        _ => Tail::AltR0,
    };
    let w = SymWord {
        offset: start,
        core: core_digits,
        left_tail: tail,
        right_tail,
    };
    Ok(w.tidy())
}

/// Value-preserving admissible word for a finite raw sequence of
/// non-negative digits `raw[i]` at index `offset + i`.
pub fn normalize(offset: i64, raw: &[i64], c: &Compactum) -> Result<SymWord> {
    if raw.iter().any(|&d| d < 0) {
        return Err(Error::Invalid(
            "normalization needs non-negative digits".into(),
        ));
    }
    let w = SymWord {
        offset,
        core: raw
            .iter()
            .map(|&d| u32::try_from(d).map_err(|_| Error::Invalid(format!("digit {d} too large"))))
            .collect::<Result<_>>()?,
        left_tail: Tail::Zero,
        right_tail: Tail::Zero,
    };
    word_of_value(&value(&w, c), c)
}

/// Group sum: the canonical word of `value(w1) + value(w2)`.
pub fn word_add(w1: &SymWord, w2: &SymWord, c: &Compactum) -> Result<SymWord> {
    word_of_value(&(value(w1, c) + value(w2, c)), c)
}

/// Group inverse: the canonical word of `−value(w)`.
pub fn word_neg(w: &SymWord, c: &Compactum) -> Result<SymWord> {
    word_of_value(&-value(w, c), c)
}

/// Canonical representative of the identification class of `w`.
pub fn canonicalize_identified(w: &SymWord, c: &Compactum) -> Result<SymWord> {
    word_of_value(&value(w, c), c)
}

/// `w ⊕ u_k`; raises the value by exactly λ^{-k} (λ^{k} when reversed).
pub fn adic_step(w: &SymWord, k: i64, c: &Compactum) -> Result<SymWord> {
    word_add(w, &SymWord::unit(k), c)
}

/// Index reversal `ε_n ↦ ε_{-n}`.
pub fn reverse_map(w: &SymWord) -> SymWord {
    let mut core = w.core.clone();
    core.reverse();
    let offset = if core.is_empty() && w.is_finite() {
        0
    } else {
        1 - w.end()
    };
    SymWord {
        offset,
        core,
        left_tail: w.right_tail,
        right_tail: w.left_tail,
    }
}

/// Homoclinic words: both tails in the tail set allowed by the compactum.
pub fn is_homoclinic_word(w: &SymWord, c: &Compactum) -> bool {
    c.tail_allowed(w.left_tail) && c.tail_allowed(w.right_tail)
}


#[cfg(test)]
mod brute {
    use super::*;
    use proptest::prelude::*;

    /// All digit strings of length `n` over `0..=max`.
    fn strings(n: usize, max: u32) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..=max).map(move |d| {
                        let mut v = w.clone();
                        v.push(d);
                        v
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn local_rule_matches_parry_order() {
        for r in 1..=6u32 {
            let mut compacta = vec![Compactum::markov(r), Compactum::markov_reversed(r)];
            if r >= 3 {
                compacta.push(Compactum::sofic(r));
            }
            for c in compacta {
                let len = if r <= 3 { 8 } else { 5 };
                for n in 1..=len {
                    for s in strings(n, c.digit_max) {
                        let w = SymWord {
                            offset: 0,
                            core: s,
                            left_tail: Tail::Zero,
                            right_tail: Tail::Zero,
                        };
                        assert_eq!(
                            is_admissible(&w, &c),
                            is_admissible_parry(&w, &c).unwrap(),
                            "{c:?} {w}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn every_short_digit_string_normalizes() {
        for r in 1..=5u32 {
            let mut compacta = vec![Compactum::markov(r)];
            if r >= 3 {
                compacta.push(Compactum::sofic(r));
            }
            for c in compacta {
                for s in strings(5, c.digit_max) {
                    let raw: Vec<i64> = s.iter().map(|&d| d as i64).collect();
                    let w = normalize(-2, &raw, &c).unwrap();
                    assert!(is_admissible(&w, &c), "{c:?} {w}");
                    let orig = SymWord {
                        offset: -2,
                        core: s,
                        left_tail: Tail::Zero,
                        right_tail: Tail::Zero,
                    };
                    assert_eq!(value(&w, &c), value(&orig, &c));
                }
            }
        }
    }

    fn compactum() -> impl Strategy<Value = Compactum> {
        (1u32..7, 0u8..3).prop_map(|(r, k)| match k {
            0 => Compactum::markov(r),
            1 => Compactum::markov_reversed(r),
            _ => Compactum::sofic(r.max(3)),
        })
    }

    fn word_for(c: &Compactum) -> impl Strategy<Value = SymWord> {
        (-6i64..6, proptest::collection::vec(0..=c.digit_max, 0..8)).prop_map(|(o, digits)| {
            SymWord {
                offset: o,
                core: digits,
                left_tail: Tail::Zero,
                right_tail: Tail::Zero,
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn group_laws((c, a, b) in compactum().prop_flat_map(|c| (Just(c.clone()), word_for(&c), word_for(&c)))) {
            let a = canonicalize_identified(&a, &c).unwrap();
            let b = canonicalize_identified(&b, &c).unwrap();
            prop_assert!(is_admissible(&a, &c));
            let s = word_add(&a, &b, &c).unwrap();
            prop_assert!(is_admissible(&s, &c));
            prop_assert_eq!(&s, &word_add(&b, &a, &c).unwrap());
            let n = word_neg(&b, &c).unwrap();
            prop_assert!(is_admissible(&n, &c));
            prop_assert_eq!(word_add(&s, &n, &c).unwrap(), a.clone());
            prop_assert_eq!(value(&a.shift(), &c), value(&a, &c) * c.lambda().pow(if c.kind == CompactumKind::MarkovReversed { -1 } else { 1 }).unwrap());
            prop_assert_eq!(reverse_map(&reverse_map(&a)), a.clone());
            prop_assert_eq!(word_of_value(&value(&a, &c), &c).unwrap(), a);
        }
    }
}
