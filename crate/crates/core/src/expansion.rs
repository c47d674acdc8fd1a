//! q-expansions in exact rational arithmetic: evaluation of
//! `π_q(x) = Σ x_i q^-i`, greedy and quasi-greedy digits, the inverse map from
//! a quasi-greedy expansion to its base, and uniqueness tests.
//!
//! Bases are carried as [`BaseEnclosure`]s: rational intervals that remember
//! where they came from, so that bases defined as roots can be refined on
//! demand. For a root of an eventually periodic `α(q)` the defining integer
//! polynomial is known, which lets comparisons that land exactly on the root
//! be decided by an exact zero test instead of failing.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::digits::{compare_lex, lambda_prefix, Alphabet, EpSeq, Word};
use crate::error::{Error, Result};
use crate::poly::{eval_rational, gcd_rational, IntPoly};
use crate::rational::{certified_bits, format_ratio, int, pow2_neg, to_f64, Round};

/// Default maximum refinement of root enclosures, in bits of width.
pub const DEFAULT_MAX_BITS: u32 = 256;
/// Default width of freshly computed roots: `2^-40 < 10^-12`.
pub const DEFAULT_ROOT_BITS: u32 = 40;

/// Origin of a base enclosure; decides how it can be refined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSource {
    /// `lo == hi`, an exact rational.
    Exact,
    /// A user interval; cannot be refined.
    Interval,
    /// The unique base whose quasi-greedy expansion is the given sequence.
    AlphaRoot(EpSeq),
    /// The Komornik-Loreti constant of the alphabet.
    KomornikLoreti(Alphabet),
}

/// A base `q > 1` known to lie in the closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseEnclosure {
    lo: BigRational,
    hi: BigRational,
    source: BaseSource,
    max_bits: u32,
}

impl BaseEnclosure {
    pub fn exact(q: BigRational) -> Result<Self> {
        if q <= int(1) {
            return Err(Error::InvalidBase(format!("{} is not > 1", format_ratio(&q))));
        }
        Ok(BaseEnclosure { lo: q.clone(), hi: q, source: BaseSource::Exact, max_bits: DEFAULT_MAX_BITS })
    }

    pub fn interval(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo == hi {
            return Self::exact(lo);
        }
        if lo <= int(1) || lo > hi {
            return Err(Error::InvalidBase(format!("[{}, {}]", format_ratio(&lo), format_ratio(&hi))));
        }
        Ok(BaseEnclosure { lo, hi, source: BaseSource::Interval, max_bits: DEFAULT_MAX_BITS })
    }

    pub fn with_max_bits(mut self, bits: u32) -> Self {
        self.max_bits = bits;
        self
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn source(&self) -> &BaseSource {
        &self.source
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn lo_f64(&self) -> f64 {
        to_f64(&self.lo, Round::Down)
    }

    pub fn hi_f64(&self) -> f64 {
        to_f64(&self.hi, Round::Up)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Certified binary digits of the enclosure width.
    pub fn bits(&self) -> u32 {
        certified_bits(&self.width())
    }

    /// Roughly doubles the precision; `None` when the enclosure cannot be
    /// refined further.
    pub fn refine(&self) -> Option<BaseEnclosure> {
        let b = self.bits();
        if self.is_exact() || b >= self.max_bits {
            return None;
        }
        self.refine_to(b.saturating_mul(2).max(b + 16).min(self.max_bits))
    }

    /// Refines until the width is at most `2^-bits`.
    pub fn refine_to(&self, bits: u32) -> Option<BaseEnclosure> {
        if self.is_exact() || self.bits() >= bits {
            return Some(self.clone());
        }
        let (lo, hi) = match &self.source {
            BaseSource::Exact | BaseSource::Interval => return None,
            BaseSource::AlphaRoot(s) => {
                let p = defining_poly(s);
                bisect(self.lo.clone(), self.hi.clone(), bits, |x| Some(p.sign_at(x)))?
            }
            BaseSource::KomornikLoreti(a) => {
                let a = *a;
                bisect(self.lo.clone(), self.hi.clone(), bits, |x| kl_side(a, x))?
            }
        };
        Some(BaseEnclosure { lo, hi, source: self.source.clone(), max_bits: self.max_bits })
    }

    /// The quasi-greedy expansion of the base, when it is known exactly as an
    /// eventually periodic sequence over `alphabet`.
    pub fn known_alpha(&self, alphabet: Alphabet) -> Option<EpSeq> {
        match &self.source {
            BaseSource::AlphaRoot(s) => {
                EpSeq::from_digits(alphabet, s.preperiod().to_vec(), s.period().to_vec()).ok()
            }
            BaseSource::Exact if self.lo.is_integer() => {
                let k = self.lo.to_integer();
                if k <= BigInt::from(alphabet.size()) {
                    let d = u8::try_from(k - 1).ok()?;
                    EpSeq::constant(alphabet, d).ok()
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for BaseEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_ratio(&self.lo), format_ratio(&self.hi))
    }
}

/// Bisection on `[lo, hi]` for a root characterized by `side(x)`, which
/// returns the position of `x` relative to the root (`Less`: `x` below the
/// root) or `None` when undecided at `x`.
fn bisect(
    mut lo: BigRational,
    mut hi: BigRational,
    bits: u32,
    side: impl Fn(&BigRational) -> Option<Ordering>,
) -> Option<(BigRational, BigRational)> {
    let eps = pow2_neg(bits);
    let one = int(1);
    while &hi - &lo > eps || lo <= one {
        let w = &hi - &lo;
        let mut moved = false;
        for (n, d) in [(1, 2), (3, 8), (5, 8), (1, 4), (3, 4)] {
            let x = &lo + &w * BigRational::new(BigInt::from(n), BigInt::from(d));
            match side(&x) {
                Some(Ordering::Less) => lo = x,
                Some(Ordering::Greater) => hi = x,
                Some(Ordering::Equal) => return Some((x.clone(), x)),
                None => continue,
            }
            moved = true;
            break;
        }
        if !moved {
            return None;
        }
    }
    Some((lo, hi))
}

/// Position of `x` relative to `q_KL`, from partial sums of `λ` with a tail
/// bound; `None` if 2048 digits do not decide it.
fn kl_side(alphabet: Alphabet, x: &BigRational) -> Option<Ordering> {
    let (a, b) = (x.numer(), x.denom());
    if a <= b {
        return Some(Ordering::Less);
    }
    let lambda = lambda_prefix(alphabet, 2048);
    let m = BigInt::from(alphabet.max());
    let mut n = 64;
    while n <= 2048 {
        let mut s = BigInt::zero();
        let mut an = BigInt::one();
        let mut bp = BigInt::one();
        for &d in &lambda.digits()[..n] {
            bp *= b;
            s = s * a + BigInt::from(d) * &bp;
            an *= a;
        }
        // π_x(λ_1..λ_n) = s / a^n; the tail is at most M b^(n+1) / (a^n (a-b)).
        if s > an {
            return Some(Ordering::Less);
        }
        let ab = a - b;
        if &s * &ab + &m * bp * b < an * ab {
            return Some(Ordering::Greater);
        }
        n *= 2;
    }
    None
}

pub(crate) fn kl_enclosure(alphabet: Alphabet, bits: u32) -> BaseEnclosure {
    let start = BaseEnclosure {
        lo: int(1),
        hi: int(alphabet.size() as i64),
        source: BaseSource::KomornikLoreti(alphabet),
        max_bits: DEFAULT_MAX_BITS.max(bits),
    };
    let (lo, hi) = bisect(start.lo.clone(), start.hi.clone(), bits, |x| kl_side(alphabet, x))
        .expect("q_KL is irrational, so bisection always decides");
    BaseEnclosure { lo, hi, ..start }
}

/// A closed rational interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

/// `π_q(w 0^∞)` for an exact rational `q`.
pub fn pi_word_exact(digits: &[u8], q: &BigRational) -> BigRational {
    let (a, b) = (q.numer(), q.denom());
    let mut s = BigInt::zero();
    let mut an = BigInt::one();
    let mut bp = BigInt::one();
    for &d in digits {
        bp *= b;
        s = s * a + BigInt::from(d) * &bp;
        an *= a;
    }
    BigRational::new(s, an)
}

/// `π_q(seq)` for an exact rational `q`, by the closed-form geometric sum.
pub fn pi_exact(seq: &EpSeq, q: &BigRational) -> BigRational {
    let (a, b) = (q.numer(), q.denom());
    let horner = |digits: &[u8]| {
        let mut s = BigInt::zero();
        let mut an = BigInt::one();
        let mut bp = BigInt::one();
        for &d in digits {
            bp *= b;
            s = s * a + BigInt::from(d) * &bp;
            an *= a;
        }
        (s, an, bp)
    };
    let (u, ap, bp) = horner(seq.preperiod());
    let (v, am, bm) = horner(seq.period());
    let head = BigRational::new(u, ap.clone());
    if v.is_zero() {
        return head;
    }
    head + BigRational::new(bp * v, ap * (am - bm))
}

/// Enclosure of `π_q(seq)`; exact when `q` is.
pub fn pi_value(seq: &EpSeq, q: &BaseEnclosure) -> RatInterval {
    RatInterval { lo: pi_exact(seq, q.hi()), hi: pi_exact(seq, q.lo()) }
}

/// Enclosure of `π_q(w 0^∞)`.
pub fn pi_word(w: &Word, q: &BaseEnclosure) -> RatInterval {
    RatInterval { lo: pi_word_exact(w.digits(), q.hi()), hi: pi_word_exact(w.digits(), q.lo()) }
}

/// Enclosure of `π_q(x)` over all sequences `x` beginning with `w`: the
/// unknown tail contributes `[0, M q^-n / (q - 1)]`.
pub fn pi_prefix(w: &Word, q: &BaseEnclosure) -> RatInterval {
    let ql = q.lo();
    let qn = (0..w.len()).fold(int(1), |acc, _| acc * ql);
    let tail = int(w.alphabet().max() as i64) / (qn * (ql - int(1)));
    let base = pi_word(w, q);
    RatInterval { lo: base.lo, hi: base.hi + tail }
}

/// Monic integer polynomial whose unique root in `(1, ∞)` is the base with
/// quasi-greedy expansion (or any expansion of 1) equal to `seq`.
pub fn defining_poly(seq: &EpSeq) -> IntPoly {
    let p = seq.preperiod().len();
    let m = seq.period().len();
    let u = IntPoly::from_digits(seq.preperiod());
    let v = IntPoly::from_digits(seq.period());
    let qm = IntPoly::monomial(m).sub(&IntPoly::monomial(0));
    IntPoly::monomial(p).mul(&qm).sub(&u.mul(&qm)).sub(&v)
}

/// Numerator polynomial `S` with `sign(π_q(seq) - t) = sign(S(q))` for `q > 1`.
fn difference_poly(seq: &EpSeq, t: &BigRational) -> IntPoly {
    let p = seq.preperiod().len();
    let m = seq.period().len();
    let u = IntPoly::from_digits(seq.preperiod());
    let v = IntPoly::from_digits(seq.period());
    let qm = IntPoly::monomial(m).sub(&IntPoly::monomial(0));
    let lhs = u.mul(&qm).add(&v).scale(t.denom());
    let rhs = IntPoly::monomial(p).mul(&qm).scale(t.numer());
    lhs.sub(&rhs)
}

/// Whether `π_q(seq) = t` at the root `q` of `defining_poly(def)` lying in
/// the open interval `(lo, hi)`.
fn exact_zero(def: &EpSeq, seq: &EpSeq, t: &BigRational, lo: &BigRational, hi: &BigRational) -> bool {
    let p = defining_poly(def);
    let r = difference_poly(seq, t).rem_monic(&p);
    if r.is_zero() {
        return true;
    }
    let g = gcd_rational(&r, &p);
    if g.len() <= 1 {
        return false;
    }
    let (glo, ghi) = (eval_rational(&g, lo), eval_rational(&g, hi));
    glo.signum() * ghi.signum() < BigRational::zero()
}

/// Compares `π_q(seq)` with `t`, refining `q` in place when needed.
fn cmp_pi_in(q: &mut BaseEnclosure, seq: &EpSeq, t: &BigRational) -> Result<Ordering> {
    if seq.ends_in_zeros() && seq.preperiod().iter().all(|&d| d == 0) {
        return Ok(BigRational::zero().cmp(t));
    }
    loop {
        if q.is_exact() {
            return Ok(pi_exact(seq, q.lo()).cmp(t));
        }
        if pi_exact(seq, q.hi()) > *t {
            return Ok(Ordering::Greater);
        }
        if pi_exact(seq, q.lo()) < *t {
            return Ok(Ordering::Less);
        }
        if let BaseSource::AlphaRoot(def) = q.source() {
            if exact_zero(def, seq, t, q.lo(), q.hi()) {
                return Ok(Ordering::Equal);
            }
        }
        *q = q.refine().ok_or(Error::PrecisionExhausted)?;
    }
}

/// Exact three-way comparison of `π_q(seq)` with `t` at the true base.
pub fn cmp_pi(q: &BaseEnclosure, seq: &EpSeq, t: &BigRational) -> Result<Ordering> {
    cmp_pi_in(&mut q.clone(), seq, t)
}

fn check_base(alphabet: Alphabet, q: &BaseEnclosure) -> Result<()> {
    if *q.hi() > int(alphabet.size() as i64) {
        return Err(Error::InvalidBase(format!("{q} is not inside (1, {}]", alphabet.size())));
    }
    Ok(())
}

/// Largest digit allowed by the remainder bound `v` at one endpoint.
fn digit_bound(v: &BigRational, strict: bool, max: u8) -> Option<u8> {
    let c = if strict {
        if !v.is_positive() {
            return None;
        }
        v.ceil().to_integer() - 1
    } else {
        if v.is_negative() {
            return None;
        }
        v.floor().to_integer()
    };
    Some(if c >= BigInt::from(max) { max } else { u8::try_from(c).unwrap_or(0) })
}

/// The first `n` digits `d_k = max{c : π_q(d_1..d_{k-1} c) R t}` with `R`
/// being `<` (strict) or `<=`.
fn search_digits(alphabet: Alphabet, q: &mut BaseEnclosure, t: &BigRational, strict: bool, n: usize) -> Result<Vec<u8>> {
    let max = alphabet.max();
    let mut digits: Vec<u8> = Vec::with_capacity(n);
    let remainder = |q: &BigRational, digits: &[u8]| {
        digits.iter().fold(t.clone(), |r, &d| q * r - int(d as i64))
    };
    let mut r_lo = t.clone();
    let mut r_hi = t.clone();
    for _ in 0..n {
        let d_lo = digit_bound(&(q.lo() * &r_lo), strict, max).unwrap_or(0);
        let d_hi = digit_bound(&(q.hi() * &r_hi), strict, max).unwrap_or(0).max(d_lo);
        let mut d = d_lo;
        let mut refined = false;
        for c in (d_lo + 1..=d_hi).rev() {
            let mut pre = digits.clone();
            pre.push(c);
            let cand = EpSeq::from_digits(alphabet, pre, vec![0])?;
            let before = q.bits();
            let ord = cmp_pi_in(q, &cand, t)?;
            refined |= q.bits() != before;
            if if strict { ord == Ordering::Less } else { ord != Ordering::Greater } {
                d = c;
                break;
            }
        }
        digits.push(d);
        if refined {
            r_lo = remainder(q.lo(), &digits);
            r_hi = remainder(q.hi(), &digits);
        } else {
            r_lo = q.lo() * r_lo - int(d as i64);
            r_hi = q.hi() * r_hi - int(d as i64);
        }
    }
    Ok(digits)
}

/// First `n` digits of the quasi-greedy expansion `α(q)` of 1.
pub fn quasi_greedy_alpha(alphabet: Alphabet, q: &BaseEnclosure, n: usize) -> Result<Word> {
    check_base(alphabet, q)?;
    if let Some(s) = q.known_alpha(alphabet) {
        return Ok(s.prefix(n));
    }
    if q.source() == &BaseSource::KomornikLoreti(alphabet) {
        return Ok(lambda_prefix(alphabet, n));
    }
    let mut q = q.clone();
    let digits = search_digits(alphabet, &mut q, &int(1), true, n)?;
    Word::new(alphabet, digits)
}

/// First `n` digits of the greedy expansion of `x`.
pub fn greedy_expansion(alphabet: Alphabet, x: &BigRational, q: &BaseEnclosure, n: usize) -> Result<Word> {
    check_base(alphabet, q)?;
    let mut q = q.clone();
    check_point(alphabet, &mut q, x)?;
    let digits = search_digits(alphabet, &mut q, x, false, n)?;
    Word::new(alphabet, digits)
}

/// Verifies `0 <= x <= M/(q-1)`; returns the comparison of `x` with the
/// right endpoint.
fn check_point(alphabet: Alphabet, q: &mut BaseEnclosure, x: &BigRational) -> Result<Ordering> {
    if x.is_negative() {
        return Err(Error::InvalidArgument("x must be nonnegative".into()));
    }
    let top = EpSeq::constant(alphabet, alphabet.max())?;
    match cmp_pi_in(q, &top, x)? {
        Ordering::Less => Err(Error::InvalidArgument(format!("x = {} exceeds M/(q-1)", format_ratio(x)))),
        Ordering::Equal => Ok(Ordering::Equal),
        Ordering::Greater => Ok(Ordering::Less),
    }
}

/// Whether `seq` is the quasi-greedy expansion of some base in `(1, M+1]`.
pub fn is_admissible_alpha(seq: &EpSeq) -> bool {
    let max = seq.alphabet().max();
    !seq.ends_in_zeros()
        && (1..=seq.shift_count())
            .all(|n| seq.digit(n - 1) == max || compare_lex(&seq.shift(n), seq) != Ordering::Greater)
}

/// The base `q` with `α(q) = seq`, to width `2^-40`.
pub fn base_from_alpha(seq: &EpSeq) -> Result<BaseEnclosure> {
    base_from_alpha_bits(seq, DEFAULT_ROOT_BITS)
}

/// The base `q` with `α(q) = seq`, to width `2^-bits`.
pub fn base_from_alpha_bits(seq: &EpSeq, bits: u32) -> Result<BaseEnclosure> {
    if !is_admissible_alpha(seq) {
        return Err(Error::NotAdmissible);
    }
    let p = defining_poly(seq);
    let top = seq.alphabet().size() as i64;
    // A monic integer polynomial has only integer rational roots.
    for k in 2..=top {
        if p.eval_int(&BigInt::from(k)).is_zero() {
            return BaseEnclosure::exact(int(k));
        }
    }
    let source = BaseSource::AlphaRoot(seq.clone());
    let (lo, hi) = bisect(int(1), int(top), bits, |x| Some(p.sign_at(x))).ok_or(Error::PrecisionExhausted)?;
    Ok(BaseEnclosure { lo, hi, source, max_bits: DEFAULT_MAX_BITS.max(bits) })
}

/// Three-valued membership verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Yes,
    No,
    UndecidedAtDepth(usize),
}

/// Membership of `q` in the set of univoque bases.
pub fn in_univoque_bases(alphabet: Alphabet, q: &BaseEnclosure, depth: usize) -> Membership {
    univoque_membership(alphabet, q, depth, false)
}

/// Membership of `q` in the closure of the set of univoque bases.
pub fn in_closure_univoque(alphabet: Alphabet, q: &BaseEnclosure, depth: usize) -> Membership {
    univoque_membership(alphabet, q, depth, true)
}

fn univoque_membership(alphabet: Alphabet, q: &BaseEnclosure, depth: usize, closure: bool) -> Membership {
    let top = int(alphabet.size() as i64);
    if *q.lo() > top {
        return Membership::No;
    }
    if *q.hi() > top {
        return Membership::UndecidedAtDepth(0);
    }
    if q.is_exact() && *q.lo() == top {
        return Membership::Yes;
    }
    if let Some(a) = q.known_alpha(alphabet) {
        let low = a.reflect();
        let ok = (1..=a.shift_count()).all(|n| {
            let s = a.shift(n);
            let right = compare_lex(&s, &a);
            compare_lex(&low, &s) == Ordering::Less
                && if closure { right != Ordering::Greater } else { right == Ordering::Less }
        });
        return if ok { Membership::Yes } else { Membership::No };
    }
    let Ok(prefix) = quasi_greedy_alpha(alphabet, q, depth) else {
        return Membership::UndecidedAtDepth(depth);
    };
    let a = prefix.digits();
    let max = alphabet.max();
    for n in 1..a.len() {
        let tail = &a[n..];
        let head = &a[..a.len() - n];
        if tail > head {
            return Membership::No;
        }
        let low: Vec<u8> = head.iter().map(|d| max - d).collect();
        if tail < &low[..] {
            return Membership::No;
        }
    }
    Membership::UndecidedAtDepth(depth)
}

/// Outcome of a depth-bounded uniqueness test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpansionVerdict {
    /// `x` is `0` or `M/(q-1)`, whose expansions are constant.
    Trivial,
    /// Exactly one expansion prefix of the given length extends to an expansion.
    UniqueToDepth(usize),
    /// At `position` (1-based) both digits of the pair extend to expansions.
    NotUnique { position: usize, digits: (u8, u8) },
}

impl ExpansionVerdict {
    pub fn is_unique(&self) -> bool {
        !matches!(self, ExpansionVerdict::NotUnique { .. })
    }
}

/// Decides whether `x` has a unique `q`-expansion up to `depth` digits.
///
/// Follows the greedy expansion and checks at each position whether the next
/// smaller digit still leaves `x` reachable, which is the digit-local form of
/// the lexicographic characterization of unique expansions.
pub fn is_unique_expansion(alphabet: Alphabet, x: &BigRational, q: &BaseEnclosure, depth: usize) -> Result<ExpansionVerdict> {
    check_base(alphabet, q)?;
    let mut q = q.clone();
    if x.is_zero() || check_point(alphabet, &mut q, x)? == Ordering::Equal {
        return Ok(ExpansionVerdict::Trivial);
    }
    let greedy = search_digits(alphabet, &mut q, x, false, depth)?;
    for n in 0..depth {
        let d = greedy[n];
        if d == 0 {
            continue;
        }
        let mut pre = greedy[..n].to_vec();
        pre.push(d - 1);
        let lower = EpSeq::from_digits(alphabet, pre, vec![alphabet.max()])?;
        if cmp_pi_in(&mut q, &lower, x)? != Ordering::Less {
            return Ok(ExpansionVerdict::NotUnique { position: n + 1, digits: (d, d - 1) });
        }
    }
    Ok(ExpansionVerdict::UniqueToDepth(depth))
}

fn feasible_digits(max: u8, q: &BigRational, r: &BigRational, top: &BigRational) -> std::ops::RangeInclusive<u8> {
    let v = q * r;
    let hi = v.floor().to_integer().min(BigInt::from(max));
    let lo = (&v - top).ceil().to_integer().max(BigInt::zero());
    if lo > hi {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    u8::try_from(lo).unwrap()..=u8::try_from(hi).unwrap()
}

fn check_count_args(alphabet: Alphabet, x: &BigRational, q: &BigRational) -> Result<BigRational> {
    if *q <= int(1) || *q > int(alphabet.size() as i64) {
        return Err(Error::InvalidBase(format_ratio(q)));
    }
    let top = int(alphabet.max() as i64) / (q - int(1));
    if x.is_negative() || *x > top {
        return Err(Error::InvalidArgument(format!("x = {} outside [0, M/(q-1)]", format_ratio(x))));
    }
    Ok(top)
}

/// Number of length-`depth` words that extend to a `q`-expansion of `x`.
/// Brute force over remainders; exponential in general.
pub fn count_expansions(alphabet: Alphabet, x: &BigRational, q: &BigRational, depth: usize) -> Result<BigUint> {
    let top = check_count_args(alphabet, x, q)?;
    let mut level: HashMap<BigRational, BigUint> = HashMap::from([(x.clone(), BigUint::one())]);
    for _ in 0..depth {
        let mut next: HashMap<BigRational, BigUint> = HashMap::new();
        for (r, k) in level {
            for d in feasible_digits(alphabet.max(), q, &r, &top) {
                *next.entry(q * &r - int(d as i64)).or_default() += &k;
            }
        }
        level = next;
    }
    Ok(level.into_values().sum())
}

/// `min(count_expansions(..), cap)` by depth-first search that stops at `cap`.
pub fn count_expansions_capped(alphabet: Alphabet, x: &BigRational, q: &BigRational, depth: usize, cap: u64) -> Result<u64> {
    let top = check_count_args(alphabet, x, q)?;
    let mut count = 0u64;
    let mut stack = vec![(x.clone(), 0usize)];
    while let Some((r, k)) = stack.pop() {
        if k == depth {
            count += 1;
            if count >= cap {
                return Ok(cap);
            }
            continue;
        }
        for d in feasible_digits(alphabet.max(), q, &r, &top) {
            stack.push((q * &r - int(d as i64), k + 1));
        }
    }
    Ok(count)
}
