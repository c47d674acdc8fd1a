//! Entropy plateaus and the bifurcation set.
//!
//! The entropy `H(q)` of the univoque set is a Devil's staircase whose flat
//! pieces `[p_L, p_R]` are determined by periodic quasi-greedy expansions
//! `α(p_L) = (a_1...a_m)^∞` satisfying an irreducibility condition. This module
//! builds those plateaus, enumerates them by period, and classifies bases.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::digits::{compare_lex, lambda_prefix, xi, xi_block_len, Alphabet, EpSeq, Word};
use crate::error::{Error, Rejection, Result};
use crate::expansion::{
    base_from_alpha, in_univoque_bases, kl_enclosure, pi_exact, quasi_greedy_alpha, BaseEnclosure, Membership,
    DEFAULT_ROOT_BITS,
};
use crate::rational::{certified_bits, format_decimal, int, Round};
use crate::subshift::{build_window_sft, EntropyBounds};

/// Enclosure of the Komornik-Loreti constant `q_KL(M)` of width `<= 2^-bits`.
pub fn q_kl(alphabet: Alphabet, bits: u32) -> BaseEnclosure {
    static MEMO: OnceLock<Mutex<HashMap<(u8, u32), BaseEnclosure>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(q) = memo.lock().unwrap_or_else(|e| e.into_inner()).get(&(alphabet.max(), bits)) {
        return q.clone();
    }
    let q = kl_enclosure(alphabet, bits);
    memo.lock().unwrap_or_else(|e| e.into_inner()).insert((alphabet.max(), bits), q.clone());
    q
}

/// Bits needed for an enclosure of width at most `width`.
pub fn bits_for_width(width: &BigRational) -> Result<u32> {
    if *width <= int(0) {
        return Err(Error::InvalidArgument("width must be positive".into()));
    }
    Ok(certified_bits(width))
}

/// `α(q_T)`: `(k+1)k^∞` for `M = 2k`, `(k+1)((k+1)k)^∞` for `M = 2k+1`.
pub fn alpha_qt(alphabet: Alphabet) -> EpSeq {
    let k = alphabet.max() / 2;
    let s = if alphabet.max().is_multiple_of(2) {
        EpSeq::from_digits(alphabet, vec![k + 1], vec![k])
    } else {
        EpSeq::from_digits(alphabet, vec![k + 1], vec![k + 1, k])
    };
    s.expect("digits within the alphabet")
}

/// Enclosure of `q_T(M)`, the base where `V_q` becomes transitive.
pub fn q_t(alphabet: Alphabet, bits: u32) -> BaseEnclosure {
    crate::expansion::base_from_alpha_bits(&alpha_qt(alphabet), bits).expect("α(q_T) is admissible")
}

/// Membership in `V`: `reflect(a) ≼ σⁿ(a) ≼ a` for all `n >= 0`.
pub fn is_in_v(seq: &EpSeq) -> bool {
    let low = seq.reflect();
    (0..seq.shift_count()).all(|n| {
        let s = seq.shift(n);
        compare_lex(&low, &s) != Ordering::Greater && compare_lex(&s, seq) != Ordering::Greater
    })
}

/// Compares a periodic sequence with `λ = α(q_KL)`.
pub fn compare_with_lambda(seq: &EpSeq) -> Ordering {
    let mut n = 64;
    while n <= 1 << 20 {
        let lambda = lambda_prefix(seq.alphabet(), n);
        if let Some(i) = (0..n).find(|&i| seq.digit(i) != lambda.digits()[i]) {
            return seq.digit(i).cmp(&lambda.digits()[i]);
        }
        n *= 4;
    }
    Ordering::Equal
}

fn require_periodic_in_v(seq: &EpSeq) -> Result<()> {
    if !seq.is_purely_periodic() {
        return Err(Error::InvalidArgument("sequence must be purely periodic".into()));
    }
    if !is_in_v(seq) {
        return Err(Error::NotInV);
    }
    Ok(())
}

/// The irreducibility comparisons for `j` in `from..=to`: whenever
/// `(a_1...a_j^-)^∞ ∈ V`, require `a_1...a_j (plus(reflect(a_1...a_j)))^∞ ≺ seq`.
fn j_checks_hold(seq: &EpSeq, from: usize, to: usize) -> bool {
    (from..=to).all(|j| {
        let prefix = seq.prefix(j);
        let Ok(minus) = prefix.minus() else { return true };
        if !is_in_v(&EpSeq::periodic(&minus).expect("nonempty")) {
            return true;
        }
        let tail = prefix.reflect().plus().expect("last digit of prefix is positive");
        let bound = EpSeq::new(&prefix, &tail).expect("same alphabet");
        compare_lex(&bound, seq) == Ordering::Less
    })
}

/// Irreducibility of a purely periodic sequence, checking `j <= m` where `m`
/// is the minimal period.
pub fn is_irreducible(seq: &EpSeq) -> Result<bool> {
    is_irreducible_upto(seq, seq.period().len())
}

/// Irreducibility with the `j` checks running up to `j_max`.
pub fn is_irreducible_upto(seq: &EpSeq, j_max: usize) -> Result<bool> {
    require_periodic_in_v(seq)?;
    Ok(j_checks_hold(seq, 1, j_max))
}

/// The `n` with `ξ(n+1) ≼ seq ≺ ξ(n)`.
pub fn xi_bracket(seq: &EpSeq) -> Result<u32> {
    let a = seq.alphabet();
    if compare_lex(seq, &xi(a, 1)) != Ordering::Less || compare_with_lambda(seq) != Ordering::Greater {
        return Err(Error::NotInRange);
    }
    (1..24).find(|&n| compare_lex(seq, &xi(a, n + 1)) != Ordering::Less).ok_or(Error::NotInRange)
}

/// `*`-irreducibility: `Some(n)` with the bracketing index `n` when the
/// sequence is `*`-irreducible, `None` when it is not.
pub fn is_star_irreducible(seq: &EpSeq) -> Result<Option<u32>> {
    is_star_irreducible_upto(seq, seq.period().len())
}

pub fn is_star_irreducible_upto(seq: &EpSeq, j_max: usize) -> Result<Option<u32>> {
    require_periodic_in_v(seq)?;
    let n = xi_bracket(seq)?;
    let from = xi_block_len(seq.alphabet(), n + 1) + 1;
    Ok(j_checks_hold(seq, from, j_max).then_some(n))
}

/// Which characterization a plateau's left endpoint satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlateauKind {
    Irreducible,
    StarIrreducible(u32),
}

impl std::fmt::Display for PlateauKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlateauKind::Irreducible => f.write_str("irreducible"),
            PlateauKind::StarIrreducible(n) => write!(f, "star-irreducible({n})"),
        }
    }
}

/// An entropy plateau `[p_L, p_R]` together with the interior point `p̂_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Plateau {
    pub generator: Word,
    pub p_l: BaseEnclosure,
    pub p_hat: BaseEnclosure,
    pub p_r: BaseEnclosure,
    pub alpha_l: EpSeq,
    pub alpha_hat: EpSeq,
    pub alpha_r: EpSeq,
    pub entropy: EntropyBounds,
    pub kind: PlateauKind,
}

impl Plateau {
    /// Certified `p_L <= q <= p_R`.
    pub fn contains(&self, q: &BaseEnclosure) -> bool {
        self.p_l.hi() <= q.lo() && q.hi() <= self.p_r.lo()
    }
}

/// Validates a generator: returns its periodization and kind.
pub fn check_generator(gen: &Word) -> Result<(EpSeq, PlateauKind)> {
    let reject = |r| Err(Error::NotAPlateauGenerator(r));
    if gen.is_empty() {
        return reject(Rejection::Inadmissible);
    }
    let seq = EpSeq::periodic(gen)?;
    let max = gen.alphabet().max();
    if seq.period().last() == Some(&max) || !crate::expansion::is_admissible_alpha(&seq) || !is_in_v(&seq) {
        return reject(Rejection::Inadmissible);
    }
    if compare_with_lambda(&seq) != Ordering::Greater {
        return reject(Rejection::BelowKl);
    }
    let kind = if compare_lex(&seq, &xi(gen.alphabet(), 1)) != Ordering::Less {
        is_irreducible(&seq)?.then_some(PlateauKind::Irreducible)
    } else {
        is_star_irreducible(&seq)?.map(PlateauKind::StarIrreducible)
    };
    match kind {
        Some(k) => Ok((seq, k)),
        None => reject(Rejection::Reducible),
    }
}

/// The plateau whose left endpoint has `α(p_L) = gen^∞`.
pub fn plateau_from_generator(gen: &Word) -> Result<Plateau> {
    let (seq, kind) = check_generator(gen)?;
    build_plateau(seq, kind)
}

fn build_plateau(alpha_l: EpSeq, kind: PlateauKind) -> Result<Plateau> {
    let generator = alpha_l.period_word();
    let plus = generator.plus()?;
    let alpha_r = EpSeq::new(&plus, &generator.reflect())?;
    let alpha_hat = EpSeq::periodic(&plus.concat(&plus.reflect())?)?;
    let entropy = build_window_sft(&generator, false)?.entropy();
    Ok(Plateau {
        p_l: base_from_alpha(&alpha_l)?,
        p_hat: base_from_alpha(&alpha_hat)?,
        p_r: base_from_alpha(&alpha_r)?,
        generator,
        alpha_l,
        alpha_hat,
        alpha_r,
        entropy,
        kind,
    })
}

/// All plateaus with generator period `<= max_period` and `q_lo < p_L <= q_hi`,
/// sorted by `p_L`.
pub fn enumerate_plateaus(alphabet: Alphabet, q_lo: &BigRational, q_hi: &BigRational, max_period: usize) -> Result<Vec<Plateau>> {
    let top = int(alphabet.size() as i64);
    let q_hi = if *q_hi > top { top.clone() } else { q_hi.clone() };
    if *q_lo >= q_hi || max_period == 0 {
        return Ok(Vec::new());
    }
    let kl_lo = q_kl(alphabet, DEFAULT_ROOT_BITS).lo().clone();
    let q_lo = if *q_lo < kl_lo { kl_lo } else { q_lo.clone() };
    let upper = quasi_greedy_alpha(alphabet, &BaseEnclosure::exact(q_hi.clone())?, max_period)?;
    let lower = quasi_greedy_alpha(alphabet, &BaseEnclosure::exact(q_lo.clone())?, max_period)?;
    let lambda = lambda_prefix(alphabet, max_period);
    let bounds = PrefixBounds { upper: upper.digits(), lower: lower.digits(), lambda: lambda.digits(), max: alphabet.max() };

    let mut found = Vec::new();
    let mut stack: Vec<Vec<u8>> = (0..=alphabet.max()).rev().map(|d| vec![d]).collect();
    while let Some(w) = stack.pop() {
        if !bounds.admits(&w) {
            continue;
        }
        if let Some(p) = candidate(alphabet, &w, &q_lo, &q_hi)? {
            found.push(p);
        }
        if w.len() < max_period {
            for d in (0..=alphabet.max()).rev() {
                let mut next = w.clone();
                next.push(d);
                stack.push(next);
            }
        }
    }
    found.sort_by(|a, b| a.p_l.lo().cmp(b.p_l.lo()));
    for pair in found.windows(2) {
        debug_assert!(pair[0].p_r.hi() < pair[1].p_l.lo(), "plateaus must be disjoint");
    }
    Ok(found)
}

struct PrefixBounds<'a> {
    upper: &'a [u8],
    lower: &'a [u8],
    lambda: &'a [u8],
    max: u8,
}

impl PrefixBounds<'_> {
    /// Necessary conditions on a prefix `w` of a generator whose
    /// periodization lies in `V` within the requested range.
    fn admits(&self, w: &[u8]) -> bool {
        let k = w.len();
        if w > &self.upper[..k] || w < &self.lower[..k] || w < &self.lambda[..k] {
            return false;
        }
        (0..k).all(|i| {
            let tail = &w[i..];
            let head = &w[..k - i];
            let low: Vec<u8> = head.iter().map(|d| self.max - d).collect();
            tail <= head && tail >= &low[..]
        })
    }
}

fn candidate(alphabet: Alphabet, w: &[u8], q_lo: &BigRational, q_hi: &BigRational) -> Result<Option<Plateau>> {
    let word = Word::new(alphabet, w.to_vec())?;
    let seq = EpSeq::periodic(&word)?;
    if seq.period().len() != w.len() {
        return Ok(None);
    }
    let (seq, kind) = match check_generator(&word) {
        Ok(v) => v,
        Err(Error::NotAPlateauGenerator(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    // p_L > q_lo iff π_{q_lo}(α(p_L)) > 1, and p_L <= q_hi iff π_{q_hi}(α(p_L)) <= 1.
    let one = int(1);
    if pi_exact(&seq, q_lo) <= one || pi_exact(&seq, q_hi) > one {
        return Ok(None);
    }
    build_plateau(seq, kind).map(Some)
}

/// Classification of a base at a finite resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseClass {
    BelowKl,
    InPlateau(Box<Plateau>),
    /// No plateau of period `<= resolution` contains the base; the nearest
    /// enumerated plateaus on each side are attached.
    BifurcationCandidate { resolution: usize, left: Option<Box<Plateau>>, right: Option<Box<Plateau>> },
}

pub fn classify_base(alphabet: Alphabet, q: &BaseEnclosure, max_period: usize) -> Result<BaseClass> {
    let top = int(alphabet.size() as i64);
    if *q.hi() > top {
        return Err(Error::InvalidBase(format!("{q} is not inside (1, {top}]")));
    }
    let kl = q_kl(alphabet, DEFAULT_ROOT_BITS);
    if q.hi() <= kl.lo() {
        return Ok(BaseClass::BelowKl);
    }
    if let Ok(alpha) = quasi_greedy_alpha(alphabet, q, max_period) {
        for m in 1..=max_period {
            let head = alpha.prefix(m);
            for cand in [Some(head.clone()), head.minus().ok()].into_iter().flatten() {
                if let Ok(p) = plateau_from_generator(&cand) {
                    if p.contains(q) {
                        return Ok(BaseClass::InPlateau(Box::new(p)));
                    }
                }
            }
        }
    }
    let all = enumerate_plateaus(alphabet, kl.lo(), &top, max_period)?;
    let left = all.iter().rev().find(|p| p.p_l.hi() <= q.lo()).cloned().map(Box::new);
    let right = all.iter().find(|p| p.p_l.lo() > q.hi()).cloned().map(Box::new);
    Ok(BaseClass::BifurcationCandidate { resolution: max_period, left, right })
}

/// Membership of `q` in the intersection of the univoque base sets over the
/// alphabets `{0..J}` for `K <= J <= M`, decided as
/// `q <= K+1` and `q` univoque for the largest alphabet.
pub fn multi_alphabet_member(q: &BaseEnclosure, alphabet: Alphabet, k: u32, depth: usize) -> Result<Membership> {
    if k == 0 || k > alphabet.max() as u32 {
        return Err(Error::InvalidArgument(format!("need 1 <= K <= M, got K = {k}")));
    }
    let k_top = int(k as i64 + 1);
    if k_top < *q_kl(alphabet, DEFAULT_ROOT_BITS).lo() || *q.lo() > k_top {
        return Ok(Membership::No);
    }
    if *q.hi() > k_top {
        return Ok(Membership::UndecidedAtDepth(0));
    }
    let verdict = in_univoque_bases(alphabet, q, depth);
    if verdict == Membership::Yes {
        let n = depth.max(64);
        let alpha = match q.known_alpha(alphabet) {
            Some(a) => a.prefix(n),
            None => quasi_greedy_alpha(alphabet, q, n)?,
        };
        let low = alphabet.max() as u32 - k;
        assert!(
            alpha.digits().iter().all(|&d| low <= d as u32 && d as u32 <= k),
            "digit bounds violated for a univoque base in (1, K+1]"
        );
    }
    Ok(verdict)
}

/// One line of the plateau table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauRow {
    #[serde(rename = "M")]
    pub m: u8,
    pub generator: String,
    #[serde(rename = "p_L_lo")]
    pub p_l_lo: String,
    #[serde(rename = "p_L_hi")]
    pub p_l_hi: String,
    pub p_hat_lo: String,
    pub p_hat_hi: String,
    #[serde(rename = "p_R_lo")]
    pub p_r_lo: String,
    #[serde(rename = "p_R_hi")]
    pub p_r_hi: String,
    pub entropy_lo: f64,
    pub entropy_hi: f64,
    pub kind: String,
}

/// Decimal places used for base enclosures in tables.
pub const TABLE_PLACES: u32 = 15;

impl From<&Plateau> for PlateauRow {
    fn from(p: &Plateau) -> Self {
        let lo = |q: &BaseEnclosure| format_decimal(q.lo(), TABLE_PLACES, Round::Down);
        let hi = |q: &BaseEnclosure| format_decimal(q.hi(), TABLE_PLACES, Round::Up);
        PlateauRow {
            m: p.generator.alphabet().max(),
            generator: p.generator.to_string(),
            p_l_lo: lo(&p.p_l),
            p_l_hi: hi(&p.p_l),
            p_hat_lo: lo(&p.p_hat),
            p_hat_hi: hi(&p.p_hat),
            p_r_lo: lo(&p.p_r),
            p_r_hi: hi(&p.p_r),
            entropy_lo: p.entropy.lower,
            entropy_hi: p.entropy.upper,
            kind: p.kind.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(m: u32) -> Alphabet {
        Alphabet::new(m).unwrap()
    }

    fn ep(m: u32, s: &str) -> EpSeq {
        EpSeq::parse(a(m), s).unwrap()
    }

    fn w(m: u32, s: &str) -> Word {
        Word::parse(a(m), s).unwrap()
    }

    #[test]
    fn constants() {
        let k1 = q_kl(a(1), 30);
        assert!(k1.lo_f64() <= 1.787231650182966 && 1.787231650182966 <= k1.hi_f64());
        let t2 = q_t(a(2), 30);
        assert!((t2.lo_f64() - 2.618033988749895).abs() < 1e-8);
        assert_eq!(alpha_qt(a(2)), xi(a(2), 1));
        assert_eq!(alpha_qt(a(1)), xi(a(1), 1));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&ep(1, "pre:,per:110")).unwrap());
        assert!(!is_irreducible(&ep(1, "pre:,per:1100")).unwrap());
        assert!(is_irreducible(&ep(2, "pre:,per:21")).unwrap());
        assert_eq!(is_star_irreducible(&ep(1, "pre:,per:110")), Err(Error::NotInRange));
        assert_eq!(is_irreducible(&ep(1, "pre:,per:01")), Err(Error::NotInV));
    }

    #[test]
    fn plateau_examples() {
        let p = plateau_from_generator(&w(3, "2")).unwrap();
        assert!(p.p_l.is_exact() && *p.p_l.lo() == int(3));
        assert!(p.entropy.contains(2f64.ln()));
        assert_eq!(p.alpha_r, ep(3, "pre:3,per:1"));
        let t = plateau_from_generator(&w(1, "110")).unwrap();
        assert_eq!(t.alpha_r, ep(1, "pre:111,per:001"));
        assert_eq!(t.kind, PlateauKind::Irreducible);
        assert!(t.p_l.hi() < t.p_hat.lo() && t.p_hat.hi() < t.p_r.lo());
        assert!(matches!(
            plateau_from_generator(&w(1, "10")),
            Err(Error::NotAPlateauGenerator(Rejection::BelowKl))
        ));
        assert!(matches!(
            plateau_from_generator(&w(1, "1100")),
            Err(Error::NotAPlateauGenerator(Rejection::BelowKl))
        ));
        assert!(matches!(
            plateau_from_generator(&w(1, "111000")),
            Err(Error::NotAPlateauGenerator(Rejection::Reducible))
        ));
        assert_eq!(plateau_from_generator(&w(2, "210")).unwrap().kind, PlateauKind::StarIrreducible(1));
        assert!(matches!(
            plateau_from_generator(&w(1, "1")),
            Err(Error::NotAPlateauGenerator(Rejection::Inadmissible))
        ));
    }

    #[test]
    fn classification() {
        let c = classify_base(a(1), &BaseEnclosure::exact(crate::rational::ratio(3, 2)).unwrap(), 4).unwrap();
        assert_eq!(c, BaseClass::BelowKl);
        let c = classify_base(a(3), &BaseEnclosure::exact(crate::rational::ratio(16, 5)).unwrap(), 4).unwrap();
        assert!(matches!(c, BaseClass::InPlateau(ref p) if p.generator.to_string() == "2"));
        let c = classify_base(a(1), &BaseEnclosure::exact(int(2)).unwrap(), 4).unwrap();
        assert!(matches!(c, BaseClass::BifurcationCandidate { .. }));
    }
}
