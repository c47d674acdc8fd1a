//! Words and eventually periodic sequences over the digit set `{0, ..., M}`,
//! lexicographic order, reflection, and the Thue-Morse derived sequences
//! `τ`, `λ` and `ξ(n)`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;

use crate::error::{Error, Result};

/// The digit set `{0, ..., M}` with `1 <= M <= 255`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(u8);

impl Alphabet {
    pub fn new(m: u32) -> Result<Self> {
        if (1..=255).contains(&m) {
            Ok(Alphabet(m as u8))
        } else {
            Err(Error::InvalidAlphabet(m))
        }
    }

    /// The largest digit `M`.
    pub fn max(self) -> u8 {
        self.0
    }

    /// Number of digits, `M + 1`.
    pub fn size(self) -> u32 {
        self.0 as u32 + 1
    }

    fn check(self, digits: &[u8]) -> Result<()> {
        match digits.iter().find(|&&d| d > self.0) {
            Some(&d) => Err(Error::OutOfAlphabet { digit: d as i64, max: self.0 }),
            None => Ok(()),
        }
    }

    fn check_same(self, other: Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(self.0, other.0))
        }
    }
}

/// A finite word over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    digits: Vec<u8>,
    alphabet: Alphabet,
}

impl Word {
    pub fn new(alphabet: Alphabet, digits: Vec<u8>) -> Result<Self> {
        alphabet.check(&digits)?;
        Ok(Word { digits, alphabet })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Word { digits: Vec::new(), alphabet }
    }

    pub(crate) fn from_trusted(alphabet: Alphabet, digits: Vec<u8>) -> Self {
        debug_assert!(alphabet.check(&digits).is_ok());
        Word { digits, alphabet }
    }

    /// Parses the text encoding: a plain digit string, or comma-separated
    /// integers (required when `M > 9`).
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let text = text.trim();
        let digits: Vec<u8> = if text.is_empty() {
            Vec::new()
        } else if text.contains(',') || alphabet.max() > 9 {
            text.split(',')
                .map(|t| t.trim().parse::<u8>().map_err(|_| Error::Parse(format!("bad digit `{t}`"))))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad digit `{c}`")))
                })
                .collect::<Result<_>>()?
        };
        Word::new(alphabet, digits)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn last(&self) -> Option<u8> {
        self.digits.last().copied()
    }

    /// First `n` digits (the whole word if shorter).
    pub fn prefix(&self, n: usize) -> Word {
        Word::from_trusted(self.alphabet, self.digits[..n.min(self.len())].to_vec())
    }

    pub fn reflect(&self) -> Word {
        let m = self.alphabet.max();
        Word::from_trusted(self.alphabet, self.digits.iter().map(|d| m - d).collect())
    }

    /// The word with its last digit incremented.
    pub fn plus(&self) -> Result<Word> {
        match self.last() {
            Some(d) if d < self.alphabet.max() => {
                let mut digits = self.digits.clone();
                *digits.last_mut().unwrap() += 1;
                Ok(Word::from_trusted(self.alphabet, digits))
            }
            Some(d) => Err(Error::OutOfAlphabet { digit: d as i64 + 1, max: self.alphabet.max() }),
            None => Err(Error::InvalidArgument("plus of the empty word".into())),
        }
    }

    /// The word with its last digit decremented.
    pub fn minus(&self) -> Result<Word> {
        match self.last() {
            Some(d) if d > 0 => {
                let mut digits = self.digits.clone();
                *digits.last_mut().unwrap() -= 1;
                Ok(Word::from_trusted(self.alphabet, digits))
            }
            Some(_) => Err(Error::OutOfAlphabet { digit: -1, max: self.alphabet.max() }),
            None => Err(Error::InvalidArgument("minus of the empty word".into())),
        }
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.alphabet.check_same(other.alphabet)?;
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        Ok(Word::from_trusted(self.alphabet, digits))
    }

    /// The word followed by one more digit.
    pub fn push(&self, d: u8) -> Result<Word> {
        self.alphabet.check(&[d])?;
        let mut digits = self.digits.clone();
        digits.push(d);
        Ok(Word::from_trusted(self.alphabet, digits))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, &self.digits, self.alphabet)
    }
}

fn write_digits(f: &mut fmt::Formatter<'_>, digits: &[u8], alphabet: Alphabet) -> fmt::Result {
    if alphabet.max() > 9 {
        for (i, d) in digits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    } else {
        for d in digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// An eventually periodic sequence `pre · per · per · ...` in canonical form:
/// the period is primitive and the preperiod is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpSeq {
    pre: Vec<u8>,
    per: Vec<u8>,
    alphabet: Alphabet,
}

impl EpSeq {
    pub fn new(pre: &Word, per: &Word) -> Result<Self> {
        pre.alphabet.check_same(per.alphabet)?;
        if per.is_empty() {
            return Err(Error::InvalidArgument("empty period".into()));
        }
        Ok(Self::canonical(pre.alphabet, pre.digits.clone(), per.digits.clone()))
    }

    pub fn from_digits(alphabet: Alphabet, pre: Vec<u8>, per: Vec<u8>) -> Result<Self> {
        alphabet.check(&pre)?;
        alphabet.check(&per)?;
        if per.is_empty() {
            return Err(Error::InvalidArgument("empty period".into()));
        }
        Ok(Self::canonical(alphabet, pre, per))
    }

    /// The purely periodic sequence `w^∞`.
    pub fn periodic(w: &Word) -> Result<Self> {
        EpSeq::new(&Word::empty(w.alphabet), w)
    }

    /// The constant sequence `d^∞`.
    pub fn constant(alphabet: Alphabet, d: u8) -> Result<Self> {
        EpSeq::from_digits(alphabet, Vec::new(), vec![d])
    }

    fn canonical(alphabet: Alphabet, mut pre: Vec<u8>, mut per: Vec<u8>) -> Self {
        let p = minimal_period(&per);
        if per.len().is_multiple_of(p) {
            per.truncate(p);
        }
        while let Some(&d) = pre.last() {
            if d != *per.last().unwrap() {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        EpSeq { pre, per, alphabet }
    }

    /// Parses `pre:<word>,per:<word>`.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let text = text.trim();
        let rest = text
            .strip_prefix("pre:")
            .ok_or_else(|| Error::Parse(format!("expected `pre:<word>,per:<word>`, got `{text}`")))?;
        let at = rest
            .find("per:")
            .ok_or_else(|| Error::Parse(format!("missing `per:` in `{text}`")))?;
        let pre = rest[..at].strip_suffix(',').unwrap_or(&rest[..at]);
        let per = &rest[at + 4..];
        EpSeq::new(&Word::parse(alphabet, pre)?, &Word::parse(alphabet, per)?)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.pre
    }

    pub fn period(&self) -> &[u8] {
        &self.per
    }

    pub fn preperiod_word(&self) -> Word {
        Word::from_trusted(self.alphabet, self.pre.clone())
    }

    pub fn period_word(&self) -> Word {
        Word::from_trusted(self.alphabet, self.per.clone())
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    /// True for sequences ending in `0^∞`.
    pub fn ends_in_zeros(&self) -> bool {
        self.per == [0]
    }

    /// Digit at 0-based position `i`.
    pub fn digit(&self, i: usize) -> u8 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.per[(i - self.pre.len()) % self.per.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word::from_trusted(self.alphabet, (0..n).map(|i| self.digit(i)).collect())
    }

    /// Number of distinct shifts: `|pre| + |per|`.
    pub fn shift_count(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    /// The shifted sequence `σⁿ(self)`.
    pub fn shift(&self, n: usize) -> EpSeq {
        if n <= self.pre.len() {
            return EpSeq::canonical(self.alphabet, self.pre[n..].to_vec(), self.per.clone());
        }
        let mut per = self.per.clone();
        per.rotate_left((n - self.pre.len()) % self.per.len());
        EpSeq { pre: Vec::new(), per, alphabet: self.alphabet }
    }

    pub fn reflect(&self) -> EpSeq {
        let m = self.alphabet.max();
        EpSeq {
            pre: self.pre.iter().map(|d| m - d).collect(),
            per: self.per.iter().map(|d| m - d).collect(),
            alphabet: self.alphabet,
        }
    }
}

impl fmt::Display for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("pre:")?;
        write_digits(f, &self.pre, self.alphabet)?;
        f.write_str(",per:")?;
        write_digits(f, &self.per, self.alphabet)
    }
}

impl PartialOrd for EpSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_lex(self, other)
    }
}

/// Smallest `p` such that `w[i] == w[i + p]` for all valid `i`.
fn minimal_period(w: &[u8]) -> usize {
    let mut fail = vec![0usize; w.len()];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = fail[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i] = k;
    }
    w.len() - fail.last().copied().unwrap_or(0)
}

/// Exact lexicographic comparison of two eventually periodic sequences.
pub fn compare_lex(a: &EpSeq, b: &EpSeq) -> Ordering {
    let horizon = a.pre.len().max(b.pre.len()) + a.per.len().lcm(&b.per.len());
    (0..horizon)
        .map(|i| a.digit(i).cmp(&b.digit(i)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Which infinite sequence a [`StreamSeq`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `τ_0 τ_1 ...` over `{0, 1}`.
    ThueMorse,
    /// `λ_1 λ_2 ...` over the given alphabet.
    Lambda(Alphabet),
}

/// A deterministic infinite sequence with a monotonically memoized prefix.
#[derive(Debug)]
pub struct StreamSeq {
    generator: Generator,
    cache: Mutex<Vec<u8>>,
}

impl StreamSeq {
    pub fn new(generator: Generator) -> Self {
        StreamSeq { generator, cache: Mutex::new(Vec::new()) }
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn alphabet(&self) -> Alphabet {
        match self.generator {
            Generator::ThueMorse => Alphabet(1),
            Generator::Lambda(a) => a,
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if cache.len() < n {
            match self.generator {
                Generator::ThueMorse => extend_thue_morse(&mut cache, n),
                Generator::Lambda(a) => {
                    let start = cache.len() + 1;
                    let tau = thue_morse_prefix(n + 1);
                    cache.extend((start..=n).map(|i| lambda_digit(a, tau.digits(), i)));
                }
            }
        }
        Word::from_trusted(self.alphabet(), cache[..n].to_vec())
    }
}

fn extend_thue_morse(bits: &mut Vec<u8>, n: usize) {
    if bits.is_empty() {
        bits.push(0);
    }
    while bits.len() < n {
        let k = bits.len();
        for i in 0..k {
            let b = 1 - bits[i];
            bits.push(b);
        }
    }
}

fn lambda_digit(a: Alphabet, tau: &[u8], i: usize) -> u8 {
    let k = a.max() / 2;
    if a.max().is_multiple_of(2) {
        k + tau[i] - tau[i - 1]
    } else {
        k + tau[i]
    }
}

fn thue_morse_stream() -> &'static StreamSeq {
    static TM: OnceLock<StreamSeq> = OnceLock::new();
    TM.get_or_init(|| StreamSeq::new(Generator::ThueMorse))
}

/// First `n` Thue-Morse bits `τ_0 ... τ_{n-1}`.
pub fn thue_morse_prefix(n: usize) -> Word {
    thue_morse_stream().prefix(n)
}

/// First `n` digits `λ_1 ... λ_n` of the Komornik-Loreti sequence.
pub fn lambda_prefix(alphabet: Alphabet, n: usize) -> Word {
    let tau = thue_morse_prefix(n + 1);
    Word::from_trusted(alphabet, (1..=n).map(|i| lambda_digit(alphabet, tau.digits(), i)).collect())
}

/// Length of the λ block defining `ξ(n)`.
pub fn xi_block_len(alphabet: Alphabet, n: u32) -> usize {
    if alphabet.max().is_multiple_of(2) {
        1usize << (n - 1)
    } else {
        1usize << n
    }
}

/// `ξ(n) = λ_1...λ_L (plus(reflect(λ_1...λ_L)))^∞` with `L = 2^(n-1)` for
/// even `M` and `L = 2^n` for odd `M`.
pub fn xi(alphabet: Alphabet, n: u32) -> EpSeq {
    assert!((1..=28).contains(&n), "xi index out of range");
    let block = lambda_prefix(alphabet, xi_block_len(alphabet, n));
    let tail = block.reflect().plus().expect("reflected lambda block ends below M");
    EpSeq::new(&block, &tail).expect("same alphabet")
}
