//! Entropy `H(q)`, the dimension `D(q) = H(q) / log q` of the univoque set,
//! and the staircase `φ(t) = max_{q <= t} D(q)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bifurcation::{enumerate_plateaus, q_kl};
use crate::digits::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::expansion::{quasi_greedy_alpha, BaseEnclosure, DEFAULT_ROOT_BITS};
use crate::rational::{int, to_f64, Round};
use crate::subshift::{build_window_sft, EntropyBounds, SpectralOptions};

/// Initial number of grid points of the φ profile.
pub const GRID_POINTS: usize = 256;
/// Segments trisected per refinement round.
pub const REFINE_SEGMENTS: usize = 16;
/// Refinement rounds.
pub const REFINE_ROUNDS: usize = 2;

/// Default window length: 12 for `M = 1`, 8 for `M = 2, 3`, 6 otherwise.
pub fn default_window(alphabet: Alphabet) -> usize {
    match alphabet.max() {
        1 => 12,
        2 | 3 => 8,
        _ => 6,
    }
}

/// Default generator period bound for plateau enumeration.
pub fn default_max_period(alphabet: Alphabet) -> usize {
    match alphabet.max() {
        1 => 8,
        2 | 3 => 6,
        _ => 3,
    }
}

/// Certified bounds on a dimension, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimBounds {
    pub lower: f64,
    pub upper: f64,
    pub window: usize,
    pub entropy: EntropyBounds,
}

impl DimBounds {
    pub fn contains(&self, d: f64) -> bool {
        self.lower <= d && d <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Entropies of the strict and nonstrict window subshifts on a prefix of
/// `α(q)`; the first is contained in `V_q`, the second contains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub strict: EntropyBounds,
    pub nonstrict: EntropyBounds,
}

fn window_entropy(prefix: &Word, strict: bool, opts: SpectralOptions) -> Result<EntropyBounds> {
    type Key = (u8, bool, Vec<u8>, u64, usize);
    static CACHE: OnceLock<Mutex<HashMap<Key, EntropyBounds>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (prefix.alphabet().max(), strict, prefix.digits().to_vec(), opts.tolerance.to_bits(), opts.max_iterations);
    if let Some(h) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(*h);
    }
    let h = match build_window_sft(prefix, strict) {
        Ok(sft) => sft.entropy_with(opts),
        Err(Error::EmptySubshift) => EntropyBounds::zero(prefix.len()),
        Err(e) => return Err(e),
    };
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, h);
    Ok(h)
}

fn check_base(alphabet: Alphabet, q: &BaseEnclosure) -> Result<()> {
    if *q.hi() > int(alphabet.size() as i64) {
        return Err(Error::InvalidBase(format!("{q} exceeds M+1 = {}", alphabet.size())));
    }
    Ok(())
}

/// Strict and nonstrict window entropies at window `n`.
pub fn entropy_sandwich(alphabet: Alphabet, q: &BaseEnclosure, n: usize, opts: SpectralOptions) -> Result<Sandwich> {
    check_base(alphabet, q)?;
    if n == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let prefix = quasi_greedy_alpha(alphabet, q, n)?;
    Ok(Sandwich { strict: window_entropy(&prefix, true, opts)?, nonstrict: window_entropy(&prefix, false, opts)? })
}

/// Certified enclosure of `H(q)` at window `n`.
pub fn entropy_h(alphabet: Alphabet, q: &BaseEnclosure, n: usize) -> Result<EntropyBounds> {
    entropy_h_with(alphabet, q, n, SpectralOptions::default())
}

pub fn entropy_h_with(alphabet: Alphabet, q: &BaseEnclosure, n: usize, opts: SpectralOptions) -> Result<EntropyBounds> {
    check_base(alphabet, q)?;
    if q.is_exact() && *q.lo() == int(alphabet.size() as i64) {
        let h = (alphabet.size() as f64).ln();
        return Ok(EntropyBounds { lower: h, upper: h, window: 1, iterations: 0 });
    }
    if let Some(alpha) = q.known_alpha(alphabet) {
        let m = alpha.period().len();
        if alpha.is_purely_periodic() && m <= n {
            return window_entropy(&alpha.period_word(), false, opts);
        }
    }
    let s = entropy_sandwich(alphabet, q, n, opts)?;
    Ok(EntropyBounds {
        lower: s.strict.lower,
        upper: s.nonstrict.upper.max(s.strict.lower),
        window: n,
        iterations: s.strict.iterations + s.nonstrict.iterations,
    })
}

fn ln_down(x: &BigRational) -> f64 {
    let v = to_f64(x, Round::Down).ln();
    v - 4.0 * f64::EPSILON * v.abs()
}

fn ln_up(x: &BigRational) -> f64 {
    let v = to_f64(x, Round::Up).ln();
    v + 4.0 * f64::EPSILON * v.abs()
}

fn quotient(h: &EntropyBounds, q: &BaseEnclosure) -> (f64, f64) {
    let lower = h.lower / ln_up(q.hi()) * (1.0 - 4.0 * f64::EPSILON);
    let upper = h.upper / ln_down(q.lo()) * (1.0 + 4.0 * f64::EPSILON);
    (lower.clamp(0.0, 1.0), upper.clamp(0.0, 1.0))
}

/// Certified bounds on `D(q) = dim_H U_q = H(q) / log q`.
pub fn dim_univoque(alphabet: Alphabet, q: &BaseEnclosure, n: usize) -> Result<DimBounds> {
    dim_univoque_with(alphabet, q, n, SpectralOptions::default())
}

pub fn dim_univoque_with(alphabet: Alphabet, q: &BaseEnclosure, n: usize, opts: SpectralOptions) -> Result<DimBounds> {
    let h = entropy_h_with(alphabet, q, n, opts)?;
    if q.is_exact() && *q.lo() == int(alphabet.size() as i64) {
        return Ok(DimBounds { lower: 1.0, upper: 1.0, window: n, entropy: h });
    }
    let (lower, upper) = quotient(&h, q);
    Ok(DimBounds { lower, upper: upper.max(lower), window: n, entropy: h })
}

/// Parameters of a φ computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiOptions {
    pub window: usize,
    pub max_period: usize,
    pub grid_points: usize,
    pub spectral: SpectralOptions,
}

impl PhiOptions {
    pub fn for_alphabet(alphabet: Alphabet) -> Self {
        PhiOptions {
            window: default_window(alphabet),
            max_period: default_max_period(alphabet),
            grid_points: GRID_POINTS,
            spectral: SpectralOptions { tolerance: 1e-9, ..SpectralOptions::default() },
        }
    }
}

struct Sample {
    q: BaseEnclosure,
    h_upper: f64,
    d: DimBounds,
}

/// Sorted samples of `D` on `[q_KL.lo, end]`, where `end <= M+1` is always a
/// sample. `H` vanishes at and below `q_KL`, so `q_KL.lo` carries `H = 0`.
struct Profile {
    start: BigRational,
    samples: Vec<Sample>,
}

impl Profile {
    fn build(alphabet: Alphabet, end: &BigRational, extra: &[BigRational], opts: &PhiOptions) -> Result<Profile> {
        let start = q_kl(alphabet, DEFAULT_ROOT_BITS).lo().clone();
        let mut profile = Profile { start: start.clone(), samples: Vec::new() };
        if *end <= start {
            return Ok(profile);
        }
        let mut points: Vec<BaseEnclosure> = Vec::new();
        let steps = opts.grid_points.max(2) - 1;
        for i in 1..=steps {
            let q = &start + (end - &start) * int(i as i64) / int(steps as i64);
            points.push(BaseEnclosure::exact(q)?);
        }
        for t in extra.iter().filter(|t| **t > start && *t <= end) {
            points.push(BaseEnclosure::exact(t.clone())?);
        }
        for p in enumerate_plateaus(alphabet, &start, end, opts.max_period)? {
            points.push(p.p_l);
        }
        for q in points {
            profile.insert(alphabet, q, opts)?;
        }
        for _ in 0..REFINE_ROUNDS {
            profile.refine(alphabet, opts)?;
        }
        Ok(profile)
    }

    fn insert(&mut self, alphabet: Alphabet, q: BaseEnclosure, opts: &PhiOptions) -> Result<()> {
        let i = self.samples.partition_point(|s| s.q.hi() < q.lo());
        // Overlapping enclosures would make the segment order ambiguous.
        if self.samples.get(i).is_some_and(|s| s.q.lo() <= q.hi()) {
            return Ok(());
        }
        let d = dim_univoque_with(alphabet, &q, opts.window, opts.spectral)?;
        self.samples.insert(i, Sample { q, h_upper: d.entropy.upper, d });
        Ok(())
    }

    /// Upper bound of `D` on the segment ending at sample `i`.
    fn segment_bound(&self, i: usize) -> f64 {
        let left = if i == 0 { &self.start } else { self.samples[i - 1].q.lo() };
        let bound = self.samples[i].h_upper / ln_down(left) * (1.0 + 4.0 * f64::EPSILON);
        bound.clamp(0.0, 1.0).max(self.samples[i].d.upper)
    }

    /// Trisects the segments with the largest slack above the running maximum.
    fn refine(&mut self, alphabet: Alphabet, opts: &PhiOptions) -> Result<()> {
        let mut best = 0.0f64;
        let mut slack: Vec<(f64, usize)> = Vec::new();
        for i in 0..self.samples.len() {
            best = best.max(self.samples[i].d.lower);
            slack.push((self.segment_bound(i) - best, i));
        }
        slack.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut new_points = Vec::new();
        for &(_, i) in slack.iter().take(REFINE_SEGMENTS) {
            let left = if i == 0 { self.start.clone() } else { self.samples[i - 1].q.hi().clone() };
            let right = self.samples[i].q.lo().clone();
            if left >= right {
                continue;
            }
            for k in 1..=2 {
                new_points.push(&left + (&right - &left) * int(k) / int(3));
            }
        }
        for q in new_points {
            self.insert(alphabet, BaseEnclosure::exact(q)?, opts)?;
        }
        Ok(())
    }

    /// φ bounds at every `t` of an increasing sequence, in one sweep.
    fn sweep(&self, ts: &[BigRational], window: usize) -> Vec<DimBounds> {
        let mut out = Vec::with_capacity(ts.len());
        let (mut lower, mut upper) = (0.0f64, 0.0f64);
        let mut h = EntropyBounds::zero(window);
        let mut i = 0;
        for t in ts {
            if *t <= self.start {
                out.push(DimBounds { lower: 0.0, upper: 0.0, window, entropy: EntropyBounds::zero(window) });
                continue;
            }
            while i < self.samples.len() && self.samples[i].q.hi() <= t {
                let s = &self.samples[i];
                if s.d.lower > lower {
                    lower = s.d.lower;
                    h = s.d.entropy;
                }
                upper = upper.max(self.segment_bound(i));
                i += 1;
            }
            // the segment reaching past t still bounds D on (previous sample, t]
            let pending = if i < self.samples.len() { self.segment_bound(i) } else { 0.0 };
            out.push(DimBounds { lower, upper: upper.max(pending).max(lower), window, entropy: h });
        }
        out
    }
}

/// Certified bounds on `φ(t) = max_{q <= t} D(q)`.
pub fn phi(alphabet: Alphabet, t: &BaseEnclosure, opts: &PhiOptions) -> Result<DimBounds> {
    let top = int(alphabet.size() as i64);
    if *t.lo() >= top {
        let h = (alphabet.size() as f64).ln();
        return Ok(DimBounds { lower: 1.0, upper: 1.0, window: 1, entropy: EntropyBounds { lower: h, upper: h, window: 1, iterations: 0 } });
    }
    let kl = q_kl(alphabet, DEFAULT_ROOT_BITS);
    if t.hi() <= kl.lo() {
        return Ok(DimBounds { lower: 0.0, upper: 0.0, window: opts.window, entropy: EntropyBounds::zero(opts.window) });
    }
    let lo = t.lo().clone();
    let hi = if *t.hi() > top { top } else { t.hi().clone() };
    let profile = Profile::build(alphabet, &hi, std::slice::from_ref(&lo), opts)?;
    let b = profile.sweep(&[lo, hi], opts.window);
    Ok(DimBounds { lower: b[0].lower, upper: b[1].upper, window: opts.window, entropy: b[0].entropy })
}

/// One row of the staircase table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseRow {
    pub t: f64,
    pub phi_lo: f64,
    pub phi_hi: f64,
}

/// Samples of `φ` on an even grid of `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseTable {
    #[serde(rename = "M")]
    pub m: u8,
    pub window: usize,
    pub samples: usize,
    pub rows: Vec<StaircaseRow>,
}

/// `φ` enclosures at `samples` evenly spaced points of `[t_min, t_max]`.
pub fn staircase(alphabet: Alphabet, t_min: &BigRational, t_max: &BigRational, samples: usize, opts: &PhiOptions) -> Result<StaircaseTable> {
    if *t_min <= int(1) || t_min >= t_max || samples < 2 {
        return Err(Error::InvalidArgument("need 1 < t_min < t_max and samples >= 2".into()));
    }
    let ts: Vec<BigRational> = (0..samples)
        .map(|j| t_min + (t_max - t_min) * int(j as i64) / int(samples as i64 - 1))
        .collect();
    let top = int(alphabet.size() as i64);
    let end = if *t_max > top { top } else { t_max.clone() };
    let profile = Profile::build(alphabet, &end, &ts, opts)?;
    let bounds = profile.sweep(&ts, opts.window);
    let rows = ts
        .iter()
        .zip(bounds)
        .map(|(t, b)| StaircaseRow { t: to_f64(t, Round::Down), phi_lo: b.lower, phi_hi: b.upper })
        .collect();
    Ok(StaircaseTable { m: alphabet.max(), window: opts.window, samples, rows })
}
