//! Window subshifts of finite type and certified topological entropy.
//!
//! A window SFT of length `N` is presented by its de Bruijn graph: states are
//! the allowed `(N-1)`-words, edges the allowed `N`-windows. Words are encoded
//! as base-`(M+1)` integers, so the lexicographic window bounds become integer
//! comparisons.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::digits::{Alphabet, Word};
use crate::error::{Error, Result};

/// Default bound on the number of de Bruijn states before essentialization.
pub const DEFAULT_STATE_CAP: u64 = 2_000_000;
/// Environment variable overriding [`DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "UNIVOQUE_STATE_CAP";

/// The state cap in effect: `UNIVOQUE_STATE_CAP` if set and valid, else the default.
pub fn state_cap() -> u64 {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_STATE_CAP)
}

/// Certified enclosure of a topological entropy, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBounds {
    pub lower: f64,
    pub upper: f64,
    pub window: usize,
    pub iterations: usize,
}

impl EntropyBounds {
    pub fn zero(window: usize) -> Self {
        EntropyBounds { lower: 0.0, upper: 0.0, window, iterations: 0 }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, h: f64) -> bool {
        self.lower <= h && h <= self.upper
    }

    pub fn intersects(&self, other: &EntropyBounds) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// Stopping rule for the power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Target width of the entropy enclosure, in nats.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { tolerance: 1e-12, max_iterations: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct WindowBounds {
    lower: Word,
    upper: Word,
    strict: bool,
}

/// An essentialized window SFT.
#[derive(Debug, Clone)]
pub struct WindowSft {
    alphabet: Alphabet,
    window: usize,
    bounds: Option<WindowBounds>,
    codes: Vec<u64>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    labels: Vec<u8>,
}

/// SFT whose sequences have every `N`-window between `reflect(prefix)` and
/// `prefix`, with `N = |prefix|`; strict or nonstrict comparisons.
pub fn build_window_sft(prefix: &Word, strict: bool) -> Result<WindowSft> {
    build_window_sft_capped(prefix, strict, state_cap())
}

pub fn build_window_sft_capped(prefix: &Word, strict: bool, cap: u64) -> Result<WindowSft> {
    if prefix.is_empty() {
        return Err(Error::InvalidArgument("empty window prefix".into()));
    }
    let alphabet = prefix.alphabet();
    let lower = prefix.reflect();
    let (lo, hi) = (encode(lower.digits(), alphabet), encode(prefix.digits(), alphabet));
    let (lo, hi) = if strict { (lo + 1, hi.wrapping_sub(1)) } else { (lo, hi) };
    let base = alphabet.size() as u64;
    let mut sft = WindowSft::build(alphabet, prefix.len(), cap, |code, out| {
        let first = code * base;
        if hi < first || hi == u64::MAX {
            return;
        }
        let from = lo.max(first);
        let to = hi.min(first + base - 1);
        for w in from..=to {
            out.push((w - first) as u8);
        }
    })?;
    sft.bounds = Some(WindowBounds { lower, upper: prefix.clone(), strict });
    Ok(sft)
}

fn encode(digits: &[u8], alphabet: Alphabet) -> u64 {
    let base = alphabet.size() as u64;
    digits.iter().fold(0, |acc, &d| acc * base + d as u64)
}

impl WindowSft {
    /// SFT of all sequences whose `window`-blocks satisfy `allowed`.
    pub fn from_windows(alphabet: Alphabet, window: usize, allowed: impl Fn(&[u8]) -> bool) -> Result<WindowSft> {
        if window == 0 {
            return Err(Error::InvalidArgument("window length must be positive".into()));
        }
        let base = alphabet.size() as u64;
        let mut buf = vec![0u8; window];
        WindowSft::build(alphabet, window, state_cap(), |code, out| {
            let mut c = code;
            for slot in buf[..window - 1].iter_mut().rev() {
                *slot = (c % base) as u8;
                c /= base;
            }
            for d in 0..=alphabet.max() {
                buf[window - 1] = d;
                if allowed(&buf) {
                    out.push(d);
                }
            }
        })
    }

    fn build(alphabet: Alphabet, window: usize, cap: u64, mut digits_from: impl FnMut(u64, &mut Vec<u8>)) -> Result<WindowSft> {
        let base = alphabet.size() as u128;
        let states = base.checked_pow(window as u32 - 1).unwrap_or(u128::MAX);
        if states > cap as u128 {
            return Err(Error::StateSpaceTooLarge { states, cap });
        }
        let n = states as usize;
        let base = base as u64;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets: Vec<u32> = Vec::new();
        let mut labels: Vec<u8> = Vec::new();
        let mut scratch = Vec::new();
        offsets.push(0);
        for code in 0..n as u64 {
            scratch.clear();
            digits_from(code, &mut scratch);
            for &d in &scratch {
                targets.push(((code * base + d as u64) % n as u64) as u32);
                labels.push(d);
            }
            offsets.push(targets.len());
        }
        let alive = essential_states(n, &offsets, &targets);
        let mut index = vec![u32::MAX; n];
        let mut codes = Vec::new();
        for (s, &ok) in alive.iter().enumerate() {
            if ok {
                index[s] = codes.len() as u32;
                codes.push(s as u64);
            }
        }
        if codes.is_empty() {
            return Err(Error::EmptySubshift);
        }
        let mut new_offsets = Vec::with_capacity(codes.len() + 1);
        let mut new_targets = Vec::new();
        let mut new_labels = Vec::new();
        new_offsets.push(0);
        for &c in &codes {
            let c = c as usize;
            for e in offsets[c]..offsets[c + 1] {
                let t = targets[e] as usize;
                if alive[t] {
                    new_targets.push(index[t]);
                    new_labels.push(labels[e]);
                }
            }
            new_offsets.push(new_targets.len());
        }
        Ok(WindowSft {
            alphabet,
            window,
            bounds: None,
            codes,
            offsets: new_offsets,
            targets: new_targets,
            labels: new_labels,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn is_strict(&self) -> Option<bool> {
        self.bounds.as_ref().map(|b| b.strict)
    }

    pub fn lower_word(&self) -> Option<&Word> {
        self.bounds.as_ref().map(|b| &b.lower)
    }

    pub fn upper_word(&self) -> Option<&Word> {
        self.bounds.as_ref().map(|b| &b.upper)
    }

    pub fn state_count(&self) -> usize {
        self.codes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// The `(N-1)`-word of a state.
    pub fn state_word(&self, state: usize) -> Word {
        let base = self.alphabet.size() as u64;
        let mut c = self.codes[state];
        let mut digits = vec![0u8; self.window - 1];
        for slot in digits.iter_mut().rev() {
            *slot = (c % base) as u8;
            c /= base;
        }
        Word::new(self.alphabet, digits).expect("digits below base")
    }

    /// All allowed `N`-windows, as words.
    pub fn windows(&self) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.edge_count());
        for s in 0..self.state_count() {
            let w = self.state_word(s);
            for e in self.offsets[s]..self.offsets[s + 1] {
                out.push(w.push(self.labels[e]).expect("label in alphabet"));
            }
        }
        out
    }

    fn edges(&self, s: usize) -> impl Iterator<Item = (usize, u8)> + '_ {
        (self.offsets[s]..self.offsets[s + 1]).map(move |e| (self.targets[e] as usize, self.labels[e]))
    }

    /// `#L_n`, the number of words of length `n` in the language.
    pub fn count_words(&self, n: usize) -> BigUint {
        let k = self.window - 1;
        if n <= k {
            let div = (self.alphabet.size() as u64).pow((k - n) as u32);
            let distinct: HashSet<u64> = self.codes.iter().map(|c| c / div).collect();
            return BigUint::from(distinct.len());
        }
        let steps = n - k;
        if let Some(total) = self.count_paths_u128(steps) {
            return BigUint::from(total);
        }
        let mut c = vec![BigUint::from(1u32); self.state_count()];
        for _ in 0..steps {
            c = (0..self.state_count())
                .map(|s| self.edges(s).fold(BigUint::zero(), |acc, (t, _)| acc + &c[t]))
                .collect();
        }
        c.into_iter().sum()
    }

    fn count_paths_u128(&self, steps: usize) -> Option<u128> {
        let mut c = vec![1u128; self.state_count()];
        for _ in 0..steps {
            let mut next = vec![0u128; c.len()];
            for (s, slot) in next.iter_mut().enumerate() {
                for (t, _) in self.edges(s) {
                    *slot = slot.checked_add(c[t])?;
                }
            }
            c = next;
        }
        c.into_iter().try_fold(0u128, |a, b| a.checked_add(b))
    }

    /// Certified entropy enclosure with default stopping rule.
    pub fn entropy(&self) -> EntropyBounds {
        self.entropy_with(SpectralOptions::default())
    }

    pub fn entropy_with(&self, opts: SpectralOptions) -> EntropyBounds {
        let all = vec![true; self.state_count()];
        let mut b = self.spectral_entropy(&all, opts);
        // log(#L_n)/n decreases to the entropy, so every n gives an upper bound.
        if self.state_count() <= 4096 {
            let n = 4 * self.window.max(2);
            if let Some(count) = self.count_words(n).to_f64() {
                let cap = count.ln() / n as f64 * (1.0 + 4.0 * f64::EPSILON) + 1e-15;
                b.upper = b.upper.min(cap.max(b.lower));
            }
        }
        b
    }

    /// Entropy of the follower set of `w`: the subgraph reachable from the
    /// states where `w` can end.
    pub fn follower_entropy(&self, w: &Word) -> Result<EntropyBounds> {
        self.follower_entropy_with(w, SpectralOptions::default())
    }

    pub fn follower_entropy_with(&self, w: &Word, opts: SpectralOptions) -> Result<EntropyBounds> {
        if w.alphabet() != self.alphabet {
            return Err(Error::AlphabetMismatch(w.alphabet().max(), self.alphabet.max()));
        }
        let k = self.window - 1;
        let d = w.digits();
        let starts: Vec<usize> = if d.len() >= k {
            let code = encode(&d[..k], self.alphabet);
            let mut s = self.codes.binary_search(&code).map_err(|_| Error::WordNotInLanguage)?;
            for &digit in &d[k..] {
                s = self
                    .edges(s)
                    .find(|&(_, l)| l == digit)
                    .map(|(t, _)| t)
                    .ok_or(Error::WordNotInLanguage)?;
            }
            vec![s]
        } else {
            let div = (self.alphabet.size() as u64).pow((k - d.len()) as u32);
            let code = encode(d, self.alphabet);
            (0..self.state_count()).filter(|&s| self.codes[s] / div == code).collect()
        };
        if starts.is_empty() {
            return Err(Error::WordNotInLanguage);
        }
        let mut seen = vec![false; self.state_count()];
        let mut stack = starts;
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            for (t, _) in self.edges(s) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        Ok(self.spectral_entropy(&seen, opts))
    }

    /// True iff the de Bruijn graph is strongly connected.
    pub fn is_transitive(&self) -> bool {
        let all = vec![true; self.state_count()];
        self.components(&all).len() == 1
    }

    /// Strongly connected components of the subgraph on `mask`, as lists of
    /// states; trivial components without a cycle are dropped.
    fn components(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let n = self.state_count();
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for s in (0..n).filter(|&s| mask[s]) {
            let start = edges.len();
            edges.extend(self.edges(s).filter(|&(t, _)| mask[t]).map(|(t, _)| (s as u32, t as u32)));
            edges[start..].sort_unstable();
        }
        edges.dedup();
        let mut g: DiGraph<(), (), u32> = DiGraph::with_capacity(n, edges.len());
        for _ in 0..n {
            g.add_node(());
        }
        g.extend_with_edges(&edges);
        let mut out = Vec::new();
        // kosaraju_scc is iterative; the graphs here are too deep for recursion.
        for comp in kosaraju_scc(&g) {
            let mut comp: Vec<usize> = comp.into_iter().map(|v| v.index()).filter(|&v| mask[v]).collect();
            comp.sort_unstable();
            let cyclic = comp.len() > 1
                || comp.first().is_some_and(|&v| self.edges(v).any(|(t, _)| t == v));
            if cyclic {
                out.push(comp);
            }
        }
        out
    }

    fn spectral_entropy(&self, mask: &[bool], opts: SpectralOptions) -> EntropyBounds {
        let max_entropy = (self.alphabet.size() as f64).ln() * (1.0 + 2.0 * f64::EPSILON);
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        let mut iterations = 0;
        let mut local = vec![u32::MAX; self.state_count()];
        for comp in self.components(mask) {
            let (l, h, it) = self.component_radius(&comp, &mut local, opts);
            lo = lo.max(l);
            hi = hi.max(h);
            iterations += it;
        }
        let lower = if lo > 1.0 { down_ln(lo) } else { 0.0 };
        let upper = if hi > 1.0 { up_ln(hi) } else { 0.0 };
        EntropyBounds {
            lower: lower.max(0.0).min(max_entropy),
            upper: upper.min(max_entropy).max(lower.max(0.0)),
            window: self.window,
            iterations,
        }
    }

    /// Collatz-Wielandt bounds on the spectral radius of one strongly
    /// connected component, iterating on `A + I` so the iteration converges
    /// also for periodic components.
    fn component_radius(&self, comp: &[usize], local: &mut [u32], opts: SpectralOptions) -> (f64, f64, usize) {
        for (i, &s) in comp.iter().enumerate() {
            local[s] = i as u32;
        }
        let mut off = Vec::with_capacity(comp.len() + 1);
        let mut adj: Vec<u32> = Vec::new();
        off.push(0);
        for &s in comp {
            adj.extend(self.edges(s).map(|(t, _)| local[t]).filter(|&t| t != u32::MAX));
            off.push(adj.len());
        }
        for &s in comp {
            local[s] = u32::MAX;
        }
        let n = comp.len();
        if (0..n).all(|i| off[i + 1] - off[i] == 1) {
            return (1.0, 1.0, 0);
        }
        let max_deg = (0..n).map(|i| off[i + 1] - off[i]).max().unwrap_or(0) as f64;
        // relative rounding error of one row sum and quotient
        let err = (max_deg + 4.0) * f64::EPSILON;
        let mut v = vec![1.0f64; n];
        let mut w = vec![0.0f64; n];
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let budget = (400_000_000 / adj.len().max(1)).clamp(200, opts.max_iterations.max(1));
        let mut it = 0;
        while it < budget {
            it += 1;
            let (mut rmin, mut rmax, mut wmax) = (f64::INFINITY, 0.0f64, 0.0f64);
            for i in 0..n {
                let s = v[i] + adj[off[i]..off[i + 1]].iter().map(|&j| v[j as usize]).sum::<f64>();
                let r = s / v[i];
                rmin = rmin.min(r);
                rmax = rmax.max(r);
                wmax = wmax.max(s);
                w[i] = s;
            }
            lo = lo.max(rmin * (1.0 - err) - 1.0);
            hi = hi.min(rmax * (1.0 + err) - 1.0);
            if lo > 1.0 && (hi / lo).ln() < opts.tolerance {
                break;
            }
            if lo <= 1.0 && hi - lo < opts.tolerance {
                break;
            }
            for i in 0..n {
                v[i] = (w[i] / wmax).max(f64::MIN_POSITIVE);
            }
        }
        (lo.max(0.0), hi, it)
    }
}

fn down_ln(x: f64) -> f64 {
    let v = x.ln();
    v - 4.0 * f64::EPSILON * v.abs().max(1e-300) - f64::MIN_POSITIVE
}

fn up_ln(x: f64) -> f64 {
    let v = x.ln();
    v + 4.0 * f64::EPSILON * v.abs().max(1e-300) + f64::MIN_POSITIVE
}

/// Removes states with no incoming or no outgoing edge until none remain.
fn essential_states(n: usize, offsets: &[usize], targets: &[u32]) -> Vec<bool> {
    let mut indeg = vec![0u32; n];
    let mut outdeg = vec![0u32; n];
    for s in 0..n {
        outdeg[s] = (offsets[s + 1] - offsets[s]) as u32;
    }
    for &t in targets {
        indeg[t as usize] += 1;
    }
    // reverse adjacency
    let mut roff = vec![0usize; n + 1];
    for &t in targets {
        roff[t as usize + 1] += 1;
    }
    for i in 0..n {
        roff[i + 1] += roff[i];
    }
    let mut fill = roff.clone();
    let mut sources = vec![0u32; targets.len()];
    for s in 0..n {
        for &t in &targets[offsets[s]..offsets[s + 1]] {
            sources[fill[t as usize]] = s as u32;
            fill[t as usize] += 1;
        }
    }
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n).filter(|&s| indeg[s] == 0 || outdeg[s] == 0).collect();
    for &s in &queue {
        alive[s] = false;
    }
    while let Some(s) = queue.pop() {
        for &t in &targets[offsets[s]..offsets[s + 1]] {
            let t = t as usize;
            if alive[t] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    alive[t] = false;
                    queue.push(t);
                }
            }
        }
        for &p in &sources[roff[s]..roff[s + 1]] {
            let p = p as usize;
            if alive[p] {
                outdeg[p] -= 1;
                if outdeg[p] == 0 {
                    alive[p] = false;
                    queue.push(p);
                }
            }
        }
    }
    alive
}
