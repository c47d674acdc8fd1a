use std::cmp::Ordering;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use univoque::digits::{compare_lex, Alphabet, EpSeq, Word};
use univoque::expansion::{is_admissible_alpha, quasi_greedy_alpha, BaseEnclosure};
use univoque::rational::{int, ratio};
use univoque::subshift::{build_window_sft, EntropyBounds, WindowSft};
use univoque::Error;

fn a(m: u32) -> Alphabet {
    Alphabet::new(m).unwrap()
}

fn word(m: u32, s: &str) -> Word {
    Word::parse(a(m), s).unwrap()
}

fn all_words(m: u8, len: usize) -> Vec<Vec<u8>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|w| (0..=m).map(move |d| [w.clone(), vec![d]].concat())).collect()
    })
}

/// Whether a window lies between `reflect(u)` and `u`.
fn window_ok(w: &[u8], u: &[u8], m: u8, strict: bool) -> bool {
    let l: Vec<u8> = u.iter().map(|d| m - d).collect();
    if strict {
        l.as_slice() < w && w < u
    } else {
        l.as_slice() <= w && w <= u
    }
}

/// Spectral radius of the full de Bruijn matrix of the window condition, by
/// dense power iteration on `A + I` (no essentialization, no sparse storage).
fn perron_oracle(u: &[u8], m: u8, strict: bool) -> f64 {
    let n = u.len();
    let states = all_words(m, n - 1);
    let index = |w: &[u8]| states.iter().position(|s| s == w).unwrap();
    let k = states.len();
    let mut mat = vec![vec![0.0f64; k]; k];
    for (i, s) in states.iter().enumerate() {
        for d in 0..=m {
            let w = [s.clone(), vec![d]].concat();
            if window_ok(&w, u, m, strict) {
                mat[i][index(&w[1..])] += 1.0;
            }
        }
        mat[i][i] += 1.0;
    }
    let mut v = vec![1.0f64; k];
    let mut rho = 0.0;
    for _ in 0..20_000 {
        let w: Vec<f64> = (0..k).map(|i| (0..k).map(|j| mat[i][j] * v[j]).sum()).collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        rho = norm / v.iter().cloned().fold(0.0, f64::max);
        v = w.iter().map(|x| x / norm).collect();
    }
    rho - 1.0
}

#[test]
fn entropy_matches_dense_oracle() {
    let cases = [(1, "110", false), (2, "21", false), (1, "1101", true), (2, "2110", false), (3, "312", false), (1, "11010", true)];
    for (m, u, strict) in cases {
        let w = word(m, u);
        let h = build_window_sft(&w, strict).unwrap().entropy();
        let oracle = perron_oracle(w.digits(), m as u8, strict).ln();
        // a nilpotent part makes the shifted iteration converge like 1/k
        let tol = if oracle < 1e-3 { 1e-3 } else { 1e-9 };
        assert!(h.lower - tol <= oracle && oracle <= h.upper + tol, "{u}: {h:?} vs {oracle}");
        assert!(h.width() < 1e-9, "{u}: {h:?}");
    }
}

#[test]
fn named_examples() {
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let h = build_window_sft(&word(1, "110"), false).unwrap().entropy();
    assert!(h.contains(golden) && h.width() < 1e-9);
    let h = build_window_sft(&word(2, "21"), false).unwrap().entropy();
    assert!(h.contains((1.0 + 2f64.sqrt()).ln()) && h.width() < 1e-9);
    let full = build_window_sft(&word(3, "3"), false).unwrap();
    assert_eq!(full.count_words(5).to_u64(), Some(4u64.pow(5)));
    assert!(full.is_transitive());
    assert!((full.entropy().lower - 4f64.ln()).abs() < 1e-12);
    assert_eq!(build_window_sft(&word(1, "1"), true).unwrap_err(), Error::EmptySubshift);
}

/// Number of words of length `n` that occur in some bi-infinite sequence of
/// the window SFT: a word occurs iff it extends by `pad` symbols on both
/// sides, where `pad` is the number of `(N-1)`-words.
fn brute_count(u: &[u8], m: u8, strict: bool, n: usize) -> usize {
    let big = u.len();
    let pad = (m as usize + 1).pow(big as u32 - 1);
    let ok = |w: &[u8]| w.windows(big).all(|x| window_ok(x, u, m, strict));
    all_words(m, n + 2 * pad)
        .into_iter()
        .filter(|w| ok(w))
        .map(|w| w[pad..pad + n].to_vec())
        .collect::<std::collections::BTreeSet<_>>()
        .len()
}

#[test]
fn counts_match_brute_force() {
    for (m, u, strict) in [(1, "110", false), (1, "1101", true), (2, "21", false), (1, "1110", false)] {
        let w = word(m, u);
        let sft = build_window_sft(&w, strict).unwrap();
        for n in 1..=5 {
            assert_eq!(sft.count_words(n).to_usize().unwrap(), brute_count(w.digits(), m as u8, strict, n), "{u} n={n}");
        }
    }
    let golden = build_window_sft(&word(1, "110"), false).unwrap();
    assert_eq!(golden.count_words(4).to_u64(), Some(10));
}

#[test]
fn count_growth_bounds_entropy() {
    for (m, u) in [(1, "110"), (2, "21"), (1, "11010"), (2, "2101")] {
        let w = word(m, u);
        let sft = build_window_sft(&w, false).unwrap();
        let h = sft.entropy();
        for n in 1..12 {
            let c = sft.count_words(n).to_f64().unwrap();
            assert!(c.ln() / n as f64 >= h.lower - 1e-12);
        }
        // ln #L_n / n overshoots the entropy by O(1/n)
        let growth = |n: usize| {
            let c = sft.count_words(n);
            let shift = c.bits().saturating_sub(64);
            ((c >> shift).to_f64().unwrap().ln() + shift as f64 * 2f64.ln()) / n as f64
        };
        assert!(growth(1000) - h.upper < 0.02, "{u}: {} vs {h:?}", growth(1000));
        assert!(growth(1000) <= growth(20) + 1e-12);
    }
}

#[test]
fn follower_sets() {
    let sft = WindowSft::from_windows(a(2), 2, |w| w == [0, 0] || w[0] > 0 && w[1] > 0).unwrap();
    assert!(!sft.is_transitive());
    let low = sft.follower_entropy(&word(2, "0")).unwrap();
    let all = sft.entropy();
    assert!(low.upper < all.lower);
    assert!(all.contains(2f64.ln()));
    let t = build_window_sft(&word(1, "110"), false).unwrap();
    assert!(t.is_transitive());
    let f = t.follower_entropy(&word(1, "01")).unwrap();
    assert!(f.intersects(&t.entropy()));
    assert_eq!(t.follower_entropy(&word(1, "000")).unwrap_err(), Error::WordNotInLanguage);
    let two = WindowSft::from_windows(a(3), 2, |w| w == [0, 0] || w == [3, 3]).unwrap();
    assert!(!two.is_transitive());
}

/// For periodic α = (a_1...a_m)^∞, membership of x in V (checked on the
/// sequence) equals the nonstrict window condition of length m.
#[test]
fn window_m_equals_v_for_periodic_alpha() {
    for m in [1u32, 2] {
        for len in 1..=4 {
            for gen in all_words(m as u8, len) {
                let g = Word::new(a(m), gen.clone()).unwrap();
                let alpha = EpSeq::periodic(&g).unwrap();
                if alpha.period().len() != len || !is_admissible_alpha(&alpha) {
                    continue;
                }
                let low = alpha.reflect();
                for xl in 1..=8 {
                    for x in all_words(m as u8, xl) {
                        let xs = EpSeq::from_digits(a(m), vec![], x.clone()).unwrap();
                        let in_v = (0..xl).all(|n| {
                            let s = xs.shift(n);
                            compare_lex(&low, &s) != Ordering::Greater && compare_lex(&s, &alpha) != Ordering::Greater
                        });
                        let cyc: Vec<u8> = (0..xl + len).map(|i| x[i % xl]).collect();
                        let windows = (0..xl).all(|i| window_ok(&cyc[i..i + len], &gen, m as u8, false));
                        assert_eq!(in_v, windows, "alpha={alpha} x={xs}");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sandwich_and_window_monotonicity(m in 1u32..=2, k in 1i64..=99) {
        let q = int(1) + int(m as i64) * ratio(k, 100);
        let q = BaseEnclosure::exact(q).unwrap();
        let alpha = quasi_greedy_alpha(a(m), &q, 9).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for n in 1..=alpha.len() {
            let p = alpha.prefix(n);
            let h = |strict| match build_window_sft(&p, strict) {
                Ok(s) => s.entropy(),
                Err(Error::EmptySubshift) => EntropyBounds::zero(n),
                Err(e) => panic!("{e}"),
            };
            let (strict, outer) = (h(true), h(false));
            prop_assert!(strict.lower <= outer.upper);
            prop_assert!(strict.upper <= outer.upper + 1e-9);
            if let Some((s, o)) = prev {
                prop_assert!(strict.upper >= s - 1e-9);
                prop_assert!(outer.lower <= o + 1e-9);
            }
            prev = Some((strict.lower, outer.upper));
        }
    }
}
