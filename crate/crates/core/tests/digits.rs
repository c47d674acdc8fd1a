use std::cmp::Ordering;

use proptest::prelude::*;
use univoque::digits::{compare_lex, lambda_prefix, thue_morse_prefix, xi, Alphabet, EpSeq, Word};

fn seq(max_m: u32) -> impl Strategy<Value = EpSeq> {
    (1..=max_m).prop_flat_map(|m| {
        let d = 0..=(m as u8);
        (Just(m), prop::collection::vec(d.clone(), 0..5), prop::collection::vec(d, 1..5))
    })
    .prop_map(|(m, pre, per)| EpSeq::from_digits(Alphabet::new(m).unwrap(), pre, per).unwrap())
}

fn seq_pair() -> impl Strategy<Value = (EpSeq, EpSeq)> {
    (1u32..=3).prop_flat_map(|m| {
        let d = 0..=(m as u8);
        let one = (prop::collection::vec(d.clone(), 0..4), prop::collection::vec(d, 1..4));
        (Just(m), one.clone(), one)
    })
    .prop_map(|(m, (p1, q1), (p2, q2))| {
        let a = Alphabet::new(m).unwrap();
        (EpSeq::from_digits(a, p1, q1).unwrap(), EpSeq::from_digits(a, p2, q2).unwrap())
    })
}

/// Digit-by-digit comparison over a horizon long enough for sequences of
/// the generated sizes.
fn naive_cmp(a: &EpSeq, b: &EpSeq) -> Ordering {
    (0..200).map(|i| a.digit(i).cmp(&b.digit(i))).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reflect_is_an_involution(s in seq(4)) {
        prop_assert_eq!(s.reflect().reflect(), s.clone());
        let w = s.prefix(9);
        prop_assert_eq!(w.reflect().reflect(), w);
    }

    #[test]
    fn compare_matches_digitwise((a, b) in seq_pair()) {
        let o = compare_lex(&a, &b);
        prop_assert_eq!(o, naive_cmp(&a, &b));
        prop_assert_eq!(compare_lex(&b, &a), o.reverse());
        if o == Ordering::Equal {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn compare_is_transitive((a, b) in seq_pair(), c_per in prop::collection::vec(0u8..=1, 1..4)) {
        let c = EpSeq::from_digits(a.alphabet(), vec![], c_per).unwrap();
        let mut v = [a, b, c];
        v.sort();
        prop_assert!(compare_lex(&v[0], &v[2]) != Ordering::Greater);
    }

    #[test]
    fn shift_agrees_with_digits(s in seq(3), n in 0usize..12) {
        let t = s.shift(n);
        for i in 0..30 {
            prop_assert_eq!(t.digit(i), s.digit(n + i));
        }
    }

    #[test]
    fn canonical_form_is_minimal(s in seq(3)) {
        let per = s.period();
        prop_assert!((1..per.len()).all(|p| per.len() % p != 0 || (0..per.len()).any(|i| per[i] != per[(i + p) % per.len()])));
        if let Some(&last) = s.preperiod().last() {
            prop_assert_ne!(last, *per.last().unwrap());
        }
    }

    #[test]
    fn text_round_trip(s in seq(12)) {
        let again = EpSeq::parse(s.alphabet(), &s.to_string()).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn prefixes_nest(s in seq(3), n in 0usize..20) {
        let long = s.prefix(n + 1);
        let short = s.prefix(n);
        prop_assert_eq!(&long.digits()[..n], short.digits());
    }
}

/// Thue-Morse by the bit-count definition, independent of block doubling.
fn tau(i: usize) -> u8 {
    (i.count_ones() % 2) as u8
}

#[test]
fn thue_morse_matches_bit_parity() {
    let t = thue_morse_prefix(4096);
    assert!(t.digits().iter().enumerate().all(|(i, &b)| b == tau(i)));
}

#[test]
fn lambda_block_identity() {
    for m in 1..=10 {
        let a = Alphabet::new(m).unwrap();
        let l = lambda_prefix(a, 1 << 12);
        for n in 0..12 {
            let lo = Word::new(a, l.digits()[..1 << n].to_vec()).unwrap();
            let hi = &l.digits()[1 << n..1 << (n + 1)];
            assert_eq!(lo.reflect().plus().unwrap().digits(), hi, "M={m} n={n}");
        }
    }
}

#[test]
fn lambda_digit_range() {
    for m in 1..=10u32 {
        let k = (m / 2) as u8;
        let allowed: Vec<u8> = if m % 2 == 0 { vec![k - 1, k, k + 1] } else { vec![k, k + 1] };
        let l = lambda_prefix(Alphabet::new(m).unwrap(), 1 << 12);
        assert!(l.digits().iter().all(|d| allowed.contains(d)), "M={m}");
    }
}

#[test]
fn xi_decreases_towards_lambda() {
    for m in 1..=6 {
        let a = Alphabet::new(m).unwrap();
        let lambda = lambda_prefix(a, 1 << 10);
        for n in 1..7 {
            assert_eq!(compare_lex(&xi(a, n + 1), &xi(a, n)), Ordering::Less);
            let x = xi(a, n + 1);
            let first_diff = (0..1 << 10).find(|&i| x.digit(i) != lambda.digits()[i]).unwrap();
            assert!(x.digit(first_diff) > lambda.digits()[first_diff]);
        }
    }
}
