use proptest::prelude::*;
use univoque::bifurcation::{enumerate_plateaus, plateau_from_generator, q_kl};
use univoque::digits::{Alphabet, Word};
use univoque::dimension::*;
use univoque::expansion::BaseEnclosure;
use univoque::rational::{int, ratio, BigRational};
use univoque::subshift::SpectralOptions;

fn a(m: u32) -> Alphabet {
    Alphabet::new(m).unwrap()
}

fn exact(q: BigRational) -> BaseEnclosure {
    BaseEnclosure::exact(q).unwrap()
}

fn base(m: u32, k: i64, of: i64) -> BaseEnclosure {
    exact(int(1) + int(m as i64) * ratio(k, of))
}

#[test]
fn top_base_is_exact() {
    for m in [1, 2, 3, 9] {
        let q = exact(int(m as i64 + 1));
        let h = entropy_h(a(m), &q, 12).unwrap();
        assert_eq!((h.lower, h.upper), (((m + 1) as f64).ln(), ((m + 1) as f64).ln()));
        let d = dim_univoque(a(m), &q, 12).unwrap();
        assert_eq!((d.lower, d.upper), (1.0, 1.0));
    }
    assert!(entropy_h(a(1), &exact(ratio(21, 10)), 4).is_err());
}

#[test]
fn entropy_vanishes_below_kl() {
    let kl = q_kl(a(1), 60);
    let q = exact(kl.lo() * ratio(999, 1000));
    assert!(entropy_h(a(1), &q, 12).unwrap().upper < 0.05);
    assert_eq!(dim_univoque(a(1), &exact(ratio(3, 2)), 8).unwrap().upper, 0.0);
}

#[test]
fn named_dimensions() {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let tri = plateau_from_generator(&Word::parse(a(1), "110").unwrap()).unwrap();
    let d = dim_univoque(a(1), &tri.p_l, 12).unwrap();
    let target = golden.ln() / 1.839_286_755_214_161f64.ln();
    assert!((target - 0.78968).abs() < 1e-4);
    assert!(d.contains(target) && d.width() < 1e-6, "{d:?}");
    let d = dim_univoque(a(3), &exact(int(3)), 6).unwrap();
    assert!(d.contains(2f64.ln() / 3f64.ln()) && d.width() < 1e-4);
}

#[test]
fn plateau_endpoints_collapse() {
    for (m, n) in [(1, 12), (2, 8), (3, 6)] {
        for p in enumerate_plateaus(a(m), q_kl(a(m), 60).lo(), &int(m as i64 + 1), 4).unwrap() {
            let h = entropy_h(a(m), &p.p_l, n).unwrap();
            assert!(h.width() < 1e-9, "{}: {h:?}", p.generator);
            assert!(h.intersects(&p.entropy));
        }
    }
}

#[test]
fn entropy_flat_inside_plateaus() {
    for m in [1, 2] {
        let n = default_window(a(m));
        for p in enumerate_plateaus(a(m), q_kl(a(m), 60).lo(), &int(m as i64 + 1), 5).unwrap() {
            for j in 1..8 {
                let q = exact(p.p_l.hi() + (p.p_r.lo() - p.p_l.hi()) * ratio(j, 8));
                let h = entropy_h(a(m), &q, n).unwrap();
                assert!(h.lower <= p.entropy.upper + 1e-9 && p.entropy.lower <= h.upper + 1e-9, "{} j={j}", p.generator);
            }
        }
    }
}

#[test]
fn sandwich_gap_shrinks() {
    for (m, n) in [(1, 12), (2, 8)] {
        for k in 1..20 {
            let q = base(m, 40 + 3 * k, 100);
            let mut prev_gap = f64::INFINITY;
            for w in [n / 2, n] {
                let s = entropy_sandwich(a(m), &q, w, SpectralOptions::default()).unwrap();
                assert!(s.strict.lower <= s.nonstrict.upper);
                let gap = s.nonstrict.upper - s.strict.lower;
                assert!(gap <= prev_gap + 1e-9);
                prev_gap = gap;
            }
            assert!(prev_gap < 0.08, "M={m} q={q}: {prev_gap}");
        }
    }
}

#[test]
fn phi_dominates_dimension() {
    let opts = PhiOptions { grid_points: 64, ..PhiOptions::for_alphabet(a(2)) };
    let t = base(2, 80, 100);
    let p = phi(a(2), &t, &opts).unwrap();
    for k in 30..=80 {
        let d = dim_univoque(a(2), &base(2, k, 100), opts.window).unwrap();
        assert!(d.lower <= p.upper + 1e-12, "k={k}");
    }
    let lower_t = phi(a(2), &base(2, 60, 100), &opts).unwrap();
    assert!(lower_t.lower <= p.upper);
}

#[test]
fn staircase_shape() {
    let opts = PhiOptions { grid_points: 64, ..PhiOptions::for_alphabet(a(1)) };
    let table = staircase(a(1), &ratio(17, 10), &int(2), 40, &opts).unwrap();
    assert_eq!(table.rows.len(), 40);
    for pair in table.rows.windows(2) {
        assert!(pair[0].phi_lo <= pair[1].phi_lo && pair[0].phi_hi <= pair[1].phi_hi);
    }
    for r in &table.rows {
        assert!(0.0 <= r.phi_lo && r.phi_lo <= r.phi_hi && r.phi_hi <= 1.0);
        if r.t < 1.787 {
            assert_eq!(r.phi_hi, 0.0);
        }
    }
    let last = table.rows.last().unwrap();
    assert_eq!((last.phi_lo, last.phi_hi), (1.0, 1.0));
    assert!(staircase(a(1), &int(2), &int(2), 10, &opts).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_is_monotone(m in 1u32..=2, k1 in 1i64..=400, k2 in 1i64..=400) {
        let (k1, k2) = (k1.min(k2), k1.max(k2));
        let n = if m == 1 { 10 } else { 7 };
        let h1 = entropy_h(a(m), &base(m, k1, 400), n).unwrap();
        let h2 = entropy_h(a(m), &base(m, k2, 400), n).unwrap();
        prop_assert!(h1.lower <= h2.upper + 1e-12);
        prop_assert!(h1.lower <= h1.upper);
    }

    #[test]
    fn dimension_is_nearly_continuous(m in 1u32..=2, k in 1i64..=999) {
        // D has no jumps (it falls on plateaus, so it is not monotone): nearby
        // bases have overlapping enclosures up to the window slack
        let n = if m == 1 { 12 } else { 8 };
        let d1 = dim_univoque(a(m), &base(m, k, 1000), n).unwrap();
        let d2 = dim_univoque(a(m), &base(m, k + 1, 1000), n).unwrap();
        prop_assert!(d1.lower <= d2.upper + 0.1);
        prop_assert!(d2.lower <= d1.upper + 0.1);
        prop_assert!((0.0..=1.0).contains(&d1.lower) && d1.upper <= 1.0);
    }
}
