//! Integer polynomials, just enough to decide signs and exact zeros of
//! `π_q(s) - t` at algebraic bases `q`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Integer polynomial, coefficients from the constant term upwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn zero() -> Self {
        IntPoly(Vec::new())
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPoly(c)
    }

    /// `Σ w_i x^(n-i)` for the digit word `w_1 ... w_n`.
    pub fn from_digits(digits: &[u8]) -> Self {
        IntPoly::new(digits.iter().rev().map(|&d| BigInt::from(d)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.0.len().max(other.0.len());
        let get = |p: &IntPoly, i: usize| p.0.get(i).cloned().unwrap_or_default();
        IntPoly::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }

    /// Remainder of division by a monic polynomial; stays in `Z[x]`.
    pub fn rem_monic(&self, m: &IntPoly) -> IntPoly {
        assert!(m.0.last().is_some_and(|c| c.is_one()), "divisor must be monic");
        let d = m.degree();
        let mut r = self.0.clone();
        while r.len() > d && !r.is_empty() {
            let top = r.len() - 1;
            let lead = r[top].clone();
            if !lead.is_zero() {
                for (i, c) in m.0.iter().enumerate() {
                    r[top - d + i] -= &lead * c;
                }
            }
            r.pop();
        }
        IntPoly::new(r)
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Sign of the value at a rational point.
    pub fn sign_at(&self, x: &BigRational) -> Ordering {
        // d^deg · p(n/d) = Σ c_i n^i d^(deg-i), with d > 0.
        let (n, d) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.0.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        acc.sign_cmp()
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.0.iter().cloned().map(BigRational::from_integer).collect()
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

fn trim_rat(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rem_rat(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let top = r.len() - 1;
        let f = &r[top] / &lead;
        if !f.is_zero() {
            for (i, c) in b.iter().enumerate() {
                let t = &f * c;
                r[top - db + i] -= t;
            }
        }
        r.pop();
        trim_rat(&mut r);
    }
    r
}

/// Monic greatest common divisor over `Q`.
pub fn gcd_rational(a: &IntPoly, b: &IntPoly) -> Vec<BigRational> {
    let mut x = a.to_rational();
    let mut y = b.to_rational();
    trim_rat(&mut x);
    trim_rat(&mut y);
    while !y.is_empty() {
        let r = rem_rat(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c = &*c / &lead;
        }
    }
    x
}

pub fn eval_rational(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}
