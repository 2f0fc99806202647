//! Exact scalars: Laurent polynomials in ħ over the Gaussian rationals ℚ(i).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Inclusive range of ħ exponents kept by truncating operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub const DEFAULT: Window = Window { lo: -4, hi: 4 };

    pub fn new(lo: i32, hi: i32) -> Self {
        assert!(lo <= hi, "empty ħ window");
        Window { lo, hi }
    }

    pub fn symmetric(n: u32) -> Self {
        Window { lo: -(n as i32), hi: n as i32 }
    }

    pub fn contains(&self, k: i32) -> bool {
        self.lo <= k && k <= self.hi
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::DEFAULT
    }
}

/// An element a + b·i of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gauss {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gauss {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gauss { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Gauss { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Gauss::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn i() -> Self {
        Gauss { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gauss { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Gauss { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Gauss { re: &self.re * r, im: &self.im * r }
    }
}

impl Add for &Gauss {
    type Output = Gauss;
    fn add(self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &Gauss {
    type Output = Gauss;
    fn sub(self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &Gauss {
    type Output = Gauss;
    fn mul(self, o: &Gauss) -> Gauss {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re.clone(), im: -self.im.clone() }
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}i", fmt_rat(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({}{}{}i)", fmt_rat(&self.re), sign, fmt_rat(&self.im.abs()))
            }
        }
    }
}

/// Σ_k c_k ħ^k with c_k ∈ ℚ(i); zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    terms: BTreeMap<i32, Gauss>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Scalar::from_gauss(Gauss::from_int(1), 0)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_gauss(Gauss::from_int(n), 0)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::from_gauss(Gauss::real(r), 0)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Scalar::from_gauss(Gauss::i(), 0)
    }

    /// c·ħ^k.
    pub fn from_gauss(c: Gauss, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Scalar { terms }
    }

    pub fn hbar_pow(k: i32) -> Self {
        Scalar::from_gauss(Gauss::from_int(1), k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.get(&0).map(|g| g.re.is_one() && g.im.is_zero()).unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Gauss)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, k: i32) -> Gauss {
        self.terms.get(&k).cloned().unwrap_or_else(|| Gauss::from_int(0))
    }

    pub fn min_pow(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_pow(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// The rational value when the scalar is a real constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(g) = self.terms.get(&0) {
                if g.im.is_zero() {
                    return Some(g.re.clone());
                }
            }
        }
        None
    }

    pub fn add_term(&mut self, k: i32, c: &Gauss) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(|| Gauss::from_int(0));
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: self.terms.iter().map(|(k, v)| (*k, v.scale(r))).collect() }
    }

    pub fn shift_hbar(&self, d: i32) -> Self {
        Scalar { terms: self.terms.iter().map(|(k, v)| (k + d, v.clone())).collect() }
    }

    /// Keeps only ħ-powers inside `w`; the flag reports whether anything nonzero was dropped.
    pub fn truncate(&self, w: Window) -> (Scalar, bool) {
        let mut dropped = false;
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            if w.contains(*k) {
                terms.insert(*k, v.clone());
            } else {
                dropped = true;
            }
        }
        (Scalar { terms }, dropped)
    }

    /// Inverse as a Laurent series, truncated above `w.hi`.
    /// Returns the inverse and whether the series had to be cut.
    pub fn inverse(&self, w: Window) -> Option<(Scalar, bool)> {
        let lo = self.min_pow()?;
        let lead = self.terms[&lo].inv()?;
        if self.terms.len() == 1 {
            return Some((Scalar::from_gauss(lead, -lo), false));
        }
        // self = c ħ^lo (1 + r), r has strictly positive ħ-powers
        let c_inv = Scalar::from_gauss(lead, -lo);
        let unit = &self.shift_hbar(-lo) * &Scalar::from_gauss(self.terms[&lo].inv()?, 0);
        let r = &unit - &Scalar::one();
        let mut acc = Scalar::one();
        let mut pw = Scalar::one();
        let top = w.hi + lo;
        let mut cut = false;
        loop {
            pw = &pw * &(-&r);
            let (t, _) = pw.truncate(Window::new(i32::MIN / 2, top.max(0)));
            if t.is_zero() {
                if !pw.is_zero() {
                    cut = true;
                }
                break;
            }
            pw = t;
            acc = &acc + &pw;
        }
        Some((&acc * &c_inv, cut))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, v);
        }
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, &-v);
        }
        out
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &o.terms {
                out.add_term(k1 + k2, &(v1 * v2));
            }
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match *k {
                0 => write!(f, "{}", v)?,
                1 => write!(f, "{}ħ", v)?,
                _ => write!(f, "{}ħ^{}", v, k)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = Scalar::i();
        assert_eq!(&i * &i, Scalar::from_int(-1));
    }

    #[test]
    fn truncation_flags_drops() {
        let s = &Scalar::hbar_pow(5) + &Scalar::one();
        let (t, dropped) = s.truncate(Window::DEFAULT);
        assert!(dropped);
        assert_eq!(t, Scalar::one());
    }

    #[test]
    fn inverse_of_monomial_and_series() {
        let s = Scalar::from_gauss(Gauss::from_int(2), 1);
        let (inv, cut) = s.inverse(Window::DEFAULT).unwrap();
        assert!(!cut);
        assert_eq!(&inv * &s, Scalar::one());

        let u = &Scalar::one() + &Scalar::hbar_pow(1);
        let (inv, cut) = u.inverse(Window::new(-4, 4)).unwrap();
        assert!(cut);
        let (prod, _) = (&inv * &u).truncate(Window::new(-4, 4));
        assert_eq!(prod, Scalar::one());
    }
}
