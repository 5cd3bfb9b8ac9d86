//! Double-double arithmetic (~32 significant decimal digits).
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`. The
//! error-free transformations follow Dekker and Knuth; no fused multiply-add
//! is assumed so the code stays usable without `std`.

use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self { hi: core::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };
    pub const FRAC_PI_2: Self = Self { hi: core::f64::consts::FRAC_PI_2, lo: 6.123_233_995_736_766e-17 };
    pub const LN_2: Self = Self { hi: core::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact conversion for |x| < 2^106.
    pub fn from_i128(x: i128) -> Self {
        let hi = x as f64;
        // `hi` is the correctly rounded value; the residual fits in an f64 exactly
        // whenever |x| < 2^106.
        let rest = x - hi as i128;
        let (h, l) = quick_two_sum(hi, rest as f64);
        Self { hi: h, lo: l }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Multiplication by an exact power of two.
    pub fn ldexp(self, e: i32) -> Self {
        Self { hi: libm::scalbn(self.hi, e), lo: libm::scalbn(self.lo, e) }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if n < 0 {
            Self::ONE / acc
        } else {
            acc
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::from_f64(f64::NAN) };
        }
        // One Newton step on top of the f64 root doubles the precision.
        let x = libm::sqrt(self.hi);
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        Self { hi, lo }
    }

    pub fn exp(self) -> Self {
        if self.hi == 0.0 {
            return Self::ONE;
        }
        let k = libm::round(self.hi / core::f64::consts::LN_2);
        let r = self - Self::LN_2 * Self::from_f64(k);
        // Further scale down so the Taylor series converges in a few terms.
        let r = r.ldexp(-8);
        // Work with e^r - 1 so the squarings do not lose the low digits:
        // (1 + p)^2 = 1 + (2p + p^2).
        let mut term = r;
        let mut p = r;
        for i in 2..=24 {
            term = term * r / Self::from_f64(i as f64);
            p = p + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..8 {
            p = p.ldexp(1) + p.sqr();
        }
        (Self::ONE + p).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        let mut y = Self::from_f64(libm::log(self.hi));
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    /// Returns `(sin x, cos x)`.
    pub fn sin_cos(self) -> (Self, Self) {
        let q = libm::round(self.hi / core::f64::consts::FRAC_PI_2);
        let y = self - Self::FRAC_PI_2 * Self::from_f64(q);
        let (s, c) = sin_cos_reduced(y);
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }
}

/// Taylor series for |y| <= pi/4.
fn sin_cos_reduced(y: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    let y2 = y.sqr();
    let mut term = y;
    let mut s = y;
    for i in 1..=20 {
        let k = (2 * i) as f64;
        term = -(term * y2) / DoubleDouble::from_f64(k * (k + 1.0));
        s = s + term;
        if term.hi.abs() < 1e-36 {
            break;
        }
    }
    let mut term = DoubleDouble::ONE;
    let mut c = DoubleDouble::ONE;
    for i in 1..=20 {
        let k = (2 * i) as f64;
        term = -(term * y2) / DoubleDouble::from_f64(k * (k - 1.0));
        c = c + term;
        if term.hi.abs() < 1e-36 {
            break;
        }
    }
    (s, c)
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * Self::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Self::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            c => c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from_f64(x)
    }

    #[test]
    fn third_times_three_is_one() {
        let t = DoubleDouble::ONE / dd(3.0);
        let back = t * dd(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = dd(2.0).sqrt();
        assert!((r.sqr() - dd(2.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn pi_quarter_sine() {
        let (s, c) = (DoubleDouble::PI.ldexp(-2)).sin_cos();
        // sin(pi/4)^2 = 1/2 to double-double accuracy
        assert!((s.sqr() - dd(0.5)).to_f64().abs() < 1e-31);
        assert!((s - c).to_f64().abs() < 1e-31);
        let (s, c) = DoubleDouble::PI.sin_cos();
        assert!(s.to_f64().abs() < 1e-31);
        assert!((c + DoubleDouble::ONE).to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[0.9_f64, 0.5, 1e-3, 7.25, 123.0] {
            let y = dd(x).ln().exp();
            assert!(((y - dd(x)) / dd(x)).to_f64().abs() < 1e-30, "x={x}");
        }
        let e = DoubleDouble::ONE.exp();
        // e = 2.718281828459045 + 1.4456468917292502e-16
        assert!(
            (e - DoubleDouble { hi: core::f64::consts::E, lo: 1.445_646_891_729_250_2e-16 }).to_f64().abs() < 1e-31
        );
    }

    #[test]
    fn from_i128_is_exact() {
        let x: i128 = 4_200_000_000_000_000_000_000_000_123;
        let d = DoubleDouble::from_i128(x);
        let back = d.hi as i128 + d.lo as i128;
        assert_eq!(back, x);
    }
}
