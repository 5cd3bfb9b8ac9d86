//! Exact combinatorial kernels and the trigonometric sums `Φ_m(N)`.
//!
//! Integer and rational quantities are computed exactly with checked `i128`
//! arithmetic and fail with [`Error::Overflow`] outside their supported
//! range instead of silently rounding.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_rational::Ratio;
use num_traits::{CheckedMul, One};

use crate::sum::CompensatedSum;
use crate::{Error, Result};

pub type Rational = Ratio<i128>;

pub const MAX_STIRLING_ORDER: usize = 30;
pub const MAX_HALF_BINOMIAL_ORDER: u32 = 40;
pub const MAX_SQRT_DERIV_ORDER: usize = 20;

/// Stirling number of the second kind `S(n, m)` by the triangular recurrence
/// `S(n, m) = m S(n-1, m) + S(n-1, m-1)`.
pub fn stirling2(n: usize, m: usize) -> Result<u128> {
    if n == 0 || n > MAX_STIRLING_ORDER {
        return Err(Error::OrderOutOfRange { order: n, min: 1, max: MAX_STIRLING_ORDER });
    }
    if m == 0 || m > n {
        return Err(Error::OrderOutOfRange { order: m, min: 1, max: n });
    }
    let mut row = [0u128; MAX_STIRLING_ORDER + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=i.min(m)).rev() {
            row[j] = (j as u128)
                .checked_mul(row[j])
                .and_then(|x| x.checked_add(row[j - 1]))
                .ok_or(Error::Overflow("stirling2"))?;
        }
        row[0] = 0;
    }
    Ok(row[m])
}

/// `S(n, m)` from the alternating sum `(1/m!) Σ_j (-1)^{m-j} C(m, j) j^n`.
/// Exact while the intermediate powers fit in `i128` (all `n <= 20`).
pub fn stirling2_explicit(n: usize, m: usize) -> Result<u128> {
    if m == 0 || m > n {
        return Err(Error::OrderOutOfRange { order: m, min: 1, max: n });
    }
    let ovf = || Error::Overflow("stirling2_explicit");
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for j in 0..=m {
        if j > 0 {
            binom = binom * (m - j + 1) as i128 / j as i128;
        }
        let mut pow: i128 = if n == 0 { 1 } else { 0 };
        if j > 0 {
            pow = 1;
            for _ in 0..n {
                pow = pow.checked_mul(j as i128).ok_or_else(ovf)?;
            }
        }
        let term = binom.checked_mul(pow).ok_or_else(ovf)?;
        total = if (m - j) % 2 == 0 { total.checked_add(term) } else { total.checked_sub(term) }.ok_or_else(ovf)?;
    }
    let mut fact: i128 = 1;
    for i in 2..=m as i128 {
        fact *= i;
    }
    Ok((total / fact) as u128)
}

/// The two half-integer upper arguments of generalized binomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfInt {
    /// `+1/2`
    Plus,
    /// `-1/2`
    Minus,
}

/// Generalized binomial `C(a, n) = a (a-1) ... (a-n+1) / n!` for `a = ±1/2`.
pub fn half_binomial(a: HalfInt, n: u32) -> Result<Rational> {
    if n > MAX_HALF_BINOMIAL_ORDER {
        return Err(Error::OrderOutOfRange { order: n as usize, min: 0, max: MAX_HALF_BINOMIAL_ORDER as usize });
    }
    let num0: i128 = match a {
        HalfInt::Plus => 1,
        HalfInt::Minus => -1,
    };
    let mut acc = Rational::one();
    for i in 0..n as i128 {
        // (a - i) / (i + 1) with a = num0/2
        let factor = Rational::new(num0 - 2 * i, 2 * (i + 1));
        acc = acc.checked_mul(&factor).ok_or(Error::Overflow("half_binomial"))?;
    }
    Ok(acc)
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    // Numerators and denominators used here stay below 2^106, so two-part
    // conversion keeps full double precision.
    let n = crate::dd::DoubleDouble::from_i128(*q.numer());
    let d = crate::dd::DoubleDouble::from_i128(*q.denom());
    (n / d).to_f64()
}

/// One term of the `n`-th derivative of `sqrt(f)` for a quadratic `f`:
/// `coeff * f'^{f1_power} * f''^{f2_power} / f^{k - 1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtDerivTerm {
    pub k: u32,
    /// Exact coefficient, an integer over a power of two.
    pub coeff: Rational,
    pub f1_power: u32,
    pub f2_power: u32,
}

impl SqrtDerivTerm {
    /// The coefficient as `(integer, e)` meaning `integer * 2^-e`.
    pub fn dyadic(&self) -> (i128, u32) {
        let d = *self.coeff.denom();
        debug_assert!(d > 0 && (d & (d - 1)) == 0);
        (*self.coeff.numer(), d.trailing_zeros())
    }
}

/// Terms of `d^n/dx^n sqrt(f(x))` for quadratic `f`, `k = floor((n+1)/2) ..= n`.
pub fn sqrt_deriv_terms(n: usize) -> Result<Vec<SqrtDerivTerm>> {
    if n == 0 || n > MAX_SQRT_DERIV_ORDER {
        return Err(Error::OrderOutOfRange { order: n, min: 1, max: MAX_SQRT_DERIV_ORDER });
    }
    let ovf = || Error::Overflow("sqrt_deriv_terms");
    let mut out = Vec::with_capacity(n / 2 + 1);
    for k in n.div_ceil(2)..=n {
        // n! / ((2k-n)! (n-k)!) = C(n, 2k-n) * (2n-2k)! / (n-k)!
        let mut int = binomial_i128(n, 2 * k - n).ok_or_else(ovf)?;
        for i in (n - k + 1)..=(2 * n - 2 * k) {
            int = int.checked_mul(i as i128).ok_or_else(ovf)?;
        }
        // (2k-2)! / (k-1)!
        for i in k..=(2 * k).saturating_sub(2) {
            int = int.checked_mul(i as i128).ok_or_else(ovf)?;
        }
        if k % 2 == 0 {
            int = -int;
        }
        let shift = (n + k - 1) as u32;
        if shift > 126 {
            return Err(ovf());
        }
        out.push(SqrtDerivTerm {
            k: k as u32,
            coeff: Rational::new(int, 1i128 << shift),
            f1_power: (2 * k - n) as u32,
            f2_power: (n - k) as u32,
        });
    }
    Ok(out)
}

/// Evaluates `Σ coeff f1^a f2^b / f^{k-1/2}` for given `f(x)`, `f'(x)`, `f''(x)`.
pub fn eval_sqrt_deriv(terms: &[SqrtDerivTerm], f: f64, f1: f64, f2: f64) -> f64 {
    let sqrt_f = libm::sqrt(f);
    let mut acc = CompensatedSum::new();
    for t in terms {
        let mut v = rational_to_f64(&t.coeff);
        v *= powi(f1, t.f1_power as i32) * powi(f2, t.f2_power as i32);
        v *= sqrt_f / powi(f, t.k as i32);
        acc.add(v);
    }
    acc.value()
}

/// `d^n/dx^n g(e^x) = Σ_m S(n, m) e^{m x} g^{(m)}(e^x)`, with `g_derivs[m-1]`
/// holding `g^{(m)}(e^x)`.
pub fn exp_chain_deriv(n: usize, g_derivs: &[f64], x: f64) -> Result<f64> {
    if g_derivs.len() < n {
        return Err(Error::InvalidArgument("need g^(m) for m = 1..=n"));
    }
    let ex = libm::exp(x);
    let mut acc = CompensatedSum::new();
    let mut emx = 1.0;
    for m in 1..=n {
        emx *= ex;
        acc.add(stirling2(n, m)? as f64 * emx * g_derivs[m - 1]);
    }
    Ok(acc.value())
}

/// `Φ_m(N)` in the closed form
/// `(1 / (N 4^m)) Σ_{r=0}^{2m} C(2m, r) / sin(π (2m + 1 - 2r) / (4N))`.
pub fn phi_exact(m: u32, n: u64) -> Result<f64> {
    check_phi_args(m, n)?;
    let mut acc = CompensatedSum::new();
    let two_m = 2 * m as u64;
    let mut binom = 1.0f64;
    let nf = n as f64;
    for r in 0..=two_m {
        if r > 0 {
            binom = binom * (two_m - r + 1) as f64 / r as f64;
        }
        let odd = (two_m + 1) as f64 - 2.0 * r as f64;
        acc.add(binom / libm::sin(PI * odd / (4.0 * nf)));
    }
    Ok(libm::ldexp(acc.value() / nf, -2 * m as i32))
}

/// `Φ_m(N) = (2/N) Σ_{k<N} sin θ_k cos^{2m} θ_k`, `θ_k = π (2k+1) / (4N)`.
pub fn phi_definitional(m: u32, n: u64) -> Result<f64> {
    check_phi_args(m, n)?;
    let nf = n as f64;
    let mut acc = CompensatedSum::new();
    for k in 0..n {
        let theta = PI * (2 * k + 1) as f64 / (4.0 * nf);
        acc.add(libm::sin(theta) * powi(libm::cos(theta), 2 * m as i32));
    }
    Ok(2.0 * acc.value() / nf)
}

/// Two leading orders of `Φ_m(N)`: `4/(π(2m+1)) + π/(24 N^2)`.
pub fn phi_asymptotic(m: u32, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1"));
    }
    let nf = n as f64;
    Ok(4.0 / (PI * (2 * m + 1) as f64) + PI / (24.0 * nf * nf))
}

fn check_phi_args(m: u32, n: u64) -> Result<()> {
    if m > 30 {
        return Err(Error::OrderOutOfRange { order: m as usize, min: 0, max: 30 });
    }
    if n == 0 || n > 1_000_000 {
        return Err(Error::InvalidArgument("N must lie in 1..=1e6"));
    }
    Ok(())
}

/// `ζ(2n - 1)` for `n >= 2`: direct sum plus an Euler–Maclaurin tail.
pub fn zeta_odd(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::OrderOutOfRange { order: n as usize, min: 2, max: usize::MAX });
    }
    Ok(zeta(2 * n - 1))
}

fn zeta(p: u32) -> f64 {
    const CUT: u32 = 32;
    let pf = p as f64;
    let mut acc = CompensatedSum::new();
    for k in (1..CUT).rev() {
        acc.add(libm::pow(k as f64, -pf));
    }
    // Σ_{k>=N} k^-p = N^{1-p}/(p-1) + N^-p/2 + Σ_j B_2j/(2j)! p(p+1)..(p+2j-2) N^{-p-2j+1}
    const BERNOULLI: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let nf = CUT as f64;
    let mut tail = libm::pow(nf, 1.0 - pf) / (pf - 1.0) + 0.5 * libm::pow(nf, -pf);
    let mut rising = pf; // p (p+1) ... (p+2j-2)
    let mut fact = 2.0; // (2j)!
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j as f64 + 1.0;
        tail += b / fact * rising * libm::pow(nf, -pf - 2.0 * j + 1.0);
        rising *= (pf + 2.0 * j - 1.0) * (pf + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    acc.add(tail);
    acc.value()
}

/// `Σ_{r >= r0} (2r + 1)^{-p}` for odd `p >= 3`.
pub fn odd_reciprocal_tail(p: u32, r0: u64) -> Result<f64> {
    if p < 3 || p % 2 == 0 {
        return Err(Error::InvalidArgument("odd_reciprocal_tail needs odd p >= 3"));
    }
    let pf = p as f64;
    let full = (1.0 - libm::pow(2.0, -pf)) * zeta(p);
    if r0 <= 64 {
        let mut head = CompensatedSum::new();
        for r in 0..r0 {
            head.add(libm::pow((2 * r + 1) as f64, -pf));
        }
        return Ok(full - head.value());
    }
    // For large r0 the difference above would cancel; Euler–Maclaurin on
    // f(r) = (2r+1)^-p directly.
    let x = (2 * r0 + 1) as f64;
    let f = libm::pow(x, -pf);
    let d1 = -2.0 * pf * f / x;
    let d3 = -8.0 * pf * (pf + 1.0) * (pf + 2.0) * f / (x * x * x);
    Ok(x * f / (2.0 * (pf - 1.0)) + 0.5 * f - d1 / 12.0 + d3 / 720.0)
}

pub(crate) fn binomial_i128(n: usize, k: usize) -> Option<i128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as i128)? / (i as i128 + 1);
    }
    Some(acc)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}
