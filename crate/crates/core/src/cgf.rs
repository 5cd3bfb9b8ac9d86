//! Exact finite-size cumulant generating function and critical cumulants.
//!
//! `K±_L(s) = -(w + mu) + (2/L) Σ_{r < L/2} Λ±_{L,r}(s)`. At the critical tilt
//! the `n`-th derivative of every mode energy has a closed form obtained by
//! composing the Stirling-number chain rule for `g(e^s)` with the exact
//! derivatives of the square root of a quadratic. With
//! `s = sin θ`, `c = cos θ`, `D = 1 - ν²c²`, `E = 1 - 2νc²`, `F = 1 - 2c²`:
//!
//! ```text
//! λ^(n) = Σ_{m=1}^{n} S(n,m) ν^m 2^{1-2m}
//!         Σ_{k=⌈m/2⌉}^{m} I(m,k) s^{2k-2m+1} E^{2k-m} F^{2m-2k} / D^{k-1/2}
//! ```
//!
//! where `I(m,k)` is the signed integer numerator of the square-root
//! derivative coefficient of order `m`.

use alloc::vec::Vec;

use crate::combinatorics::{powi, sqrt_deriv_terms, stirling2};
use crate::dd::DoubleDouble;
use crate::model::{check_size, dispersion, half_angle, ModelParams, Sector};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Default highest cumulant order.
pub const DEFAULT_MAX_ORDER: usize = 12;
/// Highest order supported by the exact coefficient tables.
pub const MAX_ORDER: usize = 20;
/// Highest order evaluated in plain double precision.
pub const MAX_DOUBLE_ORDER: usize = 10;
/// [`Precision::Auto`] switches to double-double above this order, where
/// cancellation in the double path starts to cost more than 1e-12.
pub const AUTO_DOUBLE_ORDER: usize = 6;

/// `K±_L(s)`.
pub fn cgf(p: &ModelParams, s: f64, size: usize, sector: Sector) -> Result<f64> {
    check_size(size)?;
    let mut acc = CompensatedSum::new();
    for r in 0..size / 2 {
        acc.add(dispersion(p, s, size, r, sector)?);
    }
    Ok(-(p.w() + p.mu()) + 2.0 * acc.value() / size as f64)
}

/// `dK±_L/ds`, the mean scaled activity in the tilted ensemble.
pub fn activity(p: &ModelParams, s: f64, size: usize, sector: Sector) -> Result<f64> {
    check_size(size)?;
    let (w, mu) = (p.w(), p.mu());
    let wes = w * libm::exp(s);
    let j = wes + mu;
    let mut acc = CompensatedSum::new();
    for r in 0..size / 2 {
        if sector == Sector::Odd && r == 0 {
            acc.add(wes);
            continue;
        }
        let half = half_angle(size, r, sector);
        let sh = libm::sin(half);
        let sin_k = libm::sin(2.0 * half);
        let cos_k = libm::cos(2.0 * half);
        let a = -w * libm::expm1(s) - mu + 2.0 * j * sh * sh;
        let lam = libm::sqrt(a * a + (2.0 * wes + mu) * mu * sin_k * sin_k);
        acc.add(wes * (mu * sin_k * sin_k - cos_k * a) / lam);
    }
    Ok(2.0 * acc.value() / size as f64)
}

/// Even-sector mean activity `A_L(s)`.
pub fn mean_activity(p: &ModelParams, s: f64, size: usize) -> Result<f64> {
    activity(p, s, size, Sector::Even)
}

/// Arithmetic used to evaluate the closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Double for orders up to [`AUTO_DOUBLE_ORDER`], double-double above.
    #[default]
    Auto,
    Double,
    Extended,
}

#[derive(Debug, Clone)]
struct InnerTerm {
    /// Signed integer numerator `I(m, k)`.
    int: i128,
    int_f64: f64,
    int_dd: DoubleDouble,
    s_pow: i32,
    e_pow: i32,
    f_pow: i32,
    /// `D` appears as `D^{-(k - 1/2)}`.
    k: i32,
}

#[derive(Debug, Clone)]
struct OuterTerm {
    /// `S(n, m) 2^{1-2m}`
    weight: f64,
    weight_dd: DoubleDouble,
    m: i32,
    inner: Vec<InnerTerm>,
}

/// Exact coefficient tables for the `n`-th critical derivative, shared by all
/// modes.
#[derive(Debug, Clone)]
pub struct DerivativeTable {
    order: usize,
    outer: Vec<OuterTerm>,
}

impl DerivativeTable {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::OrderOutOfRange { order, min: 1, max: MAX_ORDER });
        }
        let mut outer = Vec::with_capacity(order);
        for m in 1..=order {
            let stir = stirling2(order, m)?;
            let weight_dd = DoubleDouble::from_i128(stir as i128).ldexp(1 - 2 * m as i32);
            let inner = sqrt_deriv_terms(m)?
                .into_iter()
                .map(|t| {
                    // coeff = num / 2^e with e <= m + k - 1 after reduction.
                    let (num, e) = t.dyadic();
                    let num = num << (m as u32 + t.k - 1 - e);
                    InnerTerm {
                        int: num,
                        int_f64: num as f64,
                        int_dd: DoubleDouble::from_i128(num),
                        s_pow: 2 * t.k as i32 - 2 * m as i32 + 1,
                        e_pow: t.f1_power as i32,
                        f_pow: 2 * t.f2_power as i32,
                        k: t.k as i32,
                    }
                })
                .collect();
            outer.push(OuterTerm { weight: weight_dd.to_f64(), weight_dd, m: m as i32, inner });
        }
        Ok(Self { order, outer })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn resolve(&self, precision: Precision) -> Result<bool> {
        match precision {
            Precision::Auto => Ok(self.order > AUTO_DOUBLE_ORDER),
            Precision::Extended => Ok(true),
            Precision::Double if self.order > MAX_DOUBLE_ORDER => {
                Err(Error::OrderOutOfRange { order: self.order, min: 1, max: MAX_DOUBLE_ORDER })
            }
            Precision::Double => Ok(false),
        }
    }

    /// `λ^(n)` at half-angle trig values `(c, s)`.
    pub fn eval(&self, nu: f64, c: f64, s: f64) -> f64 {
        let c2 = c * c;
        let d = 1.0 - nu * nu * c2;
        let e = 1.0 - 2.0 * nu * c2;
        let f = 1.0 - 2.0 * c2;
        let sqrt_d = libm::sqrt(d);
        let mut acc = CompensatedSum::new();
        let mut nu_m = 1.0;
        for o in &self.outer {
            nu_m *= nu;
            let mut inner = CompensatedSum::new();
            for t in &o.inner {
                inner.add(t.int_f64 * powi(s, t.s_pow) * powi(e, t.e_pow) * powi(f, t.f_pow) * (sqrt_d / powi(d, t.k)));
            }
            acc.add(o.weight * nu_m * inner.value());
        }
        acc.value()
    }

    /// Double-double evaluation of [`DerivativeTable::eval`].
    pub fn eval_dd(&self, nu: DoubleDouble, c: DoubleDouble, s: DoubleDouble) -> DoubleDouble {
        let one = DoubleDouble::ONE;
        let two = DoubleDouble::from_f64(2.0);
        let c2 = c.sqr();
        let d = one - nu.sqr() * c2;
        let e = one - two * nu * c2;
        let f = one - two * c2;
        let sqrt_d = d.sqrt();
        let mut acc = DoubleDouble::ZERO;
        for o in &self.outer {
            let nu_m = nu.powi(o.m);
            let mut inner = DoubleDouble::ZERO;
            for t in &o.inner {
                inner = inner + t.int_dd * s.powi(t.s_pow) * e.powi(t.e_pow) * f.powi(t.f_pow) * (sqrt_d / d.powi(t.k));
            }
            acc = acc + o.weight_dd * nu_m * inner;
        }
        acc
    }

    #[allow(dead_code)]
    fn integers(&self) -> impl Iterator<Item = i128> + '_ {
        self.outer.iter().flat_map(|o| o.inner.iter().map(|t| t.int))
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::NuOutOfRange(nu, "[0, 1)"));
    }
    Ok(())
}

fn check_mode(size: usize, r: usize, sector: Sector) -> Result<()> {
    check_size(size)?;
    let ok = match sector {
        Sector::Even => r < size / 2,
        Sector::Odd => r >= 1 && r < size / 2,
    };
    if !ok {
        return Err(Error::ModeOutOfRange { r, size });
    }
    Ok(())
}

fn half_angle_dd(size: usize, r: usize, sector: Sector) -> DoubleDouble {
    let num = match sector {
        Sector::Even => (2 * r + 1) as f64,
        Sector::Odd => (2 * r) as f64,
    };
    DoubleDouble::PI * DoubleDouble::from_f64(num) / DoubleDouble::from_f64((2 * size) as f64)
}

fn mode_derivative(
    table: &DerivativeTable,
    extended: bool,
    nu: f64,
    size: usize,
    r: usize,
    sector: Sector,
) -> DoubleDouble {
    if extended {
        let (s, c) = half_angle_dd(size, r, sector).sin_cos();
        table.eval_dd(DoubleDouble::from_f64(nu), c, s)
    } else {
        let theta = half_angle(size, r, sector);
        DoubleDouble::from_f64(table.eval(nu, libm::cos(theta), libm::sin(theta)))
    }
}

/// `λ^(n)_{L,r} = d^n Λ_{L,r}/ds^n` at `s_c`, for `w = 1/2`.
pub fn lambda_derivative(nu: f64, size: usize, r: usize, n: usize) -> Result<f64> {
    lambda_derivative_with(nu, size, r, n, Sector::Even, Precision::Auto)
}

/// [`lambda_derivative`] with explicit sector and precision. Odd-sector
/// modes use `r = 1 ..= L/2 - 1`; the zero mode is handled by
/// [`critical_cumulant_with`].
pub fn lambda_derivative_with(
    nu: f64,
    size: usize,
    r: usize,
    n: usize,
    sector: Sector,
    precision: Precision,
) -> Result<f64> {
    check_nu(nu)?;
    check_mode(size, r, sector)?;
    let table = DerivativeTable::new(n)?;
    let extended = table.resolve(precision)?;
    Ok(mode_derivative(&table, extended, nu, size, r, sector).to_f64())
}

/// `κ^c_n(L) = (2/L) Σ_r λ^(n)_{L,r}` in the even sector.
pub fn critical_cumulant(nu: f64, size: usize, n: usize) -> Result<f64> {
    critical_cumulant_with(nu, size, n, Sector::Even, Precision::Auto)
}

pub fn critical_cumulant_with(nu: f64, size: usize, n: usize, sector: Sector, precision: Precision) -> Result<f64> {
    check_nu(nu)?;
    check_size(size)?;
    let table = DerivativeTable::new(n)?;
    let extended = table.resolve(precision)?;
    let first = match sector {
        Sector::Even => 0,
        Sector::Odd => 1,
    };
    let total = if extended {
        let mut acc = DoubleDouble::ZERO;
        for r in first..size / 2 {
            acc = acc + mode_derivative(&table, true, nu, size, r, sector);
        }
        acc.to_f64()
    } else {
        let mut acc = CompensatedSum::new();
        for r in first..size / 2 {
            acc.add(mode_derivative(&table, false, nu, size, r, sector).hi);
        }
        acc.value()
    };
    // Odd zero mode: every derivative of J_s = e^s/2 + mu is e^{s_c}/2 = nu/2.
    let zero_mode = if sector == Sector::Odd { nu / 2.0 } else { 0.0 };
    Ok(2.0 * (total + zero_mode) / size as f64)
}

/// Mode energy at `s_c` together with its first `n_max` tilt derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionPoint {
    pub size: usize,
    pub r: usize,
    pub lambda0: f64,
    /// `lambda_n[i]` holds `λ^(i+1)`.
    pub lambda_n: Vec<f64>,
}

impl DispersionPoint {
    pub fn new(nu: f64, size: usize, r: usize, n_max: usize) -> Result<Self> {
        let lambda0 = crate::model::critical_dispersion(nu, size, r)?;
        let lambda_n = (1..=n_max).map(|n| lambda_derivative(nu, size, r, n)).collect::<Result<Vec<_>>>()?;
        Ok(Self { size, r, lambda0, lambda_n })
    }
}

/// Truncated `K^c_L(x) = K_L(s_c + x) - K_L(s_c) ≈ Σ_{n<=n_max} κ^c_n x^n / n!`.
pub fn critical_cgf_expansion(nu: f64, size: usize, x: f64, n_max: usize) -> Result<f64> {
    if x == 0.0 {
        check_nu(nu)?;
        check_size(size)?;
        return Ok(0.0);
    }
    let mut acc = CompensatedSum::new();
    let mut x_pow = 1.0;
    let mut fact = 1.0;
    for n in 1..=n_max {
        x_pow *= x;
        fact *= n as f64;
        acc.add(critical_cumulant(nu, size, n)? * x_pow / fact);
    }
    Ok(acc.value())
}

/// Finite-size cumulant with its asymptotic coefficient and an optional
/// oracle residual.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantReport {
    pub nu: f64,
    pub size: usize,
    pub sector: Sector,
    pub order: usize,
    pub kappa_c: f64,
    pub kappa_star: Option<f64>,
    pub residual: Option<f64>,
}

impl CumulantReport {
    pub fn new(nu: f64, size: usize, order: usize, sector: Sector) -> Result<Self> {
        if order == 0 {
            return Err(Error::OrderOutOfRange { order, min: 1, max: MAX_ORDER });
        }
        let kappa_c = critical_cumulant_with(nu, size, order, sector, Precision::Auto)?;
        let kappa_star = match sector {
            Sector::Even => crate::asymptotics::kappa_star(order, nu).ok(),
            Sector::Odd => None,
        };
        Ok(Self { nu, size, sector, order, kappa_c, kappa_star, residual: None })
    }

    /// Attaches `kappa_c - oracle`.
    pub fn with_oracle(mut self, oracle: f64) -> Self {
        self.residual = Some(self.kappa_c - oracle);
        self
    }
}
