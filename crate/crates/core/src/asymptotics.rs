//! Large-`L` behaviour at the critical tilt: bulk constants, the universal
//! cumulant coefficients and the near-critical scaling functions.
//!
//! Normalization: the exact finite-size sums give
//! `κ*_n = 2 n! α_{⌊n/2⌋} β_n` for `n >= 2`. The helper
//! [`kappa_star_uncalibrated`] returns `n! α β` for comparison and
//! [`KAPPA_STAR_CALIBRATION`] is the ratio between the two.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::cgf::critical_cumulant;
use crate::combinatorics::{half_binomial, odd_reciprocal_tail, powi, rational_to_f64, zeta_odd, HalfInt};
use crate::dd::DoubleDouble;
use crate::model::{check_size, dispersion_dd, ModelParams, Sector};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Central charge of the critical point.
pub const CENTRAL_CHARGE: f64 = 0.5;
/// `κ*_n / (n! α_{⌊n/2⌋} β_n)`, fixed against exact sums.
pub const KAPPA_STAR_CALIBRATION: f64 = 2.0;
/// Highest order accepted by [`beta`] and [`kappa_star`].
pub const MAX_UNIVERSAL_ORDER: usize = 40;
/// Default truncation tolerance of the scaling functions.
pub const DEFAULT_SCALING_TOL: f64 = 1e-13;

fn check_closed(nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::NuOutOfRange(nu, "[0, 1]"));
    }
    Ok(())
}

fn check_half_open(nu: f64) -> Result<()> {
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::NuOutOfRange(nu, "[0, 1)"));
    }
    Ok(())
}

/// `arcsin(ν)/ν`, continuous at 0.
fn asin_over(nu: f64) -> f64 {
    if nu.abs() < 1e-4 {
        let n2 = nu * nu;
        1.0 + n2 / 6.0 + 3.0 * n2 * n2 / 40.0
    } else {
        libm::asin(nu) / nu
    }
}

/// Bulk critical cgf `κ*_0 = ν/2 - 1 + (arcsin ν/ν + √(1-ν²))/π`.
pub fn kappa0_star(nu: f64) -> Result<f64> {
    check_closed(nu)?;
    Ok(nu / 2.0 - 1.0 + (asin_over(nu) + libm::sqrt(1.0 - nu * nu)) / PI)
}

/// `ξ = 1/√(1-ν²)`.
pub fn sound_velocity(nu: f64) -> Result<f64> {
    check_half_open(nu)?;
    Ok(1.0 / libm::sqrt(1.0 - nu * nu))
}

/// Bulk critical mean activity `κ*_1 = (√(1-ν²) - (1-ν) arcsin ν / ν)/π`.
pub fn kappa1_star(nu: f64) -> Result<f64> {
    check_half_open(nu)?;
    Ok((libm::sqrt(1.0 - nu * nu) - (1.0 - nu) * asin_over(nu)) / PI)
}

/// Slope of `κ^c_2(L)` against `ln L`.
pub fn variance_slope(nu: f64) -> Result<f64> {
    check_half_open(nu)?;
    Ok(nu * nu / (2.0 * PI * libm::sqrt(1.0 - nu * nu)))
}

/// Leading coefficient of `κ^c_3(L)` against `ln L`.
pub fn third_cumulant_slope(nu: f64) -> Result<f64> {
    check_half_open(nu)?;
    let d = 1.0 - nu * nu;
    Ok(0.75 * nu * nu * (2.0 - nu) / (PI * d * libm::sqrt(d)))
}

/// Leading large-`L` skewness `κ_3 / κ_2^{3/2}`.
pub fn skewness_asymptotic(nu: f64, size: usize) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::NuOutOfRange(nu, "(0, 1)"));
    }
    if size < 2 {
        return Err(Error::InvalidSize(size));
    }
    let d = 1.0 - nu * nu;
    let ln_l = libm::log(size as f64);
    Ok(3.0 * (2.0 - nu) / (nu * libm::pow(d, 0.75)) * libm::sqrt(PI / (2.0 * ln_l)))
}

/// `α_1 = 1/(2π)`, `α_n = (1 - 2^{1-2n}) ζ(2n-1) / π^{2n-1}`.
pub fn alpha(n: usize) -> Result<f64> {
    if n == 0 || n > MAX_UNIVERSAL_ORDER {
        return Err(Error::OrderOutOfRange { order: n, min: 1, max: MAX_UNIVERSAL_ORDER });
    }
    if n == 1 {
        return Ok(1.0 / (2.0 * PI));
    }
    let p = 2 * n as i32 - 1;
    Ok((1.0 - libm::ldexp(1.0, 1 - 2 * n as i32)) * zeta_odd(n as u32)? / powi(PI, p))
}

/// `β_n(ν)`, with `C(-1/2, -1) = 0`.
pub fn beta(n: usize, nu: f64) -> Result<f64> {
    check_half_open(nu)?;
    if n > MAX_UNIVERSAL_ORDER {
        return Err(Error::OrderOutOfRange { order: n, min: 0, max: MAX_UNIVERSAL_ORDER });
    }
    let d = 1.0 - nu * nu;
    let sd = libm::sqrt(d);
    let m = (n / 2) as u32;
    let nu2m = powi(nu, 2 * m as i32);
    if n % 2 == 0 {
        let c = rational_to_f64(&half_binomial(HalfInt::Plus, m)?);
        // (1-ν²)^{m-1/2}
        Ok(nu2m * c * sd / (2.0 * powi(d, m as i32)))
    } else {
        let c0 = rational_to_f64(&half_binomial(HalfInt::Minus, m)?);
        let c1 = if m == 0 { 0.0 } else { rational_to_f64(&half_binomial(HalfInt::Minus, m - 1)?) };
        let bracket = nu * (1.0 - 2.0 * nu) * c0 + d * c1;
        Ok(nu2m * bracket / (4.0 * powi(d, m as i32) * sd))
    }
}

fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `n! α_{⌊n/2⌋} β_n` as printed, without the calibration factor.
pub fn kappa_star_uncalibrated(n: usize, nu: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::OrderOutOfRange { order: n, min: 2, max: MAX_UNIVERSAL_ORDER });
    }
    Ok(factorial(n) * alpha(n / 2)? * beta(n, nu)?)
}

/// Universal coefficient `κ*_n`.
///
/// `n = 0, 1` are the bulk values. For even `n >= 4`, `κ^c_n(L) ~ κ*_n L^{n-2}`;
/// `n = 2, 3` multiply `ln L`; odd `n >= 5` multiply `L^{n-3}`.
pub fn kappa_star(n: usize, nu: f64) -> Result<f64> {
    match n {
        0 => kappa0_star(nu),
        1 => kappa1_star(nu),
        _ => Ok(KAPPA_STAR_CALIBRATION * kappa_star_uncalibrated(n, nu)?),
    }
}

/// Power of `L` (or `ln L` when zero) multiplying `κ*_n` in `κ^c_n(L)`.
pub fn growth_exponent(n: usize) -> i32 {
    match n {
        0..=3 => 0,
        _ if n % 2 == 0 => n as i32 - 2,
        _ => n as i32 - 3,
    }
}

/// Bulk constants and coefficient tables at one `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalCoeffs {
    pub nu: f64,
    pub xi: f64,
    pub c: f64,
    pub kappa0_star: f64,
    pub kappa1_star: f64,
    /// `alpha_n[i]` is `α_{i+1}`.
    pub alpha_n: Vec<f64>,
    /// `beta_n[i]` is `β_i`.
    pub beta_n: Vec<f64>,
    /// `kappa_star_n[i]` is `κ*_i`.
    pub kappa_star_n: Vec<f64>,
}

impl UniversalCoeffs {
    pub fn new(nu: f64, n_max: usize) -> Result<Self> {
        if n_max > MAX_UNIVERSAL_ORDER {
            return Err(Error::OrderOutOfRange { order: n_max, min: 0, max: MAX_UNIVERSAL_ORDER });
        }
        let alpha_n = (1..=n_max.max(1) / 2 + 1).map(alpha).collect::<Result<Vec<_>>>()?;
        let beta_n = (0..=n_max).map(|n| beta(n, nu)).collect::<Result<Vec<_>>>()?;
        let kappa_star_n = (0..=n_max).map(|n| kappa_star(n, nu)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            nu,
            xi: sound_velocity(nu)?,
            c: CENTRAL_CHARGE,
            kappa0_star: kappa_star_n[0],
            kappa1_star: kappa_star_n.get(1).copied().unwrap_or(kappa1_star(nu)?),
            alpha_n,
            beta_n,
            kappa_star_n,
        })
    }
}

/// Asymptotic expansion of the summand tail `Σ_{r>=r0} t_r`, where
/// `t_r = Σ_j coeff[j] a_r^{-(2j+3)}`, `a_r = π(2r+1)`.
fn odd_power_tail(coeffs: &[f64], r0: u64) -> Result<f64> {
    let mut acc = 0.0;
    for (j, c) in coeffs.iter().enumerate() {
        let p = 2 * j as u32 + 3;
        acc += c * odd_reciprocal_tail(p, r0)? / powi(PI, p as i32);
    }
    Ok(acc)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    Ok(())
}

/// Cut-off `r_max` such that the first order dropped from the tail
/// expansion, about `lead u^2 (u/a)^8`, is below `tol`.
fn cutoff(u: f64, tol: f64, lead: f64) -> u64 {
    let mut r = 16u64.max(libm::ceil(2.0 * u.abs()) as u64);
    loop {
        let a = PI * (2 * r + 1) as f64;
        let y = (u / a) * (u / a);
        if lead * u * u * y * y * y * y < tol || r > 1 << 24 {
            return r;
        }
        r *= 2;
    }
}

/// Universal scaling function
/// `h(u) = Σ_{r>=0} (√(u² + a_r²) - a_r - u²/(2 a_r))`, `a_r = π(2r+1)`.
pub fn h_scaling(u: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if u == 0.0 {
        return Ok(0.0);
    }
    h_scaling_with_cutoff(u, cutoff(u, tol, 1.0))
}

/// [`h_scaling`] with an explicit number of directly summed terms.
pub fn h_scaling_with_cutoff(u: f64, r_max: u64) -> Result<f64> {
    if r_max == 0 {
        return Err(Error::InvalidArgument("r_max must be positive"));
    }
    let u2 = u * u;
    let mut acc = CompensatedSum::new();
    for r in (0..r_max).rev() {
        let a = PI * (2 * r + 1) as f64;
        let q = libm::sqrt(u2 + a * a) + a;
        acc.add(-u2 * u2 / (2.0 * a * q * q));
    }
    // C(1/2, k) u^{2k} a^{1-2k} for k = 2, 3, 4.
    let u4 = u2 * u2;
    acc.add(odd_power_tail(&[-u4 / 8.0, u4 * u2 / 16.0, -5.0 * u4 * u4 / 128.0], r_max)?);
    Ok(acc.value())
}

/// Non-universal odd scaling function
/// `g(u) = Σ_r (ǧ_r(u) - 2β_1 a_r u - 2β_3 u³/a_r)` with
/// `ǧ_r(u) = u (ν²u² + ν(1-2ν) a_r²) / (2 √(ν²u² + (1-ν²) a_r²))`.
pub fn g_scaling(u: f64, nu: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::NuOutOfRange(nu, "(0, 1)"));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let d = 1.0 - nu * nu;
    g_scaling_with_cutoff(u, nu, cutoff(nu * u / libm::sqrt(d), tol, u.abs() / libm::sqrt(d)))
}

/// [`g_scaling`] with an explicit number of directly summed terms.
pub fn g_scaling_with_cutoff(u: f64, nu: f64, r_max: u64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::NuOutOfRange(nu, "(0, 1)"));
    }
    if r_max == 0 {
        return Err(Error::InvalidArgument("r_max must be positive"));
    }
    let d = 1.0 - nu * nu;
    let sd = libm::sqrt(d);
    let b = nu * (1.0 - 2.0 * nu);
    let t = nu * nu * u * u;
    let mut acc = CompensatedSum::new();
    for r in (0..r_max).rev() {
        let a = PI * (2 * r + 1) as f64;
        let p = sd * a;
        let x = t / (p * p);
        let y = libm::sqrt(1.0 + x);
        // 1/√(1+x) - 1 + x/2 without cancellation
        let rem = x * x * (y + 2.0) / (2.0 * y * (1.0 + y) * (1.0 + y));
        acc.add(u / (2.0 * p) * (-t * x / 2.0 + (t + b * a * a) * rem));
    }
    // Term of order a^{-(2j+1)}: u t^{j+1} (c_j + c_{j+1} b/(1-ν²)) / (2 (1-ν²)^{j+1/2}),
    // c_j the coefficients of (1+x)^{-1/2}.
    const C: [f64; 5] = [1.0, -0.5, 0.375, -0.3125, 0.2734375];
    let coeffs: Vec<f64> = (1..=3)
        .map(|j| u * powi(t, j as i32 + 1) * (C[j] + C[j + 1] * b / d) / (2.0 * powi(d, j as i32) * sd))
        .collect();
    acc.add(odd_power_tail(&coeffs, r_max)?);
    Ok(acc.value())
}

/// `K_L(s)` in double-double.
fn cgf_dd(p: &ModelParams, s: DoubleDouble, size: usize) -> Result<DoubleDouble> {
    let mut acc = DoubleDouble::ZERO;
    for r in 0..size / 2 {
        acc = acc + dispersion_dd(p, s, size, r, Sector::Even)?;
    }
    let two_over_l = DoubleDouble::from_f64(2.0) / DoubleDouble::from_f64(size as f64);
    Ok(acc * two_over_l - DoubleDouble::from_f64(p.w() + p.mu()))
}

struct ScalingInputs {
    p: ModelParams,
    s_c: DoubleDouble,
    xi: f64,
    k1: f64,
    k2: f64,
}

fn scaling_inputs(nu: f64, size: usize) -> Result<ScalingInputs> {
    check_size(size)?;
    let p = ModelParams::from_nu(nu)?;
    let w = DoubleDouble::from_f64(p.w());
    let mu = DoubleDouble::from_f64(p.mu());
    let s_c = (DoubleDouble::ONE - mu / w).ln();
    Ok(ScalingInputs {
        p,
        s_c,
        xi: sound_velocity(nu)?,
        k1: critical_cumulant(nu, size, 1)?,
        k2: critical_cumulant(nu, size, 2)?,
    })
}

fn scaled_remainder(inp: &ScalingInputs, size: usize, u: f64, reference: DoubleDouble) -> Result<f64> {
    let lf = size as f64;
    let x = DoubleDouble::from_f64(u) / DoubleDouble::from_f64(lf);
    let k = cgf_dd(&inp.p, inp.s_c + x, size)?;
    let lin = x * DoubleDouble::from_f64(inp.k1);
    let quad = x.sqr() * DoubleDouble::from_f64(inp.k2 / 2.0);
    let rest = k - reference - lin - quad;
    Ok(inp.xi * lf * lf * rest.to_f64())
}

/// `L² K_0(L, u) = ξ L² [K_L(s_c + u/L) - κ*_0 - (u/L) κ^c_1 - (u²/2L²) κ^c_2]`.
pub fn k0_scaled(nu: f64, size: usize, u: f64) -> Result<f64> {
    let inp = scaling_inputs(nu, size)?;
    let k0 = DoubleDouble::from_f64(kappa0_star(nu)?);
    scaled_remainder(&inp, size, u, k0)
}

/// `L² K̃_0(L, u)`: as [`k0_scaled`] with `κ*_0` replaced by `K_L(s_c)`.
/// Vanishes identically at `u = 0`.
pub fn k0_tilde(nu: f64, size: usize, u: f64) -> Result<f64> {
    let inp = scaling_inputs(nu, size)?;
    let k_c = cgf_dd(&inp.p, inp.s_c, size)?;
    scaled_remainder(&inp, size, u, k_c)
}

/// `ϑ = √(ξ² - 1) = ν/√(1-ν²)`.
pub fn theta(nu: f64) -> Result<f64> {
    check_half_open(nu)?;
    Ok(nu / libm::sqrt(1.0 - nu * nu))
}

/// Provenance of the samples in a [`ScalingCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// `L² K̃_0(L, u)` from exact sums.
    FiniteL(usize),
    /// `h(ϑ u)`.
    LimitH,
    /// `π c / 6 + h(ϑ u)`, the limit of `L² K_0`.
    LimitPlusConstant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCurve {
    pub nu: f64,
    pub kind: CurveKind,
    pub samples: Vec<(f64, f64)>,
}

impl ScalingCurve {
    pub fn finite_l(nu: f64, size: usize, us: &[f64]) -> Result<Self> {
        let inp = scaling_inputs(nu, size)?;
        let k_c = cgf_dd(&inp.p, inp.s_c, size)?;
        let samples =
            us.iter().map(|&u| scaled_remainder(&inp, size, u, k_c).map(|v| (u, v))).collect::<Result<Vec<_>>>()?;
        Ok(Self { nu, kind: CurveKind::FiniteL(size), samples })
    }

    pub fn limit_h(nu: f64, us: &[f64], tol: f64) -> Result<Self> {
        let th = theta(nu)?;
        let samples = us.iter().map(|&u| h_scaling(th * u, tol).map(|v| (u, v))).collect::<Result<Vec<_>>>()?;
        Ok(Self { nu, kind: CurveKind::LimitH, samples })
    }

    pub fn limit_plus_constant(nu: f64, us: &[f64], tol: f64) -> Result<Self> {
        let mut c = Self::limit_h(nu, us, tol)?;
        let shift = PI * CENTRAL_CHARGE / 6.0;
        for s in &mut c.samples {
            s.1 += shift;
        }
        c.kind = CurveKind::LimitPlusConstant;
        Ok(c)
    }

    /// Curve with `v(u)` replaced by `(v(u) + v(-u)) / 2`. Every `-u` must be
    /// sampled as well.
    pub fn even_part(&self) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|&(u, v)| {
                self.value_at(-u)
                    .map(|m| (u, 0.5 * (v + m)))
                    .ok_or(Error::InvalidArgument("grid is not symmetric in u"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { nu: self.nu, kind: self.kind, samples })
    }

    pub fn value_at(&self, u: f64) -> Option<f64> {
        self.samples.iter().find(|s| s.0 == u).map(|s| s.1)
    }
}

/// Largest `|a(u) - b(u)|` over all curve pairs and shared sample points.
pub fn max_pairwise_spread(curves: &[ScalingCurve]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            for &(u, va) in &a.samples {
                if let Some(vb) = b.value_at(u) {
                    worst = worst.max((va - vb).abs());
                }
            }
        }
    }
    worst
}

/// Symmetric grid of `steps` points on `[u_min, u_max]`.
pub fn linear_grid(u_min: f64, u_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || u_min.partial_cmp(&u_max).is_none_or(|o| o.is_gt()) {
        return Err(Error::InvalidArgument("need steps >= 1 and u_min <= u_max"));
    }
    if steps == 1 {
        return Ok(alloc::vec![u_min]);
    }
    let h = (u_max - u_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            // Snap so that symmetric grids contain exact negatives and zero.
            let v = u_min + i as f64 * h;
            let j = steps - 1 - i;
            let mirror = u_max - j as f64 * h;
            if i < steps / 2 {
                v
            } else {
                mirror
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgf::{cgf, critical_cumulant_with, mean_activity, Precision};
    use crate::model::critical_point;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn bulk_constants_examples() {
        assert!((kappa0_star(0.0).unwrap() - (2.0 / PI - 1.0)).abs() < 1e-15);
        assert!(kappa0_star(1.0).unwrap().abs() < 1e-15);
        assert!((kappa0_star(1e-9).unwrap() - kappa0_star(0.0).unwrap()).abs() < 1e-9);
        assert_eq!(sound_velocity(0.0).unwrap(), 1.0);
        assert!(sound_velocity(1.0).is_err());
        assert!(kappa1_star(1.0).is_err());
        assert!(kappa1_star(0.0).unwrap().abs() < 1e-16);
        assert!(kappa1_star(1e-6).unwrap().abs() < 1e-6);
        assert!((kappa1_star(0.5).unwrap() - 0.108_997_781_044_229_33).abs() < 1e-15);
        assert!((kappa1_star(0.9).unwrap() - 0.099_144_317_452_586_17).abs() < 1e-15);
        assert!((kappa1_star(0.3).unwrap() - 0.077_346_015_914_368_09).abs() < 1e-15);
        assert_eq!(variance_slope(0.0).unwrap(), 0.0);
        assert!((variance_slope(0.9).unwrap() - 0.295_752_449_355_292_8).abs() < 1e-15);
        assert!(skewness_asymptotic(0.0, 64).is_err());
        let sk: Vec<f64> =
            [1usize << 8, 1 << 16, 1 << 30].iter().map(|&l| skewness_asymptotic(0.5, l).unwrap()).collect();
        assert!(sk[0] > sk[1] && sk[1] > sk[2] && sk[2] > 0.0);
    }

    #[test]
    fn bulk_constants_match_extrapolated_sums() {
        // Corrections go as L^-2 then L^-4: two Richardson levels.
        for &nu in &[0.3, 0.5, 0.9] {
            let p = ModelParams::from_nu(nu).unwrap();
            let sc = critical_point(&p).unwrap();
            let k: Vec<f64> = [256, 512, 1024].iter().map(|&l| cgf(&p, sc, l, Sector::Even).unwrap()).collect();
            let a: Vec<f64> = [256, 512, 1024].iter().map(|&l| mean_activity(&p, sc, l).unwrap()).collect();
            let rich = |v: &[f64]| {
                let r1 = (4.0 * v[1] - v[0]) / 3.0;
                let r2 = (4.0 * v[2] - v[1]) / 3.0;
                (16.0 * r2 - r1) / 15.0
            };
            assert!((rich(&k) - kappa0_star(nu).unwrap()).abs() < 1e-8);
            assert!((rich(&a) - kappa1_star(nu).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn low_order_coefficients() {
        assert!((alpha(1).unwrap() - 0.159_154_9).abs() < 1e-7);
        let nu: f64 = 0.6;
        let d = 1.0 - nu * nu;
        assert!((beta(0, nu).unwrap() - d.sqrt() / 2.0).abs() < 1e-16);
        assert!((beta(1, nu).unwrap() - nu * (1.0 - 2.0 * nu) / (4.0 * d.sqrt())).abs() < 1e-16);
        assert!((beta(4, nu).unwrap() + nu.powi(4) / (16.0 * d.powf(1.5))).abs() < 1e-15);
        assert!((beta(3, nu).unwrap() - nu * nu * (2.0 - nu) / (8.0 * d.powf(1.5))).abs() < 1e-15);
        assert!((kappa_star(2, nu).unwrap() - variance_slope(nu).unwrap()).abs() < 1e-15);
        assert!((kappa_star(3, nu).unwrap() - third_cumulant_slope(nu).unwrap()).abs() < 1e-15);
        assert_eq!(kappa_star(2, nu).unwrap(), 2.0 * kappa_star_uncalibrated(2, nu).unwrap());
        let a2 = 7.0 / 8.0 * 1.202_056_903_159_594_3 / PI.powi(3);
        assert!(rel(alpha(2).unwrap(), a2) < 1e-14);
    }

    #[test]
    fn even_coefficients_alternate_in_sign() {
        for &nu in &[0.2, 0.7, 0.95] {
            for m in 2..=12 {
                let k = kappa_star(2 * m, nu).unwrap();
                let c = half_binomial(HalfInt::Plus, m as u32).unwrap();
                assert_eq!(k > 0.0, c > crate::combinatorics::Rational::from_integer(0));
                let next = kappa_star(2 * m + 2, nu).unwrap();
                assert!(k * next < 0.0);
            }
        }
    }

    #[test]
    fn variance_grows_with_predicted_slope() {
        let nu = 0.9;
        let k = |l: usize| critical_cumulant(nu, l, 2).unwrap();
        let slope = (k(1 << 14) - k(1 << 12)) / 4f64.ln();
        assert!(rel(slope, variance_slope(nu).unwrap()) < 1e-3, "{slope}");
    }

    #[test]
    fn third_cumulant_grows_with_predicted_slope() {
        let nu = 0.6;
        let k = |l: usize| critical_cumulant(nu, l, 3).unwrap();
        let slope = (k(1 << 14) - k(1 << 12)) / 4f64.ln();
        assert!(rel(slope, third_cumulant_slope(nu).unwrap()) < 1e-3, "{slope}");
    }

    #[test]
    fn higher_even_cumulants_converge_to_kappa_star() {
        for &nu in &[0.5, 0.9] {
            for n in [4usize, 6, 8] {
                let l = 1usize << 11;
                let v = critical_cumulant(nu, l, n).unwrap() / (l as f64).powi(n as i32 - 2);
                assert!(rel(v, kappa_star(n, nu).unwrap()) < 1e-3, "nu={nu} n={n}: {v}");
            }
        }
    }

    #[test]
    fn higher_odd_cumulants_converge_to_kappa_star() {
        let nu = 0.9;
        for n in [5usize, 7] {
            let ratio = |l: usize| {
                critical_cumulant_with(nu, l, n, Sector::Even, Precision::Auto).unwrap() / (l as f64).powi(n as i32 - 3)
            };
            let target = kappa_star(n, nu).unwrap();
            let e1 = (ratio(1 << 9) - target).abs();
            let e2 = (ratio(1 << 11) - target).abs();
            assert!(e2 < e1);
            assert!(e2 < 2e-2 * target.abs(), "n={n}: {} vs {target}", ratio(1 << 11));
        }
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_scaling(0.0, 1e-12).unwrap(), 0.0);
        for &u in &[0.3, 1.0, 4.0, 11.0] {
            assert_eq!(h_scaling(u, 1e-12).unwrap(), h_scaling(-u, 1e-12).unwrap());
        }
        let u: f64 = 0.05;
        let lead = -7.0 * 1.202_056_903_159_594_3 / (64.0 * PI.powi(3));
        assert!((lead + 0.004_240_2).abs() < 1e-7);
        assert!(rel(h_scaling(u, 1e-16).unwrap(), lead * u.powi(4)) < 1e-3);
        assert!(h_scaling(1.0, 0.0).is_err());
    }

    #[test]
    fn h_cutoff_doubling() {
        for &u in &[0.5, 2.0, 6.0, 20.0] {
            let tol = 1e-12;
            let r = cutoff(u, tol, 1.0);
            let a = h_scaling_with_cutoff(u, r).unwrap();
            let b = h_scaling_with_cutoff(u, 2 * r).unwrap();
            assert!((a - b).abs() < tol, "u={u}: {a} vs {b}");
        }
    }

    #[test]
    fn h_taylor_matches_even_coefficients() {
        // Σ κ*_{2n} u^{2n}/(2n)! = √(1-ν²) h(ϑu) for n >= 2.
        let nu: f64 = 0.7;
        let th = theta(nu).unwrap();
        let u: f64 = 0.4;
        let mut series = 0.0;
        for m in 2..=12 {
            series += kappa_star(2 * m, nu).unwrap() * u.powi(2 * m as i32) / factorial(2 * m);
        }
        let h = (1.0 - nu * nu).sqrt() * h_scaling(th * u, 1e-16).unwrap();
        assert!(rel(series, h) < 1e-10, "{series} vs {h}");
    }

    #[test]
    fn g_taylor_matches_odd_coefficients() {
        let nu: f64 = 0.7;
        let u: f64 = 0.4;
        let mut series = 0.0;
        for m in 2..=12 {
            let n = 2 * m + 1;
            series += kappa_star(n, nu).unwrap() * u.powi(n as i32) / factorial(n);
        }
        let g = g_scaling(u, nu, 1e-16).unwrap();
        assert!(rel(series, g) < 1e-9, "{series} vs {g}");
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_scaling(0.0, 0.5, 1e-12).unwrap(), 0.0);
        for &u in &[0.3, 2.5, 9.0] {
            assert_eq!(g_scaling(-u, 0.6, 1e-12).unwrap(), -g_scaling(u, 0.6, 1e-12).unwrap());
            let d = 1.0 - 0.36;
            let r = cutoff(0.6 * u / libm::sqrt(d), 1e-12, u / libm::sqrt(d));
            let a = g_scaling_with_cutoff(u, 0.6, r).unwrap();
            let b = g_scaling_with_cutoff(u, 0.6, 2 * r).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        assert!(g_scaling(1.0, 0.0, 1e-12).is_err());
    }

    #[test]
    fn scaled_cgf_at_zero() {
        for &nu in &[0.3, 0.9] {
            assert_eq!(k0_tilde(nu, 64, 0.0).unwrap(), 0.0);
            let v = k0_scaled(nu, 1024, 0.0).unwrap();
            assert!(rel(v, PI / 12.0) < 1e-5, "{v}");
        }
        assert!(k0_tilde(0.9, 63, 1.0).is_err());
    }

    #[test]
    fn scaled_cgf_even_part_approaches_h() {
        let nu = 0.9;
        let th = theta(nu).unwrap();
        let err = |l: usize| {
            let e = 0.5 * (k0_tilde(nu, l, 2.0).unwrap() + k0_tilde(nu, l, -2.0).unwrap());
            (e - h_scaling(2.0 * th, 1e-14).unwrap()).abs()
        };
        let (a, b, c) = (err(64), err(128), err(256));
        assert!(b < a && c < b, "{a} {b} {c}");
    }

    #[test]
    fn scaled_cgf_odd_part_matches_g_over_l() {
        // (v(u) - v(-u))/2 ≈ ξ g-type correction / L up to logs; just check the
        // scaled odd part shrinks.
        let nu = 0.9;
        let odd = |l: usize| 0.5 * (k0_tilde(nu, l, 2.0).unwrap() - k0_tilde(nu, l, -2.0).unwrap());
        assert!(odd(256).abs() < odd(64).abs());
    }

    #[test]
    fn k0_tilde_matches_plain_double_sum() {
        let nu = 0.5;
        let p = ModelParams::from_nu(nu).unwrap();
        let sc = critical_point(&p).unwrap();
        let l = 32;
        let u = 1.5;
        let x = u / l as f64;
        let direct = sound_velocity(nu).unwrap()
            * (l * l) as f64
            * (cgf(&p, sc + x, l, Sector::Even).unwrap()
                - cgf(&p, sc, l, Sector::Even).unwrap()
                - x * critical_cumulant(nu, l, 1).unwrap()
                - x * x / 2.0 * critical_cumulant(nu, l, 2).unwrap());
        assert!((direct - k0_tilde(nu, l, u).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn curves_and_spread() {
        let us = linear_grid(-3.0, 3.0, 7).unwrap();
        assert_eq!(us, [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let h = ScalingCurve::limit_h(0.9, &us, 1e-12).unwrap();
        let hc = ScalingCurve::limit_plus_constant(0.9, &us, 1e-12).unwrap();
        assert!((max_pairwise_spread(&[h.clone(), hc]) - PI / 12.0).abs() < 1e-15);
        assert_eq!(h.even_part().unwrap(), h);
        let f = ScalingCurve::finite_l(0.9, 64, &us).unwrap();
        assert_eq!(f.kind, CurveKind::FiniteL(64));
        assert_eq!(f.value_at(0.0), Some(0.0));
        let partial = ScalingCurve { nu: 0.9, kind: CurveKind::LimitH, samples: alloc::vec![(1.0, 0.0)] };
        assert!(partial.even_part().is_err());
    }

    #[test]
    fn universal_coeffs_bundle() {
        let c = UniversalCoeffs::new(0.5, 8).unwrap();
        assert_eq!(c.c, 0.5);
        assert!(c.xi >= 1.0);
        assert_eq!(c.kappa_star_n.len(), 9);
        assert_eq!(c.beta_n[0], beta(0, 0.5).unwrap());
        assert_eq!(c.alpha_n[0], alpha(1).unwrap());
        assert_eq!(c.kappa1_star, kappa1_star(0.5).unwrap());
    }

    proptest! {
        #[test]
        fn h_is_even_and_nonpositive(u in -30.0f64..30.0) {
            let a = h_scaling(u, 1e-12).unwrap();
            prop_assert_eq!(a, h_scaling(-u, 1e-12).unwrap());
            prop_assert!(a <= 0.0);
        }

        #[test]
        fn g_is_odd(u in -10.0f64..10.0, nu in 0.05f64..0.95) {
            prop_assert_eq!(g_scaling(-u, nu, 1e-12).unwrap(), -g_scaling(u, nu, 1e-12).unwrap());
        }
    }
}
