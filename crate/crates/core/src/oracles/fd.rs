//! Finite-difference derivatives of the exact generating function.
//!
//! Functions are evaluated in double-double arithmetic, so the difference
//! quotients keep about 20 digits even at order six. Central differences on
//! the stencil `x + (n/2 - j) h`, `j = 0..=n`, have an error expansion in even
//! powers of `h`, which Richardson extrapolation over successive halvings
//! removes. The initial step is a tenth of the distance to the nearest
//! branch point of the mode energies, which scales like `sin(π/(2L))`.

use alloc::vec::Vec;

use crate::dd::DoubleDouble;
use crate::model::{check_size, ModelParams, Sector};
use crate::{Error, Result};

/// Highest order for which the extrapolation is trusted.
pub const MAX_FD_ORDER: usize = 6;
const LEVELS: usize = 6;
const STEP_FRACTION: f64 = 0.1;

/// Finite-difference estimate with the last Richardson correction as error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    pub value: f64,
    pub error: f64,
}

/// Mode trig values computed once per evaluation series.
struct Modes {
    w: DoubleDouble,
    mu: DoubleDouble,
    /// `(sin k, cos k)`; `None` marks the odd zero mode.
    trig: Vec<Option<(DoubleDouble, DoubleDouble)>>,
}

impl Modes {
    fn new(p: &ModelParams, size: usize, modes: impl Iterator<Item = usize>, sector: Sector) -> Self {
        let trig = modes
            .map(|r| {
                if sector == Sector::Odd && r == 0 {
                    return None;
                }
                let num = match sector {
                    Sector::Even => 2 * r + 1,
                    Sector::Odd => 2 * r,
                };
                let k = DoubleDouble::PI * DoubleDouble::from_f64(num as f64) / DoubleDouble::from_f64(size as f64);
                Some(k.sin_cos())
            })
            .collect();
        Self { w: DoubleDouble::from_f64(p.w()), mu: DoubleDouble::from_f64(p.mu()), trig }
    }

    /// `Σ_r Λ_r(s)` over the stored modes.
    fn sum(&self, s: DoubleDouble) -> DoubleDouble {
        let wes = self.w * s.exp();
        let j = wes + self.mu;
        let pair = (DoubleDouble::from_f64(2.0) * wes + self.mu) * self.mu;
        let mut acc = DoubleDouble::ZERO;
        for t in &self.trig {
            acc = acc
                + match t {
                    None => j,
                    Some((sin_k, cos_k)) => ((self.w - j * *cos_k).sqr() + pair * sin_k.sqr()).sqrt(),
                };
        }
        acc
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn central_difference(f: &impl Fn(DoubleDouble) -> DoubleDouble, x: DoubleDouble, n: usize, h: f64) -> DoubleDouble {
    let hd = DoubleDouble::from_f64(h);
    let mut acc = DoubleDouble::ZERO;
    for j in 0..=n {
        let offset = DoubleDouble::from_f64(n as f64 / 2.0 - j as f64) * hd;
        let c = DoubleDouble::from_f64(binomial(n, j));
        let v = f(x + offset) * c;
        acc = if j % 2 == 0 { acc + v } else { acc - v };
    }
    acc / hd.powi(n as i32)
}

fn richardson(f: impl Fn(DoubleDouble) -> DoubleDouble, x: DoubleDouble, n: usize, h0: f64) -> FdEstimate {
    let mut prev: Vec<DoubleDouble> = Vec::new();
    let mut best = DoubleDouble::ZERO;
    let mut error = f64::INFINITY;
    for i in 0..LEVELS {
        let h = h0 / (1u64 << i) as f64;
        let mut row = Vec::with_capacity(i + 1);
        row.push(central_difference(&f, x, n, h));
        let mut factor = 1.0;
        for j in 1..=i {
            factor *= 4.0;
            let d = (row[j - 1] - prev[j - 1]) / DoubleDouble::from_f64(factor - 1.0);
            row.push(row[j - 1] + d);
        }
        if i > 0 {
            error = (row[i] - prev[i - 1]).to_f64().abs();
        }
        best = row[i];
        prev = row;
    }
    FdEstimate { value: best.to_f64(), error }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FD_ORDER {
        return Err(Error::OrderOutOfRange { order: n, min: 1, max: MAX_FD_ORDER });
    }
    Ok(())
}

/// `d^n K±_L / ds^n` at `s0` by extrapolated central differences.
pub fn fd_cumulants(p: &ModelParams, size: usize, s0: f64, n: usize, sector: Sector) -> Result<FdEstimate> {
    check_size(size)?;
    check_order(n)?;
    let modes = Modes::new(p, size, 0..size / 2, sector);
    let scale = DoubleDouble::from_f64(2.0) / DoubleDouble::from_f64(size as f64);
    let h0 = STEP_FRACTION * libm::sin(core::f64::consts::PI / (2.0 * size as f64));
    // The constant -(w + mu) drops out of every derivative.
    Ok(richardson(|s| modes.sum(s) * scale, DoubleDouble::from_f64(s0), n, h0))
}

/// [`fd_cumulants`] failing when the error estimate exceeds `tol`.
pub fn fd_cumulants_checked(
    p: &ModelParams,
    size: usize,
    s0: f64,
    n: usize,
    sector: Sector,
    tol: f64,
) -> Result<FdEstimate> {
    let est = fd_cumulants(p, size, s0, n, sector)?;
    if est.error.is_nan() || est.error > tol {
        return Err(Error::ToleranceExceeded { estimate: est.error, tol });
    }
    Ok(est)
}

/// `d^n Λ±_{L,r} / ds^n` at `s0`.
pub fn fd_lambda_derivative(
    p: &ModelParams,
    s0: f64,
    size: usize,
    r: usize,
    n: usize,
    sector: Sector,
) -> Result<FdEstimate> {
    check_size(size)?;
    check_order(n)?;
    if r >= size {
        return Err(Error::ModeOutOfRange { r, size });
    }
    let half = crate::model::half_angle(size, r, sector);
    let dist = if sector == Sector::Odd && r == 0 { 1.0 } else { libm::sin(half) };
    let modes = Modes::new(p, size, core::iter::once(r), sector);
    Ok(richardson(|s| modes.sum(s), DoubleDouble::from_f64(s0), n, STEP_FRACTION * dist))
}
