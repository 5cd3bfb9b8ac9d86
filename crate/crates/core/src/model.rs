//! Rates, tilted XY parameters and the free-fermion dispersion relation.

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::dd::DoubleDouble;
use crate::{Error, Result};

/// Jump rate `w` and pair-deposition rate `mu` of the process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    w: f64,
    mu: f64,
}

impl ModelParams {
    pub fn new(w: f64, mu: f64) -> Result<Self> {
        if !(w.is_finite() && mu.is_finite() && w > 0.0 && mu > 0.0) {
            return Err(Error::InvalidRates { w, mu });
        }
        Ok(Self { w, mu })
    }

    /// Normalized rates `w = 1/2`, `mu = (1 - nu)/2` for `nu` in `[0, 1)`.
    pub fn from_nu(nu: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&nu) {
            return Err(Error::NuOutOfRange(nu, "[0, 1)"));
        }
        Self::new(0.5, 0.5 * (1.0 - nu))
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Complementary deposition rate `1 - mu/w`.
    pub fn nu(&self) -> f64 {
        1.0 - self.mu / self.w
    }
}

/// Parity sector of the particle number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Even,
    Odd,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Even, Sector::Odd];

    pub fn of_count(n: u32) -> Self {
        if n % 2 == 0 {
            Sector::Even
        } else {
            Sector::Odd
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "+" => Ok(Sector::Even),
            "odd" | "-" => Ok(Sector::Odd),
            _ => Err(Error::InvalidArgument("sector must be `even` or `odd`")),
        }
    }
}

/// Parameters of the similarity-transformed (Hermitian) tilted XY chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedParams {
    pub s: f64,
    /// Energy scale `J_s = w e^s + mu`.
    pub j: f64,
    /// Anisotropy `gamma_s`, in `[0, 1]`.
    pub gamma: f64,
    /// Transverse field `h_s = w / J_s`.
    pub h: f64,
    /// Similarity parameter `z_s = sqrt(mu / (2 w e^s + mu))`.
    pub z: f64,
}

pub fn tilted_params(p: &ModelParams, s: f64) -> TiltedParams {
    let (w, mu) = (p.w, p.mu);
    let wes = w * libm::exp(s);
    let j = wes + mu;
    let pair = 2.0 * wes + mu;
    TiltedParams { s, j, gamma: libm::sqrt(mu * pair) / j, h: w / j, z: libm::sqrt(mu / pair) }
}

/// `s_c = ln(1 - mu/w)`, the tilt at which `h_s = 1`.
pub fn critical_point(p: &ModelParams) -> Result<f64> {
    if p.mu >= p.w {
        return Err(Error::NoCriticalPoint { w: p.w, mu: p.mu });
    }
    Ok(libm::log1p(-p.mu / p.w))
}

/// Density of the reversible Bernoulli product measure.
pub fn stationary_density(p: &ModelParams) -> f64 {
    1.0 / (1.0 + libm::sqrt(1.0 + 2.0 * p.w / p.mu))
}

/// `c = cos(theta)`, `s = sin(theta)` at the half-momentum `theta` of a mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigPair {
    pub c: f64,
    pub s: f64,
}

impl TrigPair {
    /// `theta = pi (2r + 1) / (2L)` for `0 <= r <= L/2 - 1`.
    pub fn new(size: usize, r: usize) -> Result<Self> {
        check_size(size)?;
        if r >= size / 2 {
            return Err(Error::ModeOutOfRange { r, size });
        }
        Ok(Self::at(half_angle(size, r, Sector::Even)))
    }

    /// Half-momentum pair for either sector (`theta = pi r / L` when odd).
    pub fn for_mode(size: usize, r: usize, sector: Sector) -> Result<Self> {
        check_size(size)?;
        if r >= size / 2 {
            return Err(Error::ModeOutOfRange { r, size });
        }
        Ok(Self::at(half_angle(size, r, sector)))
    }

    fn at(theta: f64) -> Self {
        Self { c: libm::cos(theta), s: libm::sin(theta) }
    }
}

pub(crate) fn check_size(size: usize) -> Result<()> {
    if size < 2 || size % 2 != 0 {
        return Err(Error::InvalidSize(size));
    }
    Ok(())
}

/// Half of the fermion momentum of mode `r`.
pub(crate) fn half_angle(size: usize, r: usize, sector: Sector) -> f64 {
    match sector {
        Sector::Even => PI * (2 * r + 1) as f64 / (2 * size) as f64,
        Sector::Odd => PI * r as f64 / size as f64,
    }
}

/// Single-mode energy `Lambda^±_{L,r}(s)`.
///
/// `r` ranges over the full zone `0..L`; the generating function only uses
/// `r < L/2`. In the even sector `Lambda_r = Lambda_{L-1-r}`, in the odd
/// sector `Lambda_r = Lambda_{L-r}` for `r != 0`, and the odd zero mode is
/// `J_s`.
pub fn dispersion(p: &ModelParams, s: f64, size: usize, r: usize, sector: Sector) -> Result<f64> {
    check_size(size)?;
    if r >= size {
        return Err(Error::ModeOutOfRange { r, size });
    }
    let (w, mu) = (p.w, p.mu);
    let wes = w * libm::exp(s);
    let j = wes + mu;
    if sector == Sector::Odd && r == 0 {
        return Ok(j);
    }
    let half = half_angle(size, r, sector);
    let sh = libm::sin(half);
    let sin_k = libm::sin(2.0 * half);
    // w - J cos k, arranged so that neither 1 - cos k nor w - J cancels.
    let a = -w * libm::expm1(s) - mu + 2.0 * j * sh * sh;
    Ok(libm::sqrt(a * a + (2.0 * wes + mu) * mu * sin_k * sin_k))
}

/// Double-double evaluation of [`dispersion`] for finite-difference oracles.
pub fn dispersion_dd(p: &ModelParams, s: DoubleDouble, size: usize, r: usize, sector: Sector) -> Result<DoubleDouble> {
    check_size(size)?;
    if r >= size {
        return Err(Error::ModeOutOfRange { r, size });
    }
    let w = DoubleDouble::from_f64(p.w);
    let mu = DoubleDouble::from_f64(p.mu);
    let es = s.exp();
    let wes = w * es;
    let j = wes + mu;
    if sector == Sector::Odd && r == 0 {
        return Ok(j);
    }
    let momentum = match sector {
        Sector::Even => DoubleDouble::PI * DoubleDouble::from_f64((2 * r + 1) as f64),
        Sector::Odd => DoubleDouble::PI * DoubleDouble::from_f64((2 * r) as f64),
    } / DoubleDouble::from_f64(size as f64);
    let (sin_k, cos_k) = momentum.sin_cos();
    let a = w - j * cos_k;
    let two = DoubleDouble::from_f64(2.0);
    Ok((a.sqr() + (two * wes + mu) * mu * sin_k.sqr()).sqrt())
}

/// Mode energy at the critical tilt, normalized to `w = 1/2`:
/// `lambda0 = s_{L,r} sqrt(1 - nu^2 c_{L,r}^2)`.
pub fn critical_dispersion(nu: f64, size: usize, r: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::NuOutOfRange(nu, "[0, 1]"));
    }
    let t = TrigPair::new(size, r)?;
    Ok(t.s * libm::sqrt(1.0 - nu * nu * t.c * t.c))
}
