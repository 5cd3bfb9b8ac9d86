//! Dense exact diagonalization.
//!
//! Basis states are bit strings, bit `k` set when site `k` is occupied
//! (`σᶻ_k = 1 - 2η_k`). The matrix realizes
//!
//! ```text
//! H = -J_s Σ_k [(1+γ_s)/2 σˣ_k σˣ_{k+1} + (1-γ_s)/2 σʸ_k σʸ_{k+1} + h_s σᶻ_k] + L (w + mu)
//! ```
//!
//! with `k + 1` taken mod `L` (for `L = 2` both bonds `(0,1)` and `(1,0)`
//! appear). Hops `01 ↔ 10` carry `-J_s`, pair creation and annihilation
//! `-J_s γ_s`. `K±_L(s) = -E±_min / L`.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::model::{tilted_params, ModelParams, Sector};
use crate::{Error, Result};

pub const MIN_SIZE: usize = 2;
/// Largest ring accepted for a single parity block.
pub const MAX_SIZE: usize = 14;
/// Largest ring accepted for the unprojected matrix.
pub const MAX_FULL_SIZE: usize = 12;

#[derive(Debug, Clone)]
pub struct DenseSpectrumProblem {
    pub size: usize,
    pub s: f64,
    /// `None` for the full space.
    pub sector: Option<Sector>,
    /// Configuration of each basis vector, as a bit mask.
    pub basis: Vec<u32>,
    pub matrix: DMatrix<f64>,
}

fn check_size(size: usize, max: usize) -> Result<()> {
    if size < MIN_SIZE || size > max || size % 2 != 0 {
        return Err(Error::SizeOutOfRange { size, min: MIN_SIZE, max });
    }
    Ok(())
}

fn assemble(p: &ModelParams, s: f64, size: usize, sector: Option<Sector>) -> DenseSpectrumProblem {
    let t = tilted_params(p, s);
    let hop = -t.j;
    let pair = -t.j * t.gamma;
    let field = -t.j * t.h;
    let constant = size as f64 * (p.w() + p.mu());

    let basis: Vec<u32> =
        (0..1u32 << size).filter(|c| sector.is_none_or(|sec| Sector::of_count(c.count_ones()) == sec)).collect();
    // Index lookup: full space is the identity, a parity block keeps every
    // other configuration in order.
    let mut index = alloc::vec![usize::MAX; 1 << size];
    for (i, &c) in basis.iter().enumerate() {
        index[c as usize] = i;
    }

    let dim = basis.len();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (i, &c) in basis.iter().enumerate() {
        let n = c.count_ones() as f64;
        // Σ_k σᶻ_k = L - 2N
        m[(i, i)] = field * (size as f64 - 2.0 * n) + constant;
        for k in 0..size {
            let k1 = (k + 1) % size;
            let a = (c >> k) & 1;
            let b = (c >> k1) & 1;
            let flipped = c ^ (1 << k) ^ (1 << k1);
            let amp = if a != b { hop } else { pair };
            let j = index[flipped as usize];
            m[(j, i)] += amp;
        }
    }
    DenseSpectrumProblem { size, s, sector, basis, matrix: m }
}

/// Full `2^L`-dimensional matrix, `2 <= L <= 12`.
pub fn build_hamiltonian(p: &ModelParams, s: f64, size: usize) -> Result<DenseSpectrumProblem> {
    check_size(size, MAX_FULL_SIZE)?;
    Ok(assemble(p, s, size, None))
}

/// One parity block, of dimension `2^{L-1}`, `2 <= L <= 14`.
pub fn build_sector_hamiltonian(p: &ModelParams, s: f64, size: usize, sector: Sector) -> Result<DenseSpectrumProblem> {
    check_size(size, MAX_SIZE)?;
    Ok(assemble(p, s, size, Some(sector)))
}

impl DenseSpectrumProblem {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Largest `|H_ij - H_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..i {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }

    /// Frobenius norm of `[H, P]` with `P = (-1)^N`. Nonzero entries of the
    /// commutator are `2 |H_ij|` for `i`, `j` of opposite parity.
    pub fn parity_commutator_norm(&self) -> f64 {
        let mut acc = 0.0;
        for (i, &ci) in self.basis.iter().enumerate() {
            for (j, &cj) in self.basis.iter().enumerate() {
                if (ci.count_ones() + cj.count_ones()) % 2 == 1 {
                    let v = 2.0 * self.matrix[(i, j)];
                    acc += v * v;
                }
            }
        }
        libm::sqrt(acc)
    }

    /// Adds `eps` to the diagonal entry of the empty configuration. Used as a
    /// negative control for the oracle comparison.
    pub fn perturb(&mut self, eps: f64) {
        if let Some(i) = self.basis.iter().position(|&c| c == 0) {
            self.matrix[(i, i)] += eps;
        } else {
            self.matrix[(0, 0)] += eps;
        }
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.asymmetry() > 1e-13 {
            return Err(Error::Eigensolver("matrix is not symmetric"));
        }
        let mut out: Vec<f64> = self.matrix.symmetric_eigenvalues().iter().copied().collect();
        if out.iter().any(|x| !x.is_finite()) {
            return Err(Error::Eigensolver("non-finite eigenvalue"));
        }
        // The eigenvalues must reproduce the trace and the Frobenius norm.
        let trace = self.matrix.trace();
        let frob2: f64 = self.matrix.iter().map(|x| x * x).sum();
        let sum: f64 = out.iter().sum();
        let sum2: f64 = out.iter().map(|x| x * x).sum();
        let scale = frob2.max(1.0);
        if (sum - trace).abs() > 1e-9 * libm::sqrt(scale) * self.dim() as f64 || (sum2 - frob2).abs() > 1e-9 * scale {
            return Err(Error::Eigensolver("spectrum fails trace invariants"));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(out)
    }

    pub fn ground_energy(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }
}

/// `K±_L(s) = -E±_min / L` from the projected block.
pub fn cgf_from_ed(p: &ModelParams, s: f64, size: usize, sector: Sector) -> Result<f64> {
    let prob = build_sector_hamiltonian(p, s, size, sector)?;
    Ok(-prob.ground_energy()? / size as f64)
}
