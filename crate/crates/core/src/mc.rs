//! Continuous-time kinetic Monte Carlo of the untilted process.
//!
//! Bond `(k, k+1)` fires at rate `w_k = mu + w (η_k + η_{k+1})` and flips
//! both sites. A firing counts as a jump (activity `+1`) with probability
//! `w (η_k + η_{k+1}) / w_k` and is silent otherwise.
//!
//! Bonds are grouped by their number of particles (0, 1 or 2), so the rate
//! of a bond takes one of three values. An event picks a class by inverting
//! the cumulative class rates and then a uniform bond inside the class;
//! after a flip only the fired bond and its two neighbours change class. The total
//! rate is recomputed from the class counts, so it never drifts.
//!
//! Random streams: replica `i` of a run with seed `seed` uses
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(i)`. ChaCha output is
//! specified bit for bit, so runs are reproducible across platforms.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{check_size, stationary_density, ModelParams, Sector};
use crate::{Error, Result};

/// Configuration change produced by one firing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// `00 -> 11`
    Deposition,
    /// `11 -> 00`
    Annihilation,
    /// `01 <-> 10`
    Hop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub bond: usize,
    pub kind: EventKind,
    /// `true` when the firing increments the activity.
    pub jump: bool,
}

/// Occupations on a ring together with the bond-class bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    occ: Vec<bool>,
    /// `class_bonds[c]` lists the bonds carrying `c` particles.
    class_bonds: [Vec<usize>; 3],
    /// Position of each bond in its class list.
    slot: Vec<usize>,
    class_of: Vec<u8>,
}

impl LatticeState {
    pub fn new(occ: Vec<bool>) -> Result<Self> {
        check_size(occ.len())?;
        let size = occ.len();
        let mut state = Self {
            occ,
            class_bonds: [Vec::new(), Vec::new(), Vec::new()],
            slot: alloc::vec![0; size],
            class_of: alloc::vec![0; size],
        };
        for k in 0..size {
            let c = state.bond_count(k);
            state.class_of[k] = c;
            state.slot[k] = state.class_bonds[c as usize].len();
            state.class_bonds[c as usize].push(k);
        }
        Ok(state)
    }

    pub fn empty(size: usize) -> Result<Self> {
        Self::new(alloc::vec![false; size])
    }

    /// Independent Bernoulli(`ρ`) occupations at the stationary density.
    pub fn random_stationary<R: Rng>(p: &ModelParams, size: usize, rng: &mut R) -> Result<Self> {
        let rho = stationary_density(p);
        Self::new((0..size).map(|_| rng.random::<f64>() < rho).collect())
    }

    pub fn len(&self) -> usize {
        self.occ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occ.is_empty()
    }

    pub fn occupations(&self) -> &[bool] {
        &self.occ
    }

    pub fn particle_count(&self) -> usize {
        self.occ.iter().filter(|&&x| x).count()
    }

    pub fn parity(&self) -> Sector {
        Sector::of_count(self.particle_count() as u32)
    }

    fn bond_count(&self, k: usize) -> u8 {
        self.occ[k] as u8 + self.occ[(k + 1) % self.occ.len()] as u8
    }

    /// `w_k(η)`.
    pub fn bond_rate(&self, p: &ModelParams, k: usize) -> f64 {
        p.mu() + p.w() * self.bond_count(k) as f64
    }

    pub fn class_sizes(&self) -> [usize; 3] {
        [self.class_bonds[0].len(), self.class_bonds[1].len(), self.class_bonds[2].len()]
    }

    /// `Σ_k w_k(η)` from the class counts.
    pub fn total_rate(&self, p: &ModelParams) -> f64 {
        let [n0, n1, n2] = self.class_sizes();
        let (w, mu) = (p.w(), p.mu());
        n0 as f64 * mu + n1 as f64 * (mu + w) + n2 as f64 * (mu + 2.0 * w)
    }

    fn reclassify(&mut self, k: usize) {
        let new = self.bond_count(k);
        let old = self.class_of[k];
        if new == old {
            return;
        }
        let list = &mut self.class_bonds[old as usize];
        let pos = self.slot[k];
        list.swap_remove(pos);
        if let Some(&moved) = list.get(pos) {
            self.slot[moved] = pos;
        }
        self.class_of[k] = new;
        self.slot[k] = self.class_bonds[new as usize].len();
        self.class_bonds[new as usize].push(k);
    }

    fn flip_bond(&mut self, k: usize) {
        let size = self.occ.len();
        let k1 = (k + 1) % size;
        self.occ[k] = !self.occ[k];
        self.occ[k1] = !self.occ[k1];
        self.reclassify((k + size - 1) % size);
        self.reclassify(k);
        self.reclassify(k1);
    }

    /// Disjoint-pair configuration counts over bonds `(0,1), (2,3), ...`,
    /// indexed by `2 η_{2i} + η_{2i+1}`.
    pub fn pair_histogram(&self) -> [u64; 4] {
        let mut h = [0u64; 4];
        for pair in self.occ.chunks_exact(2) {
            h[2 * pair[0] as usize + pair[1] as usize] += 1;
        }
        h
    }
}

/// One Gillespie step: returns the waiting time and the event.
pub fn step<R: Rng>(state: &mut LatticeState, p: &ModelParams, rng: &mut R) -> (f64, Event) {
    let total = state.total_rate(p);
    // 1 - U lies in (0, 1].
    let dt = -libm::log(1.0 - rng.random::<f64>()) / total;

    let (w, mu) = (p.w(), p.mu());
    let sizes = state.class_sizes();
    let rates = [mu, mu + w, mu + 2.0 * w];
    let mut target = rng.random::<f64>() * total;
    let mut class = 2;
    for c in 0..3 {
        let weight = sizes[c] as f64 * rates[c];
        if target < weight {
            class = c;
            break;
        }
        target -= weight;
    }
    // Guard against rounding pushing past the last nonempty class.
    while sizes[class] == 0 {
        class -= 1;
    }
    let list = &state.class_bonds[class];
    let bond = list[rng.random_range(0..list.len())];

    let kind = match class {
        0 => EventKind::Deposition,
        1 => EventKind::Hop,
        _ => EventKind::Annihilation,
    };
    let jump = class > 0 && rng.random::<f64>() * rates[class] >= mu;
    state.flip_bond(bond);
    (dt, Event { bond, kind, jump })
}

/// Counts of fired events by configuration change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EventCounts {
    pub deposition: u64,
    pub annihilation: u64,
    pub hop: u64,
}

/// Statistics accumulated over the measurement window of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    pub size: usize,
    /// Length of the measurement window.
    pub elapsed: f64,
    /// Number of jump-labelled firings.
    pub activity: u64,
    /// `∫ η_k dt` over the window.
    pub occupation_time: Vec<f64>,
    pub events: EventCounts,
    /// Parity of the initial state (conserved).
    pub parity: Sector,
}

impl TrajectoryStats {
    pub fn density(&self) -> f64 {
        self.occupation_time.iter().sum::<f64>() / (self.size as f64 * self.elapsed)
    }

    /// `A / (L t)`.
    pub fn activity_rate(&self) -> f64 {
        self.activity as f64 / (self.size as f64 * self.elapsed)
    }
}

/// Run parameters of [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub size: usize,
    pub t_max: f64,
    /// Measurement starts at `burn_in_fraction * t_max`.
    pub burn_in_fraction: f64,
    pub seed: u64,
    pub replicas: usize,
}

impl McConfig {
    pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.1;

    pub fn new(size: usize, t_max: f64, seed: u64, replicas: usize) -> Self {
        Self { size, t_max, burn_in_fraction: Self::DEFAULT_BURN_IN_FRACTION, seed, replicas }
    }

    pub fn validate(&self) -> Result<()> {
        check_size(self.size)?;
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidArgument("t_max must be positive and finite"));
        }
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return Err(Error::InvalidArgument("burn-in fraction must lie in [0, 1)"));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidArgument("need at least one replica"));
        }
        Ok(())
    }
}

/// Random stream of one replica.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Runs one trajectory from a stationary random start.
pub fn simulate_replica(p: &ModelParams, cfg: &McConfig, replica: u64) -> Result<TrajectoryStats> {
    cfg.validate()?;
    let mut rng = replica_rng(cfg.seed, replica);
    let mut state = LatticeState::random_stationary(p, cfg.size, &mut rng)?;
    let parity = state.parity();
    let t_start = cfg.burn_in_fraction * cfg.t_max;

    let size = cfg.size;
    let mut stats = TrajectoryStats {
        size,
        elapsed: cfg.t_max - t_start,
        activity: 0,
        occupation_time: alloc::vec![0.0; size],
        events: EventCounts::default(),
        parity,
    };
    // Time from which each site has held its current value, clamped to the window.
    let mut since = alloc::vec![t_start; size];
    let mut t = 0.0;
    loop {
        let (dt, ev) = step(&mut state, p, &mut rng);
        let t_next = t + dt;
        if t_next >= cfg.t_max {
            break;
        }
        t = t_next;
        if t < t_start {
            continue;
        }
        let k1 = (ev.bond + 1) % size;
        for k in [ev.bond, k1] {
            // The site has just flipped, so it held the opposite value before.
            if !state.occupations()[k] {
                stats.occupation_time[k] += t - since[k];
            }
            since[k] = t;
        }
        if ev.jump {
            stats.activity += 1;
        }
        match ev.kind {
            EventKind::Deposition => stats.events.deposition += 1,
            EventKind::Annihilation => stats.events.annihilation += 1,
            EventKind::Hop => stats.events.hop += 1,
        }
    }
    for ((occ, t), &t0) in state.occupations().iter().zip(&mut stats.occupation_time).zip(&since) {
        if *occ {
            *t += cfg.t_max - t0;
        }
    }
    debug_assert_eq!(state.parity(), parity);
    Ok(stats)
}

/// Replica means and standard errors with `z`-scores against theory.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub replicas: usize,
    pub density: f64,
    pub density_se: f64,
    pub density_theory: f64,
    pub activity_rate: f64,
    pub activity_rate_se: f64,
    pub activity_rate_theory: f64,
    pub events: EventCounts,
}

impl McSummary {
    pub fn density_z(&self) -> f64 {
        (self.density - self.density_theory) / self.density_se
    }

    pub fn activity_z(&self) -> f64 {
        (self.activity_rate - self.activity_rate_theory) / self.activity_rate_se
    }
}

fn mean_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, f64::NAN);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

/// Reduces per-replica statistics in the given order.
pub fn summarize(p: &ModelParams, runs: &[TrajectoryStats]) -> Result<McSummary> {
    let first = runs.first().ok_or(Error::InvalidArgument("no replicas to summarize"))?;
    let (density, density_se) = mean_se(runs.iter().map(TrajectoryStats::density));
    let (activity_rate, activity_rate_se) = mean_se(runs.iter().map(TrajectoryStats::activity_rate));
    let mut events = EventCounts::default();
    for r in runs {
        events.deposition += r.events.deposition;
        events.annihilation += r.events.annihilation;
        events.hop += r.events.hop;
    }
    Ok(McSummary {
        replicas: runs.len(),
        density,
        density_se,
        density_theory: stationary_density(p),
        activity_rate,
        activity_rate_se,
        activity_rate_theory: crate::cgf::mean_activity(p, 0.0, first.size)?,
        events,
    })
}

/// Runs all replicas sequentially and returns them in replica order.
pub fn simulate_replicas(p: &ModelParams, cfg: &McConfig) -> Result<Vec<TrajectoryStats>> {
    cfg.validate()?;
    (0..cfg.replicas as u64).map(|i| simulate_replica(p, cfg, i)).collect()
}

/// [`simulate_replicas`] followed by [`summarize`].
pub fn simulate(p: &ModelParams, cfg: &McConfig) -> Result<McSummary> {
    summarize(p, &simulate_replicas(p, cfg)?)
}
