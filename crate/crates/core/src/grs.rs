//! Greedy rejection sampling.
//!
//! At step k the sampler holds a level offset L_k and the survival mass
//! S_k = P[K ≥ k]. A proposal X_k is accepted with probability
//! min{1, max{0, (r(X_k) − L_k) / S_k}} where r = dQ/dP. Both numbers only
//! depend on the width function:
//!
//! ```text
//! q_k     = (1/S_k) ∫_{L_k}^{L_k+S_k} w(h) dh
//! L_{k+1} = L_k + S_k
//! S_{k+1} = S_k (1 − q_k)
//! ```
//!
//! so the stochastic sampler and the exact index law read the same
//! [`GrsTrajectory`].

use std::sync::RwLock;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::{DistributionPair, Point};
use crate::quadrature::Integrator;
use crate::rng::stream;
use crate::width::WidthFunction;

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// (L_k, S_k) at step k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrsState {
    pub k: usize,
    pub lower: f64,
    pub survival: f64,
}

#[derive(Debug, Clone, Copy)]
struct Step {
    lower: f64,
    survival: f64,
    q: f64,
}

/// Lazily extended (L_k, S_k, q_k) sequence of a width function.
///
/// Extension takes a write lock; reads of already computed steps only take a
/// read lock, so parallel samplers can share one trajectory.
#[derive(Debug)]
pub struct GrsTrajectory {
    width: WidthFunction,
    step_cap: usize,
    steps: RwLock<Vec<Step>>,
}

/// Fraction of the band [lower, lower + survival] covered by w, i.e. q_k.
fn band_fraction(w: &WidthFunction, lower: f64, survival: f64) -> Result<f64> {
    if survival <= 0.0 {
        return Ok(1.0);
    }
    let hi = lower + survival;
    if lower >= w.h_max() {
        return Ok(0.0);
    }
    let mass = match w.as_steps() {
        Some(steps) => {
            let e = steps.edges();
            steps
                .levels()
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let a = e[i].max(lower);
                    let b = e[i + 1].min(hi);
                    if b > a {
                        l * (b - a)
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
        }
        None => {
            let est = w.integrate(|_, wh| wh, lower, Some(hi), Integrator::new(1e-13 * survival));
            match est {
                Ok(e) => e.value,
                // A band a few ulps wide cannot be refined; its best value is still
                // far more accurate than the tolerance needs.
                Err(Error::NonConvergence { value, abs_error }) if abs_error <= 1e-9 * survival => value,
                Err(e) => return Err(e),
            }
        }
    };
    Ok((mass / survival).clamp(0.0, 1.0))
}

impl GrsTrajectory {
    pub fn new(width: WidthFunction) -> Self {
        Self::with_step_cap(width, DEFAULT_STEP_CAP)
    }

    pub fn with_step_cap(width: WidthFunction, step_cap: usize) -> Self {
        Self {
            width,
            step_cap,
            steps: RwLock::new(Vec::new()),
        }
    }

    pub fn width(&self) -> &WidthFunction {
        &self.width
    }

    pub fn step_cap(&self) -> usize {
        self.step_cap
    }

    /// (L_k, S_k, q_k) for 1-based k.
    fn step(&self, k: usize) -> Result<Step> {
        if k == 0 {
            return Err(invalid("GRS steps are numbered from 1"));
        }
        if k > self.step_cap {
            return Err(Error::StepBudgetExceeded(self.step_cap));
        }
        if let Some(s) = self.steps.read().expect("trajectory lock").get(k - 1) {
            return Ok(*s);
        }
        let mut steps = self.steps.write().expect("trajectory lock");
        while steps.len() < k {
            let (lower, survival) = match steps.last() {
                None => (0.0, 1.0),
                Some(prev) => (prev.lower + prev.survival, prev.survival * (1.0 - prev.q)),
            };
            let q = band_fraction(&self.width, lower, survival)?;
            steps.push(Step { lower, survival, q });
        }
        Ok(steps[k - 1])
    }

    pub fn state(&self, k: usize) -> Result<GrsState> {
        let s = self.step(k)?;
        Ok(GrsState {
            k,
            lower: s.lower,
            survival: s.survival,
        })
    }

    /// q_k, the probability of accepting at step k given K ≥ k.
    pub fn acceptance(&self, k: usize) -> Result<f64> {
        Ok(self.step(k)?.q)
    }

    /// Number of steps computed so far.
    pub fn len(&self) -> usize {
        self.steps.read().expect("trajectory lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One accepted proposal and its index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrsDraw {
    pub x: Point,
    pub k: usize,
}

/// Runs greedy rejection sampling once, reading (L_k, S_k) from `trajectory`.
pub fn grs_sample_with<R: Rng + ?Sized>(
    pair: &DistributionPair,
    trajectory: &GrsTrajectory,
    rng: &mut R,
) -> Result<GrsDraw> {
    for k in 1..=trajectory.step_cap() {
        let step = trajectory.step(k)?;
        let x = pair.sample_one(rng);
        let u: f64 = rng.random();
        if step.survival <= 0.0 {
            return Ok(GrsDraw { x, k });
        }
        let excess = pair.ratio(&x)? - step.lower;
        if excess > 0.0 && u * step.survival <= excess {
            return Ok(GrsDraw { x, k });
        }
    }
    Err(Error::StepBudgetExceeded(trajectory.step_cap()))
}

/// Runs greedy rejection sampling once. `w` must be the width of `pair`.
pub fn grs_sample<R: Rng + ?Sized>(pair: &DistributionPair, w: &WidthFunction, rng: &mut R) -> Result<GrsDraw> {
    grs_sample_with(pair, &GrsTrajectory::new(w.clone()), rng)
}

/// The exact law of the GRS index, truncated once S_{n+1} ≤ eps_stop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexDistribution {
    /// p_k = P[K = k] for k = 1..=n.
    pub p: Vec<f64>,
    /// S_1..=S_{n+1}.
    #[serde(skip)]
    pub survival: Vec<f64>,
    /// L_1..=L_{n+1}.
    #[serde(skip)]
    pub lower: Vec<f64>,
    #[serde(skip)]
    pub truncation_index: usize,
    /// S_{n+1} = P[K > n].
    pub tail_mass: f64,
    /// Σ_{k≤n} −p_k log2 p_k.
    pub entropy_bits: f64,
    /// Upper bound on Σ_{k>n} −p_k log2 p_k.
    pub entropy_tail_bound_bits: f64,
    /// Σ_{k≤n} S_k.
    pub mean_index: f64,
    /// Σ_{k>n} S_k, which (because L_k → h_max) is exactly h_max − L_{n+1}.
    pub mean_tail_bound: f64,
}

impl IndexDistribution {
    /// The certified interval for H[K] in bits.
    pub fn entropy_interval(&self) -> (f64, f64) {
        (self.entropy_bits, self.entropy_bits + self.entropy_tail_bound_bits)
    }

    /// E[K] including the tail, +∞ for unbounded D_∞.
    pub fn mean(&self) -> f64 {
        self.mean_index + self.mean_tail_bound
    }
}

/// Maximum entropy in bits of a law on {1, 2, …} with mean `mu` ≥ 1.
fn geometric_entropy_bits(mu: f64) -> f64 {
    if mu <= 1.0 {
        return 0.0;
    }
    if mu.is_infinite() {
        return f64::INFINITY;
    }
    mu.log2() + (mu - 1.0) * (mu / (mu - 1.0)).log2()
}

/// Entropy of the tail p_{n+1}, p_{n+2}, … given its mass s and its
/// contribution m = Σ_{j>n} (j − n) p_j to the mean.
fn entropy_tail_bound(s: f64, m: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let mu = (m / s).max(1.0);
    s * geometric_entropy_bits(mu) + s * (1.0 / s).log2()
}

fn neg_plog2p(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        // + 0.0 turns −0 at p = 1 into +0.
        -p * p.log2() + 0.0
    }
}

/// Exact index law from the deterministic recursion.
pub fn grs_index_distribution(w: &WidthFunction, eps_stop: f64) -> Result<IndexDistribution> {
    index_distribution_of(&GrsTrajectory::new(w.clone()), eps_stop)
}

/// Same as [`grs_index_distribution`] on an existing trajectory.
pub fn index_distribution_of(trajectory: &GrsTrajectory, eps_stop: f64) -> Result<IndexDistribution> {
    if !(eps_stop > 0.0 && eps_stop < 1.0) {
        return Err(invalid(format!("eps_stop must lie in (0, 1), got {eps_stop}")));
    }
    let mut p = Vec::new();
    let mut survival = Vec::new();
    let mut lower = Vec::new();
    let mut k = 1;
    loop {
        let step = trajectory.step(k)?;
        survival.push(step.survival);
        lower.push(step.lower);
        if step.survival <= eps_stop {
            break;
        }
        p.push(step.survival * step.q);
        k += 1;
    }
    let n = p.len();
    let tail_mass = survival[n];
    let mean_index = lower[n];
    let h_max = trajectory.width().h_max();
    let mean_tail_bound = if tail_mass <= 0.0 {
        0.0
    } else {
        (h_max - mean_index).max(tail_mass)
    };
    let entropy_bits = p.iter().map(|&pk| neg_plog2p(pk)).sum();
    Ok(IndexDistribution {
        entropy_tail_bound_bits: entropy_tail_bound(tail_mass, mean_tail_bound),
        p,
        survival,
        lower,
        truncation_index: n,
        tail_mass,
        entropy_bits,
        mean_index,
        mean_tail_bound,
    })
}

/// Output of repeated independent GRS runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Empirical {
    /// `histogram[k - 1]` counts runs that returned index k.
    pub histogram: Vec<u64>,
    pub samples: Vec<Point>,
}

impl Empirical {
    pub fn runs(&self) -> u64 {
        self.histogram.iter().sum()
    }

    /// Empirical P[K ≥ k] for k = 1..=len.
    pub fn survival(&self) -> Vec<f64> {
        let n = self.runs() as f64;
        let mut left = self.runs();
        self.histogram
            .iter()
            .map(|&c| {
                let s = left as f64 / n;
                left -= c;
                s
            })
            .collect()
    }
}

pub const MIN_EMPIRICAL_RUNS: usize = 1000;

/// `runs` independent GRS runs; run i draws from stream (seed, i), so the
/// result does not depend on how rayon schedules the work.
pub fn grs_empirical(pair: &DistributionPair, w: &WidthFunction, seed: u64, runs: usize) -> Result<Empirical> {
    empirical_with(pair, &GrsTrajectory::new(w.clone()), seed, runs)
}

pub fn empirical_with(pair: &DistributionPair, trajectory: &GrsTrajectory, seed: u64, runs: usize) -> Result<Empirical> {
    if runs < MIN_EMPIRICAL_RUNS {
        return Err(invalid(format!("empirical GRS needs at least {MIN_EMPIRICAL_RUNS} runs, got {runs}")));
    }
    let draws: Vec<GrsDraw> = (0..runs as u64)
        .into_par_iter()
        .map(|i| grs_sample_with(pair, trajectory, &mut stream(seed, i)))
        .collect::<Result<_>>()?;
    let kmax = draws.iter().map(|d| d.k).max().unwrap_or(0);
    let mut histogram = vec![0u64; kmax];
    for d in &draws {
        histogram[d.k - 1] += 1;
    }
    Ok(Empirical {
        histogram,
        samples: draws.into_iter().map(|d| d.x).collect(),
    })
}
