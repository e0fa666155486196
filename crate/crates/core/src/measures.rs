//! Target/proposal pairs.
//!
//! A [`PairSpec`] names a family and its parameters; [`make_pair`] validates
//! it and returns a [`DistributionPair`] that can draw from the proposal and
//! evaluate the density ratio dQ/dP.

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Open01};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::width::{width_eval, WidthFunction};

const LN_2: f64 = std::f64::consts::LN_2;

/// Family and parameters of a target/proposal pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PairSpec {
    /// Q = Laplace(0, b), P = Laplace(0, 1), 0 < b ≤ 1.
    Laplace { b: f64 },
    /// Q = N(mu, sigma²)^⊗d, P = N(0, 1)^⊗d, 0 < sigma < 1.
    Gaussian { mu: f64, sigma: f64, d: u32 },
    /// Probability vectors on a shared finite alphabet.
    Discrete { q: Vec<f64>, p: Vec<f64> },
    /// P = U(0, 1) with dQ/dP chosen so that P(dQ/dP ≥ h) equals the given width.
    Synthetic { width: SyntheticWidth },
}

/// Width functions that can be realized as synthetic pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SyntheticWidth {
    /// w(h) = (1/c) · 1[h ≤ c], c ≥ 1.
    Rectangle { c: f64 },
    /// Three-level width 1, eps, 0 whose GRS codelength gap approaches log2(e + 1).
    Epsilon { eps: f64 },
    /// Extremal D_CS family for a KL budget, alpha in (0, 1).
    OptimalCs { alpha: f64 },
    /// Extremal D_ACS family for a KL budget, alpha > 1.
    OptimalAcs { alpha: f64 },
    /// Right-continuous piecewise-constant width read from an `h,w` table.
    Table { h: Vec<f64>, w: Vec<f64> },
    /// The width of another pair, transplanted onto U(0, 1).
    Realize { pair: Box<PairSpec> },
}

impl PairSpec {
    pub fn laplace(b: f64) -> Self {
        PairSpec::Laplace { b }
    }

    pub fn gaussian(mu: f64, sigma: f64, d: u32) -> Self {
        PairSpec::Gaussian { mu, sigma, d }
    }

    pub fn discrete(q: &[f64], p: &[f64]) -> Self {
        PairSpec::Discrete {
            q: q.to_vec(),
            p: p.to_vec(),
        }
    }

    pub fn synthetic(width: SyntheticWidth) -> Self {
        PairSpec::Synthetic { width }
    }

    /// Checks the family invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            PairSpec::Laplace { b } => {
                if !(*b > 0.0 && *b <= 1.0) {
                    return Err(invalid(format!("laplace scale b = {b} must lie in (0, 1]")));
                }
            }
            PairSpec::Gaussian { mu, sigma, d } => {
                if !mu.is_finite() {
                    return Err(invalid(format!("gaussian mean {mu} must be finite")));
                }
                if !(*sigma > 0.0 && *sigma < 1.0) {
                    return Err(invalid(format!("gaussian sigma = {sigma} must lie in (0, 1)")));
                }
                if *d == 0 {
                    return Err(invalid("gaussian dimension must be at least 1"));
                }
            }
            PairSpec::Discrete { q, p } => validate_discrete(q, p)?,
            PairSpec::Synthetic { width } => {
                if let SyntheticWidth::Realize { pair } = width {
                    pair.validate()?;
                }
                // Remaining shape checks happen when the width is built.
                width_eval(self)?;
            }
        }
        Ok(())
    }

    /// True when Q = P by construction.
    pub fn is_identity(&self) -> bool {
        match self {
            PairSpec::Laplace { b } => *b == 1.0,
            PairSpec::Gaussian { .. } => false,
            PairSpec::Discrete { q, p } => q.iter().zip(p).all(|(a, b)| a == b),
            PairSpec::Synthetic { width } => match width {
                SyntheticWidth::Rectangle { c } => *c == 1.0,
                SyntheticWidth::Realize { pair } => pair.is_identity(),
                _ => false,
            },
        }
    }
}

fn validate_discrete(q: &[f64], p: &[f64]) -> Result<()> {
    if q.len() != p.len() {
        return Err(invalid(format!(
            "discrete vectors have different lengths: {} vs {}",
            q.len(),
            p.len()
        )));
    }
    if q.is_empty() {
        return Err(invalid("discrete vectors are empty"));
    }
    for (name, v) in [("q", q), ("p", p)] {
        if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(invalid(format!("{name} has an invalid entry {x}")));
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("{name} sums to {sum}, not 1")));
        }
    }
    if let Some(i) = (0..q.len()).find(|&i| q[i] > 0.0 && p[i] == 0.0) {
        return Err(invalid(format!(
            "q is not absolutely continuous w.r.t. p: q[{i}] = {} but p[{i}] = 0",
            q[i]
        )));
    }
    Ok(())
}

/// Per-dimension quadratic form of the Gaussian log-ratio:
/// ln dQ/dP(x) = peak − curvature · (x − center)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLevels {
    pub curvature: f64,
    pub center: f64,
    pub peak: f64,
}

impl GaussianLevels {
    pub fn new(mu: f64, sigma: f64) -> Self {
        let s2 = sigma * sigma;
        let curvature = 0.5 / s2 - 0.5;
        let center = mu / (2.0 * curvature * s2);
        let peak = -sigma.ln() + curvature * center * center - mu * mu / (2.0 * s2);
        Self {
            curvature,
            center,
            peak,
        }
    }
}

/// A point of a pair's sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Scalar(f64),
    Vector(Vec<f64>),
    Index(usize),
}

impl Point {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Point::Scalar(x) => Some(*x),
            Point::Vector(v) if v.len() == 1 => Some(v[0]),
            _ => None,
        }
    }

    pub fn as_index(&self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(*i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
enum Sampler {
    Laplace,
    Gaussian { d: usize },
    Discrete(WeightedIndex<f64>),
    Uniform,
}

#[derive(Debug, Clone)]
enum Ratio {
    Laplace { b: f64 },
    Gaussian { levels: GaussianLevels, d: usize },
    Discrete { ratios: Vec<f64>, support: Vec<bool> },
    Synthetic { width: WidthFunction },
}

/// A validated target/proposal pair.
#[derive(Debug, Clone)]
pub struct DistributionPair {
    spec: PairSpec,
    d_inf_bits: f64,
    sampler: Sampler,
    ratio: Ratio,
}

/// Validates `spec` and builds the pair.
pub fn make_pair(spec: &PairSpec) -> Result<DistributionPair> {
    spec.validate()?;
    let (d_inf_bits, sampler, ratio) = match spec {
        PairSpec::Laplace { b } => (-b.log2() + 0.0, Sampler::Laplace, Ratio::Laplace { b: *b }),
        PairSpec::Gaussian { mu, sigma, d } => {
            let levels = GaussianLevels::new(*mu, *sigma);
            let d = *d as usize;
            (
                d as f64 * levels.peak / LN_2,
                Sampler::Gaussian { d },
                Ratio::Gaussian { levels, d },
            )
        }
        PairSpec::Discrete { q, p } => {
            let ratios: Vec<f64> = q
                .iter()
                .zip(p)
                .map(|(&qi, &pi)| if pi > 0.0 { qi / pi } else { 0.0 })
                .collect();
            let max = ratios.iter().cloned().fold(0.0, f64::max);
            let index = WeightedIndex::new(p.iter().copied())
                .map_err(|e| invalid(format!("cannot sample from p: {e}")))?;
            (
                max.log2(),
                Sampler::Discrete(index),
                Ratio::Discrete {
                    ratios,
                    support: p.iter().map(|&x| x > 0.0).collect(),
                },
            )
        }
        PairSpec::Synthetic { .. } => {
            let width = width_eval(spec)?;
            (
                width.h_max().log2(),
                Sampler::Uniform,
                Ratio::Synthetic { width },
            )
        }
    };
    Ok(DistributionPair {
        spec: spec.clone(),
        d_inf_bits,
        sampler,
        ratio,
    })
}

impl DistributionPair {
    pub fn spec(&self) -> &PairSpec {
        &self.spec
    }

    /// Rényi ∞-divergence D_∞(Q‖P) in bits; may be +∞ for synthetic pairs.
    pub fn d_inf_bits(&self) -> f64 {
        self.d_inf_bits
    }

    /// ln dQ/dP(x) in nats.
    pub fn log_ratio(&self, x: &Point) -> Result<f64> {
        match &self.ratio {
            Ratio::Laplace { b } => {
                let x = scalar(x)?;
                Ok(-b.ln() - x.abs() * (1.0 / b - 1.0))
            }
            Ratio::Gaussian { levels, d } => {
                let coords: &[f64] = match x {
                    Point::Vector(v) => v,
                    Point::Scalar(s) if *d == 1 => std::slice::from_ref(s),
                    _ => return Err(Error::OutsideSupport(format!("{x:?} is not a {d}-vector"))),
                };
                if coords.len() != *d {
                    return Err(Error::OutsideSupport(format!(
                        "expected a {d}-vector, got length {}",
                        coords.len()
                    )));
                }
                let spread: f64 = coords.iter().map(|&xi| (xi - levels.center).powi(2)).sum();
                Ok(*d as f64 * levels.peak - levels.curvature * spread)
            }
            Ratio::Discrete { .. } | Ratio::Synthetic { .. } => Ok(self.ratio(x)?.ln()),
        }
    }

    /// dQ/dP(x).
    pub fn ratio(&self, x: &Point) -> Result<f64> {
        match &self.ratio {
            Ratio::Discrete { ratios, support } => {
                let i = x
                    .as_index()
                    .ok_or_else(|| Error::OutsideSupport(format!("{x:?} is not an index")))?;
                if i >= ratios.len() || !support[i] {
                    return Err(Error::OutsideSupport(format!("index {i} has zero proposal mass")));
                }
                Ok(ratios[i])
            }
            Ratio::Synthetic { width } => {
                let u = scalar(x)?;
                if !(u > 0.0 && u < 1.0) {
                    return Err(Error::OutsideSupport(format!("{u} is outside (0, 1)")));
                }
                Ok(width.inverse(u))
            }
            _ => Ok(self.log_ratio(x)?.exp()),
        }
    }

    /// One draw from the proposal P.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match &self.sampler {
            Sampler::Laplace => {
                let u: f64 = rng.sample(Open01);
                let v = u - 0.5;
                let mag = -(1.0 - 2.0 * v.abs()).ln();
                Point::Scalar(if v < 0.0 { -mag } else { mag })
            }
            Sampler::Gaussian { d } => {
                Point::Vector((0..*d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            }
            Sampler::Discrete(index) => Point::Index(index.sample(rng)),
            Sampler::Uniform => Point::Scalar(rng.sample(Open01)),
        }
    }
}

fn scalar(x: &Point) -> Result<f64> {
    x.as_scalar()
        .ok_or_else(|| Error::OutsideSupport(format!("{x:?} is not a scalar")))
}

/// `n` i.i.d. draws from the proposal of `pair`.
pub fn sample_proposal<R: Rng + ?Sized>(pair: &DistributionPair, rng: &mut R, n: usize) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    Ok((0..n).map(|_| pair.sample_one(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn d_inf_examples() {
        assert!((make_pair(&PairSpec::laplace(0.5)).unwrap().d_inf_bits() - 1.0).abs() < 1e-15);
        assert_eq!(make_pair(&PairSpec::laplace(1.0)).unwrap().d_inf_bits(), 0.0);
        let disc = PairSpec::discrete(&[0.5, 0.5, 0.0, 0.0], &[0.25; 4]);
        assert_eq!(make_pair(&disc).unwrap().d_inf_bits(), 1.0);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        for spec in [
            PairSpec::laplace(0.0),
            PairSpec::laplace(1.5),
            PairSpec::gaussian(1.0, 1.0, 1),
            PairSpec::gaussian(1.0, 0.5, 0),
            PairSpec::discrete(&[0.5, 0.5], &[1.0]),
            PairSpec::discrete(&[0.5, 0.5], &[1.0, 0.0]),
            PairSpec::discrete(&[0.6, 0.5], &[0.5, 0.5]),
            PairSpec::discrete(&[-0.5, 1.5], &[0.5, 0.5]),
        ] {
            assert!(matches!(make_pair(&spec), Err(Error::InvalidParameter(_))), "{spec:?}");
        }
    }

    #[test]
    fn log_ratio_examples() {
        let lap = make_pair(&PairSpec::laplace(0.5)).unwrap();
        assert!((lap.log_ratio(&Point::Scalar(0.0)).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        let id = make_pair(&PairSpec::laplace(1.0)).unwrap();
        assert_eq!(id.log_ratio(&Point::Scalar(-3.2)).unwrap(), 0.0);

        let g = make_pair(&PairSpec::gaussian(1.0, 0.5, 1)).unwrap();
        let peak = g.log_ratio(&Point::Vector(vec![4.0 / 3.0])).unwrap();
        // Direct evaluation of −ln σ − (x−μ)²/(2σ²) + x²/2 at x = 4/3.
        let x: f64 = 4.0 / 3.0;
        let direct = -(0.5f64).ln() - (x - 1.0).powi(2) / 0.5 + x * x / 2.0;
        assert!((peak - direct).abs() < 1e-14);
        assert!((peak - 1.359_813_847_226_612).abs() < 1e-12);
        assert!((g.d_inf_bits() * LN_2 - peak).abs() < 1e-14);
    }

    #[test]
    fn gaussian_log_ratio_is_sum_of_dimensions() {
        let (mu, sigma) = (0.7, 0.6);
        let g = make_pair(&PairSpec::gaussian(mu, sigma, 3)).unwrap();
        let xs = [0.2, -1.1, 2.5];
        let direct: f64 = xs
            .iter()
            .map(|&x: &f64| -sigma.ln() - (x - mu).powi(2) / (2.0 * sigma * sigma) + x * x / 2.0)
            .sum();
        assert!((g.log_ratio(&Point::Vector(xs.to_vec())).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn out_of_support_points() {
        let disc = make_pair(&PairSpec::discrete(&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0])).unwrap();
        assert!(matches!(disc.log_ratio(&Point::Index(3)), Err(Error::OutsideSupport(_))));
        assert!(matches!(disc.log_ratio(&Point::Index(2)), Err(Error::OutsideSupport(_))));
        let g = make_pair(&PairSpec::gaussian(1.0, 0.5, 2)).unwrap();
        assert!(g.log_ratio(&Point::Vector(vec![1.0])).is_err());
    }

    #[test]
    fn discrete_sampling_frequencies() {
        let pair = make_pair(&PairSpec::discrete(&[0.25; 4], &[0.25; 4])).unwrap();
        let n = 100_000;
        let draws = sample_proposal(&pair, &mut stream(11, 0), n).unwrap();
        let mut counts = [0usize; 4];
        for x in draws {
            counts[x.as_index().unwrap()] += 1;
        }
        let sd = (0.25f64 * 0.75 / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn gaussian_sampling_means() {
        let pair = make_pair(&PairSpec::gaussian(1.0, 0.5, 2)).unwrap();
        let n = 100_000;
        let draws = sample_proposal(&pair, &mut stream(12, 0), n).unwrap();
        let mut sums = [0.0; 2];
        for x in draws {
            let Point::Vector(v) = x else { panic!() };
            sums[0] += v[0];
            sums[1] += v[1];
        }
        for s in sums {
            assert!((s / n as f64).abs() < 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn synthetic_draws_are_uniform_on_open_interval() {
        let spec = PairSpec::synthetic(SyntheticWidth::Rectangle { c: 3.0 });
        let pair = make_pair(&spec).unwrap();
        let x = sample_proposal(&pair, &mut stream(1, 1), 1).unwrap();
        let u = x[0].as_scalar().unwrap();
        assert!(u > 0.0 && u < 1.0);
        assert!(sample_proposal(&pair, &mut stream(1, 1), 0).is_err());
    }

    #[test]
    fn pair_spec_json_shape() {
        let spec = PairSpec::synthetic(SyntheticWidth::Epsilon { eps: 0.1 });
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"synthetic","width":{"shape":"epsilon","eps":0.1}}"#);
        let back: PairSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
