//! Width functions w(h) = P(dQ/dP ≥ h).
//!
//! Every divergence in the toolkit and the exact GRS recursion only ever
//! look at a pair through its width function. Each [`WidthFunction`] knows
//! its support end `h_max`, the points where it has kinks or jumps, and how
//! its tail decays when the support is unbounded, which is what the
//! quadrature layer needs to place panels.

use std::f64::consts::{E, PI};
use std::io::Write;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::measures::{DistributionPair, GaussianLevels, PairSpec, SyntheticWidth};
use crate::quadrature::{Estimate, Integrator, Panel};
use crate::special::noncentral_chi2_cdf;

/// Piecewise-constant width. `levels[i]` holds between `edges[i]` and
/// `edges[i + 1]`; the final edge is `h_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepWidth {
    edges: Vec<f64>,
    levels: Vec<f64>,
    /// `[e_i, e_{i+1})` pieces when true, `(e_i, e_{i+1}]` otherwise.
    right_continuous: bool,
}

impl StepWidth {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    fn eval(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 1.0;
        }
        let n = self.levels.len();
        // Number of interior/final edges strictly below (or at) h.
        let k = if self.right_continuous {
            self.edges[1..].partition_point(|&e| e <= h)
        } else {
            self.edges[1..].partition_point(|&e| e < h)
        };
        if k >= n {
            0.0
        } else {
            self.levels[k]
        }
    }

    fn inverse(&self, u: f64) -> f64 {
        let count = self.levels.partition_point(|&l| l > u);
        if count == 0 {
            0.0
        } else {
            self.edges[count]
        }
    }

    fn integral(&self, lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let a = self.edges[i].max(lo);
                let b = self.edges[i + 1].min(hi);
                if b > a {
                    g(l) * (b - a)
                } else {
                    0.0
                }
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Laplace { b: f64 },
    Gaussian { levels: GaussianLevels, d: u32, noncentrality: f64 },
    Steps(StepWidth),
    OptimalCs { alpha: f64 },
    OptimalAcs { alpha: f64, beta: f64 },
}

/// The map h ↦ P(dQ/dP ≥ h) together with its integration metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthFunction {
    shape: Shape,
    h_max: f64,
    breakpoints: Vec<f64>,
    total_mass: f64,
    tail_exponent: Option<f64>,
}

/// Integrator used for width-level bookkeeping (mass checks, layer-cake tails).
fn bookkeeping() -> Integrator {
    Integrator::new(1e-12)
}

impl WidthFunction {
    fn build(shape: Shape, h_max: f64, breakpoints: Vec<f64>, tail_exponent: Option<f64>) -> Result<Self> {
        let mut w = WidthFunction {
            shape,
            h_max,
            breakpoints,
            total_mass: f64::NAN,
            tail_exponent,
        };
        let (mass, slack) = match &w.shape {
            Shape::Steps(s) => (s.integral(0.0, f64::INFINITY, |l| l), 1e-9),
            Shape::Gaussian { .. } => {
                let est = w.integrate(|_, wh| wh, 0.0, None, bookkeeping())?;
                (est.value, 1e-6)
            }
            _ => {
                let est = w.integrate(|_, wh| wh, 0.0, None, bookkeeping())?;
                (est.value, 1e-9)
            }
        };
        if (mass - 1.0).abs() > slack {
            return Err(invalid(format!("width function integrates to {mass}, not 1")));
        }
        w.total_mass = mass;
        Ok(w)
    }

    fn steps(edges: Vec<f64>, levels: Vec<f64>, right_continuous: bool) -> Result<Self> {
        let h_max = *edges.last().expect("at least one piece");
        let breakpoints = edges[1..].to_vec();
        Self::build(
            Shape::Steps(StepWidth {
                edges,
                levels,
                right_continuous,
            }),
            h_max,
            breakpoints,
            None,
        )
    }

    /// The width of Q = Laplace(0, b) against P = Laplace(0, 1).
    pub fn laplace(b: f64) -> Result<Self> {
        if !(b > 0.0 && b <= 1.0) {
            return Err(invalid(format!("laplace scale b = {b} must lie in (0, 1]")));
        }
        let mut breakpoints = Vec::new();
        // Close to b = 1, w stays near 1 and then collapses over a window of
        // width ~ (1 − b)/b² below 1/b; split there so quadrature sees it.
        let exponent = b / (1.0 - b);
        if b < 1.0 && exponent > 1.0 {
            breakpoints.extend((-6..=6).rev().map(|j| (-(2f64.powi(j)) / exponent).exp() / b));
        }
        breakpoints.push(1.0 / b);
        Self::build(Shape::Laplace { b }, 1.0 / b, breakpoints, None)
    }

    /// The width of N(mu, sigma²)^⊗d against N(0, 1)^⊗d.
    pub fn gaussian(mu: f64, sigma: f64, d: u32) -> Result<Self> {
        PairSpec::gaussian(mu, sigma, d).validate()?;
        let levels = GaussianLevels::new(mu, sigma);
        let log_h_max = d as f64 * levels.peak;
        if log_h_max > 700.0 {
            return Err(Error::Unsupported(format!(
                "gaussian width with ln h_max = {log_h_max:.1} (d = {d})"
            )));
        }
        let noncentrality = d as f64 * levels.center * levels.center;
        Self::build(
            Shape::Gaussian {
                levels,
                d,
                noncentrality,
            },
            log_h_max.exp(),
            vec![],
            None,
        )
    }

    /// The exact step width of a discrete pair.
    pub fn discrete(q: &[f64], p: &[f64]) -> Result<Self> {
        PairSpec::discrete(q, p).validate()?;
        let mut ratios: Vec<(f64, f64)> = q
            .iter()
            .zip(p)
            .filter(|(_, &pi)| pi > 0.0)
            .map(|(&qi, &pi)| (qi / pi, pi))
            .collect();
        ratios.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut edges = vec![0.0];
        // Levels are suffix sums of p, accumulated from the largest ratio down
        // so that rounding cannot push a level above 1.
        let mut groups: Vec<(f64, f64)> = Vec::new();
        for (r, pi) in ratios.into_iter().filter(|r| r.0 > 0.0) {
            match groups.last_mut() {
                Some(g) if g.0 == r => g.1 += pi,
                _ => groups.push((r, pi)),
            }
        }
        let mut levels = vec![0.0; groups.len()];
        let mut above = 0.0;
        for (i, g) in groups.iter().enumerate().rev() {
            above += g.1;
            levels[i] = f64::min(above, 1.0);
        }
        edges.extend(groups.iter().map(|g| g.0));
        Self::steps(edges, levels, false)
    }

    /// w(h) = (1/c) · 1[h ≤ c], the case where D_CS equals D_KL.
    pub fn rectangle(c: f64) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(invalid(format!("rectangle width needs c ≥ 1, got {c}")));
        }
        Self::steps(vec![0.0, c], vec![1.0 / c], false)
    }

    /// Levels 1 on [0, 1/(1+e)], eps up to 1/(1+e) + e/((1+e) eps), then 0.
    pub fn epsilon_family(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        let first = 1.0 / (1.0 + E);
        let last = first + E / ((1.0 + E) * eps);
        Self::steps(vec![0.0, first, last], vec![1.0, eps], false)
    }

    /// w(h) = 1 for h ≤ alpha, (h/alpha)^{-1/(1-alpha)} beyond.
    pub fn optimal_cs(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let exponent = 1.0 / (1.0 - alpha);
        Self::build(Shape::OptimalCs { alpha }, f64::INFINITY, vec![alpha], Some(exponent))
    }

    /// w(h) = 1 / (1 + (beta h)^alpha) with beta = (π/alpha) / sin(π/alpha).
    pub fn optimal_acs(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must exceed 1, got {alpha}")));
        }
        let beta = (PI / alpha) / (PI / alpha).sin();
        Self::build(Shape::OptimalAcs { alpha, beta }, f64::INFINITY, vec![], Some(alpha))
    }

    /// Right-continuous step width from an `h,w` table: h strictly increasing
    /// from 0, w starting at 1, non-increasing, ending at 0, unit mass.
    pub fn from_table(h: &[f64], w: &[f64]) -> Result<Self> {
        if h.len() != w.len() || h.len() < 2 {
            return Err(invalid("width table needs at least two rows of (h, w)"));
        }
        if h[0] != 0.0 || w[0] != 1.0 {
            return Err(invalid("width table must start with h = 0, w = 1"));
        }
        if h.windows(2).any(|p| !(p[1] > p[0])) || h.iter().any(|x| !x.is_finite()) {
            return Err(invalid("width table h must be finite and strictly increasing"));
        }
        if w.windows(2).any(|p| p[1] > p[0]) || w.iter().any(|x| !(*x >= 0.0 && *x <= 1.0)) {
            return Err(invalid("width table w must be non-increasing within [0, 1]"));
        }
        if *w.last().unwrap() != 0.0 {
            return Err(invalid("width table must end with w = 0"));
        }
        Self::steps(h.to_vec(), w[..w.len() - 1].to_vec(), true)
    }

    /// w(h).
    pub fn eval(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 1.0;
        }
        match &self.shape {
            Shape::Laplace { b } => {
                if *b == 1.0 {
                    return if h <= 1.0 { 1.0 } else { 0.0 };
                }
                if h >= 1.0 / b {
                    return 0.0;
                }
                let exponent = b / (1.0 - b);
                -(exponent * (b * h).ln()).exp_m1()
            }
            Shape::Gaussian {
                levels,
                d,
                noncentrality,
            } => {
                let x = (*d as f64 * levels.peak - h.ln()) / levels.curvature;
                noncentral_chi2_cdf(x, *d as f64, *noncentrality)
            }
            Shape::Steps(s) => s.eval(h),
            Shape::OptimalCs { alpha } => {
                if h <= *alpha {
                    1.0
                } else {
                    (h / alpha).powf(-1.0 / (1.0 - alpha))
                }
            }
            Shape::OptimalAcs { alpha, beta } => 1.0 / (1.0 + (beta * h).powf(*alpha)),
        }
    }

    /// Generalized inverse sup{h : w(h) > u}; 0 when the set is empty.
    pub fn inverse(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        if u <= 0.0 {
            return self.h_max;
        }
        match &self.shape {
            Shape::Laplace { b } => {
                if *b == 1.0 {
                    1.0
                } else {
                    (1.0 - u).powf((1.0 - b) / b) / b
                }
            }
            Shape::Gaussian {
                levels,
                d,
                noncentrality,
            } => {
                let dof = *d as f64;
                let cdf = |x: f64| noncentral_chi2_cdf(x, dof, *noncentrality);
                let mut hi = dof + noncentrality + 1.0;
                while cdf(hi) <= u {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if !(mid > lo && mid < hi) {
                        break;
                    }
                    if cdf(mid) > u {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                (dof * levels.peak - levels.curvature * hi).exp()
            }
            Shape::Steps(s) => s.inverse(u),
            Shape::OptimalCs { alpha } => alpha * u.powf(-(1.0 - alpha)),
            Shape::OptimalAcs { alpha, beta } => (1.0 / u - 1.0).powf(1.0 / alpha) / beta,
        }
    }

    /// Smallest h with w(h) = 0 (+∞ for unbounded support).
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Sorted points where w has kinks or jumps.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// ∫₀^∞ w(h) dh as measured at construction.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Decay exponent p with w(h) = O(h^{-p}), p > 1, for unbounded support.
    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail_exponent
    }

    /// Default quadrature tolerance in bits for integrals of this width.
    /// The multivariate Gaussian width is itself a truncated series, so it
    /// gets a looser target.
    pub fn default_tol_bits(&self) -> f64 {
        match &self.shape {
            Shape::Gaussian { d, .. } if *d > 1 => 1e-6,
            _ => 1e-9,
        }
    }

    /// The step representation, when w is piecewise constant.
    pub fn as_steps(&self) -> Option<&StepWidth> {
        match &self.shape {
            Shape::Steps(s) => Some(s),
            _ => None,
        }
    }

    /// Distinct values taken by a step width (kinks of y ↦ ∫ min{w, y}).
    pub fn level_values(&self) -> Vec<f64> {
        self.as_steps().map(|s| s.levels.clone()).unwrap_or_default()
    }

    /// Quadrature panels covering [lo, hi] (hi = None means up to h_max),
    /// split at breakpoints, with logarithmic panels over wide ranges and a
    /// reciprocal panel for an unbounded tail.
    pub fn panels(&self, lo: f64, hi: Option<f64>) -> Result<Vec<Panel>> {
        let hi = hi.unwrap_or(self.h_max).min(self.h_max);
        let mut edges = vec![lo];
        edges.extend(self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        let unbounded = hi.is_infinite();
        if unbounded {
            if self.tail_exponent.map_or(true, |p| p <= 1.0) {
                return Err(Error::UnboundedSupport);
            }
            if *edges.last().unwrap() < 1.0 {
                edges.push(1.0);
            }
            // Power tails are smooth in ln h; only hand the far end to 1/h.
            let mut top = *edges.last().unwrap();
            while top < 1e32 {
                top *= 1e4;
                edges.push(top);
            }
        } else {
            edges.push(hi);
        }
        if edges.len() >= 2 && edges[0] == 0.0 && edges[1] > 1.0 {
            edges.insert(1, 1.0);
        }
        let mut panels = split_panels(&edges);
        if unbounded {
            panels.push(Panel::InverseTail {
                lo: *edges.last().unwrap(),
            });
        }
        Ok(panels)
    }

    /// ∫ g(h, w(h)) dh over [lo, hi] (hi = None means the whole support).
    pub fn integrate<G>(&self, g: G, lo: f64, hi: Option<f64>, integrator: Integrator) -> Result<Estimate>
    where
        G: Fn(f64, f64) -> f64,
    {
        let panels = self.panels(lo, hi)?;
        let est = integrator.integrate(|h| g(h, self.eval(h)), &panels);
        if !est.converged {
            return Err(Error::NonConvergence {
                value: est.value,
                abs_error: est.abs_error,
            });
        }
        Ok(est)
    }

    /// ∫_h^∞ w(t) dt.
    pub fn tail_mass(&self, h: f64, integrator: Integrator) -> Result<f64> {
        if h >= self.h_max {
            return Ok(0.0);
        }
        if let Some(s) = self.as_steps() {
            return Ok(s.integral(h.max(0.0), f64::INFINITY, |l| l));
        }
        Ok(self.integrate(|_, w| w, h.max(0.0), None, integrator)?.value)
    }
}

/// Panels over consecutive `edges`. A piece starting at 0 gets a short plain
/// head and a logarithmic body; wide pieces get logarithmic panels.
pub(crate) fn split_panels(edges: &[f64]) -> Vec<Panel> {
    let mut panels = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(b > a) {
            continue;
        }
        if a == 0.0 {
            let head = b * (-30.0f64).exp2();
            panels.push(Panel::Linear { lo: 0.0, hi: head });
            panels.push(Panel::Log { lo: head, hi: b });
        } else if b / a > 4.0 {
            panels.push(Panel::Log { lo: a, hi: b });
        } else {
            panels.push(Panel::Linear { lo: a, hi: b });
        }
    }
    panels
}

/// The width function of the pair described by `spec`.
pub fn width_eval(spec: &PairSpec) -> Result<WidthFunction> {
    match spec {
        PairSpec::Laplace { b } => WidthFunction::laplace(*b),
        PairSpec::Gaussian { mu, sigma, d } => WidthFunction::gaussian(*mu, *sigma, *d),
        PairSpec::Discrete { q, p } => WidthFunction::discrete(q, p),
        PairSpec::Synthetic { width } => match width {
            SyntheticWidth::Rectangle { c } => WidthFunction::rectangle(*c),
            SyntheticWidth::Epsilon { eps } => WidthFunction::epsilon_family(*eps),
            SyntheticWidth::OptimalCs { alpha } => WidthFunction::optimal_cs(*alpha),
            SyntheticWidth::OptimalAcs { alpha } => WidthFunction::optimal_acs(*alpha),
            SyntheticWidth::Table { h, w } => WidthFunction::from_table(h, w),
            SyntheticWidth::Realize { pair } => width_eval(pair),
        },
    }
}

/// Monte Carlo estimate of P(dQ/dP ≥ h) from `n` proposal draws, with its
/// binomial standard error.
pub fn width_mc_estimate<R: Rng + ?Sized>(
    pair: &DistributionPair,
    h: f64,
    n: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if n < 100 {
        return Err(invalid("Monte Carlo width estimate needs n ≥ 100"));
    }
    let mut hits = 0usize;
    for _ in 0..n {
        let x = pair.sample_one(rng);
        if pair.ratio(&x)? >= h {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    Ok((p, (p * (1.0 - p) / n as f64).sqrt()))
}

/// P- and Q-mass of the superlevel set {dQ/dP ≥ h}, from w alone:
/// P-mass is w(h), Q-mass is h·w(h) + ∫_h^∞ w.
pub fn superlevel_measures(w: &WidthFunction, h: f64) -> Result<(f64, f64)> {
    if h < 0.0 {
        return Err(invalid(format!("superlevel threshold must be ≥ 0, got {h}")));
    }
    let p_mass = w.eval(h);
    let q_mass = if h == 0.0 {
        w.total_mass()
    } else {
        h * p_mass + w.tail_mass(h, bookkeeping())?
    };
    Ok((p_mass.min(1.0), q_mass.clamp(0.0, 1.0)))
}

/// D_∞(Q‖P) = log2 h_max in bits.
pub fn d_infinity(w: &WidthFunction) -> f64 {
    w.h_max().log2()
}

/// Writes `h,w` rows at 1024 log-spaced points over (0, h_max].
pub fn write_width_table<W: Write>(w: &WidthFunction, out: W) -> Result<()> {
    if !w.h_max().is_finite() {
        return Err(Error::UnboundedSupport);
    }
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["h", "w"])?;
    const POINTS: usize = 1024;
    let decades = 6.0;
    for i in 0..POINTS {
        let frac = i as f64 / (POINTS - 1) as f64;
        let h = w.h_max() * 10f64.powf(-decades * (1.0 - frac));
        csv.write_record([format!("{h:.12e}"), format!("{:.12e}", w.eval(h))])?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_half_is_linear() {
        let w = WidthFunction::laplace(0.5).unwrap();
        for &h in &[0.0, 0.3, 1.0, 1.7, 2.0, 3.0] {
            let want = if h <= 2.0 { 1.0 - h / 2.0 } else { 0.0 };
            assert!((w.eval(h) - want).abs() < 1e-15, "h={h}");
        }
        assert!((w.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(d_infinity(&w), 1.0);
    }

    #[test]
    fn identity_width() {
        let w = WidthFunction::laplace(1.0).unwrap();
        assert_eq!(w.eval(1.0), 1.0);
        assert_eq!(w.eval(1.0 + 1e-12), 0.0);
        assert_eq!(d_infinity(&w), 0.0);
    }

    #[test]
    fn discrete_example_width() {
        let w = WidthFunction::discrete(&[0.5, 0.5, 0.0, 0.0], &[0.25; 4]).unwrap();
        assert_eq!(w.eval(0.0), 1.0);
        assert_eq!(w.eval(1e-9), 0.5);
        assert_eq!(w.eval(2.0), 0.5);
        assert_eq!(w.eval(2.0 + 1e-12), 0.0);
        assert_eq!(w.total_mass(), 1.0);
        assert_eq!(d_infinity(&w), 1.0);
        assert_eq!(w.breakpoints(), &[2.0]);
    }

    #[test]
    fn gaussian_width_at_one() {
        // Direct reduction: P(|Z − c|² ≤ t/a) with Z ~ N(0, 1).
        use statrs::distribution::{ContinuousCDF, Normal};
        let w = WidthFunction::gaussian(1.0, 0.5, 1).unwrap();
        let lv = GaussianLevels::new(1.0, 0.5);
        let r = (lv.peak / lv.curvature).sqrt();
        let n = Normal::new(0.0, 1.0).unwrap();
        let direct = n.cdf(lv.center + r) - n.cdf(lv.center - r);
        assert!((w.eval(1.0) - direct).abs() < 1e-12);
        assert!((w.eval(1.0) - 0.3404).abs() < 5e-5);
        assert!((w.total_mass() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn superlevel_examples() {
        let disc = WidthFunction::discrete(&[0.5, 0.5, 0.0, 0.0], &[0.25; 4]).unwrap();
        let (p, q) = superlevel_measures(&disc, 1.0).unwrap();
        assert_eq!((p, q), (0.5, 1.0));
        let lap = WidthFunction::laplace(0.5).unwrap();
        assert_eq!(superlevel_measures(&lap, 2.0).unwrap(), (0.0, 0.0));
        let (p0, q0) = superlevel_measures(&lap, 0.0).unwrap();
        assert_eq!(p0, 1.0);
        assert!((q0 - 1.0).abs() < 1e-12);
        // Laplace(0.5): Q(|x| ≤ t) with t = ln(2/h)... layer cake gives 1 − h²/4.
        let (_, q) = superlevel_measures(&lap, 1.0).unwrap();
        assert!((q - 0.75).abs() < 1e-12);
    }

    #[test]
    fn inverse_realizes_width() {
        let widths = [
            WidthFunction::laplace(0.3).unwrap(),
            WidthFunction::gaussian(1.0, 0.5, 2).unwrap(),
            WidthFunction::epsilon_family(0.2).unwrap(),
            WidthFunction::optimal_cs(0.5).unwrap(),
            WidthFunction::optimal_acs(2.5).unwrap(),
        ];
        for w in &widths {
            for &u in &[0.05, 0.3, 0.5, 0.77, 0.95] {
                let h = w.inverse(u);
                // w(h) ≤ u at the inverse and w > u just below it (when h > 0).
                assert!(w.eval(h * (1.0 + 1e-9) + 1e-12) <= u + 1e-9, "{w:?} u={u}");
                if h > 0.0 {
                    assert!(w.eval(h * (1.0 - 1e-6)) >= u - 1e-9);
                }
            }
        }
    }

    #[test]
    fn table_validation() {
        assert!(WidthFunction::from_table(&[0.0, 0.4, 1.2, 2.2], &[1.0, 0.5, 0.2, 0.0]).is_ok());
        assert!(WidthFunction::from_table(&[0.0, 0.5, 1.0], &[1.0, 0.5, 0.0]).is_err());
        assert!(WidthFunction::from_table(&[0.1, 1.1], &[1.0, 0.0]).is_err());
        assert!(WidthFunction::from_table(&[0.0, 1.0, 1.0], &[1.0, 0.0, 0.0]).is_err());
        assert!(WidthFunction::from_table(&[0.0, 0.4, 2.2], &[1.0, 0.5, 0.1]).is_err());
        let w = WidthFunction::from_table(&[0.0, 0.4, 1.2, 2.2], &[1.0, 0.5, 0.2, 0.0]).unwrap();
        assert_eq!(w.eval(0.4), 0.5);
        assert_eq!(w.eval(0.39), 1.0);
        assert_eq!(w.eval(2.2), 0.0);
        assert_eq!(w.h_max(), 2.2);
    }

    #[test]
    fn unbounded_panels_need_a_tail() {
        let w = WidthFunction::optimal_acs(2.0).unwrap();
        let panels = w.panels(0.0, None).unwrap();
        assert!(matches!(panels.last(), Some(Panel::InverseTail { .. })));
        assert!((w.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_case_has_unit_mass() {
        for &c in &[1.0, 2.0, 4.0, 10.0, 37.5] {
            assert_eq!(WidthFunction::rectangle(c).unwrap().total_mass(), 1.0);
        }
        assert!(WidthFunction::rectangle(0.5).is_err());
    }

    #[test]
    fn table_dump_has_header_and_rows() {
        let w = WidthFunction::laplace(0.5).unwrap();
        let mut buf = Vec::new();
        write_width_table(&w, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "h,w");
        assert_eq!(lines.len(), 1025);
        assert!(lines[1024].starts_with("2.000000000000e0,"));
    }
}
