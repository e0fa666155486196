//! D_KL, D_CS, D_ACS and the general D^φ, computed from width functions.
//!
//! Everything is integrated in nats and converted to bits when the report is
//! built. Step widths are summed exactly; everything else goes through the
//! panel quadrature in [`crate::quadrature`].

use std::f64::consts::{E, LN_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measures::{PairSpec, SyntheticWidth};
use crate::quadrature::Integrator;
use crate::special::{binary_entropy_nats, digamma, neg_xlnx, EULER_GAMMA};
use crate::width::{split_panels, width_eval, StepWidth, WidthFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivergenceKind {
    KL,
    CS,
    ACS,
    PHI,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    DiscreteSum,
}

/// A divergence value in bits with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub kind: DivergenceKind,
    pub value_bits: f64,
    pub abs_error_estimate: f64,
    pub method: Method,
}

impl DivergenceReport {
    fn closed(kind: DivergenceKind, value_bits: f64) -> Self {
        Self {
            kind,
            value_bits,
            abs_error_estimate: 0.0,
            method: Method::ClosedForm,
        }
    }

    fn from_nats(kind: DivergenceKind, nats: f64, err_nats: f64, method: Method) -> Self {
        Self {
            kind,
            value_bits: nats / LN_2,
            abs_error_estimate: err_nats / LN_2,
            method,
        }
    }
}

/// Concave integrand φ on [0, 1] with φ(0) = 0, in nats.
#[derive(Clone)]
pub enum Phi {
    /// −x ln x, giving D_CS.
    Cs,
    /// Binary entropy, giving D_ACS.
    Acs,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Cs => f.write_str("Cs"),
            Phi::Acs => f.write_str("Acs"),
            Phi::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Phi {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Phi::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Phi::Cs => neg_xlnx(x),
            Phi::Acs => binary_entropy_nats(x),
            Phi::Custom(f) => {
                let x = x.clamp(0.0, 1.0);
                if x == 0.0 {
                    0.0
                } else {
                    f(x)
                }
            }
        }
    }

    pub fn kind(&self) -> DivergenceKind {
        match self {
            Phi::Cs => DivergenceKind::CS,
            Phi::Acs => DivergenceKind::ACS,
            Phi::Custom(_) => DivergenceKind::PHI,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn to_bits_error(e: Error) -> Error {
    match e {
        Error::NonConvergence { value, abs_error } => Error::NonConvergence {
            value: value / LN_2,
            abs_error: abs_error / LN_2,
        },
        other => other,
    }
}

/// D^φ(Q‖P) = ∫₀^∞ φ(w(h)) dh.
pub fn quad_phi_integral(w: &WidthFunction, phi: &Phi, tol: f64) -> Result<DivergenceReport> {
    check_tol(tol)?;
    if let Some(steps) = w.as_steps() {
        let nats = step_sum(steps, |l| phi.eval(l));
        return Ok(DivergenceReport::from_nats(phi.kind(), nats, 0.0, Method::DiscreteSum));
    }
    let est = w
        .integrate(|_, wh| phi.eval(wh), 0.0, None, Integrator::new(tol * LN_2))
        .map_err(to_bits_error)?;
    Ok(DivergenceReport::from_nats(
        phi.kind(),
        est.value,
        est.abs_error,
        Method::Quadrature,
    ))
}

fn step_sum(steps: &StepWidth, g: impl Fn(f64) -> f64) -> f64 {
    let e = steps.edges();
    steps
        .levels()
        .iter()
        .enumerate()
        .map(|(i, &l)| g(l) * (e[i + 1] - e[i]))
        .sum()
}

/// How [`kl_divergence`] evaluates D_KL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlRoute {
    ClosedForm,
    /// D_KL = log2 e + ∫ w(h) log2 h dh.
    WidthIdentity,
}

/// D_KL(Q‖P) in bits.
pub fn kl_divergence(spec: &PairSpec, route: KlRoute) -> Result<DivergenceReport> {
    spec.validate()?;
    match route {
        KlRoute::ClosedForm => kl_closed(spec),
        KlRoute::WidthIdentity => kl_width_identity(&width_eval(spec)?, None),
    }
}

fn kl_closed(spec: &PairSpec) -> Result<DivergenceReport> {
    let nats = match spec {
        PairSpec::Laplace { b } => b - 1.0 - b.ln(),
        PairSpec::Gaussian { mu, sigma, d } => {
            *d as f64 * (-sigma.ln() + (sigma * sigma + mu * mu - 1.0) / 2.0)
        }
        PairSpec::Discrete { q, p } => q
            .iter()
            .zip(p)
            .filter(|(&qi, _)| qi > 0.0)
            .map(|(&qi, &pi)| qi * (qi / pi).ln())
            .sum::<f64>()
            .max(0.0),
        PairSpec::Synthetic { width } => match width {
            SyntheticWidth::Rectangle { c } => c.ln(),
            SyntheticWidth::OptimalCs { alpha } => {
                return Ok(DivergenceReport::closed(DivergenceKind::KL, optimal_cs_values(*alpha)?.0))
            }
            SyntheticWidth::OptimalAcs { alpha } => {
                return Ok(DivergenceReport::closed(DivergenceKind::KL, optimal_acs_values(*alpha)?.0))
            }
            SyntheticWidth::Realize { pair } => return kl_closed(pair),
            SyntheticWidth::Epsilon { .. } | SyntheticWidth::Table { .. } => {
                return kl_width_identity(&width_eval(spec)?, None)
            }
        },
    };
    Ok(DivergenceReport::closed(DivergenceKind::KL, nats / LN_2))
}

/// D_KL from a width function through the integration-by-parts identity.
pub fn kl_width_identity(w: &WidthFunction, tol: Option<f64>) -> Result<DivergenceReport> {
    let tol = tol.unwrap_or_else(|| w.default_tol_bits());
    check_tol(tol)?;
    if let Some(steps) = w.as_steps() {
        // ∫_a^b ln h dh = F(b) − F(a) with F(h) = h ln h − h.
        let anti = |h: f64| if h == 0.0 { 0.0 } else { h * h.ln() - h };
        let e = steps.edges();
        let inner: f64 = steps
            .levels()
            .iter()
            .enumerate()
            .map(|(i, &l)| l * (anti(e[i + 1]) - anti(e[i])))
            .sum();
        let nats = (1.0 + inner).max(0.0);
        return Ok(DivergenceReport::from_nats(DivergenceKind::KL, nats, 0.0, Method::DiscreteSum));
    }
    let est = w
        .integrate(|h, wh| if wh == 0.0 { 0.0 } else { wh * h.ln() }, 0.0, None, Integrator::new(tol * LN_2))
        .map_err(to_bits_error)?;
    Ok(DivergenceReport::from_nats(
        DivergenceKind::KL,
        1.0 + est.value,
        est.abs_error,
        Method::Quadrature,
    ))
}

/// D_CS of Laplace(0, b) against Laplace(0, 1): (b + ψ(1/b) + γ − 1) / ln 2.
pub fn dcs_laplace_closed(b: f64) -> Result<f64> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(invalid(format!("laplace scale b = {b} must lie in (0, 1]")));
    }
    if b == 1.0 {
        return Ok(0.0);
    }
    Ok(((b + digamma(1.0 / b) + EULER_GAMMA - 1.0) / LN_2).max(0.0))
}

/// D_CS, D_ACS or D_KL by the preferred route for `spec`.
///
/// Laplace D_CS uses the digamma closed form; every other D_CS or D_ACS is
/// integrated at `tol` (the width's default when `None`).
pub fn divergence(spec: &PairSpec, kind: DivergenceKind, tol: Option<f64>) -> Result<DivergenceReport> {
    spec.validate()?;
    match (kind, spec) {
        (DivergenceKind::KL, _) => kl_divergence(spec, KlRoute::ClosedForm),
        (DivergenceKind::CS, PairSpec::Laplace { b }) => Ok(DivergenceReport::closed(
            DivergenceKind::CS,
            dcs_laplace_closed(*b)?,
        )),
        (DivergenceKind::CS, _) | (DivergenceKind::ACS, _) => {
            let w = width_eval(spec)?;
            let phi = if kind == DivergenceKind::CS { Phi::Cs } else { Phi::Acs };
            quad_phi_integral(&w, &phi, tol.unwrap_or_else(|| w.default_tol_bits()))
        }
        (DivergenceKind::PHI, _) => Err(Error::Unsupported(
            "PHI needs an explicit integrand; use quad_phi_integral".into(),
        )),
    }
}

/// Extremal families for a KL budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimalFamily {
    /// Maximizes D_CS, alpha in (0, 1).
    Cs { alpha: f64 },
    /// Maximizes D_ACS, alpha > 1.
    Acs { alpha: f64 },
}

/// Closed-form values of an extremal family and the width realizing them.
#[derive(Debug, Clone)]
pub struct OptimalValues {
    pub kl_bits: f64,
    pub divergence_bits: f64,
    pub width: WidthFunction,
}

fn optimal_cs_values(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let kl = (1.0 / alpha - 1.0 + alpha.ln()) / LN_2;
    let dcs = ((1.0 - alpha) / alpha) / LN_2;
    Ok((kl, dcs))
}

fn optimal_acs_values(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha must exceed 1, got {alpha}")));
    }
    let t = PI / alpha;
    let beta = t / t.sin();
    let kl = -(beta.ln() - 1.0 + beta * t.cos()) / LN_2;
    let dacs = (alpha - PI / t.tan()) / LN_2;
    Ok((kl, dacs))
}

pub fn optimal_family_values(family: OptimalFamily) -> Result<OptimalValues> {
    let ((kl_bits, divergence_bits), width) = match family {
        OptimalFamily::Cs { alpha } => (optimal_cs_values(alpha)?, WidthFunction::optimal_cs(alpha)?),
        OptimalFamily::Acs { alpha } => (optimal_acs_values(alpha)?, WidthFunction::optimal_acs(alpha)?),
    };
    Ok(OptimalValues {
        kl_bits,
        divergence_bits,
        width,
    })
}

/// Every bound that follows from D_KL alone, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichBounds {
    pub kl_bits: f64,
    pub cs_lower_bits: f64,
    pub cs_upper_bits: f64,
    /// Upper bound on the GRS index entropy.
    pub entropy_upper_bits: f64,
    pub refined_entropy_upper_bits: f64,
}

/// log2(e + 1), the additive constant of the GRS entropy bound.
pub fn log2_e_plus_1() -> f64 {
    (E + 1.0).log2()
}

pub fn kl_sandwich(kl_bits: f64) -> Result<SandwichBounds> {
    if !(kl_bits >= 0.0) {
        return Err(invalid(format!("KL must be non-negative, got {kl_bits}")));
    }
    let spread = (kl_bits + 1.0).log2();
    Ok(SandwichBounds {
        kl_bits,
        cs_lower_bits: kl_bits,
        cs_upper_bits: kl_bits + spread + 1.0,
        entropy_upper_bits: kl_bits + spread + log2_e_plus_1() + 1.0,
        refined_entropy_upper_bits: kl_bits + spread + (4f64.ln()).log2() + log2_e_plus_1(),
    })
}

/// D_CS computed twice: directly, and through
/// D_CS·ln 2 = −1 + ∫₀¹ ∫₀^∞ min{w(h), y} / y dh dy.
///
/// The inner integral is y·h_y + ∫_{h_y}^∞ w with h_y = sup{h : w(h) > y}.
/// Returns (direct, representation), both in bits.
pub fn dcs_integral_representation_check(w: &WidthFunction, tol: f64) -> Result<(f64, f64)> {
    check_tol(tol)?;
    if !w.h_max().is_finite() {
        return Err(Error::UnboundedSupport);
    }
    let lhs = quad_phi_integral(w, &Phi::Cs, tol)?.value_bits;

    let inner = Integrator::new(1e-13);
    let g = |y: f64| -> f64 {
        let hy = w.inverse(y);
        let tail = w.tail_mass(hy, inner).unwrap_or(f64::NAN);
        hy + tail / y
    };
    let mut edges = vec![0.0];
    let mut levels = w.level_values();
    levels.retain(|&l| l > 0.0 && l < 1.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    edges.extend(levels);
    edges.push(1.0);
    let est = Integrator::new(tol * LN_2).integrate(g, &split_panels(&edges));
    if !est.converged || est.value.is_nan() {
        return Err(Error::NonConvergence {
            value: (est.value - 1.0) / LN_2,
            abs_error: est.abs_error / LN_2,
        });
    }
    Ok((lhs, (est.value - 1.0) / LN_2))
}
