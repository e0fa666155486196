//! Parameter sweeps and the bound-verification suite.
//!
//! Every row checks its own identities before it is returned, so a sweep
//! either produces rows that satisfy the bounds or fails with a diagnostic.

use std::f64::consts::LN_2;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergences::{
    dcs_laplace_closed, divergence, kl_divergence, kl_sandwich, log2_e_plus_1, DivergenceKind, KlRoute,
};
use crate::error::{invalid, Error, Result};
use crate::grs::grs_index_distribution;
use crate::measures::{make_pair, PairSpec, SyntheticWidth};
use crate::special::EULER_GAMMA;
use crate::width::{width_eval, WidthFunction};

/// Slack for comparisons between quantities that are exact up to rounding.
const ROUNDING: f64 = 1e-9;

fn row_error(what: &str, detail: String) -> Error {
    Error::InvalidRow(format!("{what}: {detail}"))
}

/// Recursion cut-off for a pair. Step widths shrink S_k geometrically and can
/// afford a tiny cut-off; continuous widths shrink it polynomially near h_max.
pub fn default_eps_stop(spec: &PairSpec) -> f64 {
    match spec {
        PairSpec::Discrete { .. } => 1e-12,
        PairSpec::Synthetic { width } => match width {
            SyntheticWidth::Realize { pair } => default_eps_stop(pair),
            SyntheticWidth::Rectangle { .. } | SyntheticWidth::Epsilon { .. } | SyntheticWidth::Table { .. } => 1e-12,
            _ => 1e-8,
        },
        PairSpec::Gaussian { d, .. } if *d > 1 => 1e-6,
        _ => 1e-8,
    }
}

/// One point of the Laplace sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceRow {
    pub b: f64,
    pub neg_ln_b: f64,
    pub kl_bits: f64,
    pub dcs_bits: f64,
    pub delta_bits: f64,
    pub lower_digamma_nats: f64,
    pub upper_digamma_nats: f64,
    pub entropy_bits: f64,
    #[serde(skip)]
    pub entropy_tail_bound_bits: f64,
}

impl LaplaceRow {
    pub fn validate(&self) -> Result<()> {
        let what = format!("laplace row b = {}", self.b);
        if self.delta_bits != self.dcs_bits - self.kl_bits {
            return Err(row_error(&what, "delta_bits is not dcs_bits − kl_bits".into()));
        }
        if self.lower_digamma_nats != EULER_GAMMA - self.b || self.upper_digamma_nats != EULER_GAMMA - self.b / 2.0 {
            return Err(row_error(&what, "digamma bound columns do not match γ − b, γ − b/2".into()));
        }
        let gap = self.delta_bits * LN_2;
        if gap < self.lower_digamma_nats - ROUNDING || gap > self.upper_digamma_nats + ROUNDING {
            return Err(row_error(
                &what,
                format!(
                    "Δ·ln 2 = {gap} outside [{}, {}]",
                    self.lower_digamma_nats, self.upper_digamma_nats
                ),
            ));
        }
        check_chain(&what, self.kl_bits, self.dcs_bits, self.entropy_bits, self.entropy_tail_bound_bits)
    }
}

/// kl ≤ dcs ≤ H ≤ dcs + log2(e+1) ≤ kl + log2(kl+1) + log2(e+1) + 1.
fn check_chain(what: &str, kl: f64, dcs: f64, entropy: f64, entropy_slack: f64) -> Result<()> {
    let upper = kl_sandwich(kl.max(0.0))?.entropy_upper_bits;
    let links = [
        ("D_KL ≤ D_CS", kl, dcs, ROUNDING),
        ("D_CS ≤ H[K]", dcs, entropy, entropy_slack + ROUNDING),
        ("H[K] ≤ D_CS + log2(e+1)", entropy, dcs + log2_e_plus_1(), ROUNDING),
        ("D_CS + log2(e+1) ≤ KL sandwich", dcs + log2_e_plus_1(), upper, ROUNDING),
    ];
    for (name, lhs, rhs, slack) in links {
        if lhs > rhs + slack {
            return Err(row_error(what, format!("{name} fails: {lhs} > {rhs}")));
        }
    }
    Ok(())
}

/// 25 log-spaced scales from 0.02 to 1.
pub fn default_laplace_grid() -> Vec<f64> {
    let lo = 0.02f64.ln();
    (0..25)
        .map(|i| match i {
            0 => 0.02,
            24 => 1.0,
            _ => (lo * (1.0 - i as f64 / 24.0)).exp(),
        })
        .collect()
}

pub fn default_gaussian_grid() -> Vec<u32> {
    vec![1, 2, 4, 8, 16, 32, 64]
}

pub fn default_epsilon_grid() -> Vec<f64> {
    vec![0.3, 0.1, 0.03, 0.01, 0.003]
}

/// Laplace(0, b) against Laplace(0, 1) for every b, sorted by −ln b.
pub fn laplace_sweep(b_grid: &[f64], eps_stop: f64) -> Result<Vec<LaplaceRow>> {
    if let Some(b) = b_grid.iter().find(|&&b| !(b > 0.0 && b <= 1.0)) {
        return Err(invalid(format!("laplace scale b = {b} must lie in (0, 1]")));
    }
    let mut rows: Vec<LaplaceRow> = b_grid
        .par_iter()
        .map(|&b| -> Result<LaplaceRow> {
            let spec = PairSpec::laplace(b);
            let kl_bits = kl_divergence(&spec, KlRoute::ClosedForm)?.value_bits;
            let dcs_bits = dcs_laplace_closed(b)?;
            let index = grs_index_distribution(&WidthFunction::laplace(b)?, eps_stop)?;
            let row = LaplaceRow {
                b,
                neg_ln_b: -b.ln() + 0.0,
                kl_bits,
                dcs_bits,
                delta_bits: dcs_bits - kl_bits,
                lower_digamma_nats: EULER_GAMMA - b,
                upper_digamma_nats: EULER_GAMMA - b / 2.0,
                entropy_bits: index.entropy_bits,
                entropy_tail_bound_bits: index.entropy_tail_bound_bits,
            };
            row.validate()?;
            Ok(row)
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.neg_ln_b.total_cmp(&b.neg_ln_b));
    Ok(rows)
}

/// One point of the Gaussian dimension sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianRow {
    pub d: u32,
    pub kl_bits: f64,
    pub dcs_bits: f64,
    pub delta_bits: f64,
    pub conjecture_half_log_bits: f64,
    #[serde(skip)]
    pub dcs_abs_error: f64,
}

impl GaussianRow {
    /// Δ − ½·log2(D_KL + 1).
    pub fn residual_bits(&self) -> f64 {
        self.delta_bits - self.conjecture_half_log_bits
    }

    pub fn validate(&self) -> Result<()> {
        let what = format!("gaussian row d = {}", self.d);
        if self.delta_bits != self.dcs_bits - self.kl_bits {
            return Err(row_error(&what, "delta_bits is not dcs_bits − kl_bits".into()));
        }
        if self.conjecture_half_log_bits != 0.5 * (self.kl_bits + 1.0).log2() {
            return Err(row_error(&what, "conjecture column is not ½·log2(kl + 1)".into()));
        }
        let s = kl_sandwich(self.kl_bits.max(0.0))?;
        let slack = self.dcs_abs_error + ROUNDING;
        if self.dcs_bits < s.cs_lower_bits - slack || self.dcs_bits > s.cs_upper_bits + slack {
            return Err(row_error(
                &what,
                format!("D_CS = {} outside [{}, {}]", self.dcs_bits, s.cs_lower_bits, s.cs_upper_bits),
            ));
        }
        Ok(())
    }
}

/// N(mu, sigma²)^⊗d against N(0, 1)^⊗d for every d, in grid order.
pub fn gaussian_sweep(d_grid: &[u32], mu: f64, sigma: f64) -> Result<Vec<GaussianRow>> {
    d_grid
        .par_iter()
        .map(|&d| -> Result<GaussianRow> {
            let spec = PairSpec::gaussian(mu, sigma, d);
            let kl_bits = kl_divergence(&spec, KlRoute::ClosedForm)?.value_bits;
            let dcs = divergence(&spec, DivergenceKind::CS, None)?;
            let row = GaussianRow {
                d,
                kl_bits,
                dcs_bits: dcs.value_bits,
                delta_bits: dcs.value_bits - kl_bits,
                conjecture_half_log_bits: 0.5 * (kl_bits + 1.0).log2(),
                dcs_abs_error: dcs.abs_error_estimate,
            };
            row.validate()?;
            Ok(row)
        })
        .collect()
}

/// One point of the ε-family tightness study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub eps: f64,
    pub dcs_bits: f64,
    pub entropy_bits: f64,
    pub gap_bits: f64,
    #[serde(skip)]
    pub entropy_tail_bound_bits: f64,
}

impl EpsilonRow {
    pub fn validate(&self) -> Result<()> {
        let what = format!("epsilon row eps = {}", self.eps);
        if self.gap_bits != self.entropy_bits - self.dcs_bits {
            return Err(row_error(&what, "gap_bits is not entropy_bits − dcs_bits".into()));
        }
        if self.gap_bits > log2_e_plus_1() + 1e-6 {
            return Err(row_error(&what, format!("gap {} exceeds log2(e + 1)", self.gap_bits)));
        }
        if self.gap_bits < -self.entropy_tail_bound_bits - ROUNDING {
            return Err(row_error(&what, format!("H[K] below D_CS by {}", -self.gap_bits)));
        }
        Ok(())
    }
}

/// Codelength gap H[K] − D_CS on the three-level width family.
pub fn epsilon_family_study(eps_grid: &[f64], eps_stop: f64) -> Result<Vec<EpsilonRow>> {
    if eps_grid.windows(2).any(|p| !(p[1] < p[0])) {
        return Err(invalid("epsilon grid must be strictly decreasing"));
    }
    eps_grid
        .par_iter()
        .map(|&eps| -> Result<EpsilonRow> {
            let spec = PairSpec::synthetic(SyntheticWidth::Epsilon { eps });
            let w = width_eval(&spec)?;
            let dcs_bits = divergence(&spec, DivergenceKind::CS, None)?.value_bits;
            let index = grs_index_distribution(&w, eps_stop)?;
            let row = EpsilonRow {
                eps,
                dcs_bits,
                entropy_bits: index.entropy_bits,
                gap_bits: index.entropy_bits - dcs_bits,
                entropy_tail_bound_bits: index.entropy_tail_bound_bits,
            };
            row.validate()?;
            Ok(row)
        })
        .collect()
}

/// Every quantity the bound suite compares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantities {
    pub kl_bits: f64,
    pub dcs_bits: f64,
    pub dacs_bits: f64,
    pub entropy_bits: f64,
    pub entropy_tail_bound_bits: f64,
    pub mean_index: f64,
    pub mean_tail_bound: f64,
    pub d_inf_bits: f64,
    pub quadrature_tol_bits: f64,
}

/// lhs ≤ rhs, passing when margin = rhs − lhs ≥ −slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl Inequality {
    fn new(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            pass: margin >= -slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub spec: PairSpec,
    pub quantities: Option<Quantities>,
    pub inequalities: Vec<Inequality>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl PairReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.inequalities.iter().all(|i| i.pass)
    }

    pub fn inequality(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|i| i.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundReport {
    pub pairs: Vec<PairReport>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(PairReport::passed)
    }
}

/// Names of the inequalities checked for every pair.
pub mod checks {
    pub const KL_LE_CS: &str = "kl_le_cs";
    pub const CS_LE_ENTROPY: &str = "cs_le_entropy";
    pub const ENTROPY_LE_CS_PLUS_LOG2_E1: &str = "entropy_le_cs_plus_log2_e1";
    pub const CS_PLUS_LOG2_E1_LE_KL_BOUND: &str = "cs_plus_log2_e1_le_kl_bound";
    pub const CS_LE_ACS: &str = "cs_le_acs";
    pub const ENTROPY_LE_ACS_PLUS_1: &str = "entropy_le_acs_plus_1";
    pub const ENTROPY_LE_REFINED: &str = "entropy_le_refined";
    pub const MEAN_GE_EXP2_DINF: &str = "mean_ge_exp2_dinf";
}

fn evaluate_pair(spec: &PairSpec) -> Result<(Quantities, Vec<Inequality>)> {
    let pair = make_pair(spec)?;
    if !pair.d_inf_bits().is_finite() {
        return Err(Error::Unsupported("bound suite needs finite D_∞".into()));
    }
    let w = width_eval(spec)?;
    let tol = w.default_tol_bits();
    let kl = kl_divergence(spec, KlRoute::ClosedForm)?;
    let dcs = divergence(spec, DivergenceKind::CS, Some(tol))?;
    let dacs = divergence(spec, DivergenceKind::ACS, Some(tol))?;
    let index = grs_index_distribution(&w, default_eps_stop(spec))?;
    let q = Quantities {
        kl_bits: kl.value_bits,
        dcs_bits: dcs.value_bits,
        dacs_bits: dacs.value_bits,
        entropy_bits: index.entropy_bits,
        entropy_tail_bound_bits: index.entropy_tail_bound_bits,
        mean_index: index.mean_index,
        mean_tail_bound: index.mean_tail_bound,
        d_inf_bits: pair.d_inf_bits(),
        quadrature_tol_bits: tol,
    };
    let sandwich = kl_sandwich(q.kl_bits.max(0.0))?;
    let c = log2_e_plus_1();
    let h_slack = tol + q.entropy_tail_bound_bits;
    let floor = 2f64.powf(q.d_inf_bits);
    use checks::*;
    let inequalities = vec![
        Inequality::new(KL_LE_CS, q.kl_bits, q.dcs_bits, tol),
        Inequality::new(CS_LE_ENTROPY, q.dcs_bits, q.entropy_bits, h_slack),
        Inequality::new(ENTROPY_LE_CS_PLUS_LOG2_E1, q.entropy_bits, q.dcs_bits + c, tol),
        Inequality::new(CS_PLUS_LOG2_E1_LE_KL_BOUND, q.dcs_bits + c, sandwich.entropy_upper_bits, tol),
        Inequality::new(CS_LE_ACS, q.dcs_bits, q.dacs_bits, tol),
        Inequality::new(ENTROPY_LE_ACS_PLUS_1, q.entropy_bits, q.dacs_bits + 1.0, 1e-6),
        Inequality::new(ENTROPY_LE_REFINED, q.entropy_bits, sandwich.refined_entropy_upper_bits, tol),
        Inequality::new(
            MEAN_GE_EXP2_DINF,
            floor,
            q.mean_index + q.mean_tail_bound,
            ROUNDING * floor.max(1.0),
        ),
    ];
    Ok((q, inequalities))
}

/// Evaluates every pair; a failing computation marks that pair only.
pub fn bound_suite(specs: &[PairSpec]) -> BoundReport {
    let pairs = specs
        .par_iter()
        .map(|spec| match evaluate_pair(spec) {
            Ok((q, inequalities)) => PairReport {
                spec: spec.clone(),
                quantities: Some(q),
                inequalities,
                error: None,
            },
            Err(e) => PairReport {
                spec: spec.clone(),
                quantities: None,
                inequalities: Vec::new(),
                error: Some(e.to_string()),
            },
        })
        .collect();
    BoundReport { pairs }
}

/// Fifteen pairs covering all four families, identity pairs included.
pub fn default_suite() -> Vec<PairSpec> {
    vec![
        PairSpec::laplace(1.0),
        PairSpec::laplace(0.5),
        PairSpec::laplace(0.25),
        PairSpec::laplace(0.1),
        PairSpec::gaussian(1.0, 0.5, 1),
        PairSpec::gaussian(0.0, 0.8, 1),
        PairSpec::gaussian(0.5, 0.7, 2),
        PairSpec::discrete(&[0.5, 0.5, 0.0, 0.0], &[0.25; 4]),
        PairSpec::discrete(&[1.0, 0.0, 0.0, 0.0], &[0.5, 0.25, 0.125, 0.125]),
        PairSpec::discrete(&[0.1, 0.2, 0.7], &[0.3, 0.3, 0.4]),
        PairSpec::discrete(&[0.2; 5], &[0.2; 5]),
        PairSpec::synthetic(SyntheticWidth::Rectangle { c: 4.0 }),
        PairSpec::synthetic(SyntheticWidth::Epsilon { eps: 0.1 }),
        PairSpec::synthetic(SyntheticWidth::Table {
            h: vec![0.0, 0.4, 1.2, 2.2],
            w: vec![1.0, 0.5, 0.2, 0.0],
        }),
        PairSpec::synthetic(SyntheticWidth::Realize {
            pair: Box::new(PairSpec::laplace(0.3)),
        }),
    ]
}

/// Provenance written next to each sweep's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub tool: String,
    pub version: String,
    pub sweep: String,
    pub seed: u64,
    pub eps_stop: Option<f64>,
    pub tol_bits: Option<f64>,
    pub grid: Vec<f64>,
}

impl SweepMetadata {
    pub fn new(sweep: &str, seed: u64, eps_stop: Option<f64>, tol_bits: Option<f64>, grid: Vec<f64>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            sweep: sweep.to_string(),
            seed,
            eps_stop,
            tol_bits,
            grid,
        }
    }
}

/// `<out>.meta.json` for an output path.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    out.with_file_name(name)
}

pub fn write_sidecar(out: &Path, meta: &SweepMetadata) -> Result<PathBuf> {
    let path = sidecar_path(out);
    let file = std::fs::File::create(&path)?;
    serde_json::to_writer_pretty(file, meta)?;
    Ok(path)
}

/// Writes rows as CSV with a header line taken from the row's field names.
pub fn write_rows<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// The header line a row type produces, without its trailing newline.
pub fn csv_header<T: Serialize>(row: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(std::slice::from_ref(row), &mut buf)?;
    let text = String::from_utf8(buf).map_err(|e| invalid(e.to_string()))?;
    Ok(text.lines().next().unwrap_or_default().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn laplace_grid_shape() {
        let g = default_laplace_grid();
        assert_eq!(g.len(), 25);
        assert_eq!((g[0], g[24]), (0.02, 1.0));
        assert!(g.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn laplace_examples() {
        let rows = laplace_sweep(&[1.0, 0.5, 0.1], 1e-6).unwrap();
        assert_eq!(rows[0].b, 1.0);
        assert!(rows[0].delta_bits.abs() < 1e-15);
        let half = &rows[1];
        assert!((half.delta_bits * LN_2 - (1.0 - LN_2)).abs() < 1e-12);
        assert!((half.lower_digamma_nats - 0.077_215_665).abs() < 1e-9);
        assert!((half.upper_digamma_nats - 0.327_215_665).abs() < 1e-9);
        assert!(rows[2].b == 0.1);
    }

    #[test]
    fn rows_reject_tampering() {
        let mut row = laplace_sweep(&[0.5], 1e-6).unwrap().remove(0);
        row.delta_bits += 1e-3;
        assert!(matches!(row.validate(), Err(Error::InvalidRow(_))));
    }

    #[test]
    fn csv_headers_are_exact() {
        let l = laplace_sweep(&[0.5], 1e-6).unwrap();
        assert_eq!(
            csv_header(&l[0]).unwrap(),
            "b,neg_ln_b,kl_bits,dcs_bits,delta_bits,lower_digamma_nats,upper_digamma_nats,entropy_bits"
        );
        let g = gaussian_sweep(&[1], 1.0, 0.5).unwrap();
        assert_eq!(csv_header(&g[0]).unwrap(), "d,kl_bits,dcs_bits,delta_bits,conjecture_half_log_bits");
        let e = epsilon_family_study(&[0.5], 1e-12).unwrap();
        assert_eq!(csv_header(&e[0]).unwrap(), "eps,dcs_bits,entropy_bits,gap_bits");
    }

    #[test]
    fn near_identity_gaussian() {
        let rows = gaussian_sweep(&[1], 0.0, 1.0 - 1e-12).unwrap();
        assert!(rows[0].delta_bits.abs() < 1e-6);
    }

    #[test]
    fn epsilon_dcs_is_elementary() {
        let rows = epsilon_family_study(&[0.1], 1e-12).unwrap();
        let want = -(E / (1.0 + E)) * 0.1f64.log2();
        assert!((rows[0].dcs_bits - want).abs() < 1e-12);
        assert!((rows[0].dcs_bits - 2.428_524).abs() < 1e-6);
        assert!(epsilon_family_study(&[0.1, 0.3], 1e-12).is_err());
    }

    #[test]
    fn suite_reports_failures_per_pair() {
        let specs = vec![
            PairSpec::laplace(0.5),
            PairSpec::synthetic(SyntheticWidth::OptimalCs { alpha: 0.5 }),
        ];
        let report = bound_suite(&specs);
        assert!(report.pairs[0].passed());
        assert!(report.pairs[1].error.is_some());
        assert!(!report.passed());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("/tmp/x/lap.csv")), PathBuf::from("/tmp/x/lap.csv.meta.json"));
    }
}
