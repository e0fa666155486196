//! Globally adaptive Gauss–Kronrod (10, 21) quadrature over panels.
//!
//! An integral is described as a list of [`Panel`]s. Each panel carries its
//! own change of variable: plain, logarithmic (`h = e^s`), or reciprocal for
//! a half-infinite tail (`h = 1/t`). All subintervals of all panels share one
//! error budget, and the worst one is bisected until the summed error
//! estimate drops below the tolerance.

use std::collections::BinaryHeap;

use std::cmp::Ordering;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One piece of an integration domain together with its change of variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Panel {
    /// ∫_lo^hi f(h) dh directly.
    Linear { lo: f64, hi: f64 },
    /// ∫_lo^hi f(h) dh as ∫ f(e^s) e^s ds over [ln lo, ln hi]; needs lo > 0.
    Log { lo: f64, hi: f64 },
    /// ∫_lo^∞ f(h) dh as ∫ f(1/t) / t² dt over (0, 1/lo]; needs lo > 0.
    InverseTail { lo: f64 },
}

impl Panel {
    fn coordinates(&self) -> (f64, f64) {
        match *self {
            Panel::Linear { lo, hi } => (lo, hi),
            Panel::Log { lo, hi } => (lo.ln(), hi.ln()),
            Panel::InverseTail { lo } => (0.0, 1.0 / lo),
        }
    }

    fn transformed<F: Fn(f64) -> f64>(&self, f: &F, t: f64) -> f64 {
        match *self {
            Panel::Linear { .. } => f(t),
            Panel::Log { .. } => {
                let h = t.exp();
                let v = f(h);
                if v == 0.0 {
                    0.0
                } else {
                    v * h
                }
            }
            Panel::InverseTail { .. } => {
                let h = 1.0 / t;
                let v = f(h);
                if v == 0.0 {
                    0.0
                } else {
                    v * h * h
                }
            }
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Adaptive integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    panel: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

// Max-heap on error; ties broken by position so the bisection order is fixed.
struct ByError(Segment);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.panel.cmp(&self.0.panel))
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// One Gauss–Kronrod 21-point application on [a, b]: (value, error estimate).
pub fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_g = 0.0;
    let mut res_k = f_center * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let value = res_k * half;
    let err = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    (value, err)
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl Integrator {
    pub fn new(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over [a, b] with no change of variable.
    pub fn integrate_interval<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Estimate {
        self.integrate(f, &[Panel::Linear { lo: a, hi: b }])
    }

    /// Integrates `f` over the union of `panels`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, panels: &[Panel]) -> Estimate {
        let mut heap = BinaryHeap::new();
        let mut done: Vec<Segment> = Vec::new();
        let mut evaluations = 0usize;
        for (idx, panel) in panels.iter().enumerate() {
            let (a, b) = panel.coordinates();
            if !(b > a) {
                continue;
            }
            let g = |t: f64| panel.transformed(&f, t);
            let (value, error) = gauss_kronrod_21(g, a, b);
            evaluations += 21;
            heap.push(ByError(Segment {
                panel: idx,
                a,
                b,
                value,
                error,
            }));
        }
        let mut total_err: f64 = heap.iter().map(|s| s.0.error).sum();
        let mut count = heap.len();
        while total_err > self.abs_tol && count < self.max_intervals {
            let Some(ByError(seg)) = heap.pop() else {
                break;
            };
            let mid = 0.5 * (seg.a + seg.b);
            // Intervals that can no longer be split are retired as they are.
            if !(mid > seg.a && mid < seg.b) || (seg.b - seg.a) <= 1e-14 * seg.a.abs().max(seg.b.abs()) * 4.0 {
                total_err -= seg.error;
                done.push(seg);
                if heap.is_empty() {
                    break;
                }
                continue;
            }
            let panel = panels[seg.panel];
            let g = |t: f64| panel.transformed(&f, t);
            let (v1, e1) = gauss_kronrod_21(&g, seg.a, mid);
            let (v2, e2) = gauss_kronrod_21(&g, mid, seg.b);
            evaluations += 42;
            total_err += e1 + e2 - seg.error;
            heap.push(ByError(Segment {
                panel: seg.panel,
                a: seg.a,
                b: mid,
                value: v1,
                error: e1,
            }));
            heap.push(ByError(Segment {
                panel: seg.panel,
                a: mid,
                b: seg.b,
                value: v2,
                error: e2,
            }));
            count += 1;
        }
        done.extend(heap.into_iter().map(|s| s.0));
        done.sort_by(|x, y| x.panel.cmp(&y.panel).then(x.a.total_cmp(&y.a)));
        let value = neumaier_sum(done.iter().map(|s| s.value));
        let abs_error = neumaier_sum(done.iter().map(|s| s.error)).abs();
        Estimate {
            value,
            abs_error,
            evaluations,
            converged: abs_error <= self.abs_tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let est = Integrator::new(1e-12).integrate_interval(|x| 3.0 * x * x - 2.0 * x + 1.0, 0.0, 2.0);
        assert!((est.value - 6.0).abs() < 1e-13);
        assert!(est.converged);
    }

    #[test]
    fn log_panel_matches_linear() {
        let f = |x: f64| (-x).exp();
        let lin = Integrator::new(1e-13).integrate(f, &[Panel::Linear { lo: 0.5, hi: 40.0 }]);
        let log = Integrator::new(1e-13).integrate(f, &[Panel::Log { lo: 0.5, hi: 40.0 }]);
        let want = (-0.5f64).exp() - (-40.0f64).exp();
        assert!((lin.value - want).abs() < 1e-12);
        assert!((log.value - want).abs() < 1e-12);
    }

    #[test]
    fn inverse_tail_handles_polynomial_decay() {
        // ∫_1^∞ h^{-2} dh = 1 and ∫_1^∞ ln h / h² dh = 1.
        let i = Integrator::new(1e-12);
        let a = i.integrate(|h| 1.0 / (h * h), &[Panel::InverseTail { lo: 1.0 }]);
        let b = i.integrate(|h| h.ln() / (h * h), &[Panel::InverseTail { lo: 1.0 }]);
        assert!((a.value - 1.0).abs() < 1e-11);
        assert!((b.value - 1.0).abs() < 1e-10, "{b:?}");
    }

    #[test]
    fn endpoint_power_singularity_converges() {
        // ∫_0^1 x^{0.02} dx = 1/1.02 with a steep endpoint.
        let i = Integrator::new(1e-11);
        let est = i.integrate(|x: f64| x.powf(0.02), &[Panel::Linear { lo: 0.0, hi: 1.0 }]);
        assert!(est.converged, "{est:?}");
        assert!((est.value - 1.0 / 1.02).abs() < 1e-10);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let i = Integrator {
            abs_tol: 1e-15,
            max_intervals: 3,
        };
        let est = i.integrate_interval(|x: f64| if x < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0);
        assert!(!est.converged);
        assert!((est.value - 0.7).abs() < 0.05);
    }
}
