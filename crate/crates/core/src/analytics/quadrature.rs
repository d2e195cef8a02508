//! Globally adaptive 21-point Gauss–Kronrod integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::QuadratureError;

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
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

/// Result of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subintervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_subintervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut abs_sum = kronrod.abs();
    let mut gauss = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Panel {
        lo,
        hi,
        value,
        error,
    }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// ∫ₐᵇ f over a finite interval.
    pub fn integrate<F: Fn(f64) -> f64>(
        &self,
        f: F,
        lo: f64,
        hi: f64,
    ) -> Result<Estimate, QuadratureError> {
        self.integrate_pieces(&f, &[lo, hi])
    }

    /// ∫ over consecutive pieces `[points[0], points[1]], …`; interior points
    /// are where the integrand has kinks or jumps.
    pub fn integrate_pieces<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        points: &[f64],
    ) -> Result<Estimate, QuadratureError> {
        assert!(points.len() >= 2, "need at least one interval");
        let lo = points[0];
        let hi = points[points.len() - 1];
        let mut heap = BinaryHeap::new();
        let mut value = 0.0;
        let mut error = 0.0;
        let mut evaluations = 0;
        for pair in points.windows(2) {
            if pair[1] == pair[0] {
                continue;
            }
            let panel = kronrod21(f, pair[0], pair[1]);
            evaluations += 21;
            value += panel.value;
            error += panel.error;
            heap.push(panel);
        }
        loop {
            if error <= self.target(value) {
                return Ok(Estimate {
                    value,
                    abs_error: error,
                    evaluations,
                });
            }
            let worst = match heap.pop() {
                Some(panel) => panel,
                None => {
                    return Ok(Estimate {
                        value,
                        abs_error: error,
                        evaluations,
                    })
                }
            };
            let mid = 0.5 * (worst.lo + worst.hi);
            let too_narrow = mid <= worst.lo || mid >= worst.hi;
            if heap.len() + 1 >= self.max_subintervals || too_narrow || !error.is_finite() {
                return Err(QuadratureError {
                    lo,
                    hi,
                    estimate: value,
                    abs_error: error,
                    subintervals: heap.len() + 1,
                    evaluations,
                });
            }
            let left = kronrod21(f, worst.lo, mid);
            let right = kronrod21(f, mid, worst.hi);
            evaluations += 42;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            // Re-sum occasionally so cancellation in the running totals does
            // not leave a stale error estimate.
            if heap.len() % 64 == 0 {
                value = heap.iter().map(|p| p.value).sum();
                error = heap.iter().map(|p| p.error).sum();
            }
        }
    }

    /// ∫ₐ^∞ f through the substitution `x = a + scale·t/(1−t)`, t ∈ [0, 1).
    /// `scale` should be the characteristic width of the integrand.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
        &self,
        f: F,
        lo: f64,
        scale: f64,
    ) -> Result<Estimate, QuadratureError> {
        let mapped = |t: f64| {
            let one_minus = 1.0 - t;
            let x = lo + scale * t / one_minus;
            if !x.is_finite() {
                return 0.0;
            }
            let value = f(x);
            if value == 0.0 {
                0.0
            } else {
                value * scale / (one_minus * one_minus)
            }
        };
        self.integrate_pieces(&mapped, &[0.0, 1.0])
    }

    /// Splits `[lo, ∞)` at `breaks` (which must be increasing and above
    /// `lo`) and maps the final tail with `integrate_to_infinity`.
    pub fn integrate_split_to_infinity<F: Fn(f64) -> f64>(
        &self,
        f: F,
        lo: f64,
        breaks: &[f64],
        tail_scale: f64,
    ) -> Result<Estimate, QuadratureError> {
        let mut points = vec![lo];
        points.extend(breaks.iter().copied().filter(|&b| b > lo));
        let last = *points.last().expect("non-empty");
        let mut total = if points.len() >= 2 {
            self.integrate_pieces(&f, &points)?
        } else {
            Estimate {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 0,
            }
        };
        let tail = self.integrate_to_infinity(&f, last, tail_scale)?;
        total.value += tail.value;
        total.abs_error += tail.abs_error;
        total.evaluations += tail.evaluations;
        Ok(total)
    }
}
