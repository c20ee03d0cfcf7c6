//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature.
//!
//! The interval with the largest error estimate is bisected until the
//! summed estimate meets the requested tolerance. Error estimates follow the
//! QUADPACK rescaling, including its roundoff floor of `50 eps` times the
//! integral of `|f|`; a segment already at that floor is never split again.

use crate::error::{Error, Result};
use crate::real::Real;

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

/// Value and diagnostics of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_err: T,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    err: T,
    at_floor: bool,
}

impl<T: Real> Quadrature<T> {
    pub fn new(abs_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol: T::zero(),
            max_intervals: 4000,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }

    /// Integrates `f` over `[points[0], points[last]]`, using the interior
    /// points as initial breakpoints. `points` must be non-decreasing.
    pub fn integrate<F>(&self, f: F, points: &[T]) -> Result<Integral<T>>
    where
        F: Fn(T) -> T,
    {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "integration needs at least two points".into(),
            ));
        }
        if points.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidParameter(
                "integration breakpoints must be sorted and finite".into(),
            ));
        }

        let mut segments: Vec<Segment<T>> = Vec::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            if w[0] < w[1] {
                segments.push(gk21(&f, w[0], w[1]));
                evaluations += 21;
            }
        }
        if segments.is_empty() {
            return Ok(Integral {
                value: T::zero(),
                abs_err: T::zero(),
                intervals: 0,
                evaluations: 0,
            });
        }

        loop {
            let value: T = segments.iter().map(|s| s.value).sum();
            let err: T = segments.iter().map(|s| s.err).sum();
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if !value.is_finite() || !err.is_finite() {
                return Err(Error::Quadrature {
                    achieved: err.as_f64(),
                    requested: target.as_f64(),
                });
            }
            if err <= target {
                return Ok(Integral {
                    value,
                    abs_err: err,
                    intervals: segments.len(),
                    evaluations,
                });
            }

            let worst = segments
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.at_floor)
                .max_by(|x, y| {
                    x.1.err
                        .partial_cmp(&y.1.err)
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .map(|(i, _)| i);
            let Some(i) = worst else {
                // every remaining segment is limited by roundoff
                return Ok(Integral {
                    value,
                    abs_err: err,
                    intervals: segments.len(),
                    evaluations,
                });
            };
            if segments.len() >= self.max_intervals {
                return Err(Error::Quadrature {
                    achieved: err.as_f64(),
                    requested: target.as_f64(),
                });
            }

            let s = segments[i];
            let mid = (s.a + s.b) / T::lit(2.0);
            if !(s.a < mid && mid < s.b) {
                segments[i].at_floor = true;
                continue;
            }
            segments[i] = gk21(&f, s.a, mid);
            segments.push(gk21(&f, mid, s.b));
            evaluations += 42;
        }
    }
}

fn gk21<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Segment<T> {
    let center = (a + b) / T::lit(2.0);
    let half = (b - a) / T::lit(2.0);
    let f_center = f(center);

    let mut res_gauss = T::zero();
    let mut res_kronrod = f_center * T::lit(WGK[10]);
    let mut res_abs = (f_center * T::lit(WGK[10])).abs();
    let mut values = [(T::zero(), T::zero()); 10];

    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        *slot = (f1, f2);
        let w = T::lit(WGK[j]);
        res_kronrod += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_kronrod / T::lit(2.0);
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for (j, &(f1, f2)) in values.iter().enumerate() {
        res_asc += T::lit(WGK[j]) * ((f1 - mean).abs() + (f2 - mean).abs());
    }

    let scale = half.abs();
    let value = res_kronrod * half;
    res_abs *= scale;
    res_asc *= scale;

    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != T::zero() && err != T::zero() {
        let r = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if r < T::one() { res_asc * r } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    let mut at_floor = false;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor >= err {
        err = floor;
        at_floor = true;
    }
    if res_abs == T::zero() {
        at_floor = true;
    }

    Segment {
        a,
        b,
        value,
        err,
        at_floor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact_on_one_panel() {
        let q = Quadrature::new(1e-14);
        let r = q
            .integrate(|x: f64| x.powi(7) - 3.0 * x * x, &[-1.0, 2.0])
            .unwrap();
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn endpoint_log_singularity_converges() {
        // int_0^1 ln x dx = -1
        let r = Quadrature::new(1e-12)
            .integrate(|x: f64| x.ln(), &[0.0, 1.0])
            .unwrap();
        assert!((r.value + 1.0).abs() < 1e-11, "{:?}", r);
    }

    #[test]
    fn sharp_peak_is_resolved_with_breakpoint() {
        // Lorentzian of width 1e-3 integrates to pi * (atan(1/w)*2)/w ... normalized
        let w = 1e-3_f64;
        let f = |x: f64| w / (x * x + w * w);
        let exact = 2.0 * (1.0 / w).atan();
        let r = Quadrature::new(1e-12)
            .integrate(f, &[-1.0, 0.0, 1.0])
            .unwrap();
        assert!((r.value - exact).abs() < 1e-11);
    }

    #[test]
    fn interval_cap_reports_failure() {
        let q = Quadrature::new(1e-15).with_max_intervals(3);
        let err = q
            .integrate(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0])
            .unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn degenerate_and_unsorted_inputs() {
        let q = Quadrature::new(1e-12);
        assert_eq!(q.integrate(|x: f64| x, &[1.0, 1.0]).unwrap().value, 0.0);
        assert!(q.integrate(|x: f64| x, &[1.0]).is_err());
        assert!(q.integrate(|x: f64| x, &[1.0, 0.0]).is_err());
        assert!(q.integrate(|x: f64| x, &[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn single_precision_stops_at_roundoff_floor() {
        let r = Quadrature::new(1e-12_f32)
            .integrate(|x: f32| x.cos(), &[0.0, std::f32::consts::PI / 2.0])
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-5);
        let r64 = Quadrature::new(1e-14)
            .integrate(|x: f64| x.sin(), &[0.0, PI])
            .unwrap();
        assert!((r64.value - 2.0).abs() < 1e-14);
    }
}
