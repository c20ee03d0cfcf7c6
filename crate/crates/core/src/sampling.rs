//! Continuous-time fading seen through a matched filter sampled at `2^K` Hz.
//!
//! The sampled fading process has spectral density on `[-pi, pi)`
//!
//! ```text
//! S~_K(w) = 2^K sum_n S(2^K (w - 2 pi n)) sinc^2(w - 2 pi n),   sinc(x) = sin(x/2) / (x/2)
//! ```
//!
//! and variance `b_K = int S(w) sinc^2(w / 2^K) dw / 2pi <= 1`. With peak
//! `P 2^-K` per sample, the capacity per unit energy of the sampled channel
//! is `b_K - I_K / P` where
//!
//! ```text
//! I_K = int_{|u| <= pi 2^K} log(1 + P S^(u)) du / 2pi,
//! S^(u) = sum_n S(u - 2 pi n 2^K) sinc^2(u / 2^K - 2 pi n).
//! ```
//!
//! The variance `b_K` takes the place of the leading 1 in `1 - I/P` because
//! the sampled process is not normalized. As `K -> inf`, `b_K -> 1`,
//! `I_K -> I(P)` and the sampled capacity tends to the continuous-time one.

use crate::capacity::spectral_quadrature;
use crate::error::{invalid, Error, Result};
use crate::quadrature::Integral;
use crate::real::{excess_over_log1p, sinc, Real};
use crate::spectra::{ModelKind, SpectralModel, Support, TimeDomain};

/// Certified bound on the truncated part of the aliasing sum.
pub const TAIL_TARGET: f64 = 1e-12;

/// Most aliasing terms (per side) the certificate may ask for.
pub const MAX_ALIAS_TERMS: usize = 10_000_000;

/// Largest resolution level accepted.
pub const MAX_LEVEL: u32 = 40;

/// Per-level record of the sampled channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingLimit<T> {
    pub k: u32,
    /// Variance of the sampled fading process.
    pub b_k: T,
    pub i_k: T,
    /// `b_K - I_K / P`.
    pub cp_kk: T,
    /// Absolute error estimate of `cp_kk`.
    pub quad_err: T,
}

/// Bounds on `I_K` at a fixed level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich<T> {
    /// `int_{|u| <= pi 2^K} log(1 + P S(u) sinc^2(u / 2^K)) du / 2pi`: the
    /// unaliased term alone.
    pub lower: T,
    /// `lower + P int_{|u| > pi 2^K} S(u) sinc^2(u / 2^K) du / 2pi`.
    pub upper: T,
    /// `int_{|u| <= pi 2^K} log(1 + P S) du / 2pi + P int_{|u| > pi 2^K} S du / 2pi`.
    pub upper_loose: T,
}

/// Aliasing sum of a continuous-time model at level `K`.
struct Aliasing<'a, T> {
    model: &'a SpectralModel<T>,
    /// `2^K`.
    scale: T,
    /// `2 pi 2^K`, the aliasing period in the continuous frequency variable.
    period: T,
    support: Support<T>,
    /// Terms per side for models without compact support.
    terms: usize,
}

impl<'a, T: Real> Aliasing<'a, T> {
    fn new(model: &'a SpectralModel<T>, k: u32) -> Result<Self> {
        if model.time_domain() != TimeDomain::Continuous {
            return Err(invalid("sampling needs a continuous-time model"));
        }
        if matches!(model.kind(), ModelKind::BlockFading { .. }) {
            return Err(Error::Unsupported(
                "block fading has no spectral density to sample".into(),
            ));
        }
        if k > MAX_LEVEL {
            return Err(invalid(format!(
                "resolution level must be <= {MAX_LEVEL}, got {k}"
            )));
        }
        let scale = T::lit(2.0).powi(k as i32);
        let support = model.support()?;
        let terms = match support {
            Support::Compact { .. } => 0,
            Support::InverseSquare { c } => tail_terms(c, scale)?,
        };
        Ok(Self {
            model,
            scale,
            period: T::TAU() * scale,
            support,
            terms,
        })
    }

    fn half_width(&self) -> T {
        T::PI() * self.scale
    }

    /// Terms `n != 0` of `S^(u)`.
    fn aliased(&self, u: T) -> T {
        let (lo_n, hi_n) = match self.support {
            Support::Compact { lo, hi } => (
                ((u - hi) / self.period).ceil().to_i64().unwrap_or(0),
                ((u - lo) / self.period).floor().to_i64().unwrap_or(0),
            ),
            Support::InverseSquare { .. } => (-(self.terms as i64), self.terms as i64),
        };
        let mut acc = T::zero();
        for n in lo_n..=hi_n {
            if n == 0 {
                continue;
            }
            let nf = T::from_i64(n).expect("small integer");
            let omega = u - nf * self.period;
            if let Ok(s) = self.model.density(omega) {
                let w = sinc(u / self.scale - T::TAU() * nf);
                acc += s * w * w;
            }
        }
        acc
    }

    /// `S^(u)` given the unaliased density value `s0 = S(u)`.
    fn full(&self, u: T, s0: T) -> T {
        let w = sinc(u / self.scale);
        s0 * w * w + self.aliased(u)
    }

    /// Points in `|u| <= pi 2^K` where an aliased copy has a kink or edge.
    fn breaks(&self) -> Vec<T> {
        let nodes: Vec<T> = match (self.model.kind(), self.support) {
            (ModelKind::Tabulated(t), _) => t.samples().map(|(f, _)| f).collect(),
            (_, Support::Compact { lo, hi }) => vec![lo, hi],
            _ => vec![],
        };
        let h = self.half_width();
        let mut out = Vec::new();
        for node in nodes {
            let first = ((node - h) / self.period).ceil().to_i64().unwrap_or(0);
            let last = ((node + h) / self.period).floor().to_i64().unwrap_or(0);
            for n in first..=last {
                let b = node - T::from_i64(n).expect("small integer") * self.period;
                if b.abs() < h {
                    out.push(b);
                }
            }
        }
        out
    }

    fn integrate<F>(&self, h: F, p: T) -> Result<Integral<T>>
    where
        F: Fn(T, T) -> T,
    {
        let half = self.half_width();
        self.model
            .integrate_between(h, -half, half, &self.breaks(), &spectral_quadrature(p))
    }
}

/// Aliasing terms per side so that the neglected part of `S~_K` is below
/// [`TAIL_TARGET`], for `S(w) <= c / w^2`.
///
/// Term `n` is at most `4 c / (4^K pi^4 (2|n| - 1)^4)` in the continuous
/// variable (using `sinc^2(y) <= 4 / y^2`); summing both tails beyond `N`
/// and multiplying by `2^K` gives `8 c / (2^K pi^4 6 (2N - 1)^3)`.
fn tail_terms<T: Real>(c: T, scale: T) -> Result<usize> {
    let pi4 = T::PI().powi(4);
    let needed = T::lit(8.0) * c / (scale * pi4 * T::lit(6.0) * T::lit(TAIL_TARGET));
    let m = needed.cbrt();
    let n = ((m + T::one()) / T::lit(2.0)).ceil().max(T::one());
    match n.to_usize() {
        Some(n) if n <= MAX_ALIAS_TERMS => Ok(n),
        _ => Err(Error::TailBound {
            target: TAIL_TARGET,
            max_terms: MAX_ALIAS_TERMS,
        }),
    }
}

/// `S~_K(omega)` for `omega` in `[-pi, pi)`.
pub fn aliased_spectrum<T: Real>(model: &SpectralModel<T>, k: u32, omega: T) -> Result<T> {
    let alias = Aliasing::new(model, k)?;
    let pi = T::PI();
    if !(omega >= -pi && omega < pi) {
        return Err(Error::OutOfDomain {
            omega: omega.as_f64(),
            lo: -std::f64::consts::PI,
            hi: std::f64::consts::PI,
        });
    }
    let u = omega * alias.scale;
    let s0 = match model.density(u) {
        Ok(s) => s,
        Err(Error::OutOfDomain { .. }) => T::zero(),
        Err(e) => return Err(e),
    };
    Ok(alias.scale * alias.full(u, s0))
}

/// `b_K`, the variance of the sampled fading process.
pub fn sampled_variance<T: Real>(model: &SpectralModel<T>, k: u32) -> Result<Integral<T>> {
    let alias = Aliasing::new(model, k)?;
    let scale = alias.scale;
    model.integrate(
        |omega, s| {
            let w = sinc(omega / scale);
            s * w * w
        },
        &spectral_quadrature(T::one()),
    )
}

pub fn i_k<T: Real>(model: &SpectralModel<T>, k: u32, p: T) -> Result<Integral<T>> {
    check_peak(p)?;
    let alias = Aliasing::new(model, k)?;
    alias.integrate(|u, s0| (p * alias.full(u, s0)).ln_1p(), p)
}

/// Capacity per unit energy of the channel sampled at level `K`.
pub fn cp_kk<T: Real>(model: &SpectralModel<T>, k: u32, p: T) -> Result<SamplingLimit<T>> {
    check_peak(p)?;
    let alias = Aliasing::new(model, k)?;
    // b_K - I_K / P = (1/P) int phi(P S^) over the fundamental band, because
    // S^ integrates to b_K there.
    let penalty = alias.integrate(|u, s0| excess_over_log1p(p * alias.full(u, s0)), p)?;
    let b = sampled_variance(model, k)?;
    let i = i_k(model, k, p)?;
    Ok(SamplingLimit {
        k,
        b_k: b.value,
        i_k: i.value,
        cp_kk: penalty.value / p,
        quad_err: penalty.abs_err / p,
    })
}

/// Lower and upper bounding integrals for `I_K` at level `K`.
pub fn sandwich<T: Real>(model: &SpectralModel<T>, k: u32, p: T) -> Result<Sandwich<T>> {
    check_peak(p)?;
    let alias = Aliasing::new(model, k)?;
    let scale = alias.scale;
    let half = alias.half_width();
    let quad = spectral_quadrature(p);
    let lower = alias
        .integrate(
            |u, s| {
                let w = sinc(u / scale);
                (p * s * w * w).ln_1p()
            },
            p,
        )?
        .value;
    let unweighted = alias.integrate(|_, s| (p * s).ln_1p(), p)?.value;
    let outside = |weighted: bool| -> Result<T> {
        let h = |u: T, s: T| {
            if weighted {
                let w = sinc(u / scale);
                s * w * w
            } else {
                s
            }
        };
        let left = model.integrate_between(h, T::neg_infinity(), -half, &[], &quad)?;
        let right = model.integrate_between(h, half, T::infinity(), &[], &quad)?;
        Ok(left.value + right.value)
    };
    Ok(Sandwich {
        lower,
        upper: lower + p * outside(true)?,
        upper_loose: unweighted + p * outside(false)?,
    })
}

fn check_peak<T: Real>(p: T) -> Result<()> {
    if !(p > T::zero() && p.is_finite()) {
        return Err(invalid(format!(
            "sampling needs a positive finite peak power, got {p}"
        )));
    }
    Ok(())
}
