//! Capacity per unit energy under a peak constraint.
//!
//! For unit-variance fading with spectral density `S` and peak SNR `P`,
//!
//! ```text
//! I(P)   = int log(1 + P S(w)) dw / 2pi
//! C_p(P) = 1 - I(P) / P
//! U_p(P) = (P / 2) int S(w)^2 dw / 2pi      (upper bound, may be infinite)
//! ```
//!
//! `C_p` is evaluated as `(1/P) int phi(P S) dw / 2pi` with
//! `phi(x) = x - log(1 + x)`, which equals `1 - I/P` for unit variance but
//! never subtracts two nearly equal numbers.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{Integral, Quadrature};
use crate::real::{excess_over_log1p, Real};
use crate::spectra::{ModelKind, SpectralModel, TimeDomain};

/// A value that may be `+inf`, kept explicit rather than relying on overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Self::Finite(x) => Some(x),
            Self::Infinite => None,
        }
    }

    /// Collapses to a float, `+inf` for the sentinel.
    pub fn to_float(&self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }

    pub fn scale(self, k: T) -> Self {
        match self {
            Self::Finite(x) => Self::Finite(x * k),
            Self::Infinite => Self::Infinite,
        }
    }

    /// `x <= self`, with everything below `+inf`.
    pub fn bounds(&self, x: T) -> bool {
        match *self {
            Self::Finite(y) => x <= y,
            Self::Infinite => true,
        }
    }
}

impl<T: Real> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => fmt::Display::fmt(x, f),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

/// Marks results that are limiting values rather than evaluated formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitConvention {
    /// `P = 0`: `c_p = 0`, the limit of `1 - I(P)/P` as `P -> 0`.
    ZeroPeak,
    /// `P = +inf`: `c_p = 1`.
    InfinitePeak,
    /// Continuous Gauss-Markov with `rho = 0`: `I(P) = P`, `c_p = 0`, the
    /// `rho -> 0` limit of the closed form.
    WhiteContinuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult<T> {
    /// Capacity per unit energy, nats per unit energy.
    pub c_p: T,
    /// `I(P)` in nats.
    pub i_of_p: Extended<T>,
    /// Fourthegy bound `U_p(P)`.
    pub u_p: Extended<T>,
    /// Absolute error estimate of `c_p` (zero for closed forms).
    pub quad_err: T,
    pub limit: Option<LimitConvention>,
}

/// Per-unit-time bounds for average power `p_avg` and peak `beta * p_avg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBounds<T> {
    pub p_avg: T,
    pub beta: T,
    /// Capacity with channel state at the receiver is at most `p_avg`.
    pub coherent_bound: T,
    /// `p_avg * C_p(beta p_avg)`.
    pub energy_bound: T,
    /// `p_avg * U_p(beta p_avg)`.
    pub fourthegy_bound: Extended<T>,
}

/// Quadrature tuned for spectral integrals at peak `p`.
///
/// The absolute target `1e-10 min(1, P)` is relaxed to `100 eps` times the
/// value once the integral is so large that the absolute target sits below
/// double-precision roundoff (`|value| > ~4.5e3`).
pub fn spectral_quadrature<T: Real>(p: T) -> Quadrature<T> {
    let target = T::lit(1e-10) * p.min(T::one());
    let floor = T::lit(100.0) * T::epsilon();
    Quadrature::new(target.max(floor))
        .with_rel_tol(floor)
        .with_max_intervals(20_000)
}

fn check_peak<T: Real>(p: T) -> Result<()> {
    if p.is_nan() || p < T::zero() {
        return Err(invalid(format!("peak power must be nonnegative, got {p}")));
    }
    Ok(())
}

fn check_finite_peak<T: Real>(p: T) -> Result<()> {
    if !(p > T::zero() && p.is_finite()) {
        return Err(invalid(format!(
            "peak power must be positive and finite, got {p}"
        )));
    }
    Ok(())
}

/// `I(P) = int log(1 + P S) dw / 2pi` by adaptive quadrature.
///
/// Block fading has no density; use [`block_cp_closed`] instead.
pub fn information_rate_integral<T: Real>(model: &SpectralModel<T>, p: T) -> Result<Integral<T>> {
    check_finite_peak(p)?;
    if model.is_degenerate() {
        return Ok(Integral {
            value: p,
            abs_err: T::zero(),
            intervals: 0,
            evaluations: 0,
        });
    }
    let integral = model.integrate(|_, s| (p * s).ln_1p(), &spectral_quadrature(p))?;
    Ok(integral)
}

/// Capacity per unit energy. `P = +inf` gives 1 and `P = 0` gives the
/// limiting value 0, both flagged in [`CapacityResult::limit`].
pub fn cap_per_unit_energy<T: Real>(model: &SpectralModel<T>, p: T) -> Result<CapacityResult<T>> {
    check_peak(p)?;
    if p.is_infinite() {
        return Ok(CapacityResult {
            c_p: T::one(),
            i_of_p: Extended::Infinite,
            u_p: Extended::Infinite,
            quad_err: T::zero(),
            limit: Some(LimitConvention::InfinitePeak),
        });
    }
    if p == T::zero() {
        return Ok(CapacityResult {
            c_p: T::zero(),
            i_of_p: Extended::Finite(T::zero()),
            u_p: Extended::Finite(T::zero()),
            quad_err: T::zero(),
            limit: Some(LimitConvention::ZeroPeak),
        });
    }
    match model.kind() {
        ModelKind::BlockFading { block_len, .. } => {
            let c_p = block_cp_closed(p, *block_len)?;
            Ok(CapacityResult {
                c_p,
                i_of_p: Extended::Finite((p * *block_len).ln_1p() / *block_len),
                u_p: upper_bound_up(model, p)?,
                quad_err: T::zero(),
                limit: None,
            })
        }
        ModelKind::GaussMarkovContinuous { rho } if *rho == T::zero() => {
            gauss_markov_cp_closed(*rho, p, TimeDomain::Continuous)
        }
        _ => {
            let quad = spectral_quadrature(p);
            let penalty = model.integrate(|_, s| excess_over_log1p(p * s), &quad)?;
            let i_of_p = information_rate_integral(model, p)?;
            Ok(CapacityResult {
                c_p: penalty.value / p,
                i_of_p: Extended::Finite(i_of_p.value),
                u_p: upper_bound_up(model, p)?,
                quad_err: penalty.abs_err / p,
                limit: None,
            })
        }
    }
}

/// `U_p(P) = (P/2) int S^2 dw / 2pi`; infinite for Clarke fading, whose
/// density is not square integrable at the Doppler edges.
pub fn upper_bound_up<T: Real>(model: &SpectralModel<T>, p: T) -> Result<Extended<T>> {
    check_finite_peak(p)?;
    let half_p = p / T::lit(2.0);
    let one = T::one();
    let energy = match model.kind() {
        ModelKind::WhiteFading => Extended::Finite(one),
        ModelKind::GaussMarkovDiscrete { rho } => {
            Extended::Finite((one + *rho * *rho) / ((one - *rho) * (one + *rho)))
        }
        ModelKind::GaussMarkovContinuous { rho } => {
            if *rho == T::zero() {
                Extended::Infinite
            } else {
                Extended::Finite(one / (-rho.ln()))
            }
        }
        ModelKind::Clarke { .. } => Extended::Infinite,
        ModelKind::BlockFading { block_len, .. } => Extended::Finite(*block_len),
        ModelKind::Tabulated(table) => Extended::Finite(table.squared_integral()),
    };
    Ok(energy.scale(half_p))
}

/// Closed form for Gauss-Markov fading.
///
/// Discrete time: `I(P) = log z+`, the larger root of
/// `z^2 - (1 + P + rho^2 (1 - P)) z + rho^2 = 0`. Continuous time with
/// `L = -log(rho)`: `I(P) = sqrt(L^2 + 2PL) - L`.
pub fn gauss_markov_cp_closed<T: Real>(
    rho: T,
    p: T,
    time_domain: TimeDomain,
) -> Result<CapacityResult<T>> {
    let model = SpectralModel::gauss_markov(rho, time_domain)?;
    check_finite_peak(p)?;
    let two = T::lit(2.0);
    let (i_of_p, c_p, limit) = match time_domain {
        TimeDomain::Discrete => (
            gm_discrete_log_root(rho, p),
            gm_discrete_penalty(rho, p),
            None,
        ),
        TimeDomain::Continuous if rho == T::zero() => {
            (p, T::zero(), Some(LimitConvention::WhiteContinuous))
        }
        TimeDomain::Continuous => {
            let l = -rho.ln();
            let root = (l * l + two * p * l).sqrt();
            // sqrt(L^2 + 2PL) - L without cancellation
            let i = two * p * l / (root + l);
            // 1 - I/P = 1 - 2L/(root + L)
            let c_p = (root - l) / (root + l);
            (i, c_p, None)
        }
    };
    Ok(CapacityResult {
        c_p,
        i_of_p: Extended::Finite(i_of_p),
        u_p: upper_bound_up(&model, p)?,
        quad_err: T::zero(),
        limit,
    })
}

/// `log z+` for the discrete Gauss-Markov model.
///
/// With `w = z+ - 1`, the quadratic becomes `w^2 + c w - P (1 - rho^2) = 0`
/// where `c = (1 - P)(1 - rho^2)`; the root is taken in the form that avoids
/// cancellation and `1 - rho^2` is formed as `(1 - rho)(1 + rho)`, which keeps
/// full accuracy as `rho -> 1`.
pub fn gm_discrete_log_root<T: Real>(rho: T, p: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let q = (one - rho) * (one + rho);
    let c = (one - p) * q;
    let disc = (c * c + T::lit(4.0) * p * q).sqrt();
    let w = if c > T::zero() {
        two * p * q / (c + disc)
    } else {
        (disc - c) / two
    };
    w.ln_1p()
}

/// `1 - log(z+)/P` for the discrete Gauss-Markov model.
///
/// Writing `z+ = 1 + P - d`, the deficit `d` is the smaller root of
/// `d^2 - (P (1 + rho^2) + 1 - rho^2) d + P^2 rho^2 = 0`, so
/// `1 - log(z+)/P = (d + phi(P - d)) / P` with `phi(x) = x - log(1 + x)`.
/// Every term is nonnegative, which keeps relative accuracy for small `P`.
pub fn gm_discrete_penalty<T: Real>(rho: T, p: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let q = (one - rho) * (one + rho);
    let b = p * (one + rho * rho) + q;
    let lo = p * (one - rho) * (one - rho) + q; // b - 2 P rho
    let hi = b + two * p * rho;
    let d_over_p = two * p * rho * rho / (b + (lo * hi).sqrt());
    let w = p * (one - d_over_p);
    d_over_p + excess_over_log1p(w) / p
}

/// Clarke fading, in terms of the normalized peak `a = P / (pi f_m)`:
///
/// ```text
/// C_p = (2/pi) [ g(a) - log(a/2) / a ]
/// g(a) = sqrt(1 - 1/a^2) (pi/2 - atan(1/sqrt(a^2 - 1)))   a >= 1
/// g(a) = -sqrt(1/a^2 - 1) acosh(1/a)                      a <  1
/// ```
///
/// With `pi f_m = 1` this is a function of `P` alone. For `a < 1` the
/// bracket is rearranged so that no large terms cancel as `a -> 0`.
pub fn clarke_cp_closed<T: Real>(a: T) -> Result<T> {
    if !(a > T::zero()) || a.is_nan() {
        return Err(invalid(format!(
            "normalized peak must be positive, got {a}"
        )));
    }
    if a.is_infinite() {
        return Ok(T::one());
    }
    let one = T::one();
    let two = T::lit(2.0);
    let bracket = if a >= one {
        clarke_branch(a) - (a / two).ln() / a
    } else {
        // s = sqrt(1 - a^2), e = 1 - s
        let s = ((one - a) * (one + a)).sqrt();
        let e = a * a / (one + s);
        let ln2 = T::LN_2();
        (e * ln2 - (one - e) * (-e / two).ln_1p() - e * a.ln()) / a
    };
    Ok(two / T::PI() * bracket)
}

/// Clarke capacity per unit energy for peak `p` and Doppler `f_m`.
pub fn clarke_cp<T: Real>(p: T, f_m: T) -> Result<T> {
    if !(f_m > T::zero() && f_m.is_finite()) {
        return Err(invalid(format!(
            "Doppler frequency must be positive, got {f_m}"
        )));
    }
    clarke_cp_closed(p / (T::PI() * f_m))
}

/// The branch function `g`, continuous at `a = 1` where it vanishes.
pub fn clarke_branch<T: Real>(a: T) -> T {
    let one = T::one();
    if a >= one {
        let root = (a * a - one).sqrt();
        let atan = if root == T::zero() {
            T::FRAC_PI_2()
        } else {
            (one / root).atan()
        };
        (one - one / (a * a)).sqrt() * (T::FRAC_PI_2() - atan)
    } else {
        -(one / (a * a) - one).sqrt() * (one / a).acosh()
    }
}

/// The expression `g(P) - log(P/2)/P + 1 - pi/2` as it is commonly quoted.
///
/// It equals `1 - (pi/2)(1 - clarke_cp_closed(P))` and is *not* the capacity
/// per unit energy (it is negative below `P ~ 0.9`); kept for comparison.
pub fn clarke_cp_literal<T: Real>(p: T) -> T {
    clarke_branch(p) - (p / T::lit(2.0)).ln() / p + T::one() - T::FRAC_PI_2()
}

/// Block fading with block length `T`: `C_p = 1 - log(1 + PT) / (PT)`.
pub fn block_cp_closed<T: Real>(p: T, block_len: T) -> Result<T> {
    check_finite_peak(p)?;
    if !(block_len > T::zero() && block_len.is_finite()) {
        return Err(invalid(format!(
            "block length must be positive, got {block_len}"
        )));
    }
    let x = p * block_len;
    Ok(excess_over_log1p(x) / x)
}

/// Coherent capacity per unit energy: one nat per unit energy at any peak.
pub fn coherent_cp<T: Real>(p: T) -> Result<T> {
    check_peak(p)?;
    Ok(T::one())
}

/// Bounds on capacity per unit time with peak-to-average ratio `beta`.
pub fn cap_per_unit_time_bounds<T: Real>(
    model: &SpectralModel<T>,
    p_avg: T,
    beta: T,
) -> Result<TimeBounds<T>> {
    if !(p_avg > T::zero() && p_avg.is_finite()) {
        return Err(invalid(format!(
            "average power must be positive, got {p_avg}"
        )));
    }
    if !(beta >= T::one() && beta.is_finite()) {
        return Err(invalid(format!(
            "peak-to-average ratio must be >= 1, got {beta}"
        )));
    }
    let peak = beta * p_avg;
    if !peak.is_finite() {
        return Err(Error::InvalidParameter("peak power overflows".into()));
    }
    let cap = cap_per_unit_energy(model, peak)?;
    Ok(TimeBounds {
        p_avg,
        beta,
        coherent_bound: p_avg * coherent_cp(peak)?,
        energy_bound: p_avg * cap.c_p,
        fourthegy_bound: cap.u_p.scale(p_avg),
    })
}
