//! Fading-process models: power spectral density and autocorrelation.
//!
//! Discrete-time densities live on `[-pi, pi)` and continuous-time densities
//! on the real line (angular frequency). All models are normalized to unit
//! variance, `int S(w) dw / 2pi = 1`.

use std::path::Path;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{Integral, Quadrature};
use crate::real::Real;

/// Tolerance on the unit-variance normalization of tabulated spectra.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeDomain {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind<T> {
    /// `R(k) = rho^|k|`.
    GaussMarkovDiscrete {
        rho: T,
    },
    /// `R(t) = rho^|t|`, `S(w) = -2 log(rho) / (w^2 + log(rho)^2)`.
    GaussMarkovContinuous {
        rho: T,
    },
    /// Jakes/Clarke Doppler spectrum with maximum Doppler shift `f_m` Hz.
    Clarke {
        f_m: T,
    },
    /// Constant within blocks of length `block_len`, independent across blocks.
    BlockFading {
        block_len: T,
        time_domain: TimeDomain,
    },
    /// Memoryless unit-variance fading, discrete time.
    WhiteFading,
    Tabulated(SpectralTable<T>),
}

/// Immutable fading-process description.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel<T> {
    kind: ModelKind<T>,
}

/// How the spectral density decays, used to certify aliasing sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support<T> {
    /// Density vanishes outside `[lo, hi]`.
    Compact { lo: T, hi: T },
    /// `S(w) <= c / w^2` for every `w`.
    InverseSquare { c: T },
}

impl<T: Real> SpectralModel<T> {
    pub fn gauss_markov(rho: T, time_domain: TimeDomain) -> Result<Self> {
        if !(rho >= T::zero() && rho < T::one()) {
            return Err(invalid(format!(
                "Gauss-Markov correlation must satisfy 0 <= rho < 1, got {rho}"
            )));
        }
        let kind = match time_domain {
            TimeDomain::Discrete => ModelKind::GaussMarkovDiscrete { rho },
            TimeDomain::Continuous => ModelKind::GaussMarkovContinuous { rho },
        };
        Ok(Self { kind })
    }

    pub fn clarke(f_m: T) -> Result<Self> {
        if !(f_m > T::zero() && f_m.is_finite()) {
            return Err(invalid(format!(
                "Doppler frequency must be positive, got {f_m}"
            )));
        }
        Ok(Self {
            kind: ModelKind::Clarke { f_m },
        })
    }

    /// Clarke model with `pi * f_m = 1`, so the peak constraint enters the
    /// capacity only through `P` itself.
    pub fn clarke_normalized() -> Self {
        Self {
            kind: ModelKind::Clarke {
                f_m: T::FRAC_1_PI(),
            },
        }
    }

    pub fn block_fading(block_len: T, time_domain: TimeDomain) -> Result<Self> {
        if !(block_len > T::zero() && block_len.is_finite()) {
            return Err(invalid(format!(
                "block length must be positive, got {block_len}"
            )));
        }
        if time_domain == TimeDomain::Discrete && block_len.fract() != T::zero() {
            return Err(invalid(format!(
                "discrete block length must be an integer, got {block_len}"
            )));
        }
        Ok(Self {
            kind: ModelKind::BlockFading {
                block_len,
                time_domain,
            },
        })
    }

    pub fn white() -> Self {
        Self {
            kind: ModelKind::WhiteFading,
        }
    }

    pub fn tabulated(table: SpectralTable<T>) -> Self {
        Self {
            kind: ModelKind::Tabulated(table),
        }
    }

    pub fn kind(&self) -> &ModelKind<T> {
        &self.kind
    }

    pub fn time_domain(&self) -> TimeDomain {
        match &self.kind {
            ModelKind::GaussMarkovDiscrete { .. } | ModelKind::WhiteFading => TimeDomain::Discrete,
            ModelKind::GaussMarkovContinuous { .. } | ModelKind::Clarke { .. } => {
                TimeDomain::Continuous
            }
            ModelKind::BlockFading { time_domain, .. } => *time_domain,
            ModelKind::Tabulated(t) => t.time_domain,
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.time_domain() == TimeDomain::Discrete
    }

    /// Continuous Gauss-Markov with `rho = 0` is white with unbounded
    /// bandwidth: it has unit variance but no spectral density.
    pub fn is_degenerate(&self) -> bool {
        matches!(self.kind, ModelKind::GaussMarkovContinuous { rho } if rho == T::zero())
    }

    pub fn short_name(&self) -> &'static str {
        match &self.kind {
            ModelKind::GaussMarkovDiscrete { .. } => "gm-discrete",
            ModelKind::GaussMarkovContinuous { .. } => "gm-continuous",
            ModelKind::Clarke { .. } => "clarke",
            ModelKind::BlockFading { .. } => "block",
            ModelKind::WhiteFading => "white",
            ModelKind::Tabulated(t) => match t.time_domain {
                TimeDomain::Discrete => "table-discrete",
                TimeDomain::Continuous => "table-continuous",
            },
        }
    }

    /// Spectral density `S(omega)`.
    pub fn density(&self, omega: T) -> Result<T> {
        if self.is_discrete() && !matches!(self.kind, ModelKind::Tabulated(_)) {
            let pi = T::PI();
            if !(omega >= -pi && omega < pi) {
                return Err(Error::OutOfDomain {
                    omega: omega.as_f64(),
                    lo: -std::f64::consts::PI,
                    hi: std::f64::consts::PI,
                });
            }
        }
        if !omega.is_finite() {
            return Err(Error::OutOfDomain {
                omega: omega.as_f64(),
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            });
        }
        match &self.kind {
            ModelKind::WhiteFading => Ok(T::one()),
            ModelKind::GaussMarkovDiscrete { rho } => Ok(gm_discrete_density(*rho, omega)),
            ModelKind::GaussMarkovContinuous { rho } => {
                if *rho == T::zero() {
                    return Err(Error::Unsupported(
                        "continuous Gauss-Markov with rho = 0 has no spectral density".into(),
                    ));
                }
                Ok(gm_continuous_density(-rho.ln(), omega))
            }
            ModelKind::Clarke { f_m } => Ok(clarke_density(*f_m, omega)),
            ModelKind::BlockFading { .. } => Err(Error::Unsupported(
                "block fading has no spectral density; use the block closed form".into(),
            )),
            ModelKind::Tabulated(t) => t.density(omega),
        }
    }

    /// Autocorrelation `R(lag) = E[H(t + lag) conj(H(t))]`.
    ///
    /// Discrete-time models accept integer lags only.
    pub fn autocorrelation(&self, lag: T) -> Result<Complex<T>> {
        if self.is_discrete() && lag.fract() != T::zero() {
            return Err(invalid(format!(
                "discrete-time lag must be an integer, got {lag}"
            )));
        }
        let real = |x: T| Ok(Complex::new(x, T::zero()));
        match &self.kind {
            ModelKind::WhiteFading => real(if lag == T::zero() {
                T::one()
            } else {
                T::zero()
            }),
            ModelKind::GaussMarkovDiscrete { rho } | ModelKind::GaussMarkovContinuous { rho } => {
                real(rho.powf(lag.abs()))
            }
            ModelKind::Clarke { f_m } => {
                let x = (T::TAU() * *f_m * lag).as_f64();
                real(T::lit(libm::j0(x)))
            }
            ModelKind::BlockFading { .. } => Err(Error::Unsupported(
                "block fading is not stationary; it has no autocorrelation function".into(),
            )),
            ModelKind::Tabulated(t) => Ok(t.autocorrelation(lag)),
        }
    }

    pub fn support(&self) -> Result<Support<T>> {
        match &self.kind {
            ModelKind::WhiteFading | ModelKind::GaussMarkovDiscrete { .. } => {
                Ok(Support::Compact {
                    lo: -T::PI(),
                    hi: T::PI(),
                })
            }
            ModelKind::GaussMarkovContinuous { rho } => {
                if *rho == T::zero() {
                    return Err(Error::Unsupported(
                        "continuous Gauss-Markov with rho = 0 has no spectral density".into(),
                    ));
                }
                Ok(Support::InverseSquare {
                    c: T::lit(2.0) * (-rho.ln()),
                })
            }
            ModelKind::Clarke { f_m } => {
                let edge = T::TAU() * *f_m;
                Ok(Support::Compact {
                    lo: -edge,
                    hi: edge,
                })
            }
            ModelKind::Tabulated(t) => Ok(Support::Compact {
                lo: t.freqs[0],
                hi: *t.freqs.last().expect("table is non-empty"),
            }),
            ModelKind::BlockFading { .. } => Err(Error::Unsupported(
                "block fading has no spectral density".into(),
            )),
        }
    }

    /// `int h(w, S(w)) dw / 2pi` over the whole frequency domain.
    pub fn integrate<F>(&self, h: F, quad: &Quadrature<T>) -> Result<Integral<T>>
    where
        F: Fn(T, T) -> T,
    {
        self.integrate_between(h, T::neg_infinity(), T::infinity(), &[], quad)
    }

    /// `int h(w, S(w)) dw / 2pi` over `[lo, hi]` intersected with the domain.
    ///
    /// `breaks` are extra frequencies where `h` is known to be non-smooth.
    /// Integrable edge singularities are removed by a change of variables:
    /// `w = w_m sin(theta)` for Clarke, and `w = L tan(theta)` maps the real
    /// line onto a bounded interval for the continuous Gauss-Markov model.
    pub fn integrate_between<F>(
        &self,
        h: F,
        lo: T,
        hi: T,
        breaks: &[T],
        quad: &Quadrature<T>,
    ) -> Result<Integral<T>>
    where
        F: Fn(T, T) -> T,
    {
        let map = Substitution::for_model(self)?;
        let (dom_lo, dom_hi) = map.domain();
        let lo = lo.max(dom_lo);
        let hi = hi.min(dom_hi);
        if !(lo < hi) {
            return Ok(Integral {
                value: T::zero(),
                abs_err: T::zero(),
                intervals: 0,
                evaluations: 0,
            });
        }
        let mut points: Vec<T> = vec![map.to_param(lo), map.to_param(hi)];
        for &b in map.natural_breaks().iter().chain(breaks) {
            if b > lo && b < hi {
                points.push(map.to_param(b));
            }
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        points.dedup();
        if points.len() < 2 {
            // the range collapsed to one parameter value (far tails under tan)
            return Ok(Integral {
                value: T::zero(),
                abs_err: T::zero(),
                intervals: 0,
                evaluations: 0,
            });
        }

        let two_pi = T::TAU();
        let integrand = |theta: T| {
            let (omega, s, jac) = map.point(theta);
            if jac == T::zero() {
                return T::zero();
            }
            h(omega, s) * jac / two_pi
        };
        quad.integrate(integrand, &points)
    }

    /// Variance `R(0)` recovered by integrating the density.
    pub fn variance(&self, quad: &Quadrature<T>) -> Result<Integral<T>> {
        if let ModelKind::BlockFading { .. } = self.kind {
            return Ok(Integral {
                value: T::one(),
                abs_err: T::zero(),
                intervals: 0,
                evaluations: 0,
            });
        }
        self.integrate(|_, s| s, quad)
    }
}

fn gm_discrete_density<T: Real>(rho: T, omega: T) -> T {
    let one = T::one();
    let half_sin = (omega / T::lit(2.0)).sin();
    let denom = (one - rho) * (one - rho) + T::lit(4.0) * rho * half_sin * half_sin;
    (one - rho) * (one + rho) / denom
}

fn gm_continuous_density<T: Real>(decay: T, omega: T) -> T {
    T::lit(2.0) * decay / (omega * omega + decay * decay)
}

fn clarke_density<T: Real>(f_m: T, omega: T) -> T {
    let x = omega / (T::TAU() * f_m);
    if x.abs() >= T::one() {
        return T::zero();
    }
    T::one() / (T::PI() * f_m * ((T::one() - x) * (T::one() + x)).sqrt())
}

/// Change of variables used for spectral integrals.
enum Substitution<'a, T> {
    /// Plain frequency variable on a bounded domain.
    Identity {
        model: &'a SpectralModel<T>,
        lo: T,
        hi: T,
        breaks: Vec<T>,
    },
    /// `w = decay * tan(theta)`.
    Tangent { decay: T },
    /// `w = edge * sin(theta)`, Clarke density becomes `1 / (pi f_m cos theta)`.
    Sine { f_m: T, edge: T },
}

impl<'a, T: Real> Substitution<'a, T> {
    fn for_model(model: &'a SpectralModel<T>) -> Result<Self> {
        match model.kind() {
            ModelKind::WhiteFading => Ok(Self::Identity {
                model,
                lo: -T::PI(),
                hi: T::PI(),
                breaks: vec![],
            }),
            ModelKind::GaussMarkovDiscrete { .. } => Ok(Self::Identity {
                model,
                lo: -T::PI(),
                hi: T::PI(),
                breaks: vec![T::zero()],
            }),
            ModelKind::GaussMarkovContinuous { rho } => {
                if *rho == T::zero() {
                    return Err(Error::Unsupported(
                        "continuous Gauss-Markov with rho = 0 has no spectral density".into(),
                    ));
                }
                Ok(Self::Tangent { decay: -rho.ln() })
            }
            ModelKind::Clarke { f_m } => Ok(Self::Sine {
                f_m: *f_m,
                edge: T::TAU() * *f_m,
            }),
            ModelKind::Tabulated(t) => Ok(Self::Identity {
                model,
                lo: t.freqs[0],
                hi: *t.freqs.last().expect("table is non-empty"),
                breaks: t.freqs.clone(),
            }),
            ModelKind::BlockFading { .. } => Err(Error::Unsupported(
                "block fading has no spectral density; use the block closed form".into(),
            )),
        }
    }

    fn domain(&self) -> (T, T) {
        match self {
            Self::Identity { lo, hi, .. } => (*lo, *hi),
            Self::Tangent { .. } => (T::neg_infinity(), T::infinity()),
            Self::Sine { edge, .. } => (-*edge, *edge),
        }
    }

    fn natural_breaks(&self) -> Vec<T> {
        match self {
            Self::Identity { breaks, .. } => breaks.clone(),
            Self::Tangent { .. } => vec![T::zero()],
            Self::Sine { .. } => vec![T::zero()],
        }
    }

    fn to_param(&self, omega: T) -> T {
        match self {
            Self::Identity { .. } => omega,
            Self::Tangent { decay } => (omega / *decay).atan(),
            Self::Sine { edge, .. } => (omega / *edge).max(-T::one()).min(T::one()).asin(),
        }
    }

    /// `(omega, S(omega), d omega / d theta)` at parameter `theta`.
    fn point(&self, theta: T) -> (T, T, T) {
        match self {
            Self::Identity { model, .. } => {
                // Interior quadrature nodes always lie inside the domain.
                let s = model.density(theta).unwrap_or_else(|_| T::zero());
                (theta, s, T::one())
            }
            Self::Tangent { decay } => {
                let c = theta.cos();
                let omega = *decay * theta.tan();
                let jac = *decay / (c * c);
                (omega, gm_continuous_density(*decay, omega), jac)
            }
            Self::Sine { f_m, edge } => {
                let c = theta.cos();
                if c <= T::zero() {
                    return (*edge * theta.sin(), T::zero(), T::zero());
                }
                let s = T::one() / (T::PI() * *f_m * c);
                (*edge * theta.sin(), s, *edge * c)
            }
        }
    }
}

/// Piecewise-linear spectral density given by `(frequency, density)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable<T> {
    time_domain: TimeDomain,
    freqs: Vec<T>,
    density: Vec<T>,
    scale: T,
}

impl<T: Real> SpectralTable<T> {
    /// Builds a table from samples sorted by frequency.
    ///
    /// Without `renormalize` the samples must already integrate to one
    /// (within [`NORMALIZATION_TOL`]); with it, the densities are scaled to
    /// unit variance and the factor is kept in [`SpectralTable::scale`].
    pub fn new(time_domain: TimeDomain, samples: Vec<(T, T)>, renormalize: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Table("need at least two samples".into()));
        }
        for (i, &(f, s)) in samples.iter().enumerate() {
            if !f.is_finite() || !s.is_finite() {
                return Err(Error::Table(format!("sample {i} is not finite")));
            }
            if s < T::zero() {
                return Err(Error::Table(format!(
                    "negative density {s} at frequency {f}"
                )));
            }
        }
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Table(
                "frequencies must be strictly increasing".into(),
            ));
        }
        if time_domain == TimeDomain::Discrete {
            let pi = T::PI();
            let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
            if first < -pi || last > pi {
                return Err(Error::Table(format!(
                    "discrete-time frequencies must lie in [-pi, pi], got [{first}, {last}]"
                )));
            }
        }
        let (freqs, mut density): (Vec<T>, Vec<T>) = samples.into_iter().unzip();
        let variance = trapezoid(&freqs, &density) / T::TAU();
        if !(variance > T::zero()) {
            return Err(Error::Table("density integrates to zero".into()));
        }
        let mut scale = T::one();
        if renormalize {
            scale = T::one() / variance;
            density.iter_mut().for_each(|s| *s *= scale);
        } else if (variance - T::one()).abs() > T::lit(NORMALIZATION_TOL) {
            return Err(Error::Table(format!(
                "density has variance {variance}, expected 1 (use renormalization)"
            )));
        }
        Ok(Self {
            time_domain,
            freqs,
            density,
            scale,
        })
    }

    /// Parses two-column text: `frequency density` per line, separated by
    /// commas, semicolons or whitespace. `#` starts a comment; a single
    /// non-numeric header line is allowed before the data.
    pub fn parse(text: &str, time_domain: TimeDomain, renormalize: bool) -> Result<Self> {
        let mut samples = Vec::new();
        let mut header_allowed = true;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
            match parsed {
                Some(v) if v.len() == 2 => {
                    samples.push((T::lit(v[0]), T::lit(v[1])));
                    header_allowed = false;
                }
                None if header_allowed => header_allowed = false,
                _ => {
                    return Err(Error::Table(format!(
                        "line {}: expected two numeric columns, got {:?}",
                        lineno + 1,
                        raw
                    )))
                }
            }
        }
        Self::new(time_domain, samples, renormalize)
    }

    pub fn from_path(path: &Path, time_domain: TimeDomain, renormalize: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Self::parse(&text, time_domain, renormalize)
    }

    pub fn time_domain(&self) -> TimeDomain {
        self.time_domain
    }

    /// Factor applied to the raw samples to reach unit variance.
    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn samples(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.freqs.iter().copied().zip(self.density.iter().copied())
    }

    pub fn density(&self, omega: T) -> Result<T> {
        let (lo, hi) = (self.freqs[0], self.freqs[self.freqs.len() - 1]);
        if !(omega >= lo && omega <= hi) {
            return Err(Error::OutOfDomain {
                omega: omega.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        let i = self.freqs.partition_point(|&f| f <= omega);
        if i == self.freqs.len() {
            return Ok(self.density[i - 1]);
        }
        let (f0, f1) = (self.freqs[i - 1], self.freqs[i]);
        let (s0, s1) = (self.density[i - 1], self.density[i]);
        Ok(s0 + (s1 - s0) * (omega - f0) / (f1 - f0))
    }

    /// Exact inverse transform of the piecewise-linear density.
    pub fn autocorrelation(&self, lag: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for w in 0..self.freqs.len() - 1 {
            let (a, b) = (self.freqs[w], self.freqs[w + 1]);
            let (sa, sb) = (self.density[w], self.density[w + 1]);
            let h = b - a;
            let slope = (sb - sa) / h;
            let (e1, e2) = linear_moments(lag, h);
            let phase = Complex::new(T::zero(), lag * a).exp();
            acc += phase * (e1 * sa + e2 * slope);
        }
        acc / T::TAU()
    }

    /// `int S^2 dw / 2pi`, exact for the piecewise-linear density.
    pub fn squared_integral(&self) -> T {
        let mut acc = T::zero();
        for w in 0..self.freqs.len() - 1 {
            let h = self.freqs[w + 1] - self.freqs[w];
            let (a, b) = (self.density[w], self.density[w + 1]);
            acc += h * (a * a + a * b + b * b) / T::lit(3.0);
        }
        acc / T::TAU()
    }
}

fn trapezoid<T: Real>(x: &[T], y: &[T]) -> T {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| (xw[1] - xw[0]) * (yw[0] + yw[1]) / T::lit(2.0))
        .sum()
}

/// `(int_0^h e^{i t u} du, int_0^h u e^{i t u} du)`.
fn linear_moments<T: Real>(t: T, h: T) -> (Complex<T>, Complex<T>) {
    let x = t * h;
    if x.abs() < T::lit(0.5) {
        // power series in (i x)
        let ix = Complex::new(T::zero(), x);
        let mut power = Complex::new(T::one(), T::zero());
        let mut fact1 = T::one(); // (m+1)!
        let mut fact2 = T::lit(2.0); // (m+2)!
        let mut e1 = Complex::new(T::zero(), T::zero());
        let mut e2 = Complex::new(T::zero(), T::zero());
        for m in 0..30 {
            e1 += power / fact1;
            e2 += power / fact2;
            power *= ix;
            fact1 *= T::from_usize_lossy(m + 2);
            fact2 *= T::from_usize_lossy(m + 3);
        }
        (e1 * h, e2 * h * h)
    } else {
        let it = Complex::new(T::zero(), t);
        let eix = Complex::new(T::zero(), x).exp();
        let e1 = (eix - T::one()) / it;
        let e2 = (eix * h - e1) / it;
        (e1, e2)
    }
}
