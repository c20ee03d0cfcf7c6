use std::f64::consts::PI;

use anyhow::Result;
use clap::{Args, ValueEnum};
use fadecap::capacity::{cap_per_unit_energy, information_rate_integral};
use fadecap::sampling::{cp_kk, i_k, sampled_variance, sandwich};
use fadecap::toeplitz::{
    alpha, build_gram, coherent_divergence, fourthegy, log_det_rate, onoff_divergence,
    prediction_trace, subset_search, verify_alpha_properties, AlphaFunctional, LogDetMethod,
};
use fadecap::{Extended, Spectrum, SupportSet, TimeDomain};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::{BuiltModel, ModelArgs, ModelName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Log-determinant rates against the spectral integral.
    Szego,
    /// Exhaustive subset minimization and properties of alpha.
    Subsets,
    /// Coherent divergence identity and the fourthegy bound.
    Coherent,
    /// Sampled-channel limits of a continuous-time model.
    Sampling,
    All,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    pub suite: Suite,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "P", default_value_t = 1.0)]
    pub peak: f64,
    /// Matrix size (szego, default 4096) or ground set size (subsets, default 12).
    #[arg(long)]
    pub n: Option<usize>,
    /// Random inputs for the coherent suite.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Finest resolution level for the sampling suite.
    #[arg(long = "K", default_value_t = 12)]
    pub level: u32,
    /// Size of the dense Cholesky cross-check in the szego suite.
    #[arg(long, default_value_t = 512)]
    pub chol_n: usize,
}

struct Check {
    name: String,
    observed: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            tolerance,
        }
    }

    fn pass(&self) -> bool {
        self.observed <= self.tolerance
    }
}

fn violation(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.max(0.0)
    }
}

pub fn run(args: &VerifyArgs) -> Result<bool> {
    let suites: &[Suite] = match args.suite {
        Suite::All => &[
            Suite::Szego,
            Suite::Subsets,
            Suite::Coherent,
            Suite::Sampling,
        ],
        ref s => std::slice::from_ref(s),
    };
    let mut all_pass = true;
    for &suite in suites {
        let built = model_for(args, suite)?;
        println!(
            "# suite {} model {} P {}",
            suite_name(suite),
            built.name.label(),
            args.peak
        );
        let checks = match suite {
            Suite::Szego => szego(args, &built.spectrum)?,
            Suite::Subsets => subsets(args, &built.spectrum)?,
            Suite::Coherent => coherent(args, &built.spectrum)?,
            Suite::Sampling => sampling(args, &built.spectrum)?,
            Suite::All => unreachable!(),
        };
        for c in &checks {
            let verdict = if c.pass() { "pass" } else { "fail" };
            println!(
                "{} {:.3e} {:.1e} {verdict}",
                c.name, c.observed, c.tolerance
            );
            all_pass &= c.pass();
        }
    }
    Ok(all_pass)
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Szego => "szego",
        Suite::Subsets => "subsets",
        Suite::Coherent => "coherent",
        Suite::Sampling => "sampling",
        Suite::All => "all",
    }
}

/// The sampling suite needs a continuous-time model and the others a
/// discrete-time one. A single suite uses `--model` as given; `all` applies
/// it only to the suites it fits and falls back to Gauss-Markov elsewhere.
fn model_for(args: &VerifyArgs, suite: Suite) -> Result<BuiltModel> {
    let wants_continuous = suite == Suite::Sampling;
    let fallback = if wants_continuous {
        ModelName::GmContinuous
    } else {
        ModelName::GmDiscrete
    };
    let built = args.model.build(fallback)?;
    if args.suite == Suite::All && built.spectrum.is_discrete() == wants_continuous {
        return args
            .model
            .build_with(fallback, args.model.rho, args.model.block_len);
    }
    Ok(built)
}

fn szego(args: &VerifyArgs, model: &Spectrum) -> Result<Vec<Check>> {
    let p = args.peak;
    let n = args.n.unwrap_or(4096).max(1);
    let i = information_rate_integral(model, p)?.value;
    let trace = prediction_trace(model, p, n - 1)?;
    let rates = &trace.log_det_rates;
    let rise = rates.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);

    let chol_n = args.chol_n.clamp(1, n);
    let gram = build_gram(model, chol_n)?;
    let by_levinson = log_det_rate(&gram, p, LogDetMethod::Levinson)?;
    let by_cholesky = log_det_rate(&gram, p, LogDetMethod::Cholesky)?;

    let mut identity: f64 = 0.0;
    for (k, rate) in rates.iter().take(12).enumerate() {
        let direct = log_det_rate(&build_gram(model, k + 1)?, p, LogDetMethod::Cholesky)?;
        identity = identity.max((rate - direct).abs());
    }
    Ok(vec![
        Check::new("szego_error", (trace.terminal_rate() - i).abs(), 5e-3),
        Check::new("rate_monotone", violation(rise), 1e-12),
        Check::new(
            "levinson_vs_cholesky",
            (by_levinson - by_cholesky).abs(),
            1e-8,
        ),
        Check::new("prediction_identity", identity, 1e-10),
        Check::new(
            "prediction_terminal",
            (trace.terminal_sigma2() - i.exp()).abs(),
            1e-3,
        ),
    ])
}

fn subsets(args: &VerifyArgs, model: &Spectrum) -> Result<Vec<Check>> {
    let p = args.peak;
    let n = args.n.unwrap_or(12).max(1);
    let i = information_rate_integral(model, p)?.value;
    let best = subset_search(model, p, n)?;
    let full = alpha(&SupportSet::contiguous(n), model, p)? / n as f64;
    let scale = i.abs().max(1.0);

    let mut checks = vec![
        Check::new("subset_lower", violation((i - best.value) / scale), 1e-12),
        Check::new(
            "subset_upper",
            violation((best.value - full) / scale),
            1e-12,
        ),
    ];
    let report = verify_alpha_properties(model, p, n.min(8))?;
    for c in &report.checks {
        let name = if c.name.starts_with("alpha_") {
            c.name.to_string()
        } else {
            format!("alpha_{}", c.name)
        };
        checks.push(Check::new(name, c.max_violation, 1e-10));
    }

    let m = n.min(14);
    let functional = AlphaFunctional::new(model, p, m)?;
    let worst = (1u64..1 << m)
        .into_par_iter()
        .map(|mask| -> fadecap::Result<f64> {
            let onoff = p * mask.count_ones() as f64 - functional.value_mask(mask)?;
            Ok(violation(-onoff))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    let sample = onoff_divergence(&SupportSet::contiguous(m), model, p)?;
    checks.push(Check::new(
        "onoff_nonnegative",
        worst.max(violation(-sample)),
        1e-12,
    ));
    Ok(checks)
}

fn coherent(args: &VerifyArgs, model: &Spectrum) -> Result<Vec<Check>> {
    let p = args.peak;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut identity: f64 = 0.0;
    let mut bound: f64 = 0.0;
    for _ in 0..args.trials {
        let t = rng.gen_range(1..=8);
        let x: Vec<Complex<f64>> = (0..t)
            .map(|_| {
                Complex::from_polar((p * rng.gen::<f64>()).sqrt(), 2.0 * PI * rng.gen::<f64>())
            })
            .collect();
        let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let d = coherent_divergence(&x, model, p)?;
        identity = identity.max((d - energy).abs());
        let f = fourthegy(&x, model, Some(p))?;
        if let Some(Extended::Finite(b)) = f.bound {
            bound = bound.max(violation((f.value - b) / b.max(f64::MIN_POSITIVE)));
        }
    }
    Ok(vec![
        Check::new("coherent_identity", identity, 1e-9),
        Check::new("fourthegy_bound", bound, 1e-12),
    ])
}

fn sampling(args: &VerifyArgs, model: &Spectrum) -> Result<Vec<Check>> {
    let p = args.peak;
    let k_max = args.level;
    if model.time_domain() != TimeDomain::Continuous {
        anyhow::bail!(crate::UsageError(
            "the sampling suite needs a continuous-time model".into()
        ));
    }
    let b: Vec<f64> = (0..=k_max)
        .into_par_iter()
        .map(|k| sampled_variance(model, k).map(|v| v.value))
        .collect::<fadecap::Result<_>>()?;
    let over_one = b.iter().map(|&x| violation(x - 1.0)).fold(0.0, f64::max);
    let target = cap_per_unit_energy(model, p)?.c_p;

    let levels: Vec<u32> = [6, 8, 10, 12].into_iter().filter(|&k| k <= k_max).collect();
    let errors: Vec<f64> = levels
        .par_iter()
        .map(|&k| cp_kk(model, k, p).map(|r| (r.cp_kk - target).abs()))
        .collect::<fadecap::Result<_>>()?;
    let refinement = errors
        .windows(2)
        .map(|w| violation(w[1] - w[0]))
        .fold(0.0, f64::max);

    let finest = cp_kk(model, k_max, p)?;
    let ik = i_k(model, k_max, p)?.value;
    let s = sandwich(model, k_max, p)?;
    Ok(vec![
        Check::new("b_k_le_one", over_one, 1e-12),
        Check::new("b_k_gap", 1.0 - b[k_max as usize], 1e-3),
        Check::new("cp_kk_limit", (finest.cp_kk - target).abs(), 2e-3),
        Check::new("cp_kk_refinement", refinement, 1e-12),
        Check::new(
            "sandwich",
            violation(s.lower - ik).max(violation(ik - s.upper)),
            1e-10,
        ),
    ])
}
