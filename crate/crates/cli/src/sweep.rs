use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use fadecap::capacity::{cap_per_unit_energy, cap_per_unit_time_bounds, coherent_cp};
use fadecap::Spectrum;
use rayon::prelude::*;

use crate::commands::ext;
use crate::format::g12;
use crate::model::{BuiltModel, ModelArgs, ModelName};
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Peak power.
    #[value(name = "P")]
    Peak,
    /// Gauss-Markov correlation coefficient.
    #[value(name = "rho")]
    Rho,
    /// Average power (with fixed peak-to-average ratio).
    #[value(name = "p_avg", alias = "p-avg")]
    PAvg,
    /// Block length.
    #[value(name = "T")]
    BlockLen,
}

impl SweepParam {
    fn column(self) -> &'static str {
        match self {
            Self::Peak => "P",
            Self::Rho => "rho",
            Self::PAvg => "p_avg",
            Self::BlockLen => "T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Lin,
    Log,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Swept parameter.
    #[arg(long)]
    pub param: SweepParam,
    #[arg(long)]
    pub min: f64,
    #[arg(long)]
    pub max: f64,
    /// Number of grid points, at least 2.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub scale: Scale,
    /// Peak power when it is not the swept parameter.
    #[arg(long = "P", default_value_t = 1.0)]
    pub peak: f64,
    /// Peak-to-average ratio for average-power sweeps.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Output CSV file; standard output if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn grid(args: &SweepArgs) -> Result<Vec<f64>> {
    let (lo, hi, n) = (args.min, args.max, args.count);
    if n < 2 {
        bail!(UsageError(format!("--count must be at least 2, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        bail!(UsageError(format!(
            "grid needs finite min < max, got [{lo}, {hi}]"
        )));
    }
    let last = (n - 1) as f64;
    Ok(match args.scale {
        Scale::Lin => (0..n).map(|i| lo + (hi - lo) * i as f64 / last).collect(),
        Scale::Log => {
            if lo <= 0.0 {
                bail!(UsageError("log grid needs a positive minimum".into()));
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / last).exp())
                .collect()
        }
    })
}

fn check_row(c_p: f64, u_p: f64) -> Result<()> {
    if !((-1e-12..=1.0 + 1e-12).contains(&c_p) && c_p <= u_p * (1.0 + 1e-12)) {
        bail!("row violates 0 <= C_p <= min(1, U_p): C_p = {c_p}, U_p = {u_p}");
    }
    Ok(())
}

fn capacity_row(model: &Spectrum, x: f64, p: f64) -> Result<String> {
    let r = cap_per_unit_energy(model, p)?;
    check_row(r.c_p, r.u_p.to_float())?;
    Ok(format!(
        "{},{},{},{},{}",
        g12(x),
        g12(r.c_p),
        ext(r.i_of_p),
        ext(r.u_p),
        g12(coherent_cp(p)?)
    ))
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let points = grid(args)?;
    let name = args.model.name_or(ModelName::GmDiscrete);
    match args.param {
        SweepParam::Rho if !matches!(name, ModelName::GmDiscrete | ModelName::GmContinuous) => {
            bail!(UsageError("sweeping rho needs a Gauss-Markov model".into()))
        }
        SweepParam::BlockLen if name != ModelName::Block => {
            bail!(UsageError("sweeping T needs --model block".into()))
        }
        _ => {}
    }
    let discrete_block = name == ModelName::Block && !args.model.continuous_block;
    let values: Vec<f64> = if args.param == SweepParam::BlockLen && discrete_block {
        points.iter().map(|t| t.round().max(1.0)).collect()
    } else {
        points
    };
    let base = args.model.build(ModelName::GmDiscrete)?;

    let rows: Vec<Result<String>> = values
        .par_iter()
        .map(|&x| match args.param {
            SweepParam::Peak => capacity_row(&base.spectrum, x, x),
            SweepParam::Rho => {
                let m = args.model.build_with(name, x, args.model.block_len)?;
                capacity_row(&m.spectrum, x, args.peak)
            }
            SweepParam::BlockLen => {
                let m = args.model.build_with(name, args.model.rho, x)?;
                capacity_row(&m.spectrum, x, args.peak)
            }
            SweepParam::PAvg => {
                let b = cap_per_unit_time_bounds(&base.spectrum, x, args.beta)?;
                check_row(b.energy_bound / x, b.fourthegy_bound.to_float() / x)?;
                Ok(format!(
                    "{},{},{},{},{}",
                    g12(x),
                    g12(b.beta * x),
                    g12(b.coherent_bound),
                    g12(b.energy_bound),
                    ext(b.fourthegy_bound)
                ))
            }
        })
        .collect();

    let mut out = header(args, &base, discrete_block);
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    match &args.output {
        Some(path) => {
            std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().lock().write_all(out.as_bytes())?,
    }
    Ok(())
}

fn header(args: &SweepArgs, base: &BuiltModel, discrete_block: bool) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# fadecap {} sweep", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(h, "# model: {}", base.name.label());
    for (k, v) in &base.params {
        let swept = matches!(
            (args.param, *k),
            (SweepParam::Rho, "rho") | (SweepParam::BlockLen, "T")
        );
        if !swept {
            let _ = writeln!(h, "# {k}: {v}");
        }
    }
    let scale = match args.scale {
        Scale::Lin => "lin",
        Scale::Log => "log",
    };
    let _ = writeln!(
        h,
        "# grid: {} {scale} [{}, {}] count {}",
        args.param.column(),
        g12(args.min),
        g12(args.max),
        args.count
    );
    match args.param {
        SweepParam::Peak => {}
        SweepParam::PAvg => {
            let _ = writeln!(h, "# beta: {}", g12(args.beta));
        }
        SweepParam::Rho | SweepParam::BlockLen => {
            let _ = writeln!(h, "# P: {}", g12(args.peak));
        }
    }
    if args.param == SweepParam::BlockLen && discrete_block {
        let _ = writeln!(h, "# T rounded to integers (discrete-time blocks)");
    }
    let columns = match args.param {
        SweepParam::PAvg => "p_avg,peak,coherent_bound,energy_bound,fourthegy_bound".to_string(),
        p => format!("{},C_p,I_P,U_p,coherent", p.column()),
    };
    let _ = writeln!(h, "{columns}");
    h
}
