use anyhow::Result;
use clap::Args;
use fadecap::capacity::{
    block_cp_closed, cap_per_unit_energy, cap_per_unit_time_bounds, clarke_cp, coherent_cp,
    gauss_markov_cp_closed, LimitConvention,
};
use fadecap::{Extended, ModelKind};

use crate::format::g12;
use crate::model::{BuiltModel, ModelArgs, ModelName};

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Peak power (SNR); `inf` is accepted.
    #[arg(long = "P")]
    pub peak: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Average power.
    #[arg(long = "p-avg")]
    pub p_avg: f64,
    /// Peak-to-average power ratio, at least 1.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

pub fn print_header(built: &BuiltModel) {
    println!("model: {}", built.name.label());
    for (k, v) in &built.params {
        println!("{k}: {v}");
    }
}

pub fn ext(x: Extended<f64>) -> String {
    g12(x.to_float())
}

/// Closed-form capacity per unit energy where the model has one.
pub fn closed_form(built: &BuiltModel, p: f64) -> Result<Option<f64>> {
    if !(p > 0.0 && p.is_finite()) {
        return Ok(None);
    }
    Ok(match built.spectrum.kind() {
        ModelKind::GaussMarkovDiscrete { rho } | ModelKind::GaussMarkovContinuous { rho } => {
            Some(gauss_markov_cp_closed(*rho, p, built.spectrum.time_domain())?.c_p)
        }
        ModelKind::Clarke { f_m } => Some(clarke_cp(p, *f_m)?),
        ModelKind::BlockFading { block_len, .. } => Some(block_cp_closed(p, *block_len)?),
        _ => None,
    })
}

pub fn capacity(args: &CapacityArgs) -> Result<()> {
    let built = args.model.build(ModelName::GmDiscrete)?;
    let p = args.peak;
    let r = cap_per_unit_energy(&built.spectrum, p)?;
    print_header(&built);
    println!("P: {}", g12(p));
    println!("C_p: {}", g12(r.c_p));
    println!("I(P): {}", ext(r.i_of_p));
    println!("U_p: {}", ext(r.u_p));
    println!("coherent: {}", g12(coherent_cp(p)?));
    println!("quad_err: {}", g12(r.quad_err));
    if let Some(c) = closed_form(&built, p)? {
        println!("C_p_closed: {}", g12(c));
    }
    if let Some(limit) = r.limit {
        let label = match limit {
            LimitConvention::ZeroPeak => "zero-peak",
            LimitConvention::InfinitePeak => "infinite-peak",
            LimitConvention::WhiteContinuous => "white-continuous",
        };
        println!("limit: {label}");
    }
    Ok(())
}

pub fn bounds(args: &BoundsArgs) -> Result<()> {
    let built = args.model.build(ModelName::GmDiscrete)?;
    let b = cap_per_unit_time_bounds(&built.spectrum, args.p_avg, args.beta)?;
    print_header(&built);
    println!("p_avg: {}", g12(b.p_avg));
    println!("beta: {}", g12(b.beta));
    println!("peak: {}", g12(b.beta * b.p_avg));
    println!("coherent_bound: {}", g12(b.coherent_bound));
    println!("energy_bound: {}", g12(b.energy_bound));
    println!("fourthegy_bound: {}", ext(b.fourthegy_bound));
    Ok(())
}
