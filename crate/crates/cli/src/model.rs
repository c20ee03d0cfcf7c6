use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use fadecap::{Spectrum, Table, TimeDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    GmDiscrete,
    GmContinuous,
    Clarke,
    Block,
    White,
    TableDiscrete,
    TableContinuous,
}

impl ModelName {
    pub fn label(self) -> &'static str {
        match self {
            Self::GmDiscrete => "gm-discrete",
            Self::GmContinuous => "gm-continuous",
            Self::Clarke => "clarke",
            Self::Block => "block",
            Self::White => "white",
            Self::TableDiscrete => "table-discrete",
            Self::TableContinuous => "table-continuous",
        }
    }
}

/// Fading model flags shared by all subcommands.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Fading model.
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    /// Gauss-Markov correlation coefficient, 0 <= rho < 1.
    #[arg(long, default_value_t = 0.9)]
    pub rho: f64,
    /// Clarke maximum Doppler shift in Hz; the default makes pi f_m = 1.
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_PI)]
    pub fm: f64,
    /// Block length for block fading.
    #[arg(long = "T", default_value_t = 1.0)]
    pub block_len: f64,
    /// Block fading in continuous time (real block length).
    #[arg(long)]
    pub continuous_block: bool,
    /// Two-column spectrum file for the tabulated models.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Rescale the tabulated spectrum to unit variance.
    #[arg(long)]
    pub renormalize: bool,
}

/// A model plus a description of how it was built, for report headers.
pub struct BuiltModel {
    pub name: ModelName,
    pub spectrum: Spectrum,
    pub params: Vec<(&'static str, String)>,
}

impl ModelArgs {
    pub fn name_or(&self, default: ModelName) -> ModelName {
        self.model.unwrap_or(default)
    }

    pub fn build(&self, default: ModelName) -> Result<BuiltModel> {
        self.build_with(self.name_or(default), self.rho, self.block_len)
    }

    /// Builds the model with `rho` and block length overridden (for sweeps).
    pub fn build_with(&self, name: ModelName, rho: f64, block_len: f64) -> Result<BuiltModel> {
        let fmt = crate::format::g12;
        let mut params = Vec::new();
        let spectrum = match name {
            ModelName::GmDiscrete | ModelName::GmContinuous => {
                let td = if name == ModelName::GmDiscrete {
                    TimeDomain::Discrete
                } else {
                    TimeDomain::Continuous
                };
                params.push(("rho", fmt(rho)));
                Spectrum::gauss_markov(rho, td)?
            }
            ModelName::Clarke => {
                params.push(("fm", fmt(self.fm)));
                Spectrum::clarke(self.fm)?
            }
            ModelName::Block => {
                let td = if self.continuous_block {
                    TimeDomain::Continuous
                } else {
                    TimeDomain::Discrete
                };
                params.push(("T", fmt(block_len)));
                Spectrum::block_fading(block_len, td)?
            }
            ModelName::White => Spectrum::white(),
            ModelName::TableDiscrete | ModelName::TableContinuous => {
                let Some(path) = &self.table else {
                    bail!(crate::UsageError(
                        "--table is required for tabulated models".into()
                    ));
                };
                let td = if name == ModelName::TableDiscrete {
                    TimeDomain::Discrete
                } else {
                    TimeDomain::Continuous
                };
                let table = Table::from_path(path, td, self.renormalize)?;
                params.push(("table", path.display().to_string()));
                if self.renormalize {
                    params.push(("scale", fmt(table.scale())));
                }
                Spectrum::tabulated(table)
            }
        };
        Ok(BuiltModel {
            name,
            spectrum,
            params,
        })
    }
}
