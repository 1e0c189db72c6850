use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use stablab::clifford::StabilizerState;
use stablab::states::{make_state, state_from_json, Family, FamilySpec, StateVector};

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Basis,
    Uniform,
    Haar,
    #[value(name = "t_tensor", alias = "t-tensor")]
    TTensor,
    Stabilizer,
    Interpolate,
}

/// Where the input state comes from: a JSON file or a named family.
#[derive(Args, Debug, Serialize)]
pub struct StateArgs {
    /// State file {"n": .., "amplitudes": [[re, im], ..]} (unit-norm amplitudes).
    #[arg(long, conflicts_with = "family")]
    pub state: Option<PathBuf>,

    /// Rescale a state file whose norm is off instead of rejecting it.
    #[arg(long, requires = "state")]
    pub renormalize: bool,

    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,

    /// Qubit count for --family.
    #[arg(long)]
    pub n: Option<usize>,

    /// Basis index for --family basis.
    #[arg(long, default_value_t = 0)]
    pub x0: u64,

    /// Seed for --family haar and interpolate.
    #[arg(long, default_value_t = 0)]
    pub family_seed: u64,

    /// Noise weight for --family interpolate.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,

    /// Stabilizer JSON for --family stabilizer and interpolate (default |0…0⟩).
    #[arg(long)]
    pub stabilizer: Option<PathBuf>,
}

impl StateArgs {
    pub fn load(&self) -> Result<StateVector> {
        if let Some(path) = &self.state {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(state_from_json(&text, self.renormalize)?);
        }
        let Some(name) = self.family else {
            bail!(stablab::Error::InvalidParameter("give either --state FILE or --family NAME".into()));
        };
        let Some(n) = self.n else {
            bail!(stablab::Error::InvalidParameter("--family needs --n".into()));
        };
        let stab = || -> Result<StabilizerState> {
            match &self.stabilizer {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    Ok(StabilizerState::from_json(&text)?)
                }
                None => Ok(StabilizerState::zero(n)),
            }
        };
        let family = match name {
            FamilyName::Basis => Family::Basis { x0: self.x0 },
            FamilyName::Uniform => Family::Uniform,
            FamilyName::Haar => Family::Haar { seed: self.family_seed },
            FamilyName::TTensor => Family::TTensor,
            FamilyName::Stabilizer => Family::Stabilizer { state: stab()? },
            FamilyName::Interpolate => Family::Interpolate { state: stab()?, seed: self.family_seed, eps: self.eps },
        };
        Ok(make_state(&FamilySpec::new(n, family))?)
    }
}
