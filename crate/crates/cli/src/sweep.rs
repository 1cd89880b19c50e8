use std::str::FromStr;

use mpi3d::forward::SignalTrace;
use mpi3d::magnetization::{ApproxScheme, MagnetizationApprox, NodeStrategy};
use mpi3d::phantom::ConcentrationGrid;

use crate::error::CliError;
use crate::experiment::Experiment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Amplitude threshold `b` in mT.
    Threshold,
    /// Node count `N`.
    Nodes,
    /// `scheme-strategy`, e.g. `secant-equidistant` or `tangent-l1`.
    Scheme,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Threshold => "threshold_b",
            Self::Nodes => "node_count_n",
            Self::Scheme => "scheme",
        }
    }

    /// Values swept by default.
    pub fn default_values(self) -> Vec<String> {
        let v: &[&str] = match self {
            Self::Threshold => &["1", "2", "3", "4", "5", "10"],
            Self::Nodes => &["3", "4", "8", "30"],
            Self::Scheme => &["secant-equidistant", "tangent-equidistant", "tangent-l1"],
        };
        v.iter().map(|s| s.to_string()).collect()
    }
}

impl FromStr for SweepParameter {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "threshold_b" | "threshold" | "b" => Ok(Self::Threshold),
            "node_count_n" | "nodes" | "n" => Ok(Self::Nodes),
            "scheme" => Ok(Self::Scheme),
            _ => Err(CliError::Config(format!("unknown sweep parameter '{s}'"))),
        }
    }
}

fn parse_scheme_value(v: &str) -> Result<(ApproxScheme, NodeStrategy), CliError> {
    let (scheme, strategy) = v.split_once('-').unwrap_or((v, "equidistant"));
    let strategy = match strategy {
        "eq" => NodeStrategy::Equidistant,
        s => s.parse()?,
    };
    Ok((scheme.parse()?, strategy))
}

/// Approximation for one sweep value; other settings come from the config.
pub fn sweep_approx(exp: &Experiment, param: SweepParameter, value: &str) -> Result<MagnetizationApprox<f64>, CliError> {
    let a = &exp.config.approx;
    let bad = |e: String| CliError::Config(format!("sweep value '{value}': {e}"));
    let (mut n, mut b) = (a.nodes, a.threshold_mt);
    let (mut scheme, mut strategy): (ApproxScheme, NodeStrategy) = (a.scheme.parse()?, a.strategy.parse()?);
    match param {
        SweepParameter::Threshold => b = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
        SweepParameter::Nodes => n = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
        SweepParameter::Scheme => (scheme, strategy) = parse_scheme_value(value)?,
    }
    exp.approx_with(n, b * 1e-3, strategy, scheme)
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub nrmse: f64,
    pub image: ConcentrationGrid<f64>,
    pub residuals: Vec<f64>,
}

/// One reconstruction per value from the same filtered data.
pub fn run_sweep(
    exp: &Experiment,
    filtered: &[SignalTrace<f64>],
    param: SweepParameter,
    values: &[String],
) -> Result<Vec<SweepPoint>, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    values
        .iter()
        .map(|v| {
            let approx = sweep_approx(exp, param, v)?;
            let rec = exp.reconstruct(&exp.system_matrices(&approx)?, filtered)?;
            let nrmse = exp.nrmse(&rec.image)?;
            log::info!("{} = {v}: NRMSE {nrmse:.4}", param.as_str());
            Ok(SweepPoint { value: v.clone(), nrmse, image: rec.image, residuals: rec.lsqr.residuals })
        })
        .collect()
}
