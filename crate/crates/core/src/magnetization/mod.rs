//! Langevin magnetization and piecewise-constant approximations of its
//! derivative.

mod approx;
mod langevin;
mod nodes;

pub use approx::{
    antiderivative_error_bound, build_approx, derivative_error_bound, eval_approx, eval_approx_antiderivative, l1_error,
    sup_second_derivative, ApproxScheme, MagnetizationApprox,
};
pub use langevin::{
    langevin, langevin_derivative, langevin_second_derivative, mbar, mbar_prime, LangevinParams, MagnetizationCurve,
};
pub use nodes::{l1_functional, l1_functional_gradient, nodes_equidistant, nodes_l1_optimal};

/// How interior nodes are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeStrategy {
    Equidistant,
    L1Optimal,
}

impl std::str::FromStr for NodeStrategy {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "equidistant" => Ok(Self::Equidistant),
            "l1" | "l1_optimal" | "l1-optimal" => Ok(Self::L1Optimal),
            _ => Err(crate::Error::Config(format!("unknown node strategy '{s}'"))),
        }
    }
}

impl std::fmt::Display for NodeStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Equidistant => "equidistant",
            Self::L1Optimal => "l1_optimal",
        })
    }
}

/// Nodes by strategy, then slopes by scheme.
pub fn approx_from_strategy<T: crate::Real, M: MagnetizationCurve<T>>(
    curve: &M,
    n: usize,
    b: T,
    strategy: NodeStrategy,
    scheme: ApproxScheme,
) -> crate::Result<MagnetizationApprox<T>> {
    let nodes = match strategy {
        NodeStrategy::Equidistant => nodes_equidistant(n, b),
        NodeStrategy::L1Optimal => nodes_l1_optimal(n, b, curve, scheme)?,
    };
    build_approx(curve, &nodes, b, scheme)
}
