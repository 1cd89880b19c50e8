//! Receive-coil voltage simulation and acquisition post-processing.

mod coil;
mod filter;
mod simulate;
mod trace;

pub use coil::ReceiveCoil;
pub use filter::{add_noise, apply_highpass, default_noise_sigma, HighPass};
pub use simulate::{
    simulate_general, simulate_parallel, simulate_piecewise, simulate_piecewise_at, CellQuadrature, ForwardOptions,
};
pub use trace::{
    load_trace, read_trace_binary, read_trace_csv, save_trace, write_trace_binary, write_trace_csv, AcquisitionConfig,
    SignalTrace,
};
