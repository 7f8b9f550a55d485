//! Logical channel induced by a polynomial phase gate on finite-energy GKP
//! codewords, followed by an ideal-Clifford passive Knill readout.
//!
//! [`logical`] evaluates single channel points in the truncated Fock basis,
//! [`sweep`] scans `(n̄, λ)` grids, and [`vacuum`] analyses vacuum-state
//! twirling with syndrome postselection.

mod logical;
mod sweep;
mod vacuum;

pub use logical::{
    average_gate_fidelity, input_states, logical_expectation, min_eigenvalue, paulis,
    t_state_fidelity, t_state_fidelity_from, t_state_fidelity_reconstructed, ChannelConfig,
    ChannelEngine, DenseReadout, LogicalReadout, LogicalResponse, LogicalTarget, Mat2, Readout, INPUT_LABELS,
    LEAKAGE_LIMIT,
};
pub use sweep::{
    stepped_grid, sweep, sweep_with, uniform_grid, LambdaFit, OptimalLambda, SweepConfig,
    SweepResult, SweepRow,
};
pub use vacuum::{
    best_t_fidelity, t_state_orbit, vacuum_state_method, SyndromeCell, VacuumAnalysis,
    VacuumMethodConfig, VacuumPoint,
};
