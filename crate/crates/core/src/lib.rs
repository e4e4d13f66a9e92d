//! Achievable-rate analysis for an elemental bidirectional two-tier relay
//! network: one multi-antenna macrocell basestation exchanges four messages
//! with two single-antenna users through two single-antenna femtocell
//! relays (no direct basestation-user link).
//!
//! The crate evaluates and optimizes the zero-forcing scheme with
//! efficient power allocation (ZF-EPA), computes the cut-set upper bound
//! on both sum rates, provides a four-slot TDMA baseline, and drives
//! seeded Monte-Carlo sweeps with deterministic CSV/JSON output.
//!
//! Module map:
//! - [`numerics`]: complex vectors, Gram eigenvalues, piecewise-concave
//!   maximization.
//! - [`model`]: channels, power budgets, order flags, seeded sampling.
//! - [`beamforming`]: zero-forcing beamformers, effective gains, channel
//!   span projection.
//! - [`rates`]: SINR and rate formulas of both phases.
//! - [`optimizer`]: the ZF-EPA solver and the minimal-power back-solve.
//! - [`bounds`]: cut-set bound and TDMA baseline.
//! - [`harness`]: sweeps, surfaces, reports, CSV emission.

pub mod beamforming;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod model;
pub mod numerics;
pub mod optimizer;
pub mod rates;

pub use beamforming::{
    effective_gains, nulling_diagnostics, project_to_channel_span, receive_beamformers,
    transmit_beamformers, BeamformerSet, EffectiveGains, NullingDiagnostics,
};
pub use bounds::{cut_set_bound, tdma_rates, CutSetBound};
pub use error::{Error, Result};
pub use harness::{
    bound_single, channels_from_cfg, run_surface, run_sweep, solve_single, surface_to_csv,
    sweep_rows_to_csv, BoundReport, Mode, SolveReport, SurfaceGrid, SweepConfig, SweepRow,
};
pub use model::{
    budget_from_p, sample_channels, trial_rng, ChannelModel, ChannelRealization, ChannelsDoc,
    GaussianKind, OrderPair, PowerBudget,
};
pub use numerics::{
    gram_eigenvalues, inner_product, maximize_piecewise_concave, norm_sq, orthogonal_component,
    CVector,
};
pub use optimizer::{
    epa_powers, pipeline_rates, pipeline_rates_at_epa, solve_power_split, solve_zf_epa, EpaPowers,
    PowerSplit, ZfEpaSolution,
};
pub use rates::{
    cf_uplink_rate, cf_uplink_rates, downlink_rate, downlink_rates, downlink_sinrs,
    end_to_end_rates, simplified_uplink_rate, simplified_uplink_rates, uplink_sinrs, Phase,
    RateQuadruple, SinrQuadruple,
};
