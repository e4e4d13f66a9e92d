//! Monte-Carlo front-end: seeded sweeps over the power parameter, the
//! two-power surface at fixed relay power, single-instance reports, and
//! CSV/JSON emission.
//!
//! Determinism contract: a fixed [`SweepConfig`] produces byte-identical
//! output regardless of how many worker threads execute the trials. Every
//! trial draws from its own counter-derived stream and the per-power
//! averages are pairwise sums over the trial vector in index order.

use rayon::prelude::*;
use serde::Serialize;

use crate::beamforming::{nulling_diagnostics, BeamformerSet, NullingDiagnostics};
use crate::bounds::{cut_set_bound, tdma_rates, CutSetBound};
use crate::error::{Error, Result};
use crate::model::{
    budget_from_p, sample_channels, trial_rng, ChannelModel, ChannelRealization, ChannelsDoc,
    PowerBudget,
};
use crate::optimizer::{solve_zf_epa, ZfEpaSolution};
use crate::rates::RateQuadruple;

/// What the front-end has been asked to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Sweep,
    Surface,
    Solve,
    Bound,
}

/// Shared run configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub channel_model: ChannelModel,
    pub p_grid: Vec<f64>,
    pub mode: Mode,
    pub strict_paper: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m: 5,
            trials: 500,
            seed: 42,
            channel_model: ChannelModel::default(),
            p_grid: (0..=25).map(f64::from).collect(),
            mode: Mode::Sweep,
            strict_paper: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self, expected_mode: Mode) -> Result<()> {
        if self.mode != expected_mode {
            return Err(Error::InvalidConfig {
                field: "mode",
                reason: format!("expected {expected_mode:?}, got {:?}", self.mode),
            });
        }
        if self.m < 2 {
            return Err(Error::InvalidConfig {
                field: "m",
                reason: format!("antenna count must be at least 2, got {}", self.m),
            });
        }
        if self.trials < 1 {
            return Err(Error::InvalidConfig {
                field: "trials",
                reason: "at least one trial is required".into(),
            });
        }
        validate_grid("p_grid", &self.p_grid)?;
        Ok(())
    }
}

fn validate_grid(field: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig {
            field,
            reason: "grid must not be empty".into(),
        });
    }
    for (i, &p) in grid.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidConfig {
                field,
                reason: format!("entry {i} must be finite and non-negative, got {p}"),
            });
        }
        if i > 0 && p <= grid[i - 1] {
            return Err(Error::InvalidConfig {
                field,
                reason: format!("entries must be strictly increasing, got {p} after {}", grid[i - 1]),
            });
        }
    }
    Ok(())
}

/// One output row of a sweep: trial averages at a single power value.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub sum_zfepa: f64,
    pub sum_tdma: f64,
    pub sum_cutset: f64,
    pub gap: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    /// Modal encoding-order flag over the trials (ties resolve to 0).
    pub b_eo: u8,
    /// Modal decoding-order flag over the trials (ties resolve to 0).
    pub b_do: u8,
    pub epa_p_bs: f64,
    pub epa_p_r1: f64,
    pub epa_p_r2: f64,
    pub epa_p_u1: f64,
    pub epa_p_u2: f64,
}

struct TrialOutcome {
    sum_zfepa: f64,
    sum_tdma: f64,
    sum_cutset: f64,
    rates: RateQuadruple,
    b_eo: bool,
    b_do: bool,
    epa: [f64; 5],
}

/// Fixed-order pairwise (tree) summation; the result depends only on the
/// slice order, never on thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        n if n <= 8 => xs.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

fn run_trial_over_grid(cfg: &SweepConfig, trial: usize) -> Result<Vec<TrialOutcome>> {
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let ch = sample_channels(&mut rng, cfg.m, &cfg.channel_model)?;
    cfg.p_grid
        .iter()
        .map(|&p| {
            let budget = budget_from_p(p)?;
            let sol = solve_zf_epa(&ch, &budget, cfg.strict_paper)?;
            let tdma = tdma_rates(&ch, &budget)?;
            let bound = cut_set_bound(&ch, &budget, cfg.strict_paper)?;
            Ok(TrialOutcome {
                sum_zfepa: sol.sum_rate,
                sum_tdma: tdma.sum(),
                sum_cutset: bound.sum(),
                rates: sol.rates,
                b_eo: sol.orders.b_eo,
                b_do: sol.orders.b_do,
                epa: [
                    sol.epa.p_bs,
                    sol.epa.p_r1,
                    sol.epa.p_r2,
                    sol.epa.p_u1,
                    sol.epa.p_u2,
                ],
            })
        })
        .collect()
}

/// Seeded Monte-Carlo sweep over the power parameter.
///
/// Each trial draws one channel realization from its own stream and is
/// evaluated over the whole grid; rows hold per-power trial averages.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate(Mode::Sweep)?;
    let per_trial: Vec<Vec<TrialOutcome>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial_over_grid(cfg, t))
        .collect::<Result<_>>()?;

    let rows = cfg
        .p_grid
        .iter()
        .enumerate()
        .map(|(pi, &p)| {
            let col: Vec<&TrialOutcome> = per_trial.iter().map(|t| &t[pi]).collect();
            let mean = |f: &dyn Fn(&TrialOutcome) -> f64| {
                let vals: Vec<f64> = col.iter().map(|o| f(o)).collect();
                pairwise_sum(&vals) / vals.len() as f64
            };
            let sum_zfepa = mean(&|o| o.sum_zfepa);
            let sum_cutset = mean(&|o| o.sum_cutset);
            let ones_eo = col.iter().filter(|o| o.b_eo).count();
            let ones_do = col.iter().filter(|o| o.b_do).count();
            SweepRow {
                p,
                sum_zfepa,
                sum_tdma: mean(&|o| o.sum_tdma),
                sum_cutset,
                gap: sum_cutset - sum_zfepa,
                r1: mean(&|o| o.rates.r1),
                r2: mean(&|o| o.rates.r2),
                r3: mean(&|o| o.rates.r3),
                r4: mean(&|o| o.rates.r4),
                b_eo: u8::from(2 * ones_eo > col.len()),
                b_do: u8::from(2 * ones_do > col.len()),
                epa_p_bs: mean(&|o| o.epa[0]),
                epa_p_r1: mean(&|o| o.epa[1]),
                epa_p_r2: mean(&|o| o.epa[2]),
                epa_p_u1: mean(&|o| o.epa[3]),
                epa_p_u2: mean(&|o| o.epa[4]),
            }
        })
        .collect();
    Ok(rows)
}

/// Trial-averaged sum rate over a basestation-power x user-power grid at
/// fixed relay power.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceGrid {
    pub p_bs: Vec<f64>,
    pub p_u: Vec<f64>,
    pub p_r_fixed: f64,
    /// `sum_rate[i][j]` corresponds to `(p_bs[i], p_u[j])`.
    pub sum_rate: Vec<Vec<f64>>,
}

/// Sweep the basestation and user powers with both relay powers fixed.
pub fn run_surface(
    cfg: &SweepConfig,
    p_bs_grid: &[f64],
    p_u_grid: &[f64],
    p_r_fixed: f64,
) -> Result<SurfaceGrid> {
    cfg.validate(Mode::Surface)?;
    validate_grid("p_bs_grid", p_bs_grid)?;
    validate_grid("p_u_grid", p_u_grid)?;
    if !p_r_fixed.is_finite() || p_r_fixed < 0.0 {
        return Err(Error::InvalidConfig {
            field: "p_r_fixed",
            reason: format!("must be finite and non-negative, got {p_r_fixed}"),
        });
    }

    let per_trial: Vec<Vec<Vec<f64>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<Vec<f64>>> {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let ch = sample_channels(&mut rng, cfg.m, &cfg.channel_model)?;
            p_bs_grid
                .iter()
                .map(|&p_bs| {
                    p_u_grid
                        .iter()
                        .map(|&p_u| {
                            let budget =
                                PowerBudget::new(p_bs, p_r_fixed, p_r_fixed, p_u, p_u)?;
                            Ok(solve_zf_epa(&ch, &budget, cfg.strict_paper)?.sum_rate)
                        })
                        .collect()
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let n = cfg.trials as f64;
    let sum_rate = (0..p_bs_grid.len())
        .map(|i| {
            (0..p_u_grid.len())
                .map(|j| {
                    let vals: Vec<f64> = per_trial.iter().map(|t| t[i][j]).collect();
                    pairwise_sum(&vals) / n
                })
                .collect()
        })
        .collect();
    Ok(SurfaceGrid {
        p_bs: p_bs_grid.to_vec(),
        p_u: p_u_grid.to_vec(),
        p_r_fixed,
        sum_rate,
    })
}

/// Complete single-instance report: solution, bound, baseline, and the
/// residual-interference diagnostics of the constructed beamformers.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub channels: ChannelsDoc,
    pub budget: PowerBudget,
    pub solution: ZfEpaSolution,
    pub cut_set: CutSetBound,
    pub tdma: RateQuadruple,
    pub diagnostics: NullingDiagnostics,
    pub strict_paper: bool,
}

/// Solve one instance at power parameter `p` (devices scaled as in the
/// sweeps) and assemble the full report.
pub fn solve_single(
    cfg: &SweepConfig,
    ch: &ChannelRealization,
    p: f64,
) -> Result<SolveReport> {
    let budget = budget_from_p(p)?;
    let solution = solve_zf_epa(ch, &budget, cfg.strict_paper)?;
    let cut_set = cut_set_bound(ch, &budget, cfg.strict_paper)?;
    let tdma = tdma_rates(ch, &budget)?;
    let set = BeamformerSet::construct(
        ch,
        solution.epa.split.p1,
        solution.epa.split.p2,
        solution.orders,
        cfg.strict_paper,
    )?;
    let diagnostics = nulling_diagnostics(ch, &set);
    Ok(SolveReport {
        channels: ChannelsDoc::from_realization(ch),
        budget,
        solution,
        cut_set,
        tdma,
        diagnostics,
        strict_paper: cfg.strict_paper,
    })
}

/// Cut-set-only report for the `bound` mode.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub channels: ChannelsDoc,
    pub budget: PowerBudget,
    pub cut_set: CutSetBound,
    pub strict_paper: bool,
}

pub fn bound_single(
    cfg: &SweepConfig,
    ch: &ChannelRealization,
    p: f64,
) -> Result<BoundReport> {
    let budget = budget_from_p(p)?;
    let cut_set = cut_set_bound(ch, &budget, cfg.strict_paper)?;
    Ok(BoundReport {
        channels: ChannelsDoc::from_realization(ch),
        budget,
        cut_set,
        strict_paper: cfg.strict_paper,
    })
}

/// Sample the channel realization a config's first trial would use.
pub fn channels_from_cfg(cfg: &SweepConfig) -> Result<ChannelRealization> {
    let mut rng = trial_rng(cfg.seed, 0);
    sample_channels(&mut rng, cfg.m, &cfg.channel_model)
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

/// Format with 12 significant digits, '.' decimal separator, plain decimal
/// notation where the exponent allows it.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.11e}", v);
    let (mant, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);
    let mut out = String::with_capacity(20);
    if neg {
        out.push('-');
    }
    if (11..=15).contains(&exp) {
        out.push_str(&digits);
        for _ in 0..(exp - 11) {
            out.push('0');
        }
    } else if (0..11).contains(&exp) {
        let split = exp as usize + 1;
        out.push_str(&digits[..split]);
        out.push('.');
        out.push_str(&digits[split..]);
    } else if (-4..0).contains(&exp) {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        return sci;
    }
    out
}

pub const SWEEP_CSV_HEADER: &str = "p,sum_zfepa,sum_tdma,sum_cutset,gap,r1,r2,r3,r4,b_eo,b_do,epa_p_bs,epa_p_r1,epa_p_r2,epa_p_u1,epa_p_u2";

/// Render sweep rows as CSV with the fixed header and 12-significant-digit
/// values; byte-identical for identical rows.
pub fn sweep_rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 200);
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            format_sig12(r.p),
            format_sig12(r.sum_zfepa),
            format_sig12(r.sum_tdma),
            format_sig12(r.sum_cutset),
            format_sig12(r.gap),
            format_sig12(r.r1),
            format_sig12(r.r2),
            format_sig12(r.r3),
            format_sig12(r.r4),
            r.b_eo.to_string(),
            r.b_do.to_string(),
            format_sig12(r.epa_p_bs),
            format_sig12(r.epa_p_r1),
            format_sig12(r.epa_p_r2),
            format_sig12(r.epa_p_u1),
            format_sig12(r.epa_p_u2),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Long-format CSV for the surface: one row per `(p_bs, p_u)` cell.
pub fn surface_to_csv(grid: &SurfaceGrid) -> String {
    let mut out = String::from("p_bs,p_u,sum_zfepa\n");
    for (i, &p_bs) in grid.p_bs.iter().enumerate() {
        for (j, &p_u) in grid.p_u.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                format_sig12(p_bs),
                format_sig12(p_u),
                format_sig12(grid.sum_rate[i][j])
            ));
        }
    }
    out
}
