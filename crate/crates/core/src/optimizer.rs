//! Solver for the zero-forcing scheme with efficient power allocation.
//!
//! Relay and user powers are set to their maxima (rates are non-decreasing
//! in them), the basestation power split between the two transmit
//! beamformers is optimized for each of the four order pairs, the best
//! pair wins, and finally the minimal powers that still achieve the
//! optimal rates are back-solved from the binding constraints.

use serde::Serialize;

use crate::beamforming::{effective_gains, transmit_beamformers, EffectiveGains};
use crate::beamforming::receive_beamformers;
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, OrderPair, PowerBudget};
use crate::numerics::maximize_piecewise_concave;
use crate::rates::{
    downlink_rate, downlink_sinrs, downlink_rates, end_to_end_rates, simplified_uplink_rate,
    simplified_uplink_rates, uplink_sinrs, RateQuadruple,
};

/// Rates below this threshold are treated as exactly zero when deciding
/// whether a power term is needed; avoids assigning the spurious
/// `(2^0 - 1/2) / g` to a zero-rate message.
pub const RATE_EPS: f64 = 1e-12;

/// Basestation power allocated to the two transmit beamformers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSplit {
    pub p1: f64,
    pub p2: f64,
}

impl PowerSplit {
    pub fn total(&self) -> f64 {
        self.p1 + self.p2
    }
}

/// Minimal per-device powers achieving the optimal rates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpaPowers {
    pub p_bs: f64,
    pub p_r1: f64,
    pub p_r2: f64,
    pub p_u1: f64,
    pub p_u2: f64,
    pub split: PowerSplit,
}

/// Full solution of the scheme for one channel realization and budget.
#[derive(Debug, Clone, Serialize)]
pub struct ZfEpaSolution {
    pub rates: RateQuadruple,
    pub split: PowerSplit,
    pub orders: OrderPair,
    pub epa: EpaPowers,
    pub sum_rate: f64,
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    // +inf is allowed (an uncapped rate ceiling); NaN and negatives are not.
    if v.is_nan() || v < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be non-negative, got {v}"
        )));
    }
    Ok(())
}

fn exp2(x: f64) -> f64 {
    x.exp2()
}

/// Maximize `min(u1(P1), cap1) + min(u2(P_max - P1), cap2)` over the
/// basestation split, where `u_i(P) = 0.5 [log2(1/2 + g_i P)]^+` and the
/// caps are the downlink-imposed rate ceilings of messages m1 and m2.
///
/// The objective is piecewise concave with at most four kinks (positivity
/// and cap, per side); the search partitions at those kinks and runs a
/// golden section on each segment. The returned split holds the *minimal*
/// powers that achieve the optimal `(r1, r2)`; any surplus after both caps
/// bind is left unused.
pub fn solve_power_split(
    g1: f64,
    g2: f64,
    cap1: f64,
    cap2: f64,
    p_bs_max: f64,
) -> Result<(PowerSplit, f64, f64)> {
    check_nonneg("g1", g1)?;
    check_nonneg("g2", g2)?;
    check_nonneg("cap1", cap1)?;
    check_nonneg("cap2", cap2)?;
    if !p_bs_max.is_finite() || p_bs_max < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "p_bs_max must be finite and non-negative, got {p_bs_max}"
        )));
    }

    let r1_of = |p: f64| simplified_uplink_rate(g1 * p).min(cap1);
    let r2_of = |p: f64| simplified_uplink_rate(g2 * p).min(cap2);

    if p_bs_max == 0.0 || (g1 == 0.0 && g2 == 0.0) {
        return Ok((PowerSplit { p1: 0.0, p2: 0.0 }, 0.0, 0.0));
    }

    let f = |t: f64| r1_of(t) + r2_of(p_bs_max - t);
    let mut kinks = Vec::with_capacity(4);
    if g1 > 0.0 {
        kinks.push(0.5 / g1);
        kinks.push((exp2(2.0 * cap1) - 0.5) / g1);
    }
    if g2 > 0.0 {
        kinks.push(p_bs_max - 0.5 / g2);
        kinks.push(p_bs_max - (exp2(2.0 * cap2) - 0.5) / g2);
    }
    let tol = 1e-9 * p_bs_max;
    let (t, _) = maximize_piecewise_concave(f, &kinks, 0.0, p_bs_max, tol)?;

    let r1 = r1_of(t);
    let r2 = r2_of(p_bs_max - t);
    let p1 = if r1 > RATE_EPS {
        ((exp2(2.0 * r1) - 0.5) / g1).min(t)
    } else {
        0.0
    };
    let p2 = if r2 > RATE_EPS {
        ((exp2(2.0 * r2) - 0.5) / g2).min(p_bs_max - t)
    } else {
        0.0
    };
    Ok((PowerSplit { p1, p2 }, r1, r2))
}

/// Invert one `0.5 log2(1 + gain * P) >= rate` constraint for its minimal
/// power; zero-rate targets need no power.
fn min_power_linear(rate: f64, gain: f64, what: &str) -> Result<f64> {
    if rate <= RATE_EPS {
        return Ok(0.0);
    }
    if gain <= 0.0 {
        return Err(Error::Infeasible(format!(
            "{what}: rate {rate} requires a positive gain"
        )));
    }
    Ok((exp2(2.0 * rate) - 1.0) / gain)
}

/// Invert one `0.5 log2(1/2 + gain * P) >= rate` constraint.
fn min_power_lattice(rate: f64, gain: f64, what: &str) -> Result<f64> {
    if rate <= RATE_EPS {
        return Ok(0.0);
    }
    if gain <= 0.0 {
        return Err(Error::Infeasible(format!(
            "{what}: rate {rate} requires a positive gain"
        )));
    }
    Ok((exp2(2.0 * rate) - 0.5) / gain)
}

/// Minimal per-device powers achieving `rates` under the given gains:
/// each power is the inversion of its binding rate constraint, so reducing
/// any nonzero component strictly lowers some message rate.
pub fn epa_powers(
    rates: &RateQuadruple,
    gains: &EffectiveGains,
    ch: &ChannelRealization,
) -> Result<EpaPowers> {
    let a3 = ch.h3.norm_sqr();
    let a4 = ch.h4.norm_sqr();

    let p_u1 = min_power_lattice(rates.r3, a3, "p_u1 (uplink of m3)")?;
    let p_u2 = min_power_lattice(rates.r4, a4, "p_u2 (uplink of m4)")?;
    let p_r1 = min_power_linear(rates.r1, a3, "p_r1 (downlink of m1)")?
        .max(min_power_linear(rates.r3, gains.f1, "p_r1 (downlink of m3)")?);
    let p_r2 = min_power_linear(rates.r2, a4, "p_r2 (downlink of m2)")?
        .max(min_power_linear(rates.r4, gains.f2, "p_r2 (downlink of m4)")?);
    let p1 = min_power_lattice(rates.r1, gains.g1, "p1 (uplink of m1)")?;
    let p2 = min_power_lattice(rates.r2, gains.g2, "p2 (uplink of m2)")?;

    Ok(EpaPowers {
        p_bs: p1 + p2,
        p_r1,
        p_r2,
        p_u1,
        p_u2,
        split: PowerSplit { p1, p2 },
    })
}

fn tie_tol(sum: f64) -> f64 {
    1e-9 * sum.abs().max(1.0)
}

/// Solve the full scheme: relay/user powers at their maxima, the split
/// optimized per order pair, the best of the four order pairs (ties broken
/// toward the lexicographically smallest `(b_eo, b_do)`), and the minimal
/// powers achieving the result.
pub fn solve_zf_epa(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    strict: bool,
) -> Result<ZfEpaSolution> {
    let a3 = ch.h3.norm_sqr();
    let a4 = ch.h4.norm_sqr();
    let cap1 = downlink_rate(a3 * budget.p_r1_max);
    let cap2 = downlink_rate(a4 * budget.p_r2_max);
    let ul3 = simplified_uplink_rate(a3 * budget.p_u1_max);
    let ul4 = simplified_uplink_rate(a4 * budget.p_u2_max);

    struct Candidate {
        rates: RateQuadruple,
        orders: OrderPair,
        gains: EffectiveGains,
        sum: f64,
    }
    let mut best: Option<Candidate> = None;

    for orders in OrderPair::ALL {
        let gains = effective_gains(ch, orders, strict);
        let (_, r1, r2) = solve_power_split(gains.g1, gains.g2, cap1, cap2, budget.p_bs_max)?;
        let r3 = ul3.min(downlink_rate(gains.f1 * budget.p_r1_max));
        let r4 = ul4.min(downlink_rate(gains.f2 * budget.p_r2_max));
        let rates = RateQuadruple { r1, r2, r3, r4 };
        let sum = rates.sum();
        let replace = match &best {
            None => true,
            Some(b) => sum > b.sum + tie_tol(b.sum),
        };
        if replace {
            best = Some(Candidate {
                rates,
                orders,
                gains,
                sum,
            });
        }
    }

    let c = best.expect("four candidates were evaluated");
    let epa = epa_powers(&c.rates, &c.gains, ch)?;
    Ok(ZfEpaSolution {
        rates: c.rates,
        split: epa.split,
        orders: c.orders,
        epa,
        sum_rate: c.sum,
    })
}

/// Re-evaluate the end-to-end rates through the full formula pipeline
/// (beamformer construction, uplink SINRs, identical-lattice uplink rates,
/// downlink SINRs and rates, per-message minimum) at explicit powers.
///
/// This is the verification path: it shares no algebra with
/// [`solve_zf_epa`], which works on the effective gains directly.
#[allow(clippy::too_many_arguments)]
pub fn pipeline_rates(
    ch: &ChannelRealization,
    orders: OrderPair,
    strict: bool,
    p1: f64,
    p2: f64,
    p_r1: f64,
    p_r2: f64,
    p_u1: f64,
    p_u2: f64,
) -> Result<RateQuadruple> {
    let tx = transmit_beamformers(ch, p1, p2, orders.b_eo, strict)?;
    let ul = uplink_sinrs(ch, &tx.w1, &tx.w2, p_u1, p_u2, orders.b_eo)?;
    let ul_rates = simplified_uplink_rates(&ul);
    let rx = receive_beamformers(ch, orders.b_do)?;
    let dl = downlink_sinrs(ch, &rx.v1, &rx.v2, p_r1, p_r2, orders.b_do)?;
    let dl_rates = downlink_rates(&dl);
    Ok(end_to_end_rates(&ul_rates, &dl_rates))
}

/// [`pipeline_rates`] at a solution's efficient powers.
pub fn pipeline_rates_at_epa(
    ch: &ChannelRealization,
    sol: &ZfEpaSolution,
    strict: bool,
) -> Result<RateQuadruple> {
    pipeline_rates(
        ch,
        sol.orders,
        strict,
        sol.epa.split.p1,
        sol.epa.split.p2,
        sol.epa.p_r1,
        sol.epa.p_r2,
        sol.epa.p_u1,
        sol.epa.p_u2,
    )
}
