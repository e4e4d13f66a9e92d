//! SINR and rate formulas for both transmission phases.
//!
//! Rates are in bits per complex channel use, logs are base 2, and every
//! rate expression carries the half-duplex factor 1/2 exactly once (the
//! TDMA baseline has its own 1/4 and lives in the bounds module).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ChannelRealization;
use crate::numerics::{inner_product, CVector};

/// Which phase a SINR quadruple belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Uplink,
    Downlink,
}

/// Linear-scale SINRs of the four messages in one phase.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SinrQuadruple {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub phase: Phase,
}

/// Per-message rates in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateQuadruple {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

impl RateQuadruple {
    pub fn zero() -> Self {
        Self {
            r1: 0.0,
            r2: 0.0,
            r3: 0.0,
            r4: 0.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2 + self.r3 + self.r4
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.r1, self.r2, self.r3, self.r4]
    }
}

fn check_power(name: &str, p: f64) -> Result<()> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be finite and non-negative, got {p}"
        )));
    }
    Ok(())
}

/// Uplink SINRs at the two relays for arbitrary transmit beamformers.
///
/// `b_eo` gates which cross term survives: for `b_eo = true` the relay-1
/// denominators keep `|w2^H h1|^2`, otherwise the relay-2 denominators
/// keep `|w1^H h2|^2`.
pub fn uplink_sinrs(
    ch: &ChannelRealization,
    w1: &CVector,
    w2: &CVector,
    p_u1: f64,
    p_u2: f64,
    b_eo: bool,
) -> Result<SinrQuadruple> {
    check_power("p_u1", p_u1)?;
    check_power("p_u2", p_u2)?;
    let s11 = inner_product(w1, &ch.h1)?.norm_sqr();
    let s22 = inner_product(w2, &ch.h2)?.norm_sqr();
    let cross1 = inner_product(w2, &ch.h1)?.norm_sqr();
    let cross2 = inner_product(w1, &ch.h2)?.norm_sqr();
    let d1 = 1.0 + if b_eo { cross1 } else { 0.0 };
    let d2 = 1.0 + if b_eo { 0.0 } else { cross2 };
    Ok(SinrQuadruple {
        gamma1: s11 / d1,
        gamma2: s22 / d2,
        gamma3: ch.h3.norm_sqr() * p_u1 / d1,
        gamma4: ch.h4.norm_sqr() * p_u2 / d2,
        phase: Phase::Uplink,
    })
}

/// Downlink SNRs at the users and SINRs at the basestation.
///
/// `b_do` gates the successive-decoding cross term at the basestation:
/// for `b_do = true` the m3 branch sees `|v1^H h2|^2 P_R2`, otherwise the
/// m4 branch sees `|v2^H h1|^2 P_R1`.
pub fn downlink_sinrs(
    ch: &ChannelRealization,
    v1: &CVector,
    v2: &CVector,
    p_r1: f64,
    p_r2: f64,
    b_do: bool,
) -> Result<SinrQuadruple> {
    check_power("p_r1", p_r1)?;
    check_power("p_r2", p_r2)?;
    let s1 = inner_product(v1, &ch.h1)?.norm_sqr();
    let s2 = inner_product(v2, &ch.h2)?.norm_sqr();
    let cross1 = inner_product(v1, &ch.h2)?.norm_sqr();
    let cross2 = inner_product(v2, &ch.h1)?.norm_sqr();
    let d3 = 1.0 + if b_do { cross1 * p_r2 } else { 0.0 };
    let d4 = 1.0 + if b_do { 0.0 } else { cross2 * p_r1 };
    Ok(SinrQuadruple {
        gamma1: ch.h3.norm_sqr() * p_r1,
        gamma2: ch.h4.norm_sqr() * p_r2,
        gamma3: s1 * p_r1 / d3,
        gamma4: s2 * p_r2 / d4,
        phase: Phase::Downlink,
    })
}

/// Compute-and-forward uplink rate for one message:
/// `0.5 * [log2(own/(own+partner) + own)]^+`.
///
/// `own` is the message's SINR and `partner` the SINR of the other message
/// decoded at the same relay (m1 pairs with m3, m2 with m4). Both SINRs
/// zero is defined as rate 0 by continuity.
pub fn cf_uplink_rate(gamma_own: f64, gamma_partner: f64) -> f64 {
    if gamma_own <= 0.0 {
        return 0.0;
    }
    let total = gamma_own + gamma_partner;
    0.5 * (gamma_own / total + gamma_own).log2().max(0.0)
}

/// Compute-and-forward rates of all four messages with the relay pairing
/// applied: m1 with m3 at relay 1, m2 with m4 at relay 2.
pub fn cf_uplink_rates(s: &SinrQuadruple) -> RateQuadruple {
    RateQuadruple {
        r1: cf_uplink_rate(s.gamma1, s.gamma3),
        r2: cf_uplink_rate(s.gamma2, s.gamma4),
        r3: cf_uplink_rate(s.gamma3, s.gamma1),
        r4: cf_uplink_rate(s.gamma4, s.gamma2),
    }
}

/// Identical-lattice uplink rate `0.5 * [log2(1/2 + gamma)]^+`.
///
/// Equals [`cf_uplink_rate`] whenever both paired SINRs coincide; zero for
/// `gamma <= 1/2`.
pub fn simplified_uplink_rate(gamma: f64) -> f64 {
    0.5 * (0.5 + gamma).log2().max(0.0)
}

pub fn simplified_uplink_rates(s: &SinrQuadruple) -> RateQuadruple {
    RateQuadruple {
        r1: simplified_uplink_rate(s.gamma1),
        r2: simplified_uplink_rate(s.gamma2),
        r3: simplified_uplink_rate(s.gamma3),
        r4: simplified_uplink_rate(s.gamma4),
    }
}

/// Downlink rate `0.5 * log2(1 + gamma)`; non-negative already, no clamp.
pub fn downlink_rate(gamma: f64) -> f64 {
    0.5 * (1.0 + gamma).log2()
}

pub fn downlink_rates(s: &SinrQuadruple) -> RateQuadruple {
    RateQuadruple {
        r1: downlink_rate(s.gamma1),
        r2: downlink_rate(s.gamma2),
        r3: downlink_rate(s.gamma3),
        r4: downlink_rate(s.gamma4),
    }
}

/// End-to-end rates: the weakest phase limits each message.
pub fn end_to_end_rates(ul: &RateQuadruple, dl: &RateQuadruple) -> RateQuadruple {
    RateQuadruple {
        r1: ul.r1.min(dl.r1),
        r2: ul.r2.min(dl.r2),
        r3: ul.r3.min(dl.r3),
        r4: ul.r4.min(dl.r4),
    }
}
