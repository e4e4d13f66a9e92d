//! Cut-set upper bound on the two sum rates and the four-slot TDMA
//! baseline.
//!
//! Each cut yields two log terms; the four cuts bound `R1 + R2` (downlink
//! messages) and `R3 + R4` (uplink messages) by half the minimum of their
//! respective terms. The basestation split entering the first-cut terms is
//! maximized, since a fixed split could understate the bound.
//!
//! Where an eigenvalue pair of the channel Gram matrix meets a power pair
//! (the `alpha` terms), the larger eigenvalue is paired with the larger
//! power. The labeled pairing is only valid on one side of the split and
//! would not upper-bound the scheme for strongly asymmetric channels; the
//! sorted pairing is, for every input (it dominates the labeled one
//! pointwise).

use serde::Serialize;

use crate::error::Result;
use crate::model::{ChannelRealization, PowerBudget};
use crate::numerics::{gram_eigenvalues, maximize_piecewise_concave, norm_sq};
use crate::optimizer::PowerSplit;
use crate::rates::RateQuadruple;

/// The eight cut terms (bits, before the half-duplex factor), the two
/// resulting sum-rate bounds, the Gram eigenvalues, and the basestation
/// split at which the terms were evaluated.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CutSetBound {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub bound_12: f64,
    pub bound_34: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub split_used: PowerSplit,
}

fn log1p2(x: f64) -> f64 {
    (1.0 + x).log2()
}

/// Two-eigenvalue term with sorted pairing: the larger eigenvalue meets
/// the larger power.
fn eigen_term(l1: f64, l2: f64, pa: f64, pb: f64) -> f64 {
    log1p2(l1 * pa.max(pb)) + log1p2(l2 * pa.min(pb))
}

/// Cut-set upper bound with relay and user powers at their maxima.
///
/// `strict` reproduces the alternative `psi1` convention that pairs the
/// relay-1-to-user-1 link gain with the relay-2 power; the default pairs
/// it with the relay-1 power, the one actually serving that link.
pub fn cut_set_bound(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    strict: bool,
) -> Result<CutSetBound> {
    let (l1, l2) = gram_eigenvalues(&ch.h1, &ch.h2)?;
    let n1 = norm_sq(&ch.h1);
    let n2 = norm_sq(&ch.h2);
    let a3 = ch.h3.norm_sqr();
    let a4 = ch.h4.norm_sqr();
    let p_max = budget.p_bs_max;
    let (pr1, pr2) = (budget.p_r1_max, budget.p_r2_max);
    let (pu1, pu2) = (budget.p_u1_max, budget.p_u2_max);

    let psi1_relay_power = if strict { pr2 } else { pr1 };
    let alpha1_of = |t: f64| eigen_term(l1, l2, t, p_max - t);
    let delta1_of = |t: f64| log1p2(n1 * t) + log1p2(a4 * pr2);
    let psi1_of = |t: f64| log1p2(n2 * (p_max - t)) + log1p2(a3 * psi1_relay_power);
    let objective = |t: f64| alpha1_of(t).min(delta1_of(t)).min(psi1_of(t));

    // The sorted eigenvalue pairing makes alpha1 the pointwise max of two
    // concave branches meeting at p_max/2, so that is the one kink.
    let t = if p_max > 0.0 {
        let tol = 1e-9 * p_max;
        let (t, _) = maximize_piecewise_concave(objective, &[0.5 * p_max], 0.0, p_max, tol)?;
        t
    } else {
        0.0
    };

    let alpha1 = alpha1_of(t);
    let alpha2 = eigen_term(l1, l2, pr1, pr2);
    let beta1 = log1p2(a3 * pr1) + log1p2(a4 * pr2);
    let beta2 = log1p2(a3 * pu1) + log1p2(a4 * pu2);
    let delta1 = delta1_of(t);
    let delta2 = log1p2(n1 * pr1) + log1p2(a4 * pu2);
    let psi1 = psi1_of(t);
    let psi2 = log1p2(n2 * pr2) + log1p2(a3 * pu1);

    Ok(CutSetBound {
        alpha1,
        alpha2,
        beta1,
        beta2,
        delta1,
        delta2,
        psi1,
        psi2,
        bound_12: 0.5 * alpha1.min(beta1).min(delta1).min(psi1),
        bound_34: 0.5 * alpha2.min(beta2).min(delta2).min(psi2),
        lambda1: l1,
        lambda2: l2,
        split_used: PowerSplit {
            p1: t,
            p2: p_max - t,
        },
    })
}

impl CutSetBound {
    /// Upper bound on the total sum rate.
    pub fn sum(&self) -> f64 {
        self.bound_12 + self.bound_34
    }
}

/// Four-slot TDMA baseline: one message per orthogonal slot, matched
/// filtering, full device power per slot, no interference anywhere.
pub fn tdma_rates(ch: &ChannelRealization, budget: &PowerBudget) -> Result<RateQuadruple> {
    let n1 = norm_sq(&ch.h1);
    let n2 = norm_sq(&ch.h2);
    let a3 = ch.h3.norm_sqr();
    let a4 = ch.h4.norm_sqr();
    let quarter_min = |ul: f64, dl: f64| 0.25 * log1p2(ul).min(log1p2(dl));
    Ok(RateQuadruple {
        r1: quarter_min(n1 * budget.p_bs_max, a3 * budget.p_r1_max),
        r2: quarter_min(n2 * budget.p_bs_max, a4 * budget.p_r2_max),
        r3: quarter_min(a3 * budget.p_u1_max, n1 * budget.p_r1_max),
        r4: quarter_min(a4 * budget.p_u2_max, n2 * budget.p_r2_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{budget_from_p, sample_channels, trial_rng, ChannelModel, PowerBudget};
    use crate::numerics::CVector;
    use crate::optimizer::solve_zf_epa;
    use num_complex::Complex64;

    fn ch2(h1: &[f64], h2: &[f64], h3: f64, h4: f64) -> ChannelRealization {
        ChannelRealization::new(
            CVector::from_re(h1).unwrap(),
            CVector::from_re(h2).unwrap(),
            Complex64::new(h3, 0.0),
            Complex64::new(h4, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn cut_set_zero_budget() {
        let ch = ch2(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        let b = cut_set_bound(&ch, &PowerBudget::zero(), false).unwrap();
        assert_eq!(b.bound_12, 0.0);
        assert_eq!(b.bound_34, 0.0);
        assert_eq!(b.alpha1, 0.0);
        assert_eq!(b.psi2, 0.0);
    }

    #[test]
    fn cut_set_orthogonal_worked_example() {
        // Unit orthogonal vector channels, unit scalar channels,
        // P_BS = 4 (optimal split 2 + 2), P_R = 5, P_U = 2.25.
        let ch = ch2(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        let budget = PowerBudget::new(4.0, 5.0, 5.0, 2.25, 2.25).unwrap();
        let b = cut_set_bound(&ch, &budget, false).unwrap();
        assert!((b.lambda1 - 1.0).abs() < 1e-12);
        assert!((b.lambda2 - 1.0).abs() < 1e-12);
        assert!((b.split_used.p1 - 2.0).abs() < 1e-6);
        assert!((b.alpha1 - 2.0 * 3.0f64.log2()).abs() < 1e-9);
        assert!((b.beta1 - 2.0 * 6.0f64.log2()).abs() < 1e-12);
        let mixed = 3.0f64.log2() + 6.0f64.log2();
        assert!((b.delta1 - mixed).abs() < 1e-9);
        assert!((b.psi1 - mixed).abs() < 1e-9);
        assert!((b.bound_12 - 3.0f64.log2()).abs() < 1e-9);
        // Second group: beta2 binds.
        assert!((b.alpha2 - 2.0 * 6.0f64.log2()).abs() < 1e-12);
        assert!((b.beta2 - 2.0 * 3.25f64.log2()).abs() < 1e-12);
        assert!((b.delta2 - (6.0f64.log2() + 3.25f64.log2())).abs() < 1e-12);
        assert!((b.psi2 - (6.0f64.log2() + 3.25f64.log2())).abs() < 1e-12);
        assert!((b.bound_34 - 3.25f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn cut_set_parallel_channels_rank_one() {
        let ch = ch2(&[1.0, 0.0], &[1.0, 0.0], 1.0, 1.0);
        let budget = budget_from_p(6.0).unwrap();
        let b = cut_set_bound(&ch, &budget, false).unwrap();
        assert!((b.lambda1 - 2.0).abs() < 1e-12);
        assert!(b.lambda2.abs() < 1e-12);
        // The second eigen-branch contributes nothing.
        let pa = b.split_used.p1.max(b.split_used.p2);
        assert!((b.alpha1 - (1.0 + 2.0 * pa).log2()).abs() < 1e-9);
    }

    #[test]
    fn cut_terms_monotone_in_powers() {
        let ch = ch2(&[0.9, -0.5], &[0.2, 1.4], 0.8, 1.3);
        let mut prev = CutSetBound {
            alpha1: 0.0,
            alpha2: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            delta1: 0.0,
            delta2: 0.0,
            psi1: 0.0,
            psi2: 0.0,
            bound_12: 0.0,
            bound_34: 0.0,
            lambda1: 0.0,
            lambda2: 0.0,
            split_used: PowerSplit { p1: 0.0, p2: 0.0 },
        };
        for k in 0..=12 {
            let b = cut_set_bound(&ch, &budget_from_p(2.0 * k as f64).unwrap(), false).unwrap();
            assert!(b.alpha2 >= prev.alpha2 - 1e-9);
            assert!(b.beta1 >= prev.beta1 - 1e-9);
            assert!(b.beta2 >= prev.beta2 - 1e-9);
            assert!(b.delta2 >= prev.delta2 - 1e-9);
            assert!(b.psi2 >= prev.psi2 - 1e-9);
            assert!(b.bound_12 >= prev.bound_12 - 1e-9);
            assert!(b.bound_34 >= prev.bound_34 - 1e-9);
            prev = b;
        }
    }

    #[test]
    fn strict_psi1_uses_other_relay_power() {
        let ch = ch2(&[1.0, 0.2], &[-0.3, 1.1], 0.7, 1.4);
        let budget = PowerBudget::new(6.0, 2.0, 9.0, 1.0, 1.0).unwrap();
        let normal = cut_set_bound(&ch, &budget, false).unwrap();
        let strict = cut_set_bound(&ch, &budget, true).unwrap();
        assert!(normal.psi1 != strict.psi1);
        assert_eq!(normal.beta1, strict.beta1);
        assert_eq!(normal.alpha2, strict.alpha2);
    }

    #[test]
    fn dominance_over_scheme_random_instances() {
        let model = ChannelModel::real_unit();
        for t in 0..60 {
            let ch = sample_channels(&mut trial_rng(400, t), 3, &model).unwrap();
            for p in [0.5, 4.0, 20.0] {
                let budget = budget_from_p(p).unwrap();
                let sol = solve_zf_epa(&ch, &budget, false).unwrap();
                let b = cut_set_bound(&ch, &budget, false).unwrap();
                assert!(
                    sol.rates.r1 + sol.rates.r2 <= b.bound_12 + 1e-9,
                    "bound_12 violated at trial {t}, P {p}"
                );
                assert!(
                    sol.rates.r3 + sol.rates.r4 <= b.bound_34 + 1e-9,
                    "bound_34 violated at trial {t}, P {p}"
                );
            }
        }
    }

    #[test]
    fn dominance_with_uneven_budgets() {
        // Budgets that are not tied to the relative-power scaling.
        let model = ChannelModel::complex_unit();
        for t in 0..40 {
            let ch = sample_channels(&mut trial_rng(401, t), 2, &model).unwrap();
            let mut rng = trial_rng(402, t);
            use rand::Rng;
            let budget = PowerBudget::new(
                rng.random_range(0.0..30.0),
                rng.random_range(0.0..15.0),
                rng.random_range(0.0..15.0),
                rng.random_range(0.0..8.0),
                rng.random_range(0.0..8.0),
            )
            .unwrap();
            let sol = solve_zf_epa(&ch, &budget, false).unwrap();
            let b = cut_set_bound(&ch, &budget, false).unwrap();
            assert!(sol.rates.r1 + sol.rates.r2 <= b.bound_12 + 1e-9, "trial {t}");
            assert!(sol.rates.r3 + sol.rates.r4 <= b.bound_34 + 1e-9, "trial {t}");
        }
    }

    #[test]
    fn tdma_zero_budget() {
        let ch = ch2(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        let r = tdma_rates(&ch, &PowerBudget::zero()).unwrap();
        assert_eq!(r, RateQuadruple::zero());
    }

    #[test]
    fn tdma_orthogonal_example() {
        let ch = ch2(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        let r = tdma_rates(&ch, &budget_from_p(8.0).unwrap()).unwrap();
        let expect = 0.25 * 5.0f64.log2();
        assert!((r.r1 - expect).abs() < 1e-12);
        assert!((r.r2 - expect).abs() < 1e-12);
        // Uplink side: min(log2(1+2), log2(1+4)) / 4.
        let expect34 = 0.25 * 3.0f64.log2();
        assert!((r.r3 - expect34).abs() < 1e-12);
        assert!((r.r4 - expect34).abs() < 1e-12);
    }

    #[test]
    fn tdma_quarter_prefactor() {
        // Both min arguments equal to log2(2) make the rate exactly 1/4.
        let ch = ch2(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        let budget = PowerBudget::new(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let r = tdma_rates(&ch, &budget).unwrap();
        assert!((r.r1 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn scheme_beats_tdma_at_high_power() {
        let model = ChannelModel::real_unit();
        for t in 0..30 {
            let ch = sample_channels(&mut trial_rng(403, t), 5, &model).unwrap();
            for p in [10.0, 25.0] {
                let budget = budget_from_p(p).unwrap();
                let sol = solve_zf_epa(&ch, &budget, false).unwrap();
                let tdma = tdma_rates(&ch, &budget).unwrap();
                assert!(
                    sol.sum_rate >= tdma.sum(),
                    "trial {t}, P {p}: {} < {}",
                    sol.sum_rate,
                    tdma.sum()
                );
            }
        }
    }
}
