//! Zero-forcing transmit/receive beamformer construction, the associated
//! effective channel gains, and projection onto the channel span.
//!
//! Transmit beamformers carry power (`||w_i||^2 = P_i`); receive beamformers
//! are unit-norm. For each order flag one beamformer is matched to its own
//! channel and the other one is the normalized orthogonal component, chosen
//! so that the interference term which survives in the uplink SINR
//! denominators for that flag is exactly nulled.
//!
//! The `strict` switch reproduces the alternative branch labeling in which
//! the matched/orthogonalized roles on the transmit side are swapped per
//! order flag (and is also honored by [`effective_gains`]); under it the
//! surviving interference is generally *not* nulled, so it exists for
//! side-by-side comparison only.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, OrderPair};
use crate::numerics::{inner_product, norm_sq, orthogonal_component, CVector};

/// Relative squared-norm threshold below which two channels are treated as
/// parallel and the orthogonalized beamformer degenerates to the zero
/// vector (gain 0) instead of an error.
pub const PARALLEL_TOL: f64 = 1e-12;

/// Transmit pair `(w1, w2)`; `degenerate` is set when the orthogonalized
/// beamformer collapsed to the zero vector because the channels are
/// parallel within [`PARALLEL_TOL`].
#[derive(Debug, Clone)]
pub struct TransmitPair {
    pub w1: CVector,
    pub w2: CVector,
    pub degenerate: bool,
}

/// Receive pair `(v1, v2)`, unit-norm unless `degenerate`.
#[derive(Debug, Clone)]
pub struct ReceivePair {
    pub v1: CVector,
    pub v2: CVector,
    pub degenerate: bool,
}

/// Complete beamformer set for one order pair.
#[derive(Debug, Clone)]
pub struct BeamformerSet {
    pub w1: CVector,
    pub w2: CVector,
    pub v1: CVector,
    pub v2: CVector,
    pub orders: OrderPair,
    pub degenerate: bool,
}

impl BeamformerSet {
    pub fn construct(
        ch: &ChannelRealization,
        p1: f64,
        p2: f64,
        orders: OrderPair,
        strict: bool,
    ) -> Result<Self> {
        let tx = transmit_beamformers(ch, p1, p2, orders.b_eo, strict)?;
        let rx = receive_beamformers(ch, orders.b_do)?;
        Ok(Self {
            w1: tx.w1,
            w2: tx.w2,
            v1: rx.v1,
            v2: rx.v2,
            orders,
            degenerate: tx.degenerate || rx.degenerate,
        })
    }
}

/// Order-dependent effective channel gains.
///
/// `g1`, `g2` are the unit-power transmit beamforming gains
/// `|h_i^H w_i|^2 / P_i`; `f1`, `f2` the receive gains `|v_i^H h_i|^2`.
/// The matched side gets `||h_i||^2`, the orthogonalized side the squared
/// norm of the orthogonal component.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EffectiveGains {
    pub g1: f64,
    pub g2: f64,
    pub f1: f64,
    pub f2: f64,
    pub orders: OrderPair,
}

fn scaled_to_power(h: &CVector, p: f64) -> CVector {
    let n = norm_sq(h);
    h.scaled_re(p.sqrt() / n.sqrt())
}

/// Normalized orthogonal component of `target` against `against`, scaled to
/// power `p`; zero vector (flagged) when the channels are parallel.
fn orthogonalized(target: &CVector, against: &CVector, p: f64) -> Result<(CVector, bool)> {
    let u = orthogonal_component(target, against)?;
    let nu = norm_sq(&u);
    if nu < PARALLEL_TOL * norm_sq(target) {
        Ok((CVector::zeros(target.len()), true))
    } else {
        Ok((u.scaled_re(p.sqrt() / nu.sqrt()), false))
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

fn check_channels(ch: &ChannelRealization) -> Result<()> {
    if norm_sq(&ch.h1) <= 0.0 || norm_sq(&ch.h2) <= 0.0 {
        return Err(Error::DegenerateChannel(
            "basestation-side channel is the zero vector".into(),
        ));
    }
    Ok(())
}

/// Zero-forcing transmit beamformers, `||w_1||^2 = p1`, `||w_2||^2 = p2`.
///
/// Default mapping (`strict = false`): `b_eo = false` puts `w1` orthogonal
/// to `h2` and `w2` matched to `h2`; `b_eo = true` puts `w1` matched to
/// `h1` and `w2` orthogonal to `h1`. This nulls exactly the interference
/// term that survives in the uplink SINRs for the given flag.
pub fn transmit_beamformers(
    ch: &ChannelRealization,
    p1: f64,
    p2: f64,
    b_eo: bool,
    strict: bool,
) -> Result<TransmitPair> {
    check_power("p1", p1)?;
    check_power("p2", p2)?;
    check_channels(ch)?;
    let w1_matched = if strict { !b_eo } else { b_eo };
    if w1_matched {
        let w1 = scaled_to_power(&ch.h1, p1);
        let (w2, degenerate) = orthogonalized(&ch.h2, &ch.h1, p2)?;
        Ok(TransmitPair { w1, w2, degenerate })
    } else {
        let (w1, degenerate) = orthogonalized(&ch.h1, &ch.h2, p1)?;
        let w2 = scaled_to_power(&ch.h2, p2);
        Ok(TransmitPair { w1, w2, degenerate })
    }
}

/// Zero-forcing receive beamformers, unit norm.
///
/// `b_do = false`: `v1` matched to `h1`, `v2` orthogonal to `h1`;
/// `b_do = true`: `v1` orthogonal to `h2`, `v2` matched to `h2`. Either
/// way the cross term active in the downlink SINR denominators is nulled.
pub fn receive_beamformers(ch: &ChannelRealization, b_do: bool) -> Result<ReceivePair> {
    check_channels(ch)?;
    if b_do {
        let (v1, degenerate) = orthogonalized(&ch.h1, &ch.h2, 1.0)?;
        let v2 = scaled_to_power(&ch.h2, 1.0);
        Ok(ReceivePair { v1, v2, degenerate })
    } else {
        let v1 = scaled_to_power(&ch.h1, 1.0);
        let (v2, degenerate) = orthogonalized(&ch.h2, &ch.h1, 1.0)?;
        Ok(ReceivePair { v1, v2, degenerate })
    }
}

/// Squared norm of the component of `a` orthogonal to `b`, clamped to 0
/// below the parallel threshold. A zero `b` projects nothing out.
fn orth_gain(a: &CVector, b: &CVector) -> f64 {
    let na = norm_sq(a);
    let nb = norm_sq(b);
    if nb <= 0.0 {
        return na;
    }
    let cross = inner_product(b, a).expect("equal lengths").norm_sqr();
    let g = (na - cross / nb).max(0.0);
    if g < PARALLEL_TOL * na {
        0.0
    } else {
        g
    }
}

/// Effective gains for one order pair without constructing the beamformers.
///
/// Matches `|h_i^H w_i|^2 / P_i` and `|v_i^H h_i|^2` of the constructed
/// zero-forcing set; degenerate (parallel) channels yield a 0 gain on the
/// orthogonalized side rather than an error.
pub fn effective_gains(ch: &ChannelRealization, orders: OrderPair, strict: bool) -> EffectiveGains {
    let m1 = norm_sq(&ch.h1);
    let m2 = norm_sq(&ch.h2);
    let o1 = orth_gain(&ch.h1, &ch.h2);
    let o2 = orth_gain(&ch.h2, &ch.h1);
    let w1_matched = if strict { !orders.b_eo } else { orders.b_eo };
    let (g1, g2) = if w1_matched { (m1, o2) } else { (o1, m2) };
    let (f1, f2) = if orders.b_do { (o1, m2) } else { (m1, o2) };
    EffectiveGains {
        g1,
        g2,
        f1,
        f2,
        orders,
    }
}

/// Orthogonal projection of `w` onto `span(h1, h2)`.
///
/// Preserves the inner products with both channels and never increases the
/// norm; the span may be one-dimensional (parallel channels) or empty
/// (both channels zero), in which case the projection loses the
/// corresponding components.
pub fn project_to_channel_span(w: &CVector, ch: &ChannelRealization) -> Result<CVector> {
    if w.len() != ch.antenna_count() {
        return Err(Error::DimensionMismatch {
            expected: ch.antenna_count(),
            got: w.len(),
        });
    }
    let mut basis: Vec<CVector> = Vec::with_capacity(2);
    if norm_sq(&ch.h1) > 0.0 {
        basis.push(scaled_to_power(&ch.h1, 1.0));
    }
    if norm_sq(&ch.h2) > 0.0 {
        let mut u = ch.h2.clone();
        for e in &basis {
            let c = inner_product(e, &u).expect("equal lengths");
            u = u.minus(&e.scaled(c));
        }
        let nu = norm_sq(&u);
        if nu >= PARALLEL_TOL * norm_sq(&ch.h2) {
            basis.push(u.scaled_re(1.0 / nu.sqrt()));
        }
    }
    let mut proj = CVector::zeros(w.len());
    for e in &basis {
        let c = inner_product(e, w).expect("equal lengths");
        proj = proj.plus(&e.scaled(c));
    }
    Ok(proj)
}

/// Residual-interference diagnostics for a beamformer set.
///
/// `relay*_denominator` are the uplink SINR denominators (1 plus the
/// order-gated cross power); `bs_cross_*` the magnitudes of the receive
/// cross products `|v1^H h2|` and `|v2^H h1|`. Under the default branch
/// mapping the order-active entries are zero up to round-off.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NullingDiagnostics {
    pub relay1_denominator: f64,
    pub relay2_denominator: f64,
    pub bs_cross_1: f64,
    pub bs_cross_2: f64,
    pub orders: OrderPair,
}

pub fn nulling_diagnostics(ch: &ChannelRealization, set: &BeamformerSet) -> NullingDiagnostics {
    let ip = |a: &CVector, b: &CVector| inner_product(a, b).expect("equal lengths");
    let b_eo = set.orders.b_eo;
    let relay1_denominator = 1.0 + if b_eo { ip(&set.w2, &ch.h1).norm_sqr() } else { 0.0 };
    let relay2_denominator = 1.0 + if b_eo { 0.0 } else { ip(&set.w1, &ch.h2).norm_sqr() };
    NullingDiagnostics {
        relay1_denominator,
        relay2_denominator,
        bs_cross_1: ip(&set.v1, &ch.h2).norm(),
        bs_cross_2: ip(&set.v2, &ch.h1).norm(),
        orders: set.orders,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_channels, trial_rng, ChannelModel};
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

    fn close(a: &CVector, b: &[f64], tol: f64) {
        for (x, &y) in a.iter().zip(b) {
            assert!(
                (x - Complex64::new(y, 0.0)).norm() < tol,
                "expected {b:?}, got {a:?}"
            );
        }
    }

    #[test]
    fn transmit_orthogonal_channels_both_orders() {
        let ch = ch2(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        for b_eo in [false, true] {
            let tx = transmit_beamformers(&ch, 4.0, 1.0, b_eo, false).unwrap();
            close(&tx.w1, &[2.0, 0.0], 1e-12);
            close(&tx.w2, &[0.0, 1.0], 1e-12);
            assert!(!tx.degenerate);
        }
    }

    #[test]
    fn transmit_m1_matched_nulls_relay1_interference() {
        let ch = ch2(&[1.0, 0.0], &[0.6, 0.8], 1.0, 1.0);
        // b_eo = true: w1 matched to h1, w2 orthogonal to h1.
        let tx = transmit_beamformers(&ch, 1.0, 1.0, true, false).unwrap();
        close(&tx.w1, &[1.0, 0.0], 1e-12);
        close(&tx.w2, &[0.0, 1.0], 1e-12);
        let cross = inner_product(&ch.h1, &tx.w2).unwrap().norm();
        assert!(cross < 1e-12);
    }

    #[test]
    fn transmit_m2_matched_nulls_relay2_interference() {
        let ch = ch2(&[1.0, 0.0], &[0.6, 0.8], 1.0, 1.0);
        let tx = transmit_beamformers(&ch, 1.0, 1.0, false, false).unwrap();
        close(&tx.w2, &[0.6, 0.8], 1e-12);
        close(&tx.w1, &[0.8, -0.6], 1e-12);
        let cross = inner_product(&ch.h2, &tx.w1).unwrap().norm();
        assert!(cross < 1e-12);
    }

    #[test]
    fn transmit_powers_match_request() {
        let ch = ch2(&[0.3, -1.2, 0.5], &[1.1, 0.2, -0.7], 1.0, 1.0);
        for b_eo in [false, true] {
            let tx = transmit_beamformers(&ch, 2.5, 0.75, b_eo, false).unwrap();
            assert!((norm_sq(&tx.w1) - 2.5).abs() < 1e-12);
            assert!((norm_sq(&tx.w2) - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn transmit_zero_channel_errors() {
        let ch = ChannelRealization::new(
            CVector::zeros(2),
            CVector::from_re(&[1.0, 0.0]).unwrap(),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let e = transmit_beamformers(&ch, 1.0, 1.0, false, false);
        assert!(matches!(e, Err(Error::DegenerateChannel(_))));
    }

    #[test]
    fn transmit_parallel_channels_degenerate() {
        let ch = ch2(&[1.0, 1.0], &[2.0, 2.0], 1.0, 1.0);
        let tx = transmit_beamformers(&ch, 1.0, 1.0, true, false).unwrap();
        assert!(tx.degenerate);
        assert!(norm_sq(&tx.w2) < 1e-24);
        // The matched side is untouched.
        assert!((norm_sq(&tx.w1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn receive_orthogonal_unit_channels() {
        let ch = ch2(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        let rx = receive_beamformers(&ch, false).unwrap();
        close(&rx.v1, &[1.0, 0.0], 1e-12);
        close(&rx.v2, &[0.0, 1.0], 1e-12);
    }

    #[test]
    fn receive_order_zero() {
        let ch = ch2(&[1.0, 0.0], &[0.6, 0.8], 1.0, 1.0);
        let rx = receive_beamformers(&ch, false).unwrap();
        close(&rx.v1, &[1.0, 0.0], 1e-12);
        close(&rx.v2, &[0.0, 1.0], 1e-12);
        assert!((norm_sq(&rx.v1) - 1.0).abs() < 1e-12);
        assert!((norm_sq(&rx.v2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn receive_order_one() {
        let ch = ch2(&[1.0, 0.0], &[0.6, 0.8], 1.0, 1.0);
        let rx = receive_beamformers(&ch, true).unwrap();
        close(&rx.v1, &[0.8, -0.6], 1e-12);
        close(&rx.v2, &[0.6, 0.8], 1e-12);
    }

    #[test]
    fn effective_gains_orthogonal_unit_channels() {
        let ch = ch2(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0);
        for orders in OrderPair::ALL {
            let g = effective_gains(&ch, orders, false);
            assert!((g.g1 - 1.0).abs() < 1e-12);
            assert!((g.g2 - 1.0).abs() < 1e-12);
            assert!((g.f1 - 1.0).abs() < 1e-12);
            assert!((g.f2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_gains_receive_side() {
        let ch = ch2(&[1.0, 0.0], &[0.6, 0.8], 1.0, 1.0);
        let g0 = effective_gains(&ch, OrderPair::new(false, false), false);
        assert!((g0.f1 - 1.0).abs() < 1e-12);
        assert!((g0.f2 - 0.64).abs() < 1e-12);
        let g1 = effective_gains(&ch, OrderPair::new(false, true), false);
        assert!((g1.f1 - 0.64).abs() < 1e-12);
        assert!((g1.f2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn effective_gains_match_constructed_beamformers() {
        let model = ChannelModel::real_unit();
        for t in 0..20 {
            let ch = sample_channels(&mut trial_rng(200, t), 4, &model).unwrap();
            for orders in OrderPair::ALL {
                let g = effective_gains(&ch, orders, false);
                let tx = transmit_beamformers(&ch, 2.0, 3.0, orders.b_eo, false).unwrap();
                let rx = receive_beamformers(&ch, orders.b_do).unwrap();
                let g1 = inner_product(&ch.h1, &tx.w1).unwrap().norm_sqr() / 2.0;
                let g2 = inner_product(&ch.h2, &tx.w2).unwrap().norm_sqr() / 3.0;
                let f1 = inner_product(&rx.v1, &ch.h1).unwrap().norm_sqr();
                let f2 = inner_product(&rx.v2, &ch.h2).unwrap().norm_sqr();
                assert!((g.g1 - g1).abs() < 1e-9 * g.g1.max(1.0));
                assert!((g.g2 - g2).abs() < 1e-9 * g.g2.max(1.0));
                assert!((g.f1 - f1).abs() < 1e-9 * g.f1.max(1.0));
                assert!((g.f2 - f2).abs() < 1e-9 * g.f2.max(1.0));
            }
        }
    }

    #[test]
    fn strict_mode_swaps_transmit_roles() {
        let ch = ch2(&[1.0, 0.0], &[0.6, 0.8], 1.0, 1.0);
        let normal = effective_gains(&ch, OrderPair::new(true, false), false);
        let strict = effective_gains(&ch, OrderPair::new(false, false), true);
        assert_eq!(normal.g1, strict.g1);
        assert_eq!(normal.g2, strict.g2);
        // Under strict labeling the surviving cross term is not nulled.
        let tx = transmit_beamformers(&ch, 1.0, 1.0, true, true).unwrap();
        let cross = inner_product(&ch.h1, &tx.w2).unwrap().norm();
        assert!(cross > 0.1, "strict branches leave interference, got {cross}");
    }

    #[test]
    fn nulling_invariant_random_realizations() {
        let model = ChannelModel::real_unit();
        for t in 0..50 {
            let ch = sample_channels(&mut trial_rng(201, t), 5, &model).unwrap();
            for orders in OrderPair::ALL {
                let set = BeamformerSet::construct(&ch, 1.7, 2.3, orders, false).unwrap();
                let d = nulling_diagnostics(&ch, &set);
                assert!((d.relay1_denominator - 1.0).abs() < 1e-9);
                assert!((d.relay2_denominator - 1.0).abs() < 1e-9);
                let active_cross = if orders.b_do { d.bs_cross_1 } else { d.bs_cross_2 };
                assert!(active_cross <= 1e-12);
            }
        }
    }

    #[test]
    fn projection_identity_on_span() {
        let ch = ch2(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.0, 1.0);
        let w = CVector::from_re(&[0.3, -0.8, 0.0]).unwrap();
        let p = project_to_channel_span(&w, &ch).unwrap();
        close(&p, &[0.3, -0.8, 0.0], 1e-12);
    }

    #[test]
    fn projection_drops_out_of_span_coordinate() {
        let ch = ch2(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.0, 1.0);
        let w = CVector::from_re(&[1.0, 1.0, 1.0]).unwrap();
        let p = project_to_channel_span(&w, &ch).unwrap();
        close(&p, &[1.0, 1.0, 0.0], 1e-12);
    }

    #[test]
    fn projection_of_orthogonal_vector_is_zero() {
        let ch = ch2(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.0, 1.0);
        let w = CVector::from_re(&[0.0, 0.0, 2.0]).unwrap();
        let p = project_to_channel_span(&w, &ch).unwrap();
        assert!(norm_sq(&p) < 1e-24);
    }

    #[test]
    fn projection_preserves_channel_inner_products() {
        let model = ChannelModel::complex_unit();
        for t in 0..50 {
            let ch = sample_channels(&mut trial_rng(202, t), 5, &model).unwrap();
            let mut rng = trial_rng(203, t);
            let w_ch = sample_channels(&mut rng, 5, &model).unwrap();
            let w = w_ch.h1;
            let p = project_to_channel_span(&w, &ch).unwrap();
            let scale = norm_sq(&w).sqrt();
            for h in [&ch.h1, &ch.h2] {
                let before = inner_product(h, &w).unwrap();
                let after = inner_product(h, &p).unwrap();
                assert!((before - after).norm() <= 1e-12 * scale * norm_sq(h).sqrt());
            }
            assert!(norm_sq(&p) <= norm_sq(&w) * (1.0 + 1e-12));
            // Projecting twice equals projecting once.
            let pp = project_to_channel_span(&p, &ch).unwrap();
            let diff: f64 = p
                .iter()
                .zip(pp.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            assert!(diff.sqrt() <= 1e-12 * scale);
        }
    }
}
