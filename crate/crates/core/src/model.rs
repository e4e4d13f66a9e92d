//! Network instance data model: fading channels, per-device power budgets,
//! the binary encoding/decoding order flags, and seeded channel generation.
//!
//! Noise power is fixed at 1 everywhere; all SINR formulas in the crate are
//! noise-normalized, so no noise field exists anywhere.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::CVector;

/// One quasi-static fading realization of the four links.
///
/// `h1`, `h2` are the length-`M` vector channels between the multi-antenna
/// basestation and the two single-antenna relays; `h3`, `h4` the scalar
/// channels between each relay and its user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h1: CVector,
    pub h2: CVector,
    pub h3: Complex64,
    pub h4: Complex64,
}

impl ChannelRealization {
    /// Validates `M >= 2`, equal vector lengths, finite scalars.
    pub fn new(h1: CVector, h2: CVector, h3: Complex64, h4: Complex64) -> Result<Self> {
        if h1.len() < 2 {
            return Err(Error::InvalidModel(format!(
                "antenna count must be at least 2, got {}",
                h1.len()
            )));
        }
        if h1.len() != h2.len() {
            return Err(Error::DimensionMismatch {
                expected: h1.len(),
                got: h2.len(),
            });
        }
        for (name, s) in [("h3", h3), ("h4", h4)] {
            if !s.re.is_finite() || !s.im.is_finite() {
                return Err(Error::InvalidModel(format!("{name} is not finite")));
            }
        }
        Ok(Self { h1, h2, h3, h4 })
    }

    /// Antenna count `M` of the basestation.
    pub fn antenna_count(&self) -> usize {
        self.h1.len()
    }
}

/// Maximum transmit powers of the five devices (linear scale, noise power 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    pub p_bs_max: f64,
    pub p_r1_max: f64,
    pub p_r2_max: f64,
    pub p_u1_max: f64,
    pub p_u2_max: f64,
}

impl PowerBudget {
    pub fn new(p_bs: f64, p_r1: f64, p_r2: f64, p_u1: f64, p_u2: f64) -> Result<Self> {
        for (name, v) in [
            ("p_bs_max", p_bs),
            ("p_r1_max", p_r1),
            ("p_r2_max", p_r2),
            ("p_u1_max", p_u1),
            ("p_u2_max", p_u2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(Self {
            p_bs_max: p_bs,
            p_r1_max: p_r1,
            p_r2_max: p_r2,
            p_u1_max: p_u1,
            p_u2_max: p_u2,
        })
    }

    pub fn zero() -> Self {
        Self {
            p_bs_max: 0.0,
            p_r1_max: 0.0,
            p_r2_max: 0.0,
            p_u1_max: 0.0,
            p_u2_max: 0.0,
        }
    }
}

/// Relative power scaling used by the sweeps: the basestation gets `P`,
/// each relay `P/2`, each user `P/4`.
pub fn budget_from_p(p: f64) -> Result<PowerBudget> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "power parameter must be finite and non-negative, got {p}"
        )));
    }
    PowerBudget::new(p, 0.5 * p, 0.5 * p, 0.25 * p, 0.25 * p)
}

/// The two binary protocol order flags.
///
/// `b_eo`: encoding order at the basestation (`true` means message m1 is
/// encoded first, so the interference surviving at relay 1 is the one that
/// must be nulled). `b_do`: decoding order at the basestation in the
/// downlink (`true` means the codeword carrying m3 is decoded first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderPair {
    pub b_eo: bool,
    pub b_do: bool,
}

impl OrderPair {
    pub fn new(b_eo: bool, b_do: bool) -> Self {
        Self { b_eo, b_do }
    }

    /// All four order pairs in lexicographic `(b_eo, b_do)` order; used for
    /// enumeration and deterministic tie-breaking.
    pub const ALL: [OrderPair; 4] = [
        OrderPair { b_eo: false, b_do: false },
        OrderPair { b_eo: false, b_do: true },
        OrderPair { b_eo: true, b_do: false },
        OrderPair { b_eo: true, b_do: true },
    ];
}

/// Fading distribution for channel entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaussianKind {
    /// Real zero-mean Gaussian entries (imaginary parts zero).
    Real,
    /// Circularly-symmetric complex Gaussian entries; real and imaginary
    /// parts each carry half the variance.
    ComplexCircular,
}

/// Channel model: distribution kind plus per-entry variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub kind: GaussianKind,
    pub variance: f64,
}

impl ChannelModel {
    pub fn new(kind: GaussianKind, variance: f64) -> Result<Self> {
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "variance must be finite and positive, got {variance}"
            )));
        }
        Ok(Self { kind, variance })
    }

    /// Real Gaussian, unit variance — the default used by the sweeps.
    pub fn real_unit() -> Self {
        Self {
            kind: GaussianKind::Real,
            variance: 1.0,
        }
    }

    /// Complex circular Gaussian, unit variance.
    pub fn complex_unit() -> Self {
        Self {
            kind: GaussianKind::ComplexCircular,
            variance: 1.0,
        }
    }
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self::real_unit()
    }
}

/// Deterministic per-trial random stream.
///
/// The master seed selects the key, the trial index selects the stream, so
/// trials can be sampled independently (and in parallel) while replaying
/// bit-identically for a fixed `(seed, trial)`. The library never reads
/// ambient entropy.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draw one channel realization.
///
/// Draw order is fixed: the `M` entries of `h1`, then `h2`, then `h3`, `h4`.
pub fn sample_channels<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    model: &ChannelModel,
) -> Result<ChannelRealization> {
    if m < 2 {
        return Err(Error::InvalidModel(format!(
            "antenna count must be at least 2, got {m}"
        )));
    }
    let draw = |rng: &mut R| -> Complex64 {
        match model.kind {
            GaussianKind::Real => {
                let x: f64 = StandardNormal.sample(rng);
                Complex64::new(model.variance.sqrt() * x, 0.0)
            }
            GaussianKind::ComplexCircular => {
                let s = (0.5 * model.variance).sqrt();
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(s * re, s * im)
            }
        }
    };
    let h1 = CVector::new((0..m).map(|_| draw(rng)).collect())?;
    let h2 = CVector::new((0..m).map(|_| draw(rng)).collect())?;
    let h3 = draw(rng);
    let h4 = draw(rng);
    ChannelRealization::new(h1, h2, h3, h4)
}

/// Flat serialization of a [`ChannelRealization`], the schema of the CLI's
/// `--channels-file` option.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelsDoc {
    pub m: usize,
    pub h1_re: Vec<f64>,
    pub h1_im: Vec<f64>,
    pub h2_re: Vec<f64>,
    pub h2_im: Vec<f64>,
    pub h3_re: f64,
    pub h3_im: f64,
    pub h4_re: f64,
    pub h4_im: f64,
}

impl ChannelsDoc {
    pub fn from_realization(ch: &ChannelRealization) -> Self {
        let split = |v: &CVector| -> (Vec<f64>, Vec<f64>) {
            (
                v.iter().map(|c| c.re).collect(),
                v.iter().map(|c| c.im).collect(),
            )
        };
        let (h1_re, h1_im) = split(&ch.h1);
        let (h2_re, h2_im) = split(&ch.h2);
        Self {
            m: ch.antenna_count(),
            h1_re,
            h1_im,
            h2_re,
            h2_im,
            h3_re: ch.h3.re,
            h3_im: ch.h3.im,
            h4_re: ch.h4.re,
            h4_im: ch.h4.im,
        }
    }

    pub fn to_realization(&self) -> Result<ChannelRealization> {
        for (field, v) in [
            ("h1_re", &self.h1_re),
            ("h1_im", &self.h1_im),
            ("h2_re", &self.h2_re),
            ("h2_im", &self.h2_im),
        ] {
            if v.len() != self.m {
                return Err(Error::ChannelsFile(format!(
                    "field {field} has length {}, expected m = {}",
                    v.len(),
                    self.m
                )));
            }
        }
        let h1 = CVector::from_parts(&self.h1_re, &self.h1_im)
            .map_err(|e| Error::ChannelsFile(format!("h1: {e}")))?;
        let h2 = CVector::from_parts(&self.h2_re, &self.h2_im)
            .map_err(|e| Error::ChannelsFile(format!("h2: {e}")))?;
        ChannelRealization::new(
            h1,
            h2,
            Complex64::new(self.h3_re, self.h3_im),
            Complex64::new(self.h4_re, self.h4_im),
        )
        .map_err(|e| Error::ChannelsFile(e.to_string()))
    }

    /// Parse from JSON; serde errors keep their line/column information.
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::ChannelsFile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}
