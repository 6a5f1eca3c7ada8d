use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::coincidence::{sort_tags, CoincidenceConfig, TimeTag};
use super::SourceError;

/// Parameters of the simulated entangled-pair source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub theta: f64,
    pub phi: f64,
    /// Probability that a pair shows up as HH (channels 1 and 4).
    pub noise_hh: f64,
    /// Probability that a pair shows up as VV (channels 2 and 3).
    pub noise_vv: f64,
    /// Pairs per second.
    pub pair_rate: f64,
    /// Dark counts per second on each channel.
    pub dark_rate: f64,
    /// Standard deviation of detector timing jitter, in nanoseconds.
    pub jitter: f64,
}

impl Default for StateParams {
    fn default() -> Self {
        StateParams {
            theta: FRAC_PI_4,
            phi: 0.0,
            noise_hh: 0.0,
            noise_vv: 0.0,
            pair_rate: 100_000.0,
            dark_rate: 0.0,
            jitter: 0.0,
        }
    }
}

impl StateParams {
    pub fn with_theta(theta: f64) -> Self {
        StateParams {
            theta,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SourceError> {
        let bad = |m: &str| Err(SourceError::InvalidParams(m.to_string()));
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return bad("theta must lie in [0, pi/2]");
        }
        if !self.phi.is_finite() {
            return bad("phi must be finite");
        }
        if !(self.noise_hh >= 0.0 && self.noise_vv >= 0.0 && self.noise_hh + self.noise_vv < 1.0) {
            return bad("noise probabilities must be non-negative and sum below 1");
        }
        for (name, v) in [
            ("pair_rate", self.pair_rate),
            ("dark_rate", self.dark_rate),
            ("jitter", self.jitter),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SourceError::InvalidParams(format!("{name} must be finite and non-negative")));
            }
        }
        Ok(())
    }

    /// Channel-pair probabilities `[(2,4), (1,3), (1,4), (2,3)]`.
    fn pair_weights(&self) -> [f64; 4] {
        let clean = 1.0 - self.noise_hh - self.noise_vv;
        let c2 = self.theta.cos().powi(2);
        [c2 * clean, (1.0 - c2) * clean, self.noise_hh, self.noise_vv]
    }
}

/// Concurrence of the pure state `cos θ |HV⟩ + e^{iφ} sin θ |VH⟩`.
pub fn concurrence_pure(theta: f64) -> f64 {
    (2.0 * theta).sin().abs()
}

const CHANNEL_PAIRS: [(u8, u8); 4] = [(2, 4), (1, 3), (1, 4), (2, 3)];

/// Synthetic four-channel time tags for `duration` seconds.
///
/// Pair emission is a homogeneous Poisson process; each pair lands on one
/// of the channel pairs of [`StateParams::pair_weights`], each tag shifted
/// by independent Gaussian jitter. Dark counts are independent Poisson
/// processes per channel. The result is sorted by time, then channel.
pub fn generate_timetags(params: &StateParams, duration: f64, seed: u64) -> Result<Vec<TimeTag>, SourceError> {
    params.validate()?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(SourceError::InvalidParams("duration must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let end_ns = duration * 1e9;
    let weights = params.pair_weights();
    let jitter = if params.jitter > 0.0 {
        Some(Normal::new(0.0, params.jitter).map_err(|e| SourceError::InvalidParams(e.to_string()))?)
    } else {
        None
    };
    let stamp = |t: f64, rng: &mut ChaCha8Rng| -> u64 {
        let dt = jitter.as_ref().map_or(0.0, |n| n.sample(rng));
        (t + dt).round().max(0.0) as u64
    };

    let mut tags = Vec::new();
    if params.pair_rate > 0.0 {
        let gap = Exp::new(params.pair_rate / 1e9).map_err(|e| SourceError::InvalidParams(e.to_string()))?;
        let mut t = 0.0;
        loop {
            t += gap.sample(&mut rng);
            if t > end_ns {
                break;
            }
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut which = 3;
            for (i, w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    which = i;
                    break;
                }
            }
            let (a, b) = CHANNEL_PAIRS[which];
            tags.push(TimeTag::new(a, stamp(t, &mut rng)));
            tags.push(TimeTag::new(b, stamp(t, &mut rng)));
        }
    }
    if params.dark_rate > 0.0 {
        let gap = Exp::new(params.dark_rate / 1e9).map_err(|e| SourceError::InvalidParams(e.to_string()))?;
        for channel in 1..=4u8 {
            let mut t = 0.0;
            loop {
                t += gap.sample(&mut rng);
                if t > end_ns {
                    break;
                }
                tags.push(TimeTag::new(channel, t.round() as u64));
            }
        }
    }
    sort_tags(&mut tags, &CoincidenceConfig::default());
    Ok(tags)
}
