//! Clustered SNN inference workloads: per-synapse spike counts per image,
//! optional spike trains, and the inter-spike-interval metric.
//!
//! Real clustered applications are not part of the artifact; the generator
//! synthesizes workloads with controllable spike-count structure instead.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spike activity of one synapse over one inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynapseActivity {
    pub id: u64,
    /// Spikes propagated through this synapse per inferred image.
    pub spikes_per_image: u64,
    /// Optional firing times in seconds, strictly increasing within the
    /// cluster window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

/// One crossbar-sized cluster of synapses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteredWorkload {
    pub cluster_id: String,
    /// Observation window [0, T] for spike trains, seconds.
    pub window_seconds: f64,
    pub synapses: Vec<SynapseActivity>,
}

impl ClusteredWorkload {
    pub fn len(&self) -> usize {
        self.synapses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synapses.is_empty()
    }

    /// Checks id uniqueness, train ordering, window containment and the
    /// count/train consistency, naming the offending synapse on failure.
    pub fn validate(&self) -> Result<()> {
        if !(self.window_seconds > 0.0) {
            return Err(Error::Config(format!(
                "window must be positive, got {}",
                self.window_seconds
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(self.synapses.len());
        for syn in &self.synapses {
            if !seen.insert(syn.id) {
                return Err(Error::Workload {
                    synapse_id: syn.id,
                    reason: "duplicate synapse id".into(),
                });
            }
            if let Some(times) = &syn.times {
                if times.len() as u64 != syn.spikes_per_image {
                    return Err(Error::Workload {
                        synapse_id: syn.id,
                        reason: format!(
                            "spike train has {} entries but spikes_per_image is {}",
                            times.len(),
                            syn.spikes_per_image
                        ),
                    });
                }
                for pair in times.windows(2) {
                    if !(pair[1] > pair[0]) {
                        return Err(Error::Workload {
                            synapse_id: syn.id,
                            reason: format!(
                                "spike times not strictly increasing ({} then {})",
                                pair[0], pair[1]
                            ),
                        });
                    }
                }
                if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
                    if first < 0.0 || last > self.window_seconds {
                        return Err(Error::Workload {
                            synapse_id: syn.id,
                            reason: format!(
                                "spike times [{first}, {last}] leave the window [0, {}]",
                                self.window_seconds
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("workload serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let w: ClusteredWorkload = serde_json::from_str(s)?;
        w.validate()?;
        Ok(w)
    }

    /// CSV export: one `(synapse_id, spikes_per_image)` row per synapse.
    pub fn spikes_csv(&self) -> String {
        let mut out = String::from("synapse_id,spikes_per_image\n");
        for syn in &self.synapses {
            out.push_str(&format!("{},{}\n", syn.id, syn.spikes_per_image));
        }
        out
    }
}

/// Average inter-spike interval of a sorted firing-time train:
/// the mean of consecutive gaps, `sum(t_i - t_{i-1}) / (K - 1)`.
pub fn average_isi(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::UndefinedMetric(format!(
            "average ISI needs at least two spikes, got {}",
            times.len()
        )));
    }
    let k = times.len();
    let sum: f64 = times.windows(2).map(|p| p[1] - p[0]).sum();
    Ok(sum / (k - 1) as f64)
}

/// Spike-count distribution for the synthetic workload generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpikeDistribution {
    /// Counts drawn uniformly from `lo..=hi`.
    Uniform { lo: u64, hi: u64 },
    /// Counts drawn as round(exp(mu + sigma * z)), z standard normal.
    LogNormal { mu: f64, sigma: f64 },
    /// Zipf rank-frequency profile: the rank-k synapse propagates
    /// `max(1, round((base / k)^exponent))` spikes, with ranks assigned to
    /// synapses by a seeded shuffle. Larger exponents steepen the profile,
    /// concentrating traffic on the hottest synapses.
    Zipf { exponent: f64, base: f64 },
}

/// Default Zipf base rate: with exponents near one the hottest synapse stays
/// within the endurance spread of a parasitic crossbar, which is the regime
/// where placement quality matters.
pub const DEFAULT_ZIPF_BASE: f64 = 6.0;

impl SpikeDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpikeDistribution::Uniform { lo, hi } => {
                if lo > hi {
                    return Err(Error::Config(format!(
                        "uniform bounds inverted: {lo} > {hi}"
                    )));
                }
            }
            SpikeDistribution::LogNormal { sigma, .. } => {
                if !(sigma >= 0.0) {
                    return Err(Error::Config(format!(
                        "lognormal sigma must be non-negative, got {sigma}"
                    )));
                }
            }
            SpikeDistribution::Zipf { exponent, base } => {
                if !(exponent > 0.0) || !(base >= 1.0) {
                    return Err(Error::Config(format!(
                        "zipf needs exponent > 0 and base >= 1, got {exponent} and {base}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SpikeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpikeDistribution::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            SpikeDistribution::LogNormal { mu, sigma } => write!(f, "lognormal:{mu}:{sigma}"),
            SpikeDistribution::Zipf { exponent, base } => write!(f, "zipf:{exponent}:{base}"),
        }
    }
}

impl FromStr for SpikeDistribution {
    type Err = Error;

    /// Parses `uniform:LO:HI`, `lognormal:MU:SIGMA`, `zipf:EXPONENT` or
    /// `zipf:EXPONENT:BASE`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("cannot parse spike distribution {s:?}"));
        let dist = match parts.as_slice() {
            ["uniform", lo, hi] => SpikeDistribution::Uniform {
                lo: lo.parse().map_err(|_| bad())?,
                hi: hi.parse().map_err(|_| bad())?,
            },
            ["lognormal", mu, sigma] => SpikeDistribution::LogNormal {
                mu: mu.parse().map_err(|_| bad())?,
                sigma: sigma.parse().map_err(|_| bad())?,
            },
            ["zipf", exponent] => SpikeDistribution::Zipf {
                exponent: exponent.parse().map_err(|_| bad())?,
                base: DEFAULT_ZIPF_BASE,
            },
            ["zipf", exponent, base] => SpikeDistribution::Zipf {
                exponent: exponent.parse().map_err(|_| bad())?,
                base: base.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Synthesizes a cluster workload with `n_synapses` synapses whose spike
/// counts follow `dist`. Reproducible: a fixed `(n_synapses, dist, seed)`
/// triple always yields the identical workload.
pub fn generate_workload(
    n_synapses: usize,
    dist: &SpikeDistribution,
    seed: u64,
) -> Result<ClusteredWorkload> {
    dist.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts: Vec<u64> = match *dist {
        SpikeDistribution::Uniform { lo, hi } => (0..n_synapses)
            .map(|_| rng.gen_range(lo..=hi))
            .collect(),
        SpikeDistribution::LogNormal { mu, sigma } => (0..n_synapses)
            .map(|_| {
                let z = standard_normal(&mut rng);
                (mu + sigma * z).exp().round().max(0.0) as u64
            })
            .collect(),
        SpikeDistribution::Zipf { exponent, base } => {
            let mut profile: Vec<u64> = (1..=n_synapses)
                .map(|k| ((base / k as f64).powf(exponent)).round().max(1.0) as u64)
                .collect();
            profile.shuffle(&mut rng);
            profile
        }
    };
    let workload = ClusteredWorkload {
        cluster_id: format!("synthetic-{dist}-seed{seed}"),
        window_seconds: 1.0,
        synapses: counts
            .into_iter()
            .enumerate()
            .map(|(i, spikes)| SynapseActivity {
                id: i as u64,
                spikes_per_image: spikes,
                times: None,
            })
            .collect(),
    };
    workload.validate()?;
    Ok(workload)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 drawn from (0, 1]
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn load_workload(path: impl AsRef<Path>) -> Result<ClusteredWorkload> {
    let text = std::fs::read_to_string(path)?;
    ClusteredWorkload::from_json_str(&text)
}

pub fn save_workload(workload: &ClusteredWorkload, path: impl AsRef<Path>) -> Result<()> {
    workload.validate()?;
    crate::io::write_atomic(path, workload.to_json_string().as_bytes())
}
