//! Read-disturbance kinetics: stress voltage to time-to-disturb to
//! read-endurance cycles to inference lifetime.
//!
//! An HRS cell disturbs when its conductive-filament gap, driven by the
//! field-accelerated growth law, collapses from its initial value to a
//! configurable threshold. LRS cells follow a measured exponential law in the
//! applied voltage. Both disturb times convert to endurance by counting how
//! many spike pulses fit before the crossing, and endurance divides by
//! per-image spike counts to give the inference lifetime.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{CellStateMatrix, ResistanceState, SolveResult};
use crate::error::{Error, Result};

/// Boltzmann constant in eV/K; with energies in eV and voltages in volts the
/// elementary charge drops out as q = 1.
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;

/// Default integration horizon: crossings beyond this are reported as
/// "exceeds horizon" rather than integrated further.
pub const DEFAULT_HORIZON_S: f64 = 1e12;

/// Physical constants of the filament-gap growth law plus process metadata.
///
/// The defaults are representative HfO2 values for desk-scale exploration,
/// not measured data; every field is overridable from the technology config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TechnologyParams {
    /// Filament growth velocity prefactor, m/s.
    pub v0: f64,
    /// Activation energy, eV.
    pub e_a: f64,
    /// Operating temperature, K.
    pub temperature: f64,
    /// Boltzmann constant, eV/K.
    pub k_boltzmann: f64,
    /// Atomic hopping distance, m.
    pub a0: f64,
    /// Oxide (switching layer) thickness, m.
    pub oxide_thickness: f64,
    /// Elementary charge in the chosen unit system; 1 when voltages are in
    /// volts and kT in eV.
    pub q_charge: f64,
    /// Field-enhancement base factor.
    pub gamma0: f64,
    /// Field-enhancement gap sensitivity.
    pub beta: f64,
    /// Initial filament gap, m.
    pub g0: f64,
    /// Gap threshold at which the HRS state is declared disturbed, m.
    pub g_min: f64,
    /// Process feature size, nm.
    pub feature_size: f64,
    /// Integration horizon, s.
    pub horizon_s: f64,
}

impl Default for TechnologyParams {
    fn default() -> Self {
        TechnologyParams {
            v0: 10.0,
            e_a: 0.6,
            temperature: 300.0,
            k_boltzmann: BOLTZMANN_EV_PER_K,
            a0: 0.25e-9,
            oxide_thickness: 5.0e-9,
            q_charge: 1.0,
            gamma0: 16.5,
            beta: 1.25,
            g0: 2.0e-9,
            g_min: 0.1e-9,
            feature_size: 65.0,
            horizon_s: DEFAULT_HORIZON_S,
        }
    }
}

impl TechnologyParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v0", self.v0),
            ("activation energy", self.e_a),
            ("temperature", self.temperature),
            ("Boltzmann constant", self.k_boltzmann),
            ("hopping distance", self.a0),
            ("oxide thickness", self.oxide_thickness),
            ("q", self.q_charge),
            ("gamma0", self.gamma0),
            ("beta", self.beta),
            ("initial gap", self.g0),
            ("disturb gap", self.g_min),
            ("feature size", self.feature_size),
            ("horizon", self.horizon_s),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.g_min >= self.g0 {
            return Err(Error::Config(format!(
                "disturb gap {} must be below the initial gap {}",
                self.g_min, self.g0
            )));
        }
        Ok(())
    }

    /// Thermal energy kT in eV.
    pub fn kt(&self) -> f64 {
        self.k_boltzmann * self.temperature
    }
}

/// Rate of change of the filament gap, m/s (negative: the gap shrinks under
/// positive stress). The local field enhancement weakens as the gap grows:
/// gamma = gamma0 - beta (g/g0)^3.
pub fn gap_rate(g: f64, v: f64, p: &TechnologyParams) -> Result<f64> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::Domain(format!(
            "filament gap must be positive, got {g}"
        )));
    }
    if v < 0.0 {
        return Err(Error::Domain(format!(
            "stress voltage must be non-negative, got {v}"
        )));
    }
    let kt = p.kt();
    let gamma = p.gamma0 - p.beta * (g / p.g0).powi(3);
    let arg = gamma * p.a0 / p.oxide_thickness * (p.q_charge * v / kt);
    let prefactor = p.v0 * (-p.e_a / kt).exp();
    Ok(-prefactor * stable_sinh(arg))
}

/// sinh that saturates to +-inf instead of producing NaN for huge arguments.
fn stable_sinh(x: f64) -> f64 {
    if x.abs() > 700.0 {
        // e^x / 2 overflows past ~709.7; the sign is all that matters then
        f64::INFINITY * x.signum()
    } else {
        x.sinh()
    }
}

/// Outcome of an HRS disturb-time integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisturbTime {
    /// The gap crossed the disturb threshold after this many seconds.
    Crossed(f64),
    /// No crossing within the configured horizon.
    ExceedsHorizon,
}

impl DisturbTime {
    /// The crossing time, with horizon-limited results reported as the
    /// horizon itself (a conservative lower bound).
    pub fn seconds_or_horizon(self, horizon: f64) -> f64 {
        match self {
            DisturbTime::Crossed(t) => t,
            DisturbTime::ExceedsHorizon => horizon,
        }
    }

    pub fn is_crossed(self) -> bool {
        matches!(self, DisturbTime::Crossed(_))
    }
}

// Adaptive RK4 with step-doubling error control.
const STEP_RELATIVE_ERROR: f64 = 1e-6;
const CROSSING_RELATIVE_WIDTH: f64 = 1e-3;

fn rk4_step(g: f64, v: f64, h: f64, p: &TechnologyParams) -> Result<f64> {
    let f = |gap: f64| -> Result<f64> {
        // the integrator may probe slightly past the threshold
        gap_rate(gap.max(1e-3 * p.g_min), v, p)
    };
    let k1 = f(g)?;
    let k2 = f(g + 0.5 * h * k1)?;
    let k3 = f(g + 0.5 * h * k2)?;
    let k4 = f(g + h * k3)?;
    Ok(g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Time for an HRS cell under constant stress `v` to close its filament gap
/// from `g0` down to `g_min`.
///
/// Integrates the gap law with an adaptive fourth-order scheme (step doubling,
/// relative error 1e-6 per step) and brackets the threshold crossing to 0.1%
/// by bisecting the final step. Stress below the level that crosses within
/// `horizon_s` seconds reports [`DisturbTime::ExceedsHorizon`].
pub fn time_to_disturb_hrs(v: f64, p: &TechnologyParams, horizon_s: f64) -> Result<DisturbTime> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!(
            "stress voltage must be positive, got {v}"
        )));
    }
    p.validate()?;
    if !(horizon_s > 0.0) {
        return Err(Error::Config(format!(
            "horizon must be positive, got {horizon_s}"
        )));
    }

    let span = p.g0 - p.g_min;
    let rate0 = gap_rate(p.g0, v, p)?;
    if rate0.is_infinite() {
        // stress so large the gap collapses within any measurable pulse
        return Ok(DisturbTime::Crossed(0.0));
    }
    if rate0 == 0.0 || span / -rate0 > 1e3 * horizon_s {
        return Ok(DisturbTime::ExceedsHorizon);
    }

    let tol = STEP_RELATIVE_ERROR * span;
    let mut g = p.g0;
    let mut t = 0.0;
    let mut h = 0.01 * span / -rate0;

    loop {
        if t > horizon_s {
            return Ok(DisturbTime::ExceedsHorizon);
        }
        let full = rk4_step(g, v, h, p)?;
        let half = rk4_step(g, v, 0.5 * h, p)?;
        let two_half = rk4_step(half, v, 0.5 * h, p)?;
        let err = (two_half - full).abs() / 15.0;
        if err > tol {
            h *= (0.9 * (tol / err).powf(0.2)).max(0.1);
            continue;
        }
        let g_next = two_half + (two_half - full) / 15.0;
        if g_next <= p.g_min {
            // bisect the step length until the crossing is bracketed to 0.1%
            let (mut lo, mut hi) = (0.0, h);
            while (hi - lo) > CROSSING_RELATIVE_WIDTH * (t + 0.5 * (lo + hi)).max(f64::MIN_POSITIVE)
            {
                let mid = 0.5 * (lo + hi);
                let probe = rk4_step(g, v, mid, p)?;
                if probe <= p.g_min {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(DisturbTime::Crossed(t + 0.5 * (lo + hi)));
        }
        g = g_next;
        t += h;
        if err > 0.0 {
            h *= (0.9 * (tol / err).powf(0.2)).min(2.0);
        } else {
            h *= 2.0;
        }
    }
}

/// Time for an LRS cell to disturb under stress `v`:
/// t = 10^(-14.7 v + 6.7) seconds.
pub fn time_to_disturb_lrs(v: f64) -> f64 {
    10f64.powf(-14.7 * v + 6.7)
}

/// Read endurance: how many pulses of `pulse_width` seconds fit before the
/// disturb time elapses.
pub fn endurance_cycles(t_disturb: f64, pulse_width: f64) -> Result<u64> {
    if !(t_disturb > 0.0) || !(pulse_width > 0.0) {
        return Err(Error::Domain(format!(
            "disturb time and pulse width must be positive, got {t_disturb} and {pulse_width}"
        )));
    }
    let cycles = (t_disturb / pulse_width).floor();
    if cycles >= u64::MAX as f64 {
        Ok(u64::MAX)
    } else {
        Ok(cycles as u64)
    }
}

/// Inference count supported by a cell, or unbounded for synapses that never
/// fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lifetime {
    /// Finite lifetime in inferred images.
    Images(u64),
    /// The synapse propagates no spikes, so its cell is never disturbed.
    Unbounded,
}

impl Lifetime {
    pub fn images(self) -> Option<u64> {
        match self {
            Lifetime::Images(n) => Some(n),
            Lifetime::Unbounded => None,
        }
    }
}

impl std::fmt::Display for Lifetime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lifetime::Images(n) => write!(f, "{n}"),
            Lifetime::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Inference lifetime in images: read endurance divided by spikes per image,
/// floored. Zero spikes means the cell is never read-stressed.
pub fn inference_lifetime(endurance_cycles: u64, spikes_per_image: u64) -> Lifetime {
    if spikes_per_image == 0 {
        Lifetime::Unbounded
    } else {
        Lifetime::Images(endurance_cycles / spikes_per_image)
    }
}

/// Per-cell read endurance for one crossbar.
#[derive(Debug, Clone)]
pub struct EnduranceMap {
    /// Endurance in read cycles per cell.
    pub cycles: Array2<u64>,
    /// Underlying disturb times, seconds (horizon-capped).
    pub disturb_time: Array2<f64>,
    /// Spike pulse width used for the cycle conversion, seconds.
    pub pulse_width: f64,
}

impl EnduranceMap {
    pub fn n(&self) -> usize {
        self.cycles.nrows()
    }

    /// Cell with the shortest disturb time.
    pub fn weakest_cell(&self) -> (usize, usize) {
        argmin(&self.disturb_time)
    }

    /// Cell with the longest disturb time.
    pub fn strongest_cell(&self) -> (usize, usize) {
        argmax(&self.disturb_time)
    }
}

fn argmin(a: &Array2<f64>) -> (usize, usize) {
    let mut best = (0, 0);
    for ((r, c), &v) in a.indexed_iter() {
        if v < a[best] {
            best = (r, c);
        }
    }
    best
}

fn argmax(a: &Array2<f64>) -> (usize, usize) {
    let mut best = (0, 0);
    for ((r, c), &v) in a.indexed_iter() {
        if v > a[best] {
            best = (r, c);
        }
    }
    best
}

/// Converts a solved voltage map into per-cell read endurance.
///
/// Dispatches on the programmed state: HRS cells integrate the gap law, LRS
/// cells evaluate the exponential law. Cells with their access transistor off
/// see no stress and saturate at the horizon. Each cell is independent, so the
/// map evaluates in parallel.
pub fn endurance_map(
    solve: &SolveResult,
    cells: &CellStateMatrix,
    p: &TechnologyParams,
    pulse_width: f64,
) -> Result<EnduranceMap> {
    let n = solve.n();
    if cells.n() != n {
        return Err(Error::Dimension(format!(
            "solve result is {n}x{n} but cell matrix is {0}x{0}",
            cells.n()
        )));
    }
    if !(pulse_width > 0.0) {
        return Err(Error::Config(format!(
            "pulse width must be positive, got {pulse_width}"
        )));
    }
    p.validate()?;

    let indexed: Vec<(usize, usize)> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .collect();
    let times: Vec<f64> = indexed
        .par_iter()
        .map(|&(row, col)| -> Result<f64> {
            let v = solve.cell_voltage[(row, col)];
            if v < 0.0 {
                return Err(Error::Domain(format!(
                    "negative stress voltage {v:.3e} V at cell ({row}, {col}); \
                     endurance maps expect a forward-biased solve"
                )));
            }
            if !cells.is_selected(row, col) {
                return Ok(p.horizon_s);
            }
            let t = match cells.state(row, col) {
                ResistanceState::Hrs => {
                    if v == 0.0 {
                        p.horizon_s
                    } else {
                        time_to_disturb_hrs(v, p, p.horizon_s)?.seconds_or_horizon(p.horizon_s)
                    }
                }
                _ => time_to_disturb_lrs(v).min(p.horizon_s),
            };
            Ok(t)
        })
        .collect::<Result<Vec<f64>>>()?;

    let disturb_time = Array2::from_shape_vec((n, n), times)
        .expect("index enumeration matches matrix shape");
    let cycles = disturb_time.mapv(|t| {
        let c = (t / pulse_width).floor();
        if c >= u64::MAX as f64 {
            u64::MAX
        } else {
            c as u64
        }
    });
    Ok(EnduranceMap {
        cycles,
        disturb_time,
        pulse_width,
    })
}
