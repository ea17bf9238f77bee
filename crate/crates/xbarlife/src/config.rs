//! Technology and geometry configuration.
//!
//! A single TOML file carries the wire parasitics per process node, the
//! disturbance-kinetics constants, the cell resistance ladder and the cost
//! model. The embedded default profile ships a 65 nm per-segment wire
//! resistance fitted so that the read-path current disparity of a 128x128
//! crossbar equals the published 39.2%; the other nodes scale that single
//! scalar inversely with feature size. Segment capacitances are accepted for
//! completeness but the DC analysis never reads them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::{
    CellStateMatrix, CrossbarGeometry, ResistanceState, StateResistances,
};
use crate::cost::CostModelParams;
use crate::endurance::TechnologyParams;
use crate::error::{Error, Result};

/// The embedded default profile (TOML text).
pub const DEFAULT_CONFIG_TOML: &str = include_str!("default_config.toml");

/// Process nodes with shipped parasitic defaults.
pub const SUPPORTED_NODES_NM: [u32; 4] = [90, 65, 45, 32];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TechnologySection {
    /// Default process node, nm.
    pub node_nm: f64,
    pub temperature_k: f64,
    /// Filament growth velocity prefactor, m/s.
    pub filament_velocity_m_per_s: f64,
    pub activation_energy_ev: f64,
    pub atomic_hop_distance_m: f64,
    pub oxide_thickness_m: f64,
    pub gamma0: f64,
    pub beta: f64,
    pub initial_gap_m: f64,
    pub disturb_gap_m: f64,
    pub disturb_horizon_s: f64,
    /// Per-segment wire resistance by node ("65" fitted, others scaled).
    pub segment_ohm: BTreeMap<String, f64>,
}

impl Default for TechnologySection {
    fn default() -> Self {
        let mut segment_ohm = BTreeMap::new();
        segment_ohm.insert("90".to_string(), 27.681_406);
        segment_ohm.insert("65".to_string(), 38.328_1);
        segment_ohm.insert("45".to_string(), 55.362_811);
        segment_ohm.insert("32".to_string(), 77.853_953);
        TechnologySection {
            node_nm: 65.0,
            temperature_k: 300.0,
            filament_velocity_m_per_s: 10.0,
            activation_energy_ev: 0.6,
            atomic_hop_distance_m: 0.25e-9,
            oxide_thickness_m: 5.0e-9,
            gamma0: 16.5,
            beta: 1.25,
            initial_gap_m: 2.0e-9,
            disturb_gap_m: 0.1e-9,
            disturb_horizon_s: 1.0e12,
            segment_ohm,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossbarSection {
    pub size: usize,
    pub driver_ohm: f64,
    /// Spike amplitude applied by driven pre-synaptic neurons, volts.
    pub v_spike: f64,
    /// Read-current target for spike-voltage calibration, amperes.
    pub read_current_a: f64,
    pub solver_tolerance: f64,
    /// Accepted for completeness; unused by the DC solve.
    pub wordline_segment_farad: f64,
    /// Accepted for completeness; unused by the DC solve.
    pub bitline_segment_farad: f64,
}

impl Default for CrossbarSection {
    fn default() -> Self {
        CrossbarSection {
            size: 128,
            driver_ohm: 100.0,
            v_spike: 0.1,
            read_current_a: 50e-6,
            solver_tolerance: 1e-9,
            wordline_segment_farad: 0.0,
            bitline_segment_farad: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellsSection {
    pub hrs_ohm: f64,
    pub lrs1_ohm: f64,
    pub lrs2_ohm: f64,
    pub lrs3_ohm: f64,
    pub access_ohm: f64,
    pub default_state: String,
    pub pulse_width_s: f64,
}

impl Default for CellsSection {
    fn default() -> Self {
        CellsSection {
            hrs_ohm: 1.0e6,
            lrs1_ohm: 215_443.469,
            lrs2_ohm: 46_415.8883,
            lrs3_ohm: 10_000.0,
            access_ohm: 5_000.0,
            default_state: "lrs3".to_string(),
            pulse_width_s: 1.0e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostSection {
    pub transistors_per_neuron: u32,
    pub capacitors_per_neuron: u32,
    pub bits_per_cell: u32,
    pub transistor_area_f2: f64,
    pub capacitor_area_f2: f64,
    pub nvm_area_f2: f64,
}

impl Default for CostSection {
    fn default() -> Self {
        CostSection {
            transistors_per_neuron: 20,
            capacitors_per_neuron: 1,
            bits_per_cell: 2,
            transistor_area_f2: 1.0,
            capacitor_area_f2: 1.0,
            nvm_area_f2: 1.0,
        }
    }
}

/// Full tool configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub technology: TechnologySection,
    pub crossbar: CrossbarSection,
    pub cells: CellsSection,
    pub cost: CostSection,
}

impl Config {
    /// The embedded default profile.
    pub fn default_profile() -> Self {
        toml::from_str(DEFAULT_CONFIG_TOML).expect("embedded default config must parse")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.state_resistances().validate()?;
        self.technology_params(self.technology.node_nm)?.validate()?;
        self.cost_params(self.technology.node_nm)?.validate()?;
        if !(self.crossbar.solver_tolerance > 0.0) {
            return Err(Error::Config("solver tolerance must be positive".into()));
        }
        if !(self.crossbar.v_spike > 0.0) {
            return Err(Error::Config("spike voltage must be positive".into()));
        }
        if !(self.cells.pulse_width_s > 0.0) {
            return Err(Error::Config("pulse width must be positive".into()));
        }
        if self.crossbar.size < 2 {
            return Err(Error::Config(format!(
                "crossbar size must be at least 2, got {}",
                self.crossbar.size
            )));
        }
        self.default_state()?;
        self.segment_resistance(self.technology.node_nm)?;
        Ok(())
    }

    /// Per-segment wire resistance for a node: the configured table entry if
    /// present, otherwise the 65 nm scalar scaled inversely with feature size.
    pub fn segment_resistance(&self, node_nm: f64) -> Result<f64> {
        if !(node_nm > 0.0) {
            return Err(Error::Config(format!(
                "feature size must be positive, got {node_nm}"
            )));
        }
        let key = format_node(node_nm);
        if let Some(&r) = self.technology.segment_ohm.get(&key) {
            return Ok(r);
        }
        let base = self.technology.segment_ohm.get("65").ok_or_else(|| {
            Error::Config(format!(
                "no segment resistance for node {key} nm and no 65 nm entry to scale from"
            ))
        })?;
        Ok(base * 65.0 / node_nm)
    }

    pub fn geometry(&self, n: usize, node_nm: f64) -> Result<CrossbarGeometry> {
        let r_seg = self.segment_resistance(node_nm)?;
        CrossbarGeometry::new(n, r_seg, r_seg, self.crossbar.driver_ohm)
    }

    pub fn state_resistances(&self) -> StateResistances {
        StateResistances {
            hrs: self.cells.hrs_ohm,
            lrs1: self.cells.lrs1_ohm,
            lrs2: self.cells.lrs2_ohm,
            lrs3: self.cells.lrs3_ohm,
        }
    }

    pub fn default_state(&self) -> Result<ResistanceState> {
        self.cells.default_state.parse()
    }

    /// All cells selected and programmed to one state.
    pub fn uniform_cells(&self, n: usize, state: ResistanceState) -> Result<CellStateMatrix> {
        CellStateMatrix::uniform(n, state, self.state_resistances(), self.cells.access_ohm)
    }

    /// Read-probe cell matrix for path-disparity measurements: only the
    /// shortest-path and longest-path corner cells have their access
    /// transistors on, programmed to the read state.
    pub fn disparity_probe_cells(&self, n: usize) -> Result<CellStateMatrix> {
        CellStateMatrix::read_probe(
            n,
            self.default_state()?,
            self.state_resistances(),
            self.cells.access_ohm,
            &[(n - 1, 0), (0, n - 1)],
        )
    }

    pub fn technology_params(&self, node_nm: f64) -> Result<TechnologyParams> {
        if !(node_nm > 0.0) {
            return Err(Error::Config(format!(
                "feature size must be positive, got {node_nm}"
            )));
        }
        Ok(TechnologyParams {
            v0: self.technology.filament_velocity_m_per_s,
            e_a: self.technology.activation_energy_ev,
            temperature: self.technology.temperature_k,
            k_boltzmann: crate::endurance::BOLTZMANN_EV_PER_K,
            a0: self.technology.atomic_hop_distance_m,
            oxide_thickness: self.technology.oxide_thickness_m,
            q_charge: 1.0,
            gamma0: self.technology.gamma0,
            beta: self.technology.beta,
            g0: self.technology.initial_gap_m,
            g_min: self.technology.disturb_gap_m,
            feature_size: node_nm,
            horizon_s: self.technology.disturb_horizon_s,
        })
    }

    pub fn cost_params(&self, node_nm: f64) -> Result<CostModelParams> {
        if !(node_nm > 0.0) {
            return Err(Error::Config(format!(
                "feature size must be positive, got {node_nm}"
            )));
        }
        Ok(CostModelParams {
            transistors_per_neuron: self.cost.transistors_per_neuron,
            capacitors_per_neuron: self.cost.capacitors_per_neuron,
            bits_per_cell: self.cost.bits_per_cell,
            feature_size: node_nm,
            transistor_area: self.cost.transistor_area_f2,
            capacitor_area: self.cost.capacitor_area_f2,
            nvm_area: self.cost.nvm_area_f2,
        })
    }
}

fn format_node(node_nm: f64) -> String {
    if node_nm.fract() == 0.0 {
        format!("{}", node_nm as u64)
    } else {
        format!("{node_nm}")
    }
}
