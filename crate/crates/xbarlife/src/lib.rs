//! Design-technology co-exploration for NVM-crossbar neuromorphic inference
//! hardware.
//!
//! The crate answers four questions about an OxRRAM crossbar core:
//!
//! - **What does each cell actually see?** [`circuit`] solves the parasitic
//!   resistive grid for per-cell voltages and currents, including the
//!   position dependence that makes the longest current path carry less
//!   current than the shortest.
//! - **How long until a read disturbs it?** [`endurance`] converts stress
//!   voltage into time-to-disturb via filament-gap kinetics (HRS) or the
//!   exponential voltage law (LRS), then into read-endurance cycles and
//!   inference lifetime.
//! - **What does capacity cost?** [`cost`] evaluates the crossbar area and
//!   cost-per-bit model across process nodes.
//! - **Where should each synapse go?** [`mapper`] places spike-heavy synapses
//!   on high-endurance cells, provably maximizing the minimum lifetime.
//!
//! [`workload`] supplies the synthetic clustered SNN workloads the mapper
//! consumes, [`config`] holds the calibrated technology profiles, and [`io`]
//! writes the figure-ready CSV/JSON outputs.
//!
//! ```
//! use xbarlife::circuit::{self, ActivationPattern, ResistanceState};
//! use xbarlife::config::Config;
//!
//! let config = Config::default_profile();
//! let geom = config.geometry(8, 65.0)?;
//! let cells = config.uniform_cells(8, ResistanceState::Lrs3)?;
//! let network = circuit::build_network(&geom, &cells)?;
//! let act = ActivationPattern::all(8, 0.1)?;
//! let solve = circuit::solve_dc(&network, &act, 1e-9)?;
//!
//! // parasitic wire drops make the far corner the weakest reader
//! assert!(solve.cell_current[(7, 0)] > solve.cell_current[(0, 7)]);
//! # Ok::<(), xbarlife::Error>(())
//! ```

pub mod circuit;
pub mod config;
pub mod cost;
pub mod endurance;
mod error;
pub mod guide;
pub mod io;
pub mod mapper;
pub mod workload;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
