//! Parasitic resistive model of an N x N 1T-1R crossbar and its DC solution.
//!
//! Wordlines run horizontally and are driven through a source resistance at
//! their column-0 end; bitlines run vertically and terminate in an ideal
//! virtual ground (the post-synaptic neuron front-end) at their row-(N-1)
//! end. Every crosspoint contributes one wordline node and one bitline node,
//! bridged by the cell branch (programmed NVM resistance plus the access
//! transistor), for 2N^2 unknowns in total. Cell (N-1, 0) therefore sits on
//! the shortest current path and cell (0, N-1) on the longest.

mod solver;

pub use solver::Csr;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative residual for DC solves.
pub const DEFAULT_SOLVE_TOL: f64 = 1e-9;

/// Largest dimension still solved by direct banded factorization; bigger
/// crossbars switch to preconditioned conjugate gradients.
pub const DIRECT_SOLVE_LIMIT: usize = 64;

const PCG_MAX_ITER: usize = 200_000;

/// Bitline termination style. Only ideal virtual grounds are modeled: the
/// current-mode integrate-and-fire front-end holds the bitline end at 0 V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SenseMode {
    VirtualGround,
}

/// Wire-level description of the crossbar.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossbarGeometry {
    /// Crossbar dimension N.
    pub n: usize,
    /// Resistance of one inter-cell wordline segment, ohms.
    pub r_wordline_segment: f64,
    /// Resistance of one inter-cell bitline segment, ohms.
    pub r_bitline_segment: f64,
    /// Source resistance of each wordline driver, ohms.
    pub r_driver: f64,
    pub sense_mode: SenseMode,
}

impl CrossbarGeometry {
    pub fn new(n: usize, r_wordline: f64, r_bitline: f64, r_driver: f64) -> Result<Self> {
        let geom = CrossbarGeometry {
            n,
            r_wordline_segment: r_wordline,
            r_bitline_segment: r_bitline,
            r_driver,
            sense_mode: SenseMode::VirtualGround,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!(
                "crossbar dimension must be at least 2, got {}",
                self.n
            )));
        }
        for (name, v) in [
            ("wordline segment resistance", self.r_wordline_segment),
            ("bitline segment resistance", self.r_bitline_segment),
            ("driver resistance", self.r_driver),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Programmable resistance state of one OxRRAM cell. HRS encodes logic 00;
/// the three low-resistance levels encode 01, 10 and 11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResistanceState {
    Hrs,
    Lrs1,
    Lrs2,
    Lrs3,
}

impl ResistanceState {
    pub const ALL: [ResistanceState; 4] = [
        ResistanceState::Hrs,
        ResistanceState::Lrs1,
        ResistanceState::Lrs2,
        ResistanceState::Lrs3,
    ];

    /// Two-bit logic value stored by the state.
    pub fn logic_value(self) -> u8 {
        match self {
            ResistanceState::Hrs => 0b00,
            ResistanceState::Lrs1 => 0b01,
            ResistanceState::Lrs2 => 0b10,
            ResistanceState::Lrs3 => 0b11,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ResistanceState::Hrs => "hrs",
            ResistanceState::Lrs1 => "lrs1",
            ResistanceState::Lrs2 => "lrs2",
            ResistanceState::Lrs3 => "lrs3",
        }
    }
}

impl std::str::FromStr for ResistanceState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hrs" | "00" => Ok(ResistanceState::Hrs),
            "lrs1" | "01" => Ok(ResistanceState::Lrs1),
            "lrs2" | "10" => Ok(ResistanceState::Lrs2),
            "lrs3" | "11" => Ok(ResistanceState::Lrs3),
            other => Err(Error::Config(format!("unknown resistance state {other:?}"))),
        }
    }
}

/// Device resistance assigned to each programmable state, ohms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateResistances {
    pub hrs: f64,
    pub lrs1: f64,
    pub lrs2: f64,
    pub lrs3: f64,
}

impl StateResistances {
    pub fn resistance(&self, state: ResistanceState) -> f64 {
        match state {
            ResistanceState::Hrs => self.hrs,
            ResistanceState::Lrs1 => self.lrs1,
            ResistanceState::Lrs2 => self.lrs2,
            ResistanceState::Lrs3 => self.lrs3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lrs3 > 0.0) {
            return Err(Error::Config(format!(
                "LRS3 resistance must be positive, got {}",
                self.lrs3
            )));
        }
        if !(self.hrs > self.lrs1 && self.lrs1 > self.lrs2 && self.lrs2 > self.lrs3) {
            return Err(Error::Config(format!(
                "state resistances must satisfy HRS > LRS1 > LRS2 > LRS3 \
                 (got {} / {} / {} / {})",
                self.hrs, self.lrs1, self.lrs2, self.lrs3
            )));
        }
        Ok(())
    }
}

impl Default for StateResistances {
    /// Representative HfO2 multi-level values: 1 MOhm HRS, 10 kOhm deepest
    /// LRS, intermediate levels log-spaced.
    fn default() -> Self {
        StateResistances {
            hrs: 1.0e6,
            lrs1: 215_443.469,
            lrs2: 46_415.8883,
            lrs3: 10_000.0,
        }
    }
}

/// Per-cell programmed states plus the shared access-transistor resistance.
///
/// `selected` models the 1T-1R access gate: a deselected cell conducts no
/// current (its transistor is off), which is how single-cell read probes are
/// expressed. All cells are selected by default.
#[derive(Debug, Clone)]
pub struct CellStateMatrix {
    states: Array2<ResistanceState>,
    resistances: StateResistances,
    r_access: f64,
    selected: Array2<bool>,
}

impl CellStateMatrix {
    pub fn uniform(
        n: usize,
        state: ResistanceState,
        resistances: StateResistances,
        r_access: f64,
    ) -> Result<Self> {
        Self::from_states(Array2::from_elem((n, n), state), resistances, r_access)
    }

    pub fn from_states(
        states: Array2<ResistanceState>,
        resistances: StateResistances,
        r_access: f64,
    ) -> Result<Self> {
        if states.nrows() != states.ncols() {
            return Err(Error::Dimension(format!(
                "cell state matrix must be square, got {}x{}",
                states.nrows(),
                states.ncols()
            )));
        }
        resistances.validate()?;
        if !(r_access > 0.0) {
            return Err(Error::Config(format!(
                "access resistance must be positive, got {r_access}"
            )));
        }
        let n = states.nrows();
        Ok(CellStateMatrix {
            states,
            resistances,
            r_access,
            selected: Array2::from_elem((n, n), true),
        })
    }

    /// Read-probe configuration: every access transistor off except the
    /// listed probe cells, which are programmed to `state`.
    pub fn read_probe(
        n: usize,
        state: ResistanceState,
        resistances: StateResistances,
        r_access: f64,
        probes: &[(usize, usize)],
    ) -> Result<Self> {
        let mut cells = Self::uniform(n, state, resistances, r_access)?;
        cells.selected.fill(false);
        for &(row, col) in probes {
            if row >= n || col >= n {
                return Err(Error::Dimension(format!(
                    "probe cell ({row}, {col}) outside {n}x{n} crossbar"
                )));
            }
            cells.selected[(row, col)] = true;
        }
        Ok(cells)
    }

    pub fn n(&self) -> usize {
        self.states.nrows()
    }

    pub fn state(&self, row: usize, col: usize) -> ResistanceState {
        self.states[(row, col)]
    }

    pub fn set_state(&mut self, row: usize, col: usize, state: ResistanceState) {
        self.states[(row, col)] = state;
    }

    pub fn is_selected(&self, row: usize, col: usize) -> bool {
        self.selected[(row, col)]
    }

    pub fn resistances(&self) -> &StateResistances {
        &self.resistances
    }

    pub fn r_access(&self) -> f64 {
        self.r_access
    }

    /// Series resistance of the 1T-1R branch, `None` when deselected.
    pub fn branch_resistance(&self, row: usize, col: usize) -> Option<f64> {
        if self.selected[(row, col)] {
            Some(self.resistances.resistance(self.states[(row, col)]) + self.r_access)
        } else {
            None
        }
    }
}

/// Which wordlines fire, and at what spike amplitude. Inactive wordlines are
/// held at 0 V through their driver rather than left floating.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActivationPattern {
    driven: Vec<bool>,
    v_spike: f64,
}

impl ActivationPattern {
    pub fn new(driven: Vec<bool>, v_spike: f64) -> Result<Self> {
        if !driven.iter().any(|&d| d) {
            return Err(Error::Config(
                "activation pattern must drive at least one wordline".into(),
            ));
        }
        if !(v_spike > 0.0) || !v_spike.is_finite() {
            return Err(Error::Config(format!(
                "spike voltage must be positive, got {v_spike}"
            )));
        }
        Ok(ActivationPattern { driven, v_spike })
    }

    /// All N wordlines driven at `v_spike`.
    pub fn all(n: usize, v_spike: f64) -> Result<Self> {
        Self::new(vec![true; n], v_spike)
    }

    /// Only wordline `row` driven; the rest held at 0 V.
    pub fn single(n: usize, row: usize, v_spike: f64) -> Result<Self> {
        if row >= n {
            return Err(Error::Dimension(format!(
                "driven row {row} outside 0..{n}"
            )));
        }
        let mut driven = vec![false; n];
        driven[row] = true;
        Self::new(driven, v_spike)
    }

    pub fn v_spike(&self) -> f64 {
        self.v_spike
    }

    pub fn driven(&self) -> &[bool] {
        &self.driven
    }
}

/// Assembled nodal system for one crossbar. The conductance matrix depends
/// only on geometry and cell states, so one network supports any number of
/// activation patterns; the pattern enters through the right-hand side.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct CrossbarNetwork {
    n: usize,
    matrix: Csr,
    g_driver: f64,
    g_bitline: f64,
    /// Branch conductance per cell; 0 for deselected cells.
    g_cell: Array2<f64>,
}

#[inline]
fn wl_index(n: usize, row: usize, col: usize) -> usize {
    2 * (row * n + col)
}

#[inline]
fn bl_index(n: usize, row: usize, col: usize) -> usize {
    2 * (row * n + col) + 1
}

/// Builds the 2N^2-node resistive network bridging the wordline and bitline
/// grids, with drivers Norton-folded into the matrix and the virtual-ground
/// sense nodes pinned to 0 V by identity rows.
pub fn build_network(geom: &CrossbarGeometry, cells: &CellStateMatrix) -> Result<CrossbarNetwork> {
    geom.validate()?;
    if geom.n != cells.n() {
        return Err(Error::Dimension(format!(
            "geometry is {0}x{0} but cell matrix is {1}x{1}",
            geom.n,
            cells.n()
        )));
    }
    let n = geom.n;
    let g_w = 1.0 / geom.r_wordline_segment;
    let g_b = 1.0 / geom.r_bitline_segment;
    let g_d = 1.0 / geom.r_driver;

    let mut g_cell = Array2::zeros((n, n));
    for row in 0..n {
        for col in 0..n {
            if let Some(r) = cells.branch_resistance(row, col) {
                g_cell[(row, col)] = 1.0 / r;
            }
        }
    }

    let unknowns = 2 * n * n;
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::with_capacity(6); unknowns];
    // bitline nodes on row N-1 are held at 0 V by the sense front-end
    let pinned = |idx: usize| -> bool { idx % 2 == 1 && (idx / 2) / n == n - 1 };
    fn stamp(
        rows: &mut [Vec<(u32, f64)>],
        pinned: impl Fn(usize) -> bool,
        a: usize,
        b: usize,
        g: f64,
    ) {
        let (pa, pb) = (pinned(a), pinned(b));
        if !pa {
            rows[a].push((a as u32, g));
        }
        if !pb {
            rows[b].push((b as u32, g));
        }
        if !pa && !pb {
            rows[a].push((b as u32, -g));
            rows[b].push((a as u32, -g));
        }
    }

    for row in 0..n {
        let drv = wl_index(n, row, 0);
        rows[drv].push((drv as u32, g_d));
        for col in 0..n - 1 {
            stamp(
                &mut rows,
                pinned,
                wl_index(n, row, col),
                wl_index(n, row, col + 1),
                g_w,
            );
        }
    }
    for col in 0..n {
        for row in 0..n - 1 {
            stamp(
                &mut rows,
                pinned,
                bl_index(n, row, col),
                bl_index(n, row + 1, col),
                g_b,
            );
        }
    }
    for row in 0..n {
        for col in 0..n {
            let g = g_cell[(row, col)];
            if g > 0.0 {
                stamp(
                    &mut rows,
                    pinned,
                    wl_index(n, row, col),
                    bl_index(n, row, col),
                    g,
                );
            }
        }
    }
    for col in 0..n {
        let idx = bl_index(n, n - 1, col);
        rows[idx].push((idx as u32, 1.0));
    }

    Ok(CrossbarNetwork {
        n,
        matrix: Csr::from_rows(rows),
        g_driver: g_d,
        g_bitline: g_b,
        g_cell,
    })
}

impl CrossbarNetwork {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of unknown node voltages: 2N^2.
    pub fn unknown_count(&self) -> usize {
        2 * self.n * self.n
    }

    pub fn matrix(&self) -> &Csr {
        &self.matrix
    }

    pub fn cell_conductance(&self, row: usize, col: usize) -> f64 {
        self.g_cell[(row, col)]
    }

    fn rhs(&self, act: &ActivationPattern) -> Vec<f64> {
        let n = self.n;
        let mut b = vec![0.0; self.unknown_count()];
        for (row, &driven) in act.driven().iter().enumerate() {
            if driven {
                b[wl_index(n, row, 0)] = self.g_driver * act.v_spike();
            }
        }
        b
    }
}

/// Per-cell voltages and currents from a DC operating-point solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Voltage across each cell branch: wordline node minus bitline node, volts.
    pub cell_voltage: Array2<f64>,
    /// Current through each cell branch, amperes (zero for deselected cells).
    pub cell_current: Array2<f64>,
    /// Wordline node voltage at each crosspoint, volts.
    pub wordline_voltage: Array2<f64>,
    /// Bitline node voltage at each crosspoint, volts.
    pub bitline_voltage: Array2<f64>,
    /// Current delivered into each post-synaptic neuron, amperes.
    pub bitline_current: Array1<f64>,
    /// Net current sourced by each wordline driver, amperes.
    pub driver_current: Array1<f64>,
    /// Relative residual of the linear solve.
    pub residual: f64,
}

impl SolveResult {
    pub fn n(&self) -> usize {
        self.cell_voltage.nrows()
    }

    pub fn total_driver_current(&self) -> f64 {
        self.driver_current.sum()
    }

    pub fn total_sense_current(&self) -> f64 {
        self.bitline_current.sum()
    }
}

/// Solves the DC operating point for a given activation pattern.
///
/// Uses direct banded Cholesky up to [`DIRECT_SOLVE_LIMIT`] and
/// Jacobi-preconditioned CG above. Deterministic for fixed inputs.
pub fn solve_dc(
    network: &CrossbarNetwork,
    act: &ActivationPattern,
    tol: f64,
) -> Result<SolveResult> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "solver tolerance must be positive, got {tol}"
        )));
    }
    let n = network.n;
    if act.driven().len() != n {
        return Err(Error::Dimension(format!(
            "activation pattern has {} entries for a {n}x{n} crossbar",
            act.driven().len()
        )));
    }
    let b = network.rhs(act);
    let x = if n <= DIRECT_SOLVE_LIMIT {
        solver::solve_banded_cholesky(&network.matrix, &b)
    } else {
        solver::solve_pcg(&network.matrix, &b, tol, PCG_MAX_ITER)?.0
    };
    let residual = network.matrix.relative_residual(&x, &b);
    if residual > tol {
        return Err(Error::Solver {
            achieved: residual,
            iterations: 0,
            tolerance: tol,
        });
    }

    let mut wordline_voltage = Array2::zeros((n, n));
    let mut bitline_voltage = Array2::zeros((n, n));
    for row in 0..n {
        for col in 0..n {
            wordline_voltage[(row, col)] = x[wl_index(n, row, col)];
            bitline_voltage[(row, col)] = x[bl_index(n, row, col)];
        }
    }
    let cell_voltage = &wordline_voltage - &bitline_voltage;
    let cell_current = &cell_voltage * &network.g_cell;

    let mut bitline_current = Array1::zeros(n);
    for col in 0..n {
        let mut into_sense = cell_current[(n - 1, col)];
        into_sense += network.g_bitline * bitline_voltage[(n - 2, col)];
        bitline_current[col] = into_sense;
    }
    let mut driver_current = Array1::zeros(n);
    for row in 0..n {
        let v_src = if act.driven()[row] { act.v_spike() } else { 0.0 };
        driver_current[row] = network.g_driver * (v_src - wordline_voltage[(row, 0)]);
    }

    Ok(SolveResult {
        cell_voltage,
        cell_current,
        wordline_voltage,
        bitline_voltage,
        bitline_current,
        driver_current,
        residual,
    })
}

/// Finds the spike voltage that produces `target_current` through `cell`
/// with every wordline driven.
///
/// The network is linear, so one solve at 1 V fixes the scale; the returned
/// voltage reproduces the target exactly up to solver tolerance.
pub fn calibrate_spike_voltage(
    network: &CrossbarNetwork,
    target_current: f64,
    cell: (usize, usize),
) -> Result<f64> {
    if !(target_current > 0.0) {
        return Err(Error::Config(format!(
            "target current must be positive, got {target_current}"
        )));
    }
    let n = network.n;
    if cell.0 >= n || cell.1 >= n {
        return Err(Error::Dimension(format!(
            "cell ({}, {}) outside {n}x{n} crossbar",
            cell.0, cell.1
        )));
    }
    let act = ActivationPattern::all(n, 1.0)?;
    let unit = solve_dc(network, &act, DEFAULT_SOLVE_TOL)?;
    let i_unit = unit.cell_current[cell];
    if i_unit <= 0.0 {
        return Err(Error::Domain(format!(
            "cell ({}, {}) conducts no current; cannot calibrate",
            cell.0, cell.1
        )));
    }
    Ok(target_current / i_unit)
}

/// Percent difference between shortest-path and longest-path cell currents,
/// `100 * (I_shortest - I_longest) / I_shortest`, with all wordlines driven.
/// The shortest path ends at cell (N-1, 0), the longest at cell (0, N-1).
pub fn current_disparity(network: &CrossbarNetwork) -> Result<f64> {
    let act = ActivationPattern::all(network.n, 1.0)?;
    let solve = solve_dc(network, &act, DEFAULT_SOLVE_TOL)?;
    disparity_from_currents(
        solve.cell_current[(network.n - 1, 0)],
        solve.cell_current[(0, network.n - 1)],
    )
}

/// Disparity measured the way a per-cell read would see it: each corner cell
/// probed with only its own wordline driven.
pub fn current_disparity_single_row(network: &CrossbarNetwork) -> Result<f64> {
    let n = network.n;
    let shortest = solve_dc(
        network,
        &ActivationPattern::single(n, n - 1, 1.0)?,
        DEFAULT_SOLVE_TOL,
    )?
    .cell_current[(n - 1, 0)];
    let longest = solve_dc(
        network,
        &ActivationPattern::single(n, 0, 1.0)?,
        DEFAULT_SOLVE_TOL,
    )?
    .cell_current[(0, n - 1)];
    disparity_from_currents(shortest, longest)
}

fn disparity_from_currents(i_shortest: f64, i_longest: f64) -> Result<f64> {
    if i_shortest <= 0.0 {
        return Err(Error::Domain(
            "shortest-path cell conducts no current; check cell selection".into(),
        ));
    }
    Ok(100.0 * (i_shortest - i_longest) / i_shortest)
}

/// Fits the single per-segment wire resistance (shared by wordlines and
/// bitlines) so that `current_disparity` hits `target_percent` on the network
/// produced by `build`. Disparity grows monotonically with the segment
/// resistance, so a log-space bisection converges unconditionally.
pub fn calibrate_segment_resistance(
    target_percent: f64,
    mut build: impl FnMut(f64) -> Result<CrossbarNetwork>,
    lo_ohm: f64,
    hi_ohm: f64,
) -> Result<f64> {
    if !(target_percent > 0.0 && target_percent < 100.0) {
        return Err(Error::Config(format!(
            "target disparity must be in (0, 100) percent, got {target_percent}"
        )));
    }
    if !(lo_ohm > 0.0 && hi_ohm > lo_ohm) {
        return Err(Error::Config(format!(
            "invalid bracket [{lo_ohm}, {hi_ohm}] ohm"
        )));
    }
    let mut lo = lo_ohm;
    let mut hi = hi_ohm;
    if current_disparity(&build(lo)?)? > target_percent {
        return Err(Error::Config(format!(
            "disparity at bracket floor {lo_ohm} ohm already exceeds {target_percent}%"
        )));
    }
    if current_disparity(&build(hi)?)? < target_percent {
        return Err(Error::Config(format!(
            "disparity at bracket ceiling {hi_ohm} ohm stays below {target_percent}%"
        )));
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if current_disparity(&build(mid)?)? < target_percent {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-12 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(n: usize) -> CrossbarGeometry {
        CrossbarGeometry::new(n, 1.0, 2.0, 10.0).unwrap()
    }

    fn uniform_cells(n: usize, state: ResistanceState) -> CellStateMatrix {
        CellStateMatrix::uniform(n, state, StateResistances::default(), 5_000.0).unwrap()
    }

    #[test]
    fn network_has_2n2_unknowns() {
        let net = build_network(&geom(2), &uniform_cells(2, ResistanceState::Lrs3)).unwrap();
        assert_eq!(net.unknown_count(), 8);
        let net = build_network(&geom(128), &uniform_cells(128, ResistanceState::Lrs3)).unwrap();
        assert_eq!(net.unknown_count(), 32_768);
    }

    #[test]
    fn dimension_mismatch_is_a_configuration_error() {
        let err = build_network(&geom(4), &uniform_cells(3, ResistanceState::Hrs)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)), "{err}");
    }

    #[test]
    fn geometry_rejects_degenerate_inputs() {
        assert!(CrossbarGeometry::new(1, 1.0, 1.0, 1.0).is_err());
        assert!(CrossbarGeometry::new(4, 0.0, 1.0, 1.0).is_err());
        assert!(CrossbarGeometry::new(4, 1.0, -2.0, 1.0).is_err());
    }

    #[test]
    fn state_resistance_ordering_enforced() {
        let bad = StateResistances {
            hrs: 1.0e4,
            lrs1: 2.0e4,
            lrs2: 4.6e4,
            lrs3: 1.0e6,
        };
        assert!(bad.validate().is_err());
        assert!(StateResistances::default().validate().is_ok());
    }

    #[test]
    fn single_probe_solve_is_a_voltage_divider() {
        // One active cell at (0, 1) on a 2x2 crossbar: the current path is
        // driver -> one wordline segment -> cell -> one bitline segment -> ground.
        let g = CrossbarGeometry::new(2, 7.0, 13.0, 100.0).unwrap();
        let cells = CellStateMatrix::read_probe(
            2,
            ResistanceState::Lrs3,
            StateResistances::default(),
            5_000.0,
            &[(0, 1)],
        )
        .unwrap();
        let net = build_network(&g, &cells).unwrap();
        let act = ActivationPattern::all(2, 0.8).unwrap();
        let solve = solve_dc(&net, &act, 1e-12).unwrap();

        let r_cell = 15_000.0;
        let i_expected = 0.8 / (100.0 + 7.0 + r_cell + 13.0);
        let v_expected = i_expected * r_cell;
        assert!((solve.cell_current[(0, 1)] - i_expected).abs() / i_expected < 1e-12);
        assert!((solve.cell_voltage[(0, 1)] - v_expected).abs() / v_expected < 1e-12);
        // the unprobed cells carry no current
        assert_eq!(solve.cell_current[(0, 0)], 0.0);
        assert_eq!(solve.cell_current[(1, 0)], 0.0);
        assert_eq!(solve.cell_current[(1, 1)], 0.0);
    }

    #[test]
    fn longest_path_cell_carries_least_current() {
        let net = build_network(&geom(2), &uniform_cells(2, ResistanceState::Lrs3)).unwrap();
        let act = ActivationPattern::all(2, 1.0).unwrap();
        let solve = solve_dc(&net, &act, 1e-10).unwrap();
        assert!(solve.cell_current[(0, 1)] < solve.cell_current[(0, 0)]);
        assert!(solve.cell_current[(0, 1)] < solve.cell_current[(1, 1)]);
    }

    #[test]
    fn branch_current_follows_ohms_law() {
        let cells = uniform_cells(3, ResistanceState::Lrs2);
        let net = build_network(&geom(3), &cells).unwrap();
        let act = ActivationPattern::all(3, 0.5).unwrap();
        let solve = solve_dc(&net, &act, 1e-10).unwrap();
        for row in 0..3 {
            for col in 0..3 {
                let r = cells.branch_resistance(row, col).unwrap();
                let expect = solve.cell_voltage[(row, col)] / r;
                assert!((solve.cell_current[(row, col)] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conservation_driver_equals_sense() {
        for pattern in [vec![true, true, true, true], vec![true, false, true, false]] {
            let net = build_network(&geom(4), &uniform_cells(4, ResistanceState::Lrs3)).unwrap();
            let act = ActivationPattern::new(pattern, 1.0).unwrap();
            let solve = solve_dc(&net, &act, 1e-10).unwrap();
            let drive = solve.total_driver_current();
            let sense = solve.total_sense_current();
            assert!(
                ((drive - sense) / drive).abs() < 1e-8,
                "driver {drive} vs sense {sense}"
            );
        }
    }

    #[test]
    fn bitline_current_sums_column_cell_currents() {
        let net = build_network(&geom(5), &uniform_cells(5, ResistanceState::Lrs3)).unwrap();
        let act = ActivationPattern::new(vec![true, true, false, true, false], 0.7).unwrap();
        let solve = solve_dc(&net, &act, 1e-11).unwrap();
        for col in 0..5 {
            let sum: f64 = (0..5).map(|row| solve.cell_current[(row, col)]).sum();
            assert!(
                (solve.bitline_current[col] - sum).abs() < 1e-12,
                "column {col}: {} vs {}",
                solve.bitline_current[col],
                sum
            );
        }
    }

    #[test]
    fn calibrate_spike_voltage_reaches_target() {
        let net = build_network(&geom(8), &uniform_cells(8, ResistanceState::Lrs3)).unwrap();
        let target = 50e-6;
        let v = calibrate_spike_voltage(&net, target, (0, 7)).unwrap();
        let solve = solve_dc(&net, &ActivationPattern::all(8, v).unwrap(), 1e-11).unwrap();
        let achieved = solve.cell_current[(0, 7)];
        assert!(
            (achieved - target).abs() <= 0.001 * target,
            "achieved {achieved}"
        );
        // linearity: doubling the target doubles the voltage
        let v2 = calibrate_spike_voltage(&net, 2.0 * target, (0, 7)).unwrap();
        assert!((v2 - 2.0 * v).abs() / v < 1e-12);
        // the shortest path needs less drive for the same current
        let v_short = calibrate_spike_voltage(&net, target, (7, 0)).unwrap();
        assert!(v_short < v);
    }

    #[test]
    fn zero_parasitics_zero_disparity() {
        let g = CrossbarGeometry::new(8, 1e-9, 1e-9, 1e-9).unwrap();
        let net = build_network(&g, &uniform_cells(8, ResistanceState::Lrs3)).unwrap();
        let d = current_disparity(&net).unwrap();
        assert!(d.abs() < 1e-6, "disparity {d}");
    }

    #[test]
    fn disparity_grows_with_crossbar_size() {
        let mut last = 0.0;
        for n in [4, 8, 16] {
            let net = build_network(&geom(n), &uniform_cells(n, ResistanceState::Lrs3)).unwrap();
            let d = current_disparity(&net).unwrap();
            assert!(d > last, "disparity {d} at n={n} not above {last}");
            last = d;
        }
    }

    #[test]
    fn single_row_disparity_positive() {
        let net = build_network(&geom(8), &uniform_cells(8, ResistanceState::Lrs3)).unwrap();
        let d = current_disparity_single_row(&net).unwrap();
        assert!(d > 0.0);
    }

    #[test]
    fn segment_resistance_calibration_round_trips() {
        let build = |r_seg: f64| {
            let g = CrossbarGeometry::new(32, r_seg, r_seg, 100.0)?;
            let cells = CellStateMatrix::read_probe(
                32,
                ResistanceState::Lrs3,
                StateResistances::default(),
                5_000.0,
                &[(31, 0), (0, 31)],
            )?;
            build_network(&g, &cells)
        };
        let target = 13.3;
        let fitted = calibrate_segment_resistance(target, build, 1e-3, 1e4).unwrap();
        let d = current_disparity(&build(fitted).unwrap()).unwrap();
        assert!((d - target).abs() < 1e-6, "fitted {fitted} gives {d}");
        // independent closed form for the probe topology:
        // disparity = 1 - (r_d + R_cell) / (r_d + R_cell + 2 (N-1) r)
        let a = 100.0 + 15_000.0;
        let expected = a * (1.0 / (1.0 - target / 100.0) - 1.0) / (2.0 * 31.0);
        assert!(
            (fitted - expected).abs() / expected < 1e-6,
            "fitted {fitted} vs series model {expected}"
        );
    }

    #[test]
    fn activation_pattern_validation() {
        assert!(ActivationPattern::new(vec![false, false], 1.0).is_err());
        assert!(ActivationPattern::all(4, 0.0).is_err());
        assert!(ActivationPattern::single(4, 5, 1.0).is_err());
    }
}
