//! Synapse-to-cell placement and inference-lifetime evaluation.
//!
//! The endurance-aware strategy pairs synapses sorted by spike count with
//! cells sorted by read endurance, rank for rank. For a one-to-one assignment
//! this maximizes the minimum endurance/spikes quotient (the rearrangement
//! argument), so it is exactly optimal, not merely a heuristic.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::endurance::{inference_lifetime, EnduranceMap, Lifetime};
use crate::error::{Error, Result};
use crate::workload::ClusteredWorkload;

/// How synapses were assigned to cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementStrategy {
    /// Synapses in id order fill cells row by row.
    BaselineRowMajor,
    /// Seeded random cell permutation.
    Random { seed: u64 },
    /// Spike-sorted synapses onto endurance-sorted cells.
    EnduranceAware,
}

/// An injective assignment of synapses to crossbar cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Placement {
    pub strategy: PlacementStrategy,
    /// synapse id -> (row, col)
    pub assignment: BTreeMap<u64, (usize, usize)>,
}

impl Placement {
    /// Confirms the assignment is injective and stays within an n x n grid.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut used = std::collections::HashSet::with_capacity(self.assignment.len());
        for (&id, &(row, col)) in &self.assignment {
            if row >= n || col >= n {
                return Err(Error::Placement(format!(
                    "synapse {id} assigned to ({row}, {col}) outside the {n}x{n} crossbar"
                )));
            }
            if !used.insert((row, col)) {
                return Err(Error::Placement(format!(
                    "cell ({row}, {col}) assigned to more than one synapse"
                )));
            }
        }
        Ok(())
    }
}

fn check_capacity(workload: &ClusteredWorkload, n: usize) -> Result<()> {
    if workload.len() > n * n {
        return Err(Error::Capacity {
            synapses: workload.len(),
            capacity: n * n,
        });
    }
    Ok(())
}

/// Spike-count-oblivious reference placement: synapses in ascending id order
/// occupy cells in row-major order.
pub fn place_baseline(workload: &ClusteredWorkload, n: usize) -> Result<Placement> {
    check_capacity(workload, n)?;
    let mut ids: Vec<u64> = workload.synapses.iter().map(|s| s.id).collect();
    ids.sort_unstable();
    let assignment = ids
        .into_iter()
        .enumerate()
        .map(|(k, id)| (id, (k / n, k % n)))
        .collect();
    Ok(Placement {
        strategy: PlacementStrategy::BaselineRowMajor,
        assignment,
    })
}

/// Seeded random placement over the full cell grid.
pub fn place_random(workload: &ClusteredWorkload, n: usize, seed: u64) -> Result<Placement> {
    check_capacity(workload, n)?;
    let mut cells: Vec<(usize, usize)> = (0..n * n).map(|k| (k / n, k % n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cells.shuffle(&mut rng);
    let mut ids: Vec<u64> = workload.synapses.iter().map(|s| s.id).collect();
    ids.sort_unstable();
    let assignment = ids.into_iter().zip(cells).collect();
    Ok(Placement {
        strategy: PlacementStrategy::Random { seed },
        assignment,
    })
}

/// Endurance-aware placement: synapses that propagate more spikes go to cells
/// with higher read endurance.
///
/// Sort synapses by spike count descending (ties by id ascending), cells by
/// endurance descending (ties by (row, col) ascending), pair rank for rank.
pub fn place_endurance_aware(
    workload: &ClusteredWorkload,
    endurance: &EnduranceMap,
) -> Result<Placement> {
    let n = endurance.n();
    check_capacity(workload, n)?;

    let mut synapses: Vec<(u64, u64)> = workload
        .synapses
        .iter()
        .map(|s| (s.id, s.spikes_per_image))
        .collect();
    synapses.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut cells: Vec<((usize, usize), u64)> = endurance
        .cycles
        .indexed_iter()
        .map(|(pos, &cyc)| (pos, cyc))
        .collect();
    cells.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let assignment = synapses
        .into_iter()
        .zip(cells)
        .map(|((id, _), (pos, _))| (id, pos))
        .collect();
    Ok(Placement {
        strategy: PlacementStrategy::EnduranceAware,
        assignment,
    })
}

/// Lifetime of a placed workload and its position relative to the baseline.
#[derive(Debug, Clone, Serialize)]
pub struct LifetimeReport {
    /// Minimum over occupied cells of endurance / spikes (Eq.-style floor).
    pub lifetime: Lifetime,
    /// Cell that limits the lifetime (absent for empty workloads).
    pub limiting_cell: Option<(usize, usize)>,
    /// Synapse mapped to the limiting cell.
    pub limiting_synapse: Option<u64>,
    /// This placement's lifetime divided by the baseline row-major
    /// placement's lifetime on the same endurance map.
    pub improvement_vs_baseline: f64,
}

fn placement_lifetime(
    placement: &Placement,
    workload: &ClusteredWorkload,
    endurance: &EnduranceMap,
) -> Result<(Lifetime, Option<(usize, usize)>, Option<u64>)> {
    let n = endurance.n();
    placement.validate(n)?;
    let mut worst: Option<(Lifetime, u64, (usize, usize))> = None;
    for syn in &workload.synapses {
        let &cell = placement.assignment.get(&syn.id).ok_or_else(|| {
            Error::Placement(format!("synapse {} missing from the assignment", syn.id))
        })?;
        let life = inference_lifetime(endurance.cycles[cell], syn.spikes_per_image);
        let candidate = (life, syn.id, cell);
        worst = Some(match worst {
            None => candidate,
            Some(best) if (candidate.0, candidate.1) < (best.0, best.1) => candidate,
            Some(best) => best,
        });
    }
    Ok(match worst {
        Some((life, id, cell)) => (life, Some(cell), Some(id)),
        None => (Lifetime::Unbounded, None, None),
    })
}

fn lifetime_ratio(this: Lifetime, baseline: Lifetime) -> f64 {
    match (this, baseline) {
        (Lifetime::Unbounded, Lifetime::Unbounded) => 1.0,
        (Lifetime::Unbounded, Lifetime::Images(_)) => f64::INFINITY,
        (Lifetime::Images(a), Lifetime::Unbounded) => {
            if a == 0 {
                1.0
            } else {
                0.0
            }
        }
        (Lifetime::Images(a), Lifetime::Images(b)) => {
            if b == 0 {
                if a == 0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                a as f64 / b as f64
            }
        }
    }
}

/// Evaluates a placement: minimum per-synapse lifetime, the limiting
/// synapse/cell pair, and the improvement over the baseline placement.
pub fn evaluate_lifetime(
    placement: &Placement,
    workload: &ClusteredWorkload,
    endurance: &EnduranceMap,
) -> Result<LifetimeReport> {
    let (lifetime, limiting_cell, limiting_synapse) =
        placement_lifetime(placement, workload, endurance)?;
    let baseline = place_baseline(workload, endurance.n())?;
    let (base_life, _, _) = placement_lifetime(&baseline, workload, endurance)?;
    Ok(LifetimeReport {
        lifetime,
        limiting_cell,
        limiting_synapse,
        improvement_vs_baseline: lifetime_ratio(lifetime, base_life),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn workload(counts: &[(u64, u64)]) -> ClusteredWorkload {
        ClusteredWorkload {
            cluster_id: "test".into(),
            window_seconds: 1.0,
            synapses: counts
                .iter()
                .map(|&(id, spikes)| crate::workload::SynapseActivity {
                    id,
                    spikes_per_image: spikes,
                    times: None,
                })
                .collect(),
        }
    }

    fn map_from(cycles: Array2<u64>) -> EnduranceMap {
        let disturb_time = cycles.mapv(|c| c as f64);
        EnduranceMap {
            cycles,
            disturb_time,
            pulse_width: 1.0,
        }
    }

    #[test]
    fn baseline_fills_row_major_in_id_order() {
        let w = workload(&[(2, 5), (0, 1), (3, 9), (1, 4)]);
        let p = place_baseline(&w, 2).unwrap();
        assert_eq!(p.assignment[&0], (0, 0));
        assert_eq!(p.assignment[&1], (0, 1));
        assert_eq!(p.assignment[&2], (1, 0));
        assert_eq!(p.assignment[&3], (1, 1));
    }

    #[test]
    fn baseline_single_synapse() {
        let w = workload(&[(42, 7)]);
        let p = place_baseline(&w, 4).unwrap();
        assert_eq!(p.assignment[&42], (0, 0));
    }

    #[test]
    fn capacity_overflow_detected() {
        let w = workload(&[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]);
        assert!(matches!(
            place_baseline(&w, 2),
            Err(Error::Capacity {
                synapses: 5,
                capacity: 4
            })
        ));
        let e = map_from(Array2::from_elem((2, 2), 10));
        assert!(place_endurance_aware(&w, &e).is_err());
    }

    #[test]
    fn heavy_synapse_gets_strong_cell() {
        // spikes {a=0: 10, b=1: 1}, endurance {(0,0): 100, (0,1): 1000}
        let w = workload(&[(0, 10), (1, 1)]);
        let mut cycles = Array2::from_elem((2, 2), 0u64);
        cycles[(0, 0)] = 100;
        cycles[(0, 1)] = 1000;
        let e = map_from(cycles);
        let p = place_endurance_aware(&w, &e).unwrap();
        assert_eq!(p.assignment[&0], (0, 1));
        assert_eq!(p.assignment[&1], (0, 0));

        let report = evaluate_lifetime(&p, &w, &e).unwrap();
        assert_eq!(report.lifetime, Lifetime::Images(100));
    }

    #[test]
    fn uniform_spikes_degenerate_to_row_major_over_sorted_cells() {
        let w = workload(&[(0, 3), (1, 3), (2, 3)]);
        let mut cycles = Array2::from_elem((2, 2), 1u64);
        cycles[(1, 1)] = 50;
        cycles[(0, 1)] = 40;
        cycles[(1, 0)] = 30;
        cycles[(0, 0)] = 20;
        let e = map_from(cycles);
        let p = place_endurance_aware(&w, &e).unwrap();
        // ids ascending pair with cells in endurance order
        assert_eq!(p.assignment[&0], (1, 1));
        assert_eq!(p.assignment[&1], (0, 1));
        assert_eq!(p.assignment[&2], (1, 0));
    }

    #[test]
    fn single_synapse_lifetime_report() {
        let w = workload(&[(0, 10)]);
        let e = map_from(Array2::from_elem((1, 1), 1000u64));
        let p = place_baseline(&w, 1).unwrap();
        let report = evaluate_lifetime(&p, &w, &e).unwrap();
        assert_eq!(report.lifetime, Lifetime::Images(100));
        assert_eq!(report.limiting_cell, Some((0, 0)));
        assert_eq!(report.limiting_synapse, Some(0));
        assert_eq!(report.improvement_vs_baseline, 1.0);
    }

    #[test]
    fn zero_spike_synapses_live_forever() {
        let w = workload(&[(0, 0), (1, 0)]);
        let e = map_from(Array2::from_elem((2, 2), 5u64));
        let p = place_baseline(&w, 2).unwrap();
        let report = evaluate_lifetime(&p, &w, &e).unwrap();
        assert_eq!(report.lifetime, Lifetime::Unbounded);
        assert_eq!(report.improvement_vs_baseline, 1.0);
    }

    #[test]
    fn synapse_outside_map_is_a_consistency_error() {
        let w = workload(&[(0, 1)]);
        let e = map_from(Array2::from_elem((2, 2), 5u64));
        let mut p = place_baseline(&w, 2).unwrap();
        p.assignment.insert(0, (5, 0));
        assert!(matches!(
            evaluate_lifetime(&p, &w, &e),
            Err(Error::Placement(_))
        ));
    }

    #[test]
    fn duplicate_cell_rejected() {
        let p = Placement {
            strategy: PlacementStrategy::BaselineRowMajor,
            assignment: [(0u64, (0usize, 0usize)), (1u64, (0usize, 0usize))]
                .into_iter()
                .collect(),
        };
        assert!(p.validate(2).is_err());
    }

    #[test]
    fn random_placement_is_seeded_and_injective() {
        let w = workload(&[(0, 1), (1, 2), (2, 3)]);
        let a = place_random(&w, 3, 9).unwrap();
        let b = place_random(&w, 3, 9).unwrap();
        assert_eq!(a.assignment, b.assignment);
        a.validate(3).unwrap();
        let c = place_random(&w, 3, 10).unwrap();
        assert_ne!(a.assignment, c.assignment);
    }
}
