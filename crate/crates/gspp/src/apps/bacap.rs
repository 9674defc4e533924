//! Berth allocation with crane assignment: vessels occupy time-by-quay
//! rectangles and draw cranes from a per-slot pool of K. The per-slot crane
//! resources double as the tightened pairwise oracle: two rectangles may be
//! disjoint yet incompatible because their combined crane demand in a shared
//! time slot exceeds K.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GsppError;
use crate::instance::{Assignment, CapacitatedResource, Cost, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vessel {
    pub length: u32,
    /// Total crane-hours to discharge.
    pub workload: u64,
    /// Earliest admissible start slot (0-based).
    pub arrival: u32,
    pub desired_berth: u32,
    /// Slot by which the vessel should have left; lateness is charged.
    pub due: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BacapParams {
    pub vessels: u32,
    pub time_slots: u32,
    pub quay_length: u32,
    /// Cranes available per time slot.
    pub cranes: u64,
    /// Cost weights: crane-hours, berth deviation, start delay, tardiness.
    pub alpha: Cost,
    pub beta: Cost,
    pub gamma: Cost,
    pub delta: Cost,
    /// Admissible crane counts per assignment.
    pub crane_options: Vec<u64>,
    /// Sampling ranges, inclusive.
    pub length: [u32; 2],
    pub workload: [u64; 2],
    pub arrival: [u32; 2],
    /// Due slack beyond the earliest possible finish.
    pub slack: u32,
}

impl BacapParams {
    pub fn from_toml(text: &str) -> Result<Self, GsppError> {
        toml::from_str(text).map_err(|e| GsppError::Parse {
            what: "bacap params",
            line: 0,
            reason: e.to_string(),
        })
    }

    fn check(&self) -> Result<(), GsppError> {
        if self.time_slots == 0 || self.quay_length == 0 || self.cranes == 0 {
            return Err(GsppError::InvalidInstance(
                "time_slots, quay_length and cranes must be positive".into(),
            ));
        }
        let qs = self.sorted_options();
        if qs.is_empty() {
            return Err(GsppError::InvalidInstance(
                "no admissible crane count within the per-slot pool".into(),
            ));
        }
        Ok(())
    }

    fn sorted_options(&self) -> Vec<u64> {
        let mut qs: Vec<u64> = self
            .crane_options
            .iter()
            .copied()
            .filter(|&q| q >= 1 && q <= self.cranes)
            .collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }
}

pub fn sample_vessels(p: &BacapParams, seed: u64) -> Vec<Vessel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_q = *p.sorted_options().last().unwrap_or(&1);
    (0..p.vessels)
        .map(|_| {
            let length = rng
                .random_range(p.length[0].max(1)..=p.length[1].max(1))
                .min(p.quay_length);
            let workload = rng.random_range(p.workload[0].max(1)..=p.workload[1].max(1));
            let arrival = rng
                .random_range(p.arrival[0]..=p.arrival[1])
                .min(p.time_slots - 1);
            let desired_berth = rng.random_range(0..=p.quay_length - length);
            let min_dur = workload.div_ceil(max_q) as u32;
            let due = (arrival + min_dur + rng.random_range(0..=p.slack)).min(p.time_slots);
            Vessel {
                length,
                workload,
                arrival,
                desired_berth,
                due,
            }
        })
        .collect()
}

/// Encode explicit vessels. Tuples cover the time-by-quay grid (slot t,
/// position x maps to t * L + x); one capacitated resource per time slot
/// carries the crane pool.
pub fn enumerate_bacap_from(
    p: &BacapParams,
    vessels: &[Vessel],
    name: impl Into<String>,
) -> Result<Instance, GsppError> {
    p.check()?;
    let (t_max, l) = (p.time_slots, p.quay_length);
    let caps = (0..t_max)
        .map(|t| CapacitatedResource {
            id: t,
            capacity: p.cranes,
        })
        .collect();
    let qs = p.sorted_options();

    let mut assignments = Vec::new();
    let mut id = 0;
    for (v_idx, v) in vessels.iter().enumerate() {
        let before = assignments.len();
        if v.length > l || v.workload == 0 {
            return Err(GsppError::InvalidInstance(format!(
                "vessel {v_idx}: bad length or workload"
            )));
        }
        for &q in &qs {
            let dur = v.workload.div_ceil(q) as u32;
            if dur == 0 || v.arrival + dur > t_max {
                continue;
            }
            for s in v.arrival..=t_max - dur {
                for b in 0..=l - v.length {
                    let mut footprint = Vec::with_capacity((dur * v.length) as usize);
                    for t in s..s + dur {
                        for x in b..b + v.length {
                            footprint.push(t * l + x);
                        }
                    }
                    let usage = (s..s + dur).map(|t| (t, q)).collect();
                    let dev = (b as Cost - v.desired_berth as Cost).abs();
                    let delay = (s - v.arrival) as Cost;
                    let tardy = ((s + dur) as Cost - v.due as Cost).max(0);
                    let cost = p.alpha * q as Cost * dur as Cost
                        + p.beta * dev
                        + p.gamma * delay
                        + p.delta * tardy;
                    assignments.push(
                        Assignment::new(id, v_idx as u32, cost, footprint)
                            .with_cap_usage(usage),
                    );
                    id += 1;
                }
            }
        }
        if assignments.len() == before {
            return Err(GsppError::InvalidInstance(format!(
                "vessel {v_idx}: no feasible placement"
            )));
        }
    }
    Ok(Instance::new(
        name,
        "bacap",
        vessels.len() as u32,
        t_max * l,
        1,
        caps,
        assignments,
    ))
}

/// Sample vessels under the given seed and encode them.
pub fn enumerate_bacap(p: &BacapParams, seed: u64) -> Result<Instance, GsppError> {
    let vessels = sample_vessels(p, seed);
    enumerate_bacap_from(p, &vessels, format!("bacap_s{seed}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{branch_and_bound, SolveOptions, SolveStatus};
    use crate::instance::validate_instance;
    use crate::relaxation::lb2;

    fn base_params() -> BacapParams {
        BacapParams {
            vessels: 1,
            time_slots: 6,
            quay_length: 4,
            cranes: 4,
            alpha: 1,
            beta: 0,
            gamma: 0,
            delta: 0,
            crane_options: vec![2, 3],
            length: [1, 2],
            workload: [4, 8],
            arrival: [0, 2],
            slack: 2,
        }
    }

    #[test]
    fn durations_follow_ceiling_arithmetic() {
        let p = base_params();
        let v = Vessel {
            length: 2,
            workload: 6,
            arrival: 0,
            desired_berth: 0,
            due: 6,
        };
        let inst = enumerate_bacap_from(&p, &[v], "t").unwrap();
        // q=2 -> dur 3, starts 0..=3, 3 positions; q=3 -> dur 2, starts 0..=4
        assert_eq!(inst.n_assignments(), 4 * 3 + 5 * 3);
        for a in inst.assignments() {
            let q = a.usage_of(a.cap_usage[0].0);
            let dur = a.cap_usage.len() as u64;
            assert!(q * dur >= 6);
            assert_eq!(a.cost, (q * dur) as i64); // alpha only
        }
    }

    #[test]
    fn footprints_stay_inside_the_grid() {
        let p = BacapParams {
            vessels: 4,
            ..base_params()
        };
        for seed in 0..10 {
            let inst = enumerate_bacap(&p, seed).unwrap();
            assert!(validate_instance(&inst).is_ok());
            for a in inst.assignments() {
                for &t in &a.footprint {
                    assert!(t < inst.n_tuples());
                }
                for &(_, u) in &a.cap_usage {
                    assert!(u <= p.cranes);
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = BacapParams {
            vessels: 3,
            ..base_params()
        };
        let a = enumerate_bacap(&p, 42).unwrap();
        let b = enumerate_bacap(&p, 42).unwrap();
        assert_eq!(
            crate::fileformat::write_instance(&a),
            crate::fileformat::write_instance(&b)
        );
        let c = enumerate_bacap(&p, 43).unwrap();
        assert_ne!(
            crate::fileformat::write_instance(&a),
            crate::fileformat::write_instance(&c)
        );
    }

    #[test]
    fn crane_pool_infeasibility_is_caught_pairwise() {
        // two vessels on disjoint quay halves, both forced to use 3 cranes
        // over the full horizon; K = 5 < 6, so no pair is compatible even
        // though the rectangles never touch
        let p = BacapParams {
            vessels: 2,
            time_slots: 2,
            quay_length: 2,
            cranes: 5,
            crane_options: vec![3],
            length: [1, 1],
            workload: [6, 6],
            arrival: [0, 0],
            slack: 0,
            ..base_params()
        };
        let vessels = [
            Vessel {
                length: 1,
                workload: 6,
                arrival: 0,
                desired_berth: 0,
                due: 2,
            },
            Vessel {
                length: 1,
                workload: 6,
                arrival: 0,
                desired_berth: 1,
                due: 2,
            },
        ];
        let inst = enumerate_bacap_from(&p, &vessels, "clash").unwrap();
        assert!(lb2(&inst).is_err());
        let res = branch_and_bound(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
    }

    #[test]
    fn params_parse_from_toml() {
        let text = "vessels = 2\ntime_slots = 6\nquay_length = 4\ncranes = 4\n\
                    alpha = 1\nbeta = 1\ngamma = 1\ndelta = 1\n\
                    crane_options = [2, 3]\nlength = [1, 2]\nworkload = [4, 8]\n\
                    arrival = [0, 2]\nslack = 2\n";
        let p = BacapParams::from_toml(text).unwrap();
        assert_eq!(p.crane_options, vec![2, 3]);
        assert_eq!(p.workload, [4, 8]);
    }
}
