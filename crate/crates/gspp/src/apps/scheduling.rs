//! Parallel machine scheduling with step-deteriorating jobs, encoded as a
//! partitioning instance over (machine, slot) tuples. Slots are 1-indexed;
//! an assignment's cost is its completion slot, so the optimum minimizes
//! total completion time.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GsppError;
use crate::instance::{Assignment, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    /// Base processing time.
    pub a: u32,
    /// Extra processing when started after the deteriorating date.
    pub b: u32,
    /// Deteriorating date: starts at slot <= d keep the base time.
    pub d: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedParams {
    pub machines: u32,
    pub horizon: u32,
    pub jobs: Vec<Job>,
}

impl SchedParams {
    pub fn from_toml(text: &str) -> Result<Self, GsppError> {
        toml::from_str(text).map_err(|e| GsppError::Parse {
            what: "sched params",
            line: 0,
            reason: e.to_string(),
        })
    }

    fn check(&self) -> Result<(), GsppError> {
        if self.machines == 0 || self.horizon == 0 {
            return Err(GsppError::InvalidInstance(
                "machines and horizon must be positive".into(),
            ));
        }
        for (i, j) in self.jobs.iter().enumerate() {
            if j.a == 0 || j.d == 0 || j.d > self.horizon {
                return Err(GsppError::InvalidInstance(format!(
                    "job {i}: need a >= 1 and 1 <= d <= horizon"
                )));
            }
        }
        Ok(())
    }
}

/// One task per job; one assignment per (machine, start slot) whose
/// processing fits in the horizon. Footprint covers the occupied
/// (machine, slot) tuples; cost is the completion slot.
pub fn enumerate_scheduling(p: &SchedParams) -> Result<Instance, GsppError> {
    p.check()?;
    let h = p.horizon;
    let mut assignments = Vec::new();
    let mut id = 0;
    for (job_idx, job) in p.jobs.iter().enumerate() {
        let before = assignments.len();
        for machine in 0..p.machines {
            for s in 1..=h {
                let proc = if s <= job.d { job.a } else { job.a + job.b };
                let finish = s + proc - 1;
                if finish > h {
                    continue;
                }
                let footprint = (s..=finish).map(|t| machine * h + (t - 1)).collect();
                assignments.push(Assignment::new(
                    id,
                    job_idx as u32,
                    finish as i64,
                    footprint,
                ));
                id += 1;
            }
        }
        if assignments.len() == before {
            return Err(GsppError::InvalidInstance(format!(
                "job {job_idx}: no feasible start slot"
            )));
        }
    }
    Ok(Instance::new(
        "sched",
        "scheduling",
        p.jobs.len() as u32,
        p.machines * h,
        1,
        vec![],
        assignments,
    ))
}

/// Random job sampler; ranges are inclusive `[lo, hi]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedGen {
    pub jobs: u32,
    pub machines: u32,
    pub horizon: u32,
    pub a: [u32; 2],
    pub b: [u32; 2],
    pub d: [u32; 2],
}

impl SchedGen {
    pub fn from_toml(text: &str) -> Result<Self, GsppError> {
        toml::from_str(text).map_err(|e| GsppError::Parse {
            what: "sched generator params",
            line: 0,
            reason: e.to_string(),
        })
    }
}

pub fn sample_sched(gen: &SchedGen, seed: u64) -> SchedParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs = (0..gen.jobs)
        .map(|_| Job {
            a: rng.random_range(gen.a[0].max(1)..=gen.a[1].max(1)),
            b: rng.random_range(gen.b[0]..=gen.b[1]),
            d: rng
                .random_range(gen.d[0].max(1)..=gen.d[1].min(gen.horizon).max(1)),
        })
        .collect();
    SchedParams {
        machines: gen.machines,
        horizon: gen.horizon,
        jobs,
    }
}
