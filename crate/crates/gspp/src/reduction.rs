//! Variable-reduction preprocessing: probe every assignment against a known
//! upper bound and drop those whose probe bound strictly exceeds it. All
//! optimal solutions survive as long as the upper bound is genuine.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::GsppError;
use crate::instance::{AssignmentId, Cost, Instance};
use crate::relaxation::ProbeContext;

#[derive(Debug, Clone)]
pub struct ReductionResult {
    /// Surviving assignments, ids preserved.
    pub reduced: Instance,
    /// Removed assignments with the probe bound that condemned them.
    pub removed: Vec<(AssignmentId, Cost)>,
    pub ub_used: Cost,
    pub vars_before: usize,
    pub vars_after: usize,
    pub probe_seconds: f64,
    pub passes: usize,
}

impl ReductionResult {
    pub fn kept_percent(&self) -> f64 {
        if self.vars_before == 0 {
            100.0
        } else {
            100.0 * self.vars_after as f64 / self.vars_before as f64
        }
    }
}

/// Single pass over the original pool: probes are computed against the full
/// instance, so the removal set is order-independent and deterministic.
/// Strict inequality per the elimination rule; ties survive.
pub fn reduce(inst: &Instance, ub: Cost) -> Result<ReductionResult, GsppError> {
    reduce_with_mode(inst, ub, false)
}

/// With `fixpoint`, passes repeat on the shrinking instance until no
/// further removal occurs. Later passes see stronger probe graphs, so this
/// can only remove more; it stays sound for a true upper bound.
pub fn reduce_with_mode(
    inst: &Instance,
    ub: Cost,
    fixpoint: bool,
) -> Result<ReductionResult, GsppError> {
    let vars_before = inst.n_assignments();
    let t0 = Instant::now();
    let mut current = inst.clone();
    let mut removed: Vec<(AssignmentId, Cost)> = Vec::new();
    let mut passes = 0;
    loop {
        passes += 1;
        let pass_removed = one_pass(&current, ub)?;
        if pass_removed.is_empty() {
            break;
        }
        let drop: std::collections::HashSet<AssignmentId> =
            pass_removed.iter().map(|&(id, _)| id).collect();
        current = current.restrict_to(|id| !drop.contains(&id));
        removed.extend(pass_removed);
        for task in 0..current.n_tasks() {
            if current.task_pool(task).is_empty() {
                return Err(GsppError::ReductionEmptiedTask { task, ub });
            }
        }
        if !fixpoint {
            break;
        }
    }
    removed.sort_unstable_by_key(|&(id, _)| id);
    let vars_after = current.n_assignments();
    Ok(ReductionResult {
        reduced: current,
        removed,
        ub_used: ub,
        vars_before,
        vars_after,
        probe_seconds: t0.elapsed().as_secs_f64(),
        passes,
    })
}

fn one_pass(inst: &Instance, ub: Cost) -> Result<Vec<(AssignmentId, Cost)>, GsppError> {
    let ctx = ProbeContext::new(inst)?;
    let probes: Result<Vec<(AssignmentId, Cost)>, GsppError> = inst
        .assignments()
        .par_iter()
        .map(|a| Ok((a.id, ctx.probe(a.id)?)))
        .collect();
    let mut out: Vec<(AssignmentId, Cost)> = probes?
        .into_iter()
        .filter(|&(_, bound)| bound > ub)
        .collect();
    out.sort_unstable_by_key(|&(id, _)| id);
    Ok(out)
}

/// All probe bounds of an instance, used by ranking and reports.
pub fn probe_all(inst: &Instance) -> Result<Vec<(AssignmentId, Cost)>, GsppError> {
    let ctx = ProbeContext::new(inst)?;
    inst.assignments()
        .par_iter()
        .map(|a| Ok((a.id, ctx.probe(a.id)?)))
        .collect()
}
