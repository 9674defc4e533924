//! Combinatorial ranking over probe bounds and the three-step pipeline:
//! rank every variable, keep a small promising pool, solve the reduced
//! model exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::GsppError;
use crate::exact::{branch_and_bound, SolveOptions, SolveStatus};
use crate::instance::{AssignmentId, Cost, Instance, Solution, TaskId, INF_COST};
use crate::relaxation::{lb2, ProbeContext};

#[derive(Debug, Clone)]
pub struct RankingParams {
    /// Least fraction of the best ranked variables to keep, in [0, 1].
    pub sigma: f64,
    /// Least number of kept variables per task.
    pub mu: usize,
    /// Budget for the reduced exact solve.
    pub time_limit: Option<Duration>,
}

impl Default for RankingParams {
    fn default() -> Self {
        RankingParams {
            sigma: 0.1,
            mu: 2000,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStep {
    /// Whole tie group admitted by the fraction loop.
    Fraction { delta: Cost, count: usize },
    /// Variable admitted while topping task `task` up to the per-task floor.
    TopUp { task: TaskId, id: AssignmentId },
}

#[derive(Debug, Clone)]
pub struct RankedPool {
    /// Probe bound per assignment id.
    pub delta: BTreeMap<AssignmentId, Cost>,
    /// Kept variable ids, ascending.
    pub selected: Vec<AssignmentId>,
    pub trace: Vec<SelectionStep>,
}

/// Probe bound for every variable, computed concurrently over the immutable
/// instance.
pub fn rank_variables(inst: &Instance) -> Result<BTreeMap<AssignmentId, Cost>, GsppError> {
    let ctx = ProbeContext::new(inst)?;
    let pairs: Result<Vec<(AssignmentId, Cost)>, GsppError> = inst
        .assignments()
        .par_iter()
        .map(|a| Ok((a.id, ctx.probe(a.id)?)))
        .collect();
    Ok(pairs?.into_iter().collect())
}

/// Greedy selection over the ranked list: first admit whole tie groups of
/// minimum bound while the kept fraction is below `sigma` (a straddling
/// group may overshoot), then per task in ascending id top up from the
/// remaining list, smallest bound first, until each task holds `mu`
/// variables or runs out. Unusable variables (infinite bound) are never
/// taken.
pub fn select_variables(
    inst: &Instance,
    delta: &BTreeMap<AssignmentId, Cost>,
    params: &RankingParams,
) -> RankedPool {
    let total = inst.n_assignments();
    let mut list: Vec<(Cost, TaskId, AssignmentId)> = inst
        .assignments()
        .iter()
        .filter_map(|a| {
            let d = *delta.get(&a.id).unwrap_or(&INF_COST);
            (d < INF_COST).then_some((d, a.task, a.id))
        })
        .collect();
    list.sort_unstable();

    let mut selected: BTreeSet<AssignmentId> = BTreeSet::new();
    let mut per_task: Vec<usize> = vec![0; inst.n_tasks() as usize];
    let mut trace = Vec::new();
    let mut pos = 0;

    while pos < list.len() && (selected.len() as f64) < params.sigma * total as f64 {
        let d = list[pos].0;
        let group_end = list[pos..]
            .iter()
            .position(|&(w, _, _)| w != d)
            .map(|off| pos + off)
            .unwrap_or(list.len());
        for &(_, task, id) in &list[pos..group_end] {
            selected.insert(id);
            per_task[task as usize] += 1;
        }
        trace.push(SelectionStep::Fraction {
            delta: d,
            count: group_end - pos,
        });
        pos = group_end;
    }

    let leftovers = list.split_off(pos);
    for task in 0..inst.n_tasks() {
        if per_task[task as usize] >= params.mu {
            continue;
        }
        for &(_, t, id) in &leftovers {
            if t != task || selected.contains(&id) {
                continue;
            }
            selected.insert(id);
            per_task[task as usize] += 1;
            trace.push(SelectionStep::TopUp { task, id });
            if per_task[task as usize] >= params.mu {
                break;
            }
        }
    }

    RankedPool {
        delta: delta.clone(),
        selected: selected.into_iter().collect(),
        trace,
    }
}

#[derive(Debug, Clone)]
pub struct MatheuristicResult {
    pub solution: Option<Solution>,
    pub status: SolveStatus,
    pub ub: Option<Cost>,
    pub lb2: Cost,
    /// `(ub - lb2) / lb2`, when both are available and lb2 > 0.
    pub gap_vs_lb2: Option<f64>,
    pub kept: usize,
    pub total: usize,
    pub rank_seconds: f64,
    pub solve_seconds: f64,
    pub pool: RankedPool,
}

impl MatheuristicResult {
    pub fn kept_percent(&self) -> f64 {
        if self.total == 0 {
            100.0
        } else {
            100.0 * self.kept as f64 / self.total as f64
        }
    }
}

/// Rank, select, then solve the sub-model over the kept variables with the
/// exact solver. Any solution found is feasible for the full instance. An
/// infeasible reduced model is a reported outcome, not an error.
pub fn matheuristic_solve(
    inst: &Instance,
    params: &RankingParams,
) -> Result<MatheuristicResult, GsppError> {
    let lb = lb2(inst)?;

    let t0 = Instant::now();
    let delta = rank_variables(inst)?;
    let pool = select_variables(inst, &delta, params);
    let rank_seconds = t0.elapsed().as_secs_f64();

    let keep: BTreeSet<AssignmentId> = pool.selected.iter().copied().collect();
    let sub = inst.restrict_to(|id| keep.contains(&id));

    let t1 = Instant::now();
    let reduced_infeasible = (0..sub.n_tasks()).any(|t| sub.task_pool(t).is_empty());
    let res = if reduced_infeasible {
        None
    } else {
        Some(branch_and_bound(
            &sub,
            &SolveOptions {
                time_limit: params.time_limit,
                ..SolveOptions::default()
            },
        )?)
    };
    let solve_seconds = t1.elapsed().as_secs_f64();

    let (status, solution) = match res {
        None => (SolveStatus::Infeasible, None),
        Some(r) => (r.status, r.incumbent),
    };
    if let Some(sol) = &solution {
        let eval = crate::instance::evaluate(inst, &sol.chosen)?;
        debug_assert!(eval.feasible);
        debug_assert_eq!(eval.cost, sol.cost);
    }
    let ub = solution.as_ref().map(|s| s.cost);
    let gap_vs_lb2 = ub.and_then(|u| (lb > 0).then(|| (u - lb) as f64 / lb as f64));

    Ok(MatheuristicResult {
        solution,
        status,
        ub,
        lb2: lb,
        gap_vs_lb2,
        kept: pool.selected.len(),
        total: inst.n_assignments(),
        rank_seconds,
        solve_seconds,
        pool,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{brute_force_optima, Assignment};

    fn params(sigma: f64, mu: usize) -> RankingParams {
        RankingParams {
            sigma,
            mu,
            time_limit: None,
        }
    }

    #[test]
    fn e2_delta_values() {
        // cross-checked against filtered brute-force enumeration
        let delta = rank_variables(&fixtures::e2()).unwrap();
        let want = [(0, 21), (1, 22), (2, 22), (3, 21), (4, 23), (5, 21)];
        for (id, d) in want {
            assert_eq!(delta[&id], d, "delta({id})");
        }
    }

    #[test]
    fn one_task_delta_is_the_cost() {
        let inst = Instance::new(
            "t1",
            "generic",
            1,
            2,
            1,
            vec![],
            vec![
                Assignment::new(0, 0, 4, vec![0]),
                Assignment::new(1, 0, 7, vec![1]),
            ],
        );
        let delta = rank_variables(&inst).unwrap();
        assert_eq!(delta[&0], 4);
        assert_eq!(delta[&1], 7);
    }

    #[test]
    fn fraction_loop_takes_whole_tie_groups() {
        // four variables, bounds 10, 10, 12, 15; sigma 0.5 stops after the
        // tied pair since 2/4 is no longer below 0.5
        let inst = Instance::new(
            "tie",
            "generic",
            4,
            4,
            1,
            vec![],
            vec![
                Assignment::new(0, 0, 1, vec![0]),
                Assignment::new(1, 1, 1, vec![1]),
                Assignment::new(2, 2, 1, vec![2]),
                Assignment::new(3, 3, 1, vec![3]),
            ],
        );
        let delta: BTreeMap<_, _> =
            [(0, 10), (1, 10), (2, 12), (3, 15)].into_iter().collect();
        let pool = select_variables(&inst, &delta, &params(0.5, 0));
        assert_eq!(pool.selected, vec![0, 1]);
        assert_eq!(
            pool.trace,
            vec![SelectionStep::Fraction { delta: 10, count: 2 }]
        );
    }

    #[test]
    fn sigma_one_selects_everything() {
        let inst = fixtures::e2();
        let delta = rank_variables(&inst).unwrap();
        let pool = select_variables(&inst, &delta, &params(1.0, 0));
        assert_eq!(pool.selected.len(), inst.n_assignments());
    }

    #[test]
    fn sigma_zero_mu_one_keeps_one_minimum_per_task() {
        let inst = fixtures::e2();
        let delta = rank_variables(&inst).unwrap();
        let pool = select_variables(&inst, &delta, &params(0.0, 1));
        // minima per task: a (21 < 22), d (21 < 22), f (21 < 23)
        assert_eq!(pool.selected, vec![0, 3, 5]);
    }

    #[test]
    fn infinite_delta_is_never_selected() {
        let inst = fixtures::e2();
        let mut delta = rank_variables(&inst).unwrap();
        delta.insert(0, INF_COST);
        let pool = select_variables(&inst, &delta, &params(1.0, 10));
        assert!(!pool.selected.contains(&0));
        assert_eq!(pool.selected.len(), 5);
    }

    #[test]
    fn sigma_one_reaches_the_optimum() {
        for inst in [fixtures::e1(), fixtures::e2()] {
            let z = brute_force_optima(&inst).unwrap().z().unwrap();
            let r = matheuristic_solve(&inst, &params(1.0, 0)).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal);
            assert_eq!(r.ub, Some(z));
        }
    }

    #[test]
    fn e2_sigma_zero_mu_one_is_feasible_at_the_optimum() {
        let r = matheuristic_solve(&fixtures::e2(), &params(0.0, 1)).unwrap();
        assert_eq!(r.kept, 3);
        assert_eq!(r.ub, Some(21));
    }

    #[test]
    fn e2_sigma_zero_mu_two_hits_the_optimum() {
        let r = matheuristic_solve(&fixtures::e2(), &params(0.0, 2)).unwrap();
        assert_eq!(r.kept, 6);
        assert_eq!(r.ub, Some(21));
    }

    #[test]
    fn infeasible_reduced_model_is_reported() {
        // both tasks' cheapest-bound columns sit on the same tuple, so the
        // mu=1 pool cannot be completed
        let inst = Instance::new(
            "clash",
            "generic",
            2,
            3,
            1,
            vec![],
            vec![
                Assignment::new(0, 0, 1, vec![0]),
                Assignment::new(1, 0, 5, vec![1]),
                Assignment::new(2, 1, 1, vec![0]),
                Assignment::new(3, 1, 5, vec![2]),
            ],
        );
        let delta = rank_variables(&inst).unwrap();
        assert_eq!(delta[&0], delta[&2]);
        let r = matheuristic_solve(&inst, &params(0.0, 1)).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.solution.is_none());
    }

    #[test]
    fn pool_grows_with_sigma_and_mu() {
        let inst = fixtures::e2();
        let delta = rank_variables(&inst).unwrap();
        let base = select_variables(&inst, &delta, &params(0.3, 1));
        for p in [params(0.6, 1), params(0.3, 2)] {
            let bigger = select_variables(&inst, &delta, &p);
            for id in &base.selected {
                assert!(bigger.selected.contains(id));
            }
        }
    }
}
