//! Exact depth-first branch-and-bound over tasks, pruned with the residual
//! matching bound, plus LP-format model export for external cross-checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::error::GsppError;
use crate::instance::{
    evaluate, footprints_disjoint, CapId, Cost, Instance, ResidualCompat,
    Solution, TaskId, INF_COST,
};
use crate::matching::{max_weight_matching, WeightedGraph};
use crate::relaxation::cheapest_pair;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub time_limit: Option<Duration>,
    /// Recompute the residual matching bound every `bound_interval` levels;
    /// in between, the cheaper sum-of-residual-minima bound is used. Both
    /// are valid lower bounds, so pruning stays safe either way.
    pub bound_interval: usize,
    /// Disable to explore the full tree (bound-pruning safety tests).
    pub prune: bool,
    /// Optional warm start, e.g. from the matheuristic.
    pub seed_incumbent: Option<Solution>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            time_limit: None,
            bound_interval: 1,
            prune: true,
            seed_incumbent: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    FeasibleTimeout,
    Infeasible,
    NoIncumbentTimeout,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleTimeout => "feasible-timeout",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NoIncumbentTimeout => "no-incumbent-timeout",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub incumbent: Option<Solution>,
    pub best_bound: Cost,
    pub nodes: u64,
    pub seconds: f64,
}

struct Search<'a> {
    inst: &'a Instance,
    /// Tasks in branching order: fewest options first.
    task_order: Vec<TaskId>,
    opts: &'a SolveOptions,
    deadline: Option<Instant>,
    incumbent: Option<(BTreeMap<TaskId, u32>, Cost)>,
    /// Minimum bound among subtrees abandoned on timeout.
    open_bound_min: Cost,
    nodes: u64,
    timed_out: bool,
    /// Remaining capacity per cap id (dense).
    remaining: Vec<u64>,
}

pub fn branch_and_bound(inst: &Instance, opts: &SolveOptions) -> Result<SolveResult, GsppError> {
    let start = Instant::now();
    let mut task_order: Vec<TaskId> = (0..inst.n_tasks()).collect();
    task_order.sort_by_key(|&t| (inst.task_pool(t).len(), t));

    let cap_dim = inst.caps().iter().map(|c| c.id as usize + 1).max().unwrap_or(0);
    let mut remaining = vec![u64::MAX; cap_dim];
    for c in inst.caps() {
        remaining[c.id as usize] = c.capacity;
    }

    let mut search = Search {
        inst,
        task_order,
        opts,
        deadline: opts.time_limit.map(|d| start + d),
        incumbent: None,
        open_bound_min: INF_COST,
        nodes: 0,
        timed_out: false,
        remaining,
    };

    if let Some(seed) = &opts.seed_incumbent {
        let eval = evaluate(inst, &seed.chosen)?;
        if eval.feasible {
            let chosen = seed
                .chosen
                .iter()
                .map(|(&t, &id)| (t, inst.index_of(id).unwrap()))
                .collect();
            search.incumbent = Some((chosen, eval.cost));
        }
    }

    // Initial per-task candidate pools, in branching order, already sorted
    // by ascending cost.
    let pools: Vec<Vec<u32>> = search
        .task_order
        .iter()
        .map(|&t| inst.task_pool(t).to_vec())
        .collect();

    let mut partial: Vec<(TaskId, u32)> = Vec::new();
    search.dfs(0, 0, &pools, &mut partial);

    let seconds = start.elapsed().as_secs_f64();
    let (status, incumbent, best_bound) = match (&search.incumbent, search.timed_out) {
        (Some((chosen, cost)), false) => {
            (SolveStatus::Optimal, Some(solution_of(inst, chosen, *cost)), *cost)
        }
        (None, false) => (SolveStatus::Infeasible, None, INF_COST),
        (Some((chosen, cost)), true) => (
            SolveStatus::FeasibleTimeout,
            Some(solution_of(inst, chosen, *cost)),
            search.open_bound_min.min(*cost),
        ),
        (None, true) => (SolveStatus::NoIncumbentTimeout, None, search.open_bound_min),
    };
    Ok(SolveResult {
        status,
        incumbent,
        best_bound,
        nodes: search.nodes,
        seconds,
    })
}

fn solution_of(inst: &Instance, chosen: &BTreeMap<TaskId, u32>, cost: Cost) -> Solution {
    Solution {
        chosen: chosen
            .iter()
            .map(|(&t, &idx)| (t, inst.assignment(idx).id))
            .collect(),
        cost,
        feasible: true,
    }
}

impl Search<'_> {
    fn incumbent_cost(&self) -> Cost {
        self.incumbent.as_ref().map(|&(_, c)| c).unwrap_or(INF_COST)
    }

    /// Sum of cheapest remaining candidates; `INF_COST` when some pool is
    /// already empty.
    fn trivial_residual(&self, pools: &[Vec<u32>], depth: usize) -> Cost {
        let mut sum = 0;
        for pool in &pools[depth..] {
            match pool.first() {
                Some(&idx) => sum += self.inst.assignment(idx).cost,
                None => return INF_COST,
            }
        }
        sum
    }

    /// Residual matching bound over the remaining tasks' filtered pools,
    /// with pairwise capacity checks against the remaining budget.
    fn matching_residual(&self, pools: &[Vec<u32>], depth: usize) -> Cost {
        let rest = &pools[depth..];
        let m = rest.len();
        if m <= 1 {
            return self.trivial_residual(pools, depth);
        }
        let oracle = ResidualCompat {
            remaining: &self.remaining,
        };
        let odd = m % 2 == 1;
        let mut g = WeightedGraph::new(m + usize::from(odd));
        let mut admit = |_: u32| true;
        for u in 0..m {
            for v in u + 1..m {
                let (w, _) = cheapest_pair(self.inst, &oracle, &rest[u], &rest[v], &mut admit);
                if w >= INF_COST {
                    return INF_COST;
                }
                g.add_edge(u, v, w).expect("residual edge");
            }
        }
        if odd {
            for (u, pool) in rest.iter().enumerate() {
                match pool.first() {
                    Some(&idx) => g
                        .add_edge(u, m, self.inst.assignment(idx).cost)
                        .expect("residual artificial edge"),
                    None => return INF_COST,
                }
            }
        }
        max_weight_matching(&g).weight
    }

    fn dfs(
        &mut self,
        depth: usize,
        partial_cost: Cost,
        pools: &[Vec<u32>],
        partial: &mut Vec<(TaskId, u32)>,
    ) {
        self.nodes += 1;
        let node_bound = || -> Cost { partial_cost };

        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                self.timed_out = true;
                self.open_bound_min = self.open_bound_min.min(node_bound());
                return;
            }
        }

        if depth == self.task_order.len() {
            if partial_cost < self.incumbent_cost() {
                let chosen: BTreeMap<TaskId, u32> = partial.iter().copied().collect();
                self.incumbent = Some((chosen, partial_cost));
            }
            return;
        }

        let residual = if self.opts.bound_interval > 0 && depth % self.opts.bound_interval == 0 {
            self.matching_residual(pools, depth)
        } else {
            self.trivial_residual(pools, depth)
        };
        if residual >= INF_COST {
            return; // no feasible completion
        }
        let bound = partial_cost + residual;
        if self.opts.prune && bound >= self.incumbent_cost() {
            return;
        }

        let task = self.task_order[depth];
        let candidates = pools[depth].clone();
        for idx in candidates {
            if self.timed_out {
                self.open_bound_min = self.open_bound_min.min(bound);
                return;
            }
            let a = self.inst.assignment(idx);
            // aggregate capacity feasibility of the extended partial
            if a
                .cap_usage
                .iter()
                .any(|&(c, u)| u > self.remaining[c as usize])
            {
                continue;
            }
            for &(c, u) in &a.cap_usage {
                self.remaining[c as usize] -= u;
            }
            // filter the deeper pools: disjoint from the choice, and own
            // usage within the budget that remains after it
            let mut child_pools: Vec<Vec<u32>> = pools.to_vec();
            for pool in child_pools.iter_mut().skip(depth + 1) {
                pool.retain(|&other| {
                    let b = self.inst.assignment(other);
                    footprints_disjoint(a, b)
                        && b.cap_usage
                            .iter()
                            .all(|&(c, u)| u <= self.remaining[c as usize])
                });
            }
            partial.push((task, idx));
            self.dfs(depth + 1, partial_cost + a.cost, &child_pools, partial);
            partial.pop();
            for &(c, u) in &a.cap_usage {
                self.remaining[c as usize] += u;
            }
        }
    }
}

/// Render the binary program in the standard LP model text format, with
/// deterministic ordering and `y_<id>` variable naming.
pub fn export_lp(inst: &Instance) -> String {
    let scale = inst.scale();
    let coef = |c: Cost| crate::relaxation::format_cost(c, scale);
    let mut out = String::new();
    let _ = writeln!(out, "\\ instance {}", inst.name);
    out.push_str("Minimize\n obj:");
    let mut first = true;
    for a in inst.assignments() {
        let _ = write!(out, "{} {} y_{}", if first { "" } else { " +" }, coef(a.cost), a.id);
        first = false;
    }
    out.push_str("\nSubject To\n");
    for t in 0..inst.n_tasks() {
        let mut ids: Vec<_> = inst
            .assignments()
            .iter()
            .filter(|a| a.task == t)
            .map(|a| a.id)
            .collect();
        ids.sort_unstable();
        let terms: Vec<String> = ids.iter().map(|id| format!("y_{id}")).collect();
        let _ = writeln!(out, " task_{t}: {} = 1", terms.join(" + "));
    }
    let mut tuple_users: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for a in inst.assignments() {
        for &t in &a.footprint {
            tuple_users.entry(t).or_default().push(a.id);
        }
    }
    for (tuple, mut ids) in tuple_users {
        ids.sort_unstable();
        let terms: Vec<String> = ids.iter().map(|id| format!("y_{id}")).collect();
        let _ = writeln!(out, " tuple_{tuple}: {} <= 1", terms.join(" + "));
    }
    let mut cap_users: BTreeMap<CapId, Vec<(u32, u64)>> = BTreeMap::new();
    for a in inst.assignments() {
        for &(c, u) in &a.cap_usage {
            if u > 0 {
                cap_users.entry(c).or_default().push((a.id, u));
            }
        }
    }
    for (cap, mut users) in cap_users {
        if let Some(capacity) = inst.capacity_of(cap) {
            users.sort_unstable();
            let terms: Vec<String> = users
                .iter()
                .map(|(id, u)| format!("{u} y_{id}"))
                .collect();
            let _ = writeln!(out, " cap_{cap}: {} <= {capacity}", terms.join(" + "));
        }
    }
    out.push_str("Binary\n");
    for a in inst.assignments() {
        let _ = writeln!(out, " y_{}", a.id);
    }
    out.push_str("End\n");
    out
}

pub fn export_lp_file(inst: &Instance, path: &std::path::Path) -> Result<(), GsppError> {
    std::fs::write(path, export_lp(inst))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{brute_force_optima, Assignment, Instance};

    #[test]
    fn solves_the_fixtures_to_optimality() {
        for inst in [fixtures::e1(), fixtures::e2()] {
            let z = brute_force_optima(&inst).unwrap().z().unwrap();
            let res = branch_and_bound(&inst, &SolveOptions::default()).unwrap();
            assert_eq!(res.status, SolveStatus::Optimal);
            assert_eq!(res.incumbent.unwrap().cost, z);
            assert_eq!(res.best_bound, z);
        }
    }

    #[test]
    fn detects_infeasibility() {
        // e2 with every non-r1 assignment removed: three tasks fighting r1
        let inst = fixtures::e2().restrict_to(|id| matches!(id, 0 | 2 | 4));
        let res = branch_and_bound(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
        assert!(res.incumbent.is_none());
    }

    #[test]
    fn pruning_does_not_change_the_optimum() {
        let inst = fixtures::e2();
        let pruned = branch_and_bound(&inst, &SolveOptions::default()).unwrap();
        let full = branch_and_bound(
            &inst,
            &SolveOptions {
                prune: false,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        assert_eq!(
            pruned.incumbent.unwrap().cost,
            full.incumbent.unwrap().cost
        );
        assert!(full.nodes >= pruned.nodes);
    }

    #[test]
    fn seed_incumbent_is_honored() {
        let inst = fixtures::e1();
        let seed = Solution {
            chosen: [(0, 0), (1, 3)].into_iter().collect(), // a11 + a22 = 14
            cost: 14,
            feasible: true,
        };
        let res = branch_and_bound(
            &inst,
            &SolveOptions {
                seed_incumbent: Some(seed),
                ..SolveOptions::default()
            },
        )
        .unwrap();
        assert_eq!(res.incumbent.unwrap().cost, 12);
    }

    #[test]
    fn lp_export_counts_for_e1() {
        let lp = export_lp(&fixtures::e1());
        assert_eq!(lp.matches("task_").count(), 2);
        assert_eq!(lp.matches("tuple_").count(), 2);
        assert_eq!(lp.lines().filter(|l| l.starts_with(" y_")).count(), 4);
        assert!(!lp.contains("cap_"));
    }

    #[test]
    fn lp_export_counts_for_e2() {
        let lp = export_lp(&fixtures::e2());
        assert_eq!(lp.matches("task_").count(), 3);
        assert_eq!(lp.matches("tuple_").count(), 4);
        assert_eq!(lp.lines().filter(|l| l.starts_with(" y_")).count(), 6);
    }

    #[test]
    fn lp_export_emits_capacity_rows() {
        let inst = Instance::new(
            "cap",
            "generic",
            2,
            2,
            1,
            vec![crate::instance::CapacitatedResource { id: 0, capacity: 5 }],
            vec![
                Assignment::new(0, 0, 1, vec![0]).with_cap_usage(vec![(0, 3)]),
                Assignment::new(1, 1, 1, vec![1]).with_cap_usage(vec![(0, 3)]),
            ],
        );
        let lp = export_lp(&inst);
        assert!(lp.contains("cap_0: 3 y_0 + 3 y_1 <= 5"));
    }
}
