//! Combinatorial dual bounds from maximum-weight matchings: the conflict
//! graph G1 on best-per-task assignments, the complete cheapest-compatible-
//! pair graph G2, and the probing variant with one assignment held fixed.

use std::time::Instant;

use crate::error::GsppError;
use crate::instance::{
    Assignment, AssignmentId, CompatOracle, Cost, DefaultCompat, Instance, TaskId, INF_COST,
};
use crate::matching::{max_weight_matching, WeightedGraph};

/// Best and second-best assignment cost per task. `second` is [`INF_COST`]
/// for singleton pools.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskCostProfile {
    pub best: Cost,
    pub second: Cost,
    /// Index (into the instance assignment slice) of the argmin assignment.
    pub argmin_idx: u32,
    pub argmin_id: AssignmentId,
}

pub fn cost_profiles(inst: &Instance) -> Vec<TaskCostProfile> {
    (0..inst.n_tasks())
        .map(|t| {
            let pool = inst.task_pool(t);
            let first = inst.assignment(pool[0]);
            let second = pool
                .get(1)
                .map(|&i| inst.assignment(i).cost)
                .unwrap_or(INF_COST);
            TaskCostProfile {
                best: first.cost,
                second,
                argmin_idx: pool[0],
                argmin_id: first.id,
            }
        })
        .collect()
}

/// Sum of the cheapest assignment per task: the bound obtained by dropping
/// every packing constraint.
pub fn trivial_bound(inst: &Instance) -> Cost {
    cost_profiles(inst).iter().map(|p| p.best).sum()
}

/// Conflict graph over tasks: edge (i,j) iff the argmin assignments of i
/// and j are incompatible, weighted by the smaller second-best delta.
pub fn build_g1(inst: &Instance) -> Result<WeightedGraph, GsppError> {
    build_g1_with(inst, &DefaultCompat)
}

pub fn build_g1_with<O: CompatOracle>(
    inst: &Instance,
    oracle: &O,
) -> Result<WeightedGraph, GsppError> {
    let profiles = cost_profiles(inst);
    let n = inst.n_tasks() as usize;
    let mut g = WeightedGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let ai = inst.assignment(profiles[i].argmin_idx);
            let aj = inst.assignment(profiles[j].argmin_idx);
            if oracle.compatible(inst, ai, aj) {
                continue;
            }
            let di = profiles[i].second - profiles[i].best;
            let dj = profiles[j].second - profiles[j].best;
            let w = di.min(dj);
            if w >= INF_COST {
                // Two singleton tasks whose only assignments clash: no
                // feasible solution exists.
                return Err(GsppError::SingletonClash {
                    a: i as TaskId,
                    b: j as TaskId,
                });
            }
            g.add_edge(i, j, w).expect("G1 edge");
        }
    }
    Ok(g)
}

pub fn lb1(inst: &Instance) -> Result<Cost, GsppError> {
    let g = build_g1(inst)?;
    Ok(max_weight_matching(&g).weight + trivial_bound(inst))
}

/// G2 (or its probing restriction) together with the vertex-to-task map.
#[derive(Debug, Clone)]
pub struct G2Graph {
    pub graph: WeightedGraph,
    /// Task owning each graph vertex; the artificial vertex (if any) is the
    /// last one and has no entry here.
    pub vertex_tasks: Vec<TaskId>,
    pub artificial: Option<usize>,
}

/// Cheapest compatible pair over two cost-sorted pools. `admit` filters
/// individual assignments (used by probing); both pools being sorted lets
/// the scan stop as soon as cost sums cannot improve.
pub(crate) fn cheapest_pair<O: CompatOracle>(
    inst: &Instance,
    oracle: &O,
    pool_i: &[u32],
    pool_j: &[u32],
    admit: &mut impl FnMut(u32) -> bool,
) -> (Cost, Option<(u32, u32)>) {
    let mut best = INF_COST;
    let mut witness = None;
    if pool_i.is_empty() || pool_j.is_empty() {
        return (best, witness);
    }
    let cj0 = inst.assignment(pool_j[0]).cost;
    for &ii in pool_i {
        let ai = inst.assignment(ii);
        if ai.cost + cj0 >= best {
            break;
        }
        if !admit(ii) {
            continue;
        }
        for &jj in pool_j {
            let aj = inst.assignment(jj);
            if ai.cost + aj.cost >= best {
                break;
            }
            if admit(jj) && oracle.compatible(inst, ai, aj) {
                best = ai.cost + aj.cost;
                witness = Some((ii, jj));
                break;
            }
        }
    }
    (best, witness)
}

/// Complete graph over tasks (minus the fixed assignment's task, when
/// given) with cheapest-compatible-pair edge weights; an artificial vertex
/// pads odd vertex counts so a maximum matching can cover every task.
pub fn build_g2(inst: &Instance, fixed: Option<AssignmentId>) -> Result<G2Graph, GsppError> {
    build_g2_with(inst, &DefaultCompat, fixed)
}

pub fn build_g2_with<O: CompatOracle>(
    inst: &Instance,
    oracle: &O,
    fixed: Option<AssignmentId>,
) -> Result<G2Graph, GsppError> {
    let fixed_a: Option<&Assignment> = match fixed {
        Some(id) => Some(
            inst.by_id(id)
                .ok_or(GsppError::UnknownAssignment { id })?,
        ),
        None => None,
    };
    let vertex_tasks: Vec<TaskId> = (0..inst.n_tasks())
        .filter(|&t| fixed_a.map(|a| a.task != t).unwrap_or(true))
        .collect();

    let mut admit = |idx: u32| match fixed_a {
        Some(f) => oracle.compatible(inst, f, inst.assignment(idx)),
        None => true,
    };

    let odd = vertex_tasks.len() % 2 == 1;
    let n = vertex_tasks.len() + usize::from(odd);
    let mut g = WeightedGraph::new(n);
    for u in 0..vertex_tasks.len() {
        for v in u + 1..vertex_tasks.len() {
            let (ti, tj) = (vertex_tasks[u], vertex_tasks[v]);
            let (w, _) = cheapest_pair(
                inst,
                oracle,
                inst.task_pool(ti),
                inst.task_pool(tj),
                &mut admit,
            );
            if w >= INF_COST {
                return Err(match fixed {
                    Some(id) => GsppError::FixedUnusable { id },
                    None => GsppError::NoCompatiblePair { a: ti, b: tj },
                });
            }
            g.add_edge(u, v, w).expect("G2 edge");
        }
    }
    let artificial = if odd {
        let s = vertex_tasks.len();
        for (u, &t) in vertex_tasks.iter().enumerate() {
            // Unfixed case: plain c'. Probing: the cheapest assignment that
            // can still coexist with the fixed one, which is stronger and
            // remains sound.
            let w = inst
                .task_pool(t)
                .iter()
                .copied()
                .find(|&idx| admit(idx))
                .map(|idx| inst.assignment(idx).cost);
            match w {
                Some(w) => g.add_edge(u, s, w).expect("artificial edge"),
                None => {
                    return Err(match fixed {
                        Some(id) => GsppError::FixedUnusable { id },
                        None => unreachable!("task pools are non-empty"),
                    })
                }
            }
        }
        Some(s)
    } else {
        None
    };
    Ok(G2Graph {
        graph: g,
        vertex_tasks,
        artificial,
    })
}

pub fn lb2(inst: &Instance) -> Result<Cost, GsppError> {
    let g2 = build_g2(inst, None)?;
    Ok(max_weight_matching(&g2.graph).weight)
}

/// Bound implied by fixing one assignment: its cost plus the matching bound
/// over the remaining tasks restricted to compatible candidates. Returns
/// [`INF_COST`] when the assignment cannot appear in any feasible solution.
pub fn probe_bound(inst: &Instance, k: AssignmentId) -> Result<Cost, GsppError> {
    let a = inst
        .by_id(k)
        .ok_or(GsppError::UnknownAssignment { id: k })?;
    match build_g2(inst, Some(k)) {
        Ok(g2) => Ok(a.cost + max_weight_matching(&g2.graph).weight),
        Err(GsppError::FixedUnusable { .. }) => Ok(INF_COST),
        Err(e) => Err(e),
    }
}

/// Shared state for probing many assignments of the same instance: the
/// unfixed G2 edge weights and their witness pairs. A probe only rescans
/// the edges whose cached witness clashes with the fixed assignment.
pub struct ProbeContext<'a> {
    inst: &'a Instance,
    n: usize,
    /// Row-major upper triangle, indexed i * n + j with i < j.
    pair_weight: Vec<Cost>,
    pair_witness: Vec<(u32, u32)>,
}

impl<'a> ProbeContext<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self, GsppError> {
        Self::new_with(inst, &DefaultCompat)
    }

    pub fn new_with<O: CompatOracle>(inst: &'a Instance, oracle: &O) -> Result<Self, GsppError> {
        let n = inst.n_tasks() as usize;
        let mut pair_weight = vec![INF_COST; n * n];
        let mut pair_witness = vec![(u32::MAX, u32::MAX); n * n];
        let mut admit_all = |_: u32| true;
        for i in 0..n {
            for j in i + 1..n {
                let (w, witness) = cheapest_pair(
                    inst,
                    oracle,
                    inst.task_pool(i as TaskId),
                    inst.task_pool(j as TaskId),
                    &mut admit_all,
                );
                if w >= INF_COST {
                    return Err(GsppError::NoCompatiblePair {
                        a: i as TaskId,
                        b: j as TaskId,
                    });
                }
                pair_weight[i * n + j] = w;
                pair_witness[i * n + j] = witness.expect("finite weight has a witness");
            }
        }
        Ok(ProbeContext {
            inst,
            n,
            pair_weight,
            pair_witness,
        })
    }

    /// `c(y_k)` plus the matching bound over the remaining tasks, all
    /// candidates filtered for compatibility with `y_k`. [`INF_COST`] when
    /// the assignment is provably unusable.
    pub fn probe(&self, k: AssignmentId) -> Result<Cost, GsppError> {
        self.probe_with(&DefaultCompat, k)
    }

    pub fn probe_with<O: CompatOracle>(
        &self,
        oracle: &O,
        k: AssignmentId,
    ) -> Result<Cost, GsppError> {
        let fixed = self
            .inst
            .by_id(k)
            .ok_or(GsppError::UnknownAssignment { id: k })?;

        // 0 unknown, 1 compatible with the fixed assignment, 2 not.
        let mut memo = vec![0u8; self.inst.n_assignments()];
        let mut admit = |idx: u32| -> bool {
            let slot = &mut memo[idx as usize];
            if *slot == 0 {
                let ok = oracle.compatible(self.inst, fixed, self.inst.assignment(idx));
                *slot = if ok { 1 } else { 2 };
            }
            *slot == 1
        };

        let vertex_tasks: Vec<TaskId> = (0..self.n as TaskId)
            .filter(|&t| t != fixed.task)
            .collect();
        let odd = vertex_tasks.len() % 2 == 1;
        let mut g = WeightedGraph::new(vertex_tasks.len() + usize::from(odd));
        for u in 0..vertex_tasks.len() {
            for v in u + 1..vertex_tasks.len() {
                let (ti, tj) = (vertex_tasks[u] as usize, vertex_tasks[v] as usize);
                let cell = ti * self.n + tj;
                let (wi, wj) = self.pair_witness[cell];
                let w = if admit(wi) && admit(wj) {
                    // Filtering can only raise the minimum, and the cached
                    // witness still attains it.
                    self.pair_weight[cell]
                } else {
                    let (w, _) = cheapest_pair(
                        self.inst,
                        oracle,
                        self.inst.task_pool(ti as TaskId),
                        self.inst.task_pool(tj as TaskId),
                        &mut admit,
                    );
                    w
                };
                if w >= INF_COST {
                    return Ok(INF_COST);
                }
                g.add_edge(u, v, w).expect("probe edge");
            }
        }
        if odd {
            let s = vertex_tasks.len();
            for (u, &t) in vertex_tasks.iter().enumerate() {
                let w = self
                    .inst
                    .task_pool(t)
                    .iter()
                    .copied()
                    .find(|&idx| admit(idx))
                    .map(|idx| self.inst.assignment(idx).cost);
                match w {
                    Some(w) => g.add_edge(u, s, w).expect("probe artificial edge"),
                    None => return Ok(INF_COST),
                }
            }
        }
        Ok(fixed.cost + max_weight_matching(&g).weight)
    }
}

/// Bound values, graph sizes and per-phase wall clock for one instance.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub instance: String,
    pub n_tasks: u32,
    pub n_vars: usize,
    pub trivial: Cost,
    pub lb1: Cost,
    pub lb2: Cost,
    pub e1_edges: usize,
    pub e2_edges: usize,
    pub lb1_seconds: f64,
    pub lb2_seconds: f64,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str =
        "instance,n_tasks,n_vars,trivial,lb1,lb2,e1_edges,e2_edges,lb1_s,lb2_s";

    pub fn csv_row(&self, scale: u32) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.3},{:.3}",
            self.instance,
            self.n_tasks,
            self.n_vars,
            format_cost(self.trivial, scale),
            format_cost(self.lb1, scale),
            format_cost(self.lb2, scale),
            self.e1_edges,
            self.e2_edges,
            self.lb1_seconds,
            self.lb2_seconds,
        )
    }
}

/// Render an integer-scaled cost. Exact decimal for power-of-ten scales,
/// `raw/scale` otherwise; the sentinel prints as `inf`.
pub fn format_cost(cost: Cost, scale: u32) -> String {
    if cost >= INF_COST {
        return "inf".to_string();
    }
    if scale <= 1 {
        return cost.to_string();
    }
    let s = scale as i64;
    let mut digits = 0u32;
    let mut p = 1i64;
    while p < s {
        p *= 10;
        digits += 1;
    }
    if p == s {
        let sign = if cost < 0 { "-" } else { "" };
        let a = cost.abs();
        format!(
            "{sign}{}.{:0width$}",
            a / s,
            a % s,
            width = digits as usize
        )
    } else {
        format!("{cost}/{scale}")
    }
}

pub fn compute_bounds(inst: &Instance) -> Result<BoundReport, GsppError> {
    let trivial = trivial_bound(inst);

    let t0 = Instant::now();
    let g1 = build_g1(inst)?;
    let lb1_val = max_weight_matching(&g1).weight + trivial;
    let lb1_seconds = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let g2 = build_g2(inst, None)?;
    let lb2_val = max_weight_matching(&g2.graph).weight;
    let lb2_seconds = t1.elapsed().as_secs_f64();

    Ok(BoundReport {
        instance: inst.name.clone(),
        n_tasks: inst.n_tasks(),
        n_vars: inst.n_assignments(),
        trivial,
        lb1: lb1_val,
        lb2: lb2_val,
        e1_edges: g1.n_edges(),
        e2_edges: g2.graph.n_edges(),
        lb1_seconds,
        lb2_seconds,
    })
}
