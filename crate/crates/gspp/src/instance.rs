//! Instance model for set partitioning under packing constraints: tasks,
//! per-task assignment pools, resource-tuple footprints and optional
//! capacitated resources, plus feasibility/cost evaluation and a brute-force
//! reference solver used as a test oracle.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::GsppError;

pub type TaskId = u32;
pub type AssignmentId = u32;
pub type TupleId = u32;
pub type CapId = u32;

/// Integer-scaled fixed-point cost. The display scale lives on the instance;
/// all arithmetic is exact.
pub type Cost = i64;

/// Sentinel for "no admissible value". Kept well below `i64::MAX` so that a
/// handful of sentinel additions cannot overflow.
pub const INF_COST: Cost = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub id: AssignmentId,
    pub task: TaskId,
    pub cost: Cost,
    /// Occupied resource tuples, sorted ascending, no duplicates.
    pub footprint: Vec<TupleId>,
    /// Usage of capacitated resources, sorted by capacity id.
    pub cap_usage: Vec<(CapId, u64)>,
}

impl Assignment {
    pub fn new(id: AssignmentId, task: TaskId, cost: Cost, mut footprint: Vec<TupleId>) -> Self {
        footprint.sort_unstable();
        footprint.dedup();
        Assignment {
            id,
            task,
            cost,
            footprint,
            cap_usage: Vec::new(),
        }
    }

    pub fn with_cap_usage(mut self, mut usage: Vec<(CapId, u64)>) -> Self {
        usage.sort_unstable();
        self.cap_usage = usage;
        self
    }

    pub fn usage_of(&self, cap: CapId) -> u64 {
        match self.cap_usage.binary_search_by_key(&cap, |&(c, _)| c) {
            Ok(i) => self.cap_usage[i].1,
            Err(_) => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacitatedResource {
    pub id: CapId,
    pub capacity: u64,
}

/// Immutable after construction; all read operations are safe to share
/// across threads.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub tag: String,
    n_tasks: u32,
    n_tuples: u32,
    /// Fixed-point denominator for presenting costs (cost 125, scale 10 reads
    /// as 12.5). Purely presentational; never used in arithmetic.
    scale: u32,
    caps: Vec<CapacitatedResource>,
    assignments: Vec<Assignment>,
    /// Indices into `assignments` per task, sorted by (cost, id) so pair
    /// scans can terminate early.
    per_task: Vec<Vec<u32>>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        tag: impl Into<String>,
        n_tasks: u32,
        n_tuples: u32,
        scale: u32,
        mut caps: Vec<CapacitatedResource>,
        mut assignments: Vec<Assignment>,
    ) -> Self {
        caps.sort_unstable_by_key(|c| c.id);
        assignments.sort_unstable_by_key(|a| a.id);
        let mut per_task = vec![Vec::new(); n_tasks as usize];
        for (idx, a) in assignments.iter().enumerate() {
            if (a.task as usize) < per_task.len() {
                per_task[a.task as usize].push(idx as u32);
            }
        }
        for pool in &mut per_task {
            pool.sort_unstable_by_key(|&i| {
                let a = &assignments[i as usize];
                (a.cost, a.id)
            });
        }
        Instance {
            name: name.into(),
            tag: tag.into(),
            n_tasks,
            n_tuples,
            scale,
            caps,
            assignments,
            per_task,
        }
    }

    pub fn n_tasks(&self) -> u32 {
        self.n_tasks
    }

    pub fn n_tuples(&self) -> u32 {
        self.n_tuples
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn n_assignments(&self) -> usize {
        self.assignments.len()
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn caps(&self) -> &[CapacitatedResource] {
        &self.caps
    }

    pub fn capacity_of(&self, cap: CapId) -> Option<u64> {
        self.caps
            .binary_search_by_key(&cap, |c| c.id)
            .ok()
            .map(|i| self.caps[i].capacity)
    }

    /// Assignment indices for one task, sorted by ascending (cost, id).
    pub fn task_pool(&self, task: TaskId) -> &[u32] {
        &self.per_task[task as usize]
    }

    pub fn assignment(&self, idx: u32) -> &Assignment {
        &self.assignments[idx as usize]
    }

    pub fn index_of(&self, id: AssignmentId) -> Option<u32> {
        self.assignments
            .binary_search_by_key(&id, |a| a.id)
            .ok()
            .map(|i| i as u32)
    }

    pub fn by_id(&self, id: AssignmentId) -> Option<&Assignment> {
        self.index_of(id).map(|i| self.assignment(i))
    }

    /// Pairwise compatibility of two assignments for different tasks:
    /// disjoint footprints, and combined capacitated usage within capacity.
    /// This is the default oracle behind every graph construction.
    pub fn compatible(&self, j: AssignmentId, k: AssignmentId) -> Result<bool, GsppError> {
        let a = self
            .by_id(j)
            .ok_or(GsppError::UnknownAssignment { id: j })?;
        let b = self
            .by_id(k)
            .ok_or(GsppError::UnknownAssignment { id: k })?;
        if a.task == b.task {
            return Err(GsppError::SameTaskPair {
                task: a.task,
                a: j,
                b: k,
            });
        }
        Ok(DefaultCompat.compatible(self, a, b))
    }

    /// Restriction to a subset of assignment ids; ids are preserved.
    pub fn restrict_to(&self, keep: impl Fn(AssignmentId) -> bool) -> Instance {
        let kept: Vec<Assignment> = self
            .assignments
            .iter()
            .filter(|a| keep(a.id))
            .cloned()
            .collect();
        Instance::new(
            self.name.clone(),
            self.tag.clone(),
            self.n_tasks,
            self.n_tuples,
            self.scale,
            self.caps.clone(),
            kept,
        )
    }
}

pub fn footprints_disjoint(a: &Assignment, b: &Assignment) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.footprint.len() && j < b.footprint.len() {
        match a.footprint[i].cmp(&b.footprint[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// Pairwise compatibility oracle. Implementations must never report `true`
/// for a pair that cannot coexist in any feasible solution.
pub trait CompatOracle: Sync {
    fn compatible(&self, inst: &Instance, a: &Assignment, b: &Assignment) -> bool;
}

/// Disjoint footprints plus the pairwise capacity check
/// `usage(a) + usage(b) <= capacity` for every capacitated resource.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultCompat;

impl CompatOracle for DefaultCompat {
    fn compatible(&self, inst: &Instance, a: &Assignment, b: &Assignment) -> bool {
        if !footprints_disjoint(a, b) {
            return false;
        }
        for &(cap, ua) in &a.cap_usage {
            let ub = b.usage_of(cap);
            if ub > 0 {
                let capacity = inst.capacity_of(cap).unwrap_or(u64::MAX);
                if ua + ub > capacity {
                    return false;
                }
            }
        }
        true
    }
}

/// Same check against externally supplied remaining capacities, used when a
/// partial selection has already consumed part of the budget.
pub struct ResidualCompat<'a> {
    /// Remaining capacity per cap id (dense by id).
    pub remaining: &'a [u64],
}

impl CompatOracle for ResidualCompat<'_> {
    fn compatible(&self, _inst: &Instance, a: &Assignment, b: &Assignment) -> bool {
        if !footprints_disjoint(a, b) {
            return false;
        }
        for &(cap, ua) in &a.cap_usage {
            let ub = b.usage_of(cap);
            if ub > 0 {
                let rem = self
                    .remaining
                    .get(cap as usize)
                    .copied()
                    .unwrap_or(u64::MAX);
                if ua + ub > rem {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NegativeCost { id: AssignmentId, cost: Cost },
    EmptyTaskPool { task: TaskId },
    DuplicateId { id: AssignmentId },
    TaskOutOfRange { id: AssignmentId, task: TaskId },
    FootprintOutOfRange { id: AssignmentId, tuple: TupleId },
    UnknownCapacitatedResource { id: AssignmentId, cap: CapId },
    UsageExceedsCapacity { id: AssignmentId, cap: CapId, usage: u64, capacity: u64 },
    NonPositiveCapacity { cap: CapId, capacity: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeCost { id, cost } => {
                write!(f, "assignment {id}: negative cost {cost}")
            }
            Violation::EmptyTaskPool { task } => {
                write!(f, "task {task}: empty assignment set")
            }
            Violation::DuplicateId { id } => write!(f, "duplicate assignment id {id}"),
            Violation::TaskOutOfRange { id, task } => {
                write!(f, "assignment {id}: task {task} out of range")
            }
            Violation::FootprintOutOfRange { id, tuple } => {
                write!(f, "assignment {id}: resource tuple {tuple} out of range")
            }
            Violation::UnknownCapacitatedResource { id, cap } => {
                write!(f, "assignment {id}: unknown capacitated resource {cap}")
            }
            Violation::UsageExceedsCapacity {
                id,
                cap,
                usage,
                capacity,
            } => write!(
                f,
                "assignment {id}: usage {usage} of resource {cap} exceeds capacity {capacity}"
            ),
            Violation::NonPositiveCapacity { cap, capacity } => {
                write!(f, "capacitated resource {cap}: capacity {capacity} must be >= 1")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural invariant check. Report-style: collects every violation rather
/// than stopping at the first.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    for cap in inst.caps() {
        if cap.capacity == 0 {
            violations.push(Violation::NonPositiveCapacity {
                cap: cap.id,
                capacity: cap.capacity,
            });
        }
    }
    let mut seen_ids = std::collections::HashSet::new();
    for a in inst.assignments() {
        if !seen_ids.insert(a.id) {
            violations.push(Violation::DuplicateId { id: a.id });
        }
        if a.cost < 0 {
            violations.push(Violation::NegativeCost {
                id: a.id,
                cost: a.cost,
            });
        }
        if a.task >= inst.n_tasks() {
            violations.push(Violation::TaskOutOfRange {
                id: a.id,
                task: a.task,
            });
        }
        for &t in &a.footprint {
            if t >= inst.n_tuples() {
                violations.push(Violation::FootprintOutOfRange { id: a.id, tuple: t });
            }
        }
        for &(cap, usage) in &a.cap_usage {
            match inst.capacity_of(cap) {
                None => {
                    violations.push(Violation::UnknownCapacitatedResource { id: a.id, cap })
                }
                Some(capacity) if usage > capacity => {
                    violations.push(Violation::UsageExceedsCapacity {
                        id: a.id,
                        cap,
                        usage,
                        capacity,
                    })
                }
                _ => {}
            }
        }
    }
    for task in 0..inst.n_tasks() {
        if inst.task_pool(task).is_empty() {
            violations.push(Violation::EmptyTaskPool { task });
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// One assignment id per task.
    pub chosen: BTreeMap<TaskId, AssignmentId>,
    pub cost: Cost,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionViolation {
    TupleOverlap { tuple: TupleId },
    CapacityExceeded { cap: CapId, usage: u64, capacity: u64 },
    TaskUncovered { task: TaskId },
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub cost: Cost,
    pub feasible: bool,
    pub violations: Vec<SolutionViolation>,
}

/// Full feasibility check of a selection: objective value, every repeated
/// resource tuple, and aggregate capacity usage (not merely pairwise).
pub fn evaluate(inst: &Instance, chosen: &BTreeMap<TaskId, AssignmentId>) -> Result<Evaluation, GsppError> {
    let mut cost: Cost = 0;
    let mut tuple_use: BTreeMap<TupleId, u32> = BTreeMap::new();
    let mut cap_use: BTreeMap<CapId, u64> = BTreeMap::new();
    let mut violations = Vec::new();

    for (&task, &id) in chosen {
        let a = inst
            .by_id(id)
            .ok_or(GsppError::UnknownAssignment { id })?;
        if a.task != task {
            return Err(GsppError::WrongTask {
                id,
                expected: task,
                actual: a.task,
            });
        }
        cost += a.cost;
        for &t in &a.footprint {
            *tuple_use.entry(t).or_insert(0) += 1;
        }
        for &(cap, u) in &a.cap_usage {
            *cap_use.entry(cap).or_insert(0) += u;
        }
    }
    for task in 0..inst.n_tasks() {
        if !chosen.contains_key(&task) {
            violations.push(SolutionViolation::TaskUncovered { task });
        }
    }
    for (&t, &n) in &tuple_use {
        if n > 1 {
            violations.push(SolutionViolation::TupleOverlap { tuple: t });
        }
    }
    for (&cap, &usage) in &cap_use {
        if let Some(capacity) = inst.capacity_of(cap) {
            if usage > capacity {
                violations.push(SolutionViolation::CapacityExceeded {
                    cap,
                    usage,
                    capacity,
                });
            }
        }
    }
    Ok(Evaluation {
        cost,
        feasible: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForceResult {
    Optimal {
        z: Cost,
        all_optimal: Vec<BTreeMap<TaskId, AssignmentId>>,
    },
    Infeasible,
}

impl BruteForceResult {
    pub fn z(&self) -> Option<Cost> {
        match self {
            BruteForceResult::Optimal { z, .. } => Some(*z),
            BruteForceResult::Infeasible => None,
        }
    }
}

pub const BRUTE_FORCE_GUARD: u64 = 10_000_000;

/// Exhaustive reference solver: enumerates the full cartesian product of
/// per-task pools and keeps every optimal selection. Guarded by
/// [`BRUTE_FORCE_GUARD`] on the product size.
pub fn brute_force_optima(inst: &Instance) -> Result<BruteForceResult, GsppError> {
    let mut product: u64 = 1;
    for task in 0..inst.n_tasks() {
        let len = inst.task_pool(task).len() as u64;
        if len == 0 {
            return Ok(BruteForceResult::Infeasible);
        }
        product = product.saturating_mul(len);
        if product > BRUTE_FORCE_GUARD {
            return Err(GsppError::BruteForceTooLarge { product });
        }
    }

    let n = inst.n_tasks() as usize;
    let mut cursor = vec![0usize; n];
    let mut best: Cost = INF_COST;
    let mut all_optimal: Vec<BTreeMap<TaskId, AssignmentId>> = Vec::new();
    loop {
        let chosen: BTreeMap<TaskId, AssignmentId> = (0..n)
            .map(|t| {
                let idx = inst.task_pool(t as TaskId)[cursor[t]];
                (t as TaskId, inst.assignment(idx).id)
            })
            .collect();
        let eval = evaluate(inst, &chosen)?;
        if eval.feasible {
            if eval.cost < best {
                best = eval.cost;
                all_optimal.clear();
            }
            if eval.cost == best {
                all_optimal.push(chosen);
            }
        }
        // odometer increment
        let mut t = 0;
        loop {
            if t == n {
                let result = if all_optimal.is_empty() {
                    BruteForceResult::Infeasible
                } else {
                    BruteForceResult::Optimal {
                        z: best,
                        all_optimal,
                    }
                };
                return Ok(result);
            }
            cursor[t] += 1;
            if cursor[t] < inst.task_pool(t as TaskId).len() {
                break;
            }
            cursor[t] = 0;
            t += 1;
        }
    }
}
