//! Crew recovery matching bound: duties group tasks per driver, and the
//! relaxation pairs tasks up by the cheapest way to cover the pair with at
//! most one duty per driver, leaving other drivers idle.

use std::path::Path;

use crate::error::GsppError;
use crate::instance::{Cost, TaskId, INF_COST};
use crate::matching::{max_weight_matching, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Duty {
    /// Covered task ids, sorted ascending, non-empty.
    pub tasks: Vec<TaskId>,
    pub cost: Cost,
}

impl Duty {
    pub fn new(mut tasks: Vec<TaskId>, cost: Cost) -> Self {
        tasks.sort_unstable();
        tasks.dedup();
        Duty { tasks, cost }
    }

    pub fn covers(&self, t: TaskId) -> bool {
        self.tasks.binary_search(&t).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrewInstance {
    pub n_tasks: u32,
    /// Duty list per driver.
    pub duties: Vec<Vec<Duty>>,
}

impl CrewInstance {
    pub fn n_drivers(&self) -> usize {
        self.duties.len()
    }

    fn check(&self) -> Result<(), GsppError> {
        for (k, list) in self.duties.iter().enumerate() {
            for d in list {
                if d.tasks.is_empty() {
                    return Err(GsppError::InvalidInstance(format!(
                        "driver {k}: empty duty"
                    )));
                }
                if d.cost < 0 {
                    return Err(GsppError::InvalidInstance(format!(
                        "driver {k}: negative duty cost {}",
                        d.cost
                    )));
                }
                if let Some(&t) = d.tasks.iter().find(|&&t| t >= self.n_tasks) {
                    return Err(GsppError::InvalidInstance(format!(
                        "driver {k}: duty references unknown task {t}"
                    )));
                }
            }
        }
        for t in 0..self.n_tasks {
            if !self.duties.iter().flatten().any(|d| d.covers(t)) {
                return Err(GsppError::InvalidInstance(format!(
                    "task {t} is covered by no duty"
                )));
            }
        }
        Ok(())
    }
}

/// Cost of a duty apportioned over `n` of its tasks. A wide duty can serve
/// several matching edges at once, so charging its full cost per edge would
/// let the matching weight exceed the optimum; pro-rata charging keeps the
/// total charge of any duty within its cost across every matching. For
/// duties covering at most two tasks this equals the full cost.
fn amortized(d: &Duty, n: Cost) -> Cost {
    n * d.cost / d.tasks.len() as Cost
}

/// Cheapest cover of the pair (i, j) with at most one duty per driver:
/// either one duty holding both tasks, or two duties of distinct drivers,
/// each holding exactly one of them. Duty costs are amortized.
fn pair_cost(ci: &CrewInstance, i: TaskId, j: TaskId) -> Cost {
    let mut best = INF_COST;
    for list in &ci.duties {
        for d in list {
            if d.covers(i) && d.covers(j) {
                best = best.min(amortized(d, 2));
            }
        }
    }
    for (k, list) in ci.duties.iter().enumerate() {
        for d in list {
            if !(d.covers(i) && !d.covers(j)) {
                continue;
            }
            for (k2, list2) in ci.duties.iter().enumerate() {
                if k2 == k {
                    continue;
                }
                for d2 in list2 {
                    if d2.covers(j) && !d2.covers(i) {
                        best = best.min(amortized(d, 1) + amortized(d2, 1));
                    }
                }
            }
        }
    }
    best
}

fn single_cost(ci: &CrewInstance, i: TaskId) -> Cost {
    ci.duties
        .iter()
        .flatten()
        .filter(|d| d.covers(i))
        .map(|d| amortized(d, 1))
        .min()
        .unwrap_or(INF_COST)
}

/// Matching bound over the task set: complete graph with the pair-cover
/// costs, artificial vertex (cheapest single cover) padding odd task counts.
pub fn crew_lb2(ci: &CrewInstance) -> Result<Cost, GsppError> {
    ci.check()?;
    let n = ci.n_tasks as usize;
    let odd = n % 2 == 1;
    let mut g = WeightedGraph::new(n + usize::from(odd));
    for i in 0..n {
        for j in i + 1..n {
            let w = pair_cost(ci, i as TaskId, j as TaskId);
            if w >= INF_COST {
                return Err(GsppError::NoCompatiblePair {
                    a: i as TaskId,
                    b: j as TaskId,
                });
            }
            g.add_edge(i, j, w).expect("crew edge");
        }
    }
    if odd {
        for i in 0..n {
            let w = single_cost(ci, i as TaskId);
            g.add_edge(i, n, w).expect("crew artificial edge");
        }
    }
    Ok(max_weight_matching(&g).weight)
}

/// Exhaustive reference: cheapest selection of at most one duty per driver
/// covering every task exactly once. `None` when no cover exists.
pub fn crew_brute_force(ci: &CrewInstance) -> Option<Cost> {
    fn rec(ci: &CrewInstance, driver: usize, covered: u64, acc: Cost, best: &mut Option<Cost>) {
        if driver == ci.duties.len() {
            if covered.count_ones() == ci.n_tasks {
                *best = Some(best.map_or(acc, |b: Cost| b.min(acc)));
            }
            return;
        }
        rec(ci, driver + 1, covered, acc, best); // driver stays idle
        for d in &ci.duties[driver] {
            let mask: u64 = d.tasks.iter().map(|&t| 1u64 << t).sum();
            if covered & mask == 0 {
                rec(ci, driver + 1, covered | mask, acc + d.cost, best);
            }
        }
    }
    assert!(ci.n_tasks <= 64);
    let mut best = None;
    rec(ci, 0, 0, 0, &mut best);
    best
}

/// Text format:
///
/// ```text
/// crew 1
/// tasks <n>
/// drivers <k>
/// duty <driver> <cost> <task>...
/// end
/// ```
pub fn read_crew(text: &str) -> Result<CrewInstance, GsppError> {
    const WHAT: &str = "crew instance";
    let err = |line, reason: String| GsppError::Parse {
        what: WHAT,
        line,
        reason,
    };
    let mut n_tasks = None;
    let mut duties: Vec<Vec<Duty>> = Vec::new();
    let mut seen_header = false;
    let mut seen_end = false;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != "crew 1" {
                return Err(err(ln, format!("unsupported header `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("tasks") => {
                let v = parts.next().unwrap_or("");
                n_tasks = Some(
                    v.parse()
                        .map_err(|_| err(ln, format!("invalid task count `{v}`")))?,
                );
            }
            Some("drivers") => {
                let v = parts.next().unwrap_or("");
                let k: usize = v
                    .parse()
                    .map_err(|_| err(ln, format!("invalid driver count `{v}`")))?;
                duties = vec![Vec::new(); k];
            }
            Some("duty") => {
                let k: usize = parts
                    .next()
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| err(ln, "invalid driver id".into()))?;
                let cost: Cost = parts
                    .next()
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| err(ln, "invalid duty cost".into()))?;
                let tasks: Result<Vec<TaskId>, _> = parts.map(|t| t.parse()).collect();
                let tasks = tasks.map_err(|_| err(ln, "invalid task id".into()))?;
                let slot = duties
                    .get_mut(k)
                    .ok_or_else(|| err(ln, format!("driver {k} out of range")))?;
                slot.push(Duty::new(tasks, cost));
            }
            Some("end") => {
                seen_end = true;
                break;
            }
            other => {
                return Err(err(
                    ln,
                    format!("unexpected record `{}`", other.unwrap_or("")),
                ))
            }
        }
    }
    if !seen_end {
        return Err(err(0, "missing `end`".into()));
    }
    let n_tasks = n_tasks.ok_or_else(|| err(0, "missing `tasks`".into()))?;
    let ci = CrewInstance { n_tasks, duties };
    ci.check()?;
    Ok(ci)
}

pub fn read_crew_file(path: &Path) -> Result<CrewInstance, GsppError> {
    read_crew(&std::fs::read_to_string(path)?)
}
