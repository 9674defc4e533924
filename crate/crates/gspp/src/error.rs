use thiserror::Error;

use crate::instance::{AssignmentId, TaskId};

#[derive(Debug, Error)]
pub enum GsppError {
    #[error("unknown assignment id {id}")]
    UnknownAssignment { id: AssignmentId },

    #[error("assignments {a} and {b} belong to the same task {task}")]
    SameTaskPair {
        task: TaskId,
        a: AssignmentId,
        b: AssignmentId,
    },

    #[error("assignment {id} is owned by task {actual}, not task {expected}")]
    WrongTask {
        id: AssignmentId,
        expected: TaskId,
        actual: TaskId,
    },

    #[error("search space of {product} combinations exceeds the brute-force guard")]
    BruteForceTooLarge { product: u64 },

    #[error("graph has {n} vertices, exceeding the exhaustive-matching limit of 14")]
    MatchingTooLarge { n: usize },

    #[error("invalid graph: {reason}")]
    InvalidGraph { reason: String },

    #[error("instance is infeasible: tasks {a} and {b} admit no compatible assignment pair")]
    NoCompatiblePair { a: TaskId, b: TaskId },

    #[error("instance is infeasible: the only assignments of tasks {a} and {b} clash")]
    SingletonClash { a: TaskId, b: TaskId },

    #[error("assignment {id} cannot appear in any feasible solution")]
    FixedUnusable { id: AssignmentId },

    #[error("upper bound {ub} emptied the pool of task {task}; bound incorrect or instance infeasible")]
    ReductionEmptiedTask { task: TaskId, ub: i64 },

    #[error("instance failed validation:\n{0}")]
    InvalidInstance(String),

    #[error("malformed {what} file at line {line}: {reason}")]
    Parse {
        what: &'static str,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
