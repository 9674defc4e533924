//! Canonical text formats, version 1.
//!
//! Instance (`.gspp`):
//!
//! ```text
//! gspp 1
//! name <token>
//! tag <token>
//! tasks <n>
//! tuples <m>
//! scale <s>
//! cap <id> <capacity>                      # zero or more
//! a <id> <task> <cost> f <tuple>... [u <cap>:<usage>...]
//! end
//! ```
//!
//! Solution (`.gsol`):
//!
//! ```text
//! gsol 1
//! instance <token>
//! cost <c>
//! feasible <0|1>
//! pick <task> <assignment>                 # one per task, ascending
//! end
//! ```
//!
//! Writers emit assignments sorted by id with sorted footprints and usage,
//! so read/write round-trips are bit-exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::GsppError;
use crate::instance::{
    Assignment, AssignmentId, CapacitatedResource, Instance, Solution, TaskId,
};

pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str("gspp 1\n");
    let _ = writeln!(out, "name {}", sanitize(&inst.name));
    let _ = writeln!(out, "tag {}", sanitize(&inst.tag));
    let _ = writeln!(out, "tasks {}", inst.n_tasks());
    let _ = writeln!(out, "tuples {}", inst.n_tuples());
    let _ = writeln!(out, "scale {}", inst.scale());
    for cap in inst.caps() {
        let _ = writeln!(out, "cap {} {}", cap.id, cap.capacity);
    }
    for a in inst.assignments() {
        let _ = write!(out, "a {} {} {} f", a.id, a.task, a.cost);
        for t in &a.footprint {
            let _ = write!(out, " {t}");
        }
        if !a.cap_usage.is_empty() {
            out.push_str(" u");
            for (c, u) in &a.cap_usage {
                let _ = write!(out, " {c}:{u}");
            }
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

pub fn write_instance_file(inst: &Instance, path: &Path) -> Result<(), GsppError> {
    std::fs::write(path, write_instance(inst))?;
    Ok(())
}

fn sanitize(s: &str) -> String {
    let cleaned: String = s
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    if cleaned.is_empty() {
        "unnamed".to_string()
    } else {
        cleaned
    }
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    what: &'static str,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str), GsppError> {
        for (i, line) in self.iter.by_ref() {
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                return Ok((i + 1, line));
            }
        }
        Err(GsppError::Parse {
            what: self.what,
            line: 0,
            reason: "unexpected end of file".to_string(),
        })
    }
}

fn parse_err(what: &'static str, line: usize, reason: impl Into<String>) -> GsppError {
    GsppError::Parse {
        what,
        line,
        reason: reason.into(),
    }
}

fn expect_kv<'a>(
    lines: &mut Lines<'a>,
    what: &'static str,
    key: &str,
) -> Result<&'a str, GsppError> {
    let (ln, line) = lines.next()?;
    let (k, v) = line
        .split_once(' ')
        .ok_or_else(|| parse_err(what, ln, format!("expected `{key} <value>`")))?;
    if k != key {
        return Err(parse_err(what, ln, format!("expected `{key}`, found `{k}`")));
    }
    Ok(v.trim())
}

fn num<T: std::str::FromStr>(
    what: &'static str,
    line: usize,
    s: &str,
    field: &str,
) -> Result<T, GsppError> {
    s.parse()
        .map_err(|_| parse_err(what, line, format!("invalid {field}: `{s}`")))
}

pub fn read_instance(text: &str) -> Result<Instance, GsppError> {
    const WHAT: &str = "instance";
    let mut lines = Lines {
        iter: text.lines().enumerate(),
        what: WHAT,
    };
    let (ln, header) = lines.next()?;
    if header != "gspp 1" {
        return Err(parse_err(WHAT, ln, format!("unsupported header `{header}`")));
    }
    let name = expect_kv(&mut lines, WHAT, "name")?.to_string();
    let tag = expect_kv(&mut lines, WHAT, "tag")?.to_string();
    let n_tasks: u32 = {
        let v = expect_kv(&mut lines, WHAT, "tasks")?;
        num(WHAT, 0, v, "task count")?
    };
    let n_tuples: u32 = {
        let v = expect_kv(&mut lines, WHAT, "tuples")?;
        num(WHAT, 0, v, "tuple count")?
    };
    let scale: u32 = {
        let v = expect_kv(&mut lines, WHAT, "scale")?;
        num(WHAT, 0, v, "scale")?
    };

    let mut caps = Vec::new();
    let mut assignments = Vec::new();
    loop {
        let (ln, line) = lines.next()?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("end") => break,
            Some("cap") => {
                let id = num(WHAT, ln, parts.next().unwrap_or(""), "cap id")?;
                let capacity = num(WHAT, ln, parts.next().unwrap_or(""), "capacity")?;
                caps.push(CapacitatedResource { id, capacity });
            }
            Some("a") => {
                let id = num(WHAT, ln, parts.next().unwrap_or(""), "assignment id")?;
                let task = num(WHAT, ln, parts.next().unwrap_or(""), "task id")?;
                let cost = num(WHAT, ln, parts.next().unwrap_or(""), "cost")?;
                if parts.next() != Some("f") {
                    return Err(parse_err(WHAT, ln, "expected `f` footprint marker"));
                }
                let mut footprint = Vec::new();
                let mut usage = Vec::new();
                let mut in_usage = false;
                for tok in parts {
                    if tok == "u" {
                        in_usage = true;
                    } else if in_usage {
                        let (c, u) = tok.split_once(':').ok_or_else(|| {
                            parse_err(WHAT, ln, format!("invalid usage pair `{tok}`"))
                        })?;
                        usage.push((
                            num(WHAT, ln, c, "cap id")?,
                            num(WHAT, ln, u, "usage")?,
                        ));
                    } else {
                        footprint.push(num(WHAT, ln, tok, "tuple id")?);
                    }
                }
                assignments.push(Assignment::new(id, task, cost, footprint).with_cap_usage(usage));
            }
            other => {
                return Err(parse_err(
                    WHAT,
                    ln,
                    format!("unexpected record `{}`", other.unwrap_or("")),
                ))
            }
        }
    }
    Ok(Instance::new(name, tag, n_tasks, n_tuples, scale, caps, assignments))
}

pub fn read_instance_file(path: &Path) -> Result<Instance, GsppError> {
    read_instance(&std::fs::read_to_string(path)?)
}

pub fn write_solution(instance_name: &str, sol: &Solution) -> String {
    let mut out = String::new();
    out.push_str("gsol 1\n");
    let _ = writeln!(out, "instance {}", sanitize(instance_name));
    let _ = writeln!(out, "cost {}", sol.cost);
    let _ = writeln!(out, "feasible {}", u8::from(sol.feasible));
    for (task, id) in &sol.chosen {
        let _ = writeln!(out, "pick {task} {id}");
    }
    out.push_str("end\n");
    out
}

pub fn write_solution_file(
    instance_name: &str,
    sol: &Solution,
    path: &Path,
) -> Result<(), GsppError> {
    std::fs::write(path, write_solution(instance_name, sol))?;
    Ok(())
}

pub fn read_solution(text: &str) -> Result<(String, Solution), GsppError> {
    const WHAT: &str = "solution";
    let mut lines = Lines {
        iter: text.lines().enumerate(),
        what: WHAT,
    };
    let (ln, header) = lines.next()?;
    if header != "gsol 1" {
        return Err(parse_err(WHAT, ln, format!("unsupported header `{header}`")));
    }
    let instance = expect_kv(&mut lines, WHAT, "instance")?.to_string();
    let cost = num(WHAT, 0, expect_kv(&mut lines, WHAT, "cost")?, "cost")?;
    let feasible = expect_kv(&mut lines, WHAT, "feasible")? == "1";
    let mut chosen: BTreeMap<TaskId, AssignmentId> = BTreeMap::new();
    loop {
        let (ln, line) = lines.next()?;
        if line == "end" {
            break;
        }
        let mut parts = line.split_whitespace();
        if parts.next() != Some("pick") {
            return Err(parse_err(WHAT, ln, "expected `pick` or `end`"));
        }
        let task = num(WHAT, ln, parts.next().unwrap_or(""), "task id")?;
        let id = num(WHAT, ln, parts.next().unwrap_or(""), "assignment id")?;
        chosen.insert(task, id);
    }
    Ok((
        instance,
        Solution {
            chosen,
            cost,
            feasible,
        },
    ))
}

pub fn read_solution_file(path: &Path) -> Result<(String, Solution), GsppError> {
    read_solution(&std::fs::read_to_string(path)?)
}
