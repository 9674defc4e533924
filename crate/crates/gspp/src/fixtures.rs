//! Tiny hand-built instances used across tests, docs and the Python smoke
//! script.

use crate::instance::{Assignment, Instance};

/// Two tasks over resources {r1, r2}; the smallest instance where the
/// packing constraints bite. Optimal cost 12 via {a12, a21}.
///
/// Ids: 0 = a11 (cost 5, r1), 1 = a12 (8, r2), 2 = a21 (4, r1),
/// 3 = a22 (9, r2).
pub fn e1() -> Instance {
    Instance::new(
        "e1",
        "generic",
        2,
        2,
        1,
        vec![],
        vec![
            Assignment::new(0, 0, 5, vec![0]),
            Assignment::new(1, 0, 8, vec![1]),
            Assignment::new(2, 1, 4, vec![0]),
            Assignment::new(3, 1, 9, vec![1]),
        ],
    )
}

/// Three tasks over resources {r1..r4}; exercises the odd-task artificial
/// vertex and probing. Optimal cost 21 via {a, d, f}.
///
/// Ids: 0 = a (cost 1, r1), 1 = b (10, r2), 2 = c (2, r1), 3 = d (10, r3),
/// 4 = e (3, r1), 5 = f (10, r4).
pub fn e2() -> Instance {
    Instance::new(
        "e2",
        "generic",
        3,
        4,
        1,
        vec![],
        vec![
            Assignment::new(0, 0, 1, vec![0]),
            Assignment::new(1, 0, 10, vec![1]),
            Assignment::new(2, 1, 2, vec![0]),
            Assignment::new(3, 1, 10, vec![2]),
            Assignment::new(4, 2, 3, vec![0]),
            Assignment::new(5, 2, 10, vec![3]),
        ],
    )
}

use crate::instance::CapacitatedResource;
use rand::Rng;

/// Seeded random instance for property corpora: up to `max_tasks` tasks,
/// pools of up to `max_pool` assignments, small tuple space, occasional
/// capacitated resource. The per-task pool product is kept below 2 * 10^5
/// so the brute-force oracle stays cheap.
pub fn random_instance(rng: &mut impl Rng, max_tasks: u32, max_pool: usize) -> Instance {
    let n_tasks = rng.random_range(2..=max_tasks.max(2));
    let n_tuples = rng.random_range(4..=8u32);
    let with_cap = rng.random_bool(0.3);
    let capacity = rng.random_range(2..=6u64);
    let caps = if with_cap {
        vec![CapacitatedResource { id: 0, capacity }]
    } else {
        vec![]
    };

    let mut pools: Vec<usize> = (0..n_tasks)
        .map(|_| rng.random_range(1..=max_pool.max(1)))
        .collect();
    loop {
        let product: u64 = pools.iter().map(|&p| p as u64).product();
        if product <= 200_000 {
            break;
        }
        let widest = (0..pools.len()).max_by_key(|&i| pools[i]).unwrap();
        pools[widest] -= 1;
    }

    let mut assignments = Vec::new();
    let mut id = 0;
    for (task, &pool) in pools.iter().enumerate() {
        for _ in 0..pool {
            let cost = rng.random_range(0..=50);
            let width = rng.random_range(1..=3usize);
            let mut footprint: Vec<u32> =
                (0..width).map(|_| rng.random_range(0..n_tuples)).collect();
            footprint.sort_unstable();
            footprint.dedup();
            let usage = if with_cap && rng.random_bool(0.7) {
                vec![(0, rng.random_range(1..=capacity))]
            } else {
                vec![]
            };
            assignments.push(
                Assignment::new(id, task as u32, cost, footprint).with_cap_usage(usage),
            );
            id += 1;
        }
    }
    Instance::new("rnd", "generic", n_tasks, n_tuples, 1, caps, assignments)
}
