//! Independent reference implementations. Nothing here calls into the
//! library's arithmetic or graph code.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

/// `R(mu * x * (1 - x) * 2^n)` with `x = i / 2^n`, evaluated as a big rational.
pub fn rational_step(numerator: u64, exponent: u32, bits: u32, i: u64, mode: &str) -> u64 {
    let two = BigInt::from(2);
    let scale = BigRational::from_integer(num::pow(two.clone(), bits as usize));
    let mu = BigRational::new(BigInt::from(numerator), num::pow(two, exponent as usize));
    let x = BigRational::from_integer(BigInt::from(i)) / &scale;
    let one = BigRational::one();
    let y = mu * &x * (&one - &x) * &scale;
    let q = match mode {
        "floor" => y.floor(),
        "ceil" => y.ceil(),
        "round" => (y + BigRational::new(BigInt::from(1), BigInt::from(2))).floor(),
        other => panic!("mode {other}"),
    };
    q.to_integer().to_u64().expect("fits")
}

pub fn rational_table(numerator: u64, exponent: u32, bits: u32, mode: &str) -> Vec<u64> {
    (0..=(1u64 << bits))
        .map(|i| rational_step(numerator, exponent, bits, i, mode))
        .collect()
}

/// Fractional part of the scaled image, as a big rational.
pub fn rational_frac(numerator: u64, exponent: u32, bits: u32, i: u64) -> BigRational {
    let scale: i128 = 1 << bits;
    let y = BigRational::new(
        BigInt::from(numerator) * BigInt::from(i) * BigInt::from(scale - i as i128),
        num::pow(BigInt::from(2), (exponent + bits) as usize),
    );
    &y - y.floor()
}

pub fn quarter(k: i64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(4))
}

pub fn is_zero(r: &BigRational) -> bool {
    r.is_zero()
}

/// Graph facts computed the slow way: BFS over an undirected adjacency list
/// for components, and plain iteration for cycles and tails.
#[derive(Debug, PartialEq, Eq)]
pub struct GraphOracle {
    /// Component node sets, as sorted vectors, sorted by (size desc, min asc).
    pub components: Vec<Vec<usize>>,
    /// Cycles as node sets.
    pub cycles: BTreeSet<Vec<usize>>,
    pub tails: Vec<u32>,
    pub in_degree: Vec<u32>,
}

pub fn graph_oracle(succ: &[u64]) -> GraphOracle {
    let len = succ.len();
    let mut adj = vec![Vec::new(); len];
    for (i, &s) in succ.iter().enumerate() {
        adj[i].push(s as usize);
        adj[s as usize].push(i);
    }
    let mut comp = vec![usize::MAX; len];
    let mut components = Vec::new();
    for start in 0..len {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![];
        let mut queue = VecDeque::from([start]);
        comp[start] = id;
        while let Some(x) = queue.pop_front() {
            members.push(x);
            for &y in &adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    queue.push_back(y);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    // after len steps every orbit is on its cycle
    let on_cycle = |i: usize| {
        let mut x = i;
        for _ in 0..len {
            x = succ[x] as usize;
            if x == i {
                return true;
            }
        }
        false
    };
    let cyc: Vec<bool> = (0..len).map(on_cycle).collect();
    let mut cycles = BTreeSet::new();
    for i in 0..len {
        if cyc[i] {
            let mut set = vec![i];
            let mut x = succ[i] as usize;
            while x != i {
                set.push(x);
                x = succ[x] as usize;
            }
            set.sort_unstable();
            cycles.insert(set);
        }
    }
    let tails = (0..len)
        .map(|i| {
            let mut x = i;
            let mut t = 0;
            while !cyc[x] {
                x = succ[x] as usize;
                t += 1;
            }
            t
        })
        .collect();
    let mut in_degree = vec![0u32; len];
    for &s in succ {
        in_degree[s as usize] += 1;
    }
    GraphOracle {
        components,
        cycles,
        tails,
        in_degree,
    }
}

/// All colliding, non-symmetric pairs by brute force over every pair.
pub fn collision_pairs(succ: &[u64]) -> Vec<(usize, usize)> {
    let scale = succ.len() - 1;
    let mut out = Vec::new();
    for a in 0..succ.len() {
        for b in a + 1..succ.len() {
            if succ[a] == succ[b] && (a + b) % scale != 0 {
                out.push((a, b));
            }
        }
    }
    out
}

/// `{ x : F^m(x) = x }` by iterating `m` times from every node.
pub fn periodic_by_iteration(succ: &[u64], m: u32) -> Vec<usize> {
    (0..succ.len())
        .filter(|&x| {
            let mut y = x;
            for _ in 0..m {
                y = succ[y] as usize;
            }
            y == x
        })
        .collect()
}
