//! Independent reference implementations used to check the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        let d = a[k] - b[k];
        s += d * d;
    }
    s.sqrt()
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| [side * rng.random::<f64>(), side * rng.random::<f64>()])
        .collect()
}

/// Distinct points of the integer lattice `{0..k}^2`; produces many equal distances.
pub fn lattice_points(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<[f64; 2]> {
    let mut all: Vec<[f64; 2]> = (0..k * k)
        .map(|c| [(c % k) as f64, (c / k) as f64])
        .collect();
    for i in (1..all.len()).rev() {
        let j = rng.random_range(0..=i);
        all.swap(i, j);
    }
    all.truncate(n);
    all
}

/// Kruskal on the full list of pairwise distances.
pub fn kruskal_mst(points: &[[f64; 2]]) -> Vec<f64> {
    let n = points.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((dist(&points[i], &points[j]), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut out = Vec::new();
    for (d, i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            out.push(d);
        }
    }
    out
}

/// Finite 1-dimensional pairs with positive persistence from a reduction of the complete boundary
/// matrix (vertices, edges, triangles) ordered by (diameter, dimension, vertex list).
pub fn brute_force_h1(points: &[[f64; 2]]) -> Vec<(f64, f64)> {
    let n = points.len();
    let d = |i: usize, j: usize| dist(&points[i], &points[j]);
    let mut simplices: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in 0..n {
        simplices.push((0.0, vec![i]));
    }
    for i in 0..n {
        for j in i + 1..n {
            simplices.push((d(i, j), vec![i, j]));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let diam = d(i, j).max(d(i, k)).max(d(j, k));
                simplices.push((diam, vec![i, j, k]));
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });
    let index: std::collections::HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(k, s)| (s.1.clone(), k))
        .collect();
    // columns as sorted row-index sets over Z/2
    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|(_, v)| {
            if v.len() == 1 {
                return Vec::new();
            }
            let mut rows: Vec<usize> = (0..v.len())
                .map(|skip| {
                    let face: Vec<usize> = v
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != skip)
                        .map(|(_, x)| *x)
                        .collect();
                    index[&face]
                })
                .collect();
            rows.sort_unstable();
            rows
        })
        .collect();
    let mut pivot_owner: std::collections::HashMap<usize, usize> = Default::default();
    let mut pairs = Vec::new();
    for c in 0..columns.len() {
        while let Some(&low) = columns[c].last() {
            match pivot_owner.get(&low) {
                Some(&other) => {
                    let sum = sym_diff(&columns[c], &columns[other]);
                    columns[c] = sum;
                }
                None => {
                    pivot_owner.insert(low, c);
                    break;
                }
            }
        }
        if let Some(&low) = columns[c].last() {
            if simplices[c].1.len() == 3 {
                let (birth, death) = (simplices[low].0, simplices[c].0);
                if death > birth {
                    pairs.push((birth, death));
                }
            }
        }
    }
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pairs
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// Minimum cost of moving normalized mass `a` at `xs` onto `b` at `ys` with cost `(x - y)^2`,
/// solved as a transportation linear program.
pub fn min_cost_transport(xs: &[f64], a: &[f64], ys: &[f64], b: &[f64]) -> f64 {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<minilp::Variable>> = xs
        .iter()
        .map(|x| {
            ys.iter()
                .map(|y| lp.add_var((x - y).powi(2), (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    for (i, row) in vars.iter().enumerate() {
        let expr: Vec<(minilp::Variable, f64)> = row.iter().map(|v| (*v, 1.0)).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, a[i] / sa);
    }
    for j in 0..ys.len() {
        let expr: Vec<(minilp::Variable, f64)> = vars.iter().map(|row| (row[j], 1.0)).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, b[j] / sb);
    }
    lp.solve().expect("feasible transport problem").objective()
}
