//! Independent reference implementations used as test oracles. None of
//! these call into the library's solvers or completion code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use insproute::ingest::SurfaceKind;
use insproute::{Instance, Mesh, Patch};

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn kind_for(i: usize) -> SurfaceKind {
    SurfaceKind::ALL[i % SurfaceKind::ALL.len()]
}

/// Dense cost lookup; panics on missing entries.
pub fn cost_table(instance: &Instance) -> Vec<Vec<f64>> {
    let n = instance.n();
    (0..n).map(|i| (0..n).map(|j| instance.costs.get(i, j).expect("complete instance")).collect()).collect()
}

pub fn path_cost(c: &[Vec<f64>], order: &[usize]) -> f64 {
    order.windows(2).map(|w| c[w[0]][w[1]]).sum()
}

/// Visits every permutation of `items` (Heap's algorithm).
pub fn for_each_permutation(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    fn heap(k: usize, a: &mut [usize], visit: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            visit(a);
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, visit);
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
        heap(k - 1, a, visit);
    }
    let k = items.len();
    heap(k, items, visit);
}

/// Minimum open Hamiltonian path cost by exhaustive enumeration.
pub fn open_path_optimum(c: &[Vec<f64>]) -> f64 {
    let n = c.len();
    if n <= 1 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut items: Vec<usize> = (0..n).collect();
    for_each_permutation(&mut items, &mut |p| best = best.min(path_cost(c, p)));
    best
}

/// Minimum Hamiltonian cycle cost, node 0 fixed first. Requires every pair
/// used by a tour to be present; absent pairs are given by `None`.
pub fn closed_tour_optimum(c: &[Vec<Option<f64>>]) -> f64 {
    let n = c.len();
    if n <= 1 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut rest: Vec<usize> = (1..n).collect();
    for_each_permutation(&mut rest, &mut |p| {
        let mut total = 0.0;
        let mut prev = 0;
        for &v in p.iter().chain(std::iter::once(&0)) {
            match c[prev][v] {
                Some(x) => total += x,
                None => return,
            }
            prev = v;
        }
        best = best.min(total);
    });
    best
}

/// All-pairs shortest paths by Bellman-Ford style relaxation to a fixed point.
pub fn relaxation_apsp(instance: &Instance) -> Vec<Vec<f64>> {
    let n = instance.n();
    let edges: Vec<(usize, usize, f64)> = instance.costs.edges().collect();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (s, row) in dist.iter_mut().enumerate() {
        row[s] = 0.0;
        loop {
            let mut changed = false;
            for &(i, j, c) in &edges {
                if row[i] + c < row[j] {
                    row[j] = row[i] + c;
                    changed = true;
                }
                if row[j] + c < row[i] {
                    row[i] = row[j] + c;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    dist
}

pub fn tri_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let x = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub fn tri_normal(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let x = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let len = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    [x[0] / len, x[1] / len, x[2] / len]
}

/// Checks a segmentation against the mesh without using the library's
/// normals, areas or adjacency. Returns violations.
pub fn check_segmentation(mesh: &Mesh, theta_max: f64, area_limit: f64, patches: &[Patch]) -> Vec<String> {
    let v: Vec<[f64; 3]> = mesh.vertices().iter().map(|p| [p.x, p.y, p.z]).collect();
    let faces = mesh.faces();
    let area = |f: usize| tri_area(v[faces[f][0]], v[faces[f][1]], v[faces[f][2]]);
    let normal = |f: usize| tri_normal(v[faces[f][0]], v[faces[f][1]], v[faces[f][2]]);
    let mut edge_faces: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (f, t) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            edge_faces.entry((a.min(b), a.max(b))).or_default().push(f);
        }
    }
    let mut problems = Vec::new();
    let mut seen = vec![0usize; faces.len()];
    for (p, patch) in patches.iter().enumerate() {
        let members: BTreeSet<usize> = patch.face_ids.iter().copied().collect();
        for &f in &members {
            seen[f] += 1;
        }
        let a: f64 = members.iter().map(|&f| area(f)).sum();
        if members.len() > 1 && a > area_limit * (1.0 + 1e-9) {
            problems.push(format!("patch {p} area {a} over limit {area_limit}"));
        }
        let mut mean = [0.0; 3];
        for &f in &members {
            let (nf, af) = (normal(f), area(f));
            for k in 0..3 {
                mean[k] += nf[k] * af;
            }
        }
        let len = (mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]).sqrt();
        for &f in &members {
            let nf = normal(f);
            let cos = (nf[0] * mean[0] + nf[1] * mean[1] + nf[2] * mean[2]) / len;
            let angle = cos.clamp(-1.0, 1.0).acos();
            if angle > theta_max + 1e-9 {
                problems.push(format!("patch {p} face {f} deviates {angle} rad"));
            }
        }
        let start = *members.iter().next().unwrap();
        let mut reached = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            for k in 0..3 {
                let (a, b) = (faces[f][k], faces[f][(k + 1) % 3]);
                for &g in &edge_faces[&(a.min(b), a.max(b))] {
                    if members.contains(&g) && reached.insert(g) {
                        queue.push_back(g);
                    }
                }
            }
        }
        if reached.len() != members.len() {
            problems.push(format!("patch {p} is not edge-connected"));
        }
    }
    if let Some(f) = seen.iter().position(|&s| s != 1) {
        problems.push(format!("face {f} covered {} times", seen[f]));
    }
    let mesh_area: f64 = (0..faces.len()).map(area).sum();
    let patch_area: f64 = patches.iter().map(|p| p.area).sum();
    if !rel_close(mesh_area, patch_area, 1e-9) {
        problems.push(format!("patch area {patch_area} vs mesh area {mesh_area}"));
    }
    problems
}
