//! Seeded synthetic instances: points sampled on simple surfaces, joined by
//! a union k-nearest-neighbor graph.
//!
//! Sampling only uses arithmetic and `sqrt`, both correctly rounded, so the
//! same arguments give the same instance on every platform.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::ingest::graph::build_graph;
use crate::num::Scalar;
use crate::problem::Instance;
use crate::rng::{rng_from_seed, SolverRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    /// Unit sphere.
    Sphere,
    /// Ring torus, major radius 1 m, minor radius 0.3 m.
    Torus,
    /// Surface of a 1.0 × 0.6 × 0.1 m box, sampled by area.
    BoxPanel,
    /// Uniform points in the unit cube.
    UniformCloud,
}

impl SurfaceKind {
    pub const ALL: [SurfaceKind; 4] =
        [SurfaceKind::Sphere, SurfaceKind::Torus, SurfaceKind::BoxPanel, SurfaceKind::UniformCloud];

    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Sphere => "sphere",
            SurfaceKind::Torus => "torus",
            SurfaceKind::BoxPanel => "box-panel",
            SurfaceKind::UniformCloud => "uniform-cloud",
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SurfaceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown surface kind {s:?}")))
    }
}

/// Point on the unit circle by rejection; returns `(cos, sin)`.
fn unit_circle(rng: &mut SolverRng) -> (f64, f64) {
    loop {
        let (u, v): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r2 = u * u + v * v;
        if r2 > 1e-12 && r2 <= 1.0 {
            let r = r2.sqrt();
            return (u / r, v / r);
        }
    }
}

fn sample_point(kind: SurfaceKind, rng: &mut SolverRng) -> Point3<f64> {
    match kind {
        SurfaceKind::Sphere => loop {
            let v: Point3<f64> = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let r2 = v.dot(&v);
            if r2 > 1e-12 && r2 <= 1.0 {
                break v * (1.0 / r2.sqrt());
            }
        },
        SurfaceKind::Torus => {
            let (major, minor) = (1.0, 0.3);
            let (cu, su) = unit_circle(rng);
            let (cv, sv) = unit_circle(rng);
            let ring = major + minor * cv;
            Point3::new(ring * cu, ring * su, minor * sv)
        }
        SurfaceKind::BoxPanel => {
            let (a, b, c) = (1.0, 0.6, 0.1);
            let areas = [b * c, b * c, a * c, a * c, a * b, a * b];
            let total: f64 = areas.iter().sum();
            let mut pick = rng.gen_range(0.0..total);
            let mut side = 0;
            while side < 5 && pick >= areas[side] {
                pick -= areas[side];
                side += 1;
            }
            let (s, t): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let lo_hi = |side: usize, extent: f64| if side % 2 == 0 { 0.0 } else { extent };
            match side / 2 {
                0 => Point3::new(lo_hi(side, a), s * b, t * c),
                1 => Point3::new(s * a, lo_hi(side, b), t * c),
                _ => Point3::new(s * a, t * b, lo_hi(side, c)),
            }
        }
        SurfaceKind::UniformCloud => {
            Point3::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
        }
    }
}

pub fn sample_points(kind: SurfaceKind, n: usize, seed: u64) -> Vec<Point3<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| sample_point(kind, &mut rng)).collect()
}

/// Deterministic instance of `n` points on `kind` with a union k-NN graph.
pub fn generate_instance<T: Scalar>(kind: SurfaceKind, n: usize, knn: usize, seed: u64) -> Result<Instance<T>> {
    if n == 0 {
        return Err(Error::InvalidConfig("instance needs at least one node".into()));
    }
    let points = sample_points(kind, n, seed).into_iter().map(Point3::from_f64).collect();
    let name = format!("{kind}-n{n}-k{knn}-s{seed}");
    let instance = build_graph(&name, points, knn)?;
    Ok(instance.with_metadata("kind", kind).with_metadata("seed", seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::format::write_instance;

    #[test]
    fn deterministic_bytes() {
        for kind in SurfaceKind::ALL {
            let a = write_instance(&generate_instance::<f64>(kind, 30, 4, 5).unwrap());
            let b = write_instance(&generate_instance::<f64>(kind, 30, 4, 5).unwrap());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn single_node_no_edges() {
        let inst = generate_instance::<f64>(SurfaceKind::Sphere, 1, 4, 0).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.edge_count(), 0);
    }

    #[test]
    fn points_lie_on_their_surface() {
        for p in sample_points(SurfaceKind::Sphere, 200, 1) {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        for p in sample_points(SurfaceKind::Torus, 200, 1) {
            let ring = (p.x * p.x + p.y * p.y).sqrt() - 1.0;
            assert!(((ring * ring + p.z * p.z).sqrt() - 0.3).abs() < 1e-12);
        }
        for p in sample_points(SurfaceKind::BoxPanel, 200, 1) {
            let on_face = [p.x == 0.0 || p.x == 1.0, p.y == 0.0 || p.y == 0.6, p.z == 0.0 || p.z == 0.1];
            assert!(on_face.iter().any(|&b| b), "{p:?}");
        }
    }

    #[test]
    fn generated_graphs_are_connected() {
        for kind in SurfaceKind::ALL {
            for seed in 0..5 {
                let inst = generate_instance::<f64>(kind, 40, 3, seed).unwrap();
                assert!(inst.costs.is_connected(), "{kind} seed {seed}");
            }
        }
    }

    #[test]
    fn kind_names_parse() {
        for kind in SurfaceKind::ALL {
            assert_eq!(kind.name().parse::<SurfaceKind>().unwrap(), kind);
        }
        assert!("cube".parse::<SurfaceKind>().is_err());
    }
}
