//! Region-growing segmentation of a mesh into patches bounded in area and
//! normal deviation, and placement of one inspection point per patch.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::ingest::mesh::Mesh;
use crate::num::Scalar;

/// Upper bound on patch area.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AreaLimit {
    /// Square meters.
    Absolute(f64),
    /// Fraction of the mesh's total area.
    FractionOfTotal(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentationConfig {
    pub max_patch_area: AreaLimit,
    /// Radians; largest allowed angle between a face normal and the patch's
    /// mean normal.
    pub max_normal_deviation: f64,
    /// Sensor offset along the patch normal, meters.
    pub standoff: f64,
    /// Neighbors per point when building the cost graph.
    pub knn: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            max_patch_area: AreaLimit::FractionOfTotal(0.05),
            max_normal_deviation: 0.35,
            standoff: 0.15,
            knn: 4,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        let area = match self.max_patch_area {
            AreaLimit::Absolute(a) | AreaLimit::FractionOfTotal(a) => a,
        };
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::InvalidConfig(format!("patch area limit must be positive, got {area}")));
        }
        let theta = self.max_normal_deviation;
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::InvalidConfig(format!("normal deviation limit must be in (0, pi), got {theta}")));
        }
        if !(self.standoff >= 0.0 && self.standoff.is_finite()) {
            return Err(Error::InvalidConfig(format!("standoff must be non-negative, got {}", self.standoff)));
        }
        if self.knn == 0 {
            return Err(Error::InvalidConfig("knn must be at least 1".into()));
        }
        Ok(())
    }

    pub fn area_limit<T: Scalar>(&self, mesh: &Mesh<T>) -> T {
        match self.max_patch_area {
            AreaLimit::Absolute(a) => T::of(a),
            AreaLimit::FractionOfTotal(f) => mesh.total_area() * T::of(f),
        }
    }
}

/// An edge-connected group of faces.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch<T> {
    /// Sorted face indices.
    pub face_ids: Vec<usize>,
    pub area: T,
    /// Area-weighted, normalized.
    pub mean_normal: Point3<T>,
    /// Radians.
    pub max_normal_deviation: T,
    /// Area-weighted centroid of the member faces.
    pub representative_point: Point3<T>,
}

impl<T: Scalar> Patch<T> {
    fn from_faces(mesh: &Mesh<T>, mut face_ids: Vec<usize>) -> Option<Self> {
        face_ids.sort_unstable();
        let area: T = face_ids.iter().map(|&f| mesh.area(f)).sum();
        let weighted = face_ids.iter().fold(Point3::zero(), |acc, &f| acc + mesh.normal(f) * mesh.area(f));
        let mean_normal = weighted.normalized()?;
        let max_normal_deviation =
            face_ids.iter().map(|&f| mesh.normal(f).angle_to(&mean_normal)).fold(T::zero(), T::max);
        let centroid = face_ids.iter().fold(Point3::zero(), |acc, &f| acc + mesh.centroid(f) * mesh.area(f));
        Some(Patch {
            face_ids,
            area,
            mean_normal,
            max_normal_deviation,
            representative_point: centroid * (T::one() / area),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Segmentation<T> {
    pub patches: Vec<Patch<T>>,
    /// Patches made of a single face that alone exceeds the area limit.
    pub oversized: Vec<usize>,
}

/// Deterministic region growing: seed at the lowest unassigned face, absorb
/// edge-adjacent faces in index order while both limits hold, repeat.
pub fn segment_mesh<T: Scalar>(mesh: &Mesh<T>, config: &SegmentationConfig) -> Result<Segmentation<T>> {
    config.validate()?;
    if mesh.face_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    let max_area = config.area_limit(mesh);
    let max_dev = T::of(config.max_normal_deviation);
    let adjacency = mesh.face_adjacency();
    let mut assigned = vec![false; mesh.face_count()];
    let mut patches = Vec::new();
    let mut oversized = Vec::new();

    for seed in 0..mesh.face_count() {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut members = vec![seed];
        let mut area = mesh.area(seed);
        let mut weighted = mesh.normal(seed) * mesh.area(seed);
        if area > max_area {
            oversized.push(patches.len());
        } else {
            let mut rejected = BTreeSet::new();
            let mut frontier: BTreeSet<usize> = adjacency[seed].iter().copied().filter(|&g| !assigned[g]).collect();
            while let Some(face) = frontier.pop_first() {
                let grown_area = area + mesh.area(face);
                let grown_weighted = weighted + mesh.normal(face) * mesh.area(face);
                let fits = grown_area <= max_area
                    && grown_weighted.normalized().is_some_and(|mean| {
                        members
                            .iter()
                            .chain(std::iter::once(&face))
                            .all(|&f| mesh.normal(f).angle_to(&mean) <= max_dev)
                    });
                if !fits {
                    rejected.insert(face);
                    continue;
                }
                assigned[face] = true;
                members.push(face);
                area = grown_area;
                weighted = grown_weighted;
                for &g in &adjacency[face] {
                    if !assigned[g] && !rejected.contains(&g) {
                        frontier.insert(g);
                    }
                }
            }
        }
        patches.push(Patch::from_faces(mesh, members).expect("patch normals pass the deviation check"));
    }
    Ok(Segmentation { patches, oversized })
}

/// One point per patch: its centroid pushed `standoff` along the mean normal.
pub fn inspection_points<T: Scalar>(patches: &[Patch<T>], config: &SegmentationConfig) -> Vec<Point3<T>> {
    let standoff = T::of(config.standoff);
    patches.iter().map(|p| p.representative_point + p.mean_normal * standoff).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(area: AreaLimit, theta: f64) -> SegmentationConfig {
        SegmentationConfig { max_patch_area: area, max_normal_deviation: theta, ..Default::default() }
    }

    #[test]
    fn single_triangle_one_patch() {
        let mesh = Mesh::<f64>::new(
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let seg = segment_mesh(&mesh, &SegmentationConfig::default()).unwrap();
        assert_eq!(seg.patches.len(), 1);
        assert_eq!(seg.patches[0].face_ids, vec![0]);
        // the default limit is 5% of the total area, so the lone face is flagged
        assert_eq!(seg.oversized, vec![0]);
    }

    #[test]
    fn cube_splits_per_side() {
        let cube = Mesh::<f64>::unit_cube();
        let seg = segment_mesh(&cube, &config(AreaLimit::Absolute(10.0), 0.5)).unwrap();
        assert_eq!(seg.patches.len(), 6);
        for p in &seg.patches {
            assert_eq!(p.face_ids.len(), 2);
            assert_eq!(p.area, 1.0);
            assert_eq!(p.max_normal_deviation, 0.0);
        }
    }

    #[test]
    fn oversized_faces_flagged() {
        let cube = Mesh::<f64>::unit_cube();
        let seg = segment_mesh(&cube, &config(AreaLimit::Absolute(0.25), 0.5)).unwrap();
        assert_eq!(seg.patches.len(), 12);
        assert_eq!(seg.oversized, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn unit_square_point_with_standoff() {
        let mesh = Mesh::<f64>::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let cfg = SegmentationConfig { standoff: 0.1, ..config(AreaLimit::Absolute(2.0), 0.3) };
        let seg = segment_mesh(&mesh, &cfg).unwrap();
        assert_eq!(seg.patches.len(), 1);
        let p = inspection_points(&seg.patches, &cfg)[0];
        assert!((p.x - 0.5).abs() < 1e-15 && (p.y - 0.5).abs() < 1e-15 && (p.z - 0.1).abs() < 1e-15);
        let on_surface = inspection_points(&seg.patches, &SegmentationConfig { standoff: 0.0, ..cfg })[0];
        assert_eq!(on_surface.z, 0.0);
    }

    #[test]
    fn cube_points_sit_outside_face_centres() {
        let cube = Mesh::<f64>::unit_cube();
        let cfg = SegmentationConfig { standoff: 0.2, ..config(AreaLimit::Absolute(10.0), 0.5) };
        let seg = segment_mesh(&cube, &cfg).unwrap();
        let mut points: Vec<[f64; 3]> =
            inspection_points(&seg.patches, &cfg).iter().map(|p| [p.x, p.y, p.z]).collect();
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = vec![
            [-0.2, 0.5, 0.5], [1.2, 0.5, 0.5], [0.5, -0.2, 0.5],
            [0.5, 1.2, 0.5], [0.5, 0.5, -0.2], [0.5, 0.5, 1.2],
        ];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (p, e) in points.iter().zip(&expected) {
            for k in 0..3 {
                assert!((p[k] - e[k]).abs() < 1e-12, "{p:?} vs {e:?}");
            }
        }
    }

    #[test]
    fn bad_config_rejected() {
        let cube = Mesh::<f64>::unit_cube();
        assert!(segment_mesh(&cube, &config(AreaLimit::Absolute(1.0), 4.0)).is_err());
        assert!(segment_mesh(&cube, &config(AreaLimit::FractionOfTotal(0.0), 0.3)).is_err());
    }
}
