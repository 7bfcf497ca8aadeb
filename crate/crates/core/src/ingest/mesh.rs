//! Triangle meshes: STL (ASCII and binary) and OBJ loading, plus a couple of
//! analytic test surfaces.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::num::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    StlAscii,
    StlBinary,
    Obj,
}

impl MeshFormat {
    /// Guesses the format from the file contents. ASCII STL starts with
    /// `solid` and mentions `facet`; OBJ has `v ` lines; anything else is
    /// taken as binary STL.
    pub fn detect(bytes: &[u8]) -> Self {
        let head = &bytes[..bytes.len().min(1024)];
        let text = String::from_utf8_lossy(head);
        let trimmed = text.trim_start();
        if trimmed.starts_with("solid") && (text.contains("facet") || bytes.len() < 84) {
            return MeshFormat::StlAscii;
        }
        if text.lines().any(|l| l.starts_with("v ")) && std::str::from_utf8(bytes).is_ok() {
            return MeshFormat::Obj;
        }
        MeshFormat::StlBinary
    }
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stl" | "stl-ascii" => Ok(MeshFormat::StlAscii),
            "stl-binary" | "binary-stl" => Ok(MeshFormat::StlBinary),
            "obj" => Ok(MeshFormat::Obj),
            other => Err(Error::InvalidConfig(format!("unknown mesh format {other:?}"))),
        }
    }
}

impl fmt::Display for MeshFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeshFormat::StlAscii => "stl-ascii",
            MeshFormat::StlBinary => "stl-binary",
            MeshFormat::Obj => "obj",
        })
    }
}

/// Triangle mesh with cached per-face unit normals and areas.
#[derive(Clone, Debug)]
pub struct Mesh<T> {
    vertices: Vec<Point3<T>>,
    faces: Vec<[usize; 3]>,
    normals: Vec<Point3<T>>,
    areas: Vec<T>,
    dropped: Vec<usize>,
}

impl<T: Scalar> Mesh<T> {
    /// Builds a mesh, dropping zero-area faces with a warning. Their
    /// positions in `faces` are kept in [`Mesh::dropped_faces`].
    pub fn new(vertices: Vec<Point3<T>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mut mesh = Mesh { vertices, faces: Vec::new(), normals: Vec::new(), areas: Vec::new(), dropped: Vec::new() };
        for (index, face) in faces.into_iter().enumerate() {
            if let Some(&bad) = face.iter().find(|&&v| v >= mesh.vertices.len()) {
                return Err(Error::parse(format!("face {index}"), format!("vertex index {bad} out of range")));
            }
            let [a, b, c] = face.map(|v| mesh.vertices[v]);
            let cross = (b - a).cross(&(c - a));
            let area = cross.norm() * T::of(0.5);
            match cross.normalized() {
                Some(normal) if area > T::zero() && face[0] != face[1] && face[1] != face[2] && face[0] != face[2] => {
                    mesh.faces.push(face);
                    mesh.normals.push(normal);
                    mesh.areas.push(area);
                }
                _ => {
                    warn!("dropping degenerate face {index}");
                    mesh.dropped.push(index);
                }
            }
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point3<T>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn normal(&self, face: usize) -> Point3<T> {
        self.normals[face]
    }

    pub fn area(&self, face: usize) -> T {
        self.areas[face]
    }

    pub fn total_area(&self) -> T {
        self.areas.iter().copied().sum()
    }

    pub fn centroid(&self, face: usize) -> Point3<T> {
        let [a, b, c] = self.faces[face].map(|v| self.vertices[v]);
        (a + b + c) * (T::one() / T::of(3.0))
    }

    /// Input indices of faces dropped as degenerate.
    pub fn dropped_faces(&self) -> &[usize] {
        &self.dropped
    }

    /// For each face, the sorted list of faces sharing an edge with it.
    pub fn face_adjacency(&self) -> Vec<Vec<usize>> {
        let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (f, face) in self.faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                by_edge.entry((a.min(b), a.max(b))).or_default().push(f);
            }
        }
        let mut adjacency = vec![Vec::new(); self.faces.len()];
        for faces in by_edge.values() {
            for &f in faces {
                for &g in faces {
                    if f != g {
                        adjacency[f].push(g);
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        adjacency
    }

    /// Axis-aligned unit cube `[0,1]^3`, 12 outward-facing triangles.
    pub fn unit_cube() -> Self {
        let vertices = (0..8)
            .map(|i| Point3::new(T::of((i & 1) as f64), T::of(((i >> 1) & 1) as f64), T::of(((i >> 2) & 1) as f64)))
            .collect();
        let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
        let faces = quads.iter().flat_map(|&[a, b, c, d]| [[a, b, c], [a, c, d]]).collect();
        Mesh::new(vertices, faces).expect("cube is valid")
    }

    /// Unit icosphere: an icosahedron subdivided `level` times, `20·4^level`
    /// faces, all wound outward.
    pub fn icosphere(level: u32) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let raw = [
            [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
            [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
            [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
        ];
        let mut verts: Vec<Point3<f64>> =
            raw.iter().map(|&[x, y, z]| Point3::new(x, y, z).normalized().unwrap()).collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ];
        for _ in 0..level {
            let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, verts: &mut Vec<Point3<f64>>| {
                *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    verts.push(((verts[a] + verts[b]) * 0.5).normalized().unwrap());
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for &[a, b, c] in &faces {
                let ab = mid(a, b, &mut verts);
                let bc = mid(b, c, &mut verts);
                let ca = mid(c, a, &mut verts);
                next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = next;
        }
        for face in &mut faces {
            let [a, b, c] = face.map(|v| verts[v]);
            if (b - a).cross(&(c - a)).dot(&(a + b + c)) < 0.0 {
                face.swap(1, 2);
            }
        }
        Mesh::new(verts.into_iter().map(Point3::from_f64).collect(), faces).expect("icosphere is valid")
    }

    /// ASCII STL rendering with the cached normals.
    pub fn to_stl_ascii(&self, name: &str) -> String {
        let mut out = format!("solid {name}\n");
        for (f, face) in self.faces.iter().enumerate() {
            let n = self.normals[f];
            out.push_str(&format!("  facet normal {} {} {}\n    outer loop\n", n.x, n.y, n.z));
            for &v in face {
                let p = self.vertices[v];
                out.push_str(&format!("      vertex {} {} {}\n", p.x, p.y, p.z));
            }
            out.push_str("    endloop\n  endfacet\n");
        }
        out.push_str(&format!("endsolid {name}\n"));
        out
    }

    /// Binary STL rendering (coordinates narrowed to `f32`).
    pub fn to_stl_binary(&self) -> Vec<u8> {
        let mut out = vec![0u8; 80];
        out.extend_from_slice(&(self.faces.len() as u32).to_le_bytes());
        for (f, face) in self.faces.iter().enumerate() {
            let n = self.normals[f];
            for p in std::iter::once(n).chain(face.iter().map(|&v| self.vertices[v])) {
                for c in [p.x, p.y, p.z] {
                    out.extend_from_slice(&(c.as_f64() as f32).to_le_bytes());
                }
            }
            out.extend_from_slice(&0u16.to_le_bytes());
        }
        out
    }
}

/// Parses a mesh. Vertices are merged by exact coordinate equality and face
/// normals are recomputed from the winding; stored normals are ignored.
pub fn load_mesh<T: Scalar>(bytes: &[u8], format: MeshFormat) -> Result<Mesh<T>> {
    let triangles = match format {
        MeshFormat::StlAscii => parse_stl_ascii(bytes)?,
        MeshFormat::StlBinary => parse_stl_binary(bytes)?,
        MeshFormat::Obj => return parse_obj(bytes),
    };
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::with_capacity(triangles.len());
    for tri in triangles {
        let face = tri.map(|p| {
            // +0.0 folds -0.0 into 0.0 so equal coordinates share a key
            let key = [(p[0] + 0.0).to_bits(), (p[1] + 0.0).to_bits(), (p[2] + 0.0).to_bits()];
            *index.entry(key).or_insert_with(|| {
                vertices.push(Point3::new(T::of(p[0]), T::of(p[1]), T::of(p[2])));
                vertices.len() - 1
            })
        });
        faces.push(face);
    }
    Mesh::new(vertices, faces)
}

type Triangle = [[f64; 3]; 3];

fn parse_stl_ascii(bytes: &[u8]) -> Result<Vec<Triangle>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(format!("byte {}", e.valid_up_to()), "not UTF-8"))?;
    let mut triangles = Vec::new();
    let mut current: Vec<[f64; 3]> = Vec::with_capacity(3);
    let mut in_facet = false;
    let mut saw_solid = false;
    for (lineno, line) in text.lines().enumerate() {
        let loc = || format!("line {}", lineno + 1);
        let mut tokens = line.split_whitespace();
        let Some(keyword) = tokens.next() else { continue };
        match keyword {
            "solid" => saw_solid = true,
            "facet" => {
                if in_facet {
                    return Err(Error::parse(loc(), "nested facet"));
                }
                in_facet = true;
                current.clear();
            }
            "outer" | "endloop" => {}
            "vertex" => {
                if !in_facet {
                    return Err(Error::parse(loc(), "vertex outside facet"));
                }
                let coords: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>().map_err(|_| Error::parse(loc(), format!("bad number {t:?}"))))
                    .collect::<Result<_>>()?;
                if coords.len() != 3 || coords.iter().any(|c| !c.is_finite()) {
                    return Err(Error::parse(loc(), "vertex needs three finite coordinates"));
                }
                current.push([coords[0], coords[1], coords[2]]);
            }
            "endfacet" => {
                if !in_facet || current.len() != 3 {
                    return Err(Error::parse(loc(), format!("facet has {} vertices", current.len())));
                }
                triangles.push([current[0], current[1], current[2]]);
                in_facet = false;
            }
            "endsolid" => {}
            other => return Err(Error::parse(loc(), format!("unexpected keyword {other:?}"))),
        }
    }
    if !saw_solid {
        return Err(Error::parse("line 1", "missing `solid` header"));
    }
    if in_facet {
        return Err(Error::parse("end of input", "unterminated facet"));
    }
    if triangles.is_empty() {
        return Err(Error::parse("end of input", "no facets"));
    }
    Ok(triangles)
}

fn parse_stl_binary(bytes: &[u8]) -> Result<Vec<Triangle>> {
    if bytes.len() < 84 {
        return Err(Error::parse(format!("offset {}", bytes.len()), "binary STL shorter than its 84-byte header"));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let needed = 84 + count * 50;
    if bytes.len() < needed {
        return Err(Error::parse(
            format!("offset {}", bytes.len()),
            format!("header declares {count} triangles, needs {needed} bytes"),
        ));
    }
    if count == 0 {
        return Err(Error::parse("offset 80", "no triangles"));
    }
    let read = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64;
    let mut triangles = Vec::with_capacity(count);
    for t in 0..count {
        // skip the 12-byte stored normal
        let base = 84 + t * 50 + 12;
        let mut tri = [[0.0; 3]; 3];
        for (v, vertex) in tri.iter_mut().enumerate() {
            for (c, coord) in vertex.iter_mut().enumerate() {
                *coord = read(base + v * 12 + c * 4);
                if !coord.is_finite() {
                    return Err(Error::parse(format!("offset {}", base + v * 12 + c * 4), "non-finite coordinate"));
                }
            }
        }
        triangles.push(tri);
    }
    Ok(triangles)
}

fn parse_obj<T: Scalar>(bytes: &[u8]) -> Result<Mesh<T>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(format!("byte {}", e.valid_up_to()), "not UTF-8"))?;
    let mut raw: Vec<[f64; 3]> = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let loc = || format!("line {}", lineno + 1);
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>().map_err(|_| Error::parse(loc(), format!("bad number {t:?}"))))
                    .collect::<Result<_>>()?;
                if coords.len() != 3 || coords.iter().any(|c| !c.is_finite()) {
                    return Err(Error::parse(loc(), "vertex needs three finite coordinates"));
                }
                raw.push([coords[0], coords[1], coords[2]]);
            }
            Some("f") => {
                let idx: Vec<usize> = tokens
                    .map(|t| {
                        let first = t.split('/').next().unwrap_or("");
                        let i: i64 = first.parse().map_err(|_| Error::parse(loc(), format!("bad index {t:?}")))?;
                        // 1-based, negative values count back from the latest vertex
                        let resolved = if i > 0 { i - 1 } else { raw.len() as i64 + i };
                        if i == 0 || resolved < 0 || resolved as usize >= raw.len() {
                            return Err(Error::parse(loc(), format!("vertex index {i} out of range")));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(Error::parse(loc(), format!("only triangles are supported, got {} vertices", idx.len())));
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    if faces.is_empty() {
        return Err(Error::parse("end of input", "no faces"));
    }
    // Merge duplicate vertex positions like the STL path does.
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let remap: Vec<usize> = raw
        .iter()
        .map(|p| {
            let key = [(p[0] + 0.0).to_bits(), (p[1] + 0.0).to_bits(), (p[2] + 0.0).to_bits()];
            *index.entry(key).or_insert_with(|| {
                vertices.push(Point3::new(T::of(p[0]), T::of(p[1]), T::of(p[2])));
                vertices.len() - 1
            })
        })
        .collect();
    Mesh::new(vertices, faces.into_iter().map(|f: [usize; 3]| f.map(|v| remap[v])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "solid t\n facet normal 0 0 -1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n  endloop\n endfacet\nendsolid t\n";

    #[test]
    fn ascii_triangle() {
        let mesh: Mesh<f64> = load_mesh(TRIANGLE.as_bytes(), MeshFormat::StlAscii).unwrap();
        assert_eq!(mesh.vertices().len(), 3);
        assert_eq!(mesh.face_count(), 1);
        assert_eq!(mesh.area(0), 0.5);
        // stored normal is wrong on purpose; winding decides
        assert_eq!(mesh.normal(0), Point3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn empty_inputs_fail() {
        for format in [MeshFormat::StlAscii, MeshFormat::StlBinary, MeshFormat::Obj] {
            assert!(matches!(load_mesh::<f64>(b"", format), Err(Error::Parse { .. })), "{format}");
        }
    }

    #[test]
    fn malformed_ascii_reports_line() {
        let bad = "solid t\nfacet normal 0 0 1\nouter loop\nvertex 0 0 zero\n";
        match load_mesh::<f64>(bad.as_bytes(), MeshFormat::StlAscii) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 4"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cube_round_trips_through_both_stl_flavours() {
        let cube = Mesh::<f64>::unit_cube();
        assert_eq!(cube.face_count(), 12);
        assert_eq!(cube.total_area(), 6.0);
        let ascii = cube.to_stl_ascii("cube");
        assert_eq!(MeshFormat::detect(ascii.as_bytes()), MeshFormat::StlAscii);
        let a: Mesh<f64> = load_mesh(ascii.as_bytes(), MeshFormat::StlAscii).unwrap();
        assert_eq!(a.vertices().len(), 8);
        assert!((a.total_area() - 6.0).abs() < 1e-9);
        let bin = cube.to_stl_binary();
        assert_eq!(MeshFormat::detect(&bin), MeshFormat::StlBinary);
        let b: Mesh<f64> = load_mesh(&bin, MeshFormat::StlBinary).unwrap();
        assert_eq!(b.vertices().len(), 8);
        assert!((b.total_area() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn truncated_binary_rejected() {
        let mut bin = Mesh::<f64>::unit_cube().to_stl_binary();
        bin.truncate(bin.len() - 10);
        assert!(matches!(load_mesh::<f64>(&bin, MeshFormat::StlBinary), Err(Error::Parse { .. })));
    }

    #[test]
    fn obj_subset() {
        let obj = "# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\nf 1 3 -1\n";
        assert_eq!(MeshFormat::detect(obj.as_bytes()), MeshFormat::Obj);
        let mesh: Mesh<f64> = load_mesh(obj.as_bytes(), MeshFormat::Obj).unwrap();
        assert_eq!(mesh.face_count(), 2);
        assert_eq!(mesh.total_area(), 1.0);
        assert!(load_mesh::<f64>(b"v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n", MeshFormat::Obj).is_err());
    }

    #[test]
    fn degenerate_faces_dropped_not_fatal() {
        let obj = "v 0 0 0\nv 1 0 0\nv 2 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 4\n";
        let mesh: Mesh<f64> = load_mesh(obj.as_bytes(), MeshFormat::Obj).unwrap();
        assert_eq!(mesh.face_count(), 1);
        assert_eq!(mesh.dropped_faces(), &[0]);
    }

    #[test]
    fn icosphere_is_closed_and_outward() {
        let sphere = Mesh::<f64>::icosphere(2);
        assert_eq!(sphere.face_count(), 320);
        let adjacency = sphere.face_adjacency();
        assert!(adjacency.iter().all(|a| a.len() == 3));
        for f in 0..sphere.face_count() {
            assert!(sphere.normal(f).dot(&sphere.centroid(f)) > 0.0);
        }
        // close to the unit sphere area, from below
        let area = sphere.total_area();
        assert!(area < 4.0 * std::f64::consts::PI && area > 12.0);
    }
}
