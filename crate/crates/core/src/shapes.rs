//! Closed triangle meshes of simple solids, outward wound.

use std::collections::HashMap;

use crate::geometry::{Point3, TriMesh};

/// Axis-aligned box with two triangles per side.
pub fn axis_box(min: Point3, max: Point3) -> TriMesh {
    let corner = |i: usize| {
        Point3::new(
            if i & 4 != 0 { max.x } else { min.x },
            if i & 2 != 0 { max.y } else { min.y },
            if i & 1 != 0 { max.z } else { min.z },
        )
    };
    let vertices = (0..8).map(corner).collect();
    // quads listed counter-clockwise seen from outside
    let quads = [
        [0, 1, 3, 2], // x = min
        [4, 6, 7, 5], // x = max
        [0, 4, 5, 1], // y = min
        [2, 3, 7, 6], // y = max
        [0, 2, 6, 4], // z = min
        [1, 5, 7, 3], // z = max
    ];
    let faces = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    TriMesh { vertices, faces }
}

/// Icosahedron refined `subdivisions` times and projected onto the sphere.
pub fn icosphere(center: Point3, radius: f64, subdivisions: u32) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point3>| {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let vertices = vertices.iter().map(|p| center + p * radius).collect();
    TriMesh { vertices, faces }
}

/// Torus around the z axis with tube radius `minor` and `major` ring radius.
pub fn torus(
    center: Point3,
    major: f64,
    minor: f64,
    ring_segments: usize,
    tube_segments: usize,
) -> TriMesh {
    use std::f64::consts::TAU;
    let mut vertices = Vec::with_capacity(ring_segments * tube_segments);
    for i in 0..ring_segments {
        let phi = TAU * i as f64 / ring_segments as f64;
        for j in 0..tube_segments {
            let theta = TAU * j as f64 / tube_segments as f64;
            let rho = major + minor * theta.cos();
            vertices
                .push(center + Point3::new(rho * phi.cos(), rho * phi.sin(), minor * theta.sin()));
        }
    }
    let idx = |i: usize, j: usize| (i % ring_segments) * tube_segments + (j % tube_segments);
    let mut faces = Vec::with_capacity(2 * ring_segments * tube_segments);
    for i in 0..ring_segments {
        for j in 0..tube_segments {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh { vertices, faces }
}
