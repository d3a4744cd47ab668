//! Euclidean primitives and the closed-form segment/plane solver.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Point3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Round half up, `floor(x + 0.5)`.
///
/// Unlike half-away-from-zero this commutes with integer translation, so a
/// point on a voxel boundary always lands in the voxel on its positive side
/// no matter where the grid origin is.
#[inline]
pub fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Oriented plane used as the voxelization frame.
///
/// Geometry is mapped into the frame's orthonormal basis (u, v', u x v)
/// before sampling; the default is the global XY frame, i.e. the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub origin: Point3,
    pub u_axis: Vec3,
    pub v_axis: Vec3,
}

impl Default for Frame {
    fn default() -> Self {
        Self {
            origin: Point3::zeros(),
            u_axis: Vec3::x(),
            v_axis: Vec3::y(),
        }
    }
}

impl Frame {
    pub fn new(origin: Point3, u_axis: Vec3, v_axis: Vec3) -> Result<Self> {
        let frame = Self {
            origin,
            u_axis,
            v_axis,
        };
        frame.basis()?;
        Ok(frame)
    }

    fn basis(&self) -> Result<[Vec3; 3]> {
        let w = self.u_axis.cross(&self.v_axis);
        if !(w.norm() > 0.0) || !w.iter().all(|c| c.is_finite()) {
            return Err(Error::Argument(
                "frame axes are parallel or degenerate".into(),
            ));
        }
        let e0 = self.u_axis.normalize();
        let e2 = w.normalize();
        let e1 = e2.cross(&e0);
        Ok([e0, e1, e2])
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::default()
    }

    /// World coordinates to frame coordinates.
    pub fn to_local(&self, p: &Point3) -> Point3 {
        if self.is_identity() {
            return *p;
        }
        let [e0, e1, e2] = self.basis().expect("frame validated on construction");
        let q = p - self.origin;
        Point3::new(e0.dot(&q), e1.dot(&q), e2.dot(&q))
    }

    /// Frame coordinates back to world coordinates.
    pub fn to_world(&self, p: &Point3) -> Point3 {
        if self.is_identity() {
            return *p;
        }
        let [e0, e1, e2] = self.basis().expect("frame validated on construction");
        self.origin + e0 * p.x + e1 * p.y + e2 * p.z
    }
}

/// A network of straight segments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LineSet {
    pub vertices: Vec<Point3>,
    pub segments: Vec<[usize; 2]>,
}

impl LineSet {
    pub fn new(vertices: Vec<Point3>, segments: Vec<[usize; 2]>) -> Result<Self> {
        let set = Self { vertices, segments };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite(&self.vertices)?;
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::Argument(format!(
                    "segment {i} references a missing vertex"
                )));
            }
            if self.vertices[seg[0]] == self.vertices[seg[1]] {
                return Err(Error::Argument(format!("segment {i} has zero length")));
            }
        }
        Ok(())
    }

    /// Segments as (start, direction) pairs.
    pub fn rays(&self) -> impl Iterator<Item = (Point3, Vec3)> + '_ {
        self.segments.iter().map(|&[a, b]| {
            let p = self.vertices[a];
            (p, self.vertices[b] - p)
        })
    }

    pub fn transformed(&self, frame: &Frame) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| frame.to_local(p)).collect(),
            segments: self.segments.clone(),
        }
    }
}

/// Indexed triangle mesh.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = Self { vertices, faces };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite(&self.vertices)?;
        for (i, face) in self.faces.iter().enumerate() {
            if face.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::Argument(format!(
                    "face {i} references a missing vertex"
                )));
            }
            let [a, b, c] = self.triangle(i);
            if (b - a).cross(&(c - a)).norm_squared() == 0.0 {
                return Err(Error::Argument(format!(
                    "face {i} is degenerate (zero area)"
                )));
            }
        }
        Ok(())
    }

    pub fn triangle(&self, face: usize) -> [Point3; 3] {
        self.faces[face].map(|v| self.vertices[v])
    }

    pub fn transformed(&self, frame: &Frame) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| frame.to_local(p)).collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn area(&self) -> f64 {
        (0..self.faces.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum()
    }

    /// Signed enclosed volume (divergence theorem); positive for outward-wound closed meshes.
    pub fn signed_volume(&self) -> f64 {
        (0..self.faces.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }
}

fn check_finite(points: &[Point3]) -> Result<()> {
    match points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
        Some(i) => Err(Error::Argument(format!(
            "vertex {i} has a non-finite coordinate"
        ))),
        None => Ok(()),
    }
}

/// Regular grid placement: voxel size, the rounded minimum corner, and the
/// per-axis span in voxels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub sigma: Vec3,
    pub min_corner: [i64; 3],
    pub dims: [u64; 3],
}

impl GridSpec {
    pub fn new(sigma: Vec3, min_corner: [i64; 3], dims: [u64; 3]) -> Result<Self> {
        check_sigma(&sigma)?;
        if dims.contains(&0) {
            return Err(Error::Argument("grid dims must be at least 1".into()));
        }
        Ok(Self {
            sigma,
            min_corner,
            dims,
        })
    }

    /// World coordinate of the centroid of integer voxel `index` along `axis`.
    pub fn center(&self, axis: usize, index: i64) -> f64 {
        index as f64 * self.sigma[axis]
    }
}

pub fn check_sigma(sigma: &Vec3) -> Result<()> {
    if sigma.iter().all(|s| s.is_finite() && *s > 0.0) {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "voxel size must be positive and finite, got ({}, {}, {})",
            sigma.x, sigma.y, sigma.z
        )))
    }
}

/// Rounded bounding grid of a point set.
///
/// `min_corner = round(min / sigma)`, `dims = round(max / sigma) - min_corner`,
/// with degenerate (flat) axes padded to one voxel.
pub fn bounding_grid(points: &[Point3], sigma: Vec3) -> Result<GridSpec> {
    check_sigma(&sigma)?;
    let first = points
        .first()
        .ok_or_else(|| Error::Argument("cannot bound empty geometry".into()))?;
    check_finite(points)?;
    let (lo, hi) = points
        .iter()
        .fold((*first, *first), |(lo, hi), p| (lo.inf(p), hi.sup(p)));
    let mut min_corner = [0i64; 3];
    let mut dims = [0u64; 3];
    for a in 0..3 {
        min_corner[a] = round_half_up(lo[a] / sigma[a]);
        let max = round_half_up(hi[a] / sigma[a]);
        dims[a] = ((max - min_corner[a]) as u64).max(1);
    }
    Ok(GridSpec {
        sigma,
        min_corner,
        dims,
    })
}

/// Closed-form segment/parallelogram intersection.
///
/// Solves `p + r d = c + s u + t v`. Returns `(r, s, t)` only when the system
/// is not (near) singular and all three parameters lie in `[0, 1]`.
pub fn intersect_ray_parallelogram(
    p: &Point3,
    d: &Vec3,
    c: &Point3,
    u: &Vec3,
    v: &Vec3,
    eps: f64,
) -> Option<(f64, f64, f64)> {
    let (r, s, t) = solve_intersection(p, d, c, u, v, eps)?;
    let unit = 0.0..=1.0;
    (unit.contains(&r) && unit.contains(&s) && unit.contains(&t)).then_some((r, s, t))
}

/// The unconstrained solve behind [`intersect_ray_parallelogram`].
///
/// With `w = u x v`, `b = p - c`, `e = d x b` and `delta = -d.w`:
/// `r = b.w / delta`, `s = -e.v / delta`, `t = e.u / delta`.
pub fn solve_intersection(
    p: &Point3,
    d: &Vec3,
    c: &Point3,
    u: &Vec3,
    v: &Vec3,
    eps: f64,
) -> Option<(f64, f64, f64)> {
    let w = u.cross(v);
    let delta = -d.dot(&w);
    if delta.abs() <= eps {
        return None;
    }
    let b = p - c;
    let e = d.cross(&b);
    Some((b.dot(&w) / delta, -e.dot(v) / delta, e.dot(u) / delta))
}

/// Scale-relative singularity threshold for the determinant `-d.(u x v)`.
pub fn determinant_eps(d: &Vec3, u: &Vec3, v: &Vec3) -> f64 {
    1e-12 * d.norm() * u.norm() * v.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_translation_invariant() {
        assert_eq!(round_half_up(0.5), 1);
        assert_eq!(round_half_up(-0.5), 0);
        assert_eq!(round_half_up(-0.6), -1);
        assert_eq!(round_half_up(2.5), 3);
        for k in -5..5 {
            assert_eq!(round_half_up(k as f64 + 0.5), k + 1);
        }
    }

    #[test]
    fn bounding_grid_examples() {
        let one = Vec3::repeat(1.0);
        let g = bounding_grid(&[Point3::zeros()], one).unwrap();
        assert_eq!(g.min_corner, [0, 0, 0]);
        assert_eq!(g.dims, [1, 1, 1]);

        let g = bounding_grid(&[Point3::zeros(), Point3::new(3.0, 0.0, 0.0)], one).unwrap();
        assert_eq!(g.dims, [3, 1, 1]);

        let g = bounding_grid(&[Point3::zeros(), Point3::repeat(2.0)], Vec3::repeat(0.5)).unwrap();
        assert_eq!(g.dims, [4, 4, 4]);
        assert_eq!(g.min_corner, [0, 0, 0]);

        assert!(bounding_grid(&[], one).is_err());
        assert!(bounding_grid(&[Point3::zeros()], Vec3::new(1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn solver_examples() {
        let hit = intersect_ray_parallelogram(
            &Point3::zeros(),
            &Vec3::z(),
            &Point3::new(-0.5, -0.5, 0.5),
            &Vec3::x(),
            &Vec3::y(),
            1e-12,
        )
        .unwrap();
        assert!((hit.0 - 0.5).abs() < 1e-15);
        assert!((hit.1 - 0.5).abs() < 1e-15);
        assert!((hit.2 - 0.5).abs() < 1e-15);

        // parallel
        assert!(intersect_ray_parallelogram(
            &Point3::zeros(),
            &Vec3::x(),
            &Point3::new(-0.5, -0.5, 0.5),
            &Vec3::x(),
            &Vec3::y(),
            1e-12
        )
        .is_none());

        // segment ends before the plane
        assert!(intersect_ray_parallelogram(
            &Point3::zeros(),
            &(Vec3::z() * 0.25),
            &Point3::new(-0.5, -0.5, 0.5),
            &Vec3::x(),
            &Vec3::y(),
            1e-12
        )
        .is_none());
    }

    #[test]
    fn frame_roundtrip() {
        let f = Frame::new(
            Point3::new(1.0, 2.0, 3.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(-1.0, 1.0, 0.5),
        )
        .unwrap();
        let p = Point3::new(0.3, -4.0, 7.0);
        assert!((f.to_world(&f.to_local(&p)) - p).norm() < 1e-12);
        assert!(Frame::new(Point3::zeros(), Vec3::x(), Vec3::x() * 2.0).is_err());
        assert_eq!(Frame::default().to_local(&p), p);
    }

    #[test]
    fn mesh_validation() {
        let v = vec![Point3::zeros(), Point3::x(), Point3::y(), Point3::x() * 2.0];
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 2]]).is_ok());
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 3]]).is_err());
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 9]]).is_err());
        assert!(LineSet::new(v.clone(), vec![[0, 0]]).is_err());
        assert!(LineSet::new(v, vec![[0, 3]]).is_ok());
    }
}
