//! Topological point sampling of line networks, surfaces and solids.
//!
//! All three samplers intersect the input with families of axis-aligned
//! objects placed on the voxel grid: planes for line networks, rays for
//! surfaces and solids. The batched solver reuses `w = u x v` and the
//! determinant across every plane (or ray) of one axis family, and each
//! intersection is rejected as early as possible in the order
//! `delta, r, s, t`.
//!
//! In [`SamplingMode::Conservative`] the intersection objects sit on voxel
//! boundaries. A point exactly on a boundary belongs to every closed voxel
//! sharing it, so the sampler resolves it into one representative point per
//! adjacent voxel (offset by a quarter voxel across each boundary it lies
//! on). [`SamplingMode::Thin`] anchors the objects at voxel centroids and
//! emits the raw intersections.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{
    bounding_grid, check_sigma, determinant_eps, Frame, GridSpec, LineSet, Point3, TriMesh, Vec3,
};

/// Placement of the intersection objects relative to the voxel grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Objects on voxel boundaries / corners (26-separating result).
    #[default]
    Conservative,
    /// Objects through voxel centroids (6-separating result).
    Thin,
}

impl SamplingMode {
    /// Offset of the first intersection object from the minimum voxel centroid, in voxels.
    fn anchor_offset(self) -> f64 {
        match self {
            SamplingMode::Conservative => -0.5,
            SamplingMode::Thin => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingOptions {
    pub mode: SamplingMode,
    /// Emit the endpoints of every segment so sub-voxel segments survive.
    pub emit_endpoints: bool,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            mode: SamplingMode::Conservative,
            emit_endpoints: true,
        }
    }
}

impl SamplingOptions {
    pub fn with_mode(mode: SamplingMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }
}

/// Work counters of one sampling run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SamplingStats {
    /// Planes (line sampling) or rays (surface/volume sampling) cast.
    pub objects: u64,
    /// Primitive/object pairs that passed the determinant test and were solved.
    pub solver_calls: u64,
    /// Accepted intersections before boundary resolution.
    pub hits: u64,
}

/// Sampled points plus the grid they were computed on (in frame coordinates).
#[derive(Clone, Debug)]
pub struct Sampling {
    pub points: Vec<Point3>,
    pub grid: GridSpec,
    pub stats: SamplingStats,
}

fn axes(axis: usize) -> (usize, usize) {
    ((axis + 1) % 3, (axis + 2) % 3)
}

/// Span of the grid along `axis`: from the lower boundary of the first voxel
/// to the upper boundary of the last voxel.
fn axis_span(grid: &GridSpec, axis: usize) -> (f64, f64) {
    let s = grid.sigma[axis];
    let lo = (grid.min_corner[axis] as f64 - 0.5) * s;
    (lo, (grid.dims[axis] + 1) as f64 * s)
}

/// Coordinates of the intersection objects along `axis`.
fn anchors(grid: &GridSpec, axis: usize, mode: SamplingMode, interior_only: bool) -> Vec<f64> {
    let s = grid.sigma[axis];
    let lo = grid.min_corner[axis];
    let dims = grid.dims[axis] as i64;
    let ks = match (mode, interior_only) {
        // boundaries between consecutive voxels
        (SamplingMode::Conservative, true) => 1..=dims,
        // every boundary line including the outer ones
        (SamplingMode::Conservative, false) => 0..=dims + 1,
        (SamplingMode::Thin, _) => 0..=dims,
    };
    ks.map(|k| (lo + k) as f64 * s + mode.anchor_offset() * s)
        .collect()
}

fn cmp_points(a: &Point3, b: &Point3) -> Ordering {
    a.x.total_cmp(&b.x)
        .then(a.y.total_cmp(&b.y))
        .then(a.z.total_cmp(&b.z))
}

/// Sort and drop exact duplicates; makes the output independent of loop order.
fn canonicalize(points: &mut Vec<Point3>) {
    points.sort_by(cmp_points);
    points.dedup();
}

const BOUNDARY_TOL: f64 = 1e-9;

/// Expand a point lying on voxel boundaries into one point per adjacent voxel.
fn resolve_boundaries(p: &Point3, sigma: &Vec3, out: &mut Vec<Point3>) {
    let mut variants = vec![*p];
    for a in 0..3 {
        let g = p[a] / sigma[a] - 0.5;
        if (g - g.round()).abs() <= BOUNDARY_TOL * g.abs().max(1.0) {
            let q = 0.25 * sigma[a];
            variants = variants
                .into_iter()
                .flat_map(|v| {
                    let mut lo = v;
                    let mut hi = v;
                    lo[a] -= q;
                    hi[a] += q;
                    [lo, hi]
                })
                .collect();
        }
    }
    out.extend(variants);
}

fn finish(
    mut raw: Vec<Point3>,
    grid: GridSpec,
    frame: &Frame,
    mode: SamplingMode,
    stats: SamplingStats,
) -> Sampling {
    let mut points = match mode {
        SamplingMode::Conservative => {
            let mut out = Vec::with_capacity(raw.len() * 2);
            for p in &raw {
                resolve_boundaries(p, &grid.sigma, &mut out);
            }
            out
        }
        SamplingMode::Thin => std::mem::take(&mut raw),
    };
    if !frame.is_identity() {
        for p in points.iter_mut() {
            *p = frame.to_world(p);
        }
    }
    canonicalize(&mut points);
    Sampling {
        points,
        grid,
        stats,
    }
}

/// Raw plane intersections of a line network, in frame coordinates.
///
/// For every axis the planes perpendicular to it share `u`, `v` and `w`; each
/// segment is tested against each plane in the order `delta, r, s, t`.
pub fn line_network_hits(
    lines: &LineSet,
    sigma: Vec3,
    mode: SamplingMode,
) -> Result<(Vec<Point3>, GridSpec, SamplingStats)> {
    check_sigma(&sigma)?;
    lines.validate()?;
    let grid = bounding_grid(&lines.vertices, sigma)?;
    let mut stats = SamplingStats::default();
    let mut hits = Vec::new();
    for axis in 0..3 {
        let (right, front) = axes(axis);
        let (c_right, len_right) = axis_span(&grid, right);
        let (c_front, len_front) = axis_span(&grid, front);
        let u = Vec3::ith(right, len_right);
        let v = Vec3::ith(front, len_front);
        let w = u.cross(&v);
        for pos in anchors(&grid, axis, mode, true) {
            stats.objects += 1;
            let mut c = Point3::zeros();
            c[axis] = pos;
            c[right] = c_right;
            c[front] = c_front;
            for (p, d) in lines.rays() {
                let delta = -d.dot(&w);
                if delta.abs() <= determinant_eps(&d, &u, &v) {
                    continue;
                }
                stats.solver_calls += 1;
                let b = p - c;
                let r = b.dot(&w) / delta;
                if !(0.0..=1.0).contains(&r) {
                    continue;
                }
                let e = d.cross(&b);
                let s = -e.dot(&v) / delta;
                if !(0.0..=1.0).contains(&s) {
                    continue;
                }
                let t = e.dot(&u) / delta;
                if !(0.0..=1.0).contains(&t) {
                    continue;
                }
                let mut x = p + d * r;
                // the solve is exact up to rounding; pin the plane coordinate
                x[axis] = pos;
                hits.push(x);
            }
        }
    }
    stats.hits = hits.len() as u64;
    Ok((hits, grid, stats))
}

/// Sample a line network so that its voxelization keeps the network connected.
pub fn sample_line_network(
    lines: &LineSet,
    frame: &Frame,
    sigma: Vec3,
    options: &SamplingOptions,
) -> Result<Sampling> {
    let local = lines.transformed(frame);
    let (mut raw, grid, stats) = line_network_hits(&local, sigma, options.mode)?;
    if options.emit_endpoints {
        for seg in &local.segments {
            raw.extend(seg.iter().map(|&v| local.vertices[v]));
        }
    }
    Ok(finish(raw, grid, frame, options.mode, stats))
}

/// Exact sidedness of a projected point with respect to a projected edge.
///
/// The orientation is always evaluated with the edge endpoints in a fixed
/// (lexicographic) order and negated afterwards, so two triangles sharing an
/// edge see exactly opposite signs. A point exactly on the edge is resolved as
/// if it were displaced by `(eps, eps^2)`, which assigns every point of a
/// closed surface's projection to exactly one triangle of each sheet.
fn edge_side(a: [f64; 2], b: [f64; 2], q: [f64; 2]) -> i8 {
    let swapped = (b[0], b[1]) < (a[0], a[1]);
    let (p0, p1) = if swapped { (b, a) } else { (a, b) };
    let o = robust::orient2d(
        robust::Coord { x: p0[0], y: p0[1] },
        robust::Coord { x: p1[0], y: p1[1] },
        robust::Coord { x: q[0], y: q[1] },
    );
    // orient2d is positive when q lies to the left of p0 -> p1
    let side = if o > 0.0 {
        1
    } else if o < 0.0 {
        -1
    } else {
        let (ex, ey) = (p1[0] - p0[0], p1[1] - p0[1]);
        if ey != 0.0 {
            if ey > 0.0 {
                -1
            } else {
                1
            }
        } else if ex > 0.0 {
            1
        } else {
            -1
        }
    };
    if swapped {
        -side
    } else {
        side
    }
}

/// Precomputed per-triangle, per-axis data shared by every ray of the family.
struct TriangleBatch {
    face: usize,
    c: Point3,
    w: Vec3,
    delta: f64,
    /// Corners projected onto the two axes transverse to the rays.
    projected: [[f64; 2]; 3],
}

/// One accepted ray/triangle intersection.
#[derive(Clone, Copy, Debug)]
struct RayHit {
    r: f64,
    face: usize,
}

impl TriangleBatch {
    fn new(mesh: &TriMesh, face: usize, axis: usize, d: &Vec3) -> Option<Self> {
        let corners = mesh.triangle(face);
        let c = corners[0];
        let u = corners[1] - c;
        let v = corners[2] - c;
        let w = u.cross(&v);
        let delta = -d.dot(&w);
        if delta.abs() <= determinant_eps(d, &u, &v) {
            return None;
        }
        let (right, front) = axes(axis);
        Some(Self {
            face,
            c,
            w,
            delta,
            projected: corners.map(|x| [x[right], x[front]]),
        })
    }

    /// Intersection with the family's ray starting at `p`, `r` in `[0, 1]`.
    ///
    /// Whether the ray pierces the triangle is decided by the exact projected
    /// edge tests, so a ray through a shared edge or vertex is counted once
    /// when it crosses the surface and zero or two times when it only grazes
    /// it. `r` comes from the closed-form solve.
    fn intersect(&self, p: &Point3, axis: usize) -> Option<RayHit> {
        let (right, front) = axes(axis);
        let q = [p[right], p[front]];
        let [a, b, c] = self.projected;
        let s0 = edge_side(a, b, q);
        if edge_side(b, c, q) != s0 || edge_side(c, a, q) != s0 {
            return None;
        }
        let r = (p - self.c).dot(&self.w) / self.delta;
        if !(0.0..=1.0).contains(&r) {
            return None;
        }
        Some(RayHit { r, face: self.face })
    }
}

fn sort_ray_hits(hits: &mut [RayHit]) {
    hits.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.face.cmp(&b.face)));
}

/// One axis-parallel ray of a sampling family.
struct Ray {
    axis: usize,
    origin: Point3,
    dir: Vec3,
}

fn ray_family(grid: &GridSpec, axis: usize, mode: SamplingMode) -> (Vec3, Vec<Ray>) {
    let (right, front) = axes(axis);
    let (start, len) = axis_span(grid, axis);
    let dir = Vec3::ith(axis, len);
    let rows = anchors(grid, right, mode, false);
    let cols = anchors(grid, front, mode, false);
    let mut rays = Vec::with_capacity(rows.len() * cols.len());
    for &a in &rows {
        for &b in &cols {
            let mut origin = Point3::zeros();
            origin[axis] = start;
            origin[right] = a;
            origin[front] = b;
            rays.push(Ray { axis, origin, dir });
        }
    }
    (dir, rays)
}

/// Per ray, all deduplicated hits sorted by parameter.
fn cast_rays(
    mesh: &TriMesh,
    grid: &GridSpec,
    mode: SamplingMode,
    stats: &mut SamplingStats,
) -> Vec<(Ray, Vec<RayHit>)> {
    let mut out = Vec::new();
    for axis in 0..3 {
        let (dir, rays) = ray_family(grid, axis, mode);
        let batch: Vec<TriangleBatch> = (0..mesh.faces.len())
            .filter_map(|f| TriangleBatch::new(mesh, f, axis, &dir))
            .collect();
        for ray in rays {
            stats.objects += 1;
            let mut hits = Vec::new();
            for tri in &batch {
                stats.solver_calls += 1;
                if let Some(hit) = tri.intersect(&ray.origin, axis) {
                    hits.push(hit);
                }
            }
            sort_ray_hits(&mut hits);
            out.push((ray, hits));
        }
    }
    out
}

fn hit_point(ray: &Ray, r: f64) -> Point3 {
    let mut q = ray.origin;
    q[ray.axis] += r * ray.dir[ray.axis];
    q
}

/// Raw ray intersections of a triangle mesh, in frame coordinates.
pub fn surface_hits(
    mesh: &TriMesh,
    sigma: Vec3,
    mode: SamplingMode,
) -> Result<(Vec<Point3>, GridSpec, SamplingStats)> {
    check_sigma(&sigma)?;
    mesh.validate()?;
    let grid = bounding_grid(&mesh.vertices, sigma)?;
    let mut stats = SamplingStats::default();
    let mut points = Vec::new();
    for (ray, hits) in cast_rays(mesh, &grid, mode, &mut stats) {
        points.extend(hits.iter().map(|h| hit_point(&ray, h.r)));
    }
    stats.hits = points.len() as u64;
    Ok((points, grid, stats))
}

/// Sample a triangulated surface with axis-parallel rays.
pub fn sample_surface_mesh(
    mesh: &TriMesh,
    frame: &Frame,
    sigma: Vec3,
    options: &SamplingOptions,
) -> Result<Sampling> {
    let local = mesh.transformed(frame);
    let (raw, grid, stats) = surface_hits(&local, sigma, options.mode)?;
    Ok(finish(raw, grid, frame, options.mode, stats))
}

/// Interior stations of a closed boundary mesh, in frame coordinates.
///
/// Each ray's sorted crossings must come in entry/exit pairs. A voxel-centre
/// station along the ray is inside when an odd number of crossings lie
/// strictly before it, so a crossing exactly at a station counts as after it.
pub fn volume_stations(
    mesh: &TriMesh,
    sigma: Vec3,
    mode: SamplingMode,
) -> Result<(Vec<Point3>, GridSpec, SamplingStats)> {
    check_sigma(&sigma)?;
    mesh.validate()?;
    let grid = bounding_grid(&mesh.vertices, sigma)?;
    let mut stats = SamplingStats::default();
    let mut points = Vec::new();
    for (ray, hits) in cast_rays(mesh, &grid, mode, &mut stats) {
        stats.hits += hits.len() as u64;
        if hits.len() % 2 != 0 {
            return Err(Error::NotClosed {
                axis: ray.axis,
                crossings: hits.len(),
            });
        }
        let axis = ray.axis;
        let coords: Vec<f64> = hits.iter().map(|h| hit_point(&ray, h.r)[axis]).collect();
        let lo = grid.min_corner[axis];
        for k in 0..=grid.dims[axis] as i64 {
            let station = grid.center(axis, lo + k);
            let before = coords.partition_point(|&c| c < station);
            if before % 2 == 1 {
                let mut q = ray.origin;
                q[axis] = station;
                points.push(q);
            }
        }
    }
    Ok((points, grid, stats))
}

/// Sample the solid enclosed by a closed triangle mesh.
pub fn sample_volume_mesh(
    boundary: &TriMesh,
    frame: &Frame,
    sigma: Vec3,
    options: &SamplingOptions,
) -> Result<Sampling> {
    let local = boundary.transformed(frame);
    let (raw, grid, stats) = volume_stations(&local, sigma, options.mode)?;
    Ok(finish(raw, grid, frame, options.mode, stats))
}
