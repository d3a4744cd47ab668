//! Voxel graphs and cubical hypergraphs built by sweeping stencils over a
//! voxel cloud, with the oriented and unoriented incidence matrices between
//! vertices (voxels), edges, square faces and cubic cells.
//!
//! Global IDs: vertices are voxel Morton codes, edges are edge codes of the
//! ordered pair (lower code first), faces are (minimum corner, plane) and
//! cells are their minimum corner. Every matrix is indexed by the ordinal of
//! these IDs in ascending order, so the complex does not depend on the order
//! voxels were inserted in.
//!
//! Orientation conventions:
//! * an edge runs from its lower-coded voxel to the higher one; its row in
//!   `M_EV` holds -1 at the source and +1 at the destination;
//! * a face is traversed counter-clockwise seen from the positive end of its
//!   normal axis; `M_FE` holds +1 where an edge agrees with that traversal;
//! * a cell's faces carry +1 in `M_CF` when their normal points outward.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::morton::{encode3, interleave2, morton_sum3, MortonCode3, MortonCode6};
use crate::sparse::{IndexMap, SparseMatrix};
use crate::stencil::{Condition, FacePlane, HyperEdgeKind, Stencil};
use crate::voxelize::VoxelCloud;

/// Global ID of a unit square face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId {
    pub corner: MortonCode3,
    pub plane: FacePlane,
}

/// Global ID of a unit cube cell (its minimum corner voxel).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub MortonCode3);

/// Cell dimension selector for adjacency queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dim {
    Vertex,
    Edge,
    Face,
    Cell,
}

/// Cell counts and the Euler characteristic derived from them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EulerCharacteristic {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub cells: usize,
}

impl EulerCharacteristic {
    /// `V - E + F`.
    pub fn surface(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }

    /// `V - E + F - C`, the characteristic of the whole cubical complex.
    pub fn chi(&self) -> i64 {
        self.surface() - self.cells as i64
    }
}

fn unit(axis: usize) -> MortonCode3 {
    let mut e = [0u32; 3];
    e[axis] = 1;
    encode3(e).expect("unit offset fits")
}

fn step(code: MortonCode3, axis: usize) -> Result<MortonCode3> {
    morton_sum3(code, unit(axis))
}

fn canonical_edge(a: MortonCode3, b: MortonCode3) -> Result<MortonCode6> {
    if a <= b {
        interleave2(a, b)
    } else {
        interleave2(b, a)
    }
}

/// The four corners of a face in traversal order `v00, v10, v11, v01`.
fn face_corners(face: FaceId) -> Result<[MortonCode3; 4]> {
    let (a, b) = face.plane.in_plane_axes();
    let v00 = face.corner;
    let v10 = step(v00, a)?;
    let v11 = step(v10, b)?;
    let v01 = step(v00, b)?;
    Ok([v00, v10, v11, v01])
}

/// Boundary edges of a face with their orientation relative to the face.
fn face_boundary(face: FaceId) -> Result<[(MortonCode6, f64); 4]> {
    let [v00, v10, v11, v01] = face_corners(face)?;
    Ok([
        (interleave2(v00, v10)?, 1.0),
        (interleave2(v10, v11)?, 1.0),
        (interleave2(v01, v11)?, -1.0),
        (interleave2(v00, v01)?, -1.0),
    ])
}

/// The eight corners of a cell, indexed by `4 i + 2 j + k` for offset `(i, j, k)`.
fn cell_corners(cell: CellId) -> Result<[MortonCode3; 8]> {
    let mut out = [cell.0; 8];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut c = cell.0;
        for axis in 0..3 {
            if idx >> (2 - axis) & 1 == 1 {
                c = step(c, axis)?;
            }
        }
        *slot = c;
    }
    Ok(out)
}

/// Boundary faces of a cell with outward orientation signs.
fn cell_boundary(cell: CellId) -> Result<[(FaceId, f64); 6]> {
    let mut out = [(
        FaceId {
            corner: cell.0,
            plane: FacePlane::YZ,
        },
        0.0,
    ); 6];
    for (i, plane) in FacePlane::ALL.into_iter().enumerate() {
        let n = plane.normal_axis();
        out[2 * i] = (
            FaceId {
                corner: cell.0,
                plane,
            },
            -1.0,
        );
        out[2 * i + 1] = (
            FaceId {
                corner: step(cell.0, n)?,
                plane,
            },
            1.0,
        );
    }
    Ok(out)
}

fn cell_edges(cell: CellId) -> Result<Vec<MortonCode6>> {
    let corners = cell_corners(cell)?;
    let mut edges = Vec::with_capacity(12);
    for i in 0..8usize {
        for axis in 0..3 {
            let bit = 1 << (2 - axis);
            if i & bit == 0 {
                edges.push(interleave2(corners[i], corners[i | bit])?);
            }
        }
    }
    Ok(edges)
}

/// A voxel complex with its full incidence family.
#[derive(Clone, Debug)]
pub struct VoxelComplex {
    cloud: VoxelCloud,
    vertex_ids: IndexMap<MortonCode3>,
    edge_ids: IndexMap<MortonCode6>,
    face_ids: IndexMap<FaceId>,
    cell_ids: IndexMap<CellId>,
    m_ev: SparseMatrix,
    m_fv: SparseMatrix,
    m_fe: SparseMatrix,
    m_cv: SparseMatrix,
    m_cf: SparseMatrix,
    m_ce: SparseMatrix,
}

impl VoxelComplex {
    /// Sweep one stencil over every voxel of the cloud.
    pub fn construct(cloud: &VoxelCloud, stencil: &Stencil) -> Result<Self> {
        Self::construct_with(cloud, std::slice::from_ref(stencil))
    }

    /// Sweep several stencils; their hyper-edges are merged by global ID.
    ///
    /// Faces bring their four edges and cells their faces and edges along,
    /// so the result is always closed under taking boundaries.
    pub fn construct_with(cloud: &VoxelCloud, stencils: &[Stencil]) -> Result<Self> {
        let emits_anything = stencils.iter().any(|s| !s.hyper_edges().is_empty());
        if emits_anything {
            if let Some(&max) = cloud.codes().last() {
                if !max.fits_edge_range() {
                    return Err(Error::Range(format!(
                        "voxel cloud extent {:?} exceeds the 1024 voxels per axis edge-code range",
                        cloud.grid().dims
                    )));
                }
            }
        }
        let mut edges = BTreeSet::new();
        let mut faces = BTreeSet::new();
        let mut cells = BTreeSet::new();
        let mut neighbours: Vec<Option<MortonCode3>> = Vec::new();
        for stencil in stencils {
            let offsets = stencil.cond_offsets();
            for &anchor in cloud.codes() {
                neighbours.clear();
                neighbours.extend(
                    offsets
                        .iter()
                        .map(|o| o.apply(anchor).filter(|&c| cloud.contains(c))),
                );
                let filled = |idx: &[usize]| idx.iter().all(|&i| neighbours[i].is_some());
                if stencil.condition() == Condition::All
                    && !filled(&(0..offsets.len()).collect::<Vec<_>>())
                {
                    continue;
                }
                let origin = interleave2(anchor, anchor)?;
                let mut edge_slot = 0;
                for he in stencil.hyper_edges() {
                    let is_edge = he.kind == HyperEdgeKind::Edge;
                    let slot = edge_slot;
                    if is_edge {
                        edge_slot += 1;
                    }
                    if !filled(&he.vertices) {
                        continue;
                    }
                    match he.kind {
                        HyperEdgeKind::Edge => {
                            let eps = stencil.edge_offsets()[slot]
                                .apply(origin)
                                .ok_or_else(|| Error::Range("edge code overflow".into()))?;
                            let (s, d) = (eps.source(), eps.destination());
                            edges.insert(if s <= d { eps } else { canonical_edge(s, d)? });
                        }
                        HyperEdgeKind::Face { corner, plane } => {
                            let face = FaceId {
                                corner: neighbours[corner].expect("filled"),
                                plane,
                            };
                            faces.insert(face);
                        }
                        HyperEdgeKind::Cell { corner } => {
                            cells.insert(CellId(neighbours[corner].expect("filled")));
                        }
                    }
                }
            }
        }
        for &cell in &cells {
            for (face, _) in cell_boundary(cell)? {
                faces.insert(face);
            }
        }
        for &face in &faces {
            for (edge, _) in face_boundary(face)? {
                edges.insert(edge);
            }
        }
        Self::assemble(
            cloud.clone(),
            edges.into_iter().collect(),
            faces.into_iter().collect(),
            cells.into_iter().collect(),
        )
    }

    /// Rebuild a complex from its ID tables, validating closure.
    pub fn from_parts(
        cloud: VoxelCloud,
        edges: Vec<MortonCode6>,
        faces: Vec<FaceId>,
        cells: Vec<CellId>,
    ) -> Result<Self> {
        let edge_set: BTreeSet<_> = edges.iter().copied().collect();
        let face_set: BTreeSet<_> = faces.iter().copied().collect();
        for e in &edges {
            let (s, d) = (e.source(), e.destination());
            if s >= d {
                return Err(Error::Format(format!(
                    "edge {e} is not in canonical orientation"
                )));
            }
            if !cloud.contains(s) || !cloud.contains(d) {
                return Err(Error::Format(format!(
                    "edge {e} references a missing voxel"
                )));
            }
        }
        for &f in &faces {
            for (e, _) in face_boundary(f)? {
                if !edge_set.contains(&e) {
                    return Err(Error::Format(format!(
                        "face {f:?} is missing boundary edge {e}"
                    )));
                }
            }
        }
        for &c in &cells {
            for (f, _) in cell_boundary(c)? {
                if !face_set.contains(&f) {
                    return Err(Error::Format(format!(
                        "cell {c:?} is missing boundary face {f:?}"
                    )));
                }
            }
        }
        Self::assemble(cloud, edges, faces, cells)
    }

    fn assemble(
        cloud: VoxelCloud,
        edges: Vec<MortonCode6>,
        faces: Vec<FaceId>,
        cells: Vec<CellId>,
    ) -> Result<Self> {
        let vertex_ids = IndexMap::new(cloud.codes().to_vec());
        let edge_ids = IndexMap::new(edges);
        let face_ids = IndexMap::new(faces);
        let cell_ids = IndexMap::new(cells);
        let (n, m, nf, nc) = (
            vertex_ids.len(),
            edge_ids.len(),
            face_ids.len(),
            cell_ids.len(),
        );
        let vertex = |c: MortonCode3| {
            vertex_ids
                .ordinal(&c)
                .ok_or_else(|| Error::Format(format!("voxel {c} is not in the cloud")))
        };
        let edge = |e: MortonCode6| {
            edge_ids
                .ordinal(&e)
                .ok_or_else(|| Error::Format(format!("edge {e} is not in the complex")))
        };

        let mut t_ev = Vec::with_capacity(2 * m);
        for (row, e) in edge_ids.keys().iter().enumerate() {
            t_ev.push((row, vertex(e.source())?, -1.0));
            t_ev.push((row, vertex(e.destination())?, 1.0));
        }
        let mut t_fv = Vec::with_capacity(4 * nf);
        let mut t_fe = Vec::with_capacity(4 * nf);
        for (row, &f) in face_ids.keys().iter().enumerate() {
            for v in face_corners(f)? {
                t_fv.push((row, vertex(v)?, 1.0));
            }
            for (e, sign) in face_boundary(f)? {
                t_fe.push((row, edge(e)?, sign));
            }
        }
        let mut t_cv = Vec::with_capacity(8 * nc);
        let mut t_cf = Vec::with_capacity(6 * nc);
        let mut t_ce = Vec::with_capacity(12 * nc);
        for (row, &c) in cell_ids.keys().iter().enumerate() {
            for v in cell_corners(c)? {
                t_cv.push((row, vertex(v)?, 1.0));
            }
            for (f, sign) in cell_boundary(c)? {
                let col = face_ids
                    .ordinal(&f)
                    .ok_or_else(|| Error::Format(format!("face {f:?} is not in the complex")))?;
                t_cf.push((row, col, sign));
            }
            for e in cell_edges(c)? {
                t_ce.push((row, edge(e)?, 1.0));
            }
        }
        Ok(Self {
            m_ev: SparseMatrix::from_triplets(m, n, t_ev)?,
            m_fv: SparseMatrix::from_triplets(nf, n, t_fv)?,
            m_fe: SparseMatrix::from_triplets(nf, m, t_fe)?,
            m_cv: SparseMatrix::from_triplets(nc, n, t_cv)?,
            m_cf: SparseMatrix::from_triplets(nc, nf, t_cf)?,
            m_ce: SparseMatrix::from_triplets(nc, m, t_ce)?,
            cloud,
            vertex_ids,
            edge_ids,
            face_ids,
            cell_ids,
        })
    }

    pub fn cloud(&self) -> &VoxelCloud {
        &self.cloud
    }

    pub fn vertex_ids(&self) -> &IndexMap<MortonCode3> {
        &self.vertex_ids
    }

    pub fn edge_ids(&self) -> &IndexMap<MortonCode6> {
        &self.edge_ids
    }

    pub fn face_ids(&self) -> &IndexMap<FaceId> {
        &self.face_ids
    }

    pub fn cell_ids(&self) -> &IndexMap<CellId> {
        &self.cell_ids
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_ids.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cell_ids.len()
    }

    /// Oriented edge-vertex incidence (m x n, entries -1 / +1).
    pub fn m_ev(&self) -> &SparseMatrix {
        &self.m_ev
    }

    /// Unoriented face-vertex incidence (|F| x n).
    pub fn m_fv(&self) -> &SparseMatrix {
        &self.m_fv
    }

    /// Oriented face-edge incidence (|F| x m); its rows are the elementary cycles.
    pub fn m_fe(&self) -> &SparseMatrix {
        &self.m_fe
    }

    /// Unoriented cell-vertex incidence (|C| x n).
    pub fn m_cv(&self) -> &SparseMatrix {
        &self.m_cv
    }

    /// Oriented cell-face incidence (|C| x |F|, outward +1).
    pub fn m_cf(&self) -> &SparseMatrix {
        &self.m_cf
    }

    /// Unoriented cell-edge incidence (|C| x m).
    pub fn m_ce(&self) -> &SparseMatrix {
        &self.m_ce
    }

    /// Voxel centroids in vertex order (frame coordinates), n rows.
    pub fn vertex_centroids(&self) -> Vec<Point3> {
        self.cloud.centroids()
    }

    /// `(source, destination)` vertex ordinals of edge `e`.
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let row = self.m_ev.row(e);
        let src = row.iter().find(|x| x.2 < 0.0).expect("edge has a source").1;
        let dst = row
            .iter()
            .find(|x| x.2 > 0.0)
            .expect("edge has a destination")
            .1;
        (src, dst)
    }

    /// Number of edges incident to each vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count()];
        for &(_, c, _) in self.m_ev.entries() {
            d[c] += 1;
        }
        d
    }

    /// Vertex ordinals of face `f` in traversal order.
    pub fn face_vertices(&self, f: usize) -> [usize; 4] {
        let corners = face_corners(self.face_ids.key(f)).expect("face built from valid codes");
        corners.map(|c| self.vertex_ids.ordinal(&c).expect("face vertex in cloud"))
    }

    /// Vertex ordinals of cell `c`, indexed by `4 i + 2 j + k`.
    pub fn cell_vertices(&self, c: usize) -> [usize; 8] {
        let corners = cell_corners(self.cell_ids.key(c)).expect("cell built from valid codes");
        corners.map(|v| self.vertex_ids.ordinal(&v).expect("cell vertex in cloud"))
    }

    /// Same-dimension adjacency as a product of unoriented incidences,
    /// diagonal included (vertex degrees, face vertex counts, ...).
    pub fn adjacency(&self, dim: Dim) -> Result<SparseMatrix> {
        let (inc, name) = match dim {
            Dim::Vertex => (self.m_ev.abs().transpose(), "edges"),
            Dim::Edge => (self.m_ev.abs(), "edges"),
            Dim::Face => (self.m_fv.clone(), "faces"),
            Dim::Cell => (self.m_cv.clone(), "cells"),
        };
        let missing = match dim {
            Dim::Vertex | Dim::Edge => self.edge_count() == 0,
            Dim::Face => self.face_count() == 0,
            Dim::Cell => self.cell_count() == 0,
        };
        if missing {
            return Err(Error::Unsupported(format!("the complex has no {name}")));
        }
        inc.multiply(&inc.transpose())
    }

    /// Face-edge incidence recovered from vertex incidences alone: an edge
    /// bounds a face exactly when both of its vertices are face vertices.
    pub fn derived_face_edge(&self) -> Result<SparseMatrix> {
        let product = self.m_fv.multiply(&self.m_ev.abs().transpose())?;
        let entries = product
            .entries()
            .iter()
            .filter(|e| e.2 == 2.0)
            .map(|&(r, c, _)| (r, c, 1.0))
            .collect();
        SparseMatrix::from_triplets(product.rows(), product.cols(), entries)
    }

    pub fn euler_characteristic(&self) -> EulerCharacteristic {
        EulerCharacteristic {
            vertices: self.vertex_count(),
            edges: self.edge_count(),
            faces: self.face_count(),
            cells: self.cell_count(),
        }
    }

    /// Number of connected components of the vertex-edge graph.
    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for e in 0..self.edge_count() {
            let (a, b) = self.edge_endpoints(e);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        components
    }

    /// Multilinear blend of a vertex field over one cell.
    pub fn trilinear_interpolate(
        &self,
        cell: CellId,
        field: &[f64],
        local: [f64; 3],
    ) -> Result<f64> {
        if local.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::Range(format!(
                "local coordinates {local:?} outside [0, 1]^3"
            )));
        }
        if field.len() != self.vertex_count() {
            return Err(Error::Shape(format!(
                "field of length {} for {} vertices",
                field.len(),
                self.vertex_count()
            )));
        }
        let c = self
            .cell_ids
            .ordinal(&cell)
            .ok_or_else(|| Error::Argument(format!("cell {cell:?} is not in the complex")))?;
        let corners = self.cell_vertices(c);
        let mut value = 0.0;
        for (idx, &v) in corners.iter().enumerate() {
            let weight: f64 = (0..3)
                .map(|axis| {
                    let t = local[axis];
                    if idx >> (2 - axis) & 1 == 1 {
                        t
                    } else {
                        1.0 - t
                    }
                })
                .product();
            value += weight * field[v];
        }
        Ok(value)
    }
}
