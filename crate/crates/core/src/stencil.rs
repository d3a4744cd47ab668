//! Stencils: a condition list of relative voxel offsets plus the relative
//! hyper-edges (edges, square faces, cubes) to emit where the condition holds.
//!
//! The condition list is compiled to Morton offsets and every 2-tuple
//! hyper-edge to an edge-code offset, so neighbours and edge IDs are found by
//! masked Morton addition instead of decoding.

use crate::error::{Error, Result};
use crate::morton::{MortonCode3, MortonCode6, MortonOffset3, MortonOffset6, MAX_AXIS_6};

/// When a stencil emits its hyper-edges at an anchor voxel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Condition {
    /// Every condition voxel must be filled; then all hyper-edges are emitted.
    #[default]
    All,
    /// Each hyper-edge is emitted on its own once its voxels are filled.
    PerHyperEdge,
}

/// Orientation of a unit square face, named by the plane it lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FacePlane {
    YZ,
    ZX,
    XY,
}

impl FacePlane {
    pub const ALL: [FacePlane; 3] = [FacePlane::YZ, FacePlane::ZX, FacePlane::XY];

    /// Axis of the face normal.
    pub fn normal_axis(self) -> usize {
        self as usize
    }

    /// In-plane axes `(a, b)` with `e_a x e_b = e_normal`.
    pub fn in_plane_axes(self) -> (usize, usize) {
        let n = self.normal_axis();
        ((n + 1) % 3, (n + 2) % 3)
    }

    pub fn from_normal_axis(axis: usize) -> Option<Self> {
        Self::ALL.get(axis).copied()
    }

    pub fn tag(self) -> &'static str {
        match self {
            FacePlane::YZ => "YZ",
            FacePlane::ZX => "ZX",
            FacePlane::XY => "XY",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.tag() == tag)
    }
}

/// Shape of a relative hyper-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HyperEdgeKind {
    Edge,
    /// Unit square; `corner` is the condition index of its minimum vertex.
    Face {
        corner: usize,
        plane: FacePlane,
    },
    /// Unit cube; `corner` is the condition index of its minimum vertex.
    Cell {
        corner: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperEdge {
    pub vertices: Vec<usize>,
    pub kind: HyperEdgeKind,
}

/// Built-in stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StencilKind {
    /// Face-sharing neighbours (6-neighbourhood).
    Face6,
    /// Face- and edge-sharing neighbours (18-neighbourhood).
    Edge18,
    /// Face-, edge- and vertex-sharing neighbours (26-neighbourhood).
    Vertex26,
    SquareYZ,
    SquareZX,
    SquareXY,
    /// The unit cube of eight voxels as one cell.
    Cube8,
}

impl StencilKind {
    pub fn name(self) -> &'static str {
        match self {
            StencilKind::Face6 => "face6",
            StencilKind::Edge18 => "edge18",
            StencilKind::Vertex26 => "vertex26",
            StencilKind::SquareYZ => "squareYZ",
            StencilKind::SquareZX => "squareZX",
            StencilKind::SquareXY => "squareXY",
            StencilKind::Cube8 => "cube8",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            StencilKind::Face6,
            StencilKind::Edge18,
            StencilKind::Vertex26,
            StencilKind::SquareYZ,
            StencilKind::SquareZX,
            StencilKind::SquareXY,
            StencilKind::Cube8,
        ]
        .into_iter()
        .find(|k| k.name().eq_ignore_ascii_case(name))
    }
}

/// A compiled stencil.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stencil {
    cond: Vec<[i32; 3]>,
    hyper_edges: Vec<HyperEdge>,
    condition: Condition,
    cond_offsets: Vec<MortonOffset3>,
    /// One entry per `Edge` hyper-edge, in hyper-edge order.
    edge_offsets: Vec<MortonOffset6>,
}

fn unit_square(offsets: &[[i32; 3]]) -> Option<(usize, FacePlane)> {
    let corner = (0..offsets.len()).min_by_key(|&i| offsets[i])?;
    let base = offsets[corner];
    let plane = FacePlane::ALL.into_iter().find(|p| {
        offsets
            .iter()
            .all(|o| o[p.normal_axis()] == base[p.normal_axis()])
    })?;
    let (a, b) = plane.in_plane_axes();
    let mut seen = [false; 4];
    for o in offsets {
        let da = o[a] - base[a];
        let db = o[b] - base[b];
        if !(0..=1).contains(&da) || !(0..=1).contains(&db) {
            return None;
        }
        seen[(da * 2 + db) as usize] = true;
    }
    seen.iter().all(|&s| s).then_some((corner, plane))
}

fn unit_cube(offsets: &[[i32; 3]]) -> Option<usize> {
    let corner = (0..offsets.len()).min_by_key(|&i| offsets[i])?;
    let base = offsets[corner];
    let mut seen = [false; 8];
    for o in offsets {
        let d = [0, 1, 2].map(|i| o[i] - base[i]);
        if d.iter().any(|x| !(0..=1).contains(x)) {
            return None;
        }
        seen[(d[0] * 4 + d[1] * 2 + d[2]) as usize] = true;
    }
    seen.iter().all(|&s| s).then_some(corner)
}

impl Stencil {
    /// Compile a stencil with the all-or-nothing condition.
    ///
    /// `cond[0]` must be the anchor `[0, 0, 0]`. Hyper-edges of length 2 are
    /// edges (source first), length 4 unit squares and length 8 unit cubes.
    pub fn compile(cond: Vec<[i32; 3]>, hyper_edges: Vec<Vec<usize>>) -> Result<Self> {
        Self::compile_with(cond, hyper_edges, Condition::All)
    }

    pub fn compile_with(
        cond: Vec<[i32; 3]>,
        hyper_edges: Vec<Vec<usize>>,
        condition: Condition,
    ) -> Result<Self> {
        if cond.first() != Some(&[0, 0, 0]) {
            return Err(Error::Argument(
                "stencil condition must start with the anchor [0, 0, 0]".into(),
            ));
        }
        let limit = MAX_AXIS_6 as i32;
        if let Some(o) = cond.iter().find(|o| o.iter().any(|c| c.abs() > limit)) {
            return Err(Error::Argument(format!(
                "stencil offset {o:?} is too large"
            )));
        }
        let cond_offsets = cond
            .iter()
            .map(|&o| MortonOffset3::from_delta(o))
            .collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::with_capacity(hyper_edges.len());
        let mut edge_offsets = Vec::new();
        for (k, he) in hyper_edges.into_iter().enumerate() {
            if let Some(&bad) = he.iter().find(|&&i| i >= cond.len()) {
                return Err(Error::Argument(format!(
                    "hyper-edge {k} references condition index {bad}, stencil has {}",
                    cond.len()
                )));
            }
            let offsets: Vec<[i32; 3]> = he.iter().map(|&i| cond[i]).collect();
            let kind = match he.len() {
                2 => {
                    if offsets[0] == offsets[1] {
                        return Err(Error::Argument(format!("edge {k} is a self-loop")));
                    }
                    edge_offsets.push(MortonOffset6::from_pair(
                        &cond_offsets[he[0]],
                        &cond_offsets[he[1]],
                    )?);
                    HyperEdgeKind::Edge
                }
                4 => {
                    let (c, plane) = unit_square(&offsets).ok_or_else(|| {
                        Error::Argument(format!("hyper-edge {k} is not a unit square"))
                    })?;
                    HyperEdgeKind::Face {
                        corner: he[c],
                        plane,
                    }
                }
                8 => {
                    let c = unit_cube(&offsets).ok_or_else(|| {
                        Error::Argument(format!("hyper-edge {k} is not a unit cube"))
                    })?;
                    HyperEdgeKind::Cell { corner: he[c] }
                }
                n => {
                    return Err(Error::Argument(format!(
                        "hyper-edge {k} has {n} vertices; expected 2, 4 or 8"
                    )))
                }
            };
            edges.push(HyperEdge { vertices: he, kind });
        }
        Ok(Self {
            cond,
            hyper_edges: edges,
            condition,
            cond_offsets,
            edge_offsets,
        })
    }

    pub fn standard(kind: StencilKind) -> Self {
        let neighbourhood = |max_nonzero: usize| {
            let mut cond = vec![[0, 0, 0]];
            for x in -1..=1 {
                for y in -1..=1 {
                    for z in -1..=1 {
                        let o = [x, y, z];
                        let nz = o.iter().filter(|&&c| c != 0).count();
                        if nz > 0 && nz <= max_nonzero {
                            cond.push(o);
                        }
                    }
                }
            }
            let edges = (1..cond.len()).map(|i| vec![0, i]).collect();
            Self::compile_with(cond, edges, Condition::PerHyperEdge)
        };
        let square = |plane: FacePlane| {
            let (a, b) = plane.in_plane_axes();
            let at = |da: i32, db: i32| {
                let mut o = [0; 3];
                o[a] = da;
                o[b] = db;
                o
            };
            let cond = vec![at(0, 0), at(1, 0), at(1, 1), at(0, 1)];
            let edges = vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3, 0],
                vec![0, 1, 2, 3],
            ];
            Self::compile(cond, edges)
        };
        let stencil = match kind {
            StencilKind::Face6 => neighbourhood(1),
            StencilKind::Edge18 => neighbourhood(2),
            StencilKind::Vertex26 => neighbourhood(3),
            StencilKind::SquareYZ => square(FacePlane::YZ),
            StencilKind::SquareZX => square(FacePlane::ZX),
            StencilKind::SquareXY => square(FacePlane::XY),
            StencilKind::Cube8 => {
                let cond = (0..8).map(|i| [i >> 2 & 1, i >> 1 & 1, i & 1]).collect();
                Self::compile(cond, vec![(0..8).collect()])
            }
        };
        stencil.expect("built-in stencils are valid")
    }

    pub fn cond(&self) -> &[[i32; 3]] {
        &self.cond
    }

    pub fn hyper_edges(&self) -> &[HyperEdge] {
        &self.hyper_edges
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn cond_offsets(&self) -> &[MortonOffset3] {
        &self.cond_offsets
    }

    pub fn edge_offsets(&self) -> &[MortonOffset6] {
        &self.edge_offsets
    }

    pub fn is_forward(&self) -> bool {
        self.cond_offsets.iter().all(MortonOffset3::is_nonnegative)
    }

    /// Morton codes of the condition offsets; `None` if any offset is negative.
    pub fn cond_codes(&self) -> Option<Vec<MortonCode3>> {
        self.is_forward()
            .then(|| self.cond_offsets.iter().map(|o| o.plus).collect())
    }

    /// Edge codes of the 2-tuple hyper-edges; `None` if any offset is negative.
    pub fn edge_codes(&self) -> Option<Vec<MortonCode6>> {
        self.is_forward()
            .then(|| self.edge_offsets.iter().map(|o| o.plus).collect())
    }

    pub fn edge_count(&self) -> usize {
        self.edge_offsets.len()
    }

    pub fn face_count(&self) -> usize {
        self.hyper_edges
            .iter()
            .filter(|h| matches!(h.kind, HyperEdgeKind::Face { .. }))
            .count()
    }

    pub fn cell_count(&self) -> usize {
        self.hyper_edges
            .iter()
            .filter(|h| matches!(h.kind, HyperEdgeKind::Cell { .. }))
            .count()
    }
}
