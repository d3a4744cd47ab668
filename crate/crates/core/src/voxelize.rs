//! Point cloud to Morton-indexed voxel cloud: R^3 -> Z^3 -> N^3 -> N.

use crate::error::{Error, Result};
use crate::geometry::{check_sigma, round_half_up, Frame, GridSpec, Point3, Vec3};
use crate::morton::{decode3, encode3, MortonCode3, MAX_AXIS_3};

/// Integer voxel coordinates (may be negative).
pub type Voxel = [i64; 3];

/// Nearest voxel of a point: `round(p / sigma)` componentwise.
pub fn voxelate(p: &Point3, sigma: &Vec3) -> Voxel {
    [0, 1, 2].map(|a| round_half_up(p[a] / sigma[a]))
}

/// Centroid of a voxel.
pub fn poxelate(v: &Voxel, sigma: &Vec3) -> Point3 {
    Point3::new(
        v[0] as f64 * sigma.x,
        v[1] as f64 * sigma.y,
        v[2] as f64 * sigma.z,
    )
}

/// Shift a voxel into the first octant relative to `corner`.
pub fn ioxelate(v: &Voxel, corner: &Voxel) -> Result<[u32; 3]> {
    let mut rho = [0u32; 3];
    for a in 0..3 {
        let d = v[a] - corner[a];
        if d < 0 || d > MAX_AXIS_3 as i64 {
            return Err(Error::Range(format!(
                "voxel {v:?} lies outside the index range of corner {corner:?}"
            )));
        }
        rho[a] = d as u32;
    }
    Ok(rho)
}

/// Inverse of [`ioxelate`].
pub fn deioxelate(rho: &[u32; 3], corner: &Voxel) -> Voxel {
    [0, 1, 2].map(|a| rho[a] as i64 + corner[a])
}

/// Sorted, duplicate-free set of voxels keyed by Morton code.
///
/// `grid.min_corner` is the voxel subtracted before encoding and
/// `grid.dims` bounds every decoded index componentwise.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelCloud {
    codes: Vec<MortonCode3>,
    grid: GridSpec,
}

impl VoxelCloud {
    /// Build from arbitrary codes; sorts, deduplicates and derives `dims`.
    pub fn from_codes(mut codes: Vec<MortonCode3>, sigma: Vec3, min_corner: Voxel) -> Result<Self> {
        check_sigma(&sigma)?;
        codes.sort_unstable();
        codes.dedup();
        let mut dims = [1u64; 3];
        for c in &codes {
            let rho = decode3(*c);
            for a in 0..3 {
                dims[a] = dims[a].max(rho[a] as u64 + 1);
            }
        }
        Ok(Self {
            codes,
            grid: GridSpec::new(sigma, min_corner, dims)?,
        })
    }

    /// Build from integer voxels, using their componentwise minimum as corner.
    pub fn from_voxels(voxels: &[Voxel], sigma: Vec3) -> Result<Self> {
        let corner = min_corner(voxels)
            .ok_or_else(|| Error::Argument("cannot build a voxel cloud from no voxels".into()))?;
        Self::from_voxels_with_corner(voxels, sigma, corner)
    }

    pub fn from_voxels_with_corner(voxels: &[Voxel], sigma: Vec3, corner: Voxel) -> Result<Self> {
        let codes = voxels
            .iter()
            .map(|v| ioxelate(v, &corner).and_then(encode3))
            .collect::<Result<Vec<_>>>()?;
        Self::from_codes(codes, sigma, corner)
    }

    pub fn codes(&self) -> &[MortonCode3] {
        &self.codes
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn sigma(&self) -> Vec3 {
        self.grid.sigma
    }

    pub fn corner(&self) -> Voxel {
        self.grid.min_corner
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn contains(&self, code: MortonCode3) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn index_of(&self, code: MortonCode3) -> Option<usize> {
        self.codes.binary_search(&code).ok()
    }

    pub fn voxel(&self, code: MortonCode3) -> Voxel {
        deioxelate(&decode3(code), &self.grid.min_corner)
    }

    /// Centroid (frame coordinates) of the voxel with `code`.
    pub fn centroid(&self, code: MortonCode3) -> Point3 {
        poxelate(&self.voxel(code), &self.grid.sigma)
    }

    pub fn centroids(&self) -> Vec<Point3> {
        self.codes.iter().map(|&c| self.centroid(c)).collect()
    }

    pub fn voxels(&self) -> Vec<Voxel> {
        self.codes.iter().map(|&c| self.voxel(c)).collect()
    }
}

fn min_corner(voxels: &[Voxel]) -> Option<Voxel> {
    let first = *voxels.first()?;
    Some(
        voxels
            .iter()
            .fold(first, |m, v| [0, 1, 2].map(|a| m[a].min(v[a]))),
    )
}

/// Voxelate, shift and encode a point cloud.
///
/// Points are mapped into the frame first. The shift corner is the
/// componentwise minimum voxel unless `corner` overrides it.
pub fn voxelate_point_cloud_with_corner(
    points: &[Point3],
    frame: &Frame,
    sigma: Vec3,
    corner: Option<Voxel>,
) -> Result<VoxelCloud> {
    check_sigma(&sigma)?;
    if points.is_empty() {
        return Err(Error::Argument(
            "cannot voxelate an empty point cloud".into(),
        ));
    }
    if let Some(i) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::Argument(format!(
            "point {i} has a non-finite coordinate"
        )));
    }
    let voxels: Vec<Voxel> = points
        .iter()
        .map(|p| voxelate(&frame.to_local(p), &sigma))
        .collect();
    match corner {
        Some(c) => VoxelCloud::from_voxels_with_corner(&voxels, sigma, c),
        None => VoxelCloud::from_voxels(&voxels, sigma),
    }
}

pub fn voxelate_point_cloud(points: &[Point3], frame: &Frame, sigma: Vec3) -> Result<VoxelCloud> {
    voxelate_point_cloud_with_corner(points, frame, sigma, None)
}
