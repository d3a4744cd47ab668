//! Discrete differential and integral operators assembled from the
//! incidence matrices of a [`VoxelComplex`].
//!
//! Vertex fields have one value per voxel (in vertex-ID order), edge fields
//! one value per edge, face fields one per face.

use crate::complex::VoxelComplex;
use crate::error::{Error, Result};
use crate::geometry::{Mat3, Vec3};
use crate::sparse::SparseMatrix;

/// Every operator of a complex, assembled once.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    /// Edge vectors, destination centroid minus source centroid.
    pub e_vectors: Vec<Vec3>,
    /// Edge lengths.
    pub xi: Vec<f64>,
    pub g: SparseMatrix,
    pub d: SparseMatrix,
    pub l: SparseMatrix,
    /// Face areas (empty when the complex has no faces).
    pub alpha: Vec<f64>,
    /// Cell volumes (empty when the complex has no cells).
    pub beta: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Option<Vec<f64>>,
    pub s3: Option<Vec<f64>>,
    pub omega: SparseMatrix,
    /// Reciprocal face areas, the diagonal of the curl scaling.
    pub a_inv: Vec<f64>,
}

impl OperatorSet {
    pub fn assemble(x: &VoxelComplex) -> Result<Self> {
        let (e_vectors, xi) = edge_geometry(x)?;
        let g = x
            .m_ev()
            .scale_rows(&xi.iter().map(|l| 1.0 / l).collect::<Vec<_>>())?;
        let d = g.transpose();
        let l = d.multiply(&g)?;
        let alpha = face_areas(x);
        let beta = cell_volumes(x);
        let s1 = integral_line(x)?;
        let s2 = (x.face_count() > 0)
            .then(|| integral_surface(x))
            .transpose()?;
        let s3 = (x.cell_count() > 0)
            .then(|| integral_volume(x))
            .transpose()?;
        let a_inv = alpha.iter().map(|a| 1.0 / a).collect();
        Ok(Self {
            e_vectors,
            xi,
            g,
            d,
            l,
            alpha,
            beta,
            s1,
            s2,
            s3,
            omega: cycle_basis(x),
            a_inv,
        })
    }
}

fn require_edges(x: &VoxelComplex) -> Result<()> {
    if x.edge_count() == 0 {
        return Err(Error::Unsupported("the complex has no edges".into()));
    }
    Ok(())
}

fn check_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::Shape(format!(
            "{what} has length {got}, expected {expected}"
        )));
    }
    Ok(())
}

/// Edge vectors `E = M V` and their lengths, computed row by row.
pub fn edge_geometry(x: &VoxelComplex) -> Result<(Vec<Vec3>, Vec<f64>)> {
    require_edges(x)?;
    let centroids = x.vertex_centroids();
    let mut e = vec![Vec3::zeros(); x.edge_count()];
    for &(row, col, sign) in x.m_ev().entries() {
        e[row] += centroids[col] * sign;
    }
    let xi: Vec<f64> = e.iter().map(|v| v.norm()).collect();
    debug_assert!(xi.iter().all(|&l| l > 0.0));
    Ok((e, xi))
}

/// `G = Xi^-1 M`, vertex fields to edge fields.
pub fn gradient(x: &VoxelComplex) -> Result<SparseMatrix> {
    let (_, xi) = edge_geometry(x)?;
    x.m_ev()
        .scale_rows(&xi.iter().map(|l| 1.0 / l).collect::<Vec<_>>())
}

/// `D = M^T Xi^-1`, edge fields to vertex fields.
pub fn divergence(x: &VoxelComplex) -> Result<SparseMatrix> {
    let (_, xi) = edge_geometry(x)?;
    x.m_ev()
        .transpose()
        .scale_cols(&xi.iter().map(|l| 1.0 / l).collect::<Vec<_>>())
}

/// `L = D G`.
pub fn laplacian(x: &VoxelComplex) -> Result<SparseMatrix> {
    divergence(x)?.multiply(&gradient(x)?)
}

/// `L = M^T Xi^-2 M`, the same matrix assembled through the squared lengths.
pub fn laplacian_from_incidence(x: &VoxelComplex) -> Result<SparseMatrix> {
    let (_, xi) = edge_geometry(x)?;
    let w: Vec<f64> = xi.iter().map(|l| 1.0 / (l * l)).collect();
    x.m_ev().transpose().multiply(&x.m_ev().scale_rows(&w)?)
}

/// Face areas: the product of the two in-plane voxel sizes.
pub fn face_areas(x: &VoxelComplex) -> Vec<f64> {
    let sigma = x.cloud().sigma();
    x.face_ids()
        .keys()
        .iter()
        .map(|f| {
            let (a, b) = f.plane.in_plane_axes();
            sigma[a] * sigma[b]
        })
        .collect()
}

/// Cell volumes: the product of the three voxel sizes.
pub fn cell_volumes(x: &VoxelComplex) -> Vec<f64> {
    let sigma = x.cloud().sigma();
    vec![sigma.x * sigma.y * sigma.z; x.cell_count()]
}

/// Line-integral covector `1/2 xi^T |M_EV|`.
pub fn integral_line(x: &VoxelComplex) -> Result<Vec<f64>> {
    let (_, xi) = edge_geometry(x)?;
    let s = x.m_ev().abs().vecmat(&xi)?;
    Ok(s.into_iter().map(|v| 0.5 * v).collect())
}

/// Surface-integral covector `1/4 alpha^T M_FV`.
pub fn integral_surface(x: &VoxelComplex) -> Result<Vec<f64>> {
    if x.face_count() == 0 {
        return Err(Error::Unsupported("the complex has no faces".into()));
    }
    let s = x.m_fv().vecmat(&face_areas(x))?;
    Ok(s.into_iter().map(|v| 0.25 * v).collect())
}

/// Volume-integral covector `1/8 beta^T M_CV`.
pub fn integral_volume(x: &VoxelComplex) -> Result<Vec<f64>> {
    if x.cell_count() == 0 {
        return Err(Error::Unsupported("the complex has no cells".into()));
    }
    let s = x.m_cv().vecmat(&cell_volumes(x))?;
    Ok(s.into_iter().map(|v| 0.125 * v).collect())
}

/// Apply a covector to a vertex field.
pub fn integrate(covector: &[f64], field: &[f64]) -> Result<f64> {
    check_len("field", field.len(), covector.len())?;
    Ok(covector.iter().zip(field).map(|(a, b)| a * b).sum())
}

/// The oriented face-edge incidence; each row is the boundary cycle of a face.
pub fn cycle_basis(x: &VoxelComplex) -> SparseMatrix {
    x.m_fe().clone()
}

/// Result of comparing the constructed cycle basis with the left null space
/// of the edge-vertex incidence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleCheck {
    /// Dimension of `{y : y^T M = 0}`, i.e. `m - rank(M)`.
    pub null_dim: usize,
    /// Rank of the cycle basis.
    pub omega_rank: usize,
    /// Largest deviation of a cycle-basis row from its null-space projection.
    pub max_residual: f64,
}

/// Largest complex (in edges) the dense null-space check accepts.
pub const NULL_SPACE_CHECK_MAX_EDGES: usize = 100;

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(a: &mut [Vec<f64>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == a.len() {
            break;
        }
        let best = (row..a.len()).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()));
        let Some(best) = best else { break };
        if a[best][col].abs() < 1e-9 {
            continue;
        }
        a.swap(row, best);
        let p = a[row][col];
        for v in a[row].iter_mut() {
            *v /= p;
        }
        for i in 0..a.len() {
            if i != row && a[i][col] != 0.0 {
                let f = a[i][col];
                for j in 0..cols {
                    a[i][j] -= f * a[row][j];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Cross-check the cycle basis against the null space of `M^T`, computed by
/// dense elimination. Only for small complexes.
pub fn cycle_basis_null_space_check(x: &VoxelComplex) -> Result<CycleCheck> {
    let m = x.edge_count();
    if m > NULL_SPACE_CHECK_MAX_EDGES {
        return Err(Error::Unsupported(format!(
            "dense null-space check is limited to {NULL_SPACE_CHECK_MAX_EDGES} edges, got {m}"
        )));
    }
    // rows of M^T are the vertex constraints on an edge vector y
    let mut mt = x.m_ev().transpose().to_dense();
    let pivots = rref(&mut mt, m);
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    // null-space basis: one vector per free column
    let basis: Vec<Vec<f64>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![0.0; m];
            v[f] = 1.0;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -mt[r][f];
            }
            v
        })
        .collect();
    let omega = x.m_fe().to_dense();
    let mut max_residual: f64 = 0.0;
    for row in &omega {
        // a null-space vector is determined by its free coordinates
        let mut proj = vec![0.0; m];
        for (k, &f) in free.iter().enumerate() {
            for j in 0..m {
                proj[j] += row[f] * basis[k][j];
            }
        }
        for j in 0..m {
            max_residual = max_residual.max((row[j] - proj[j]).abs());
        }
    }
    let mut omega_copy = omega;
    let omega_rank = rref(&mut omega_copy, m).len();
    Ok(CycleCheck {
        null_dim: free.len(),
        omega_rank,
        max_residual,
    })
}

/// Face circulation per unit area, `A^-1 Omega F`.
pub fn curl(x: &VoxelComplex, edge_field: &[f64]) -> Result<Vec<f64>> {
    check_len("edge field", edge_field.len(), x.edge_count())?;
    let circulation = x.m_fe().matvec(edge_field)?;
    Ok(circulation
        .iter()
        .zip(face_areas(x))
        .map(|(c, a)| c / a)
        .collect())
}

/// Number of edges at each vertex.
pub fn degrees(x: &VoxelComplex) -> Vec<usize> {
    x.degrees()
}

/// `true` for vertices whose degree is below `full_degree` (6 for face6).
pub fn boundary_vertices(x: &VoxelComplex, full_degree: usize) -> Vec<bool> {
    x.degrees().into_iter().map(|d| d < full_degree).collect()
}

/// Vertices whose whole edge-neighbourhood consists of interior vertices.
pub fn deep_interior_vertices(x: &VoxelComplex, full_degree: usize) -> Vec<bool> {
    let boundary = boundary_vertices(x, full_degree);
    let mut deep: Vec<bool> = boundary.iter().map(|b| !b).collect();
    for e in 0..x.edge_count() {
        let (s, d) = x.edge_endpoints(e);
        if boundary[s] {
            deep[d] = false;
        }
        if boundary[d] {
            deep[s] = false;
        }
    }
    deep
}

/// Least-squares Jacobian reconstruction at every vertex.
///
/// With unit edge directions `e` and edge differences `(G F)_e`, the
/// Jacobian at a vertex is `(sum (G F)_e e^T) (sum e e^T)^+` over its edges,
/// which reproduces `A` exactly for `F(x) = A x` whenever the incident edges
/// span all three axes. Entry `(i, j)` is `dF_i / dx_j`.
pub fn jacobian(x: &VoxelComplex, field: &[Vec3]) -> Result<Vec<Mat3>> {
    check_len("vector field", field.len(), x.vertex_count())?;
    let (e_vectors, xi) = edge_geometry(x)?;
    let n = x.vertex_count();
    let mut moment = vec![Mat3::zeros(); n];
    let mut structure = vec![Mat3::zeros(); n];
    for e in 0..x.edge_count() {
        let (s, d) = x.edge_endpoints(e);
        let dir = e_vectors[e] / xi[e];
        let diff = (field[d] - field[s]) / xi[e];
        let outer = diff * dir.transpose();
        let tensor = dir * dir.transpose();
        for v in [s, d] {
            moment[v] += outer;
            structure[v] += tensor;
        }
    }
    Ok(moment
        .iter()
        .zip(&structure)
        .map(|(mo, st)| {
            let pinv = st
                .pseudo_inverse(1e-12 * st.norm().max(f64::MIN_POSITIVE))
                .unwrap_or_else(|_| Mat3::zeros());
            mo * pinv
        })
        .collect())
}

/// Least-squares gradient of a scalar vertex field at every vertex.
pub fn vertex_gradient(x: &VoxelComplex, field: &[f64]) -> Result<Vec<Vec3>> {
    check_len("field", field.len(), x.vertex_count())?;
    let lifted: Vec<Vec3> = field.iter().map(|&f| Vec3::new(f, 0.0, 0.0)).collect();
    Ok(jacobian(x, &lifted)?
        .into_iter()
        .map(|j| j.row(0).transpose())
        .collect())
}

/// Hessian as the symmetrized Jacobian of the vertex gradient.
pub fn hessian(x: &VoxelComplex, field: &[f64]) -> Result<Vec<Mat3>> {
    let grad = vertex_gradient(x, field)?;
    Ok(jacobian(x, &grad)?
        .into_iter()
        .map(|h| (h + h.transpose()) * 0.5)
        .collect())
}

/// Largest `dt` accepted by [`solve_heat`] (exclusive).
pub fn heat_dt_bound(x: &VoxelComplex) -> Result<f64> {
    let (_, xi) = edge_geometry(x)?;
    let max_degree = x.degrees().into_iter().max().unwrap_or(0) as f64;
    let min_xi = xi.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(min_xi * min_xi / max_degree)
}

/// Explicit Euler steps of `df/dt = -L f`.
pub fn solve_heat(x: &VoxelComplex, f0: &[f64], dt: f64, steps: usize) -> Result<Vec<f64>> {
    check_len("initial field", f0.len(), x.vertex_count())?;
    let bound = heat_dt_bound(x)?;
    if !(dt > 0.0 && dt < bound) {
        return Err(Error::Argument(format!(
            "time step {dt} violates the explicit stability bound dt < {bound}"
        )));
    }
    let l = laplacian(x)?;
    let mut f = f0.to_vec();
    for _ in 0..steps {
        let lf = l.matvec(&f)?;
        for (v, d) in f.iter_mut().zip(lf) {
            *v -= dt * d;
        }
    }
    Ok(f)
}
