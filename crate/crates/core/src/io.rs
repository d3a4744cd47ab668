//! Text formats: Wavefront OBJ in; voxel clouds, complex tables, fields,
//! points, stencils and MatrixMarket matrices in and out.
//!
//! Parsers work on `&str` and report the 1-based line of the first problem.
//! Writers return `String`s whose content depends only on their input, with
//! rows in ascending ID order and floats in shortest round-trip notation.

use std::fmt::Write as _;
use std::path::Path;

use crate::complex::{CellId, FaceId, VoxelComplex};
use crate::error::{Error, Result};
use crate::geometry::{LineSet, Point3, TriMesh, Vec3};
use crate::morton::{encode3, interleave2, MortonCode3, MortonCode6};
use crate::sparse::SparseMatrix;
use crate::stencil::{Condition, FacePlane, Stencil};
use crate::voxelize::{poxelate, Voxel, VoxelCloud};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_f64(token: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} '{token}'")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite {what} '{token}'")));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} '{token}'")))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

// ---------------------------------------------------------------- OBJ

/// Geometry found in an OBJ file. Faces and line records may coexist.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjData {
    pub vertices: Vec<Point3>,
    /// Triangles; polygons are fanned from their first corner.
    pub faces: Vec<[usize; 3]>,
    /// Segments from `l` records; polylines are split into consecutive pairs.
    pub segments: Vec<[usize; 2]>,
}

impl ObjData {
    pub fn mesh(&self) -> Result<TriMesh> {
        if self.faces.is_empty() {
            return Err(Error::Format("the OBJ data has no faces".into()));
        }
        TriMesh::new(self.vertices.clone(), self.faces.clone())
    }

    pub fn line_set(&self) -> Result<LineSet> {
        if self.segments.is_empty() {
            return Err(Error::Format("the OBJ data has no line records".into()));
        }
        LineSet::new(self.vertices.clone(), self.segments.clone())
    }
}

fn obj_index(token: &str, count: usize, line: usize) -> Result<usize> {
    let head = token.split('/').next().unwrap_or("");
    let i: i64 = parse_int(head, line, "vertex index")?;
    let resolved = if i > 0 {
        i - 1
    } else if i < 0 {
        count as i64 + i
    } else {
        return Err(Error::parse(
            line,
            "vertex index 0 is not valid (indices are 1-based)",
        ));
    };
    if resolved < 0 || resolved >= count as i64 {
        return Err(Error::parse(
            line,
            format!("vertex index {i} out of range ({count} vertices so far)"),
        ));
    }
    Ok(resolved as usize)
}

pub fn parse_obj(text: &str) -> Result<ObjData> {
    let mut data = ObjData::default();
    for (line, raw) in content_lines(text) {
        let mut tokens = raw.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        let args: Vec<&str> = tokens.collect();
        match keyword {
            "v" => {
                if args.len() < 3 || args.len() > 4 {
                    return Err(Error::parse(line, "vertex record needs 3 coordinates"));
                }
                let c = args[..3]
                    .iter()
                    .map(|t| parse_f64(t, line, "coordinate"))
                    .collect::<Result<Vec<_>>>()?;
                data.vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            "f" => {
                if args.len() < 3 {
                    return Err(Error::parse(
                        line,
                        format!("face record needs at least 3 vertices, got {}", args.len()),
                    ));
                }
                let idx = args
                    .iter()
                    .map(|t| obj_index(t, data.vertices.len(), line))
                    .collect::<Result<Vec<_>>>()?;
                for k in 1..idx.len() - 1 {
                    data.faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            "l" => {
                if args.len() < 2 {
                    return Err(Error::parse(line, "line record needs at least 2 vertices"));
                }
                let idx = args
                    .iter()
                    .map(|t| obj_index(t, data.vertices.len(), line))
                    .collect::<Result<Vec<_>>>()?;
                data.segments.extend(idx.windows(2).map(|w| [w[0], w[1]]));
            }
            // texture/normal data, grouping and materials carry no geometry here
            "vt" | "vn" | "vp" | "g" | "o" | "s" | "usemtl" | "mtllib" => {}
            other => {
                return Err(Error::parse(line, format!("unknown record '{other}'")));
            }
        }
    }
    Ok(data)
}

pub fn read_obj(path: &Path) -> Result<ObjData> {
    parse_obj(&read_text(path)?)
}

pub fn write_obj_mesh(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

// ---------------------------------------------------------------- voxel clouds

pub const VOXEL_CLOUD_HEADER: &str = "iota,i,j,k,x,y,z";

fn split_csv(raw: &str, expected: usize, line: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
    if fields.len() != expected {
        return Err(Error::parse(
            line,
            format!(
                "expected {expected} comma-separated fields, got {}",
                fields.len()
            ),
        ));
    }
    Ok(fields)
}

fn parse_triple<T: std::str::FromStr>(value: &str, line: usize, what: &str) -> Result<[T; 3]> {
    let parts = split_csv(value, 3, line)?;
    let a = parse_int(parts[0], line, what)?;
    let b = parse_int(parts[1], line, what)?;
    let c = parse_int(parts[2], line, what)?;
    Ok([a, b, c])
}

pub fn write_voxel_cloud(cloud: &VoxelCloud) -> String {
    let s = cloud.sigma();
    let c = cloud.corner();
    let mut out = String::new();
    let _ = writeln!(out, "# sigma={},{},{}", s.x, s.y, s.z);
    let _ = writeln!(out, "# corner={},{},{}", c[0], c[1], c[2]);
    let _ = writeln!(out, "{VOXEL_CLOUD_HEADER}");
    for &code in cloud.codes() {
        let rho = code.decode();
        let p = cloud.centroid(code);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            code.bits(),
            rho[0],
            rho[1],
            rho[2],
            p.x,
            p.y,
            p.z
        );
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn parse_voxel_cloud(text: &str) -> Result<VoxelCloud> {
    let mut sigma: Option<Vec3> = None;
    let mut corner: Option<Voxel> = None;
    let mut header_seen = false;
    let mut codes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        if let Some(comment) = raw.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("sigma=") {
                let parts = split_csv(v, 3, line)?;
                let s = parts
                    .iter()
                    .map(|t| parse_f64(t, line, "sigma"))
                    .collect::<Result<Vec<_>>>()?;
                sigma = Some(Vec3::new(s[0], s[1], s[2]));
            } else if let Some(v) = comment.strip_prefix("corner=") {
                corner = Some(parse_triple(v, line, "corner")?);
            }
            continue;
        }
        if !header_seen {
            if raw != VOXEL_CLOUD_HEADER {
                return Err(Error::Format(format!(
                    "line {line}: expected header '{VOXEL_CLOUD_HEADER}', found '{raw}'"
                )));
            }
            header_seen = true;
            continue;
        }
        let (Some(sigma), Some(corner)) = (sigma, corner) else {
            return Err(Error::Format(
                "voxel cloud needs '# sigma=' and '# corner=' lines before the data".into(),
            ));
        };
        let f = split_csv(raw, 7, line)?;
        let bits: u64 = parse_int(f[0], line, "Morton code")?;
        let rho: [u32; 3] = [
            parse_int(f[1], line, "index")?,
            parse_int(f[2], line, "index")?,
            parse_int(f[3], line, "index")?,
        ];
        let code = encode3(rho).map_err(|e| Error::Format(format!("line {line}: {e}")))?;
        if code.bits() != bits {
            return Err(Error::Format(format!(
                "line {line}: code {bits} does not match indices {rho:?} (expected {})",
                code.bits()
            )));
        }
        let xyz = [
            parse_f64(f[4], line, "coordinate")?,
            parse_f64(f[5], line, "coordinate")?,
            parse_f64(f[6], line, "coordinate")?,
        ];
        let voxel = [0, 1, 2].map(|a| rho[a] as i64 + corner[a]);
        let expected = poxelate(&voxel, &sigma);
        if (0..3).any(|a| !close(xyz[a], expected[a])) {
            return Err(Error::Format(format!(
                "line {line}: centroid {xyz:?} does not match voxel {voxel:?}"
            )));
        }
        codes.push(code);
    }
    if !header_seen {
        return Err(Error::Format("missing voxel cloud header".into()));
    }
    if codes.is_empty() {
        return Err(Error::Format("voxel cloud has no voxels".into()));
    }
    let (Some(sigma), Some(corner)) = (sigma, corner) else {
        unreachable!("checked before the first row")
    };
    let n = codes.len();
    let cloud = VoxelCloud::from_codes(codes, sigma, corner)
        .map_err(|e| Error::Format(format!("invalid voxel cloud: {e}")))?;
    if cloud.len() != n {
        return Err(Error::Format("voxel cloud lists a voxel twice".into()));
    }
    Ok(cloud)
}

pub fn read_voxel_cloud(path: &Path) -> Result<VoxelCloud> {
    parse_voxel_cloud(&read_text(path)?)
}

// ---------------------------------------------------------------- complex tables

pub const EDGES_HEADER: &str = "epsilon,source,destination";
pub const FACES_HEADER: &str = "corner,plane";
pub const CELLS_HEADER: &str = "corner";

pub fn write_edges(x: &VoxelComplex) -> String {
    let mut out = format!("{EDGES_HEADER}\n");
    for e in x.edge_ids().keys() {
        let _ = writeln!(
            out,
            "{},{},{}",
            e.bits(),
            e.source().bits(),
            e.destination().bits()
        );
    }
    out
}

pub fn write_faces(x: &VoxelComplex) -> String {
    let mut out = format!("{FACES_HEADER}\n");
    for f in x.face_ids().keys() {
        let _ = writeln!(out, "{},{}", f.corner.bits(), f.plane.tag());
    }
    out
}

pub fn write_cells(x: &VoxelComplex) -> String {
    let mut out = format!("{CELLS_HEADER}\n");
    for c in x.cell_ids().keys() {
        let _ = writeln!(out, "{}", c.0.bits());
    }
    out
}

/// Data rows of a headed CSV table, with their line numbers.
fn table_rows<'a>(text: &'a str, header: &str) -> Result<Vec<(usize, &'a str)>> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, h)) if h == header => Ok(lines.collect()),
        Some((line, h)) => Err(Error::Format(format!(
            "line {line}: expected header '{header}', found '{h}'"
        ))),
        None => Err(Error::Format(format!("missing header '{header}'"))),
    }
}

fn code3(token: &str, line: usize) -> Result<MortonCode3> {
    MortonCode3::from_bits(parse_int(token, line, "Morton code")?)
        .map_err(|e| Error::Format(format!("line {line}: {e}")))
}

pub fn parse_edges(text: &str) -> Result<Vec<MortonCode6>> {
    table_rows(text, EDGES_HEADER)?
        .into_iter()
        .map(|(line, raw)| {
            let f = split_csv(raw, 3, line)?;
            let bits: u64 = parse_int(f[0], line, "edge code")?;
            let e = MortonCode6::from_bits(bits)
                .map_err(|e| Error::Format(format!("line {line}: {e}")))?;
            let expected = interleave2(code3(f[1], line)?, code3(f[2], line)?)
                .map_err(|e| Error::Format(format!("line {line}: {e}")))?;
            if e != expected {
                return Err(Error::Format(format!(
                    "line {line}: edge code {bits} does not interleave its endpoints"
                )));
            }
            Ok(e)
        })
        .collect()
}

pub fn parse_faces(text: &str) -> Result<Vec<FaceId>> {
    table_rows(text, FACES_HEADER)?
        .into_iter()
        .map(|(line, raw)| {
            let f = split_csv(raw, 2, line)?;
            let plane = FacePlane::from_tag(f[1])
                .ok_or_else(|| Error::parse(line, format!("unknown face plane '{}'", f[1])))?;
            Ok(FaceId {
                corner: code3(f[0], line)?,
                plane,
            })
        })
        .collect()
}

pub fn parse_cells(text: &str) -> Result<Vec<CellId>> {
    table_rows(text, CELLS_HEADER)?
        .into_iter()
        .map(|(line, raw)| Ok(CellId(code3(raw, line)?)))
        .collect()
}

// ---------------------------------------------------------------- MatrixMarket

pub const MATRIX_MARKET_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

pub fn write_matrix(a: &SparseMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MATRIX_MARKET_HEADER}");
    let _ = writeln!(out, "{} {} {}", a.rows(), a.cols(), a.nnz());
    for &(i, j, v) in a.entries() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h))
            if h.split_whitespace()
                .map(str::to_ascii_lowercase)
                .eq(MATRIX_MARKET_HEADER
                    .split_whitespace()
                    .map(str::to_ascii_lowercase)) => {}
        Some((line, h)) => {
            return Err(Error::parse(
                line,
                format!("expected '{MATRIX_MARKET_HEADER}', found '{h}'"),
            ))
        }
        None => return Err(Error::Format("empty MatrixMarket file".into())),
    }
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (line, size) = body
        .next()
        .ok_or_else(|| Error::Format("MatrixMarket file has no size line".into()))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(Error::parse(
            line,
            "size line needs rows, columns and entry count",
        ));
    }
    let rows: usize = parse_int(dims[0], line, "row count")?;
    let cols: usize = parse_int(dims[1], line, "column count")?;
    let nnz: usize = parse_int(dims[2], line, "entry count")?;
    let mut triplets = Vec::with_capacity(nnz.min(1 << 20));
    for (line, raw) in body {
        let f: Vec<&str> = raw.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(line, "entry needs row, column and value"));
        }
        let i: usize = parse_int(f[0], line, "row index")?;
        let j: usize = parse_int(f[1], line, "column index")?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::parse(
                line,
                format!("entry ({i}, {j}) outside a {rows}x{cols} matrix (indices are 1-based)"),
            ));
        }
        triplets.push((i - 1, j - 1, parse_f64(f[2], line, "value")?));
    }
    if triplets.len() != nnz {
        return Err(Error::Format(format!(
            "size line announces {nnz} entries, found {}",
            triplets.len()
        )));
    }
    SparseMatrix::from_triplets(rows, cols, triplets)
}

// ---------------------------------------------------------------- fields and points

pub const FIELD_HEADER: &str = "id,value";
pub const POINTS_HEADER: &str = "x,y,z";

pub fn write_field(ids: &[u64], values: &[f64]) -> Result<String> {
    if ids.len() != values.len() {
        return Err(Error::Shape(format!(
            "{} ids for {} values",
            ids.len(),
            values.len()
        )));
    }
    let mut out = format!("{FIELD_HEADER}\n");
    for (id, v) in ids.iter().zip(values) {
        let _ = writeln!(out, "{id},{v}");
    }
    Ok(out)
}

pub fn parse_field(text: &str) -> Result<Vec<(u64, f64)>> {
    table_rows(text, FIELD_HEADER)?
        .into_iter()
        .map(|(line, raw)| {
            let f = split_csv(raw, 2, line)?;
            Ok((
                parse_int(f[0], line, "id")?,
                parse_f64(f[1], line, "value")?,
            ))
        })
        .collect()
}

/// Order a parsed field by `ids`; every id must appear exactly once.
pub fn field_values(ids: &[u64], field: &[(u64, f64)]) -> Result<Vec<f64>> {
    let mut sorted = field.to_vec();
    sorted.sort_by_key(|e| e.0);
    if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Format(format!("field lists id {} twice", w[0].0)));
    }
    if sorted.len() != ids.len() {
        return Err(Error::Format(format!(
            "field has {} values for {} ids",
            sorted.len(),
            ids.len()
        )));
    }
    ids.iter()
        .map(|id| {
            sorted
                .binary_search_by_key(id, |e| e.0)
                .map(|k| sorted[k].1)
                .map_err(|_| Error::Format(format!("field has no value for id {id}")))
        })
        .collect()
}

pub fn write_points(points: &[Point3]) -> String {
    let mut out = format!("{POINTS_HEADER}\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.x, p.y, p.z);
    }
    out
}

pub fn parse_points(text: &str) -> Result<Vec<Point3>> {
    table_rows(text, POINTS_HEADER)?
        .into_iter()
        .map(|(line, raw)| {
            let f = split_csv(raw, 3, line)?;
            Ok(Point3::new(
                parse_f64(f[0], line, "coordinate")?,
                parse_f64(f[1], line, "coordinate")?,
                parse_f64(f[2], line, "coordinate")?,
            ))
        })
        .collect()
}

// ---------------------------------------------------------------- stencils

/// Parse a stencil description:
///
/// ```text
/// # comment
/// condition all            (optional; or per-hyper-edge)
/// rel 0 0 0                (condition offsets; the first is the anchor)
/// rel 1 0 0
/// edge 0 1                 (hyper-edges index the rel list)
/// face a b c d
/// cell a b c d e f g h
/// ```
pub fn parse_stencil(text: &str) -> Result<Stencil> {
    let mut cond = Vec::new();
    let mut hyper_edges = Vec::new();
    let mut condition = Condition::All;
    for (line, raw) in content_lines(text) {
        let raw = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = raw.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        let args: Vec<&str> = tokens.collect();
        let indices = |n: usize| -> Result<Vec<usize>> {
            if args.len() != n {
                return Err(Error::parse(
                    line,
                    format!("'{keyword}' needs {n} indices, got {}", args.len()),
                ));
            }
            args.iter().map(|t| parse_int(t, line, "index")).collect()
        };
        match keyword {
            "condition" => {
                condition = match args.as_slice() {
                    ["all"] => Condition::All,
                    ["per-hyper-edge"] => Condition::PerHyperEdge,
                    _ => {
                        return Err(Error::parse(
                            line,
                            "condition must be 'all' or 'per-hyper-edge'",
                        ))
                    }
                }
            }
            "rel" => {
                if !hyper_edges.is_empty() {
                    return Err(Error::parse(line, "'rel' lines must precede hyper-edges"));
                }
                if args.len() != 3 {
                    return Err(Error::parse(line, "'rel' needs three integer offsets"));
                }
                let o = args
                    .iter()
                    .map(|t| parse_int(t, line, "offset"))
                    .collect::<Result<Vec<i32>>>()?;
                cond.push([o[0], o[1], o[2]]);
            }
            "edge" => hyper_edges.push((line, indices(2)?)),
            "face" => hyper_edges.push((line, indices(4)?)),
            "cell" => hyper_edges.push((line, indices(8)?)),
            other => {
                return Err(Error::parse(
                    line,
                    format!("unknown stencil record '{other}'"),
                ))
            }
        }
    }
    if cond.is_empty() {
        return Err(Error::Format("stencil has no 'rel' lines".into()));
    }
    if let Some((line, he)) = hyper_edges
        .iter()
        .find(|(_, he)| he.iter().any(|&i| i >= cond.len()))
    {
        return Err(Error::parse(
            *line,
            format!("hyper-edge {he:?} references a missing 'rel' entry"),
        ));
    }
    Stencil::compile_with(
        cond,
        hyper_edges.into_iter().map(|(_, he)| he).collect(),
        condition,
    )
}

pub fn read_stencil(path: &Path) -> Result<Stencil> {
    parse_stencil(&read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stencil::StencilKind;

    #[test]
    fn obj_triangle_and_quad() {
        let d = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        let m = d.mesh().unwrap();
        assert_eq!((m.vertices.len(), m.faces.len()), (3, 1));

        let d = parse_obj(
            "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n",
        )
        .unwrap();
        assert_eq!(d.faces, vec![[0, 1, 2], [0, 2, 3]]);

        let d = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n").unwrap();
        assert_eq!(d.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn obj_errors_carry_line_numbers() {
        match parse_obj("v 0 0 0\nv 1 0 0\nf 1 2\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_obj("v 0 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_obj("v 0 0 0\nf 1 1 4\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_obj("v 0 0 0\nf 0 1 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_obj("v 0 0 x\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn obj_lines_and_mixed() {
        let d = parse_obj("v 0 0 0\nv 1 0 0\nv 2 0 0\nl 1 2 3\nf 1 2 3\n").unwrap();
        assert_eq!(d.segments, vec![[0, 1], [1, 2]]);
        assert_eq!(d.faces.len(), 1);
        assert!(parse_obj("").unwrap().mesh().is_err());
    }

    #[test]
    fn voxel_cloud_roundtrip() {
        let one = Vec3::repeat(1.0);
        let c = VoxelCloud::from_voxels(&[[2, -1, 7]], Vec3::new(0.5, 1.0, 2.0)).unwrap();
        assert_eq!(parse_voxel_cloud(&write_voxel_cloud(&c)).unwrap(), c);

        let mut v = Vec::new();
        for i in 0..8 {
            v.push([i >> 2 & 1, i >> 1 & 1, i & 1]);
        }
        let c = VoxelCloud::from_voxels(&v, one).unwrap();
        let text = write_voxel_cloud(&c);
        let back = parse_voxel_cloud(&text).unwrap();
        assert_eq!(back, c);
        for &code in back.codes() {
            assert_eq!(encode3(code.decode()).unwrap(), code);
        }
        assert!(
            text.starts_with("# sigma=1,1,1\n# corner=0,0,0\niota,i,j,k,x,y,z\n0,0,0,0,0,0,0\n")
        );
    }

    #[test]
    fn voxel_cloud_errors() {
        let head = "# sigma=1,1,1\n# corner=0,0,0\n";
        assert!(matches!(
            parse_voxel_cloud(&format!("{head}iota,i,j,k,x,y,z\n")),
            Err(Error::Format(_))
        ));
        assert!(parse_voxel_cloud(&format!("{head}iota,x,y,z\n0,0,0,0\n")).is_err());
        // code does not match indices
        assert!(parse_voxel_cloud(&format!("{head}iota,i,j,k,x,y,z\n1,0,0,0,0,0,0\n")).is_err());
        // centroid does not match
        assert!(parse_voxel_cloud(&format!("{head}iota,i,j,k,x,y,z\n1,0,0,1,0,0,5\n")).is_err());
        assert!(parse_voxel_cloud("iota,i,j,k,x,y,z\n0,0,0,0,0,0,0\n").is_err());
        assert!(parse_voxel_cloud(&format!(
            "{head}iota,i,j,k,x,y,z\n0,0,0,0,0,0,0\n0,0,0,0,0,0,0\n"
        ))
        .is_err());
    }

    #[test]
    fn matrix_market() {
        let z = SparseMatrix::zeros(0, 0);
        let text = write_matrix(&z);
        assert_eq!(text, format!("{MATRIX_MARKET_HEADER}\n0 0 0\n"));
        assert_eq!(parse_matrix(&text).unwrap(), z);

        let a = SparseMatrix::from_dense(&[vec![1.5, 0.0], vec![-2.0, 0.25]]);
        let text = write_matrix(&a);
        assert_eq!(
            text,
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.5\n2 1 -2\n2 2 0.25\n"
        );
        assert_eq!(parse_matrix(&text).unwrap(), a);

        assert!(parse_matrix("%%MatrixMarket matrix array real general\n1 1\n1\n").is_err());
        assert!(parse_matrix(&format!("{MATRIX_MARKET_HEADER}\n2 2 1\n3 1 1\n")).is_err());
        assert!(parse_matrix(&format!("{MATRIX_MARKET_HEADER}\n2 2 2\n1 1 1\n")).is_err());
    }

    #[test]
    fn fields_and_points() {
        let text = write_field(&[4, 9], &[0.5, -1.0]).unwrap();
        assert_eq!(text, "id,value\n4,0.5\n9,-1\n");
        let parsed = parse_field(&text).unwrap();
        assert_eq!(field_values(&[9, 4], &parsed).unwrap(), vec![-1.0, 0.5]);
        assert!(field_values(&[4, 5], &parsed).is_err());
        assert!(field_values(&[4], &parsed).is_err());

        let pts = vec![Point3::new(0.1, -2.0, 3.5)];
        assert_eq!(parse_points(&write_points(&pts)).unwrap(), pts);
        assert!(parse_points("x,y\n1,2\n").is_err());
    }

    #[test]
    fn stencil_file() {
        let text = "# square in the yz plane\nrel 0 0 0\nrel 0 1 0\nrel 0 1 1\nrel 0 0 1\n\
                    edge 0 1\nedge 1 2\nedge 3 2\nedge 0 3\nface 0 1 2 3\n";
        let s = parse_stencil(text).unwrap();
        let reference = Stencil::standard(StencilKind::SquareYZ);
        assert_eq!(s.cond(), reference.cond());
        assert_eq!(s.condition(), Condition::All);
        assert_eq!((s.edge_count(), s.face_count()), (4, 1));

        let s = parse_stencil("condition per-hyper-edge\nrel 0 0 0\nrel 1 0 0 # x\nedge 0 1\n")
            .unwrap();
        assert_eq!(s.condition(), Condition::PerHyperEdge);

        assert!(parse_stencil("rel 0 0 0\nedge 0 5\n").is_err());
        assert!(parse_stencil("rel 1 0 0\nrel 0 0 0\nedge 0 1\n").is_err());
        assert!(matches!(
            parse_stencil("rel 0 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_stencil("rel 0 0 0\nrel 1 0 0\nrel 0 1 0\nface 0 1 2 0\n").is_err());
        assert!(parse_stencil("").is_err());
    }

    #[test]
    fn complex_tables_roundtrip() {
        let mut v = Vec::new();
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    v.push([i, j, k]);
                }
            }
        }
        let cloud = VoxelCloud::from_voxels(&v, Vec3::repeat(1.0)).unwrap();
        let x = VoxelComplex::construct(&cloud, &Stencil::standard(StencilKind::Cube8)).unwrap();
        let edges = parse_edges(&write_edges(&x)).unwrap();
        let faces = parse_faces(&write_faces(&x)).unwrap();
        let cells = parse_cells(&write_cells(&x)).unwrap();
        assert_eq!(edges, x.edge_ids().keys());
        assert_eq!(faces, x.face_ids().keys());
        assert_eq!(cells, x.cell_ids().keys());
        assert!(parse_edges("epsilon,source,destination\n3,0,0\n").is_err());
        assert!(parse_faces("corner,plane\n0,XZ\n").is_err());
    }
}
