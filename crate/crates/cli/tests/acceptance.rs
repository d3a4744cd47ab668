//! End-to-end acceptance run. Prints one `criterion N: PASS|FAIL` line per
//! criterion and fails if any criterion fails.
//!
//! Run with `cargo test -p topovox-cli --test acceptance -- --nocapture`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topovox::morton::{
    deinterleave2, encode3, interleave2, morton_sum3, morton_sum6, MAX_AXIS_3, MAX_AXIS_6,
};
use topovox::operators::{
    curl, deep_interior_vertices, divergence, gradient, heat_dt_bound, hessian, integral_line,
    integral_volume, jacobian, laplacian, laplacian_from_incidence, solve_heat,
};
use topovox::sampling::{sample_surface_mesh, sample_volume_mesh};
use topovox::shapes::icosphere;
use topovox::{
    io, Error, Frame, Mat3, OperatorSet, Point3, SamplingMode, SamplingOptions, Stencil,
    StencilKind, Vec3, Voxel, VoxelCloud, VoxelComplex,
};

type Outcome = (bool, String);

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(0x746f_706f_766f_78);
    r.set_stream(stream);
    r
}

fn full_stencils(edge: StencilKind) -> Vec<Stencil> {
    [
        edge,
        StencilKind::SquareYZ,
        StencilKind::SquareZX,
        StencilKind::SquareXY,
        StencilKind::Cube8,
    ]
    .map(Stencil::standard)
    .to_vec()
}

fn block(dims: [i64; 3]) -> Vec<Voxel> {
    let mut v = Vec::new();
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                v.push([i, j, k]);
            }
        }
    }
    v
}

fn block_complex(dims: [i64; 3], sigma: Vec3, edge: StencilKind) -> VoxelComplex {
    let cloud = VoxelCloud::from_voxels(&block(dims), sigma).unwrap();
    VoxelComplex::construct_with(&cloud, &full_stencils(edge)).unwrap()
}

fn random_sigma(r: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(
        r.gen_range(0.5..=2.0),
        r.gen_range(0.5..=2.0),
        r.gen_range(0.5..=2.0),
    )
}

// ------------------------------------------------------------------ 1

/// Bit `b` of axis `a` sits at bit `3 b + 2 - a`.
fn reference_encode(rho: [u32; 3]) -> u64 {
    (0..21)
        .flat_map(|b| (0..3).map(move |a| (b, a)))
        .map(|(b, a)| (((rho[a] >> b) & 1) as u64) << (3 * b + 2 - a))
        .sum()
}

fn criterion_morton() -> Outcome {
    let mut r = rng(1);
    let mut failures = 0usize;
    for _ in 0..10_000 {
        let rho = [0; 3].map(|_| r.gen_range(0..=MAX_AXIS_3));
        let code = encode3(rho).unwrap();
        if code.decode() != rho || code.bits() != reference_encode(rho) {
            failures += 1;
        }
    }
    for _ in 0..10_000 {
        let a = [0; 3].map(|_| r.gen_range(0..=MAX_AXIS_3 / 2));
        let b = [0; 3].map(|_| r.gen_range(0..=MAX_AXIS_3 / 2));
        let sum = morton_sum3(encode3(a).unwrap(), encode3(b).unwrap()).unwrap();
        if sum.decode() != [a[0] + b[0], a[1] + b[1], a[2] + b[2]] {
            failures += 1;
        }
    }
    for _ in 0..10_000 {
        let v = [0; 12].map(|_| r.gen_range(0..=MAX_AXIS_6 / 2));
        let pack = |o: usize| {
            interleave2(
                encode3([v[o], v[o + 1], v[o + 2]]).unwrap(),
                encode3([v[o + 3], v[o + 4], v[o + 5]]).unwrap(),
            )
            .unwrap()
        };
        let (src, dst) = deinterleave2(morton_sum6(pack(0), pack(6)).unwrap());
        let expected_src = [v[0] + v[6], v[1] + v[7], v[2] + v[8]];
        let expected_dst = [v[3] + v[9], v[4] + v[10], v[5] + v[11]];
        if src.decode() != expected_src || dst.decode() != expected_dst {
            failures += 1;
        }
    }

    let square = Stencil::standard(StencilKind::SquareYZ);
    let cond: Vec<u64> = square
        .cond_codes()
        .unwrap()
        .iter()
        .map(|c| c.bits())
        .collect();
    let edges: Vec<u64> = square
        .edge_codes()
        .unwrap()
        .iter()
        .map(|e| e.bits())
        .collect();
    let fmt = |v: &[u64], w: usize| {
        v.iter()
            .map(|c| format!("{c:0w$b}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    let worked =
        cond == [0b000, 0b010, 0b011, 0b001] && edges == [0b001000, 0b001110, 0b000111, 0b000001];
    (
        failures == 0 && worked,
        format!(
            "{failures} mismatches in 3x10^4 random checks; square codes {{{}}} / {{{}}}",
            fmt(&cond, 3),
            fmt(&edges, 6)
        ),
    )
}

// ------------------------------------------------------------------ 2

fn surface_chi(obj: &str, diameter: f64) -> i64 {
    let mesh = io::read_obj(&data(obj)).unwrap().mesh().unwrap();
    let s = diameter / 16.0;
    let sigma = Vec3::new(s, s, s);
    let sampled =
        sample_surface_mesh(&mesh, &Frame::default(), sigma, &SamplingOptions::default()).unwrap();
    let cloud =
        topovox::voxelize::voxelate_point_cloud(&sampled.points, &Frame::default(), sigma).unwrap();
    let x = VoxelComplex::construct_with(&cloud, &full_stencils(StencilKind::Face6)).unwrap();
    x.euler_characteristic().chi()
}

fn criterion_topology() -> Outcome {
    let sphere = surface_chi("sphere.obj", 2.0);
    let torus = surface_chi("torus.obj", 2.0 * (1.0 + 0.4));
    let cube = block_complex([2, 2, 2], Vec3::new(1.0, 1.0, 1.0), StencilKind::Face6);
    let counts = cube.euler_characteristic();
    (
        sphere == 2 && torus == 0 && counts.surface() == 2,
        format!(
            "sphere chi={sphere}, torus chi={torus}, unit cube V-E+F={}",
            counts.surface()
        ),
    )
}

// ------------------------------------------------------------------ 3

fn criterion_operators() -> Outcome {
    let mut r = rng(3);
    let mut worst_l = 0.0f64;
    let mut worst_rowsum = 0.0f64;
    let mut worst_quad = f64::INFINITY;
    let mut worst_curl = 0.0f64;
    let mut exact = true;
    for n in 2..=8 {
        let dims = [n, r.gen_range(2..=n), r.gen_range(2..=n)];
        let x = block_complex(dims, random_sigma(&mut r), StencilKind::Face6);
        let g = gradient(&x).unwrap();
        exact &= divergence(&x).unwrap() == g.transpose();
        let l = laplacian(&x).unwrap();
        worst_l = worst_l.max(
            l.max_abs_diff(&laplacian_from_incidence(&x).unwrap())
                .unwrap(),
        );
        worst_rowsum = worst_rowsum.max(l.row_sums().iter().fold(0.0, |m, v| m.max(v.abs())));
        for _ in 0..100 {
            let f: Vec<f64> = (0..x.vertex_count())
                .map(|_| r.gen_range(-1.0..1.0))
                .collect();
            let lf = l.matvec(&f).unwrap();
            let q: f64 = f.iter().zip(&lf).map(|(a, b)| a * b).sum();
            worst_quad = worst_quad.min(q);
        }
        let ops = OperatorSet::assemble(&x).unwrap();
        exact &= ops.omega.multiply(x.m_ev()).unwrap().max_abs() == 0.0;

        let h = r.gen_range(0.5..=2.0);
        let xu = block_complex(dims, Vec3::new(h, h, h), StencilKind::Face6);
        let f: Vec<f64> = (0..xu.vertex_count())
            .map(|_| r.gen_range(-1.0..1.0))
            .collect();
        let gf = gradient(&xu).unwrap().matvec(&f).unwrap();
        let c = curl(&xu, &gf).unwrap();
        worst_curl = worst_curl.max(c.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let pass = exact
        && worst_l <= 1e-12
        && worst_rowsum <= 1e-12
        && worst_quad >= -1e-12
        && worst_curl <= 1e-12;
    (
        pass,
        format!(
            "D=G^T and Omega*M=0 exact: {exact}; |L-M^T Xi^-2 M|={worst_l:.1e}; |L1|={worst_rowsum:.1e}; min x^T L x={worst_quad:.1e}; |curl grad|={worst_curl:.1e}"
        ),
    )
}

// ------------------------------------------------------------------ 4

fn matrix_error(a: &Mat3, b: &Mat3) -> f64 {
    (a - b).abs().max()
}

fn criterion_calculus() -> Outcome {
    let mut r = rng(4);
    let dims = [8, 8, 8];
    let sigma = random_sigma(&mut r);
    let x = block_complex(dims, sigma, StencilKind::Face6);
    let centroids = x.vertex_centroids();

    let a = Vec3::new(0.7, -1.3, 0.4);
    let f: Vec<f64> = centroids.iter().map(|p| a.dot(p)).collect();
    let gf = gradient(&x).unwrap().matvec(&f).unwrap();
    let mut grad_err = 0.0f64;
    for e in 0..x.edge_count() {
        let (i, j) = x.edge_endpoints(e);
        let d = centroids[j] - centroids[i];
        grad_err = grad_err.max((gf[e] - a.dot(&d) / d.norm()).abs());
    }

    let am = Mat3::new(0.3, -1.1, 0.5, 2.0, 0.1, -0.7, -0.4, 0.9, 1.6);
    let field: Vec<Vec3> = centroids.iter().map(|p| am * p).collect();
    let jac = jacobian(&x, &field).unwrap();
    let degrees = x.degrees();
    let jac_err = (0..x.vertex_count())
        .filter(|&v| degrees[v] == 6)
        .map(|v| matrix_error(&jac[v], &am))
        .fold(0.0, f64::max);

    // second differences on the grid itself are the oracle
    let q = Mat3::new(1.0, 0.3, -0.2, 0.3, -0.5, 0.6, -0.2, 0.6, 0.8);
    let quad: Vec<f64> = centroids.iter().map(|p| p.dot(&(q * p))).collect();
    let index: HashMap<Voxel, usize> = x
        .cloud()
        .voxels()
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let at = |v: Voxel, d: [i64; 3]| quad[index[&[v[0] + d[0], v[1] + d[1], v[2] + d[2]]]];
    let hess = hessian(&x, &quad).unwrap();
    let deep = deep_interior_vertices(&x, 6);
    let mut hess_rel = 0.0f64;
    let mut fd_vs_analytic = 0.0f64;
    let voxels = x.cloud().voxels();
    for (v, &voxel) in voxels.iter().enumerate().filter(|&(v, _)| deep[v]) {
        let mut fd = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut ei = [0; 3];
                let mut ej = [0; 3];
                ei[i] = 1;
                ej[j] = 1;
                fd[(i, j)] = if i == j {
                    (at(voxel, ei) - 2.0 * quad[v] + at(voxel, ei.map(|c| -c)))
                        / (sigma[i] * sigma[i])
                } else {
                    let pp = at(voxel, [ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]]);
                    let pm = at(voxel, [ei[0] - ej[0], ei[1] - ej[1], ei[2] - ej[2]]);
                    let mp = at(voxel, [ej[0] - ei[0], ej[1] - ei[1], ej[2] - ei[2]]);
                    let mm = at(voxel, [-ei[0] - ej[0], -ei[1] - ej[1], -ei[2] - ej[2]]);
                    (pp - pm - mp + mm) / (4.0 * sigma[i] * sigma[j])
                };
            }
        }
        fd_vs_analytic = fd_vs_analytic.max(matrix_error(&fd, &(2.0 * q)));
        hess_rel = hess_rel.max((hess[v] - fd).norm() / fd.norm());
    }

    // dyadic spacing keeps the covector sums exact
    let s = Vec3::new(0.5, 1.25, 2.0);
    let xb = block_complex([4, 3, 5], s, StencilKind::Face6);
    let volume: f64 = integral_volume(&xb).unwrap().iter().sum();
    let analytic_volume = 3.0 * 0.5 * 2.0 * 1.25 * 4.0 * 2.0;
    let path: Vec<Voxel> = vec![
        [0, 0, 0],
        [1, 0, 0],
        [2, 0, 0],
        [2, 1, 0],
        [2, 2, 0],
        [2, 2, 1],
        [3, 2, 1],
    ];
    let cloud = VoxelCloud::from_voxels(&path, s).unwrap();
    let xp = VoxelComplex::construct(&cloud, &Stencil::standard(StencilKind::Face6)).unwrap();
    let length: f64 = integral_line(&xp).unwrap().iter().sum();
    let analytic_length = 3.0 * 0.5 + 2.0 * 1.25 + 2.0;

    let pass = grad_err <= 1e-12
        && jac_err <= 1e-10
        && hess_rel <= 0.10
        && volume == analytic_volume
        && length == analytic_length
        && xp.edge_count() == path.len() - 1;
    (
        pass,
        format!(
            "grad err {grad_err:.1e}; Jacobian err {jac_err:.1e}; Hessian rel err {hess_rel:.1e} (FD oracle vs 2Q {fd_vs_analytic:.1e}); s3(1)={volume} vs {analytic_volume}; s1(1)={length} vs {analytic_length}"
        ),
    )
}

// ------------------------------------------------------------------ 5

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn criterion_sampling() -> Outcome {
    let radius = 1.0;
    let sigma = radius / 8.0;
    let s = Vec3::new(sigma, sigma, sigma);
    let mesh = icosphere(Point3::new(0.0137, -0.0219, 0.0071), radius, 4);
    let expected = 4.0 / 3.0 * std::f64::consts::PI * (radius / sigma).powi(3);
    let count = |mode| {
        let sampled = sample_volume_mesh(
            &mesh,
            &Frame::default(),
            s,
            &SamplingOptions::with_mode(mode),
        )
        .unwrap();
        topovox::voxelize::voxelate_point_cloud(&sampled.points, &Frame::default(), s)
            .unwrap()
            .len() as f64
    };
    let thin_ratio = count(SamplingMode::Thin) / expected;
    let conservative_ratio = count(SamplingMode::Conservative) / expected;

    let open = io::read_obj(&data("open_box.obj")).unwrap().mesh().unwrap();
    let open_result = sample_volume_mesh(
        &open,
        &Frame::default(),
        Vec3::new(0.25, 0.25, 0.25),
        &SamplingOptions::default(),
    );
    let rejected = matches!(&open_result, Err(e @ Error::NotClosed { .. }) if e.to_string().contains("boundary is not closed"));

    // voxel size chosen so the sampled grid is exactly n voxels (and n rays) per axis
    let coarse = icosphere(Point3::new(0.0137, -0.0219, 0.0071), 1.0, 2);
    let (mut size, mut calls, mut cells) = (Vec::new(), Vec::new(), Vec::new());
    let mut grids = Vec::new();
    for n in [8u64, 16, 32] {
        let h = 2.0 / (n - 1) as f64;
        let sampled = sample_volume_mesh(
            &coarse,
            &Frame::default(),
            Vec3::new(h, h, h),
            &SamplingOptions::with_mode(SamplingMode::Thin),
        )
        .unwrap();
        let per_axis = sampled.grid.dims.map(|d| d + 1);
        grids.push(per_axis == [n; 3] && sampled.stats.objects == 3 * n * n);
        size.push((n as f64).ln());
        calls.push((sampled.stats.solver_calls as f64).ln());
        cells.push(((per_axis[0] * per_axis[1] * per_axis[2]) as f64).ln());
    }
    let grids_exact = grids.iter().all(|&g| g);
    let solver_exponent = fit_slope(&size, &calls);
    let cells_exponent = fit_slope(&size, &cells);

    let pass = (thin_ratio - 1.0).abs() <= 0.10
        && rejected
        && grids_exact
        && (solver_exponent - 2.0).abs() <= 0.1;
    (
        pass,
        format!(
            "thin count/volume={thin_ratio:.3} (conservative {conservative_ratio:.3}, informational); open box rejected: {rejected}; solver-call exponent {solver_exponent:.3}, total-cells exponent {cells_exponent:.3}, grids 8/16/32 per axis: {grids_exact}"
        ),
    )
}

// ------------------------------------------------------------------ 6

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn criterion_determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut stdout = Vec::new();
    for d in &dirs {
        let out = Command::new(env!("CARGO_BIN_EXE_topovox"))
            .args(["run", "--input"])
            .arg(data("sphere.obj"))
            .args([
                "--kind",
                "surface",
                "--sigma",
                "0.125",
                "--cells",
                "--out-dir",
            ])
            .arg(d.path())
            .output()
            .unwrap();
        if !out.status.success() {
            return (
                false,
                format!("run failed: {}", String::from_utf8_lossy(&out.stderr)),
            );
        }
        stdout.push(out.stdout);
    }
    let (a, b) = (read_tree(dirs[0].path()), read_tree(dirs[1].path()));
    let identical = a == b && stdout[0] == stdout[1];
    let bytes: usize = a.values().map(Vec::len).sum();
    (
        identical,
        format!("{} files, {bytes} bytes compared", a.len()),
    )
}

// ------------------------------------------------------------------ 7

fn criterion_heat() -> Outcome {
    let x = block_complex([6, 6, 6], Vec3::new(1.0, 1.0, 1.0), StencilKind::Face6);
    let interior: Vec<bool> = x.degrees().iter().map(|&d| d == 6).collect();
    let f0: Vec<f64> = interior
        .iter()
        .map(|&i| if i { 1.0 } else { 0.0 })
        .collect();
    let bound = heat_dt_bound(&x).unwrap();
    let f = solve_heat(&x, &f0, 0.9 * bound, 1000).unwrap();
    let drift = (f.iter().sum::<f64>() - f0.iter().sum::<f64>()).abs();
    let guard =
        solve_heat(&x, &f0, bound, 1).is_err() && solve_heat(&x, &f0, 1.5 * bound, 1).is_err();
    (
        drift <= 1e-9 && guard,
        format!("sum drift {drift:.1e} over 1000 steps at dt=0.9*{bound:.4}; guard rejects dt >= bound: {guard}"),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("morton codes", criterion_morton),
        ("topology", criterion_topology),
        ("operator identities", criterion_operators),
        ("calculus exactness", criterion_calculus),
        ("sampling", criterion_sampling),
        ("determinism", criterion_determinism),
        ("heat", criterion_heat),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = run();
        println!(
            "criterion {}: {} [{name}] {detail}",
            n + 1,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failed.push(n + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
