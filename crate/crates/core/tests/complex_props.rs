use std::collections::{BTreeMap, BTreeSet, VecDeque};

use proptest::prelude::*;

use topovox::{Stencil, StencilKind, Vec3, Voxel, VoxelCloud, VoxelComplex};

fn voxel_subset() -> impl Strategy<Value = Vec<Voxel>> {
    prop::collection::btree_set([-2i64..3, -1i64..3, 0i64..4], 1..50)
        .prop_map(|s| s.into_iter().map(|v| [v[0], v[1], v[2]]).collect())
}

fn full_stencils() -> Vec<Stencil> {
    [
        StencilKind::Face6,
        StencilKind::SquareYZ,
        StencilKind::SquareZX,
        StencilKind::SquareXY,
        StencilKind::Cube8,
    ]
    .map(Stencil::standard)
    .to_vec()
}

fn add(v: Voxel, d: [i64; 3]) -> Voxel {
    [v[0] + d[0], v[1] + d[1], v[2] + d[2]]
}

/// Neighbour pairs under a maximum number of nonzero offset components.
fn oracle_edges(voxels: &[Voxel], max_nonzero: usize) -> BTreeSet<(Voxel, Voxel)> {
    let set: BTreeSet<Voxel> = voxels.iter().copied().collect();
    let mut out = BTreeSet::new();
    for &v in voxels {
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let nz = [dx, dy, dz].iter().filter(|&&c| c != 0).count();
                    if nz == 0 || nz > max_nonzero {
                        continue;
                    }
                    let w = add(v, [dx, dy, dz]);
                    if set.contains(&w) {
                        out.insert((v.min(w), v.max(w)));
                    }
                }
            }
        }
    }
    out
}

fn complex_edges(x: &VoxelComplex) -> BTreeSet<(Voxel, Voxel)> {
    let voxels = x.cloud().voxels();
    (0..x.edge_count())
        .map(|e| {
            let (s, d) = x.edge_endpoints(e);
            let (a, b) = (voxels[s], voxels[d]);
            (a.min(b), a.max(b))
        })
        .collect()
}

fn bfs_components(voxels: &[Voxel]) -> usize {
    let set: BTreeSet<Voxel> = voxels.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for &start in voxels {
        if !seen.insert(start) {
            continue;
        }
        count += 1;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for d in [
                [1, 0, 0],
                [-1, 0, 0],
                [0, 1, 0],
                [0, -1, 0],
                [0, 0, 1],
                [0, 0, -1],
            ] {
                let w = add(v, d);
                if set.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    count
}

fn is_zero_product(a: &topovox::SparseMatrix, b: &topovox::SparseMatrix) -> bool {
    a.multiply(b).unwrap().max_abs() == 0.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neighbour_stencils_match_brute_force(voxels in voxel_subset()) {
        let cloud = VoxelCloud::from_voxels(&voxels, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        for (kind, nz) in [(StencilKind::Face6, 1), (StencilKind::Edge18, 2), (StencilKind::Vertex26, 3)] {
            let x = VoxelComplex::construct(&cloud, &Stencil::standard(kind)).unwrap();
            prop_assert_eq!(complex_edges(&x), oracle_edges(&voxels, nz));
        }
    }

    #[test]
    fn ids_follow_morton_order(voxels in voxel_subset()) {
        let cloud = VoxelCloud::from_voxels(&voxels, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let x = VoxelComplex::construct_with(&cloud, &full_stencils()).unwrap();
        prop_assert_eq!(x.vertex_ids().keys(), cloud.codes());
        prop_assert!(x.edge_ids().keys().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(x.face_ids().keys().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(x.cell_ids().keys().windows(2).all(|w| w[0] < w[1]));
        for e in x.edge_ids().keys() {
            prop_assert!(e.source() < e.destination());
        }
    }

    #[test]
    fn boundary_of_boundary_vanishes(voxels in voxel_subset()) {
        let cloud = VoxelCloud::from_voxels(&voxels, Vec3::new(0.5, 1.0, 2.0)).unwrap();
        let x = VoxelComplex::construct_with(&cloud, &full_stencils()).unwrap();
        if x.face_count() > 0 {
            prop_assert!(is_zero_product(x.m_fe(), x.m_ev()));
            prop_assert_eq!(x.derived_face_edge().unwrap().to_dense(), x.m_fe().abs().to_dense());
        }
        if x.cell_count() > 0 {
            prop_assert!(is_zero_product(x.m_cf(), x.m_fe()));
        }
    }

    #[test]
    fn incidence_rows_have_the_right_shape(voxels in voxel_subset()) {
        let cloud = VoxelCloud::from_voxels(&voxels, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let x = VoxelComplex::construct_with(&cloud, &full_stencils()).unwrap();
        let check = |m: &topovox::SparseMatrix, count: usize, sum: f64| {
            let mut per_row: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
            for &(i, _, v) in m.entries() {
                let r = per_row.entry(i).or_default();
                r.0 += 1;
                r.1 += v;
            }
            per_row.len() == m.rows() && per_row.values().all(|&(n, s)| n == count && s == sum)
        };
        prop_assert!(check(x.m_ev(), 2, 0.0));
        prop_assert!(check(x.m_fv(), 4, 4.0));
        prop_assert!(check(x.m_fe(), 4, 0.0));
        prop_assert!(check(x.m_cv(), 8, 8.0));
        prop_assert!(check(x.m_cf(), 6, 0.0));
        prop_assert!(check(x.m_ce(), 12, 12.0));
    }

    #[test]
    fn squares_and_cubes_need_every_voxel(voxels in voxel_subset()) {
        let set: BTreeSet<Voxel> = voxels.iter().copied().collect();
        let cloud = VoxelCloud::from_voxels(&voxels, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let x = VoxelComplex::construct_with(&cloud, &full_stencils()).unwrap();
        let mut squares = 0;
        let mut cubes = 0;
        for &v in &voxels {
            for n in 0..3 {
                let (a, b) = ((n + 1) % 3, (n + 2) % 3);
                let mut ea = [0; 3];
                let mut eb = [0; 3];
                ea[a] = 1;
                eb[b] = 1;
                let corners = [v, add(v, ea), add(add(v, ea), eb), add(v, eb)];
                if corners.iter().all(|c| set.contains(c)) {
                    squares += 1;
                }
            }
            let all8 = (0..8).all(|m| set.contains(&add(v, [(m >> 2) & 1, (m >> 1) & 1, m & 1])));
            if all8 {
                cubes += 1;
            }
        }
        prop_assert_eq!(x.face_count(), squares);
        prop_assert_eq!(x.cell_count(), cubes);
    }

    #[test]
    fn components_match_breadth_first_search(voxels in voxel_subset()) {
        let cloud = VoxelCloud::from_voxels(&voxels, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let x = VoxelComplex::construct(&cloud, &Stencil::standard(StencilKind::Face6)).unwrap();
        prop_assert_eq!(x.component_count(), bfs_components(&voxels));
    }

    #[test]
    fn solid_block_is_contractible(m in 1i64..5, n in 1i64..5, o in 1i64..5) {
        let mut voxels = Vec::new();
        for i in 0..m {
            for j in 0..n {
                for k in 0..o {
                    voxels.push([i, j, k]);
                }
            }
        }
        let cloud = VoxelCloud::from_voxels(&voxels, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let x = VoxelComplex::construct_with(&cloud, &full_stencils()).unwrap();
        prop_assert_eq!(x.euler_characteristic().chi(), 1);
    }
}
