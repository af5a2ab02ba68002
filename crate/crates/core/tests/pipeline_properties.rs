mod common;

use proptest::prelude::*;
use topofilt::complexes::{order_complex_skeleton, vertex_map_of_monotone};
use topofilt::finite_space::coarsening_map;
use topofilt::homology::{build_chain_complex, homology_basis, induced_matrix};
use topofilt::metric::DistanceMatrix;
use topofilt::pipeline::{build_stages, persistence, structure_maps, PipelineConfig};
use topofilt::poset::conjugate_map;

use common::{clustered_cloud, cloud_with_duplicates, config, zero_distance_classes};

fn input() -> impl Strategy<Value = (DistanceMatrix, PipelineConfig)> {
    (2usize..10, any::<u64>(), prop::sample::select(vec![0.0, 1.0, 2.0, 3.0]), any::<bool>()).prop_map(
        |(n, seed, lambda, clustered)| {
            let d = if clustered { clustered_cloud(n, seed, 0.01) } else { cloud_with_duplicates(n, seed) };
            (d, config(1 + usize::from(n > 2), lambda, 2))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn core_and_quotient_have_the_same_betti_numbers((d, cfg) in input()) {
        let f = build_stages(&d, &cfg).unwrap();
        for s in &f.stages {
            let data = s.data();
            let full = order_complex_skeleton(&data.quotient.poset, Some(cfg.max_degree + 1), usize::MAX).unwrap();
            let betti = homology_basis(&build_chain_complex(&full, cfg.field), cfg.max_degree).betti();
            prop_assert_eq!(betti, data.betti());
        }
    }

    #[test]
    fn conjugated_maps_compose_on_homology((d, cfg) in input()) {
        let f = build_stages(&d, &cfg).unwrap();
        let m = f.stages.len();
        prop_assume!(m >= 3);
        let (i, j, k) = (0, m / 2, m - 1);
        let (a, b, c) = (f.stages[i].data(), f.stages[j].data(), f.stages[k].data());
        let on_homology = |x: &topofilt::pipeline::StageCore, y: &topofilt::pipeline::StageCore| {
            let g = conjugate_map(&coarsening_map(&x.quotient, &y.quotient).unwrap(), &x.core, &y.core).unwrap();
            let v = vertex_map_of_monotone(&g);
            induced_matrix(&v, (&x.complex, &x.homology), (&y.complex, &y.homology)).unwrap()
        };
        let direct = on_homology(a, c);
        let composed = on_homology(a, b).then(&on_homology(b, c));
        prop_assert_eq!(direct, composed);
    }

    #[test]
    fn extremes_hold((d, cfg) in input()) {
        let f = build_stages(&d, &cfg).unwrap();
        prop_assert_eq!(f.stages[0].data().homology.betti_at(0), zero_distance_classes(&d));
        prop_assert_eq!(f.stages.last().unwrap().data().quotient.poset.len(), 1);
        let r = persistence(&d, &cfg).unwrap();
        prop_assert_eq!(r.diagrams.degrees[0].infinite_count(), 1);
        for h in &r.diagrams.degrees[1..] {
            prop_assert_eq!(h.infinite_count(), 0);
        }
    }

    #[test]
    fn structure_maps_have_matching_shapes((d, cfg) in input()) {
        let f = build_stages(&d, &cfg).unwrap();
        for (i, m) in structure_maps(&f).unwrap().iter().enumerate() {
            for (n, mat) in m.degrees.iter().enumerate() {
                prop_assert_eq!(mat.cols(), f.stages[i].data().homology.betti_at(n));
                prop_assert_eq!(mat.rows(), f.stages[i + 1].data().homology.betti_at(n));
            }
        }
    }

    #[test]
    fn relabelling_points_changes_nothing((d, cfg) in input(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..d.len()).collect();
        perm.shuffle(&mut common::rng(seed));
        let a = persistence(&d, &cfg).unwrap().diagrams;
        let b = persistence(&d.permuted(&perm), &cfg).unwrap().diagrams;
        prop_assert_eq!(a.to_json(), b.to_json());
    }
}
