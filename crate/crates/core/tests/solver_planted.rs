//! End-to-end solver behavior on planted partitions.
//!
//! These run with debug assertions on, so the per-iteration monotonicity
//! checks inside the solvers are active throughout.

use gfsc_core::fusion;
use gfsc_core::graph;
use gfsc_core::metrics;
use gfsc_core::solver::{gf, gfsc, gfsc_full, InitStrategy, SolverOptions};
use gfsc_core::spectral;
use gfsc_core::synth::generate_synthetic;
use gfsc_core::types::{ConsensusGraph, Hyperparams};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

#[test]
fn gfsc_recovers_noise_free_planted_partitions() {
    for seed in [0u64, 1] {
        let data = generate_synthetic(90, 2, 3, 0.0, seed)
            .unwrap()
            .normalized()
            .unwrap();
        let params = Hyperparams {
            k: 3,
            seed,
            ..Default::default()
        };
        let res = gfsc(&data, &params).unwrap();
        assert_eq!(res.acc, Some(1.0), "seed {seed}");
        assert!(res.trace.warnings.is_empty(), "{:?}", res.trace.warnings);
    }
}

#[test]
fn warm_started_gfsc_reaches_exactly_k_components() {
    for seed in [0u64, 1, 2] {
        let data = generate_synthetic(90, 2, 3, 0.0, seed)
            .unwrap()
            .normalized()
            .unwrap();
        let params = Hyperparams {
            gamma: 0.5,
            k: 3,
            seed,
            ..Default::default()
        };
        let opts = SolverOptions {
            init: InitStrategy::WarmStart,
            ..Default::default()
        };
        let (res, state) = gfsc_full(&data, &params, &opts).unwrap();
        assert_eq!(res.acc, Some(1.0), "seed {seed}");
        let comps = spectral::count_components(&state.s, spectral::DEFAULT_EIG_TOL).unwrap();
        assert_eq!(comps, 3, "seed {seed}");
        assert_eq!(res.trace.components.map(|c| c.spectral), Some(3));
        assert!(res.trace.converged);
    }
}

#[test]
fn gf_recovers_planted_partitions_under_noise() {
    let data = generate_synthetic(90, 2, 3, 0.2, 7)
        .unwrap()
        .normalized()
        .unwrap();
    let params = Hyperparams {
        k: 3,
        seed: 7,
        ..Default::default()
    };
    let res = gf(&data, &params).unwrap();
    assert!(res.acc.unwrap() >= 0.95, "acc = {:?}", res.acc);
}

#[test]
fn consensus_divergence_is_a_numerics_error() {
    // gamma comparable to beta makes the inverse-distance feedback diverge
    let data = generate_synthetic(60, 2, 3, 0.0, 0)
        .unwrap()
        .normalized()
        .unwrap();
    let params = Hyperparams {
        alpha: 1.0,
        beta: 1.0,
        gamma: 50.0,
        k: 3,
        seed: 0,
        ..Default::default()
    };
    match gfsc(&data, &params) {
        Err(gfsc_core::Error::Numerics(msg)) => {
            assert!(msg.contains("gamma"), "unexpected message: {msg}");
        }
        other => panic!("expected a numerics error, got {other:?}"),
    }
}

#[test]
fn spectral_clustering_on_a_geometric_graph() {
    // three Gaussian blobs turned into an RBF affinity graph
    let mut rng = ChaCha20Rng::seed_from_u64(23);
    let noise = Normal::new(0.0, 0.5).unwrap();
    let centers = [[0.0, 0.0], [8.0, 0.0], [0.0, 8.0]];
    let n_per = 20;
    let mut points = Vec::new();
    let mut truth = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..n_per {
            points.push([
                center[0] + noise.sample(&mut rng),
                center[1] + noise.sample(&mut rng),
            ]);
            truth.push(c);
        }
    }
    let points: Vec<[f64; 2]> = points;
    let n = points.len();
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d2 =
                    (points[i][0] - points[j][0]).powi(2) + (points[i][1] - points[j][1]).powi(2);
                w[[i, j]] = (-d2 / 8.0).exp();
            }
        }
    }
    let s = ConsensusGraph::new(w).unwrap();
    let labels = spectral::spectral_clustering(&s, 3, 5).unwrap();
    let acc = metrics::accuracy(&labels, &truth).unwrap();
    assert!(acc >= 0.95, "acc = {acc}");
}

#[test]
fn average_graph_baseline_recovers_planted_partitions() {
    let data = generate_synthetic(90, 3, 3, 0.1, 3)
        .unwrap()
        .normalized()
        .unwrap();
    let truth = data.labels().unwrap().to_vec();
    let singles: Vec<_> = data
        .views()
        .iter()
        .enumerate()
        .map(|(v, x)| graph::learn_single_view_graph(x, 1.0, v).unwrap())
        .collect();
    let avg = fusion::average_graph(&singles).unwrap();
    let labels = spectral::spectral_clustering(&avg, 3, 3).unwrap();
    let acc = metrics::accuracy(&labels, &truth).unwrap();
    assert!(acc >= 0.95, "acc = {acc}");
}

#[test]
fn zero_noise_gfsc_under_kmeans_duplicates() {
    // with identical samples per cluster the embedding rows are duplicated;
    // duplicated samples must share a label
    let data = generate_synthetic(30, 2, 3, 0.0, 5)
        .unwrap()
        .normalized()
        .unwrap();
    let params = Hyperparams {
        k: 3,
        seed: 5,
        ..Default::default()
    };
    let res = gfsc(&data, &params).unwrap();
    let truth = data.labels().unwrap();
    for i in 0..30 {
        for j in 0..30 {
            if truth[i] == truth[j] {
                assert_eq!(res.labels[i], res.labels[j]);
            }
        }
    }
}

#[test]
fn rng_reuse_does_not_leak_between_runs() {
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let x = Array2::from_shape_fn((4, 20), |_| rng.gen_range(-1.0..1.0));
    let data = gfsc_core::types::MultiViewDataset::new(vec![x], None, None)
        .unwrap()
        .normalized()
        .unwrap();
    let params = Hyperparams {
        k: 2,
        seed: 4,
        max_iter: 20,
        ..Default::default()
    };
    let a = gfsc(&data, &params).unwrap();
    let _ = metrics::kmeans(&Array2::from_elem((5, 2), 1.0), 2, 123, 3).unwrap();
    let b = gfsc(&data, &params).unwrap();
    assert_eq!(a.labels, b.labels);
}
