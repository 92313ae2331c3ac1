//! Acceptance suite: one test per criterion, each printing a PASS/SKIP line
//! (run with `--nocapture` to see them).
//!
//! Criteria 1 and 2 need the UCI Multiple Features dataset, which is not
//! redistributed; they locate it via `GFSC_DATA_DIR` (a directory holding
//! `manifest.toml`) or `data/digits/manifest.toml` at the repository root,
//! and print a SKIP line when it is absent. `scripts/fetch_digits.sh`
//! materializes the dataset. Everything else runs hermetically.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gfsc_cli::{run_experiment, ExperimentConfig, Method};
use gfsc_core::linalg::fro_norm;
use gfsc_core::solver::{gfsc_full, InitStrategy, SolverOptions};
use gfsc_core::synth::generate_synthetic;
use gfsc_core::types::{ConsensusGraph, Hyperparams, ViewGraph, ViewWeights};
use gfsc_core::{dataset, fusion, graph, metrics, spectral};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

// ---------------------------------------------------------------- support

fn seeded(rows: usize, cols: usize, seed: u64, lo: f64, hi: f64) -> Array2<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(lo..hi))
}

fn digits_manifest() -> Option<PathBuf> {
    if let Ok(dir) = std::env::var("GFSC_DATA_DIR") {
        for candidate in [
            Path::new(&dir).join("manifest.toml"),
            Path::new(&dir).join("digits").join("manifest.toml"),
        ] {
            if candidate.exists() {
                return Some(candidate);
            }
        }
    }
    let repo_default =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/digits/manifest.toml");
    repo_default.exists().then_some(repo_default)
}

fn skip_digits(criterion: &str) {
    println!(
        "[SKIP] {criterion}: Digits dataset not found (set GFSC_DATA_DIR or run \
         scripts/fetch_digits.sh; see README)"
    );
}

/// Benchmark-tuned Digits parameters.
fn digits_params(seed: u64) -> Hyperparams {
    Hyperparams {
        alpha: 1e-4,
        beta: 1.0,
        gamma: 1e-4,
        k: 10,
        max_iter: 200,
        tol: 1e-3,
        seed,
    }
}

/// Gradient descent on the per-view block objective; independent of the
/// closed-form solve path.
fn gd_view_minimizer(
    x: &Array2<f64>,
    s: Option<&Array2<f64>>,
    alpha: f64,
    beta_w: f64,
) -> Array2<f64> {
    let n = x.ncols();
    let g = x.t().dot(x);
    let step = 1.0 / (2.0 * (fro_norm(&g) + alpha + beta_w));
    let mut z = Array2::zeros((n, n));
    for _ in 0..500_000 {
        let grad = graph::view_block_gradient(x, &z, s, alpha, beta_w);
        if fro_norm(&grad) < 1e-11 {
            break;
        }
        z.scaled_add(-step, &grad);
    }
    z
}

/// Gradient descent on the consensus block objective.
fn gd_consensus_minimizer(
    zs: &[ViewGraph],
    w: &ViewWeights,
    p: &Array2<f64>,
    beta: f64,
    gamma: f64,
) -> Array2<f64> {
    let n = zs[0].n();
    let step = 1.0 / (2.0 * beta * w.sum() + 1.0);
    let mut s = Array2::zeros((n, n));
    for _ in 0..500_000 {
        let mut grad = Array2::zeros((n, n));
        for (z, &wv) in zs.iter().zip(w.as_slice()) {
            grad.scaled_add(-2.0 * beta * wv, &(z.matrix() - &s));
        }
        grad.scaled_add(0.5 * gamma, &p.t());
        if fro_norm(&grad) < 1e-11 {
            break;
        }
        s.scaled_add(-step, &grad);
    }
    s
}

/// Cyclic Jacobi eigenvalue iteration; independent of the faer-backed
/// eigensolver used by the implementation.
fn jacobi_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[[p, q]].abs() < 1e-20 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * m[[p, q]]);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (aip, aiq) = (m[[i, p]], m[[i, q]]);
                    m[[i, p]] = c * aip - s * aiq;
                    m[[i, q]] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let (api, aqi) = (m[[p, i]], m[[q, i]]);
                    m[[p, i]] = c * api - s * aqi;
                    m[[q, i]] = s * api + c * aqi;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| m[[i, i]]).collect();
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    d
}

fn brute_force_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let kp = pred.iter().max().unwrap() + 1;
    let kt = truth.iter().max().unwrap() + 1;
    let k = kp.max(kt);
    let mut counts = vec![vec![0usize; k]; k];
    for (&p, &t) in pred.iter().zip(truth) {
        counts[p][t] += 1;
    }
    let mut cols: Vec<usize> = (0..k).collect();
    let mut best = 0usize;
    fn permute(cols: &mut Vec<usize>, at: usize, counts: &[Vec<usize>], best: &mut usize) {
        if at == cols.len() {
            let sum: usize = (0..cols.len()).map(|r| counts[r][cols[r]]).sum();
            *best = (*best).max(sum);
            return;
        }
        for i in at..cols.len() {
            cols.swap(at, i);
            permute(cols, at + 1, counts, best);
            cols.swap(at, i);
        }
    }
    permute(&mut cols, 0, &counts, &mut best);
    best as f64 / pred.len() as f64
}

// --------------------------------------------------------------- criteria

/// Criterion 1: Digits reproduction. With the benchmark-tuned
/// (alpha, beta, gamma) = (1e-4, 1, 1e-4), ten seeded repetitions of GFSC
/// on UCI Multiple Features (n=2000, t=6, k=10) must reach mean Acc >= 0.80
/// and mean NMI >= 0.78.
#[test]
fn criterion_1_digits_reproduction() {
    let Some(manifest_path) = digits_manifest() else {
        skip_digits("criterion 1 (Digits reproduction)");
        return;
    };
    let data = dataset::load_dataset(&manifest_path).unwrap();
    assert_eq!(data.n(), 2000);
    assert_eq!(data.t(), 6);
    let mut config = ExperimentConfig::new("digits", Method::Gfsc, digits_params(0));
    config.repetitions = 10;
    let outcome = run_experiment(&config, &data).unwrap();
    let acc = outcome.report.summary.acc.unwrap();
    let nmi = outcome.report.summary.nmi.unwrap();
    println!(
        "[{}] criterion 1 (Digits reproduction): mean Acc {:.4} (>= 0.80), mean NMI {:.4} (>= 0.78)",
        if acc.mean >= 0.80 && nmi.mean >= 0.78 { "PASS" } else { "FAIL" },
        acc.mean,
        nmi.mean
    );
    assert!(acc.mean >= 0.80, "mean Acc {:.4} < 0.80", acc.mean);
    assert!(nmi.mean >= 0.78, "mean NMI {:.4} < 0.78", nmi.mean);
}

/// Criterion 2: baseline ordering on Digits. Mean accuracy must order
/// GFSC > GF > SC(Ave), with each gap allowed to shrink to zero but not
/// invert by more than 2 points.
#[test]
fn criterion_2_baseline_ordering() {
    let Some(manifest_path) = digits_manifest() else {
        skip_digits("criterion 2 (baseline ordering)");
        return;
    };
    let data = dataset::load_dataset(&manifest_path).unwrap();
    let mut mean_acc = |method: Method| -> f64 {
        let mut config = ExperimentConfig::new("digits", method, digits_params(0));
        config.repetitions = 10;
        run_experiment(&config, &data)
            .unwrap()
            .report
            .summary
            .acc
            .unwrap()
            .mean
    };
    let gfsc = mean_acc(Method::Gfsc);
    let gf = mean_acc(Method::Gf);
    let scave = mean_acc(Method::ScAve);
    let ok = gfsc >= gf - 0.02 && gf >= scave - 0.02;
    println!(
        "[{}] criterion 2 (baseline ordering): GFSC {:.4} vs GF {:.4} vs SC(Ave) {:.4}",
        if ok { "PASS" } else { "FAIL" },
        gfsc,
        gf,
        scave
    );
    assert!(
        gfsc >= gf - 0.02,
        "GFSC {gfsc:.4} inverts GF {gf:.4} by > 2 points"
    );
    assert!(
        gf >= scave - 0.02,
        "GF {gf:.4} inverts SC(Ave) {scave:.4} by > 2 points"
    );
}

/// Criterion 3: planted partitions. On noise-free 3-cluster 2-view data
/// (n = 150), GFSC must reach Acc = 1.0 with a consensus graph of exactly 3
/// connected components for 5 distinct seeds, in under 10 seconds total.
/// Uses the warm-start initialization (the exposed option); under random
/// init the inverse-distance weights freeze residual cross-cluster edges.
#[test]
fn criterion_3_planted_partition() {
    let started = Instant::now();
    let opts = SolverOptions {
        init: InitStrategy::WarmStart,
        ..Default::default()
    };
    for seed in 0..5u64 {
        let data = generate_synthetic(150, 2, 3, 0.0, seed)
            .unwrap()
            .normalized()
            .unwrap();
        let params = Hyperparams {
            gamma: 0.5,
            k: 3,
            seed,
            ..Default::default()
        };
        let (res, state) = gfsc_full(&data, &params, &opts).unwrap();
        assert_eq!(res.acc, Some(1.0), "seed {seed}: Acc {:?}", res.acc);
        let comps = spectral::count_components(&state.s, spectral::DEFAULT_EIG_TOL).unwrap();
        assert_eq!(comps, 3, "seed {seed}: {comps} components");
    }
    let elapsed = started.elapsed();
    println!(
        "[{}] criterion 3 (planted partitions): 5/5 seeds at Acc 1.0 with 3 components in {:.2?}",
        if elapsed.as_secs_f64() < 10.0 {
            "PASS"
        } else {
            "FAIL"
        },
        elapsed
    );
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "took {elapsed:.2?} (limit 10 s)"
    );
}

/// Criterion 4: the closed-form view and consensus updates match
/// independent numerical minimizers within 1e-6 relative error on 20 seeded
/// 8x8 instances.
#[test]
fn criterion_4_closed_form_oracles() {
    for seed in 0..20u64 {
        let x = seeded(8, 8, 40_000 + seed, -1.0, 1.0);
        let s_raw = seeded(8, 8, 41_000 + seed, -0.5, 1.0);
        let (alpha, beta, w) = (0.3 + 0.02 * seed as f64, 1.1, 0.8);
        let g = x.t().dot(&x);
        let closed = graph::solve_view_update(&g, Some(&s_raw), alpha, beta * w).unwrap();
        let oracle = gd_view_minimizer(&x, Some(&s_raw), alpha, beta * w);
        let rel = fro_norm(&(&closed - &oracle)) / fro_norm(&oracle).max(1.0);
        assert!(rel < 1e-6, "view update, seed {seed}: {rel}");

        let zs = vec![
            ViewGraph::new(seeded(8, 8, 42_000 + seed, 0.0, 1.0), 0).unwrap(),
            ViewGraph::new(seeded(8, 8, 43_000 + seed, 0.0, 1.0), 1).unwrap(),
        ];
        let weights = ViewWeights::new(vec![0.5, 1.5]).unwrap();
        let raw = seeded(8, 8, 44_000 + seed, 0.0, 2.0);
        let mut p = Array2::zeros((8, 8));
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    p[[i, j]] = 0.5 * (raw[[i, j]] + raw[[j, i]]);
                }
            }
        }
        let (beta_s, gamma_s) = (0.9, 0.7);
        let closed_s = fusion::update_consensus(&zs, &weights, &p, beta_s, gamma_s).unwrap();
        let oracle_s = gd_consensus_minimizer(&zs, &weights, &p, beta_s, gamma_s);
        let rel_s = fro_norm(&(closed_s.matrix() - &oracle_s)) / fro_norm(&oracle_s).max(1.0);
        assert!(rel_s < 1e-6, "consensus update, seed {seed}: {rel_s}");
    }
    println!("[PASS] criterion 4 (closed-form oracles): 20/20 instances within 1e-6");
}

/// Criterion 5: analytic gradients match central finite differences within
/// relative 1e-4, and the pre-clip view update and the consensus update
/// zero their gradients to norm < 1e-8 * scale.
#[test]
fn criterion_5_stationarity_and_gradients() {
    // finite differences
    for seed in 0..5u64 {
        let x = seeded(5, 5, 50_000 + seed, -1.0, 1.0);
        let s_raw = seeded(5, 5, 51_000 + seed, -0.5, 1.0);
        let z = seeded(5, 5, 52_000 + seed, -0.5, 0.5);
        let (alpha, beta_w) = (0.6, 1.2);
        let analytic = graph::view_block_gradient(&x, &z, Some(&s_raw), alpha, beta_w);
        let h = 1e-5;
        for i in 0..5 {
            for j in 0..5 {
                let mut zp = z.clone();
                zp[[i, j]] += h;
                let mut zm = z.clone();
                zm[[i, j]] -= h;
                let fd = (graph::view_block_objective(&x, &zp, Some(&s_raw), alpha, beta_w)
                    - graph::view_block_objective(&x, &zm, Some(&s_raw), alpha, beta_w))
                    / (2.0 * h);
                let rel = (analytic[[i, j]] - fd).abs() / analytic[[i, j]].abs().max(1.0);
                assert!(rel < 1e-4, "seed {seed} ({i},{j}): relative error {rel}");
            }
        }
    }

    // stationarity of both closed forms
    for seed in 0..10u64 {
        let x = seeded(6, 9, 53_000 + seed, -1.0, 1.0);
        let s_raw = seeded(9, 9, 54_000 + seed, -0.5, 1.0);
        let (alpha, beta_w) = (0.5, 1.4);
        let g = x.t().dot(&x);
        let z = graph::solve_view_update(&g, Some(&s_raw), alpha, beta_w).unwrap();
        let grad = graph::view_block_gradient(&x, &z, Some(&s_raw), alpha, beta_w);
        let scale = 1.0 + fro_norm(&g);
        assert!(
            fro_norm(&grad) < 1e-8 * scale,
            "seed {seed}: view gradient {}",
            fro_norm(&grad)
        );

        let zs = vec![
            ViewGraph::new(seeded(9, 9, 55_000 + seed, 0.0, 1.0), 0).unwrap(),
            ViewGraph::new(seeded(9, 9, 56_000 + seed, 0.0, 1.0), 1).unwrap(),
        ];
        let weights = ViewWeights::new(vec![0.4, 2.0]).unwrap();
        let raw = seeded(9, 9, 57_000 + seed, 0.0, 2.0);
        let mut p = Array2::zeros((9, 9));
        for i in 0..9 {
            for j in 0..9 {
                if i != j {
                    p[[i, j]] = 0.5 * (raw[[i, j]] + raw[[j, i]]);
                }
            }
        }
        let (beta, gamma) = (1.3, 0.6);
        let s = fusion::update_consensus(&zs, &weights, &p, beta, gamma).unwrap();
        let s_scale = 1.0 + fro_norm(s.matrix());
        for col in 0..9 {
            let grad =
                fusion::consensus_column_gradient(&zs, s.matrix(), &p, beta, gamma, &weights, col);
            let norm: f64 = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm < 1e-8 * s_scale, "seed {seed} col {col}: {norm}");
        }
    }
    println!("[PASS] criterion 5 (stationarity and gradients): finite differences and zero-gradient checks hold");
}

/// Criterion 6: spectral invariants. Ky Fan equality within 1e-8 (checked
/// against an independent Jacobi eigensolver), the component/zero-eigenvalue
/// correspondence for 1..=5 blocks, and the embedding-distance identity.
#[test]
fn criterion_6_spectral_invariants() {
    // Ky Fan on random PSD matrices, with an independent eigenvalue oracle
    for seed in 0..5u64 {
        let a = seeded(10, 10, 60_000 + seed, -1.0, 1.0);
        let psd = a.t().dot(&a);
        let (vals, vecs) = gfsc_core::linalg::sym_eigh(&psd).unwrap();
        let jacobi = jacobi_eigenvalues(&psd);
        for (x, y) in vals.iter().zip(jacobi.iter()) {
            assert!(
                (x - y).abs() < 1e-8 * (1.0 + y.abs()),
                "eigenvalue mismatch {x} vs {y}"
            );
        }
        for k in [1usize, 3, 7] {
            let f = vecs.slice(ndarray::s![.., ..k]).to_owned();
            let trace = spectral::laplacian_quadratic(&f, &psd);
            let want: f64 = jacobi.iter().take(k).sum();
            assert!(
                (trace - want).abs() < 1e-8 * (1.0 + want.abs()),
                "Ky Fan, seed {seed}, k {k}: {trace} vs {want}"
            );
        }
    }

    // Theorem 1 on constructed block graphs, c = 1..=5
    for c in 1..=5usize {
        let mut rng = ChaCha20Rng::seed_from_u64(61_000 + c as u64);
        let sizes: Vec<usize> = (0..c).map(|_| rng.gen_range(2..6)).collect();
        let n: usize = sizes.iter().sum();
        let mut w = Array2::<f64>::zeros((n, n));
        let mut offset = 0;
        for &size in &sizes {
            for i in 0..size {
                for j in (i + 1)..size {
                    let v = 0.3 + rng.gen_range(0.0..1.0);
                    w[[offset + i, offset + j]] = v;
                    w[[offset + j, offset + i]] = v;
                }
            }
            offset += size;
        }
        let s = ConsensusGraph::new(w).unwrap();
        let counts =
            spectral::component_counts(&s, spectral::DEFAULT_EIG_TOL, spectral::DEFAULT_EDGE_TOL)
                .unwrap();
        assert_eq!(counts.spectral, c, "spectral count for {c} blocks");
        assert_eq!(counts.traversal, c, "traversal count for {c} blocks");
    }

    // sum_ij (1/2) |F_i - F_j|^2 s_ij == Tr(F^T L F)
    for seed in 0..5u64 {
        let raw = seeded(8, 8, 62_000 + seed, -0.5, 1.0);
        let s = ConsensusGraph::new(raw).unwrap();
        let q = spectral::build_laplacian(&s);
        let f = spectral::update_embedding(&q, 3).unwrap();
        let p = f.pairwise_sq_distances();
        let lhs = 0.5 * (&p * s.symmetrized()).sum();
        let rhs = spectral::laplacian_quadratic(f.matrix(), q.laplacian());
        assert!(
            (lhs - rhs).abs() < 1e-8 * (1.0 + rhs.abs()),
            "identity, seed {seed}: {lhs} vs {rhs}"
        );
    }
    println!("[PASS] criterion 6 (spectral invariants): Ky Fan, block components, and the distance identity hold");
}

/// Criterion 7: metric oracles. Hungarian accuracy equals brute-force
/// assignment on 100 random label pairs with k <= 6; NMI and purity match
/// hand-computed values on the fixed examples.
#[test]
fn criterion_7_metric_oracles() {
    let mut rng = ChaCha20Rng::seed_from_u64(70_000);
    for case in 0..100 {
        let k = rng.gen_range(2..=6usize);
        let n = rng.gen_range(k..40);
        let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let fast = metrics::accuracy(&pred, &truth).unwrap();
        let brute = brute_force_accuracy(&pred, &truth);
        assert!(
            (fast - brute).abs() < 1e-12,
            "case {case}: Hungarian {fast} vs brute force {brute}"
        );
    }

    // fixed examples
    assert!((metrics::accuracy(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap() - 0.75).abs() < 1e-15);
    assert!((metrics::purity(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap() - 0.75).abs() < 1e-15);
    assert!((metrics::nmi(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(metrics::nmi(&[0, 0, 0], &[0, 1, 2]).unwrap(), 0.0);
    assert_eq!(metrics::nmi(&[0, 0, 0], &[0, 0, 0]).unwrap(), 1.0);
    let third = metrics::purity(&[0; 6], &[0, 0, 1, 1, 2, 2]).unwrap();
    assert!((third - 1.0 / 3.0).abs() < 1e-15);
    println!(
        "[PASS] criterion 7 (metric oracles): 100/100 Hungarian matches and fixed examples hold"
    );
}

/// Criterion 8: determinism. Two runs with identical config and seed
/// produce byte-identical reports.
#[test]
fn criterion_8_determinism() {
    let data = generate_synthetic(45, 2, 3, 0.1, 9)
        .unwrap()
        .normalized()
        .unwrap();
    let params = Hyperparams {
        k: 3,
        seed: 17,
        ..Default::default()
    };
    let mut config = ExperimentConfig::new("synthetic", Method::Gfsc, params);
    config.repetitions = 4;

    let dir = tempfile::TempDir::new().unwrap();
    let path_a = dir.path().join("a.json");
    let path_b = dir.path().join("b.json");
    run_experiment(&config, &data)
        .unwrap()
        .report
        .save(&path_a)
        .unwrap();
    run_experiment(&config, &data)
        .unwrap()
        .report
        .save(&path_b)
        .unwrap();
    let bytes_a = std::fs::read(&path_a).unwrap();
    let bytes_b = std::fs::read(&path_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "reports differ between identical runs");

    // and the loaded report reproduces all recorded numbers exactly
    let report = gfsc_cli::Report::load(&path_a).unwrap();
    assert_eq!(report.to_json().unwrap().as_bytes(), &bytes_a[..]);
    println!("[PASS] criterion 8 (determinism): byte-identical reports across runs");
}
