//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the report lines are always shown.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use topofilt::bits::BitMatrix;
use topofilt::complexes::{crosscut_complex, order_complex, SimplicialComplex, SimplicialVertexMap};
use topofilt::field::FieldSpec;
use topofilt::finite_space::{close_transitively, t0_quotient};
use topofilt::homology::{build_chain_complex, check_chain_map, homology_basis, induced_matrix, naive_betti_oracle};
use topofilt::metric::{load_distance_matrix, perturb, DistanceMatrix, PerturbationSpec};
use topofilt::persistence::{interleaving_witness, interval_multiplicities, rank_function, reconstructed_rank};
use topofilt::pipeline::{
    build_stages, modules, persistence, persistence_of, stability_experiment, stage_map, structure_maps, PipelineConfig,
};
use topofilt::poset::{crosscut_valid, maximal_elements, Poset, DEFAULT_SUBSET_CHECK_CAP};

use common::{cloud_with_duplicates, clouds_with_loops, clustered_cloud, config, random_cloud, rng, zero_distance_classes};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:.2?}, limit {limit:?}"))?;
    Ok(spent)
}

/// Minimum spanning tree edge weights by Kruskal with union-find.
fn kruskal_weights(d: &DistanceMatrix) -> Vec<f64> {
    let n = d.len();
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((d.get(i, j), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut out = Vec::with_capacity(n - 1);
    for (w, i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            out.push(w);
        }
    }
    out
}

fn single_linkage() -> Outcome {
    let start = Instant::now();
    for seed in 0..20 {
        let d = random_cloud(40, 1000 + seed);
        let r = persistence(&d, &config(2, 0.0, 0)).map_err(|e| e.to_string())?;
        let h0 = &r.diagrams.degrees[0];
        let deaths = h0.finite_deaths();
        let mst = kruskal_weights(&d);
        ensure(deaths.len() == mst.len(), || format!("seed {seed}: {} deaths vs {} MST edges", deaths.len(), mst.len()))?;
        let worst = deaths.iter().zip(&mst).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(worst <= 1e-12, || format!("seed {seed}: deaths differ from MST weights by {worst}"))?;
        ensure(h0.infinite_count() == 1, || format!("seed {seed}: {} infinite bars", h0.infinite_count()))?;
    }
    let spent = within(Duration::from_secs(10), start)?;
    Ok(format!("20 clouds of 40 points match Kruskal exactly, {spent:.2?}"))
}

fn stability() -> Outcome {
    let start = Instant::now();
    let mut worst_ratio: f64 = 0.0;
    let mut with_loops = 0;
    let mut trials = 0;
    for (lambda, factor) in [(0.0, 1.0), (2.0, 4.0)] {
        let cfg = config(2, lambda, 1);
        // uniform clouds rarely produce loops; clustered ones exercise degree 1
        let mut inputs = vec![random_cloud(20, 2000), random_cloud(20, 2001)];
        if lambda > 0.0 {
            inputs.extend(clouds_with_loops(20, 2, 0, &cfg));
        }
        for (idx, d) in inputs.iter().enumerate() {
            if persistence(d, &cfg).map_err(|e| e.to_string())?.diagrams.degrees[1].total() > 0 {
                with_loops += 1;
            }
            for eps in [0.01, 0.05] {
                let r = stability_experiment(d, &cfg, eps, 25, 77 + idx as u64).map_err(|e| e.to_string())?;
                let bound = factor * eps;
                ensure(r.bound == bound, || format!("bound {} expected {bound}", r.bound))?;
                for (n, &dist) in r.max_distance.iter().enumerate() {
                    ensure(dist <= bound + 1e-9, || format!("lambda={lambda} eps={eps} input {idx} degree {n}: {dist} > {bound}"))?;
                    worst_ratio = worst_ratio.max(dist / bound);
                }
                ensure(r.pass, || "report flagged a violation".into())?;
                trials += r.trials;
            }
        }
    }
    let spent = within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{trials} trials within L*eps, {with_loops} inputs with H_1 (max distance/bound {worst_ratio:.3}), {spent:.2?}"
    ))
}

fn core_reduction_invariance() -> Outcome {
    let mut r = rng(3);
    let mut with_loops = 0;
    for i in 0..50 {
        let n = r.gen_range(2..=15);
        let lambda = [0.0, 0.5, 1.0, 2.0, 3.0][i % 5];
        let k = r.gen_range(1..n.min(3));
        let d = if i % 2 == 0 { cloud_with_duplicates(n, 3000 + i as u64) } else { clustered_cloud(n, 3000 + i as u64, 0.01) };
        let with = config(k, lambda, 2);
        let without = PipelineConfig { reduce_cores: false, ..with };
        let a = persistence(&d, &with).map_err(|e| e.to_string())?.diagrams;
        let b = persistence(&d, &without).map_err(|e| e.to_string())?.diagrams;
        ensure(a == b, || format!("input {i} (n={n}, lambda={lambda}): diagrams differ"))?;
        with_loops += usize::from(!a.degrees[1].is_empty());
    }
    for (i, d) in clouds_with_loops(12, 4, 500, &config(2, 2.0, 2)).iter().enumerate() {
        let with = config(2, 2.0, 2);
        let a = persistence(d, &with).map_err(|e| e.to_string())?.diagrams;
        let b = persistence(d, &PipelineConfig { reduce_cores: false, ..with }).map_err(|e| e.to_string())?.diagrams;
        ensure(a == b, || format!("loop input {i}: diagrams differ"))?;
        with_loops += 1;
    }
    Ok(format!("54 inputs ({with_loops} with H_1) give identical diagrams with and without beat-point reduction"))
}

fn random_poset(r: &mut impl Rng, m: usize) -> Poset {
    let density = r.gen_range(0.1..0.7);
    let order: Vec<usize> = {
        let mut v: Vec<usize> = (0..m).collect();
        v.shuffle(r);
        v
    };
    let mut rel = BitMatrix::identity(m);
    for i in 0..m {
        for j in i + 1..m {
            if r.gen_bool(density) {
                rel.set(order[i], order[j]);
            }
        }
    }
    t0_quotient(&close_transitively(&rel)).poset
}

fn full_betti(k: &SimplicialComplex, field: FieldSpec) -> Vec<usize> {
    let top = k.dimension().unwrap_or(0);
    homology_basis(&build_chain_complex(k, field), top).betti()
}

fn trimmed(mut b: Vec<usize>) -> Vec<usize> {
    while b.len() > 1 && b.last() == Some(&0) {
        b.pop();
    }
    b
}

fn crosscut_scope() -> Outcome {
    let mut r = rng(4);
    let f2 = FieldSpec::default();
    let (mut valid, mut invalid) = (0, 0);
    for i in 0..200 {
        let m = r.gen_range(1..=8);
        let p = random_poset(&mut r, m);
        let cut = maximal_elements(&p).map_err(|e| e.to_string())?;
        let validity = crosscut_valid(&p, &cut, DEFAULT_SUBSET_CHECK_CAP).map_err(|e| e.to_string())?;
        if !validity.is_valid() {
            invalid += 1;
            continue;
        }
        valid += 1;
        let order = trimmed(full_betti(&order_complex(&p, usize::MAX).unwrap(), f2));
        let cross = trimmed(full_betti(&crosscut_complex(&p, &cut, usize::MAX).unwrap(), f2));
        ensure(order == cross, || format!("poset {i}: order {order:?} vs crosscut {cross:?}"))?;
    }
    let diamond = Poset::from_relations(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
    let cut = maximal_elements(&diamond).unwrap();
    let validity = crosscut_valid(&diamond, &cut, DEFAULT_SUBSET_CHECK_CAP).unwrap();
    ensure(!validity.is_valid(), || "diamond crosscut reported valid".into())?;
    let order = trimmed(full_betti(&order_complex(&diamond, 100).unwrap(), f2));
    let cross = full_betti(&crosscut_complex(&diamond, &cut, 100).unwrap(), f2);
    ensure(order == vec![1, 1], || format!("diamond order Betti {order:?}"))?;
    ensure(cross == vec![1, 0], || format!("diamond crosscut Betti {cross:?}"))?;
    ensure(valid > 0, || "no valid crosscuts were generated".into())?;
    Ok(format!("{valid} valid posets agree ({invalid} invalid skipped); diamond: invalid, (1,1) vs (1,0)"))
}

fn random_complex(r: &mut impl Rng, vertices: usize) -> SimplicialComplex {
    let facets: Vec<Vec<usize>> = (0..r.gen_range(1..=8))
        .map(|_| {
            let size = r.gen_range(1..=5.min(vertices));
            let mut all: Vec<usize> = (0..vertices).collect();
            all.shuffle(r);
            all.truncate(size);
            all
        })
        .collect();
    SimplicialComplex::closure_of(vertices, facets, None, usize::MAX).unwrap()
}

fn homology_oracle() -> Outcome {
    let mut r = rng(5);
    let fields = [FieldSpec::new(2).unwrap(), FieldSpec::new(3).unwrap()];
    let mut maps_checked = 0;
    for i in 0..200 {
        let v = r.gen_range(1..=12);
        let k = random_complex(&mut r, v);
        for &field in &fields {
            let ours = full_betti(&k, field);
            let oracle = naive_betti_oracle(&k, field).map_err(|e| e.to_string())?;
            ensure(ours == oracle, || format!("complex {i} over F_{}: {ours:?} vs oracle {oracle:?}", field.prime()))?;
        }
        // a random vertex map into a complex that contains every image simplex
        let w = r.gen_range(1..=12);
        let assignment: Vec<usize> = (0..v).map(|_| r.gen_range(0..w)).collect();
        let mut facets: Vec<Vec<usize>> = k.facets().iter().map(|s| s.iter().map(|&x| assignment[x]).collect()).collect();
        facets.extend(random_complex(&mut r, w).facets());
        let target = SimplicialComplex::closure_of(w, facets, None, usize::MAX).unwrap();
        let map = SimplicialVertexMap::new(&k, &target, assignment).map_err(|e| e.to_string())?;
        for &field in &fields {
            let top = k.dimension().unwrap_or(0);
            check_chain_map(&map, &k, &target, field, top).map_err(|e| format!("complex {i}: {e}"))?;
            let hs = homology_basis(&build_chain_complex(&k, field), top);
            let ht = homology_basis(&build_chain_complex(&target, field), top);
            induced_matrix(&map, (&k, &hs), (&target, &ht)).map_err(|e| format!("complex {i}: {e}"))?;
            maps_checked += 1;
        }
    }
    Ok(format!("200 complexes agree with the dense oracle over F_2 and F_3; {maps_checked} chain maps commute"))
}

fn small_inputs() -> Vec<(DistanceMatrix, PipelineConfig)> {
    let mut r = rng(6);
    let mut out = Vec::new();
    for i in 0..16u64 {
        let n = r.gen_range(2..=10);
        let lambda = [0.0, 1.0, 2.0, 3.0][i as usize % 4];
        let field = [2, 3, 5][i as usize % 3];
        let mut cfg = config(1 + (i as usize % 2).min(n - 2), lambda, 2);
        cfg.field = FieldSpec::new(field).unwrap();
        out.push((cloud_with_duplicates(n, 6000 + i), cfg));
    }
    let tri = load_distance_matrix(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap().matrix;
    out.push((tri, config(1, 0.0, 2)));
    let diamond = load_distance_matrix(&[
        vec![0.0, 2.0, 1.0, 1.0],
        vec![2.0, 0.0, 1.0, 1.0],
        vec![1.0, 1.0, 0.0, 5.0],
        vec![1.0, 1.0, 5.0, 0.0],
    ])
    .unwrap()
    .matrix;
    out.push((diamond, config(3, 1.0, 2)));
    out.push((load_distance_matrix(&[vec![0.0]]).unwrap().matrix, config(1, 0.0, 2)));
    out
}

fn rank_decomposition() -> Outcome {
    let mut r = rng(7);
    let (mut module_count, mut composites) = (0, 0);
    for (idx, (d, cfg)) in small_inputs().into_iter().enumerate() {
        let f = build_stages(&d, &cfg).map_err(|e| e.to_string())?;
        let maps = structure_maps(&f).map_err(|e| e.to_string())?;
        for (n, module) in modules(&f, &maps).map_err(|e| e.to_string())?.iter().enumerate() {
            let rank = rank_function(module);
            let mu = interval_multiplicities(&rank).map_err(|e| format!("input {idx} degree {n}: {e}"))?;
            let m = module.dims().len();
            for i in 0..m {
                for j in i..m {
                    let (want, got) = (rank.get(i, j), reconstructed_rank(&mu, i, j));
                    ensure(want == got, || format!("input {idx} degree {n}: r({i},{j}) = {want}, reconstructed {got}"))?;
                }
            }
            module_count += 1;
        }
        let stages = f.stages.len();
        for _ in 0..4 {
            if stages < 2 {
                break;
            }
            let i = r.gen_range(0..stages - 1);
            let k = r.gen_range(i + 1..stages);
            let direct = stage_map(&f, i, k).map_err(|e| e.to_string())?;
            let product = maps[i..k].iter().skip(1).fold(maps[i].clone(), |acc, m| acc.then(m));
            ensure(direct == product, || format!("input {idx}: map {i}->{k} differs from the product"))?;
            composites += 1;
        }
    }
    Ok(format!("{module_count} modules decompose exactly with mu >= 0; {composites} composites equal products"))
}

fn extremes() -> Outcome {
    let mut checked = 0;
    let mut inputs = small_inputs();
    for i in 0..10u64 {
        inputs.push((cloud_with_duplicates(14, 7000 + i), config(2, [0.0, 2.0][i as usize % 2], 2)));
    }
    for (idx, (d, cfg)) in inputs.iter().enumerate() {
        let f = build_stages(d, cfg).map_err(|e| e.to_string())?;
        let first = f.stages[0].data();
        let classes = zero_distance_classes(d);
        ensure(first.quotient.poset.len() == classes, || format!("input {idx}: first stage has {} classes, expected {classes}", first.quotient.poset.len()))?;
        ensure(first.homology.betti_at(0) == classes, || format!("input {idx}: first stage Betti_0 {}", first.homology.betti_at(0)))?;
        let last = f.stages.last().unwrap().data();
        ensure(last.quotient.poset.len() == 1, || format!("input {idx}: final stage has {} classes", last.quotient.poset.len()))?;
        let mut point = vec![0; cfg.max_degree + 1];
        point[0] = 1;
        ensure(last.betti() == point, || format!("input {idx}: final stage Betti {:?}", last.betti()))?;
        let r = persistence_of(&f).map_err(|e| e.to_string())?;
        for (n, diagram) in r.diagrams.degrees.iter().enumerate() {
            let want = usize::from(n == 0);
            ensure(diagram.infinite_count() == want, || format!("input {idx}: {} infinite bars in degree {n}", diagram.infinite_count()))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} inputs: discrete start, contractible end, one infinite H_0 bar"))
}

fn permutation_invariance() -> Outcome {
    let mut r = rng(8);
    for i in 0..20u64 {
        let n = r.gen_range(3..=15);
        let d = if i % 2 == 0 { cloud_with_duplicates(n, 8000 + i) } else { clustered_cloud(n, 8000 + i, 0.01) };
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let cfg = config(r.gen_range(1..3.min(n)), [0.0, 1.0, 2.0][i as usize % 3], 2);
        let a = persistence(&d, &cfg).map_err(|e| e.to_string())?.diagrams;
        let b = persistence(&d.permuted(&perm), &cfg).map_err(|e| e.to_string())?.diagrams;
        ensure(a.to_json() == b.to_json(), || format!("instance {i}: JSON artifacts differ"))?;
        ensure(a.to_csv() == b.to_csv(), || format!("instance {i}: CSV artifacts differ"))?;
    }
    Ok("20 relabelled instances give byte-identical JSON and CSV".into())
}

fn interleaving() -> Outcome {
    let mut r = rng(9);
    let mut successes = 0;
    let loop_cfg = config(2, 2.0, 2);
    let loopy = clouds_with_loops(12, 5, 100, &loop_cfg);
    for trial in 0..25u64 {
        let n = r.gen_range(4..=12);
        let lambda = [0.0, 2.0, 1.0][trial as usize % 3];
        let eps = [0.01, 0.05, 0.1][r.gen_range(0..3)];
        let (d, cfg) = if trial % 5 == 4 {
            (loopy[trial as usize / 5].clone(), loop_cfg)
        } else {
            (random_cloud(n, 9000 + trial), config(2.min(n - 1), lambda, 2))
        };
        let moved = perturb(&d, &PerturbationSpec::new(eps, 90 + trial).unwrap());
        let fa = build_stages(&d, &cfg).map_err(|e| e.to_string())?;
        let fb = build_stages(&moved, &cfg).map_err(|e| e.to_string())?;
        let delta = cfg.criterion.lipschitz_constant() * eps;
        let report = interleaving_witness(&fa, &fb, delta).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(report.success(), || format!("trial {trial}: {:?}", report.first_violation))?;
        successes += 1;
    }
    Ok(format!("{successes}/25 witnesses at delta = L*eps succeed (5 inputs carry H_1)"))
}

fn desk_scale() -> Outcome {
    let d = random_cloud(60, 10_000);
    let start = Instant::now();
    let r = persistence(&d, &config(2, 2.0, 2)).map_err(|e| e.to_string())?;
    let _artifact = r.diagrams.to_json();
    let spent = within(Duration::from_secs(60), start)?;
    Ok(format!(
        "n=60: {} stages ({} distinct), {} simplices, points per degree {:?}, {spent:.2?}",
        r.summary.stages, r.summary.distinct_stages, r.summary.total_simplices, r.summary.points_per_degree
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("single-linkage equivalence", single_linkage),
        ("stability bound", stability),
        ("core reduction invariance", core_reduction_invariance),
        ("crosscut scope", crosscut_scope),
        ("homology oracle", homology_oracle),
        ("rank decomposition", rank_decomposition),
        ("extremes", extremes),
        ("permutation invariance", permutation_invariance),
        ("interleaving witness", interleaving),
        ("desk-scale performance", desk_scale),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("acceptance {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
